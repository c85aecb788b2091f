// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

//! Run manifests: the fully resolved configuration plus run metadata, in the
//! same `key = value` format as the input so a manifest can be run again.

use std::path::{Path, PathBuf};

use anyhow::Context;
use detune_core::ExperimentConfig;

use crate::config::{render_config, FrequencyConvention};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub config: ExperimentConfig,
    /// Convention the original inputs were written in; values here are angular.
    pub input_convention: FrequencyConvention,
    pub runtime_s: f64,
    pub output: PathBuf,
    pub plot: Option<PathBuf>,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut out = String::from("# detune run manifest\n");
        out.push_str(&format!("version = {VERSION}\n"));
        out.push_str(&format!("command = {}\n", self.command));
        out.push_str(&format!("runtime_s = {:.3}\n", self.runtime_s));
        out.push_str(&format!("output = {}\n", self.output.display()));
        if let Some(p) = &self.plot {
            out.push_str(&format!("plot = {}\n", p.display()));
        }
        out.push_str(&format!("input_frequency_convention = {}\n", self.input_convention.name()));
        out.push_str(&render_config(&self.config));
        out
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, self.render()).with_context(|| format!("cannot write {}", path.display()))
    }
}
