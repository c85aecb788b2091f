// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

//! gnuplot scripts for curve files.

use std::path::Path;

use anyhow::Context;
use detune_core::DecayModel;

/// An analytic curve drawn over the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlay {
    pub model: DecayModel,
    pub t2: f64,
    pub floor: f64,
}

impl Overlay {
    fn expression(&self) -> String {
        let envelope = match self.model {
            DecayModel::Gaussian => format!("exp(-(x/{t2})**2)", t2 = self.t2),
            DecayModel::Exponential => format!("exp(-x/{t2})", t2 = self.t2),
        };
        format!("{f} + (1 - {f})*{envelope}", f = self.floor)
    }
}

/// Script plotting mean with sem error bars from `csv`, plus an optional overlay.
pub fn plot_script(csv: &Path, title: &str, overlay: Option<&Overlay>) -> String {
    let csv = csv.display().to_string().replace('\'', "''");
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set title '{}'\n", title.replace('\'', "''")));
    s.push_str("set xlabel 't (us)'\nset ylabel 'fidelity'\nset key bottom left\n");
    s.push_str(&format!(
        "plot '{csv}' skip 1 using 1:2:3 with yerrorbars pointtype 7 pointsize 0.4 title 'mean +/- sem'"
    ));
    if let Some(o) = overlay {
        s.push_str(&format!(
            ", \\\n     {} with lines linewidth 2 title '{} T2 = {:.4} us'",
            o.expression(),
            o.model.name(),
            o.t2
        ));
    }
    s.push_str("\npause mouse close\n");
    s
}

pub fn write_plot_script(path: &Path, csv: &Path, title: &str, overlay: Option<&Overlay>) -> anyhow::Result<()> {
    std::fs::write(path, plot_script(csv, title, overlay)).with_context(|| format!("cannot write {}", path.display()))
}
