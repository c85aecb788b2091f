// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

//! File formats, configuration and parallel ensembles around `detune-core`.

pub mod config;
pub mod csv;
pub mod ensemble;
pub mod manifest;
pub mod plot;

pub use config::{parse_config, ConfigError, FrequencyConvention, RawConfig, RunConfig};
pub use csv::{read_curve_csv, write_curve_csv};
pub use ensemble::{resolve_workers, run_parallel};
pub use manifest::RunManifest;
