// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

//! Curve files: header `t_us,mean,sem`, one row per sample, nine significant
//! digits in scientific notation, LF line endings.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};
use detune_core::DecayCurve;

pub const HEADER: &str = "t_us,mean,sem";

pub fn format_curve(curve: &DecayCurve) -> String {
    let mut out = String::with_capacity(48 * (curve.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for ((t, m), s) in curve.times.iter().zip(&curve.mean).zip(&curve.sem) {
        writeln!(out, "{t:.8e},{m:.8e},{s:.8e}").unwrap();
    }
    out
}

pub fn parse_curve(text: &str) -> anyhow::Result<DecayCurve> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        Some(h) => bail!("expected header `{HEADER}`, got `{h}`"),
        None => bail!("empty file, expected header `{HEADER}`"),
    }
    let mut curve = DecayCurve::default();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            bail!("row {}: expected 3 fields, got {}", i + 2, fields.len());
        }
        let num = |s: &str| -> anyhow::Result<f64> {
            s.trim().parse().with_context(|| format!("row {}: `{s}` is not a number", i + 2))
        };
        curve.times.push(num(fields[0])?);
        curve.mean.push(num(fields[1])?);
        curve.sem.push(num(fields[2])?);
    }
    Ok(curve)
}

pub fn write_curve_csv(curve: &DecayCurve, path: &Path) -> anyhow::Result<()> {
    std::fs::write(path, format_curve(curve)).with_context(|| format!("cannot write {}", path.display()))
}

pub fn read_curve_csv(path: &Path) -> anyhow::Result<DecayCurve> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_curve(&text).with_context(|| format!("in {}", path.display()))
}
