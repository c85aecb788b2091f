// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;

/// Errors raised by the simulation kernel.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A numeric parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The requested combination of scheme options is inconsistent.
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    /// A magnetometry protocol was requested outside its regime of validity.
    #[error("protocol validity: {0}")]
    ProtocolValidity(String),

    /// A decay curve carries no usable decay information.
    #[error("unfittable curve: {0}")]
    Unfittable(String),

    /// The sinusoid fit found no oscillation.
    #[error("fit failure: {0}")]
    FitFailure(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
