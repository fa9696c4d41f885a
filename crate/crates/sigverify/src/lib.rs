//! Online signature verification toolkit.
//!
//! Implements the complete verification pipeline for pen-tablet
//! signatures: nine-channel trajectory features, db4 wavelet / DCT
//! preprocessing, PCA dimensionality reduction, an SMO-trained SVM
//! classifier, and FAR/FRR/EER evaluation reports.
//!
//! The crate is usable as a library (see the `examples/` directory for one
//! runnable program per capability) and ships a thin `sigverify` binary
//! with `synth`, `train`, `verify` and `evaluate` subcommands.

pub mod config;
pub mod datasets;
pub mod eval;
pub mod features;
pub mod pipeline;
pub mod rng;
pub mod signal;
pub mod svm;
pub mod transforms;
