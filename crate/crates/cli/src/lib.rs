//! Experiment runner for `decaylab`: a catalog of reproducible decay
//! experiments emitting CSV traces and JSON reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod experiments;
pub mod output;
pub mod params;
