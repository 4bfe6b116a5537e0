//! File formats, synthetic measurement campaigns, error evaluation, SVG
//! plots and the `mmloc` command line on top of [`mmloc_core`].
// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dataset;
pub mod error;
pub mod formats;
pub mod localize;
pub mod map;
pub mod observations;
pub mod plot;

pub use error::{Error, Result};
pub use mmloc_core as core;
