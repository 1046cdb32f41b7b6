//! Continuous-time quantum capacities of multi-stage direct quantum transducers.
//!
//! A transducer is modeled as a chain of `N + 2` bosonic modes, the first and
//! last coupled to external ports. The [`chain`] module turns chain parameters
//! into a frequency-dependent conversion efficiency `eta(omega)`, [`capacity`]
//! integrates per-frequency capacities of the resulting loss channel, and
//! [`designs`] provides the maximally flat and uniform parameter families.
//! [`optimize`] runs exhaustive grid searches over the design space and
//! [`validation`] bundles the cross-checks used by the command-line tool.

// NaN-rejecting checks are written as `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod chain;
pub mod designs;
pub mod error;
pub mod optimize;
mod poly;
pub mod quadrature;
pub mod special;
pub mod validation;

pub use capacity::{
    integrate_capacity, mf_closed_form, Bound, CapacityEstimate, CapacityReport, ChannelPoint, DegradableForm, Method,
    Protocol, QuadratureConfig,
};
pub use chain::{conversion_efficiency, ResponseEvaluator, TransducerParams};
pub use designs::{maximally_flat_params, uniform_params, LadderNetwork, MFDesign};
pub use error::{Error, Result};
pub use optimize::{Objective, SearchResult, SearchSpace};
pub use validation::ValidationReport;
