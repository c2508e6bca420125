//! Numerical laboratory for MAP and 0-1 loss Bayes estimators over upper
//! semicontinuous densities.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod argmax;
pub mod cli;
pub mod convergence;
pub mod counterexample;
pub mod density;
pub mod error;
pub mod estimators;
pub mod format;
mod geometry;
pub mod mollifier;
pub mod posterior;
pub mod search;

pub use argmax::{ArgmaxResult, Maximizer};
pub use density::{Density, GridDensity, Piece, PieceKind, SearchBox, Tail, UscDensity1D};
pub use error::{Error, Result};
pub use estimators::{approx_gap, bayes_estimate, map_estimate, ApproxGap, LossSpec};
pub use mollifier::{ball_integral, mollified_sup, BallObjective};
pub use search::SearchOptions;
pub use convergence::{check_conditions, hypo_diagnostic, sweep, ConditionReport, HypoReport, SweepTrace, Verdict};
pub use counterexample::CounterexampleSpec;
pub use posterior::{posterior, BayesModel, Likelihood};
