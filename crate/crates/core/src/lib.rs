//! Negative type of finite metric and semi-metric spaces.
//!
//! A space `(X, d)` has `p`-negative type when
//! `Σ_{i,j} d(x_i, x_j)^p η_i η_j ≤ 0` for every zero-sum weight vector `η`.
//! This crate tests that property (and its strict form) spectrally, finds the
//! maximal such `p`, measures how strict it is through the negative-type gap
//! `Γ`, evaluates the closed forms at `p = 0`, the lower bound `ζ(n, 𝔇)` with
//! its extremal bipartite spaces, and the 1-gap of weighted trees. The
//! [`oracle`] module holds brute-force checks used to cross-validate all of it.

pub mod bound;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod gap;
pub mod io;
pub mod metric;
pub mod negative_type;
pub mod oracle;
pub mod trees;

pub use bound::Bound;
pub use bounds::{construct_extremal, strictness_report, zeta, ZetaReport};
pub use error::{Error, Result};
pub use gap::{
    closed_form_zero_gap_simplex, gap_value, is_extreme_simplex, min_gap_over_loads, negative_type_gap, zero_gap,
    GapBreakdown, GapOptions, GapResult, LoadVector, Method, Simplex,
};
pub use metric::{build_space, power_matrix, rescale_to_unit_min, scaled_diameter, Mode, PowerMatrix, SemiMetricSpace};
pub use negative_type::{
    check_negative_type, check_strict_negative_type, max_negative_type, qform, Certificate, MaxTypeResult, Verdict,
    Violation,
};
pub use trees::{tree_metric, tree_one_gap, WeightedTree};
