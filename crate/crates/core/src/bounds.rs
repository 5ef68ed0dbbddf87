//! The lower bound `ζ(n, 𝔇)` on the maximal negative type and the extremal
//! bipartite spaces that attain it.
//!
//! With `Γ = Γ^0 = ½(1/⌊n/2⌋ + 1/⌈n/2⌉)` and scaled diameter `𝔇 > 1`,
//!
//! ```text
//! ζ = ln(1 / (1 − Γ)) / ln 𝔇
//! ```
//!
//! Every `n`-point space with scaled diameter `𝔇` has `p`-negative type on
//! `[0, ζ]` and strict `p`-negative type on `[0, ζ)`. When `𝔇 = 1` the space
//! is a multiple of the discrete metric and has strict type for every `p`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bound::Bound;
use crate::error::{Error, Result};
use crate::gap::zero_gap;
use crate::metric::{scaled_diameter, Mode, SemiMetricSpace};

/// `[0, upper)` or `[0, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: Bound,
    pub upper_closed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaReport {
    pub n: usize,
    pub diameter_ratio: f64,
    pub gamma0: f64,
    pub zeta: Bound,
    /// Exponents with guaranteed `p`-negative type.
    pub type_interval: Interval,
    /// Exponents with guaranteed strict `p`-negative type.
    pub strict_interval: Interval,
    /// Metric spaces with `𝔇 > 2`: ζ is a lower bound with no matching construction.
    pub lower_bound_only: bool,
}

/// `ζ(n, 𝔇)`; unbounded when `𝔇 = 1`.
pub fn zeta(n: usize, diameter_ratio: f64) -> Result<Bound> {
    if n < 3 {
        return Err(Error::TooFewPoints { n, min: 3 });
    }
    if !(diameter_ratio >= 1.0) || !diameter_ratio.is_finite() {
        return Err(Error::InvalidRatio(diameter_ratio));
    }
    if diameter_ratio == 1.0 {
        return Ok(Bound::Unbounded);
    }
    let gamma = zero_gap(n)?;
    Ok(Bound::Finite(-(1.0 - gamma).ln() / diameter_ratio.ln()))
}

/// Collects `𝔇`, `Γ^0` and `ζ` for a space with at least three points.
pub fn strictness_report(space: &SemiMetricSpace) -> Result<ZetaReport> {
    let n = space.n();
    if n < 3 {
        return Err(Error::TooFewPoints { n, min: 3 });
    }
    let diameter_ratio = scaled_diameter(space)?;
    let gamma0 = zero_gap(n)?;
    let z = zeta(n, diameter_ratio)?;
    Ok(ZetaReport {
        n,
        diameter_ratio,
        gamma0,
        zeta: z,
        type_interval: Interval { lower: 0.0, upper: z, upper_closed: !z.is_unbounded() },
        strict_interval: Interval { lower: 0.0, upper: z, upper_closed: false },
        lower_bound_only: space.mode() == Mode::Metric && diameter_ratio > 2.0,
    })
}

/// Complete bipartite space on `⌊n/2⌋` a-vertices and `⌈n/2⌉` b-vertices:
/// cross distances 1, same-side distances `diameter_ratio`.
///
/// Its maximal negative type is exactly `ζ(n, diameter_ratio)`. Above a
/// ratio of 2 the triangle inequality fails, so only semi-metric mode is
/// accepted there.
pub fn construct_extremal(n: usize, diameter_ratio: f64, mode: Mode) -> Result<SemiMetricSpace> {
    if n < 3 {
        return Err(Error::TooFewPoints { n, min: 3 });
    }
    if !(diameter_ratio > 1.0) || !diameter_ratio.is_finite() {
        return Err(Error::InvalidRatio(diameter_ratio));
    }
    if mode == Mode::Metric && diameter_ratio > 2.0 {
        return Err(Error::RatioNeedsSemiMetric(diameter_ratio));
    }
    let q = n / 2;
    let d = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else if (i < q) == (j < q) {
            diameter_ratio
        } else {
            1.0
        }
    });
    let labels = (1..=q).map(|j| format!("a{j}")).chain((1..=n - q).map(|i| format!("b{i}"))).collect();
    SemiMetricSpace::from_matrix(d, mode)?.with_labels(labels)
}
