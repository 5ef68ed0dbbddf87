//! Classical `p`-negative type tests.
//!
//! A space has `p`-negative type when `Σ_{i,j} d(x_i,x_j)^p η_i η_j ≤ 0` for
//! every real vector `η` with `Σ η_i = 0`, and strict `p`-negative type when
//! the inequality is strict for all nonzero such `η`. For a finite space it is
//! enough to test the full vertex set, since a subset inequality is the same
//! form with zeros in the unused coordinates. Both tests therefore reduce to
//! the sign of the power matrix restricted to the hyperplane `Σ η = 0`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::bound::Bound;
use crate::error::{Error, Result};
use crate::metric::{power_matrix, PowerMatrix, SemiMetricSpace};

/// Default relative eigenvalue tolerance.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-9;
/// Default bisection width on `p`.
pub const DEFAULT_BISECTION_TOL: f64 = 1e-6;
/// Upper bracket cap for [`max_negative_type`].
pub const MAX_EXPONENT: f64 = 64.0;

/// Why a vector certifies failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    /// The form is positive at `η`: ordinary negative type fails.
    Positive,
    /// The form is zero (within tolerance) at a nonzero `η`: strictness fails.
    Null,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Eigenvalues of the form restricted to `Σ η = 0`, ascending, with the
    /// absolute tolerance they were compared against.
    ProjectedSpectrum { eigenvalues: Vec<f64>, tolerance: f64 },
    /// A zero-sum, unit-length `η` and the form value there.
    ViolatingVector { eta: Vec<f64>, value: f64, tolerance: f64, violation: Violation },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub certificate: Certificate,
}

impl Verdict {
    /// Re-evaluates a violating vector under [`qform`] and confirms its claim.
    pub fn recheck(&self, space: &SemiMetricSpace, p: f64) -> Result<bool> {
        match &self.certificate {
            Certificate::ProjectedSpectrum { .. } => Ok(true),
            Certificate::ViolatingVector { eta, tolerance, violation, .. } => {
                let sum: f64 = eta.iter().sum();
                let norm: f64 = eta.iter().map(|x| x * x).sum::<f64>().sqrt();
                if sum.abs() > 1e-9 * norm.max(1.0) || norm == 0.0 {
                    return Ok(false);
                }
                let value = qform(space, p, eta)?;
                Ok(match violation {
                    Violation::Positive => value > *tolerance,
                    Violation::Null => value.abs() <= *tolerance,
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxTypeResult {
    /// Bracket midpoint, or unbounded when type holds up to [`MAX_EXPONENT`].
    pub p_max: Bound,
    /// Final bracket: type holds at `lo` and fails at `hi`.
    pub bracket: (f64, f64),
    pub tolerance: f64,
    /// Failure certificate at `hi`, when bounded.
    pub certificate: Option<Verdict>,
}

/// `Σ_{i,j} d_ij^p η_i η_j` over ordered pairs. Does not require `Σ η = 0`.
pub fn qform(space: &SemiMetricSpace, p: f64, eta: &[f64]) -> Result<f64> {
    let n = space.n();
    if eta.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: eta.len() });
    }
    let pm = power_matrix(space, p)?;
    Ok(form_value(&pm, eta))
}

pub(crate) fn form_value(pm: &PowerMatrix, eta: &[f64]) -> f64 {
    let n = eta.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            acc += pm.a[(i, j)] * eta[i] * eta[j];
        }
    }
    2.0 * acc
}

/// Orthonormal basis of `{η : Σ η = 0}` as the columns of an `n × (n-1)` matrix.
///
/// Column `k` is `(1, …, 1, -(k+1), 0, …) / sqrt((k+1)(k+2))` with `k+1` ones.
pub fn zero_sum_basis(n: usize) -> DMatrix<f64> {
    let cols = n.saturating_sub(1);
    let mut v = DMatrix::zeros(n, cols);
    for k in 0..cols {
        let m = (k + 1) as f64;
        let s = (m * (m + 1.0)).sqrt();
        for i in 0..=k {
            v[(i, k)] = 1.0 / s;
        }
        v[(k + 1, k)] = -m / s;
    }
    v
}

struct Restricted {
    eigenvalues: DVector<f64>,
    /// Eigenvectors mapped back to `R^n`, one per column.
    vectors: DMatrix<f64>,
    tolerance: f64,
}

fn restricted_spectrum(space: &SemiMetricSpace, p: f64, tol: f64) -> Result<Restricted> {
    if p < 0.0 || p.is_nan() {
        return Err(Error::NegativeExponent(p));
    }
    if !(tol > 0.0) {
        return Err(Error::NonpositiveTolerance(tol));
    }
    let pm = power_matrix(space, p)?;
    let n = space.n();
    let tolerance = tol * pm.scale().max(f64::MIN_POSITIVE);
    if n < 2 {
        return Ok(Restricted {
            eigenvalues: DVector::zeros(0),
            vectors: DMatrix::zeros(n, 0),
            tolerance,
        });
    }
    let basis = zero_sum_basis(n);
    let restricted = basis.transpose() * &pm.a * &basis;
    let restricted = (&restricted + restricted.transpose()) * 0.5;
    let eig = SymmetricEigen::new(restricted);
    let vectors = &basis * &eig.eigenvectors;
    Ok(Restricted { eigenvalues: eig.eigenvalues, vectors, tolerance })
}

fn sorted(values: &DVector<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

fn argmax(values: &DVector<f64>) -> usize {
    let mut best = 0;
    for (i, &x) in values.iter().enumerate() {
        if x > values[best] {
            best = i;
        }
    }
    best
}

fn violating(r: &Restricted, space: &SemiMetricSpace, p: f64, idx: usize, violation: Violation) -> Result<Verdict> {
    let eta: Vec<f64> = r.vectors.column(idx).iter().copied().collect();
    let value = qform(space, p, &eta)?;
    Ok(Verdict {
        holds: false,
        certificate: Certificate::ViolatingVector { eta, value, tolerance: r.tolerance, violation },
    })
}

/// Tests `p`-negative type: every restricted eigenvalue is at most
/// `tol × (largest power-matrix entry)`.
pub fn check_negative_type(space: &SemiMetricSpace, p: f64, tol: f64) -> Result<Verdict> {
    let r = restricted_spectrum(space, p, tol)?;
    if r.eigenvalues.is_empty() {
        return Ok(Verdict {
            holds: true,
            certificate: Certificate::ProjectedSpectrum { eigenvalues: vec![], tolerance: r.tolerance },
        });
    }
    let top = argmax(&r.eigenvalues);
    if r.eigenvalues[top] > r.tolerance {
        return violating(&r, space, p, top, Violation::Positive);
    }
    Ok(Verdict {
        holds: true,
        certificate: Certificate::ProjectedSpectrum { eigenvalues: sorted(&r.eigenvalues), tolerance: r.tolerance },
    })
}

/// Tests strict `p`-negative type: every restricted eigenvalue is below
/// `-tol × (largest power-matrix entry)`.
pub fn check_strict_negative_type(space: &SemiMetricSpace, p: f64, tol: f64) -> Result<Verdict> {
    let r = restricted_spectrum(space, p, tol)?;
    if r.eigenvalues.is_empty() {
        return Ok(Verdict {
            holds: true,
            certificate: Certificate::ProjectedSpectrum { eigenvalues: vec![], tolerance: r.tolerance },
        });
    }
    let top = argmax(&r.eigenvalues);
    let lambda = r.eigenvalues[top];
    if lambda > r.tolerance {
        return violating(&r, space, p, top, Violation::Positive);
    }
    if lambda >= -r.tolerance {
        return violating(&r, space, p, top, Violation::Null);
    }
    Ok(Verdict {
        holds: true,
        certificate: Certificate::ProjectedSpectrum { eigenvalues: sorted(&r.eigenvalues), tolerance: r.tolerance },
    })
}

/// Locates the maximal `p`-negative type by bisection.
///
/// Negative type holds on a closed interval `[0, p_max]`, so the first failure
/// found by doubling from `p = 1` brackets the boundary. `tol` is the bracket
/// width on `p`; eigenvalue tests use [`DEFAULT_EIGEN_TOL`].
pub fn max_negative_type(space: &SemiMetricSpace, tol: f64) -> Result<MaxTypeResult> {
    max_negative_type_with(space, tol, DEFAULT_EIGEN_TOL)
}

pub fn max_negative_type_with(space: &SemiMetricSpace, tol: f64, eigen_tol: f64) -> Result<MaxTypeResult> {
    let n = space.n();
    if n < 2 {
        return Err(Error::TooFewPoints { n, min: 2 });
    }
    if !(tol > 0.0) {
        return Err(Error::NonpositiveTolerance(tol));
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut failure = loop {
        let v = check_negative_type(space, hi, eigen_tol)?;
        if !v.holds {
            break v;
        }
        if hi >= MAX_EXPONENT {
            return Ok(MaxTypeResult {
                p_max: Bound::Unbounded,
                bracket: (hi, f64::INFINITY),
                tolerance: tol,
                certificate: None,
            });
        }
        lo = hi;
        hi *= 2.0;
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let v = check_negative_type(space, mid, eigen_tol)?;
        if v.holds {
            lo = mid;
        } else {
            hi = mid;
            failure = v;
        }
    }
    Ok(MaxTypeResult {
        p_max: Bound::Finite(0.5 * (lo + hi)),
        bracket: (lo, hi),
        tolerance: tol,
        certificate: Some(failure),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{build_space, Mode};

    fn bipartite() -> SemiMetricSpace {
        build_space(
            &[
                vec![0.0, 2.0, 1.0, 1.0],
                vec![2.0, 0.0, 1.0, 1.0],
                vec![1.0, 1.0, 0.0, 2.0],
                vec![1.0, 1.0, 2.0, 0.0],
            ],
            Mode::Metric,
        )
        .unwrap()
    }

    fn discrete(n: usize) -> SemiMetricSpace {
        let rows: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect();
        build_space(&rows, Mode::Metric).unwrap()
    }

    /// Direct double sum over ordered pairs, written independently of `qform`.
    fn brute_form(space: &SemiMetricSpace, p: f64, eta: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..eta.len() {
            for j in 0..eta.len() {
                if i != j {
                    s += space.d(i, j).powf(p) * eta[i] * eta[j];
                }
            }
        }
        s
    }

    fn direction_matches(eta: &[f64], expected: &[f64]) -> bool {
        let dot: f64 = eta.iter().zip(expected).map(|(a, b)| a * b).sum();
        let na: f64 = eta.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = expected.iter().map(|x| x * x).sum::<f64>().sqrt();
        (dot.abs() / (na * nb) - 1.0).abs() < 1e-9
    }

    #[test]
    fn qform_examples() {
        let s = bipartite();
        assert_eq!(qform(&s, 1.0, &[0.0; 4]).unwrap(), 0.0);
        let pair = build_space(&[vec![0.0, 1.0], vec![1.0, 0.0]], Mode::Metric).unwrap();
        for p in [0.0, 0.7, 3.0] {
            assert_eq!(qform(&pair, p, &[1.0, -1.0]).unwrap(), -2.0);
        }
        let eta = [1.0, 1.0, -1.0, -1.0];
        assert_eq!(brute_form(&s, 1.0, &eta), 0.0);
        assert_eq!(qform(&s, 1.0, &eta).unwrap(), 0.0);
        assert!(matches!(qform(&s, 1.0, &[1.0]), Err(Error::DimensionMismatch { expected: 4, got: 1 })));
    }

    #[test]
    fn qform_matches_brute_force() {
        let s = bipartite();
        for p in [0.0, 0.5, 1.3, 2.0] {
            let eta = [0.3, -1.1, 0.25, 0.55];
            assert!((qform(&s, p, &eta).unwrap() - brute_form(&s, p, &eta)).abs() < 1e-12);
        }
    }

    #[test]
    fn basis_is_orthonormal_and_zero_sum() {
        for n in 2..7 {
            let v = zero_sum_basis(n);
            let g = v.transpose() * &v;
            assert!((g - DMatrix::identity(n - 1, n - 1)).abs().max() < 1e-14);
            for c in v.column_iter() {
                assert!(c.sum().abs() < 1e-14);
            }
        }
    }

    #[test]
    fn bipartite_type_at_one() {
        let s = bipartite();
        let v = check_negative_type(&s, 1.0, DEFAULT_EIGEN_TOL).unwrap();
        assert!(v.holds);
        match v.certificate {
            Certificate::ProjectedSpectrum { eigenvalues, tolerance } => {
                assert_eq!(eigenvalues.len(), 3);
                assert!(eigenvalues.iter().all(|&e| e <= tolerance));
            }
            _ => panic!("expected spectrum"),
        }
    }

    #[test]
    fn bipartite_fails_above_one() {
        let s = bipartite();
        let v = check_negative_type(&s, 1.2, DEFAULT_EIGEN_TOL).unwrap();
        assert!(!v.holds);
        // 2 (2^2.2 - 4) at η = (1,1,-1,-1), i.e. a quarter of that at unit length.
        let expected = 2.0 * (2f64.powf(2.2) - 4.0);
        assert!((brute_form(&s, 1.2, &[1.0, 1.0, -1.0, -1.0]) - expected).abs() < 1e-12);
        assert!((expected - 1.189587).abs() < 1e-6);
        match &v.certificate {
            Certificate::ViolatingVector { eta, value, violation, .. } => {
                assert_eq!(*violation, Violation::Positive);
                assert!(direction_matches(eta, &[1.0, 1.0, -1.0, -1.0]));
                assert!((value - expected / 4.0).abs() < 1e-9);
            }
            _ => panic!("expected witness"),
        }
        assert!(v.recheck(&s, 1.2).unwrap());
    }

    #[test]
    fn discrete_metric_always_has_type() {
        let s = discrete(5);
        for p in [0.0, 1.0, 5.0, 50.0] {
            assert!(check_negative_type(&s, p, DEFAULT_EIGEN_TOL).unwrap().holds);
            assert!(check_strict_negative_type(&s, p, DEFAULT_EIGEN_TOL).unwrap().holds);
        }
    }

    #[test]
    fn strictness_on_bipartite() {
        let s = bipartite();
        let v = check_strict_negative_type(&s, 1.0, DEFAULT_EIGEN_TOL).unwrap();
        assert!(!v.holds);
        match &v.certificate {
            Certificate::ViolatingVector { eta, value, violation, .. } => {
                assert_eq!(*violation, Violation::Null);
                assert!(direction_matches(eta, &[1.0, 1.0, -1.0, -1.0]));
                assert!(value.abs() < 1e-12);
            }
            _ => panic!("expected null vector"),
        }
        assert!(v.recheck(&s, 1.0).unwrap());
        assert!(check_strict_negative_type(&s, 0.5, DEFAULT_EIGEN_TOL).unwrap().holds);
    }

    #[test]
    fn pair_and_singleton() {
        let pair = build_space(&[vec![0.0, 3.0], vec![3.0, 0.0]], Mode::Metric).unwrap();
        for p in [0.0, 1.0, 10.0] {
            assert!(check_strict_negative_type(&pair, p, DEFAULT_EIGEN_TOL).unwrap().holds);
        }
        let one = build_space(&[vec![0.0]], Mode::Metric).unwrap();
        assert!(check_strict_negative_type(&one, 1.0, DEFAULT_EIGEN_TOL).unwrap().holds);
        assert!(matches!(max_negative_type(&one, 1e-6), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn argument_errors() {
        let s = bipartite();
        assert_eq!(check_negative_type(&s, -1.0, 1e-9), Err(Error::NegativeExponent(-1.0)));
        assert_eq!(check_negative_type(&s, 1.0, 0.0), Err(Error::NonpositiveTolerance(0.0)));
        assert_eq!(check_strict_negative_type(&s, 1.0, -1.0), Err(Error::NonpositiveTolerance(-1.0)));
    }

    #[test]
    fn max_type_examples() {
        let r = max_negative_type(&bipartite(), DEFAULT_BISECTION_TOL).unwrap();
        let p = r.p_max.finite().unwrap();
        assert!((p - 1.0).abs() <= DEFAULT_BISECTION_TOL);
        assert!(r.bracket.1 - r.bracket.0 <= DEFAULT_BISECTION_TOL);

        let line = build_space(&[vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]], Mode::Metric).unwrap();
        let r = max_negative_type(&line, DEFAULT_BISECTION_TOL).unwrap();
        assert!((r.p_max.finite().unwrap() - 2.0).abs() <= DEFAULT_BISECTION_TOL);

        let r = max_negative_type(&discrete(5), DEFAULT_BISECTION_TOL).unwrap();
        assert_eq!(r.p_max, Bound::Unbounded);
    }

    #[test]
    fn bracket_endpoints_recheck() {
        let s = bipartite();
        let r = max_negative_type(&s, 1e-4).unwrap();
        let (lo, hi) = r.bracket;
        assert!(check_negative_type(&s, lo, DEFAULT_EIGEN_TOL).unwrap().holds);
        assert!(!check_negative_type(&s, hi + r.tolerance, DEFAULT_EIGEN_TOL).unwrap().holds);
        assert!(r.certificate.unwrap().recheck(&s, hi).unwrap());
    }
}
