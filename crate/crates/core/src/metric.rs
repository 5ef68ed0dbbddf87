//! Finite metric and semi-metric spaces given by distance matrices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack allowed when checking the triangle inequality.
const TRIANGLE_SLACK: f64 = 1e-12;

/// Whether the triangle inequality is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Metric,
    #[serde(rename = "semimetric")]
    SemiMetric,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Metric => "metric",
            Mode::SemiMetric => "semimetric",
        }
    }
}

/// A validated finite space `(X, d)`.
///
/// Distances are symmetric, zero exactly on the diagonal and finite. In
/// [`Mode::Metric`] the triangle inequality holds as well.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiMetricSpace {
    d: DMatrix<f64>,
    labels: Option<Vec<String>>,
    mode: Mode,
}

/// Entrywise power `d^p` of a distance matrix with the diagonal held at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerMatrix {
    pub p: f64,
    pub a: DMatrix<f64>,
}

impl PowerMatrix {
    /// Largest absolute entry, used to scale eigenvalue tolerances.
    pub fn scale(&self) -> f64 {
        self.a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// Validates `matrix` and wraps it as a space.
pub fn build_space(matrix: &[Vec<f64>], mode: Mode) -> Result<SemiMetricSpace> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    for (row, r) in matrix.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare { row, len: r.len(), n });
        }
    }
    let d = DMatrix::from_fn(n, n, |i, j| matrix[i][j]);
    SemiMetricSpace::from_matrix(d, mode)
}

impl SemiMetricSpace {
    /// Validates a square `DMatrix` as a space.
    pub fn from_matrix(d: DMatrix<f64>, mode: Mode) -> Result<Self> {
        let n = d.nrows();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if d.ncols() != n {
            return Err(Error::NotSquare { row: 0, len: d.ncols(), n });
        }
        for i in 0..n {
            for j in 0..n {
                if !d[(i, j)].is_finite() {
                    return Err(Error::NonFiniteDistance { i, j });
                }
            }
        }
        for i in 0..n {
            if d[(i, i)] != 0.0 {
                return Err(Error::NonzeroDiagonal { i });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if d[(i, j)] != d[(j, i)] {
                    return Err(Error::AsymmetricMatrix { i, j });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if d[(i, j)] < 0.0 {
                    return Err(Error::NegativeDistance { i, j });
                }
                if d[(i, j)] == 0.0 {
                    return Err(Error::ZeroOffDiagonal { i, j });
                }
            }
        }
        let space = SemiMetricSpace { d, labels: None, mode };
        if mode == Mode::Metric {
            if let Some((i, j, k)) = space.triangle_violations().into_iter().next() {
                return Err(Error::TriangleViolation { i, j, k });
            }
        }
        Ok(space)
    }

    /// Attaches vertex names; the count must match `n`.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::LabelCountMismatch { count: labels.len(), n: self.n() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.d.nrows()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.d[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Name of vertex `i`: its label when present, otherwise the index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    /// Rows of the distance matrix as nested vectors.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| (0..self.n()).map(|j| self.d(i, j)).collect()).collect()
    }

    /// All triples `(i, j, k)` with `d(i,k) > d(i,j) + d(j,k)` beyond the slack.
    pub fn triangle_violations(&self) -> Vec<(usize, usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for k in (i + 1)..n {
                let direct = self.d(i, k);
                for j in 0..n {
                    if j == i || j == k {
                        continue;
                    }
                    let via = self.d(i, j) + self.d(j, k);
                    if direct > via * (1.0 + TRIANGLE_SLACK) {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }

    /// Smallest and largest off-diagonal distance.
    pub fn distance_range(&self) -> Result<(f64, f64)> {
        let n = self.n();
        if n < 2 {
            return Err(Error::TooFewPoints { n, min: 2 });
        }
        let mut lo = f64::INFINITY;
        let mut hi = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                lo = lo.min(self.d(i, j));
                hi = hi.max(self.d(i, j));
            }
        }
        Ok((lo, hi))
    }

    /// The space with every distance multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let d = &self.d * c;
        let mut s = SemiMetricSpace::from_matrix(d, self.mode)?;
        s.labels = self.labels.clone();
        Ok(s)
    }

    /// Restriction of the space to the listed vertices, in order.
    pub fn subspace(&self, vertices: &[usize]) -> Result<Self> {
        let k = vertices.len();
        for &v in vertices {
            if v >= self.n() {
                return Err(Error::DimensionMismatch { expected: self.n(), got: v });
            }
        }
        let d = DMatrix::from_fn(k, k, |i, j| self.d(vertices[i], vertices[j]));
        let mut s = SemiMetricSpace::from_matrix(d, self.mode)?;
        s.labels = self.labels.as_ref().map(|l| vertices.iter().map(|&v| l[v].clone()).collect());
        Ok(s)
    }
}

/// Diameter divided by the smallest nonzero distance; always at least 1.
pub fn scaled_diameter(space: &SemiMetricSpace) -> Result<f64> {
    let (lo, hi) = space.distance_range()?;
    Ok(hi / lo)
}

/// Divides all distances by the smallest nonzero distance.
pub fn rescale_to_unit_min(space: &SemiMetricSpace) -> Result<SemiMetricSpace> {
    let (lo, _) = space.distance_range()?;
    if lo == 1.0 {
        return Ok(space.clone());
    }
    let n = space.n();
    // Division (not multiplication by 1/lo) so the minimum lands on exactly 1.
    let d = DMatrix::from_fn(n, n, |i, j| space.d(i, j) / lo);
    let mut s = SemiMetricSpace::from_matrix(d, space.mode())?;
    s.labels = space.labels.clone();
    Ok(s)
}

/// Entrywise `d^p` off the diagonal. At `p = 0` every off-diagonal entry is 1.
pub fn power_matrix(space: &SemiMetricSpace, p: f64) -> Result<PowerMatrix> {
    if p < 0.0 || p.is_nan() {
        return Err(Error::NegativeExponent(p));
    }
    let n = space.n();
    let a = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { space.d(i, j).powf(p) });
    Ok(PowerMatrix { p, a })
}
