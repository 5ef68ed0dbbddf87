//! Brute-force cross-checks that share no code path with the main solvers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gap::Simplex;
use crate::metric::{Mode, SemiMetricSpace};

/// Largest simplex the grid oracle accepts.
pub const GRID_MAX_SIZE: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub worst_value: f64,
    pub worst_vector: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

/// Calls `f` with every composition of `total` into `parts` nonnegative integers.
fn for_each_composition(total: usize, parts: usize, f: &mut impl FnMut(&[usize])) {
    fn fill(c: &mut [usize], idx: usize, remaining: usize, f: &mut impl FnMut(&[usize])) {
        if idx + 1 == c.len() {
            c[idx] = remaining;
            f(c);
            return;
        }
        for v in 0..=remaining {
            c[idx] = v;
            fill(c, idx + 1, remaining - v, f);
        }
    }
    let mut c = vec![0usize; parts];
    fill(&mut c, 0, total, f);
}

/// Minimum of the simplex gap over loads on a lattice of spacing `resolution`,
/// boundary included.
pub fn grid_min_gap(space: &SemiMetricSpace, simplex: &Simplex, p: f64, resolution: f64) -> Result<f64> {
    if simplex.size() > GRID_MAX_SIZE {
        return Err(Error::TooLargeSimplex { size: simplex.size(), max: GRID_MAX_SIZE });
    }
    if !(resolution > 0.0 && resolution <= 0.25) {
        return Err(Error::BadResolution(resolution));
    }
    let steps = (1.0 / resolution).round();
    if ((steps * resolution) - 1.0).abs() > 1e-9 {
        return Err(Error::BadResolution(resolution));
    }
    let steps = steps as usize;
    simplex.check_for(space.n())?;
    if p < 0.0 {
        return Err(Error::NegativeExponent(p));
    }
    let a = simplex.a_side();
    let b = simplex.b_side();
    let pw = |i: usize, j: usize| space.d(i, j).powf(p);
    let aa: Vec<Vec<f64>> = a.iter().map(|&x| a.iter().map(|&y| pw(x, y)).collect()).collect();
    let bb: Vec<Vec<f64>> = b.iter().map(|&x| b.iter().map(|&y| pw(x, y)).collect()).collect();
    let ab: Vec<Vec<f64>> = a.iter().map(|&x| b.iter().map(|&y| pw(x, y)).collect()).collect();
    let k = steps as f64;

    let mut a_points: Vec<Vec<f64>> = Vec::new();
    for_each_composition(steps, a.len(), &mut |c| a_points.push(c.iter().map(|&x| x as f64 / k).collect()));
    let mut b_points: Vec<Vec<f64>> = Vec::new();
    for_each_composition(steps, b.len(), &mut |c| b_points.push(c.iter().map(|&x| x as f64 / k).collect()));

    let same = |mat: &[Vec<f64>], x: &[f64]| {
        let mut s = 0.0;
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                s += x[i] * x[j] * mat[i][j];
            }
        }
        s
    };
    let a_same: Vec<f64> = a_points.iter().map(|m| same(&aa, m)).collect();
    let b_same: Vec<f64> = b_points.iter().map(|w| same(&bb, w)).collect();

    let mut best = f64::INFINITY;
    for (m, la) in a_points.iter().zip(&a_same) {
        // Cross sum is linear in w once m is fixed.
        let coef: Vec<f64> = (0..b.len()).map(|i| (0..a.len()).map(|j| m[j] * ab[j][i]).sum()).collect();
        for (w, lb) in b_points.iter().zip(&b_same) {
            let cross: f64 = coef.iter().zip(w).map(|(c, x)| c * x).sum();
            best = best.min(cross - la - lb);
        }
    }
    Ok(best)
}

/// Largest form value over random zero-sum directions of unit 1-norm.
///
/// A positive `worst_value` beyond rounding certifies that `p`-negative type
/// fails; a negative one is evidence only.
pub fn random_qform_probe(space: &SemiMetricSpace, p: f64, trials: usize, seed: u64) -> Result<ProbeResult> {
    let n = space.n();
    if n < 2 {
        return Err(Error::TooFewPoints { n, min: 2 });
    }
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    if p < 0.0 {
        return Err(Error::NegativeExponent(p));
    }
    let pw: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { space.d(i, j).powf(p) }).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_value = f64::NEG_INFINITY;
    let mut worst_vector = vec![0.0; n];
    let mut eta = vec![0.0; n];
    for _ in 0..trials {
        for x in eta.iter_mut() {
            *x = StandardNormal.sample(&mut rng);
        }
        let mean = eta.iter().sum::<f64>() / n as f64;
        eta.iter_mut().for_each(|x| *x -= mean);
        let norm: f64 = eta.iter().map(|x| x.abs()).sum();
        if norm == 0.0 {
            continue;
        }
        eta.iter_mut().for_each(|x| *x /= norm);
        let mut value = 0.0;
        for i in 0..n {
            for j in 0..n {
                value += pw[i][j] * eta[i] * eta[j];
            }
        }
        if value > worst_value {
            worst_value = value;
            worst_vector.copy_from_slice(&eta);
        }
    }
    Ok(ProbeResult { worst_value, worst_vector, trials, seed })
}

/// Pairwise Euclidean distances of a point cloud, as a metric space.
pub fn euclidean_space(points: &[Vec<f64>]) -> Result<SemiMetricSpace> {
    if points.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let dim = points[0].len();
    if let Some(bad) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
    }
    let n = points.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = points[i].iter().zip(&points[j]).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            if dist == 0.0 {
                return Err(Error::DuplicatePoints { i, j });
            }
            d[i][j] = dist;
            d[j][i] = dist;
        }
    }
    crate::metric::build_space(&d, Mode::Metric)
}
