#![allow(dead_code)]

use negtype::metric::{build_space, Mode, SemiMetricSpace};
use negtype::oracle::euclidean_space;
use negtype::trees::WeightedTree;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random edge weights in `[lo, hi]` closed under shortest paths, so the
/// result is a metric with all distances in `[lo, hi]`.
pub fn random_metric(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> SemiMetricSpace {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let x = rng.random_range(lo..=hi);
            d[i][j] = x;
            d[j][i] = x;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    build_space(&d, Mode::Metric).expect("shortest-path closure is a metric")
}

/// Symmetric matrix with entries in `[lo, hi]`, triangle inequality not enforced.
pub fn random_semimetric(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> SemiMetricSpace {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let x = rng.random_range(lo..=hi);
            d[i][j] = x;
            d[j][i] = x;
        }
    }
    build_space(&d, Mode::SemiMetric).unwrap()
}

/// Random recursive tree with weights in `[lo, hi]`.
pub fn random_tree(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> WeightedTree {
    let edges = (1..n).map(|v| (rng.random_range(0..v), v, rng.random_range(lo..=hi))).collect();
    WeightedTree::new(n, edges).unwrap()
}

pub fn random_cloud(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> SemiMetricSpace {
    let points: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    euclidean_space(&points).unwrap()
}

/// Random normalized loads on `q` and `t` vertices.
pub fn random_loads(rng: &mut ChaCha8Rng, q: usize, t: usize) -> negtype::LoadVector {
    let m: Vec<f64> = (0..q).map(|_| rng.random_range(0.01..1.0)).collect();
    let w: Vec<f64> = (0..t).map(|_| rng.random_range(0.01..1.0)).collect();
    negtype::LoadVector::new(m, w).unwrap().normalize()
}

/// Random simplex with both sides nonempty inside `n` points.
pub fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> negtype::Simplex {
    loop {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for v in 0..n {
            match rng.random_range(0..3) {
                0 => a.push(v),
                1 => b.push(v),
                _ => {}
            }
        }
        if !a.is_empty() && !b.is_empty() {
            return negtype::Simplex::new(a, b).unwrap();
        }
    }
}

/// Random zero-sum vector.
pub fn random_zero_sum(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut eta: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = eta.iter().sum::<f64>() / n as f64;
    eta.iter_mut().for_each(|x| *x -= mean);
    eta
}

pub fn bipartite4() -> SemiMetricSpace {
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
