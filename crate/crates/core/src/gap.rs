//! Simplex gaps and the negative-type gap.
//!
//! A `(q,t)`-simplex splits `q + t` distinct vertices into an a-side and a
//! b-side. Given positive loads `m` on the a-side and `w` on the b-side, each
//! summing to one, the simplex gap is
//!
//! ```text
//! γ = Σ_{j,i} m_j w_i d(a_j,b_i)^p − Σ_{j<j'} m_j m_j' d(a_j,a_j')^p − Σ_{i<i'} w_i w_i' d(b_i,b_i')^p
//! ```
//!
//! and the negative-type gap `Γ` is its infimum over every loaded simplex in
//! the space. Writing `η = (m, −w)` gives `qform(η) = −2γ`, so `Γ ≥ 0` exactly
//! when the space has `p`-negative type.
//!
//! For fixed `(simplex, p)`, `γ` is a quadratic form `½ xᵀHx` in `x = (m, w)`
//! over a product of two probability simplices. It is convex whenever the
//! space has `p`-negative type but indefinite in general, so
//! [`min_gap_over_loads`] runs projected gradient from the uniform start plus
//! seeded random restarts.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{power_matrix, PowerMatrix, SemiMetricSpace};
use crate::negative_type::zero_sum_basis;

/// Tolerance on the two load sums of a normalized load vector.
pub const LOAD_SUM_TOL: f64 = 1e-12;
/// Witness weights below this are treated as zero.
pub const ZERO_WEIGHT: f64 = 1e-12;
/// Default enumeration cap on `n` for [`negative_type_gap`].
pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// Two disjoint, nonempty lists of vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Simplex {
    a_side: Vec<usize>,
    b_side: Vec<usize>,
}

impl Simplex {
    pub fn new(a_side: Vec<usize>, b_side: Vec<usize>) -> Result<Self> {
        if a_side.is_empty() || b_side.is_empty() {
            return Err(Error::InvalidSimplex("both sides must be nonempty".into()));
        }
        let mut all: Vec<usize> = a_side.iter().chain(&b_side).copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSimplex("vertices must be distinct".into()));
        }
        Ok(Simplex { a_side, b_side })
    }

    pub fn a_side(&self) -> &[usize] {
        &self.a_side
    }

    pub fn b_side(&self) -> &[usize] {
        &self.b_side
    }

    pub fn q(&self) -> usize {
        self.a_side.len()
    }

    pub fn t(&self) -> usize {
        self.b_side.len()
    }

    pub fn size(&self) -> usize {
        self.q() + self.t()
    }

    /// The same simplex with the two sides exchanged.
    pub fn swapped(&self) -> Simplex {
        Simplex { a_side: self.b_side.clone(), b_side: self.a_side.clone() }
    }

    /// All vertices, a-side first.
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.a_side.iter().chain(&self.b_side).copied()
    }

    pub fn check_for(&self, n: usize) -> Result<()> {
        match self.vertices().find(|&v| v >= n) {
            Some(v) => Err(Error::InvalidSimplex(format!("vertex {v} out of range for {n} points"))),
            None => Ok(()),
        }
    }
}

/// Positive weights on the two sides of a simplex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadVector {
    m: Vec<f64>,
    w: Vec<f64>,
    normalized: bool,
}

impl LoadVector {
    /// Positive loads; `normalized` is set when both sides sum to one.
    pub fn new(m: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if m.is_empty() || w.is_empty() || m.iter().chain(&w).any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::UnnormalizedLoads);
        }
        let normalized = (m.iter().sum::<f64>() - 1.0).abs() <= LOAD_SUM_TOL
            && (w.iter().sum::<f64>() - 1.0).abs() <= LOAD_SUM_TOL;
        Ok(LoadVector { m, w, normalized })
    }

    /// Positive loads that must already be normalized.
    pub fn normalized(m: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        let l = Self::new(m, w)?;
        if !l.normalized {
            return Err(Error::UnnormalizedLoads);
        }
        Ok(l)
    }

    pub fn uniform(q: usize, t: usize) -> Self {
        LoadVector { m: vec![1.0 / q as f64; q], w: vec![1.0 / t as f64; t], normalized: true }
    }

    /// Divides each side by its sum.
    pub fn normalize(&self) -> Self {
        let sm: f64 = self.m.iter().sum();
        let sw: f64 = self.w.iter().sum();
        LoadVector {
            m: self.m.iter().map(|x| x / sm).collect(),
            w: self.w.iter().map(|x| x / sw).collect(),
            normalized: true,
        }
    }

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn swapped(&self) -> Self {
        LoadVector { m: self.w.clone(), w: self.m.clone(), normalized: self.normalized }
    }

    /// The signed vector `η` with `+m_j` at `a_j`, `−w_i` at `b_i`, zero elsewhere.
    pub fn signed_vector(&self, simplex: &Simplex, n: usize) -> Vec<f64> {
        let mut eta = vec![0.0; n];
        for (&a, &m) in simplex.a_side().iter().zip(&self.m) {
            eta[a] = m;
        }
        for (&b, &w) in simplex.b_side().iter().zip(&self.w) {
            eta[b] = -w;
        }
        eta
    }
}

/// Same-side sum `L`, cross sum `R`, and `γ = R − L` at exponent `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapBreakdown {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub gamma: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    ProjectedGradient,
    Enumeration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapResult {
    pub gamma_star: f64,
    pub witness_simplex: Simplex,
    pub witness_loads: LoadVector,
    pub method: Method,
    /// `false` when a projected-gradient run hit the iteration cap with a
    /// large projected gradient; `gamma_star` is then the best value found.
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct GapOptions {
    /// Random restarts in addition to the uniform start.
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop once no coordinate moves more than this in one step.
    pub step_tol: f64,
    /// Use the closed form at `p = 0` instead of numeric minimization.
    pub closed_form_at_zero: bool,
    pub enumeration_cap: usize,
    /// Worker threads for enumeration; `None` runs sequentially.
    pub threads: Option<usize>,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions {
            restarts: 20,
            seed: 0,
            max_iter: 10_000,
            step_tol: 1e-10,
            closed_form_at_zero: true,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            threads: None,
        }
    }
}

fn check_loads(simplex: &Simplex, loads: &LoadVector) -> Result<()> {
    if !loads.normalized || loads.m.len() != simplex.q() || loads.w.len() != simplex.t() {
        return Err(Error::UnnormalizedLoads);
    }
    Ok(())
}

fn breakdown(pm: &PowerMatrix, simplex: &Simplex, loads: &LoadVector) -> GapBreakdown {
    let (a, b) = (simplex.a_side(), simplex.b_side());
    let (m, w) = (loads.m(), loads.w());
    let mut l = 0.0;
    for j1 in 0..a.len() {
        for j2 in (j1 + 1)..a.len() {
            l += m[j1] * m[j2] * pm.a[(a[j1], a[j2])];
        }
    }
    for i1 in 0..b.len() {
        for i2 in (i1 + 1)..b.len() {
            l += w[i1] * w[i2] * pm.a[(b[i1], b[i2])];
        }
    }
    let mut r = 0.0;
    for (j, &aj) in a.iter().enumerate() {
        for (i, &bi) in b.iter().enumerate() {
            r += m[j] * w[i] * pm.a[(aj, bi)];
        }
    }
    GapBreakdown { l, r, gamma: r - l, p: pm.p }
}

/// Evaluates `L`, `R` and `γ = R − L` for a normalized loaded simplex.
pub fn gap_value(space: &SemiMetricSpace, simplex: &Simplex, loads: &LoadVector, p: f64) -> Result<GapBreakdown> {
    simplex.check_for(space.n())?;
    check_loads(simplex, loads)?;
    let pm = power_matrix(space, p)?;
    Ok(breakdown(&pm, simplex, loads))
}

/// Minimum of `γ` at `p = 0` for a `(q,t)`-simplex, `½(1/q + 1/t)`, attained
/// only at uniform loads.
pub fn closed_form_zero_gap_simplex(q: usize, t: usize) -> Result<(f64, LoadVector)> {
    if q == 0 || t == 0 {
        return Err(Error::InvalidSimplex("both sides must be nonempty".into()));
    }
    Ok((0.5 * (1.0 / q as f64 + 1.0 / t as f64), LoadVector::uniform(q, t)))
}

/// `Γ` at `p = 0` for any `n`-point space: `½(1/⌊n/2⌋ + 1/⌈n/2⌉)`.
pub fn zero_gap(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewPoints { n, min: 2 });
    }
    let q = n / 2;
    let t = n - q;
    Ok(0.5 * (1.0 / q as f64 + 1.0 / t as f64))
}

/// Whether a loaded simplex attains `Γ` at `p = 0`: sides of sizes `⌊n/2⌋`
/// and `⌈n/2⌉` (either order) carrying uniform weights.
pub fn is_extreme_simplex(n: usize, simplex: &Simplex, loads: &LoadVector, tol: f64) -> bool {
    let (q, t) = (simplex.q(), simplex.t());
    let (lo, hi) = (n / 2, n - n / 2);
    if !((q == lo && t == hi) || (q == hi && t == lo)) {
        return false;
    }
    if loads.m().len() != q || loads.w().len() != t {
        return false;
    }
    let uq = 1.0 / q as f64;
    let ut = 1.0 / t as f64;
    loads.m().iter().all(|&x| (x - uq).abs() <= tol) && loads.w().iter().all(|&x| (x - ut).abs() <= tol)
}

/// `γ(x) = ½ xᵀHx` for `x = (m, w)` on one simplex.
struct Problem {
    q: usize,
    k: usize,
    /// Row-major `k × k`.
    h: Vec<f64>,
    lipschitz: f64,
}

impl Problem {
    fn new(pm: &PowerMatrix, simplex: &Simplex) -> Self {
        let verts: Vec<usize> = simplex.vertices().collect();
        let q = simplex.q();
        let k = verts.len();
        let mut h = vec![0.0; k * k];
        for r in 0..k {
            for c in 0..k {
                if r == c {
                    continue;
                }
                let same = (r < q) == (c < q);
                let v = pm.a[(verts[r], verts[c])];
                h[r * k + c] = if same { -v } else { v };
            }
        }
        let lipschitz = (0..k)
            .map(|r| h[r * k..(r + 1) * k].iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0_f64, f64::max)
            .max(f64::MIN_POSITIVE);
        Problem { q, k, h, lipschitz }
    }

    fn grad(&self, x: &[f64], out: &mut [f64]) {
        for r in 0..self.k {
            let row = &self.h[r * self.k..(r + 1) * self.k];
            out[r] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.k {
            let row = &self.h[r * self.k..(r + 1) * self.k];
            acc += x[r] * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
        0.5 * acc
    }

    fn project(&self, x: &mut [f64]) {
        let (m, w) = x.split_at_mut(self.q);
        project_simplex(m);
        project_simplex(w);
    }

    /// Whether `γ` is convex on the feasible affine set.
    fn is_convex(&self) -> bool {
        let t = self.k - self.q;
        let dim = self.k - 2;
        if dim == 0 {
            return true;
        }
        let va = zero_sum_basis(self.q);
        let vb = zero_sum_basis(t);
        let mut v = DMatrix::zeros(self.k, dim);
        v.view_mut((0, 0), (self.q, self.q - 1)).copy_from(&va);
        v.view_mut((self.q, self.q - 1), (t, t - 1)).copy_from(&vb);
        let h = DMatrix::from_row_slice(self.k, self.k, &self.h);
        let tangent = v.transpose() * h * &v;
        let tangent = (&tangent + tangent.transpose()) * 0.5;
        let scale = self.h.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let min = SymmetricEigen::new(tangent).eigenvalues.min();
        min >= -1e-12 * scale
    }

    /// Stationary point of `γ` on the face spanned by the support of `x`.
    fn solve_face(&self, x: &[f64]) -> Option<Vec<f64>> {
        let support: Vec<usize> = (0..self.k).filter(|&i| x[i] > ZERO_WEIGHT).collect();
        let s = support.len();
        let mut kkt = DMatrix::zeros(s + 2, s + 2);
        let mut rhs = DVector::zeros(s + 2);
        for (r, &i) in support.iter().enumerate() {
            for (c, &j) in support.iter().enumerate() {
                kkt[(r, c)] = self.h[i * self.k + j];
            }
            let side = if i < self.q { s } else { s + 1 };
            kkt[(r, side)] = -1.0;
            kkt[(side, r)] = 1.0;
        }
        rhs[s] = 1.0;
        rhs[s + 1] = 1.0;
        let sol = kkt.lu().solve(&rhs)?;
        let mut out = vec![0.0; self.k];
        for (r, &i) in support.iter().enumerate() {
            if !(sol[r] > 0.0) || !sol[r].is_finite() {
                return None;
            }
            out[i] = sol[r];
        }
        Some(out)
    }
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumsum += ui;
        let candidate = (cumsum - 1.0) / (i + 1) as f64;
        if ui - candidate > 0.0 {
            theta = candidate;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

struct Descent {
    x: Vec<f64>,
    value: f64,
    converged: bool,
}

fn projected_gradient(problem: &Problem, start: Vec<f64>, opts: &GapOptions) -> Descent {
    let k = problem.k;
    let mut x = start;
    problem.project(&mut x);
    let mut fx = problem.value(&x);
    let mut g = vec![0.0; k];
    let mut trial = vec![0.0; k];
    let base = 1.0 / problem.lipschitz;
    let mut step = base;
    for _ in 0..opts.max_iter {
        problem.grad(&x, &mut g);
        step = (step * 2.0).min(1e3 * base);
        let (ft, moved) = loop {
            for i in 0..k {
                trial[i] = x[i] - step * g[i];
            }
            problem.project(&mut trial);
            let ft = problem.value(&trial);
            let mut lin = 0.0;
            let mut sq = 0.0;
            let mut moved = 0.0_f64;
            for i in 0..k {
                let d = trial[i] - x[i];
                lin += g[i] * d;
                sq += d * d;
                moved = moved.max(d.abs());
            }
            // Sufficient decrease for projected steps, with a rounding allowance.
            if ft <= fx + lin + sq / (2.0 * step) + 1e-15 * fx.abs().max(1.0) || step <= base * 1e-6 {
                break (ft, moved);
            }
            step *= 0.5;
        };
        if ft <= fx {
            x.copy_from_slice(&trial);
            fx = ft;
        }
        if moved < opts.step_tol {
            return Descent { x, value: fx, converged: true };
        }
    }
    // Iteration cap: accept only if the projected gradient mapping is small.
    problem.grad(&x, &mut g);
    for i in 0..k {
        trial[i] = x[i] - base * g[i];
    }
    problem.project(&mut trial);
    let mapping = x.iter().zip(&trial).map(|(a, b)| (a - b).abs()).fold(0.0_f64, f64::max) / base;
    Descent { x, value: fx, converged: mapping <= 1e-6 * problem.lipschitz.max(1.0) }
}

fn random_start(rng: &mut ChaCha8Rng, q: usize, k: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let (m, w) = x.split_at_mut(q);
    let sm: f64 = m.iter().sum();
    let sw: f64 = w.iter().sum();
    m.iter_mut().for_each(|v| *v /= sm);
    w.iter_mut().for_each(|v| *v /= sw);
    x
}

/// Drops zero-weight vertices and renormalizes, giving the sub-simplex that
/// carries the minimizer.
fn snap_witness(simplex: &Simplex, x: &[f64]) -> (Simplex, LoadVector) {
    let q = simplex.q();
    let keep = |side: &[usize], weights: &[f64]| -> (Vec<usize>, Vec<f64>) {
        let mut best = 0;
        for (i, &v) in weights.iter().enumerate() {
            if v > weights[best] {
                best = i;
            }
        }
        let kept: Vec<(usize, f64)> = side
            .iter()
            .zip(weights)
            .enumerate()
            .filter(|&(i, (_, &v))| v >= ZERO_WEIGHT || i == best)
            .map(|(_, (&s, &v))| (s, v))
            .collect();
        let total: f64 = kept.iter().map(|(_, v)| v).sum();
        (kept.iter().map(|(s, _)| *s).collect(), kept.iter().map(|(_, v)| v / total).collect())
    };
    let (a, m) = keep(simplex.a_side(), &x[..q]);
    let (b, w) = keep(simplex.b_side(), &x[q..]);
    let simplex = Simplex { a_side: a, b_side: b };
    let loads = LoadVector { m, w, normalized: true };
    canonical(simplex, loads)
}

/// Orients a witness so the smallest vertex sits on the a-side.
fn canonical(simplex: Simplex, loads: LoadVector) -> (Simplex, LoadVector) {
    let min_a = simplex.a_side.iter().min().copied().unwrap_or(usize::MAX);
    let min_b = simplex.b_side.iter().min().copied().unwrap_or(usize::MAX);
    if min_b < min_a {
        (simplex.swapped(), loads.swapped())
    } else {
        (simplex, loads)
    }
}

fn minimize_numeric(pm: &PowerMatrix, simplex: &Simplex, opts: &GapOptions, stream: u64) -> GapResult {
    let problem = Problem::new(pm, simplex);
    let (q, k) = (problem.q, problem.k);
    let mut uniform = vec![1.0 / q as f64; k];
    for v in uniform.iter_mut().skip(q) {
        *v = 1.0 / (k - q) as f64;
    }
    let mut best = projected_gradient(&problem, uniform, opts);
    // A convex objective has no spurious local minima; restarts only matter otherwise.
    if !problem.is_convex() {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(stream);
        for _ in 0..opts.restarts {
            let start = random_start(&mut rng, q, k);
            let run = projected_gradient(&problem, start, opts);
            if run.value < best.value {
                best = run;
            }
        }
    }
    if let Some(polished) = problem.solve_face(&best.x) {
        let v = problem.value(&polished);
        if v <= best.value {
            best.x = polished;
            best.value = v;
        }
    }
    let (witness_simplex, witness_loads) = snap_witness(simplex, &best.x);
    let gamma_star = breakdown(pm, &witness_simplex, &witness_loads).gamma;
    GapResult {
        gamma_star,
        witness_simplex,
        witness_loads,
        method: Method::ProjectedGradient,
        converged: best.converged,
    }
}

fn min_gap_with(pm: &PowerMatrix, simplex: &Simplex, opts: &GapOptions, stream: u64) -> GapResult {
    if pm.p == 0.0 && opts.closed_form_at_zero {
        let (gamma_star, witness_loads) =
            closed_form_zero_gap_simplex(simplex.q(), simplex.t()).expect("simplex sides are nonempty");
        return GapResult {
            gamma_star,
            witness_simplex: simplex.clone(),
            witness_loads,
            method: Method::ClosedForm,
            converged: true,
        };
    }
    minimize_numeric(pm, simplex, opts, stream)
}

/// Minimizes `γ` over normalized loads on one simplex.
///
/// The infimum over strictly positive loads equals the minimum over the
/// closed product of simplices; a minimizer on the boundary is reported as
/// the sub-simplex carrying its nonzero weights.
pub fn min_gap_over_loads(space: &SemiMetricSpace, simplex: &Simplex, p: f64, opts: &GapOptions) -> Result<GapResult> {
    simplex.check_for(space.n())?;
    let pm = power_matrix(space, p)?;
    Ok(min_gap_with(&pm, simplex, opts, 0))
}

/// Every simplex on `n` vertices up to exchanging the sides, largest first.
///
/// The a-side always holds the smallest used vertex. Within one size the
/// order is lexicographic on `(a_side, b_side)`.
pub fn enumerate_simplices(n: usize) -> Vec<Simplex> {
    let mut out = Vec::new();
    let mut assign = vec![0u8; n];
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for slot in assign.iter_mut() {
            *slot = (c % 3) as u8;
            c /= 3;
        }
        let a: Vec<usize> = (0..n).filter(|&i| assign[i] == 1).collect();
        let b: Vec<usize> = (0..n).filter(|&i| assign[i] == 2).collect();
        if a.is_empty() || b.is_empty() || b[0] < a[0] {
            continue;
        }
        out.push(Simplex { a_side: a, b_side: b });
    }
    out.sort_by(|x, y| y.size().cmp(&x.size()).then_with(|| x.cmp(y)));
    out
}

fn better(x: &GapResult, y: &GapResult) -> bool {
    match x.gamma_star.total_cmp(&y.gamma_star) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => x.witness_simplex < y.witness_simplex,
    }
}

/// `Γ` at exponent `p`: the minimum simplex gap over every simplex in the space.
pub fn negative_type_gap(space: &SemiMetricSpace, p: f64, opts: &GapOptions) -> Result<GapResult> {
    let n = space.n();
    if n < 2 {
        return Err(Error::TooFewPoints { n, min: 2 });
    }
    if n > opts.enumeration_cap {
        return Err(Error::TooLarge { n, cap: opts.enumeration_cap });
    }
    let pm = power_matrix(space, p)?;
    let simplices = enumerate_simplices(n);
    let eval = |(i, s): (usize, &Simplex)| min_gap_with(&pm, s, opts, i as u64);
    let results: Vec<GapResult> = match opts.threads {
        Some(threads) if threads > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("thread pool");
            pool.install(|| simplices.par_iter().enumerate().map(eval).collect())
        }
        _ => simplices.iter().enumerate().map(eval).collect(),
    };
    let converged = results.iter().all(|r| r.converged);
    let mut best = results.into_iter().reduce(|x, y| if better(&y, &x) { y } else { x }).expect("n >= 2");
    best.method = Method::Enumeration;
    best.converged = converged;
    Ok(best)
}
