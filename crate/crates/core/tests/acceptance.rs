//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use common::*;
use negtype::negative_type::{Violation, DEFAULT_EIGEN_TOL};
use negtype::*;
use rand::Rng;
use std::time::{Duration, Instant};

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn finite(b: Bound) -> f64 {
    b.finite().expect("finite bound")
}

/// Numeric minimizer at p = 0 reproduces ½(1/q+1/t) with uniform loads.
fn uniform_loads_at_zero() -> Check {
    let mut r = rng(1);
    let opts = GapOptions { closed_form_at_zero: false, ..GapOptions::default() };
    let (mut worst_value, mut worst_load) = (0.0f64, 0.0f64);
    for q in 1..=4 {
        for t in q..=(8 - q) {
            let simplex = Simplex::new((0..q).collect(), (q..q + t).collect()).unwrap();
            let (expected, _) = closed_form_zero_gap_simplex(q, t).unwrap();
            for _ in 0..5 {
                let space = random_metric(&mut r, q + t, 1.0, 4.0);
                let got = min_gap_over_loads(&space, &simplex, 0.0, &opts).map_err(|e| e.to_string())?;
                worst_value = worst_value.max((got.gamma_star - expected).abs());
                ensure(got.witness_simplex == simplex, || format!("({q},{t}): minimizer left the full simplex"))?;
                let loads = got.witness_loads.m().iter().map(|x| (x - 1.0 / q as f64).abs());
                let loads = loads.chain(got.witness_loads.w().iter().map(|x| (x - 1.0 / t as f64).abs()));
                worst_load = loads.fold(worst_load, f64::max);
            }
        }
    }
    ensure(worst_value <= 1e-6, || format!("value error {worst_value:.3e}"))?;
    ensure(worst_load <= 1e-4, || format!("load error {worst_load:.3e}"))?;
    Ok(format!("max |γ−closed form| {worst_value:.2e}, max load deviation {worst_load:.2e}"))
}

/// Full enumeration at p = 0 gives the metric-free value.
fn zero_gap_by_enumeration() -> Check {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for n in 2..=8 {
        let expected = zero_gap(n).unwrap();
        for _ in 0..10 {
            let space = random_semimetric(&mut r, n, 0.1, 10.0);
            let got = negative_type_gap(&space, 0.0, &GapOptions::default()).map_err(|e| e.to_string())?;
            worst = worst.max((got.gamma_star - expected).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("max error {worst:.3e}"))?;
    Ok(format!("max |Γ⁰−formula| {worst:.2e}"))
}

/// Type at ζ and strict type below ζ on random metric spaces.
fn zeta_is_sound() -> Check {
    let mut r = rng(3);
    let mut largest_ratio = 0.0f64;
    for k in 0..50 {
        let n = r.random_range(3..=7);
        let space = random_metric(&mut r, n, 1.0, 4.0);
        let ratio = scaled_diameter(&space).unwrap();
        largest_ratio = largest_ratio.max(ratio);
        if ratio <= 1.0 {
            continue;
        }
        let z = finite(zeta(n, ratio).unwrap());
        let v = check_negative_type(&space, z, DEFAULT_EIGEN_TOL).unwrap();
        ensure(v.holds, || format!("space {k} (n={n}, 𝔇={ratio:.4}): type fails at ζ={z:.6}"))?;
        for f in [0.2, 0.5, 0.9, 0.99] {
            let v = check_strict_negative_type(&space, f * z, DEFAULT_EIGEN_TOL).unwrap();
            ensure(v.holds, || format!("space {k}: strict type fails at {f}ζ"))?;
        }
    }
    Ok(format!("50 spaces, largest 𝔇 {largest_ratio:.3}"))
}

fn extremal_sharpness(ratios: &[f64], mode: Mode) -> std::result::Result<f64, String> {
    let mut worst = 0.0f64;
    for n in 3..=8 {
        for &ratio in ratios {
            let space = construct_extremal(n, ratio, mode).map_err(|e| e.to_string())?;
            let z = finite(zeta(n, ratio).unwrap());
            let got = max_negative_type(&space, 1e-6).map_err(|e| e.to_string())?;
            let p = got.p_max.finite().ok_or_else(|| format!("n={n}, 𝔇={ratio}: unbounded"))?;
            ensure((p - z).abs() <= 1e-4, || format!("n={n}, 𝔇={ratio}: maxp {p} vs ζ {z}"))?;
            worst = worst.max((p - z).abs());
        }
    }
    Ok(worst)
}

/// Extremal metric spaces attain ζ.
fn extremal_metric_sharpness() -> Check {
    let worst = extremal_sharpness(&[1.25, 1.5, 2.0], Mode::Metric)?;
    let spots = [(3, 2.0), (4, 2.0), (5, 2.0)].map(|(n, d)| finite(zeta(n, d).unwrap()));
    let expected = [2.0, 1.0, (12.0f64 / 7.0).log2()];
    for (got, want) in spots.iter().zip(expected) {
        ensure((got - want).abs() <= 1e-12, || format!("spot value {got} vs {want}"))?;
    }
    Ok(format!("max |maxp−ζ| {worst:.2e}; ζ(3,2)={}, ζ(4,2)={}, ζ(5,2)={:.6}", spots[0], spots[1], spots[2]))
}

/// Extremal semi-metric spaces attain ζ beyond 𝔇 = 2.
fn extremal_semimetric_sharpness() -> Check {
    let worst = extremal_sharpness(&[3.0, 5.0], Mode::SemiMetric)?;
    let space = construct_extremal(4, 3.0, Mode::SemiMetric).unwrap();
    let p = finite(max_negative_type(&space, 1e-6).unwrap().p_max);
    let want = 2f64.ln() / 3f64.ln();
    ensure((p - want).abs() <= 1e-4, || format!("n=4, 𝔇=3: {p} vs {want}"))?;
    Ok(format!("max |maxp−ζ| {worst:.2e}; n=4, 𝔇=3 gives {p:.5}"))
}

/// Tree formula against enumeration at p = 1.
fn tree_cross_check() -> Check {
    let mut r = rng(6);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let n = r.random_range(3..=8);
        let tree = random_tree(&mut r, n, 0.5, 3.0);
        let formula = tree_one_gap(&tree).unwrap();
        let space = tree_metric(&tree).unwrap();
        let enumerated = negative_type_gap(&space, 1.0, &GapOptions::default()).unwrap();
        let diff = (formula - enumerated.gamma_star).abs();
        ensure(diff <= 1e-4, || format!("tree {k} (n={n}): formula {formula} vs {}", enumerated.gamma_star))?;
        let strict = check_strict_negative_type(&space, 1.0, DEFAULT_EIGEN_TOL).unwrap();
        ensure(strict.holds, || format!("tree {k}: strict 1-negative type fails"))?;
        worst = worst.max(diff);
    }
    Ok(format!("20 trees, max |formula−enumeration| {worst:.2e}"))
}

/// qform of the signed load vector is −2γ.
fn gap_form_bridge() -> Check {
    let mut r = rng(7);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = r.random_range(2..=8);
        let space = random_semimetric(&mut r, n, 0.5, 4.0);
        let simplex = random_simplex(&mut r, n);
        let loads = random_loads(&mut r, simplex.q(), simplex.t());
        let eta = loads.signed_vector(&simplex, n);
        for p in [0.0, 0.5, 1.0, 2.0] {
            let g = gap_value(&space, &simplex, &loads, p).unwrap().gamma;
            let q = qform(&space, p, &eta).unwrap();
            worst = worst.max((q + 2.0 * g).abs());
        }
    }
    ensure(worst <= 1e-10, || format!("max |Q+2γ| {worst:.3e}"))?;
    Ok(format!("800 evaluations, max |Q+2γ| {worst:.2e}"))
}

/// Q(η) ≤ −(Γ/2)‖η‖₁² for zero-sum η.
fn gap_bounds_form() -> Check {
    let mut r = rng(8);
    let mut tightest = f64::INFINITY;
    for k in 0..10 {
        let n = r.random_range(3..=6);
        let space = random_metric(&mut r, n, 1.0, 3.0);
        for p in [0.0, 1.0] {
            let gamma = negative_type_gap(&space, p, &GapOptions::default()).unwrap().gamma_star;
            for _ in 0..200 {
                let eta = random_zero_sum(&mut r, n);
                let l1: f64 = eta.iter().map(|x| x.abs()).sum();
                let q = qform(&space, p, &eta).unwrap();
                let slack = -(gamma / 2.0) * l1 * l1 + 1e-8 - q;
                ensure(slack >= 0.0, || format!("space {k}, p={p}: violated by {:.3e}", -slack))?;
                tightest = tightest.min(slack);
            }
        }
    }
    Ok(format!("4000 vectors, smallest slack {tightest:.2e}"))
}

/// Boundary behavior at ζ and the 4-point bipartite example.
fn boundary_behavior() -> Check {
    for n in 3..=8 {
        for ratio in [1.25, 1.5, 2.0] {
            let space = construct_extremal(n, ratio, Mode::Metric).unwrap();
            let z = finite(zeta(n, ratio).unwrap());
            ensure(check_negative_type(&space, z, DEFAULT_EIGEN_TOL).unwrap().holds, || {
                format!("n={n}, 𝔇={ratio}: type fails at ζ")
            })?;
            let strict = check_strict_negative_type(&space, z, DEFAULT_EIGEN_TOL).unwrap();
            let null = matches!(
                strict.certificate,
                Certificate::ViolatingVector { violation: Violation::Null, .. }
            );
            ensure(!strict.holds && null, || format!("n={n}, 𝔇={ratio}: no null certificate at ζ"))?;
            ensure(strict.recheck(&space, z).unwrap(), || format!("n={n}, 𝔇={ratio}: certificate does not recheck"))?;
            for f in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
                ensure(check_strict_negative_type(&space, f * z, DEFAULT_EIGEN_TOL).unwrap().holds, || {
                    format!("n={n}, 𝔇={ratio}: strict type fails at {f}ζ")
                })?;
            }
        }
    }
    let square = bipartite4();
    let p = finite(max_negative_type(&square, 1e-6).unwrap().p_max);
    ensure((p - 1.0).abs() <= 1e-6, || format!("bipartite maxp {p}"))?;
    let eta = [1.0, 1.0, -1.0, -1.0];
    let q = qform(&square, 1.0, &eta).unwrap();
    ensure(q.abs() <= 1e-12, || format!("Q(η) = {q}"))?;
    ensure(check_negative_type(&square, 1.0, DEFAULT_EIGEN_TOL).unwrap().holds, || "type fails at 1".into())?;
    let strict = check_strict_negative_type(&square, 1.0, DEFAULT_EIGEN_TOL).unwrap();
    ensure(!strict.holds, || "bipartite strict at p=1".into())?;
    Ok(format!("18 extremal spaces; bipartite maxp {p:.7}, Q(1,1,−1,−1) = {q}"))
}

fn main() {
    let criteria: [(fn() -> Check, Duration); 9] = [
        (uniform_loads_at_zero, Duration::from_secs(10)),
        (zero_gap_by_enumeration, Duration::from_secs(60)),
        (zeta_is_sound, Duration::from_secs(30)),
        (extremal_metric_sharpness, Duration::from_secs(30)),
        (extremal_semimetric_sharpness, Duration::from_secs(30)),
        (tree_cross_check, Duration::from_secs(120)),
        (gap_form_bridge, Duration::from_secs(30)),
        (gap_bounds_form, Duration::from_secs(30)),
        (boundary_behavior, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= budget {
                Ok(detail)
            } else {
                Err(format!("{detail}; over budget {:.1}s > {}s", elapsed.as_secs_f64(), budget.as_secs()))
            }
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS ({:.2}s) {detail}", i + 1, elapsed.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL ({:.2}s) {detail}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
