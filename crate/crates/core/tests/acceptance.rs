//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines; every tolerance is pinned in the assertions.

mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64 as C64;
use toeplitz_spectra::band_inverse::{decay_certificate, hankel_norm_scan, BandInverse};
use toeplitz_spectra::factorization::{pi_minus_pole_coefficients, series_weight, shift_polynomials};
use toeplitz_spectra::regular;
use toeplitz_spectra::secular::{self, TestFn};
use toeplitz_spectra::toeplitz::{levinson_predictor, verify_predictor_moments, ToeplitzMatrix};

fn report(name: &str, ok: bool, detail: &str) {
    if ok {
        println!("PASS {name}: {detail}");
    } else {
        println!("FAIL {name}: {detail}");
        panic!("{name} failed: {detail}");
    }
}

#[test]
fn criterion_01_band_inverse_oracle_equivalence() {
    let mut worst_diff = 0.0f64;
    let mut worst_resid = 0.0f64;
    for (f, name) in band_corpus() {
        for n in [8usize, 16, 32, 64] {
            let inv = BandInverse::new(&f, n).unwrap();
            let t = ToeplitzMatrix::build(&f, n).unwrap();
            let oracle = t.dense_inverse().unwrap();
            let closed = inv.to_dense();
            for k in 0..=n {
                for l in 0..=n {
                    worst_diff = worst_diff.max((closed[(k, l)] - oracle[(k, l)]).norm());
                }
            }
            let resid = t.to_dense().identity_residual(&closed);
            worst_resid = worst_resid.max(resid);
            assert!(
                resid <= 1e-8,
                "{name} N={n}: identity residual {resid:.3e}"
            );
        }
    }
    report(
        "criterion 1 (band-inverse oracle equivalence)",
        worst_diff <= 1e-8 && worst_resid <= 1e-8,
        &format!("max entrywise diff {worst_diff:.3e}, max identity residual {worst_resid:.3e}"),
    );
}

#[test]
fn criterion_02_decay_certification() {
    let n = 128;
    let mut ok = true;
    let mut details = Vec::new();
    for (f, name) in band_corpus() {
        let inv = BandInverse::new(&f, n).unwrap();
        let rho = inv.rho();
        let cert = decay_certificate(|k, l| inv.entry(k, l), n, f.band_degree().unwrap(), rho, 0.0);
        let fit_ok = (cert.rho_fitted - rho).abs() <= 0.05 * rho;
        // Literal bound 10 * rho^{0.9 d} on every window entry.
        let mut bound_ok = true;
        for k in 0..=n {
            for l in 0..=n {
                let d = k.abs_diff(l);
                if d >= n / 4 && inv.entry(k, l).norm() > 10.0 * rho.powf(0.9 * d as f64) {
                    bound_ok = false;
                }
            }
        }
        ok &= fit_ok && bound_ok && cert.pass;
        details.push(format!(
            "{name}: fitted {:.4} vs theory {:.4} (bound {})",
            cert.rho_fitted,
            rho,
            if bound_ok { "ok" } else { "violated" }
        ));
    }
    report("criterion 2 (decay certification)", ok, &details.join("; "));
}

#[test]
fn criterion_03_hankel_norm_slope() {
    let orders = [8usize, 16, 32, 64];
    let mut ok = true;
    let mut details = Vec::new();
    for (f, name) in band_corpus() {
        let inv = BandInverse::new(&f, 8).unwrap();
        let want = 2.0 * inv.rho().ln();
        let (_, slope) = hankel_norm_scan(&f, &orders).unwrap();
        let within = (slope - want).abs() <= 0.1 * want.abs();
        ok &= within;
        details.push(format!("{name}: slope {slope:.4} vs 2 ln rho = {want:.4}"));
    }
    report("criterion 3 (Hankel norm slope)", ok, &details.join("; "));
}

#[test]
fn criterion_04_secular_eigensolver() {
    let mut worst = 0.0f64;
    for (f, name) in even_corpus() {
        for n in [8usize, 16, 32] {
            let located = secular::locate_eigenvalues(&f, n).unwrap();
            assert_eq!(located.len(), n + 1, "{name} N={n}: count");
            let oracle = ToeplitzMatrix::build(&f, n)
                .unwrap()
                .hermitian_eigenvalues()
                .unwrap();
            for (a, b) in located.iter().zip(oracle.iter()) {
                worst = worst.max((a - b).abs());
                assert!(
                    (a - b).abs() <= 1e-8,
                    "{name} N={n}: secular {a} vs dense {b}"
                );
            }
        }
    }
    report(
        "criterion 4 (secular eigensolver vs dense oracle)",
        worst <= 1e-8,
        &format!("max |secular - dense| = {worst:.3e} over degrees 1-3, N in {{8,16,32}}"),
    );
}

#[test]
fn criterion_05_localization() {
    let mut corpus = even_corpus();
    corpus.push((min_at_pi(), "min-at-pi"));
    let mut max_theta = 0.0f64;
    let mut ok = true;
    for (f, name) in &corpus {
        for n in [16usize, 32, 64, 128] {
            let eigs = ToeplitzMatrix::build(f, n)
                .unwrap()
                .hermitian_eigenvalues()
                .unwrap();
            let rep = secular::localize(&eigs, f, n).unwrap();
            max_theta = max_theta.max(rep.max_abs_theta);
            let arg_ok = rep.k_min_argument_gap <= PI / (n as f64).sqrt();
            if !(rep.bijective && rep.max_abs_theta < 1.0 && arg_ok) {
                ok = false;
                println!(
                    "  {name} N={n}: bijective={} max|theta|={:.4} arg gap {:.4} (limit {:.4})",
                    rep.bijective,
                    rep.max_abs_theta,
                    rep.k_min_argument_gap,
                    PI / (n as f64).sqrt()
                );
            }
        }
    }
    report(
        "criterion 5 (localization)",
        ok,
        &format!("bijective assignments with max |theta| = {max_theta:.4} < 1"),
    );
}

#[test]
fn criterion_06_laplacian_closed_form() {
    let n = 9;
    let f = laplace();
    let dense = ToeplitzMatrix::build(&f, n)
        .unwrap()
        .hermitian_eigenvalues()
        .unwrap();
    // Independent oracle: Sylvester inertia count from the LDL recursion of
    // the shifted tridiagonal matrix, q_1 = 2 - x, q_i = (2 - x) - 1/q_{i-1};
    // the number of negative q_i equals the number of eigenvalues below x.
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = 2.0 - x;
        if q < 0.0 {
            count += 1;
        }
        for _ in 2..=n + 1 {
            let denom = if q == 0.0 { 1e-300 } else { q };
            q = (2.0 - x) - 1.0 / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let mut worst = 0.0f64;
    for k in 1..=n + 1 {
        let formula = 2.0 - 2.0 * (k as f64 * PI / 11.0).cos();
        // Bisect the k-th eigenvalue from the Sturm count.
        let (mut lo, mut hi) = (0.0f64, 4.0f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if count_below(mid) >= k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let recursion = 0.5 * (lo + hi);
        worst = worst.max((dense[k - 1] - formula).abs());
        worst = worst.max((recursion - formula).abs());
    }
    report(
        "criterion 6 (Laplacian closed form, N=9)",
        worst <= 1e-10,
        &format!("max deviation from 2 - 2 cos(k pi / 11): {worst:.3e}"),
    );
}

#[test]
fn criterion_07_predictor_proposition() {
    let mut worst = 0.0f64;
    for (h, name) in [(kms(), "kms"), (exp_cos(), "exp_cos")] {
        for m in [1usize, 4, 8, 16] {
            let p = levinson_predictor(&h, m).unwrap();
            let err = verify_predictor_moments(&h, &p).unwrap();
            worst = worst.max(err);
            assert!(err <= 1e-9, "{name} M={m}: moment error {err:.3e}");
        }
    }
    report(
        "criterion 7 (predictor moment identity)",
        worst <= 1e-9,
        &format!("max moment defect {worst:.3e} over M in {{1,4,8,16}}"),
    );
}

#[test]
fn criterion_08_projection_identity() {
    // 50 pseudo-random (alpha, r, m) triples against a truncated series.
    let mut state = 0x4d595df4d0f33173u64;
    let mut next_f64 = |scale: f64| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * scale
    };
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let modulus = next_f64(0.9);
        let phase = next_f64(2.0 * PI);
        let alpha = C64::from_polar(modulus, phase);
        let r = (next_f64(41.0)) as usize;
        let m = 1 + (next_f64(4.0)) as usize;
        let len = 120usize;
        let closed = pi_minus_pole_coefficients(alpha, r, m.min(4), len);
        // Truncated series with binomial weights (200 terms).
        let mut fact = 1.0f64;
        for t in 1..m.min(4) {
            fact *= t as f64;
        }
        for (idx, &got) in closed.iter().enumerate() {
            let w = idx + 1;
            let u = (w + r) as u64;
            if (w + r) > 200 {
                break;
            }
            let want = alpha.powu((w + r) as u32) * (series_weight(m.min(4), u) as f64 / fact);
            worst = worst.max((got - want).norm());
        }
    }
    // Shift-polynomial identity exact in integers for m <= 5.
    let mut exact = true;
    for m in 1..=5usize {
        let phis = shift_polynomials(m);
        for w in 0..12u64 {
            for r in 0..12i128 {
                let lhs = series_weight(m, w + r as u64) as i128;
                let rhs: i128 = (1..=m)
                    .map(|k| phis[k - 1].eval(r) * series_weight(k, w) as i128)
                    .sum();
                if lhs != rhs {
                    exact = false;
                }
            }
        }
    }
    report(
        "criterion 8 (projection identity)",
        worst <= 1e-10 && exact,
        &format!("max series deviation {worst:.3e}; integer identity exact for m <= 5: {exact}"),
    );
}

#[test]
fn criterion_09_weyl_statistics_decrease() {
    let mut ok = true;
    let mut details = Vec::new();
    for (f, name) in band_corpus() {
        for tf in [TestFn::X, TestFn::XSquared, TestFn::Cos] {
            let mut last = f64::INFINITY;
            for n in [32usize, 64, 128] {
                let eigs = ToeplitzMatrix::build(&f, n)
                    .unwrap()
                    .hermitian_eigenvalues()
                    .unwrap();
                let stat = secular::weyl_statistic(&eigs, &f, n, &[tf]).unwrap()[0].value;
                // Absolute floor covers statistics that are exactly zero by
                // the trace identity, where roundoff noise is not ordered.
                if stat > 1.1 * last + 1e-12 {
                    ok = false;
                    details.push(format!("{name} {} N={n}: {stat:.3e} after {last:.3e}", tf.name()));
                }
                last = stat;
            }
        }
    }
    let detail = if details.is_empty() {
        "each step <= 1.1x previous for h in {x, x^2, cos x}".to_string()
    } else {
        details.join("; ")
    };
    report("criterion 9 (Weyl statistics decrease over N)", ok, &detail);
}

#[test]
fn criterion_10_eigenvalue_range() {
    let sweep = [1usize, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256];
    let mut corpus = band_corpus();
    corpus.push((even_degree_two(), "even-deg2"));
    corpus.push((even_degree_three(), "even-deg3"));
    corpus.push((min_at_pi(), "min-at-pi"));
    corpus.push((exp_cos(), "exp_cos"));
    let mut worst_overflow = 0.0f64;
    for (f, name) in &corpus {
        let (lo, hi) = f.min_max();
        for &n in &sweep {
            let eigs = ToeplitzMatrix::build(f, n)
                .unwrap()
                .hermitian_eigenvalues()
                .unwrap();
            for lam in eigs {
                let overflow = (lo - lam).max(lam - hi).max(0.0);
                worst_overflow = worst_overflow.max(overflow);
                assert!(
                    overflow <= 1e-9,
                    "{name} N={n}: eigenvalue {lam} outside [{lo}, {hi}]"
                );
            }
        }
    }
    report(
        "criterion 10 (eigenvalue range invariant)",
        worst_overflow <= 1e-9,
        &format!("max range overflow {worst_overflow:.3e} over N <= 256"),
    );
}

#[test]
fn criterion_11_regular_symbol_decay() {
    let f = exp_cos();
    let n = 128;
    let approx = regular::approximation_with_degree(&f, 8).unwrap();
    let rep = regular::neumann_decay_report(&f, &approx, n, None).unwrap();
    let log_linear = rep.decay.rho_fitted.is_finite() && rep.decay.rho_fitted < 1.0;
    let ok = log_linear && rep.rate_dominated_by_approximant;
    report(
        "criterion 11 (regular-symbol decay vs approximant)",
        ok,
        &format!(
            "fitted rate {:.4e} <= 1.1 x approximant band rate {:.4e}",
            rep.decay.rho_fitted, rep.approx_band_rho
        ),
    );
}
