//! Regular (strictly positive) symbols: approximation by the square modulus
//! of a polynomial and Neumann-series decay certification of the dense
//! inverse against the approximant's band rate.
//!
//! The approximant comes from the predictor polynomial of h = 1/f: its
//! inverse square modulus matches the moments of 1/f up to the degree, so
//! |P_M|^2 converges to f as M grows.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::band_inverse::{ols, DecayReport};
use crate::error::{Error, Result};
use crate::polyroots::find_roots;
use crate::symbols::Symbol;
use crate::toeplitz::{levinson_from_moments, PredictorPolynomial, ToeplitzMatrix};

/// Grid used to measure the sup error of an approximation.
const SUP_GRID: usize = 4096;

/// A polynomial P with |P|^2 close to the target symbol in sup norm.
#[derive(Clone, Debug)]
pub struct RegularApproximation {
    pub polynomial: PredictorPolynomial,
    /// sup over the grid of | |P(e^{i theta})|^2 - f(theta) |.
    pub sup_error: f64,
    /// min of f on the torus.
    pub symbol_min: f64,
    /// sup_error < symbol_min / 2, the margin the Neumann argument needs.
    pub margin_ok: bool,
}

impl RegularApproximation {
    pub fn degree(&self) -> usize {
        self.polynomial.degree()
    }

    /// Largest inside-root modulus of the associated polynomial of |P|^2;
    /// the approximant's band decay rate (< 1).
    pub fn band_rho(&self) -> Result<f64> {
        let roots = find_roots(&self.polynomial.coeffs)?;
        // P has no roots in the closed disk; the inside roots of the
        // approximant's associated polynomial are their reflections.
        let mut rho: f64 = 0.0;
        for &(z, _) in &roots.roots {
            let m = z.norm();
            if (m - 1.0).abs() <= 1e-8 {
                return Err(Error::BoundaryRoot { modulus: m });
            }
            rho = rho.max(1.0 / m);
        }
        Ok(rho)
    }

    /// The band symbol |P|^2.
    pub fn square_modulus_symbol(&self) -> Result<Symbol> {
        Symbol::trig_poly(self.polynomial.square_modulus_coefficients())
    }
}

fn sup_error_on_grid(f: &Symbol, p_coeffs: &[C64], sigma_scale: f64) -> f64 {
    let mut worst = 0.0f64;
    for t in 0..SUP_GRID {
        let theta = 2.0 * PI * t as f64 / SUP_GRID as f64;
        let z = C64::from_polar(1.0, theta);
        let mut acc = C64::new(0.0, 0.0);
        for &b in p_coeffs.iter().rev() {
            acc = acc * z + b;
        }
        let sq = acc.norm_sqr() * sigma_scale;
        worst = worst.max((sq - f.evaluate_real(theta)).abs());
    }
    worst
}

/// Smallest degree M <= max_degree whose predictor-of-1/f square modulus
/// approximates f within eps_target in sup norm. The Levinson recursion is
/// incremental, so every intermediate degree is inspected in one pass.
pub fn square_modulus_approximation(
    f: &Symbol,
    eps_target: f64,
    max_degree: usize,
) -> Result<RegularApproximation> {
    let (min, _) = f.min_max();
    if min <= 0.0 {
        return Err(Error::NotPositive { min });
    }
    // Moments of h = 1/f by quadrature.
    let grid = crate::symbols::quadrature_grid_size(max_degree).max(1024);
    let mut samples = Vec::with_capacity(grid);
    for t in 0..grid {
        let theta = 2.0 * PI * t as f64 / grid as f64;
        let v = f.evaluate_real(theta);
        if v <= 0.0 || !v.is_finite() {
            return Err(Error::NotPositive { min: v });
        }
        samples.push(1.0 / v);
    }
    let moment = |j: usize| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (t, &v) in samples.iter().enumerate() {
            acc += v * C64::from_polar(1.0, -2.0 * PI * j as f64 * t as f64 / grid as f64);
        }
        acc / grid as f64
    };
    let moments: Vec<C64> = (0..=max_degree).map(moment).collect();

    let mut best: Option<(usize, f64, PredictorPolynomial)> = None;
    for m in 0..=max_degree {
        let p = match levinson_from_moments(&moments[..=m]) {
            Ok(p) => p,
            Err(e) => {
                if best.is_some() {
                    break;
                }
                return Err(e);
            }
        };
        let eps = sup_error_on_grid(f, &p.coeffs, 1.0);
        match &best {
            Some((_, best_eps, _)) if eps >= *best_eps => {}
            _ => best = Some((m, eps, p.clone())),
        }
        if eps <= eps_target {
            return Ok(RegularApproximation {
                polynomial: p,
                sup_error: eps,
                symbol_min: min,
                margin_ok: eps < min / 2.0,
            });
        }
    }
    let (_, best_eps, _) = best.ok_or_else(|| Error::Config("no approximant computed".into()))?;
    Err(Error::ApproximationTargetUnreachable {
        target: eps_target,
        max_degree,
        best: best_eps,
    })
}

/// Predictor approximant of fixed degree M, without the search.
pub fn approximation_with_degree(f: &Symbol, m: usize) -> Result<RegularApproximation> {
    let (min, _) = f.min_max();
    if min <= 0.0 {
        return Err(Error::NotPositive { min });
    }
    let inv = invert_symbol(f)?;
    let p = crate::toeplitz::levinson_predictor(&inv, m)?;
    let eps = sup_error_on_grid(f, &p.coeffs, 1.0);
    Ok(RegularApproximation {
        polynomial: p,
        sup_error: eps,
        symbol_min: min,
        margin_ok: eps < min / 2.0,
    })
}

fn invert_symbol(f: &Symbol) -> Result<Symbol> {
    let f_clone = f.clone();
    Symbol::smooth(
        move |theta| 1.0 / f_clone.evaluate_real(theta),
        crate::symbols::SmoothnessGrade::Continuous,
        crate::symbols::SymbolFlags {
            is_real: f.flags.is_real,
            is_even: f.flags.is_even,
            has_unique_min: false,
            critical_set_finite: f.flags.critical_set_finite,
        },
        "reciprocal",
    )
}

/// Decay certification of T_N(f)^{-1} for a regular symbol, reported
/// against a probe rate and against the band rate of the approximant.
#[derive(Clone, Debug, Serialize)]
pub struct NeumannDecayReport {
    pub n: usize,
    pub approx_degree: usize,
    pub approx_sup_error: f64,
    pub symbol_min: f64,
    /// Decay fit of the dense inverse of T_N(f).
    pub decay: DecayReport,
    /// Band decay rate of the approximant (max inside-root modulus, < 1).
    pub approx_band_rho: f64,
    /// Probe rate (> 1 convention): defaults to 1 / approx_band_rho.
    pub rho_probe: f64,
    /// Fitted rate of f's inverse is at most 1.1x the approximant's rate.
    pub rate_dominated_by_approximant: bool,
    /// Every usable entry bounded by C (1/rho_probe)^{|k-l|}.
    pub probe_bound_ok: bool,
}

/// Computes the dense inverse of T_N(f), fits its off-diagonal decay
/// (window capped at the double-precision floor), and cross-reports the
/// closed-form band rate of the approximant. Errors if the approximation
/// margin eps < min(f)/2 fails.
pub fn neumann_decay_report(
    f: &Symbol,
    approx: &RegularApproximation,
    n: usize,
    rho_probe: Option<f64>,
) -> Result<NeumannDecayReport> {
    if !approx.margin_ok {
        return Err(Error::MarginViolated {
            eps: approx.sup_error,
            half_min: approx.symbol_min / 2.0,
        });
    }
    let t = ToeplitzMatrix::build(f, n)?;
    let inverse = t.dense_inverse()?;
    let floor = 1e-12 * inverse.max_abs();
    let band_rho = approx.band_rho()?;
    let probe = match rho_probe {
        Some(p) => {
            if p <= 1.0 {
                return Err(Error::Config(format!(
                    "rho probe must exceed 1 (got {p})"
                )));
            }
            p
        }
        None => 1.0 / band_rho,
    };

    // Adaptive window: the nominal N/4 opening can lie entirely below the
    // floor for fast-decaying inverses; back it off to the usable range.
    let size = n + 1;
    let mut max_per_distance = vec![0.0f64; size];
    for k in 0..size {
        for l in 0..size {
            let d = k.abs_diff(l);
            max_per_distance[d] = max_per_distance[d].max(inverse[(k, l)].norm());
        }
    }
    let d_hi = (1..size)
        .rev()
        .find(|&d| max_per_distance[d] > floor)
        .unwrap_or(1);
    let nominal = (n / 4).max(1);
    let d_lo = nominal.min(((d_hi as f64) * 0.4).ceil() as usize).max(2);

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (d, &v) in max_per_distance.iter().enumerate().skip(d_lo) {
        if v > floor {
            xs.push(d as f64);
            ys.push(v.ln());
        }
    }
    let (slope, intercept) = if xs.len() >= 2 {
        ols(&xs, &ys)
    } else {
        (f64::NAN, f64::NAN)
    };
    let fitted = slope.exp();
    let bound_c = 10.0 * intercept.exp();
    let mut probe_bound_ok = xs.len() >= 2 && slope < 0.0;
    for (d, &v) in max_per_distance.iter().enumerate().skip(d_lo) {
        if v <= floor {
            continue;
        }
        if v > bound_c * (1.0 / probe).powf(0.9 * d as f64) {
            probe_bound_ok = false;
        }
    }
    let decay = DecayReport {
        n,
        band: approx.degree(),
        rho_theory: band_rho,
        rho_fitted: fitted,
        fit_intercept: intercept,
        window_min_distance: d_lo,
        window_max_distance: xs.last().map(|&x| x as usize).unwrap_or(d_lo),
        floor,
        bound_constant: bound_c,
        decay_exponent: 0.9,
        pass: probe_bound_ok,
    };
    Ok(NeumannDecayReport {
        n,
        approx_degree: approx.degree(),
        approx_sup_error: approx.sup_error,
        symbol_min: approx.symbol_min,
        decay,
        approx_band_rho: band_rho,
        rho_probe: probe,
        rate_dominated_by_approximant: fitted <= band_rho * 1.1,
        probe_bound_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{builtin_symbol, SmoothnessGrade, SymbolFlags};
    use std::collections::BTreeMap;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn constant_symbol_is_recovered_exactly() {
        let f = Symbol::trig_poly(vec![c(4.0, 0.0)]).unwrap();
        let approx = square_modulus_approximation(&f, 1e-12, 8).unwrap();
        assert_eq!(approx.degree(), 0);
        assert!((approx.polynomial.coeffs[0].norm() - 2.0).abs() < 1e-12);
        assert!(approx.sup_error < 1e-12);
        assert!(approx.margin_ok);
    }

    #[test]
    fn kms_factor_recovered_at_degree_one() {
        let f = builtin_symbol("kms", &BTreeMap::new()).unwrap();
        let approx = square_modulus_approximation(&f, 1e-10, 8).unwrap();
        assert_eq!(approx.degree(), 1);
        let p = &approx.polynomial.coeffs;
        // P = 1 - chi/2 up to a unit phase.
        let ratio = p[1] / p[0];
        assert!((ratio - c(-0.5, 0.0)).norm() < 1e-9, "{p:?}");
        assert!(approx.sup_error <= 1e-10);
        let rho = approx.band_rho().unwrap();
        assert!((rho - 0.5).abs() < 1e-9);
    }

    #[test]
    fn sup_error_decreases_with_degree() {
        let f = builtin_symbol("exp_cos", &BTreeMap::new()).unwrap();
        let mut last = f64::INFINITY;
        for m in [4usize, 8, 16] {
            let approx = approximation_with_degree(&f, m).unwrap();
            assert!(
                approx.sup_error <= last * 1.000001,
                "m={m}: {} vs {last}",
                approx.sup_error
            );
            last = approx.sup_error;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn moment_bridge_via_predictor() {
        // Fourier coefficients of 1/|P_M|^2 match those of 1/f for |s| <= M.
        let f = builtin_symbol("exp_cos", &BTreeMap::new()).unwrap();
        let m = 10;
        let approx = approximation_with_degree(&f, m).unwrap();
        let inv = invert_symbol(&f).unwrap();
        let err = crate::toeplitz::verify_predictor_moments(&inv, &approx.polynomial).unwrap();
        assert!(err < 1e-9, "moment error {err}");
    }

    #[test]
    fn approximant_roots_stay_off_circle() {
        let f = builtin_symbol("exp_cos", &BTreeMap::new()).unwrap();
        let approx = approximation_with_degree(&f, 8).unwrap();
        let roots = find_roots(&approx.polynomial.coeffs).unwrap();
        for &(z, _) in &roots.roots {
            assert!((z.norm() - 1.0).abs() > 1e-8);
            assert!(z.norm() > 1.0, "predictor root {z} inside the disk");
        }
    }

    #[test]
    fn neumann_report_kms() {
        let f = builtin_symbol("kms", &BTreeMap::new()).unwrap();
        let approx = square_modulus_approximation(&f, 1e-10, 8).unwrap();
        let report = neumann_decay_report(&f, &approx, 96, None).unwrap();
        assert!(report.probe_bound_ok);
        assert!((report.decay.rho_fitted - 0.5).abs() < 0.025);
        assert!((report.rho_probe - 2.0).abs() < 1e-6);
        assert!(report.rate_dominated_by_approximant);
    }

    #[test]
    fn neumann_report_constant() {
        let f = Symbol::trig_poly(vec![c(3.0, 0.0)]).unwrap();
        let approx = square_modulus_approximation(&f, 1e-12, 4).unwrap();
        let report = neumann_decay_report(&f, &approx, 48, Some(100.0)).unwrap();
        // Off-diagonal entries vanish: nothing usable, no violation.
        assert!(report.decay.window_max_distance <= report.decay.window_min_distance);
    }

    #[test]
    fn margin_violation_detected() {
        // A kink at the minimum stalls the sup-norm convergence; with a tiny
        // minimum the margin eps < min/2 is unreachable.
        let f = Symbol::smooth(
            |theta: f64| 0.002 + (theta - PI).abs() / PI,
            SmoothnessGrade::Continuous,
            SymbolFlags {
                is_real: true,
                is_even: true,
                has_unique_min: true,
                critical_set_finite: true,
            },
            "kink",
        )
        .unwrap();
        let approx = approximation_with_degree(&f, 24).unwrap();
        assert!(!approx.margin_ok);
        assert!(matches!(
            neumann_decay_report(&f, &approx, 32, None),
            Err(Error::MarginViolated { .. })
        ));
        // And the search path reports the target unreachable.
        assert!(matches!(
            square_modulus_approximation(&f, 1e-4, 24),
            Err(Error::ApproximationTargetUnreachable { .. })
        ));
    }
}
