//! Eigenvalue location for even real trigonometric-polynomial symbols
//! through the secular determinant of the finite-rank Hankel block, plus
//! localization of eigenvalues on the f(k pi/(N+2) + theta pi/N) grid and
//! Weyl equidistribution statistics.
//!
//! For a level lambda the preimages of f1(x) = lambda map to points
//! omega_j in the closed unit disk; det(I - H_{N,lambda}) vanishes exactly
//! at eigenvalues of T_N(f). Bracketing runs on the rescaled real value
//!   det(T_N(f) - lambda I)
//!     = C1^{N+1} * prod_{i,j} (1 - omega_i omega_j)^{-1} * det(I - H),
//! which alternates sign between consecutive eigenvalues; the raw real part
//! of det(I - H) has tangential zeros and cannot be bracketed.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::band_inverse::hankel_block;
use crate::error::{Error, Result};
use crate::linalg::{Lu, ScaledC64};
use crate::symbols::{ChebForm, Symbol};

/// Nudging offset (times the level range) applied when a probe lands on an
/// excluded level.
const EXCLUDED_NUDGE: f64 = 1e-7;

/// The point in the closed unit disk with chi + 1/chi = 2 (1 - level).
/// Real levels in [0, 2] land on the circle with nonnegative imaginary
/// part; all other levels map strictly inside.
pub fn circle_point(level: C64) -> C64 {
    let s = C64::new(1.0, 0.0) - level;
    if level.im == 0.0 && (0.0..=2.0).contains(&level.re) {
        let s = s.re;
        return C64::new(s, (1.0 - s * s).max(0.0).sqrt());
    }
    // chi^2 - 2 s chi + 1 = 0; the two roots multiply to 1, so compute the
    // larger one stably and invert.
    let disc = (s * s - 1.0).sqrt();
    let r1 = s + disc;
    let r2 = s - disc;
    let big = if r1.norm() >= r2.norm() { r1 } else { r2 };
    let small = big.inv();
    if small.norm() <= 1.0 + 1e-12 {
        small
    } else {
        big
    }
}

/// Secular data at one candidate level.
#[derive(Clone, Debug)]
pub struct SecularSystem {
    pub level: f64,
    /// Preimages of f1(x) = level, with multiplicity as found.
    pub preimages: Vec<C64>,
    /// Disk points omega_j of the preimages.
    pub circle_points: Vec<C64>,
    /// Simple-pole residues A_j of the omega basis.
    pub residues: Vec<C64>,
    /// I - H on the omega basis.
    pub eye_minus_h: crate::linalg::CMatrix,
    /// det(I - H).
    pub determinant: C64,
    /// |Im| fraction of the determinant; surfaced because realness of the
    /// determinant is a measured property, not an assumption.
    pub determinant_imag_fraction: f64,
    /// Scaled value proportional to det(T_N(f) - level I).
    pub char_value: ScaledC64,
    pub excluded: bool,
}

/// Assembles the Hankel block and secular determinant for an even real
/// trig-poly symbol at a candidate level.
pub fn secular_determinant(f: &Symbol, level: f64, n: usize) -> Result<SecularSystem> {
    let f1 = f.cheb_form()?;
    let excluded_levels = f.excluded_levels();
    let (lo, hi) = f.min_max();
    let range = (hi - lo).max(f64::MIN_POSITIVE);
    let excluded = excluded_levels
        .iter()
        .any(|&v| (v - level).abs() <= 1e-9 * range);
    if excluded {
        return Err(Error::ExcludedLevel { level });
    }
    secular_system_unchecked(&f1, level, n)
}

fn secular_system_unchecked(f1: &ChebForm, level: f64, n: usize) -> Result<SecularSystem> {
    let r = f1.degree();
    if r == 0 {
        return Err(Error::Config(
            "secular determinant needs a non-constant symbol".into(),
        ));
    }
    // Roots of f1(x) - level.
    let mut poly: Vec<C64> = f1.coeffs.iter().map(|&c| C64::new(c, 0.0)).collect();
    poly[0] -= level;
    let rs = crate::polyroots::find_roots(&poly)
        .map_err(|_| Error::PreimageSolveFailed { level })?;
    let mut preimages = Vec::with_capacity(r);
    for &(root, mult) in &rs.roots {
        for _ in 0..mult {
            preimages.push(root);
        }
    }
    if preimages.len() != r {
        return Err(Error::PreimageSolveFailed { level });
    }
    preimages.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let omegas: Vec<C64> = preimages.iter().map(|&x| circle_point(x)).collect();
    // Merged preimages sit at critical levels; treat proximity as excluded.
    for (i, &wi) in omegas.iter().enumerate() {
        for &wj in omegas.iter().skip(i + 1) {
            if (wi - wj).norm() < 1e-7 {
                return Err(Error::ExcludedLevel { level });
            }
        }
        // omega_i omega_j = 1 happens only at the endpoint levels.
        for &wj in omegas.iter() {
            if (wi * wj - C64::new(1.0, 0.0)).norm() < 1e-9 {
                return Err(Error::ExcludedLevel { level });
            }
        }
    }
    let block = hankel_block(&omegas, &omegas, n)?;
    let r_dim = block.dim;
    let mut eye_minus = crate::linalg::CMatrix::identity(r_dim);
    for i in 0..r_dim {
        for j in 0..r_dim {
            eye_minus[(i, j)] -= block.matrix[(i, j)];
        }
    }
    let det = Lu::factor(&eye_minus)
        .map(|lu| lu.determinant())
        .unwrap_or(ScaledC64 {
            value: C64::new(0.0, 0.0),
            exp2: 0,
        });
    let residues = crate::factorization::partial_fractions(
        &omegas.iter().map(|&w| (w, 1usize)).collect::<Vec<_>>(),
    )?
    .iter()
    .map(|v| v[0])
    .collect();

    // char = C1^{N+1} prod (1 - w_i w_j)^{-1} det(I - H), with
    // C1 = lead(f1) / (2^r prod w_j).
    let lead = f1.leading_coefficient();
    let mut c1 = ScaledC64::from_c(C64::new(lead / (2.0f64).powi(r as i32), 0.0));
    for &w in &omegas {
        c1 = c1.div_c(w);
    }
    let mut char_value = ScaledC64::one();
    char_value = char_value.mul(pow_scaled(c1, n as u64 + 1));
    for &wi in &omegas {
        for &wj in &omegas {
            char_value = char_value.div_c(C64::new(1.0, 0.0) - wi * wj);
        }
    }
    char_value = char_value.mul(det);

    let det_plain = det.value * (2.0f64).powi(det.exp2.clamp(-500, 500) as i32);
    Ok(SecularSystem {
        level,
        preimages,
        circle_points: omegas,
        residues,
        eye_minus_h: eye_minus,
        determinant: det_plain,
        determinant_imag_fraction: det.imag_fraction(),
        char_value,
        excluded: false,
    })
}

fn pow_scaled(base: ScaledC64, mut k: u64) -> ScaledC64 {
    let mut acc = ScaledC64::one();
    let mut b = base;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul(b);
        }
        b = b.mul(b);
        k >>= 1;
    }
    acc
}

/// Sign of the bracketing value proportional to det(T_N(f) - lambda I);
/// it alternates between consecutive eigenvalues.
fn char_sign_value(f1: &ChebForm, level: f64, n: usize) -> Result<f64> {
    let sys = secular_system_unchecked(f1, level, n)?;
    let v = sys.char_value;
    if v.is_zero() || v.value.re == 0.0 {
        return Ok(0.0);
    }
    Ok(v.value.re.signum())
}

/// Eigenvalues of T_N(f) located as roots of the secular characteristic
/// value, bracketed on a grid of 8(N+1) levels and bisected to
/// 1e-11 * range. Excluded levels are nudged; a count mismatch after
/// refinement is reported with the partial list.
pub fn locate_eigenvalues(f: &Symbol, n: usize) -> Result<Vec<f64>> {
    if !f.flags.is_real || !f.flags.is_even {
        return Err(Error::Config(
            "secular location needs an even real trig polynomial".into(),
        ));
    }
    if !f.flags.has_unique_min {
        return Err(Error::Config(
            "secular location needs a declared unique minimum; multi-minimum symbols pair up eigenvalues degenerately (use the dense path)".into(),
        ));
    }
    let f1 = f.cheb_form()?;
    if f1.degree() == 0 {
        return Err(Error::Config(
            "constant symbols have no secular spectrum".into(),
        ));
    }
    let (lo, hi) = f.min_max();
    let range = (hi - lo).max(f64::MIN_POSITIVE);
    let excluded = f.excluded_levels();

    for refinement in 0..2 {
        let grid_count = 8 * (n + 1) * (1 + 3 * refinement);
        let found = sweep_for_roots(&f1, n, lo, hi, range, &excluded, grid_count)?;
        if found.len() == n + 1 {
            return Ok(found);
        }
        if refinement == 1 {
            return Err(Error::BracketCountMismatch {
                expected: n + 1,
                found,
            });
        }
    }
    unreachable!()
}

fn sweep_for_roots(
    f1: &ChebForm,
    n: usize,
    lo: f64,
    hi: f64,
    range: f64,
    excluded: &[f64],
    grid_count: usize,
) -> Result<Vec<f64>> {
    let nudge = |level: f64| -> f64 {
        let mut v = level;
        for _ in 0..4 {
            if excluded.iter().any(|&e| (e - v).abs() <= 1e-9 * range) {
                v += EXCLUDED_NUDGE * range;
            } else {
                break;
            }
        }
        v
    };
    // A probe can trip the internal exclusion guards (merged preimages,
    // omega products near 1) slightly off the precomputed levels; nudge
    // again and, failing that, drop the probe rather than abort the sweep.
    let eval_probe = |level: f64| -> Option<(f64, f64)> {
        let mut v = level;
        for _ in 0..3 {
            match char_sign_value(f1, v, n) {
                Ok(s) => return Some((v, s)),
                Err(Error::ExcludedLevel { .. }) => v += EXCLUDED_NUDGE * range,
                Err(_) => return None,
            }
        }
        None
    };
    // Probe levels taken from the symbol on a theta grid: eigenvalues sit
    // near f(k pi/(N+2)), so this spacing adapts to flat stretches of f
    // where a uniform level grid would skip clustered eigenvalues.
    let margin = EXCLUDED_NUDGE * range;
    let mut levels: Vec<f64> = (0..=grid_count)
        .map(|t| {
            let theta = PI * t as f64 / grid_count as f64;
            nudge(f1.eval(1.0 - theta.cos()).clamp(lo + margin, hi - margin))
        })
        .collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * range);
    let mut probes = Vec::with_capacity(levels.len());
    for level in levels {
        if let Some(pair) = eval_probe(level) {
            probes.push(pair);
        }
    }
    let mut found = Vec::new();
    for pair in probes.windows(2) {
        let (l0, v0) = pair[0];
        let (l1, v1) = pair[1];
        if v0 == 0.0 {
            continue;
        }
        if v1 == 0.0 || v0.signum() != v1.signum() {
            // Bisect.
            let (mut a, mut b) = (l0, l1);
            let mut fa = v0;
            for _ in 0..60 {
                if (b - a).abs() <= 1e-11 * range {
                    break;
                }
                let mid = 0.5 * (a + b);
                let evaluated = eval_probe(mid).filter(|&(m, _)| m > a && m < b);
                let (mid, fm) = match evaluated {
                    Some(pair) => pair,
                    None => break,
                };
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fa.signum() != fm.signum() {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            found.push(0.5 * (a + b));
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    found.dedup_by(|a, b| (*a - *b).abs() <= 2e-11 * range);
    Ok(found)
}

/// Per-eigenvalue localization on the f(k pi/(N+2) + theta pi/N) grid.
#[derive(Clone, Debug, Serialize)]
pub struct EigenAssignment {
    pub eigenvalue: f64,
    pub k: usize,
    pub theta: f64,
    pub residual: f64,
}

/// Localization report: bijective assignment of eigenvalues to grid
/// indices with |theta| < 1, plus Weyl statistics and the gap of the
/// smallest eigenvalue over min f.
#[derive(Clone, Debug, Serialize)]
pub struct EigenLocalizationReport {
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    pub assignments: Vec<EigenAssignment>,
    pub max_abs_theta: f64,
    pub bijective: bool,
    pub pass: bool,
    /// k of the smallest eigenvalue and its argument gap |k pi/(N+2) - theta0|.
    pub k_min: usize,
    pub theta0: f64,
    pub k_min_argument_gap: f64,
    pub min_gap_to_symbol_min: f64,
    pub weyl: Vec<WeylStatistic>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylStatistic {
    pub test_function: String,
    pub value: f64,
}

/// Test functions for the Weyl statistic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestFn {
    X,
    XSquared,
    Cos,
    Abs,
}

impl TestFn {
    pub fn name(&self) -> &'static str {
        match self {
            TestFn::X => "x",
            TestFn::XSquared => "x^2",
            TestFn::Cos => "cos x",
            TestFn::Abs => "|x|",
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFn::X => x,
            TestFn::XSquared => x * x,
            TestFn::Cos => x.cos(),
            TestFn::Abs => x.abs(),
        }
    }
}

/// (1/N) | sum h(lambda_j) - sum h(f(-pi + 2 j pi/(N+1))) | for each test
/// function.
pub fn weyl_statistic(
    eigs: &[f64],
    f: &Symbol,
    n: usize,
    testfns: &[TestFn],
) -> Result<Vec<WeylStatistic>> {
    if eigs.len() != n + 1 {
        return Err(Error::EigenvalueCountMismatch {
            expected: n + 1,
            got: eigs.len(),
        });
    }
    let samples: Vec<f64> = (1..=n + 1)
        .map(|j| f.evaluate_real(-PI + 2.0 * PI * j as f64 / (n as f64 + 1.0)))
        .collect();
    Ok(testfns
        .iter()
        .map(|tf| {
            let eig_sum: f64 = eigs.iter().map(|&x| tf.eval(x)).sum();
            let sample_sum: f64 = samples.iter().map(|&x| tf.eval(x)).sum();
            WeylStatistic {
                test_function: tf.name().to_string(),
                value: (eig_sum - sample_sum).abs() / n as f64,
            }
        })
        .collect())
}

/// Solves f(k pi/(N+2) + theta pi/N) = lambda for theta in [-1, 1] by
/// scanning 8 cells and bisecting sign changes; returns the best theta and
/// its residual.
fn theta_solve(f: &Symbol, lambda: f64, n: usize, k: usize) -> (f64, f64) {
    let base = k as f64 * PI / (n as f64 + 2.0);
    let g = |theta: f64| f.evaluate_real(base + theta * PI / n as f64) - lambda;
    let cells = 8;
    let mut best = (0.0f64, f64::INFINITY);
    let mut prev_theta = -1.0;
    let mut prev_val = g(prev_theta);
    if prev_val.abs() < best.1 {
        best = (prev_theta, prev_val.abs());
    }
    for cell in 1..=cells {
        let theta = -1.0 + 2.0 * cell as f64 / cells as f64;
        let val = g(theta);
        if val.abs() < best.1 {
            best = (theta, val.abs());
        }
        if prev_val.signum() != val.signum() {
            let (mut a, mut b) = (prev_theta, theta);
            let mut fa = prev_val;
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                let fm = g(mid);
                if fm == 0.0 || (b - a).abs() < 1e-13 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fa.signum() != fm.signum() {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            let root = 0.5 * (a + b);
            let resid = g(root).abs();
            if resid < best.1 {
                best = (root, resid);
            }
        }
        prev_theta = theta;
        prev_val = val;
    }
    best
}

/// Builds the localization report: per-eigenvalue (k, theta) with a greedy
/// bijective assignment by ascending residual. Failure is a report state,
/// not an error.
pub fn localize(eigs: &[f64], f: &Symbol, n: usize) -> Result<EigenLocalizationReport> {
    if eigs.len() != n + 1 {
        return Err(Error::EigenvalueCountMismatch {
            expected: n + 1,
            got: eigs.len(),
        });
    }
    let count = n + 1;
    let (lo, hi) = f.min_max();
    // Residuals below the noise floor count as exact so that |theta|
    // breaks ties; otherwise roundoff shuffles equally good assignments.
    let floor = 1e-12 * (1.0 + (hi - lo).abs());
    // Candidate (residual, |theta|, k, theta) rows, one per eigenvalue.
    type CandidateRow = Vec<(f64, f64, usize, f64)>;
    let mut per_eig: Vec<CandidateRow> = Vec::with_capacity(count);
    for &lambda in eigs.iter() {
        let mut row = Vec::with_capacity(count);
        for k in 1..=count {
            let (theta, residual) = theta_solve(f, lambda, n, k);
            let quantized = if residual < floor { 0.0 } else { residual };
            row.push((quantized, theta.abs(), k, theta));
        }
        row.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
        per_eig.push(row);
    }
    // Maximum bipartite matching over candidates that genuinely solve
    // f(k pi/(N+2) + theta pi/N) = lambda with |theta| < 1. A plain greedy
    // pass can corner eigenvalues of non-monotone symbols into boundary
    // thetas even when a full interior assignment exists.
    let edge_tol = 1e-8 * (1.0 + (hi - lo).abs());
    let adjacency: Vec<Vec<usize>> = per_eig
        .iter()
        .map(|row| {
            row.iter()
                .filter(|&&(resid, abs_theta, _, _)| resid <= edge_tol && abs_theta < 1.0)
                .map(|&(_, _, k, _)| k)
                .collect()
        })
        .collect();
    let mut matched_k_of_eig: Vec<Option<usize>> = vec![None; count];
    let mut matched_eig_of_k: Vec<Option<usize>> = vec![None; count + 1];
    fn augment(
        ei: usize,
        adjacency: &[Vec<usize>],
        visited: &mut [bool],
        matched_k_of_eig: &mut [Option<usize>],
        matched_eig_of_k: &mut [Option<usize>],
    ) -> bool {
        for &k in &adjacency[ei] {
            if visited[k] {
                continue;
            }
            visited[k] = true;
            let free = match matched_eig_of_k[k] {
                None => true,
                Some(other) => augment(
                    other,
                    adjacency,
                    visited,
                    matched_k_of_eig,
                    matched_eig_of_k,
                ),
            };
            if free {
                matched_eig_of_k[k] = Some(ei);
                matched_k_of_eig[ei] = Some(k);
                return true;
            }
        }
        false
    }
    for ei in 0..count {
        let mut visited = vec![false; count + 1];
        augment(
            ei,
            &adjacency,
            &mut visited,
            &mut matched_k_of_eig,
            &mut matched_eig_of_k,
        );
    }
    // Fill any unmatched eigenvalues with the best remaining k so the
    // k-assignment stays a bijection; their theta may sit at the boundary.
    let mut assignments: Vec<EigenAssignment> = Vec::with_capacity(count);
    for (ei, &lambda) in eigs.iter().enumerate() {
        let chosen_k = matched_k_of_eig[ei];
        let pick = match chosen_k {
            Some(k) => per_eig[ei].iter().find(|&&(_, _, kk, _)| kk == k),
            None => per_eig[ei]
                .iter()
                .find(|&&(_, _, kk, _)| matched_eig_of_k[kk].is_none()),
        };
        let &(_, _, k, theta) = pick.expect("candidate exists for every k");
        if chosen_k.is_none() {
            matched_eig_of_k[k] = Some(ei);
            matched_k_of_eig[ei] = Some(k);
        }
        let (theta, residual) = (theta, theta_solve(f, lambda, n, k).1);
        assignments.push(EigenAssignment {
            eigenvalue: lambda,
            k,
            theta,
            residual,
        });
    }
    let mut seen = vec![false; count + 1];
    let mut bijective = true;
    for a in &assignments {
        if seen[a.k] {
            bijective = false;
        }
        seen[a.k] = true;
    }
    let max_abs_theta = assignments
        .iter()
        .map(|a| a.theta.abs())
        .fold(0.0, f64::max);
    let pass = bijective && max_abs_theta < 1.0;
    let theta0 = f.argmin();
    let k_min = assignments.first().map(|a| a.k).unwrap_or(0);
    let raw_gap = (k_min as f64 * PI / (n as f64 + 2.0) - theta0).abs();
    // Distance on the circle: theta0 near 2 pi is also near 0.
    let k_min_argument_gap = raw_gap.min(2.0 * PI - raw_gap);
    let weyl = weyl_statistic(eigs, f, n, &[TestFn::X, TestFn::XSquared, TestFn::Cos, TestFn::Abs])?;
    Ok(EigenLocalizationReport {
        n,
        eigenvalues: eigs.to_vec(),
        assignments,
        max_abs_theta,
        bijective,
        pass,
        k_min,
        theta0,
        k_min_argument_gap,
        min_gap_to_symbol_min: eigs[0] - lo,
        weyl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::builtin_symbol;
    use crate::toeplitz::ToeplitzMatrix;
    use std::collections::BTreeMap;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn laplace() -> Symbol {
        builtin_symbol("laplace", &BTreeMap::new()).unwrap()
    }

    #[test]
    fn circle_point_examples() {
        assert!((circle_point(c(0.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((circle_point(c(1.0, 0.0)) - c(0.0, 1.0)).norm() < 1e-15);
        assert!((circle_point(c(2.0, 0.0)) - c(-1.0, 0.0)).norm() < 1e-15);
        // level 5/2: root of chi^2 + 3 chi + 1 inside the disk.
        let chi = circle_point(c(2.5, 0.0));
        let want = (-3.0 + 5.0f64.sqrt()) / 2.0;
        assert!((chi - c(want, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn circle_point_quadratic_invariant() {
        let levels = [
            c(-0.7, 0.0),
            c(0.3, 0.0),
            c(1.9, 0.0),
            c(2.4, 0.0),
            c(0.5, 0.8),
            c(1.5, -2.0),
        ];
        for &lv in &levels {
            let chi = circle_point(lv);
            assert!(chi.norm() <= 1.0 + 1e-12, "level {lv}: |chi| = {}", chi.norm());
            let resid = (chi + chi.inv() - (c(1.0, 0.0) - lv) * 2.0).norm();
            assert!(resid < 1e-12, "level {lv}: residual {resid}");
            let on_circle = lv.im == 0.0 && (0.0..=2.0).contains(&lv.re);
            if on_circle {
                assert!((chi.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn laplacian_determinant_vanishes_at_eigenvalues() {
        // f = 2 - 2 cos theta, N = 9: dense eigenvalues 2 - 2 cos(k pi / 11)
        // must zero det(I - H).
        let f = laplace();
        let n = 9;
        for k in 1..=n + 1 {
            let lambda = 2.0 - 2.0 * (k as f64 * PI / 11.0).cos();
            let sys = secular_determinant(&f, lambda, n).unwrap();
            assert!(
                sys.determinant.norm() < 1e-8,
                "k={k}: |D| = {}",
                sys.determinant.norm()
            );
        }
    }

    #[test]
    fn determinant_above_range_is_near_one() {
        let f = laplace();
        let n = 12;
        let sys = secular_determinant(&f, 4.5, n).unwrap();
        assert!(sys.circle_points.iter().all(|w| w.norm() < 1.0));
        assert!((sys.determinant - c(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn excluded_levels_rejected() {
        let f = laplace();
        assert!(matches!(
            secular_determinant(&f, 0.0, 9),
            Err(Error::ExcludedLevel { .. })
        ));
        assert!(matches!(
            secular_determinant(&f, 4.0, 9),
            Err(Error::ExcludedLevel { .. })
        ));
    }

    #[test]
    fn locate_laplacian_matches_closed_form() {
        let f = laplace().with_flags(crate::symbols::SymbolFlags {
            is_real: true,
            is_even: true,
            has_unique_min: true,
            critical_set_finite: true,
        })
        .unwrap();
        let n = 9;
        let eigs = locate_eigenvalues(&f, n).unwrap();
        assert_eq!(eigs.len(), n + 1);
        for (idx, &lam) in eigs.iter().enumerate() {
            let want = 2.0 - 2.0 * ((idx as f64 + 1.0) * PI / 11.0).cos();
            assert!((lam - want).abs() < 1e-9, "k={idx}: {lam} vs {want}");
        }
    }

    #[test]
    fn locate_matches_dense_oracle_degree_two() {
        // r = 2 symbol with unique min: 6 - 8 cos theta + 2 cos 2 theta.
        let f = Symbol::trig_poly(vec![
            c(1.0, 0.0),
            c(-4.0, 0.0),
            c(6.0, 0.0),
            c(-4.0, 0.0),
            c(1.0, 0.0),
        ])
        .unwrap();
        let n = 16;
        let eigs = locate_eigenvalues(&f, n).unwrap();
        assert_eq!(eigs.len(), n + 1);
        let oracle = ToeplitzMatrix::build(&f, n)
            .unwrap()
            .hermitian_eigenvalues()
            .unwrap();
        for (a, b) in eigs.iter().zip(oracle.iter()) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn locate_rejects_constant() {
        let f = Symbol::trig_poly(vec![c(2.0, 0.0)]).unwrap();
        assert!(locate_eigenvalues(&f, 4).is_err());
    }

    #[test]
    fn localize_perfect_grid_gives_zero_theta() {
        let f = laplace();
        let n = 9;
        let synthetic: Vec<f64> = (1..=n + 1)
            .map(|k| f.evaluate_real(k as f64 * PI / (n as f64 + 2.0)))
            .collect();
        let report = localize(&synthetic, &f, n).unwrap();
        assert!(report.bijective);
        assert!(report.pass);
        assert!(report.max_abs_theta < 1e-9);
        for (idx, a) in report.assignments.iter().enumerate() {
            assert_eq!(a.k, idx + 1);
        }
    }

    #[test]
    fn localize_laplacian_exact_eigenvalues() {
        let f = laplace();
        let n = 9;
        let eigs: Vec<f64> = (1..=n + 1)
            .map(|k| 2.0 - 2.0 * (k as f64 * PI / 11.0).cos())
            .collect();
        let report = localize(&eigs, &f, n).unwrap();
        assert!(report.bijective);
        assert!(report.max_abs_theta < 1.0);
        assert!(report.pass);
        assert_eq!(report.k_min, 1);
    }

    #[test]
    fn localize_min_at_pi_symbol() {
        // 3 + 2 cos theta has its unique minimum at theta = pi; the smallest
        // eigenvalue must map near k = N + 1.
        let f = Symbol::trig_poly(vec![c(1.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)]).unwrap();
        let n = 24;
        let eigs = ToeplitzMatrix::build(&f, n)
            .unwrap()
            .hermitian_eigenvalues()
            .unwrap();
        let report = localize(&eigs, &f, n).unwrap();
        assert!(report.bijective);
        assert!(report.pass, "max theta {}", report.max_abs_theta);
        assert!((report.theta0 - PI).abs() < 1e-6);
        assert!(report.k_min >= n - 1, "k_min = {}", report.k_min);
        assert!(report.k_min_argument_gap <= PI / (n as f64).sqrt());
    }

    #[test]
    fn weyl_statistic_trace_identity() {
        // For h = x the statistic is |trace/N - mean|; the trace identity
        // makes it vanish to roundoff for band symbols.
        let f = laplace();
        let n = 32;
        let eigs = ToeplitzMatrix::build(&f, n)
            .unwrap()
            .hermitian_eigenvalues()
            .unwrap();
        let stats = weyl_statistic(&eigs, &f, n, &[TestFn::X]).unwrap();
        assert!(stats[0].value < 1e-12);
    }

    #[test]
    fn weyl_statistic_constant_list() {
        let f = Symbol::trig_poly(vec![c(3.0, 0.0)]).unwrap();
        let n = 8;
        let eigs = vec![3.0; n + 1];
        let stats =
            weyl_statistic(&eigs, &f, n, &[TestFn::X, TestFn::XSquared, TestFn::Cos]).unwrap();
        for s in stats {
            assert!(s.value < 1e-13);
        }
    }

    #[test]
    fn weyl_statistic_decreases_over_sweep() {
        let f = laplace();
        let mut last = f64::INFINITY;
        for n in [32usize, 64, 128] {
            let eigs = ToeplitzMatrix::build(&f, n)
                .unwrap()
                .hermitian_eigenvalues()
                .unwrap();
            let stats = weyl_statistic(&eigs, &f, n, &[TestFn::XSquared]).unwrap();
            assert!(
                stats[0].value <= 1.1 * last + 1e-12,
                "n={n}: {} vs {last}",
                stats[0].value
            );
            last = stats[0].value;
        }
    }
}
