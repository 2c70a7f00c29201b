//! Roots of the associated polynomial K(z) and their classification against
//! the unit circle. Aberth-Ehrlich simultaneous iteration with a
//! companion-matrix QR fallback; nearby roots are merged into one root with
//! summed multiplicity.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::symbols::Symbol;

/// Boundary-detection tolerance: roots with ||alpha| - 1| below this count
/// as lying on the unit circle.
pub const TAU_UNIT: f64 = 1e-8;

/// Roots closer than 1e-8 * (1 + |alpha|) are one numerical root.
pub const CLUSTER_RTOL: f64 = 1e-8;

/// Pre-grouping radius for multiplicity refinement. An m-fold root computed
/// in double precision scatters over a radius near eps^(1/m), wider than
/// the merge radius; candidates inside this band are re-polished with
/// multiplicity-aware Newton before the merge test decides.
const GROUP_RTOL: f64 = 1e-4;

/// Where a root sits relative to the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircleSide {
    Inside,
    Outside,
    Boundary,
}

/// Root list with multiplicities and the leading coefficient, enough to
/// reconstruct the polynomial.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<(C64, usize)>,
    pub leading: C64,
    pub degree: usize,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|(_, m)| m).sum()
    }

    pub fn side(root: C64) -> CircleSide {
        let d = root.norm() - 1.0;
        if d.abs() <= TAU_UNIT {
            CircleSide::Boundary
        } else if d < 0.0 {
            CircleSide::Inside
        } else {
            CircleSide::Outside
        }
    }

    /// Coefficients of leading * prod (z - root)^mult, ascending.
    pub fn reconstruct(&self) -> Vec<C64> {
        let mut poly = vec![self.leading];
        for &(root, mult) in &self.roots {
            for _ in 0..mult {
                let mut next = vec![C64::new(0.0, 0.0); poly.len() + 1];
                for (p, &c) in poly.iter().enumerate() {
                    next[p + 1] += c;
                    next[p] -= c * root;
                }
                poly = next;
            }
        }
        poly
    }
}

/// Coefficients of K(z) = sum_m a_m z^{m + n0} for a banded symbol,
/// ascending in z.
pub fn associated_polynomial(f: &Symbol) -> Result<Vec<C64>> {
    let n0 = f
        .band_degree()
        .ok_or_else(|| Error::Config("associated polynomial needs a trigonometric polynomial".into()))?;
    Ok((-(n0 as i64)..=(n0 as i64))
        .map(|j| f.coefficient(j))
        .collect())
}

fn poly_eval(coeffs: &[C64], z: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn poly_derivative(coeffs: &[C64]) -> Vec<C64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(p, &c)| c * p as f64)
        .collect()
}

/// Backward-error scale sum |c_i| |z|^i for the residual test.
fn residual_scale(coeffs: &[C64], z: C64) -> f64 {
    let r = z.norm();
    let mut pow = 1.0;
    let mut acc = 0.0;
    for &c in coeffs {
        acc += c.norm() * pow;
        pow *= r;
    }
    acc.max(f64::MIN_POSITIVE)
}

/// All roots of a polynomial (ascending coefficients, degree >= 1 after
/// trimming). Aberth-Ehrlich to residual 1e-13 * scale, companion-matrix QR
/// on stagnation; clustered roots merged with summed multiplicity.
pub fn find_roots(coeffs: &[C64]) -> Result<RootSet> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Config("zero polynomial has no root set".into()));
    }
    let mut hi = coeffs.len();
    while hi > 0 && coeffs[hi - 1].norm() <= 1e-14 * scale {
        hi -= 1;
    }
    let mut lo = 0;
    while lo < hi && coeffs[lo].norm() <= 1e-14 * scale {
        lo += 1;
    }
    let trimmed = &coeffs[lo..hi];
    let zero_mult = lo;
    let degree_total = hi - 1;
    let leading = coeffs[hi - 1];
    if degree_total == 0 {
        // Constant polynomial: empty root set.
        return Ok(RootSet {
            roots: Vec::new(),
            leading,
            degree: 0,
        });
    }

    // Trailing coefficients under the trim threshold are treated as noise;
    // all polishing and residual checks run against the trimmed polynomial,
    // since the dropped tail dominates evaluations near the outer roots.
    //
    // Balance by the substitution z = s w with s the geometric root-modulus
    // estimate: without it the coefficient range (and the companion matrix)
    // can span many orders of magnitude and the iterations lose accuracy.
    let trim_degree = trimmed.len() - 1;
    let s_factor = if trim_degree >= 1 {
        (trimmed[0].norm() / trimmed[trim_degree].norm())
            .powf(1.0 / trim_degree as f64)
            .clamp(1e-3, 1e3)
    } else {
        1.0
    };
    let mut balanced: Vec<C64> = Vec::with_capacity(trimmed.len());
    let mut s_pow = 1.0f64;
    for &c in trimmed {
        balanced.push(c * s_pow);
        s_pow *= s_factor;
    }
    let bal_max = balanced.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for c in balanced.iter_mut() {
        *c /= bal_max;
    }

    let mut raw: Vec<C64> = Vec::with_capacity(degree_total - zero_mult);
    if balanced.len() >= 2 {
        raw.extend(aberth(&balanced).or_else(|_| companion_roots(&balanced))?);
    }

    let deriv = poly_derivative(&balanced);
    for w in raw.iter_mut() {
        for _ in 0..3 {
            let p = poly_eval(&balanced, *w);
            let d = poly_eval(&deriv, *w);
            if d.norm() > 1e-300 {
                let step = p / d;
                if step.norm() < 0.5 * (1.0 + w.norm()) {
                    *w -= step;
                }
            }
        }
    }

    for &w in &raw {
        let resid = poly_eval(&balanced, w).norm();
        let tol = 1e-10 * residual_scale(&balanced, w);
        if resid > tol {
            return Err(Error::RootFindingFailed { residual: resid });
        }
    }
    // Back to the original variable.
    for w in raw.iter_mut() {
        *w *= s_factor;
    }

    // Loose grouping, multiplicity-aware refinement, then the merge test.
    let mut groups: Vec<Vec<C64>> = Vec::new();
    for &z in &raw {
        let mut placed = false;
        for group in groups.iter_mut() {
            if group
                .iter()
                .any(|&w| (w - z).norm() <= GROUP_RTOL * (1.0 + z.norm()))
            {
                group.push(z);
                placed = true;
                break;
            }
        }
        if !placed {
            groups.push(vec![z]);
        }
    }
    let mut roots: Vec<(C64, usize)> = Vec::new();
    for group in &groups {
        let m = group.len();
        if m == 1 {
            roots.push((group[0], 1));
            continue;
        }
        // Newton with multiplicity m converges quadratically to an m-fold
        // root; members that fail to collapse were separate roots. The
        // refinement runs in the balanced variable.
        let polished: Vec<C64> = group
            .iter()
            .map(|&start| {
                let mut w = start / s_factor;
                for _ in 0..8 {
                    let p = poly_eval(&balanced, w);
                    let d = poly_eval(&deriv, w);
                    if d.norm() <= 1e-300 {
                        break;
                    }
                    let step = p / d * m as f64;
                    if step.norm() > 0.5 * (1.0 + w.norm()) {
                        break;
                    }
                    w -= step;
                }
                w * s_factor
            })
            .collect();
        let centroid: C64 = polished.iter().sum::<C64>() / m as f64;
        let collapsed = polished
            .iter()
            .all(|&z| (z - centroid).norm() <= CLUSTER_RTOL * (1.0 + centroid.norm()));
        if collapsed {
            roots.push((centroid, m));
        } else {
            for &z in group {
                roots.push((z, 1));
            }
        }
    }
    if zero_mult > 0 {
        roots.push((C64::new(0.0, 0.0), zero_mult));
    }
    roots.sort_by(|a, b| {
        (a.0.norm(), a.0.arg())
            .partial_cmp(&(b.0.norm(), b.0.arg()))
            .unwrap()
    });
    Ok(RootSet {
        roots,
        leading,
        degree: degree_total,
    })
}

/// Aberth-Ehrlich iteration; coefficients must have nonzero edge terms.
fn aberth(coeffs: &[C64]) -> Result<Vec<C64>> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    let deriv = poly_derivative(coeffs);

    // Initial guesses on a circle between the standard root bounds.
    let upper = 1.0
        + coeffs[..degree]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let lower = (coeffs[0] / lead).norm().powf(1.0 / degree as f64);
    let radius = (upper * lower.max(1e-12)).sqrt().clamp(1e-6, upper);
    let mut z: Vec<C64> = (0..degree)
        .map(|k| C64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.7))
        .collect();

    let mut converged = vec![false; degree];
    for _iter in 0..400 {
        let mut all_done = true;
        let mut max_step = 0.0f64;
        for k in 0..degree {
            if converged[k] {
                continue;
            }
            let p = poly_eval(coeffs, z[k]);
            if p.norm() <= 1e-13 * residual_scale(coeffs, z[k]) {
                converged[k] = true;
                continue;
            }
            all_done = false;
            let d = poly_eval(&deriv, z[k]);
            let newton = if d.norm() > 1e-300 {
                p / d
            } else {
                C64::new(1e-8, 1e-8)
            };
            let mut repulsion = C64::new(0.0, 0.0);
            for j in 0..degree {
                if j != k {
                    let gap = z[k] - z[j];
                    if gap.norm() > 1e-300 {
                        repulsion += gap.inv();
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 1e-12 {
                newton / denom
            } else {
                newton
            };
            z[k] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
        }
        if all_done {
            return Ok(z);
        }
        // Stagnation: essentially no movement but residuals still large.
        if max_step < 1e-16 {
            break;
        }
    }
    let worst = z
        .iter()
        .map(|&w| poly_eval(coeffs, w).norm())
        .fold(0.0, f64::max);
    Err(Error::RootFindingFailed { residual: worst })
}

/// Eigenvalues of the companion matrix by explicit shifted QR on the
/// Hessenberg form; the fallback path when Aberth stagnates.
pub fn companion_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    // Companion matrix is already upper Hessenberg: ones on the
    // subdiagonal, -c_i / lead in the last column.
    let mut h = vec![C64::new(0.0, 0.0); n * n];
    for i in 1..n {
        h[i * n + i - 1] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        h[i * n + n - 1] = -coeffs[i] / lead;
    }
    let mut roots = Vec::with_capacity(n);
    let mut hi = n;
    let mut stagnant = 0usize;
    let mut iters_left = 80 * n + 400;
    while hi > 0 {
        if hi == 1 {
            roots.push(h[0]);
            break;
        }
        // Largest lo with a negligible subdiagonal entry under it; the
        // active block is [lo, hi).
        let mut lo = hi - 1;
        while lo > 0 {
            let off = h[lo * n + lo - 1].norm();
            let diag = h[(lo - 1) * n + lo - 1].norm() + h[lo * n + lo].norm();
            if off <= f64::EPSILON * diag.max(1e-300) {
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            // Bottom 1x1 decoupled.
            roots.push(h[lo * n + lo]);
            hi -= 1;
            stagnant = 0;
            continue;
        }
        if iters_left == 0 {
            return Err(Error::RootFindingFailed { residual: f64::NAN });
        }
        iters_left -= 1;
        stagnant += 1;

        // Wilkinson shift from the trailing 2x2, with an exceptional shift
        // every 12 stagnant sweeps.
        let a = h[(hi - 2) * n + hi - 2];
        let b = h[(hi - 2) * n + hi - 1];
        let c = h[(hi - 1) * n + hi - 2];
        let d = h[(hi - 1) * n + hi - 1];
        let shift = if stagnant % 12 == 0 {
            d + C64::new(c.norm() * 1.1, 0.3 * b.norm())
        } else {
            let tr = a + d;
            let disc = (tr * tr - (a * d - b * c) * 4.0).sqrt();
            let mu1 = (tr + disc) * 0.5;
            let mu2 = (tr - disc) * 0.5;
            if (mu1 - d).norm() < (mu2 - d).norm() {
                mu1
            } else {
                mu2
            }
        };

        // Explicit shifted QR restricted to the active block:
        // H - sI = QR (left Givens), then RQ + sI (right Givens).
        for i in lo..hi {
            h[i * n + i] -= shift;
        }
        let mut rotations: Vec<(usize, C64, C64)> = Vec::with_capacity(hi - lo - 1);
        for k in lo..hi - 1 {
            let x = h[k * n + k];
            let y = h[(k + 1) * n + k];
            let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if norm == 0.0 {
                (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
            } else {
                (x.conj() / norm, y.conj() / norm)
            };
            rotations.push((k, cs, sn));
            for col in k..hi {
                let hk = h[k * n + col];
                let hk1 = h[(k + 1) * n + col];
                h[k * n + col] = cs * hk + sn * hk1;
                h[(k + 1) * n + col] = -sn.conj() * hk + cs.conj() * hk1;
            }
        }
        for &(k, cs, sn) in &rotations {
            let top = (k + 2).min(hi - 1);
            for row in lo..=top {
                let hk = h[row * n + k];
                let hk1 = h[row * n + k + 1];
                h[row * n + k] = hk * cs.conj() + hk1 * sn.conj();
                h[row * n + k + 1] = -hk * sn + hk1 * cs;
            }
        }
        for i in lo..hi {
            h[i * n + i] += shift;
        }
        // Deflate the bottom eigenvalue as soon as it decouples.
        let off = h[(hi - 1) * n + hi - 2].norm();
        let diag = h[(hi - 2) * n + hi - 2].norm() + h[(hi - 1) * n + hi - 1].norm();
        if off <= f64::EPSILON * diag.max(1e-300) {
            roots.push(h[(hi - 1) * n + hi - 1]);
            hi -= 1;
            stagnant = 0;
        }
    }
    Ok(roots)
}

/// Splits a root set against the unit circle: Ok((inside, outside)) with the
/// multiplicity-weighted inside count equal to n0 and no boundary roots.
pub fn classify_unit_circle(
    rs: &RootSet,
    n0: usize,
) -> Result<(Vec<(C64, usize)>, Vec<(C64, usize)>)> {
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for &(root, mult) in &rs.roots {
        match RootSet::side(root) {
            CircleSide::Boundary => {
                return Err(Error::BoundaryRoot {
                    modulus: root.norm(),
                })
            }
            CircleSide::Inside => inside.push((root, mult)),
            CircleSide::Outside => outside.push((root, mult)),
        }
    }
    let count_in: usize = inside.iter().map(|(_, m)| m).sum();
    let count_out: usize = outside.iter().map(|(_, m)| m).sum();
    if count_in != n0 || count_out != n0 {
        return Err(Error::UnbalancedSplit {
            inside: count_in,
            outside: count_out,
            expected: n0,
        });
    }
    Ok((inside, outside))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::builtin_symbol;
    use std::collections::BTreeMap;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn associated_polynomial_examples() {
        let kms = builtin_symbol("kms", &BTreeMap::new()).unwrap();
        let k = associated_polynomial(&kms).unwrap();
        assert_eq!(k.len(), 3);
        assert!((k[0] - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((k[1] - c(1.25, 0.0)).norm() < 1e-15);
        assert!((k[2] - c(-0.5, 0.0)).norm() < 1e-15);

        let one = Symbol::trig_poly(vec![c(1.0, 0.0)]).unwrap();
        let k = associated_polynomial(&one).unwrap();
        assert_eq!(k, vec![c(1.0, 0.0)]);

        let lap = builtin_symbol("laplace", &BTreeMap::new()).unwrap();
        let k = associated_polynomial(&lap).unwrap();
        assert_eq!(k.len(), 3);
        assert!((k[0] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((k[1] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((k[2] - c(-1.0, 0.0)).norm() < 1e-15);
        // K(e^{i theta}) = e^{i n0 theta} f(theta) at sample points.
        for t in 0..64 {
            let theta = 2.0 * std::f64::consts::PI * t as f64 / 64.0;
            let z = C64::from_polar(1.0, theta);
            let lhs = poly_eval(&k, z);
            let rhs = C64::from_polar(1.0, theta) * lap.evaluate(theta);
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn quadratic_roots() {
        // -1/2 + (5/4) z - (1/2) z^2 -> roots 1/2 and 2.
        let rs = find_roots(&[c(-0.5, 0.0), c(1.25, 0.0), c(-0.5, 0.0)]).unwrap();
        assert_eq!(rs.roots.len(), 2);
        assert!((rs.roots[0].0 - c(0.5, 0.0)).norm() < 1e-12);
        assert!((rs.roots[1].0 - c(2.0, 0.0)).norm() < 1e-12);
        assert_eq!(rs.roots[0].1, 1);
        assert_eq!(rs.roots[1].1, 1);
    }

    #[test]
    fn double_root_merges() {
        // -(z - 1)^2 = -1 + 2z - z^2
        let rs = find_roots(&[c(-1.0, 0.0), c(2.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert_eq!(rs.roots[0].1, 2);
        assert!((rs.roots[0].0 - c(1.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn quartic_roots_of_unity() {
        let rs = find_roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        assert_eq!(rs.roots.len(), 4);
        for (root, mult) in &rs.roots {
            assert_eq!(*mult, 1);
            assert!((root.powi(4) - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn reconstruction_matches_planted_roots() {
        let planted = [c(0.4, 0.2), c(-0.7, 0.0), c(1.6, -0.9), c(0.1, -1.4)];
        let mut coeffs = vec![c(0.8, -0.3)];
        for &root in &planted {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (p, &co) in coeffs.iter().enumerate() {
                next[p + 1] += co;
                next[p] -= co * root;
            }
            coeffs = next;
        }
        let rs = find_roots(&coeffs).unwrap();
        assert_eq!(rs.roots.len(), 4);
        for &root in &planted {
            let best = rs
                .roots
                .iter()
                .map(|(r, _)| (r - root).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10, "planted {root} missed by {best}");
        }
        // Reconstruction invariant.
        let rebuilt = rs.reconstruct();
        let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in rebuilt.iter().zip(coeffs.iter()) {
            assert!((a - b).norm() < 1e-8 * scale);
        }
    }

    #[test]
    fn companion_fallback_agrees() {
        let coeffs = [c(-2.0, 1.0), c(0.5, 0.0), c(0.0, -1.2), c(1.0, 0.0)];
        let direct = find_roots(&coeffs).unwrap();
        let fallback = companion_roots(&coeffs).unwrap();
        assert_eq!(fallback.len(), 3);
        for z in fallback {
            let best = direct
                .roots
                .iter()
                .map(|(r, _)| (r - z).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "companion root {z} missed by {best}");
        }
    }

    #[test]
    fn classify_kms_and_boundary() {
        let kms = builtin_symbol("kms", &BTreeMap::new()).unwrap();
        let rs = find_roots(&associated_polynomial(&kms).unwrap()).unwrap();
        let (inside, outside) = classify_unit_circle(&rs, 1).unwrap();
        assert_eq!(inside.len(), 1);
        assert_eq!(outside.len(), 1);
        assert!((inside[0].0 - c(0.5, 0.0)).norm() < 1e-12);
        assert!((outside[0].0 - c(2.0, 0.0)).norm() < 1e-12);

        let lap = builtin_symbol("laplace", &BTreeMap::new()).unwrap();
        let rs = find_roots(&associated_polynomial(&lap).unwrap()).unwrap();
        assert!(matches!(
            classify_unit_circle(&rs, 1),
            Err(Error::BoundaryRoot { .. })
        ));
    }

    #[test]
    fn classify_two_root_symbol_from_planted_roots() {
        // K built from roots {1/2, 2, 1/3, 3} with leading coefficient 1/5,
        // then classified; round trip per construction.
        let planted = [c(0.5, 0.0), c(2.0, 0.0), c(1.0 / 3.0, 0.0), c(3.0, 0.0)];
        let mut coeffs = vec![c(0.2, 0.0)];
        for &root in &planted {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (p, &co) in coeffs.iter().enumerate() {
                next[p + 1] += co;
                next[p] -= co * root;
            }
            coeffs = next;
        }
        let rs = find_roots(&coeffs).unwrap();
        let (inside, outside) = classify_unit_circle(&rs, 2).unwrap();
        let inside_mods: Vec<f64> = inside.iter().map(|(r, _)| r.norm()).collect();
        assert!(inside_mods.iter().any(|&m| (m - 0.5).abs() < 1e-10));
        assert!(inside_mods.iter().any(|&m| (m - 1.0 / 3.0).abs() < 1e-10));
        let outside_mods: Vec<f64> = outside.iter().map(|(r, _)| r.norm()).collect();
        assert!(outside_mods.iter().any(|&m| (m - 2.0).abs() < 1e-10));
        assert!(outside_mods.iter().any(|&m| (m - 3.0).abs() < 1e-10));
    }

    #[test]
    fn root_pairing_for_real_symbols() {
        // For Hermitian symbols the root set is closed under
        // alpha -> 1 / conj(alpha).
        for name in ["kms"] {
            let f = builtin_symbol(name, &BTreeMap::new()).unwrap();
            let rs = find_roots(&associated_polynomial(&f).unwrap()).unwrap();
            for &(root, _) in &rs.roots {
                let mirror = root.conj().inv();
                let best = rs
                    .roots
                    .iter()
                    .map(|(r, _)| (r - mirror).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(best < 1e-8, "{name}: mirror of {root} missing");
            }
        }
    }

    #[test]
    fn unbalanced_split_detected() {
        // Both roots inside: z^2 - 0.5 z + 0.04 has roots 0.1, 0.4.
        let rs = find_roots(&[c(0.04, 0.0), c(-0.5, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(
            classify_unit_circle(&rs, 1),
            Err(Error::UnbalancedSplit { .. })
        ));
    }
}
