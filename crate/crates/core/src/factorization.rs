//! Wiener-Hopf split of a band symbol from its classified roots, partial
//! fraction residues, and the combinatorial weights behind the projection
//! of geometric poles.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::polyroots::RootSet;
use crate::symbols::Symbol;

/// Split f = g1 * g2 on the circle, with
/// g1(chi) = constant * prod (1 - b_j chi)^{t_j} analytic in the disk and
/// g2(chi) = prod (1 - a_i conj(chi))^{s_i} co-analytic. The b_j are the
/// reciprocals of the outside roots of K; for Hermitian symbols they pair
/// with the conjugates of the inside roots a_i.
#[derive(Clone, Debug)]
pub struct WienerHopfFactorization {
    /// Inside roots a_i of K with multiplicities; the poles of 1/g2.
    pub inside: Vec<(C64, usize)>,
    /// Reciprocal outside roots b_j with multiplicities; the poles of 1/g1.
    pub g1_params: Vec<(C64, usize)>,
    /// Leading constant of g1, absorbing the polynomial's leading
    /// coefficient and the root reflections.
    pub constant: C64,
    /// Residues of 1 / prod (1 - a_i w)^{s_i} in the basis (1 - a_i w)^{-t}.
    pub g2_residues: Vec<Vec<C64>>,
    /// Residues of 1 / prod (1 - b_j w)^{t_j} in the basis (1 - b_j w)^{-h}.
    pub g1_residues: Vec<Vec<C64>>,
    /// All multiplicities equal one.
    pub simple_roots: bool,
}

impl WienerHopfFactorization {
    pub fn g1(&self, chi: C64) -> C64 {
        let mut acc = self.constant;
        for &(b, t) in &self.g1_params {
            acc *= (C64::new(1.0, 0.0) - b * chi).powu(t as u32);
        }
        acc
    }

    pub fn g2(&self, chi: C64) -> C64 {
        let mut acc = C64::new(1.0, 0.0);
        for &(a, s) in &self.inside {
            acc *= (C64::new(1.0, 0.0) - a * chi.conj()).powu(s as u32);
        }
        acc
    }

    /// Largest inside-root modulus; the decay rate of the inverse.
    pub fn rho(&self) -> f64 {
        self.inside
            .iter()
            .map(|(a, _)| a.norm())
            .fold(0.0, f64::max)
    }

    /// 1/g2 evaluated through the residue table (test hook for the
    /// partial-fraction invariant).
    pub fn g2_reciprocal_via_residues(&self, chi: C64) -> C64 {
        let w = chi.conj();
        let mut acc = C64::new(0.0, 0.0);
        for (i, &(a, s)) in self.inside.iter().enumerate() {
            for t in 1..=s {
                let denom = (C64::new(1.0, 0.0) - a * w).powu(t as u32);
                acc += self.g2_residues[i][t - 1] / denom;
            }
        }
        acc
    }

    /// 1/g1 evaluated through the residue table.
    pub fn g1_reciprocal_via_residues(&self, chi: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (j, &(b, t)) in self.g1_params.iter().enumerate() {
            for h in 1..=t {
                let denom = (C64::new(1.0, 0.0) - b * chi).powu(h as u32);
                acc += self.g1_residues[j][h - 1] / denom;
            }
        }
        acc / self.constant
    }
}

/// Build the split from classified roots. The constant is chosen so the
/// product reproduces f rather than assuming a normalized leading
/// coefficient.
pub fn wiener_hopf_split(rs: &RootSet, f: &Symbol) -> Result<WienerHopfFactorization> {
    let n0 = f
        .band_degree()
        .ok_or_else(|| Error::Config("wiener-hopf split needs a band symbol".into()))?;
    let (inside, outside) = crate::polyroots::classify_unit_circle(rs, n0)?;
    // f = chi^{-n0} K(chi); with K = C prod (chi - a_i) prod (chi - beta_k):
    //   (chi - a)    = chi (1 - a conj(chi))        on the circle,
    //   (chi - beta) = -beta (1 - chi / beta),
    // so the constant multiplying g1's product form is C prod (-beta_k).
    let mut constant = rs.leading;
    let mut g1_params = Vec::with_capacity(outside.len());
    for &(beta, t) in &outside {
        for _ in 0..t {
            constant *= -beta;
        }
        g1_params.push((beta.inv(), t));
    }
    let g2_residues = partial_fractions(&inside)?;
    let g1_residues = partial_fractions(&g1_params)?;
    let simple_roots = inside.iter().all(|&(_, s)| s == 1) && g1_params.iter().all(|&(_, t)| t == 1);
    Ok(WienerHopfFactorization {
        inside,
        g1_params,
        constant,
        g2_residues,
        g1_residues,
        simple_roots,
    })
}

/// Residues of 1 / prod_j (1 - zeta_j w)^{s_j} in the basis
/// (1 - zeta_j w)^{-h}, 1 <= h <= s_j. Simple poles use the closed product
/// formula; multiple poles are solved from samples, which stays usable for
/// clusters near the merge threshold.
pub fn partial_fractions(poles: &[(C64, usize)]) -> Result<Vec<Vec<C64>>> {
    for (i, &(zi, _)) in poles.iter().enumerate() {
        for &(zj, _) in poles.iter().skip(i + 1) {
            let gap = (zi - zj).norm();
            if gap < 1e-12 * (1.0 + zi.norm()) {
                return Err(Error::CoincidentPoles { gap });
            }
        }
    }
    if poles.iter().all(|&(_, s)| s == 1) {
        let mut out = Vec::with_capacity(poles.len());
        for (j, &(zj, _)) in poles.iter().enumerate() {
            let mut acc = C64::new(1.0, 0.0);
            for (n, &(zn, _)) in poles.iter().enumerate() {
                if n != j {
                    acc /= C64::new(1.0, 0.0) - zn / zj;
                }
            }
            out.push(vec![acc]);
        }
        return Ok(out);
    }
    // Sampling + least squares in the pole basis.
    let unknowns: usize = poles.iter().map(|&(_, s)| s).sum();
    let samples = (4 * unknowns).max(64);
    let mut rows = Vec::with_capacity(samples);
    let mut rhs = Vec::with_capacity(samples);
    for p in 0..samples {
        // Off-pole ring: radius 0.35 keeps clear of poles at |1/zeta| >= 1.
        let w = C64::from_polar(0.35, 2.0 * std::f64::consts::PI * (p as f64 + 0.31) / samples as f64);
        let mut row = Vec::with_capacity(unknowns);
        for &(zeta, s) in poles {
            let base = C64::new(1.0, 0.0) - zeta * w;
            for h in 1..=s {
                row.push(base.powi(-(h as i32)));
            }
        }
        let mut target = C64::new(1.0, 0.0);
        for &(zeta, s) in poles {
            target /= (C64::new(1.0, 0.0) - zeta * w).powu(s as u32);
        }
        rows.push(row);
        rhs.push(target);
    }
    // Normal equations, solved by LU.
    let mut ata = crate::linalg::CMatrix::zeros(unknowns, unknowns);
    let mut atb = vec![C64::new(0.0, 0.0); unknowns];
    for (row, &target) in rows.iter().zip(rhs.iter()) {
        for i in 0..unknowns {
            let ci = row[i].conj();
            atb[i] += ci * target;
            for j in 0..unknowns {
                ata[(i, j)] += ci * row[j];
            }
        }
    }
    let solved = crate::linalg::Lu::factor(&ata)?.solve(&atb);
    // Verify by evaluation at the samples.
    let mut worst = 0.0f64;
    for (row, &target) in rows.iter().zip(rhs.iter()) {
        let mut acc = C64::new(0.0, 0.0);
        for (i, &coef) in solved.iter().enumerate() {
            acc += coef * row[i];
        }
        worst = worst.max((acc - target).norm() / (1.0 + target.norm()));
    }
    if worst > 1e-8 {
        return Err(Error::CoincidentPoles { gap: worst });
    }
    let mut out = Vec::with_capacity(poles.len());
    let mut cursor = 0;
    for &(_, s) in poles {
        out.push(solved[cursor..cursor + s].to_vec());
        cursor += s;
    }
    Ok(out)
}

/// Weight of the u-th series coefficient of a pole of order m:
/// 1 for m = 1, else (u+1)(u+2)...(u+m-1). The binomial series carries an
/// extra 1/(m-1)! which callers fold into their residue tables.
pub fn series_weight(m: usize, u: u64) -> u128 {
    if m <= 1 {
        return 1;
    }
    let mut acc: u128 = 1;
    for t in 1..m {
        acc *= (u + t as u64) as u128;
    }
    acc
}

/// Integer polynomial in one variable, ascending coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly(pub Vec<i128>);

impl IntPoly {
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: i128) -> i128 {
        let mut acc = 0i128;
        for &c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0f64;
        for &c in self.0.iter().rev() {
            acc = acc * x + c as f64;
        }
        acc
    }

    fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut out = vec![0i128; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly(out)
    }
}

/// The expansion coefficients of the shifted weight: polynomials phi_{k,m}
/// of degree m-k with weight_m(w + r) = sum_k phi_{k,m}(r) weight_k(w)
/// identically. Returned as [phi_{1,m}, ..., phi_{m,m}], each exact in
/// integer arithmetic.
pub fn shift_polynomials(m: usize) -> Vec<IntPoly> {
    assert!(m >= 1);
    // Bivariate expansion of prod_{t=1..m-1} (w + r + t) as polynomials in w
    // with IntPoly coefficients in r.
    // coeffs_w[p] = polynomial in r multiplying w^p.
    let mut coeffs_w: Vec<IntPoly> = vec![IntPoly(vec![1])];
    for t in 1..m {
        // Multiply by (w + (r + t)).
        let mut next: Vec<IntPoly> = vec![IntPoly(vec![0]); coeffs_w.len() + 1];
        for (p, poly) in coeffs_w.iter().enumerate() {
            // w-term
            let mut bumped = next[p + 1].0.clone();
            grow_add(&mut bumped, &poly.0);
            next[p + 1] = IntPoly(bumped);
            // (r + t) term
            let shifted = poly.mul(&IntPoly(vec![t as i128, 1]));
            let mut base = next[p].0.clone();
            grow_add(&mut base, &shifted.0);
            next[p] = IntPoly(base);
        }
        coeffs_w = next;
    }
    // Reduce against the monic basis weight_k(w) = (w+1)...(w+k-1),
    // degree k-1, from the top down; divisions are exact.
    let mut basis: Vec<Vec<i128>> = Vec::with_capacity(m);
    for k in 1..=m {
        let mut b = vec![1i128];
        for t in 1..k {
            let mut next = vec![0i128; b.len() + 1];
            for (p, &c) in b.iter().enumerate() {
                next[p + 1] += c;
                next[p] += c * t as i128;
            }
            b = next;
        }
        basis.push(b);
    }
    let mut remainder = coeffs_w;
    let mut out: Vec<IntPoly> = vec![IntPoly(vec![0]); m];
    for k in (1..=m).rev() {
        let b = &basis[k - 1];
        let lead = remainder
            .get(k - 1)
            .cloned()
            .unwrap_or_else(|| IntPoly(vec![0]));
        out[k - 1] = lead.clone();
        // remainder -= lead(r) * basis_k(w)
        for (p, &c) in b.iter().enumerate() {
            let scaled = lead.mul(&IntPoly(vec![c]));
            let mut cur = remainder[p].0.clone();
            grow_sub(&mut cur, &scaled.0);
            remainder[p] = IntPoly(cur);
        }
    }
    debug_assert!(remainder.iter().all(|p| p.0.iter().all(|&c| c == 0)));
    out
}

fn grow_add(dst: &mut Vec<i128>, src: &[i128]) {
    if dst.len() < src.len() {
        dst.resize(src.len(), 0);
    }
    for (d, &s) in dst.iter_mut().zip(src.iter()) {
        *d += s;
    }
}

fn grow_sub(dst: &mut Vec<i128>, src: &[i128]) {
    if dst.len() < src.len() {
        dst.resize(src.len(), 0);
    }
    for (d, &s) in dst.iter_mut().zip(src.iter()) {
        *d -= s;
    }
}

/// Closed form of the co-analytic projection of a shifted geometric pole:
/// pi_minus(chi^r / (1 - alpha conj(chi))^m) as coefficients of
/// conj(chi)^w, w = 1..len. Uses the shift polynomials at r+1 together with
/// the factorial normalization of the binomial series.
pub fn pi_minus_pole_coefficients(alpha: C64, r: usize, m: usize, len: usize) -> Vec<C64> {
    let phis = shift_polynomials(m);
    let mut factorial = vec![1.0f64; m + 1];
    for k in 1..=m {
        factorial[k] = factorial[k - 1] * k as f64;
    }
    // coefficient of conj(chi)^w:
    //   alpha^{r+w} * sum_k [ (k-1)!/(m-1)! phi_{k,m}(r+1) ] * C(w-1+k-1, k-1)
    let mut out = Vec::with_capacity(len);
    let mut alpha_pow = alpha.powu(r as u32 + 1);
    for w in 1..=len {
        let mut acc = 0.0f64;
        for k in 1..=m {
            let coef = factorial[k - 1] / factorial[m - 1] * phis[k - 1].eval_f64((r + 1) as f64);
            let weight = series_weight(k, (w - 1) as u64) as f64 / factorial[k - 1];
            acc += coef * weight;
        }
        out.push(alpha_pow * acc);
        alpha_pow *= alpha;
    }
    out
}
