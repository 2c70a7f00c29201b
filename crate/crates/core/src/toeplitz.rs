//! Toeplitz matrices T_N(f), dense oracles (LU inverse, Hermitian
//! eigenvalues), and the Levinson-Durbin predictor polynomial.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Lu};
use crate::symbols::Symbol;

/// Order-N Toeplitz matrix stored by its 2N+1 diagonals; the matrix is
/// (N+1) x (N+1) with entry (k, l) = f^(k - l) in 0-based indexing.
#[derive(Clone, Debug)]
pub struct ToeplitzMatrix {
    /// Order N; the matrix has N+1 rows.
    pub n: usize,
    /// Diagonal d_j at index j + N, -N <= j <= N.
    pub diagonals: Vec<C64>,
}

impl ToeplitzMatrix {
    /// T_N(f): entries f^(k - l) for 0 <= k, l <= N.
    pub fn build(f: &Symbol, n: usize) -> Result<ToeplitzMatrix> {
        let diagonals = f.fourier_coefficients(n)?;
        Ok(ToeplitzMatrix { n, diagonals })
    }

    pub fn size(&self) -> usize {
        self.n + 1
    }

    /// Entry at 0-based (row, col).
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        let j = row as i64 - col as i64;
        self.diagonals[(j + self.n as i64) as usize]
    }

    pub fn to_dense(&self) -> CMatrix {
        let size = self.size();
        let mut m = CMatrix::zeros(size, size);
        for row in 0..size {
            for col in 0..size {
                m[(row, col)] = self.entry(row, col);
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.diagonals.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max |d_{-j} - conj(d_j)|; zero for Hermitian matrices.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for j in 0..=n {
            let pos = self.diagonals[n + j];
            let neg = self.diagonals[n - j];
            worst = worst.max((neg - pos.conj()).norm());
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= 1e-12 * (1.0 + self.max_abs())
    }

    /// Dense inverse by LU with partial pivoting; the verification oracle.
    pub fn dense_inverse(&self) -> Result<CMatrix> {
        Ok(Lu::factor(&self.to_dense())?.inverse())
    }

    /// Eigenvalues of the dense Hermitian matrix, ascending; the oracle for
    /// the secular path.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let defect = self.hermitian_defect();
        if defect > 1e-12 * (1.0 + self.max_abs()) {
            return Err(Error::NonHermitian {
                max_asymmetry: defect,
            });
        }
        linalg::hermitian_eigenvalues(&self.to_dense())
    }

    /// Eigenvalues and eigenvectors (columns), ascending.
    pub fn hermitian_eigenpairs(&self) -> Result<(Vec<f64>, CMatrix)> {
        let defect = self.hermitian_defect();
        if defect > 1e-12 * (1.0 + self.max_abs()) {
            return Err(Error::NonHermitian {
                max_asymmetry: defect,
            });
        }
        linalg::hermitian_eigenpairs(&self.to_dense())
    }

    /// Row-major CSV with cells formatted `re+imj`.
    pub fn to_csv(&self) -> String {
        let size = self.size();
        let mut out = String::new();
        for row in 0..size {
            for col in 0..size {
                if col > 0 {
                    out.push(',');
                }
                let z = self.entry(row, col);
                out.push_str(&format!("{:.16e}{:+.16e}j", z.re, z.im));
            }
            out.push('\n');
        }
        out
    }

    /// JSON form {"n": N, "diagonals": [[re, im], ...]}.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\"n\":");
        out.push_str(&self.n.to_string());
        out.push_str(",\"diagonals\":[");
        for (idx, z) in self.diagonals.iter().enumerate() {
            if idx > 0 {
                out.push(',');
            }
            out.push_str(&format!("[{:.16e},{:.16e}]", z.re, z.im));
        }
        out.push_str("]}");
        out
    }
}

/// Degree-M predictor polynomial P_M(theta) = sum beta_u e^{i u theta},
/// built from the first column of T_M(h)^{-1}.
#[derive(Clone, Debug)]
pub struct PredictorPolynomial {
    /// beta_{0..M}.
    pub coeffs: Vec<C64>,
}

impl PredictorPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, theta: f64) -> C64 {
        let z = C64::from_polar(1.0, theta);
        let mut acc = C64::new(0.0, 0.0);
        for &b in self.coeffs.iter().rev() {
            acc = acc * z + b;
        }
        acc
    }

    /// |P(e^{i theta})|^2.
    pub fn square_modulus(&self, theta: f64) -> f64 {
        self.eval(theta).norm_sqr()
    }

    /// Fourier coefficients of |P|^2 for |s| <= degree: the band symbol the
    /// predictor induces.
    pub fn square_modulus_coefficients(&self) -> Vec<C64> {
        let m = self.degree();
        let mut out = vec![C64::new(0.0, 0.0); 2 * m + 1];
        for s in -(m as i64)..=(m as i64) {
            let mut acc = C64::new(0.0, 0.0);
            for u in 0..=m as i64 {
                let v = u - s;
                if v < 0 || v > m as i64 {
                    continue;
                }
                acc += self.coeffs[u as usize] * self.coeffs[v as usize].conj();
            }
            out[(s + m as i64) as usize] = acc;
        }
        out
    }
}

/// Predictor polynomial of degree M for a positive symbol h, computed by the
/// Levinson-Durbin recursion on the moments h^(0..M). Breakdown of the
/// recursion (non-positive prediction variance) signals that T_M(h) is not
/// positive definite. The result carries its roots strictly outside the
/// closed unit disk; a root drifting onto the circle is reported as a
/// breakdown too.
pub fn levinson_predictor(h: &Symbol, m: usize) -> Result<PredictorPolynomial> {
    let (min, _) = h.min_max();
    if min <= 0.0 {
        return Err(Error::NotPositive { min });
    }
    let fc = h.fourier_coefficients(m)?;
    let r = |j: usize| fc[m + j]; // h^(j)
    let p = levinson_from_moments(&(0..=m).map(r).collect::<Vec<_>>())?;
    if m >= 1 {
        let roots = crate::polyroots::find_roots(&p.coeffs)?;
        for &(z, _) in &roots.roots {
            if z.norm() <= 1.0 - 1e-10 || (z.norm() - 1.0).abs() <= 1e-10 {
                return Err(Error::LevinsonBreakdown {
                    step: m,
                    variance: z.norm() - 1.0,
                });
            }
        }
    }
    Ok(p)
}

/// Levinson-Durbin on explicit moments r_0..r_M (Hermitian autocorrelation).
pub fn levinson_from_moments(r: &[C64]) -> Result<PredictorPolynomial> {
    let m = r.len() - 1;
    let mut a = vec![C64::new(0.0, 0.0); m + 1];
    a[0] = C64::new(1.0, 0.0);
    let mut variance = r[0].re;
    if variance <= 0.0 {
        return Err(Error::LevinsonBreakdown {
            step: 0,
            variance,
        });
    }
    for step in 0..m {
        // Reflection coefficient from the current prediction error.
        let mut acc = C64::new(0.0, 0.0);
        for u in 0..=step {
            acc += a[u] * r[step + 1 - u];
        }
        let k = -acc / variance;
        // a^{(step+1)}_u = a_u + k * conj(a_{step+1-u})
        let prev: Vec<C64> = a[..=step].to_vec();
        for u in 1..=step + 1 {
            let mirrored = prev.get(step + 1 - u).copied().unwrap_or(C64::new(0.0, 0.0));
            let base = if u <= step { prev[u] } else { C64::new(0.0, 0.0) };
            a[u] = base + k * mirrored.conj();
        }
        variance *= 1.0 - k.norm_sqr();
        if variance <= 0.0 || !variance.is_finite() {
            return Err(Error::LevinsonBreakdown {
                step: step + 1,
                variance,
            });
        }
    }
    let sigma = variance.sqrt();
    let coeffs: Vec<C64> = a.iter().map(|&c| c / sigma).collect();
    Ok(PredictorPolynomial { coeffs })
}

/// Max over |s| <= M of |h^(s) - (1/|P_M|^2)^(s)|, the moment-matching
/// defect of the predictor. The right side is computed by quadrature on a
/// 16(M+1)-point grid.
pub fn verify_predictor_moments(h: &Symbol, p: &PredictorPolynomial) -> Result<f64> {
    let m = p.degree();
    let grid = 16 * (m + 1);
    let mut samples = Vec::with_capacity(grid);
    for t in 0..grid {
        let theta = 2.0 * PI * t as f64 / grid as f64;
        let sq = p.square_modulus(theta);
        if sq <= 0.0 || !sq.is_finite() {
            return Err(Error::NonFiniteEvaluation { theta });
        }
        samples.push(1.0 / sq);
    }
    let hc = h.fourier_coefficients(m)?;
    let mut worst = 0.0f64;
    for s in -(m as i64)..=(m as i64) {
        let mut acc = C64::new(0.0, 0.0);
        for (t, &v) in samples.iter().enumerate() {
            let phase = -2.0 * PI * (s as f64) * (t as f64) / grid as f64;
            acc += v * C64::from_polar(1.0, phase);
        }
        let quad = acc / grid as f64;
        let want = hc[(s + m as i64) as usize];
        worst = worst.max((quad - want).norm());
    }
    Ok(worst)
}

/// beta from the definitional formula on the dense inverse: column 0 of
/// T_M(h)^{-1} scaled by the square root of its (0,0) entry. Used as the
/// independent cross-check of the recursion.
pub fn predictor_by_definition(h: &Symbol, m: usize) -> Result<PredictorPolynomial> {
    let t = ToeplitzMatrix::build(h, m)?;
    let inv = t.dense_inverse()?;
    let corner = inv[(0, 0)];
    if corner.re <= 0.0 {
        return Err(Error::LevinsonBreakdown {
            step: 0,
            variance: corner.re,
        });
    }
    let scale = corner.re.sqrt();
    let coeffs: Vec<C64> = (0..=m).map(|u| inv[(u, 0)] / scale).collect();
    Ok(PredictorPolynomial { coeffs })
}
