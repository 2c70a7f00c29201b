//! Dense linear-algebra kernels used by the oracle paths.
//!
//! Complex LU with partial pivoting, a real-symmetric eigensolver
//! (Householder tridiagonalization followed by implicit-shift QL), and a
//! Hermitian front end that reduces `A + iB` to the doubled real symmetric
//! matrix `[[A, -B], [B, A]]`. Everything here is written for reliability at
//! desk scale (n <= ~1000), not speed.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense row-major complex matrix.
#[derive(Clone, Debug)]
pub struct CMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        CMatrix {
            n_rows,
            n_cols,
            data: vec![C64::new(0.0, 0.0); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n_cols, other.n_rows);
        let mut out = CMatrix::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.n_cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Max-norm of `self * other - I`.
    pub fn identity_residual(&self, other: &CMatrix) -> f64 {
        let prod = self.mul(other);
        let mut worst = 0.0f64;
        for i in 0..prod.n_rows {
            for j in 0..prod.n_cols {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n_cols + j]
    }
}

/// LU factorization with partial pivoting of a square complex matrix.
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    /// Number of row swaps mod 2, for the determinant sign.
    swaps: usize,
}

/// Relative pivot threshold below which a matrix counts as singular.
pub const LU_PIVOT_RTOL: f64 = 1e-13;

impl Lu {
    pub fn factor(m: &CMatrix) -> Result<Lu> {
        assert_eq!(m.n_rows, m.n_cols, "LU needs a square matrix");
        let n = m.n_rows;
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        let threshold = LU_PIVOT_RTOL * scale;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_mag = lu[col * n + col].norm();
            for r in col + 1..n {
                let mag = lu[r * n + col].norm();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = r;
                }
            }
            if pivot_mag <= threshold {
                return Err(Error::SingularMatrix {
                    pivot: pivot_mag,
                    threshold,
                });
            }
            if pivot_row != col {
                for j in 0..n {
                    lu.swap(col * n + j, pivot_row * n + j);
                }
                perm.swap(col, pivot_row);
                swaps += 1;
            }
            let pivot = lu[col * n + col];
            for r in col + 1..n {
                let factor = lu[r * n + col] / pivot;
                lu[r * n + col] = factor;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col + 1..n {
                    let v = lu[col * n + j];
                    lu[r * n + j] -= factor * v;
                }
            }
        }
        Ok(Lu { n, lu, perm, swaps })
    }

    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let mut x: Vec<C64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc / self.lu[i * n + i];
        }
        x
    }

    pub fn inverse(&self) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n, n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for col in 0..n {
            e[col] = C64::new(1.0, 0.0);
            let x = self.solve(&e);
            e[col] = C64::new(0.0, 0.0);
            for row in 0..n {
                out[(row, col)] = x[row];
            }
        }
        out
    }

    /// Determinant in scaled form (product of pivots).
    pub fn determinant(&self) -> ScaledC64 {
        let mut det = ScaledC64::one();
        for i in 0..self.n {
            det = det.mul_c(self.lu[i * self.n + i]);
        }
        if self.swaps % 2 == 1 {
            det = det.mul_c(C64::new(-1.0, 0.0));
        }
        det
    }
}

/// Complex number carried as `value * 2^exp2` with |value| kept near 1,
/// so long products of very large or very small factors stay representable.
#[derive(Clone, Copy, Debug)]
pub struct ScaledC64 {
    pub value: C64,
    pub exp2: i64,
}

impl ScaledC64 {
    pub fn one() -> Self {
        ScaledC64 {
            value: C64::new(1.0, 0.0),
            exp2: 0,
        }
    }

    pub fn from_c(z: C64) -> Self {
        ScaledC64 { value: z, exp2: 0 }.normalized()
    }

    fn normalized(mut self) -> Self {
        let mag = self.value.norm();
        if mag == 0.0 || !mag.is_finite() {
            return self;
        }
        let shift = mag.log2().round() as i64;
        if shift != 0 {
            let scale = (2.0f64).powi(-(shift.clamp(-1000, 1000) as i32));
            self.value *= scale;
            self.exp2 += shift;
        }
        self
    }

    pub fn mul_c(self, z: C64) -> Self {
        ScaledC64 {
            value: self.value * z,
            exp2: self.exp2,
        }
        .normalized()
    }

    pub fn mul(self, other: ScaledC64) -> Self {
        ScaledC64 {
            value: self.value * other.value,
            exp2: self.exp2 + other.exp2,
        }
        .normalized()
    }

    pub fn div_c(self, z: C64) -> Self {
        ScaledC64 {
            value: self.value / z,
            exp2: self.exp2,
        }
        .normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.value.norm() == 0.0
    }

    /// Ratio |Im| / (|Re| + |Im|), a realness probe that ignores the scale.
    pub fn imag_fraction(&self) -> f64 {
        let re = self.value.re.abs();
        let im = self.value.im.abs();
        if re + im == 0.0 {
            0.0
        } else {
            im / (re + im)
        }
    }
}

/// Householder reduction of a real symmetric matrix (row-major `a`, n x n)
/// to tridiagonal form. On exit `d` holds the diagonal and `e[1..]` the
/// subdiagonal; with `vects` the orthogonal transform accumulates in `a`.
fn tred2(a: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64], vects: bool) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += a[i * n + k].abs();
            }
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let mut f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                f = 0.0;
                for j in 0..=l {
                    if vects {
                        a[j * n + i] = a[i * n + j] / h;
                    }
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in j + 1..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let fj = a[i * n + j];
                    let gj = e[j] - hh * fj;
                    e[j] = gj;
                    for k in 0..=j {
                        a[j * n + k] -= fj * e[k] + gj * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    if vects {
        d[0] = 0.0;
    }
    e[0] = 0.0;
    for i in 0..n {
        if vects {
            if d[i] != 0.0 {
                for j in 0..i {
                    let mut g = 0.0;
                    for k in 0..i {
                        g += a[i * n + k] * a[k * n + j];
                    }
                    for k in 0..i {
                        a[k * n + j] -= g * a[k * n + i];
                    }
                }
            }
            d[i] = a[i * n + i];
            a[i * n + i] = 1.0;
            for j in 0..i {
                a[j * n + i] = 0.0;
                a[i * n + j] = 0.0;
            }
        } else {
            d[i] = a[i * n + i];
        }
    }
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
/// `z` (n x n, row-major) accumulates eigenvectors when present.
fn tqli(d: &mut [f64], e: &mut [f64], n: usize, mut z: Option<&mut [f64]>) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::EigenNoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.abs().copysign(if g >= 0.0 { 1.0 } else { -1.0 }));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(zm) = z.as_deref_mut() {
                    for k in 0..n {
                        f = zm[k * n + i + 1];
                        zm[k * n + i + 1] = s * zm[k * n + i] + c * f;
                        zm[k * n + i] = c * zm[k * n + i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut work = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut work, n, &mut d, &mut e, false);
    tqli(&mut d, &mut e, n, None)?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

/// Eigenvalues and eigenvectors of a real symmetric matrix, ascending;
/// eigenvector k is the k-th column of the returned matrix.
pub fn symmetric_eigenpairs(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut work = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut work, n, &mut d, &mut e, true);
    tqli(&mut d, &mut e, n, Some(&mut work))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let sorted_d: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut sorted_z = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            sorted_z[row * n + new_col] = work[row * n + old_col];
        }
    }
    Ok((sorted_d, sorted_z))
}

/// Embeds a Hermitian `A + iB` into the real symmetric `[[A, -B], [B, A]]`,
/// whose spectrum is that of the input with every eigenvalue doubled.
fn doubled_real(m: &CMatrix) -> Vec<f64> {
    let n = m.n_rows;
    let nn = 2 * n;
    let mut out = vec![0.0; nn * nn];
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out[i * nn + j] = z.re;
            out[(i + n) * nn + (j + n)] = z.re;
            out[i * nn + (j + n)] = -z.im;
            out[(i + n) * nn + j] = z.im;
        }
    }
    out
}

/// Eigenvalues of a Hermitian complex matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let n = m.n_rows;
    let doubled = doubled_real(m);
    let all = symmetric_eigenvalues(&doubled, 2 * n)?;
    // Pairs are exactly degenerate; every second entry of the sorted list
    // recovers the undoubled spectrum.
    Ok(all.iter().step_by(2).copied().take(n).collect())
}

/// Eigenpairs of a Hermitian complex matrix, ascending. The eigenvector for
/// eigenvalue k is column k.
pub fn hermitian_eigenpairs(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.n_rows;
    let nn = 2 * n;
    let doubled = doubled_real(m);
    let (vals, vecs) = symmetric_eigenpairs(&doubled, nn)?;
    let mut out_vals = Vec::with_capacity(n);
    let mut out_vecs = CMatrix::zeros(n, n);
    for k in 0..n {
        let col = 2 * k;
        out_vals.push(vals[col]);
        // A doubled eigenvector [x; y] maps back to x + iy.
        let mut norm = 0.0;
        for row in 0..n {
            let z = C64::new(vecs[row * nn + col], vecs[(row + n) * nn + col]);
            norm += z.norm_sqr();
            out_vecs[(row, k)] = z;
        }
        let norm = norm.sqrt();
        if norm > 0.0 {
            for row in 0..n {
                out_vecs[(row, k)] /= norm;
            }
        }
    }
    Ok((out_vals, out_vecs))
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.n_rows == 0 || m.n_cols == 0 {
        return 0.0;
    }
    let gram = m.adjoint().mul(m);
    match hermitian_eigenvalues(&gram) {
        Ok(eigs) => eigs.last().copied().unwrap_or(0.0).max(0.0).sqrt(),
        Err(_) => f64::NAN,
    }
}

/// Smallest singular value.
pub fn smallest_singular_value(m: &CMatrix) -> f64 {
    if m.n_rows == 0 || m.n_cols == 0 {
        return 0.0;
    }
    let gram = m.adjoint().mul(m);
    match hermitian_eigenvalues(&gram) {
        Ok(eigs) => eigs.first().copied().unwrap_or(0.0).max(0.0).sqrt(),
        Err(_) => f64::NAN,
    }
}
