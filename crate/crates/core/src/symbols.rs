//! Symbols on the torus: trigonometric polynomials and smooth evaluable
//! functions, their Fourier coefficients, and the `f(theta) = f1(1 - cos theta)`
//! form for even symbols.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::error::{Error, Result};

/// Grid used to spot-check declared structural flags.
const FLAG_CHECK_GRID: usize = 1024;

/// Declared smoothness of an evaluable symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmoothnessGrade {
    /// Restriction of a function analytic on an annulus around the torus.
    Analytic,
    /// Continuously differentiable.
    Differentiable,
    /// Continuous only.
    Continuous,
}

/// Structural flags. `is_real` and `is_even` are verified on a sample grid;
/// the minimum and critical-set declarations are analytic hypotheses that a
/// finite sample cannot decide, so they are recorded as given.
#[derive(Clone, Copy, Debug, Default)]
pub struct SymbolFlags {
    pub is_real: bool,
    pub is_even: bool,
    pub has_unique_min: bool,
    pub critical_set_finite: bool,
}

#[derive(Clone)]
pub enum SymbolKind {
    /// Finite Fourier series with coefficients `a_j`, -n0 <= j <= n0.
    TrigPoly { coeffs: Vec<C64>, degree: usize },
    /// Evaluable real-valued function of theta.
    Smooth {
        eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        grade: SmoothnessGrade,
    },
}

/// A real-valued 2-pi-periodic function given by Fourier coefficients or as
/// an evaluable closure.
#[derive(Clone)]
pub struct Symbol {
    pub kind: SymbolKind,
    pub flags: SymbolFlags,
    name: String,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SymbolKind::TrigPoly { degree, .. } => {
                write!(f, "Symbol({}, trigpoly deg {})", self.name, degree)
            }
            SymbolKind::Smooth { .. } => write!(f, "Symbol({}, smooth)", self.name),
        }
    }
}

impl Symbol {
    /// Trigonometric polynomial from coefficients `a_{-n0} .. a_{n0}`.
    /// Zero edge coefficients are trimmed so the stored degree is honest;
    /// realness and evenness are detected from the data.
    pub fn trig_poly(coeffs: Vec<C64>) -> Result<Symbol> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::Config(format!(
                "trigpoly coefficient list must have odd length (got {})",
                coeffs.len()
            )));
        }
        let mut coeffs = coeffs;
        let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tiny = 1e-300f64.max(scale * 0.0);
        // Trim matched zero edges.
        while coeffs.len() > 1 {
            let n = coeffs.len();
            if coeffs[0].norm() <= tiny && coeffs[n - 1].norm() <= tiny {
                coeffs.remove(n - 1);
                coeffs.remove(0);
            } else {
                break;
            }
        }
        let degree = (coeffs.len() - 1) / 2;
        let tol = 1e-12 * (1.0 + scale);
        let mut is_real = true;
        let mut is_even = true;
        for j in 0..=degree {
            let pos = coeffs[degree + j];
            let neg = coeffs[degree - j];
            if (neg - pos.conj()).norm() > tol {
                is_real = false;
            }
            if (neg - pos).norm() > tol || pos.im.abs() > tol {
                is_even = false;
            }
        }
        let flags = SymbolFlags {
            is_real,
            is_even,
            has_unique_min: false,
            critical_set_finite: true,
        };
        let mut sym = Symbol {
            kind: SymbolKind::TrigPoly { coeffs, degree },
            flags,
            name: "trigpoly".to_string(),
        };
        if is_real {
            sym.flags.has_unique_min = sym.detect_unique_min();
        }
        Ok(sym)
    }

    /// Grid heuristic for a unique minimum: the near-minimal sample points
    /// form a single arc on the circle. This only spot-checks the declared
    /// hypothesis; a finite sample cannot prove it.
    fn detect_unique_min(&self) -> bool {
        let grid = FLAG_CHECK_GRID;
        let values: Vec<f64> = (0..grid)
            .map(|t| self.evaluate_real(2.0 * PI * t as f64 / grid as f64))
            .collect();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let band = min + 1e-4 * (max - min).max(1e-300);
        let near: Vec<bool> = values.iter().map(|&v| v <= band).collect();
        // Count arcs of near-minimal points, wrapping around.
        let mut arcs = 0;
        for t in 0..grid {
            let prev = near[(t + grid - 1) % grid];
            if near[t] && !prev {
                arcs += 1;
            }
        }
        arcs == 1
    }

    /// Evaluable symbol with declared flags. `is_real`/`is_even` are
    /// spot-checked on a 1024-point grid and rejected if contradicted.
    pub fn smooth<F>(eval: F, grade: SmoothnessGrade, flags: SymbolFlags, name: &str) -> Result<Symbol>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let sym = Symbol {
            kind: SymbolKind::Smooth {
                eval: Arc::new(eval),
                grade,
            },
            flags,
            name: name.to_string(),
        };
        sym.check_declared_flags()?;
        Ok(sym)
    }

    pub fn with_flags(mut self, flags: SymbolFlags) -> Result<Symbol> {
        self.flags = flags;
        self.check_declared_flags()?;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn named(mut self, name: &str) -> Symbol {
        self.name = name.to_string();
        self
    }

    /// Band degree n0 for trigonometric polynomials.
    pub fn band_degree(&self) -> Option<usize> {
        match &self.kind {
            SymbolKind::TrigPoly { degree, .. } => Some(*degree),
            SymbolKind::Smooth { .. } => None,
        }
    }

    pub fn is_trig_poly(&self) -> bool {
        matches!(self.kind, SymbolKind::TrigPoly { .. })
    }

    /// Coefficient a_j, zero outside the band.
    pub fn coefficient(&self, j: i64) -> C64 {
        match &self.kind {
            SymbolKind::TrigPoly { coeffs, degree } => {
                let n0 = *degree as i64;
                if j < -n0 || j > n0 {
                    C64::new(0.0, 0.0)
                } else {
                    coeffs[(j + n0) as usize]
                }
            }
            SymbolKind::Smooth { .. } => panic!("coefficient() on a smooth symbol"),
        }
    }

    /// f(theta). Trig polynomials use Horner in e^{i theta}.
    pub fn evaluate(&self, theta: f64) -> C64 {
        match &self.kind {
            SymbolKind::TrigPoly { coeffs, degree } => {
                let z = C64::from_polar(1.0, theta);
                let mut acc = C64::new(0.0, 0.0);
                for &a in coeffs.iter().rev() {
                    acc = acc * z + a;
                }
                // The Horner pass evaluated sum a_j z^{j+n0}.
                acc * C64::from_polar(1.0, -(*degree as f64) * theta)
            }
            SymbolKind::Smooth { eval, .. } => C64::new(eval(theta), 0.0),
        }
    }

    /// Real part of f(theta); meaningful for real symbols.
    pub fn evaluate_real(&self, theta: f64) -> f64 {
        self.evaluate(theta).re
    }

    fn check_declared_flags(&self) -> Result<()> {
        if self.flags.is_real {
            let mut worst = 0.0f64;
            for t in 0..FLAG_CHECK_GRID {
                let theta = 2.0 * PI * t as f64 / FLAG_CHECK_GRID as f64;
                let v = self.evaluate(theta);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFiniteEvaluation { theta });
                }
                let ratio = v.im.abs() / (1.0 + v.norm());
                worst = worst.max(ratio);
            }
            if worst > 1e-12 {
                return Err(Error::NotReal { ratio: worst });
            }
        }
        if self.flags.is_even {
            let mut worst = 0.0f64;
            for t in 0..FLAG_CHECK_GRID {
                let theta = 2.0 * PI * t as f64 / FLAG_CHECK_GRID as f64;
                let a = self.evaluate(theta);
                let b = self.evaluate(2.0 * PI - theta);
                let ratio = (a - b).norm() / (1.0 + a.norm());
                worst = worst.max(ratio);
            }
            if worst > 1e-12 {
                return Err(Error::NotEven { ratio: worst });
            }
        }
        Ok(())
    }

    /// Fourier coefficients f^(j) for -n <= j <= n, returned as a vector of
    /// length 2n+1. Trig polynomials are copied exactly; smooth symbols use
    /// trapezoid quadrature on a power-of-two grid of at least 8(n+1) points,
    /// which is spectrally accurate for smooth integrands.
    pub fn fourier_coefficients(&self, n: usize) -> Result<Vec<C64>> {
        match &self.kind {
            SymbolKind::TrigPoly { .. } => {
                let mut out = Vec::with_capacity(2 * n + 1);
                for j in -(n as i64)..=(n as i64) {
                    out.push(self.coefficient(j));
                }
                Ok(out)
            }
            SymbolKind::Smooth { eval, .. } => {
                let grid = quadrature_grid_size(n);
                let mut samples = Vec::with_capacity(grid);
                for t in 0..grid {
                    let theta = 2.0 * PI * t as f64 / grid as f64;
                    let v = eval(theta);
                    if !v.is_finite() {
                        return Err(Error::NonFiniteEvaluation { theta });
                    }
                    samples.push(v);
                }
                let mut out = Vec::with_capacity(2 * n + 1);
                for j in -(n as i64)..=(n as i64) {
                    let mut acc = C64::new(0.0, 0.0);
                    for (t, &v) in samples.iter().enumerate() {
                        let phase = -2.0 * PI * (j as f64) * (t as f64) / grid as f64;
                        acc += v * C64::from_polar(1.0, phase);
                    }
                    out.push(acc / grid as f64);
                }
                Ok(out)
            }
        }
    }

    /// Even real trig polynomial as a polynomial in x = 1 - cos theta.
    pub fn cheb_form(&self) -> Result<ChebForm> {
        let (coeffs, degree) = match &self.kind {
            SymbolKind::TrigPoly { coeffs, degree } => (coeffs, *degree),
            SymbolKind::Smooth { .. } => {
                return Err(Error::Config(
                    "cheb form requires a trigonometric polynomial".to_string(),
                ))
            }
        };
        let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = 1e-12 * (1.0 + scale);
        let mut worst = 0.0f64;
        for j in 0..=degree {
            let pos = coeffs[degree + j];
            let neg = coeffs[degree - j];
            worst = worst.max((neg - pos).norm()).max(pos.im.abs());
        }
        if worst > tol {
            return Err(Error::NotEven {
                ratio: worst / (1.0 + scale),
            });
        }
        // f(theta) = a_0 + 2 sum a_j T_j(cos theta); expand in powers of
        // y = cos theta, then substitute y = 1 - x.
        let r = degree;
        let mut poly_y = vec![0.0f64; r + 1];
        poly_y[0] = coeffs[degree].re;
        let mut t_prev = vec![1.0f64]; // T_{j-1}
        let mut t_curr = vec![0.0, 1.0]; // T_j, starting at j = 1
        for j in 1..=r {
            let a = coeffs[degree + j].re;
            for (p, &c) in t_curr.iter().enumerate() {
                poly_y[p] += 2.0 * a * c;
            }
            if j < r {
                // T_{j+1} = 2 y T_j - T_{j-1}
                let mut t_next = vec![0.0; j + 2];
                for (p, &c) in t_curr.iter().enumerate() {
                    t_next[p + 1] += 2.0 * c;
                }
                for (p, &c) in t_prev.iter().enumerate() {
                    t_next[p] -= c;
                }
                t_prev = std::mem::replace(&mut t_curr, t_next);
            }
        }
        // Compose p(1 - x) by Horner in (1 - x).
        let mut f1 = vec![0.0f64; 1];
        for &c in poly_y.iter().rev() {
            // f1 <- f1 * (1 - x) + c
            let mut next = vec![0.0f64; f1.len() + 1];
            for (p, &v) in f1.iter().enumerate() {
                next[p] += v;
                next[p + 1] -= v;
            }
            next[0] += c;
            f1 = next;
        }
        f1.truncate(r + 1);
        Ok(ChebForm { coeffs: f1 })
    }

    /// Minimum and maximum of a real symbol, located on a fine grid and
    /// refined by golden-section search.
    pub fn min_max(&self) -> (f64, f64) {
        let grid = 8192;
        let mut best_min = (f64::INFINITY, 0.0f64);
        let mut best_max = (f64::NEG_INFINITY, 0.0f64);
        for t in 0..grid {
            let theta = 2.0 * PI * t as f64 / grid as f64;
            let v = self.evaluate_real(theta);
            if v < best_min.0 {
                best_min = (v, theta);
            }
            if v > best_max.0 {
                best_max = (v, theta);
            }
        }
        let h = 2.0 * PI / grid as f64;
        let refined_min = golden_min(|t| self.evaluate_real(t), best_min.1 - h, best_min.1 + h);
        let refined_max = -golden_min(|t| -self.evaluate_real(t), best_max.1 - h, best_max.1 + h);
        (refined_min.min(best_min.0), refined_max.max(best_max.0))
    }

    /// Location of the minimum of a real symbol in [0, 2 pi).
    pub fn argmin(&self) -> f64 {
        let grid = 8192;
        let mut best = (f64::INFINITY, 0.0f64);
        for t in 0..grid {
            let theta = 2.0 * PI * t as f64 / grid as f64;
            let v = self.evaluate_real(theta);
            if v < best.0 {
                best = (v, theta);
            }
        }
        let h = 2.0 * PI / grid as f64;
        let theta = golden_argmin(|t| self.evaluate_real(t), best.1 - h, best.1 + h);
        theta.rem_euclid(2.0 * PI)
    }

    /// Values of f at its interior critical points plus the endpoints
    /// f(0), f(pi): the levels excluded by the secular machinery.
    pub fn excluded_levels(&self) -> Vec<f64> {
        let mut levels = vec![self.evaluate_real(0.0), self.evaluate_real(PI)];
        // Sign changes of f' on a fine grid, refined by bisection.
        let grid = 4096;
        let h = 2.0 * PI / grid as f64;
        let deriv = |theta: f64| (self.evaluate_real(theta + 1e-6) - self.evaluate_real(theta - 1e-6)) / 2e-6;
        let mut prev = deriv(0.0);
        for t in 1..=grid {
            let theta = h * t as f64;
            let cur = deriv(theta);
            if prev == 0.0 {
                levels.push(self.evaluate_real(theta - h));
            } else if prev * cur < 0.0 {
                let (mut lo, mut hi) = (theta - h, theta);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if deriv(lo) * deriv(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                levels.push(self.evaluate_real(0.5 * (lo + hi)));
            }
            prev = cur;
        }
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        levels.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (1.0 + a.abs()));
        levels
    }
}

fn golden_argmin<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn golden_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let x = golden_argmin(&f, a, b);
    f(x)
}

/// Smallest power of two >= 8(n+1).
pub fn quadrature_grid_size(n: usize) -> usize {
    let want = 8 * (n + 1);
    want.next_power_of_two()
}

/// Polynomial f1 with f(theta) = f1(1 - cos theta), stored by ascending
/// real coefficients.
#[derive(Clone, Debug)]
pub struct ChebForm {
    pub coeffs: Vec<f64>,
}

impl ChebForm {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_complex(&self, x: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn leading_coefficient(&self) -> f64 {
        *self.coeffs.last().unwrap_or(&0.0)
    }

    /// Even trig polynomial realizing f1(1 - cos theta); the inverse of
    /// `Symbol::cheb_form`. Coefficients are recovered by quadrature, which
    /// is exact for band-limited data.
    pub fn to_symbol(&self) -> Result<Symbol> {
        let r = self.degree();
        let grid = (4 * (r + 2)).next_power_of_two();
        let mut coeffs = Vec::with_capacity(2 * r + 1);
        for j in -(r as i64)..=(r as i64) {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..grid {
                let theta = 2.0 * PI * t as f64 / grid as f64;
                let v = self.eval(1.0 - theta.cos());
                acc += C64::from_polar(1.0, -(j as f64) * theta) * v;
            }
            let mut c = acc / grid as f64;
            // Exactly real by symmetry; drop quadrature dust.
            c.im = 0.0;
            coeffs.push(c);
        }
        Symbol::trig_poly(coeffs)
    }
}

/// JSON description of a symbol.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum SymbolSpec {
    Trigpoly {
        coeffs: Vec<[f64; 2]>,
        offset: i64,
    },
    Builtin {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

/// Parse a symbol from its JSON description:
/// `{"kind":"trigpoly","coeffs":[[re,im],...],"offset":-n0}` or
/// `{"kind":"builtin","name":"kms","params":{"rho":0.5}}`.
pub fn symbol_from_json(text: &str) -> Result<Symbol> {
    let spec: SymbolSpec =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("symbol JSON: {e}")))?;
    match spec {
        SymbolSpec::Trigpoly { coeffs, offset } => {
            if coeffs.is_empty() {
                return Err(Error::Config("trigpoly needs coefficients".to_string()));
            }
            let hi = offset + coeffs.len() as i64 - 1;
            let n0 = offset.abs().max(hi.abs()) as usize;
            let mut full = vec![C64::new(0.0, 0.0); 2 * n0 + 1];
            for (idx, c) in coeffs.iter().enumerate() {
                let j = offset + idx as i64;
                full[(j + n0 as i64) as usize] = C64::new(c[0], c[1]);
            }
            Symbol::trig_poly(full)
        }
        SymbolSpec::Builtin { name, params } => builtin_symbol(&name, &params),
    }
}

/// Built-in symbols: `kms` (|1 - rho chi|^2), `laplace` (2 - 2 cos theta),
/// `exp_cos` (exp(a cos theta)).
pub fn builtin_symbol(name: &str, params: &BTreeMap<String, f64>) -> Result<Symbol> {
    let check_params = |allowed: &[&str]| -> Result<()> {
        for key in params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "unknown parameter '{key}' for builtin '{name}'"
                )));
            }
        }
        Ok(())
    };
    match name {
        "kms" => {
            check_params(&["rho"])?;
            let rho = params.get("rho").copied().unwrap_or(0.5);
            if !(0.0..1.0).contains(&rho.abs()) {
                return Err(Error::Config(format!("kms needs |rho| < 1 (got {rho})")));
            }
            let coeffs = vec![
                C64::new(-rho, 0.0),
                C64::new(1.0 + rho * rho, 0.0),
                C64::new(-rho, 0.0),
            ];
            let mut sym = Symbol::trig_poly(coeffs)?;
            sym.flags.has_unique_min = true;
            Ok(sym.named("kms"))
        }
        "laplace" => {
            check_params(&[])?;
            let coeffs = vec![C64::new(-1.0, 0.0), C64::new(2.0, 0.0), C64::new(-1.0, 0.0)];
            let mut sym = Symbol::trig_poly(coeffs)?;
            sym.flags.has_unique_min = true;
            Ok(sym.named("laplace"))
        }
        "exp_cos" => {
            check_params(&["a"])?;
            let a = params.get("a").copied().unwrap_or(1.0);
            let flags = SymbolFlags {
                is_real: true,
                is_even: true,
                has_unique_min: true,
                critical_set_finite: true,
            };
            Symbol::smooth(
                move |theta: f64| (a * theta.cos()).exp(),
                SmoothnessGrade::Analytic,
                flags,
                "exp_cos",
            )
        }
        other => Err(Error::Config(format!("unknown builtin symbol '{other}'"))),
    }
}
