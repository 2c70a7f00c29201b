//! Shared test corpus: band symbols with known root structure and the even
//! symbols used by the secular and localization suites.
#![allow(dead_code)] // each test binary uses its own subset

use num_complex::Complex64 as C64;
use toeplitz_spectra::symbols::builtin_symbol;
use toeplitz_spectra::{ChebForm, Symbol};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// 5/4 - cos theta = |1 - chi/2|^2; inside root 1/2.
pub fn kms() -> Symbol {
    builtin_symbol("kms", &Default::default()).unwrap()
}

/// 2 - 2 cos theta; boundary double root at 1.
pub fn laplace() -> Symbol {
    builtin_symbol("laplace", &Default::default()).unwrap()
}

/// exp(cos theta); analytic positive smooth symbol.
pub fn exp_cos() -> Symbol {
    builtin_symbol("exp_cos", &Default::default()).unwrap()
}

/// 41/20 - 2 cos theta + (2/5) cos 2 theta; positive, even, with a
/// conjugate pair of simple inside roots of modulus ~0.365.
pub fn two_band() -> Symbol {
    Symbol::trig_poly(vec![
        c(0.2, 0.0),
        c(-1.0, 0.0),
        c(2.05, 0.0),
        c(-1.0, 0.0),
        c(0.2, 0.0),
    ])
    .unwrap()
}

/// |prod_i (1 - conj(alpha_i) chi)|^2: Hermitian positive band symbol with
/// the planted alphas as its inside roots.
pub fn planted_symbol(alphas: &[C64]) -> Symbol {
    let mut p = vec![c(1.0, 0.0)];
    for &alpha in alphas {
        let mut next = vec![c(0.0, 0.0); p.len() + 1];
        for (idx, &co) in p.iter().enumerate() {
            next[idx] += co;
            next[idx + 1] -= co * alpha.conj();
        }
        p = next;
    }
    let n0 = alphas.len();
    let mut coeffs = vec![c(0.0, 0.0); 2 * n0 + 1];
    for (s_idx, item) in coeffs.iter_mut().enumerate() {
        let s = s_idx as i64 - n0 as i64;
        let mut acc = c(0.0, 0.0);
        for t in 0..p.len() as i64 {
            let v = t - s;
            if v >= 0 && v < p.len() as i64 {
                acc += p[t as usize] * p[v as usize].conj();
            }
        }
        *item = acc;
    }
    Symbol::trig_poly(coeffs).unwrap()
}

/// Degree-3 band symbol with inside roots {0.5, 0.3 e^{+-i pi/3}}.
pub fn planted_three() -> Symbol {
    planted_symbol(&[
        c(0.5, 0.0),
        C64::from_polar(0.3, std::f64::consts::PI / 3.0),
        C64::from_polar(0.3, -std::f64::consts::PI / 3.0),
    ])
}

/// The band corpus for the inverse/decay criteria with the theoretical
/// inside-root radii.
pub fn band_corpus() -> Vec<(Symbol, &'static str)> {
    vec![
        (kms(), "kms"),
        (two_band(), "two-band"),
        (planted_three(), "planted-three"),
    ]
}

/// 6 - 8 cos theta + 2 cos 2 theta = 4 (1 - cos theta)^2; even, unique
/// minimum 0 at theta = 0.
pub fn even_degree_two() -> Symbol {
    Symbol::trig_poly(vec![
        c(1.0, 0.0),
        c(-4.0, 0.0),
        c(6.0, 0.0),
        c(-4.0, 0.0),
        c(1.0, 0.0),
    ])
    .unwrap()
}

/// Even degree-3 symbol f1(x) = x^3 - 3 x^2 + 2.5 x + 0.1 in x = 1 - cos:
/// positive, unique global minimum at theta = 0, non-monotone on (0, pi).
pub fn even_degree_three() -> Symbol {
    ChebForm {
        coeffs: vec![0.1, 2.5, -3.0, 1.0],
    }
    .to_symbol()
    .unwrap()
}

/// 3 + 2 cos theta; even, unique minimum at theta = pi.
pub fn min_at_pi() -> Symbol {
    Symbol::trig_poly(vec![c(1.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)]).unwrap()
}

/// Even trig-poly corpus (degrees 1..3, unique minimum) for the secular
/// and localization criteria.
pub fn even_corpus() -> Vec<(Symbol, &'static str)> {
    vec![
        (kms(), "kms"),
        (even_degree_two(), "even-deg2"),
        (even_degree_three(), "even-deg3"),
    ]
}
