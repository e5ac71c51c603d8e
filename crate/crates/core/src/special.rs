//! Gamma, Bessel J₀/J₁ and ₀F₂ on the real line.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::summation::CompensatedSumF64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for x > 0 (Lanczos, g = 7).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma needs a positive finite argument, got {x}")));
    }
    Ok(gamma_pos(x))
}

fn gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // reflection keeps the approximation in its accurate range
        return PI / ((PI * x).sin() * gamma_pos(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

const SERIES_LIMIT: f64 = 12.0;

/// J₀(x), x ≥ 0.
pub fn bessel_j0(x: f64) -> Result<f64> {
    check_bessel_arg(x)?;
    Ok(if x <= SERIES_LIMIT { j_series(0, x) } else { j_hankel(0, x) })
}

/// J₁(x), x ≥ 0.
pub fn bessel_j1(x: f64) -> Result<f64> {
    check_bessel_arg(x)?;
    Ok(if x <= SERIES_LIMIT { j_series(1, x) } else { j_hankel(1, x) })
}

fn check_bessel_arg(x: f64) -> Result<()> {
    if x < 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be finite and nonnegative, got {x}")));
    }
    Ok(())
}

// Σ (−1)^m (x/2)^{2m+ν} / (m! (m+ν)!)
fn j_series(nu: u32, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = if nu == 0 { 1.0 } else { 0.5 * x };
    let mut sum = CompensatedSumF64::new();
    sum.add(term);
    for m in 1..200 {
        term *= -q / (m as f64 * (m + nu) as f64);
        sum.add(term);
        if term.abs() < 1e-18 * sum.value().abs().max(1e-300) && m as f64 > 0.5 * x {
            break;
        }
    }
    sum.value()
}

// Hankel expansion, summed until the terms stop decreasing.
fn j_hankel(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k / x^k
    let mut prev = f64::INFINITY;
    for k in 1..100 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (8.0 * k as f64 * x);
        if a.abs() >= prev || a == 0.0 {
            break;
        }
        prev = a.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let omega = x - (nu as f64) * PI / 2.0 - PI / 4.0;
    (2.0 / (PI * x)).sqrt() * (p * omega.cos() - q * omega.sin())
}

/// Stopping rules for hypergeometric series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_term_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { rel_term_tol: 1e-16, max_terms: 500 }
    }
}

/// ₀F₂(; b1, b2; z) = Σ zⁿ / ((b1)ₙ (b2)ₙ n!).
pub fn hyp0f2(b1: f64, b2: f64, z: f64) -> Result<f64> {
    hyp0f2_with(b1, b2, z, SeriesControl::default())
}

pub fn hyp0f2_with(b1: f64, b2: f64, z: f64, ctl: SeriesControl) -> Result<f64> {
    let nonpos_int = |b: f64| b <= 0.0 && b.fract() == 0.0;
    if nonpos_int(b1) || nonpos_int(b2) {
        return Err(Error::Domain(format!("0F2 parameters must avoid nonpositive integers ({b1}, {b2})")));
    }
    if !(ctl.rel_term_tol > 0.0) || ctl.max_terms == 0 {
        return Err(Error::Contract("series control needs rel_term_tol > 0 and max_terms >= 1".into()));
    }
    let mut term = 1.0;
    let mut sum = CompensatedSumF64::new();
    sum.add(term);
    for n in 0..ctl.max_terms {
        let nf = n as f64;
        let ratio = z / ((b1 + nf) * (b2 + nf) * (nf + 1.0));
        term *= ratio;
        sum.add(term);
        if ratio.abs() < 0.5 && term.abs() <= ctl.rel_term_tol * sum.value().abs() {
            return Ok(sum.value());
        }
        if term == 0.0 {
            return Ok(sum.value());
        }
    }
    Err(Error::Convergence(format!("0F2(;{b1},{b2};{z}) needs more than {} terms", ctl.max_terms)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gamma_fixed_points() {
        assert!(rel(gamma_fn(1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(gamma_fn(0.5).unwrap(), PI.sqrt()) < 1e-14);
        let g15 = gamma_fn(1.5).unwrap();
        assert!(rel(gamma_fn(4.5).unwrap(), 3.5 * 2.5 * 1.5 * g15) < 1e-13);
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.0).is_err());
    }

    #[test]
    fn gamma_recurrence() {
        for i in 1..=400 {
            let x = i as f64 * 0.05;
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!(rel(lhs, rhs) < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn bessel_at_zero_and_domain() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
        assert!(bessel_j0(-1e-9).is_err());
    }

    #[test]
    fn bessel_bounded_by_one() {
        for i in 0..=2000 {
            let x = i as f64 * 0.05;
            assert!(bessel_j0(x).unwrap().abs() <= 1.0);
            assert!(bessel_j1(x).unwrap().abs() <= 1.0);
        }
    }

    #[test]
    fn derivative_relation() {
        for &x in &[0.5, 1.0, 2.0, 5.0, 20.0] {
            let h = 1e-5;
            let d = (bessel_j0(x + h).unwrap() - bessel_j0(x - h).unwrap()) / (2.0 * h);
            assert!((d + bessel_j1(x).unwrap()).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn crossover_continuity() {
        assert!((j_series(0, 12.0) - j_hankel(0, 12.0)).abs() <= 1e-9);
        assert!((j_series(1, 12.0) - j_hankel(1, 12.0)).abs() <= 1e-9);
    }

    #[test]
    fn hyp0f2_basics() {
        assert_eq!(hyp0f2(1.5, 2.0, 0.0).unwrap(), 1.0);
        // Direct Pochhammer evaluation, ten terms.
        let z: f64 = 0.25;
        let mut direct = 0.0;
        for n in 0..10 {
            let mut den = 1.0;
            for i in 0..n {
                let i = i as f64;
                den *= (0.5 + i) * (1.5 + i) * (i + 1.0);
            }
            direct += z.powi(n) / den;
        }
        assert!(rel(hyp0f2(0.5, 1.5, z).unwrap(), direct) < 1e-15);
        assert!(hyp0f2(-1.0, 2.0, 1.0).is_err());
        let tight = SeriesControl { rel_term_tol: 1e-16, max_terms: 3 };
        assert!(matches!(hyp0f2_with(0.5, 1.5, 50.0, tight), Err(Error::Convergence(_))));
    }
}
