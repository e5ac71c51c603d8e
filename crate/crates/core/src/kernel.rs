//! The kernel f(z) = e^{2^β − (1+iz)^β} / (2π) and its weight f(k)/(1−ik).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrate::{geometric_breaks, integrate_breaks, integrate_real, IntegrationOptions};
use crate::tolerances::{CHOOSE_K_MIN_EPS, CHOOSE_K_RESOLUTION};

pub const DEFAULT_BETA: f64 = 0.8;

/// f(z) with the principal branch of (1+iz)^β.
pub fn kernel_eval(beta: f64, z: Complex64) -> Complex64 {
    let w = Complex64::new(1.0, 0.0) + Complex64::new(0.0, 1.0) * z;
    (Complex64::new(2f64.powf(beta), 0.0) - w.powf(beta)).exp() / (2.0 * PI)
}

/// |f(k)| on the real line. Symmetric in k and decreasing in |k|.
fn kernel_abs(beta: f64, k: f64) -> f64 {
    let w = Complex64::new(1.0, k).powf(beta);
    (2f64.powf(beta) - w.re).exp() / (2.0 * PI)
}

/// 2·∫_K^∞ |f(k)| dk for the unnormalized kernel.
fn raw_tail_mass(beta: f64, k_cut: f64) -> Result<f64> {
    let mut total = 0.0;
    let mut a = k_cut.max(0.0);
    let mut width = a.max(1.0);
    loop {
        let b = a + width;
        let piece = integrate_real(
            |k| kernel_abs(beta, k),
            &[a, b],
            IntegrationOptions { abs_tol: 1e-30, rel_tol: 1e-10, max_intervals: 2000 },
        )?;
        total += piece;
        // |f| is decreasing, so the remaining tail after b is below the
        // integral of a geometric continuation once pieces shrink fast.
        if piece <= 1e-12 * total || piece == 0.0 || (total == 0.0 && kernel_abs(beta, b) == 0.0) {
            break;
        }
        a = b;
        width *= 2.0;
        if a > 1e12 {
            return Err(Error::Convergence("kernel tail did not decay".into()));
        }
    }
    Ok(2.0 * total)
}

/// ∫_ℝ f(k)/(1−ik) dk to absolute accuracy `tol`.
pub fn kernel_normalization(beta: f64, tol: f64) -> Result<Complex64> {
    check_beta(beta)?;
    if !(tol > 0.0) {
        return Err(Error::Contract("normalization tolerance must be positive".into()));
    }
    // The weight is bounded by |f|, so cut where the |f| tail is below tol/10.
    let mut k_star = 16.0;
    while raw_tail_mass(beta, k_star)? > tol / 10.0 {
        k_star *= 2.0;
        if k_star > 1e9 {
            return Err(Error::Convergence("no cutoff reaches the normalization tolerance".into()));
        }
    }
    let w = |k: f64| kernel_eval(beta, Complex64::new(k, 0.0)) / Complex64::new(1.0, -k);
    let right = geometric_breaks(0.0, k_star, 1.0);
    let mut breaks: Vec<f64> = right.iter().rev().map(|x| -x).collect();
    breaks.pop();
    breaks.extend_from_slice(&right);
    let r = integrate_breaks(w, &breaks, IntegrationOptions { abs_tol: 0.5 * tol, rel_tol: 0.0, max_intervals: 50_000 })?;
    Ok(r.value)
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("kernel exponent must lie in (0, 1), got {beta}")));
    }
    Ok(())
}

/// Kernel with its computed normalization constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kernel {
    pub beta: f64,
    #[serde(serialize_with = "ser_complex")]
    pub norm_constant: Complex64,
    /// When true, weights are not divided by `norm_constant`.
    pub raw: bool,
    /// ‖f‖_{L¹} of the (normalized, unless raw) kernel.
    pub l1_norm: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

impl Kernel {
    /// Normalized kernel (constant computed to 1e-13).
    pub fn new(beta: f64) -> Result<Self> {
        let c = kernel_normalization(beta, 1e-13)?;
        if c.norm() == 0.0 {
            return Err(Error::Degenerate("kernel normalization vanished".into()));
        }
        let mut k = Self { beta, norm_constant: c, raw: false, l1_norm: 0.0 };
        k.l1_norm = k.compute_l1()?;
        Ok(k)
    }

    /// Kernel whose weights are used exactly as printed, without dividing by
    /// the computed constant.
    pub fn raw(beta: f64) -> Result<Self> {
        let c = kernel_normalization(beta, 1e-13)?;
        let mut k = Self { beta, norm_constant: c, raw: true, l1_norm: 0.0 };
        k.l1_norm = k.compute_l1()?;
        Ok(k)
    }

    fn scale(&self) -> f64 {
        if self.raw {
            1.0
        } else {
            self.norm_constant.norm()
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        kernel_eval(self.beta, z)
    }

    /// f(k)/(1−ik), divided by the normalization constant unless raw.
    pub fn weight(&self, k: f64) -> Complex64 {
        let w = self.eval(Complex64::new(k, 0.0)) / Complex64::new(1.0, -k);
        if self.raw {
            w
        } else {
            w / self.norm_constant
        }
    }

    /// |f(k)| of the scaled kernel.
    pub fn abs_f(&self, k: f64) -> f64 {
        kernel_abs(self.beta, k) / self.scale()
    }

    /// f′(k) of the scaled kernel.
    pub fn f_prime(&self, k: f64) -> Complex64 {
        let w = Complex64::new(1.0, k);
        let d = Complex64::new(0.0, -self.beta) * w.powf(self.beta - 1.0);
        d * self.eval(Complex64::new(k, 0.0)) / self.scale()
    }

    /// ∫_{|k|>K} |f| of the scaled kernel.
    pub fn tail_mass(&self, k_cut: f64) -> Result<f64> {
        Ok(raw_tail_mass(self.beta, k_cut)? / self.scale())
    }

    fn compute_l1(&self) -> Result<f64> {
        let body = integrate_real(
            |k| kernel_abs(self.beta, k),
            &geometric_breaks(0.0, 64.0, 1.0),
            IntegrationOptions { abs_tol: 1e-14, rel_tol: 1e-13, max_intervals: 5000 },
        )?;
        Ok((2.0 * body + raw_tail_mass(self.beta, 64.0)?) / self.scale())
    }

    /// ‖f‖_∞ = |f(0)| (|f| decreases away from the origin).
    pub fn f_sup(&self) -> f64 {
        self.abs_f(0.0)
    }

    /// Smallest K ≥ 1 (to resolution 1e−3) with ∫_{|k|>K}|f| ≤ eps.
    pub fn choose_k(&self, eps: f64) -> Result<f64> {
        if !(eps >= CHOOSE_K_MIN_EPS) {
            return Err(Error::Precision(format!(
                "kernel tail target {eps:e} is below the supported floor {CHOOSE_K_MIN_EPS:e}"
            )));
        }
        if self.tail_mass(1.0)? <= eps {
            return Ok(1.0);
        }
        let mut lo = 1.0;
        let mut hi = 2.0;
        while self.tail_mass(hi)? > eps {
            lo = hi;
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::Convergence("kernel tail never reaches the target".into()));
            }
        }
        while hi - lo > CHOOSE_K_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            if self.tail_mass(mid)? <= eps {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_origin() {
        let v = kernel_eval(0.5, Complex64::new(0.0, 0.0));
        assert!((v.re - (2f64.sqrt() - 1.0).exp() / (2.0 * PI)).abs() < 1e-15);
        assert!((v.re - 0.24083).abs() < 5e-6);
        assert_eq!(v.im, 0.0);
        let v = kernel_eval(0.9, Complex64::new(0.0, 0.0));
        let oracle = 1.0 / (2.0 * PI * (-(2f64.powf(0.9))).exp() * 1f64.exp());
        assert!((v.re - oracle).abs() < 1e-15);
    }

    #[test]
    fn envelope_bound() {
        for &beta in &[0.5, 0.8] {
            let c = (beta * PI / 2.0).cos();
            let env_const = 2f64.powf(beta).exp() / (2.0 * PI);
            for i in -500..=500 {
                let k = i as f64 * 0.1;
                let f = kernel_eval(beta, Complex64::new(k, 0.0)).norm();
                assert!(f <= env_const * (-c * k.abs().powf(beta)).exp() * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn weight_dominated_by_kernel() {
        let k = Kernel::raw(0.8).unwrap();
        for i in -100..=100 {
            let x = i as f64 * 0.37;
            assert!(k.weight(x).norm() <= k.eval(Complex64::new(x, 0.0)).norm());
        }
        let kn = Kernel::new(0.8).unwrap();
        assert_eq!(kn.weight(0.0), kn.eval(Complex64::new(0.0, 0.0)) / kn.norm_constant);
    }

    #[test]
    fn normalization_envelope_and_self_consistency() {
        for &beta in &[0.3, 0.5, 0.7, 0.9] {
            let c = kernel_normalization(beta, 1e-8).unwrap();
            assert!(c.norm() > 0.1 && c.norm() < 10.0);
            let c2 = kernel_normalization(beta, 1e-9).unwrap();
            assert!((c - c2).norm() < 1e-8);
        }
    }

    #[test]
    fn choose_k_clamps_and_is_monotone() {
        let k = Kernel::new(0.8).unwrap();
        assert_eq!(k.choose_k(10.0).unwrap(), 1.0);
        let k4 = k.choose_k(1e-4).unwrap();
        let k8 = k.choose_k(1e-8).unwrap();
        assert!(k4 <= k8);
        assert!(matches!(k.choose_k(1e-15), Err(Error::Precision(_))));
    }

    #[test]
    fn tail_mass_nonincreasing() {
        let k = Kernel::new(0.5).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let t = k.tail_mass(i as f64 * 5.0).unwrap();
            assert!(t <= prev);
            prev = t;
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let k = Kernel::new(0.8).unwrap();
        for &x in &[-3.0, -0.2, 0.0, 0.7, 5.0] {
            let h = 1e-6;
            let fd = (k.eval(Complex64::new(x + h, 0.0)) - k.eval(Complex64::new(x - h, 0.0)))
                / (2.0 * h)
                / k.norm_constant.norm();
            assert!((fd - k.f_prime(x)).norm() < 1e-8);
        }
    }
}
