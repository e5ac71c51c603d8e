//! Seeded test-matrix generators and the eigenvalue-transformation oracle.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eigen::spectral_norm;
use super::matrix::ComplexMatrix;
use super::schur::general_eigen;
use crate::error::{Error, Result};

/// A = V·diag(D)·V⁻¹ with V known exactly.
#[derive(Debug, Clone)]
pub struct DiagonalizableTestMatrix {
    pub v: ComplexMatrix,
    pub d: Vec<Complex64>,
    pub v_inv: ComplexMatrix,
    pub condition_number: f64,
    pub dissipative: bool,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Product of seeded complex Givens rotations and diagonal phases.
pub fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
    let mut r = rng(seed ^ 0x5eed_0001);
    let mut u = ComplexMatrix::from_diag(
        &(0..n)
            .map(|_| Complex64::from_polar(1.0, r.gen_range(0.0..std::f64::consts::TAU)))
            .collect::<Vec<_>>(),
    );
    for _ in 0..3 {
        for p in 0..n {
            for q in (p + 1)..n {
                let theta: f64 = r.gen_range(0.0..std::f64::consts::TAU);
                let phi: f64 = r.gen_range(0.0..std::f64::consts::TAU);
                let (c, s) = (theta.cos(), theta.sin());
                let e = Complex64::from_polar(1.0, phi);
                // columns p, q of u times [[c, -s e], [s conj(e), c]]
                for i in 0..n {
                    let x = u[(i, p)];
                    let y = u[(i, q)];
                    u[(i, p)] = x * c + y * e.conj() * s;
                    u[(i, q)] = -x * e * s + y * c;
                }
            }
        }
    }
    u
}

/// Q·diag(λ)·Q† with λ drawn uniformly from [lo, hi]; the two extreme
/// eigenvalues are pinned to lo and hi when n ≥ 2.
pub fn hermitian_with_spectrum(n: usize, lo: f64, hi: f64, seed: u64) -> ComplexMatrix {
    let mut r = rng(seed ^ 0x5eed_0002);
    let mut lam: Vec<f64> = (0..n).map(|_| r.gen_range(lo..=hi)).collect();
    if n >= 2 {
        lam[0] = lo;
        lam[n - 1] = hi;
    } else {
        lam[0] = lo;
    }
    let q = random_unitary(n, seed);
    let d = ComplexMatrix::from_real_diag(&lam);
    &(&q * &d) * &q.adjoint()
}

/// Random Hermitian matrix with spectrum in [−scale, scale].
pub fn random_hermitian(n: usize, scale: f64, seed: u64) -> ComplexMatrix {
    let mut r = rng(seed ^ 0x5eed_0003);
    let lam: Vec<f64> = (0..n).map(|_| r.gen_range(-scale..=scale)).collect();
    let q = random_unitary(n, seed.wrapping_add(0x9e37_79b9));
    &(&q * &ComplexMatrix::from_real_diag(&lam)) * &q.adjoint()
}

/// Hermitian PSD matrix with spectrum in [lo, hi].
pub fn hermitian_psd(n: usize, lo: f64, hi: f64, seed: u64) -> Result<ComplexMatrix> {
    if lo < 0.0 || hi < lo {
        return Err(Error::Domain(format!("spectrum [{lo}, {hi}] is not a PSD interval")));
    }
    Ok(hermitian_with_spectrum(n, lo, hi, seed))
}

/// A = L + iH with L = Q(γI + diag(s))Q†, s ∈ [0, spread], min s = 0, and
/// ‖H‖ ≤ h_scale. The real part is ⪰ γ by construction.
pub fn dissipative(n: usize, gamma: f64, spread: f64, h_scale: f64, seed: u64) -> Result<ComplexMatrix> {
    if gamma < 0.0 || spread < 0.0 || h_scale < 0.0 {
        return Err(Error::Domain("dissipative generator needs nonnegative parameters".into()));
    }
    let l = hermitian_with_spectrum(n, gamma, gamma + spread, seed);
    let h = random_hermitian(n, h_scale, seed.wrapping_add(1));
    Ok(&l + &h.scale(Complex64::new(0.0, 1.0)))
}

impl DiagonalizableTestMatrix {
    /// V = Q₁·S·Q₂ with S = diag(κ^{i/(n−1)}), so cond₂(V) = κ exactly.
    pub fn generate(d: &[Complex64], kappa: f64, seed: u64) -> Self {
        let n = d.len();
        let kappa = kappa.max(1.0);
        let s: Vec<f64> = (0..n)
            .map(|i| if n == 1 { 1.0 } else { kappa.powf(i as f64 / (n - 1) as f64) })
            .collect();
        let q1 = random_unitary(n, seed);
        let q2 = random_unitary(n, seed.wrapping_add(0x0123_4567));
        let v = &(&q1 * &ComplexMatrix::from_real_diag(&s)) * &q2;
        let sinv: Vec<f64> = s.iter().map(|x| 1.0 / x).collect();
        let v_inv = &(&q2.adjoint() * &ComplexMatrix::from_real_diag(&sinv)) * &q1.adjoint();
        Self {
            v,
            d: d.to_vec(),
            v_inv,
            condition_number: if n == 1 { 1.0 } else { kappa },
            dissipative: d.iter().all(|z| z.re >= 0.0),
        }
    }

    /// Seeded eigenvalues with real parts in [re_lo, re_hi] and imaginary
    /// parts in [−im_max, im_max].
    pub fn seeded(n: usize, re_lo: f64, re_hi: f64, im_max: f64, kappa: f64, seed: u64) -> Self {
        let mut r = rng(seed ^ 0x5eed_0004);
        let d: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(r.gen_range(re_lo..=re_hi), r.gen_range(-im_max..=im_max)))
            .collect();
        Self::generate(&d, kappa, seed)
    }

    /// Eigen-decompose an arbitrary diagonalizable matrix.
    pub fn from_matrix(a: &ComplexMatrix) -> Result<Self> {
        let (d, v) = general_eigen(a)?;
        let v_inv = v.inverse()?;
        let condition_number = spectral_norm(&v) * spectral_norm(&v_inv);
        Ok(Self { dissipative: d.iter().all(|z| z.re >= 0.0), v, d, v_inv, condition_number })
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        &(&self.v * &ComplexMatrix::from_diag(&self.d)) * &self.v_inv
    }
}

/// V·h(D)·V⁻¹. `h` returns None where it is undefined.
pub fn matrix_function_oracle(
    tm: &DiagonalizableTestMatrix,
    h: impl Fn(Complex64) -> Option<Complex64>,
) -> Result<ComplexMatrix> {
    let mut hd = Vec::with_capacity(tm.d.len());
    for &z in &tm.d {
        match h(z) {
            Some(w) if w.re.is_finite() && w.im.is_finite() => hd.push(w),
            _ => return Err(Error::Domain(format!("function undefined at eigenvalue {z}"))),
        }
    }
    Ok(&(&tm.v * &ComplexMatrix::from_diag(&hd)) * &tm.v_inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cartesian::{cartesian_decompose, dissipativity_check};
    use crate::linalg::expm::general_expm;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unitary_is_unitary() {
        for n in 1..7 {
            let u = random_unitary(n, n as u64);
            assert!((&(&u.adjoint() * &u) - &ComplexMatrix::identity(n)).max_abs() < 1e-13);
        }
    }

    #[test]
    fn test_matrix_inverse_and_conditioning() {
        let tm = DiagonalizableTestMatrix::seeded(4, 0.1, 2.0, 1.0, 20.0, 3);
        let e = &(&tm.v * &tm.v_inv) - &ComplexMatrix::identity(4);
        assert!(e.max_abs() < 1e-10 * tm.condition_number);
        let measured = spectral_norm(&tm.v) * spectral_norm(&tm.v_inv);
        assert!((measured - 20.0).abs() < 1e-6 * 20.0);
        assert!(tm.dissipative);
    }

    #[test]
    fn oracle_identity_returns_matrix() {
        let tm = DiagonalizableTestMatrix::seeded(3, 0.0, 1.0, 1.0, 4.0, 11);
        let a = matrix_function_oracle(&tm, Some).unwrap();
        assert!((&a - &tm.matrix()).max_abs() < 1e-13);
    }

    #[test]
    fn oracle_reciprocal_on_diagonal() {
        let tm = DiagonalizableTestMatrix::generate(&[c(1.0, 0.0), c(2.0, 0.0)], 1.0, 0);
        let tm = DiagonalizableTestMatrix {
            v: ComplexMatrix::identity(2),
            v_inv: ComplexMatrix::identity(2),
            ..tm
        };
        let inv = matrix_function_oracle(&tm, |z| Some(z.inv())).unwrap();
        assert_eq!(inv.diag(), vec![c(1.0, 0.0), c(0.5, 0.0)]);
        let bad = matrix_function_oracle(&tm, |z| if z.re > 1.5 { None } else { Some(z) });
        assert!(matches!(bad, Err(Error::Domain(_))));
    }

    #[test]
    fn oracle_exponential_matches_scaling_and_squaring() {
        let tm = DiagonalizableTestMatrix::generate(&[c(1.0, 0.0), c(2.0, 1.0)], 3.0, 42);
        let via_oracle = matrix_function_oracle(&tm, |z| Some((-z).exp())).unwrap();
        let via_expm = general_expm(&tm.matrix());
        assert!((&via_oracle - &via_expm).max_abs() < 1e-9);
    }

    #[test]
    fn from_matrix_recovers_generated_spectrum() {
        let tm = DiagonalizableTestMatrix::seeded(4, 0.2, 1.5, 0.8, 5.0, 9);
        let back = DiagonalizableTestMatrix::from_matrix(&tm.matrix()).unwrap();
        let f = |z: Complex64| Some((-z).exp() * z.sqrt());
        let a = matrix_function_oracle(&tm, f).unwrap();
        let b = matrix_function_oracle(&back, f).unwrap();
        assert!((&a - &b).max_abs() < 1e-10 * tm.condition_number);
    }

    #[test]
    fn generators_respect_their_contracts() {
        let psd = hermitian_psd(5, 0.5, 2.0, 1).unwrap();
        let parts = cartesian_decompose(&psd).unwrap();
        let d = dissipativity_check(&parts).unwrap();
        assert!(d.is_psd && (d.min_eig - 0.5).abs() < 1e-12);
        let a = dissipative(4, 0.5, 0.5, 0.4, 2).unwrap();
        let parts = cartesian_decompose(&a).unwrap();
        assert!((dissipativity_check(&parts).unwrap().min_eig - 0.5).abs() < 1e-12);
        assert!(parts.alpha_h <= 0.4 + 1e-12);
    }
}
