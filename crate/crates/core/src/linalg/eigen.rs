use num_complex::Complex64;

use super::matrix::{vec_norm, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tolerances::{
    HERMITIAN_REL, JACOBI_MAX_SWEEPS, JACOBI_OFFDIAG_REL, POWER_ITER_MAX, POWER_ITER_REL,
};

/// Eigen-decomposition M = V·diag(λ)·V† of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigenSystem {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// V·diag(f(λ))·V†.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|m| v[(i, m)] * fl[m] * v[(j, m)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| Complex64::new(l, 0.0))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, &l| m.max(l.abs()))
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Inputs that are not Hermitian to the crate-wide relative tolerance are
/// rejected instead of symmetrized.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigenSystem> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("eigen-decomposition of {}x{}", m.rows(), m.cols())));
    }
    if !m.is_hermitian(HERMITIAN_REL) {
        return Err(Error::Contract("matrix is not Hermitian within tolerance".into()));
    }
    let n = m.rows();
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    let total = a.frobenius_norm();
    if total == 0.0 {
        return Ok(HermitianEigenSystem { eigenvalues: vec![0.0; n], eigenvectors: v });
    }
    let target = JACOBI_OFFDIAG_REL * total;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::Convergence("Jacobi sweeps did not converge".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigenSystem { eigenvalues, eigenvectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

// One complex Jacobi rotation zeroing a[p,q]. The phase of a[p,q] is first
// moved onto row/column q so the 2x2 block becomes real symmetric.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let n = a.rows();
    let phase = apq / b; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let pc = phase.conj(); // e^{-iφ}

    for i in 0..n {
        let x = a[(i, p)];
        let y = a[(i, q)];
        a[(i, p)] = x * c - y * pc * s;
        a[(i, q)] = x * s + y * pc * c;
    }
    for j in 0..n {
        let x = a[(p, j)];
        let y = a[(q, j)];
        a[(p, j)] = x * c - y * phase * s;
        a[(q, j)] = x * s + y * phase * c;
    }
    for i in 0..n {
        let x = v[(i, p)];
        let y = v[(i, q)];
        v[(i, p)] = x * c - y * pc * s;
        v[(i, q)] = x * s + y * pc * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}

/// e^{−iMt} for Hermitian M.
pub fn hermitian_evolution(m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let es = hermitian_eigen(m)?;
    Ok(es.map(|l| Complex64::from_polar(1.0, -l * t)))
}

/// Largest singular value by power iteration on M†M.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    let n = m.cols();
    if m.max_abs() == 0.0 {
        return 0.0;
    }
    // Deterministic start with no special alignment to any basis direction.
    let mut x: Vec<Complex64> = (0..n)
        .map(|i| {
            let s = (i as f64 + 1.0).sqrt();
            Complex64::new(1.0 + 0.31 * s, 0.17 * s - 0.05 * (i as f64))
        })
        .collect();
    let nx = vec_norm(&x);
    x.iter_mut().for_each(|z| *z /= nx);
    let mh = m.adjoint();
    let mut lambda = 0.0;
    for _ in 0..POWER_ITER_MAX {
        let mx = m.try_matvec(&x).expect("square by construction");
        let next_lambda = mx.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let mut y = mh.try_matvec(&mx).expect("shape");
        let ny = vec_norm(&y);
        if ny == 0.0 {
            return next_lambda.sqrt();
        }
        y.iter_mut().for_each(|z| *z /= ny);
        x = y;
        let done = (next_lambda - lambda).abs() <= POWER_ITER_REL * next_lambda;
        lambda = next_lambda;
        if done {
            break;
        }
    }
    lambda.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testmat::random_hermitian;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evolution_of_zero_is_identity() {
        let u = hermitian_evolution(&ComplexMatrix::zeros(3, 3), 2.5).unwrap();
        assert!((&u - &ComplexMatrix::identity(3)).max_abs() < 1e-15);
    }

    #[test]
    fn evolution_of_pi_diag() {
        let u = hermitian_evolution(&ComplexMatrix::from_real_diag(&[PI]), 1.0).unwrap();
        assert!((u[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pauli_x_quarter_turn() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let u = hermitian_evolution(&x, PI / 2.0).unwrap();
        let expect = ComplexMatrix::from_rows(&[&[c(0.0, 0.0), c(0.0, -1.0)], &[c(0.0, -1.0), c(0.0, 0.0)]]);
        assert!((&u - &expect).max_abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(hermitian_eigen(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn decomposition_invariants_on_random_hermitian() {
        for seed in 0..20 {
            let n = 1 + (seed as usize % 9);
            let m = random_hermitian(n, 3.0, seed);
            let es = hermitian_eigen(&m).unwrap();
            let v = &es.eigenvectors;
            let scale = m.frobenius_norm().max(1e-300);
            assert!((&es.reconstruct() - &m).frobenius_norm() <= 1e-12 * scale);
            assert!((&(&v.adjoint() * v) - &ComplexMatrix::identity(n)).max_abs() <= 1e-12);
            assert!(es.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let m = ComplexMatrix::from_real_diag(&[2.0, 2.0, -1.0, 2.0]);
        let es = hermitian_eigen(&m).unwrap();
        assert_eq!(es.eigenvalues, vec![-1.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn spectral_norm_simple_cases() {
        assert!((spectral_norm(&ComplexMatrix::identity(4)) - 1.0).abs() < 1e-14);
        assert!((spectral_norm(&ComplexMatrix::from_real_diag(&[3.0, -4.0])) - 4.0).abs() < 1e-12);
        assert_eq!(spectral_norm(&ComplexMatrix::zeros(2, 2)), 0.0);
    }
}
