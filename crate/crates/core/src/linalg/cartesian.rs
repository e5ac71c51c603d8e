use num_complex::Complex64;

use super::eigen::{hermitian_eigen, spectral_norm};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tolerances::PSD_SLACK;

/// A = L + iH with L = (A+A†)/2 and H = (A−A†)/(2i).
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianParts {
    pub l: ComplexMatrix,
    pub h: ComplexMatrix,
    pub alpha_l: f64,
    pub alpha_h: f64,
    pub alpha_a: f64,
    /// Lower bound on the spectrum of L (clipped at 0 by default).
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dissipativity {
    pub is_psd: bool,
    pub min_eig: f64,
}

pub fn cartesian_decompose(a: &ComplexMatrix) -> Result<CartesianParts> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("Cartesian parts of {}x{}", a.rows(), a.cols())));
    }
    let ah = a.adjoint();
    let l = (a + &ah).scale_real(0.5);
    let h = (a - &ah).scale(Complex64::new(0.0, -0.5));
    let el = hermitian_eigen(&l)?;
    let eh = hermitian_eigen(&h)?;
    Ok(CartesianParts {
        alpha_l: el.max_abs_eigenvalue(),
        alpha_h: eh.max_abs_eigenvalue(),
        alpha_a: spectral_norm(a),
        gamma: el.min_eigenvalue().max(0.0),
        l,
        h,
    })
}

impl CartesianParts {
    /// Same decomposition with a caller-chosen gamma.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// L + iH.
    pub fn reconstruct(&self) -> ComplexMatrix {
        &self.l + &self.h.scale(Complex64::new(0.0, 1.0))
    }

    /// k·L + H.
    pub fn hamiltonian(&self, k: f64) -> ComplexMatrix {
        &self.l.scale_real(k) + &self.h
    }
}

pub fn dissipativity_check(parts: &CartesianParts) -> Result<Dissipativity> {
    let min_eig = hermitian_eigen(&parts.l)?.min_eigenvalue();
    Ok(Dissipativity { is_psd: min_eig >= -PSD_SLACK, min_eig })
}
