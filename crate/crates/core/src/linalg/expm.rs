use num_complex::Complex64;

use super::matrix::ComplexMatrix;

const TAYLOR_TERMS: usize = 16;

/// e^{−A} by scaling and squaring around a truncated Taylor series.
///
/// A is scaled by 2^{−s} until its Frobenius norm is at most 0.5, which bounds
/// the 16-term remainder far below double precision.
pub fn general_expm(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square(), "general_expm needs a square matrix");
    let n = a.rows();
    let norm = a.frobenius_norm();
    let mut s = 0i32;
    while norm / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let b = a.scale_real(-1.0 / 2f64.powi(s));
    let id = ComplexMatrix::identity(n);
    // Horner: I + B(I + B/2(I + B/3(...)))
    let mut p = id.clone();
    for k in (1..=TAYLOR_TERMS).rev() {
        p = &id + &(&b * &p).scale(Complex64::new(1.0 / k as f64, 0.0));
    }
    for _ in 0..s {
        p = &p * &p;
    }
    p
}
