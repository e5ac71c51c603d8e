//! Globally adaptive 15-point Gauss–Kronrod quadrature for complex-valued
//! integrands on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::summation::{CompensatedSum, CompensatedSumF64};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 20_000 }
    }
}

impl IntegrationOptions {
    pub fn abs(abs_tol: f64) -> Self {
        Self { abs_tol, rel_tol: 0.0, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub abs_error: f64,
    pub evaluations: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.a.total_cmp(&self.a))
    }
}

fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// ∫_a^b f over the given consecutive breakpoints (at least two).
pub fn integrate_breaks(
    f: impl Fn(f64) -> Complex64,
    breaks: &[f64],
    opts: IntegrationOptions,
) -> Result<Integral> {
    if breaks.len() < 2 {
        return Err(Error::Contract("integration needs at least two breakpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    for w in breaks.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (value, error) = gk15(&f, w[0], w[1]);
        evals += 15;
        heap.push(Piece { a: w[0], b: w[1], value, error });
    }
    if heap.is_empty() {
        return Ok(Integral { value: Complex64::new(0.0, 0.0), abs_error: 0.0, evaluations: 0 });
    }
    // Running totals drift; they only decide when to do an exact recount.
    let (mut total, mut err) = totals(&heap);
    loop {
        if err <= opts.abs_tol.max(opts.rel_tol * total.norm()) {
            (total, err) = totals(&heap);
            if err <= opts.abs_tol.max(opts.rel_tol * total.norm()) {
                return Ok(finish(heap, evals));
            }
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Convergence(format!(
                "adaptive quadrature stalled at error {err:.3e} after {} intervals",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Convergence("interval shrank below machine resolution".into()));
        }
        total -= worst.value;
        err -= worst.error;
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&f, a, b);
            evals += 15;
            total += value;
            err += error;
            heap.push(Piece { a, b, value, error });
        }
        err = err.max(0.0);
    }
}

fn totals(heap: &BinaryHeap<Piece>) -> (Complex64, f64) {
    let mut v = CompensatedSum::new();
    let mut e = CompensatedSumF64::new();
    for p in heap.iter() {
        v.add(p.value);
        e.add(p.error);
    }
    (v.value(), e.value())
}

fn finish(heap: BinaryHeap<Piece>, evaluations: usize) -> Integral {
    let mut pieces = heap.into_vec();
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut v = CompensatedSum::new();
    let mut e = CompensatedSumF64::new();
    for p in &pieces {
        v.add(p.value);
        e.add(p.error);
    }
    Integral { value: v.value(), abs_error: e.value(), evaluations }
}

pub fn integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, opts: IntegrationOptions) -> Result<Integral> {
    integrate_breaks(f, &[a, b], opts)
}

/// Real-valued convenience wrapper.
pub fn integrate_real(f: impl Fn(f64) -> f64, breaks: &[f64], opts: IntegrationOptions) -> Result<f64> {
    Ok(integrate_breaks(|x| Complex64::new(f(x), 0.0), breaks, opts)?.value.re)
}

/// Breakpoints a, a+1, a+2, a+4, ... doubling the offset up to b.
pub fn geometric_breaks(a: f64, b: f64, first: f64) -> Vec<f64> {
    let mut v = vec![a];
    let mut step = first.max(f64::MIN_POSITIVE);
    while a + step < b {
        v.push(a + step);
        step *= 2.0;
    }
    v.push(b);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| Complex64::new(x.powi(5), -x * x), 0.0, 2.0, IntegrationOptions::default()).unwrap();
        assert!((r.value - Complex64::new(64.0 / 6.0, -8.0 / 3.0)).norm() < 1e-13);
    }

    #[test]
    fn oscillatory_exponential() {
        let z = Complex64::new(0.5, 10.0);
        let r = integrate(|t| (-z * t).exp(), 0.0, 3.0, IntegrationOptions::default()).unwrap();
        let exact = (Complex64::new(1.0, 0.0) - (-z * 3.0).exp()) / z;
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // ∫_0^1 x^{-1/2} = 2; Kronrod nodes avoid the endpoint.
        let r = integrate_real(|x| x.powf(-0.5), &[0.0, 1.0], IntegrationOptions::abs(1e-9)).unwrap();
        assert!((r - 2.0).abs() < 1e-8);
    }

    #[test]
    fn reports_stalls() {
        let opts = IntegrationOptions { abs_tol: 1e-15, rel_tol: 0.0, max_intervals: 4 };
        assert!(integrate_real(|x| (1.0 / x).sin(), &[1e-6, 1.0], opts).is_err());
    }

    #[test]
    fn geometric_breaks_cover_interval() {
        let b = geometric_breaks(1.0, 10.0, 1.0);
        assert_eq!(b, vec![1.0, 2.0, 3.0, 5.0, 9.0, 10.0]);
    }
}
