use num_complex::Complex64;

/// Kahan-Babuska (Neumaier) compensated sum for complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

#[inline]
fn two_sum(sum: f64, comp: &mut f64, x: f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: Complex64) {
        self.sum.re = two_sum(self.sum.re, &mut self.comp.re, x.re);
        self.sum.im = two_sum(self.sum.im, &mut self.comp.im, x.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// Real-valued counterpart.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSumF64 {
    sum: f64,
    comp: f64,
}

impl CompensatedSumF64 {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        self.sum = two_sum(self.sum, &mut self.comp, x);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_lost_by_naive_sum() {
        let mut s = CompensatedSumF64::new();
        s.add(1.0);
        for _ in 0..10_000 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-12).abs() < 1e-24);
    }

    #[test]
    fn complex_parts_are_independent() {
        let mut s = CompensatedSum::new();
        s.add(Complex64::new(1e16, -1.0));
        s.add(Complex64::new(1.0, 1e16));
        s.add(Complex64::new(-1e16, -1e16));
        assert_eq!(s.value(), Complex64::new(1.0, -1.0));
    }
}
