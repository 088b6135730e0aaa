//! Compensated (Neumaier) summation.
//!
//! The pole sums behind `∂_z h_N` mix terms of size `N⁴` with terms of order
//! one, and panel sums in the quadrature engine accumulate many small
//! contributions. Both go through these accumulators.

use std::ops::AddAssign;

use num_complex::Complex64;

/// Running sum with a Neumaier error-compensation term.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Componentwise compensated sum of complex values.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub const fn new() -> Self {
        Self { re: NeumaierSum::new(), im: NeumaierSum::new() }
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Componentwise compensated sum of fixed-size vectors.
#[derive(Debug, Clone, Copy)]
pub struct VecSum<const D: usize> {
    parts: [NeumaierSum; D],
}

impl<const D: usize> Default for VecSum<D> {
    fn default() -> Self {
        Self { parts: [NeumaierSum::new(); D] }
    }
}

impl<const D: usize> VecSum<D> {
    #[inline]
    pub fn add(&mut self, v: &[f64; D]) {
        for (p, x) in self.parts.iter_mut().zip(v) {
            p.add(*x);
        }
    }

    pub fn value(&self) -> [f64; D] {
        std::array::from_fn(|i| self.parts[i].value())
    }
}

/// Compensated sum of a slice.
pub fn sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<NeumaierSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let values = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum(&values), 2.0);
        // naive left fold loses the first 1.0
        assert_ne!(values.iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn many_tenths() {
        let v = vec![0.1; 1_000_000];
        assert!((sum(&v) - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn complex_and_vector_match_scalar() {
        let mut c = ComplexSum::new();
        let mut w = VecSum::<2>::default();
        for k in 0..100 {
            let z = Complex64::new(k as f64 * 1e12, 1.0 / (k as f64 + 1.0));
            c.add(z);
            w.add(&[z.re, z.im]);
        }
        let cv = c.value();
        assert_eq!([cv.re, cv.im], w.value());
    }
}
