//! Compensated (Neumaier) accumulators.
//!
//! Superoscillatory sums and winding sums are evaluated in a fixed term order;
//! the compensation keeps the accumulation error at one rounding of the final
//! sum instead of one per term, which also makes results bit-reproducible.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.s + v;
        if self.s.abs() >= v.abs() {
            self.c += (self.s - t) + v;
        } else {
            self.c += (v - t) + self.s;
        }
        self.s = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Compensated accumulator for complex terms (independent real/imag lanes).
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_tail() {
        let mut s = NeumaierSum::new();
        for v in [1e16, 0.25, 0.25, 0.25, 0.25, -1e16] {
            s.add(v);
        }
        assert_eq!(s.value(), 1.0);
    }

    #[test]
    fn complex_lanes_are_independent() {
        let mut s = ComplexSum::new();
        s.add(Complex64::new(1e16, 1.0));
        s.add(Complex64::new(0.5, 2.0));
        s.add(Complex64::new(-1e16, 3.0));
        assert_eq!(s.value(), Complex64::new(0.5, 6.0));
    }
}
