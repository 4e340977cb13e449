//! Small floating-point helpers shared by the evaluators.

use std::f64::consts::TAU;

use num_complex::Complex64;

/// `e(t/n) = exp(2πi·t/n)` for an integer numerator.
///
/// The numerator is reduced into `(-n/2, n/2]` first so the angle handed to
/// `sin_cos` is as small as possible.
#[inline]
pub fn unit_root(t: u64, n: u64) -> Complex64 {
    let t = t % n;
    let centered = if 2 * t > n { t as f64 - n as f64 } else { t as f64 };
    let (s, c) = (TAU * centered / n as f64).sin_cos();
    Complex64::new(c, s)
}

/// `e(x) = exp(2πi·x)` for a real argument.
#[inline]
pub fn cis_turns(x: f64) -> Complex64 {
    let (s, c) = (TAU * x).sin_cos();
    Complex64::new(c, s)
}

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated summation applied to real and imaginary parts independently.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_root_quarter_turns() {
        assert!((unit_root(1, 4) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((unit_root(3, 4) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(unit_root(0, 7), Complex64::new(1.0, 0.0));
        assert!((unit_root(9, 7) - unit_root(2, 7)).norm() == 0.0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }
}
