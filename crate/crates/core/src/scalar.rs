//! Real/complex abstraction so the Laplace-domain code runs on the real axis
//! and on complex inversion contours alike.

use num_complex::Complex64;
use std::fmt::Debug;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + PartialEq
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + Sum
{
    fn from_f64(x: f64) -> Self;
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    /// Principal square root.
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn norm(self) -> f64;
    fn re(self) -> f64;
    /// The real value, if the number lies on the real axis.
    fn as_real(self) -> Option<f64>;
    fn is_finite(self) -> bool;
    fn to_complex(self) -> Complex64;
    /// Inverse of `to_complex`; the real implementation keeps the real part.
    fn from_complex(z: Complex64) -> Self;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn re(self) -> f64 {
        self
    }
    fn as_real(self) -> Option<f64> {
        Some(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn from_complex(z: Complex64) -> Self {
        z.re
    }
}

impl Scalar for Complex64 {
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn as_real(self) -> Option<f64> {
        (self.im == 0.0).then_some(self.re)
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn from_complex(z: Complex64) -> Self {
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_sqrt_is_principal() {
        let z = Complex64::new(-4.0, 1e-300);
        let r = Scalar::sqrt(z);
        assert!(r.re >= 0.0);
        assert!((r.im - 2.0).abs() < 1e-15);
        let w = Complex64::new(-4.0, -1e-300);
        assert!((Scalar::sqrt(w).im + 2.0).abs() < 1e-15);
    }

    #[test]
    fn real_axis_detection() {
        assert_eq!(Complex64::new(2.0, 0.0).as_real(), Some(2.0));
        assert_eq!(Complex64::new(2.0, 1.0).as_real(), None);
        assert_eq!(3.0f64.as_real(), Some(3.0));
    }
}
