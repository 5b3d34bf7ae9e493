//! Scalar abstraction shared by every module.
//!
//! All closed forms and the propagator are written against [`Real`], so the
//! same code runs in `f32` and `f64`. Tolerances are expressed through
//! [`Real::tol`], which never drops below a small multiple of the type's
//! machine epsilon.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// An absolute tolerance: `x`, floored at `100·ε` of the scalar type.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(100.0))
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Principal square root of a real number, returned as a complex value.
#[inline]
pub(crate) fn csqrt_real<T: Real>(x: T) -> Complex<T> {
    if x >= T::zero() {
        re(x.sqrt())
    } else {
        cplx(T::zero(), (-x).sqrt())
    }
}

/// `Complex<T>` → `(f64, f64)`, used in scalar-independent diagnostics.
#[inline]
pub(crate) fn to_pair<T: Real>(z: Complex<T>) -> (f64, f64) {
    (z.re.as_f64(), z.im.as_f64())
}

/// `n` evenly spaced points from `lo` to `hi` inclusive, each computed as
/// `lo + (hi − lo)·i/(n − 1)` so the endpoints are exact. `n = 1` gives `[lo]`.
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let d = T::from_usize(n - 1).unwrap();
            (0..n)
                .map(|i| lo + (hi - lo) * T::from_usize(i).unwrap() / d)
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_tracks_epsilon() {
        assert_eq!(f64::tol(1e-8), 1e-8);
        assert!(f32::tol(1e-8) > 1e-6);
    }

    #[test]
    fn real_sqrt_branches() {
        assert_eq!(csqrt_real(4.0_f64), Complex::new(2.0, 0.0));
        assert_eq!(csqrt_real(-4.0_f64), Complex::new(0.0, 2.0));
    }

    #[test]
    fn linspace_hits_grid_points() {
        let g = linspace(0.0_f64, 5.0, 2001);
        assert_eq!(g.len(), 2001);
        assert_eq!(g[1200], 3.0);
        assert_eq!(g[1800], 4.5);
        assert_eq!(g[2000], 5.0);
        assert_eq!(linspace(1.0_f64, 2.0, 1), vec![1.0]);
    }
}
