//! Double-double arithmetic: a real number carried as an unevaluated sum
//! `hi + lo` with `|lo| ≤ ulp(hi)/2`, giving about 106 bits of significand.
//!
//! Only the operations needed by the extended-precision eigenvalue refinement
//! are provided. Products rely on `f64::mul_add` being a fused operation.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Unit roundoff of [`Dd`] arithmetic.
pub const DD_EPSILON: f64 = 4.93038065763132e-32;

#[derive(Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub const fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn recip(self) -> Self {
        Dd::ONE / self
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// One Newton step on the double-precision root; exact to `DD_EPSILON` for `x ≥ 0`.
    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let q = self.hi.sqrt();
        let (p, e) = two_prod(q, q);
        let r = (self - Dd { hi: p, lo: e }).hi;
        let (s, t) = quick_two_sum(q, r / (2.0 * q));
        Dd { hi: s, lo: t }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl From<u64> for Dd {
    /// Exact for every `u64`.
    fn from(n: u64) -> Self {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        let (s, t) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: t }
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        Dd { hi, lo }
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, o: f64) -> Dd {
        let (p, e) = two_prod(self.hi, o);
        let (hi, lo) = quick_two_sum(p, e + self.lo * o);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * q1;
        let q2 = r.hi / o.hi;
        let r = r - o * q2;
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, o: Dd) {
        *self = *self + o;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, o: Dd) {
        *self = *self - o;
    }
}

impl MulAssign for Dd {
    fn mul_assign(&mut self, o: Dd) {
        *self = *self * o;
    }
}

/// Complex number with [`Dd`] parts.
#[derive(Clone, Copy, Default, PartialEq, Debug)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ZERO: CDd = CDd { re: Dd::ZERO, im: Dd::ZERO };

    pub fn new(re: Dd, im: Dd) -> Self {
        Self { re, im }
    }

    pub fn from_c64(z: num_complex::Complex64) -> Self {
        Self { re: Dd::new(z.re), im: Dd::new(z.im) }
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.sqr() + self.im.sqr()
    }

    /// Modulus rounded to `f64`; enough for pivoting and norms.
    pub fn norm(self) -> f64 {
        self.to_c64().norm()
    }

    pub fn scale(self, s: Dd) -> Self {
        Self { re: self.re * s, im: self.im * s }
    }
}

impl Add for CDd {
    type Output = CDd;
    fn add(self, o: CDd) -> CDd {
        CDd { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for CDd {
    type Output = CDd;
    fn sub(self, o: CDd) -> CDd {
        CDd { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for CDd {
    type Output = CDd;
    fn neg(self) -> CDd {
        CDd { re: -self.re, im: -self.im }
    }
}

impl Mul for CDd {
    type Output = CDd;
    fn mul(self, o: CDd) -> CDd {
        CDd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

impl Div for CDd {
    type Output = CDd;
    fn div(self, o: CDd) -> CDd {
        // Scale by a power of two first so |o|² cannot overflow or underflow.
        let s = 2f64.powi(-(o.norm().log2().round() as i32));
        let (a, b) = (o.re * s, o.im * s);
        let den = a.sqr() + b.sqr();
        let num = self * CDd { re: a, im: -b };
        CDd { re: num.re / den * s, im: num.im / den * s }
    }
}

impl AddAssign for CDd {
    fn add_assign(&mut self, o: CDd) {
        *self = *self + o;
    }
}

impl SubAssign for CDd {
    fn sub_assign(&mut self, o: CDd) {
        *self = *self - o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: Dd, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol * b.abs().to_f64().max(1e-300)
    }

    #[test]
    fn third_times_three() {
        let third = Dd::ONE / Dd::new(3.0);
        assert!(close(third * Dd::new(3.0), Dd::ONE, 4.0 * DD_EPSILON));
        // The low word carries the digits a plain f64 drops.
        assert!(third.lo() != 0.0);
    }

    #[test]
    fn sqrt_two_squares_back() {
        let r = Dd::new(2.0).sqrt();
        assert!(close(r * r, Dd::new(2.0), 4.0 * DD_EPSILON));
        assert_eq!(r.hi(), std::f64::consts::SQRT_2);
    }

    #[test]
    fn cancellation_is_exact() {
        // (1 + 2^-70) - 1 vanishes in f64 but not here.
        let tiny = Dd::new(2f64.powi(-70));
        let x = (Dd::ONE + tiny) - Dd::ONE;
        assert_eq!(x.to_f64(), 2f64.powi(-70));
    }

    #[test]
    fn integer_powers() {
        let x = Dd::new(1.1);
        let direct = x * x * x * x * x;
        assert!(close(x.powi(5), direct, 8.0 * DD_EPSILON));
        assert!(close(x.powi(-2) * x.powi(2), Dd::ONE, 8.0 * DD_EPSILON));
        assert_eq!(Dd::new(7.0).powi(0), Dd::ONE);
    }

    #[test]
    fn u64_conversion_is_exact() {
        let n = (1u64 << 60) + 1;
        let d = Dd::from(n);
        assert_eq!(d.hi() as u64 as i128 + d.lo() as i128, n as i128);
    }

    #[test]
    fn complex_division_round_trip() {
        let a = CDd::new(Dd::new(3.0), Dd::new(-1.0) / Dd::new(7.0));
        let b = CDd::new(Dd::new(1e-200), Dd::new(2e-200));
        let q = a / b;
        let back = q * b;
        assert!(close(back.re, a.re, 1e-30) && close(back.im, a.im, 1e-30));
        let big = CDd::new(Dd::new(1e200), Dd::new(1e200));
        assert!((a / big).to_c64().norm() > 0.0);
    }
}
