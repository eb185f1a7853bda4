//! Scalar types: double-precision complex numbers and their first-order
//! nilpotent extension `a + ε·b` with `ε² = 0`.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub use num_complex::Complex64 as C64;

/// Imaginary unit.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Shorthand for a complex literal.
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The field-like scalar interface every kernel is generic over.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_c64(z: C64) -> Self;
    fn from_f64(x: f64) -> Self {
        Self::from_c64(C64::new(x, 0.0))
    }
    /// Complex conjugation of every component (the perturbation parameter is real).
    fn conj(self) -> Self;
    /// The primal (ε-free) component.
    fn primal(self) -> C64;
    /// Size used for pivoting and defect norms: the largest component modulus.
    fn magnitude(self) -> f64;
    fn is_exact_zero(self) -> bool;
    fn is_finite(self) -> bool;
    fn scale(self, z: C64) -> Self;
}

impl Scalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_c64(z: C64) -> Self {
        z
    }
    fn conj(self) -> Self {
        C64::conj(&self)
    }
    fn primal(self) -> C64 {
        self
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn is_exact_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn scale(self, z: C64) -> Self {
        self * z
    }
}

/// `re + ε·eps` with `ε² = 0`. Products never create an ε² term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub re: C64,
    pub eps: C64,
}

impl Dual {
    pub fn new(re: C64, eps: C64) -> Self {
        Dual { re, eps }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let q = self.re / o.re;
        Dual::new(q, (self.eps - q * o.eps) / o.re)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.re, -self.eps)
    }
}

impl AddAssign for Dual {
    fn add_assign(&mut self, o: Dual) {
        self.re += o.re;
        self.eps += o.eps;
    }
}

impl SubAssign for Dual {
    fn sub_assign(&mut self, o: Dual) {
        self.re -= o.re;
        self.eps -= o.eps;
    }
}

impl MulAssign for Dual {
    fn mul_assign(&mut self, o: Dual) {
        *self = *self * o;
    }
}

impl Scalar for Dual {
    fn zero() -> Self {
        Dual::new(C64::zero(), C64::zero())
    }
    fn one() -> Self {
        Dual::new(C64::one(), C64::zero())
    }
    fn from_c64(z: C64) -> Self {
        Dual::new(z, C64::zero())
    }
    fn conj(self) -> Self {
        Dual::new(self.re.conj(), self.eps.conj())
    }
    fn primal(self) -> C64 {
        self.re
    }
    fn magnitude(self) -> f64 {
        self.re.norm().max(self.eps.norm())
    }
    fn is_exact_zero(self) -> bool {
        Scalar::is_exact_zero(self.re) && Scalar::is_exact_zero(self.eps)
    }
    fn is_finite(self) -> bool {
        Scalar::is_finite(self.re) && Scalar::is_finite(self.eps)
    }
    fn scale(self, z: C64) -> Self {
        Dual::new(self.re * z, self.eps * z)
    }
}
