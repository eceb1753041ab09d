//! Order-3 forward-mode differentiation.
//!
//! A [`Jet3`] carries a value together with its first three derivatives with
//! respect to one designated coordinate. `Jet3` is generic over its
//! coefficient type, so nesting `Jet3<Jet3<f64>>` differentiates in two
//! independent directions at once (mixed partials such as `∂u∂v ln C`)
//! without a dedicated two-variable jet.
//!
//! Partial operations (`try_recip`, `try_ln`, ...) return a [`DomainError`]
//! instead of producing NaN or infinities.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An elementary function was evaluated outside its real domain.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("{function} undefined at {value}")]
pub struct DomainError {
    pub function: &'static str,
    pub value: f64,
}

impl DomainError {
    fn new(function: &'static str, value: f64) -> Self {
        Self { function, value }
    }
}

/// Real scalars that support the arithmetic the stress formulas need.
///
/// Implemented by `f64` and recursively by `Jet3<S>`.
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
    + Neg<Output = Self>
{
    fn constant(x: f64) -> Self;
    /// Innermost `f64` value.
    fn primal(self) -> f64;
    fn scale(self, k: f64) -> Self;
    fn offset(self, k: f64) -> Self {
        self + Self::constant(k)
    }

    fn try_recip(self) -> Result<Self, DomainError>;
    fn try_div(self, rhs: Self) -> Result<Self, DomainError> {
        Ok(self * rhs.try_recip()?)
    }
    fn square(self) -> Self {
        self * self
    }

    fn exp(self) -> Self;
    fn try_ln(self) -> Result<Self, DomainError>;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn try_atanh(self) -> Result<Self, DomainError>;
    fn try_sqrt(self) -> Result<Self, DomainError>;
    /// `self^k` for real `k`; requires a positive base.
    fn try_powf(self, k: f64) -> Result<Self, DomainError>;
}

impl Scalar for f64 {
    fn constant(x: f64) -> Self {
        x
    }
    fn primal(self) -> f64 {
        self
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn try_recip(self) -> Result<Self, DomainError> {
        if self == 0.0 {
            return Err(DomainError::new("recip", self));
        }
        Ok(1.0 / self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn try_ln(self) -> Result<Self, DomainError> {
        if self > 0.0 {
            Ok(f64::ln(self))
        } else {
            Err(DomainError::new("log", self))
        }
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn try_atanh(self) -> Result<Self, DomainError> {
        if self.abs() < 1.0 {
            Ok(f64::atanh(self))
        } else {
            Err(DomainError::new("atanh", self))
        }
    }
    fn try_sqrt(self) -> Result<Self, DomainError> {
        if self > 0.0 {
            Ok(f64::sqrt(self))
        } else {
            Err(DomainError::new("sqrt", self))
        }
    }
    fn try_powf(self, k: f64) -> Result<Self, DomainError> {
        if self > 0.0 {
            Ok(f64::powf(self, k))
        } else {
            Err(DomainError::new("pow", self))
        }
    }
}

/// Value and first three derivatives along one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet3<S = f64> {
    pub value: S,
    pub d1: S,
    pub d2: S,
    pub d3: S,
}

impl<S: Scalar> Jet3<S> {
    pub fn new(value: S, d1: S, d2: S, d3: S) -> Self {
        Self { value, d1, d2, d3 }
    }

    /// The independent variable itself: `(x, 1, 0, 0)`.
    pub fn seed(x: S) -> Self {
        Self::new(x, S::constant(1.0), S::constant(0.0), S::constant(0.0))
    }

    /// A quantity that does not depend on the differentiation variable.
    pub fn lift(x: S) -> Self {
        let z = S::constant(0.0);
        Self::new(x, z, z, z)
    }

    /// Chain rule to order 3 (Faà di Bruno).
    ///
    /// `tower` holds `(f, f', f'', f''')` evaluated at `inner.value`.
    pub fn compose(tower: [S; 4], inner: Self) -> Self {
        let [f0, f1, f2, f3] = tower;
        let x1 = inner.d1;
        let x2 = inner.d2;
        let x3 = inner.d3;
        Self { value: f0, d1: f1 * x1, d2: f2 * x1 * x1 + f1 * x2, d3: f3 * x1 * x1 * x1 + (f2 * x1 * x2).scale(3.0) + f1 * x3 }
    }

    pub fn tower(self) -> [S; 4] {
        [self.value, self.d1, self.d2, self.d3]
    }
}

impl<S: Scalar> Add for Jet3<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2, self.d3 + o.d3)
    }
}

impl<S: Scalar> Sub for Jet3<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2, self.d3 - o.d3)
    }
}

impl<S: Scalar> Neg for Jet3<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.d1, -self.d2, -self.d3)
    }
}

impl<S: Scalar> Mul for Jet3<S> {
    type Output = Self;
    // Leibniz rule.
    fn mul(self, o: Self) -> Self {
        let (a0, a1, a2, a3) = (self.value, self.d1, self.d2, self.d3);
        let (b0, b1, b2, b3) = (o.value, o.d1, o.d2, o.d3);
        Self {
            value: a0 * b0,
            d1: a1 * b0 + a0 * b1,
            d2: a2 * b0 + (a1 * b1).scale(2.0) + a0 * b2,
            d3: a3 * b0 + (a2 * b1 + a1 * b2).scale(3.0) + a0 * b3,
        }
    }
}

impl<S: Scalar> Scalar for Jet3<S> {
    fn constant(x: f64) -> Self {
        Self::lift(S::constant(x))
    }

    fn primal(self) -> f64 {
        self.value.primal()
    }

    fn scale(self, k: f64) -> Self {
        Self::new(self.value.scale(k), self.d1.scale(k), self.d2.scale(k), self.d3.scale(k))
    }

    fn try_recip(self) -> Result<Self, DomainError> {
        let r = self.value.try_recip()?;
        let r2 = r * r;
        Ok(Self::compose([r, -r2, (r2 * r).scale(2.0), (r2 * r2).scale(-6.0)], self))
    }

    fn exp(self) -> Self {
        let e = self.value.exp();
        Self::compose([e, e, e, e], self)
    }

    fn try_ln(self) -> Result<Self, DomainError> {
        if self.primal() <= 0.0 {
            return Err(DomainError::new("log", self.primal()));
        }
        let l = self.value.try_ln()?;
        let r = self.value.try_recip()?;
        let r2 = r * r;
        Ok(Self::compose([l, r, -r2, (r2 * r).scale(2.0)], self))
    }

    fn sinh(self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        Self::compose([s, c, s, c], self)
    }

    fn cosh(self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        Self::compose([c, s, c, s], self)
    }

    fn tanh(self) -> Self {
        let t = self.value.tanh();
        let q = S::constant(1.0) - t * t;
        let d2 = (t * q).scale(-2.0);
        let d3 = (q * (S::constant(1.0) - (t * t).scale(3.0))).scale(-2.0);
        Self::compose([t, q, d2, d3], self)
    }

    fn try_atanh(self) -> Result<Self, DomainError> {
        if self.primal().abs() >= 1.0 {
            return Err(DomainError::new("atanh", self.primal()));
        }
        let x = self.value;
        let r = (S::constant(1.0) - x * x).try_recip()?;
        let r2 = r * r;
        let d2 = (x * r2).scale(2.0);
        let d3 = (S::constant(2.0) + (x * x).scale(6.0)) * r2 * r;
        Ok(Self::compose([x.try_atanh()?, r, d2, d3], self))
    }

    fn try_sqrt(self) -> Result<Self, DomainError> {
        if self.primal() <= 0.0 {
            return Err(DomainError::new("sqrt", self.primal()));
        }
        let s = self.value.try_sqrt()?;
        let r = s.try_recip()?;
        let r3 = r * r * r;
        Ok(Self::compose([s, r.scale(0.5), r3.scale(-0.25), (r3 * r * r).scale(0.375)], self))
    }

    fn try_powf(self, k: f64) -> Result<Self, DomainError> {
        if self.primal() <= 0.0 {
            return Err(DomainError::new("pow", self.primal()));
        }
        let x = self.value;
        let tower = [
            x.try_powf(k)?,
            x.try_powf(k - 1.0)?.scale(k),
            x.try_powf(k - 2.0)?.scale(k * (k - 1.0)),
            x.try_powf(k - 3.0)?.scale(k * (k - 1.0) * (k - 2.0)),
        ];
        Ok(Self::compose(tower, self))
    }
}

/// Arithmetic selector for [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn arith<S: Scalar>(a: Jet3<S>, b: Jet3<S>, op: ArithOp) -> Result<Jet3<S>, DomainError> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.try_div(b)?,
    })
}

/// Elementary function selector for [`elementary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    Exp,
    Log,
    Sinh,
    Cosh,
    Tanh,
    Atanh,
    Sqrt,
    Pow(f64),
}

pub fn elementary<S: Scalar>(a: S, f: Elementary) -> Result<S, DomainError> {
    match f {
        Elementary::Exp => Ok(a.exp()),
        Elementary::Log => a.try_ln(),
        Elementary::Sinh => Ok(a.sinh()),
        Elementary::Cosh => Ok(a.cosh()),
        Elementary::Tanh => Ok(a.tanh()),
        Elementary::Atanh => a.try_atanh(),
        Elementary::Sqrt => a.try_sqrt(),
        Elementary::Pow(k) => a.try_powf(k),
    }
}
