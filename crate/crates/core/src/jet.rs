//! Forward-mode jets over a point of R^7.
//!
//! [`Jet2`] carries value, gradient and Hessian and tracks how many of those
//! orders are still trustworthy: taking a partial derivative consumes one
//! order, and any request beyond what is left is a [`Error::JetOrder`]
//! instead of a silently truncated zero.
//!
//! [`Dual`] is a first-order jet over an arbitrary [`RealScalar`]; nesting
//! `Dual<Jet2>` yields third derivatives of an immersion, which is what the
//! induced structure on a hypersurface needs.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};
use crate::DIM;

const HESS_LEN: usize = DIM * (DIM + 1) / 2;

const fn hess_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * DIM - a * (a + 1) / 2 + b
}

/// Second-order jet: value, gradient and (packed, symmetric) Hessian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    value: f64,
    grad: [f64; DIM],
    hess: [f64; HESS_LEN],
    order: u8,
}

impl Jet2 {
    pub const MAX_ORDER: u8 = 2;

    pub fn constant(value: f64) -> Self {
        Jet2 {
            value,
            grad: [0.0; DIM],
            hess: [0.0; HESS_LEN],
            order: Self::MAX_ORDER,
        }
    }

    /// The coordinate function `x_i` evaluated at `x`.
    pub fn variable(i: usize, x: f64) -> Self {
        let mut j = Self::constant(x);
        j.grad[i] = 1.0;
        j
    }

    /// Coordinate jets for every axis at point `p`.
    pub fn coordinates(p: &[f64; DIM]) -> [Jet2; DIM] {
        std::array::from_fn(|i| Jet2::variable(i, p[i]))
    }

    pub fn from_parts(value: f64, grad: [f64; DIM], hess: [[f64; DIM]; DIM]) -> Self {
        let mut h = [0.0; HESS_LEN];
        for i in 0..DIM {
            for j in i..DIM {
                h[hess_index(i, j)] = 0.5 * (hess[i][j] + hess[j][i]);
            }
        }
        Jet2 {
            value,
            grad,
            hess: h,
            order: Self::MAX_ORDER,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn gradient(&self) -> Result<[f64; DIM]> {
        self.require(1)?;
        Ok(self.grad)
    }

    pub fn hessian(&self) -> Result<[[f64; DIM]; DIM]> {
        self.require(2)?;
        let mut out = [[0.0; DIM]; DIM];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.hess[hess_index(i, j)];
            }
        }
        Ok(out)
    }

    fn require(&self, needed: u8) -> Result<()> {
        if self.order < needed {
            Err(Error::JetOrder {
                needed,
                available: self.order,
            })
        } else {
            Ok(())
        }
    }

    /// Partial derivative along axis `i`; the result has one order less.
    pub fn partial(&self, i: usize) -> Result<Jet2> {
        self.require(1)?;
        let mut out = Jet2 {
            value: self.grad[i],
            grad: [0.0; DIM],
            hess: [0.0; HESS_LEN],
            order: self.order - 1,
        };
        if self.order >= 2 {
            for j in 0..DIM {
                out.grad[j] = self.hess[hess_index(i, j)];
            }
        }
        Ok(out)
    }

    /// Drops derivative information down to `order`.
    pub fn truncate(mut self, order: u8) -> Self {
        if order < self.order {
            self.order = order;
            if order < 2 {
                self.hess = [0.0; HESS_LEN];
            }
            if order < 1 {
                self.grad = [0.0; DIM];
            }
        }
        self
    }

    /// Applies a scalar function given its value and first two derivatives at `self.value`.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet2 {
        let mut out = Jet2 {
            value: f0,
            grad: [0.0; DIM],
            hess: [0.0; HESS_LEN],
            order: self.order,
        };
        for i in 0..DIM {
            out.grad[i] = f1 * self.grad[i];
        }
        if self.order >= 2 {
            for i in 0..DIM {
                for j in i..DIM {
                    let k = hess_index(i, j);
                    out.hess[k] = f1 * self.hess[k] + f2 * self.grad[i] * self.grad[j];
                }
            }
        }
        out
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: Jet2) -> Jet2 {
        self.value += rhs.value;
        for i in 0..DIM {
            self.grad[i] += rhs.grad[i];
        }
        for k in 0..HESS_LEN {
            self.hess[k] += rhs.hess[k];
        }
        self.order = self.order.min(rhs.order);
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: Jet2) -> Jet2 {
        self.value -= rhs.value;
        for i in 0..DIM {
            self.grad[i] -= rhs.grad[i];
        }
        for k in 0..HESS_LEN {
            self.hess[k] -= rhs.hess[k];
        }
        self.order = self.order.min(rhs.order);
        self
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(mut self) -> Jet2 {
        self.value = -self.value;
        for g in self.grad.iter_mut() {
            *g = -*g;
        }
        for h in self.hess.iter_mut() {
            *h = -*h;
        }
        self
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let order = self.order.min(rhs.order);
        let (a, b) = (&self, &rhs);
        let mut out = Jet2 {
            value: a.value * b.value,
            grad: [0.0; DIM],
            hess: [0.0; HESS_LEN],
            order,
        };
        if order >= 1 {
            for i in 0..DIM {
                out.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
            }
        }
        if order >= 2 {
            for i in 0..DIM {
                for j in i..DIM {
                    let k = hess_index(i, j);
                    out.hess[k] =
                        a.hess[k] * b.value + a.value * b.hess[k] + a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i];
                }
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet2) -> Jet2 {
        let x = rhs.value;
        self * rhs.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }
}

impl Scalar for Jet2 {
    fn zero() -> Self {
        Jet2::constant(0.0)
    }
    fn one() -> Self {
        Jet2::constant(1.0)
    }
    fn from_i64(n: i64) -> Self {
        Jet2::constant(n as f64)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Jet2::constant(num as f64 / den as f64)
    }
    fn is_zero(&self) -> bool {
        self.value == 0.0 && self.grad.iter().all(|g| *g == 0.0) && self.hess.iter().all(|h| *h == 0.0)
    }
    fn magnitude(&self) -> f64 {
        let mut m = self.value.abs();
        if self.order >= 1 {
            m = self.grad.iter().fold(m, |acc, g| acc.max(g.abs()));
        }
        if self.order >= 2 {
            m = self.hess.iter().fold(m, |acc, h| acc.max(h.abs()));
        }
        m
    }
    fn to_f64(&self) -> f64 {
        self.value
    }
}

impl RealScalar for Jet2 {
    fn from_f64(x: f64) -> Self {
        Jet2::constant(x)
    }
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let x = self.value;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }
    fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
    fn sinh(self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s)
    }
    fn cosh(self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c)
    }
    fn powf(self, p: f64) -> Self {
        let x = self.value;
        self.chain(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }
    fn powi(self, n: i32) -> Self {
        let x = self.value;
        let nf = n as f64;
        let d1 = if n == 0 { 0.0 } else { nf * x.powi(n - 1) };
        let d2 = if n == 0 || n == 1 {
            0.0
        } else {
            nf * (nf - 1.0) * x.powi(n - 2)
        };
        self.chain(x.powi(n), d1, d2)
    }
}

/// First-order forward jet over an arbitrary real scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<S> {
    pub value: S,
    pub grad: [S; DIM],
}

impl<S: RealScalar> Dual<S> {
    pub fn constant(value: S) -> Self {
        Dual {
            value,
            grad: std::array::from_fn(|_| S::zero()),
        }
    }

    /// Seeds `x_i` with unit derivative along axis `i`.
    pub fn variable(i: usize, value: S) -> Self {
        Dual {
            value,
            grad: std::array::from_fn(|k| if k == i { S::one() } else { S::zero() }),
        }
    }

    fn chain(&self, f0: S, f1: S) -> Self {
        Dual {
            value: f0,
            grad: std::array::from_fn(|i| f1.clone() * self.grad[i].clone()),
        }
    }
}

impl<S: RealScalar> Add for Dual<S> {
    type Output = Dual<S>;
    fn add(self, rhs: Self) -> Self {
        let Dual { value, grad } = self;
        let mut rg = rhs.grad.into_iter();
        Dual {
            value: value + rhs.value,
            grad: grad.map(|g| g + rg.next().expect("fixed length")),
        }
    }
}

impl<S: RealScalar> Sub for Dual<S> {
    type Output = Dual<S>;
    fn sub(self, rhs: Self) -> Self {
        let Dual { value, grad } = self;
        let mut rg = rhs.grad.into_iter();
        Dual {
            value: value - rhs.value,
            grad: grad.map(|g| g - rg.next().expect("fixed length")),
        }
    }
}

impl<S: RealScalar> Neg for Dual<S> {
    type Output = Dual<S>;
    fn neg(self) -> Self {
        Dual {
            value: -self.value,
            grad: self.grad.map(|g| -g),
        }
    }
}

impl<S: RealScalar> Mul for Dual<S> {
    type Output = Dual<S>;
    #[allow(clippy::suspicious_arithmetic_impl)] // product rule
    fn mul(self, rhs: Self) -> Self {
        Dual {
            value: self.value.clone() * rhs.value.clone(),
            grad: std::array::from_fn(|i| {
                self.grad[i].clone() * rhs.value.clone() + self.value.clone() * rhs.grad[i].clone()
            }),
        }
    }
}

impl<S: RealScalar> Div for Dual<S> {
    type Output = Dual<S>;
    fn div(self, rhs: Self) -> Self {
        let inv = S::one() / rhs.value.clone();
        let r = rhs.chain(inv.clone(), -(inv.clone() * inv));
        self * r
    }
}

impl<S: RealScalar> Scalar for Dual<S> {
    fn zero() -> Self {
        Dual::constant(S::zero())
    }
    fn one() -> Self {
        Dual::constant(S::one())
    }
    fn from_i64(n: i64) -> Self {
        Dual::constant(S::from_i64(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Dual::constant(S::from_ratio(num, den))
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.grad.iter().all(Scalar::is_zero)
    }
    fn magnitude(&self) -> f64 {
        self.grad
            .iter()
            .fold(self.value.magnitude(), |acc, g| acc.max(g.magnitude()))
    }
    fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

impl<S: RealScalar> RealScalar for Dual<S> {
    fn from_f64(x: f64) -> Self {
        Dual::constant(S::from_f64(x))
    }
    fn sqrt(self) -> Self {
        let s = self.value.clone().sqrt();
        let d = S::from_f64(0.5) / s.clone();
        self.chain(s, d)
    }
    fn exp(self) -> Self {
        let e = self.value.clone().exp();
        self.chain(e.clone(), e)
    }
    fn ln(self) -> Self {
        let d = S::one() / self.value.clone();
        self.chain(self.value.clone().ln(), d)
    }
    fn sin(self) -> Self {
        self.chain(self.value.clone().sin(), self.value.clone().cos())
    }
    fn cos(self) -> Self {
        self.chain(self.value.clone().cos(), -self.value.clone().sin())
    }
    fn sinh(self) -> Self {
        self.chain(self.value.clone().sinh(), self.value.clone().cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.value.clone().cosh(), self.value.clone().sinh())
    }
    fn powf(self, p: f64) -> Self {
        let d = S::from_f64(p) * self.value.clone().powf(p - 1.0);
        self.chain(self.value.clone().powf(p), d)
    }
}
