use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use super::MultiIndex;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::DIM;

/// Relative threshold below which inexact coefficients count as zero.
pub const PRUNE_RELATIVE: f64 = 1e-14;

/// Alternating k-form on the 7-dimensional frame, stored sparsely over
/// increasing multi-indices. Absent keys are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Form<S> {
    degree: usize,
    coeffs: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> Form<S> {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= DIM, "degree {degree} exceeds 7");
        Form {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn scalar(c: S) -> Self {
        let mut f = Form::zero(0);
        f.add_term(MultiIndex::EMPTY, c);
        f
    }

    pub fn monomial(index: MultiIndex, c: S) -> Self {
        let mut f = Form::zero(index.degree());
        f.add_term(index, c);
        f
    }

    /// Basis monomial from 1-based indices, e.g. `basis(&[1, 2])` is `e12`.
    pub fn basis(indices: &[usize]) -> Result<Self> {
        Ok(Form::monomial(MultiIndex::new(indices)?, S::one()))
    }

    /// `e1 ∧ … ∧ e7`.
    pub fn volume() -> Self {
        Form::monomial(MultiIndex::FULL, S::one())
    }

    pub fn from_terms<I>(degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, S)>,
    {
        let mut f = Form::zero(degree);
        for (mi, c) in terms {
            if mi.degree() != degree {
                return Err(Error::Degree(format!("term {mi} does not have degree {degree}")));
            }
            f.add_term(mi, c);
        }
        Ok(f)
    }

    /// One-form `Σ v_i e_i` from components.
    pub fn one_form(v: &[S; DIM]) -> Self {
        let mut f = Form::zero(1);
        for (i, c) in v.iter().enumerate() {
            f.add_term(MultiIndex::axis(i), c.clone());
        }
        f
    }

    /// Dense coefficients in lexicographic multi-index order.
    pub fn from_dense(degree: usize, dense: &[S]) -> Self {
        let basis = MultiIndex::all_of_degree(degree);
        assert_eq!(dense.len(), basis.len());
        let mut f = Form::zero(degree);
        for (mi, c) in basis.iter().zip(dense) {
            f.add_term(*mi, c.clone());
        }
        f
    }

    pub fn to_dense(&self) -> Vec<S> {
        MultiIndex::all_of_degree(self.degree)
            .iter()
            .map(|mi| self.get(*mi))
            .collect()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, index: MultiIndex) -> S {
        self.coeffs.get(&index).cloned().unwrap_or_else(S::zero)
    }

    /// Tensor component `a(e_{i1}, …, e_{ik})` for 0-based indices in any
    /// order; zero when an index repeats.
    pub fn component(&self, idx: &[usize]) -> S {
        debug_assert_eq!(idx.len(), self.degree);
        let mut sorted = idx.to_vec();
        let mut sign = 1;
        // bubble sort, counting transpositions
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                match sorted[j].cmp(&sorted[j + 1]) {
                    std::cmp::Ordering::Greater => {
                        sorted.swap(j, j + 1);
                        sign = -sign;
                    }
                    std::cmp::Ordering::Equal => return S::zero(),
                    std::cmp::Ordering::Less => {}
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return S::zero();
        }
        let mask = sorted.iter().fold(0u8, |m, i| m | (1 << i));
        let c = self.get(MultiIndex::from_mask(mask));
        if sign > 0 {
            c
        } else {
            -c
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Adds `c` to the coefficient of `index`; exact zeros are not stored.
    pub fn add_term(&mut self, index: MultiIndex, c: S) {
        debug_assert_eq!(index.degree(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.coeffs.remove(&index) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.coeffs.insert(index, sum);
                }
            }
            None => {
                self.coeffs.insert(index, c);
            }
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Form::zero(self.degree);
        for (mi, v) in &self.coeffs {
            out.add_term(*mi, v.clone() * c.clone());
        }
        out
    }

    pub fn map<T: Scalar, F: Fn(&S) -> T>(&self, f: F) -> Form<T> {
        let mut out = Form::zero(self.degree);
        for (mi, v) in &self.coeffs {
            out.add_term(*mi, f(v));
        }
        out
    }

    pub fn try_map<T: Scalar, F: Fn(&S) -> Result<T>>(&self, f: F) -> Result<Form<T>> {
        let mut out = Form::zero(self.degree);
        for (mi, v) in &self.coeffs {
            out.add_term(*mi, f(v)?);
        }
        Ok(out)
    }

    /// Point values of the coefficients.
    pub fn values(&self) -> Form<f64> {
        self.map(|c| c.to_f64())
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.magnitude()))
    }

    /// Drops coefficients below `PRUNE_RELATIVE` times the largest one.
    pub fn pruned(&self) -> Self {
        let cut = PRUNE_RELATIVE * self.max_magnitude();
        Form {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, c)| c.magnitude() > cut)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn max_diff(&self, other: &Form<S>) -> f64 {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        (self.clone() - other.clone()).max_magnitude()
    }

    /// Equal up to `tol * (1 + largest coefficient)`.
    pub fn approx_eq(&self, other: &Form<S>, tol: f64) -> bool {
        self.degree == other.degree
            && self.max_diff(other) <= tol * (1.0 + self.max_magnitude().max(other.max_magnitude()))
    }
}

impl<S: Scalar> Add for Form<S> {
    type Output = Form<S>;
    fn add(mut self, rhs: Form<S>) -> Form<S> {
        assert_eq!(self.degree, rhs.degree, "adding forms of different degree");
        for (mi, c) in rhs.coeffs {
            self.add_term(mi, c);
        }
        self
    }
}

impl<S: Scalar> Sub for Form<S> {
    type Output = Form<S>;
    fn sub(mut self, rhs: Form<S>) -> Form<S> {
        assert_eq!(self.degree, rhs.degree, "subtracting forms of different degree");
        for (mi, c) in rhs.coeffs {
            self.add_term(mi, -c);
        }
        self
    }
}

impl<S: Scalar> Neg for Form<S> {
    type Output = Form<S>;
    fn neg(self) -> Form<S> {
        Form {
            degree: self.degree,
            coeffs: self.coeffs.into_iter().map(|(k, v)| (k, -v)).collect(),
        }
    }
}

impl fmt::Display for Form<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (mi, c)) in self.coeffs.iter().enumerate() {
            match (n, *c < 0.0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            if a == 1.0 {
                write!(f, "{mi}")?;
            } else {
                write!(f, "{a}*{mi}")?;
            }
        }
        Ok(())
    }
}
