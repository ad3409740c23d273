use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat7};
use crate::scalar::{RealScalar, Scalar};
use crate::DIM;

/// Positive-definite inner product on the 7-dimensional frame together with
/// an orientation relative to `e1 … e7`.
///
/// Only construction from a raw matrix needs division and square roots; once
/// built, star and pairing use ring operations alone, so exact scalars work
/// with [`Metric::euclidean`].
#[derive(Clone, Debug)]
pub struct Metric<S> {
    g: Mat7<S>,
    inv: Mat7<S>,
    sqrt_det: S,
    orientation: i8,
    euclidean: bool,
    // induced inner products on Λ^k, built from minors of g^{-1}
    compounds: OnceLock<Vec<Vec<Vec<S>>>>,
}

impl<S: Scalar> Metric<S> {
    pub fn euclidean() -> Self {
        Metric {
            g: linalg::identity(),
            inv: linalg::identity(),
            sqrt_det: S::one(),
            orientation: 1,
            euclidean: true,
            compounds: OnceLock::new(),
        }
    }

    pub fn matrix(&self) -> &Mat7<S> {
        &self.g
    }

    pub fn inverse(&self) -> &Mat7<S> {
        &self.inv
    }

    pub fn sqrt_det(&self) -> &S {
        &self.sqrt_det
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn is_euclidean(&self) -> bool {
        self.euclidean
    }

    /// Inner product matrix of Λ^k in the coordinate basis, indexed by
    /// multi-index rank.
    pub fn lambda_metric(&self, k: usize) -> &[Vec<S>] {
        &self.compounds.get_or_init(|| linalg::compound_matrices(&self.inv, DIM))[k]
    }

    /// `g(u, v)` for vectors.
    pub fn inner(&self, u: &[S; DIM], v: &[S; DIM]) -> S {
        let mut acc = S::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                acc = acc + u[i].clone() * self.g[i][j].clone() * v[j].clone();
            }
        }
        acc
    }

    /// Vector dual to a 1-form (index raising).
    pub fn sharp(&self, a: &[S; DIM]) -> [S; DIM] {
        linalg::mat_vec(&self.inv, a)
    }

    pub fn map<T: Scalar, F: Fn(&S) -> T>(&self, f: F) -> Metric<T> {
        Metric {
            g: linalg::map_mat(&self.g, &f),
            inv: linalg::map_mat(&self.inv, &f),
            sqrt_det: f(&self.sqrt_det),
            orientation: self.orientation,
            euclidean: self.euclidean,
            compounds: OnceLock::new(),
        }
    }

    /// Point values of the metric.
    pub fn values(&self) -> Metric<f64> {
        self.map(|x| x.to_f64())
    }
}

impl<S: RealScalar> Metric<S> {
    /// Builds a metric from a symmetric positive-definite matrix.
    pub fn new(g: Mat7<S>, orientation: i8) -> Result<Self> {
        if orientation != 1 && orientation != -1 {
            return Err(Error::Metric(format!("orientation must be ±1, got {orientation}")));
        }
        let gv = linalg::values(&g);
        let scale = gv.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..DIM {
            for j in 0..i {
                if (gv[i][j] - gv[j][i]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::Metric("matrix is not symmetric".into()));
                }
            }
        }
        if !linalg::is_positive_definite(&gv) {
            return Err(Error::Metric("matrix is not positive definite".into()));
        }
        let inv = linalg::inverse(&g)?;
        let det = linalg::determinant(&g);
        Ok(Metric {
            g,
            inv,
            sqrt_det: det.sqrt(),
            orientation,
            euclidean: false,
            compounds: OnceLock::new(),
        })
    }

    /// `e^{2f}` times the Euclidean metric.
    pub fn conformally_flat(f: S) -> Result<Self> {
        let c = (f * S::from_i64(2)).exp();
        Metric::new(linalg::mat_scale(&linalg::identity(), &c), 1)
    }
}
