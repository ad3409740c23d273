//! Real Clifford algebra Cl(7) acting on 8-component spinors.
//!
//! The generators are left multiplications by the imaginary octonions, with
//! the octonion product read off from the standard 3-form: `e_i e_j = Σ_k
//! ω_ijk e_k` for `i ≠ j`. Each generator is a signed permutation matrix,
//! skew-symmetric, and squares to `-Id`.

use std::sync::LazyLock;

use nalgebra::{SMatrix, SymmetricEigen};

use crate::alg7::{fundamental_form, Form, FUNDAMENTAL_TERMS};
use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};
use crate::DIM;

pub const SPINOR_DIM: usize = 8;

/// Gap tolerance used when checking that the −7 eigenvalue is simple.
pub const EIGEN_GAP_TOL: f64 = 1e-8;

type Mat8 = [[f64; SPINOR_DIM]; SPINOR_DIM];

/// Seven real 8x8 matrices satisfying `γ_i γ_j + γ_j γ_i = −2δ_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaRep {
    gamma: [[[i8; SPINOR_DIM]; SPINOR_DIM]; DIM],
}

static GAMMA: LazyLock<GammaRep> = LazyLock::new(build_gamma);

/// The representation used throughout the crate.
pub fn gamma() -> &'static GammaRep {
    &GAMMA
}

fn octonion_structure_constants() -> [[[i8; DIM]; DIM]; DIM] {
    let mut c = [[[0i8; DIM]; DIM]; DIM];
    for (idx, sign) in FUNDAMENTAL_TERMS {
        let [a, b, d] = idx.map(|i| i - 1);
        let s = sign as i8;
        // fully antisymmetric in (a, b, d)
        for (p, q, r, sg) in [
            (a, b, d, s),
            (b, d, a, s),
            (d, a, b, s),
            (b, a, d, -s),
            (a, d, b, -s),
            (d, b, a, -s),
        ] {
            c[p][q][r] = sg;
        }
    }
    c
}

/// Left multiplication by imaginary octonion units, negated once if needed
/// so that the standard 3-form acts with eigenvalue −7 on a line.
pub fn build_gamma() -> GammaRep {
    let c = octonion_structure_constants();
    let mut gamma = [[[0i8; SPINOR_DIM]; SPINOR_DIM]; DIM];
    for (i, g) in gamma.iter_mut().enumerate() {
        // spinor slot 0 is the real unit, slot j+1 is e_{j+1}
        g[i + 1][0] = 1;
        g[0][i + 1] = -1;
        for j in 0..DIM {
            if j == i {
                continue;
            }
            for k in 0..DIM {
                if c[i][j][k] != 0 {
                    g[k + 1][j + 1] = c[i][j][k];
                }
            }
        }
    }
    let mut rep = GammaRep { gamma };
    let spectrum = rep.spectrum(&fundamental_form());
    if spectrum[SPINOR_DIM - 1] > 6.5 {
        for g in rep.gamma.iter_mut() {
            for row in g.iter_mut() {
                for v in row.iter_mut() {
                    *v = -*v;
                }
            }
        }
    }
    rep
}

impl GammaRep {
    pub fn generator(&self, i: usize) -> Mat8 {
        let mut m = [[0.0; SPINOR_DIM]; SPINOR_DIM];
        for r in 0..SPINOR_DIM {
            for c in 0..SPINOR_DIM {
                m[r][c] = self.gamma[i][r][c] as f64;
            }
        }
        m
    }

    fn apply_generator<S: Scalar>(&self, i: usize, psi: &[S; SPINOR_DIM]) -> [S; SPINOR_DIM] {
        let g = &self.gamma[i];
        std::array::from_fn(|r| {
            let mut acc = S::zero();
            for c in 0..SPINOR_DIM {
                match g[r][c] {
                    0 => {}
                    1 => acc = acc + psi[c].clone(),
                    -1 => acc = acc - psi[c].clone(),
                    _ => unreachable!("signed permutation entries"),
                }
            }
            acc
        })
    }

    /// Clifford action of a form: the monomial `e_{i1…ik}` (increasing)
    /// acts as `γ_{i1} ⋯ γ_{ik}`.
    pub fn act<S: Scalar>(&self, a: &Form<S>, psi: &Spinor<S>) -> Spinor<S> {
        let mut out: [S; SPINOR_DIM] = std::array::from_fn(|_| S::zero());
        for (mi, c) in a.terms() {
            let mut v = psi.0.clone();
            let idx: Vec<usize> = mi.zero_based().collect();
            for &i in idx.iter().rev() {
                v = self.apply_generator(i, &v);
            }
            for (o, x) in out.iter_mut().zip(v) {
                *o = o.clone() + c.clone() * x;
            }
        }
        Spinor(out)
    }

    /// Matrix of `ψ ↦ act(a, ψ)`.
    pub fn action_matrix<S: Scalar>(&self, a: &Form<S>) -> [[S; SPINOR_DIM]; SPINOR_DIM] {
        let mut m: [[S; SPINOR_DIM]; SPINOR_DIM] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
        for c in 0..SPINOR_DIM {
            let col = self.act(a, &Spinor::unit(c));
            for (r, v) in col.0.into_iter().enumerate() {
                m[r][c] = v;
            }
        }
        m
    }

    /// Sorted eigenvalues of the (symmetric part of the) action of `a`.
    pub fn spectrum(&self, a: &Form<f64>) -> [f64; SPINOR_DIM] {
        let (vals, _) = sym_eigen(&self.action_matrix(a));
        vals
    }
}

fn sym_eigen(m: &Mat8) -> ([f64; SPINOR_DIM], Mat8) {
    let mat = SMatrix::<f64, 8, 8>::from_fn(|r, c| 0.5 * (m[r][c] + m[c][r]));
    let eig = SymmetricEigen::new(mat);
    let mut order: Vec<usize> = (0..SPINOR_DIM).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = std::array::from_fn(|k| eig.eigenvalues[order[k]]);
    let vecs = std::array::from_fn(|k| std::array::from_fn(|r| eig.eigenvectors[(r, order[k])]));
    (vals, vecs)
}

/// Real 8-component spinor.
#[derive(Clone, Debug, PartialEq)]
pub struct Spinor<S>(pub [S; SPINOR_DIM]);

impl<S: Scalar> Spinor<S> {
    pub fn zero() -> Self {
        Spinor(std::array::from_fn(|_| S::zero()))
    }

    pub fn unit(k: usize) -> Self {
        Spinor(std::array::from_fn(|i| if i == k { S::one() } else { S::zero() }))
    }

    pub fn inner(&self, other: &Spinor<S>) -> S {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        Spinor(std::array::from_fn(|i| self.0[i].clone() * c.clone()))
    }

    pub fn add(&self, other: &Spinor<S>) -> Self {
        Spinor(std::array::from_fn(|i| self.0[i].clone() + other.0[i].clone()))
    }

    pub fn sub(&self, other: &Spinor<S>) -> Self {
        Spinor(std::array::from_fn(|i| self.0[i].clone() - other.0[i].clone()))
    }

    pub fn values(&self) -> Spinor<f64> {
        Spinor(std::array::from_fn(|i| self.0[i].to_f64()))
    }

    /// Euclidean norm of the point values.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt()
    }
}

/// Clifford action with the crate-wide representation.
pub fn act<S: Scalar>(a: &Form<S>, psi: &Spinor<S>) -> Spinor<S> {
    gamma().act(a, psi)
}

fn first_of_largest(mags: &[f64; SPINOR_DIM]) -> usize {
    let max = mags.iter().cloned().fold(0.0f64, f64::max);
    mags.iter()
        .position(|m| *m >= max - 1e-12 * max.max(1.0))
        .expect("non-empty")
}

/// Unit eigenvector of `act(omega, ·)` with eigenvalue −7, for a G2 form
/// written in an orthonormal frame. The sign makes the first component of
/// largest magnitude positive.
pub fn canonical_spinor(omega: &Form<f64>) -> Result<Spinor<f64>> {
    if omega.degree() != 3 {
        return Err(Error::Degree(format!(
            "expected a 3-form, got degree {}",
            omega.degree()
        )));
    }
    let metric = crate::g2point::metric_from_form(omega)?;
    let dev = crate::linalg::max_abs_diff(&crate::linalg::values(metric.matrix()), &crate::linalg::identity());
    if dev > 1e-8 {
        return Err(Error::NotG2Form(format!(
            "form is not orthonormal-standard (metric deviates from identity by {dev:.3e})"
        )));
    }
    let (vals, vecs) = sym_eigen(&gamma().action_matrix(omega));
    if (vals[0] + 7.0).abs() > EIGEN_GAP_TOL * 7.0 || vals[1] - vals[0] <= EIGEN_GAP_TOL {
        return Err(Error::NotG2Form(format!(
            "eigenvalue -7 absent or not simple (lowest eigenvalues {:.6}, {:.6})",
            vals[0], vals[1]
        )));
    }
    let mut v = vecs[0];
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
    let k = first_of_largest(&v.map(f64::abs));
    if v[k] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    Ok(Spinor(v))
}

/// Canonical spinor through the spectral projector `(Id − A)/8` of
/// `A = act(omega, ·)`; uses ring operations and one square root only, so
/// jet scalars carry the derivative of the spinor field.
pub fn canonical_spinor_projector<S: RealScalar>(omega: &Form<S>) -> Result<Spinor<S>> {
    let a = gamma().action_matrix(omega);
    // minimal polynomial (A + 7)(A − 1) = 0 on a G2 form
    let av: Mat8 = std::array::from_fn(|r| std::array::from_fn(|c| a[r][c].to_f64()));
    let mut resid: f64 = 0.0;
    for r in 0..SPINOR_DIM {
        for c in 0..SPINOR_DIM {
            let sq: f64 = (0..SPINOR_DIM).map(|k| av[r][k] * av[k][c]).sum();
            let id = if r == c { 1.0 } else { 0.0 };
            resid = resid.max((sq + 6.0 * av[r][c] - 7.0 * id).abs());
        }
    }
    if resid > 1e-8 {
        return Err(Error::NotG2Form(format!(
            "action does not satisfy (A+7)(A-1)=0 (residual {resid:.3e})"
        )));
    }
    let eighth = S::from_ratio(1, 8);
    let proj = |r: usize, c: usize| {
        let id = if r == c { S::one() } else { S::zero() };
        (id - a[r][c].clone()) * eighth.clone()
    };
    let diag: [f64; SPINOR_DIM] = std::array::from_fn(|k| proj(k, k).to_f64());
    let k = first_of_largest(&diag);
    let norm = proj(k, k).sqrt();
    Ok(Spinor(std::array::from_fn(|r| proj(r, k) / norm.clone())))
}
