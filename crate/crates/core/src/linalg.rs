//! Small dense 7x7 linear algebra over generic scalars.

use crate::alg7::MultiIndex;
use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};
use crate::DIM;

pub type Mat7<S> = [[S; DIM]; DIM];

pub fn identity<S: Scalar>() -> Mat7<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { S::one() } else { S::zero() }))
}

pub fn map_mat<S: Scalar, T, F: Fn(&S) -> T>(m: &Mat7<S>, f: F) -> [[T; DIM]; DIM] {
    std::array::from_fn(|i| std::array::from_fn(|j| f(&m[i][j])))
}

pub fn values<S: Scalar>(m: &Mat7<S>) -> Mat7<f64> {
    map_mat(m, |x| x.to_f64())
}

pub fn transpose<S: Scalar>(m: &Mat7<S>) -> Mat7<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| m[j][i].clone()))
}

pub fn mat_mul<S: Scalar>(a: &Mat7<S>, b: &Mat7<S>) -> Mat7<S> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..DIM).fold(S::zero(), |acc, k| acc + a[i][k].clone() * b[k][j].clone()))
    })
}

pub fn mat_add<S: Scalar>(a: &Mat7<S>, b: &Mat7<S>) -> Mat7<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].clone() + b[i][j].clone()))
}

pub fn mat_scale<S: Scalar>(a: &Mat7<S>, c: &S) -> Mat7<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].clone() * c.clone()))
}

pub fn mat_vec<S: Scalar>(a: &Mat7<S>, v: &[S; DIM]) -> [S; DIM] {
    std::array::from_fn(|i| (0..DIM).fold(S::zero(), |acc, k| acc + a[i][k].clone() * v[k].clone()))
}

pub fn max_abs_diff(a: &Mat7<f64>, b: &Mat7<f64>) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

/// Gauss-Jordan inverse with partial pivoting on the point values.
pub fn inverse<S: RealScalar>(m: &Mat7<S>) -> Result<Mat7<S>> {
    let mut a = m.clone();
    let mut inv = identity::<S>();
    let scale = values(m).iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()));
    for col in 0..DIM {
        let pivot = (col..DIM)
            .max_by(|&r, &s| a[r][col].to_f64().abs().total_cmp(&a[s][col].to_f64().abs()))
            .expect("non-empty range");
        if a[pivot][col].to_f64().abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Metric("singular matrix".into()));
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone().recip();
        for j in 0..DIM {
            a[col][j] = a[col][j].clone() * p.clone();
            inv[col][j] = inv[col][j].clone() * p.clone();
        }
        for r in 0..DIM {
            if r == col {
                continue;
            }
            let factor = a[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..DIM {
                a[r][j] = a[r][j].clone() - factor.clone() * a[col][j].clone();
                inv[r][j] = inv[r][j].clone() - factor.clone() * inv[col][j].clone();
            }
        }
    }
    Ok(inv)
}

/// Determinant by elimination with partial pivoting on point values.
pub fn determinant<S: RealScalar>(m: &Mat7<S>) -> S {
    let n = DIM;
    let mut a: Vec<Vec<S>> = m.iter().map(|r| r.to_vec()).collect();
    det_in_place(&mut a, n)
}

pub(crate) fn det_in_place<S: RealScalar>(a: &mut [Vec<S>], n: usize) -> S {
    let mut det = S::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].to_f64().abs().total_cmp(&a[s][col].to_f64().abs()))
            .expect("non-empty range");
        if a[pivot][col].to_f64() == 0.0 {
            return S::zero();
        }
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det = det * a[col][col].clone();
        let p = a[col][col].clone().recip();
        for r in col + 1..n {
            let factor = a[r][col].clone() * p.clone();
            for j in col..n {
                a[r][j] = a[r][j].clone() - factor.clone() * a[col][j].clone();
            }
        }
    }
    det
}

/// Cholesky test on point values: true iff the matrix is symmetric positive definite.
pub fn is_positive_definite(m: &Mat7<f64>) -> bool {
    let mut l = [[0.0f64; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..=i {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return false;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}

/// Symmetric square root and inverse square root of a positive-definite
/// matrix by the Denman-Beavers iteration. Only ring operations and inverses
/// are used, so derivative information in jet scalars is carried along.
pub fn sqrt_and_inv_sqrt<S: RealScalar>(m: &Mat7<S>) -> Result<(Mat7<S>, Mat7<S>)> {
    let mv = values(m);
    if !is_positive_definite(&mv) {
        return Err(Error::Frame("matrix is not positive definite".into()));
    }
    // normalise by the mean eigenvalue so the iteration starts near identity
    let trace: f64 = (0..DIM).map(|i| mv[i][i]).sum::<f64>() / DIM as f64;
    let c = S::from_f64(trace);
    let a = mat_scale(m, &c.clone().recip());
    let mut y = a;
    let mut z = identity::<S>();
    let half = S::from_ratio(1, 2);
    let mut converged_at = None;
    for it in 0..100 {
        let yi = inverse(&y)?;
        let zi = inverse(&z)?;
        let y_next = mat_scale(&mat_add(&y, &zi), &half);
        let z_next = mat_scale(&mat_add(&z, &yi), &half);
        let delta = max_abs_diff(&values(&y_next), &values(&y));
        y = y_next;
        z = z_next;
        match converged_at {
            // a few extra sweeps let the derivative parts settle as well
            Some(k) if it >= k + 3 => break,
            None if delta < 1e-15 => converged_at = Some(it),
            _ => {}
        }
    }
    if converged_at.is_none() {
        return Err(Error::Frame("square-root iteration did not converge".into()));
    }
    let sc = c.clone().sqrt();
    Ok((mat_scale(&y, &sc), mat_scale(&z, &sc.recip())))
}

/// Compound matrices of `m` for degrees `0..=max_degree`: entry `[k][r][s]`
/// is the minor of `m` with rows from the `r`-th and columns from the `s`-th
/// k-subset (lexicographic order).
pub fn compound_matrices<S: Scalar>(m: &Mat7<S>, max_degree: usize) -> Vec<Vec<Vec<S>>> {
    let mut out: Vec<Vec<Vec<S>>> = Vec::with_capacity(max_degree + 1);
    out.push(vec![vec![S::one()]]);
    for k in 1..=max_degree {
        let subsets = MultiIndex::all_of_degree(k);
        let prev = &out[k - 1];
        let table: Vec<Vec<S>> = subsets
            .iter()
            .map(|rows| {
                let r: Vec<usize> = rows.zero_based().collect();
                let first = r[0];
                let rest_rows = rows.without(first);
                let rr = rest_rows.rank();
                subsets
                    .iter()
                    .map(|cols| {
                        let mut acc = S::zero();
                        for (p, c) in cols.zero_based().enumerate() {
                            let entry = &m[first][c];
                            if entry.is_zero() {
                                continue;
                            }
                            let minor = prev[rr][cols.without(c).rank()].clone();
                            let term = entry.clone() * minor;
                            acc = if p % 2 == 0 { acc + term } else { acc - term };
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        out.push(table);
    }
    out
}
