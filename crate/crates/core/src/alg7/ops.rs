use super::{Form, Metric, MultiIndex};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat7};
use crate::scalar::Scalar;
use crate::DIM;

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

pub fn wedge<S: Scalar>(a: &Form<S>, b: &Form<S>) -> Result<Form<S>> {
    let degree = a.degree() + b.degree();
    if degree > DIM {
        return Err(Error::Degree(format!(
            "wedge of degrees {} and {} exceeds 7",
            a.degree(),
            b.degree()
        )));
    }
    let mut out = Form::zero(degree);
    for (ia, ca) in a.terms() {
        for (ib, cb) in b.terms() {
            if let Some(sign) = ia.wedge_sign(*ib) {
                let c = ca.clone() * cb.clone();
                out.add_term(
                    MultiIndex::from_mask(ia.mask() | ib.mask()),
                    if sign > 0 { c } else { -c },
                );
            }
        }
    }
    Ok(out)
}

/// Wedge of several forms, left to right.
pub fn wedge_all<S: Scalar>(forms: &[&Form<S>]) -> Result<Form<S>> {
    let mut acc = Form::scalar(S::one());
    for f in forms {
        acc = wedge(&acc, f)?;
    }
    Ok(acc)
}

/// Contraction `v ⌟ a`, inserting `v` in the first slot.
pub fn interior<S: Scalar>(v: &[S; DIM], a: &Form<S>) -> Result<Form<S>> {
    if a.degree() == 0 {
        return Err(Error::Degree("interior product of a 0-form".into()));
    }
    let mut out = Form::zero(a.degree() - 1);
    for (mi, c) in a.terms() {
        for i in mi.zero_based() {
            if v[i].is_zero() {
                continue;
            }
            let p = mi.position(i).expect("index present");
            let term = v[i].clone() * c.clone();
            out.add_term(mi.without(i), if p % 2 == 0 { term } else { -term });
        }
    }
    Ok(out)
}

/// Contraction with the basis vector `e_{i+1}` (0-based `i`).
pub fn interior_axis<S: Scalar>(i: usize, a: &Form<S>) -> Result<Form<S>> {
    let v: [S; DIM] = std::array::from_fn(|k| if k == i { S::one() } else { S::zero() });
    interior(&v, a)
}

/// Hodge star, characterised by `a ∧ *b = ⟨a, b⟩ vol_g`.
pub fn hodge_star<S: Scalar>(a: &Form<S>, metric: &Metric<S>) -> Form<S> {
    let k = a.degree();
    let mut out = Form::zero(DIM - k);
    let orient = metric.orientation();
    if metric.is_euclidean() {
        for (mi, c) in a.terms() {
            let comp = mi.complement();
            let sign = mi.wedge_sign(comp).expect("disjoint") * orient;
            out.add_term(comp, if sign > 0 { c.clone() } else { -c.clone() });
        }
        return out;
    }
    let lm = metric.lambda_metric(k);
    let raised = raise(a, lm);
    for (mi, c) in raised {
        let comp = mi.complement();
        let sign = mi.wedge_sign(comp).expect("disjoint") * orient;
        let v = metric.sqrt_det().clone() * c;
        out.add_term(comp, if sign > 0 { v } else { -v });
    }
    out
}

fn raise<S: Scalar>(a: &Form<S>, lm: &[Vec<S>]) -> Vec<(MultiIndex, S)> {
    let basis = MultiIndex::all_of_degree(a.degree());
    basis
        .iter()
        .map(|mi| {
            let row = &lm[mi.rank()];
            let v = a
                .terms()
                .fold(S::zero(), |acc, (mk, c)| acc + row[mk.rank()].clone() * c.clone());
            (*mi, v)
        })
        .collect()
}

/// Inner product summed over increasing multi-indices.
pub fn pairing<S: Scalar>(a: &Form<S>, b: &Form<S>, metric: &Metric<S>) -> Result<S> {
    if a.degree() != b.degree() {
        return Err(Error::Degree(format!(
            "pairing of degrees {} and {}",
            a.degree(),
            b.degree()
        )));
    }
    if metric.is_euclidean() {
        return Ok(a.terms().fold(S::zero(), |acc, (mi, c)| acc + c.clone() * b.get(*mi)));
    }
    let lm = metric.lambda_metric(a.degree());
    let mut acc = S::zero();
    for (ia, ca) in a.terms() {
        let row = &lm[ia.rank()];
        for (ib, cb) in b.terms() {
            acc = acc + ca.clone() * row[ib.rank()].clone() * cb.clone();
        }
    }
    Ok(acc)
}

/// Squared norm summed over all index tuples: `k! · pairing(a, a)`.
pub fn norm_sq_full<S: Scalar>(a: &Form<S>, metric: &Metric<S>) -> S {
    let p = pairing(a, a, metric).expect("equal degrees");
    S::from_i64(factorial(a.degree())) * p
}

/// Re-expresses `a` in the basis `E_c = Σ_i m[i][c] ∂_i`: the new coefficient
/// of `e_C` is `a(E_{c1}, …, E_{ck})`.
pub fn change_frame<S: Scalar>(a: &Form<S>, m: &Mat7<S>) -> Form<S> {
    let k = a.degree();
    let compounds = linalg::compound_matrices(m, k);
    let table = &compounds[k];
    let mut out = Form::zero(k);
    for target in MultiIndex::all_of_degree(k) {
        let v = a.terms().fold(S::zero(), |acc, (mi, c)| {
            acc + c.clone() * table[mi.rank()][target.rank()].clone()
        });
        out.add_term(*target, v);
    }
    out
}

/// Lowers a vector to a 1-form.
pub fn flat<S: Scalar>(v: &[S; DIM], metric: &Metric<S>) -> Form<S> {
    Form::one_form(&linalg::mat_vec(metric.matrix(), v))
}
