//! Exact multilinear algebra on an oriented 7-dimensional inner-product
//! space: sparse forms, wedge and interior products, Hodge star, pairings.

mod form;
mod metric;
mod multi_index;
mod ops;
mod record;

pub use form::{Form, PRUNE_RELATIVE};
pub use metric::Metric;
pub use multi_index::MultiIndex;
pub use ops::{change_frame, flat, hodge_star, interior, interior_axis, norm_sq_full, pairing, wedge, wedge_all};
pub use record::FormRecord;

use crate::scalar::Scalar;

/// Terms of the standard G2 3-form as (1-based indices, sign).
pub const FUNDAMENTAL_TERMS: [([usize; 3], i64); 7] = [
    ([1, 2, 7], 1),
    ([1, 3, 5], 1),
    ([1, 4, 6], -1),
    ([2, 3, 6], -1),
    ([2, 4, 5], -1),
    ([3, 4, 7], 1),
    ([5, 6, 7], 1),
];

/// `e127 + e135 − e146 − e236 − e245 + e347 + e567`.
pub fn fundamental_form<S: Scalar>() -> Form<S> {
    let mut f = Form::zero(3);
    for (idx, sign) in FUNDAMENTAL_TERMS {
        f.add_term(MultiIndex::new(&idx).expect("valid"), S::from_i64(sign));
    }
    f
}
