use serde::{Deserialize, Serialize};

use super::{Form, MultiIndex};
use crate::error::{Error, Result};

/// Text record for a form: its degree and a list of (1-based index tuple,
/// coefficient) pairs in lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormRecord {
    pub degree: usize,
    pub terms: Vec<(Vec<usize>, f64)>,
}

impl From<&Form<f64>> for FormRecord {
    fn from(f: &Form<f64>) -> Self {
        FormRecord {
            degree: f.degree(),
            terms: f.terms().map(|(mi, c)| (mi.indices(), *c)).collect(),
        }
    }
}

impl TryFrom<&FormRecord> for Form<f64> {
    type Error = Error;

    fn try_from(r: &FormRecord) -> Result<Self> {
        if r.degree > crate::DIM {
            return Err(Error::Degree(format!("degree {} exceeds 7", r.degree)));
        }
        let terms = r
            .terms
            .iter()
            .map(|(idx, c)| MultiIndex::new(idx).map(|mi| (mi, *c)))
            .collect::<Result<Vec<_>>>()?;
        Form::from_terms(r.degree, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alg7::fundamental_form;

    #[test]
    fn record_shape() {
        let w = fundamental_form::<f64>();
        let r = FormRecord::from(&w);
        assert_eq!(r.degree, 3);
        assert_eq!(r.terms[0], (vec![1, 2, 7], 1.0));
        assert_eq!(r.terms.len(), 7);
        assert_eq!(Form::try_from(&r).unwrap(), w);
    }

    #[test]
    fn record_rejects_wrong_lengths() {
        let r = FormRecord {
            degree: 2,
            terms: vec![(vec![1, 2, 3], 1.0)],
        };
        assert!(Form::try_from(&r).is_err());
        let r = FormRecord {
            degree: 2,
            terms: vec![(vec![2, 1], 1.0)],
        };
        assert!(Form::try_from(&r).is_err());
    }
}
