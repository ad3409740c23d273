use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{codifferential_at, exterior_derivative, Chart, Expr, FormField, MetricField, Point, ScalarField};
use crate::alg7::{fundamental_form, Form, MultiIndex};
use crate::error::Result;
use crate::g2point::{Differentials, G2Invariants, G2PointStructure};
use crate::jet::Jet2;
use crate::scalar::{RealScalar, Scalar};
use crate::DIM;

/// A G2 3-form field given by jets of its coordinate coefficients.
pub trait StructureField: Send + Sync {
    fn name(&self) -> String;

    fn chart(&self) -> &Chart;

    /// Second-order jets of `ω` at `p`.
    fn omega_at(&self, p: &Point) -> Result<Form<Jet2>>;

    /// Pointwise structure with jet coefficients.
    fn structure_at(&self, p: &Point) -> Result<G2PointStructure<Jet2>> {
        G2PointStructure::new(self.omega_at(p)?)
    }

    /// Structure together with `dω` and `d*ω`.
    fn differentials_at(&self, p: &Point) -> Result<(G2PointStructure<Jet2>, Differentials<Jet2>)> {
        let s = self.structure_at(p)?;
        let diffs = Differentials {
            d_omega: exterior_derivative(s.omega())?,
            d_star_omega: exterior_derivative(&s.star_omega())?,
        };
        Ok((s, diffs))
    }
}

/// The metric of a structure field.
pub fn metric_field(s: Arc<dyn StructureField>) -> MetricField {
    MetricField::new(move |p| Ok(s.structure_at(p)?.metric().clone()))
}

/// The constant standard form.
#[derive(Clone, Debug)]
pub struct Parallel {
    chart: Chart,
}

pub fn make_parallel(chart: Chart) -> Parallel {
    Parallel { chart }
}

impl StructureField for Parallel {
    fn name(&self) -> String {
        "parallel".into()
    }

    fn chart(&self) -> &Chart {
        &self.chart
    }

    fn omega_at(&self, p: &Point) -> Result<Form<Jet2>> {
        self.chart.check(p)?;
        Ok(fundamental_form())
    }
}

/// `ω = e^{3f} ω₀` for a scalar field `f`.
#[derive(Clone, Debug)]
pub struct ConformallyParallel {
    f: ScalarField,
}

pub fn make_conformally_parallel(f: ScalarField) -> ConformallyParallel {
    ConformallyParallel { f }
}

impl ConformallyParallel {
    pub fn conformal_factor(&self) -> &ScalarField {
        &self.f
    }
}

impl StructureField for ConformallyParallel {
    fn name(&self) -> String {
        "conformal".into()
    }

    fn chart(&self) -> &Chart {
        self.f.chart()
    }

    fn omega_at(&self, p: &Point) -> Result<Form<Jet2>> {
        let weight = (self.f.jet(p)? * Jet2::from_i64(3)).exp();
        Ok(fundamental_form::<Jet2>().scale(&weight))
    }
}

/// A structure given directly as a 3-form field.
#[derive(Clone, Debug)]
pub struct FormStructure {
    name: String,
    omega: FormField,
}

impl FormStructure {
    pub fn new(name: impl Into<String>, omega: FormField) -> Self {
        FormStructure {
            name: name.into(),
            omega,
        }
    }
}

impl StructureField for FormStructure {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn chart(&self) -> &Chart {
        self.omega.chart()
    }

    fn omega_at(&self, p: &Point) -> Result<Form<Jet2>> {
        self.omega.at(p)
    }
}

/// `ω₀ + (x1/2)·e124`: near the origin its `d*ω` has a Λ⁵₁₄ part, so the
/// structure is not integrable.
pub fn make_w2_contaminated(chart: Chart) -> FormStructure {
    let mut coeffs: Vec<(MultiIndex, Expr)> = crate::alg7::FUNDAMENTAL_TERMS
        .iter()
        .map(|(idx, sign)| (MultiIndex::new(idx).expect("valid"), Expr::constant(*sign as f64)))
        .collect();
    coeffs.push((
        MultiIndex::new(&[1, 2, 4]).expect("valid"),
        Expr::parse("x1/2").expect("static"),
    ));
    FormStructure::new(
        "w2-contaminated",
        FormField::from_coefficients(3, chart, coeffs).expect("degree 3"),
    )
}

/// Cubic polynomial in `x1 … x7` with every monomial of degree 1 to 3 and
/// coefficients drawn uniformly from `[-scale, scale]`.
pub fn random_cubic(seed: u64, scale: f64) -> Expr {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc: Option<Expr> = None;
    let mut push = |monomial: Vec<usize>, rng: &mut ChaCha8Rng| {
        let c: f64 = rng.random_range(-scale..=scale);
        let term = monomial
            .into_iter()
            .fold(Expr::constant(c), |e, i| Expr::Mul(Box::new(e), Box::new(Expr::var(i))));
        acc = Some(match acc.take() {
            None => term,
            Some(a) => Expr::Add(Box::new(a), Box::new(term)),
        });
    };
    for i in 0..DIM {
        push(vec![i], &mut rng);
    }
    for i in 0..DIM {
        for j in i..DIM {
            push(vec![i, j], &mut rng);
        }
    }
    for i in 0..DIM {
        for j in i..DIM {
            for k in j..DIM {
                push(vec![i, j, k], &mut rng);
            }
        }
    }
    acc.expect("non-empty")
}

/// Everything known about an integrable structure at one point.
#[derive(Clone, Debug)]
pub struct PointInvariants {
    pub point: Point,
    pub structure: G2PointStructure<Jet2>,
    pub diffs: Differentials<Jet2>,
    /// `λ`, `θ` and `T` carry first-order jets.
    pub invariants: G2Invariants<Jet2>,
    pub d_torsion: Form<f64>,
    pub d_lee: Form<f64>,
    /// `δθ`
    pub delta_lee: f64,
}

impl PointInvariants {
    pub fn structure_values(&self) -> G2PointStructure<f64> {
        self.structure.values()
    }

    pub fn invariant_values(&self) -> G2Invariants<f64> {
        self.invariants.values()
    }
}

/// `θ`, `T`, `λ`, `dT`, `dθ` and `δθ` at `p`.
pub fn structure_invariant_fields(s: &dyn StructureField, p: &Point) -> Result<PointInvariants> {
    let (structure, diffs) = s.differentials_at(p)?;
    let invariants = G2Invariants::compute(&structure, &diffs)?;
    let d_torsion = exterior_derivative(&invariants.torsion)?.values();
    let d_lee = exterior_derivative(&invariants.lee)?.values();
    let delta_lee = codifferential_at(&invariants.lee, structure.metric())?
        .get(MultiIndex::from_mask(0))
        .value();
    Ok(PointInvariants {
        point: *p,
        structure,
        diffs,
        invariants,
        d_torsion,
        d_lee,
        delta_lee,
    })
}
