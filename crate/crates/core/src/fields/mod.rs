//! Jet-valued scalar and form fields on a box chart of R^7, with the exterior
//! derivative, codifferential and Laplacian evaluated exactly at points.

mod expr;
mod structures;

use std::sync::Arc;

pub use expr::{Expr, Func};
pub use structures::{
    make_conformally_parallel, make_parallel, make_w2_contaminated, metric_field, random_cubic,
    structure_invariant_fields, ConformallyParallel, FormStructure, Parallel, PointInvariants, StructureField,
};

use crate::alg7::{hodge_star, Form, Metric, MultiIndex};
use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::DIM;

pub type Point = [f64; DIM];

/// Axis-aligned box `lo < x < hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chart {
    pub lo: Point,
    pub hi: Point,
}

impl Chart {
    pub fn cube(half_width: f64) -> Self {
        Chart {
            lo: [-half_width; DIM],
            hi: [half_width; DIM],
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0..DIM).all(|i| self.lo[i] < p[i] && p[i] < self.hi[i])
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::Domain(*p))
        }
    }
}

/// A scalar expression restricted to a chart.
#[derive(Clone, Debug)]
pub struct ScalarField {
    expr: Arc<Expr>,
    chart: Chart,
}

impl ScalarField {
    pub fn new(expr: Expr, chart: Chart) -> Self {
        ScalarField {
            expr: Arc::new(expr),
            chart,
        }
    }

    pub fn parse(text: &str, chart: Chart) -> Result<Self> {
        Ok(Self::new(Expr::parse(text)?, chart))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn jet(&self, p: &Point) -> Result<Jet2> {
        self.chart.check(p)?;
        Ok(self.expr.eval(&Jet2::coordinates(p)))
    }

    pub fn value(&self, p: &Point) -> Result<f64> {
        self.chart.check(p)?;
        Ok(self.expr.eval(p))
    }

    /// `df` as a form field.
    pub fn differential(&self) -> FormField {
        let this = self.clone();
        FormField::new(0, self.chart, move |p| Ok(Form::scalar(this.jet(p)?))).d_unchecked()
    }
}

type FormEval = dyn Fn(&Point) -> Result<Form<Jet2>> + Send + Sync;
type MetricEval = dyn Fn(&Point) -> Result<Metric<Jet2>> + Send + Sync;

/// A k-form whose coefficients are evaluated as jets.
#[derive(Clone)]
pub struct FormField {
    degree: usize,
    chart: Chart,
    eval: Arc<FormEval>,
}

impl std::fmt::Debug for FormField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FormField")
            .field("degree", &self.degree)
            .field("chart", &self.chart)
            .finish_non_exhaustive()
    }
}

impl FormField {
    pub fn new<F>(degree: usize, chart: Chart, eval: F) -> Self
    where
        F: Fn(&Point) -> Result<Form<Jet2>> + Send + Sync + 'static,
    {
        FormField {
            degree,
            chart,
            eval: Arc::new(eval),
        }
    }

    /// Field with the given coefficient expressions on increasing indices.
    pub fn from_coefficients(degree: usize, chart: Chart, coeffs: Vec<(MultiIndex, Expr)>) -> Result<Self> {
        if let Some((mi, _)) = coeffs.iter().find(|(mi, _)| mi.degree() != degree) {
            return Err(Error::Degree(format!("index {mi} in a {degree}-form field")));
        }
        Ok(FormField::new(degree, chart, move |p| {
            let x = Jet2::coordinates(p);
            let mut f = Form::zero(degree);
            for (mi, e) in &coeffs {
                f.add_term(*mi, e.eval(&x));
            }
            Ok(f)
        }))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn at(&self, p: &Point) -> Result<Form<Jet2>> {
        self.chart.check(p)?;
        (self.eval)(p)
    }

    pub fn d(&self) -> Result<FormField> {
        if self.degree >= DIM {
            return Err(Error::Degree(format!("d of a {}-form", self.degree)));
        }
        Ok(self.d_unchecked())
    }

    fn d_unchecked(&self) -> FormField {
        let inner = self.clone();
        FormField::new(self.degree + 1, self.chart, move |p| exterior_derivative(&inner.at(p)?))
    }

    /// `δ = (−1)^k * d *` with respect to the given metric field.
    pub fn codifferential(&self, metric: &MetricField) -> Result<FormField> {
        if self.degree == 0 {
            return Err(Error::Degree("codifferential of a 0-form".into()));
        }
        let inner = self.clone();
        let metric = metric.clone();
        Ok(FormField::new(self.degree - 1, self.chart, move |p| {
            codifferential_at(&inner.at(p)?, &metric.at(p)?)
        }))
    }
}

/// Metric tensor as a jet-valued field.
#[derive(Clone)]
pub struct MetricField {
    eval: Arc<MetricEval>,
}

impl MetricField {
    pub fn new<F>(eval: F) -> Self
    where
        F: Fn(&Point) -> Result<Metric<Jet2>> + Send + Sync + 'static,
    {
        MetricField { eval: Arc::new(eval) }
    }

    pub fn euclidean() -> Self {
        MetricField::new(|_| Ok(Metric::euclidean()))
    }

    pub fn at(&self, p: &Point) -> Result<Metric<Jet2>> {
        (self.eval)(p)
    }
}

/// Exterior derivative read off the jet gradients; consumes one jet order.
pub fn exterior_derivative(a: &Form<Jet2>) -> Result<Form<Jet2>> {
    if a.degree() >= DIM {
        return Err(Error::Degree(format!("d of a {}-form", a.degree())));
    }
    let mut out = Form::zero(a.degree() + 1);
    for (mi, c) in a.terms() {
        for i in 0..DIM {
            let axis = MultiIndex::axis(i);
            if let Some(sign) = axis.wedge_sign(*mi) {
                let di = c.partial(i)?;
                out.add_term(
                    MultiIndex::from_mask(axis.mask() | mi.mask()),
                    if sign > 0 { di } else { -di },
                );
            }
        }
    }
    Ok(out)
}

/// `δa = (−1)^k * d * a` at a point.
pub fn codifferential_at(a: &Form<Jet2>, metric: &Metric<Jet2>) -> Result<Form<Jet2>> {
    if a.degree() == 0 {
        return Err(Error::Degree("codifferential of a 0-form".into()));
    }
    let inner = hodge_star(&exterior_derivative(&hodge_star(a, metric))?, metric);
    Ok(if a.degree().is_multiple_of(2) { inner } else { -inner })
}

/// `Δφ = δ dφ` at a point.
pub fn laplacian(phi: &ScalarField, metric: &MetricField, p: &Point) -> Result<f64> {
    let dphi = exterior_derivative(&Form::scalar(phi.jet(p)?))?;
    let lap = codifferential_at(&dphi, &metric.at(p)?)?;
    Ok(lap.get(MultiIndex::from_mask(0)).value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(idx: &[usize]) -> MultiIndex {
        MultiIndex::new(idx).unwrap()
    }

    #[test]
    fn d_of_simple_form() {
        let chart = Chart::cube(2.0);
        let f = FormField::from_coefficients(1, chart, vec![(e(&[2]), Expr::var(0))]).unwrap();
        let df = f.d().unwrap().at(&[0.3; DIM]).unwrap().values();
        assert_eq!(df, Form::basis(&[1, 2]).unwrap());
    }

    #[test]
    fn d_squared_vanishes() {
        let chart = Chart::cube(2.0);
        let coeffs = vec![
            (e(&[1, 2]), Expr::parse("x3^2 x1 - x5 x7").unwrap()),
            (e(&[3, 6]), Expr::parse("sin(x1) x2^3").unwrap()),
            (e(&[4, 7]), Expr::parse("exp(x4 - x2)").unwrap()),
        ];
        let f = FormField::from_coefficients(2, chart, coeffs).unwrap();
        let ddf = f
            .d()
            .unwrap()
            .d()
            .unwrap()
            .at(&[0.1, -0.2, 0.3, 0.4, -0.5, 0.6, 0.7])
            .unwrap();
        assert!(ddf.values().max_magnitude() < 1e-13);
        let spent = FormField::new(1, chart, |_| {
            Ok(Form::monomial(MultiIndex::axis(0), Jet2::constant(1.0).truncate(0)))
        });
        assert!(matches!(
            spent.d().unwrap().at(&[0.0; DIM]),
            Err(Error::JetOrder { .. })
        ));
    }

    #[test]
    fn flat_laplacian() {
        let chart = Chart::cube(2.0);
        let flat = MetricField::euclidean();
        let p = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7];
        let sq = ScalarField::parse("x1^2+x2^2+x3^2+x4^2+x5^2+x6^2+x7^2", chart).unwrap();
        assert!((laplacian(&sq, &flat, &p).unwrap() + 14.0).abs() < 1e-12);
        let x1sq = ScalarField::parse("x1^2", chart).unwrap();
        assert!((laplacian(&x1sq, &flat, &p).unwrap() + 2.0).abs() < 1e-12);
        let lin = ScalarField::parse("3 x1 - x4", chart).unwrap();
        assert!(laplacian(&lin, &flat, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn codifferential_of_one_form_is_minus_divergence() {
        let chart = Chart::cube(2.0);
        let theta = FormField::from_coefficients(
            1,
            chart,
            vec![
                (e(&[1]), Expr::parse("x1^2").unwrap()),
                (e(&[3]), Expr::parse("x3 x2").unwrap()),
            ],
        )
        .unwrap();
        let p = [0.5, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0];
        let d = theta.codifferential(&MetricField::euclidean()).unwrap().at(&p).unwrap();
        assert!((d.get(MultiIndex::from_mask(0)).value() + (1.0 + 0.25)).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        let f = ScalarField::parse("x1", Chart::cube(1.0)).unwrap();
        assert!(matches!(f.jet(&[2.0; DIM]), Err(Error::Domain(_))));
        let top = FormField::new(7, Chart::cube(1.0), |_| Ok(Form::volume()));
        assert!(matches!(top.d(), Err(Error::Degree(_))));
    }
}
