//! Hypersurfaces of R^8 and the G2-structures they inherit from the Cayley
//! 4-form: `ω = (N ⌟ Φ₀)` restricted to the tangent space.
//!
//! Ambient coordinates are `y1 … y7` followed by `y8`, the direction `e₀`
//! split off in `Φ₀ = e₀∧ω₀ + *₇ω₀`. The unit normal is oriented so that
//! `det(∂₁F, …, ∂₇F, N) > 0` and the shape operator is `S = −g⁻¹⟨∂²F, N⟩`,
//! which makes the unit sphere with outward normal have `S = Id`.

use std::sync::{Arc, LazyLock};

use num_rational::Rational64;
use serde::Serialize;

use crate::alg7::{fundamental_form, hodge_star, interior_axis, norm_sq_full, wedge, Form, Metric, MultiIndex};
use crate::curvature::{scalar_curvature_lc, IdentityCheck};
use crate::error::{Error, Result};
use crate::fields::{exterior_derivative, structure_invariant_fields, Chart, Expr, Point, StructureField};
use crate::g2point::{classify, metric_from_form, project3, G2PointStructure, DEFAULT_CLASSIFY_TOL};
use crate::jet::{Dual, Jet2};
use crate::linalg::{self, det_in_place, Mat7};
use crate::scalar::{RealScalar, Scalar};
use crate::DIM;

/// Ambient dimension.
pub const AMBIENT: usize = DIM + 1;

/// Index of the split-off direction `e₀` among the ambient coordinates.
pub const NORMAL_AXIS: usize = DIM;

type AmbientVec<S> = [S; AMBIENT];

/// Hadamard ratio `det g / Π g_ii` below which the differential counts as
/// rank deficient.
const RANK_TOL: f64 = 1e-12;

/// Tolerance for `metric_from_form(ω) = F*⟨·,·⟩`.
pub const METRIC_CONSISTENCY_TOL: f64 = 1e-9;

/// The Cayley 4-form on R^8 as (sorted ambient indices, coefficient).
#[derive(Clone, Debug)]
pub struct CayleyForm {
    terms: Vec<([usize; 4], i64)>,
}

static CAYLEY: LazyLock<CayleyForm> = LazyLock::new(CayleyForm::build);

impl CayleyForm {
    pub fn standard() -> &'static CayleyForm {
        &CAYLEY
    }

    fn build() -> CayleyForm {
        let omega = fundamental_form::<Rational64>();
        let star = hodge_star(&omega, &Metric::euclidean());
        let mut terms = Vec::with_capacity(14);
        for (mi, c) in omega.terms() {
            let idx: Vec<usize> = mi.zero_based().collect();
            // e₀∧e_abc reordered to e_abc∧e₀: three transpositions
            terms.push(([idx[0], idx[1], idx[2], NORMAL_AXIS], -c.to_integer()));
        }
        for (mi, c) in star.terms() {
            let idx: Vec<usize> = mi.zero_based().collect();
            terms.push(([idx[0], idx[1], idx[2], idx[3]], c.to_integer()));
        }
        terms.sort_by_key(|t| t.0);
        CayleyForm { terms }
    }

    pub fn terms(&self) -> &[([usize; 4], i64)] {
        &self.terms
    }

    /// `Φ₀(v₁, v₂, v₃, v₄)`.
    pub fn eval<S: Scalar>(&self, v: [&AmbientVec<S>; 4]) -> S {
        let mut acc = S::zero();
        for (idx, c) in &self.terms {
            let m: [[S; 4]; 4] = std::array::from_fn(|r| std::array::from_fn(|col| v[r][idx[col]].clone()));
            acc = acc + det4(&m) * S::from_i64(*c);
        }
        acc
    }
}

fn det4<S: Scalar>(m: &[[S; 4]; 4]) -> S {
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| {
        m[r0][c0].clone() * m[r1][c1].clone() - m[r0][c1].clone() * m[r1][c0].clone()
    };
    // Laplace expansion along the first two rows
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut acc = S::zero();
    for &(a, b) in &pairs {
        let rest: Vec<usize> = (0..4).filter(|c| *c != a && *c != b).collect();
        let term = minor(0, 1, a, b) * minor(2, 3, rest[0], rest[1]);
        if (a + b + 1) % 2 == 0 {
            acc = acc + term;
        } else {
            acc = acc - term;
        }
    }
    acc
}

#[derive(Clone, Debug)]
pub enum ImmersionKind {
    /// `y8 = 0`.
    Hyperplane,
    /// Upper hemisphere `y8 = sqrt(r² − |x|²)` of radius `r`.
    Sphere { radius: f64 },
    /// Catenoid of neck `a` in the `(y1, y2, y8)` space times R⁵.
    CatenoidProduct { neck: f64 },
    /// Graph `y8 = h(x)` of a parsed expression.
    Graph { height: Arc<Expr> },
}

/// A map from a chart of R^7 into R^8, evaluated on any real scalar.
#[derive(Clone, Debug)]
pub struct Immersion {
    name: String,
    kind: ImmersionKind,
    chart: Chart,
}

/// Generic height function of the quartic graph example.
pub const DEFAULT_QUARTIC: &str =
    "0.3 x1^2 - 0.2 x2 x3 + 0.15 x4^2 x5 + 0.1 x1 x6 x7 - 0.05 x2^4 + 0.08 x3^2 x7^2 + 0.12 x5 x6";

impl Immersion {
    pub fn hyperplane(chart: Chart) -> Self {
        Immersion {
            name: "hyperplane".into(),
            kind: ImmersionKind::Hyperplane,
            chart,
        }
    }

    /// Graph chart over the cube of half-width `0.3 r`, well inside the ball.
    pub fn sphere(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Immersion(format!(
                "sphere radius must be positive, got {radius}"
            )));
        }
        Ok(Immersion {
            name: "sphere".into(),
            kind: ImmersionKind::Sphere { radius },
            chart: Chart::cube(0.3 * radius),
        })
    }

    pub fn catenoid_product(neck: f64) -> Result<Self> {
        if !(neck.is_finite() && neck > 0.0) {
            return Err(Error::Immersion(format!("catenoid neck must be positive, got {neck}")));
        }
        let mut chart = Chart::cube(1.0);
        chart.lo[0] = -0.6 * neck;
        chart.hi[0] = 0.6 * neck;
        chart.lo[1] = -1.2;
        chart.hi[1] = 1.2;
        Ok(Immersion {
            name: "catenoid".into(),
            kind: ImmersionKind::CatenoidProduct { neck },
            chart,
        })
    }

    pub fn graph(height: Expr, chart: Chart) -> Self {
        Immersion {
            name: "graph".into(),
            kind: ImmersionKind::Graph {
                height: Arc::new(height),
            },
            chart,
        }
    }

    pub fn quartic() -> Self {
        let h = Expr::parse(DEFAULT_QUARTIC).expect("static expression");
        Immersion {
            name: "quartic".into(),
            ..Immersion::graph(h, Chart::cube(0.5))
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &ImmersionKind {
        &self.kind
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// `F(x)` in ambient coordinates.
    pub fn map<S: RealScalar>(&self, x: &[S; DIM]) -> AmbientVec<S> {
        let mut y: AmbientVec<S> = std::array::from_fn(|a| if a < DIM { x[a].clone() } else { S::zero() });
        match &self.kind {
            ImmersionKind::Hyperplane => {}
            ImmersionKind::Sphere { radius } => {
                let r2 = S::from_f64(radius * radius);
                let sq = x.iter().fold(S::zero(), |acc, xi| acc + xi.clone() * xi.clone());
                y[NORMAL_AXIS] = (r2 - sq).sqrt();
            }
            ImmersionKind::CatenoidProduct { neck } => {
                let a = S::from_f64(*neck);
                let rho = a.clone() * (x[0].clone() / a).cosh();
                y[0] = rho.clone() * x[1].clone().cos();
                y[1] = rho * x[1].clone().sin();
                y[NORMAL_AXIS] = x[0].clone();
            }
            ImmersionKind::Graph { height } => {
                y[NORMAL_AXIS] = height.eval(x);
            }
        }
        y
    }
}

/// Unit normal from the columns `∂_iF`, oriented by `det(∂F, N) > 0`.
fn unit_normal<S: RealScalar>(jac: &[AmbientVec<S>; DIM]) -> Result<AmbientVec<S>> {
    let cofactor: AmbientVec<S> = std::array::from_fn(|a| {
        let mut m: Vec<Vec<S>> = (0..AMBIENT)
            .filter(|r| *r != a)
            .map(|r| (0..DIM).map(|i| jac[i][r].clone()).collect())
            .collect();
        let det = det_in_place(&mut m, DIM);
        if a % 2 == 1 {
            det
        } else {
            -det
        }
    });
    let len_sq = cofactor.iter().fold(S::zero(), |acc, c| acc + c.clone() * c.clone());
    let len_v = len_sq.to_f64();
    if !(len_v.is_finite() && len_v > 0.0) {
        return Err(Error::Immersion("differential has rank below 7".into()));
    }
    let inv = S::one() / len_sq.sqrt();
    Ok(cofactor.map(|c| c * inv.clone()))
}

fn pullback_metric<S: Scalar>(jac: &[AmbientVec<S>; DIM]) -> Mat7<S> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..AMBIENT).fold(S::zero(), |acc, a| acc + jac[i][a].clone() * jac[j][a].clone()))
    })
}

fn check_rank(g: &Mat7<f64>) -> Result<()> {
    let diag: f64 = (0..DIM).map(|i| g[i][i]).product();
    let det = linalg::determinant(g);
    if !det.is_finite() || !diag.is_finite() || diag <= 0.0 || det / diag < RANK_TOL {
        return Err(Error::Immersion(format!(
            "differential is rank deficient (Hadamard ratio {:.3e})",
            det / diag
        )));
    }
    Ok(())
}

/// `ω_ijk = Φ₀(N, ∂_iF, ∂_jF, ∂_kF)`.
fn induced_omega<S: Scalar>(normal: &AmbientVec<S>, jac: &[AmbientVec<S>; DIM]) -> Form<S> {
    let cayley = CayleyForm::standard();
    let mut omega = Form::zero(3);
    for &mi in MultiIndex::all_of_degree(3) {
        let idx: Vec<usize> = mi.zero_based().collect();
        let c = cayley.eval([normal, &jac[idx[0]], &jac[idx[1]], &jac[idx[2]]]);
        omega.add_term(mi, c);
    }
    omega
}

/// First and second fundamental data at a point.
#[derive(Clone, Debug, Serialize)]
pub struct ShapeData {
    pub point: Point,
    pub normal: [f64; AMBIENT],
    pub metric: Mat7<f64>,
    /// `⟨∂_j∂_kF, N⟩`
    pub second_form: Mat7<f64>,
    /// `S = −g⁻¹·second_form`, self-adjoint for `g`.
    pub shape: Mat7<f64>,
    pub trace: f64,
    /// `S − (trS/7)·Id`
    pub traceless: Mat7<f64>,
}

impl ShapeData {
    /// `tr(S²)`
    pub fn norm_sq(&self) -> f64 {
        trace_of_product(&self.shape, &self.shape)
    }

    pub fn traceless_norm_sq(&self) -> f64 {
        trace_of_product(&self.traceless, &self.traceless)
    }

    /// Scalar curvature from the Gauss equation in flat ambient space.
    pub fn gauss_scalar_curvature(&self) -> f64 {
        self.trace * self.trace - self.norm_sq()
    }

    /// Largest entry of `gS − (gS)ᵀ`.
    pub fn self_adjoint_defect(&self) -> f64 {
        let gs = linalg::mat_mul(&self.metric, &self.shape);
        linalg::max_abs_diff(&gs, &linalg::transpose(&gs))
    }
}

fn trace_of_product(a: &Mat7<f64>, b: &Mat7<f64>) -> f64 {
    (0..DIM).map(|i| (0..DIM).map(|j| a[i][j] * b[j][i]).sum::<f64>()).sum()
}

fn ensure_finite(values: impl IntoIterator<Item = f64>) -> Result<()> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(Error::Immersion("map is not defined at this point".into()))
    }
}

pub fn shape_data(imm: &Immersion, p: &Point) -> Result<ShapeData> {
    imm.chart.check(p)?;
    let y = imm.map(&Jet2::coordinates(p));
    let mut jac = [[0.0; AMBIENT]; DIM];
    let mut hess = [[[0.0; DIM]; DIM]; AMBIENT];
    for a in 0..AMBIENT {
        let g = y[a].gradient()?;
        hess[a] = y[a].hessian()?;
        for i in 0..DIM {
            jac[i][a] = g[i];
        }
    }
    ensure_finite(
        jac.iter()
            .flatten()
            .copied()
            .chain(hess.iter().flatten().flatten().copied()),
    )?;
    let metric = pullback_metric(&jac);
    check_rank(&metric)?;
    let normal = unit_normal(&jac)?;
    let second_form: Mat7<f64> =
        std::array::from_fn(|j| std::array::from_fn(|k| (0..AMBIENT).map(|a| hess[a][j][k] * normal[a]).sum()));
    let g_inv = linalg::inverse(&metric)?;
    let shape = linalg::mat_scale(&linalg::mat_mul(&g_inv, &second_form), &-1.0);
    let trace = (0..DIM).map(|i| shape[i][i]).sum::<f64>();
    let traceless =
        std::array::from_fn(|i| std::array::from_fn(|j| shape[i][j] - if i == j { trace / DIM as f64 } else { 0.0 }));
    Ok(ShapeData {
        point: *p,
        normal,
        metric,
        second_form,
        shape,
        trace,
        traceless,
    })
}

/// Induced 3-form with second-order jets in the chart coordinates.
pub fn induced_omega_jets(imm: &Immersion, p: &Point) -> Result<Form<Jet2>> {
    imm.chart.check(p)?;
    let x: [Dual<Jet2>; DIM] = std::array::from_fn(|i| Dual::variable(i, Jet2::variable(i, p[i])));
    let y = imm.map(&x);
    let jac: [AmbientVec<Jet2>; DIM] = std::array::from_fn(|i| std::array::from_fn(|a| y[a].grad[i]));
    ensure_finite(jac.iter().flatten().map(|j| j.value()))?;
    check_rank(&linalg::values(&pullback_metric(&jac)))?;
    let normal = unit_normal(&jac)?;
    Ok(induced_omega(&normal, &jac))
}

/// Pointwise induced structure, checked against the pullback metric.
pub fn induced_g2(imm: &Immersion, p: &Point) -> Result<G2PointStructure<f64>> {
    imm.chart.check(p)?;
    let x: [Dual<f64>; DIM] = std::array::from_fn(|i| Dual::variable(i, p[i]));
    let y = imm.map(&x);
    let jac: [AmbientVec<f64>; DIM] = std::array::from_fn(|i| std::array::from_fn(|a| y[a].grad[i]));
    ensure_finite(jac.iter().flatten().copied())?;
    let pulled = pullback_metric(&jac);
    check_rank(&pulled)?;
    let normal = unit_normal(&jac)?;
    let s = G2PointStructure::new(induced_omega(&normal, &jac))?;
    let err = linalg::max_abs_diff(s.metric().matrix(), &pulled);
    let size = pulled.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    if err > METRIC_CONSISTENCY_TOL * size {
        return Err(Error::Convention(format!(
            "metric of the induced form differs from the pullback metric by {err:.3e}"
        )));
    }
    Ok(s)
}

/// The induced structure as a field over the immersion's chart.
#[derive(Clone, Debug)]
pub struct InducedStructure {
    imm: Immersion,
}

impl InducedStructure {
    pub fn new(imm: Immersion) -> Self {
        InducedStructure { imm }
    }

    pub fn immersion(&self) -> &Immersion {
        &self.imm
    }
}

impl StructureField for InducedStructure {
    fn name(&self) -> String {
        self.imm.name.clone()
    }

    fn chart(&self) -> &Chart {
        &self.imm.chart
    }

    fn omega_at(&self, p: &Point) -> Result<Form<Jet2>> {
        induced_omega_jets(&self.imm, p)
    }
}

/// How `‖H‖²` is read in the mean-curvature term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanCurvatureConvention {
    /// `(trS)²`
    Trace,
    /// `(trS/7)²`
    Averaged,
    /// Euclidean length² of the vector `(trS/7)·N` in R^8.
    Vector,
    /// `μ²` with `μ = (dω, *ω)/7`, the mean curvature as seen by the torsion.
    OmegaEigenvalue,
}

/// How `‖S₀‖²` is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TracelessConvention {
    /// `tr(S₀²)`
    Matrix,
    /// Full norm of `Σ h_ab e_a ∧ (e_b ⌟ ω)` for `h = gS₀` in the adapted frame.
    WedgeImage,
    /// Full norm of the Λ³₂₇ part of the torsion.
    TorsionComponent,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeanCurvatureFit {
    pub convention: MeanCurvatureConvention,
    pub h_norm_sq: f64,
    /// Coefficient `a` with `Scal = a‖H‖² − ‖S₀‖²_matrix`; `None` when `H = 0`.
    pub fitted_coefficient: Option<f64>,
    /// `(49/18)‖H‖² − (1/12)‖S₀‖²` reading `‖S₀‖²` as the Λ³₂₇ torsion norm.
    pub stated_rhs: f64,
    pub stated_residual: f64,
    /// Same, reading `‖S₀‖²` as the full torsion norm.
    pub stated_rhs_full_torsion: f64,
    pub stated_residual_full_torsion: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TracelessFit {
    pub convention: TracelessConvention,
    pub s0_norm_sq: f64,
    /// `c` with `tr(S₀²) = c·‖S₀‖²`; `None` when `S₀ = 0`.
    pub fitted_constant: Option<f64>,
}

/// Scalar curvature of a hypersurface against the mean-curvature formula.
#[derive(Clone, Debug, Serialize)]
pub struct SurReport {
    pub point: Point,
    pub classification: String,
    pub trace: f64,
    pub shape_norm_sq: f64,
    pub scal_gauss: f64,
    pub scal_lc: f64,
    /// `(dω, *ω)/7`, the constant `μ` in `dω = μ*ω` when nearly parallel.
    pub omega_eigenvalue: f64,
    pub torsion_norm_full: f64,
    pub minimal: bool,
    pub mean_curvature_fits: Vec<MeanCurvatureFit>,
    pub traceless_fits: Vec<TracelessFit>,
    /// `gauss-vs-lc` and `sur-torsion-reading` always; `min1` and
    /// `min1-sign` on minimal examples.
    pub checks: Vec<IdentityCheck>,
}

impl SurReport {
    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `|trS|` below this (relative to `1 + ‖S‖`) counts as minimal.
const MINIMAL_TOL: f64 = 1e-9;

fn wedge_image(h: &Mat7<f64>) -> Result<Form<f64>> {
    let omega = fundamental_form::<f64>();
    let mut out = Form::zero(3);
    for a in 0..DIM {
        for b in 0..DIM {
            if h[a][b] == 0.0 {
                continue;
            }
            let term = wedge(
                &Form::monomial(MultiIndex::axis(a), h[a][b]),
                &interior_axis(b, &omega)?,
            )?;
            out = out + term;
        }
    }
    Ok(out)
}

pub fn verify_sur(imm: &Immersion, p: &Point) -> Result<SurReport> {
    let shape = shape_data(imm, p)?;
    let field = InducedStructure::new(imm.clone());
    let pi = structure_invariant_fields(&field, p)?;
    let sv = pi.structure_values();
    let mv = sv.metric().clone();
    let inv = pi.invariant_values();
    let class = classify(&sv, &pi.diffs.values(), DEFAULT_CLASSIFY_TOL)?;
    let scal_lc = scalar_curvature_lc(pi.structure.metric())?;
    let scal_gauss = shape.gauss_scalar_curvature();
    let t2 = norm_sq_full(&inv.torsion, &mv);

    let trace = shape.trace;
    let s0_matrix = shape.traceless_norm_sq();
    let (_, _, t27) = project3(&inv.torsion, &sv)?;
    let h_frame = {
        let h = linalg::mat_scale(&linalg::mat_mul(&shape.metric, &shape.traceless), &-1.0);
        let f = sv.frame();
        linalg::mat_mul(&linalg::transpose(f), &linalg::mat_mul(&h, f))
    };
    let s0_wedge = norm_sq_full(&wedge_image(&h_frame)?, &Metric::euclidean());
    let s0_torsion = norm_sq_full(&t27, &mv);
    let tiny = 1e-12 * (1.0 + scal_gauss.abs());
    let traceless_fits = [
        (TracelessConvention::Matrix, s0_matrix),
        (TracelessConvention::WedgeImage, s0_wedge),
        (TracelessConvention::TorsionComponent, s0_torsion),
    ]
    .into_iter()
    .map(|(convention, s0_norm_sq)| TracelessFit {
        convention,
        s0_norm_sq,
        fitted_constant: (s0_norm_sq > tiny).then(|| s0_matrix / s0_norm_sq),
    })
    .collect();

    let mu = inv.w1_pairing / DIM as f64;
    let averaged = (trace / DIM as f64).powi(2);
    let vector_len_sq: f64 = shape.normal.iter().map(|n| (trace / DIM as f64 * n).powi(2)).sum();
    let mean_curvature_fits = [
        (MeanCurvatureConvention::Trace, trace * trace),
        (MeanCurvatureConvention::Averaged, averaged),
        (MeanCurvatureConvention::Vector, vector_len_sq),
        (MeanCurvatureConvention::OmegaEigenvalue, mu * mu),
    ]
    .into_iter()
    .map(|(convention, h_norm_sq)| {
        let stated_rhs = 49.0 / 18.0 * h_norm_sq - s0_torsion / 12.0;
        let stated_rhs_full_torsion = 49.0 / 18.0 * h_norm_sq - t2 / 12.0;
        MeanCurvatureFit {
            convention,
            h_norm_sq,
            fitted_coefficient: (h_norm_sq > tiny).then(|| (scal_gauss + s0_matrix) / h_norm_sq),
            stated_rhs,
            stated_residual: (scal_gauss - stated_rhs).abs(),
            stated_rhs_full_torsion,
            stated_residual_full_torsion: (scal_gauss - stated_rhs_full_torsion).abs(),
        }
    })
    .collect();

    let minimal = trace.abs() <= MINIMAL_TOL * (1.0 + shape.norm_sq().sqrt());
    let mut checks = vec![
        IdentityCheck::scalar("gauss-vs-lc", scal_lc, scal_gauss),
        IdentityCheck::scalar("sur-torsion-reading", scal_gauss, 49.0 / 18.0 * mu * mu - t2 / 12.0),
    ];
    if minimal {
        let star_d = sv.star(&exterior_derivative(pi.structure.omega())?.values());
        let rhs = -norm_sq_full(&star_d, &mv) / 12.0;
        checks.push(IdentityCheck::scalar("min1", scal_gauss, rhs));
        let excess = scal_gauss.max(0.0);
        checks.push(IdentityCheck::vector("min1-sign", scal_gauss, 0.0, excess));
    }

    Ok(SurReport {
        point: *p,
        classification: class.summary(),
        trace,
        shape_norm_sq: shape.norm_sq(),
        scal_gauss,
        scal_lc,
        omega_eigenvalue: mu,
        torsion_norm_full: t2,
        minimal,
        mean_curvature_fits,
        traceless_fits,
        checks,
    })
}

/// `metric_from_form` of the induced jets, for callers that only need `g`.
pub fn induced_metric(imm: &Immersion, p: &Point) -> Result<Metric<Jet2>> {
    metric_from_form(&induced_omega_jets(imm, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::verify_th2;
    use crate::sampling::sample_points;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol * (1.0 + b.abs()), "{a} vs {b}");
    }

    const SEED: u64 = 11;

    #[test]
    fn cayley_form_calibrates_the_hyperplane() {
        let cayley = CayleyForm::standard();
        assert_eq!(cayley.terms().len(), 14);
        assert!(cayley.terms().iter().all(|(_, c)| c.abs() == 1));
        let e = |k: usize| -> AmbientVec<Rational64> { std::array::from_fn(|a| Rational64::from(i64::from(a == k))) };
        let omega = fundamental_form::<Rational64>();
        for &mi in MultiIndex::all_of_degree(3) {
            let idx: Vec<usize> = mi.zero_based().collect();
            let v = cayley.eval([&e(NORMAL_AXIS), &e(idx[0]), &e(idx[1]), &e(idx[2])]);
            assert_eq!(v, omega.get(mi), "{mi}");
            let w = cayley.eval([&e(idx[0]), &e(NORMAL_AXIS), &e(idx[1]), &e(idx[2])]);
            assert_eq!(w, -omega.get(mi));
        }
    }

    #[test]
    fn hyperplane_is_flat_and_parallel() {
        let imm = Immersion::hyperplane(Chart::cube(1.0));
        let p = [0.1, -0.2, 0.3, 0.05, 0.0, -0.4, 0.2];
        let sd = shape_data(&imm, &p).unwrap();
        assert_eq!(sd.shape, [[0.0; DIM]; DIM]);
        assert_eq!(sd.normal[NORMAL_AXIS], 1.0);
        let s = induced_g2(&imm, &p).unwrap();
        assert_eq!(s.omega(), &fundamental_form::<f64>());
        let r = verify_sur(&imm, &p).unwrap();
        assert_eq!(r.classification, "parallel");
        assert_eq!(r.scal_gauss, 0.0);
        assert!(r.scal_lc.abs() < 1e-12);
    }

    #[test]
    fn unit_sphere_is_umbilic_and_nearly_parallel() {
        let imm = Immersion::sphere(1.0).unwrap();
        for p in sample_points(imm.chart(), 5, SEED) {
            let sd = shape_data(&imm, &p).unwrap();
            assert!(linalg::max_abs_diff(&sd.shape, &linalg::identity()) < 1e-12);
            assert!((sd.trace - 7.0).abs() < 1e-12);
            assert!((sd.gauss_scalar_curvature() - 42.0).abs() < 1e-12);
            let r = verify_sur(&imm, &p).unwrap();
            assert_eq!(r.classification, "W1, nearly-parallel");
            assert!((r.omega_eigenvalue - 4.0).abs() < 1e-9, "{}", r.omega_eigenvalue);
            assert!(r.check("gauss-vs-lc").unwrap().passes(1e-6), "{r:?}");
            assert!(r.check("min1").is_none());
        }
    }

    #[test]
    fn sphere_scalar_curvature_scales_with_radius() {
        let imm = Immersion::sphere(2.0).unwrap();
        let p = sample_points(imm.chart(), 1, SEED)[0];
        let r = verify_sur(&imm, &p).unwrap();
        assert_close(r.scal_gauss, 42.0 / 4.0, 1e-12);
        assert_close(r.scal_lc, 42.0 / 4.0, 1e-6);
    }

    #[test]
    fn sphere_satisfies_the_scalar_curvature_formula() {
        let field = InducedStructure::new(Immersion::sphere(1.0).unwrap());
        let p = sample_points(field.chart(), 1, SEED)[0];
        let rep = verify_th2(&field, &p).unwrap();
        assert!((rep.scal_lc - 42.0).abs() < 1e-5, "{}", rep.scal_lc);
        assert!(rep.check("sc1").unwrap().passes(1e-6), "{rep:?}");
    }

    #[test]
    fn catenoid_product_is_minimal_pure_type() {
        let imm = Immersion::catenoid_product(1.0).unwrap();
        for p in sample_points(imm.chart(), 4, SEED) {
            let sd = shape_data(&imm, &p).unwrap();
            assert!(sd.trace.abs() < 1e-12, "trS {}", sd.trace);
            assert!(sd.self_adjoint_defect() < 1e-12);
            let r = verify_sur(&imm, &p).unwrap();
            assert!(r.minimal);
            assert!(r.classification.contains("pure-type-W3"), "{}", r.classification);
            assert!(r.scal_gauss < 0.0);
            assert!(r.check("min1").unwrap().passes(1e-6), "{r:?}");
            assert!(r.check("gauss-vs-lc").unwrap().passes(1e-6), "{r:?}");
        }
    }

    #[test]
    fn quartic_graph_is_cocalibrated() {
        let imm = Immersion::quartic();
        let p = sample_points(imm.chart(), 1, SEED)[0];
        let r = verify_sur(&imm, &p).unwrap();
        assert!(r.classification.contains("cocalibrated"), "{}", r.classification);
        assert!(r.classification.starts_with("W1+W3"), "{}", r.classification);
        assert!(r.check("gauss-vs-lc").unwrap().passes(1e-6), "{r:?}");
        assert!(r.check("sur-torsion-reading").unwrap().passes(1e-9), "{r:?}");
        let image = r
            .traceless_fits
            .iter()
            .find(|f| f.convention == TracelessConvention::WedgeImage)
            .unwrap();
        assert_close(image.fitted_constant.unwrap(), 1.0 / 12.0, 1e-9);
        let st = induced_g2(&imm, &p).unwrap();
        assert!(st.orientation() > 0);
    }

    #[test]
    fn rank_deficiency_and_domain_are_reported() {
        let outside = Immersion::sphere(1.0).unwrap();
        assert!(matches!(shape_data(&outside, &[0.5; DIM]), Err(Error::Domain(_))));
        let mut wide = Immersion::sphere(1.0).unwrap();
        wide.chart = Chart::cube(2.0);
        assert!(matches!(shape_data(&wide, &[0.9; DIM]), Err(Error::Immersion(_))));
        assert!(matches!(Immersion::sphere(-1.0), Err(Error::Immersion(_))));
    }
}
