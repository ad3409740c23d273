//! Pointwise G2-structure algebra: metric reconstruction, type decompositions,
//! Lee form, torsion, classification and the spinorial identities.

use serde::Serialize;

use crate::alg7::{change_frame, hodge_star, pairing, wedge, Form, Metric, MultiIndex};
use crate::cl7::{act, canonical_spinor, Spinor};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat7};
use crate::scalar::{RealScalar, Scalar};
use crate::DIM;

/// Default relative tolerance for classification flags.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

/// Below this total size of `dω` and `d*ω` every flag is reported off.
pub const CLASSIFY_ABS_FLOOR: f64 = 1e-12;

/// Relative tolerance for pointwise algebraic identities.
pub const POINTWISE_TOL: f64 = 1e-9;

/// Exterior derivatives of `ω` and `*ω` at a point, in coordinates.
#[derive(Clone, Debug)]
pub struct Differentials<S> {
    pub d_omega: Form<S>,
    pub d_star_omega: Form<S>,
}

impl<S: Scalar> Differentials<S> {
    pub fn zero() -> Self {
        Differentials {
            d_omega: Form::zero(4),
            d_star_omega: Form::zero(5),
        }
    }

    pub fn values(&self) -> Differentials<f64> {
        Differentials {
            d_omega: self.d_omega.values(),
            d_star_omega: self.d_star_omega.values(),
        }
    }
}

/// A G2 3-form at a point with its metric and adapted orthonormal frame.
#[derive(Clone, Debug)]
pub struct G2PointStructure<S> {
    omega: Form<S>,
    metric: Metric<S>,
    // columns are g-orthonormal vectors; F = g^{-1/2}
    frame: Mat7<S>,
    orientation: i8,
}

impl<S: RealScalar> G2PointStructure<S> {
    pub fn new(omega: Form<S>) -> Result<Self> {
        let metric = metric_from_form(&omega)?;
        let (_, frame) = linalg::sqrt_and_inv_sqrt(metric.matrix())?;
        let orientation = metric.orientation();
        Ok(G2PointStructure {
            omega,
            metric,
            frame,
            orientation,
        })
    }
}

impl<S: Scalar> G2PointStructure<S> {
    pub fn omega(&self) -> &Form<S> {
        &self.omega
    }

    pub fn metric(&self) -> &Metric<S> {
        &self.metric
    }

    pub fn frame(&self) -> &Mat7<S> {
        &self.frame
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn star(&self, a: &Form<S>) -> Form<S> {
        hodge_star(a, &self.metric)
    }

    pub fn star_omega(&self) -> Form<S> {
        self.star(&self.omega)
    }

    pub fn pairing(&self, a: &Form<S>, b: &Form<S>) -> Result<S> {
        pairing(a, b, &self.metric)
    }

    /// Components of a coordinate form in the adapted orthonormal coframe.
    pub fn to_frame(&self, a: &Form<S>) -> Form<S> {
        change_frame(a, &self.frame)
    }

    pub fn values(&self) -> G2PointStructure<f64> {
        G2PointStructure {
            omega: self.omega.values(),
            metric: self.metric.values(),
            frame: linalg::values(&self.frame),
            orientation: self.orientation,
        }
    }
}

impl G2PointStructure<f64> {
    /// The canonical spinor of `ω` written in the adapted frame.
    pub fn canonical_spinor(&self) -> Result<Spinor<f64>> {
        canonical_spinor(&self.to_frame(&self.omega))
    }

    /// Clifford action of a coordinate form, after moving it to the frame.
    pub fn act(&self, a: &Form<f64>, psi: &Spinor<f64>) -> Spinor<f64> {
        act(&self.to_frame(a), psi)
    }

    fn norm(&self, a: &Form<f64>) -> f64 {
        pairing(a, a, &self.metric).expect("same degree").max(0.0).sqrt()
    }
}

/// Metric determined by a G2 3-form: `g = c · B · det(B)^{-1/9}` where
/// `B_ij` is the volume coefficient of `(e_i⌟ω)∧(e_j⌟ω)∧ω` and `c` makes
/// the standard form give the identity.
pub fn metric_from_form<S: RealScalar>(omega: &Form<S>) -> Result<Metric<S>> {
    if omega.degree() != 3 {
        return Err(Error::Degree(format!(
            "expected a 3-form, got degree {}",
            omega.degree()
        )));
    }
    let contractions: Vec<Form<S>> = (0..DIM)
        .map(|i| crate::alg7::interior_axis(i, omega))
        .collect::<Result<_>>()?;
    let with_omega: Vec<Form<S>> = contractions.iter().map(|c| wedge(c, omega)).collect::<Result<_>>()?;
    let vol = MultiIndex::from_mask(0x7f);
    let mut b: Mat7<S> = linalg::identity();
    for i in 0..DIM {
        for j in i..DIM {
            let v = wedge(&contractions[i], &with_omega[j])?.get(vol);
            b[i][j] = v.clone();
            b[j][i] = v;
        }
    }
    let det_b = linalg::determinant(&b);
    if det_b.to_f64() <= 0.0 || !linalg::is_positive_definite(&linalg::values(&b)) {
        return Err(Error::NotG2Form(format!(
            "bilinear form B is not positive definite (det B = {:.3e})",
            det_b.to_f64()
        )));
    }
    // c = 6^{-2/9}
    let factor = det_b.powf(-1.0 / 9.0) * S::from_f64(6f64.powf(-2.0 / 9.0));
    Metric::new(linalg::mat_scale(&b, &factor), 1)
}

/// Splits a 2-form into its Λ²₇ and Λ²₁₄ parts.
pub fn project2<S: Scalar>(alpha: &Form<S>, s: &G2PointStructure<S>) -> Result<(Form<S>, Form<S>)> {
    let rotated = s.star(&wedge(alpha, &s.omega)?);
    let a7 = (alpha.clone() + rotated).scale(&S::from_ratio(1, 3));
    let a14 = alpha.clone() - a7.clone();
    Ok((a7, a14))
}

/// The 1-form `β` with `π₇(γ) = *(β∧ω)`.
pub fn lambda3_7_vector<S: Scalar>(gamma: &Form<S>, s: &G2PointStructure<S>) -> Result<Form<S>> {
    Ok(s.star(&wedge(gamma, &s.omega)?).scale(&S::from_ratio(-1, 4)))
}

/// Splits a 3-form into its Λ³₁, Λ³₇ and Λ³₂₇ parts.
pub fn project3<S: Scalar>(gamma: &Form<S>, s: &G2PointStructure<S>) -> Result<(Form<S>, Form<S>, Form<S>)> {
    let c = s.pairing(gamma, &s.omega)? * S::from_ratio(1, 7);
    let g1 = s.omega.scale(&c);
    let beta = lambda3_7_vector(gamma, s)?;
    let g7 = s.star(&wedge(&beta, &s.omega)?);
    let g27 = gamma.clone() - g1.clone() - g7.clone();
    Ok((g1, g7, g27))
}

/// Λ⁴₁ and Λ⁴₇ parts of a 4-form.
pub fn project4_1_7<S: Scalar>(phi: &Form<S>, s: &G2PointStructure<S>) -> Result<(Form<S>, Form<S>)> {
    let (g1, g7, _) = project3(&s.star(phi), s)?;
    Ok((s.star(&g1), s.star(&g7)))
}

fn scale_of(forms: &[&Form<f64>]) -> f64 {
    forms.iter().map(|f| f.max_magnitude()).fold(1.0, f64::max)
}

/// Lee form `θ = −(1/3) *(*dω ∧ ω)`, cross-checked against the expression
/// through the codifferential. With `δω = −*d*ω` that second expression reads
/// `θ = −(1/3) *(δω ∧ *ω)`.
pub fn lee_form<S: Scalar>(s: &G2PointStructure<S>, diffs: &Differentials<S>) -> Result<Form<S>> {
    let from_d = s
        .star(&wedge(&s.star(&diffs.d_omega), &s.omega)?)
        .scale(&S::from_ratio(-1, 3));
    let delta_omega = -s.star(&diffs.d_star_omega);
    let from_delta = s
        .star(&wedge(&delta_omega, &s.star_omega())?)
        .scale(&S::from_ratio(-1, 3));
    let (a, b) = (from_d.values(), from_delta.values());
    let scale = scale_of(&[&diffs.d_omega.values(), &diffs.d_star_omega.values()]);
    let diff = a.max_diff(&b);
    if diff > POINTWISE_TOL * scale {
        return Err(Error::Convention(format!(
            "Lee form expressions disagree by {diff:.3e}"
        )));
    }
    Ok(from_d)
}

/// `d*ω − θ∧*ω`, the obstruction to integrability.
pub fn w2_defect<S: Scalar>(s: &G2PointStructure<S>, diffs: &Differentials<S>, theta: &Form<S>) -> Result<Form<S>> {
    Ok(diffs.d_star_omega.clone() - wedge(theta, &s.star_omega())?)
}

/// Torsion of the characteristic connection,
/// `T = −*dω + (1/6)(dω, *ω) ω + *(θ∧ω)`.
pub fn torsion_form<S: Scalar>(s: &G2PointStructure<S>, diffs: &Differentials<S>, theta: &Form<S>) -> Result<Form<S>> {
    let defect = w2_defect(s, diffs, theta)?.values();
    let residual = s.values().norm(&defect);
    let scale = scale_of(&[&diffs.d_omega.values(), &diffs.d_star_omega.values()]);
    if residual > POINTWISE_TOL * scale {
        return Err(Error::NotIntegrable { w2_residual: residual });
    }
    let w1 = s.pairing(&diffs.d_omega, &s.star_omega())?;
    Ok(-s.star(&diffs.d_omega) + s.omega.scale(&(w1 * S::from_ratio(1, 6))) + s.star(&wedge(theta, &s.omega)?))
}

/// `(dω, *ω)`, its normalised version `λ`, the Lee form and the torsion.
#[derive(Clone, Debug)]
pub struct G2Invariants<S> {
    pub w1_pairing: S,
    pub lambda: S,
    pub lee: Form<S>,
    pub torsion: Form<S>,
}

impl<S: Scalar> G2Invariants<S> {
    pub fn compute(s: &G2PointStructure<S>, diffs: &Differentials<S>) -> Result<Self> {
        let lee = lee_form(s, diffs)?;
        let torsion = torsion_form(s, diffs, &lee)?;
        let w1_pairing = s.pairing(&diffs.d_omega, &s.star_omega())?;
        Ok(G2Invariants {
            lambda: w1_pairing.clone() * S::from_ratio(-1, 7),
            w1_pairing,
            lee,
            torsion,
        })
    }

    pub fn values(&self) -> G2Invariants<f64> {
        G2Invariants {
            w1_pairing: self.w1_pairing.to_f64(),
            lambda: self.lambda.to_f64(),
            lee: self.lee.values(),
            torsion: self.torsion.values(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassFlags {
    pub w1: bool,
    pub w2: bool,
    pub w3: bool,
    pub w4: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassResiduals {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
    /// `‖dω‖ + ‖d*ω‖`, the reference size for the relative test.
    pub scale: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassTolerances {
    pub relative: f64,
    pub absolute_floor: f64,
}

/// Which torsion components are present at a point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FGClass {
    pub flags: ClassFlags,
    pub labels: Vec<String>,
    pub residuals: ClassResiduals,
    pub tolerances: ClassTolerances,
}

impl FGClass {
    fn from_flags(flags: ClassFlags, residuals: ClassResiduals, tol: f64) -> Self {
        let ClassFlags { w1, w2, w3, w4 } = flags;
        let mut labels = Vec::new();
        let mut push = |cond: bool, name: &str| {
            if cond {
                labels.push(name.to_string());
            }
        };
        push(!(w1 || w2 || w3 || w4), "parallel");
        push(w1 && !(w2 || w3 || w4), "nearly-parallel");
        push(!w2, "integrable");
        push(!w2 && !w4, "cocalibrated");
        push(w3 && !(w1 || w2 || w4), "pure-type-W3");
        push(!w4, "balanced");
        push(w4 && !(w1 || w2 || w3), "locally-conformally-parallel");
        FGClass {
            flags,
            labels,
            residuals,
            tolerances: ClassTolerances {
                relative: tol,
                absolute_floor: CLASSIFY_ABS_FLOOR,
            },
        }
    }

    pub fn has_label(&self, name: &str) -> bool {
        self.labels.iter().any(|l| l == name)
    }

    pub fn is_parallel(&self) -> bool {
        self.has_label("parallel")
    }

    pub fn is_nearly_parallel(&self) -> bool {
        self.has_label("nearly-parallel")
    }

    pub fn is_integrable(&self) -> bool {
        !self.flags.w2
    }

    pub fn is_cocalibrated(&self) -> bool {
        self.has_label("cocalibrated")
    }

    pub fn is_pure_type_w3(&self) -> bool {
        self.has_label("pure-type-W3")
    }

    pub fn is_locally_conformally_parallel(&self) -> bool {
        self.has_label("locally-conformally-parallel")
    }

    /// Short description such as `"W4, locally-conformally-parallel"`.
    pub fn summary(&self) -> String {
        let f = self.flags;
        let present: Vec<&str> = [(f.w1, "W1"), (f.w2, "W2"), (f.w3, "W3"), (f.w4, "W4")]
            .into_iter()
            .filter_map(|(on, n)| on.then_some(n))
            .collect();
        if present.is_empty() {
            return "parallel".into();
        }
        let named = ["nearly-parallel", "pure-type-W3", "locally-conformally-parallel"]
            .into_iter()
            .chain(["cocalibrated", "integrable"])
            .find(|n| self.has_label(n));
        match named {
            Some(n) => format!("{}, {}", present.join("+"), n),
            None => present.join("+"),
        }
    }
}

/// Classification by the four torsion components, with flags relative to
/// `‖dω‖ + ‖d*ω‖`.
pub fn classify(s: &G2PointStructure<f64>, diffs: &Differentials<f64>, tol: f64) -> Result<FGClass> {
    let theta = lee_form(s, diffs)?;
    let star_omega = s.star_omega();
    let w1_pairing = s.pairing(&diffs.d_omega, &star_omega)?;
    // Λ⁴₁ part of dω has norm |w1| / √7
    let w1 = w1_pairing.abs() / 7f64.sqrt();
    let w4 = s.norm(&theta);
    let w2 = s.norm(&w2_defect(s, diffs, &theta)?);
    let corrected =
        s.star(&diffs.d_omega) - s.omega().scale(&(w1_pairing / 7.0)) - s.star(&wedge(&theta, s.omega())?).scale(&0.75);
    let (_, _, g27) = project3(&corrected, s)?;
    let w3 = s.norm(&g27);
    let scale = s.norm(&diffs.d_omega) + s.norm(&diffs.d_star_omega);
    let threshold = (tol * scale).max(CLASSIFY_ABS_FLOOR);
    let on = |x: f64| scale > CLASSIFY_ABS_FLOOR && x > threshold;
    let flags = ClassFlags {
        w1: on(w1),
        w2: on(w2),
        w3: on(w3),
        w4: on(w4),
    };
    Ok(FGClass::from_flags(
        flags,
        ClassResiduals { w1, w2, w3, w4, scale },
        tol,
    ))
}

/// `ω̄ = e^{3f} ω`, `ḡ = e^{2f} g`, with the derivatives
/// `dω̄ = e^{3f}(3 df∧ω + dω)` and `d*̄ω̄ = e^{4f}(4 df∧*ω + d*ω)`.
pub fn conformal_transform<S: RealScalar>(
    s: &G2PointStructure<S>,
    diffs: &Differentials<S>,
    f: &S,
    df: &Form<S>,
) -> Result<(G2PointStructure<S>, Differentials<S>)> {
    let e3 = (f.clone() * S::from_i64(3)).exp();
    let e4 = (f.clone() * S::from_i64(4)).exp();
    let omega = s.omega().scale(&e3);
    let d_omega = (wedge(df, s.omega())?.scale(&S::from_i64(3)) + diffs.d_omega.clone()).scale(&e3);
    let d_star_omega = (wedge(df, &s.star_omega())?.scale(&S::from_i64(4)) + diffs.d_star_omega.clone()).scale(&e4);
    Ok((G2PointStructure::new(omega)?, Differentials { d_omega, d_star_omega }))
}

/// Torsion of a conformally changed structure, recomputed directly and
/// compared with `e^{kf}(T + *(df∧ω))` for `k = 2` and `k = 4`.
#[derive(Clone, Debug, Serialize)]
pub struct ConformalTorsionCheck {
    pub residual_weight2: f64,
    pub residual_weight4: f64,
}

pub fn conformal_torsion_check(
    s: &G2PointStructure<f64>,
    diffs: &Differentials<f64>,
    f: f64,
    df: &Form<f64>,
) -> Result<ConformalTorsionCheck> {
    let base = G2Invariants::compute(s, diffs)?;
    let (sb, db) = conformal_transform(s, diffs, &f, df)?;
    let recomputed = G2Invariants::compute(&sb, &db)?.torsion;
    let candidate = base.torsion.clone() + s.star(&wedge(df, s.omega())?);
    let res = |k: f64| recomputed.max_diff(&candidate.scale(&(k * f).exp()));
    Ok(ConformalTorsionCheck {
        residual_weight2: res(2.0),
        residual_weight4: res(4.0),
    })
}

fn spinor_scale(psi: &[&Spinor<f64>]) -> f64 {
    psi.iter().map(|p| p.norm()).fold(1.0, f64::max)
}

/// `T·Ψ₀`, checked against `(7/6)λ Ψ₀ − θ·Ψ₀`.
pub fn torsion_clifford_action(
    s: &G2PointStructure<f64>,
    inv: &G2Invariants<f64>,
    psi0: &Spinor<f64>,
) -> Result<Spinor<f64>> {
    let lhs = s.act(&inv.torsion, psi0);
    let rhs = psi0.scale(&(7.0 / 6.0 * inv.lambda)).sub(&s.act(&inv.lee, psi0));
    let residual = lhs.sub(&rhs).norm();
    if residual > POINTWISE_TOL * spinor_scale(&[&lhs, &rhs]) {
        return Err(Error::IdentityViolation {
            name: "torsion Clifford action".into(),
            residual,
        });
    }
    Ok(lhs)
}

/// Residuals of the Killing spinor equation `(dΦ − T/2)·Ψ₀ = 0`.
#[derive(Clone, Debug)]
pub struct KillingResidual {
    pub spinor: Spinor<f64>,
    pub w1_pairing: f64,
    pub lee_condition: Form<f64>,
}

impl KillingResidual {
    pub fn spinor_norm(&self) -> f64 {
        self.spinor.norm()
    }

    pub fn lee_condition_norm(&self) -> f64 {
        self.lee_condition.max_magnitude()
    }
}

pub fn killing_residual(
    s: &G2PointStructure<f64>,
    inv: &G2Invariants<f64>,
    dphi: &Form<f64>,
    psi0: &Spinor<f64>,
) -> Result<KillingResidual> {
    let spinor = s.act(dphi, psi0).sub(&s.act(&inv.torsion.scale(&0.5), psi0));
    Ok(KillingResidual {
        spinor,
        w1_pairing: inv.w1_pairing,
        lee_condition: inv.lee.clone() + dphi.scale(&2.0),
    })
}
