//! Levi-Civita and characteristic-connection curvature, spinor covariant
//! derivatives, and the pointwise curvature identities of integrable
//! G2-structures.
//!
//! Conventions: `∇_{∂_i} ∂_j = Γ^k_ij ∂_k`, `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_{[X,Y]}`,
//! `Scal = Σ R(e_i, e_j, e_j, e_i)`, and all norms in the curvature formulas
//! are full sums over index tuples.

use serde::Serialize;

use crate::alg7::{interior_axis, norm_sq_full, wedge, Form, Metric, MultiIndex};
use crate::cl7::{act, canonical_spinor_projector, Spinor};
use crate::error::{Error, Result};
use crate::fields::{
    codifferential_at, laplacian, structure_invariant_fields, MetricField, Point, PointInvariants, ScalarField,
    StructureField,
};
use crate::g2point::{classify, killing_residual, FGClass, G2PointStructure, DEFAULT_CLASSIFY_TOL};
use crate::jet::Jet2;
use crate::linalg::{self, Mat7};
use crate::scalar::{rel_residual, Scalar};
use crate::DIM;

/// Default relative tolerance for the field-level identities.
pub const FIELD_TOL: f64 = 1e-6;

type Rank3<T> = [[[T; DIM]; DIM]; DIM];

/// Christoffel symbols `gamma[k][i][j] = Γ^k_ij` carrying first-order jets.
#[derive(Clone, Debug)]
pub struct ConnectionCoeffs {
    gamma: Box<Rank3<Jet2>>,
}

impl ConnectionCoeffs {
    pub fn value(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[k][i][j].value()
    }

    /// `∂_m Γ^k_ij`.
    pub fn derivative(&self, m: usize, k: usize, i: usize, j: usize) -> Result<f64> {
        Ok(self.gamma[k][i][j].partial(m)?.value())
    }

    pub fn values(&self) -> Rank3<f64> {
        std::array::from_fn(|k| std::array::from_fn(|i| std::array::from_fn(|j| self.value(k, i, j))))
    }

    /// Adds `½ g^{kl} T_ijl`, giving the metric connection with torsion `T`.
    pub fn with_torsion(&self, t: &Form<Jet2>, metric: &Metric<Jet2>) -> ConnectionCoeffs {
        let inv = metric.inverse();
        let mut gamma = self.gamma.clone();
        let half = Jet2::from_ratio(1, 2);
        for i in 0..DIM {
            for j in 0..DIM {
                if i == j {
                    continue;
                }
                let lowered: [Jet2; DIM] = std::array::from_fn(|l| t.component(&[i, j, l]));
                for (k, row) in gamma.iter_mut().enumerate() {
                    let mut acc = Jet2::zero();
                    for (l, tl) in lowered.iter().enumerate() {
                        if !tl.is_zero() {
                            acc = acc + inv[k][l] * *tl;
                        }
                    }
                    row[i][j] = row[i][j] + half * acc;
                }
            }
        }
        ConnectionCoeffs { gamma }
    }

    /// `Scal = g^{jk} R^i_{ijk}` with
    /// `R^l_{ijk} = ∂_iΓ^l_jk − ∂_jΓ^l_ik + Γ^m_jk Γ^l_im − Γ^m_ik Γ^l_jm`.
    pub fn scalar_curvature(&self, metric: &Metric<Jet2>) -> Result<f64> {
        let g = self.values();
        let inv = linalg::values(metric.inverse());
        // contracted Ricci-type tensor Ric_jk = R^i_{ijk}
        let mut scal = 0.0;
        for j in 0..DIM {
            for k in 0..DIM {
                if inv[j][k] == 0.0 {
                    continue;
                }
                let mut ric = 0.0;
                for i in 0..DIM {
                    ric += self.derivative(i, i, j, k)? - self.derivative(j, i, i, k)?;
                    for m in 0..DIM {
                        ric += g[m][j][k] * g[i][i][m] - g[m][i][k] * g[i][j][m];
                    }
                }
                scal += inv[j][k] * ric;
            }
        }
        Ok(scal)
    }
}

/// Levi-Civita connection from the Koszul formula.
pub fn levi_civita(metric: &Metric<Jet2>) -> Result<ConnectionCoeffs> {
    let g = metric.matrix();
    let inv = metric.inverse();
    // dg[m][i][j] = ∂_m g_ij
    let mut dg: Rank3<Jet2> = std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| Jet2::zero())));
    for (m, dm) in dg.iter_mut().enumerate() {
        for i in 0..DIM {
            for j in 0..DIM {
                dm[i][j] = g[i][j].partial(m)?;
            }
        }
    }
    let half = Jet2::from_ratio(1, 2);
    let mut gamma: Box<Rank3<Jet2>> = Box::new(std::array::from_fn(|_| {
        std::array::from_fn(|_| std::array::from_fn(|_| Jet2::zero()))
    }));
    for i in 0..DIM {
        for j in i..DIM {
            // lowered symbols Γ_ijl
            let lowered: [Jet2; DIM] = std::array::from_fn(|l| half * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]));
            for k in 0..DIM {
                let mut acc = Jet2::zero();
                for l in 0..DIM {
                    acc = acc + inv[k][l] * lowered[l];
                }
                gamma[k][i][j] = acc;
                gamma[k][j][i] = acc;
            }
        }
    }
    Ok(ConnectionCoeffs { gamma })
}

/// Riemannian scalar curvature from second-order metric jets.
pub fn scalar_curvature_lc(metric: &Metric<Jet2>) -> Result<f64> {
    levi_civita(metric)?.scalar_curvature(metric)
}

/// Scalar curvature of `∇ = ∇^g + ½T`.
pub fn torsion_connection_scalar(metric: &Metric<Jet2>, t: &Form<Jet2>) -> Result<f64> {
    levi_civita(metric)?.with_torsion(t, metric).scalar_curvature(metric)
}

/// `σ^T = ½ Σ_i (e_i⌟T)∧(e_i⌟T)` over a g-orthonormal basis, evaluated in
/// coordinates as `½ g^{ij} (∂_i⌟T)∧(∂_j⌟T)`.
pub fn sigma_t<S: Scalar>(t: &Form<S>, metric: &Metric<S>) -> Result<Form<S>> {
    let contractions: Vec<Form<S>> = (0..DIM).map(|i| interior_axis(i, t)).collect::<Result<_>>()?;
    let inv = metric.inverse();
    let mut out = Form::zero(4);
    for i in 0..DIM {
        for j in 0..DIM {
            if inv[i][j].is_zero() {
                continue;
            }
            out = out + wedge(&contractions[i], &contractions[j])?.scale(&inv[i][j]);
        }
    }
    Ok(out.scale(&S::from_ratio(1, 2)))
}

/// One identity `lhs = rhs` evaluated at a point; for spinor or form
/// identities `lhs` and `rhs` are norms and `residual` is the norm of the
/// difference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub relative: f64,
}

impl IdentityCheck {
    pub fn scalar(name: &str, lhs: f64, rhs: f64) -> Self {
        IdentityCheck {
            name: name.into(),
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
            relative: rel_residual(lhs, rhs),
        }
    }

    pub fn vector(name: &str, lhs: f64, rhs: f64, residual: f64) -> Self {
        IdentityCheck {
            name: name.into(),
            lhs,
            rhs,
            residual,
            relative: residual / (lhs.abs() + rhs.abs() + 1.0),
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.relative <= tol
    }
}

fn spinor_check(name: &str, lhs: &Spinor<f64>, rhs: &Spinor<f64>) -> IdentityCheck {
    IdentityCheck::vector(name, lhs.norm(), rhs.norm(), lhs.sub(rhs).norm())
}

/// Spinorial data of the canonical spinor at a point.
#[derive(Clone, Debug)]
pub struct SpinorDerivatives {
    pub psi0: Spinor<f64>,
    /// `∇^g_{∂_j} Ψ₀`
    pub levi_civita: Vec<Spinor<f64>>,
    /// `−¼ (∂_j⌟T)·Ψ₀`
    pub expected: Vec<Spinor<f64>>,
    /// `∇_{∂_j} Ψ₀` for the characteristic connection
    pub characteristic: Vec<Spinor<f64>>,
    /// `D^g Ψ₀`
    pub dirac: Spinor<f64>,
    /// `−¾ T·Ψ₀`
    pub dirac_expected: Spinor<f64>,
}

/// Moving frame data: `E_a = Σ_i F[i][a] ∂_i` and the connection one-form
/// `conn[j][a][b] = g(∇_{∂_j} E_a, E_b)` for a given connection.
struct FrameConnection {
    frame: Mat7<f64>,
    conn: Rank3<f64>,
}

fn frame_connection(s: &G2PointStructure<Jet2>, gamma: &Rank3<f64>) -> Result<FrameConnection> {
    let f = s.frame();
    let fv = linalg::values(f);
    let g = linalg::values(s.metric().matrix());
    let mut conn = [[[0.0; DIM]; DIM]; DIM];
    for j in 0..DIM {
        for a in 0..DIM {
            // components of ∇_{∂_j} E_a
            let mut v = [0.0; DIM];
            for (k, vk) in v.iter_mut().enumerate() {
                *vk = f[k][a].partial(j)?.value();
                for i in 0..DIM {
                    *vk += fv[i][a] * gamma[k][j][i];
                }
            }
            for b in 0..DIM {
                let mut acc = 0.0;
                for k in 0..DIM {
                    for l in 0..DIM {
                        acc += v[k] * g[k][l] * fv[l][b];
                    }
                }
                conn[j][a][b] = acc;
            }
        }
    }
    Ok(FrameConnection { frame: fv, conn })
}

/// `∂_j ψ + ½ Σ_{a<b} conn[j][a][b] γ_a γ_b ψ` for a spinor field with jets.
fn spinor_derivative(fc: &FrameConnection, psi: &Spinor<Jet2>, j: usize) -> Result<Spinor<f64>> {
    let value = psi.values();
    let d = Spinor(
        psi.0
            .iter()
            .map(|c| c.partial(j).map(|x| x.value()))
            .collect::<Result<Vec<_>>>()?
            .try_into()
            .expect("eight components"),
    );
    let mut rot = Form::zero(2);
    for a in 0..DIM {
        for b in a + 1..DIM {
            rot.add_term(MultiIndex::from_mask((1 << a) | (1 << b)), 0.5 * fc.conn[j][a][b]);
        }
    }
    Ok(d.add(&act(&rot, &value)))
}

fn dirac_sum(fc: &FrameConnection, derivs: &[Spinor<f64>]) -> Spinor<f64> {
    let mut out = Spinor::zero();
    for a in 0..DIM {
        let mut along = Spinor::zero();
        for (j, dj) in derivs.iter().enumerate() {
            along = along.add(&dj.scale(&fc.frame[j][a]));
        }
        out = out.add(&act(&Form::basis(&[a + 1]).expect("axis"), &along));
    }
    out
}

fn canonical_spinor_field(s: &G2PointStructure<Jet2>) -> Result<Spinor<Jet2>> {
    canonical_spinor_projector(&s.to_frame(s.omega()))
}

/// Levi-Civita and characteristic covariant derivatives of `Ψ₀` along the
/// coordinate directions, and the Riemannian Dirac operator.
pub fn spinor_cov_deriv(pi: &PointInvariants) -> Result<SpinorDerivatives> {
    let s = &pi.structure;
    let sv = s.values();
    let lc = levi_civita(s.metric())?;
    let tc = lc.with_torsion(&pi.invariants.torsion, s.metric());
    let fc_lc = frame_connection(s, &lc.values())?;
    let fc_tc = frame_connection(s, &tc.values())?;
    let psi = canonical_spinor_field(s)?;
    let psi0 = psi.values();
    let t = pi.invariants.torsion.values();
    let mut levi = Vec::with_capacity(DIM);
    let mut expected = Vec::with_capacity(DIM);
    let mut charac = Vec::with_capacity(DIM);
    for j in 0..DIM {
        levi.push(spinor_derivative(&fc_lc, &psi, j)?);
        expected.push(sv.act(&interior_axis(j, &t)?, &psi0).scale(&-0.25));
        charac.push(spinor_derivative(&fc_tc, &psi, j)?);
    }
    let dirac = dirac_sum(&fc_lc, &levi);
    let dirac_expected = sv.act(&t, &psi0).scale(&-0.75);
    Ok(SpinorDerivatives {
        psi0,
        levi_civita: levi,
        expected,
        characteristic: charac,
        dirac,
        dirac_expected,
    })
}

/// Componentwise maximum of `∇ω` for the characteristic connection.
pub fn nabla_omega_max(pi: &PointInvariants) -> Result<f64> {
    let s = &pi.structure;
    let tc = levi_civita(s.metric())?.with_torsion(&pi.invariants.torsion, s.metric());
    let gamma = tc.values();
    let omega = s.omega();
    let w = |a: usize, b: usize, c: usize| omega.component(&[a, b, c]).value();
    let mut max: f64 = 0.0;
    for i in 0..DIM {
        for mi in MultiIndex::all_of_degree(3) {
            let idx: Vec<usize> = mi.zero_based().collect();
            let (a, b, c) = (idx[0], idx[1], idx[2]);
            let mut v = omega.get(*mi).partial(i)?.value();
            for m in 0..DIM {
                v -= gamma[m][i][a] * w(m, b, c) + gamma[m][i][b] * w(a, m, c) + gamma[m][i][c] * w(a, b, m);
            }
            max = max.max(v.abs());
        }
    }
    Ok(max)
}

/// Integrability identities for the parallel spinor, in order:
/// `(3dT − 2σ^T)·Ψ₀ + Scal·Ψ₀ = 0`, which only holds when `δT·Ψ₀ = 0`;
/// the general form `(3dT − 2σ^T + 2δT)·Ψ₀ + Scal·Ψ₀ = 0`;
/// and `D(T·Ψ₀) = (dT + δT − 2σ^T)·Ψ₀`.
pub fn verify_tb(pi: &PointInvariants) -> Result<[IdentityCheck; 3]> {
    let s = &pi.structure;
    let sv = s.values();
    let metric = s.metric();
    let t = &pi.invariants.torsion;
    let tv = t.values();
    let lc = levi_civita(metric)?;
    let tc = lc.with_torsion(t, metric);
    let scal = tc.scalar_curvature(metric)?;
    let psi = canonical_spinor_field(s)?;
    let psi0 = psi.values();
    let sigma = sigma_t(&tv, &metric.values())?;
    let lhs = sv.act(&(pi.d_torsion.scale(&3.0) - sigma.scale(&2.0)), &psi0);
    let first = spinor_check("tB-first", &lhs, &psi0.scale(&-scal));
    let delta_t = codifferential_at(t, metric)?.values();
    let lhs_general = lhs.add(&sv.act(&delta_t.scale(&2.0), &psi0));
    let general = spinor_check("tB-first-general", &lhs_general, &psi0.scale(&-scal));

    // D(T·Ψ₀) with the characteristic connection, differentiating T·Ψ₀ as a jet
    let t_psi = act(&s.to_frame(t), &psi);
    let fc = frame_connection(s, &tc.values())?;
    let mut derivs = Vec::with_capacity(DIM);
    for j in 0..DIM {
        derivs.push(spinor_derivative(&fc, &t_psi, j)?);
    }
    let dirac = dirac_sum(&fc, &derivs);
    let rhs = sv
        .act(&(pi.d_torsion.clone() - sigma.scale(&2.0)), &psi0)
        .add(&sv.act(&delta_t, &psi0));
    let second = spinor_check("tB-second", &dirac, &rhs);
    Ok([first, general, second])
}

/// Curvature scalars and identity checks at one point of an integrable
/// structure.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureReport {
    pub point: Point,
    pub classification: String,
    pub scal_lc: f64,
    pub scal_torsion: f64,
    pub torsion_norm_full: f64,
    pub theta_norm_full: f64,
    pub delta_theta: f64,
    pub w1_pairing: f64,
    pub rhs_sc1: f64,
    pub rhs_c5: f64,
    pub rhs_as: Option<f64>,
    pub rhs_pure_type: Option<f64>,
    pub checks: Vec<IdentityCheck>,
}

impl CurvatureReport {
    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Classification at a point of a structure field.
pub fn classify_at(s: &dyn StructureField, p: &Point, tol: f64) -> Result<FGClass> {
    let (st, diffs) = s.differentials_at(p)?;
    classify(&st.values(), &diffs.values(), tol)
}

/// Scalar curvature against the closed formula in `(dω, *ω)`, `θ`, `T`, `δθ`,
/// with the special cases for locally conformally parallel and pure-type
/// structures, the relation to the characteristic scalar curvature, the
/// spinor identities, and `∇ω = ∇Ψ₀ = 0`.
pub fn verify_th2(s: &dyn StructureField, p: &Point) -> Result<CurvatureReport> {
    let pi = structure_invariant_fields(s, p)?;
    let st = &pi.structure;
    let sv = st.values();
    let metric = st.metric();
    let mv = metric.values();
    let inv = pi.invariant_values();
    let class = classify(&sv, &pi.diffs.values(), DEFAULT_CLASSIFY_TOL)?;

    let scal_lc = scalar_curvature_lc(metric)?;
    let scal_torsion = torsion_connection_scalar(metric, &pi.invariants.torsion)?;
    let t2 = norm_sq_full(&inv.torsion, &mv);
    let th2 = norm_sq_full(&inv.lee, &mv);
    let w1 = inv.w1_pairing;
    let dth = pi.delta_lee;
    let rhs_sc1 = w1 * w1 / 18.0 + 2.0 * th2 - t2 / 12.0 + 3.0 * dth;
    let rhs_c5 = scal_torsion + 0.25 * t2;
    let rhs_as = class
        .is_locally_conformally_parallel()
        .then_some(15.0 / 8.0 * th2 + 3.0 * dth);
    let rhs_pure_type = class.is_pure_type_w3().then(|| {
        let star_d = sv.star(&pi.diffs.d_omega.values());
        -norm_sq_full(&star_d, &mv) / 12.0
    });

    let mut checks = vec![
        IdentityCheck::scalar("sc1", scal_lc, rhs_sc1),
        IdentityCheck::scalar("c5", scal_lc, rhs_c5),
    ];
    if let Some(r) = rhs_as {
        checks.push(IdentityCheck::scalar("as", scal_lc, r));
    }
    if let Some(r) = rhs_pure_type {
        checks.push(IdentityCheck::scalar("pure-type", scal_lc, r));
    }
    checks.extend(verify_tb(&pi)?);

    let sd = spinor_cov_deriv(&pi)?;
    let dir1 = (0..DIM)
        .map(|j| spinor_check("dir1", &sd.levi_civita[j], &sd.expected[j]))
        .fold(None::<IdentityCheck>, |acc, c| match acc {
            Some(a) if a.relative >= c.relative => Some(a),
            _ => Some(c),
        })
        .expect("seven directions");
    checks.push(dir1);
    checks.push(spinor_check("dirac", &sd.dirac, &sd.dirac_expected));
    let nabla_psi = sd.characteristic.iter().map(|x| x.norm()).fold(0.0, f64::max);
    checks.push(IdentityCheck::vector("nabla-psi", nabla_psi, 0.0, nabla_psi));
    let nabla_omega = nabla_omega_max(&pi)?;
    checks.push(IdentityCheck::vector("nabla-omega", nabla_omega, 0.0, nabla_omega));

    Ok(CurvatureReport {
        point: *p,
        classification: class.summary(),
        scal_lc,
        scal_torsion,
        torsion_norm_full: t2,
        theta_norm_full: th2,
        delta_theta: dth,
        w1_pairing: w1,
        rhs_sc1,
        rhs_c5,
        rhs_as,
        rhs_pure_type,
        checks,
    })
}

/// Killing spinor equations with dilation `Φ` and the resulting scalar
/// curvature formula.
#[derive(Clone, Debug, Serialize)]
pub struct KillingReport {
    pub point: Point,
    pub spinor_residual: f64,
    pub w1_pairing: f64,
    pub lee_condition: f64,
    pub dphi_norm: f64,
    pub scal_lc: f64,
    pub rhs_lsc: f64,
    pub rhs_sc1: f64,
    pub checks: Vec<IdentityCheck>,
}

impl KillingReport {
    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Residuals of `(dΦ − ½T)·Ψ₀ = 0` and of its two scalar/1-form conditions.
pub fn killing_data(pi: &PointInvariants, phi: &ScalarField) -> Result<(crate::g2point::KillingResidual, Form<f64>)> {
    let sv = pi.structure_values();
    let dphi = Form::one_form(&phi.jet(&pi.point)?.gradient()?);
    let psi0 = sv.canonical_spinor()?;
    Ok((killing_residual(&sv, &pi.invariant_values(), &dphi, &psi0)?, dphi))
}

/// Checks the Killing preconditions and compares the scalar curvature with
/// `8‖dΦ‖² − (1/12)‖T‖² − 6ΔΦ`.
pub fn verify_th3(s: &dyn StructureField, phi: &ScalarField, p: &Point, tol: f64) -> Result<KillingReport> {
    let pi = structure_invariant_fields(s, p)?;
    let (kr, dphi) = killing_data(&pi, phi)?;
    let mv = pi.structure.metric().values();
    let scale = dphi.max_magnitude() + pi.invariant_values().torsion.max_magnitude() + 1.0;
    let worst = kr.spinor_norm().max(kr.w1_pairing.abs()).max(kr.lee_condition_norm());
    if worst > tol * scale {
        return Err(Error::KillingViolation(format!(
            "spinor residual {:.3e}, (dω,*ω) = {:.3e}, |θ + 2dΦ| = {:.3e}",
            kr.spinor_norm(),
            kr.w1_pairing,
            kr.lee_condition_norm()
        )));
    }
    let inv = pi.invariant_values();
    let metric = pi.structure.metric().clone();
    let lap = laplacian(phi, &MetricField::new(move |_| Ok(metric.clone())), p)?;
    let scal_lc = scalar_curvature_lc(pi.structure.metric())?;
    let t2 = norm_sq_full(&inv.torsion, &mv);
    let dphi2 = norm_sq_full(&dphi, &mv);
    let rhs_lsc = 8.0 * dphi2 - t2 / 12.0 - 6.0 * lap;
    let th2 = norm_sq_full(&inv.lee, &mv);
    let rhs_sc1 = inv.w1_pairing.powi(2) / 18.0 + 2.0 * th2 - t2 / 12.0 + 3.0 * pi.delta_lee;
    Ok(KillingReport {
        point: *p,
        spinor_residual: kr.spinor_norm(),
        w1_pairing: kr.w1_pairing,
        lee_condition: kr.lee_condition_norm(),
        dphi_norm: dphi2.sqrt(),
        scal_lc,
        rhs_lsc,
        rhs_sc1,
        checks: vec![
            IdentityCheck::scalar("lsc", scal_lc, rhs_lsc),
            IdentityCheck::scalar("lsc-vs-sc1", rhs_lsc, rhs_sc1),
        ],
    })
}
