//! The three commands: classification, identity suites, curvature dumps.

use std::collections::BTreeMap;

use g2kit::alg7::{wedge, Form, MultiIndex};
use g2kit::curvature::{classify_at, killing_data, verify_tb, verify_th2, verify_th3, IdentityCheck};
use g2kit::fields::{structure_invariant_fields, Chart, Point, ScalarField};
use g2kit::g2point::{project2, project3, G2PointStructure, DEFAULT_CLASSIFY_TOL};
use g2kit::hypersurface::{shape_data, verify_sur};
use g2kit::sampling::sample_points;
use rayon::prelude::*;

use crate::config::{RunConfig, Suite};
use crate::error::CliError;
use crate::report::{ExampleEcho, KillingRecord, PointRecord, Report, Summary, CONVENTIONS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Classify,
    Verify,
    Curvature,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Verify => "verify",
            Command::Curvature => "curvature",
        }
    }

    /// Suites that contribute to the summary of this command.
    fn suites(self, cfg: &RunConfig) -> Vec<Suite> {
        match self {
            Command::Classify => Vec::new(),
            Command::Verify => cfg.suites.clone(),
            Command::Curvature if cfg.example.immersion().is_some() => vec![Suite::Th2, Suite::Gauss],
            Command::Curvature => vec![Suite::Th2],
        }
    }
}

/// Inputs shared by every point, checked before any computation starts.
struct Plan<'a> {
    cfg: &'a RunConfig,
    suites: Vec<Suite>,
    dilation: Option<ScalarField>,
}

impl<'a> Plan<'a> {
    fn new(command: Command, cfg: &'a RunConfig) -> Result<Self, CliError> {
        let suites = command.suites(cfg);
        if suites.contains(&Suite::Sur) && cfg.example.immersion().is_none() {
            return Err(CliError::config(format!(
                "suite sur needs a hypersurface example, {} is not one",
                cfg.example.name()
            )));
        }
        let dilation = if suites.contains(&Suite::Th3) {
            Some(cfg.example.dilation(cfg.dilation.as_deref().unwrap_or("0"))?)
        } else {
            None
        };
        Ok(Plan { cfg, suites, dilation })
    }

    fn record(&self, index: usize, p: &Point) -> g2kit::Result<PointRecord> {
        let structure = self.cfg.example.structure();
        let classification = classify_at(structure, p, DEFAULT_CLASSIFY_TOL)?;
        let mut rec = PointRecord::new(index, *p, classification);
        for suite in &self.suites {
            match suite {
                Suite::Pointwise => {
                    let s = structure.structure_at(p)?.values();
                    rec.pointwise = Some(pointwise_checks(&s, self.cfg.seed, index)?);
                }
                Suite::Th2 => rec.curvature = Some(verify_th2(structure, p)?),
                Suite::Tb => {
                    rec.tb = Some(verify_tb(&structure_invariant_fields(structure, p)?)?.to_vec());
                }
                Suite::Th3 => {
                    let phi = self.dilation.as_ref().expect("planned with th3");
                    rec.killing = Some(killing_record(self, phi, p)?);
                }
                Suite::Sur => {
                    let imm = self.cfg.example.immersion().expect("planned with sur");
                    rec.sur = Some(verify_sur(imm, p)?);
                }
                Suite::Gauss => {
                    let imm = self.cfg.example.immersion().expect("planned with gauss");
                    let scal_lc = match &rec.curvature {
                        Some(c) => c.scal_lc,
                        None => verify_th2(structure, p)?.scal_lc,
                    };
                    let gauss = shape_data(imm, p)?.gauss_scalar_curvature();
                    rec.gauss = Some(IdentityCheck::scalar("gauss-vs-lc", scal_lc, gauss));
                }
            }
        }
        Ok(rec)
    }
}

fn killing_record(plan: &Plan<'_>, phi: &ScalarField, p: &Point) -> g2kit::Result<KillingRecord> {
    let structure = plan.cfg.example.structure();
    let pi = structure_invariant_fields(structure, p)?;
    let (kr, dphi) = killing_data(&pi, phi)?;
    let sv = pi.structure_values();
    let inv = pi.invariant_values();
    let psi0 = sv.canonical_spinor()?;
    let preconditions = vec![
        IdentityCheck::vector(
            "killing-spinor",
            sv.act(&dphi, &psi0).norm(),
            sv.act(&inv.torsion.scale(&0.5), &psi0).norm(),
            kr.spinor_norm(),
        ),
        IdentityCheck::scalar("killing-w1", kr.w1_pairing, 0.0),
        IdentityCheck::vector(
            "killing-lee",
            inv.lee.max_magnitude(),
            dphi.scale(&2.0).max_magnitude(),
            kr.lee_condition_norm(),
        ),
    ];
    let tol = plan.cfg.tol_for(Suite::Th3);
    let report = if preconditions.iter().all(|c| c.passes(tol)) {
        // the preconditions were checked above, so the internal gate is disabled
        Some(verify_th3(structure, phi, p, f64::INFINITY)?)
    } else {
        None
    };
    Ok(KillingRecord { preconditions, report })
}

/// Deterministic test forms for a point: a 1-form `γ` and a 2-form `α`.
fn probe_forms(seed: u64, index: usize) -> (Form<f64>, Form<f64>) {
    let coords: Vec<f64> = sample_points(
        &Chart::cube(1.0),
        4,
        seed.wrapping_add(index as u64).wrapping_mul(0x9e37_79b9),
    )
    .into_iter()
    .flatten()
    .collect();
    let gamma = Form::one_form(&std::array::from_fn(|i| coords[i]));
    let alpha = Form::from_dense(2, &coords[7..28]);
    (gamma, alpha)
}

fn form_check(name: &str, lhs: &Form<f64>, rhs: &Form<f64>) -> IdentityCheck {
    IdentityCheck::vector(name, lhs.max_magnitude(), rhs.max_magnitude(), lhs.max_diff(rhs))
}

/// Algebraic identities of the G2 structure at one point.
fn pointwise_checks(s: &G2PointStructure<f64>, seed: u64, index: usize) -> g2kit::Result<Vec<IdentityCheck>> {
    let omega = s.omega();
    let vol = Form::volume().scale(&(7.0 * s.metric().sqrt_det()));
    let mut checks = vec![form_check("omega-volume", &wedge(omega, &s.star_omega())?, &vol)];

    let (gamma, alpha) = probe_forms(seed, index);
    let contraction = wedge(&s.star(&wedge(omega, &gamma)?), omega)?;
    checks.push(form_check("contraction", &contraction, &s.star(&gamma).scale(&4.0)));

    let mut traces = [0.0; 5];
    for &mi in MultiIndex::all_of_degree(2) {
        let (a7, a14) = project2(&Form::monomial(mi, 1.0), s)?;
        traces[0] += a7.get(mi);
        traces[1] += a14.get(mi);
    }
    for &mi in MultiIndex::all_of_degree(3) {
        let (c1, c7, c27) = project3(&Form::monomial(mi, 1.0), s)?;
        traces[2] += c1.get(mi);
        traces[3] += c7.get(mi);
        traces[4] += c27.get(mi);
    }
    let trace_err = traces
        .iter()
        .zip([7.0, 14.0, 1.0, 7.0, 27.0])
        .fold(0.0f64, |m, (t, want)| m.max((t - want).abs()));
    checks.push(IdentityCheck::vector("projector-traces", trace_err, 0.0, trace_err));

    let psi = s.canonical_spinor()?;
    let eig = s.act(omega, &psi);
    let target = psi.scale(&-7.0);
    checks.push(IdentityCheck::vector(
        "omega-eigenvalue",
        eig.norm(),
        target.norm(),
        eig.sub(&target).norm(),
    ));

    let lhs = s.act(&s.star(&wedge(&gamma, omega)?), &psi);
    let rhs = s.act(&gamma, &psi).scale(&-4.0);
    checks.push(IdentityCheck::vector(
        "lambda3-7-action",
        lhs.norm(),
        rhs.norm(),
        lhs.sub(&rhs).norm(),
    ));

    let (_, a14) = project2(&alpha, s)?;
    let killed = s.act(&a14, &psi).norm();
    checks.push(IdentityCheck::vector("lambda2-14-annihilates", killed, 0.0, killed));
    Ok(checks)
}

/// Evaluates every point in parallel and merges the records by index.
pub fn run(command: Command, cfg: &RunConfig) -> Result<Report, CliError> {
    let plan = Plan::new(command, cfg)?;
    let points = sample_points(cfg.example.chart(), cfg.points, cfg.seed);
    let results: Vec<g2kit::Result<PointRecord>> =
        points.par_iter().enumerate().map(|(i, p)| plan.record(i, p)).collect();
    let mut records = Vec::with_capacity(results.len());
    for (index, r) in results.into_iter().enumerate() {
        records.push(r.map_err(|source| CliError::Computation { index, source })?);
    }
    records.sort_by_key(|r| r.index);

    let summary = Summary::from_records(&records, |s| cfg.tol_for(s));
    let tolerances: BTreeMap<Suite, f64> = plan.suites.iter().map(|&s| (s, cfg.tol_for(s))).collect();
    Ok(Report {
        schema: crate::report::SCHEMA,
        command: command.name(),
        example: ExampleEcho {
            name: cfg.example.name().to_string(),
            params: cfg.example.params().clone(),
        },
        suites: plan.suites.clone(),
        points: cfg.points,
        seed: cfg.seed,
        dilation: plan.dilation.as_ref().map(|d| d.expr().to_string()),
        tolerances,
        conventions: CONVENTIONS,
        records,
        summary,
    })
}
