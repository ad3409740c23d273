//! JSON report layout and the per-identity summary.

use std::collections::BTreeMap;

use g2kit::curvature::{CurvatureReport, IdentityCheck, KillingReport};
use g2kit::fields::Point;
use g2kit::g2point::FGClass;
use g2kit::hypersurface::SurReport;
use serde::Serialize;

use crate::config::Suite;

pub const SCHEMA: &str = "g2kit-report/1";

/// Conventions every number in a report depends on.
#[derive(Clone, Debug, Serialize)]
pub struct Conventions {
    pub star_orientation: &'static str,
    pub codifferential_sign: &'static str,
    pub norms: &'static str,
    pub spinor_sign: &'static str,
    pub torsion: &'static str,
    pub curvature_sign: &'static str,
    pub shape_operator: &'static str,
    pub residuals: &'static str,
}

pub const CONVENTIONS: Conventions = Conventions {
    star_orientation: "e1..e7 positively oriented; a ∧ *b = <a,b> vol_g with vol_g = sqrt(det g) e1234567",
    codifferential_sign: "δ = (-1)^k *d* on k-forms in dimension 7, the formal adjoint of d",
    norms: "pairing sums over increasing indices; curvature formulas use full sums, |a|²_full = k! pairing(a,a)",
    spinor_sign: "canonical spinor is the unit spinor with ω·Ψ₀ = -7Ψ₀, sign makes the first component of largest magnitude positive",
    torsion: "T = -*dω + (w1/6) ω + *(θ∧ω), w1 = (dω,*ω), θ = -(1/3) *(*dω∧ω)",
    curvature_sign: "R(X,Y) = [∇_X,∇_Y] - ∇_[X,Y], Scal = Σ R(e_i,e_j,e_j,e_i), unit S^7 has Scal 42",
    shape_operator: "S = -g⁻¹<∂²F, N>, so the unit sphere with outward normal has S = Id",
    residuals: "relative residual = |lhs - rhs| / (|lhs| + |rhs| + 1)",
};

#[derive(Clone, Debug, Serialize)]
pub struct KillingRecord {
    /// Spinor equation and the two conditions it implies on `w1` and `θ`.
    pub preconditions: Vec<IdentityCheck>,
    /// Present only when the preconditions hold.
    pub report: Option<KillingReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub point: Point,
    pub classification: FGClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointwise: Option<Vec<IdentityCheck>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature: Option<CurvatureReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tb: Option<Vec<IdentityCheck>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub killing: Option<KillingRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sur: Option<SurReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauss: Option<IdentityCheck>,
}

impl PointRecord {
    pub fn new(index: usize, point: Point, classification: FGClass) -> Self {
        PointRecord {
            index,
            point,
            classification,
            pointwise: None,
            curvature: None,
            tb: None,
            killing: None,
            sur: None,
            gauss: None,
        }
    }

    /// Every identity evaluated at this point, tagged with its suite.
    pub fn checks(&self) -> Vec<(Suite, &IdentityCheck)> {
        let mut out: Vec<(Suite, &IdentityCheck)> = Vec::new();
        fn add<'a>(out: &mut Vec<(Suite, &'a IdentityCheck)>, suite: Suite, checks: &'a [IdentityCheck]) {
            out.extend(checks.iter().map(|c| (suite, c)));
        }
        if let Some(c) = &self.pointwise {
            add(&mut out, Suite::Pointwise, c);
        }
        if let Some(r) = &self.curvature {
            add(&mut out, Suite::Th2, &r.checks);
        }
        if let Some(c) = &self.tb {
            add(&mut out, Suite::Tb, c);
        }
        if let Some(k) = &self.killing {
            add(&mut out, Suite::Th3, &k.preconditions);
            if let Some(r) = &k.report {
                add(&mut out, Suite::Th3, &r.checks);
            }
        }
        if let Some(s) = &self.sur {
            add(&mut out, Suite::Sur, &s.checks);
        }
        if let Some(g) = &self.gauss {
            add(&mut out, Suite::Gauss, std::slice::from_ref(g));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentitySummary {
    pub suite: Suite,
    pub name: String,
    pub max_relative: f64,
    pub max_residual: f64,
    /// Index of the point attaining `max_relative`.
    pub worst_point: usize,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub identities: Vec<IdentitySummary>,
    /// Distinct classification strings in order of first appearance.
    pub classifications: Vec<String>,
    pub pass: bool,
}

impl Summary {
    /// Maxima over `records`, which must already be sorted by point index.
    pub fn from_records(records: &[PointRecord], tol_for: impl Fn(Suite) -> f64) -> Summary {
        let mut identities: Vec<IdentitySummary> = Vec::new();
        let mut classifications: Vec<String> = Vec::new();
        for rec in records {
            let label = rec.classification.summary();
            if !classifications.contains(&label) {
                classifications.push(label);
            }
            for (suite, check) in rec.checks() {
                let entry = match identities.iter_mut().find(|s| s.suite == suite && s.name == check.name) {
                    Some(e) => e,
                    None => {
                        identities.push(IdentitySummary {
                            suite,
                            name: check.name.clone(),
                            max_relative: f64::NEG_INFINITY,
                            max_residual: f64::NEG_INFINITY,
                            worst_point: rec.index,
                            tol: tol_for(suite),
                            pass: true,
                        });
                        identities.last_mut().expect("just pushed")
                    }
                };
                // NaN never counts as a pass and always becomes the worst value
                if !entry.max_relative.is_nan() && (check.relative.is_nan() || check.relative > entry.max_relative) {
                    entry.max_relative = check.relative;
                    entry.worst_point = rec.index;
                }
                entry.max_residual = if check.residual.is_nan() {
                    f64::NAN
                } else {
                    entry.max_residual.max(check.residual)
                };
                entry.pass &= check.passes(entry.tol);
            }
        }
        let pass = identities.iter().all(|s| s.pass);
        Summary {
            identities,
            classifications,
            pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleEcho {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: &'static str,
    pub example: ExampleEcho,
    pub suites: Vec<Suite>,
    pub points: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dilation: Option<String>,
    pub tolerances: BTreeMap<Suite, f64>,
    pub conventions: Conventions,
    pub records: Vec<PointRecord>,
    pub summary: Summary,
}

impl Report {
    /// Pretty JSON followed by a newline.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports contain only serialisable data");
        text.push('\n');
        text
    }
}
