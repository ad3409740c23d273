//! Named example structures and their parameters.

use std::collections::BTreeMap;
use std::sync::Arc;

use g2kit::fields::{
    make_conformally_parallel, make_parallel, make_w2_contaminated, random_cubic, Chart, Expr, ScalarField,
    StructureField,
};
use g2kit::hypersurface::{Immersion, InducedStructure};

use crate::error::CliError;

/// One catalog entry: name, accepted parameters with defaults, and a summary.
pub struct Entry {
    pub name: &'static str,
    pub params: &'static [(&'static str, Option<&'static str>)],
    pub summary: &'static str,
}

pub const CATALOG: &[Entry] = &[
    Entry {
        name: "parallel",
        params: &[("half_width", Some("1"))],
        summary: "constant standard form on a cube",
    },
    Entry {
        name: "conformal",
        params: &[
            ("f", None),
            ("cubic_seed", Some("7")),
            ("scale", Some("0.1")),
            ("half_width", Some("1")),
        ],
        summary: "exp(3f) times the standard form; f defaults to a seeded random cubic",
    },
    Entry {
        name: "w2-contaminated",
        params: &[("half_width", Some("0.5"))],
        summary: "standard form plus (x1/2) e124, not integrable",
    },
    Entry {
        name: "hyperplane",
        params: &[("half_width", Some("1"))],
        summary: "flat hyperplane in R^8",
    },
    Entry {
        name: "sphere",
        params: &[("r", Some("1"))],
        summary: "round sphere of radius r as a graph",
    },
    Entry {
        name: "catenoid",
        params: &[("a", Some("1"))],
        summary: "catenoid of neck a times R^5, minimal",
    },
    Entry {
        name: "quartic",
        params: &[],
        summary: "graph of a fixed generic quartic",
    },
    Entry {
        name: "graph",
        params: &[("h", None), ("half_width", Some("0.5"))],
        summary: "graph of a custom height function h(x1..x7)",
    },
];

enum Source {
    Field(Arc<dyn StructureField>),
    Hypersurface(Immersion, Arc<dyn StructureField>),
}

/// A constructed example together with its resolved parameters.
pub struct Example {
    name: &'static str,
    params: BTreeMap<String, String>,
    source: Source,
    /// Conformal factor available to dilation expressions as `f`.
    conformal_factor: Option<Expr>,
}

impl std::fmt::Debug for Example {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Example")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish()
    }
}

fn number(params: &BTreeMap<String, String>, key: &str) -> Result<f64, CliError> {
    let text = &params[key];
    let x: f64 = text
        .parse()
        .map_err(|_| CliError::config(format!("parameter {key}={text:?} is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::config(format!("parameter {key} must be finite")));
    }
    Ok(x)
}

fn positive(params: &BTreeMap<String, String>, key: &str) -> Result<f64, CliError> {
    let x = number(params, key)?;
    if x <= 0.0 {
        return Err(CliError::config(format!("parameter {key} must be positive, got {x}")));
    }
    Ok(x)
}

fn expression(text: &str, key: &str) -> Result<Expr, CliError> {
    Expr::parse(text).map_err(|e| CliError::config(format!("parameter {key}: {e}")))
}

impl Example {
    /// Validates `name` and `given` against the catalog and builds the structure.
    pub fn build(name: &str, given: &BTreeMap<String, String>) -> Result<Example, CliError> {
        let entry = CATALOG.iter().find(|e| e.name == name).ok_or_else(|| {
            let known: Vec<&str> = CATALOG.iter().map(|e| e.name).collect();
            CliError::config(format!("unknown example {name:?} (known: {})", known.join(", ")))
        })?;
        if let Some(bad) = given.keys().find(|k| !entry.params.iter().any(|(p, _)| p == k)) {
            let accepted: Vec<&str> = entry.params.iter().map(|(p, _)| *p).collect();
            return Err(CliError::config(format!(
                "example {name} does not take parameter {bad:?} (accepted: {})",
                if accepted.is_empty() {
                    "none".to_string()
                } else {
                    accepted.join(", ")
                }
            )));
        }
        let mut params = BTreeMap::new();
        for (key, default) in entry.params {
            if let Some(v) = given.get(*key).cloned().or(default.map(str::to_string)) {
                params.insert(key.to_string(), v);
            }
        }

        let mut conformal_factor = None;
        let field = |s: Arc<dyn StructureField>| Source::Field(s);
        let hypersurface = |imm: Immersion| {
            let s: Arc<dyn StructureField> = Arc::new(InducedStructure::new(imm.clone()));
            Source::Hypersurface(imm, s)
        };
        let immersion_error = |e: g2kit::Error| CliError::config(format!("example {name}: {e}"));
        let source = match entry.name {
            "parallel" => field(Arc::new(make_parallel(Chart::cube(positive(&params, "half_width")?)))),
            "conformal" => {
                let chart = Chart::cube(positive(&params, "half_width")?);
                let f = match params.get("f").cloned() {
                    Some(text) => {
                        if given.contains_key("cubic_seed") || given.contains_key("scale") {
                            return Err(CliError::config(
                                "conformal: give either f or cubic_seed/scale, not both",
                            ));
                        }
                        params.remove("cubic_seed");
                        params.remove("scale");
                        expression(&text, "f")?
                    }
                    None => {
                        let seed: u64 = params["cubic_seed"]
                            .parse()
                            .map_err(|_| CliError::config("parameter cubic_seed must be a non-negative integer"))?;
                        random_cubic(seed, number(&params, "scale")?)
                    }
                };
                conformal_factor = Some(f.clone());
                field(Arc::new(make_conformally_parallel(ScalarField::new(f, chart))))
            }
            "w2-contaminated" => field(Arc::new(make_w2_contaminated(Chart::cube(positive(
                &params,
                "half_width",
            )?)))),
            "hyperplane" => hypersurface(Immersion::hyperplane(Chart::cube(positive(&params, "half_width")?))),
            "sphere" => hypersurface(Immersion::sphere(number(&params, "r")?).map_err(immersion_error)?),
            "catenoid" => hypersurface(Immersion::catenoid_product(number(&params, "a")?).map_err(immersion_error)?),
            "quartic" => hypersurface(Immersion::quartic()),
            "graph" => {
                let text = params
                    .get("h")
                    .ok_or_else(|| CliError::config("example graph needs a height function: --params h=EXPR"))?;
                let h = expression(text, "h")?;
                hypersurface(Immersion::graph(h, Chart::cube(positive(&params, "half_width")?)))
            }
            other => unreachable!("catalog entry {other} has no constructor"),
        };
        Ok(Example {
            name: entry.name,
            params,
            source,
            conformal_factor,
        })
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    /// Parameters after defaults were filled in, as echoed in reports.
    pub fn params(&self) -> &BTreeMap<String, String> {
        &self.params
    }

    pub fn structure(&self) -> &dyn StructureField {
        match &self.source {
            Source::Field(s) | Source::Hypersurface(_, s) => s.as_ref(),
        }
    }

    pub fn immersion(&self) -> Option<&Immersion> {
        match &self.source {
            Source::Hypersurface(imm, _) => Some(imm),
            Source::Field(_) => None,
        }
    }

    pub fn chart(&self) -> &Chart {
        self.structure().chart()
    }

    /// Parses a dilation `Φ`; the conformal example binds its factor to `f`.
    pub fn dilation(&self, text: &str) -> Result<ScalarField, CliError> {
        let bindings: Vec<(&str, &Expr)> = self.conformal_factor.iter().map(|f| ("f", f)).collect();
        let expr = Expr::parse_with(text, &bindings).map_err(|e| CliError::config(format!("dilation: {e}")))?;
        Ok(ScalarField::new(expr, *self.chart()))
    }
}
