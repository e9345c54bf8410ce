//! Batch commands and the combined report.
//!
//! `report` runs build → envelope → classification → ergodicity → measures
//! → Fourier (and the modulus diagnostic for system specs), then checks
//! that three views of structuredness agree: the pseudoisometry certificate,
//! the envelope being a groupoid, and completeness of the invariant
//! submodules.

use num::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::action::{ergodicity_of_maps, ergodicity_report, validate_action, FiberedFunction, FiberedSpace, GroupoidAction};
use crate::discretize::SystemSpec;
use crate::envelope::{close, pseudoisometry_certificate, transition_maps, CloseOptions, Envelope, FiberMap};
use crate::error::{Error, Result};
use crate::fourier::{decompose_report, invariant_sections, submodule_report, Component};
use crate::groupoid::{classify, orbit_relation, validate_groupoid, FiniteGroupoid};
use crate::io::{envelope_json, rim_json, system_json, ActionDoc, GroupoidDoc, Input};
use crate::measures::{construct_rim, uniqueness_report, validate_rim};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Build,
    Envelope,
    Classify,
    Ergodicity,
    Rim,
    Fourier,
    Report,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Overrides the epsilon of a system spec.
    pub epsilon: Option<f64>,
    pub resolutions: Option<Vec<Vec<usize>>>,
    /// Seed for the random section used in Fourier residuals.
    pub seed: u64,
    /// Overrides the metric comparison tolerance.
    pub tol: Option<f64>,
    pub cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            epsilon: None,
            resolutions: None,
            seed: 42,
            tol: None,
            cap: CloseOptions::default().cap,
        }
    }
}

/// A command's document and whether it found violations.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub document: Value,
    pub violations: bool,
}

impl Outcome {
    fn ok(document: Value) -> Self {
        Outcome {
            document,
            violations: false,
        }
    }
}

/// A fibered space with the maps whose envelope is analysed.
struct Subject {
    space: FiberedSpace,
    generators: Vec<FiberMap>,
    epsilon: f64,
    spec: Option<SystemSpec>,
    action: Option<GroupoidAction>,
}

fn groupoid_of(input: &Input) -> Result<Option<FiniteGroupoid>> {
    match input {
        Input::Groupoid(doc) => Ok(Some(FiniteGroupoid::new(doc.to_table()?)?)),
        Input::Construction(v) => Ok(Some(Input::construction(v)?)),
        _ => Ok(None),
    }
}

fn subject(input: &Input, cfg: &RunConfig) -> Result<Subject> {
    match input {
        Input::System(spec) => {
            let mut spec = spec.clone();
            if let Some(e) = cfg.epsilon {
                spec.epsilon = e;
            }
            let sys = spec.build()?;
            let space = match cfg.tol {
                Some(t) => sys.space.with_tolerance(t),
                None => sys.space,
            };
            Ok(Subject {
                space,
                generators: sys.generators,
                epsilon: spec.epsilon,
                spec: Some(spec),
                action: None,
            })
        }
        Input::Action(doc) => {
            let g = FiniteGroupoid::new(doc.groupoid_doc().to_table()?)?;
            let space = doc.space(cfg.tol.unwrap_or(crate::action::DEFAULT_TOL))?;
            let action = GroupoidAction::new(g, space.clone(), &doc.entries())?;
            Ok(Subject {
                generators: transition_maps(&action),
                space,
                epsilon: cfg.epsilon.unwrap_or(0.0),
                spec: None,
                action: Some(action),
            })
        }
        _ => Err(Error::Spec(
            "this command needs a fibered space: give an action document or a system spec".into(),
        )),
    }
}

fn envelope(s: &Subject, cfg: &RunConfig) -> Result<Envelope> {
    close(
        &s.generators,
        &s.space,
        CloseOptions {
            epsilon: s.epsilon,
            cap: cfg.cap,
        },
    )
}

pub fn rim_section(env: &Envelope, space: &FiberedSpace) -> Result<Value> {
    if !env.classification().is_groupoid {
        return Ok(json!({
            "available": false,
            "reason": "envelope is not a groupoid, so there is no Haar system on its isotropy",
        }));
    }
    let mut measures = Vec::new();
    for i in 0..env.classification().orbit_classes.len() {
        let rim = construct_rim(env, space, i)?;
        let check = validate_rim(&rim, env, space);
        let mut doc = rim_json(&rim);
        doc["validation"] = json!({
            "valid": check.is_valid(),
            "full_support": check.full_support,
            "violations": check.violations,
        });
        measures.push(doc);
    }
    Ok(json!({
        "available": true,
        "measures": measures,
        "uniqueness": uniqueness_report(env, space),
    }))
}

/// Per-component Fourier data and whether every component is complete.
pub fn fourier_section(env: &Envelope, space: &FiberedSpace, seed: u64) -> Result<(Value, bool)> {
    if !env.classification().is_groupoid {
        let doc = json!({
            "components": [],
            "complete": false,
            "note": "the envelope is not a groupoid, so there are no isotropy groups to decompose along",
        });
        return Ok((doc, false));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = FiberedFunction::new(
        (0..space.point_count())
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
    );
    let mut out = Vec::new();
    let mut all_complete = true;
    for i in 0..env.classification().orbit_classes.len() {
        let comp = Component::new(env, space, i)?;
        let order = comp.isotropy_group().order();
        let sections = match invariant_sections(&comp, space, None) {
            Ok(s) => s,
            Err(Error::NonAbelian(..)) => {
                all_complete = false;
                out.push(json!({
                    "class": comp.class(),
                    "isotropy_order": order,
                    "skipped": "nonabelian isotropy; a character table has to be supplied",
                }));
                continue;
            }
            Err(e) => return Err(e),
        };
        let rim = construct_rim(env, space, i)?;
        let sub = submodule_report(&comp, &sections, space);
        let res = decompose_report(&comp, &sections, space, &rim, &sigma)?;
        all_complete &= sub.complete;
        out.push(json!({
            "class": comp.class(),
            "isotropy_order": order,
            "sections": sub.sections,
            "complete": sub.complete,
            "residuals": res,
        }));
    }
    let doc = json!({"components": out, "complete": all_complete});
    Ok((doc, all_complete))
}

fn classification_json(env: &Envelope, space: &FiberedSpace) -> Value {
    let cert = pseudoisometry_certificate(env, space);
    json!({
        "flags": envelope_json(env)["flags"].clone(),
        "orbit_classes": env.classification().orbit_classes,
        "pseudoisometry": {"verdict": cert.verdict, "construction": cert.construction, "witness": cert.witness, "sup_breaker": cert.sup_breaker},
    })
}

fn input_json(input: &Input, s: &Subject) -> Value {
    match (&s.spec, input) {
        (Some(spec), _) => {
            let mut v = spec.to_value();
            v["epsilon"] = json!(s.epsilon);
            v
        }
        (None, Input::Action(_)) => json!({"action": true, "epsilon": s.epsilon}),
        _ => Value::Null,
    }
}

pub fn full_report(input: &Input, cfg: &RunConfig) -> Result<Value> {
    let s = subject(input, cfg)?;
    let env = envelope(&s, cfg)?;
    let cert = pseudoisometry_certificate(&env, &s.space);
    let ergodicity = match &s.action {
        Some(a) if s.epsilon == 0.0 => ergodicity_report(a),
        _ => ergodicity_of_maps(&s.space, env.maps()),
    };
    let rim = rim_section(&env, &s.space)?;
    let (fourier, complete) = fourier_section(&env, &s.space, cfg.seed)?;
    let modulus = match &s.spec {
        Some(spec) => {
            let res = match &cfg.resolutions {
                Some(r) => r.clone(),
                None => spec.default_resolutions()?,
            };
            match spec.modulus(&res, cfg.cap) {
                Ok(t) => serde_json::to_value(t)?,
                Err(e @ Error::CapExceeded { .. }) => return Err(e),
                Err(e) => json!({"error": e.to_string()}),
            }
        }
        None => Value::Null,
    };
    let groupoid = env.classification().is_groupoid;
    let agree = cert.verdict == groupoid && groupoid == complete;
    Ok(json!({
        "input": input_json(input, &s),
        "space": {"base_points": s.space.base_count(), "points": s.space.point_count()},
        "envelope": envelope_json(&env),
        "pseudoisometry": {"verdict": cert.verdict, "construction": cert.construction, "witness": cert.witness, "sup_breaker": cert.sup_breaker},
        "ergodicity": ergodicity,
        "rim": rim,
        "fourier": fourier,
        "modulus": modulus,
        "verdict": {
            "pseudoisometric": cert.verdict,
            "envelope_is_compact_groupoid": groupoid,
            "submodule_completeness": complete,
            "agree": agree,
        },
    }))
}

fn validate(input: &Input, cfg: &RunConfig) -> Result<Outcome> {
    let structural = |e: Error| -> Result<Outcome> {
        match e {
            Error::Structural(msg) => Ok(Outcome {
                document: json!({"valid": false, "structural": msg}),
                violations: true,
            }),
            other => Err(other),
        }
    };
    let table = match input {
        Input::Groupoid(doc) => doc.to_table(),
        Input::Action(doc) => doc.groupoid_doc().to_table(),
        Input::Construction(v) => Input::construction(v).map(|g| g.table().clone()),
        Input::System(spec) => {
            let mut spec = spec.clone();
            if let Some(e) = cfg.epsilon {
                spec.epsilon = e;
            }
            spec.build()?;
            return Ok(Outcome::ok(json!({"valid": true, "violations": []})));
        }
    };
    let table = match table {
        Ok(t) => t,
        Err(e) => return structural(e),
    };
    let report = match validate_groupoid(&table) {
        Ok(r) => r,
        Err(e) => return structural(e),
    };
    if !report.is_valid() {
        return Ok(Outcome {
            document: json!({"valid": false, "groupoid": report.violations}),
            violations: true,
        });
    }
    if let Input::Action(doc) = input {
        let g = FiniteGroupoid::new(table)?;
        let space = match doc.space(cfg.tol.unwrap_or(crate::action::DEFAULT_TOL)) {
            Ok(s) => s,
            Err(e) => return structural(e),
        };
        let a = match validate_action(&g, &space, &doc.entries()) {
            Ok(a) => a,
            Err(e) => return structural(e),
        };
        return Ok(Outcome {
            document: json!({"valid": a.is_valid(), "action": a.violations}),
            violations: !a.is_valid(),
        });
    }
    Ok(Outcome::ok(json!({"valid": true, "violations": []})))
}

pub fn run(cmd: Command, input: &Input, cfg: &RunConfig) -> Result<Outcome> {
    if cmd == Command::Validate {
        return validate(input, cfg);
    }
    if let Some(g) = groupoid_of(input)? {
        let doc = match cmd {
            Command::Build => serde_json::to_value(GroupoidDoc::from_groupoid(&g))?,
            Command::Classify => {
                let orbits = orbit_relation(&g);
                json!({
                    "classification": classify(&g),
                    "orbit_classes": orbits.classes,
                    "units": g.unit_count(),
                    "elements": g.len(),
                })
            }
            _ => {
                return Err(Error::Spec(
                    "this command needs a fibered space: give an action document or a system spec".into(),
                ))
            }
        };
        return Ok(Outcome::ok(doc));
    }
    let s = subject(input, cfg)?;
    let doc = match cmd {
        Command::Build => match input {
            Input::System(spec) => system_json(&spec.build()?),
            Input::Action(doc) => serde_json::to_value(ActionDoc::clone(doc))?,
            _ => unreachable!("groupoid inputs handled above"),
        },
        Command::Envelope => envelope_json(&envelope(&s, cfg)?),
        Command::Classify => classification_json(&envelope(&s, cfg)?, &s.space),
        Command::Ergodicity => {
            let r = match &s.action {
                Some(a) if s.epsilon == 0.0 => ergodicity_report(a),
                _ => ergodicity_of_maps(&s.space, envelope(&s, cfg)?.maps()),
            };
            serde_json::to_value(r)?
        }
        Command::Rim => rim_section(&envelope(&s, cfg)?, &s.space)?,
        Command::Fourier => fourier_section(&envelope(&s, cfg)?, &s.space, cfg.seed)?.0,
        Command::Report => full_report(input, cfg)?,
        Command::Validate => unreachable!("handled above"),
    };
    Ok(Outcome::ok(doc))
}
