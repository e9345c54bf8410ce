//! Example systems compiled to finite fibered spaces with generators.
//!
//! Each system kind is a [`SystemKind`] registered by name; a [`SystemSpec`]
//! names the kind and carries its parameters. Kinds whose dynamics stay
//! invertible after discretization also return permutation generators, so
//! they can be turned into a [`GroupoidAction`](crate::action::GroupoidAction).
//! The others (snapped maps that collapse grid points) only enter through
//! raw generators of the envelope.

mod disc;
mod halfline;
mod interval_map;
mod rotation;
mod skew;
mod two_x_squared;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::action::{ExtensionGenerator, FiberedSpace, Metric};
use crate::envelope::{close, modulus_table, CloseOptions, Envelope, FiberMap, ModulusTable};
use crate::error::{Error, Result};
use crate::registry::Registry;

pub use disc::Disc;
pub use halfline::Halfline;
pub use interval_map::IntervalMap;
pub use rotation::Rotation;
pub use skew::Skew;
pub use two_x_squared::TwoXSquared;

const SNAP_TOL: f64 = 1e-12;

/// Index of the grid point nearest to `x`. Ties go to the point of smaller
/// absolute value, then to the smaller index.
///
/// Panics on an empty grid.
pub fn snap(x: f64, grid: &[f64]) -> usize {
    assert!(!grid.is_empty(), "snap onto an empty grid");
    let mut best = 0;
    for (i, &g) in grid.iter().enumerate().skip(1) {
        let (d, bd) = ((x - g).abs(), (x - grid[best]).abs());
        if d < bd - SNAP_TOL || (d <= bd + SNAP_TOL && g.abs() < grid[best].abs() - SNAP_TOL) {
            best = i;
        }
    }
    best
}

/// The cyclic subgroup of `Z_n` generated by `k`, sorted.
pub fn rotation_subgroup_closure(k: usize, n: usize) -> Vec<usize> {
    assert!(n >= 1);
    let mut out = vec![0];
    let mut x = k % n;
    while x != 0 {
        out.push(x);
        x = (x + k) % n;
    }
    out.sort_unstable();
    out
}

/// Circle distance on `Z_n`, as a fraction of the full turn.
pub(crate) fn circle(a: usize, b: usize, n: usize) -> f64 {
    let d = a.abs_diff(b);
    d.min(n - d) as f64 / n as f64
}

/// A compiled system.
#[derive(Debug, Clone)]
pub struct BuiltSystem {
    pub kind: &'static str,
    pub space: FiberedSpace,
    pub generators: Vec<FiberMap>,
    /// Permutation form of the dynamics, when it is invertible.
    pub extension: Option<Vec<ExtensionGenerator>>,
    pub metadata: Map<String, Value>,
}

pub trait SystemKind: Send + Sync {
    fn name(&self) -> &'static str;

    fn build(&self, params: &Map<String, Value>) -> Result<BuiltSystem>;

    /// Parameters of the same system at another resolution.
    fn at_resolution(&self, params: &Map<String, Value>, resolution: &[usize]) -> Result<Map<String, Value>>;

    /// Resolutions used for the modulus diagnostic when none are given.
    fn default_resolutions(&self, params: &Map<String, Value>) -> Vec<Vec<usize>>;
}

pub fn builtin_kinds() -> Registry<dyn SystemKind> {
    let mut r: Registry<dyn SystemKind> = Registry::new("system");
    r.register("disc", Box::new(Disc))
        .register("skew", Box::new(Skew))
        .register("two_x_squared", Box::new(TwoXSquared))
        .register("halfline", Box::new(Halfline))
        .register("interval_map", Box::new(IntervalMap))
        .register("rotation", Box::new(Rotation));
    r
}

/// `{"kind": ..., "epsilon": ..., <kind parameters>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub kind: String,
    pub epsilon: f64,
    pub params: Map<String, Value>,
}

impl SystemSpec {
    pub fn new(kind: &str, epsilon: f64, params: Value) -> Result<Self> {
        let mut obj = match params {
            Value::Object(m) => m,
            Value::Null => Map::new(),
            _ => return Err(Error::Spec("parameters must be an object".into())),
        };
        obj.insert("kind".into(), Value::from(kind));
        obj.insert("epsilon".into(), Value::from(epsilon));
        Self::from_value(&Value::Object(obj))
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let mut params = v
            .as_object()
            .cloned()
            .ok_or_else(|| Error::Spec("system spec must be a JSON object".into()))?;
        let kind = match params.shift_remove("kind") {
            Some(Value::String(s)) => s,
            _ => return Err(Error::Spec("missing string field `kind`".into())),
        };
        let epsilon = match params.shift_remove("epsilon") {
            None => 0.0,
            Some(e) => e
                .as_f64()
                .filter(|e| *e >= 0.0 && e.is_finite())
                .ok_or_else(|| Error::Spec("`epsilon` must be a nonnegative number".into()))?,
        };
        Ok(SystemSpec { kind, epsilon, params })
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("kind".into(), Value::from(self.kind.clone()));
        m.insert("epsilon".into(), Value::from(self.epsilon));
        for (k, v) in &self.params {
            m.insert(k.clone(), v.clone());
        }
        Value::Object(m)
    }

    pub fn build(&self) -> Result<BuiltSystem> {
        builtin_kinds().get(&self.kind)?.build(&self.params)
    }

    /// Builds the system and closes its generators at the spec's epsilon.
    pub fn envelope(&self, cap: usize) -> Result<(BuiltSystem, Envelope)> {
        let sys = self.build()?;
        let env = close(
            &sys.generators,
            &sys.space,
            CloseOptions {
                epsilon: self.epsilon,
                cap,
            },
        )?;
        Ok((sys, env))
    }

    pub fn default_resolutions(&self) -> Result<Vec<Vec<usize>>> {
        Ok(builtin_kinds().get(&self.kind)?.default_resolutions(&self.params))
    }

    /// Modulus diagnostic at the spec's epsilon across resolutions.
    pub fn modulus(&self, resolutions: &[Vec<usize>], cap: usize) -> Result<ModulusTable> {
        let registry = builtin_kinds();
        let kind = registry.get(&self.kind)?;
        modulus_table(resolutions, |res| {
            let sys = kind.build(&kind.at_resolution(&self.params, res)?)?;
            let env = close(
                &sys.generators,
                &sys.space,
                CloseOptions {
                    epsilon: self.epsilon,
                    cap,
                },
            )?;
            Ok((sys.space, env))
        })
    }
}

pub(crate) fn parse_params<T: DeserializeOwned>(kind: &str, params: &Map<String, Value>) -> Result<T> {
    serde_json::from_value(Value::Object(params.clone())).map_err(|e| Error::Spec(format!("{kind}: {e}")))
}

pub(crate) fn with_resolution(
    params: &Map<String, Value>,
    keys: &[&str],
    resolution: &[usize],
) -> Result<Map<String, Value>> {
    if resolution.len() != keys.len() {
        return Err(Error::Spec(format!(
            "resolution {resolution:?} should have {} component(s): {}",
            keys.len(),
            keys.join(", ")
        )));
    }
    let mut out = params.clone();
    for (k, &v) in keys.iter().zip(resolution) {
        out.insert((*k).to_string(), Value::from(v));
    }
    Ok(out)
}

pub(crate) fn build_space(
    base_labels: Vec<String>,
    point_labels: Vec<String>,
    q: Vec<usize>,
    d_k: impl Fn(usize, usize) -> f64,
    d_l: impl Fn(usize, usize) -> f64,
) -> Result<FiberedSpace> {
    let (nk, nl) = (point_labels.len(), base_labels.len());
    FiberedSpace::new(base_labels, point_labels, q, Metric::from_fn(nk, d_k), Metric::from_fn(nl, d_l))
}

/// Fiber restrictions of a global map that sends fibers into fibers.
pub(crate) fn fiber_restrictions(space: &FiberedSpace, f: &[usize]) -> Result<Vec<FiberMap>> {
    (0..space.base_count())
        .map(|b| {
            let dst = space.q(f[space.fiber(b)[0]]);
            FiberMap::from_fn(space, b, dst, |x| f[x])
                .map_err(|_| Error::Spec(format!("generator splits the fiber over base {b}")))
        })
        .collect()
}

pub(crate) fn inverse_permutation(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Spec(msg()))
    }
}
