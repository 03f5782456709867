use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::fourier::SolverConfig;
use crate::kinetic::{KacParams, Law1d, ThermostatKind, ThermostatSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Moments,
    SteadyState,
    GtwDecay,
    T1Decay,
    CouplingW2,
    Tensorization,
    MarginalChaos,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Moments,
        ExperimentKind::SteadyState,
        ExperimentKind::GtwDecay,
        ExperimentKind::T1Decay,
        ExperimentKind::CouplingW2,
        ExperimentKind::Tensorization,
        ExperimentKind::MarginalChaos,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Moments => "moments",
            ExperimentKind::SteadyState => "steady_state",
            ExperimentKind::GtwDecay => "gtw_decay",
            ExperimentKind::T1Decay => "t1_decay",
            ExperimentKind::CouplingW2 => "coupling_w2",
            ExperimentKind::Tensorization => "tensorization",
            ExperimentKind::MarginalChaos => "marginal_chaos",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|k| k.name()).collect();
            let hint = suggest(name, &names)
                .map(|s| format!("; did you mean `{s}`?"))
                .unwrap_or_default();
            Error::Config(format!("unknown experiment `{name}`{hint}"))
        })
    }

    /// Experiments driven by the Monte Carlo engine.
    pub fn is_particle(&self) -> bool {
        matches!(self, ExperimentKind::Moments | ExperimentKind::CouplingW2)
    }

    /// Experiments that integrate or iterate on a Fourier grid of
    /// dimension `params.n_particles`.
    pub fn is_fourier(&self) -> bool {
        matches!(
            self,
            ExperimentKind::SteadyState | ExperimentKind::GtwDecay | ExperimentKind::T1Decay
        )
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub params: KacParams,
    pub thermostat: ThermostatSpec,
    pub solver: SolverConfig,
    pub replicas: usize,
    pub t_end: f64,
    pub record_interval: f64,
    pub output_dir: PathBuf,
    /// Initial law of every particle (first copy for two-sample experiments).
    pub first: Law1d,
    /// Initial law of the second copy.
    pub second: Law1d,
    /// Particle numbers for `tensorization` and `marginal_chaos`.
    pub dims: Vec<usize>,
    /// When set, every fitted rate must lie within this relative distance of
    /// its reference rate or the run fails with exit status 3.
    pub rate_tolerance: Option<f64>,
    /// Start of the fit window; defaults to one expected relaxation time.
    pub fit_start: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct LawDoc {
    #[serde(flatten)]
    kind: ThermostatKind,
    #[serde(default)]
    shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ParamsDoc {
    lambda: f64,
    mu: f64,
    n_particles: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct InitialDoc {
    first: LawDoc,
    second: LawDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ConfigDoc {
    experiment: ExperimentKind,
    seed: u64,
    replicas: usize,
    t_end: f64,
    record_interval: f64,
    output_dir: PathBuf,
    dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rate_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fit_start: Option<f64>,
    params: ParamsDoc,
    thermostat: ThermostatKind,
    solver: SolverConfig,
    initial: InitialDoc,
}

fn law(kind: ThermostatKind, shift: f64) -> LawDoc {
    LawDoc { kind, shift }
}

fn defaults_doc(experiment: ExperimentKind) -> ConfigDoc {
    use ThermostatKind::*;
    let sqrt3 = 3f64.sqrt();
    let mut doc = ConfigDoc {
        experiment,
        seed: 0,
        replicas: 10_000,
        t_end: 8.0,
        record_interval: 0.05,
        output_dir: PathBuf::from("kacbath-out"),
        dims: vec![2, 3],
        rate_tolerance: None,
        fit_start: None,
        params: ParamsDoc {
            lambda: 1.0,
            mu: 1.0,
            n_particles: 10,
        },
        thermostat: Gaussian { sigma: 1.0 },
        solver: SolverConfig::default(),
        initial: InitialDoc {
            first: law(Gaussian { sigma: 1.0 }, 0.0),
            second: law(Uniform { half_width: 2.0 }, 0.0),
        },
    };
    match experiment {
        ExperimentKind::Moments => doc.initial.first.shift = 1.0,
        ExperimentKind::CouplingW2 => {
            doc.params.lambda = 0.0;
            doc.initial.second.shift = 1.0;
        }
        ExperimentKind::SteadyState => {
            doc.params.n_particles = 2;
            doc.initial.first = law(Uniform { half_width: sqrt3 }, 0.0);
        }
        ExperimentKind::GtwDecay | ExperimentKind::T1Decay => {
            doc.params.n_particles = 2;
            doc.t_end = 10.0;
            doc.record_interval = 0.1;
            let shift = if experiment == ExperimentKind::T1Decay { 0.5 } else { 0.0 };
            doc.initial.first = law(Uniform { half_width: sqrt3 }, shift);
            doc.initial.second = law(Gaussian { sigma: 0.5f64.sqrt() }, 0.0);
        }
        ExperimentKind::Tensorization => {}
        ExperimentKind::MarginalChaos => {
            doc.t_end = 6.0;
            doc.record_interval = 0.1;
            doc.solver.nodes_per_axis = 33;
            doc.solver.n_theta = 64;
            doc.solver.dt = 0.1;
            doc.initial.first = law(Uniform { half_width: sqrt3 }, 0.0);
            doc.initial.second = law(Gaussian { sigma: 0.5f64.sqrt() }, 0.0);
        }
    }
    doc
}

/// Complete default document for `experiment` (seed set to 0).
pub fn defaults_toml(experiment: ExperimentKind) -> String {
    toml::to_string(&defaults_doc(experiment)).expect("default config serializes")
}

const TOP_KEYS: &[&str] = &[
    "experiment",
    "seed",
    "replicas",
    "t_end",
    "record_interval",
    "output_dir",
    "dims",
    "rate_tolerance",
    "fit_start",
    "params",
    "thermostat",
    "solver",
    "initial",
];
const PARAM_KEYS: &[&str] = &["lambda", "mu", "n_particles"];
const SOLVER_KEYS: &[&str] = &["n_theta", "picard_tol", "picard_max_iter", "dt", "nodes_per_axis", "radius"];
const INITIAL_KEYS: &[&str] = &["first", "second"];
const LAW_KEYS: &[&str] = &["kind", "sigma", "half_width", "scale", "a", "b"];
const LAW_KINDS: &[&str] = &["gaussian", "uniform", "rademacher", "two_point", "dirac_zero"];

fn kind_keys(kind: &str) -> &'static [&'static str] {
    match kind {
        "gaussian" => &["sigma"],
        "uniform" => &["half_width"],
        "rademacher" => &["scale"],
        "two_point" => &["a", "b"],
        _ => &[],
    }
}

fn suggest<'a>(key: &str, candidates: &[&'a str]) -> Option<&'a str> {
    candidates
        .iter()
        .map(|c| (strsim::damerau_levenshtein(key, c), *c))
        .filter(|(d, c)| *d <= 2 && *d < c.len())
        .min_by_key(|(d, _)| *d)
        .map(|(_, c)| c)
}

fn unknown_key(path: &str, key: &str, allowed: &[&str]) -> Error {
    let full = if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    };
    match suggest(key, allowed) {
        Some(s) => Error::Config(format!("unknown key `{full}`; did you mean `{s}`?")),
        None => Error::Config(format!("unknown key `{full}`; expected one of {}", allowed.join(", "))),
    }
}

fn check_keys(table: &Table, path: &str, allowed: &[&str]) -> Result<()> {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(unknown_key(path, key, allowed));
        }
    }
    Ok(())
}

fn sub_table<'a>(table: &'a Table, key: &str, path: &str) -> Result<Option<&'a Table>> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::Table(t)) => Ok(Some(t)),
        Some(_) => Err(Error::Config(format!("`{path}` must be a table"))),
    }
}

fn check_law(table: &Table, path: &str, with_shift: bool) -> Result<()> {
    let mut allowed = LAW_KEYS.to_vec();
    if with_shift {
        allowed.push("shift");
    }
    check_keys(table, path, &allowed)?;
    let kind = match table.get("kind") {
        Some(Value::String(s)) => s.as_str(),
        Some(_) => return Err(Error::Config(format!("`{path}.kind` must be a string"))),
        None => return Err(Error::Config(format!("missing field `{path}.kind`"))),
    };
    if !LAW_KINDS.contains(&kind) {
        let hint = suggest(kind, LAW_KINDS)
            .map(|s| format!("; did you mean `{s}`?"))
            .unwrap_or_default();
        return Err(Error::Config(format!("unknown law `{kind}` for `{path}.kind`{hint}")));
    }
    let own = kind_keys(kind);
    for key in table.keys() {
        if LAW_KEYS.contains(&key.as_str()) && key != "kind" && !own.contains(&key.as_str()) {
            return Err(Error::Config(format!("`{path}.{key}` does not apply to kind `{kind}`")));
        }
    }
    for key in own {
        if !table.contains_key(*key) {
            return Err(Error::Config(format!("missing field `{path}.{key}` for kind `{kind}`")));
        }
    }
    Ok(())
}

fn check_schema(doc: &Table) -> Result<()> {
    check_keys(doc, "", TOP_KEYS)?;
    if let Some(t) = sub_table(doc, "params", "params")? {
        check_keys(t, "params", PARAM_KEYS)?;
    }
    if let Some(t) = sub_table(doc, "solver", "solver")? {
        check_keys(t, "solver", SOLVER_KEYS)?;
    }
    if let Some(t) = sub_table(doc, "thermostat", "thermostat")? {
        check_law(t, "thermostat", false)?;
    }
    if let Some(t) = sub_table(doc, "initial", "initial")? {
        check_keys(t, "initial", INITIAL_KEYS)?;
        for key in INITIAL_KEYS {
            let path = format!("initial.{key}");
            if let Some(law) = sub_table(t, key, &path)? {
                check_law(law, &path, true)?;
            }
        }
    }
    Ok(())
}

// Overlays `user` on `base`; law tables are replaced whole.
fn merge(base: &mut Table, user: &Table, path: &str) {
    for (key, value) in user {
        let full = if path.is_empty() {
            key.clone()
        } else {
            format!("{path}.{key}")
        };
        let is_law = matches!(full.as_str(), "thermostat" | "initial.first" | "initial.second");
        match (base.get_mut(key), value) {
            (Some(Value::Table(b)), Value::Table(u)) if !is_law => merge(b, u, &full),
            _ => {
                base.insert(key.clone(), value.clone());
            }
        }
    }
}

fn rename_field(e: Error, from: &str, to: &str) -> Error {
    match e {
        Error::InvalidParameter { field, reason } if field.starts_with(from) => Error::InvalidParameter {
            field: format!("{to}{}", &field[from.len()..]),
            reason,
        },
        e => e,
    }
}

fn build_law(doc: &LawDoc, path: &str) -> Result<Law1d> {
    let base = ThermostatSpec::new(doc.kind).map_err(|e| rename_field(e, "thermostat", path))?;
    if !doc.shift.is_finite() {
        return Err(Error::invalid(format!("{path}.shift"), "must be finite"));
    }
    Ok(Law1d::shifted(base, doc.shift))
}

fn positive(field: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0, got {x}")))
    }
}

impl ExperimentConfig {
    /// Documented defaults for `experiment` with the given seed.
    pub fn defaults(experiment: ExperimentKind, seed: u64) -> Result<Self> {
        let mut doc = defaults_doc(experiment);
        doc.seed = seed;
        Self::from_doc(doc)
    }

    fn from_doc(doc: ConfigDoc) -> Result<Self> {
        let experiment = doc.experiment;
        let params = KacParams::new(doc.params.lambda, doc.params.mu, doc.params.n_particles)?;
        let thermostat = ThermostatSpec::new(doc.thermostat)?;
        doc.solver.validate()?;
        let first = build_law(&doc.initial.first, "initial.first")?;
        let second = build_law(&doc.initial.second, "initial.second")?;
        let n = params.n_particles();
        let uses_params = experiment != ExperimentKind::Tensorization && experiment != ExperimentKind::MarginalChaos;
        if uses_params && n < 2 {
            return Err(Error::invalid(
                "params.n_particles",
                format!("`{experiment}` needs at least 2 particles, got {n}"),
            ));
        }
        if experiment.is_fourier() && n > 3 {
            return Err(Error::invalid(
                "params.n_particles",
                format!("Fourier grids support at most 3 particles, got {n}"),
            ));
        }
        if params.is_frozen() && experiment != ExperimentKind::Tensorization {
            return Err(Error::invalid("params", "lambda and mu are both zero"));
        }
        if doc.replicas < 2 {
            return Err(Error::invalid("replicas", "must be >= 2"));
        }
        positive("t_end", doc.t_end)?;
        positive("record_interval", doc.record_interval)?;
        if doc.record_interval > doc.t_end {
            return Err(Error::invalid("record_interval", "must not exceed t_end"));
        }
        if let Some(tol) = doc.rate_tolerance {
            positive("rate_tolerance", tol)?;
        }
        if let Some(s) = doc.fit_start {
            if !(s.is_finite() && s >= 0.0 && s < doc.t_end) {
                return Err(Error::invalid("fit_start", "must lie in [0, t_end)"));
            }
        }
        match experiment {
            ExperimentKind::Tensorization => {
                if doc.dims.is_empty() || doc.dims.iter().any(|&d| !(1..=3).contains(&d)) {
                    return Err(Error::invalid("dims", "entries must lie in 1..=3"));
                }
            }
            ExperimentKind::MarginalChaos => {
                if doc.dims.is_empty() || doc.dims.iter().any(|&d| !(2..=3).contains(&d)) {
                    return Err(Error::invalid("dims", "entries must lie in 2..=3"));
                }
                if first.mean() != 0.0 || second.mean() != 0.0 {
                    return Err(Error::invalid("initial", "marginal_chaos needs zero-mean initial laws"));
                }
            }
            ExperimentKind::SteadyState => {
                if first.mean() != 0.0 {
                    return Err(Error::invalid("initial.first.shift", "the Picard start must have zero mean"));
                }
            }
            ExperimentKind::GtwDecay if first.mean() != second.mean() => {
                return Err(Error::invalid("initial", "gtw_decay needs equal means"));
            }
            _ => {}
        }
        if experiment.is_fourier() || experiment == ExperimentKind::MarginalChaos {
            let max_n = if experiment == ExperimentKind::MarginalChaos {
                doc.dims.iter().copied().max().unwrap_or(2)
            } else {
                n
            };
            let p = KacParams::new(params.lambda(), params.mu(), max_n)?;
            doc.solver
                .check_stability(&p)
                .map_err(|e| Error::invalid("solver.dt", e.to_string()))?;
            let ratio = doc.record_interval / doc.solver.dt;
            if experiment != ExperimentKind::SteadyState && (ratio.round() < 1.0 || (ratio - ratio.round()).abs() > 1e-9) {
                return Err(Error::invalid("record_interval", "must be a whole multiple of solver.dt"));
            }
        }
        Ok(ExperimentConfig {
            experiment,
            seed: doc.seed,
            params,
            thermostat,
            solver: doc.solver,
            replicas: doc.replicas,
            t_end: doc.t_end,
            record_interval: doc.record_interval,
            output_dir: doc.output_dir,
            first,
            second,
            dims: doc.dims,
            rate_tolerance: doc.rate_tolerance,
            fit_start: doc.fit_start,
        })
    }

    fn to_doc(&self) -> ConfigDoc {
        let law = |l: &Law1d| LawDoc {
            kind: l.base.kind(),
            shift: l.shift,
        };
        ConfigDoc {
            experiment: self.experiment,
            seed: self.seed,
            replicas: self.replicas,
            t_end: self.t_end,
            record_interval: self.record_interval,
            output_dir: self.output_dir.clone(),
            dims: self.dims.clone(),
            rate_tolerance: self.rate_tolerance,
            fit_start: self.fit_start,
            params: ParamsDoc {
                lambda: self.params.lambda(),
                mu: self.params.mu(),
                n_particles: self.params.n_particles(),
            },
            thermostat: self.thermostat.kind(),
            solver: self.solver,
            initial: InitialDoc {
                first: law(&self.first),
                second: law(&self.second),
            },
        }
    }

    /// Full TOML echo, defaults included; parses back to `self`.
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_doc()).expect("config serializes")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_doc()).expect("config serializes")
    }

    /// `0, Δ, 2Δ, …` up to `t_end` (included when it is a multiple of `Δ`).
    pub fn record_times(&self) -> Vec<f64> {
        let steps = (self.t_end / self.record_interval + 1e-9).floor() as usize;
        (0..=steps).map(|k| k as f64 * self.record_interval).collect()
    }
}

/// Parses and validates a TOML experiment document.
///
/// `experiment` and `seed` are required; everything else falls back to the
/// defaults of the chosen experiment (see [`defaults_toml`]).
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let user: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
    check_schema(&user)?;
    let experiment = match user.get("experiment") {
        Some(Value::String(s)) => ExperimentKind::parse(s)?,
        Some(_) => return Err(Error::Config("`experiment` must be a string".into())),
        None => return Err(Error::Config("missing field `experiment`".into())),
    };
    match user.get("seed") {
        Some(Value::Integer(s)) if *s >= 0 => {}
        Some(_) => return Err(Error::invalid("seed", "must be a non-negative integer")),
        None => return Err(Error::Config("missing field `seed`".into())),
    }
    let mut merged = Table::try_from(defaults_doc(experiment)).expect("defaults serialize");
    merge(&mut merged, &user, "");
    let doc: ConfigDoc = merged
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
    ExperimentConfig::from_doc(doc)
}
