//! Scenario execution: each run checks its declared assertions and writes artifacts.

use std::path::{Path, PathBuf};

use dirac_jump::linalg::{frobenius, CMatrix};
use dirac_jump::reflect::{probability_current, ReflectModel};
use dirac_jump::stochastic::{deterministic_expectation, mc_expectation, JumpDensity};
use dirac_jump::toy::{ito_residual, solve_toy_bvp};
use dirac_jump::ultra::{run_kappa_sweep, ConvergenceRecord, LimitSweepConfig};
use dirac_jump::{hardy_project, validate_model, HardySide, SpectralGrid, WaveField};
use serde_json::{json, Map, Value};

use crate::config::{
    ConfigError, Format, McRun, ModelConfig, OutputConfig, ReflectRun, Run, ScenarioConfig, ScenarioKind, SweepRun,
    ToyRun,
};
use crate::oracles::{self, cocycle_defect, normalized, quadrature_expectation};
use crate::report::{self, json_float, Cell, Record, ReportError};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("model invariant violated: {}", .0.join(", "))]
    Model(Vec<String>),
    #[error("numerical error: {0}")]
    Numerics(#[from] dirac_jump::Error),
    #[error("{0}")]
    Report(#[from] ReportError),
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) | ScenarioError::Report(_) => 2,
            ScenarioError::Model(_) | ScenarioError::Numerics(_) => 1,
        }
    }
}

/// `value ≤ limit`; a NaN value never passes.
#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Assertion {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "value": json_float(self.value),
            "limit": json_float(self.limit),
            "passed": self.passed,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub scenario: &'static str,
    pub assertions: Vec<Assertion>,
    pub artifacts: Vec<PathBuf>,
}

impl ScenarioReport {
    fn new(kind: ScenarioKind) -> Self {
        Self {
            scenario: kind.name(),
            assertions: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }

    fn check(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.assertions.push(Assertion::at_most(name, value, limit));
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("scenario".into(), self.scenario.into());
        m.insert("passed".into(), self.passed().into());
        m.insert("assertions".into(), self.assertions.iter().map(Assertion::to_json).collect());
        m.insert("failed".into(), self.failed().map(|a| Value::from(a.name.clone())).collect());
        Value::Object(m)
    }
}

/// Built-in configuration of each scenario, used when no `--config` is given.
pub fn default_config(kind: ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::ToyEquivalence => {
            r#"scenario = "toy-equivalence"
[grid]
half_width = 16.0
points = 1024
[model]
n = 2
kappa = "pauli-z"
sigma = "pauli-x"
mass = 0.0
[run]
times = [0.5, 1.0, 2.0]
dt = 0.015625
"#
        }
        ScenarioKind::Reflect => {
            r#"scenario = "reflect"
[grid]
half_width = 16.0
points = 256
[model]
n = 2
kappa = "pauli-z"
sigma = "pauli-x"
mass = 1.0
[run]
t = 1.0
refinements = [256, 512, 1024, 2048]
"#
        }
        ScenarioKind::KappaSweep => {
            r#"scenario = "kappa-sweep"
[grid]
half_width = 32.0
points = 1024
[model]
n = 2
kappa = "pauli-z"
sigma = "pauli-x"
mass = 1.0
[run]
t = 1.0
kappa_base = 5.0
kappa_list = [10.0, 20.0, 40.0, 80.0, 160.0]
"#
        }
        ScenarioKind::MonteCarlo => {
            r#"scenario = "monte-carlo"
[grid]
half_width = 32.0
points = 2048
[model]
n = 2
kappa = "pauli-z"
sigma = "pauli-x"
mass = 0.0
[run]
t = 1.0
density = { kind = "exponential", rate = 1.0 }
samples = 100000
seed = 7
observable = "projector(0)"
"#
        }
        ScenarioKind::FullSuite => "scenario = \"full-suite\"\n",
    }
}

/// Runs one scenario and writes its artifacts plus `report.json` under the output directory.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport, ScenarioError> {
    let out = &cfg.output;
    if let Run::FullSuite = cfg.run {
        return run_full_suite(out);
    }
    let grid = cfg.grid.as_ref().expect("validated scenario has a grid");
    let model = cfg.model.as_ref().expect("validated scenario has a model");
    check_model(model, grid)?;
    let mut rep = ScenarioReport::new(cfg.kind);
    match &cfg.run {
        Run::ToyEquivalence(run) => toy(model, grid, run, out, &mut rep)?,
        Run::Reflect(run) => reflect(model, grid, run, out, &mut rep)?,
        Run::KappaSweep(run) => sweep(model, grid, run, out, &mut rep)?,
        Run::MonteCarlo(run) => monte_carlo(model, grid, run, out, &mut rep)?,
        Run::FullSuite => unreachable!(),
    }
    write_report(&rep, &out.directory)?;
    Ok(rep)
}

fn check_model(model: &ModelConfig, grid: &SpectralGrid) -> Result<(), ScenarioError> {
    let report = validate_model(&model.spec, grid);
    if report.passed() {
        return Ok(());
    }
    Err(ScenarioError::Model(
        report
            .failures()
            .map(|c| format!("{} (defect {:e}, limit {:e})", c.name, c.defect, c.limit))
            .collect(),
    ))
}

fn write_report(rep: &ScenarioReport, dir: &Path) -> Result<(), ReportError> {
    report::write_file(&dir.join("report.json"), &report::pretty(&rep.to_json()))
}

fn emit_all<R: Record>(records: &[R], out: &OutputConfig, stem: &str, rep: &mut ScenarioReport) -> Result<(), ReportError> {
    for &f in &out.formats {
        rep.artifacts.push(report::emit_report(records, f, &out.directory, stem)?);
    }
    Ok(())
}

fn status(ok: bool) -> Cell {
    ok.into()
}

struct ToyRow {
    t: f64,
    cocycle_defect: f64,
    norm_defect: f64,
    ok: bool,
}

impl Record for ToyRow {
    fn columns() -> Vec<&'static str> {
        vec!["t", "cocycle_defect", "norm_defect", "status"]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![self.t.into(), self.cocycle_defect.into(), self.norm_defect.into(), status(self.ok)]
    }
}

fn toy(model: &ModelConfig, grid: &SpectralGrid, run: &ToyRun, out: &OutputConfig, rep: &mut ScenarioReport) -> Result<(), ScenarioError> {
    let m = &model.spec;
    let chi0 = oracles::gaussian(grid, &run.eta, &run.initial);
    let norm0 = chi0.norm();
    let mut rows = Vec::new();
    for &t in &run.times {
        let chi = solve_toy_bvp(m, &chi0, t)?;
        let d = cocycle_defect(m, &chi0, &chi, t);
        let n = (chi.norm() / norm0 - 1.0).abs();
        rep.check(format!("cocycle_defect t={t}"), d, run.tolerance);
        rep.check(format!("norm_defect t={t}"), n, run.tolerance);
        rows.push(ToyRow {
            t,
            cocycle_defect: d,
            norm_defect: n,
            ok: d <= run.tolerance && n <= run.tolerance,
        });
    }

    // s = t/4 never crosses the jump; s = t + dt/2 crosses it within the step
    let t = run.times[0];
    let (dt, eta) = (run.dt, &run.eta);
    let off = ito_residual(m, t, dt, t / 4.0, eta) / ito_residual(m, t, dt / 2.0, t / 4.0, eta);
    let on = ito_residual(m, t, dt, t + dt / 2.0, eta) / ito_residual(m, t, dt / 2.0, t + dt / 4.0, eta);
    // with κ = 0 or σ = I the corresponding residual vanishes identically and has no order
    if !nearly_zero(ito_residual(m, t, dt, t / 4.0, eta)) {
        rep.check("ito_ratio_off_jump |r-4|", (off - 4.0).abs(), 0.5);
    }
    let n = m.dim();
    if !nearly_zero(frobenius(&(&m.sigma - CMatrix::identity(n, n)))) {
        rep.check("ito_ratio_at_jump |r-2|", (on - 2.0).abs(), 0.5);
    }
    emit_all(&rows, out, "toy", rep)?;
    Ok(())
}

fn nearly_zero(x: f64) -> bool {
    x < 1e-14
}

struct ReflectRow {
    points: usize,
    dz: f64,
    norm_defect: f64,
    boundary_residual: f64,
    connection_defect: f64,
    current: f64,
    current_bound: f64,
    ok: bool,
}

impl Record for ReflectRow {
    fn columns() -> Vec<&'static str> {
        vec![
            "points",
            "dz",
            "norm_defect",
            "boundary_residual",
            "connection_defect",
            "current",
            "current_bound",
            "status",
        ]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            self.points.into(),
            self.dz.into(),
            self.norm_defect.into(),
            self.boundary_residual.into(),
            self.connection_defect.into(),
            self.current.into(),
            self.current_bound.into(),
            status(self.ok),
        ]
    }
}

/// Normalized input-class wave: the configured packet with its dressed momenta cut at zero.
pub fn reflect_input(rm: &ReflectModel, grid: &SpectralGrid, eta: &dirac_jump::linalg::CVector, init: &crate::config::InitialSpec) -> WaveField {
    let f = oracles::gaussian(grid, eta, init);
    let prop = rm.input_propagator();
    normalized(&prop.undress(&hardy_project(&prop.dress(&f), HardySide::Minus, 0.0)))
}

fn reflect(model: &ModelConfig, grid: &SpectralGrid, run: &ReflectRun, out: &OutputConfig, rep: &mut ScenarioReport) -> Result<(), ScenarioError> {
    let spec = model.dressed();
    let mut rows = Vec::new();
    for &points in &run.refinements {
        let g = SpectralGrid::new(grid.half_width(), points)?;
        let rm = ReflectModel::new(&spec, &g)?;
        let f = reflect_input(&rm, &g, &run.eta, &run.initial);
        let sol = rm.solve(&f, run.t)?;
        let norm_defect = (sol.half_line_norm_sq() - 1.0).abs();
        let r = sol.boundary_residual;
        let connection = rm.connection_defect(&f, run.t)?;
        let current = probability_current(&sol.input, &sol.output, 0.0)?;
        let a = sol.input.row(g.origin()).norm();
        let bound = 2.0 * a * r + r * r;
        rep.check(format!("norm_defect N={points}"), norm_defect, run.tolerance);
        rep.check(format!("current_excess N={points}"), current.abs() - bound, 1e-15);
        rows.push(ReflectRow {
            points,
            dz: g.dz(),
            norm_defect,
            boundary_residual: r,
            connection_defect: connection,
            current,
            current_bound: bound,
            ok: norm_defect <= run.tolerance && current.abs() <= bound + 1e-15,
        });
    }
    for w in rows.windows(2) {
        if w[1].points == 2 * w[0].points {
            let ratio = w[0].boundary_residual / w[1].boundary_residual;
            rep.check(format!("boundary_ratio N={} |r-2|", w[1].points), (ratio - 2.0).abs(), 0.4);
        }
    }
    emit_all(&rows, out, "reflect", rep)?;
    Ok(())
}

struct SweepRow<'a> {
    rec: &'a ConvergenceRecord,
    record_timing: bool,
}

impl Record for SweepRow<'_> {
    fn columns() -> Vec<&'static str> {
        vec!["kappa", "varkappa", "error_I", "quadrature_I", "bound", "slope_running", "runtime_s", "status"]
    }
    fn cells(&self) -> Vec<Cell> {
        let r = self.rec;
        let status = match &r.failure {
            Some(msg) => Cell::Text(format!("error: {msg}")),
            None => r.within_bound().into(),
        };
        vec![
            r.kappa.into(),
            r.varkappa.into(),
            r.error_i.into(),
            r.quadrature_i.into(),
            r.bound.into(),
            r.slope_running.into(),
            if self.record_timing { r.runtime_s } else { 0.0 }.into(),
            status,
        ]
    }
}

fn sweep(model: &ModelConfig, grid: &SpectralGrid, run: &SweepRun, out: &OutputConfig, rep: &mut ScenarioReport) -> Result<(), ScenarioError> {
    let spec = model.dressed();
    let psi = oracles::class_member(&spec, grid, &run.eta, &run.initial, run.kappa_base);
    let config = LimitSweepConfig {
        kappa_base: run.kappa_base,
        kappa_list: run.kappa_list.clone(),
        t: run.t,
        mass_bound: run.mass_bound,
        tolerance: run.tolerance,
    };
    let records = run_kappa_sweep(&config, &spec, &psi)?;
    let massless = spec.model.is_massless();
    for r in &records {
        if let Some(msg) = &r.failure {
            rep.assertions.push(Assertion {
                name: format!("record kappa={} ({msg})", r.kappa),
                value: f64::NAN,
                limit: 0.0,
                passed: false,
            });
        } else if massless {
            rep.check(format!("error_I kappa={}", r.kappa), r.error_i, run.tolerance);
        } else {
            rep.check(format!("error_I - bound kappa={}", r.kappa), r.error_i - r.bound, 0.0);
        }
    }
    if !massless {
        for w in records.windows(2) {
            rep.check(format!("monotone kappa={}", w[1].kappa), w[1].error_i - w[0].error_i, 0.0);
        }
        if records.len() > 1 {
            let slope = records.last().unwrap().slope_running;
            rep.check("loglog_slope", slope, run.slope_max);
        }
    }
    let rows: Vec<SweepRow> = records
        .iter()
        .map(|rec| SweepRow { rec, record_timing: out.record_timing })
        .collect();
    emit_all(&rows, out, "sweep", rep)?;
    Ok(())
}

struct McRow {
    seed: u64,
    samples: usize,
    mean: f64,
    stderr: f64,
    deterministic: f64,
    quadrature: f64,
    tail_mass: f64,
    max_norm_defect: f64,
}

impl Record for McRow {
    fn columns() -> Vec<&'static str> {
        vec!["seed", "M", "mean", "stderr", "deterministic", "quadrature", "tail_mass", "max_norm_defect"]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            self.seed.into(),
            self.samples.into(),
            self.mean.into(),
            self.stderr.into(),
            self.deterministic.into(),
            self.quadrature.into(),
            self.tail_mass.into(),
            self.max_norm_defect.into(),
        ]
    }
}

fn monte_carlo(model: &ModelConfig, grid: &SpectralGrid, run: &McRun, out: &OutputConfig, rep: &mut ScenarioReport) -> Result<(), ScenarioError> {
    let m = &model.spec;
    let density = JumpDensity::new(run.density, grid).map_err(|e| ConfigError::Invalid(format!("run.density: {e}")))?;
    let est = mc_expectation(m, &density, &run.observable, &run.eta, run.t, run.samples, run.seed)?;
    let det = deterministic_expectation(m, &density, &run.observable, &run.eta, run.t)?;
    let quad = quadrature_expectation(m, run.density, grid, &run.observable, &run.eta, run.t, 1e-12);
    let dz = grid.dz();
    rep.check("|mean - quadrature| - 4 stderr", (est.mean - quad).abs() - 4.0 * est.stderr, 0.0);
    rep.check("|deterministic - quadrature|", (det - quad).abs(), run.dz_constant * dz + density.tail_mass());
    rep.check(
        "|mean - deterministic| - 4 stderr",
        (est.mean - det).abs() - 4.0 * est.stderr,
        run.dz_constant * dz + density.tail_mass(),
    );
    rep.check("max_norm_defect", est.max_norm_defect, 1e-12);
    let row = McRow {
        seed: run.seed,
        samples: run.samples,
        mean: est.mean,
        stderr: est.stderr,
        deterministic: det,
        quadrature: quad,
        tail_mass: density.tail_mass(),
        max_norm_defect: est.max_norm_defect,
    };
    // the summary is a single object, not a table
    if out.formats.contains(&Format::Json) {
        let obj = report::to_json_value(std::slice::from_ref(&row))[0].clone();
        let path = out.directory.join("monte_carlo.json");
        report::write_file(&path, &report::pretty(&obj))?;
        rep.artifacts.push(path);
    }
    if out.formats.contains(&Format::Csv) {
        rep.artifacts.push(report::emit_report(&[row], Format::Csv, &out.directory, "monte_carlo")?);
    }
    Ok(())
}

/// Every scenario with its built-in configuration, each in its own subdirectory.
fn run_full_suite(out: &OutputConfig) -> Result<ScenarioReport, ScenarioError> {
    let mut rep = ScenarioReport::new(ScenarioKind::FullSuite);
    for kind in ScenarioKind::ALL.into_iter().filter(|k| *k != ScenarioKind::FullSuite) {
        let mut cfg = ScenarioConfig::from_toml(default_config(kind))?;
        cfg.output = OutputConfig {
            directory: out.directory.join(kind.name()),
            ..out.clone()
        };
        let sub = run_scenario(&cfg)?;
        for a in sub.assertions {
            rep.assertions.push(Assertion {
                name: format!("{}: {}", kind.name(), a.name),
                ..a
            });
        }
        rep.artifacts.extend(sub.artifacts);
    }
    write_report(&rep, &out.directory)?;
    Ok(rep)
}
