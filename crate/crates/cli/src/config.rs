//! Scenario configuration: TOML schema, matrix presets and validation.
//!
//! Everything that can be checked without running the numerics is checked
//! here, so a config either fails with [`ConfigError`] or runs to the end.

use std::path::{Path, PathBuf};

use dirac_jump::linalg::{self, c, CMatrix, CVector};
use dirac_jump::stochastic::DensityKind;
use dirac_jump::{DressedSpec, ModelSpec, SpectralGrid};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid TOML: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    ToyEquivalence,
    Reflect,
    KappaSweep,
    MonteCarlo,
    FullSuite,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::ToyEquivalence,
        ScenarioKind::Reflect,
        ScenarioKind::KappaSweep,
        ScenarioKind::MonteCarlo,
        ScenarioKind::FullSuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::ToyEquivalence => "toy-equivalence",
            ScenarioKind::Reflect => "reflect",
            ScenarioKind::KappaSweep => "kappa-sweep",
            ScenarioKind::MonteCarlo => "monte-carlo",
            ScenarioKind::FullSuite => "full-suite",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid(format!("unknown scenario `{s}`")))
    }
}

/// A complex entry, written as a number or as `[re, im]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(&self) -> num_complex::Complex64 {
        match self {
            Entry::Real(x) => c(*x, 0.0),
            Entry::Complex([re, im]) => c(*re, *im),
        }
    }
}

/// A matrix given by preset name or as row-major nested lists.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Preset(String),
    Rows(Vec<Vec<Entry>>),
}

/// The mass operator, either `m·I` or a full matrix.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MassSpec {
    Scalar(f64),
    Matrix(MatrixSpec),
}

impl MatrixSpec {
    /// Presets: `identity`, `zero`, `pauli-x`, `pauli-y`, `pauli-z`, `shift-cycle` / `shift-cycle(n)`,
    /// `projector(i)`.
    pub fn build(&self, n: usize, what: &str) -> Result<CMatrix, ConfigError> {
        let m = match self {
            MatrixSpec::Preset(name) => preset(name, n).ok_or_else(|| invalid(format!("{what}: unknown preset `{name}`")))?,
            MatrixSpec::Rows(rows) => {
                let r = rows.len();
                if rows.iter().any(|row| row.len() != r) {
                    return Err(invalid(format!("{what}: matrix is not square")));
                }
                CMatrix::from_fn(r, r, |i, j| rows[i][j].value())
            }
        };
        if m.nrows() != n {
            return Err(invalid(format!("{what}: expected {n}x{n}, got {}x{}", m.nrows(), m.ncols())));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid(format!("{what}: non-finite entry")));
        }
        Ok(m)
    }
}

fn preset(name: &str, n: usize) -> Option<CMatrix> {
    let pauli = |m: CMatrix| (n == 2).then_some(m);
    match name {
        "identity" => Some(linalg::identity(n)),
        "zero" => Some(linalg::zeros(n)),
        "pauli-x" => pauli(linalg::pauli_x()),
        "pauli-y" => pauli(linalg::pauli_y()),
        "pauli-z" => pauli(linalg::pauli_z()),
        "shift-cycle" => Some(linalg::shift_cycle(n)),
        _ => {
            let arg = |prefix: &str| -> Option<usize> {
                name.strip_prefix(prefix)?.strip_suffix(')')?.trim().parse().ok()
            };
            if let Some(k) = arg("shift-cycle(") {
                return Some(linalg::shift_cycle(k));
            }
            if let Some(i) = arg("projector(") {
                if i >= n {
                    return None;
                }
                let mut p = linalg::zeros(n);
                p[(i, i)] = c(1.0, 0.0);
                return Some(p);
            }
            None
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub half_width: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub n: usize,
    pub kappa: MatrixSpec,
    pub sigma: MatrixSpec,
    pub mass: MassSpec,
    pub mass_bound: Option<f64>,
    /// Conjugation generator; defaults to `kappa`.
    pub kappa_shift: Option<MatrixSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
pub enum DensitySpec {
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
    Cell { s0: f64 },
}

impl DensitySpec {
    pub fn kind(&self) -> DensityKind {
        match *self {
            DensitySpec::Exponential { rate } => DensityKind::Exponential { rate },
            DensitySpec::Uniform { lo, hi } => DensityKind::Uniform { lo, hi },
            DensitySpec::Cell { s0 } => DensityKind::Cell { s0 },
        }
    }
}

/// Gaussian initial wave `η e^{ik₀z} e^{-(z-z₀)²/2w²}`.
#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub center: f64,
    pub width: f64,
    #[serde(default)]
    pub carrier: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    pub t: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub dt: Option<f64>,
    pub kappa_base: Option<f64>,
    pub kappa_list: Option<Vec<f64>>,
    pub density: Option<DensitySpec>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub observable: Option<MatrixSpec>,
    pub eta: Option<Vec<Entry>>,
    pub initial: Option<InitialSpec>,
    /// Grid sizes for the reflection refinement study.
    pub refinements: Option<Vec<usize>>,
    pub tolerance: Option<f64>,
    pub slope_max: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
    /// Write measured runtimes; off by default so that artifacts are byte-reproducible.
    #[serde(default)]
    pub record_timing: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            formats: default_formats(),
            record_timing: false,
        }
    }
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<String> {
    vec!["csv".into(), "json".into()]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub scenario: String,
    pub grid: Option<GridBlock>,
    pub model: Option<ModelBlock>,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
    pub record_timing: bool,
}

#[derive(Debug, Clone)]
pub struct ToyRun {
    pub times: Vec<f64>,
    /// Coarser step of the Itô residual pair `dt, dt/2`.
    pub dt: f64,
    pub initial: InitialSpec,
    pub eta: CVector,
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct ReflectRun {
    pub t: f64,
    pub refinements: Vec<usize>,
    pub initial: InitialSpec,
    pub eta: CVector,
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct SweepRun {
    pub t: f64,
    pub kappa_base: f64,
    pub kappa_list: Vec<f64>,
    pub mass_bound: f64,
    pub initial: InitialSpec,
    pub eta: CVector,
    pub tolerance: f64,
    pub slope_max: f64,
}

#[derive(Debug, Clone)]
pub struct McRun {
    pub t: f64,
    pub density: DensityKind,
    pub samples: usize,
    pub seed: u64,
    pub observable: CMatrix,
    pub eta: CVector,
    /// Frozen constant of the `C·dz` discretization allowance.
    pub dz_constant: f64,
}

#[derive(Debug, Clone)]
pub enum Run {
    ToyEquivalence(ToyRun),
    Reflect(ReflectRun),
    KappaSweep(SweepRun),
    MonteCarlo(McRun),
    FullSuite,
}

/// The model as configured, before the numerical invariants are checked.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub spec: ModelSpec,
    pub kappa_shift: CMatrix,
}

impl ModelConfig {
    pub fn dressed(&self) -> DressedSpec {
        // kappa_shift was checked Hermitian during validation
        DressedSpec::new(self.spec.clone(), self.kappa_shift.clone()).expect("validated conjugation generator")
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub grid: Option<SpectralGrid>,
    pub model: Option<ModelConfig>,
    pub run: Run,
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        Self::validate(raw)
    }

    /// Checks every cross-field constraint and builds the typed configuration.
    pub fn validate(raw: RawConfig) -> Result<Self, ConfigError> {
        let kind = ScenarioKind::parse(&raw.scenario)?;
        let output = output_config(&raw.output)?;
        if kind == ScenarioKind::FullSuite {
            return Ok(Self {
                kind,
                grid: None,
                model: None,
                run: Run::FullSuite,
                output,
            });
        }
        let gb = raw.grid.as_ref().ok_or_else(|| invalid("missing [grid] block"))?;
        let grid = SpectralGrid::new(gb.half_width, gb.points).map_err(|e| invalid(format!("grid: {e}")))?;
        let mb = raw.model.as_ref().ok_or_else(|| invalid("missing [model] block"))?;
        let model = model_config(mb)?;
        let n = mb.n;
        let r = &raw.run;
        let eta = eta_vector(r.eta.as_deref(), n)?;
        let tolerance = positive(r.tolerance, 1e-10, "run.tolerance")?;
        let run = match kind {
            ScenarioKind::ToyEquivalence => {
                let times = match (&r.times, r.t) {
                    (Some(ts), _) => ts.clone(),
                    (None, Some(t)) => vec![t],
                    (None, None) => vec![0.5, 1.0, 2.0],
                };
                if times.is_empty() {
                    return Err(invalid("run.times is empty"));
                }
                for t in &times {
                    commensurate(&grid, *t, "run.times")?;
                }
                Run::ToyEquivalence(ToyRun {
                    times,
                    dt: positive(r.dt, 1.0 / 64.0, "run.dt")?,
                    initial: initial(r.initial, InitialSpec { center: 1.0, width: 2.0, carrier: 0.0 })?,
                    eta,
                    tolerance,
                })
            }
            ScenarioKind::Reflect => {
                let t = r.t.unwrap_or(1.0);
                let refinements = r.refinements.clone().unwrap_or_else(|| vec![gb.points]);
                if refinements.is_empty() {
                    return Err(invalid("run.refinements is empty"));
                }
                for &points in &refinements {
                    SpectralGrid::new(gb.half_width, points)
                        .map_err(|e| invalid(format!("run.refinements: {e}")))?;
                }
                if !t.is_finite() {
                    return Err(invalid("run.t must be finite"));
                }
                Run::Reflect(ReflectRun {
                    t,
                    refinements,
                    initial: initial(r.initial, InitialSpec { center: 2.0, width: 1.5, carrier: -5.0 })?,
                    eta,
                    tolerance: positive(r.tolerance, 1e-9, "run.tolerance")?,
                })
            }
            ScenarioKind::KappaSweep => {
                let t = r.t.unwrap_or(1.0);
                commensurate(&grid, t, "run.t")?;
                let kappa_base = r.kappa_base.ok_or_else(|| invalid("kappa-sweep needs run.kappa_base"))?;
                let kappa_list = r.kappa_list.clone().ok_or_else(|| invalid("kappa-sweep needs run.kappa_list"))?;
                if kappa_list.is_empty() {
                    return Err(invalid("run.kappa_list is empty"));
                }
                if kappa_list.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(invalid("run.kappa_list must be strictly ascending"));
                }
                if !(kappa_list[0] > kappa_base) {
                    return Err(invalid("every kappa in run.kappa_list must exceed run.kappa_base"));
                }
                let mass_bound = model.spec.mass_bound;
                Run::KappaSweep(SweepRun {
                    t,
                    kappa_base,
                    kappa_list,
                    mass_bound,
                    initial: initial(r.initial, InitialSpec { center: 0.0, width: 4.0, carrier: kappa_base - 1.5 })?,
                    eta,
                    tolerance: positive(r.tolerance, 1e-12, "run.tolerance")?,
                    slope_max: r.slope_max.unwrap_or(-1.7),
                })
            }
            ScenarioKind::MonteCarlo => {
                let t = r.t.unwrap_or(1.0);
                commensurate(&grid, t, "run.t")?;
                let density = r
                    .density
                    .as_ref()
                    .map(DensitySpec::kind)
                    .unwrap_or(DensityKind::Exponential { rate: 1.0 });
                let samples = r.samples.unwrap_or(100_000);
                if samples < 2 {
                    return Err(invalid("run.samples must be at least 2"));
                }
                let observable = r
                    .observable
                    .as_ref()
                    .map(|m| m.build(n, "run.observable"))
                    .transpose()?
                    .unwrap_or_else(|| preset("projector(0)", n).unwrap());
                if linalg::hermitian_defect(&observable) > 1e-12 * (1.0 + linalg::frobenius(&observable)) {
                    return Err(invalid("run.observable is not Hermitian"));
                }
                Run::MonteCarlo(McRun {
                    t,
                    density,
                    samples,
                    seed: r.seed.unwrap_or(7),
                    observable,
                    eta,
                    dz_constant: 1.0,
                })
            }
            ScenarioKind::FullSuite => unreachable!(),
        };
        Ok(Self {
            kind,
            grid: Some(grid),
            model: Some(model),
            run,
            output,
        })
    }

    pub fn set_seed(&mut self, seed: u64) {
        if let Run::MonteCarlo(mc) = &mut self.run {
            mc.seed = seed;
        }
    }

    pub fn set_output_dir(&mut self, dir: PathBuf) {
        self.output.directory = dir;
    }
}

fn output_config(block: &OutputBlock) -> Result<OutputConfig, ConfigError> {
    let mut formats = Vec::new();
    for f in &block.formats {
        let f = match f.as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(invalid(format!("output.formats: unknown format `{other}`"))),
        };
        if !formats.contains(&f) {
            formats.push(f);
        }
    }
    Ok(OutputConfig {
        directory: block.directory.clone(),
        formats,
        record_timing: block.record_timing,
    })
}

fn model_config(mb: &ModelBlock) -> Result<ModelConfig, ConfigError> {
    let n = mb.n;
    if n == 0 {
        return Err(invalid("model.n must be positive"));
    }
    let kappa = mb.kappa.build(n, "model.kappa")?;
    let sigma = mb.sigma.build(n, "model.sigma")?;
    let (mass, default_bound) = match &mb.mass {
        MassSpec::Scalar(m) => {
            if !m.is_finite() {
                return Err(invalid("model.mass must be finite"));
            }
            (linalg::identity(n) * c(m.abs(), 0.0), m.abs())
        }
        MassSpec::Matrix(spec) => {
            let m = spec.build(n, "model.mass")?;
            let bound = linalg::operator_norm(&m);
            (m, bound)
        }
    };
    let mass_bound = mb.mass_bound.unwrap_or(default_bound);
    if !(mass_bound >= 0.0) {
        return Err(invalid("model.mass_bound must be nonnegative"));
    }
    let kappa_shift = match &mb.kappa_shift {
        Some(spec) => {
            let k = spec.build(n, "model.kappa_shift")?;
            if linalg::hermitian_defect(&k) > 1e-12 * (1.0 + linalg::frobenius(&k)) {
                return Err(invalid("model.kappa_shift is not Hermitian"));
            }
            k
        }
        None => kappa.clone(),
    };
    let spec = ModelSpec::new(kappa, sigma, mass, mass_bound).map_err(|e| invalid(format!("model: {e}")))?;
    Ok(ModelConfig { spec, kappa_shift })
}

fn eta_vector(entries: Option<&[Entry]>, n: usize) -> Result<CVector, ConfigError> {
    let eta = match entries {
        Some(e) => {
            if e.len() != n {
                return Err(invalid(format!("run.eta: expected {n} entries, got {}", e.len())));
            }
            CVector::from_iterator(n, e.iter().map(Entry::value))
        }
        None => {
            let mut v = CVector::zeros(n);
            v[0] = c(0.6, 0.0);
            if n > 1 {
                v[1] = c(0.0, 0.8);
            } else {
                v[0] = c(1.0, 0.0);
            }
            v
        }
    };
    let norm = linalg::vector_norm(&eta);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("run.eta must have unit norm, got {norm}")));
    }
    Ok(eta)
}

fn initial(spec: Option<InitialSpec>, default: InitialSpec) -> Result<InitialSpec, ConfigError> {
    let s = spec.unwrap_or(default);
    if !(s.width > 0.0) || !s.center.is_finite() || !s.carrier.is_finite() {
        return Err(invalid("run.initial needs finite center/carrier and positive width"));
    }
    Ok(s)
}

fn positive(v: Option<f64>, default: f64, what: &str) -> Result<f64, ConfigError> {
    let v = v.unwrap_or(default);
    if !(v > 0.0) {
        return Err(invalid(format!("{what} must be positive")));
    }
    Ok(v)
}

fn commensurate(grid: &SpectralGrid, t: f64, what: &str) -> Result<(), ConfigError> {
    grid.cells(t).map(|_| ()).map_err(|e| invalid(format!("{what}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: &str = r#"
scenario = "kappa-sweep"
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
kappa_list = [10.0, 20.0, 40.0]
"#;

    #[test]
    fn parses_presets_and_defaults() {
        let cfg = ScenarioConfig::from_toml(SWEEP).unwrap();
        assert_eq!(cfg.kind, ScenarioKind::KappaSweep);
        match cfg.run {
            Run::KappaSweep(s) => {
                assert_eq!(s.kappa_list.len(), 3);
                assert_eq!(s.mass_bound, 1.0);
            }
            _ => panic!(),
        }
        assert!(!cfg.output.record_timing);
    }

    #[test]
    fn rows_and_complex_entries() {
        let text = SWEEP.replace("sigma = \"pauli-x\"", "sigma = [[0, [0, -1]], [[0, 1], 0]]");
        let cfg = ScenarioConfig::from_toml(&text).unwrap();
        let s = &cfg.model.unwrap().spec.sigma;
        assert_eq!(s[(0, 1)], c(0.0, -1.0));
    }

    #[test]
    fn rejects_bad_shapes_and_orderings() {
        for (from, to) in [
            ("sigma = \"pauli-x\"", "sigma = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]"),
            ("sigma = \"pauli-x\"", "sigma = [[1, 0], [0]]"),
            ("sigma = \"pauli-x\"", "sigma = \"hadamard\""),
            ("kappa_list = [10.0, 20.0, 40.0]", "kappa_list = [10.0, 5.0]"),
            ("kappa_list = [10.0, 20.0, 40.0]", "kappa_list = [4.0, 20.0]"),
            ("t = 1.0", "t = 0.3"),
            ("mass = 1.0", "mass = 1.0\nkappa_shift = [[0, 1], [0, 0]]"),
            ("scenario = \"kappa-sweep\"", "scenario = \"nope\""),
            ("points = 1024", "points = 1000"),
        ] {
            let text = SWEEP.replace(from, to);
            assert!(ScenarioConfig::from_toml(&text).is_err(), "{to}");
        }
        assert!(ScenarioConfig::from_toml("scenario = 3").is_err());
    }

    #[test]
    fn shift_cycle_sizes() {
        assert_eq!(preset("shift-cycle(3)", 3).unwrap(), linalg::shift_cycle(3));
        assert!(preset("pauli-x", 3).is_none());
        assert!(preset("projector(2)", 2).is_none());
    }
}
