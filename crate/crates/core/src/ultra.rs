//! Dressed propagation `e^{-itω_κ}` with `ω_κ(p) = ε(κ + p) - κ`, its
//! convergence to plane transport as `κ → ∞`, and the discontinuous limit wave.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::WaveField;
use crate::grid::SpectralGrid;
use crate::linalg::{vector_norm, CMatrix, HermitianEigen, I};
use crate::model::{DressedSpec, ModelSpec};
use crate::spectral::{
    hardy_outside_fraction, hardy_project, shift_cells, ConjugatedPropagator, Direction,
    HardySide, Propagator, SymbolTable,
};

/// Mass fraction tolerated outside an inductive class.
pub const CLASS_TOL: f64 = 1e-12;

/// `√(x² + w²) - κ`, accurate when `x ≈ κ ≫ w`.
fn shifted_energy(x: f64, w: f64, kappa: f64) -> f64 {
    if x > 0.0 {
        w * w / (x.hypot(w) + x) + (x - kappa)
    } else {
        x.hypot(w) - kappa
    }
}

/// Residual phase `k + ω_κ(-k) = √((κ-k)² + w²) - (κ - k)` on one mass eigenvalue.
pub fn residual_phase(k: f64, w: f64, kappa: f64) -> f64 {
    let x = kappa - k;
    if x > 0.0 {
        w * w / (x.hypot(w) + x)
    } else {
        x.hypot(w) - x
    }
}

/// `ω_κ(p) = ε(κ + p) - κ`.
pub fn omega(model: &ModelSpec, kappa: f64, p: f64) -> CMatrix {
    model.mass_eigen().map(|w| shifted_energy(kappa + p, w, kappa))
}

/// `ω̃_κ(p) = ε(κ - p) - κ`.
pub fn omega_tilde(model: &ModelSpec, kappa: f64, p: f64) -> CMatrix {
    model.mass_eigen().map(|w| shifted_energy(kappa - p, w, kappa))
}

/// Tables of `ω_κ(i∂_z)` and `ω̃_κ(i∂_z)`.
#[derive(Debug, Clone)]
pub struct OmegaSymbols {
    pub input: SymbolTable,
    pub output: SymbolTable,
}

pub fn omega_symbol(model: &ModelSpec, grid: &SpectralGrid, kappa: f64) -> OmegaSymbols {
    let basis = model.mass_eigen();
    OmegaSymbols {
        input: SymbolTable::diagonal_in(grid, &basis, |k, w| shifted_energy(kappa - k, w, kappa)),
        output: SymbolTable::diagonal_in(grid, &basis, |k, w| shifted_energy(kappa + k, w, kappa)),
    }
}

fn class_side(direction: Direction) -> HardySide {
    match direction {
        Direction::Input => HardySide::Minus,
        Direction::Output => HardySide::Plus,
    }
}

/// `E* e^{-itω_κ} E` for one carrier momentum `κ`, restricted to the class with cutoff `κ°`.
#[derive(Debug, Clone)]
pub struct DressedPropagator {
    inner: ConjugatedPropagator,
    kappa: f64,
    kappa_base: f64,
}

impl DressedPropagator {
    pub fn new(
        spec: &DressedSpec,
        grid: &SpectralGrid,
        kappa: f64,
        kappa_base: f64,
        direction: Direction,
    ) -> Result<Self> {
        if !(kappa > kappa_base) {
            return Err(Error::UnsupportedInput(format!(
                "carrier momentum {kappa} must exceed the class cutoff {kappa_base}"
            )));
        }
        let symbols = omega_symbol(&spec.model, grid, kappa);
        let table = match direction {
            Direction::Input => symbols.input,
            Direction::Output => symbols.output,
        };
        Ok(Self {
            inner: ConjugatedPropagator::new(table, &spec.kappa_shift, direction)?,
            kappa,
            kappa_base,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Fraction of the (conjugated) mass outside the class.
    pub fn outside_fraction(&self, psi: &WaveField) -> f64 {
        hardy_outside_fraction(
            &self.inner.dress(psi),
            class_side(self.inner.direction()),
            self.kappa_base,
        )
    }

    pub fn check_class(&self, psi: &WaveField) -> Result<()> {
        let outside = self.outside_fraction(psi);
        if outside > CLASS_TOL {
            return Err(Error::NotInInductiveClass {
                cutoff: self.kappa_base,
                outside,
            });
        }
        Ok(())
    }

    pub fn propagate(&self, psi: &WaveField, t: f64) -> Result<WaveField> {
        self.check_class(psi)?;
        self.inner.propagate(psi, t)
    }

    /// Class amplitudes `g = F(Eψ)`.
    pub fn amplitudes(&self, psi: &WaveField) -> WaveField {
        self.inner.dress(psi).momentum()
    }
}

/// Nearest class member `E* P E ψ`, with `P` the momentum cut at `κ°` on the side of `direction`.
pub fn project_to_class(spec: &DressedSpec, psi: &WaveField, kappa_base: f64, direction: Direction) -> Result<WaveField> {
    let e = ConjugatedPropagator::new(SymbolTable::zero(psi.grid(), spec.model.dim()), &spec.kappa_shift, direction)?;
    let cut = hardy_project(&e.dress(psi), class_side(direction), kappa_base);
    Ok(e.undress(&cut))
}

pub fn dressed_propagate(
    spec: &DressedSpec,
    psi: &WaveField,
    t: f64,
    kappa: f64,
    kappa_base: f64,
    direction: Direction,
) -> Result<WaveField> {
    DressedPropagator::new(spec, psi.grid(), kappa, kappa_base, direction)?.propagate(psi, t)
}

/// Plane transport limit `e^{-iϰt} ψ(z ± t)` (input: `+`, output: `-`).
pub fn plane_transport(spec: &DressedSpec, psi: &WaveField, t: f64, direction: Direction) -> Result<WaveField> {
    let p = psi.grid().cells(t)?;
    let p = match direction {
        Direction::Input => p,
        Direction::Output => -p,
    };
    let u = spec.shift_eigen().evolve(t);
    Ok(shift_cells(psi, p).multiply_rows(|_| u.clone()))
}

/// `I(κ°,κ) = (1/2π)∫_{k≤κ°} ‖(e^{-i(k + ω_κ(-k))t} - 1) g(k)‖² dk` by the grid trapezoid rule.
pub fn limit_error_integral(
    model: &ModelSpec,
    g: &WaveField,
    t: f64,
    kappa: f64,
    kappa_base: f64,
) -> Result<f64> {
    let g = g.momentum();
    let norm_sq = g.norm_sq();
    if (norm_sq - 1.0).abs() > 1e-9 {
        return Err(Error::UnnormalizedAmplitudes { norm_sq });
    }
    let outside = hardy_outside_fraction(&g, HardySide::Minus, kappa_base);
    if outside > CLASS_TOL {
        return Err(Error::SupportViolation {
            cutoff: kappa_base,
            outside,
        });
    }
    let grid = g.grid().clone();
    let basis = model.mass_eigen();
    let table = SymbolTable::diagonal_in(&grid, &basis, |k, w| residual_phase(k, w, kappa));
    let factor = table.apply_function(&g, |theta| Complex64::from_polar(1.0, -theta * t) - 1.0)?;
    let slack = 1e-9 * grid.dk();
    Ok(factor.partial_norm_sq(|m| grid.k(m) <= kappa_base + slack))
}

/// The same quantity as a distance: `‖e^{iϰt} e^{-t∂_z} ψ_κᵗ - ψ‖²`.
pub fn limit_error_distance(
    spec: &DressedSpec,
    psi: &WaveField,
    t: f64,
    kappa: f64,
    kappa_base: f64,
) -> Result<f64> {
    let prop = DressedPropagator::new(spec, psi.grid(), kappa, kappa_base, Direction::Input)?;
    let evolved = prop.propagate(psi, t)?;
    let back = plane_transport(spec, &evolved, -t, Direction::Input)?;
    Ok(back.sub(psi)?.norm_sq())
}

/// `κ′ = κ° + max{m, |t| m² / ε}`.
pub fn kappa_threshold(kappa_base: f64, m: f64, t: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::NonpositiveTolerance(eps));
    }
    Ok(kappa_base + m.max(t.abs() * m * m / eps))
}

/// `sup_{k ≤ κ°} ‖e^{-i(k + ω_κ(-k))t} - 1‖` over the grid modes and the endpoint `k = κ°`.
pub fn sup_phase_factor(model: &ModelSpec, grid: &SpectralGrid, t: f64, kappa: f64, kappa_base: f64) -> f64 {
    let ws: Vec<f64> = model.mass_eigen().values.iter().copied().collect();
    let factor = |k: f64| {
        ws.iter()
            .map(|w| (Complex64::from_polar(1.0, -residual_phase(k, *w, kappa) * t) - 1.0).norm())
            .fold(0.0, f64::max)
    };
    grid.momenta()
        .filter(|k| *k <= kappa_base)
        .chain(std::iter::once(kappa_base))
        .map(factor)
        .fold(0.0, f64::max)
}

/// `σ_ϰ(s) = e^{isϰ} σ e^{-isϰ}`.
fn sigma_kappa(shift: &HermitianEigen, sigma: &CMatrix, s: f64) -> CMatrix {
    shift.evolve(-s) * sigma * shift.evolve(s)
}

/// `χᵗ(z) = e^{-iϰt} χ_t(z+t)` with `χ_t(s) = σ_ϰ(s)^{1_t(s)} ψ(s)`.
pub fn limit_truncated_chi(
    model: &ModelSpec,
    psi: &WaveField,
    t: f64,
    kappa_shift: &CMatrix,
) -> Result<WaveField> {
    let grid = psi.grid().clone();
    let p = grid.cells(t)?;
    let shift = HermitianEigen::new(kappa_shift)?;
    let cut = grid.first_at_or_right_of(t);
    let chi_t = psi
        .position()
        .map_rows(|j, v| if j < cut { sigma_kappa(&shift, &model.sigma, grid.z(j)) * v } else { v });
    let u = shift.evolve(t);
    Ok(shift_cells(&chi_t, p).multiply_rows(|_| u.clone()))
}

/// Finite-`κ` analogue `σ̂_ϰ^{1̂₀} e^{-itω̂_{ϰ,κ}} ψ`; its squared distance to the limit wave is `I(κ°,κ)`.
pub fn dressed_truncated_chi(
    spec: &DressedSpec,
    psi: &WaveField,
    t: f64,
    kappa: f64,
    kappa_base: f64,
) -> Result<WaveField> {
    let evolved = dressed_propagate(spec, psi, t, kappa, kappa_base, Direction::Input)?;
    let grid = psi.grid().clone();
    let shift = spec.shift_eigen();
    let o = grid.origin();
    Ok(evolved.map_rows(|j, v| {
        if j < o {
            sigma_kappa(&shift, &spec.model.sigma, grid.z(j)) * v
        } else {
            v
        }
    }))
}

/// Per-sample residual of `dχ + iϰχ dt = (σ - 1)χ d1_t(z)` in the interaction picture
/// `χ(t,z) = e^{-iϰt} σ_ϰ(z)^{1_t(z)} ψ(z)`.
pub fn jump_equation_residual(model: &ModelSpec, psi: &WaveField, t: f64, dt: f64) -> Result<Vec<f64>> {
    let grid = psi.grid().clone();
    grid.cells(t)?;
    grid.cells(dt)?;
    let kappa = model.kappa_eigen();
    let now_cut = grid.first_at_or_right_of(t);
    let next_cut = grid.first_at_or_right_of(t + dt);
    let u_now = kappa.evolve(t);
    let u_next = kappa.evolve(t + dt);
    let n = model.dim();
    let jump = &model.sigma - CMatrix::identity(n, n);
    let psi = psi.position();
    Ok((0..grid.len())
        .map(|j| {
            let v = psi.row(j);
            let s = sigma_kappa(&kappa, &model.sigma, grid.z(j));
            let before = if j < now_cut { &s * &v } else { v.clone() };
            let after = if j < next_cut { &s * &v } else { v.clone() };
            let chi_now = &u_now * before;
            let chi_next = &u_next * after;
            let d1 = ((j < next_cut) as i32 - (j < now_cut) as i32) as f64;
            let r = &chi_next - &chi_now + &model.kappa_op * &chi_now * (I * dt)
                - &jump * &chi_now * Complex64::from(d1);
            vector_norm(&r)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitSweepConfig {
    pub kappa_base: f64,
    pub kappa_list: Vec<f64>,
    pub t: f64,
    pub mass_bound: f64,
    pub tolerance: f64,
}

impl LimitSweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::NonpositiveTolerance(self.tolerance));
        }
        if self.kappa_list.is_empty() {
            return Err(Error::UnsupportedInput("empty kappa list".into()));
        }
        for w in self.kappa_list.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::UnsupportedInput("kappa list must be ascending".into()));
            }
        }
        if !(self.kappa_list[0] > self.kappa_base) {
            return Err(Error::UnsupportedInput(format!(
                "every kappa must exceed the class cutoff {}",
                self.kappa_base
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub kappa: f64,
    /// `ϰ = κ - κ°`.
    pub varkappa: f64,
    /// Squared distance after undoing the plane transport.
    pub error_i: f64,
    /// Grid quadrature of the error integral.
    pub quadrature_i: f64,
    /// `(|t| m² / ϰ)²`.
    pub bound: f64,
    /// Least-squares slope of `log I` against `log ϰ` over the records so far.
    pub slope_running: f64,
    pub runtime_s: f64,
    pub failure: Option<String>,
}

impl ConvergenceRecord {
    fn failed(kappa: f64, kappa_base: f64, err: &Error, runtime_s: f64) -> Self {
        Self {
            kappa,
            varkappa: kappa - kappa_base,
            error_i: f64::NAN,
            quadrature_i: f64::NAN,
            bound: f64::NAN,
            slope_running: f64::NAN,
            runtime_s,
            failure: Some(err.to_string()),
        }
    }

    pub fn within_bound(&self) -> bool {
        self.failure.is_none() && self.error_i <= self.bound
    }
}

/// Least-squares slope of `log y` against `log x`, over points with `x, y > 0`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn sweep_record(config: &LimitSweepConfig, spec: &DressedSpec, psi0: &WaveField, kappa: f64) -> Result<ConvergenceRecord> {
    let start = Instant::now();
    let prop = DressedPropagator::new(spec, psi0.grid(), kappa, config.kappa_base, Direction::Input)?;
    let evolved = prop.propagate(psi0, config.t)?;
    let back = plane_transport(spec, &evolved, -config.t, Direction::Input)?;
    let error_i = back.sub(psi0)?.norm_sq();
    let quadrature_i = limit_error_integral(
        &spec.model,
        &prop.amplitudes(psi0),
        config.t,
        kappa,
        config.kappa_base,
    )?;
    let varkappa = kappa - config.kappa_base;
    let m = config.mass_bound;
    Ok(ConvergenceRecord {
        kappa,
        varkappa,
        error_i,
        quadrature_i,
        bound: (config.t.abs() * m * m / varkappa).powi(2),
        slope_running: f64::NAN,
        runtime_s: start.elapsed().as_secs_f64(),
        failure: None,
    })
}

/// Runs every `κ` of the sweep in parallel; output order follows `kappa_list`.
pub fn run_kappa_sweep(
    config: &LimitSweepConfig,
    spec: &DressedSpec,
    psi0: &WaveField,
) -> Result<Vec<ConvergenceRecord>> {
    config.validate()?;
    let mut records: Vec<ConvergenceRecord> = config
        .kappa_list
        .par_iter()
        .map(|&kappa| {
            let start = Instant::now();
            sweep_record(config, spec, psi0, kappa).unwrap_or_else(|e| {
                ConvergenceRecord::failed(kappa, config.kappa_base, &e, start.elapsed().as_secs_f64())
            })
        })
        .collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in records.iter_mut() {
        if r.failure.is_none() {
            xs.push(r.varkappa);
            ys.push(r.error_i);
            r.slope_running = fit_loglog_slope(&xs, &ys);
        }
    }
    Ok(records)
}

impl Propagator for DressedPropagator {
    fn grid(&self) -> &SpectralGrid {
        self.inner.grid()
    }

    fn propagate(&self, field: &WaveField, t: f64) -> Result<WaveField> {
        DressedPropagator::propagate(self, field, t)
    }
}
