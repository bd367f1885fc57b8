//! Relativistic reflection model: positive-energy propagation of the truncated
//! wave `σ_ϰ^{1₀} e^{-itε̂_ϰ} φ⁰` and its input/output read-off at `z = 0`.

use crate::error::{Error, Result};
use crate::field::WaveField;
use crate::grid::SpectralGrid;
use crate::linalg::{conj_matrix, frobenius, vector_norm, CMatrix, HermitianEigen, TOLERANCES};
use crate::model::DressedSpec;
use crate::spectral::{
    hardy_outside_fraction, ConjugatedPropagator, Direction, HardySide, Propagator, SymbolTable,
};

/// Maximum fraction of mass allowed outside a Hardy class.
pub const HARDY_TOL: f64 = 1e-8;

/// `ε̂_ϰ = E* ε̂ E` (input) or `ε̌_ϰ = Ě* ε̂ Ě` (output).
pub fn conjugated_symbol(
    spec: &DressedSpec,
    base: &SymbolTable,
    direction: Direction,
) -> Result<ConjugatedPropagator> {
    ConjugatedPropagator::new(base.clone(), &spec.kappa_shift, direction)
}

/// `π̂ᵗ = e^{itε̂_ϰ} 1̂₀ e^{-itε̂_ϰ}`, where `1̂₀` keeps the samples with `z < 0`.
#[derive(Debug, Clone)]
pub struct ProjectorPi {
    propagator: ConjugatedPropagator,
    t: f64,
}

impl ProjectorPi {
    pub fn apply(&self, field: &WaveField) -> Result<WaveField> {
        let o = field.grid().origin();
        let moved = self.propagator.propagate(field, self.t)?.masked(|j| j < o);
        self.propagator.propagate(&moved, -self.t)
    }
}

pub fn projector_pi(spec: &DressedSpec, grid: &SpectralGrid, t: f64) -> Result<ProjectorPi> {
    Ok(ReflectModel::new(spec, grid)?.projector(t))
}

/// Cached propagators for one spec on one grid.
#[derive(Debug, Clone)]
pub struct ReflectModel {
    spec: DressedSpec,
    input: ConjugatedPropagator,
    output: ConjugatedPropagator,
    shift: HermitianEigen,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectSolution {
    /// `φᵗ` on `z ≥ 0`, zero elsewhere.
    pub input: WaveField,
    /// `φ̃ᵗ(w) = Φᵗ(-w)` on `w ≥ 0` (the `w = 0` sample holds the left limit `Φᵗ(0₋)`).
    pub output: WaveField,
    /// The single discontinuous field `Φᵗ`.
    pub truncated: WaveField,
    /// `‖φ̃ᵗ(0) - σφᵗ(0)‖`.
    pub boundary_residual: f64,
}

impl ReflectSolution {
    /// `∫_{ℝ⁺}(‖φ‖² + ‖φ̃‖²)`, with the origin counted once.
    pub fn half_line_norm_sq(&self) -> f64 {
        let o = self.input.grid().origin();
        self.input.partial_norm_sq(|j| j >= o) + self.output.partial_norm_sq(|j| j > o)
    }
}

impl ReflectModel {
    pub fn new(spec: &DressedSpec, grid: &SpectralGrid) -> Result<Self> {
        let base = SymbolTable::energy(grid, &spec.model);
        Ok(Self {
            spec: spec.clone(),
            input: conjugated_symbol(spec, &base, Direction::Input)?,
            output: conjugated_symbol(spec, &base, Direction::Output)?,
            shift: spec.shift_eigen(),
        })
    }

    pub fn spec(&self) -> &DressedSpec {
        &self.spec
    }

    pub fn input_propagator(&self) -> &ConjugatedPropagator {
        &self.input
    }

    pub fn output_propagator(&self) -> &ConjugatedPropagator {
        &self.output
    }

    pub fn projector(&self, t: f64) -> ProjectorPi {
        ProjectorPi {
            propagator: self.input.clone(),
            t,
        }
    }

    /// `σ_ϰ(z_j) = e^{iz_jϰ} σ e^{-iz_jϰ}`.
    pub fn sigma_at(&self, z: f64) -> CMatrix {
        self.shift.evolve(-z) * &self.spec.model.sigma * self.shift.evolve(z)
    }

    /// Pointwise multiplication by `σ_ϰ(z)`.
    pub fn sigma_hat(&self, field: &WaveField) -> WaveField {
        let grid = field.grid().clone();
        field.position().multiply_rows(|j| self.sigma_at(grid.z(j)))
    }

    /// Checks that `E φ⁰` lies in the input Hardy class.
    pub fn check_class(&self, phi0: &WaveField) -> Result<()> {
        let outside = hardy_outside_fraction(&self.input.dress(phi0), HardySide::Minus, 0.0);
        if outside > HARDY_TOL {
            return Err(Error::NotInHardyClass { outside });
        }
        Ok(())
    }

    /// Free input evolution `e^{-itε̂_ϰ} φ⁰` on the whole line.
    pub fn evolve_input(&self, phi0: &WaveField, t: f64) -> Result<WaveField> {
        self.input.propagate(phi0, t)
    }

    /// Output evolved on its own: `e^{-itε̌_ϰ} R σ̂_ϰ φ⁰`.
    pub fn evolve_output(&self, phi0: &WaveField, t: f64) -> Result<WaveField> {
        self.output.propagate(&self.sigma_hat(phi0).reflect(), t)
    }

    /// `Φᵗ = e^{-itε̂_ϰ}(φ⁰ + (σ̂_ϰ - 1)π̂ᵗφ⁰)`.
    pub fn truncated_field(&self, phi0: &WaveField, t: f64) -> Result<WaveField> {
        let phi0 = phi0.position();
        let pi = self.projector(t).apply(&phi0)?;
        let jumped = self.sigma_hat(&pi).sub(&pi)?;
        let phi_t = phi0.add(&jumped)?;
        self.input.propagate(&phi_t, t)
    }

    pub fn solve(&self, phi0: &WaveField, t: f64) -> Result<ReflectSolution> {
        if phi0.dim() != self.spec.model.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.spec.model.dim(),
                got: phi0.dim(),
            });
        }
        self.check_class(phi0)?;
        let truncated = self.truncated_field(phi0, t)?.position();
        let grid = truncated.grid().clone();
        let o = grid.origin();
        let input = truncated.masked(|j| j >= o);
        let mut output = WaveField::zeros(&grid, truncated.dim());
        output.set_row(o, &truncated.row(o - 1));
        for i in 1..o {
            output.set_row(o + i, &truncated.row(o - i));
        }
        let boundary_residual =
            vector_norm(&(output.row(o) - &self.spec.model.sigma * input.row(o)));
        Ok(ReflectSolution {
            input,
            output,
            truncated,
            boundary_residual,
        })
    }

    /// `max_j ‖φ̃ᵗ(-z_j) - σ_ϰ(z_j)φᵗ(z_j)‖` with both waves evolved independently.
    pub fn connection_defect(&self, phi0: &WaveField, t: f64) -> Result<f64> {
        let phi = self.evolve_input(phi0, t)?;
        let phi_tilde = self.evolve_output(phi0, t)?;
        let grid = phi.grid().clone();
        let proj = self.sigma_hat(&phi);
        Ok((0..grid.len())
            .map(|j| vector_norm(&(phi_tilde.row(grid.reflected_index(j)) - proj.row(j))))
            .fold(0.0, f64::max))
    }

    /// Conjugation with `t -> -t` and input/output exchange, as sample-wise defects.
    pub fn time_reversal_check(&self, phi0: &WaveField, t: f64) -> Result<ReflectReversalReport> {
        let model = &self.spec.model;
        let tol = TOLERANCES;
        let checks = [
            ("sigma", frobenius(&(conj_matrix(&model.sigma) - model.sigma.adjoint())), tol.unitary),
            ("kappa", frobenius(&(conj_matrix(&self.spec.kappa_shift) - &self.spec.kappa_shift)), tol.hermitian),
            ("mass", frobenius(&(conj_matrix(&model.mass_op) - &model.mass_op)), tol.hermitian),
        ];
        for (name, defect, limit) in checks {
            if defect > limit {
                return Err(Error::SkippedPrecondition(format!(
                    "{name} is not invariant under conjugation (defect {defect:.3e})"
                )));
            }
        }
        let phi0 = phi0.position();
        let out0 = self.sigma_hat(&phi0).reflect();
        let reversed_input = self.output.propagate(&out0, -t)?.conj();
        let reversed_output = self.input.propagate(&phi0, -t)?.conj();
        let direct_input = self.input.propagate(&out0.conj(), t)?;
        let direct_output = self.output.propagate(&phi0.conj(), t)?;
        let connected = self.sigma_hat(&reversed_input).reflect();
        Ok(ReflectReversalReport {
            input_defect: reversed_input.max_distance(&direct_input)?,
            output_defect: reversed_output.max_distance(&direct_output)?,
            connection_defect: reversed_output.max_distance(&connected)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectReversalReport {
    pub input_defect: f64,
    pub output_defect: f64,
    pub connection_defect: f64,
}

impl ReflectReversalReport {
    pub fn max_defect(&self) -> f64 {
        self.input_defect.max(self.output_defect).max(self.connection_defect)
    }
}

pub fn solve_reflect_bvp(spec: &DressedSpec, phi0: &WaveField, t: f64) -> Result<ReflectSolution> {
    ReflectModel::new(spec, phi0.grid())?.solve(phi0, t)
}

/// `j(z) = ‖φ̃(z)‖² - ‖φ(z)‖²` at the sample nearest to `z`.
pub fn probability_current(phi: &WaveField, phi_tilde: &WaveField, z: f64) -> Result<f64> {
    phi.same_grid(phi_tilde)?;
    let j = phi.grid().nearest_index(z);
    let a = phi.position().row(j);
    let b = phi_tilde.position().row(j);
    Ok(b.norm_squared() - a.norm_squared())
}
