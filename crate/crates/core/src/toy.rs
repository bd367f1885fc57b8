//! Closed-form single-jump model: the cocycle `V(t,s)`, the transport
//! boundary-value problem it resolves, and the input/output reflection pair.

use crate::error::{Error, Result};
use crate::field::WaveField;
use crate::linalg::{conj_matrix, frobenius, vector_norm, CMatrix, CVector, HermitianEigen, I};
use crate::model::ModelSpec;
use crate::spectral::{multiply_phase, shift_cells};

/// `1_{[0,t)}(s)` for `t ≥ 0` and `-1_{[t,0)}(s)` for `t < 0`.
pub fn jump_indicator(t: f64, s: f64) -> i32 {
    (s < t) as i32 - (s < 0.0) as i32
}

/// The same indicator on integer cell coordinates.
pub fn jump_indicator_cells(p: i64, q: i64) -> i32 {
    (q < p) as i32 - (q < 0) as i32
}

pub fn sigma_power(sigma: &CMatrix, d: i32) -> CMatrix {
    match d {
        0 => CMatrix::identity(sigma.nrows(), sigma.ncols()),
        1 => sigma.clone(),
        -1 => sigma.adjoint(),
        _ => unreachable!("jump indicator takes values in {{-1, 0, 1}}"),
    }
}

/// `S(s) = e^{isϰ} σ e^{-isϰ}`.
pub fn jumped_sigma(kappa: &HermitianEigen, sigma: &CMatrix, s: f64) -> CMatrix {
    kappa.evolve(-s) * sigma * kappa.evolve(s)
}

/// The unitary family `V(t,s)` of a model, with the Hamiltonian diagonalized once.
#[derive(Debug, Clone)]
pub struct Cocycle {
    kappa: HermitianEigen,
    sigma: CMatrix,
}

impl Cocycle {
    pub fn new(model: &ModelSpec) -> Self {
        Self {
            kappa: model.kappa_eigen(),
            sigma: model.sigma.clone(),
        }
    }

    pub fn jumped(&self, s: f64) -> CMatrix {
        jumped_sigma(&self.kappa, &self.sigma, s)
    }

    /// `V(t,s) = e^{-itϰ} S(s)^{Δ₀ᵗ(s)}`.
    pub fn at(&self, t: f64, s: f64) -> CMatrix {
        let free = self.kappa.evolve(t);
        match jump_indicator(t, s) {
            0 => free,
            d => free * sigma_power(&self.jumped(s), d),
        }
    }
}

pub fn cocycle_v(model: &ModelSpec, t: f64, s: f64) -> CMatrix {
    Cocycle::new(model).at(t, s)
}

/// Resolves the boundary-value problem over `p` whole cells.
pub fn solve_toy_bvp_cells(model: &ModelSpec, chi0: &WaveField, p: i64) -> WaveField {
    let kappa = model.kappa_eigen();
    let grid = chi0.grid().clone();
    let origin = grid.origin() as i64;
    let sigma = &model.sigma;
    let sigma_inv = sigma.adjoint();
    let chi_zero = multiply_phase(chi0, &kappa, 1.0);
    let jumped = chi_zero.map_rows(|j, v| match jump_indicator_cells(p, j as i64 - origin) {
        1 => sigma * v,
        -1 => &sigma_inv * v,
        _ => v,
    });
    multiply_phase(&shift_cells(&jumped, p), &kappa, -1.0)
}

/// `χᵗ(z) = e^{izϰ} χ_t(z+t)` with `χ_t(s) = σ^{Δ₀ᵗ(s)} e^{-isϰ} χ⁰(s)`.
pub fn solve_toy_bvp(model: &ModelSpec, chi0: &WaveField, t: f64) -> Result<WaveField> {
    let p = chi0.grid().cells(t)?;
    Ok(solve_toy_bvp_cells(model, chi0, p))
}

/// `‖χ(0₋) - σχ(0)‖` read off the samples adjacent to the origin.
pub fn boundary_defect(model: &ModelSpec, chi: &WaveField) -> f64 {
    let o = chi.grid().origin();
    let p = chi.position();
    vector_norm(&(p.row(o - 1) - &model.sigma * p.row(o)))
}

/// Discrete residual of `dV + iϰV dt = (σ - 1)V d1_t(s)` applied to `η`.
pub fn ito_residual(model: &ModelSpec, t: f64, dt: f64, s: f64, eta: &CVector) -> f64 {
    let v = Cocycle::new(model);
    let now = v.at(t, s) * eta;
    let next = v.at(t + dt, s) * eta;
    let d = (jump_indicator(t + dt, s) - jump_indicator(t, s)) as f64;
    let n = model.dim();
    let jump = (&model.sigma - CMatrix::identity(n, n)) * &now * num_complex::Complex64::from(d);
    let drift = &model.kappa_op * &now * (I * dt);
    vector_norm(&(next - &now + drift - jump))
}

/// Input and output waves on the full grid; the physical pair lives on `z ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct IoPair {
    pub input: WaveField,
    pub output: WaveField,
}

impl IoPair {
    /// `∫_{ℝ⁺}(‖ψ‖² + ‖ψ̃‖²)`, counting the origin sample once (in the input).
    pub fn half_line_norm_sq(&self) -> f64 {
        let o = self.input.grid().origin();
        self.input.partial_norm_sq(|j| j >= o) + self.output.partial_norm_sq(|j| j > o)
    }

    /// The single wave carrying input on `z ≥ 0` and reflected output on `z < 0`.
    pub fn truncated(&self) -> WaveField {
        let grid = self.input.grid().clone();
        let o = grid.origin();
        let mut chi = self.input.clone();
        for j in 0..o {
            chi.set_row(j, &self.output.row(grid.reflected_index(j)));
        }
        chi
    }

    /// `max_z ‖ψ̃(-z) - S(z)ψ(z)‖` over every grid sample.
    pub fn connection_residual(&self, model: &ModelSpec) -> f64 {
        let c = Cocycle::new(model);
        let grid = self.input.grid();
        (0..grid.len())
            .map(|j| {
                let lhs = self.output.row(grid.reflected_index(j));
                let rhs = c.jumped(grid.z(j)) * self.input.row(j);
                vector_norm(&(lhs - rhs))
            })
            .fold(0.0, f64::max)
    }
}

fn evolve_pair(kappa: &HermitianEigen, input0: &WaveField, output0: &WaveField, p: i64) -> IoPair {
    let u = kappa.evolve(input0.grid().dz() * p as f64);
    IoPair {
        input: shift_cells(input0, p).multiply_rows(|_| u.clone()),
        output: shift_cells(output0, -p).multiply_rows(|_| u.clone()),
    }
}

/// Initial output `ψ̃⁰(-z) = S(z)ψ⁰(z)`, extended to the whole grid.
pub fn initial_output(model: &ModelSpec, psi0: &WaveField) -> WaveField {
    let c = Cocycle::new(model);
    let grid = psi0.grid().clone();
    psi0.position().multiply_rows(|j| c.jumped(grid.z(j))).reflect()
}

/// `ψᵗ(z) = e^{-itϰ}ψ⁰(z+t)` and `ψ̃ᵗ(z) = e^{-itϰ}ψ̃⁰(z-t)`.
pub fn io_reflection_pair(model: &ModelSpec, psi0: &WaveField, t: f64) -> Result<IoPair> {
    let grid = psi0.grid().clone();
    let p = grid.cells(t)?;
    let psi0 = psi0.position();
    let total = psi0.norm_sq();
    let o = grid.origin();
    let left = psi0.partial_norm_sq(|j| j <= o);
    if left > 1e-12 * total {
        return Err(Error::UnsupportedInput(format!(
            "initial input carries mass {left:.3e} on z <= 0"
        )));
    }
    let output0 = initial_output(model, &psi0);
    Ok(evolve_pair(&model.kappa_eigen(), &psi0, &output0, p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeReversalReport {
    /// `conj(ψ̃^{-t})` against the evolution of `conj(ψ̃⁰)` as an input wave.
    pub input_defect: f64,
    /// `conj(ψ^{-t})` against the evolution of `conj(ψ⁰)` as an output wave.
    pub output_defect: f64,
    /// Reflection connection of the exchanged pair.
    pub connection_defect: f64,
}

impl TimeReversalReport {
    pub fn max_defect(&self) -> f64 {
        self.input_defect.max(self.output_defect).max(self.connection_defect)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_defect() <= tol
    }
}

/// Fails with `SkippedPrecondition` unless `σ̄ = σ⁻¹` and `ϰ̄ = ϰ`.
pub fn time_reversal_preconditions(model: &ModelSpec) -> Result<()> {
    let tol = crate::linalg::TOLERANCES.unitary;
    let ds = frobenius(&(conj_matrix(&model.sigma) - model.sigma.adjoint()));
    if ds > tol {
        return Err(Error::SkippedPrecondition(format!(
            "conj(sigma) differs from its inverse by {ds:.3e}"
        )));
    }
    let dk = frobenius(&(conj_matrix(&model.kappa_op) - &model.kappa_op));
    if dk > crate::linalg::TOLERANCES.hermitian {
        return Err(Error::SkippedPrecondition(format!(
            "kappa is not real: conj defect {dk:.3e}"
        )));
    }
    Ok(())
}

/// Exchanges `ψ̄^{-t} ⇄ ψ̃ᵗ` and checks the result is again a solution pair.
pub fn time_reversal_check(model: &ModelSpec, psi0: &WaveField, t: f64) -> Result<TimeReversalReport> {
    time_reversal_preconditions(model)?;
    let p = psi0.grid().cells(t)?;
    let kappa = model.kappa_eigen();
    let psi0 = psi0.position();
    let out0 = initial_output(model, &psi0);
    let past = evolve_pair(&kappa, &psi0, &out0, -p);

    let reversed = IoPair {
        input: past.output.conj(),
        output: past.input.conj(),
    };
    let direct = evolve_pair(&kappa, &out0.conj(), &psi0.conj(), p);
    Ok(TimeReversalReport {
        input_defect: reversed.input.max_distance(&direct.input)?,
        output_defect: reversed.output.max_distance(&direct.output)?,
        connection_defect: reversed.connection_residual(model),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpectralGrid;
    use crate::linalg::{c, diag_real, identity, pauli_x, pauli_y, pauli_z};

    fn model() -> ModelSpec {
        ModelSpec::scalar_mass(pauli_z(), pauli_x(), 0.0).unwrap()
    }

    fn gaussian(grid: &SpectralGrid, z0: f64) -> WaveField {
        let eta = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        WaveField::from_profile(grid, &eta, |z| c((-(z - z0) * (z - z0)).exp(), 0.0))
    }

    #[test]
    fn no_jump_evolves_freely() {
        let m = ModelSpec::scalar_mass(pauli_z(), identity(2), 0.0).unwrap();
        let v = cocycle_v(&m, 2.0, 1.0);
        assert!(frobenius(&(v - m.kappa_eigen().evolve(2.0))) < 1e-14);
        let before = cocycle_v(&model(), 0.4, 1.0);
        assert!(frobenius(&(before - model().kappa_eigen().evolve(0.4))) < 1e-14);
    }

    #[test]
    fn jump_matches_matrix_product() {
        let m = model();
        let e = m.kappa_eigen().evolve(0.5);
        let expect = &e * pauli_x() * &e;
        assert!(frobenius(&(cocycle_v(&m, 1.0, 0.5) - expect)) < 1e-14);
    }

    #[test]
    fn negative_time_uses_inverse_jump() {
        let m = ModelSpec::scalar_mass(pauli_z(), diag_real(&[1.0, -1.0]).map(|x| x * I), 0.0);
        let m = m.unwrap();
        let v = cocycle_v(&m, -1.0, -0.5);
        let expect = m.kappa_eigen().evolve(-1.0) * jumped_sigma(&m.kappa_eigen(), &m.sigma, -0.5).adjoint();
        assert!(frobenius(&(v - expect)) < 1e-14);
    }

    #[test]
    fn free_transport_is_shift() {
        let g = SpectralGrid::new(8.0, 256).unwrap();
        let m = ModelSpec::scalar_mass(CMatrix::zeros(2, 2), identity(2), 0.0).unwrap();
        let f = gaussian(&g, 1.0);
        let out = solve_toy_bvp(&m, &f, 1.0).unwrap();
        assert!(out.max_distance(&shift_cells(&f, 16)).unwrap() < 1e-15);
        assert!(solve_toy_bvp(&model(), &f, 0.0).unwrap().max_distance(&f).unwrap() < 1e-15);
    }

    #[test]
    fn ito_no_jump_taylor_bound() {
        let m = ModelSpec::scalar_mass(pauli_z(), identity(2), 0.0).unwrap();
        let eta = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        for &dt in &[0.1, 0.01] {
            let r = ito_residual(&m, 0.3, dt, 0.35, &eta);
            assert!(r <= dt * dt / 2.0 + 1e-15);
        }
    }

    #[test]
    fn pair_at_zero_is_connected() {
        let g = SpectralGrid::new(8.0, 256).unwrap();
        let pair = io_reflection_pair(&model(), &gaussian(&g, 4.0), 0.0).unwrap();
        assert!(pair.connection_residual(&model()) < 1e-14);
    }

    #[test]
    fn input_on_left_rejected() {
        let g = SpectralGrid::new(8.0, 256).unwrap();
        let err = io_reflection_pair(&model(), &gaussian(&g, -2.0), 1.0);
        assert!(matches!(err, Err(Error::UnsupportedInput(_))));
    }

    #[test]
    fn time_reversal_needs_real_data() {
        let g = SpectralGrid::new(8.0, 64).unwrap();
        let m = ModelSpec::scalar_mass(pauli_y(), pauli_x(), 0.0).unwrap();
        let r = time_reversal_check(&m, &gaussian(&g, 4.0), 1.0);
        assert!(matches!(r, Err(Error::SkippedPrecondition(_))));
    }
}
