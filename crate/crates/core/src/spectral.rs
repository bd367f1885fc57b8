//! Pseudo-differential symbols, Hardy projections and exact pointwise/transport maps.
//!
//! A symbol `s(p)` is a function of the operator `i∂_z`. Since
//! `i∂_z e^{ikz} = -k e^{ikz}`, the table entry used on the mode `e^{ikz}` is
//! `s(-k)`; for even symbols such as `ε` the distinction disappears.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::WaveField;
use crate::grid::SpectralGrid;
use crate::linalg::{ensure_hermitian, CMatrix, HermitianEigen, TOLERANCES};
use crate::model::ModelSpec;

/// Per-mode Hermitian matrices, stored diagonalized.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    grid: SpectralGrid,
    entries: Vec<HermitianEigen>,
}

impl SymbolTable {
    /// Table whose entry at mode `k_m` is `f(k_m)`.
    pub fn from_mode_fn(grid: &SpectralGrid, f: impl Fn(f64) -> CMatrix) -> Result<Self> {
        let entries = grid
            .momenta()
            .map(|k| {
                let a = f(k);
                ensure_hermitian(&a, TOLERANCES.hermitian_input)?;
                Ok(HermitianEigen::new_unchecked(&a))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: grid.clone(),
            entries,
        })
    }

    /// Table realizing the operator `s(i∂_z)`.
    pub fn from_symbol(grid: &SpectralGrid, s: impl Fn(f64) -> CMatrix) -> Result<Self> {
        Self::from_mode_fn(grid, |k| s(-k))
    }

    /// Entries sharing one eigenbasis, with eigenvalue `f(k_m, w_i)` on basis vector `i`.
    pub fn diagonal_in(
        grid: &SpectralGrid,
        basis: &HermitianEigen,
        f: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let entries = grid
            .momenta()
            .map(|k| HermitianEigen {
                values: DVector::from_iterator(basis.dim(), basis.values.iter().map(|w| f(k, *w))),
                vectors: basis.vectors.clone(),
            })
            .collect();
        Self {
            grid: grid.clone(),
            entries,
        }
    }

    pub fn zero(grid: &SpectralGrid, n: usize) -> Self {
        Self::diagonal_in(grid, &HermitianEigen::new_unchecked(&CMatrix::zeros(n, n)), |_, _| 0.0)
    }

    /// Kinetic energy `ε(k) = (k² + μ²)^{1/2}`.
    pub fn energy(grid: &SpectralGrid, model: &ModelSpec) -> Self {
        Self::diagonal_in(grid, &model.mass_eigen(), |k, w| k.hypot(w))
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.entries.first().map_or(0, |e| e.dim())
    }

    /// Eigendecomposition of the entry applied to mode `m`.
    pub fn entry(&self, m: usize) -> &HermitianEigen {
        &self.entries[m]
    }

    pub fn matrix(&self, m: usize) -> CMatrix {
        self.entries[m].reconstruct()
    }

    /// Applies `f(entry_m)` to each momentum amplitude.
    pub fn apply_function(
        &self,
        field: &WaveField,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<WaveField> {
        if field.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        if field.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: field.dim(),
            });
        }
        let repr = field.representation();
        let amp = field.momentum();
        let out = amp.map_rows(|m, v| self.entries[m].map_complex(&f) * v);
        Ok(out.in_repr(repr))
    }
}

/// One-parameter unitary group acting on fields.
pub trait Propagator {
    fn grid(&self) -> &SpectralGrid;
    fn propagate(&self, field: &WaveField, t: f64) -> Result<WaveField>;
}

impl Propagator for SymbolTable {
    fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    fn propagate(&self, field: &WaveField, t: f64) -> Result<WaveField> {
        apply_propagator(field, self, t)
    }
}

/// Multiplies every momentum amplitude by `e^{-it·s(k_m)}`; keeps the input representation.
pub fn apply_propagator(field: &WaveField, symbol: &SymbolTable, t: f64) -> Result<WaveField> {
    symbol.apply_function(field, |x| Complex64::from_polar(1.0, -t * x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HardySide {
    Minus,
    Plus,
}

fn hardy_keeps(grid: &SpectralGrid, side: HardySide, cutoff: f64, m: usize) -> bool {
    let k = grid.k(m);
    let slack = 1e-9 * grid.dk();
    match side {
        HardySide::Minus => k <= cutoff + slack,
        HardySide::Plus => k > -cutoff + slack,
    }
}

/// Orthogonal projection onto the Hardy class with momentum cutoff `κ°`.
///
/// `Minus` keeps `k ≤ κ°`, `Plus` keeps `k > -κ°`; at `κ° = 0` the mode `k = 0`
/// belongs to `Minus` and the two projections sum to the identity.
pub fn hardy_project(field: &WaveField, side: HardySide, cutoff: f64) -> WaveField {
    let repr = field.representation();
    let grid = field.grid().clone();
    field
        .momentum()
        .masked(|m| hardy_keeps(&grid, side, cutoff, m))
        .in_repr(repr)
}

/// Fraction of the mass lying outside the Hardy class.
pub fn hardy_outside_fraction(field: &WaveField, side: HardySide, cutoff: f64) -> f64 {
    let amp = field.momentum();
    let total = amp.norm_sq();
    if total == 0.0 {
        return 0.0;
    }
    let grid = field.grid().clone();
    amp.partial_norm_sq(|m| !hardy_keeps(&grid, side, cutoff, m)) / total
}

/// Applies `op(j)` at every sample with `z_j < t` and leaves the rest untouched.
pub fn apply_left_of(field: &WaveField, t: f64, op: impl Fn(usize) -> CMatrix) -> WaveField {
    let cut = field.grid().first_at_or_right_of(t);
    field.position().map_rows(|j, v| if j < cut { op(j) * v } else { v })
}

/// `σ^{1_t(z)}` with `1_t(z) = 1` for `z < t`.
pub fn indicator_sigma_power(field: &WaveField, t: f64, sigma: &CMatrix) -> WaveField {
    apply_left_of(field, t, |_| sigma.clone())
}

/// `ψ'(z) = ψ(z + a)`, an exact circular relabeling of samples.
pub fn grid_shift(field: &WaveField, a: f64) -> Result<WaveField> {
    let p = field.grid().cells(a)?;
    Ok(shift_cells(field, p))
}

/// `out[j] = in[(j + p) mod N]`.
pub fn shift_cells(field: &WaveField, p: i64) -> WaveField {
    let src = field.position();
    let n = src.grid().len() as i64;
    let mut out = src.clone();
    for j in 0..n {
        let from = (j + p).rem_euclid(n) as usize;
        out.set_row(j as usize, &src.row(from));
    }
    out
}

/// Pointwise `ψ(z_j) -> e^{-i s z_j A} ψ(z_j)` for a diagonalized Hermitian `A`.
pub fn multiply_phase(field: &WaveField, generator: &HermitianEigen, s: f64) -> WaveField {
    let grid = field.grid().clone();
    field
        .position()
        .multiply_rows(|j| generator.evolve(s * grid.z(j)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Input,
    Output,
}

/// `E* e^{-itP} E`, with `E` multiplication by `e^{-iϰz}` (input) or `e^{iϰz}` (output).
#[derive(Debug, Clone)]
pub struct ConjugatedPropagator {
    base: SymbolTable,
    generator: HermitianEigen,
    direction: Direction,
}

impl ConjugatedPropagator {
    pub fn new(base: SymbolTable, kappa_shift: &CMatrix, direction: Direction) -> Result<Self> {
        if kappa_shift.nrows() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: kappa_shift.nrows(),
            });
        }
        Ok(Self {
            base,
            generator: HermitianEigen::new(kappa_shift)?,
            direction,
        })
    }

    fn sign(&self) -> f64 {
        match self.direction {
            Direction::Input => 1.0,
            Direction::Output => -1.0,
        }
    }

    pub fn base(&self) -> &SymbolTable {
        &self.base
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// `E ψ`.
    pub fn dress(&self, field: &WaveField) -> WaveField {
        multiply_phase(field, &self.generator, self.sign())
    }

    /// `E* ψ`.
    pub fn undress(&self, field: &WaveField) -> WaveField {
        multiply_phase(field, &self.generator, -self.sign())
    }
}

impl Propagator for ConjugatedPropagator {
    fn grid(&self) -> &SpectralGrid {
        self.base.grid()
    }

    fn propagate(&self, field: &WaveField, t: f64) -> Result<WaveField> {
        if field.grid() != self.base.grid() {
            return Err(Error::GridMismatch);
        }
        let repr = field.representation();
        let inner = apply_propagator(&self.dress(field), &self.base, t)?;
        Ok(self.undress(&inner).in_repr(repr))
    }
}
