//! `C^n`-valued wave fields sampled on a [`SpectralGrid`].
//!
//! The momentum representation stores the Fourier amplitudes
//! `g(k) = ∫ e^{-ikz} ψ(z) dz`, discretized as `g_m = dz Σ_j e^{-i k_m z_j} ψ_j`,
//! so that `ψ(z) = (1/2π) ∫ e^{ikz} g(k) dk` and
//! `‖ψ‖² = dz Σ_j ‖ψ_j‖² = (dk/2π) Σ_m ‖g_m‖²`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpectralGrid;
use crate::linalg::{CMatrix, CVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Position,
    Momentum,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Position => "position",
            Representation::Momentum => "momentum",
        }
    }

    pub fn flag(self) -> u8 {
        match self {
            Representation::Position => 0,
            Representation::Momentum => 1,
        }
    }

    pub fn from_flag(flag: u8) -> Option<Self> {
        match flag {
            0 => Some(Representation::Position),
            1 => Some(Representation::Momentum),
            _ => None,
        }
    }
}

/// Field samples: row `j` holds the `n` components at grid point (or mode) `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: SpectralGrid,
    values: CMatrix,
    repr: Representation,
}

impl WaveField {
    pub fn zeros(grid: &SpectralGrid, n: usize) -> Self {
        Self {
            grid: grid.clone(),
            values: CMatrix::zeros(grid.len(), n),
            repr: Representation::Position,
        }
    }

    pub fn from_values(grid: &SpectralGrid, values: CMatrix, repr: Representation) -> Result<Self> {
        if values.nrows() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.nrows(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            values,
            repr,
        })
    }

    /// Position samples `ψ(z_j) = f(z_j)`.
    pub fn from_fn(grid: &SpectralGrid, n: usize, f: impl Fn(f64) -> CVector) -> Self {
        let mut field = Self::zeros(grid, n);
        for j in 0..grid.len() {
            field.set_row(j, &f(grid.z(j)));
        }
        field
    }

    /// Momentum amplitudes `g(k_m) = f(k_m)`.
    pub fn from_momentum_fn(grid: &SpectralGrid, n: usize, f: impl Fn(f64) -> CVector) -> Self {
        let mut field = Self::zeros(grid, n);
        field.repr = Representation::Momentum;
        for m in 0..grid.len() {
            field.set_row(m, &f(grid.k(m)));
        }
        field
    }

    /// Constant vector `η` times a scalar profile.
    pub fn from_profile(grid: &SpectralGrid, eta: &CVector, profile: impl Fn(f64) -> Complex64) -> Self {
        Self::from_fn(grid, eta.len(), |z| eta * profile(z))
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut CMatrix {
        &mut self.values
    }

    /// Row `j` as a column vector.
    pub fn row(&self, j: usize) -> CVector {
        self.values.row(j).transpose()
    }

    pub fn set_row(&mut self, j: usize, v: &CVector) {
        for (i, x) in v.iter().enumerate() {
            self.values[(j, i)] = *x;
        }
    }

    pub fn require(&self, repr: Representation) -> Result<()> {
        if self.repr != repr {
            return Err(Error::WrongRepresentation {
                found: self.repr.name(),
                required: repr.name(),
            });
        }
        Ok(())
    }

    pub fn same_grid(&self, other: &WaveField) -> Result<()> {
        if self.grid != other.grid || self.dim() != other.dim() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    fn cell_weight(&self) -> f64 {
        match self.repr {
            Representation::Position => self.grid.dz(),
            Representation::Momentum => self.grid.dk() / (2.0 * std::f64::consts::PI),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.cell_weight() * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &WaveField) -> Result<Complex64> {
        self.same_grid(other)?;
        other.require(self.repr)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.cell_weight())
    }

    /// Mass carried by the samples selected by `keep`, in the current representation.
    pub fn partial_norm_sq(&self, keep: impl Fn(usize) -> bool) -> f64 {
        let w = self.cell_weight();
        (0..self.grid.len())
            .filter(|j| keep(*j))
            .map(|j| self.values.row(j).iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            * w
    }

    pub fn to_momentum(&self) -> Result<WaveField> {
        self.require(Representation::Position)?;
        let n_pts = self.grid.len();
        let dz = self.grid.dz();
        let mut out = self.clone();
        for col in out.values.as_mut_slice().chunks_mut(n_pts) {
            self.grid.fft_forward(col);
            for (m, x) in col.iter_mut().enumerate() {
                let sign = if m % 2 == 0 { dz } else { -dz };
                *x *= sign;
            }
        }
        out.repr = Representation::Momentum;
        Ok(out)
    }

    pub fn to_position(&self) -> Result<WaveField> {
        self.require(Representation::Momentum)?;
        let n_pts = self.grid.len();
        let scale = 1.0 / (n_pts as f64 * self.grid.dz());
        let mut out = self.clone();
        for col in out.values.as_mut_slice().chunks_mut(n_pts) {
            for (m, x) in col.iter_mut().enumerate() {
                let sign = if m % 2 == 0 { scale } else { -scale };
                *x *= sign;
            }
            self.grid.fft_inverse(col);
        }
        out.repr = Representation::Position;
        Ok(out)
    }

    /// This field in the requested representation, converting if needed.
    pub fn in_repr(&self, repr: Representation) -> WaveField {
        match (self.repr, repr) {
            (a, b) if a == b => self.clone(),
            (Representation::Position, _) => self.to_momentum().expect("position field"),
            (Representation::Momentum, _) => self.to_position().expect("momentum field"),
        }
    }

    pub fn position(&self) -> WaveField {
        self.in_repr(Representation::Position)
    }

    pub fn momentum(&self) -> WaveField {
        self.in_repr(Representation::Momentum)
    }

    /// Replaces row `j` by `f(j, row_j)`.
    pub fn map_rows(&self, f: impl Fn(usize, CVector) -> CVector) -> WaveField {
        let mut out = self.clone();
        for j in 0..self.grid.len() {
            let v = f(j, self.row(j));
            out.set_row(j, &v);
        }
        out
    }

    /// Pointwise multiplication of row `j` by the matrix `m(j)`.
    pub fn multiply_rows(&self, m: impl Fn(usize) -> CMatrix) -> WaveField {
        self.map_rows(|j, v| m(j) * v)
    }

    /// Entrywise complex conjugate of the position samples.
    pub fn conj(&self) -> WaveField {
        let mut out = self.position();
        out.values.iter_mut().for_each(|z| *z = z.conj());
        out
    }

    /// `ψ(z) -> ψ(-z)` on position samples (index `j -> N - j mod N`).
    pub fn reflect(&self) -> WaveField {
        let src = self.position();
        let mut out = src.clone();
        for j in 0..self.grid.len() {
            out.set_row(j, &src.row(self.grid.reflected_index(j)));
        }
        out
    }

    /// Zeroes every row for which `keep` is false.
    pub fn masked(&self, keep: impl Fn(usize) -> bool) -> WaveField {
        let n = self.dim();
        let zero = CVector::zeros(n);
        self.map_rows(|j, v| if keep(j) { v } else { zero.clone() })
    }

    pub fn scale(&self, a: Complex64) -> WaveField {
        let mut out = self.clone();
        out.values *= a;
        out
    }

    pub fn add(&self, other: &WaveField) -> Result<WaveField> {
        self.same_grid(other)?;
        let other = other.in_repr(self.repr);
        let mut out = self.clone();
        out.values += &other.values;
        Ok(out)
    }

    pub fn sub(&self, other: &WaveField) -> Result<WaveField> {
        self.same_grid(other)?;
        let other = other.in_repr(self.repr);
        let mut out = self.clone();
        out.values -= &other.values;
        Ok(out)
    }

    /// `max_j ‖a_j - b_j‖` over position samples.
    pub fn max_distance(&self, other: &WaveField) -> Result<f64> {
        self.same_grid(other)?;
        let a = self.position();
        let b = other.position();
        Ok((0..self.grid.len())
            .map(|j| {
                a.values
                    .row(j)
                    .iter()
                    .zip(b.values.row(j).iter())
                    .map(|(x, y)| (x - y).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max))
    }

    /// `‖self - other‖` in L².
    pub fn distance(&self, other: &WaveField) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Fraction of the position-space mass inside the wrap-seam guard band.
    pub fn guard_band_fraction(&self) -> f64 {
        let p = self.position();
        let total = p.norm_sq();
        if total == 0.0 {
            return 0.0;
        }
        p.partial_norm_sq(|j| self.grid.in_guard_band(j)) / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn grid() -> SpectralGrid {
        SpectralGrid::new(4.0, 64).unwrap()
    }

    #[test]
    fn zero_field_transforms_to_zero() {
        let f = WaveField::zeros(&grid(), 2);
        let g = f.to_momentum().unwrap();
        assert!(g.values().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn single_mode_is_concentrated() {
        let g = grid();
        let k1 = g.k(1);
        let eta = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 2.0)]);
        let f = WaveField::from_profile(&g, &eta, |z| Complex64::from_polar(1.0, k1 * z));
        let amp = f.to_momentum().unwrap();
        for m in 0..g.len() {
            let mass: f64 = amp.row(m).iter().map(|z| z.norm_sqr()).sum();
            if m == 1 {
                // g = 2L·η for a unit-amplitude plane wave
                assert!((amp.row(m) - &eta * c(2.0 * g.half_width(), 0.0)).norm() < 1e-12);
            } else {
                assert!(mass < 1e-24, "mode {m} has mass {mass}");
            }
        }
    }

    #[test]
    fn wrong_representation_rejected() {
        let f = WaveField::zeros(&grid(), 1);
        assert!(matches!(f.to_position(), Err(Error::WrongRepresentation { .. })));
        let m = f.to_momentum().unwrap();
        assert!(matches!(m.to_momentum(), Err(Error::WrongRepresentation { .. })));
    }

    #[test]
    fn reflection_is_involution() {
        let g = grid();
        let f = WaveField::from_fn(&g, 1, |z| CVector::from_element(1, c(z, z * z)));
        let r = f.reflect();
        assert_eq!(r.row(g.origin() + 3)[0], c(-3.0 * g.dz(), 9.0 * g.dz() * g.dz()));
        assert_eq!(r.reflect(), f);
    }
}
