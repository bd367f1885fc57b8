//! Uniform periodic grid on `[-L, L)` and its dual momentum grid.
//!
//! Position samples sit at `z_j = (j - N/2)·dz`, `j = 0..N`, so `z_{N/2} = 0`
//! exactly. Momentum samples use the standard discrete-Fourier ordering:
//! index `m < N/2` carries `k = m·dk` and index `m ≥ N/2` carries
//! `k = (m - N)·dk`, with `dk = π/L`. The most negative mode `-N/2·dk` is the
//! Nyquist mode.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Relative slack used when deciding whether a length is a whole number of cells.
pub const COMMENSURATE_TOL: f64 = 1e-9;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

#[derive(Clone)]
pub struct SpectralGrid {
    half_width: f64,
    points: usize,
    plans: Arc<Plans>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("half_width", &self.half_width)
            .field("points", &self.points)
            .finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.half_width == other.half_width && self.points == other.points
    }
}

impl SpectralGrid {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count must be a power of two >= 2, got {points}"
            )));
        }
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        };
        Ok(Self {
            half_width,
            points,
            plans: Arc::new(plans),
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn dz(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn dk(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }

    /// Index of the sample at `z = 0`.
    pub fn origin(&self) -> usize {
        self.points / 2
    }

    pub fn z(&self, j: usize) -> f64 {
        (j as f64 - (self.points / 2) as f64) * self.dz()
    }

    /// Signed mode number of momentum index `m`.
    pub fn mode_number(&self, m: usize) -> i64 {
        let n = self.points as i64;
        let m = m as i64;
        if m < n / 2 {
            m
        } else {
            m - n
        }
    }

    pub fn k(&self, m: usize) -> f64 {
        self.mode_number(m) as f64 * self.dk()
    }

    /// Momentum index of signed mode number `p` (taken modulo `N`).
    pub fn mode_index(&self, p: i64) -> usize {
        p.rem_euclid(self.points as i64) as usize
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|j| self.z(j))
    }

    pub fn momenta(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|m| self.k(m))
    }

    /// Number of cells spanned by `a`; fails unless `a/dz` is integral.
    pub fn cells(&self, a: f64) -> Result<i64> {
        let ratio = a / self.dz();
        let rounded = ratio.round();
        if !ratio.is_finite() || (ratio - rounded).abs() > COMMENSURATE_TOL * rounded.abs().max(1.0)
        {
            return Err(Error::NonCommensurateShift {
                shift: a,
                dz: self.dz(),
            });
        }
        Ok(rounded as i64)
    }

    /// First sample index with `z_j ≥ t`; samples below it satisfy `z_j < t`.
    pub fn first_at_or_right_of(&self, t: f64) -> usize {
        let cut = (t / self.dz() - COMMENSURATE_TOL).ceil() + self.origin() as f64;
        cut.clamp(0.0, self.points as f64) as usize
    }

    /// Nearest sample index to `z`, with periodic wrap.
    pub fn nearest_index(&self, z: f64) -> usize {
        let p = (z / self.dz()).round() as i64 + self.origin() as i64;
        p.rem_euclid(self.points as i64) as usize
    }

    /// Index of the sample at `-z_j` on the torus.
    pub fn reflected_index(&self, j: usize) -> usize {
        (self.points - j) % self.points
    }

    /// True when the sample lies within the guard band `|z| ≥ 3L/4` near the wrap seam.
    pub fn in_guard_band(&self, j: usize) -> bool {
        self.z(j).abs() >= 0.75 * self.half_width
    }

    pub(crate) fn fft_forward(&self, data: &mut [Complex64]) {
        self.plans.forward.process(data);
    }

    pub(crate) fn fft_inverse(&self, data: &mut [Complex64]) {
        self.plans.inverse.process(data);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn reciprocity() {
        for &(l, n) in &[(1.0, 8), (16.0, 1024), (3.7, 64)] {
            let g = SpectralGrid::new(l, n).unwrap();
            assert!((g.dz() * g.dk() * n as f64 - 2.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn momentum_range_and_ordering() {
        let g = SpectralGrid::new(2.0, 8).unwrap();
        let ks: Vec<f64> = g.momenta().collect();
        let dk = PI / 2.0;
        assert_eq!(ks[0], 0.0);
        assert!((ks[3] - 3.0 * dk).abs() < 1e-15);
        assert!((ks[4] + 4.0 * dk).abs() < 1e-15);
        assert!((ks[7] + dk).abs() < 1e-15);
        let max = ks.iter().cloned().fold(f64::MIN, f64::max);
        let min = ks.iter().cloned().fold(f64::MAX, f64::min);
        assert!((min + PI * 8.0 / 4.0).abs() < 1e-12);
        assert!((max - PI * 6.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(SpectralGrid::new(1.0, 12).is_err());
        assert!(SpectralGrid::new(0.0, 8).is_err());
        assert!(SpectralGrid::new(-1.0, 8).is_err());
    }

    #[test]
    fn origin_sits_at_zero() {
        let g = SpectralGrid::new(16.0, 1024).unwrap();
        assert_eq!(g.z(g.origin()), 0.0);
        assert_eq!(g.z(0), -16.0);
    }

    #[test]
    fn commensurate_cells() {
        let g = SpectralGrid::new(16.0, 1024).unwrap();
        assert_eq!(g.cells(0.5).unwrap(), 16);
        assert_eq!(g.cells(-2.0).unwrap(), -64);
        assert!(matches!(g.cells(0.01), Err(Error::NonCommensurateShift { .. })));
    }

    #[test]
    fn threshold_indexing() {
        let g = SpectralGrid::new(1.0, 8).unwrap();
        assert_eq!(g.first_at_or_right_of(-1.0), 0);
        assert_eq!(g.first_at_or_right_of(1.0), 8);
        assert_eq!(g.first_at_or_right_of(0.0), 4);
        assert_eq!(g.first_at_or_right_of(0.1), 5);
        assert_eq!(g.first_at_or_right_of(0.25), 5);
    }
}
