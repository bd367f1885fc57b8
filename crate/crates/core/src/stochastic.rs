//! Random jump times and the trajectory-ensemble side of the equivalence.
//!
//! Sampling uses ChaCha20 with one stream per block of trajectories, so the
//! ensemble depends only on `(seed, M)` and never on the thread count.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::WaveField;
use crate::grid::SpectralGrid;
use crate::linalg::{ensure_hermitian, vector_norm, CMatrix, CVector, TOLERANCES};
use crate::model::ModelSpec;
use crate::toy::{solve_toy_bvp, Cocycle};

/// Trajectories drawn from one RNG stream.
pub const BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityKind {
    /// `ρ(s) = r e^{-rs}`.
    Exponential { rate: f64 },
    /// `ρ = 1/(hi - lo)` on `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    /// All mass spread over the single grid cell containing `s0`.
    Cell { s0: f64 },
}

/// A jump-time density tabulated through its CDF at the grid knots `z_j ≥ 0`.
#[derive(Debug, Clone)]
pub struct JumpDensity {
    kind: DensityKind,
    grid: SpectralGrid,
    knots: Vec<f64>,
    cdf: Vec<f64>,
}

impl JumpDensity {
    pub fn new(kind: DensityKind, grid: &SpectralGrid) -> Result<Self> {
        let o = grid.origin();
        let mut knots: Vec<f64> = (o..grid.len()).map(|j| grid.z(j)).collect();
        knots.push(grid.half_width());
        let cell = match kind {
            DensityKind::Cell { s0 } => {
                if !(0.0..grid.half_width()).contains(&s0) {
                    return Err(Error::DegenerateDensity);
                }
                let j = ((s0 / grid.dz()).floor() as usize).min(knots.len() - 2);
                Some((knots[j], knots[j + 1]))
            }
            _ => None,
        };
        let cdf_at = |s: f64| -> f64 {
            match kind {
                DensityKind::Exponential { rate } => -(-rate * s).exp_m1(),
                DensityKind::Uniform { lo, hi } => ((s - lo) / (hi - lo)).clamp(0.0, 1.0),
                DensityKind::Cell { .. } => {
                    let (a, b) = cell.unwrap();
                    ((s - a) / (b - a)).clamp(0.0, 1.0)
                }
            }
        };
        let valid = match kind {
            DensityKind::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            DensityKind::Uniform { lo, hi } => lo >= 0.0 && hi > lo && lo < grid.half_width(),
            DensityKind::Cell { .. } => true,
        };
        if !valid {
            return Err(Error::DegenerateDensity);
        }
        let cdf: Vec<f64> = knots.iter().map(|s| cdf_at(*s)).collect();
        if cdf.last().copied().unwrap_or(0.0) <= 0.0 {
            return Err(Error::DegenerateDensity);
        }
        Ok(Self {
            kind,
            grid: grid.clone(),
            knots,
            cdf,
        })
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    /// Mass beyond the right edge of the grid.
    pub fn tail_mass(&self) -> f64 {
        1.0 - self.cdf.last().copied().unwrap_or(0.0)
    }

    pub fn cdf(&self, s: f64) -> f64 {
        if s <= self.knots[0] {
            return 0.0;
        }
        let i = self.knots.partition_point(|x| *x <= s);
        if i >= self.knots.len() {
            return *self.cdf.last().unwrap();
        }
        let (a, b) = (self.knots[i - 1], self.knots[i]);
        let w = (s - a) / (b - a);
        self.cdf[i - 1] + w * (self.cdf[i] - self.cdf[i - 1])
    }

    /// Linear interpolation of the inverse CDF; `+∞` when `u` falls in the tail.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let last = *self.cdf.last().unwrap();
        if u >= last {
            return f64::INFINITY;
        }
        // first knot whose CDF exceeds u
        let i = self.cdf.partition_point(|c| *c <= u).max(1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let (a, b) = (self.knots[i - 1], self.knots[i]);
        a + (u - c0) / (c1 - c0) * (b - a)
    }

    /// Probability of the cell `[z_j, z_j + dz)` for `j ≥ N/2`, zero for `z_j < 0`.
    pub fn cell_mass(&self, j: usize) -> f64 {
        let o = self.grid.origin();
        if j < o {
            return 0.0;
        }
        self.cdf[j - o + 1] - self.cdf[j - o]
    }

    /// `χ⁰(z_j) = (P_j / dz)^{1/2} η`, so that `‖χ⁰‖² = 1 - tail`.
    pub fn initial_state(&self, eta: &CVector) -> WaveField {
        let dz = self.grid.dz();
        let mut chi = WaveField::zeros(&self.grid, eta.len());
        for j in self.grid.origin()..self.grid.len() {
            let a = (self.cell_mass(j) / dz).sqrt();
            chi.set_row(j, &(eta * Complex64::from(a)));
        }
        chi
    }
}

pub fn sample_jump_time<R: Rng + ?Sized>(density: &JumpDensity, rng: &mut R) -> f64 {
    density.inverse_cdf(rng.random::<f64>())
}

fn block_rng(seed: u64, block: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

fn block_ranges(count: usize) -> Vec<(usize, usize)> {
    (0..count.div_ceil(BLOCK))
        .map(|b| (b, BLOCK.min(count - b * BLOCK)))
        .collect()
}

/// Jump times `s_1, …, s_M` for a seed; identical for every thread count.
pub fn jump_times(density: &JumpDensity, count: usize, seed: u64) -> Vec<f64> {
    block_ranges(count)
        .into_par_iter()
        .map(|(b, len)| {
            let mut rng = block_rng(seed, b);
            (0..len).map(|_| sample_jump_time(density, &mut rng)).collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble {
    pub seed: u64,
    /// `(s_i, V(t, s_i)η)`.
    pub samples: Vec<(f64, CVector)>,
}

impl TrajectoryEnsemble {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `max_i |‖V(t,s_i)η‖ - 1|`.
    pub fn max_norm_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|(_, v)| (vector_norm(v) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn check_unit(eta: &CVector) -> Result<()> {
    let n = vector_norm(eta);
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::UnnormalizedAmplitudes { norm_sq: n * n });
    }
    Ok(())
}

pub fn sample_ensemble(
    model: &ModelSpec,
    density: &JumpDensity,
    eta: &CVector,
    t: f64,
    count: usize,
    seed: u64,
) -> Result<TrajectoryEnsemble> {
    check_unit(eta)?;
    let v = Cocycle::new(model);
    let samples = jump_times(density, count, seed)
        .into_par_iter()
        .map(|s| (s, v.at(t, s) * eta))
        .collect();
    Ok(TrajectoryEnsemble { seed, samples })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
    pub max_norm_defect: f64,
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
    defect: f64,
}

impl Moments {
    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
            defect: self.defect.max(o.defect),
        }
    }
}

/// Sample mean of `⟨V(t,s)η, A V(t,s)η⟩` with `s ~ ρ`, and its standard error.
pub fn mc_expectation(
    model: &ModelSpec,
    density: &JumpDensity,
    observable: &CMatrix,
    eta: &CVector,
    t: f64,
    count: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_unit(eta)?;
    ensure_hermitian(observable, TOLERANCES.hermitian_input)?;
    if count == 0 {
        return Err(Error::UnsupportedInput("empty ensemble".into()));
    }
    let v = Cocycle::new(model);
    let blocks: Vec<Moments> = block_ranges(count)
        .into_par_iter()
        .map(|(b, len)| {
            let mut rng = block_rng(seed, b);
            let mut m = Moments { n: 0.0, mean: 0.0, m2: 0.0, defect: 0.0 };
            for _ in 0..len {
                let s = sample_jump_time(density, &mut rng);
                let x = v.at(t, s) * eta;
                let val = x.dotc(&(observable * &x)).re;
                m = m.merge(Moments {
                    n: 1.0,
                    mean: val,
                    m2: 0.0,
                    defect: (vector_norm(&x) - 1.0).abs(),
                });
            }
            m
        })
        .collect();
    let total = blocks.into_iter().fold(
        Moments { n: 0.0, mean: 0.0, m2: 0.0, defect: 0.0 },
        Moments::merge,
    );
    let var = if count > 1 { total.m2 / (total.n - 1.0) } else { 0.0 };
    Ok(McEstimate {
        mean: total.mean,
        stderr: (var / total.n).sqrt(),
        count,
        max_norm_defect: total.defect,
    })
}

/// `⟨χᵗ, (A ⊗ 1)χᵗ⟩` for `χ⁰ = √ρ η` evolved by the boundary-value problem.
pub fn deterministic_expectation(
    model: &ModelSpec,
    density: &JumpDensity,
    observable: &CMatrix,
    eta: &CVector,
    t: f64,
) -> Result<f64> {
    check_unit(eta)?;
    ensure_hermitian(observable, TOLERANCES.hermitian_input)?;
    let chi0 = density.initial_state(eta);
    let chi = solve_toy_bvp(model, &chi0, t)?;
    let dz = chi.grid().dz();
    Ok((0..chi.grid().len())
        .map(|j| {
            let x = chi.row(j);
            x.dotc(&(observable * &x)).re
        })
        .sum::<f64>()
        * dz)
}
