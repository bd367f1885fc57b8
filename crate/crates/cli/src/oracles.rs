//! Independent reference computations the scenarios are checked against.

use dirac_jump::linalg::{self, c, CMatrix, CVector};
use dirac_jump::spectral::multiply_phase;
use dirac_jump::stochastic::DensityKind;
use dirac_jump::toy::Cocycle;
use dirac_jump::ultra::project_to_class;
use dirac_jump::{Direction, DressedSpec, ModelSpec, SpectralGrid, WaveField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::InitialSpec;

pub fn gaussian(grid: &SpectralGrid, eta: &CVector, init: &InitialSpec) -> WaveField {
    WaveField::from_profile(grid, eta, |z| {
        let u = (z - init.center) / init.width;
        Complex64::from_polar((-u * u / 2.0).exp(), init.carrier * z)
    })
}

pub fn normalized(f: &WaveField) -> WaveField {
    f.scale(c(1.0 / f.norm(), 0.0))
}

/// Normalized element of the input class below `cutoff`, built so that its
/// dressed amplitudes are the Gaussian `init`.
pub fn class_member(spec: &DressedSpec, grid: &SpectralGrid, eta: &CVector, init: &InitialSpec, cutoff: f64) -> WaveField {
    let dressed = gaussian(grid, eta, init);
    let raw = multiply_phase(&dressed, &spec.shift_eigen(), -1.0);
    let member = project_to_class(spec, &raw, cutoff, Direction::Input).expect("dimensions agree");
    normalized(&member)
}

/// `max_j ‖χᵗ(z_j) - V(t, z_j + t)χ⁰(z_j + t)‖` over the samples whose source lies on the grid.
pub fn cocycle_defect(model: &ModelSpec, chi0: &WaveField, chi: &WaveField, t: f64) -> f64 {
    let g = chi0.grid();
    let p = (t / g.dz()).round() as i64;
    let v = Cocycle::new(model);
    let chi0 = chi0.position();
    let chi = chi.position();
    (0..g.len())
        .filter_map(|j| {
            let src = j as i64 + p;
            (0..g.len() as i64).contains(&src).then(|| {
                let s = g.z(src as usize);
                (chi.row(j) - v.at(t, s) * chi0.row(src as usize)).norm()
            })
        })
        .fold(0.0, nan_max)
}

/// `max` that keeps a NaN instead of discarding it.
pub fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 48)
}

fn pdf(kind: DensityKind, grid: &SpectralGrid, s: f64) -> f64 {
    match kind {
        DensityKind::Exponential { rate } => rate * (-rate * s).exp(),
        DensityKind::Uniform { lo, hi } => if (lo..hi).contains(&s) { 1.0 / (hi - lo) } else { 0.0 },
        DensityKind::Cell { s0 } => {
            let a = (s0 / grid.dz()).floor() * grid.dz();
            if (a..a + grid.dz()).contains(&s) { 1.0 / grid.dz() } else { 0.0 }
        }
    }
}

fn survival(kind: DensityKind, grid: &SpectralGrid, s: f64) -> f64 {
    match kind {
        DensityKind::Exponential { rate } => (-rate * s).exp(),
        DensityKind::Uniform { lo, hi } => (1.0 - (s - lo) / (hi - lo)).clamp(0.0, 1.0),
        DensityKind::Cell { s0 } => {
            let a = (s0 / grid.dz()).floor() * grid.dz();
            (1.0 - (s - a) / grid.dz()).clamp(0.0, 1.0)
        }
    }
}

/// `∫₀^∞ ρ(s)⟨V(t,s)η, AV(t,s)η⟩ds` by adaptive Simpson on the pieces where
/// the integrand is smooth; past `max(t, 0)` it is constant and integrated exactly.
pub fn quadrature_expectation(model: &ModelSpec, kind: DensityKind, grid: &SpectralGrid, a: &CMatrix, eta: &CVector, t: f64, tol: f64) -> f64 {
    let v = Cocycle::new(model);
    let value = |s: f64| {
        let x = v.at(t, s) * eta;
        x.dotc(&(a * &x)).re
    };
    let end = t.max(0.0);
    let mut breaks = vec![0.0, end];
    match kind {
        DensityKind::Uniform { lo, hi } => breaks.extend([lo, hi]),
        DensityKind::Cell { s0 } => {
            let a = (s0 / grid.dz()).floor() * grid.dz();
            breaks.extend([a, a + grid.dz()]);
        }
        DensityKind::Exponential { .. } => {}
    }
    breaks.retain(|x| (0.0..=end).contains(x));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let f = |s: f64| pdf(kind, grid, s) * value(s);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        // open the endpoints slightly so the one-sided limits are used
        let h = 1e-13 * (w[1] - w[0]);
        total += adaptive_simpson(&f, w[0] + h, w[1] - h, tol);
    }
    total + survival(kind, grid, end) * value(end + 1.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&a + a.adjoint()).scale(0.5)
}

pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let h = random_hermitian(n, rng);
    linalg::evolve(&h, 2.0).expect("Hermitian by construction")
}

pub fn random_model(n: usize, rng: &mut impl Rng) -> ModelSpec {
    let kappa = random_hermitian(n, rng);
    let sigma = random_unitary(n, rng);
    ModelSpec::scalar_mass(kappa, sigma, 0.0).expect("square")
}

/// Successive ratios `a_i / a_{i+1}`.
pub fn ratios(xs: &[f64]) -> Vec<f64> {
    xs.windows(2).map(|w| w[0] / w[1]).collect()
}
