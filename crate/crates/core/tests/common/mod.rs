#![allow(dead_code)]

use std::f64::consts::PI;

use dirac_jump::linalg::{c, CMatrix, CVector};
use dirac_jump::{SpectralGrid, WaveField};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&a + a.adjoint()).scale(0.5)
}

pub fn random_vector(n: usize, rng: &mut impl Rng) -> CVector {
    CVector::from_fn(n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_field(grid: &SpectralGrid, n: usize, rng: &mut impl Rng) -> WaveField {
    let mut f = WaveField::zeros(grid, n);
    for j in 0..grid.len() {
        f.set_row(j, &random_vector(n, rng));
    }
    f
}

/// Gaussian envelope times a plane wave, `η e^{ik₀z} e^{-(z-z₀)²/2w²}`.
pub fn packet(grid: &SpectralGrid, eta: &CVector, z0: f64, width: f64, k0: f64) -> WaveField {
    WaveField::from_profile(grid, eta, |z| {
        let u = (z - z0) / width;
        Complex64::from_polar((-u * u / 2.0).exp(), k0 * z)
    })
}

pub fn normalized(f: &WaveField) -> WaveField {
    f.scale(c(1.0 / f.norm(), 0.0))
}

pub fn unit_eta() -> CVector {
    CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)])
}

/// `Σ_{j≤terms} (-itA)^j / j!`.
pub fn series_exp(a: &CMatrix, t: f64, terms: usize) -> CMatrix {
    let n = a.nrows();
    let x = a * c(0.0, -t);
    let mut term = CMatrix::identity(n, n);
    let mut sum = term.clone();
    for j in 1..=terms {
        term = &term * &x / c(j as f64, 0.0);
        sum += &term;
    }
    sum
}

/// Stacks position samples into one vector, index `j·n + i`.
pub fn flatten(f: &WaveField) -> CVector {
    let p = f.position();
    let n = p.dim();
    CVector::from_fn(p.grid().len() * n, |r, _| p.values()[(r / n, r % n)])
}

pub fn unflatten(grid: &SpectralGrid, n: usize, v: &CVector) -> WaveField {
    let values = CMatrix::from_fn(grid.len(), n, |j, i| v[j * n + i]);
    WaveField::from_values(grid, values, dirac_jump::Representation::Position).unwrap()
}

/// Explicit propagator `F⁻¹ diag(e^{-it s(k_m)}) F` built from the Fourier sums, no FFT.
pub fn dense_propagator(grid: &SpectralGrid, n: usize, t: f64, mode: impl Fn(f64) -> CMatrix) -> CMatrix {
    let nn = grid.len();
    let dz = grid.dz();
    let dk = grid.dk();
    let mut u = DMatrix::zeros(nn * n, nn * n);
    for m in 0..nn {
        let k = grid.k(m);
        let phase = dirac_jump::linalg::evolve(&mode(k), t).unwrap();
        for j in 0..nn {
            let back = Complex64::from_polar(dk / (2.0 * PI), k * grid.z(j));
            for l in 0..nn {
                let fwd = Complex64::from_polar(dz, -k * grid.z(l));
                let w = back * fwd;
                for a in 0..n {
                    for b in 0..n {
                        u[(j * n + a, l * n + b)] += w * phase[(a, b)];
                    }
                }
            }
        }
    }
    u
}

/// Block-diagonal multiplication by `m(z_j)`.
pub fn dense_pointwise(grid: &SpectralGrid, n: usize, m: impl Fn(f64) -> CMatrix) -> CMatrix {
    let nn = grid.len();
    let mut out = DMatrix::zeros(nn * n, nn * n);
    for j in 0..nn {
        let b = m(grid.z(j));
        for a in 0..n {
            for c2 in 0..n {
                out[(j * n + a, j * n + c2)] = b[(a, c2)];
            }
        }
    }
    out
}

pub fn max_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}
