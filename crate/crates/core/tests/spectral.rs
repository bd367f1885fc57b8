mod common;

use common::{dense_pointwise, dense_propagator, flatten, max_norm, packet, random_field, rng, unit_eta};
use dirac_jump::linalg::{c, identity, pauli_x, pauli_z, CMatrix, CVector, HermitianEigen};
use dirac_jump::spectral::{apply_left_of, shift_cells};
use dirac_jump::{
    apply_propagator, grid_shift, hardy_project, indicator_sigma_power, ConjugatedPropagator,
    Direction, HardySide, ModelSpec, Propagator, SpectralGrid, SymbolTable, WaveField,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid(n: usize) -> SpectralGrid {
    SpectralGrid::new(4.0, n).unwrap()
}

fn unit_mass_model() -> ModelSpec {
    ModelSpec::scalar_mass(CMatrix::zeros(2, 2), identity(2), 1.0).unwrap()
}

#[test]
fn random_round_trip() {
    let g = grid(128);
    let f = random_field(&g, 3, &mut rng(1));
    let back = f.to_momentum().unwrap().to_position().unwrap();
    assert!(back.max_distance(&f).unwrap() < 1e-12 * f.norm().max(1.0));
}

#[test]
fn eigenwave_picks_up_energy_phase() {
    let g = grid(64);
    let model = ModelSpec::new(CMatrix::zeros(2, 2), identity(2), dirac_jump::linalg::diag_real(&[0.5, 1.5]), 1.5).unwrap();
    let table = SymbolTable::energy(&g, &model);
    let m = g.mode_index(-3);
    let k = g.k(m);
    let eta = CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
    let f = WaveField::from_profile(&g, &eta, |z| Complex64::from_polar(1.0, k * z));
    let t = 0.9;
    let out = apply_propagator(&f, &table, t).unwrap();
    let e = (k * k + 1.5 * 1.5_f64).sqrt();
    let expect = f.scale(Complex64::from_polar(1.0, -e * t));
    assert!(out.max_distance(&expect).unwrap() < 1e-12);
}

#[test]
fn propagator_matches_dense_oracle() {
    let g = SpectralGrid::new(2.0, 8).unwrap();
    let model = unit_mass_model();
    let f = random_field(&g, 2, &mut rng(5));
    let table = SymbolTable::energy(&g, &model);
    let out = apply_propagator(&f, &table, 0.3).unwrap();
    let u = dense_propagator(&g, 2, 0.3, |k| model.energy(k));
    let expect = u * flatten(&f);
    assert!(max_norm(&(flatten(&out) - expect)) < 1e-10);
}

#[test]
fn conjugated_symbol_matches_dense_oracle() {
    let g = SpectralGrid::new(2.0, 8).unwrap();
    let model = unit_mass_model();
    let kappa = pauli_z();
    let eig = HermitianEigen::new(&kappa).unwrap();
    let f = random_field(&g, 2, &mut rng(6));
    let t = 0.4;
    for (dir, sign) in [(Direction::Input, 1.0), (Direction::Output, -1.0)] {
        let prop = ConjugatedPropagator::new(SymbolTable::energy(&g, &model), &kappa, dir).unwrap();
        let out = prop.propagate(&f, t).unwrap();
        let e = dense_pointwise(&g, 2, |z| eig.evolve(sign * z));
        let p = dense_propagator(&g, 2, t, |k| model.energy(k));
        let oracle = e.adjoint() * p * e * flatten(&f);
        assert!(max_norm(&(flatten(&out) - oracle)) < 1e-10);
    }
}

#[test]
fn scalar_conjugation_shifts_the_symbol() {
    let g = grid(64);
    let model = ModelSpec::scalar_mass(CMatrix::zeros(1, 1), identity(1), 0.7).unwrap();
    let cshift = 5.0 * g.dk();
    let prop = ConjugatedPropagator::new(
        SymbolTable::energy(&g, &model),
        &CMatrix::from_element(1, 1, c(cshift, 0.0)),
        Direction::Input,
    )
    .unwrap();
    let t = 0.6;
    for p in [-7i64, -1, 0, 3] {
        let k = g.k(g.mode_index(p));
        let f = WaveField::from_profile(&g, &CVector::from_element(1, c(1.0, 0.0)), |z| Complex64::from_polar(1.0, k * z));
        let out = prop.propagate(&f, t).unwrap();
        // the symbol ε(c + κ) evaluated at the i∂_z eigenvalue κ = -k
        let e = ((cshift - k).powi(2) + 0.49).sqrt();
        let expect = f.scale(Complex64::from_polar(1.0, -e * t));
        assert!(out.max_distance(&expect).unwrap() < 1e-12);
    }
}

#[test]
fn hardy_examples() {
    let g = grid(128);
    let f = hardy_project(&random_field(&g, 2, &mut rng(9)), HardySide::Minus, 0.0);
    assert!(hardy_project(&f, HardySide::Minus, 0.0).max_distance(&f).unwrap() < 1e-14);

    let r = random_field(&g, 2, &mut rng(10));
    let p = hardy_project(&r, HardySide::Minus, 0.0);
    let q = r.sub(&p).unwrap();
    assert!(hardy_project(&p, HardySide::Minus, 0.0).max_distance(&p).unwrap() < 1e-12);
    assert!(p.inner(&q).unwrap().norm() < 1e-12);
    let plus = hardy_project(&r, HardySide::Plus, 0.0);
    assert!(p.add(&plus).unwrap().max_distance(&r).unwrap() < 1e-12);
}

#[test]
fn hardy_projection_is_self_adjoint() {
    let g = grid(64);
    let a = random_field(&g, 2, &mut rng(11));
    let b = random_field(&g, 2, &mut rng(12));
    for side in [HardySide::Minus, HardySide::Plus] {
        for cut in [0.0, 2.5] {
            let lhs = hardy_project(&a, side, cut).inner(&b).unwrap();
            let rhs = a.inner(&hardy_project(&b, side, cut)).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}

#[test]
fn indicator_powers_compose() {
    let g = grid(64);
    let f = random_field(&g, 2, &mut rng(13));
    let s = pauli_x().scale(1.0) * Complex64::from_polar(1.0, 0.4);
    let twice = indicator_sigma_power(&indicator_sigma_power(&f, 0.5, &s), 0.5, &s);
    let squared = indicator_sigma_power(&f, 0.5, &(&s * &s));
    assert!(twice.max_distance(&squared).unwrap() < 1e-14);
    assert_eq!(indicator_sigma_power(&f, 0.5, &identity(2)), f);
    let any = apply_left_of(&f, 0.5, |_| s.clone());
    assert_eq!(any, indicator_sigma_power(&f, 0.5, &s));
}

#[test]
fn shift_round_trip_is_exact() {
    let g = grid(64);
    let f = random_field(&g, 2, &mut rng(14));
    let a = 4.0 * g.dz();
    let back = grid_shift(&grid_shift(&f, a).unwrap(), -a).unwrap();
    assert_eq!(back, f);
    assert_eq!(grid_shift(&f, 0.0).unwrap(), f);
}

#[test]
fn shift_commutes_with_propagator() {
    let g = grid(64);
    let model = unit_mass_model();
    let table = SymbolTable::energy(&g, &model);
    let f = random_field(&g, 2, &mut rng(15));
    let a = shift_cells(&apply_propagator(&f, &table, 0.7).unwrap(), 5);
    let b = apply_propagator(&shift_cells(&f, 5), &table, 0.7).unwrap();
    assert!(a.max_distance(&b).unwrap() < 1e-10);
}

#[test]
fn guard_band_monitor() {
    let g = SpectralGrid::new(8.0, 256).unwrap();
    let centered = packet(&g, &unit_eta(), 0.0, 0.5, 0.0);
    assert!(centered.guard_band_fraction() < 1e-12);
    let seam = packet(&g, &unit_eta(), 7.5, 0.5, 0.0);
    assert!(seam.guard_band_fraction() > 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(seed in 0u64..10_000, n in 1usize..4, log_n in 3u32..9) {
        let g = grid(1 << log_n);
        let f = random_field(&g, n, &mut rng(seed));
        let m = f.to_momentum().unwrap();
        prop_assert!((f.norm_sq() - m.norm_sq()).abs() <= 1e-10 * f.norm_sq());
    }

    #[test]
    fn propagator_unitary_group(seed in 0u64..10_000, t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
        let g = grid(64);
        let model = unit_mass_model();
        let table = SymbolTable::energy(&g, &model);
        let f = random_field(&g, 2, &mut rng(seed));
        let a = apply_propagator(&apply_propagator(&f, &table, t1).unwrap(), &table, t2).unwrap();
        let b = apply_propagator(&f, &table, t1 + t2).unwrap();
        prop_assert!(a.max_distance(&b).unwrap() < 1e-10);
        prop_assert!((a.norm() - f.norm()).abs() < 1e-10 * f.norm());
    }

    #[test]
    fn indicator_is_unitary(seed in 0u64..10_000, t in -4.0f64..4.0, phase in 0.0f64..6.0) {
        let g = grid(64);
        let f = random_field(&g, 2, &mut rng(seed));
        let s = pauli_x() * Complex64::from_polar(1.0, phase);
        let out = indicator_sigma_power(&f, t, &s);
        prop_assert!((out.norm() - f.norm()).abs() < 1e-12 * f.norm());
    }

    #[test]
    fn hardy_idempotent(seed in 0u64..10_000, cut in -3.0f64..3.0) {
        let g = grid(64);
        let f = random_field(&g, 2, &mut rng(seed));
        for side in [HardySide::Minus, HardySide::Plus] {
            let p = hardy_project(&f, side, cut);
            prop_assert!(hardy_project(&p, side, cut).max_distance(&p).unwrap() < 1e-12);
        }
    }
}
