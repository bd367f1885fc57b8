mod common;

use common::{normalized, random_field, rng};
use dirac_jump::linalg::{c, identity, pauli_x, pauli_z, CMatrix, CVector};
use dirac_jump::reflect::{probability_current, projector_pi, solve_reflect_bvp, ReflectModel};
use dirac_jump::toy::jump_indicator;
use dirac_jump::{hardy_project, DressedSpec, HardySide, ModelSpec, SpectralGrid, WaveField};
use num_complex::Complex64;
use proptest::prelude::*;

fn pauli_spec(mu: f64) -> DressedSpec {
    let model = ModelSpec::scalar_mass(pauli_z(), pauli_x(), mu).unwrap();
    DressedSpec::from_model(model)
}

fn left_movers(rm: &ReflectModel, grid: &SpectralGrid) -> WaveField {
    let eta = CVector::from_vec(vec![c(0.8, 0.0), c(0.0, 0.6)]);
    let f = WaveField::from_profile(grid, &eta, |z| {
        let w = (z - 2.0) / 1.5;
        Complex64::from_polar((-w * w / 2.0).exp(), -5.0 * z)
    });
    let prop = rm.input_propagator();
    normalized(&prop.undress(&hardy_project(&prop.dress(&f), HardySide::Minus, 0.0)))
}

#[test]
fn projector_is_orthogonal() {
    let g = SpectralGrid::new(8.0, 256).unwrap();
    let spec = pauli_spec(1.0);
    let f = random_field(&g, 2, &mut rng(3));
    let h = random_field(&g, 2, &mut rng(4));
    for t in [0.0, 0.5, 1.25] {
        let p = projector_pi(&spec, &g, t).unwrap();
        let pf = p.apply(&f).unwrap();
        assert!(p.apply(&pf).unwrap().max_distance(&pf).unwrap() < 1e-10);
        let lhs = pf.inner(&h).unwrap();
        let rhs = f.inner(&p.apply(&h).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }
}

#[test]
fn massless_cut_moves_with_left_movers() {
    let g = SpectralGrid::new(8.0, 256).unwrap();
    let model = ModelSpec::scalar_mass(CMatrix::zeros(1, 1), identity(1), 0.0).unwrap();
    let spec = DressedSpec::new(model, CMatrix::zeros(1, 1)).unwrap();
    // localized away from the seam, where the periodic cut would wrap
    let bump = common::packet(&g, &CVector::from_element(1, c(1.0, 0.0)), 0.0, 1.0, -8.0);
    let f = hardy_project(&bump, HardySide::Minus, 0.0);
    let t = 3.0 * g.dz();
    let pf = projector_pi(&spec, &g, t).unwrap().apply(&f).unwrap();
    let cut = f.position().masked(|j| jump_indicator(t, g.z(j)) != 0 || g.z(j) < 0.0);
    let a = hardy_project(&pf, HardySide::Minus, 0.0);
    let b = hardy_project(&cut, HardySide::Minus, 0.0);
    let d = a.max_distance(&b).unwrap();
    assert!(d < 1e-10, "{d:e}");
}

#[test]
fn identity_jump_leaves_plain_evolution() {
    let g = SpectralGrid::new(16.0, 512).unwrap();
    let model = ModelSpec::scalar_mass(pauli_z(), identity(2), 1.0).unwrap();
    let rm = ReflectModel::new(&DressedSpec::from_model(model), &g).unwrap();
    let f = left_movers(&rm, &g);
    let sol = rm.solve(&f, 1.0).unwrap();
    let free = rm.evolve_input(&f, 1.0).unwrap();
    assert!(sol.truncated.max_distance(&free).unwrap() < 1e-12);
}

#[test]
fn eigenwave_keeps_cut_at_origin() {
    let g = SpectralGrid::new(16.0, 256).unwrap();
    let model = ModelSpec::scalar_mass(CMatrix::zeros(2, 2), pauli_x(), 1.0).unwrap();
    let spec = DressedSpec::new(model, CMatrix::zeros(2, 2)).unwrap();
    let k = g.k(g.mode_index(-7));
    let eta = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
    let f = WaveField::from_profile(&g, &eta, |z| Complex64::from_polar(1.0, k * z));
    let t = 1.3;
    let sol = solve_reflect_bvp(&spec, &f, t).unwrap();
    let phase = Complex64::from_polar(1.0, -(k * k + 1.0_f64).sqrt() * t);
    let o = g.origin();
    let expect = f.scale(phase).map_rows(|j, v| if j < o { pauli_x() * v } else { v });
    assert!(sol.truncated.max_distance(&expect).unwrap() < 1e-10);
}

#[test]
fn norm_and_boundary_refinement() {
    let spec = pauli_spec(1.0);
    let mut residuals = Vec::new();
    for n in [256usize, 512, 1024, 2048] {
        let g = SpectralGrid::new(16.0, n).unwrap();
        let rm = ReflectModel::new(&spec, &g).unwrap();
        let f = left_movers(&rm, &g);
        let sol = rm.solve(&f, 1.0).unwrap();
        assert!((sol.half_line_norm_sq() - 1.0).abs() < 1e-9, "N = {n}");
        residuals.push(sol.boundary_residual);
    }
    for w in residuals.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 2.0).abs() <= 0.4, "{residuals:?}");
    }
}

#[test]
fn connection_persists() {
    let g = SpectralGrid::new(16.0, 512).unwrap();
    let rm = ReflectModel::new(&pauli_spec(1.0), &g).unwrap();
    let f = left_movers(&rm, &g);
    for t in [0.0, 0.75, 2.0] {
        assert!(rm.connection_defect(&f, t).unwrap() < 1e-8, "t = {t}");
    }
}

#[test]
fn time_reversal_exchange() {
    let g = SpectralGrid::new(16.0, 512).unwrap();
    let rm = ReflectModel::new(&pauli_spec(1.0), &g).unwrap();
    let f = left_movers(&rm, &g);
    let report = rm.time_reversal_check(&f, 1.0).unwrap();
    assert!(report.max_defect() < 1e-8, "{report:?}");
}

#[test]
fn current_at_boundary() {
    let g = SpectralGrid::new(16.0, 1024).unwrap();
    let rm = ReflectModel::new(&pauli_spec(1.0), &g).unwrap();
    let f = left_movers(&rm, &g);
    let sol = rm.solve(&f, 1.0).unwrap();
    let j0 = probability_current(&sol.input, &sol.output, 0.0).unwrap();
    let r = sol.boundary_residual;
    let a = sol.input.row(g.origin()).norm();
    assert!(j0.abs() <= 2.0 * a * r + r * r + 1e-15);

    // an exactly matched pair carries no current
    let mut matched = sol.input.clone();
    matched.set_row(g.origin(), &(pauli_x() * sol.input.row(g.origin())));
    assert!(probability_current(&sol.input, &matched, 0.0).unwrap().abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn projector_idempotent_for_any_time(seed in 0u64..1000, t in -3.0f64..3.0, mu in 0.0f64..2.0) {
        let g = SpectralGrid::new(8.0, 128).unwrap();
        let spec = pauli_spec(mu);
        let p = projector_pi(&spec, &g, t).unwrap();
        let f = random_field(&g, 2, &mut rng(seed));
        let pf = p.apply(&f).unwrap();
        prop_assert!(p.apply(&pf).unwrap().max_distance(&pf).unwrap() < 1e-10);
        prop_assert!(pf.norm() <= f.norm() * (1.0 + 1e-12));
    }
}
