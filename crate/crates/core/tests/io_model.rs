mod common;

use common::{random_field, rng};
use dirac_jump::io::{from_binary, read_binary, to_binary, write_binary, write_csv};
use dirac_jump::linalg::{c, diag_real, identity, pauli_x, pauli_z, CMatrix};
use dirac_jump::{validate_model, ModelSpec, SpectralGrid};
use proptest::prelude::*;

#[test]
fn validation_names_the_broken_invariant() {
    let g = SpectralGrid::new(8.0, 64).unwrap();
    let good = ModelSpec::scalar_mass(pauli_z(), pauli_x(), 1.0).unwrap();
    assert!(validate_model(&good, &g).passed());

    let not_unitary = ModelSpec::scalar_mass(pauli_z(), pauli_x() * c(1.1, 0.0), 1.0).unwrap();
    let report = validate_model(&not_unitary, &g);
    let names: Vec<_> = report.failures().map(|f| f.name).collect();
    assert_eq!(names, ["sigma_unitary"]);

    // σ = Pauli-x swaps the two mass eigenvalues of diag(1, 2)
    let mixed = ModelSpec::new(pauli_z(), pauli_x(), diag_real(&[1.0, 2.0]), 2.0).unwrap();
    let names: Vec<_> = validate_model(&mixed, &g).failures().map(|f| f.name).collect();
    assert_eq!(names, ["sigma_commutes_with_energy"]);

    let over = ModelSpec::new(pauli_z(), identity(2), diag_real(&[1.0, 3.0]), 2.0).unwrap();
    assert!(!validate_model(&over, &g).get("mass_bound").unwrap().passed);
}

#[test]
fn csv_values_round_trip_through_text() {
    let g = SpectralGrid::new(2.0, 16).unwrap();
    let f = random_field(&g, 2, &mut rng(1));
    let mut out = Vec::new();
    write_csv(&f, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let row: Vec<f64> = text.lines().nth(3).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[0], g.z(2));
    assert_eq!(row[1], f.values()[(2, 0)].re);
    assert_eq!(row[4], f.values()[(2, 1)].im);
}

#[test]
fn unknown_flag_is_a_format_error() {
    let g = SpectralGrid::new(2.0, 8).unwrap();
    let mut bytes = to_binary(&random_field(&g, 1, &mut rng(2)));
    bytes[24] = 7;
    assert!(matches!(from_binary(&bytes), Err(dirac_jump::Error::Format(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn binary_round_trip(seed in 0u64..10_000, n in 1usize..4, log_n in 1u32..8, momentum in any::<bool>()) {
        let g = SpectralGrid::new(1.5, 1 << log_n).unwrap();
        let mut f = random_field(&g, n, &mut rng(seed));
        if momentum {
            f = f.to_momentum().unwrap();
        }
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        prop_assert_eq!(buf.len(), 25 + 16 * g.len() * n);
        prop_assert_eq!(read_binary(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn mass_positivity_is_checked(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let g = SpectralGrid::new(2.0, 16).unwrap();
        let m = ModelSpec::new(CMatrix::zeros(2, 2), identity(2), diag_real(&[a, b]), 3.0).unwrap();
        let ok = validate_model(&m, &g).get("mass_positive").unwrap().passed;
        prop_assert_eq!(ok, a >= -1e-12 && b >= -1e-12);
    }
}
