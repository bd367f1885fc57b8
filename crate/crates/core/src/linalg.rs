//! Dense complex linear algebra on the internal space `h = C^n`.
//!
//! All matrix functions go through a full Hermitian eigendecomposition; the
//! internal dimension is small (at most a few dozen), so exactness is cheap.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Numerical tolerances shared by every validation in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute Frobenius defect allowed in `A - A†` for stored Hermitian data.
    pub hermitian: f64,
    /// Absolute Frobenius defect allowed in `U†U - I`.
    pub unitary: f64,
    /// Absolute Frobenius defect allowed in `[σ, ε(k)]`.
    pub commutator: f64,
    /// Relative defect `‖A - A†‖ / ‖A‖` above which matrix functions refuse input.
    pub hermitian_input: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    hermitian: 1e-12,
    unitary: 1e-12,
    commutator: 1e-10,
    hermitian_input: 1e-10,
};

impl Default for Tolerances {
    fn default() -> Self {
        TOLERANCES
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros(n, n)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// Cyclic shift `e_j -> e_{j+1 mod n}`.
pub fn shift_cycle(n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        m[((j + 1) % n, j)] = c(1.0, 0.0);
    }
    m
}

pub fn diag_real(values: &[f64]) -> CMatrix {
    let n = values.len();
    let mut m = CMatrix::zeros(n, n);
    for (j, v) in values.iter().enumerate() {
        m[(j, j)] = c(*v, 0.0);
    }
    m
}

pub fn from_real_rows(n: usize, rows: &[f64]) -> CMatrix {
    CMatrix::from_row_slice(n, n, &rows.iter().map(|x| c(*x, 0.0)).collect::<Vec<_>>())
}

/// Entrywise complex conjugation in the standard basis.
pub fn conj_matrix(a: &CMatrix) -> CMatrix {
    a.map(|z| z.conj())
}

pub fn conj_vector(v: &CVector) -> CVector {
    v.map(|z| z.conj())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vector_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_defect(a: &CMatrix) -> f64 {
    frobenius(&(a - a.adjoint()))
}

pub fn unitary_defect(u: &CMatrix) -> f64 {
    frobenius(&(u.adjoint() * u - identity(u.nrows())))
}

/// Spectral norm, via the largest eigenvalue of `A†A`.
pub fn operator_norm(a: &CMatrix) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    let gram = a.adjoint() * a;
    let gram = (&gram + gram.adjoint()).scale(0.5);
    let eig = gram.symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max).max(0.0).sqrt()
}

fn check_square(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    Ok(())
}

/// Rejects `A` when `‖A - A†‖ > tol·‖A‖`.
pub fn ensure_hermitian(a: &CMatrix, rel_tol: f64) -> Result<()> {
    check_square(a)?;
    let defect = hermitian_defect(a);
    let limit = rel_tol * frobenius(a);
    if defect > limit {
        return Err(Error::NonHermitianInput { defect, limit });
    }
    Ok(())
}

/// Eigendecomposition `A = V diag(λ) V†` of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(a: &CMatrix) -> Result<Self> {
        ensure_hermitian(a, TOLERANCES.hermitian_input)?;
        Ok(Self::new_unchecked(a))
    }

    /// Decomposes the Hermitian part of `a` without validating it.
    pub fn new_unchecked(a: &CMatrix) -> Self {
        let sym = (a + a.adjoint()).scale(0.5);
        let eig = sym.symmetric_eigen();
        Self {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(f(λ)) V†`, with a complex-valued `f`.
    pub fn map_complex(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        self.map_complex(|x| c(f(x), 0.0))
    }

    /// `e^{-itA}`.
    pub fn evolve(&self, t: f64) -> CMatrix {
        self.map_complex(|x| Complex64::from_polar(1.0, -t * x))
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| x)
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// `e^{-itA}` for Hermitian `A`.
pub fn evolve(a: &CMatrix, t: f64) -> Result<CMatrix> {
    Ok(HermitianEigen::new(a)?.evolve(t))
}

/// `f(A)` for Hermitian `A` and real `f` defined on its spectrum.
pub fn hermitian_function(a: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    Ok(HermitianEigen::new(a)?.map(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_generator_gives_identity() {
        let u = evolve(&zeros(3), 7.3).unwrap();
        assert!(frobenius(&(u - identity(3))) < 1e-15);
    }

    #[test]
    fn diagonal_evolution_at_pi() {
        let u = evolve(&diag_real(&[1.0, 2.0]), PI).unwrap();
        let expected = diag_real(&[-1.0, 1.0]);
        assert!(frobenius(&(u - expected)) < 1e-14);
    }

    #[test]
    fn sqrt_of_diagonal() {
        let r = hermitian_function(&diag_real(&[9.0, 16.0]), f64::sqrt).unwrap();
        assert!(frobenius(&(r - diag_real(&[3.0, 4.0]))) < 1e-14);
    }

    #[test]
    fn massless_energy_is_abs_k() {
        let k = 3.0_f64;
        let r = hermitian_function(&zeros(2), |x| (k * k + x).sqrt()).unwrap();
        assert!(frobenius(&(r - identity(2).scale(3.0))) < 1e-15);
    }

    #[test]
    fn sqrt_of_dense_two_by_two() {
        // eigenvalues 25 and 9; the square of the result must give back A
        let a = from_real_rows(2, &[17.0, 8.0, 8.0, 17.0]);
        let r = hermitian_function(&a, f64::sqrt).unwrap();
        assert!(frobenius(&(&r * &r - &a)) < 1e-12);
        assert!(frobenius(&(r - from_real_rows(2, &[4.0, 1.0, 1.0, 4.0]))) < 1e-13);
    }

    #[test]
    fn non_hermitian_rejected() {
        let a = from_real_rows(2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(evolve(&a, 1.0), Err(Error::NonHermitianInput { .. })));
        assert!(matches!(
            hermitian_function(&a, f64::sqrt),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn function_commutes_with_argument() {
        let a = from_real_rows(3, &[2.0, 0.5, 0.1, 0.5, 1.0, -0.3, 0.1, -0.3, 4.0]);
        let f = hermitian_function(&a, |x| x.exp()).unwrap();
        assert!(frobenius(&commutator(&a, &f)) < 1e-12);
    }

    #[test]
    fn shift_cycle_is_unitary_permutation() {
        let s = shift_cycle(4);
        assert!(unitary_defect(&s) < 1e-15);
        let e0 = CVector::from_fn(4, |i, _| if i == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert_eq!((&s * e0)[1], c(1.0, 0.0));
    }

    #[test]
    fn operator_norm_of_pauli() {
        assert!((operator_norm(&pauli_x()) - 1.0).abs() < 1e-14);
        assert!((operator_norm(&diag_real(&[0.5, -3.0])) - 3.0).abs() < 1e-14);
    }
}
