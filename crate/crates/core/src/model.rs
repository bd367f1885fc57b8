//! The internal space, the model data `(ϰ, σ, μ, m)` and its validation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpectralGrid;
use crate::linalg::{
    commutator, conj_vector, frobenius, hermitian_defect, operator_norm, unitary_defect, CMatrix,
    CVector, HermitianEigen, TOLERANCES,
};

/// `h = C^n` with entrywise conjugation in the standard basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InternalSpace {
    pub n: usize,
}

impl InternalSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        Ok(Self { n })
    }

    pub fn conj(&self, v: &CVector) -> CVector {
        conj_vector(v)
    }

    pub fn inner(&self, a: &CVector, b: &CVector) -> Complex64 {
        a.dotc(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    /// Hamiltonian in frequency units.
    pub kappa_op: CMatrix,
    /// Jump unitary.
    pub sigma: CMatrix,
    /// Mass operator, Hermitian and positive semidefinite.
    pub mass_op: CMatrix,
    /// Upper bound on `‖μ‖`.
    pub mass_bound: f64,
}

impl ModelSpec {
    /// Builds a model after checking that all matrices are `n × n`.
    pub fn new(kappa_op: CMatrix, sigma: CMatrix, mass_op: CMatrix, mass_bound: f64) -> Result<Self> {
        let n = kappa_op.nrows();
        for m in [&kappa_op, &sigma, &mass_op] {
            if m.nrows() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.nrows(),
                });
            }
            if m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.ncols(),
                });
            }
        }
        Ok(Self {
            kappa_op,
            sigma,
            mass_op,
            mass_bound,
        })
    }

    /// Model with scalar mass `μ = μ₀·I` and `m = |μ₀|`.
    pub fn scalar_mass(kappa_op: CMatrix, sigma: CMatrix, mu0: f64) -> Result<Self> {
        let n = kappa_op.nrows();
        Self::new(kappa_op, sigma, CMatrix::identity(n, n).scale(mu0), mu0.abs())
    }

    pub fn dim(&self) -> usize {
        self.kappa_op.nrows()
    }

    pub fn space(&self) -> InternalSpace {
        InternalSpace { n: self.dim() }
    }

    pub fn kappa_eigen(&self) -> HermitianEigen {
        HermitianEigen::new_unchecked(&self.kappa_op)
    }

    pub fn mass_eigen(&self) -> HermitianEigen {
        HermitianEigen::new_unchecked(&self.mass_op)
    }

    /// `ε(k) = (k² + μ²)^{1/2}`.
    pub fn energy(&self, k: f64) -> CMatrix {
        self.mass_eigen().map(|w| (k * k + w * w).sqrt())
    }

    pub fn is_massless(&self) -> bool {
        frobenius(&self.mass_op) == 0.0
    }
}

/// Model plus the constant conjugation generator ϰ with `ε_ϰ(z) = e^{-iϰz}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedSpec {
    pub model: ModelSpec,
    pub kappa_shift: CMatrix,
}

impl DressedSpec {
    pub fn new(model: ModelSpec, kappa_shift: CMatrix) -> Result<Self> {
        if kappa_shift.nrows() != model.dim() || kappa_shift.ncols() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                got: kappa_shift.nrows(),
            });
        }
        crate::linalg::ensure_hermitian(&kappa_shift, TOLERANCES.hermitian_input)?;
        Ok(Self { model, kappa_shift })
    }

    /// Uses the model Hamiltonian as the conjugation generator.
    pub fn from_model(model: ModelSpec) -> Self {
        let kappa_shift = model.kappa_op.clone();
        Self { model, kappa_shift }
    }

    pub fn shift_eigen(&self) -> HermitianEigen {
        HermitianEigen::new_unchecked(&self.kappa_shift)
    }

    /// `σ_ϰ(z) = e^{izϰ} σ e^{-izϰ}`.
    pub fn sigma_at(&self, z: f64) -> CMatrix {
        let e = self.shift_eigen();
        e.evolve(-z) * &self.model.sigma * e.evolve(z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub defect: f64,
    pub limit: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<InvariantCheck>,
}

impl ValidationReport {
    fn push(&mut self, name: &'static str, defect: f64, limit: f64) {
        self.checks.push(InvariantCheck {
            name,
            defect,
            limit,
            passed: defect <= limit,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Measures every model invariant on `grid`; never fails, the report carries the verdict.
pub fn validate_model(spec: &ModelSpec, grid: &SpectralGrid) -> ValidationReport {
    let tol = TOLERANCES;
    let mut report = ValidationReport::default();
    let n = spec.dim();
    let square = [&spec.kappa_op, &spec.sigma, &spec.mass_op]
        .iter()
        .all(|m| m.nrows() == n && m.ncols() == n);
    report.push("dimensions", if square && n > 0 { 0.0 } else { 1.0 }, 0.0);
    if !square || n == 0 {
        return report;
    }

    report.push("sigma_unitary", unitary_defect(&spec.sigma), tol.unitary);
    report.push("kappa_hermitian", hermitian_defect(&spec.kappa_op), tol.hermitian);
    report.push("mass_hermitian", hermitian_defect(&spec.mass_op), tol.hermitian);

    let mass = spec.mass_eigen();
    let neg = mass.values.iter().fold(0.0_f64, |m, w| m.max(-w));
    report.push("mass_positive", neg, tol.hermitian * operator_norm(&spec.mass_op).max(1.0));
    let over = (operator_norm(&spec.mass_op) - spec.mass_bound).max(0.0);
    report.push("mass_bound", over, tol.hermitian * spec.mass_bound.max(1.0));

    // [σ, ε(k)] on each grid mode; ε is even in k so one sign suffices
    let mut worst = 0.0_f64;
    for m in 0..=grid.len() / 2 {
        let k = m as f64 * grid.dk();
        let e = mass.map(|w| (k * k + w * w).sqrt());
        worst = worst.max(frobenius(&commutator(&spec.sigma, &e)));
    }
    report.push("sigma_commutes_with_energy", worst, tol.commutator);
    report
}
