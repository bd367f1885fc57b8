//! The acceptance criteria, each with its tolerance and runtime budget.

use std::fmt;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use dirac_jump::linalg::{c, frobenius, pauli_x, pauli_z, CMatrix, CVector};
use dirac_jump::reflect::{projector_pi, ReflectModel};
use dirac_jump::stochastic::{mc_expectation, DensityKind, JumpDensity};
use dirac_jump::toy::{ito_residual, solve_toy_bvp, time_reversal_check, Cocycle};
use dirac_jump::ultra::{
    jump_equation_residual, kappa_threshold, limit_truncated_chi, run_kappa_sweep, sup_phase_factor,
    LimitSweepConfig,
};
use dirac_jump::{DressedSpec, ModelSpec, Result, SpectralGrid, WaveField};
use num_complex::Complex64;
use rand::Rng;

use crate::config::InitialSpec;
use crate::oracles::{self, cocycle_defect, quadrature_expectation, ratios};
use crate::scenario::reflect_input;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub runtime_s: f64,
    pub budget_s: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "C{:<2} {}  {:<32} {} [{:.2} s, budget {} s]",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.runtime_s,
            self.budget_s
        )
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: String) -> Self {
        Self { passed, detail }
    }
}

fn timed(id: u32, name: &'static str, budget_s: f64, f: impl FnOnce() -> Result<Outcome>) -> CriterionResult {
    let start = Instant::now();
    let outcome = f().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
    let runtime_s = start.elapsed().as_secs_f64();
    CriterionResult {
        id,
        name,
        passed: outcome.passed && runtime_s < budget_s,
        detail: outcome.detail,
        runtime_s,
        budget_s,
    }
}

fn eta() -> CVector {
    CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)])
}

fn pauli_model(mu: f64) -> ModelSpec {
    ModelSpec::scalar_mass(pauli_z(), pauli_x(), mu).expect("square")
}

fn max(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, oracles::nan_max)
}

pub fn toy_equivalence() -> CriterionResult {
    timed(1, "toy equivalence", 1.0, || {
        let g = SpectralGrid::new(16.0, 1024)?;
        let m = pauli_model(0.0);
        let chi0 = oracles::gaussian(&g, &eta(), &InitialSpec { center: 1.0, width: 2.0, carrier: 0.0 });
        let mut worst = 0.0_f64;
        for t in [0.5, 1.0, 2.0] {
            let chi = solve_toy_bvp(&m, &chi0, t)?;
            worst = oracles::nan_max(worst, cocycle_defect(&m, &chi0, &chi, t));
        }
        Ok(Outcome::new(worst <= 1e-10, format!("max defect {worst:.2e} <= 1e-10")))
    })
}

pub fn cocycle_and_unitarity() -> CriterionResult {
    timed(2, "cocycle law and unitarity", 5.0, || {
        let mut rng = oracles::rng(20);
        let g = SpectralGrid::new(8.0, 256)?;
        let (mut law, mut norm) = (0.0_f64, 0.0_f64);
        for case in 0..10 {
            let n = 2 + case % 3;
            let m = oracles::random_model(n, &mut rng);
            let v = Cocycle::new(&m);
            for _ in 0..20 {
                let r = rng.random_range(-3.0..3.0);
                let t = rng.random_range(-3.0..3.0);
                let s = rng.random_range(-4.0..4.0);
                let lhs = v.at(r, s - t) * v.at(t, s);
                law = oracles::nan_max(law, frobenius(&(lhs - v.at(r + t, s))));
            }
            let mut chi0 = WaveField::zeros(&g, n);
            for j in 0..g.len() {
                let x = CVector::from_fn(n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
                chi0.set_row(j, &x);
            }
            let p: i64 = rng.random_range(-60..60);
            let chi = solve_toy_bvp(&m, &chi0, p as f64 * g.dz())?;
            norm = oracles::nan_max(norm, (chi.norm() / chi0.norm() - 1.0).abs());
        }
        Ok(Outcome::new(
            law <= 1e-9 && norm <= 1e-10,
            format!("law {law:.2e} <= 1e-9, norm {norm:.2e} <= 1e-10"),
        ))
    })
}

pub fn ito_orders() -> CriterionResult {
    timed(3, "Ito residual orders", 5.0, || {
        let m = pauli_model(0.0);
        let e = eta();
        let dts: Vec<f64> = (4..=9).map(|k| 2f64.powi(-k)).collect();
        let off: Vec<f64> = dts.iter().map(|&dt| ito_residual(&m, 1.0, dt, 0.25, &e)).collect();
        let on: Vec<f64> = dts.iter().map(|&dt| ito_residual(&m, 1.0, dt, 1.0 + dt / 2.0, &e)).collect();

        // the same orders for the field equation on the grid
        let g = SpectralGrid::new(4.0, 4096)?;
        let psi = WaveField::from_profile(&g, &e, |_| Complex64::from(1.0));
        let (far, at) = (g.nearest_index(-1.0), g.first_at_or_right_of(0.5));
        let mut field_off = Vec::new();
        let mut field_on = Vec::new();
        for &dt in &dts {
            let r = jump_equation_residual(&m, &psi, 0.5, dt)?;
            field_off.push(r[far]);
            field_on.push(r[at]);
        }
        let dev = |xs: &[f64], target: f64| max(ratios(xs).into_iter().map(|r| (r - target).abs()));
        let off_dev = oracles::nan_max(dev(&off, 4.0), dev(&field_off, 4.0));
        let on_dev = oracles::nan_max(dev(&on, 2.0), dev(&field_on, 2.0));
        Ok(Outcome::new(
            off_dev <= 0.5 && on_dev <= 0.5,
            format!("|ratio-4| {off_dev:.3} <= 0.5, |ratio-2| {on_dev:.3} <= 0.5"),
        ))
    })
}

pub fn reflection_model() -> CriterionResult {
    timed(4, "reflection model", 30.0, || {
        let spec = DressedSpec::from_model(pauli_model(1.0));
        let g = SpectralGrid::new(8.0, 256)?;
        let mut rng = oracles::rng(4);
        let mut random = || {
            let mut f = WaveField::zeros(&g, 2);
            for j in 0..g.len() {
                f.set_row(j, &CVector::from_fn(2, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
            }
            f
        };
        let (f, h) = (random(), random());
        let mut proj = 0.0_f64;
        for t in [0.0, 0.5, 1.25] {
            let p = projector_pi(&spec, &g, t)?;
            let pf = p.apply(&f)?;
            proj = oracles::nan_max(proj, p.apply(&pf)?.max_distance(&pf)?);
            proj = oracles::nan_max(proj, (pf.inner(&h)? - f.inner(&p.apply(&h)?)?).norm());
        }

        let packet = InitialSpec { center: 2.0, width: 1.5, carrier: -5.0 };
        let e = CVector::from_vec(vec![c(0.8, 0.0), c(0.0, 0.6)]);
        let mut norm = 0.0_f64;
        let mut residuals = Vec::new();
        for n in [256usize, 512, 1024, 2048] {
            let g = SpectralGrid::new(16.0, n)?;
            let rm = ReflectModel::new(&spec, &g)?;
            let sol = rm.solve(&reflect_input(&rm, &g, &e, &packet), 1.0)?;
            norm = oracles::nan_max(norm, (sol.half_line_norm_sq() - 1.0).abs());
            residuals.push(sol.boundary_residual);
        }
        let ratio_dev = max(ratios(&residuals).into_iter().map(|r| (r - 2.0).abs()));
        Ok(Outcome::new(
            proj <= 1e-10 && norm <= 1e-9 && ratio_dev <= 0.4,
            format!("projector {proj:.2e} <= 1e-10, norm {norm:.2e} <= 1e-9, |ratio-2| {ratio_dev:.3} <= 0.4"),
        ))
    })
}

pub fn scalar_inequality() -> CriterionResult {
    timed(5, "scalar inequality", 1.0, || {
        let mut worst = f64::NEG_INFINITY;
        let mut all = true;
        for i in 0..10 {
            let vk = 10f64.powf((i as f64 - 2.0) / 3.0);
            for j in 0..10 {
                let w = vk * (j as f64 + 0.5) / 10.0;
                let lhs = w * w / ((vk * vk + w * w).sqrt() + vk);
                let rhs = w * w / (2.0 * vk);
                let naive = (vk * vk + w * w).sqrt() - vk;
                all &= lhs < rhs && naive < rhs;
                worst = oracles::nan_max(worst, lhs / rhs);
            }
        }
        let spot = 101f64.sqrt() - 10.0;
        let spot_ok = (spot - 0.0498756).abs() < 1e-7 && spot < 0.05;
        Ok(Outcome::new(
            all && spot_ok,
            format!("max lhs/rhs {worst:.4} < 1, sqrt(101)-10 = {spot:.7} < 0.05"),
        ))
    })
}

fn sweep_member(mu: f64) -> Result<(DressedSpec, WaveField)> {
    let g = SpectralGrid::new(32.0, 1024)?;
    let spec = DressedSpec::from_model(pauli_model(mu));
    let psi = oracles::class_member(&spec, &g, &eta(), &InitialSpec { center: 0.0, width: 4.0, carrier: 3.5 }, 5.0);
    Ok((spec, psi))
}

pub fn ultrarelativistic_convergence() -> CriterionResult {
    timed(6, "ultrarelativistic convergence", 60.0, || {
        let config = LimitSweepConfig {
            kappa_base: 5.0,
            kappa_list: vec![10.0, 20.0, 40.0, 80.0, 160.0],
            t: 1.0,
            mass_bound: 1.0,
            tolerance: 1e-12,
        };
        let (spec, psi) = sweep_member(1.0)?;
        let recs = run_kappa_sweep(&config, &spec, &psi)?;
        let bounded = recs.iter().all(|r| r.within_bound());
        let monotone = recs.windows(2).all(|w| w[1].error_i < w[0].error_i);
        let slope = recs.last().map_or(f64::NAN, |r| r.slope_running);
        let (spec0, psi0) = sweep_member(0.0)?;
        let massless = max(run_kappa_sweep(&config, &spec0, &psi0)?.iter().map(|r| r.error_i));
        Ok(Outcome::new(
            bounded && monotone && slope <= -1.7 && massless <= 1e-12,
            format!("bounded {bounded}, monotone {monotone}, slope {slope:.3} <= -1.7, massless {massless:.1e} <= 1e-12"),
        ))
    })
}

pub fn threshold_formula() -> CriterionResult {
    timed(7, "threshold formula", 5.0, || {
        let k = kappa_threshold(5.0, 1.0, 1.0, 0.01)?;
        let g = SpectralGrid::new(16.0, 512)?;
        let sup = sup_phase_factor(&pauli_model(1.0), &g, 1.0, 106.0, 5.0);
        Ok(Outcome::new(
            (k - 105.0).abs() < 1e-12 && sup < 0.01,
            format!("kappa' = {k}, sup factor at 106 {sup:.3e} < 0.01"),
        ))
    })
}

pub fn limit_toy_consistency() -> CriterionResult {
    timed(8, "limit/toy consistency", 1.0, || {
        let g = SpectralGrid::new(16.0, 1024)?;
        let m = pauli_model(1.0);
        let e = eta();
        let psi = WaveField::from_fn(&g, 2, |z| if z > 0.0 && z < 8.0 { e.clone() } else { CVector::zeros(2) });
        let a = limit_truncated_chi(&m, &psi, 1.0, &m.kappa_op)?;
        let b = solve_toy_bvp(&m, &psi, 1.0)?;
        let d = a.max_distance(&b)?;
        Ok(Outcome::new(d <= 1e-10, format!("max distance {d:.2e} <= 1e-10")))
    })
}

pub fn monte_carlo() -> CriterionResult {
    timed(9, "Monte Carlo vs deterministic", 30.0, || {
        let g = SpectralGrid::new(32.0, 2048)?;
        let m = pauli_model(0.0);
        let kind = DensityKind::Exponential { rate: 1.0 };
        let d = JumpDensity::new(kind, &g)?;
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]));
        let e = eta();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("thread pool")
                .install(|| mc_expectation(&m, &d, &a, &e, 1.0, 100_000, 7))
        };
        let one = run(1)?;
        let four = run(4)?;
        let q = quadrature_expectation(&m, kind, &g, &a, &e, 1.0, 1e-12);
        let gap = (one.mean - q).abs();
        let bitwise = one.mean.to_bits() == four.mean.to_bits() && one.stderr.to_bits() == four.stderr.to_bits();
        Ok(Outcome::new(
            gap <= 4.0 * one.stderr && one.max_norm_defect <= 1e-12 && bitwise,
            format!(
                "|mean-quad| {gap:.2e} <= {:.2e}, norm {:.1e} <= 1e-12, bitwise {bitwise}",
                4.0 * one.stderr,
                one.max_norm_defect
            ),
        ))
    })
}

pub fn time_reversal() -> CriterionResult {
    timed(10, "time reversal", 5.0, || {
        let g = SpectralGrid::new(16.0, 1024)?;
        let psi0 = oracles::gaussian(&g, &eta(), &InitialSpec { center: 6.0, width: 1.0, carrier: 0.0 });
        let toy = time_reversal_check(&pauli_model(0.0), &psi0, 1.0)?.max_defect();

        let g = SpectralGrid::new(16.0, 512)?;
        let rm = ReflectModel::new(&DressedSpec::from_model(pauli_model(1.0)), &g)?;
        let e = CVector::from_vec(vec![c(0.8, 0.0), c(0.0, 0.6)]);
        let f = reflect_input(&rm, &g, &e, &InitialSpec { center: 2.0, width: 1.5, carrier: -5.0 });
        let reflect = rm.time_reversal_check(&f, 1.0)?.max_defect();
        Ok(Outcome::new(
            toy <= 1e-8 && reflect <= 1e-8,
            format!("toy {toy:.2e}, reflect {reflect:.2e} <= 1e-8"),
        ))
    })
}

/// Criteria 1 to 10 in order.
pub fn run_numerical() -> Vec<CriterionResult> {
    vec![
        toy_equivalence(),
        cocycle_and_unitarity(),
        ito_orders(),
        reflection_model(),
        scalar_inequality(),
        ultrarelativistic_convergence(),
        threshold_formula(),
        limit_toy_consistency(),
        monte_carlo(),
        time_reversal(),
    ]
}

const SELF_TEST_BUDGET_S: f64 = 300.0;

/// The in-process suite: criteria 1 to 10, then 11 for the suite as a whole.
pub fn self_test() -> Vec<CriterionResult> {
    let start = Instant::now();
    let mut results = run_numerical();
    let elapsed = start.elapsed().as_secs_f64();
    let failed = results.iter().filter(|r| !r.passed).count();
    results.push(CriterionResult {
        id: 11,
        name: "full self-test",
        passed: failed == 0 && elapsed < SELF_TEST_BUDGET_S,
        detail: format!("{failed} failed criteria"),
        runtime_s: elapsed,
        budget_s: SELF_TEST_BUDGET_S,
    });
    results
}

/// Criterion 11 measured from outside: `binary self-test` must exit 0 within the budget.
pub fn self_test_binary(binary: &Path) -> CriterionResult {
    let start = Instant::now();
    let status = Command::new(binary).arg("self-test").output();
    let runtime_s = start.elapsed().as_secs_f64();
    let (ok, detail) = match status {
        Ok(out) => (out.status.success(), format!("exit status {}", out.status.code().unwrap_or(-1))),
        Err(e) => (false, format!("cannot run {}: {e}", binary.display())),
    };
    CriterionResult {
        id: 11,
        name: "full self-test",
        passed: ok && runtime_s < SELF_TEST_BUDGET_S,
        detail,
        runtime_s,
        budget_s: SELF_TEST_BUDGET_S,
    }
}
