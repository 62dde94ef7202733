//! Self-check suite: operator algebra, agreement between the closed-form,
//! basis-sum and oracle routes, and the exact limit values.

use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;

use crate::basis::{enumerate_basis, TransitionLabel};
use crate::closed_form as cf;
use crate::error::Result;
use crate::observables::{self as obs, Channel, ObservableReport};
use crate::oracle::{build_generator, oracle_observables, steady_state_evolve, steady_state_null, DensityOperator};
use crate::reservoir::{EnsembleConfig, PumpParameter as P};
use crate::steady::SteadyWeights;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    /// Largest deviation seen (relative or absolute, see `name`).
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: Option<String>,
}

impl CheckResult {
    fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            detail: None,
        }
    }

    fn failed(name: impl Into<String>, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            residual: f64::INFINITY,
            tolerance,
            passed: false,
            detail: Some(detail),
        }
    }

    fn from_result(name: &str, tolerance: f64, r: Result<f64>) -> Self {
        match r {
            Ok(res) => Self::new(name, res, tolerance),
            Err(e) => Self::failed(name, tolerance, e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyOptions {
    /// Multiply basis-sum weight `k` by `1 + rel` before comparing routes.
    pub perturb_weight: Option<(usize, f64)>,
    /// Largest ensemble fed to the oracle.
    pub oracle_max_atoms: usize,
}

impl VerifyOptions {
    pub fn standard() -> Self {
        Self {
            perturb_weight: None,
            oracle_max_atoms: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One line per check.
    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                let mut line = format!("{mark} {:<44} residual {:.3e} (tol {:.0e})", c.name, c.residual, c.tolerance);
                if let Some(d) = &c.detail {
                    line.push_str(&format!(": {d}"));
                }
                line
            })
            .collect()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn opt_rel(a: Option<f64>, b: Option<f64>) -> f64 {
    match (a, b) {
        (Some(a), Some(b)) => rel(a, b),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// `[S_αβ, S_μν] = δ_βμ S_αν - δ_να S_μβ` for every pair, `N ≤ n_max`.
pub fn commutator_residual(n_max: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in 1..=n_max {
        let b = enumerate_basis(n)?;
        let ops: Vec<_> = TransitionLabel::all().map(|t| (t, b.operator_matrix(t))).collect();
        let zero = DMatrix::<f64>::zeros(b.len(), b.len());
        let find = |t: TransitionLabel| &ops.iter().find(|(u, _)| *u == t).unwrap().1;
        for (x, mx) in &ops {
            for (y, my) in &ops {
                let lhs = mx * my - my * mx;
                let mut rhs = zero.clone();
                if x.beta == y.alpha {
                    rhs += find(TransitionLabel::new(x.alpha, y.beta));
                }
                if y.beta == x.alpha {
                    rhs -= find(TransitionLabel::new(y.alpha, x.beta));
                }
                worst = worst.max(max_abs(&(lhs - rhs)));
            }
        }
    }
    Ok(worst)
}

fn route_residual(a: &ObservableReport, b: &ObservableReport) -> f64 {
    [
        rel(a.s11, b.s11),
        rel(a.s22, b.s22),
        rel(a.s33, b.s33),
        rel(a.sz, b.sz),
        opt_rel(a.sz2, b.sz2),
        opt_rel(a.g1_1, b.g1_1),
        opt_rel(a.g1_2, b.g1_2),
        opt_rel(a.g1_total, b.g1_total),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Basis sums vs printed closed forms on `N ∈ {1,2,3,5,10,20}`,
/// `η ∈ {0.05, 0.15, ..., 0.95}`, both dipole modes.
pub fn route_equivalence(perturb: Option<(usize, f64)>) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in [1, 2, 3, 5, 10, 20] {
        for i in 0..10 {
            let eta = 0.05 + 0.1 * i as f64;
            for cfg in [
                EnsembleConfig::orthogonal_eta(n, eta)?,
                EnsembleConfig::interfering_eta(n, eta, 0.0)?,
            ] {
                let mut w = crate::steady::steady_weights(&cfg)?;
                if let Some((k, r)) = perturb {
                    w = w.perturbed(k.min(w.weights().len() - 1), r)?;
                }
                let a = obs::report_from_weights(&cfg, &w);
                let b = obs::closed_form_report(&cfg)?;
                worst = worst.max(route_residual(&a, &b));
            }
        }
    }
    Ok(worst)
}

/// Total-field correlator sums vs the inversion-moment form of `G1`, `g²`.
pub fn moment_form_consistency() -> Result<f64> {
    let mut worst = 0.0f64;
    for n in [1, 2, 3, 5, 10, 20] {
        for i in 0..10 {
            let w = SteadyWeights::from_pumps(n, P::Finite(0.05 + 0.1 * i as f64), P::Finite(0.05 + 0.1 * i as f64))?;
            let (a1, a2) = obs::indistinguishable_of(&w)?;
            let (b1, b2) = obs::indistinguishable_from_moments(&w)?;
            worst = worst.max(rel(a1, b1)).max(rel(a2, b2));
        }
    }
    Ok(worst)
}

/// Maximum elementwise `|ρ_oracle - diag(w)|`.
fn oracle_deviation(cfg: &EnsembleConfig) -> Result<f64> {
    let (rho, _) = steady_state_null(&build_generator(cfg)?)?;
    let w = crate::steady::steady_weights(cfg)?;
    let exact = DensityOperator::from_weights(&w)?;
    Ok((rho.matrix() - exact.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

pub fn oracle_equivalence(n_max: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in 1..=n_max {
        for (e1, e2) in [(0.2, 0.2), (0.5, 0.3), (0.1, 0.8)] {
            worst = worst.max(oracle_deviation(&EnsembleConfig::orthogonal(n, P::from_eta(e1)?, P::from_eta(e2)?))?);
        }
        for theta_deg in [30.0f64, 60.0] {
            worst = worst.max(oracle_deviation(&EnsembleConfig::interfering_eta(n, 0.5, theta_deg.to_radians())?)?);
        }
    }
    Ok(worst)
}

/// `max |L(ρ_exact)|` for parallel dipoles, where the generator has several
/// stationary states and the exact one is only one of them.
pub fn parallel_dipole_stationarity(n_max: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in 1..=n_max {
        let cfg = EnsembleConfig::interfering(n, P::from_nbar(1.0)?, 0.0);
        let rho = DensityOperator::from_weights(&crate::steady::steady_weights(&cfg)?)?;
        worst = worst.max(crate::oracle::residual(&build_generator(&cfg)?, &rho));
    }
    Ok(worst)
}

/// `N = 4`, `θ = π/4`, `n̄ = 0.8`: diagonal equals the `η^{n+m}` weights.
pub fn oracle_interfering_example() -> Result<f64> {
    let p = P::from_nbar(0.8)?;
    oracle_deviation(&EnsembleConfig::interfering(4, p, FRAC_PI_4))
}

/// Oracle observables (traces) vs basis sums, including the total-field
/// `g²` against the moment formula.
pub fn oracle_observables_agree(n_max: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in 1..=n_max.min(4) {
        for cfg in [
            EnsembleConfig::orthogonal_eta(n, 0.4)?,
            EnsembleConfig::interfering_eta(n, 0.4, 0.5)?,
        ] {
            let (rho, _) = steady_state_null(&build_generator(&cfg)?)?;
            let a = oracle_observables(&rho, &cfg)?;
            let b = obs::basis_sum_report(&cfg)?;
            worst = worst.max(route_residual(&a, &b));
            for (x, y) in [(a.g2_11, b.g2_11), (a.g2_22, b.g2_22), (a.g2_12, b.g2_12), (a.g2_21, b.g2_21), (a.g2_total, b.g2_total)] {
                worst = worst.max(opt_rel(x, y));
            }
        }
    }
    Ok(worst)
}

/// Null-space and time-evolution steady states agree.
pub fn evolution_agreement() -> Result<f64> {
    let cfg = EnsembleConfig::orthogonal_eta(2, 0.5)?;
    let gen = build_generator(&cfg)?;
    let (exact, _) = steady_state_null(&gen)?;
    let ground = DensityOperator::ground_state(gen.basis().clone())?;
    let (rho, _) = steady_state_evolve(&gen, &ground, 1e5, 1e-11)?;
    Ok((rho.matrix() - exact.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Strong- and weak-field limit values.
pub fn limit_regressions() -> Result<f64> {
    let mut worst = 0.0f64;
    for n in [1usize, 2, 5, 20, 200] {
        let nf = n as f64;
        let sat = SteadyWeights::from_pumps(n, P::Saturated, P::Saturated)?;
        let i = obs::intensity_of(&sat, Channel::Lower);
        worst = worst.max(rel(i, nf * (3.0 + nf) / 12.0));
        worst = worst.max(rel(cf::g1_strong_limit(n), nf * (3.0 + nf) / 12.0));
        if n > 1 {
            let g22 = obs::g2_channel_of(&sat, Channel::Lower, Channel::Lower)?;
            worst = worst.max(rel(g22, 8.0 * (nf - 1.0) * (nf + 4.0) / (5.0 * nf * (3.0 + nf))));
        }
        let (g1, g2) = obs::indistinguishable_of(&sat)?;
        let (first, second) = obs::total_field_correlators_of(&sat);
        worst = worst.max(rel(g1, nf * (3.0 + nf) / 6.0));
        worst = worst.max(rel(g2, (8.0 * nf * nf + 24.0 * nf - 17.0) / (5.0 * nf * (3.0 + nf))));
        worst = worst.max(rel(first, g1)).max(rel(second / (first * first), g2));
        let vac = SteadyWeights::from_pumps(n, P::VACUUM, P::VACUUM)?;
        worst = worst.max(rel(obs::indistinguishable_of(&vac)?.1, 2.0 - 1.0 / nf));
    }
    let one = P::from_nbar(1.0)?;
    let p = obs::populations(&EnsembleConfig::orthogonal(1, one, one))?;
    for (a, b) in [(p.s11, 1.0 / 7.0), (p.s22, 2.0 / 7.0), (p.s33, 4.0 / 7.0)] {
        worst = worst.max(rel(a, b));
    }
    worst = worst.max(rel(obs::observables_indistinguishable(&EnsembleConfig::interfering(1, one, 0.0))?.1, 7.0 / 9.0));
    Ok(worst)
}

pub fn run_verify(options: &VerifyOptions) -> VerifyReport {
    let n_oracle = options.oracle_max_atoms;
    let checks = vec![
        CheckResult::from_result("commutators N<=8 (abs)", 1e-12, commutator_residual(8)),
        CheckResult::from_result(
            "basis sum vs closed form (rel)",
            1e-8,
            route_equivalence(options.perturb_weight),
        ),
        CheckResult::from_result("total-field sums vs moment form (rel)", 1e-9, moment_form_consistency()),
        CheckResult::from_result(
            &format!("oracle vs exact state N<={n_oracle} (abs)"),
            1e-8,
            oracle_equivalence(n_oracle),
        ),
        CheckResult::from_result(
            "oracle N=4 theta=45 nbar=0.8 (abs)",
            1e-8,
            oracle_interfering_example(),
        ),
        CheckResult::from_result(
            "exact state stationary at theta=0 (abs)",
            1e-12,
            parallel_dipole_stationarity(n_oracle),
        ),
        CheckResult::from_result("oracle traces vs basis sums (rel)", 1e-7, oracle_observables_agree(n_oracle)),
        CheckResult::from_result("time evolution vs null space (abs)", 1e-7, evolution_agreement()),
        CheckResult::from_result("limit formulas (rel)", 1e-12, limit_regressions()),
    ];
    VerifyReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let r = run_verify(&VerifyOptions::standard());
        assert!(r.all_passed(), "{:#?}", r.lines());
    }

    #[test]
    fn perturbed_weight_is_detected() {
        let r = route_equivalence(Some((1, 1e-3))).unwrap();
        assert!(r > 1e-8, "{r}");
    }
}
