//! Reservoir descriptions and the dimensionless parameters derived from them.
//!
//! Everything downstream works in terms of the pump parameter
//! `η = n̄ / (1 + n̄)`. The strong-bath limit `n̄ → ∞` is carried as
//! [`PumpParameter::Saturated`] rather than as `η = 1.0` in floating point.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 exact or recommended values, SI units.
pub mod constants {
    /// Reduced Planck constant, J s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Boltzmann constant, J / K.
    pub const K_B: f64 = 1.380_649e-23;
    /// Speed of light in vacuum, m / s.
    pub const C: f64 = 299_792_458.0;
    /// Vacuum permittivity, F / m.
    pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
}

use constants::{C, EPSILON_0, HBAR, K_B};

/// Mean reservoir occupation in the `η` parameterization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpParameter {
    /// `η ∈ [0, 1)`.
    Finite(f64),
    /// The `η → 1` (`n̄ → ∞`) limit.
    Saturated,
}

impl PumpParameter {
    pub const VACUUM: Self = PumpParameter::Finite(0.0);

    /// `η = 1` maps to the saturated limit; values outside `[0, 1]` are rejected.
    pub fn from_eta(eta: f64) -> Result<Self> {
        if eta == 1.0 {
            Ok(PumpParameter::Saturated)
        } else if (0.0..1.0).contains(&eta) {
            Ok(PumpParameter::Finite(eta))
        } else {
            Err(Error::Domain(format!("pump parameter eta = {eta} outside [0, 1]")))
        }
    }

    pub fn from_nbar(nbar: f64) -> Result<Self> {
        if nbar == f64::INFINITY {
            Ok(PumpParameter::Saturated)
        } else if nbar.is_finite() && nbar >= 0.0 {
            Ok(PumpParameter::Finite(nbar / (1.0 + nbar)))
        } else {
            Err(Error::Domain(format!("mean occupation nbar = {nbar} must be >= 0")))
        }
    }

    pub fn eta(self) -> f64 {
        match self {
            PumpParameter::Finite(eta) => eta,
            PumpParameter::Saturated => 1.0,
        }
    }

    /// `n̄ = η / (1 - η)`; `None` in the saturated limit.
    pub fn nbar(self) -> Option<f64> {
        match self {
            PumpParameter::Finite(eta) => Some(eta / (1.0 - eta)),
            PumpParameter::Saturated => None,
        }
    }

    pub fn is_saturated(self) -> bool {
        matches!(self, PumpParameter::Saturated)
    }
}

/// Relative orientation of the two transition dipoles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DipoleMode {
    /// `d12 ⊥ d23`: no cross damping, distinguishable photons.
    Orthogonal,
    /// Non-orthogonal dipoles with cross damping, indistinguishable photons.
    Interfering,
}

impl DipoleMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DipoleMode::Orthogonal => "orthogonal",
            DipoleMode::Interfering => "interfering",
        }
    }
}

impl std::str::FromStr for DipoleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orthogonal" => Ok(DipoleMode::Orthogonal),
            "interfering" => Ok(DipoleMode::Interfering),
            other => Err(Error::Domain(format!("unknown dipole mode {other:?}"))),
        }
    }
}

/// One atomic transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionSpec {
    /// Angular frequency, rad / s.
    pub omega: f64,
    /// Dipole moment magnitude, C m.
    pub dipole: f64,
    /// Half the natural line width, 1 / s.
    pub gamma: f64,
}

impl TransitionSpec {
    pub fn new(omega: f64, dipole: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("omega", omega), ("dipole", dipole), ("gamma", gamma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("transition {name} = {v} must be positive")));
            }
        }
        Ok(Self { omega, dipole, gamma })
    }

    /// Uses the spontaneous line width `2γ = d² ω³ / (3π ε0 ħ c³)`.
    pub fn from_dipole(omega: f64, dipole: f64) -> Result<Self> {
        let full_width = dipole * dipole * omega.powi(3) / (3.0 * std::f64::consts::PI * EPSILON_0 * HBAR * C.powi(3));
        Self::new(omega, dipole, full_width / 2.0)
    }
}

/// How a transition's reservoir is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BathSpec {
    Thermal { omega: f64, temperature: f64 },
    Pump { rate: f64, dipole: f64, gamma: f64 },
    Direct { nbar: f64 },
    Saturated,
}

impl BathSpec {
    pub fn nbar(self) -> Result<f64> {
        match self {
            BathSpec::Thermal { omega, temperature } => nbar_thermal(omega, temperature),
            BathSpec::Pump { rate, dipole, gamma } => nbar_pump(rate, dipole, gamma),
            BathSpec::Direct { nbar } => {
                PumpParameter::from_nbar(nbar)?;
                Ok(nbar)
            }
            BathSpec::Saturated => Ok(f64::INFINITY),
        }
    }

    pub fn pump_parameter(self) -> Result<PumpParameter> {
        PumpParameter::from_nbar(self.nbar()?)
    }
}

/// Planck occupation `1 / (exp(ħω / k_B T) - 1)`.
pub fn nbar_thermal(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("omega = {omega} must be positive")));
    }
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::Domain(format!("temperature T = {temperature} must be positive")));
    }
    Ok(nbar_from_energy_ratio(HBAR * omega / (K_B * temperature)))
}

/// Planck occupation as a function of `x = ħω / k_B T`; `x = ∞` gives 0.
pub fn nbar_from_energy_ratio(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// Incoherent pump occupation `R d² / (γ ħ²)`.
pub fn nbar_pump(rate: f64, dipole: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("decay rate gamma = {gamma} must be positive")));
    }
    if !(dipole > 0.0) {
        return Err(Error::Domain(format!("dipole = {dipole} must be positive")));
    }
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::Domain(format!("pump strength R = {rate} must be >= 0")));
    }
    Ok(rate * dipole * dipole / (gamma * HBAR * HBAR))
}

/// Full description of an ensemble and its reservoirs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub n_atoms: usize,
    /// Reservoir of the upper transition `|1⟩ ↔ |2⟩`.
    pub bath1: PumpParameter,
    /// Reservoir of the lower transition `|2⟩ ↔ |3⟩`.
    pub bath2: PumpParameter,
    /// Angle between `d12` and `d23`, radians.
    pub theta: f64,
    pub mode: DipoleMode,
    pub gamma1: f64,
    pub gamma2: f64,
    /// `|d12| / |d23|`.
    pub dipole_ratio: f64,
}

impl EnsembleConfig {
    pub fn orthogonal(n_atoms: usize, bath1: PumpParameter, bath2: PumpParameter) -> Self {
        Self {
            n_atoms,
            bath1,
            bath2,
            theta: FRAC_PI_2,
            mode: DipoleMode::Orthogonal,
            gamma1: 1.0,
            gamma2: 1.0,
            dipole_ratio: 1.0,
        }
    }

    pub fn interfering(n_atoms: usize, bath: PumpParameter, theta: f64) -> Self {
        Self {
            theta,
            mode: DipoleMode::Interfering,
            ..Self::orthogonal(n_atoms, bath, bath)
        }
    }

    /// Orthogonal ensemble with `η1 = η2 = eta`.
    pub fn orthogonal_eta(n_atoms: usize, eta: f64) -> Result<Self> {
        let p = PumpParameter::from_eta(eta)?;
        Ok(Self::orthogonal(n_atoms, p, p))
    }

    pub fn interfering_eta(n_atoms: usize, eta: f64, theta: f64) -> Result<Self> {
        Ok(Self::interfering(n_atoms, PumpParameter::from_eta(eta)?, theta))
    }

    pub fn with_decay_rates(mut self, gamma1: f64, gamma2: f64) -> Self {
        self.gamma1 = gamma1;
        self.gamma2 = gamma2;
        self
    }

    pub fn with_dipole_ratio(mut self, ratio: f64) -> Self {
        self.dipole_ratio = ratio;
        self
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta.to_degrees()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_atoms < 1 {
            return Err(Error::Domain("ensemble needs at least one atom".into()));
        }
        for bath in [self.bath1, self.bath2] {
            if let PumpParameter::Finite(eta) = bath {
                if !(0.0..1.0).contains(&eta) {
                    return Err(Error::Domain(format!("pump parameter eta = {eta} outside [0, 1)")));
                }
            }
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.theta) {
            return Err(Error::Domain(format!("theta = {} rad outside [0, pi]", self.theta)));
        }
        if self.mode == DipoleMode::Orthogonal && (self.theta - FRAC_PI_2).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "orthogonal mode requires theta = 90 deg, got {} deg",
                self.theta_deg()
            )));
        }
        for (name, v) in [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("dipole_ratio", self.dipole_ratio),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// Cross-damping rates `(γ12, γ21)`; exactly zero in orthogonal mode.
    pub fn cross_damping(&self) -> (f64, f64) {
        match self.mode {
            DipoleMode::Orthogonal => (0.0, 0.0),
            DipoleMode::Interfering => {
                let c = self.theta.cos();
                (self.gamma2 * self.dipole_ratio * c, self.gamma1 * c / self.dipole_ratio)
            }
        }
    }

    /// Single `η` when both reservoirs coincide.
    pub fn common_pump(&self) -> Option<PumpParameter> {
        (self.bath1 == self.bath2).then_some(self.bath1)
    }
}

/// Dimensionless steady-state parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub eta1: PumpParameter,
    pub eta2: PumpParameter,
    /// `ξ1 = ln[(1 + n̄1) / n̄1]`; `+∞` when `n̄1 = 0`.
    pub xi1: f64,
    /// `ξ3 = ln[n̄2 / (1 + n̄2)]`; `-∞` when `n̄2 = 0`.
    pub xi3: f64,
    pub gamma12: f64,
    pub gamma21: f64,
    /// Set when either reservoir is in the saturated limit.
    pub strong_field: bool,
}

pub fn derive(config: &EnsembleConfig) -> Result<DerivedParams> {
    config.validate()?;
    if config.mode == DipoleMode::Interfering && config.bath1 != config.bath2 {
        return Err(Error::ClosedFormUnavailable(
            "interfering dipoles are solvable only for nbar1 = nbar2".into(),
        ));
    }
    let (gamma12, gamma21) = config.cross_damping();
    // In interfering mode ξ1 = -ξ3 = ξ = ln[(1+n̄)/n̄], which coincides with
    // the orthogonal expressions at η1 = η2.
    Ok(DerivedParams {
        eta1: config.bath1,
        eta2: config.bath2,
        xi1: -config.bath1.eta().ln(),
        xi3: config.bath2.eta().ln(),
        gamma12,
        gamma21,
        strong_field: config.bath1.is_saturated() || config.bath2.is_saturated(),
    })
}

/// Whether cross damping must be kept for the given transition frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApplicabilityReport {
    /// `|ω12 - ω23|`.
    pub detuning: f64,
    /// `N γ (1 + n̄)`, the smaller of the two transitions.
    pub gamma_eff: f64,
    pub applicable: bool,
}

pub fn interference_applicability(config: &EnsembleConfig, omega12: f64, omega23: f64) -> ApplicabilityReport {
    let detuning = (omega12 - omega23).abs();
    let width = |gamma: f64, bath: PumpParameter| match bath.nbar() {
        Some(nbar) => config.n_atoms as f64 * gamma * (1.0 + nbar),
        None => f64::INFINITY,
    };
    let gamma_eff = width(config.gamma1, config.bath1).min(width(config.gamma2, config.bath2));
    ApplicabilityReport {
        detuning,
        gamma_eff,
        applicable: detuning <= gamma_eff,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn planck_occupation() {
        assert_eq!(nbar_from_energy_ratio(f64::INFINITY), 0.0);
        assert!((nbar_from_energy_ratio(LN_2) - 1.0).abs() < 1e-12);
        assert!((nbar_from_energy_ratio((1.5f64).ln()) - 2.0).abs() < 1e-12);
        assert_eq!(nbar_thermal(1e15, 1e-300).unwrap(), 0.0);
        assert!(nbar_thermal(1e15, 0.0).is_err());
        assert!(nbar_thermal(-1.0, 300.0).is_err());

        // ħω / k_B T = ln 2 through the SI route.
        let omega = 2.0e13;
        let t = HBAR * omega / (K_B * LN_2);
        assert!((nbar_thermal(omega, t).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pump_occupation() {
        assert_eq!(nbar_pump(0.0, 1e-29, 1e7).unwrap(), 0.0);
        let (d, g) = (2.5e-29, 3e7);
        let unit_rate = g * HBAR * HBAR / (d * d);
        assert!((nbar_pump(unit_rate, d, g).unwrap() - 1.0).abs() < 1e-12);
        assert!((nbar_pump(2.0 * unit_rate, d, g).unwrap() - 2.0).abs() < 1e-12);
        assert!(nbar_pump(1.0, d, 0.0).is_err());
    }

    #[test]
    fn derived_parameters() {
        let cfg = EnsembleConfig::orthogonal_eta(3, 0.5).unwrap();
        let p = derive(&cfg).unwrap();
        assert_eq!(p.eta1.eta(), 0.5);
        assert!((p.xi1 - LN_2).abs() < 1e-15);
        assert!((p.xi3 + LN_2).abs() < 1e-15);
        assert_eq!((p.gamma12, p.gamma21), (0.0, 0.0));

        let one = PumpParameter::from_nbar(1.0).unwrap();
        let p = derive(&EnsembleConfig::interfering(3, one, 0.3)).unwrap();
        assert!((p.xi1 - LN_2).abs() < 1e-15 && (p.xi1 + p.xi3).abs() < 1e-15);

        let cfg = EnsembleConfig::interfering(2, one, FRAC_PI_2).with_dipole_ratio(3.0);
        let (g12, g21) = cfg.cross_damping();
        assert!(g12.abs() < 1e-15 && g21.abs() < 1e-15);

        let sat = derive(&EnsembleConfig::orthogonal_eta(2, 1.0).unwrap()).unwrap();
        assert!(sat.strong_field && sat.xi1 == 0.0 && sat.xi3 == 0.0);
    }

    #[test]
    fn interfering_needs_equal_baths() {
        let mut cfg = EnsembleConfig::interfering(2, PumpParameter::Finite(0.3), 0.0);
        cfg.bath2 = PumpParameter::Finite(0.4);
        assert!(matches!(derive(&cfg), Err(Error::ClosedFormUnavailable(_))));
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn cross_damping_formula() {
        let cfg = EnsembleConfig::interfering(2, PumpParameter::Finite(0.3), 1.0)
            .with_decay_rates(2.0, 0.5)
            .with_dipole_ratio(2.0);
        let (g12, g21) = cfg.cross_damping();
        assert!((g12 - 0.5 * 2.0 * 1f64.cos()).abs() < 1e-15);
        assert!((g21 - 2.0 * 1f64.cos() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn applicability() {
        let cfg = EnsembleConfig::interfering(20, PumpParameter::from_nbar(1.0).unwrap(), 0.0);
        assert!(interference_applicability(&cfg, 5.0, 5.0).applicable);
        let r = interference_applicability(&cfg, 100.0, 70.0);
        assert_eq!(r.gamma_eff, 40.0);
        assert!(r.applicable);
        assert!(!interference_applicability(&cfg, 400.0, 0.0).applicable);
    }

    #[test]
    fn line_width_from_dipole() {
        let omega = 2.0 * std::f64::consts::PI * C / 780e-9;
        let t = TransitionSpec::from_dipole(omega, 3.58e-29).unwrap();
        // Optical dipole of a few e a0: line width of order 1e7 / s.
        assert!(t.gamma > 1e7 && t.gamma < 6e7, "{}", t.gamma);
    }

    #[test]
    fn eta_maps() {
        assert!(PumpParameter::from_eta(1.0).unwrap().is_saturated());
        assert!(PumpParameter::from_eta(1.2).is_err());
        assert!(PumpParameter::from_nbar(-1.0).is_err());
        assert_eq!(PumpParameter::from_nbar(1.0).unwrap().eta(), 0.5);
        assert_eq!(PumpParameter::Finite(0.5).nbar(), Some(1.0));
    }
}
