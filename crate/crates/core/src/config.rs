//! JSON run configuration. Reservoirs may be given as `η`, `n̄`, a
//! temperature or a pump strength; all are converted to `η` here.
//!
//! ```json
//! { "n_atoms": 20, "nbar1": {"thermal": {"omega": 2e15, "T": 5000}},
//!   "nbar2": "saturated", "mode": "orthogonal" }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reservoir::{BathSpec, DipoleMode, EnsembleConfig, PumpParameter};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalInput {
    pub omega: f64,
    #[serde(rename = "T")]
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpInput {
    #[serde(rename = "R")]
    pub rate: f64,
    pub dipole: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Keyword {
    Saturated,
}

/// A reservoir occupation in any of the accepted forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BathInput {
    Nbar(f64),
    Keyword(Keyword),
    Thermal { thermal: ThermalInput },
    Pump { pump: PumpInput },
}

impl From<BathInput> for BathSpec {
    fn from(b: BathInput) -> Self {
        match b {
            BathInput::Nbar(nbar) => BathSpec::Direct { nbar },
            BathInput::Keyword(Keyword::Saturated) => BathSpec::Saturated,
            BathInput::Thermal { thermal } => BathSpec::Thermal {
                omega: thermal.omega,
                temperature: thermal.temperature,
            },
            BathInput::Pump { pump } => BathSpec::Pump {
                rate: pump.rate,
                dipole: pump.dipole,
                gamma: pump.gamma,
            },
        }
    }
}

/// Every key is optional so that files and command-line flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_atoms: Option<usize>,
    /// Common `η` for both transitions.
    pub eta: Option<f64>,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub nbar1: Option<BathInput>,
    pub nbar2: Option<BathInput>,
    pub theta_deg: Option<f64>,
    pub mode: Option<DipoleMode>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub omega12: Option<f64>,
    pub omega23: Option<f64>,
    pub dipole_ratio: Option<f64>,
}

fn pick<T>(over: Option<T>, base: Option<T>) -> Option<T> {
    over.or(base)
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// `self` with every key set in `over` replaced. A reservoir given in
    /// `over` in any form replaces every form of that reservoir in `self`.
    pub fn overridden_by(self, over: RunConfig) -> RunConfig {
        let touches1 = over.eta.is_some() || over.eta1.is_some() || over.nbar1.is_some();
        let touches2 = over.eta.is_some() || over.eta2.is_some() || over.nbar2.is_some();
        let mut base = self;
        if touches1 {
            base.eta1 = None;
            base.nbar1 = None;
        }
        if touches2 {
            base.eta2 = None;
            base.nbar2 = None;
        }
        if touches1 || touches2 {
            // A common η in the base survives only for the untouched side.
            if let Some(e) = base.eta.take() {
                if !touches1 {
                    base.eta1 = Some(e);
                }
                if !touches2 {
                    base.eta2 = Some(e);
                }
            }
        }
        RunConfig {
            n_atoms: pick(over.n_atoms, base.n_atoms),
            eta: pick(over.eta, base.eta),
            eta1: pick(over.eta1, base.eta1),
            eta2: pick(over.eta2, base.eta2),
            nbar1: pick(over.nbar1, base.nbar1),
            nbar2: pick(over.nbar2, base.nbar2),
            theta_deg: pick(over.theta_deg, base.theta_deg),
            mode: pick(over.mode, base.mode),
            gamma1: pick(over.gamma1, base.gamma1),
            gamma2: pick(over.gamma2, base.gamma2),
            omega12: pick(over.omega12, base.omega12),
            omega23: pick(over.omega23, base.omega23),
            dipole_ratio: pick(over.dipole_ratio, base.dipole_ratio),
        }
    }

    fn pump(&self, which: u8) -> Result<Option<PumpParameter>> {
        let (eta_i, nbar_i) = match which {
            1 => (self.eta1, self.nbar1),
            _ => (self.eta2, self.nbar2),
        };
        let given = [self.eta.is_some(), eta_i.is_some(), nbar_i.is_some()];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err(Error::Config(format!(
                "reservoir {which} is specified more than once (eta, eta{which}, nbar{which})"
            )));
        }
        if let Some(e) = self.eta.or(eta_i) {
            return PumpParameter::from_eta(e).map(Some);
        }
        nbar_i.map(|b| BathSpec::from(b).pump_parameter()).transpose()
    }

    /// Whether both reservoirs are present.
    pub fn has_reservoirs(&self) -> Result<bool> {
        Ok(self.pump(1)?.is_some() && self.pump(2)?.is_some())
    }

    /// The ensemble description; defaults: orthogonal mode, `θ = 90°`,
    /// `γ1 = γ2 = 1`, dipole ratio 1.
    pub fn ensemble(&self) -> Result<EnsembleConfig> {
        let n = self.n_atoms.ok_or_else(|| Error::Config("n_atoms is required".into()))?;
        let missing = |i: u8| Error::Config(format!("reservoir {i} is not specified"));
        let bath1 = self.pump(1)?.ok_or_else(|| missing(1))?;
        let bath2 = self.pump(2)?.ok_or_else(|| missing(2))?;
        let mode = self.mode.unwrap_or(DipoleMode::Orthogonal);
        let theta = self.theta_deg.unwrap_or(90.0).to_radians();
        let cfg = EnsembleConfig {
            n_atoms: n,
            bath1,
            bath2,
            theta,
            mode,
            gamma1: self.gamma1.unwrap_or(1.0),
            gamma2: self.gamma2.unwrap_or(1.0),
            dipole_ratio: self.dipole_ratio.unwrap_or(1.0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `(ω12, ω23)` if both transition frequencies are given.
    pub fn frequencies(&self) -> Option<(f64, f64)> {
        self.omega12.zip(self.omega23)
    }
}
