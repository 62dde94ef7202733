//! Steady-state observables as finite sums over the diagonal weights.
//!
//! This is the primary evaluation path. Per-channel photon statistics use
//! `J1 = S21` (upper transition) and `J2 = S32` (lower transition).

use serde::{Deserialize, Serialize};

use crate::basis::TransitionLabel as T;
use crate::closed_form;
use crate::error::{Error, Result};
use crate::reservoir::{DipoleMode, EnsembleConfig, PumpParameter};
use crate::steady::{steady_weights, SteadyWeights};

/// Level populations `(⟨S11⟩, ⟨S22⟩, ⟨S33⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Populations {
    pub s11: f64,
    pub s22: f64,
    pub s33: f64,
}

impl Populations {
    pub fn total(&self) -> f64 {
        self.s11 + self.s22 + self.s33
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            s11: self.s11 * factor,
            s22: self.s22 * factor,
            s33: self.s33 * factor,
        }
    }
}

/// A distinguishable emission channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Channel {
    /// `|1⟩ → |2⟩`, `J1 = S21`.
    Upper,
    /// `|2⟩ → |3⟩`, `J2 = S32`.
    Lower,
}

impl Channel {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Channel::Upper),
            2 => Ok(Channel::Lower),
            other => Err(Error::Domain(format!("channel {other} is not 1 or 2"))),
        }
    }

    /// The lowering operator `J_i`.
    pub fn lowering(self) -> T {
        match self {
            Channel::Upper => T::S21,
            Channel::Lower => T::S32,
        }
    }
}

pub fn populations_of(w: &SteadyWeights) -> Populations {
    let n = w.n_atoms();
    Populations {
        s11: w.expect(|s| s.n() as f64),
        s22: w.expect(|s| (s.m() - s.n()) as f64),
        s33: w.expect(|s| (n - s.m()) as f64),
    }
}

/// `[⟨S_z⟩, ⟨S_z²⟩, ..., ⟨S_z^{k_max}⟩]`.
pub fn sz_moments_of(w: &SteadyWeights, k_max: u32) -> Vec<f64> {
    (1..=k_max as i32)
        .map(|k| w.expect(|s| (s.inversion() as f64).powi(k)))
        .collect()
}

/// `⟨J_i⁺ J_i⟩`.
pub fn intensity_of(w: &SteadyWeights, channel: Channel) -> f64 {
    let j = channel.lowering();
    w.expect_product(&[j.adjoint(), j])
}

/// `⟨J_i⁺ J_j⁺ J_j J_i⟩ / (⟨J_i⁺ J_i⟩ ⟨J_j⁺ J_j⟩)`.
pub fn g2_channel_of(w: &SteadyWeights, i: Channel, j: Channel) -> Result<f64> {
    let (a, b) = (i.lowering(), j.lowering());
    let denom = intensity_of(w, i) * intensity_of(w, j);
    if denom == 0.0 {
        return Err(Error::UndefinedStatistics(format!(
            "channel ({i:?}, {j:?}) emits no light at eta1 = {}, eta2 = {}",
            w.eta1().eta(),
            w.eta2().eta()
        )));
    }
    Ok(w.expect_product(&[a.adjoint(), b.adjoint(), b, a]) / denom)
}

/// `(⟨(J1⁺ + J2⁺)(J1 + J2)⟩, ⟨(J1⁺ + J2⁺)²(J1 + J2)²⟩)` by expanding the
/// total-field operators into all ordered products.
pub fn total_field_correlators_of(w: &SteadyWeights) -> (f64, f64) {
    let lowering = [T::S21, T::S32];
    let mut first = 0.0;
    for &a in &lowering {
        for &b in &lowering {
            first += w.expect_product(&[a.adjoint(), b]);
        }
    }
    let mut second = 0.0;
    for &a in &lowering {
        for &b in &lowering {
            for &c in &lowering {
                for &d in &lowering {
                    second += w.expect_product(&[a.adjoint(), b.adjoint(), c, d]);
                }
            }
        }
    }
    (first, second)
}

/// Indistinguishable intensity and `g²(0)` from the total-field correlator
/// sums, with the exact limit values at `η = 0` and `η = 1`.
///
/// The equivalent moment form `G1 = -n̄ ⟨S_z⟩` carries `1 / (1 - η)` factors
/// that cost precision near saturation; it is kept as a cross-check in
/// [`indistinguishable_from_moments`].
pub fn indistinguishable_of(w: &SteadyWeights) -> Result<(f64, f64)> {
    require_common_pump(w)?;
    let n = w.n_atoms();
    match w.eta1() {
        PumpParameter::Saturated => Ok((
            closed_form::g1_total_strong_limit(n),
            closed_form::g2_total_strong_limit(n),
        )),
        PumpParameter::Finite(e) if e == 0.0 => Ok((0.0, closed_form::g2_total_weak_limit(n))),
        PumpParameter::Finite(_) => {
            let (first, second) = total_field_correlators_of(w);
            Ok((first, second / (first * first)))
        }
    }
}

/// The same quantities from basis-summed `⟨S_z⟩`, `⟨S_z²⟩`; finite `0 < η < 1`.
pub fn indistinguishable_from_moments(w: &SteadyWeights) -> Result<(f64, f64)> {
    require_common_pump(w)?;
    match w.eta1() {
        PumpParameter::Finite(e) if e > 0.0 => {
            let m = sz_moments_of(w, 2);
            Ok((-e / (1.0 - e) * m[0], closed_form::g2_from_moments(e, m[0], m[1])))
        }
        _ => Err(Error::Domain("moment form needs 0 < eta < 1".into())),
    }
}

fn require_common_pump(w: &SteadyWeights) -> Result<()> {
    if w.eta1() != w.eta2() {
        return Err(Error::ClosedFormUnavailable(
            "indistinguishable photons need eta1 = eta2".into(),
        ));
    }
    Ok(())
}

/// Where the numbers in a report came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    ClosedForm,
    BasisSum,
    Oracle,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::ClosedForm => "closed_form",
            Source::BasisSum => "basis_sum",
            Source::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "closed_form" => Ok(Source::ClosedForm),
            "basis_sum" => Ok(Source::BasisSum),
            "oracle" => Ok(Source::Oracle),
            other => Err(Error::Domain(format!("unknown source {other:?}"))),
        }
    }
}

/// Every observable for one configuration. Field order is the CSV column
/// order. Quantities that are undefined for the configuration (wrong dipole
/// mode, zero intensity, no closed form) are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableReport {
    pub eta1: f64,
    pub eta2: f64,
    pub n_atoms: usize,
    pub theta_deg: f64,
    pub mode: DipoleMode,
    pub s11: f64,
    pub s22: f64,
    pub s33: f64,
    pub sz: f64,
    pub sz2: Option<f64>,
    pub g1_1: Option<f64>,
    pub g1_2: Option<f64>,
    pub g1_total: Option<f64>,
    pub g2_11: Option<f64>,
    pub g2_22: Option<f64>,
    pub g2_12: Option<f64>,
    pub g2_21: Option<f64>,
    pub g2_total: Option<f64>,
    pub source: Source,
}

impl ObservableReport {
    /// Report with only the parameter columns filled in.
    pub fn skeleton(config: &EnsembleConfig, source: Source) -> Self {
        Self {
            eta1: config.bath1.eta(),
            eta2: config.bath2.eta(),
            n_atoms: config.n_atoms,
            theta_deg: config.theta_deg(),
            mode: config.mode,
            s11: 0.0,
            s22: 0.0,
            s33: 0.0,
            sz: 0.0,
            sz2: None,
            g1_1: None,
            g1_2: None,
            g1_total: None,
            g2_11: None,
            g2_22: None,
            g2_12: None,
            g2_21: None,
            g2_total: None,
            source,
        }
    }

    pub fn populations(&self) -> Populations {
        Populations {
            s11: self.s11,
            s22: self.s22,
            s33: self.s33,
        }
    }

    pub fn g2(&self, i: Channel, j: Channel) -> Option<f64> {
        match (i, j) {
            (Channel::Upper, Channel::Upper) => self.g2_11,
            (Channel::Lower, Channel::Lower) => self.g2_22,
            (Channel::Upper, Channel::Lower) => self.g2_12,
            (Channel::Lower, Channel::Upper) => self.g2_21,
        }
    }
}

/// All observables from the basis sums.
pub fn basis_sum_report(config: &EnsembleConfig) -> Result<ObservableReport> {
    let w = steady_weights(config)?;
    Ok(report_from_weights(config, &w))
}

/// Fills a report from given weights (which need not be the exact ones).
pub fn report_from_weights(config: &EnsembleConfig, w: &SteadyWeights) -> ObservableReport {
    let mut r = ObservableReport::skeleton(config, Source::BasisSum);
    let pops = populations_of(w);
    let moments = sz_moments_of(w, 2);
    r.s11 = pops.s11;
    r.s22 = pops.s22;
    r.s33 = pops.s33;
    r.sz = moments[0];
    r.sz2 = Some(moments[1]);
    match config.mode {
        DipoleMode::Orthogonal => {
            use Channel::{Lower, Upper};
            r.g1_1 = Some(intensity_of(w, Upper));
            r.g1_2 = Some(intensity_of(w, Lower));
            r.g2_11 = g2_channel_of(w, Upper, Upper).ok();
            r.g2_22 = g2_channel_of(w, Lower, Lower).ok();
            r.g2_12 = g2_channel_of(w, Upper, Lower).ok();
            r.g2_21 = g2_channel_of(w, Lower, Upper).ok();
        }
        DipoleMode::Interfering => {
            if let Ok((g1, g2)) = indistinguishable_of(w) {
                r.g1_total = Some(g1);
                r.g2_total = Some(g2);
            }
        }
    }
    r
}

/// All observables that have an analytic expression.
pub fn closed_form_report(config: &EnsembleConfig) -> Result<ObservableReport> {
    crate::reservoir::derive(config)?;
    let n = config.n_atoms;
    let mut r = ObservableReport::skeleton(config, Source::ClosedForm);
    let pops = closed_form::populations(config.bath1, config.bath2, n)?;
    r.s11 = pops.s11;
    r.s22 = pops.s22;
    r.s33 = pops.s33;
    match config.common_pump() {
        Some(eta) => {
            r.sz = closed_form::sz(eta, n)?;
            r.sz2 = closed_form::sz2(eta, n).ok();
        }
        None => r.sz = pops.s11 - pops.s33,
    }
    match config.mode {
        DipoleMode::Orthogonal => {
            let (g1, g2) = closed_form::intensities(config.bath1, config.bath2, n)?;
            r.g1_1 = Some(g1);
            r.g1_2 = Some(g2);
            if config.bath1.is_saturated() && config.bath2.is_saturated() {
                r.g2_22 = Some(closed_form::g2_22_strong_limit(n));
            }
        }
        DipoleMode::Interfering => {
            let (g1, g2) = closed_form::indistinguishable(config.bath1, n)?;
            r.g1_total = Some(g1);
            r.g2_total = Some(g2);
        }
    }
    Ok(r)
}

/// Level populations for a configuration (basis-sum route).
pub fn populations(config: &EnsembleConfig) -> Result<Populations> {
    Ok(populations_of(&steady_weights(config)?))
}

/// Inversion moments `⟨S_z^k⟩`, `k = 1..=k_max` (basis-sum route).
pub fn sz_moments(config: &EnsembleConfig, k_max: u32) -> Result<Vec<f64>> {
    if k_max < 1 {
        return Err(Error::Domain("k_max must be at least 1".into()));
    }
    Ok(sz_moments_of(&steady_weights(config)?, k_max))
}

fn require_mode(config: &EnsembleConfig, mode: DipoleMode) -> Result<()> {
    if config.mode == mode {
        Ok(())
    } else {
        Err(Error::ModeMismatch(format!(
            "observable needs {} dipoles, config has {}",
            mode.as_str(),
            config.mode.as_str()
        )))
    }
}

/// `(⟨S12 S21⟩, ⟨S23 S32⟩)` for orthogonal dipoles.
pub fn intensities_distinguishable(config: &EnsembleConfig) -> Result<(f64, f64)> {
    require_mode(config, DipoleMode::Orthogonal)?;
    let w = steady_weights(config)?;
    Ok((intensity_of(&w, Channel::Upper), intensity_of(&w, Channel::Lower)))
}

pub fn g2_distinguishable(config: &EnsembleConfig, i: Channel, j: Channel) -> Result<f64> {
    require_mode(config, DipoleMode::Orthogonal)?;
    g2_channel_of(&steady_weights(config)?, i, j)
}

/// `(G1_total, g²_total)` for interfering dipoles.
pub fn observables_indistinguishable(config: &EnsembleConfig) -> Result<(f64, f64)> {
    require_mode(config, DipoleMode::Interfering)?;
    indistinguishable_of(&steady_weights(config)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use PumpParameter as P;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn single_atom_intensity_matches_population_difference() {
        let w = SteadyWeights::from_pumps(1, P::Finite(0.5), P::Finite(0.5)).unwrap();
        let g = w.expect_product(&[T::S23, T::S32]);
        assert!((g - 2.0 / 7.0).abs() < 1e-15);
        // n̄2 (⟨S33⟩ - ⟨S22⟩) with n̄2 = 1
        assert!((g - (4.0 / 7.0 - 2.0 / 7.0)).abs() < 1e-15);
    }

    #[test]
    fn vacuum_emits_nothing() {
        let cfg = EnsembleConfig::orthogonal_eta(5, 0.0).unwrap();
        assert_eq!(intensities_distinguishable(&cfg).unwrap(), (0.0, 0.0));
        assert!(matches!(
            g2_distinguishable(&cfg, Channel::Lower, Channel::Lower),
            Err(Error::UndefinedStatistics(_))
        ));
        let r = basis_sum_report(&cfg).unwrap();
        assert_eq!(r.s33, 5.0);
        assert_eq!(r.g2_22, None);
    }

    #[test]
    fn strong_field_branches() {
        let cfg = EnsembleConfig::orthogonal_eta(20, 1.0).unwrap();
        let (g1, g2) = intensities_distinguishable(&cfg).unwrap();
        assert!(rel(g1, 20.0 * 23.0 / 12.0) < 1e-12 && rel(g2, 20.0 * 23.0 / 12.0) < 1e-12);
        let g22 = g2_distinguishable(&cfg, Channel::Lower, Channel::Lower).unwrap();
        assert!(rel(g22, closed_form::g2_22_strong_limit(20)) < 1e-12);
        let p = populations(&cfg).unwrap();
        assert!(rel(p.s11, 20.0 / 3.0) < 1e-12 && rel(p.s33, 20.0 / 3.0) < 1e-12);
    }

    #[test]
    fn direct_total_field_matches_moment_form() {
        for n in [1, 2, 4, 9] {
            for e in [0.1, 0.5, 0.8] {
                let w = SteadyWeights::from_pumps(n, P::Finite(e), P::Finite(e)).unwrap();
                let (g1, g2) = indistinguishable_of(&w).unwrap();
                let (m1, m2) = indistinguishable_from_moments(&w).unwrap();
                assert!(rel(m1, g1) < 1e-12, "N={n} eta={e}");
                assert!(rel(m2, g2) < 1e-10, "N={n} eta={e}");
            }
        }
        // The same expansion at the saturated point reproduces the limits.
        for n in [1, 2, 6] {
            let w = SteadyWeights::from_pumps(n, P::Saturated, P::Saturated).unwrap();
            let (first, second) = total_field_correlators_of(&w);
            assert!(rel(first, closed_form::g1_total_strong_limit(n)) < 1e-12);
            assert!(rel(second / (first * first), closed_form::g2_total_strong_limit(n)) < 1e-12);
        }
    }

    #[test]
    fn mode_preconditions() {
        let cfg = EnsembleConfig::interfering_eta(3, 0.4, 0.0).unwrap();
        assert!(matches!(intensities_distinguishable(&cfg), Err(Error::ModeMismatch(_))));
        let cfg = EnsembleConfig::orthogonal_eta(3, 0.4).unwrap();
        assert!(matches!(observables_indistinguishable(&cfg), Err(Error::ModeMismatch(_))));
        assert!(sz_moments(&cfg, 0).is_err());
    }

    #[test]
    fn routes_agree_on_examples() {
        for cfg in [
            EnsembleConfig::orthogonal(6, P::Finite(0.3), P::Finite(0.6)),
            EnsembleConfig::interfering_eta(6, 0.45, 0.2).unwrap(),
        ] {
            let a = basis_sum_report(&cfg).unwrap();
            let b = closed_form_report(&cfg).unwrap();
            for (x, y) in [(a.s11, b.s11), (a.s22, b.s22), (a.s33, b.s33), (a.sz, b.sz)] {
                assert!(rel(x, y) < 1e-10, "{x} vs {y}");
            }
            for (x, y) in [(a.g1_1, b.g1_1), (a.g1_2, b.g1_2), (a.g1_total, b.g1_total), (a.g2_total, b.g2_total)] {
                assert_eq!(x.is_some(), y.is_some());
                if let (Some(x), Some(y)) = (x, y) {
                    assert!(rel(x, y) < 1e-10, "{x} vs {y}");
                }
            }
        }
    }
}
