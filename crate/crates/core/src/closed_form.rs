//! Analytic expressions for the steady-state observables.
//!
//! These are the verification route. They contain removable singularities
//! at `η = 1` and `η1 η2 = 1`, so every function here is restricted to
//! `|1 - η| > CLOSED_FORM_MARGIN` and dispatches to the explicit limit
//! formulas at the domain boundary. The basis sums in
//! [`crate::observables`] are the primary route and carry no such
//! restriction.

use crate::error::{Error, Result};
use crate::observables::Populations;
use crate::reservoir::PumpParameter;

/// Minimum distance from the singular points `η = 1`, `η1 η2 = 1`.
pub const CLOSED_FORM_MARGIN: f64 = 1e-6;

/// `(1 - q^{N+1}) / (1 - q)`, i.e. `Σ_{k=0}^{N} q^k`.
fn geometric(q: f64, n: usize) -> f64 {
    if q == 1.0 {
        (n + 1) as f64
    } else {
        (1.0 - q.powi(n as i32 + 1)) / (1.0 - q)
    }
}

/// `f(ξ) = (1 - e^{-ξ(1+N)}) / (1 - e^{-ξ})`, exact at `ξ = 0`.
fn f_xi(xi: f64, n: usize) -> f64 {
    if xi == 0.0 {
        (n + 1) as f64
    } else {
        (-(xi * (n as f64 + 1.0))).exp_m1() / (-xi).exp_m1()
    }
}

/// Partition function
/// `Z = e^{-ξ3 N} / (1 - e^{ξ3}) [f(ξ1 - ξ3) - e^{ξ3(1+N)} f(ξ1)]`.
///
/// `ξ3 = 0` is handled by the limit
/// `Z = [(N + 1) - q f_q] / (1 - q)` with `q = e^{-ξ1}`, `f_q = Σ_{k=1}^{N+1} q^{k-1}`.
pub fn partition_function(xi1: f64, xi3: f64, n_atoms: usize) -> Result<f64> {
    if n_atoms < 1 {
        return Err(Error::Domain("ensemble needs at least one atom".into()));
    }
    if !(xi1.is_finite() && xi3.is_finite()) {
        return Err(Error::Domain(format!("partition function needs finite xi, got ({xi1}, {xi3})")));
    }
    let n = n_atoms;
    let nf = n as f64;
    if xi3 == 0.0 {
        // Σ_m Σ_{k≤m} q^k
        if xi1 == 0.0 {
            return Ok(((n + 1) * (n + 2)) as f64 / 2.0);
        }
        let q = (-xi1).exp();
        let inner = q * f_xi(xi1, n);
        return Ok(((nf + 1.0) - inner) / -(-xi1).exp_m1());
    }
    let bracket = f_xi(xi1 - xi3, n) - (xi3 * (1.0 + nf)).exp() * f_xi(xi1, n);
    Ok((-xi3 * nf).exp() / -xi3.exp_m1() * bracket)
}

/// `η2^N Z` in terms of `η1 = e^{-ξ1}`, `η2 = e^{ξ3}`:
/// `[F(η1 η2) - η2^{N+1} F(η1)] / (1 - η2)` with `F(q) = Σ_{k=0}^{N} q^k`.
fn reduced_partition(eta1: f64, eta2: f64, n: usize) -> f64 {
    (geometric(eta1 * eta2, n) - eta2.powi(n as i32 + 1) * geometric(eta1, n)) / (1.0 - eta2)
}

fn check_margin(what: &str, value: f64) -> Result<()> {
    if (1.0 - value).abs() <= CLOSED_FORM_MARGIN {
        Err(Error::ClosedFormUnavailable(format!(
            "{what} = {value} too close to 1 for the closed form"
        )))
    } else {
        Ok(())
    }
}

/// Single-atom populations in terms of the mean occupations.
pub fn populations_single_atom(nbar1: f64, nbar2: f64) -> Populations {
    let denom = (1.0 + 2.0 * nbar1) * (1.0 + 2.0 * nbar2) - nbar1 * (1.0 + nbar2);
    Populations {
        s11: nbar1 * nbar2 / denom,
        s22: nbar2 * (1.0 + nbar1) / denom,
        s33: (1.0 + nbar1) * (1.0 + nbar2) / denom,
    }
}

/// Ground-state population of a two-level `|2⟩ ↔ |3⟩` ensemble (`η1 = 0`).
pub fn s33_two_level(eta2: f64, n_atoms: usize) -> f64 {
    let n = n_atoms as f64;
    let tail = eta2.powi(n_atoms as i32 + 1);
    (n - (n + 1.0) * eta2 + tail) / ((1.0 - eta2) * (1.0 - tail))
}

/// Level populations for any N.
///
/// Inside the domain this is the general two-parameter expression; the
/// boundary cases `η2 = 0`, `η1 = 0` and `η1 = η2 = 1` use the limits.
pub fn populations(eta1: PumpParameter, eta2: PumpParameter, n_atoms: usize) -> Result<Populations> {
    let nf = n_atoms as f64;
    match (eta1, eta2) {
        (PumpParameter::Saturated, PumpParameter::Saturated) => {
            return Ok(Populations {
                s11: nf / 3.0,
                s22: nf / 3.0,
                s33: nf / 3.0,
            })
        }
        (_, PumpParameter::Finite(e2)) if e2 == 0.0 => {
            return Ok(Populations {
                s11: 0.0,
                s22: 0.0,
                s33: nf,
            })
        }
        (PumpParameter::Finite(e1), PumpParameter::Finite(e2)) if e1 == 0.0 => {
            let s33 = s33_two_level(e2, n_atoms);
            return Ok(Populations {
                s11: 0.0,
                s22: nf - s33,
                s33,
            });
        }
        _ => {}
    }
    let (e1, e2) = (eta1.eta(), eta2.eta());
    check_margin("eta1", e1)?;
    check_margin("eta2", e2)?;
    check_margin("eta1 * eta2", e1 * e2)?;

    let n = n_atoms as i32;
    let p = e1 * e2;
    let z = reduced_partition(e1, e2, n_atoms);
    let s11 = 1.0 / (z * (e2 - 1.0))
        * (((nf + 1.0) * p.powi(n + 1) - nf * p.powi(n + 2) - p) / (1.0 - p).powi(2)
            - e2.powi(n + 1) * ((nf + 1.0) * e1.powi(n + 1) - nf * e1.powi(n + 2) - e1)
                / (1.0 - e1).powi(2));
    let s33 = 1.0 / (z * (e2 - 1.0).powi(2))
        * ((nf + p.powi(n + 1) - e2 * p.powi(n + 2) - p * (1.0 - (nf + 2.0) * e2 + nf) - (nf + 1.0) * e2)
            / (1.0 - p).powi(2)
            + e2.powi(n + 1) * (1.0 - e1.powi(n + 1)) / (1.0 - e1));
    Ok(Populations {
        s11,
        s22: nf - s11 - s33,
        s33,
    })
}

/// Weak-bath, large-sample populations (valid when `η^N` is negligible).
pub fn populations_weak_large(eta1: f64, eta2: f64, n_atoms: usize) -> Populations {
    let s11 = eta1 * eta2 / (1.0 - eta1 * eta2);
    let s22 = eta2 / (1.0 - eta2);
    Populations {
        s11,
        s22,
        s33: n_atoms as f64 - s22 - s11,
    }
}

/// `⟨S_z⟩` for a single pump parameter.
pub fn sz(eta: PumpParameter, n_atoms: usize) -> Result<f64> {
    let e = match eta {
        PumpParameter::Saturated => return Ok(0.0),
        PumpParameter::Finite(e) if e == 0.0 => return Ok(-(n_atoms as f64)),
        PumpParameter::Finite(e) => e,
    };
    check_margin("eta", e)?;
    let n = n_atoms as i32;
    let nf = n_atoms as f64;
    Ok(
        -(nf + e.powi(n + 1) + 2.0 * e.powi(n + 2) - (3.0 + nf) * e.powi(3 + 2 * n))
            / ((1.0 - e.powi(n + 1)) * (1.0 - e.powi(n + 2)))
            + e * (1.0 + 3.0 * e) / (1.0 - e * e),
    )
}

/// Large-sample `⟨S_z⟩ = -N + η(1 + 3η)/(1 - η²)`.
pub fn sz_large_n(eta: f64, n_atoms: usize) -> f64 {
    -(n_atoms as f64) + eta * (1.0 + 3.0 * eta) / (1.0 - eta * eta)
}

/// Polynomials `a(η, N)`, `b(η)`, `c(η, N)` of the second inversion moment.
pub fn sz2_polynomials(eta: f64, n_atoms: usize) -> (f64, f64, f64) {
    let n = n_atoms as f64;
    let e = eta;
    let a = (3.0 + n).powi(2) - (2.0 + n) * (4.0 + n) * e + n * (6.0 + n) * e.powi(3)
        - (1.0 + n) * (5.0 + n) * e * e;
    let b = 1.0 + 4.0 * e - 8.0 * e.powi(3) - 5.0 * e.powi(4);
    let c = n * n - (n * n - 1.0) * e - (n * n - 4.0) * e * e + (n * n - 9.0) * e.powi(3);
    (a, b, c)
}

/// `⟨S_z²⟩` for a single pump parameter. Not available at saturation.
pub fn sz2(eta: PumpParameter, n_atoms: usize) -> Result<f64> {
    let e = match eta {
        PumpParameter::Saturated => {
            return Err(Error::ClosedFormUnavailable(
                "no printed strong-bath limit for <S_z^2>".into(),
            ))
        }
        PumpParameter::Finite(e) if e == 0.0 => return Ok((n_atoms * n_atoms) as f64),
        PumpParameter::Finite(e) => e,
    };
    check_margin("eta", e)?;
    let n = n_atoms as i32;
    let (a, b, c) = sz2_polynomials(e, n_atoms);
    let denom = (1.0 - e) * (1.0 - e * e) * (1.0 - e.powi(n + 1)) * (1.0 - e.powi(n + 2));
    Ok((a * e.powi(3 + 2 * n) - b * e.powi(n + 1) + c) / denom
        + 2.0 * e * (1.0 + 3.0 * e) / (1.0 - e * e) * sz(eta, n_atoms)?)
}

/// `(⟨S_z⟩, ⟨S_z²⟩)` from numerical ξ-derivatives of `ln Z(ξ)`, where
/// `ξ1 = -ξ3 = ξ` and `⟨S_z^k⟩ = (-1)^k Z^{-1} ∂^k Z / ∂ξ^k`.
///
/// `ln Z = ξ N + ln Ž(e^{-ξ})` with the reduced partition function `Ž`;
/// the linear part is differentiated exactly, the rest with five-point
/// stencils.
pub fn sz_moments_from_partition(eta: f64, n_atoms: usize) -> Result<(f64, f64)> {
    if !(eta > 0.0) {
        return Err(Error::Domain("numerical differentiation needs eta > 0".into()));
    }
    check_margin("eta", eta)?;
    let xi = -eta.ln();
    let h = (2e-3f64).min(xi / 4.0);
    check_margin("eta at stencil edge", (-(xi - 2.0 * h)).exp())?;
    let g = |x: f64| {
        let e = (-x).exp();
        reduced_partition(e, e, n_atoms).ln()
    };
    let (gm2, gm1, g0, gp1, gp2) = (g(xi - 2.0 * h), g(xi - h), g(xi), g(xi + h), g(xi + 2.0 * h));
    let d1 = (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * h);
    let d2 = (-gp2 + 16.0 * gp1 - 30.0 * g0 + 16.0 * gm1 - gm2) / (12.0 * h * h);
    let mean = -(n_atoms as f64 + d1);
    Ok((mean, d2 + mean * mean))
}

/// Scale factor `η / (1 - η) = n̄` of the intensity relations.
fn occupation(eta: f64) -> f64 {
    eta / (1.0 - eta)
}

/// Distinguishable intensities
/// `G1_1 = n̄1 [N - ⟨S33⟩ - 2⟨S11⟩]`, `G1_2 = n̄2 [⟨S11⟩ + 2⟨S33⟩ - N]`.
pub fn intensities(eta1: PumpParameter, eta2: PumpParameter, n_atoms: usize) -> Result<(f64, f64)> {
    if eta1.is_saturated() && eta2.is_saturated() {
        let v = g1_strong_limit(n_atoms);
        return Ok((v, v));
    }
    let pops = populations(eta1, eta2, n_atoms)?;
    let (e1, e2) = (eta1.eta(), eta2.eta());
    check_margin("eta1", e1)?;
    check_margin("eta2", e2)?;
    let n = n_atoms as f64;
    Ok((
        occupation(e1) * (n - pops.s33 - 2.0 * pops.s11),
        occupation(e2) * (pops.s11 + 2.0 * pops.s33 - n),
    ))
}

/// Large-sample distinguishable intensities.
pub fn intensities_large_n(eta1: f64, eta2: f64, n_atoms: usize) -> (f64, f64) {
    let two_level = eta2 / (1.0 - eta2);
    let upper = eta1 * eta2 / (1.0 - eta1 * eta2);
    (
        occupation(eta1) * (two_level - upper),
        occupation(eta2) * (n_atoms as f64 - 2.0 * two_level - upper),
    )
}

/// Strong-field intensity per distinguishable channel, `N(3 + N)/12`.
pub fn g1_strong_limit(n_atoms: usize) -> f64 {
    let n = n_atoms as f64;
    n * (3.0 + n) / 12.0
}

/// Strong-field indistinguishable intensity, `N(3 + N)/6`.
pub fn g1_total_strong_limit(n_atoms: usize) -> f64 {
    let n = n_atoms as f64;
    n * (3.0 + n) / 6.0
}

/// `lim_{η→1} g²_22 = 8(N - 1)(N + 4) / (5N(3 + N))`.
pub fn g2_22_strong_limit(n_atoms: usize) -> f64 {
    let n = n_atoms as f64;
    8.0 * (n - 1.0) * (n + 4.0) / (5.0 * n * (3.0 + n))
}

/// `lim_{η→1} g²(0) = (8N² + 24N - 17) / (5N(3 + N))`.
pub fn g2_total_strong_limit(n_atoms: usize) -> f64 {
    let n = n_atoms as f64;
    (8.0 * n * n + 24.0 * n - 17.0) / (5.0 * n * (3.0 + n))
}

/// `lim_{η→0} g²(0) = 2 - 1/N`.
pub fn g2_total_weak_limit(n_atoms: usize) -> f64 {
    2.0 - 1.0 / n_atoms as f64
}

/// Single-atom indistinguishable `g²(0) = 1 - η/(1 + η)²`.
pub fn g2_single_atom(eta: f64) -> f64 {
    1.0 - eta / (1.0 + eta).powi(2)
}

/// Indistinguishable `g²(0)` from the inversion moments:
/// `([(1 + η)/(1 - η)] ⟨S_z⟩ + 2⟨S_z²⟩) / ⟨S_z⟩²`.
pub fn g2_from_moments(eta: f64, sz: f64, sz2: f64) -> f64 {
    ((1.0 + eta) / (1.0 - eta) * sz + 2.0 * sz2) / (sz * sz)
}

/// Indistinguishable intensity and second-order coherence,
/// `G1 = -n̄ ⟨S_z⟩`, `g² = g2_from_moments(...)`, with the `η → 0` and
/// `η → 1` limits.
pub fn indistinguishable(eta: PumpParameter, n_atoms: usize) -> Result<(f64, f64)> {
    match eta {
        PumpParameter::Saturated => Ok((g1_total_strong_limit(n_atoms), g2_total_strong_limit(n_atoms))),
        PumpParameter::Finite(e) if e == 0.0 => Ok((0.0, g2_total_weak_limit(n_atoms))),
        PumpParameter::Finite(e) => {
            let (m1, m2) = (sz(eta, n_atoms)?, sz2(eta, n_atoms)?);
            Ok((-occupation(e) * m1, g2_from_moments(e, m1, m2)))
        }
    }
}

/// Large-sample indistinguishable intensity
/// `G1 = -n̄ [-N + η(1 + 3η)/(1 - η²)]`.
pub fn g1_total_large_n(eta: f64, n_atoms: usize) -> f64 {
    -occupation(eta) * sz_large_n(eta, n_atoms)
}

/// Large-sample second-order correlator `G2 ≈ 2 (n̄ N)²`.
pub fn g2_correlator_large_n(eta: f64, n_atoms: usize) -> f64 {
    2.0 * (occupation(eta) * n_atoms as f64).powi(2)
}
