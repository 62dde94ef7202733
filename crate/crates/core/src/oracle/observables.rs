use nalgebra::DMatrix;

use super::density::DensityOperator;
use crate::basis::TransitionLabel as T;
use crate::error::{Error, Result};
use crate::observables::{ObservableReport, Source};
use crate::reservoir::{DipoleMode, EnsembleConfig};

/// Intensities below this are treated as zero when normalizing `g²`.
const DARK_INTENSITY: f64 = 1e-12;

/// Operator matrices used by the trace evaluations.
struct Ops {
    s11: DMatrix<f64>,
    s22: DMatrix<f64>,
    s33: DMatrix<f64>,
    j1: DMatrix<f64>,
    j2: DMatrix<f64>,
}

fn re(rho: &DensityOperator, op: &DMatrix<f64>) -> f64 {
    rho.expect(op).re
}

fn normalized(num: f64, a: f64, b: f64) -> Option<f64> {
    (a > DARK_INTENSITY && b > DARK_INTENSITY).then(|| num / (a * b))
}

/// `(tr ρ J⁺J, tr ρ J⁺²J²)` for `J = J1 + J2`.
pub fn total_field_traces(rho: &DensityOperator) -> (f64, f64) {
    let b = rho.basis();
    let j = b.operator_matrix(T::S21) + b.operator_matrix(T::S32);
    let jd = j.transpose();
    (re(rho, &(&jd * &j)), re(rho, &(&jd * &jd * &j * &j)))
}

/// All observables as traces `tr(ρ O)`; `ρ` need not be diagonal.
///
/// `config` supplies the parameter columns and selects which photon
/// statistics are meaningful.
pub fn oracle_observables(rho: &DensityOperator, config: &EnsembleConfig) -> Result<ObservableReport> {
    let b = rho.basis();
    if b.n_atoms() != config.n_atoms {
        return Err(Error::DimensionMismatch {
            expected: config.n_atoms,
            found: b.n_atoms(),
        });
    }
    let ops = Ops {
        s11: b.operator_matrix(T::S11),
        s22: b.operator_matrix(T::S22),
        s33: b.operator_matrix(T::S33),
        j1: b.operator_matrix(T::S21),
        j2: b.operator_matrix(T::S32),
    };
    let mut r = ObservableReport::skeleton(config, Source::Oracle);
    r.s11 = re(rho, &ops.s11);
    r.s22 = re(rho, &ops.s22);
    r.s33 = re(rho, &ops.s33);
    let sz = &ops.s11 - &ops.s33;
    r.sz = re(rho, &sz);
    r.sz2 = Some(re(rho, &(&sz * &sz)));
    match config.mode {
        DipoleMode::Orthogonal => {
            let (j1d, j2d) = (ops.j1.transpose(), ops.j2.transpose());
            let i1 = re(rho, &(&j1d * &ops.j1));
            let i2 = re(rho, &(&j2d * &ops.j2));
            r.g1_1 = Some(i1);
            r.g1_2 = Some(i2);
            r.g2_11 = normalized(re(rho, &(&j1d * &j1d * &ops.j1 * &ops.j1)), i1, i1);
            r.g2_22 = normalized(re(rho, &(&j2d * &j2d * &ops.j2 * &ops.j2)), i2, i2);
            r.g2_12 = normalized(re(rho, &(&j1d * &j2d * &ops.j2 * &ops.j1)), i1, i2);
            r.g2_21 = normalized(re(rho, &(&j2d * &j1d * &ops.j1 * &ops.j2)), i2, i1);
        }
        DipoleMode::Interfering => {
            let (g1, g2) = total_field_traces(rho);
            r.g1_total = Some(g1);
            r.g2_total = normalized(g2, g1, g1);
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::enumerate_basis;
    use crate::reservoir::PumpParameter as P;

    #[test]
    fn ground_state_is_dark() {
        let cfg = EnsembleConfig::orthogonal_eta(4, 0.0).unwrap();
        let rho = DensityOperator::ground_state(enumerate_basis(4).unwrap()).unwrap();
        let r = oracle_observables(&rho, &cfg).unwrap();
        assert_eq!((r.s33, r.g1_1, r.g1_2), (4.0, Some(0.0), Some(0.0)));
        assert_eq!(r.g2_22, None);
    }

    #[test]
    fn shape_mismatch() {
        let cfg = EnsembleConfig::orthogonal_eta(3, 0.0).unwrap();
        let rho = DensityOperator::ground_state(enumerate_basis(4).unwrap()).unwrap();
        assert!(oracle_observables(&rho, &cfg).is_err());
    }

    #[test]
    fn coherences_enter_the_traces() {
        // (|g⟩ + |e⟩)/√2 for one atom, g = |3⟩, e = |2⟩: ⟨S11 - S33⟩ stays -1/2.
        let b = enumerate_basis(1).unwrap();
        let mut m = DMatrix::from_element(3, 3, num_complex::Complex64::new(0.0, 0.0));
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            m[(i, j)] = num_complex::Complex64::new(0.5, 0.0);
        }
        let rho = DensityOperator::new(b, m).unwrap();
        let cfg = EnsembleConfig::interfering(1, P::Finite(0.2), 0.3);
        let r = oracle_observables(&rho, &cfg).unwrap();
        assert!((r.sz + 0.5).abs() < 1e-15);
        assert!((r.g1_total.unwrap() - 0.5).abs() < 1e-15);
    }
}
