use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

use super::density::DensityOperator;
use super::generator::GeneratorMatrix;
use crate::error::{Error, Result};

/// Singular values below this fraction of the largest count towards the
/// null space.
pub const NULLITY_REL_TOL: f64 = 1e-9;
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    NullSpace,
    TimeEvolution,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub method: SolveMethod,
    /// `max |L(ρ)|`.
    pub residual: f64,
    pub steps: usize,
    pub nullity: usize,
}

/// `max_k |L(ρ)_k|`.
pub fn residual(gen: &GeneratorMatrix, rho: &DensityOperator) -> f64 {
    gen.apply(&rho.vectorized())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn nullity_of<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> usize {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s <= NULLITY_REL_TOL * max).count()
}

/// Solves `M x = e_0` with row 0 of `M` replaced by the trace functional.
fn constrained_solve<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, d: usize) -> Option<DVector<T>> {
    let mut a = m.clone();
    a.row_mut(0).fill(T::zero());
    for i in 0..d {
        a[(0, i * d + i)] = T::one();
    }
    let mut rhs = DVector::zeros(d * d);
    rhs[0] = T::one();
    a.lu().solve(&rhs)
}

/// Unique steady state from the null space of the generator.
///
/// Dissipative-only generators are real and are solved in real arithmetic.
pub fn steady_state_null(gen: &GeneratorMatrix) -> Result<(DensityOperator, SolveReport)> {
    let d = gen.basis_len();
    let m = gen.matrix();
    let is_real = m.iter().all(|z| z.im == 0.0);
    let (nullity, solution) = if is_real {
        let re = m.map(|z| z.re);
        let nullity = nullity_of(&re);
        let x = (nullity == 1)
            .then(|| constrained_solve(&re, d))
            .flatten()
            .map(|x| x.map(|v| Complex64::new(v, 0.0)));
        (nullity, x)
    } else {
        let nullity = nullity_of(m);
        (nullity, (nullity == 1).then(|| constrained_solve(m, d)).flatten())
    };
    if nullity != 1 {
        return Err(Error::DegenerateSteadyState { nullity });
    }
    let x = solution.ok_or_else(|| Error::SolverCheck("constrained system is singular".into()))?;
    let rho = DensityOperator::unchecked(gen.basis().clone(), DMatrix::from_row_slice(d, d, x.as_slice()))?;
    rho.check()?;
    let res = residual(gen, &rho);
    if res > RESIDUAL_TOL {
        return Err(Error::SolverCheck(format!("residual {res:e} above {RESIDUAL_TOL:e}")));
    }
    Ok((
        rho,
        SolveReport {
            method: SolveMethod::NullSpace,
            residual: res,
            steps: 1,
            nullity,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::generator::{build_generator, build_generator_with, OracleOptions};
    use crate::reservoir::{EnsembleConfig, PumpParameter as P};

    #[test]
    fn single_atom_one_seventh() {
        let cfg = EnsembleConfig::orthogonal(1, P::from_nbar(1.0).unwrap(), P::from_nbar(1.0).unwrap());
        let (rho, rep) = steady_state_null(&build_generator(&cfg).unwrap()).unwrap();
        assert_eq!(rep.nullity, 1);
        let diag = rho.diagonal();
        for (a, b) in diag.iter().zip([4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]) {
            assert!((a - b).abs() < 1e-12, "{diag:?}");
        }
        assert!(rho.max_off_diagonal() < 1e-12);
    }

    #[test]
    fn vacuum_is_ground_projector() {
        let cfg = EnsembleConfig::orthogonal_eta(3, 0.0).unwrap();
        let (rho, _) = steady_state_null(&build_generator(&cfg).unwrap()).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(rho.diagonal()[1..].iter().all(|p| p.abs() < 1e-12));
    }

    #[test]
    fn complex_path_matches_real_path() {
        // A coherent term commuting with every population leaves the diagonal state fixed.
        let cfg = EnsembleConfig::interfering_eta(2, 0.4, 1.0).unwrap();
        let opts = OracleOptions {
            hamiltonian: Some((0.8, 0.8)),
            ..Default::default()
        };
        let (a, _) = steady_state_null(&build_generator(&cfg).unwrap()).unwrap();
        let (b, _) = steady_state_null(&build_generator_with(&cfg, &opts).unwrap()).unwrap();
        let diff = (a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn parallel_dipoles_are_degenerate() {
        let cfg = EnsembleConfig::interfering_eta(2, 0.5, 0.0).unwrap();
        assert!(matches!(
            steady_state_null(&build_generator(&cfg).unwrap()),
            Err(Error::DegenerateSteadyState { nullity: 2 })
        ));
    }
}
