use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{enumerate_basis, BasisMap, TransitionLabel as T};
use crate::error::{Error, Result};
use crate::reservoir::EnsembleConfig;

/// Largest ensemble the oracle builds by default (`d = 45`, `d² = 2025`).
pub const DEFAULT_MAX_ATOMS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    DissipativeOnly,
    WithHamiltonian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub max_atoms: usize,
    /// `(ω12, ω23)` of the coherent term `ω12 S11 - ω23 S33`, if included.
    pub hamiltonian: Option<(f64, f64)>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            max_atoms: DEFAULT_MAX_ATOMS,
            hamiltonian: None,
        }
    }
}

/// The vectorized master-equation generator.
///
/// Density operators are stacked row-major, `vec(ρ)[i d + j] = ρ_ij`, so that
/// `vec(A ρ B) = (A ⊗ Bᵀ) vec(ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    basis: BasisMap,
    matrix: DMatrix<Complex64>,
    structure: Structure,
}

impl GeneratorMatrix {
    pub fn basis(&self) -> &BasisMap {
        &self.basis
    }

    /// Basis size `d`; the matrix is `d² × d²`.
    pub fn basis_len(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    /// `L(ρ)` for a vectorized density operator.
    pub fn apply(&self, rho: &[Complex64]) -> Vec<Complex64> {
        let v = nalgebra::DVector::from_column_slice(rho);
        (&self.matrix * v).as_slice().to_vec()
    }

    /// `max_k |Σ_i L_{ii,k}|`: how far `tr L(ρ)` is from vanishing for
    /// arbitrary `ρ`.
    pub fn trace_defect(&self) -> f64 {
        let d = self.basis_len();
        (0..d * d)
            .map(|k| (0..d).map(|i| self.matrix[(i * d + i, k)]).sum::<Complex64>().norm())
            .fold(0.0, f64::max)
    }
}

/// Adds `k (-A†B ρ + B ρ A† - ρ B†A + A ρ B†)` to the vectorized generator.
fn add_channel(l: &mut DMatrix<f64>, k: f64, a: &DMatrix<f64>, b: &DMatrix<f64>) {
    if k == 0.0 {
        return;
    }
    let id = DMatrix::<f64>::identity(a.nrows(), a.ncols());
    let adb = a.transpose() * b;
    let bda = b.transpose() * a;
    // vec(XρY) = (X ⊗ Yᵀ) vec(ρ); all operators here are real.
    let term = -adb.kronecker(&id) + b.kronecker(a) - id.kronecker(&bda.transpose()) + a.kronecker(b);
    *l += term * k;
}

/// Builds the generator with default options (dissipator only, `N ≤ 8`).
pub fn build_generator(config: &EnsembleConfig) -> Result<GeneratorMatrix> {
    build_generator_with(config, &OracleOptions::default())
}

pub fn build_generator_with(config: &EnsembleConfig, options: &OracleOptions) -> Result<GeneratorMatrix> {
    config.validate()?;
    let n = config.n_atoms;
    let dimension = crate::basis::basis_dimension(n).pow(2);
    if n > options.max_atoms {
        return Err(Error::MemoryBudget {
            n_atoms: n,
            dimension,
            max_atoms: options.max_atoms,
        });
    }
    let (nbar1, nbar2) = match (config.bath1.nbar(), config.bath2.nbar()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Domain(
                "a saturated reservoir has no finite master equation".into(),
            ))
        }
    };
    let basis = enumerate_basis(n)?;
    let (g1, g2) = (config.gamma1, config.gamma2);
    let (g12, g21) = config.cross_damping();
    let s21 = basis.operator_matrix(T::S21);
    let s32 = basis.operator_matrix(T::S32);
    let s12 = basis.operator_matrix(T::S12);
    let s23 = basis.operator_matrix(T::S23);

    let d = basis.len();
    let mut l = DMatrix::<f64>::zeros(d * d, d * d);
    add_channel(&mut l, 1.0 + nbar1, &s21, &(&s21 * g1 + &s32 * g21));
    add_channel(&mut l, 1.0 + nbar2, &s32, &(&s32 * g2 + &s21 * g12));
    add_channel(&mut l, nbar1, &s12, &(&s12 * g1 + &s23 * g21));
    add_channel(&mut l, nbar2, &s23, &(&s23 * g2 + &s12 * g12));

    let mut matrix = l.map(|x| Complex64::new(x, 0.0));
    let structure = match options.hamiltonian {
        None => Structure::DissipativeOnly,
        Some((w12, w23)) => {
            // -i [H, ρ] with H = ω12 S11 - ω23 S33 (diagonal)
            let h = basis.operator_matrix(T::S11) * w12 - basis.operator_matrix(T::S33) * w23;
            let id = DMatrix::<f64>::identity(d, d);
            let comm = h.kronecker(&id) - id.kronecker(&h.transpose());
            matrix += comm.map(|x| Complex64::new(0.0, -x));
            Structure::WithHamiltonian
        }
    };
    Ok(GeneratorMatrix {
        basis,
        matrix,
        structure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reservoir::PumpParameter as P;

    #[test]
    fn trace_preserving() {
        for cfg in [
            EnsembleConfig::orthogonal(2, P::Finite(0.3), P::Finite(0.6)),
            EnsembleConfig::interfering_eta(2, 0.4, 0.7).unwrap().with_decay_rates(1.0, 2.5),
        ] {
            assert!(build_generator(&cfg).unwrap().trace_defect() < 1e-12);
        }
        let opts = OracleOptions {
            hamiltonian: Some((1.3, 0.4)),
            ..Default::default()
        };
        let cfg = EnsembleConfig::interfering_eta(2, 0.4, 0.7).unwrap();
        let gen = build_generator_with(&cfg, &opts).unwrap();
        assert_eq!(gen.structure(), Structure::WithHamiltonian);
        assert!(gen.trace_defect() < 1e-12);
    }

    #[test]
    fn budget_and_saturation_rejected() {
        let cfg = EnsembleConfig::orthogonal_eta(9, 0.5).unwrap();
        assert!(matches!(build_generator(&cfg), Err(Error::MemoryBudget { dimension: 3025, .. })));
        let cfg = EnsembleConfig::orthogonal(1, P::Saturated, P::Saturated);
        assert!(build_generator(&cfg).is_err());
    }

    #[test]
    fn orthogonal_splits_into_channels() {
        // At θ = π/2 the generator is the sum of the two single-channel generators.
        let both = EnsembleConfig::orthogonal(2, P::Finite(0.3), P::Finite(0.6));
        let full = build_generator(&both).unwrap();
        let basis = full.basis().clone();
        let d = basis.len();
        let mut upper = DMatrix::<f64>::zeros(d * d, d * d);
        let mut lower = upper.clone();
        let (n1, n2) = (both.bath1.nbar().unwrap(), both.bath2.nbar().unwrap());
        let (s21, s32) = (basis.operator_matrix(T::S21), basis.operator_matrix(T::S32));
        add_channel(&mut upper, 1.0 + n1, &s21, &s21);
        add_channel(&mut upper, n1, &s21.transpose(), &s21.transpose());
        add_channel(&mut lower, 1.0 + n2, &s32, &s32);
        add_channel(&mut lower, n2, &s32.transpose(), &s32.transpose());
        let diff = full.matrix() - (upper + lower).map(|x| Complex64::new(x, 0.0));
        assert!(diff.iter().all(|z| z.norm() < 1e-14));
    }
}
