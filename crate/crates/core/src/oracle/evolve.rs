use num_complex::Complex64;

use super::density::{DensityOperator, HERMITICITY_TOL};
use super::generator::GeneratorMatrix;
use super::solve::{SolveMethod, SolveReport};
use crate::error::{Error, Result};

/// Compressed sparse rows of the generator; the dense form is mostly zeros.
struct Csr {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex64>,
}

impl Csr {
    fn from_generator(gen: &GeneratorMatrix) -> Self {
        let m = gen.matrix();
        let mut row_start = vec![0];
        let mut cols = Vec::new();
        let mut values = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != Complex64::new(0.0, 0.0) {
                    cols.push(j);
                    values.push(v);
                }
            }
            row_start.push(cols.len());
        }
        Self { row_start, cols, values }
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let range = self.row_start[i]..self.row_start[i + 1];
            *o = self.cols[range.clone()]
                .iter()
                .zip(&self.values[range])
                .map(|(&j, &v)| v * x[j])
                .sum();
        }
    }
}

/// Step-size control of the embedded Runge–Kutta pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl EvolveOptions {
    /// Local error control tight enough that step-size noise in the stiff
    /// modes stays below a target residual `tol`.
    pub fn for_residual(tol: f64) -> Self {
        let rtol = (tol * 1e-2).min(1e-8);
        Self {
            rtol,
            atol: rtol * 1e-3,
            max_steps: 2_000_000,
        }
    }
}

// Dormand–Prince 5(4) tableau; the generator is time independent, so the
// nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermiticity_error(v: &[Complex64], d: usize) -> f64 {
    let mut max = 0.0f64;
    for i in 0..d {
        for j in i..d {
            max = max.max((v[i * d + j] - v[j * d + i].conj()).norm());
        }
    }
    max
}

fn trace(v: &[Complex64], d: usize) -> Complex64 {
    (0..d).map(|i| v[i * d + i]).sum()
}

/// Integrates `dρ/dt = L(ρ)` until `max |L(ρ)| ≤ tol` or `t = horizon`.
///
/// Every accepted step is checked for Hermiticity and unit trace.
pub fn steady_state_evolve(
    gen: &GeneratorMatrix,
    rho0: &DensityOperator,
    horizon: f64,
    tol: f64,
) -> Result<(DensityOperator, SolveReport)> {
    steady_state_evolve_with(gen, rho0, horizon, tol, &EvolveOptions::for_residual(tol))
}

pub fn steady_state_evolve_with(
    gen: &GeneratorMatrix,
    rho0: &DensityOperator,
    horizon: f64,
    tol: f64,
    options: &EvolveOptions,
) -> Result<(DensityOperator, SolveReport)> {
    if !(horizon > 0.0 && tol > 0.0) {
        return Err(Error::Domain("horizon and tolerance must be positive".into()));
    }
    let d = gen.basis_len();
    if rho0.basis().len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rho0.basis().len(),
        });
    }
    let csr = Csr::from_generator(gen);
    let len = d * d;
    let zero = Complex64::new(0.0, 0.0);
    let mut y = rho0.vectorized();
    let mut k: Vec<Vec<Complex64>> = vec![vec![zero; len]; 7];
    let mut stage = vec![zero; len];
    let mut y_new = vec![zero; len];

    csr.apply(&y, &mut k[0]);
    let mut res = max_norm(&k[0]);
    let mut t = 0.0;
    let mut h = (0.1 / res.max(1e-300)).min(horizon).min(0.1);
    let mut steps = 0;
    let finish = |y: &[Complex64], res: f64, steps: usize| -> Result<(DensityOperator, SolveReport)> {
        let rho = DensityOperator::from_vectorized(gen.basis().clone(), y)?;
        rho.check()?;
        Ok((
            rho,
            SolveReport {
                method: SolveMethod::TimeEvolution,
                residual: res,
                steps,
                nullity: 0,
            },
        ))
    };

    while res > tol {
        if t >= horizon || steps >= options.max_steps {
            return Err(Error::NotConverged {
                residual: res,
                time: t,
                steps,
            });
        }
        h = h.min(horizon - t);
        for s in 1..7 {
            for (idx, st) in stage.iter_mut().enumerate() {
                let mut acc = y[idx];
                for (a, kk) in A[s][..s].iter().zip(&k) {
                    if *a != 0.0 {
                        acc += kk[idx] * (h * a);
                    }
                }
                *st = acc;
            }
            csr.apply(&stage, &mut k[s]);
        }
        // 5th-order solution equals the last stage (FSAL).
        y_new.copy_from_slice(&stage);
        let mut err = 0.0f64;
        for idx in 0..len {
            let mut e = zero;
            for s in 0..7 {
                let w = B5[s] - B4[s];
                if w != 0.0 {
                    e += k[s][idx] * w;
                }
            }
            let scale = options.atol + options.rtol * y[idx].norm().max(y_new[idx].norm());
            err = err.max((e * h).norm() / scale);
        }
        if err <= 1.0 {
            t += h;
            steps += 1;
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            let herm = hermiticity_error(&y, d);
            let tr = trace(&y, d);
            if herm > HERMITICITY_TOL || (tr - 1.0).norm() > 1e-9 {
                return Err(Error::SolverCheck(format!(
                    "evolution lost Hermiticity ({herm:e}) or trace ({tr}) at t = {t}"
                )));
            }
            res = max_norm(&k[0]);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    finish(&y, res, steps)
}
