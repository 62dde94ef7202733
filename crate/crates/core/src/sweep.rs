//! One-parameter sweeps evaluated in parallel, emitted in grid order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{basis_sum_report, closed_form_report, ObservableReport, Source};
use crate::oracle::oracle_report;
use crate::report::{FailedPoint, Row};
use crate::reservoir::{EnsembleConfig, PumpParameter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Common `η` of both reservoirs.
    Eta,
    Eta1,
    Eta2,
    /// Dipole angle in degrees.
    Theta,
    NAtoms,
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta" => Ok(Self::Eta),
            "eta1" => Ok(Self::Eta1),
            "eta2" => Ok(Self::Eta2),
            "theta" | "theta_deg" | "theta-deg" => Ok(Self::Theta),
            "n_atoms" | "n-atoms" | "n" => Ok(Self::NAtoms),
            other => Err(Error::Domain(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Grid {
    /// `count` equally spaced points including both endpoints.
    Linear { start: f64, stop: f64, count: usize },
    /// Explicit points, in order.
    Values(Vec<f64>),
}

impl Grid {
    pub fn linear(start: f64, stop: f64, count: usize) -> Result<Self> {
        let g = Grid::Linear { start, stop, count };
        g.points()?;
        Ok(g)
    }

    /// Parses `START:STOP:COUNT`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let bad = || Error::Domain(format!("grid {spec:?} is not START:STOP:COUNT"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start = parts[0].trim().parse().map_err(|_| bad())?;
        let stop = parts[1].trim().parse().map_err(|_| bad())?;
        let count = parts[2].trim().parse().map_err(|_| bad())?;
        Self::linear(start, stop, count)
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        match *self {
            Grid::Linear { start, stop, count } => {
                if count < 2 {
                    return Err(Error::Domain(format!("grid needs at least 2 points, got {count}")));
                }
                if !(start.is_finite() && stop.is_finite() && start < stop) {
                    return Err(Error::Domain(format!("grid needs start < stop, got {start}..{stop}")));
                }
                let step = (stop - start) / (count - 1) as f64;
                Ok((0..count)
                    .map(|i| if i == count - 1 { stop } else { start + step * i as f64 })
                    .collect())
            }
            Grid::Values(ref v) => {
                if v.is_empty() {
                    return Err(Error::Domain("empty value list".into()));
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub grid: Grid,
    /// Values of everything not swept.
    pub base: EnsembleConfig,
    pub source: Source,
}

fn set_parameter(base: &EnsembleConfig, p: SweepParameter, x: f64) -> Result<EnsembleConfig> {
    let mut c = *base;
    match p {
        SweepParameter::Eta => {
            let e = PumpParameter::from_eta(x)?;
            c.bath1 = e;
            c.bath2 = e;
        }
        SweepParameter::Eta1 => c.bath1 = PumpParameter::from_eta(x)?,
        SweepParameter::Eta2 => c.bath2 = PumpParameter::from_eta(x)?,
        SweepParameter::Theta => c.theta = x.to_radians(),
        SweepParameter::NAtoms => {
            if !(x >= 1.0 && x.fract() == 0.0 && x <= 1e9) {
                return Err(Error::Domain(format!("n_atoms = {x} is not a positive integer")));
            }
            c.n_atoms = x as usize;
        }
    }
    c.validate()?;
    Ok(c)
}

/// The parameter columns of a point whose configuration itself is invalid.
fn invalid_point(base: &EnsembleConfig, p: SweepParameter, x: f64, err: &Error) -> FailedPoint {
    let mut f = FailedPoint::new(base, err);
    match p {
        SweepParameter::Eta => (f.eta1, f.eta2) = (x, x),
        SweepParameter::Eta1 => f.eta1 = x,
        SweepParameter::Eta2 => f.eta2 = x,
        SweepParameter::Theta => f.theta_deg = x,
        SweepParameter::NAtoms => f.n_atoms = x.max(0.0) as usize,
    }
    f
}

pub fn evaluate(config: &EnsembleConfig, source: Source) -> Result<ObservableReport> {
    match source {
        Source::BasisSum => basis_sum_report(config),
        Source::ClosedForm => closed_form_report(config),
        Source::Oracle => oracle_report(config),
    }
}

fn evaluate_point(spec: &SweepSpec, x: f64) -> Row {
    match set_parameter(&spec.base, spec.parameter, x) {
        Ok(cfg) => Row::from_result(&cfg, evaluate(&cfg, spec.source)),
        Err(e) => Row::Failed(invalid_point(&spec.base, spec.parameter, x, &e)),
    }
}

/// Runs `f` on a pool of `workers` threads (`None`: available parallelism).
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == Some(0) {
        return Err(Error::Domain("worker count must be positive".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(f))
}

/// One row per grid point, in grid order. Points that cannot be evaluated
/// become error rows.
pub fn run_sweep(spec: &SweepSpec, workers: Option<usize>) -> Result<Vec<Row>> {
    let points = spec.grid.points()?;
    with_workers(workers, || points.par_iter().map(|&x| evaluate_point(spec, x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reservoir::DipoleMode;

    fn eta_sweep(n: usize, grid: Grid) -> SweepSpec {
        SweepSpec {
            parameter: SweepParameter::Eta,
            grid,
            base: EnsembleConfig::orthogonal_eta(n, 0.0).unwrap(),
            source: Source::BasisSum,
        }
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::linear(0.0, 1.0, 1).is_err());
        assert!(Grid::linear(1.0, 0.0, 5).is_err());
        assert!(Grid::parse("0:1").is_err());
        let p = Grid::parse("0:0.99:4").unwrap().points().unwrap();
        assert_eq!((p[0], p[3], p.len()), (0.0, 0.99, 4));
    }

    #[test]
    fn ground_level_drains_monotonically() {
        let rows = run_sweep(&eta_sweep(20, Grid::linear(0.0, 0.99, 34).unwrap()), Some(3)).unwrap();
        let s33: Vec<f64> = rows.iter().map(|r| r.report().unwrap().s33 / 20.0).collect();
        assert!(s33.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert!(s33.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn single_point_and_errors() {
        let rows = run_sweep(&eta_sweep(4, Grid::Values(vec![0.0, 1.5])), None).unwrap();
        assert_eq!(rows[0].report().unwrap().s33, 4.0);
        match &rows[1] {
            Row::Failed(f) => assert_eq!(f.eta1, 1.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weak_field_n_sweep() {
        let spec = SweepSpec {
            parameter: SweepParameter::NAtoms,
            grid: Grid::Values(vec![1.0, 2.0, 200.0]),
            base: EnsembleConfig::interfering_eta(1, 0.0, 0.0).unwrap(),
            source: Source::BasisSum,
        };
        let g: Vec<f64> = run_sweep(&spec, None)
            .unwrap()
            .iter()
            .map(|r| r.report().unwrap().g2_total.unwrap())
            .collect();
        assert_eq!(g, vec![1.0, 1.5, 1.995]);
    }

    #[test]
    fn order_independent_of_workers() {
        let mut spec = eta_sweep(5, Grid::linear(0.0, 1.0, 17).unwrap());
        spec.base.mode = DipoleMode::Orthogonal;
        let a = run_sweep(&spec, Some(1)).unwrap();
        let b = run_sweep(&spec, Some(4)).unwrap();
        assert_eq!(a, b);
    }
}
