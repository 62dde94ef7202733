//! Data behind the four published steady-state plots.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::observables::{basis_sum_report, ObservableReport};
use crate::reservoir::EnsembleConfig;
use crate::sweep::with_workers;

pub const FIGURE_POINTS: usize = 200;
pub const FIGURE_ETA_MIN: f64 = 0.001;
pub const FIGURE_ETA_MAX: f64 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    /// `None` where the observable is undefined.
    pub y: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureDataset {
    pub figure_id: u8,
    pub series: Vec<Series>,
}

/// 200 points on `[0.001, 0.999]` followed by the limit `η = 1`.
pub fn figure_grid() -> Vec<f64> {
    let step = (FIGURE_ETA_MAX - FIGURE_ETA_MIN) / (FIGURE_POINTS - 1) as f64;
    let mut g: Vec<f64> = (0..FIGURE_POINTS)
        .map(|i| if i == FIGURE_POINTS - 1 { FIGURE_ETA_MAX } else { FIGURE_ETA_MIN + step * i as f64 })
        .collect();
    g.push(1.0);
    g
}

type Extract = fn(&ObservableReport) -> Option<f64>;

struct SeriesDef {
    label: String,
    n_atoms: usize,
    interfering: bool,
    extract: Extract,
}

fn defs(figure_id: u8) -> Result<Vec<SeriesDef>> {
    let ortho = |label: &str, n: usize, extract: Extract| SeriesDef {
        label: label.to_string(),
        n_atoms: n,
        interfering: false,
        extract,
    };
    Ok(match figure_id {
        1 => vec![
            ortho("s11/N", 20, |r| Some(r.s11 / r.n_atoms as f64)),
            ortho("s22/N", 20, |r| Some(r.s22 / r.n_atoms as f64)),
            ortho("s33/N", 20, |r| Some(r.s33 / r.n_atoms as f64)),
        ],
        2 => vec![
            ortho("g1_1/N^2", 20, |r| r.g1_1.map(|g| g / (r.n_atoms * r.n_atoms) as f64)),
            ortho("g1_2/N^2", 20, |r| r.g1_2.map(|g| g / (r.n_atoms * r.n_atoms) as f64)),
        ],
        3 => [2, 20, 200]
            .into_iter()
            .map(|n| ortho(&format!("g2_22 N={n}"), n, |r| r.g2_22))
            .collect(),
        4 => [1, 2, 200]
            .into_iter()
            .map(|n| SeriesDef {
                label: format!("g2_total N={n}"),
                n_atoms: n,
                interfering: true,
                extract: |r| r.g2_total,
            })
            .collect(),
        other => return Err(Error::Domain(format!("figure id {other} is not 1, 2, 3 or 4"))),
    })
}

fn config(def: &SeriesDef, eta: f64) -> Result<EnsembleConfig> {
    if def.interfering {
        EnsembleConfig::interfering_eta(def.n_atoms, eta, 0.0)
    } else {
        EnsembleConfig::orthogonal_eta(def.n_atoms, eta)
    }
}

/// Evaluates every series of a figure on [`figure_grid`] by basis sums.
pub fn emit_figure(figure_id: u8, workers: Option<usize>) -> Result<FigureDataset> {
    let grid = figure_grid();
    let defs = defs(figure_id)?;
    let series = with_workers(workers, || {
        defs.par_iter()
            .map(|def| {
                let y = grid
                    .par_iter()
                    .map(|&eta| Ok((def.extract)(&basis_sum_report(&config(def, eta)?)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Series {
                    label: def.label.clone(),
                    x: grid.clone(),
                    y,
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(FigureDataset { figure_id, series })
}

impl FigureDataset {
    pub fn series(&self, label: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.label == label)
    }

    /// Long format `series,eta,value`; undefined values are empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["series", "eta", "value"])?;
        for s in &self.series {
            for (x, y) in s.x.iter().zip(&s.y) {
                let y = y.map(|v| v.to_string()).unwrap_or_default();
                w.write_record([s.label.as_str(), &x.to_string(), &y])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        let value = serde_json::json!({
            "figure_id": self.figure_id,
            "series": self.series.iter().map(|s| serde_json::json!({
                "label": s.label, "eta": s.x, "value": s.y,
            })).collect::<Vec<_>>(),
        });
        serde_json::to_writer_pretty(&mut out, &value)?;
        writeln!(out)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = figure_grid();
        assert_eq!(g.len(), 201);
        assert_eq!((g[0], g[199], g[200]), (0.001, 0.999, 1.0));
    }

    #[test]
    fn strong_field_end_points() {
        let f1 = emit_figure(1, None).unwrap();
        assert_eq!(f1.series.len(), 3);
        for s in &f1.series {
            assert!((s.y[200].unwrap() - 1.0 / 3.0).abs() < 1e-12);
        }
        let f2 = emit_figure(2, None).unwrap();
        for s in &f2.series {
            assert!((s.y[200].unwrap() - 23.0 / 240.0).abs() < 1e-12);
        }
        let f4 = emit_figure(4, None).unwrap();
        assert!((f4.series("g2_total N=1").unwrap().y[200].unwrap() - 0.75).abs() < 1e-12);
        assert!(emit_figure(5, None).is_err());
    }

    #[test]
    fn csv_long_format() {
        let f = emit_figure(2, Some(2)).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("series,eta,value"));
        assert_eq!(text.lines().count(), 1 + 2 * 201);
    }
}
