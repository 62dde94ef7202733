//! Plain-text dumps for inspection outside this crate: one CSV line per
//! matrix row, each entry written as two columns `re,im`.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::density::DensityOperator;
use super::generator::GeneratorMatrix;
use crate::error::Result;

pub fn write_complex_csv<W: Write>(m: &DMatrix<Complex64>, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let mut fields = Vec::with_capacity(2 * m.ncols());
    for i in 0..m.nrows() {
        fields.clear();
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            fields.push(z.re.to_string());
            fields.push(z.im.to_string());
        }
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn dump_generator<W: Write>(gen: &GeneratorMatrix, out: W) -> Result<()> {
    write_complex_csv(gen.matrix(), out)
}

pub fn dump_density<W: Write>(rho: &DensityOperator, out: W) -> Result<()> {
    write_complex_csv(rho.matrix(), out)
}

/// Inverse of [`write_complex_csv`].
pub fn read_complex_csv(text: &str) -> Result<DMatrix<Complex64>> {
    let mut rows = Vec::new();
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    for rec in r.records() {
        let rec = rec?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| crate::Error::Config(format!("bad number {s:?}: {e}"))))
            .collect::<Result<_>>()?;
        rows.push(vals.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect::<Vec<_>>());
    }
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(n, cols, |i, j| rows[i][j]))
}
