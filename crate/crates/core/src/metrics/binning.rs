use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::stats;

/// One logarithmic popularity bin `[bin_lo, bin_hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinRow {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Base-2 logarithmic bins over `popularity >= 1`; non-finite values and
/// popularity below 1 are skipped. Empty bins are omitted.
pub fn binned_curve(points: &[(f64, f64)]) -> Vec<BinRow> {
    let mut bins: std::collections::BTreeMap<i32, Vec<f64>> = Default::default();
    for &(pop, value) in points {
        if pop >= 1.0 && pop.is_finite() && value.is_finite() {
            bins.entry(pop.log2().floor() as i32).or_default().push(value);
        }
    }
    bins.into_iter()
        .map(|(k, values)| BinRow {
            bin_lo: 2f64.powi(k),
            bin_hi: 2f64.powi(k + 1),
            mean: stats::mean(&values).unwrap_or(f64::NAN),
            stderr: stats::std_err(&values),
            n: values.len(),
        })
        .collect()
}

pub fn write_binned_csv<W: Write>(rows: &[BinRow], mut out: W) -> Result<()> {
    writeln!(out, "bin_lo,bin_hi,mean,stderr,n")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.bin_lo, r.bin_hi, r.mean, r.stderr, r.n)?;
    }
    Ok(())
}
