//! CSV tables for scans and sweeps.
//!
//! Column sets are fixed:
//! - scans: `k,alpha,min_avg_purity,q16,q84`
//! - purity distributions: `k,purity,count`
//! - Gaussian sweeps: `n,nbar,e0,bound,F`

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::gaussian::SweepPoint;
use crate::optimizer::scan::quantile;
use crate::optimizer::{RandomScanPoint, ScanResult};

/// Purities closer than this are reported as one value in [`write_purity_counts`].
pub const DEFAULT_GROUP_TOLERANCE: f64 = 1e-4;

#[derive(Serialize)]
struct ScanRow {
    k: usize,
    alpha: f64,
    min_avg_purity: f64,
    q16: f64,
    q84: f64,
}

#[derive(Serialize)]
struct CountRow {
    k: usize,
    purity: f64,
    count: usize,
}

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    nbar: f64,
    e0: f64,
    bound: f64,
    #[serde(rename = "F")]
    f: f64,
}

fn write_rows<W: Write, R: Serialize>(out: W, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Greedy scan rows. The quantile columns describe the purity multiset of the
/// chosen bipartitions at each k.
pub fn write_greedy_scan<W: Write>(out: W, steps: &[ScanResult]) -> Result<()> {
    write_rows(
        out,
        steps.iter().map(|s| ScanRow {
            k: s.k,
            alpha: s.alpha,
            min_avg_purity: s.min_avg_purity,
            q16: quantile(&s.purity_multiset, 0.16),
            q84: quantile(&s.purity_multiset, 0.84),
        }),
    )
}

/// Random scan rows: mean restricted minimum and the central 68% of samples.
pub fn write_random_scan<W: Write>(out: W, points: &[RandomScanPoint]) -> Result<()> {
    write_rows(
        out,
        points.iter().map(|p| ScanRow {
            k: p.k,
            alpha: p.alpha,
            min_avg_purity: p.mean,
            q16: p.q16,
            q84: p.q84,
        }),
    )
}

/// Groups sorted values into runs whose spread stays within `tolerance`;
/// each run is reported by its mean.
pub fn group_values(sorted: &[f64], tolerance: f64) -> Vec<(f64, usize)> {
    let mut groups: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[start] > tolerance {
            let run = &sorted[start..i];
            groups.push((run.iter().sum::<f64>() / run.len() as f64, run.len()));
            start = i;
        }
    }
    groups
}

/// Distinct purities and their multiplicities at each greedy step.
pub fn write_purity_counts<W: Write>(out: W, steps: &[ScanResult], tolerance: f64) -> Result<()> {
    write_rows(
        out,
        steps.iter().flat_map(|s| {
            group_values(&s.purity_multiset, tolerance)
                .into_iter()
                .map(move |(purity, count)| CountRow {
                    k: s.k,
                    purity,
                    count,
                })
        }),
    )
}

pub fn write_sweep<W: Write>(out: W, points: &[SweepPoint]) -> Result<()> {
    write_rows(
        out,
        points.iter().map(|p| SweepRow {
            n: p.n,
            nbar: p.nbar,
            e0: p.e0,
            bound: p.bound,
            f: p.frustration,
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> String {
        let mut buf = Vec::new();
        f(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn grouping() {
        let v = [0.125, 0.125 + 1e-7, 0.125 + 2e-7, 0.25];
        let g = group_values(&v, 1e-4);
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].1, 3);
        assert!((g[0].0 - 0.1250001).abs() < 1e-12);
        assert_eq!(g[1], (0.25, 1));
        assert!(group_values(&[], 1e-4).is_empty());
    }

    #[test]
    fn random_scan_header_and_rows() {
        let p = RandomScanPoint {
            k: 5,
            alpha: 5.0 / 35.0,
            mean: 0.125,
            q16: 0.125,
            q84: 0.126,
            samples: vec![0.125, 0.126],
        };
        let s = text(|b| write_random_scan(b, &[p]));
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("k,alpha,min_avg_purity,q16,q84"));
        assert!(lines.next().unwrap().starts_with("5,0.14285714285714285,0.125,0.125,0.126"));
    }

    #[test]
    fn sweep_header() {
        let p = SweepPoint {
            n: 4,
            nbar: 0.5,
            e0: 0.35,
            bound: 0.25,
            frustration: 0.2857142857142857,
            stdev: 0.07,
        };
        let s = text(|b| write_sweep(b, &[p]));
        assert_eq!(s, "n,nbar,e0,bound,F\n4,0.5,0.35,0.25,0.2857142857142857\n");
    }
}
