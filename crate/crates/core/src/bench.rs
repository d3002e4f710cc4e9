//! Runtime scaling measurements on synthetic fields.

use std::fmt::Write as _;
use std::time::Instant;

use crate::cluster::{cluster, Params};
use crate::error::{Error, Result};
use crate::synth::{generate_field, FieldSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    /// Requested size.
    pub target: usize,
    /// Actual number of points in the generated field.
    pub points: usize,
    pub clusters: usize,
    /// Median wall-clock seconds of `cluster()` over the repeats.
    pub median_secs: f64,
    /// `median_secs` divided by the previous row's.
    pub ratio: Option<f64>,
}

/// Times [`cluster`] on fields scaled from `base` to each of `sizes`
/// (ascending). Field generation is not timed.
pub fn run_bench(base: &FieldSpec, sizes: &[usize], params: &Params, repeats: usize) -> Result<Vec<BenchRow>> {
    if sizes.is_empty() {
        return Err(Error::Parameter("no benchmark sizes given".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("benchmark sizes must be strictly ascending".into()));
    }
    if repeats == 0 {
        return Err(Error::Parameter("repeats must be at least 1".into()));
    }

    let mut rows: Vec<BenchRow> = Vec::with_capacity(sizes.len());
    for &target in sizes {
        let cloud = generate_field(&base.scaled_to(target))?;
        let mut times = Vec::with_capacity(repeats);
        let mut clusters = 0;
        for _ in 0..repeats {
            let start = Instant::now();
            let labels = cluster(&cloud, params)?;
            times.push(start.elapsed().as_secs_f64());
            clusters = labels.num_clusters();
        }
        times.sort_by(f64::total_cmp);
        let median_secs = times[times.len() / 2];
        let ratio = rows.last().map(|prev| median_secs / prev.median_secs);
        rows.push(BenchRow {
            target,
            points: cloud.len(),
            clusters,
            median_secs,
            ratio,
        });
    }
    Ok(rows)
}

/// Plain-text table of bench results.
pub fn format_table(params: &Params, repeats: usize, rows: &[BenchRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {params}: median of {repeats} run(s) per size, I/O excluded");
    let _ = writeln!(
        s,
        "{:>10} {:>10} {:>9} {:>12} {:>8}",
        "points", "clusters", "n ratio", "time [s]", "ratio"
    );
    let mut prev: Option<usize> = None;
    for r in rows {
        let n_ratio = prev.map_or("-".to_string(), |p| format!("{:.2}", r.points as f64 / p as f64));
        let ratio = r.ratio.map_or("-".to_string(), |x| format!("{x:.2}"));
        let _ = writeln!(
            s,
            "{:>10} {:>10} {:>9} {:>12.4} {:>8}",
            r.points, r.clusters, n_ratio, r.median_secs, ratio
        );
        prev = Some(r.points);
    }
    s
}
