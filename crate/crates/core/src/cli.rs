//! Command-line front end: `cluster`, `eval`, `synth` and `bench`.
//!
//! Data and reports go to stdout (or files); diagnostics go to stderr. The
//! binary in `src/bin` only parses arguments and calls [`run`].

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::Serialize;

use crate::bench::{format_table, run_bench};
use crate::cluster::{cluster, forest_to_labels, gdqs_parents, knn_density_2d, Algorithm, Params};
use crate::error::{Error, Result};
use crate::eval::{count_report, EvalReport, REPORT_SCHEMA};
use crate::pointcloud::{load_ply, load_ply_with, save_ply, LabelMode, Labeling, PlyFormat, PointCloud};
use crate::synth::{generate_field, plant_count, FieldSpec};

/// Default `k` for the density-based algorithms.
pub const DEFAULT_K: usize = 1200;
/// Default `beta` for GD Quickshift++.
pub const DEFAULT_BETA: f64 = 0.3;
/// A sweep run is eligible when its cluster count is within this fraction of
/// the ground-truth plant count.
pub const SWEEP_COUNT_TOLERANCE: f64 = 0.2;

#[derive(Debug, Parser)]
#[command(name = "cropseg", version, about = "Pre-cluster crop-field point clouds into plants")]
pub struct Cli {
    /// Worker threads (defaults to the number of CPUs). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a point cloud and write a colored PLY.
    Cluster(ClusterArgs),
    /// Compare a predicted labeling against ground truth (JSON report).
    Eval(EvalArgs),
    /// Generate a labeled synthetic field.
    Synth(SynthArgs),
    /// Time clustering on growing synthetic fields.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct AlgoArgs {
    #[arg(long, value_parser = parse_algorithm)]
    pub algo: Algorithm,
    /// Neighborhood distance (rain, zqs, gdqs).
    #[arg(long)]
    pub d: Option<f64>,
    /// Density kernel size (gdqs, gdqspp); defaults to 1200.
    #[arg(long)]
    pub k: Option<usize>,
    /// Core threshold in [0, 1] (gdqspp); defaults to 0.3.
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub algo: AlgoArgs,
    /// Write binary_little_endian instead of ascii.
    #[arg(long)]
    pub binary: bool,
    /// Sweep d over start:stop:step and keep the best run against --truth.
    #[arg(long, value_name = "START:STOP:STEP", requires = "truth")]
    pub sweep_d: Option<SweepRange>,
    /// Labeled ground truth for --sweep-d.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Exclude truth label 0 (ground) from matching.
    #[arg(long, default_value_t = true, action = ArgAction::Set, num_args = 0..=1, default_missing_value = "true")]
    pub ignore_ground: bool,
    /// Read truth labels as one label per distinct color.
    #[arg(long)]
    pub distinct_colors: bool,
    /// Write the sweep report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub predicted: PathBuf,
    pub truth: PathBuf,
    /// Exclude truth label 0 (ground) from matching.
    #[arg(long, default_value_t = true, action = ArgAction::Set, num_args = 0..=1, default_missing_value = "true")]
    pub ignore_ground: bool,
    /// Read truth labels as one label per distinct color.
    #[arg(long)]
    pub distinct_colors: bool,
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Flat key = value file with FieldSpec fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long)]
    pub points_per_plant: Option<usize>,
    #[arg(long)]
    pub double_plant_prob: Option<f64>,
    #[arg(long)]
    pub ground_point_density: Option<f64>,
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub binary: bool,
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub algo: AlgoArgs,
    /// Ascending point counts.
    #[arg(long, value_delimiter = ',', default_value = "50000,100000,200000,400000")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Inclusive `start:stop:step` range of distances.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for SweepRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(format!("expected START:STOP:STEP, got '{s}'"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number '{t}'"));
        let range = Self {
            start: num(start)?,
            stop: num(stop)?,
            step: num(step)?,
        };
        if !(range.start > 0.0 && range.step > 0.0 && range.stop >= range.start && range.stop.is_finite()) {
            return Err(format!("need 0 < START <= STOP and STEP > 0, got '{s}'"));
        }
        Ok(range)
    }
}

impl AlgoArgs {
    /// Applies the `k` / `beta` defaults for algorithms that take them and
    /// validates the parameter set.
    pub fn params(&self) -> Result<Params> {
        let a = self.algo;
        let k = self.k.or(a.takes_k().then_some(DEFAULT_K));
        let beta = self.beta.or(a.takes_beta().then_some(DEFAULT_BETA));
        Params::new(a, self.d, k, beta)
    }
}

/// Runs a parsed command line, writing human/JSON output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| Error::Parameter(format!("cannot build thread pool: {e}")))?;
            // The writer need not be Send, so output is buffered and copied out.
            let mut buf = Vec::new();
            let result = pool.install(|| dispatch(cli.command, &mut buf));
            out.write_all(&buf)?;
            result
        }
        None => dispatch(cli.command, out),
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Cluster(args) => cmd_cluster(&args, out),
        Command::Eval(args) => cmd_eval(&args, out),
        Command::Synth(args) => cmd_synth(&args, out),
        Command::Bench(args) => cmd_bench(&args, out),
    }
}

fn ply_format(binary: bool) -> PlyFormat {
    if binary {
        PlyFormat::BinaryLittleEndian
    } else {
        PlyFormat::Ascii
    }
}

fn load_labeled(path: &Path, distinct_colors: bool) -> Result<(PointCloud, Labeling)> {
    let mode = if distinct_colors {
        LabelMode::DistinctColors
    } else {
        LabelMode::Palette
    };
    let cloud = load_ply_with(path, mode)?;
    let labeling = cloud
        .labeling()
        .ok_or_else(|| Error::Data(format!("{} carries no labels", path.display())))?;
    Ok((cloud, labeling))
}

pub fn cmd_cluster(args: &ClusterArgs, out: &mut dyn Write) -> Result<()> {
    if let Some(range) = &args.sweep_d {
        return cmd_sweep(args, range, out);
    }
    let params = args.algo.params()?;
    let cloud = load_ply(&args.input)?;
    let start = Instant::now();
    let labeling = cluster(&cloud, &params)?;
    let secs = start.elapsed().as_secs_f64();
    save_ply(&cloud, &labeling, &args.output, ply_format(args.binary))?;
    writeln!(out, "algorithm: {params}")?;
    writeln!(out, "points: {}", cloud.len())?;
    writeln!(out, "clusters: {}", labeling.num_clusters())?;
    writeln!(out, "time_s: {secs:.3}")?;
    Ok(())
}

/// One run of a `d` sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRun {
    pub d: f64,
    pub clusters: usize,
    pub plant_clusters: usize,
    pub within_bound: bool,
    pub mean_iou: Option<f64>,
    pub median_iou: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema: u32,
    pub algorithm: String,
    pub truth_plants: usize,
    pub runs: Vec<SweepRun>,
    /// Index into `runs` of the selected run.
    pub best: Option<usize>,
    pub best_report: Option<EvalReport>,
}

/// Runs `base` for every `d` and keeps the run with the highest mean IoU
/// among those whose cluster count (extraneous clusters included) is within
/// 20% of the number of truth plants. Returns the report and the selected labeling.
pub fn sweep_d(
    cloud: &PointCloud,
    truth: &Labeling,
    base: &Params,
    ds: &[f64],
    ignore_ground: bool,
) -> Result<(SweepReport, Option<Labeling>)> {
    if !base.algorithm().takes_d() {
        return Err(Error::Parameter(format!(
            "{} has no d to sweep",
            base.algorithm().name()
        )));
    }
    let mut runs = Vec::with_capacity(ds.len());
    let mut best: Option<(usize, EvalReport, Labeling)> = None;
    let mut truth_plants = 0;
    // GD Quickshift's density does not depend on d.
    let density = match (base.algorithm(), base.k()) {
        (Algorithm::GdQuickshift, Some(k)) if cloud.len() >= 2 => Some(knn_density_2d(cloud, k)?),
        _ => None,
    };
    for &d in ds {
        let params = base.with_d(d)?;
        let labeling = match &density {
            Some(density) => forest_to_labels(&gdqs_parents(cloud, d, density)?)?,
            None => cluster(cloud, &params)?,
        };
        let counts = count_report(&labeling, truth)?;
        truth_plants = counts.total_plants;
        let bound = SWEEP_COUNT_TOLERANCE * counts.total_plants as f64;
        let within = (counts.total_clusters as f64 - counts.total_plants as f64).abs() <= bound;
        let mut run = SweepRun {
            d,
            clusters: counts.total_clusters,
            plant_clusters: counts.plant_clusters,
            within_bound: within,
            mean_iou: None,
            median_iou: None,
        };
        if within {
            let report = EvalReport::new(&labeling, truth, ignore_ground)?;
            run.mean_iou = Some(report.matching.mean_iou);
            run.median_iou = Some(report.matching.median_iou);
            let better = best
                .as_ref()
                .is_none_or(|(_, b, _)| report.matching.mean_iou > b.matching.mean_iou);
            if better {
                best = Some((runs.len(), report, labeling));
            }
        }
        runs.push(run);
    }
    let (best_idx, best_report, best_labeling) = match best {
        Some((i, r, l)) => (Some(i), Some(r), Some(l)),
        None => (None, None, None),
    };
    Ok((
        SweepReport {
            schema: REPORT_SCHEMA,
            algorithm: base.algorithm().tag().to_string(),
            truth_plants,
            runs,
            best: best_idx,
            best_report,
        },
        best_labeling,
    ))
}

fn cmd_sweep(args: &ClusterArgs, range: &SweepRange, out: &mut dyn Write) -> Result<()> {
    if args.algo.d.is_some() {
        return Err(Error::Parameter("--d and --sweep-d are mutually exclusive".into()));
    }
    let ds = range.values();
    let base = AlgoArgs {
        d: Some(ds[0]),
        ..args.algo.clone()
    }
    .params()?;
    let truth_path = args.truth.as_ref().expect("clap enforces --truth");
    let cloud = load_ply(&args.input)?;
    let (truth_cloud, truth) = load_labeled(truth_path, args.distinct_colors)?;
    if truth_cloud.len() != cloud.len() {
        return Err(Error::Data(format!(
            "input has {} points but truth has {}",
            cloud.len(),
            truth_cloud.len()
        )));
    }

    let (report, labeling) = sweep_d(&cloud, &truth, &base, &ds, args.ignore_ground)?;
    writeln!(
        out,
        "{:>10} {:>9} {:>9} {:>9} {:>9}",
        "d", "clusters", "plants", "mean", "median"
    )?;
    for r in &report.runs {
        let pct = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{:.1}%", 100.0 * v));
        writeln!(
            out,
            "{:>10} {:>9} {:>9} {:>9} {:>9}",
            r.d,
            r.clusters,
            r.plant_clusters,
            pct(r.mean_iou),
            pct(r.median_iou)
        )?;
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if let Some(path) = &args.report {
        std::fs::write(path, &json)?;
    }
    match (report.best, labeling) {
        (Some(i), Some(labeling)) => {
            save_ply(&cloud, &labeling, &args.output, ply_format(args.binary))?;
            writeln!(out, "best: d = {}", report.runs[i].d)?;
            Ok(())
        }
        _ => Err(Error::Data(format!(
            "no run produced a cluster count within {:.0}% of {}",
            100.0 * SWEEP_COUNT_TOLERANCE,
            report.truth_plants
        ))),
    }
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let (pred_cloud, pred) = load_labeled(&args.predicted, false)?;
    let (truth_cloud, truth) = load_labeled(&args.truth, args.distinct_colors)?;
    if pred_cloud.len() != truth_cloud.len() {
        return Err(Error::Data(format!(
            "predicted cloud has {} points but truth has {}",
            pred_cloud.len(),
            truth_cloud.len()
        )));
    }
    let json = EvalReport::new(&pred, &truth, args.ignore_ground)?.to_json();
    if let Some(path) = &args.report {
        std::fs::write(path, &json)?;
    }
    out.write_all(json.as_bytes())?;
    Ok(())
}

fn synth_spec(args: &SynthArgs) -> Result<FieldSpec> {
    let mut spec = match &args.config {
        Some(path) => FieldSpec::load(path)?,
        None => FieldSpec::default(),
    };
    spec.rows = args.rows.unwrap_or(spec.rows);
    spec.cols = args.cols.unwrap_or(spec.cols);
    spec.points_per_plant = args.points_per_plant.unwrap_or(spec.points_per_plant);
    spec.double_plant_prob = args.double_plant_prob.unwrap_or(spec.double_plant_prob);
    spec.ground_point_density = args.ground_point_density.unwrap_or(spec.ground_point_density);
    spec.noise_sigma = args.noise_sigma.unwrap_or(spec.noise_sigma);
    spec.seed = args.seed.unwrap_or(spec.seed);
    spec.validate()?;
    Ok(spec)
}

pub fn cmd_synth(args: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let spec = synth_spec(args)?;
    let cloud = generate_field(&spec)?;
    let labeling = cloud.labeling().expect("generated fields are labeled");
    save_ply(&cloud, &labeling, &args.output, ply_format(args.binary))?;
    writeln!(out, "plants: {}", plant_count(&cloud))?;
    writeln!(out, "points: {}", cloud.len())?;
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let params = args.algo.params()?;
    let rows = run_bench(&FieldSpec::default(), &args.sizes, &params, args.repeats)?;
    out.write_all(format_table(&params, args.repeats, &rows).as_bytes())?;
    Ok(())
}

/// Exit status for an error: 2 for parameter (usage) errors, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parameter(_) => 2,
        _ => 1,
    }
}
