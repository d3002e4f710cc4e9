//! Matching predicted clusters against ground truth.
//!
//! Predicted and truth clusters are paired one-to-one so that the sum of
//! IoUs is maximal; summaries are taken over the matched pairs only.

mod hungarian;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

pub use hungarian::max_weight_assignment;

use crate::error::{Error, Result};
use crate::pointcloud::Labeling;

/// Version of the JSON report layout.
pub const REPORT_SCHEMA: u32 = 1;

/// `|a ∩ b| / |a ∪ b|` of two index sets (duplicates ignored); 0 when both
/// are empty.
pub fn iou(a: &[u32], b: &[u32]) -> f64 {
    let a: BTreeSet<u32> = a.iter().copied().collect();
    let b: BTreeSet<u32> = b.iter().copied().collect();
    let inter = a.intersection(&b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchedPair {
    pub predicted: u32,
    pub truth: u32,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchReport {
    pub num_predicted: usize,
    pub num_truth: usize,
    /// Matched pairs with non-zero IoU, by predicted id.
    pub pairs: Vec<MatchedPair>,
    pub mean_iou: f64,
    pub median_iou: f64,
    pub unmatched_predicted: Vec<u32>,
    pub unmatched_truth: Vec<u32>,
}

impl MatchReport {
    pub fn iou_sum(&self) -> f64 {
        self.pairs.iter().map(|p| p.iou).sum()
    }
}

fn check_lengths(a: &Labeling, b: &Labeling) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Contract(format!(
            "labelings cover {} and {} points",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

fn median(sorted: &[f64]) -> f64 {
    match sorted.len() {
        0 => 0.0,
        n if n % 2 == 1 => sorted[n / 2],
        n => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    }
}

/// Max-sum-IoU bipartite matching between predicted and truth clusters.
///
/// With `ignore_truth_label_zero`, truth label 0 (ground) is not a cluster
/// to be matched; its points still count towards predicted cluster sizes.
/// Pairs with IoU 0 are reported as unmatched.
pub fn match_clusters(pred: &Labeling, truth: &Labeling, ignore_truth_label_zero: bool) -> Result<MatchReport> {
    check_lengths(pred, truth)?;

    let mut pred_size: BTreeMap<u32, usize> = BTreeMap::new();
    let mut truth_size: BTreeMap<u32, usize> = BTreeMap::new();
    let mut overlap: HashMap<(u32, u32), usize> = HashMap::new();
    for (&p, &t) in pred.as_slice().iter().zip(truth.as_slice()) {
        *pred_size.entry(p).or_default() += 1;
        if ignore_truth_label_zero && t == 0 {
            continue;
        }
        *truth_size.entry(t).or_default() += 1;
        *overlap.entry((p, t)).or_default() += 1;
    }

    // Clusters without any overlap can only be matched at IoU 0.
    let rows: Vec<u32> = overlap
        .keys()
        .map(|&(p, _)| p)
        .collect::<BTreeSet<u32>>()
        .into_iter()
        .collect();
    let row_of: HashMap<u32, usize> = rows.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let cols: Vec<u32> = truth_size.keys().copied().collect();
    let col_of: HashMap<u32, usize> = cols.iter().enumerate().map(|(j, &t)| (t, j)).collect();

    let mut weights = vec![vec![0.0; cols.len()]; rows.len()];
    for (&(p, t), &inter) in &overlap {
        let union = pred_size[&p] + truth_size[&t] - inter;
        weights[row_of[&p]][col_of[&t]] = inter as f64 / union as f64;
    }

    let assignment = max_weight_assignment(&weights);
    let mut pairs: Vec<MatchedPair> = assignment
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let c = (*c)?;
            let w = weights[i][c];
            (w > 0.0).then(|| MatchedPair {
                predicted: rows[i],
                truth: cols[c],
                iou: w,
            })
        })
        .collect();
    pairs.sort_by_key(|p| p.predicted);

    let matched_pred: BTreeSet<u32> = pairs.iter().map(|p| p.predicted).collect();
    let matched_truth: BTreeSet<u32> = pairs.iter().map(|p| p.truth).collect();
    let mut ious: Vec<f64> = pairs.iter().map(|p| p.iou).collect();
    ious.sort_by(f64::total_cmp);
    let mean_iou = if ious.is_empty() {
        0.0
    } else {
        ious.iter().sum::<f64>() / ious.len() as f64
    };

    Ok(MatchReport {
        num_predicted: pred_size.len(),
        num_truth: truth_size.len(),
        mean_iou,
        median_iou: median(&ious),
        unmatched_predicted: pred_size
            .keys()
            .copied()
            .filter(|p| !matched_pred.contains(p))
            .collect(),
        unmatched_truth: cols.iter().copied().filter(|t| !matched_truth.contains(t)).collect(),
        pairs,
    })
}

/// Cluster counts against a truth labeling whose label 0 is ground.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountReport {
    /// Distinct non-zero truth labels.
    pub total_plants: usize,
    pub total_clusters: usize,
    /// Clusters containing at least one plant point.
    pub plant_clusters: usize,
    /// Clusters containing points of two or more plants.
    pub multi_plant_clusters: usize,
    /// Clusters containing no plant point.
    pub extraneous_clusters: usize,
}

pub fn count_report(labeling: &Labeling, truth: &Labeling) -> Result<CountReport> {
    check_lengths(labeling, truth)?;
    let mut plants_in: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    let mut plants = BTreeSet::new();
    for (&p, &t) in labeling.as_slice().iter().zip(truth.as_slice()) {
        let set = plants_in.entry(p).or_default();
        if t != 0 {
            set.insert(t);
            plants.insert(t);
        }
    }
    let extraneous = plants_in.values().filter(|s| s.is_empty()).count();
    Ok(CountReport {
        total_plants: plants.len(),
        total_clusters: plants_in.len(),
        plant_clusters: plants_in.len() - extraneous,
        multi_plant_clusters: plants_in.values().filter(|s| s.len() >= 2).count(),
        extraneous_clusters: extraneous,
    })
}

/// The JSON document written by `cropseg eval`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub schema: u32,
    pub ignore_ground: bool,
    pub matching: MatchReport,
    pub counts: CountReport,
}

impl EvalReport {
    pub fn new(pred: &Labeling, truth: &Labeling, ignore_ground: bool) -> Result<Self> {
        Ok(Self {
            schema: REPORT_SCHEMA,
            ignore_ground,
            matching: match_clusters(pred, truth, ignore_ground)?,
            counts: count_report(pred, truth)?,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
