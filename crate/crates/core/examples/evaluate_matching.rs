//! Score a predicted partition against ground truth with a one-to-one IoU
//! matching and per-cluster counts.

use cropseg::{count_report, match_clusters, Labeling};

fn main() -> cropseg::Result<()> {
    // Truth: ground (0) and three plants. The prediction merges plants 2 and
    // 3 and splits off part of plant 1.
    let truth = Labeling::new(vec![0, 0, 1, 1, 1, 1, 2, 2, 2, 3, 3, 3]);
    let pred = Labeling::new(vec![9, 9, 4, 4, 4, 5, 6, 6, 6, 6, 6, 6]);

    let report = match_clusters(&pred, &truth, true)?;
    for pair in &report.pairs {
        println!(
            "predicted {} <-> plant {}: IoU {:.3}",
            pair.predicted, pair.truth, pair.iou
        );
    }
    println!("unmatched plants: {:?}", report.unmatched_truth);
    println!("mean {:.3}, median {:.3}", report.mean_iou, report.median_iou);

    let counts = count_report(&pred, &truth)?;
    println!(
        "{} clusters for {} plants; {} hold several plants, {} hold none",
        counts.total_clusters, counts.total_plants, counts.multi_plant_clusters, counts.extraneous_clusters
    );
    Ok(())
}
