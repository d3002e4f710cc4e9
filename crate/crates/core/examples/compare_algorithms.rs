//! Run every algorithm on one synthetic field. The distance-based ones get a
//! small `d` sweep; a run counts only if its cluster count is within 20% of
//! the number of plants.

use cropseg::cli::sweep_d;
use cropseg::{cluster, generate_field, match_clusters, FieldSpec, Params};

fn main() -> cropseg::Result<()> {
    let spec = FieldSpec {
        rows: 4,
        cols: 6,
        ..FieldSpec::default()
    };
    let field = generate_field(&spec)?;
    let truth = field.labeling().expect("labeled");
    let k = spec.points_per_plant / 2;
    let ds: Vec<f64> = (1..=15).map(|i| i as f64 * 0.02).collect();

    for base in [Params::rain(0.1)?, Params::zqs(0.1)?, Params::gdqs(0.1, k)?] {
        let (report, _) = sweep_d(&field, &truth, &base, &ds, true)?;
        match report.best {
            Some(i) => {
                let run = &report.runs[i];
                println!(
                    "{:<16} d={:.2} clusters={:<4} mean IoU {:.3}",
                    base.algorithm().name(),
                    run.d,
                    run.clusters,
                    run.mean_iou.unwrap_or(0.0)
                );
            }
            None => println!("{:<16} no run within 20%", base.algorithm().name()),
        }
    }

    let params = Params::gdqspp(k, 0.3)?;
    let labels = cluster(&field, &params)?;
    let iou = match_clusters(&labels, &truth, true)?.mean_iou;
    println!(
        "{:<16} clusters={:<4} mean IoU {iou:.3}",
        params.algorithm().name(),
        labels.num_clusters()
    );
    Ok(())
}
