//! Generate a synthetic field, cluster it with GD Quickshift++ and score the
//! result against the generator's labels.
//!
//!     cargo run --release --example cluster_field -- [rows] [cols] [k] [beta]

use std::time::Instant;

use cropseg::{cluster, count_report, generate_field, match_clusters, FieldSpec, Params};

fn main() -> cropseg::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());

    let spec = FieldSpec {
        rows: arg(0, "10").parse().expect("rows"),
        cols: arg(1, "10").parse().expect("cols"),
        ..FieldSpec::default()
    };
    let k: usize = arg(2, &(spec.points_per_plant / 2).to_string()).parse().expect("k");
    let beta: f64 = arg(3, "0.3").parse().expect("beta");

    let field = generate_field(&spec)?;
    let truth = field.labeling().expect("synthetic fields are labeled");
    println!("{} points, {} plants", field.len(), truth.clusters().len() - 1);

    let params = Params::gdqspp(k, beta)?;
    let start = Instant::now();
    let labels = cluster(&field, &params)?;
    let secs = start.elapsed().as_secs_f64();

    let counts = count_report(&labels, &truth)?;
    let report = match_clusters(&labels, &truth, true)?;
    println!("{params}: {} clusters in {secs:.2}s", labels.num_clusters());
    println!(
        "plant clusters {}, multi-plant {}, extraneous {}",
        counts.plant_clusters, counts.multi_plant_clusters, counts.extraneous_clusters
    );
    println!("mean IoU {:.3}, median IoU {:.3}", report.mean_iou, report.median_iou);
    Ok(())
}
