//! GD Quickshift++ one stage at a time: ground-plane density, cluster cores,
//! then the climb that assigns every other point.

use cropseg::cluster::{extract_cores, gdqspp_assign, knn_density_2d};
use cropseg::{generate_field, FieldSpec};

fn main() -> cropseg::Result<()> {
    let spec = FieldSpec {
        rows: 2,
        cols: 3,
        points_per_plant: 400,
        double_plant_prob: 0.0,
        ..FieldSpec::default()
    };
    let field = generate_field(&spec)?;
    let k = 200;

    let density = knn_density_2d(&field, k)?;
    let infinite = (0..field.len()).filter(|&i| density.is_infinite(i)).count();
    println!("{} points, {infinite} with coincident projections", field.len());

    let cores = extract_cores(&field, &density, k, 0.3)?;
    for (c, core) in cores.cores().iter().enumerate() {
        let mode = field.points()[core.mode];
        println!(
            "core {c}: {} points, mode at ({:.2}, {:.2})",
            core.members.len(),
            mode.x,
            mode.y
        );
    }

    let labels = gdqspp_assign(&field, &density, &cores)?;
    let sizes: Vec<usize> = labels.clusters().values().map(Vec::len).collect();
    println!("cluster sizes: {sizes:?}");
    Ok(())
}
