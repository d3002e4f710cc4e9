//! Describe a field in TOML, generate it and look at what came out.

use cropseg::synth::plant_count;
use cropseg::{generate_field, FieldSpec};

const CONFIG: &str = r#"
rows = 3
cols = 8
plant_spacing = 0.18
points_per_plant = 600
double_plant_prob = 0.2
seed = 11
"#;

fn main() -> cropseg::Result<()> {
    let spec = FieldSpec::from_toml_str(CONFIG).map_err(cropseg::Error::Parameter)?;
    let field = generate_field(&spec)?;
    let labels = field.labeling().expect("labeled");
    let ground = labels.as_slice().iter().filter(|&&l| l == 0).count();

    println!("{} plants on {} positions", plant_count(&field), spec.rows * spec.cols);
    println!("{} points, {ground} on the ground", field.len());
    let top = field.points().iter().map(|p| p.z).fold(f64::MIN, f64::max);
    println!("tallest point: {top:.3} m");
    Ok(())
}
