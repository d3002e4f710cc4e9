//! Write a labeled cloud as PLY in both encodings and read it back. Labels
//! travel as vertex colors.

use cropseg::pointcloud::{load_ply, save_ply, PlyFormat};
use cropseg::{label_to_color, Labeling, Point3, PointCloud};

fn main() -> cropseg::Result<()> {
    let points: Vec<Point3> = (0..6)
        .map(|i| Point3::new(i as f64 * 0.1, 0.25, (i % 3) as f64 * 0.05))
        .collect();
    let labels = Labeling::new(vec![0, 1, 1, 2, 2, 3]);
    let cloud = PointCloud::new(points)?;

    let dir = std::env::temp_dir();
    for (name, format) in [("ascii", PlyFormat::Ascii), ("binary", PlyFormat::BinaryLittleEndian)] {
        let path = dir.join(format!("cropseg_example_{name}.ply"));
        save_ply(&cloud, &labels, &path, format)?;
        let back = load_ply(&path)?;
        let same = back.labels() == Some(labels.as_slice());
        println!("{name}: {} points, labels preserved: {same}", back.len());
        std::fs::remove_file(path)?;
    }

    for label in 0..4 {
        println!("label {label} -> color {:?}", label_to_color(label)?);
    }
    Ok(())
}
