//! Neighbor queries on the kD-tree: k nearest, fixed radius, and the nearest
//! point passing a predicate.

use cropseg::spatial::KdTree;

fn main() -> cropseg::Result<()> {
    // A 5x5 grid with unit spacing.
    let points: Vec<[f64; 2]> = (0..25).map(|i| [(i % 5) as f64, (i / 5) as f64]).collect();
    let tree = KdTree::build(points)?;

    let center = *tree.point(12);
    for nb in tree.knn(&center, 4, Some(12)) {
        println!("knn: point {} at distance {}", nb.index, nb.dist_sq.sqrt());
    }

    // Strictly inside the radius, so the diagonal at sqrt(2) is left out.
    let within = tree.radius_neighbors(&center, 1.5)?;
    println!("within 1.5 of the center: {within:?}");

    println!("distance to 8th neighbor: {:.3}", tree.kth_neighbor_distance(12, 8)?);

    // Nearest point with a larger x coordinate than point 12.
    let x = center[0];
    let right = tree.nearest_satisfying(12, |j| tree.point(j)[0] > x);
    println!("nearest point to the right: {right:?}");
    Ok(())
}
