//! Builds the compressed quadtree subdivision and prints its shape.

use fatrange::geometry::{Point2, Universe};
use fatrange::quadtree::{default_stride, Subdivision};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> fatrange::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = Universe::with_log(16)?;
    let mut pts: Vec<Point2> = (0..4000)
        .map(|_| Point2::new(rng.random_range(0..u.side()), rng.random_range(0..u.side())))
        .collect();
    pts.sort();
    pts.dedup();
    let d = default_stride(pts.len());
    let (tree, marking, sub) = Subdivision::build(&pts, u, d)?;

    println!("{} points, d = {d}", pts.len());
    println!("quadtree: {} nodes, {} leaves", tree.nodes().len(), tree.leaves().len());
    println!("marked nodes: {}", marking.marked_count());
    println!("canonical rectangles: {}", sub.rects().len());
    let largest = sub.rects().iter().map(|r| r.len()).max().unwrap_or(0);
    println!("largest rectangle holds {largest} points (limit 6d = {})", 6 * d);

    let q = Point2::new(12_345, 54_321);
    if let Some(id) = sub.point_locate(q) {
        let r = sub.rect(id);
        println!("{q:?} lies in rectangle {id}: {:?}, {} points", r.bounds, r.len());
    }
    Ok(())
}
