//! Which fat boxes contain a query point.

use fatrange::geometry::{AspectBound, Box3, Point3, Universe};
use fatrange::stabbing::OctreeStabIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> fatrange::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = Universe::with_log(16)?;
    let alpha = AspectBound::integer(2)?;
    let mut boxes: Vec<Box3> = (0..1000)
        .map(|_| {
            let s = rng.random_range(100..8000);
            let e: [i64; 3] = std::array::from_fn(|_| rng.random_range(s..=2 * s));
            let lo: [i64; 3] = std::array::from_fn(|a| rng.random_range(0..=u.side() - e[a]));
            Box3::new(lo, std::array::from_fn(|a| lo[a] + e[a] - 1)).unwrap()
        })
        .collect();
    // A sliver the index must refuse.
    boxes.push(Box3::new([0, 0, 0], [9999, 9, 9])?);

    let idx = OctreeStabIndex::build(&boxes, u, alpha);
    let s = idx.stats();
    println!(
        "{} boxes, {} octree nodes, {} (box, node) assignments, {} dominance entries",
        boxes.len(),
        s.nodes,
        s.assignments,
        s.corner_entries
    );
    for (i, why) in idx.rejected() {
        println!("rejected box {i}: {why}");
    }

    let q = Point3::new(30_000, 30_000, 30_000);
    let (hits, t) = idx.query_traced(q);
    println!("{q:?} lies in {} boxes; {} nodes visited, {} dominance probes", hits.len(), t.visited, t.probes);
    Ok(())
}
