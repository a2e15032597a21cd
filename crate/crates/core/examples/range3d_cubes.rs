//! Cube and fat-box range reporting over 3-D points.

use fatrange::geometry::{AspectBound, Box3, Point3, Universe};
use fatrange::range3d::GridIndex3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> fatrange::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = Universe::with_log(15)?;
    let mut pts: Vec<Point3> = (0..10_000)
        .map(|_| Point3::new(rng.random_range(0..u.side()), rng.random_range(0..u.side()), rng.random_range(0..u.side())))
        .collect();
    pts.sort();
    pts.dedup();
    let idx = GridIndex3::build(&pts, u, 2)?;
    println!(
        "{} points, depth bound {}, {} stored references, top branching {:?}",
        idx.len(),
        idx.max_depth(),
        idx.point_refs(),
        idx.top_branching()
    );

    let cube = Box3::cube([5_000, 9_000, 12_000], 6_000);
    let (hits, t) = idx.query_cube_traced(&cube)?;
    println!(
        "cube: {} points, {} slab probes, {} label descents",
        hits.len(),
        t.slab_probes,
        t.label_descents
    );
    let (fast, _) = idx.query_cube_lca(&cube)?;
    assert_eq!(fast, hits);

    let slab = Box3::new([0, 0, 16_000], [15_999, 7_999, 19_999])?;
    let hits = idx.query_fat_box(&slab, AspectBound::integer(4)?)?;
    println!("4:2:1 box: {} points", hits.len());
    Ok(())
}
