//! Four-sided 3-D queries `[x1, x2) x (-inf, y) x (-inf, z)` answered as cubes.

use fatrange::geometry::{Point3, Universe};
use fatrange::range3d::{stretch_points, FourSidedQuery, GridIndex3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> fatrange::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let small = Universe::with_log(8)?;
    let mut pts: Vec<Point3> = (0..3000)
        .map(|_| Point3::new(rng.random_range(0..256), rng.random_range(0..256), rng.random_range(0..256)))
        .collect();
    pts.sort();
    pts.dedup();
    // x is scaled by U so every wide x-range becomes a cube side.
    let (stretched, big) = stretch_points(&pts, small)?;
    let idx = GridIndex3::build(&stretched, big, 2)?;

    let q = FourSidedQuery {
        x1: 10 * 256,
        x2: 200 * 256,
        y: 180,
        z: 150,
    };
    let cube = q.to_cube(small)?;
    let hits = idx.query_cube(&cube)?;
    let expect = stretched.iter().filter(|p| q.contains_stretched(**p)).count();
    println!("{q:?} -> cube {cube:?}");
    println!("{} points (brute force {expect})", hits.len());

    let narrow = FourSidedQuery { x2: q.x1 + 100, ..q };
    println!("narrow query: {}", narrow.to_cube(small).unwrap_err());
    Ok(())
}
