//! Square and fat-rectangle range reporting over 2-D points.

use fatrange::geometry::{AspectBound, Point2, Rect2, Universe};
use fatrange::quadtree::default_stride;
use fatrange::range2d::Range2DIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> fatrange::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let u = Universe::with_log(20)?;
    let mut pts: Vec<Point2> = (0..10_000)
        .map(|_| Point2::new(rng.random_range(0..u.side()), rng.random_range(0..u.side())))
        .collect();
    pts.sort();
    pts.dedup();
    let idx = Range2DIndex::build(&pts, u, default_stride(pts.len()))?;

    let sq = Rect2::square(300_000, 400_000, 50_000);
    let (hits, trace) = idx.query_square_traced(&sq)?;
    println!("square {sq:?}: {} points", hits.len());
    println!(
        "  corner {}, spanning {}, internal {} rectangles; {} candidates examined",
        trace.corner_rects.len(),
        trace.spanning_rects.len(),
        trace.internal_rects.len(),
        trace.counters.candidates_examined
    );

    let alpha = AspectBound::integer(3)?;
    let wide = Rect2::new(100_000, 249_999, 600_000, 649_999)?;
    let (hits, trace) = idx.query_fat_rect_traced(&wide, alpha)?;
    println!(
        "3:1 rectangle: {} points from {} squares ({} before de-duplication)",
        hits.len(),
        trace.squares,
        trace.counters.raw_multiplicity
    );
    Ok(())
}
