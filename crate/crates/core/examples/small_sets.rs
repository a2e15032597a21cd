//! Rank-space index for a small point set.

use fatrange::counters::Counters;
use fatrange::geometry::{Point2, Rect2};
use fatrange::smallset::SmallSetIndex;

fn main() -> fatrange::Result<()> {
    let pts: Vec<Point2> = (0..200).map(|i| Point2::new((i * 37) % 1000, (i * 91) % 997)).collect();
    let ids: Vec<u32> = (1000..1200).collect();
    let idx = SmallSetIndex::build(&pts, &ids, 256)?;
    println!(
        "{} points, block size {}, {} columns x {} rows",
        idx.len(),
        idx.block_size(),
        idx.column_count(),
        idx.row_count()
    );

    let q = Rect2::new(100, 400, 250, 700)?;
    let mut out = Vec::new();
    let mut c = Counters::default();
    idx.query(&q, &mut out, &mut c);
    out.sort_unstable();
    let expect = pts.iter().zip(&ids).filter(|(p, _)| q.contains(**p)).count();
    println!("{q:?}: {} ids (brute force {expect}), {} candidates touched", out.len(), c.candidates_examined);
    Ok(())
}
