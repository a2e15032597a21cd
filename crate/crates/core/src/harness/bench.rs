//! Per-query timing and counter dump in CSV form.

use std::io::Write;
use std::time::Instant;

use super::dataset::{Dataset, Records};
use super::verify::VerifyConfig;
use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::quadtree::default_stride;
use crate::range2d::Range2DIndex;
use crate::range3d::GridIndex3;
use crate::stabbing::OctreeStabIndex;

pub const CSV_HEADER: &str =
    "query_id,wall_time_ns,nodes_visited,structures_probed,candidates_examined,reported_k,raw_multiplicity";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BenchRow {
    pub query: usize,
    /// Median over the repetitions.
    pub wall_time_ns: u64,
    pub counters: Counters,
}

/// Builds the index for `data`, then times every query `reps` times.
pub fn bench(data: &Dataset, queries: &Dataset, cfg: &VerifyConfig, reps: usize) -> Result<Vec<BenchRow>> {
    let reps = reps.max(1);
    match (&data.records, &queries.records) {
        (Records::Points2(pts), Records::Rects2(qs)) => {
            let d = cfg.d.unwrap_or_else(|| default_stride(pts.len()));
            let idx = Range2DIndex::build(pts, data.universe, d)?;
            run(qs, reps, |q| {
                let (_, t) = if q.is_square() {
                    idx.query_square_traced(q)?
                } else {
                    idx.query_fat_rect_traced(q, cfg.alpha)?
                };
                Ok(t.counters)
            })
        }
        (Records::Points3(pts), Records::Boxes3(qs)) => {
            let idx = GridIndex3::build(pts, data.universe, cfg.b)?;
            run(qs, reps, |q| {
                let (_, t) = if q.is_cube() {
                    idx.query_cube_traced(q)?
                } else {
                    idx.query_fat_box_traced(q, cfg.alpha)?
                };
                Ok(t.counters)
            })
        }
        (Records::Boxes3(boxes), Records::Points3(qs)) => {
            let idx = OctreeStabIndex::build(boxes, data.universe, cfg.alpha);
            if let Some((i, why)) = idx.rejected().first() {
                return Err(Error::InvalidParameter(format!("box {i} cannot be indexed: {why}")));
            }
            run(qs, reps, |q| Ok(idx.query_traced(*q).1.counters))
        }
        _ => Err(Error::InvalidParameter(format!(
            "cannot query a {} dataset with {} records",
            data.kind(),
            queries.kind()
        ))),
    }
}

fn run<Q>(queries: &[Q], reps: usize, mut f: impl FnMut(&Q) -> Result<Counters>) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::with_capacity(queries.len());
    let mut times = Vec::with_capacity(reps);
    for (i, q) in queries.iter().enumerate() {
        times.clear();
        let mut counters = Counters::default();
        for _ in 0..reps {
            let start = Instant::now();
            counters = f(q)?;
            times.push(start.elapsed().as_nanos() as u64);
        }
        rows.push(BenchRow {
            query: i,
            wall_time_ns: median(&mut times),
            counters,
        });
    }
    Ok(rows)
}

fn median(v: &mut [u64]) -> u64 {
    if v.is_empty() {
        return 0;
    }
    v.sort_unstable();
    v[v.len() / 2]
}

/// Writes the header, one row per query and, if there were any queries, a
/// final `median` row taken column by column.
pub fn write_csv<W: Write>(rows: &[BenchRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        let c = &r.counters;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.query, r.wall_time_ns, c.nodes_visited, c.structures_probed, c.candidates_examined, c.reported_k, c.raw_multiplicity
        )?;
    }
    if !rows.is_empty() {
        let col = |f: fn(&BenchRow) -> u64| median(&mut rows.iter().map(f).collect::<Vec<_>>());
        writeln!(
            w,
            "median,{},{},{},{},{},{}",
            col(|r| r.wall_time_ns),
            col(|r| r.counters.nodes_visited),
            col(|r| r.counters.structures_probed),
            col(|r| r.counters.candidates_examined),
            col(|r| r.counters.reported_k),
            col(|r| r.counters.raw_multiplicity),
        )?;
    }
    w.flush()
}
