//! Orthogonal range reporting in the plane for square and fat queries.
//!
//! Against a query square `Q` every canonical rectangle is a corner
//! rectangle (holds a corner of `Q`), a spanning rectangle (crosses two
//! opposite sides of `Q` without holding a corner), an internal rectangle,
//! or disjoint. Internal rectangles are found through their extreme points,
//! corner rectangles through point location, and spanning rectangles
//! through four 3-D reporters over rectangle sides. The latter two are then
//! answered by their small-set indexes.

use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::geometry::{decompose_fat_rect2, AspectBound, Point2, Rect2, Universe};
use crate::quadtree::{MarkingState, QuadTree, Subdivision};
use crate::reporter::{RangeReporter, RangeTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RectClass {
    Corner,
    Internal,
    Spanning,
    Disjoint,
}

/// Classifies the closed rectangle `r` against the closed query `q`.
pub fn classify_rectangle(r: &Rect2, q: &Rect2) -> RectClass {
    if !r.intersects(q) {
        RectClass::Disjoint
    } else if q.corners().iter().any(|&p| r.contains(p)) {
        RectClass::Corner
    } else if (r.a <= q.a && r.b >= q.b) || (r.c <= q.c && r.d >= q.d) {
        RectClass::Spanning
    } else {
        RectClass::Internal
    }
}

/// What a single query touched, beyond the raw counters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryTrace {
    pub counters: Counters,
    /// Corner rectangles probed, per square.
    pub corner_rects: Vec<usize>,
    pub spanning_rects: Vec<usize>,
    pub internal_rects: Vec<usize>,
    /// `(touched, reported)` for each internal-rectangle list walk.
    pub walks: Vec<(u64, u64)>,
    /// Number of squares the query was split into.
    pub squares: usize,
}

/// Static index over distinct points in `[U]^2`.
///
/// `D` reports the extreme points of the canonical rectangles, `R` the side
/// tuples used to find spanning rectangles.
#[derive(Debug, Clone)]
pub struct Range2DIndex<D = RangeTree<2>, R = RangeTree<3>> {
    tree: QuadTree,
    marking: MarkingState,
    sub: Subdivision,
    reps: D,
    rep_count: usize,
    spans: [R; 4],
}

impl Range2DIndex {
    /// Builds with the default range-tree reporters.
    pub fn build(points: &[Point2], universe: Universe, d: usize) -> Result<Self> {
        Self::build_with(points, universe, d)
    }
}

impl<D: RangeReporter<2>, R: RangeReporter<3>> Range2DIndex<D, R> {
    pub fn build_with(points: &[Point2], universe: Universe, d: usize) -> Result<Self> {
        let (tree, marking, sub) = Subdivision::build(points, universe, d)?;
        let pts = sub.points();
        let mut reps = Vec::with_capacity(4 * sub.rects().len());
        let mut tuples: [Vec<([i64; 3], u32)>; 4] = Default::default();
        for (i, rect) in sub.rects().iter().enumerate() {
            let id = i as u32;
            if let Some(ex) = rect.extremes {
                let mut ids = ex.ids();
                ids.sort_unstable();
                let mut prev = None;
                for p in ids {
                    if prev != Some(p) {
                        reps.push(([pts[p as usize].x, pts[p as usize].y], id));
                    }
                    prev = Some(p);
                }
            }
            let b = rect.bounds.to_closed();
            tuples[0].push(([b.a, b.b, b.d], id));
            tuples[1].push(([b.a, b.b, b.c], id));
            tuples[2].push(([b.a, b.c, b.d], id));
            tuples[3].push(([b.b, b.c, b.d], id));
        }
        let rep_count = reps.len();
        Ok(Range2DIndex {
            tree,
            marking,
            sub,
            reps: D::build(reps),
            rep_count,
            spans: tuples.map(R::build),
        })
    }

    pub fn subdivision(&self) -> &Subdivision {
        &self.sub
    }

    /// Empties one canonical rectangle so harness tests can check that
    /// verification notices wrong answers.
    #[doc(hidden)]
    pub fn drop_rectangle_for_testing(&mut self, id: usize) {
        self.sub.drop_rectangle_for_testing(id);
    }

    pub fn quadtree(&self) -> &QuadTree {
        &self.tree
    }

    pub fn marking(&self) -> &MarkingState {
        &self.marking
    }

    pub fn universe(&self) -> Universe {
        self.sub.universe()
    }

    pub fn points(&self) -> &[Point2] {
        self.sub.points()
    }

    pub fn len(&self) -> usize {
        self.sub.points().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Size of the representative set.
    pub fn representative_count(&self) -> usize {
        self.rep_count
    }

    /// Canonical rectangles spanning the square `q`, sorted by id.
    pub fn spanning_candidates(&self, q: &Rect2) -> Result<Vec<usize>> {
        if !q.is_square() {
            return Err(Error::NotSquare {
                extents: vec![q.width(), q.height()],
            });
        }
        Ok(self.spanning(q, &mut Counters::default()))
    }

    fn spanning(&self, q: &Rect2, c: &mut Counters) -> Vec<usize> {
        let mut hits = Vec::new();
        let (mn, mx) = (i64::MIN, i64::MAX);
        // Top or bottom side crosses Q from left to right.
        for r in &self.spans[..2] {
            c.structures_probed += 1;
            r.report(&[mn, q.b, q.c], &[q.a, mx, q.d], &mut hits, c);
        }
        // Left or right side crosses Q from bottom to top.
        for r in &self.spans[2..] {
            c.structures_probed += 1;
            r.report(&[q.a, mn, q.d], &[q.b, q.c, mx], &mut hits, c);
        }
        let mut ids: Vec<usize> = hits.into_iter().map(|i| i as usize).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.retain(|&i| classify_rectangle(&self.closed(i), q) == RectClass::Spanning);
        ids
    }

    fn closed(&self, rect: usize) -> Rect2 {
        self.sub.rect(rect).bounds.to_closed()
    }

    /// Points inside the closed square `q`, sorted by id.
    pub fn query_square(&self, q: &Rect2) -> Result<Vec<u32>> {
        self.query_square_traced(q).map(|(out, _)| out)
    }

    pub fn query_square_traced(&self, q: &Rect2) -> Result<(Vec<u32>, QueryTrace)> {
        if !q.is_square() {
            return Err(Error::NotSquare {
                extents: vec![q.width(), q.height()],
            });
        }
        let mut trace = QueryTrace::default();
        let mut out = Vec::new();
        self.square_into(q, &mut out, &mut trace);
        out.sort_unstable();
        trace.counters.reported_k = out.len() as u64;
        trace.counters.raw_multiplicity = out.len() as u64;
        Ok((out, trace))
    }

    /// Points inside the closed rectangle `q`, whose aspect ratio must be
    /// admitted by `bound`.
    pub fn query_fat_rect(&self, q: &Rect2, bound: AspectBound) -> Result<Vec<u32>> {
        self.query_fat_rect_traced(q, bound).map(|(out, _)| out)
    }

    pub fn query_fat_rect_traced(&self, q: &Rect2, bound: AspectBound) -> Result<(Vec<u32>, QueryTrace)> {
        let squares = decompose_fat_rect2(q, bound)?;
        let mut trace = QueryTrace {
            squares: squares.len(),
            ..QueryTrace::default()
        };
        let mut out = Vec::new();
        for s in &squares {
            self.square_into(s, &mut out, &mut trace);
        }
        trace.counters.raw_multiplicity = out.len() as u64;
        out.sort_unstable();
        out.dedup();
        trace.counters.reported_k = out.len() as u64;
        Ok((out, trace))
    }

    fn square_into(&self, q: &Rect2, out: &mut Vec<u32>, trace: &mut QueryTrace) {
        let Some(q) = q.clip(self.universe()) else {
            return;
        };
        if self.sub.is_empty() {
            return;
        }
        let c = &mut trace.counters;
        let pts = self.sub.points();
        let mut done: Vec<usize> = Vec::new();

        // Internal rectangles, through their extreme points.
        let mut hits = Vec::new();
        c.structures_probed += 1;
        self.reps.report(&[q.a, q.c], &[q.b, q.d], &mut hits, c);
        hits.sort_unstable();
        hits.dedup();
        for &r in &hits {
            let r = r as usize;
            let b = self.closed(r);
            if classify_rectangle(&b, &q) != RectClass::Internal {
                continue;
            }
            let rect = self.sub.rect(r);
            let before = out.len();
            let touched = if b.a < q.a || b.b > q.b {
                let from = rect.lx.partition_point(|&i| pts[i as usize].x < q.a);
                walk(&rect.lx[from..], |p| p.x <= q.b, pts, out)
            } else if b.c < q.c || b.d > q.d {
                let from = rect.ly.partition_point(|&i| pts[i as usize].y < q.c);
                walk(&rect.ly[from..], |p| p.y <= q.d, pts, out)
            } else {
                walk(&rect.lx, |_| true, pts, out)
            };
            c.candidates_examined += touched;
            trace.walks.push((touched, (out.len() - before) as u64));
            trace.internal_rects.push(r);
            done.push(r);
        }

        // Corner rectangles.
        let mut corners: Vec<usize> = q
            .corners()
            .iter()
            .filter_map(|&p| self.sub.point_locate_counted(p, c))
            .collect();
        corners.sort_unstable();
        corners.dedup();
        for &r in &corners {
            c.structures_probed += 1;
            self.sub.rect(r).small.query(&q, out, c);
        }
        trace.corner_rects.extend(&corners);
        done.extend(corners);

        // Spanning rectangles.
        for r in self.spanning(&q, c) {
            debug_assert!(!done.contains(&r));
            c.structures_probed += 1;
            self.sub.rect(r).small.query(&q, out, c);
            trace.spanning_rects.push(r);
        }
    }
}

/// Emits ids from `list` while `keep` holds; returns the number touched.
fn walk(list: &[u32], keep: impl Fn(Point2) -> bool, pts: &[Point2], out: &mut Vec<u32>) -> u64 {
    let mut touched = 0;
    for &i in list {
        touched += 1;
        if !keep(pts[i as usize]) {
            break;
        }
        out.push(i);
    }
    touched
}
