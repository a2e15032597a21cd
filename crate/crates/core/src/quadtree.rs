//! Compressed quadtree, leaf marking, and the subdivision of the plane into
//! canonical rectangles.
//!
//! Every `d`-th leaf (in left-to-right order) is marked; an internal node is
//! marked when two or more children have marked descendants. The cell of
//! each marked node, minus the cells of its direct marked descendants, is cut
//! into at most [`C_DEC`] rectangles. Together with the cells of marked
//! leaves these canonical rectangles partition the universe, and each one
//! holds fewer than `6d` points.

use std::hash::{Hash, Hasher};

use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::geometry::{Point2, Rect2, Universe};
use crate::smallset::SmallSetIndex;

/// Maximum number of rectangles emitted for one marked node.
///
/// A node has at most four direct marked descendants, one per quadrant.
/// Each hole is peeled off with at most three extra pieces, and at most one
/// extra guillotine cut is needed to separate holes, giving `2 + 3 * 4`.
pub const C_DEC: usize = 14;

/// Default marking stride: `max(1, floor(log2 n))`.
pub fn default_stride(n: usize) -> usize {
    if n < 2 {
        1
    } else {
        (usize::BITS - 1 - n.leading_zeros()) as usize
    }
}

/// Half-open axis-parallel region `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region2 {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Region2 {
    pub const fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        Region2 { x0, y0, x1, y1 }
    }

    pub fn square(x0: i64, y0: i64, side: i64) -> Self {
        Region2::new(x0, y0, x0 + side, y0 + side)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.x0 >= self.x1 || self.y0 >= self.y1
    }

    #[inline]
    pub fn contains(&self, p: Point2) -> bool {
        self.x0 <= p.x && p.x < self.x1 && self.y0 <= p.y && p.y < self.y1
    }

    pub fn contains_region(&self, o: &Region2) -> bool {
        self.x0 <= o.x0 && o.x1 <= self.x1 && self.y0 <= o.y0 && o.y1 <= self.y1
    }

    pub fn overlaps(&self, o: &Region2) -> bool {
        self.x0 < o.x1 && o.x0 < self.x1 && self.y0 < o.y1 && o.y0 < self.y1
    }

    /// The same set of grid points as a closed rectangle.
    pub fn to_closed(&self) -> Rect2 {
        Rect2 {
            a: self.x0,
            b: self.x1 - 1,
            c: self.y0,
            d: self.y1 - 1,
        }
    }

    pub fn area(&self) -> i64 {
        if self.is_empty() {
            0
        } else {
            (self.x1 - self.x0) * (self.y1 - self.y0)
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadNode {
    /// Square cell with power-of-two side.
    pub cell: Region2,
    /// Children in quadrant order (low x/low y, high x/low y, low x/high y, high x/high y).
    pub children: Vec<u32>,
    /// Point id stored at a leaf.
    pub point: Option<u32>,
    pub parent: Option<u32>,
}

impl QuadNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Compressed quadtree over distinct points. Apart from the root, which
/// always spans the universe, every internal node has at least two
/// non-empty children.
#[derive(Debug, Clone)]
pub struct QuadTree {
    universe: Universe,
    points: Vec<Point2>,
    nodes: Vec<QuadNode>,
    leaves: Vec<u32>,
}

impl QuadTree {
    pub fn build(points: &[Point2], universe: Universe) -> Result<Self> {
        for p in points {
            universe.check(p.x)?;
            universe.check(p.y)?;
        }
        check_distinct(points)?;
        let mut tree = QuadTree {
            universe,
            points: points.to_vec(),
            nodes: Vec::with_capacity(2 * points.len()),
            leaves: Vec::with_capacity(points.len()),
        };
        if !points.is_empty() {
            let ids = (0..points.len() as u32).collect();
            tree.build_node(Region2::square(0, 0, universe.side()), ids, None);
            tree.collect_leaves();
        }
        Ok(tree)
    }

    fn build_node(&mut self, mut cell: Region2, ids: Vec<u32>, parent: Option<u32>) -> u32 {
        let id = self.nodes.len() as u32;
        if ids.len() == 1 {
            self.nodes.push(QuadNode {
                cell,
                children: Vec::new(),
                point: Some(ids[0]),
                parent,
            });
            return id;
        }
        if parent.is_some() {
            cell = self.enclosing_cell(&ids);
        }
        self.nodes.push(QuadNode {
            cell,
            children: Vec::new(),
            point: None,
            parent,
        });
        let half = (cell.x1 - cell.x0) / 2;
        let mut quads: [Vec<u32>; 4] = Default::default();
        for i in ids {
            let p = self.points[i as usize];
            let q = usize::from(p.x >= cell.x0 + half) | usize::from(p.y >= cell.y0 + half) << 1;
            quads[q].push(i);
        }
        let mut children = Vec::with_capacity(4);
        for (q, members) in quads.into_iter().enumerate() {
            if members.is_empty() {
                continue;
            }
            let sub = Region2::square(
                cell.x0 + half * (q as i64 & 1),
                cell.y0 + half * (q as i64 >> 1),
                half,
            );
            children.push(self.build_node(sub, members, Some(id)));
        }
        self.nodes[id as usize].children = children;
        id
    }

    /// Smallest dyadic square holding all `ids` (at least two distinct points).
    fn enclosing_cell(&self, ids: &[u32]) -> Region2 {
        let first = self.points[ids[0] as usize];
        let diff = ids.iter().fold(0i64, |acc, &i| {
            let p = self.points[i as usize];
            acc | (p.x ^ first.x) | (p.y ^ first.y)
        });
        debug_assert!(diff != 0);
        let log = 64 - diff.leading_zeros();
        let mask = !((1i64 << log) - 1);
        Region2::square(first.x & mask, first.y & mask, 1i64 << log)
    }

    fn collect_leaves(&mut self) {
        let mut stack = vec![0u32];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id as usize];
            if node.is_leaf() {
                self.leaves.push(id);
            } else {
                stack.extend(node.children.iter().rev());
            }
        }
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn root(&self) -> Option<u32> {
        (!self.nodes.is_empty()).then_some(0)
    }

    pub fn nodes(&self) -> &[QuadNode] {
        &self.nodes
    }

    pub fn node(&self, id: u32) -> &QuadNode {
        &self.nodes[id as usize]
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> &[u32] {
        &self.leaves
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.iter().filter(|n| !n.is_leaf()).count()
    }
}

fn check_distinct(points: &[Point2]) -> Result<()> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by_key(|&i| (points[i], i));
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            return Err(Error::DuplicatePoint {
                first: w[0].min(w[1]),
                second: w[0].max(w[1]),
            });
        }
    }
    Ok(())
}

/// Marked/special flags produced by the marking pass.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkingState {
    d: usize,
    marked: Vec<bool>,
    special: Vec<bool>,
}

impl MarkingState {
    pub fn stride(&self) -> usize {
        self.d
    }

    pub fn is_marked(&self, node: u32) -> bool {
        self.marked[node as usize]
    }

    pub fn is_special(&self, node: u32) -> bool {
        self.special[node as usize]
    }

    pub fn marked_count(&self) -> usize {
        self.marked.iter().filter(|&&m| m).count()
    }

    pub fn marked_nodes(&self) -> impl Iterator<Item = u32> + '_ {
        self.marked.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i as u32)
    }
}

/// Marks every `d`-th leaf starting with the leftmost, then propagates
/// bottom-up: a node with two or more marked-or-special children is marked,
/// a node with exactly one is special.
pub fn mark_nodes(tree: &QuadTree, d: usize) -> Result<MarkingState> {
    if d == 0 {
        return Err(Error::InvalidParameter("marking stride d must be >= 1".into()));
    }
    let n = tree.nodes.len();
    let mut marked = vec![false; n];
    let mut special = vec![false; n];
    for (rank, &leaf) in tree.leaves.iter().enumerate() {
        marked[leaf as usize] = rank % d == 0;
    }
    // Children always have larger ids than their parent.
    for id in (0..n).rev() {
        let node = &tree.nodes[id];
        if node.is_leaf() {
            continue;
        }
        let active = node
            .children
            .iter()
            .filter(|&&c| marked[c as usize] || special[c as usize])
            .count();
        marked[id] = active >= 2;
        special[id] = active == 1;
    }
    Ok(MarkingState { d, marked, special })
}

/// Extreme points of a canonical rectangle (input point ids).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Extremes {
    pub top: u32,
    pub bottom: u32,
    pub left: u32,
    pub right: u32,
}

impl Extremes {
    pub fn ids(&self) -> [u32; 4] {
        [self.top, self.bottom, self.left, self.right]
    }
}

#[derive(Debug, Clone)]
pub struct CanonicalRectangle {
    pub bounds: Region2,
    /// Quadtree node the rectangle belongs to.
    pub owner: u32,
    /// Point ids sorted by x (then y).
    pub lx: Vec<u32>,
    /// Point ids sorted by y (then x).
    pub ly: Vec<u32>,
    pub extremes: Option<Extremes>,
    pub small: SmallSetIndex,
}

impl CanonicalRectangle {
    pub fn len(&self) -> usize {
        self.lx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lx.is_empty()
    }
}

/// A marked node as seen by the subdivision.
#[derive(Debug, Clone)]
pub struct MarkedNode {
    pub node: u32,
    pub cell: Region2,
    /// Direct marked descendants, as indices into [`Subdivision::marked`].
    pub direct: Vec<u32>,
    /// Canonical rectangles owned by this node.
    pub rects: std::ops::Range<u32>,
}

#[derive(Debug, Clone)]
pub struct Subdivision {
    universe: Universe,
    d: usize,
    points: Vec<Point2>,
    rects: Vec<CanonicalRectangle>,
    marked: Vec<MarkedNode>,
    assignment: Vec<u32>,
}

/// Builds the canonical rectangles. The root is treated as marked even if
/// the marking pass left it unmarked, so the rectangles cover the universe.
/// Each rectangle gets a [`SmallSetIndex`] with capacity `6d`.
pub fn build_subdivision(tree: &QuadTree, marking: &MarkingState, d: usize) -> Result<Subdivision> {
    let mut sub = Subdivision {
        universe: tree.universe,
        d,
        points: tree.points.clone(),
        rects: Vec::new(),
        marked: Vec::new(),
        assignment: vec![u32::MAX; tree.points.len()],
    };
    let Some(root) = tree.root() else {
        return Ok(sub);
    };
    let is_marked = |id: u32| id == root || marking.is_marked(id);

    // Marked nodes in pre-order, each with its direct marked descendants.
    let mut order = vec![root];
    let mut index_of = std::collections::HashMap::new();
    let mut pieces: Vec<Region2> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let id = order[i];
        index_of.insert(id, i as u32);
        let mut direct = Vec::new();
        let mut stack: Vec<u32> = tree.node(id).children.iter().rev().copied().collect();
        while let Some(c) = stack.pop() {
            if is_marked(c) {
                direct.push(c);
            } else if marking.is_special(c) {
                stack.extend(tree.node(c).children.iter().rev());
            }
        }
        let cell = tree.node(id).cell;
        let start = pieces.len() as u32;
        let holes: Vec<Region2> = direct.iter().map(|&c| tree.node(c).cell).collect();
        carve(cell, holes, &mut pieces);
        sub.marked.push(MarkedNode {
            node: id,
            cell,
            direct: Vec::new(),
            rects: start..pieces.len() as u32,
        });
        // Provisionally store quadtree ids; remapped below.
        sub.marked[i].direct = direct.clone();
        order.extend(direct);
        i += 1;
    }
    for m in &mut sub.marked {
        for c in &mut m.direct {
            *c = index_of[c];
        }
    }

    let owners: Vec<u32> = sub
        .marked
        .iter()
        .flat_map(|m| m.rects.clone().map(move |_| m.node))
        .collect();
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); pieces.len()];
    for (pid, &p) in tree.points.iter().enumerate() {
        let r = sub.locate_in_pieces(&pieces, p, &mut Counters::default());
        let r = r.expect("canonical rectangles cover the universe");
        sub.assignment[pid] = r as u32;
        members[r].push(pid as u32);
    }

    let cap = 6 * d;
    for ((bounds, owner), ids) in pieces.into_iter().zip(owners).zip(members) {
        sub.rects.push(make_rect(&tree.points, bounds, owner, ids, cap)?);
    }
    Ok(sub)
}

fn make_rect(points: &[Point2], bounds: Region2, owner: u32, ids: Vec<u32>, cap: usize) -> Result<CanonicalRectangle> {
    let pt = |i: &u32| points[*i as usize];
    let mut lx = ids.clone();
    lx.sort_by_key(|i| (pt(i).x, pt(i).y));
    let mut ly = ids;
    ly.sort_by_key(|i| (pt(i).y, pt(i).x));
    let extremes = (!lx.is_empty()).then(|| Extremes {
        left: lx[0],
        right: *lx.last().unwrap(),
        bottom: ly[0],
        top: *ly.last().unwrap(),
    });
    let coords: Vec<Point2> = lx.iter().map(pt).collect();
    let small = SmallSetIndex::build(&coords, &lx, cap)?;
    Ok(CanonicalRectangle {
        bounds,
        owner,
        lx,
        ly,
        extremes,
        small,
    })
}

impl Subdivision {
    /// Convenience: quadtree, marking with stride `d` and subdivision in one go.
    pub fn build(points: &[Point2], universe: Universe, d: usize) -> Result<(QuadTree, MarkingState, Subdivision)> {
        let tree = QuadTree::build(points, universe)?;
        let marking = mark_nodes(&tree, d)?;
        let sub = build_subdivision(&tree, &marking, d)?;
        Ok((tree, marking, sub))
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn stride(&self) -> usize {
        self.d
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn rects(&self) -> &[CanonicalRectangle] {
        &self.rects
    }

    pub fn rect(&self, id: usize) -> &CanonicalRectangle {
        &self.rects[id]
    }

    pub fn marked(&self) -> &[MarkedNode] {
        &self.marked
    }

    /// Rectangle id owning each input point.
    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    /// The canonical rectangle containing `p`, found by descending through
    /// marked nodes. `None` outside the universe or for an empty subdivision.
    pub fn point_locate(&self, p: Point2) -> Option<usize> {
        self.point_locate_counted(p, &mut Counters::default())
    }

    pub fn point_locate_counted(&self, p: Point2, c: &mut Counters) -> Option<usize> {
        self.locate_with(p, c, |id| self.rects[id].bounds)
    }

    fn locate_in_pieces(&self, pieces: &[Region2], p: Point2, c: &mut Counters) -> Option<usize> {
        self.locate_with(p, c, |id| pieces[id])
    }

    fn locate_with(&self, p: Point2, c: &mut Counters, bounds: impl Fn(usize) -> Region2) -> Option<usize> {
        let mut m = self.marked.first()?;
        if !m.cell.contains(p) {
            return None;
        }
        'descend: loop {
            c.nodes_visited += 1;
            for &child in &m.direct {
                let next = &self.marked[child as usize];
                if next.cell.contains(p) {
                    m = next;
                    continue 'descend;
                }
            }
            return m.rects.clone().map(|r| r as usize).find(|&r| {
                c.candidates_examined += 1;
                bounds(r).contains(p)
            });
        }
    }

    /// Order-sensitive digest of the rectangles and their point lists.
    pub fn digest(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.d.hash(&mut h);
        for r in &self.rects {
            r.bounds.hash(&mut h);
            r.owner.hash(&mut h);
            r.lx.hash(&mut h);
            r.ly.hash(&mut h);
            r.extremes.hash(&mut h);
        }
        for m in &self.marked {
            m.node.hash(&mut h);
            m.direct.hash(&mut h);
        }
        h.finish()
    }

    /// Test hook: empties one canonical rectangle as if it had been lost.
    #[doc(hidden)]
    pub fn drop_rectangle_for_testing(&mut self, id: usize) {
        let r = &mut self.rects[id];
        let empty = SmallSetIndex::build(&[], &[], 1).unwrap();
        r.lx.clear();
        r.ly.clear();
        r.extremes = None;
        r.small = empty;
    }
}

#[derive(Debug, Clone, Copy)]
enum Peel {
    /// Full-width strips below and above the hole.
    Horizontal,
    /// Full-height strips left and right of the hole.
    Vertical,
}

fn around(r: Region2, h: &Region2, peel: Peel) -> Vec<Region2> {
    let pieces = match peel {
        Peel::Horizontal => [
            Region2::new(r.x0, r.y0, r.x1, h.y0),
            Region2::new(r.x0, h.y0, h.x0, h.y1),
            Region2::new(h.x1, h.y0, r.x1, h.y1),
            Region2::new(r.x0, h.y1, r.x1, r.y1),
        ],
        Peel::Vertical => [
            Region2::new(r.x0, r.y0, h.x0, r.y1),
            Region2::new(h.x0, r.y0, h.x1, h.y0),
            Region2::new(h.x0, h.y1, h.x1, r.y1),
            Region2::new(h.x1, r.y0, r.x1, r.y1),
        ],
    };
    pieces.into_iter().filter(|p| !p.is_empty()).collect()
}

/// Guillotine decomposition of `r` minus the disjoint `holes`, appended to `out`.
pub fn carve(r: Region2, mut holes: Vec<Region2>, out: &mut Vec<Region2>) {
    holes.sort();
    match holes.len() {
        0 => out.push(r),
        1 => out.extend(around(r, &holes[0], Peel::Horizontal)),
        _ => {
            for (i, h) in holes.iter().enumerate() {
                for peel in [Peel::Horizontal, Peel::Vertical] {
                    let pieces = around(r, h, peel);
                    let others = holes.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, o)| o);
                    let mut groups = vec![Vec::new(); pieces.len()];
                    let fits = others.into_iter().all(|o| {
                        pieces
                            .iter()
                            .position(|p| p.contains_region(o))
                            .map(|k| groups[k].push(*o))
                            .is_some()
                    });
                    if fits {
                        for (p, g) in pieces.into_iter().zip(groups) {
                            carve(p, g, out);
                        }
                        return;
                    }
                }
            }
            if let Some((a, b)) = guillotine_cut(r, &holes) {
                let (ha, hb): (Vec<_>, Vec<_>) = holes.into_iter().partition(|h| a.contains_region(h));
                carve(a, ha, out);
                carve(b, hb, out);
            } else {
                slab_carve(r, &holes, out);
            }
        }
    }
}

/// A straight cut through `r` that crosses no hole and separates them,
/// preferring the midlines.
fn guillotine_cut(r: Region2, holes: &[Region2]) -> Option<(Region2, Region2)> {
    let mut xs = vec![(r.x0 + r.x1) / 2];
    xs.extend(holes.iter().flat_map(|h| [h.x0, h.x1]));
    for t in xs {
        if t > r.x0 && t < r.x1 && holes.iter().all(|h| h.x1 <= t || h.x0 >= t) {
            let left = holes.iter().filter(|h| h.x1 <= t).count();
            if left > 0 && left < holes.len() {
                return Some((Region2::new(r.x0, r.y0, t, r.y1), Region2::new(t, r.y0, r.x1, r.y1)));
            }
        }
    }
    let mut ys = vec![(r.y0 + r.y1) / 2];
    ys.extend(holes.iter().flat_map(|h| [h.y0, h.y1]));
    for t in ys {
        if t > r.y0 && t < r.y1 && holes.iter().all(|h| h.y1 <= t || h.y0 >= t) {
            let below = holes.iter().filter(|h| h.y1 <= t).count();
            if below > 0 && below < holes.len() {
                return Some((Region2::new(r.x0, r.y0, r.x1, t), Region2::new(r.x0, t, r.x1, r.y1)));
            }
        }
    }
    None
}

/// Fallback for hole layouts without a separating cut: vertical slabs at
/// every hole edge, each split around the holes crossing it.
fn slab_carve(r: Region2, holes: &[Region2], out: &mut Vec<Region2>) {
    let mut xs: Vec<i64> = holes.iter().flat_map(|h| [h.x0, h.x1]).chain([r.x0, r.x1]).collect();
    xs.sort_unstable();
    xs.dedup();
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let mut ys: Vec<(i64, i64)> = holes
            .iter()
            .filter(|h| h.x0 <= x0 && x1 <= h.x1)
            .map(|h| (h.y0, h.y1))
            .collect();
        ys.sort_unstable();
        let mut y = r.y0;
        for (h0, h1) in ys {
            if h0 > y {
                out.push(Region2::new(x0, y, x1, h0));
            }
            y = y.max(h1);
        }
        if y < r.y1 {
            out.push(Region2::new(x0, y, x1, r.y1));
        }
    }
}
