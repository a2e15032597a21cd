//! Stabbing queries on fat boxes in `[U]^3`: report every box containing a
//! query point.
//!
//! Boxes live in an octree over the universe. A box is assigned to the
//! nodes whose cell has a corner inside the box while no ancestor cell
//! does; a fat box has `O(1)` such nodes. For each cell corner `v` inside
//! the box, the box corner facing away from `v` is stored in a dominance
//! set of that node. A query walks from the root to the unit cell holding
//! the point and asks all (at most eight) dominance sets on the way.

use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::geometry::{decompose_fat_box3, AspectBound, Box3, Point3, Universe};
use crate::reporter::{Item, KdTree, RangeReporter};

/// A cell of the full octree: the half-open cube `[origin, origin + 2^log)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OctCell {
    pub origin: [i64; 3],
    pub log: u32,
}

impl OctCell {
    pub fn root(universe: Universe) -> Self {
        OctCell {
            origin: [0; 3],
            log: universe.log(),
        }
    }

    pub fn side(&self) -> i64 {
        1 << self.log
    }

    /// Corner `k`: bit `a` of `k` selects the far side on axis `a`.
    pub fn corner(&self, k: usize) -> [i64; 3] {
        std::array::from_fn(|a| self.origin[a] + if k >> a & 1 == 1 { self.side() } else { 0 })
    }

    pub fn has_corner_in(&self, b: &Box3) -> bool {
        (0..3).all(|a| {
            let (lo, hi) = (self.origin[a], self.origin[a] + self.side());
            (b.lo[a] <= lo && lo <= b.hi[a]) || (b.lo[a] <= hi && hi <= b.hi[a])
        })
    }

    /// The closed cube spanned by the cell's corners.
    pub fn hull(&self) -> Box3 {
        Box3::cube(self.origin, self.side() + 1)
    }

    pub fn child(&self, k: usize) -> OctCell {
        let h = self.side() / 2;
        OctCell {
            origin: std::array::from_fn(|a| self.origin[a] + if k >> a & 1 == 1 { h } else { 0 }),
            log: self.log - 1,
        }
    }

    /// Ancestor (or self) with side `2^log`.
    pub fn ancestor(&self, log: u32) -> OctCell {
        let mask = !((1i64 << log) - 1);
        OctCell {
            origin: self.origin.map(|v| v & mask),
            log,
        }
    }
}

/// Upper bound on the relevant nodes of one cube. All corners inside a cube
/// of geometric side `s` lie on the lattice of spacing `2^floor(log2 s)`,
/// at most two lattice values per axis, and the cells of that size touching
/// them take at most three positions per axis.
pub const MAX_RELEVANT_PER_CUBE: usize = 27;

/// Nodes a box is assigned to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    /// Sorted, without duplicates.
    pub nodes: Vec<OctCell>,
    /// Relevant-node count of each cube the box was split into.
    pub per_cube: Vec<usize>,
}

/// Nodes whose cell has a corner in `b` and no ancestor cell does.
pub fn assign_relevant_nodes(b: &Box3, bound: AspectBound, universe: Universe) -> Result<Assignment> {
    for a in 0..3 {
        universe.check(b.lo[a])?;
        universe.check(b.hi[a])?;
    }
    let cubes = decompose_fat_box3(b, bound)?;
    let mut nodes = Vec::new();
    let mut per_cube = Vec::with_capacity(cubes.len());
    for c in &cubes {
        let rel = cube_relevant(c, universe);
        per_cube.push(rel.len());
        nodes.extend(rel.into_iter().map(|n| topmost_with_corner(n, b, universe)));
    }
    nodes.sort_unstable();
    nodes.dedup();
    Ok(Assignment { nodes, per_cube })
}

/// Relevant nodes of a single cube. With geometric side `s` and `l` the power
/// of two in `(s, 2s]`, every corner in the cube lies on the `l/2` lattice,
/// and the relevant nodes are the topmost ancestors of the lattice-sized
/// cells touching those lattice points.
fn cube_relevant(c: &Box3, universe: Universe) -> Vec<OctCell> {
    let s = c.extent(0) - 1;
    let half_log = if s == 0 { 0 } else { 63 - s.leading_zeros() };
    let half = 1i64 << half_log;
    let axis_points = |a: usize| -> Vec<i64> {
        let first = (c.lo[a] + half - 1).div_euclid(half) * half;
        (0..).map(|i| first + i * half).take_while(|&v| v <= c.hi[a]).collect()
    };
    let (xs, ys, zs) = (axis_points(0), axis_points(1), axis_points(2));
    let mut out = Vec::new();
    for &x in &xs {
        for &y in &ys {
            for &z in &zs {
                for k in 0..8 {
                    let origin = [
                        x - if k & 1 == 1 { half } else { 0 },
                        y - if k & 2 == 2 { half } else { 0 },
                        z - if k & 4 == 4 { half } else { 0 },
                    ];
                    if origin.iter().all(|&v| v >= 0 && v < universe.side()) {
                        let cell = OctCell { origin, log: half_log.min(universe.log()) };
                        out.push(topmost_with_corner(cell, c, universe));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn topmost_with_corner(cell: OctCell, b: &Box3, universe: Universe) -> OctCell {
    (cell.log..=universe.log())
        .rev()
        .map(|l| cell.ancestor(l))
        .find(|a| a.has_corner_in(b))
        .unwrap_or(cell)
}

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct OctNode<D> {
    children: [u32; 8],
    sets: [Option<D>; 8],
}

/// Cost of one stabbing query beyond the generic counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StabTrace {
    pub counters: Counters,
    pub visited: u64,
    pub probes: u64,
}

/// Build statistics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StabStats {
    /// `(box, node)` pairs.
    pub assignments: usize,
    /// Entries over all corner dominance sets.
    pub corner_entries: usize,
    pub max_per_cube: usize,
    pub nodes: usize,
}

/// Static stabbing index; `D` answers the 3-D dominance queries.
#[derive(Debug, Clone)]
pub struct OctreeStabIndex<D = KdTree<3>> {
    universe: Universe,
    bound: AspectBound,
    boxes: Vec<Box3>,
    rejected: Vec<(usize, String)>,
    nodes: Vec<OctNode<D>>,
    stats: StabStats,
}

impl OctreeStabIndex {
    pub fn build(boxes: &[Box3], universe: Universe, bound: AspectBound) -> Self {
        Self::build_with(boxes, universe, bound)
    }
}

impl<D: RangeReporter<3>> OctreeStabIndex<D> {
    /// Boxes that are not fat enough or leave the universe are skipped and
    /// listed in [`rejected`](Self::rejected); box ids stay input positions.
    pub fn build_with(boxes: &[Box3], universe: Universe, bound: AspectBound) -> Self {
        let mut staging: Vec<[Vec<Item<3>>; 8]> = vec![Default::default()];
        let mut children = vec![[NONE; 8]];
        let mut stats = StabStats::default();
        let mut rejected = Vec::new();
        for (id, b) in boxes.iter().enumerate() {
            let asg = match assign_relevant_nodes(b, bound, universe) {
                Ok(a) => a,
                Err(e) => {
                    rejected.push((id, e.to_string()));
                    continue;
                }
            };
            stats.max_per_cube = stats.max_per_cube.max(asg.per_cube.iter().copied().max().unwrap_or(0));
            stats.assignments += asg.nodes.len();
            for cell in asg.nodes {
                let mut node = 0usize;
                for l in (cell.log..universe.log()).rev() {
                    let k = (0..3).map(|a| ((cell.origin[a] >> l & 1) as usize) << a).sum::<usize>();
                    if children[node][k] == NONE {
                        children[node][k] = children.len() as u32;
                        children.push([NONE; 8]);
                        staging.push(Default::default());
                    }
                    node = children[node][k] as usize;
                }
                for (k, set) in staging[node].iter_mut().enumerate() {
                    if b.contains_coords(cell.corner(k)) {
                        let mu = std::array::from_fn(|a| if k >> a & 1 == 1 { b.lo[a] } else { b.hi[a] });
                        set.push((mu, id as u32));
                        stats.corner_entries += 1;
                    }
                }
            }
        }
        stats.nodes = children.len();
        let nodes = children
            .into_iter()
            .zip(staging)
            .map(|(children, sets)| OctNode {
                children,
                sets: sets.map(|items| (!items.is_empty()).then(|| D::build(items))),
            })
            .collect();
        OctreeStabIndex {
            universe,
            bound,
            boxes: boxes.to_vec(),
            rejected,
            nodes,
            stats,
        }
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn bound(&self) -> AspectBound {
        self.bound
    }

    pub fn boxes(&self) -> &[Box3] {
        &self.boxes
    }

    /// Input positions of skipped boxes with the reason.
    pub fn rejected(&self) -> &[(usize, String)] {
        &self.rejected
    }

    pub fn stats(&self) -> &StabStats {
        &self.stats
    }

    /// Ids of the boxes containing `q`, sorted.
    pub fn query(&self, q: Point3) -> Vec<u32> {
        self.query_traced(q).0
    }

    pub fn query_traced(&self, q: Point3) -> (Vec<u32>, StabTrace) {
        let mut t = StabTrace::default();
        let mut out = Vec::new();
        let p = q.to_array();
        if p.iter().all(|&v| self.universe.contains(v)) {
            let mut node = 0u32;
            let mut level = self.universe.log();
            loop {
                t.visited += 1;
                t.counters.nodes_visited += 1;
                for (k, set) in self.nodes[node as usize].sets.iter().enumerate() {
                    let Some(set) = set else { continue };
                    let mut lo = [i64::MIN; 3];
                    let mut hi = [i64::MAX; 3];
                    for a in 0..3 {
                        if k >> a & 1 == 1 {
                            hi[a] = p[a];
                        } else {
                            lo[a] = p[a];
                        }
                    }
                    t.probes += 1;
                    t.counters.structures_probed += 1;
                    set.report(&lo, &hi, &mut out, &mut t.counters);
                }
                if level == 0 {
                    break;
                }
                level -= 1;
                let k = (0..3).map(|a| ((p[a] >> level & 1) as usize) << a).sum::<usize>();
                match self.nodes[node as usize].children[k] {
                    NONE => break,
                    c => node = c,
                }
            }
        }
        t.counters.raw_multiplicity = out.len() as u64;
        out.sort_unstable();
        out.dedup();
        t.counters.reported_k = out.len() as u64;
        (out, t)
    }
}

/// Relevant nodes by definition, searching every octree cell whose closed
/// hull meets the box.
pub(crate) fn relevant_by_definition(b: &Box3, universe: Universe) -> Vec<OctCell> {
    let mut out = Vec::new();
    let mut stack = vec![OctCell::root(universe)];
    while let Some(cell) = stack.pop() {
        if cell.hull().intersection(b).is_none() {
            continue;
        }
        if cell.has_corner_in(b) {
            out.push(cell);
        } else if cell.log > 0 {
            stack.extend((0..8).map(|k| cell.child(k)));
        }
    }
    out.sort_unstable();
    out
}

/// Reason a box cannot be indexed, if any.
pub fn check_box(b: &Box3, bound: AspectBound, universe: Universe) -> Result<()> {
    for a in 0..3 {
        universe.check(b.lo[a])?;
        universe.check(b.hi[a])?;
    }
    if bound.admits(&b.extents()) {
        Ok(())
    } else {
        let e = b.extents();
        Err(Error::FatnessViolation {
            longest: *e.iter().max().unwrap(),
            shortest: *e.iter().min().unwrap(),
            alpha: bound.to_string(),
        })
    }
}
