//! Recursive uniform-grid index for cube and fat-box queries in `[U]^3`.
//!
//! A node of side `2^L` is cut into `r^3` cells with `r = 2^round(L/b)`.
//! Each non-empty cell gets its own recursive structure and a list of its
//! points; the labels of the non-empty cells are indexed by another
//! structure of the same kind over `[r]^3`; and every axis-aligned slab of
//! cells keeps a 3-D reporter. A query that falls inside one cell descends
//! into it. Otherwise it splits into an aligned block of whole cells,
//! answered through the label structure, and at most six pieces that each
//! sit inside one slab.

use std::collections::{BTreeMap, HashMap};

use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::geometry::{decompose_fat_box3, AspectBound, Box3, Point3, Universe};
use crate::reporter::{Item, RangeReporter, RangeTree};

/// Nodes with side at most `2^BASE_LOG` are flat lists.
pub const BASE_LOG: u32 = 3;
/// Nodes with at most this many items are flat lists.
pub const BASE_COUNT: usize = 32;

/// Cell-count exponent for a node of side `2^log`: `round(log / b)`, at least 1.
pub fn split_log(log: u32, b: u32) -> u32 {
    ((2 * log + b) / (2 * b)).clamp(1, log.max(1))
}

/// Height of the recursion for side `2^log`, counting both cell and label
/// recursion; base nodes have depth 0.
pub fn max_depth(log: u32, b: u32) -> u32 {
    if log <= BASE_LOG {
        return 0;
    }
    let lr = split_log(log, b);
    1 + max_depth(log - lr, b).max(max_depth(lr, b))
}

/// A piece of a query confined to one slab of cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlabPiece {
    pub axis: usize,
    /// Slab index along `axis`, relative to the node origin.
    pub slab: i64,
    pub region: Box3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// Union of whole cells, in node coordinates.
    pub aligned: Option<Box3>,
    pub pieces: Vec<SlabPiece>,
}

/// Splits `q` (already clipped to the node) against the grid with cells of
/// side `2^cell_log` anchored at `origin`. The pieces and the aligned block
/// are pairwise disjoint and cover `q`.
pub fn decompose_query_cube(q: &Box3, origin: [i64; 3], cell_log: u32) -> Result<Decomposition> {
    let s = 1i64 << cell_log;
    let cell = |v: i64, a: usize| (v - origin[a]).div_euclid(s);
    if (0..3).all(|a| cell(q.lo[a], a) == cell(q.hi[a], a)) {
        return Err(Error::InsideSingleCell);
    }
    let mut rest = *q;
    let mut pieces = Vec::with_capacity(6);
    for a in 0..3 {
        let (lo, hi) = (rest.lo[a], rest.hi[a]);
        let (lc, hc) = (cell(lo, a), cell(hi, a));
        if lc == hc {
            continue;
        }
        let first = origin[a] + (lc + i64::from(lo != origin[a] + lc * s)) * s;
        let last = origin[a] + cell(hi + 1, a) * s;
        if first > lo {
            let mut p = rest;
            p.hi[a] = first - 1;
            pieces.push(SlabPiece { axis: a, slab: lc, region: p });
        }
        if last <= hi {
            let mut p = rest;
            p.lo[a] = last;
            pieces.push(SlabPiece { axis: a, slab: hc, region: p });
        }
        if first >= last {
            return Ok(Decomposition { aligned: None, pieces });
        }
        rest.lo[a] = first;
        rest.hi[a] = last - 1;
    }
    let aligned = (0..3).all(|a| (rest.lo[a] - origin[a]) % s == 0 && (rest.hi[a] + 1 - origin[a]) % s == 0);
    if aligned {
        return Ok(Decomposition {
            aligned: Some(rest),
            pieces,
        });
    }
    // Some axis never crossed a boundary, so the rest sits in one slab there.
    let a = (0..3)
        .find(|&a| cell(rest.lo[a], a) == cell(rest.hi[a], a))
        .expect("a non-aligned remainder lies within one slab");
    pieces.push(SlabPiece {
        axis: a,
        slab: cell(rest.lo[a], a),
        region: rest,
    });
    Ok(Decomposition { aligned: None, pieces })
}

/// Cost of one query beyond the generic counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CubeTrace {
    pub counters: Counters,
    pub slab_probes: u64,
    pub label_descents: u64,
}

#[derive(Debug, Clone)]
struct Cell {
    child: u32,
    items: Vec<u32>,
}

#[derive(Debug, Clone)]
enum Node<R> {
    Base {
        items: Vec<Item<3>>,
    },
    Grid {
        origin: [i64; 3],
        log: u32,
        cell_log: u32,
        cells: Vec<Cell>,
        lookup: HashMap<[i64; 3], u32>,
        labels: u32,
        slabs: [HashMap<i64, R>; 3],
    },
}

/// Static index over distinct points in `[U]^3`; `R` answers slab queries.
#[derive(Debug, Clone)]
pub struct GridIndex3<R = RangeTree<3>> {
    universe: Universe,
    b: u32,
    points: Vec<Point3>,
    nodes: Vec<Node<R>>,
    root: Option<u32>,
    point_refs: usize,
    /// Side logs along any root-to-leaf cell path of the main tree.
    levels: Vec<u32>,
    /// `(level index, origin)` to node, main tree only.
    by_prefix: HashMap<(usize, [i64; 3]), u32>,
}

impl GridIndex3 {
    pub fn build(points: &[Point3], universe: Universe, b: u32) -> Result<Self> {
        Self::build_with(points, universe, b)
    }
}

impl<R: RangeReporter<3>> GridIndex3<R> {
    pub fn build_with(points: &[Point3], universe: Universe, b: u32) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidParameter(format!("b must be >= 2, got {b}")));
        }
        for p in points {
            for v in p.to_array() {
                universe.check(v)?;
            }
        }
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
        let mut levels = vec![universe.log()];
        while let Some(&l) = levels.last() {
            if l <= BASE_LOG {
                break;
            }
            levels.push(l - split_log(l, b));
        }
        let mut idx = GridIndex3 {
            universe,
            b,
            points: points.to_vec(),
            nodes: Vec::new(),
            root: None,
            point_refs: 0,
            levels,
            by_prefix: HashMap::new(),
        };
        if !points.is_empty() {
            let items = points.iter().enumerate().map(|(i, p)| (p.to_array(), i as u32)).collect();
            idx.root = Some(idx.build_node(items, [0; 3], universe.log(), Some(0)));
        }
        Ok(idx)
    }

    /// `level` is the position on the main cell path, `None` inside label structures.
    fn build_node(&mut self, items: Vec<Item<3>>, origin: [i64; 3], log: u32, level: Option<usize>) -> u32 {
        let id = self.nodes.len() as u32;
        if let Some(l) = level {
            self.by_prefix.insert((l, origin), id);
        }
        if log <= BASE_LOG || items.len() <= BASE_COUNT {
            if level.is_some() {
                self.point_refs += items.len();
            }
            self.nodes.push(Node::Base { items });
            return id;
        }
        let lr = split_log(log, self.b);
        let cell_log = log - lr;
        let label_of = |p: &[i64; 3]| std::array::from_fn::<i64, 3, _>(|a| (p[a] - origin[a]) >> cell_log);

        let mut groups: BTreeMap<[i64; 3], Vec<Item<3>>> = BTreeMap::new();
        for it in &items {
            groups.entry(label_of(&it.0)).or_default().push(*it);
        }
        let mut slab_items: [BTreeMap<i64, Vec<Item<3>>>; 3] = Default::default();
        for it in &items {
            let label = label_of(&it.0);
            for a in 0..3 {
                slab_items[a].entry(label[a]).or_default().push(*it);
            }
        }
        if level.is_some() {
            self.point_refs += 4 * items.len();
        }
        drop(items);
        // Reserve the slot so children get larger ids.
        self.nodes.push(Node::Base { items: Vec::new() });

        let mut cells = Vec::with_capacity(groups.len());
        let mut lookup = HashMap::with_capacity(groups.len());
        let mut label_items = Vec::with_capacity(groups.len());
        for (label, members) in groups {
            let cell_origin = std::array::from_fn(|a| origin[a] + (label[a] << cell_log));
            let ids = members.iter().map(|it| it.1).collect();
            let child = self.build_node(members, cell_origin, cell_log, level.map(|l| l + 1));
            lookup.insert(label, cells.len() as u32);
            label_items.push((label, cells.len() as u32));
            cells.push(Cell { child, items: ids });
        }
        let labels = self.build_node(label_items, [0; 3], lr, None);
        let slabs = slab_items.map(|m| m.into_iter().map(|(k, v)| (k, R::build(v))).collect());
        self.nodes[id as usize] = Node::Grid {
            origin,
            log,
            cell_log,
            cells,
            lookup,
            labels,
            slabs,
        };
        id
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Recursion height bound for this universe and `b`.
    pub fn max_depth(&self) -> u32 {
        max_depth(self.universe.log(), self.b)
    }

    /// Point references held by cell lists, slab reporters and base lists.
    pub fn point_refs(&self) -> usize {
        self.point_refs
    }

    /// Cell count per axis at the top level, or `None` if the root is a flat list.
    pub fn top_branching(&self) -> Option<i64> {
        match &self.nodes[self.root? as usize] {
            Node::Grid { log, cell_log, .. } => Some(1 << (log - cell_log)),
            Node::Base { .. } => None,
        }
    }

    /// Points in the closed cube `q`, sorted by id.
    pub fn query_cube(&self, q: &Box3) -> Result<Vec<u32>> {
        self.query_cube_traced(q).map(|(out, _)| out)
    }

    pub fn query_cube_traced(&self, q: &Box3) -> Result<(Vec<u32>, CubeTrace)> {
        self.cube_checked(q)?;
        let mut t = CubeTrace::default();
        let mut out = Vec::new();
        if let (Some(root), Some(q)) = (self.root, q.clip(self.universe)) {
            self.query_node(root, &q, &mut out, &mut t);
        }
        Ok(finish(out, t))
    }

    /// Same answer as [`query_cube`](Self::query_cube), but jumps straight
    /// to the node where descent would stop, using the high-order bits
    /// shared by the query corners.
    pub fn query_cube_lca(&self, q: &Box3) -> Result<(Vec<u32>, CubeTrace)> {
        self.cube_checked(q)?;
        let mut t = CubeTrace::default();
        let mut out = Vec::new();
        if let (Some(_), Some(q)) = (self.root, q.clip(self.universe)) {
            if let Some(node) = self.jump(&q) {
                self.query_node(node, &q, &mut out, &mut t);
            }
        }
        Ok(finish(out, t))
    }

    fn jump(&self, q: &Box3) -> Option<u32> {
        let diff = (0..3).fold(0i64, |acc, a| acc | (q.lo[a] ^ q.hi[a]));
        let span = 64 - diff.leading_zeros();
        // Deepest level whose node side still covers the query.
        let target = self.levels.iter().rposition(|&l| l >= span).unwrap_or(0);
        for i in (0..=target).rev() {
            let mask = !((1i64 << self.levels[i]) - 1);
            let origin = q.lo.map(|v| v & mask);
            if let Some(&node) = self.by_prefix.get(&(i, origin)) {
                // A grid node above the target means the needed cell is empty.
                return (i == target || matches!(self.nodes[node as usize], Node::Base { .. })).then_some(node);
            }
        }
        None
    }

    fn cube_checked(&self, q: &Box3) -> Result<()> {
        if q.is_cube() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                extents: q.extents().to_vec(),
            })
        }
    }

    /// Points in the closed box `q`, whose aspect ratio must be admitted by `bound`.
    pub fn query_fat_box(&self, q: &Box3, bound: AspectBound) -> Result<Vec<u32>> {
        self.query_fat_box_traced(q, bound).map(|(out, _)| out)
    }

    pub fn query_fat_box_traced(&self, q: &Box3, bound: AspectBound) -> Result<(Vec<u32>, CubeTrace)> {
        let cubes = decompose_fat_box3(q, bound)?;
        let mut t = CubeTrace::default();
        let mut out = Vec::new();
        if let Some(root) = self.root {
            for c in cubes.iter().filter_map(|c| c.clip(self.universe)) {
                self.query_node(root, &c, &mut out, &mut t);
            }
        }
        Ok(finish(out, t))
    }

    fn query_node(&self, id: u32, q: &Box3, out: &mut Vec<u32>, t: &mut CubeTrace) {
        t.counters.nodes_visited += 1;
        match &self.nodes[id as usize] {
            Node::Base { items } => {
                t.counters.candidates_examined += items.len() as u64;
                out.extend(items.iter().filter(|(p, _)| q.contains_coords(*p)).map(|it| it.1));
            }
            Node::Grid {
                origin,
                log,
                cell_log,
                cells,
                lookup,
                labels,
                slabs,
            } => {
                let frame = Box3::cube(*origin, 1 << log);
                let Some(q) = q.intersection(&frame) else {
                    return;
                };
                let dec = match decompose_query_cube(&q, *origin, *cell_log) {
                    Ok(dec) => dec,
                    Err(_) => {
                        let label = std::array::from_fn(|a| (q.lo[a] - origin[a]) >> cell_log);
                        if let Some(&c) = lookup.get(&label) {
                            self.query_node(cells[c as usize].child, &q, out, t);
                        }
                        return;
                    }
                };
                if let Some(block) = dec.aligned {
                    let lq = Box3 {
                        lo: std::array::from_fn(|a| (block.lo[a] - origin[a]) >> cell_log),
                        hi: std::array::from_fn(|a| (block.hi[a] - origin[a]) >> cell_log),
                    };
                    t.label_descents += 1;
                    t.counters.structures_probed += 1;
                    let mut hit = Vec::new();
                    self.query_node(*labels, &lq, &mut hit, t);
                    for c in hit {
                        let items = &cells[c as usize].items;
                        t.counters.candidates_examined += items.len() as u64;
                        out.extend_from_slice(items);
                    }
                }
                for p in &dec.pieces {
                    if let Some(r) = slabs[p.axis].get(&p.slab) {
                        t.slab_probes += 1;
                        t.counters.structures_probed += 1;
                        r.report(&p.region.lo, &p.region.hi, out, &mut t.counters);
                    }
                }
            }
        }
    }
}

fn finish(mut out: Vec<u32>, mut t: CubeTrace) -> (Vec<u32>, CubeTrace) {
    t.counters.raw_multiplicity = out.len() as u64;
    out.sort_unstable();
    out.dedup();
    t.counters.reported_k = out.len() as u64;
    (out, t)
}

/// Query `[x1, x2) x (-inf, y) x (-inf, z)` over points whose x-coordinate
/// has been multiplied by `U`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourSidedQuery {
    pub x1: i64,
    pub x2: i64,
    pub y: i64,
    pub z: i64,
}

impl FourSidedQuery {
    /// The closed cube `[x1, x2-1] x [y-w, y-1] x [z-w, z-1]` with `w = x2 - x1`.
    /// With `w > U` it holds exactly the same stretched points.
    pub fn to_cube(&self, universe: Universe) -> Result<Box3> {
        let w = self.x2 - self.x1;
        if w <= universe.side() {
            return Err(Error::NarrowFourSided {
                width: w,
                side: universe.side(),
            });
        }
        Ok(Box3::cube([self.x1, self.y - w, self.z - w], w))
    }

    pub fn contains_stretched(&self, p: Point3) -> bool {
        self.x1 <= p.x && p.x < self.x2 && p.y < self.y && p.z < self.z
    }
}

/// Maps points of `[U]^3` to `[U^2] x [U] x [U]` by scaling x by `U`, and
/// returns them with the enclosing cubic universe of side `U^2`.
pub fn stretch_points(points: &[Point3], universe: Universe) -> Result<(Vec<Point3>, Universe)> {
    let big = Universe::with_log(2 * universe.log())?;
    let u = universe.side();
    Ok((points.iter().map(|p| Point3::new(p.x * u, p.y, p.z)).collect(), big))
}
