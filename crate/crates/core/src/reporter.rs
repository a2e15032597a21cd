//! Pluggable orthogonal range reporters.
//!
//! The fat-range indexes delegate a few sub-problems (representative points,
//! spanning tuples, slab queries, dominance sets) to a generic K-dimensional
//! box reporter. Any implementation of [`RangeReporter`] can be plugged in;
//! outputs must not depend on the choice. Unbounded sides are expressed with
//! `i64::MIN` / `i64::MAX`.

use crate::counters::Counters;

/// A point with K integer coordinates and an opaque id.
pub type Item<const K: usize> = ([i64; K], u32);

pub trait RangeReporter<const K: usize>: Sized + Send + Sync {
    fn build(items: Vec<Item<K>>) -> Self;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends the id of every item inside the closed box `[lo, hi]`.
    fn report(&self, lo: &[i64; K], hi: &[i64; K], out: &mut Vec<u32>, counters: &mut Counters);
}

#[inline]
fn inside<const K: usize>(p: &[i64; K], lo: &[i64; K], hi: &[i64; K]) -> bool {
    (0..K).all(|i| lo[i] <= p[i] && p[i] <= hi[i])
}

fn sort_on_axis<const K: usize>(items: &mut [Item<K>], axis: usize) {
    items.sort_unstable_by(|a, b| a.0[axis].cmp(&b.0[axis]).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
}

/// Brute-force reporter. Useful as a reference and for tiny sets.
#[derive(Debug, Clone, Default)]
pub struct LinearScan<const K: usize> {
    items: Vec<Item<K>>,
}

impl<const K: usize> RangeReporter<K> for LinearScan<K> {
    fn build(items: Vec<Item<K>>) -> Self {
        LinearScan { items }
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn report(&self, lo: &[i64; K], hi: &[i64; K], out: &mut Vec<u32>, counters: &mut Counters) {
        counters.nodes_visited += 1;
        counters.candidates_examined += self.items.len() as u64;
        out.extend(self.items.iter().filter(|(p, _)| inside(p, lo, hi)).map(|&(_, id)| id));
    }
}

const RANGE_TREE_LEAF: usize = 8;
const NO_CHILD: u32 = u32::MAX;

/// Static layered range tree: a balanced tree on the first coordinate whose
/// nodes carry a range tree on the remaining coordinates, ending in a sorted
/// array on the last one. `O(n log^(K-1) n)` space.
#[derive(Debug, Clone)]
pub struct RangeTree<const K: usize> {
    root: Option<Layer<K>>,
    len: usize,
}

#[derive(Debug, Clone)]
struct Layer<const K: usize> {
    axis: usize,
    items: Vec<Item<K>>,
    nodes: Vec<LayerNode<K>>,
}

#[derive(Debug, Clone)]
struct LayerNode<const K: usize> {
    start: u32,
    end: u32,
    left: u32,
    right: u32,
    sub: Option<Box<Layer<K>>>,
}

impl<const K: usize> Layer<K> {
    fn new(mut items: Vec<Item<K>>, axis: usize) -> Self {
        sort_on_axis(&mut items, axis);
        let mut layer = Layer {
            axis,
            items,
            nodes: Vec::new(),
        };
        if axis + 1 < K && !layer.items.is_empty() {
            layer.build_node(0, layer.items.len());
        }
        layer
    }

    fn build_node(&mut self, start: usize, end: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(LayerNode {
            start: start as u32,
            end: end as u32,
            left: NO_CHILD,
            right: NO_CHILD,
            sub: None,
        });
        if end - start > RANGE_TREE_LEAF {
            let sub = Layer::new(self.items[start..end].to_vec(), self.axis + 1);
            let mid = (start + end) / 2;
            let left = self.build_node(start, mid);
            let right = self.build_node(mid, end);
            let node = &mut self.nodes[id as usize];
            node.sub = Some(Box::new(sub));
            node.left = left;
            node.right = right;
        }
        id
    }

    fn report(&self, lo: &[i64; K], hi: &[i64; K], out: &mut Vec<u32>, c: &mut Counters) {
        if self.items.is_empty() {
            return;
        }
        if self.axis + 1 == K {
            c.nodes_visited += 1;
            let a = self.axis;
            let from = self.items.partition_point(|it| it.0[a] < lo[a]);
            let to = self.items.partition_point(|it| it.0[a] <= hi[a]);
            if from < to {
                c.candidates_examined += (to - from) as u64;
                out.extend(self.items[from..to].iter().map(|it| it.1));
            }
            return;
        }
        self.report_node(0, lo, hi, out, c);
    }

    fn report_node(&self, id: u32, lo: &[i64; K], hi: &[i64; K], out: &mut Vec<u32>, c: &mut Counters) {
        c.nodes_visited += 1;
        let node = &self.nodes[id as usize];
        let slice = &self.items[node.start as usize..node.end as usize];
        let a = self.axis;
        let (first, last) = (slice[0].0[a], slice[slice.len() - 1].0[a]);
        if last < lo[a] || first > hi[a] {
            return;
        }
        match &node.sub {
            Some(sub) if lo[a] <= first && last <= hi[a] => sub.report(lo, hi, out, c),
            Some(_) => {
                self.report_node(node.left, lo, hi, out, c);
                self.report_node(node.right, lo, hi, out, c);
            }
            None => {
                c.candidates_examined += slice.len() as u64;
                out.extend(slice.iter().filter(|(p, _)| inside(p, lo, hi)).map(|&(_, id)| id));
            }
        }
    }
}

impl<const K: usize> RangeReporter<K> for RangeTree<K> {
    fn build(items: Vec<Item<K>>) -> Self {
        let len = items.len();
        let root = (K > 0 && len > 0).then(|| Layer::new(items, 0));
        RangeTree { root, len }
    }

    fn len(&self) -> usize {
        self.len
    }

    fn report(&self, lo: &[i64; K], hi: &[i64; K], out: &mut Vec<u32>, counters: &mut Counters) {
        if let Some(root) = &self.root {
            root.report(lo, hi, out, counters);
        }
    }
}

const KD_LEAF: usize = 8;

/// Static k-d tree with per-node bounding boxes; `O(n)` space.
#[derive(Debug, Clone)]
pub struct KdTree<const K: usize> {
    items: Vec<Item<K>>,
    nodes: Vec<KdNode<K>>,
}

#[derive(Debug, Clone)]
struct KdNode<const K: usize> {
    start: u32,
    end: u32,
    left: u32,
    right: u32,
    lo: [i64; K],
    hi: [i64; K],
}

impl<const K: usize> KdTree<K> {
    fn build_node(&mut self, start: usize, end: usize, depth: usize) -> u32 {
        let slice = &self.items[start..end];
        let mut lo = [i64::MAX; K];
        let mut hi = [i64::MIN; K];
        for (p, _) in slice {
            for i in 0..K {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(KdNode {
            start: start as u32,
            end: end as u32,
            left: NO_CHILD,
            right: NO_CHILD,
            lo,
            hi,
        });
        if end - start > KD_LEAF {
            let axis = depth % K;
            let mid = (start + end) / 2;
            self.items[start..end].select_nth_unstable_by(mid - start, |a, b| {
                a.0[axis].cmp(&b.0[axis]).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1))
            });
            let left = self.build_node(start, mid, depth + 1);
            let right = self.build_node(mid, end, depth + 1);
            self.nodes[id as usize].left = left;
            self.nodes[id as usize].right = right;
        }
        id
    }

    fn report_node(&self, id: u32, lo: &[i64; K], hi: &[i64; K], out: &mut Vec<u32>, c: &mut Counters) {
        c.nodes_visited += 1;
        let node = &self.nodes[id as usize];
        if (0..K).any(|i| node.hi[i] < lo[i] || node.lo[i] > hi[i]) {
            return;
        }
        let slice = &self.items[node.start as usize..node.end as usize];
        if (0..K).all(|i| lo[i] <= node.lo[i] && node.hi[i] <= hi[i]) {
            c.candidates_examined += slice.len() as u64;
            out.extend(slice.iter().map(|it| it.1));
        } else if node.left == NO_CHILD {
            c.candidates_examined += slice.len() as u64;
            out.extend(slice.iter().filter(|(p, _)| inside(p, lo, hi)).map(|&(_, id)| id));
        } else {
            self.report_node(node.left, lo, hi, out, c);
            self.report_node(node.right, lo, hi, out, c);
        }
    }
}

impl<const K: usize> RangeReporter<K> for KdTree<K> {
    fn build(items: Vec<Item<K>>) -> Self {
        let mut tree = KdTree {
            items,
            nodes: Vec::new(),
        };
        if K > 0 && !tree.items.is_empty() {
            tree.build_node(0, tree.items.len(), 0);
        }
        tree
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn report(&self, lo: &[i64; K], hi: &[i64; K], out: &mut Vec<u32>, counters: &mut Counters) {
        if !self.nodes.is_empty() {
            self.report_node(0, lo, hi, out, counters);
        }
    }
}
