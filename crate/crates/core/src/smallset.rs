//! Range reporting on sets of `O(log n)` points.
//!
//! A set is first mapped to rank space. Sets of at most [`MICRO_CAP`] points
//! are answered from a process-wide lookup table keyed by the set's rank-space
//! permutation. Larger sets are cut into columns and rows of at most
//! [`MICRO_CAP`] points each: a query reports its two boundary columns and two
//! boundary rows from the table, and every occupied interior cell (the top
//! set) is dumped whole. Interior cells are found with per-column and
//! per-row-span occupancy bitmasks, so each word operation yields output.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock, RwLock};

use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::geometry::{Point2, Rect2};

/// Largest set answered directly from the lookup table.
pub const MICRO_CAP: usize = 8;

/// Largest set a [`SmallSetIndex`] accepts; keeps the grid within 64 x 64.
pub const MAX_SMALL_SET: usize = 512;

/// Every query examines at most `WORK_BETA * (k + 1)` candidates, counting
/// emitted points, table probes and visited top-set cells.
pub const WORK_BETA: u64 = 4;

/// Order-preserving map from coordinates to ranks `0..m` on both axes.
/// Ties on x are broken by y and then input position; ties on y by x.
#[derive(Debug, Clone)]
pub struct RankSpaceMap {
    xs: Vec<i64>,
    ys: Vec<i64>,
    x_to_y: Vec<u16>,
    y_to_x: Vec<u16>,
}

impl RankSpaceMap {
    /// Returns the map and, for each x-rank, the input position holding it.
    pub fn new(points: &[Point2]) -> (Self, Vec<usize>) {
        let m = points.len();
        let mut by_x: Vec<usize> = (0..m).collect();
        by_x.sort_by_key(|&i| (points[i].x, points[i].y, i));
        let mut by_y: Vec<usize> = (0..m).collect();
        by_y.sort_by_key(|&i| (points[i].y, points[i].x, i));
        let mut x_rank = vec![0u16; m];
        for (r, &i) in by_x.iter().enumerate() {
            x_rank[i] = r as u16;
        }
        let mut y_to_x = vec![0u16; m];
        let mut x_to_y = vec![0u16; m];
        for (r, &i) in by_y.iter().enumerate() {
            y_to_x[r] = x_rank[i];
            x_to_y[x_rank[i] as usize] = r as u16;
        }
        let map = RankSpaceMap {
            xs: by_x.iter().map(|&i| points[i].x).collect(),
            ys: by_y.iter().map(|&i| points[i].y).collect(),
            x_to_y,
            y_to_x,
        };
        (map, by_x)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Inclusive x-rank range of the closed coordinate range `[a, b]`.
    pub fn x_range(&self, a: i64, b: i64) -> Option<(usize, usize)> {
        rank_range(&self.xs, a, b)
    }

    pub fn y_range(&self, c: i64, d: i64) -> Option<(usize, usize)> {
        rank_range(&self.ys, c, d)
    }

    pub fn y_rank_of(&self, x_rank: usize) -> usize {
        self.x_to_y[x_rank] as usize
    }

    pub fn x_rank_of(&self, y_rank: usize) -> usize {
        self.y_to_x[y_rank] as usize
    }
}

fn rank_range(sorted: &[i64], lo: i64, hi: i64) -> Option<(usize, usize)> {
    let from = sorted.partition_point(|&v| v < lo);
    let to = sorted.partition_point(|&v| v <= hi);
    (from < to).then(|| (from, to - 1))
}

/// Process-wide memo of answers for rank-space sets of at most
/// [`MICRO_CAP`] points. Entries are filled on first use.
pub struct MicroTable;

type Memo = RwLock<HashMap<u64, Arc<[u8]>>>;

static MEMO: OnceLock<Memo> = OnceLock::new();
static BUDGET: AtomicUsize = AtomicUsize::new(1 << 22);
static FILLS: AtomicU64 = AtomicU64::new(0);

impl MicroTable {
    /// Packs a permutation (`perm[local x] = local y`) into 28 bits.
    pub fn encode(perm: &[u8]) -> u32 {
        assert!(perm.len() <= MICRO_CAP);
        perm.iter()
            .enumerate()
            .fold(perm.len() as u32, |code, (i, &y)| code | (y as u32) << (4 + 3 * i))
    }

    pub fn decode(code: u32) -> Vec<u8> {
        let len = (code & 0xf) as usize;
        (0..len).map(|i| ((code >> (4 + 3 * i)) & 7) as u8).collect()
    }

    fn key(code: u32, q: [u8; 4]) -> u64 {
        (code as u64) << 12
            | q[0] as u64
            | (q[1] as u64) << 3
            | (q[2] as u64) << 6
            | (q[3] as u64) << 9
    }

    /// Local x-ranks inside the rank rectangle `[q0, q1] x [q2, q3]`,
    /// computed without touching the memo.
    pub fn compute(code: u32, q: [u8; 4]) -> Vec<u8> {
        let perm = Self::decode(code);
        (q[0]..=q[1])
            .filter(|&x| (x as usize) < perm.len())
            .filter(|&x| (q[2]..=q[3]).contains(&perm[x as usize]))
            .collect()
    }

    pub fn lookup(code: u32, q: [u8; 4]) -> Arc<[u8]> {
        let memo = MEMO.get_or_init(Default::default);
        let key = Self::key(code, q);
        if let Some(hit) = memo.read().unwrap().get(&key) {
            return hit.clone();
        }
        let answer: Arc<[u8]> = Self::compute(code, q).into();
        FILLS.fetch_add(1, Ordering::Relaxed);
        let mut guard = memo.write().unwrap();
        if guard.len() < BUDGET.load(Ordering::Relaxed) {
            guard.entry(key).or_insert_with(|| answer.clone());
        }
        answer
    }

    pub fn len() -> usize {
        MEMO.get().map_or(0, |m| m.read().unwrap().len())
    }

    /// Number of memo misses since process start.
    pub fn fills() -> u64 {
        FILLS.load(Ordering::Relaxed)
    }

    pub fn budget() -> usize {
        BUDGET.load(Ordering::Relaxed)
    }

    /// Caps the memo size; lookups beyond the budget are computed on the fly.
    pub fn set_budget(entries: usize) {
        BUDGET.store(entries, Ordering::Relaxed);
    }
}

/// A column or row of a small set, answered through the [`MicroTable`].
#[derive(Debug, Clone)]
struct MicroSet {
    code: u32,
    /// Global x-ranks in increasing order; position = local x-rank.
    x_ranks: Vec<u16>,
    y_ranks: Vec<u16>,
}

impl MicroSet {
    /// `pts` holds (x-rank, y-rank) pairs in rank space of the parent set.
    fn new(mut pts: Vec<(u16, u16)>) -> Self {
        debug_assert!(pts.len() <= MICRO_CAP);
        pts.sort_unstable();
        let x_ranks: Vec<u16> = pts.iter().map(|p| p.0).collect();
        let mut y_ranks: Vec<u16> = pts.iter().map(|p| p.1).collect();
        y_ranks.sort_unstable();
        let perm: Vec<u8> = pts
            .iter()
            .map(|p| y_ranks.binary_search(&p.1).unwrap() as u8)
            .collect();
        MicroSet {
            code: MicroTable::encode(&perm),
            x_ranks,
            y_ranks,
        }
    }

    fn len(&self) -> usize {
        self.x_ranks.len()
    }

    /// Pushes the global x-ranks inside the global rank rectangle.
    fn query(&self, x: (usize, usize), y: (usize, usize), out: &mut Vec<u16>, c: &mut Counters) {
        let local = |sorted: &[u16], (lo, hi): (usize, usize)| {
            let from = sorted.partition_point(|&v| (v as usize) < lo);
            let to = sorted.partition_point(|&v| (v as usize) <= hi);
            (from < to).then(|| (from as u8, (to - 1) as u8))
        };
        let (Some((x1, x2)), Some((y1, y2))) = (local(&self.x_ranks, x), local(&self.y_ranks, y)) else {
            return;
        };
        c.structures_probed += 1;
        c.candidates_examined += 1;
        let answer = MicroTable::lookup(self.code, [x1, x2, y1, y2]);
        c.candidates_examined += answer.len() as u64;
        out.extend(answer.iter().map(|&lx| self.x_ranks[lx as usize]));
    }
}

/// Range reporting structure for one small point set.
#[derive(Debug, Clone)]
pub struct SmallSetIndex {
    ids: Vec<u32>,
    rank: RankSpaceMap,
    block: usize,
    ncols: usize,
    columns: Vec<MicroSet>,
    rows: Vec<MicroSet>,
    /// `cell_start[i * ncols + j]..cell_start[i * ncols + j + 1]` indexes
    /// `cell_items`, the x-ranks in column i and row j.
    cell_start: Vec<u32>,
    cell_items: Vec<u16>,
    col_rows: Vec<u64>,
    /// Entry `l * ncols + t` (l <= t): columns occupied by rows `l..=t`.
    row_span_cols: Vec<u64>,
    top_len: usize,
}

impl SmallSetIndex {
    /// Builds the index; `ids[i]` is reported for `points[i]`.
    pub fn build(points: &[Point2], ids: &[u32], cap: usize) -> Result<Self> {
        assert_eq!(points.len(), ids.len());
        let m = points.len();
        let cap = cap.min(MAX_SMALL_SET);
        if m > cap {
            return Err(Error::Capacity { len: m, cap });
        }
        let (rank, by_x) = RankSpaceMap::new(points);
        let ids: Vec<u32> = by_x.iter().map(|&i| ids[i]).collect();
        let block = block_size(m);
        let ncols = m.div_ceil(block);

        let columns = (0..ncols)
            .map(|i| {
                let xs = i * block..((i + 1) * block).min(m);
                MicroSet::new(xs.map(|x| (x as u16, rank.y_rank_of(x) as u16)).collect())
            })
            .collect();
        let rows = (0..ncols)
            .map(|j| {
                let ys = j * block..((j + 1) * block).min(m);
                MicroSet::new(ys.map(|y| (rank.x_rank_of(y) as u16, y as u16)).collect())
            })
            .collect();

        let mut buckets = vec![Vec::new(); ncols * ncols];
        let mut col_rows = vec![0u64; ncols];
        let mut row_cols = vec![0u64; ncols];
        for x in 0..m {
            let (i, j) = (x / block, rank.y_rank_of(x) / block);
            buckets[i * ncols + j].push(x as u16);
            col_rows[i] |= 1 << j;
            row_cols[j] |= 1 << i;
        }
        let top_len = buckets.iter().filter(|b| !b.is_empty()).count();
        let mut cell_start = Vec::with_capacity(buckets.len() + 1);
        let mut cell_items = Vec::with_capacity(m);
        for b in buckets {
            cell_start.push(cell_items.len() as u32);
            cell_items.extend(b);
        }
        cell_start.push(cell_items.len() as u32);

        let mut row_span_cols = vec![0u64; ncols * ncols];
        for l in 0..ncols {
            let mut acc = 0;
            for t in l..ncols {
                acc |= row_cols[t];
                row_span_cols[l * ncols + t] = acc;
            }
        }

        Ok(SmallSetIndex {
            ids,
            rank,
            block,
            ncols,
            columns,
            rows,
            cell_start,
            cell_items,
            col_rows,
            row_span_cols,
            top_len,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn rank_space(&self) -> &RankSpaceMap {
        &self.rank
    }

    /// Points per column/row (the last one may be shorter).
    pub fn block_size(&self) -> usize {
        self.block
    }

    pub fn column_count(&self) -> usize {
        self.ncols
    }

    pub fn row_count(&self) -> usize {
        self.ncols
    }

    pub fn column_sizes(&self) -> Vec<usize> {
        self.columns.iter().map(MicroSet::len).collect()
    }

    pub fn row_sizes(&self) -> Vec<usize> {
        self.rows.iter().map(MicroSet::len).collect()
    }

    /// Number of occupied (column, row) cells.
    pub fn top_set_len(&self) -> usize {
        self.top_len
    }

    /// Ids stored in cell `(column, row)`.
    pub fn cell_ids(&self, column: usize, row: usize) -> Vec<u32> {
        let k = column * self.ncols + row;
        let (s, e) = (self.cell_start[k] as usize, self.cell_start[k + 1] as usize);
        self.cell_items[s..e].iter().map(|&x| self.ids[x as usize]).collect()
    }

    /// Reports the ids of all points inside the closed rectangle `q`.
    pub fn query(&self, q: &Rect2, out: &mut Vec<u32>, c: &mut Counters) {
        let (Some(x), Some(y)) = (self.rank.x_range(q.a, q.b), self.rank.y_range(q.c, q.d)) else {
            return;
        };
        self.query_ranks(x, y, out, c);
    }

    /// Reports the ids whose x-rank lies in `x` and y-rank in `y` (inclusive).
    pub fn query_ranks(&self, x: (usize, usize), y: (usize, usize), out: &mut Vec<u32>, c: &mut Counters) {
        let m = self.ids.len();
        if x.0 > x.1 || y.0 > y.1 || x.0 >= m || y.0 >= m {
            return;
        }
        let x = (x.0, x.1.min(m - 1));
        let y = (y.0, y.1.min(m - 1));
        let s = self.block;
        let (f, r, l, t) = (x.0 / s, x.1 / s, y.0 / s, y.1 / s);
        let mut ranks: Vec<u16> = Vec::new();
        if f == r {
            self.columns[f].query(x, y, &mut ranks, c);
        } else if l == t {
            self.rows[l].query(x, y, &mut ranks, c);
        } else {
            self.columns[f].query(x, y, &mut ranks, c);
            self.columns[r].query(x, y, &mut ranks, c);
            if r - f >= 2 {
                let inner = ((f + 1) * s, r * s - 1);
                self.rows[l].query(inner, y, &mut ranks, c);
                self.rows[t].query(inner, y, &mut ranks, c);
                if t - l >= 2 {
                    self.dump_interior(f, r, l, t, &mut ranks, c);
                }
            }
        }
        c.reported_k += ranks.len() as u64;
        c.raw_multiplicity += ranks.len() as u64;
        out.extend(ranks.into_iter().map(|x| self.ids[x as usize]));
    }

    /// Dumps every occupied cell strictly inside columns `(f, r)` and rows `(l, t)`.
    fn dump_interior(&self, f: usize, r: usize, l: usize, t: usize, out: &mut Vec<u16>, c: &mut Counters) {
        let span = |lo: usize, hi: usize| -> u64 {
            let width = hi - lo + 1;
            let ones = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
            ones << lo
        };
        c.structures_probed += 1;
        let mut cols = self.row_span_cols[(l + 1) * self.ncols + (t - 1)] & span(f + 1, r - 1);
        let row_mask = span(l + 1, t - 1);
        while cols != 0 {
            let i = cols.trailing_zeros() as usize;
            cols &= cols - 1;
            c.candidates_examined += 1;
            let mut rows = self.col_rows[i] & row_mask;
            while rows != 0 {
                let j = rows.trailing_zeros() as usize;
                rows &= rows - 1;
                let k = i * self.ncols + j;
                let cell = &self.cell_items[self.cell_start[k] as usize..self.cell_start[k + 1] as usize];
                c.candidates_examined += 1 + cell.len() as u64;
                out.extend_from_slice(cell);
            }
        }
    }
}

/// Column/row size for a set of `m` points: the whole set when it fits the
/// lookup table, otherwise about `m / (4 log m)` capped at [`MICRO_CAP`].
fn block_size(m: usize) -> usize {
    if m <= MICRO_CAP {
        return m.max(1);
    }
    let target = (m as f64 / (4.0 * (m as f64).log2())).ceil() as usize;
    target.clamp(1, MICRO_CAP)
}
