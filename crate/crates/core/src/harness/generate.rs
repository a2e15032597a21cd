//! Seeded synthetic datasets and query workloads.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dataset::{Dataset, Kind, Records};
use crate::error::{Error, Result};
use crate::geometry::{AspectBound, Box3, Point2, Point3, Rect2, Universe};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    Uniform,
    /// Points scattered uniformly within `spread` of one of `centers` random centres.
    Clustered { centers: usize, spread: i64 },
}

/// Describes a dataset or query file.
///
/// Points are distinct. Boxes and rectangles have their shortest extent
/// drawn from `1..=max_side` and their other extents within `alpha` times
/// that; `alpha = 1` gives squares and cubes. For `points3` used as
/// stabbing probes the same generator applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetSpec {
    pub kind: Kind,
    pub n: usize,
    pub universe: Universe,
    pub distribution: Distribution,
    pub seed: u64,
    pub alpha: AspectBound,
    /// Largest shortest-extent for boxes and rectangles; `None` means `U / 4`.
    pub max_side: Option<i64>,
}

impl DatasetSpec {
    pub fn new(kind: Kind, n: usize, universe: Universe, seed: u64) -> Self {
        DatasetSpec {
            kind,
            n,
            universe,
            distribution: Distribution::Uniform,
            seed,
            alpha: AspectBound::SQUARE,
            max_side: None,
        }
    }

    pub fn alpha(mut self, alpha: AspectBound) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn distribution(mut self, d: Distribution) -> Self {
        self.distribution = d;
        self
    }

    pub fn max_side(mut self, s: i64) -> Self {
        self.max_side = Some(s);
        self
    }
}

pub fn generate(spec: &DatasetSpec) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let u = spec.universe;
    let records = match spec.kind {
        Kind::Points2 => {
            let capacity = (u.side() as u128).pow(2);
            check_capacity(spec.n, capacity)?;
            let mut centres = Centres::new(&mut rng, spec.distribution, u, 2);
            let pts = distinct(spec.n, |rng| centres.draw(rng), &mut rng)?;
            Records::Points2(pts.into_iter().map(|v: [i64; 2]| Point2::new(v[0], v[1])).collect())
        }
        Kind::Points3 => {
            let capacity = (u.side() as u128).pow(3);
            check_capacity(spec.n, capacity)?;
            let mut centres = Centres::new(&mut rng, spec.distribution, u, 3);
            let pts = distinct(spec.n, |rng| centres.draw(rng), &mut rng)?;
            Records::Points3(pts.into_iter().map(|v: [i64; 3]| Point3::new(v[0], v[1], v[2])).collect())
        }
        Kind::Boxes3 => {
            let mut centres = Centres::new(&mut rng, spec.distribution, u, 3);
            let boxes = (0..spec.n)
                .map(|_| {
                    let (lo, hi) = fat_extents::<3>(&mut rng, spec, &mut centres);
                    Box3 { lo, hi }
                })
                .collect();
            Records::Boxes3(boxes)
        }
        Kind::Rects2 => {
            let mut centres = Centres::new(&mut rng, spec.distribution, u, 2);
            let rects = (0..spec.n)
                .map(|_| {
                    let (lo, hi) = fat_extents::<2>(&mut rng, spec, &mut centres);
                    Rect2 {
                        a: lo[0],
                        b: hi[0],
                        c: lo[1],
                        d: hi[1],
                    }
                })
                .collect();
            Records::Rects2(rects)
        }
    };
    Ok(Dataset { universe: u, records })
}

fn check_capacity(n: usize, capacity: u128) -> Result<()> {
    if n as u128 > capacity / 2 {
        return Err(Error::InvalidParameter(format!(
            "{n} distinct points requested but the universe has only {capacity} cells"
        )));
    }
    Ok(())
}

fn distinct<const K: usize>(
    n: usize,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> [i64; K],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<[i64; K]>> {
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while out.len() < n {
        attempts += 1;
        if attempts > 64 * n + 1024 {
            return Err(Error::InvalidParameter(
                "could not draw enough distinct points; widen the clusters".into(),
            ));
        }
        let p = draw(rng);
        if seen.insert(p) {
            out.push(p);
        }
    }
    Ok(out)
}

struct Centres {
    side: i64,
    centres: Vec<Vec<i64>>,
    spread: i64,
}

impl Centres {
    fn new(rng: &mut ChaCha8Rng, dist: Distribution, u: Universe, dim: usize) -> Self {
        let side = u.side();
        match dist {
            Distribution::Uniform => Centres {
                side,
                centres: Vec::new(),
                spread: 0,
            },
            Distribution::Clustered { centers, spread } => Centres {
                side,
                centres: (0..centers.max(1))
                    .map(|_| (0..dim).map(|_| rng.random_range(0..side)).collect())
                    .collect(),
                spread: spread.max(0),
            },
        }
    }

    fn draw<const K: usize>(&mut self, rng: &mut ChaCha8Rng) -> [i64; K] {
        if self.centres.is_empty() {
            return std::array::from_fn(|_| rng.random_range(0..self.side));
        }
        let c = &self.centres[rng.random_range(0..self.centres.len())];
        std::array::from_fn(|a| (c[a] + rng.random_range(-self.spread..=self.spread)).clamp(0, self.side - 1))
    }
}

fn fat_extents<const K: usize>(rng: &mut ChaCha8Rng, spec: &DatasetSpec, centres: &mut Centres) -> ([i64; K], [i64; K]) {
    let side = spec.universe.side();
    let max_side = spec.max_side.unwrap_or(side / 4).clamp(1, side);
    let s = rng.random_range(1..=max_side);
    let longest = spec.alpha.longest_for(s).min(side);
    let mut ext: [i64; K] = std::array::from_fn(|_| rng.random_range(s..=longest));
    ext[rng.random_range(0..K)] = s;
    let anchor: [i64; K] = centres.draw(rng);
    let lo: [i64; K] = std::array::from_fn(|a| (anchor[a] - ext[a] / 2).clamp(0, side - ext[a]));
    let hi = std::array::from_fn(|a| lo[a] + ext[a] - 1);
    (lo, hi)
}
