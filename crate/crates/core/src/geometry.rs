//! Integer points and boxes on a power-of-two universe, plus the split of
//! fat boxes into squares and cubes.
//!
//! Query ranges are closed: `[a, b]` contains both endpoints. Extents are
//! counted in grid columns, so `[3, 3]` has extent 1 and a degenerate
//! (zero-width) box behaves like a box of edge length 1.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Side length of the integer grid `[0, side)^k`, always a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Universe {
    side: i64,
    log: u32,
}

impl Universe {
    pub fn with_log(log: u32) -> Result<Self> {
        if log > 62 {
            return Err(Error::InvalidParameter(format!(
                "universe exponent {log} exceeds 62"
            )));
        }
        Ok(Universe {
            side: 1i64 << log,
            log,
        })
    }

    pub fn new(side: i64) -> Result<Self> {
        if side <= 0 || side.count_ones() != 1 {
            return Err(Error::InvalidParameter(format!(
                "universe side {side} is not a positive power of two"
            )));
        }
        Self::with_log(side.trailing_zeros())
    }

    /// Smallest power-of-two universe strictly larger than every coordinate.
    pub fn normalize<I>(coords: I) -> Result<Self>
    where
        I: IntoIterator<Item = i64>,
    {
        let mut max = None::<i64>;
        for v in coords {
            if v < 0 {
                return Err(Error::NegativeCoordinate { value: v });
            }
            max = Some(max.map_or(v, |m| m.max(v)));
        }
        let max = max.ok_or(Error::EmptyInput)?;
        let side = (max as u64 + 1).next_power_of_two();
        Self::new(side as i64)
    }

    #[inline]
    pub fn side(&self) -> i64 {
        self.side
    }

    #[inline]
    pub fn log(&self) -> u32 {
        self.log
    }

    #[inline]
    pub fn contains(&self, v: i64) -> bool {
        (0..self.side).contains(&v)
    }

    pub fn check(&self, v: i64) -> Result<()> {
        if v < 0 {
            Err(Error::NegativeCoordinate { value: v })
        } else if v >= self.side {
            Err(Error::OutOfUniverse {
                value: v,
                side: self.side,
            })
        } else {
            Ok(())
        }
    }

    pub fn square(&self) -> Rect2 {
        Rect2 {
            a: 0,
            b: self.side - 1,
            c: 0,
            d: self.side - 1,
        }
    }

    pub fn cube(&self) -> Box3 {
        Box3 {
            lo: [0; 3],
            hi: [self.side - 1; 3],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point2 {
    pub x: i64,
    pub y: i64,
}

impl Point2 {
    pub const fn new(x: i64, y: i64) -> Self {
        Point2 { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point3 {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl Point3 {
    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        Point3 { x, y, z }
    }

    #[inline]
    pub fn to_array(self) -> [i64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn from_array(a: [i64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }
}

/// Closed query rectangle `[a, b] x [c, d]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Rect2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a > b {
            return Err(Error::InvalidRange { lo: a, hi: b });
        }
        if c > d {
            return Err(Error::InvalidRange { lo: c, hi: d });
        }
        Ok(Rect2 { a, b, c, d })
    }

    /// Closed square with lower-left corner `(x, y)` and `side` grid columns.
    pub fn square(x: i64, y: i64, side: i64) -> Self {
        debug_assert!(side >= 1);
        Rect2 {
            a: x,
            b: x + side - 1,
            c: y,
            d: y + side - 1,
        }
    }

    #[inline]
    pub fn width(&self) -> i64 {
        self.b - self.a + 1
    }

    #[inline]
    pub fn height(&self) -> i64 {
        self.d - self.c + 1
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.width() == self.height()
    }

    #[inline]
    pub fn contains(&self, p: Point2) -> bool {
        self.a <= p.x && p.x <= self.b && self.c <= p.y && p.y <= self.d
    }

    pub fn intersects(&self, other: &Rect2) -> bool {
        self.a <= other.b && other.a <= self.b && self.c <= other.d && other.c <= self.d
    }

    pub fn intersection(&self, other: &Rect2) -> Option<Rect2> {
        let r = Rect2 {
            a: self.a.max(other.a),
            b: self.b.min(other.b),
            c: self.c.max(other.c),
            d: self.d.min(other.d),
        };
        (r.a <= r.b && r.c <= r.d).then_some(r)
    }

    /// Corners in the order lower-left, lower-right, upper-left, upper-right.
    pub fn corners(&self) -> [Point2; 4] {
        [
            Point2::new(self.a, self.c),
            Point2::new(self.b, self.c),
            Point2::new(self.a, self.d),
            Point2::new(self.b, self.d),
        ]
    }

    pub fn clip(&self, universe: Universe) -> Option<Rect2> {
        self.intersection(&universe.square())
    }
}

/// Closed box `[lo[0], hi[0]] x [lo[1], hi[1]] x [lo[2], hi[2]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Box3 {
    pub lo: [i64; 3],
    pub hi: [i64; 3],
}

impl Box3 {
    pub fn new(lo: [i64; 3], hi: [i64; 3]) -> Result<Self> {
        for axis in 0..3 {
            if lo[axis] > hi[axis] {
                return Err(Error::InvalidRange {
                    lo: lo[axis],
                    hi: hi[axis],
                });
            }
        }
        Ok(Box3 { lo, hi })
    }

    pub fn cube(lo: [i64; 3], side: i64) -> Self {
        debug_assert!(side >= 1);
        Box3 {
            lo,
            hi: [lo[0] + side - 1, lo[1] + side - 1, lo[2] + side - 1],
        }
    }

    #[inline]
    pub fn extent(&self, axis: usize) -> i64 {
        self.hi[axis] - self.lo[axis] + 1
    }

    pub fn extents(&self) -> [i64; 3] {
        [self.extent(0), self.extent(1), self.extent(2)]
    }

    pub fn is_cube(&self) -> bool {
        let e = self.extents();
        e[0] == e[1] && e[1] == e[2]
    }

    #[inline]
    pub fn contains(&self, p: Point3) -> bool {
        self.contains_coords(p.to_array())
    }

    #[inline]
    pub fn contains_coords(&self, p: [i64; 3]) -> bool {
        (0..3).all(|i| self.lo[i] <= p[i] && p[i] <= self.hi[i])
    }

    pub fn intersection(&self, other: &Box3) -> Option<Box3> {
        let mut out = *self;
        for i in 0..3 {
            out.lo[i] = self.lo[i].max(other.lo[i]);
            out.hi[i] = self.hi[i].min(other.hi[i]);
            if out.lo[i] > out.hi[i] {
                return None;
            }
        }
        Some(out)
    }

    pub fn clip(&self, universe: Universe) -> Option<Box3> {
        self.intersection(&universe.cube())
    }

    /// Number of integer points inside the box.
    pub fn volume(&self) -> i64 {
        self.extents().iter().product()
    }
}

/// Upper bound `num/den >= 1` on the ratio of longest to shortest edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AspectBound {
    num: u64,
    den: u64,
}

impl AspectBound {
    pub const SQUARE: AspectBound = AspectBound { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num < den {
            return Err(Error::InvalidParameter(format!(
                "aspect bound {num}/{den} must be a ratio >= 1"
            )));
        }
        let g = gcd(num, den);
        Ok(AspectBound {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(alpha: u64) -> Result<Self> {
        Self::new(alpha, 1)
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `ceil(alpha)`, the per-axis piece count used by the decompositions.
    pub fn ceil(&self) -> i64 {
        self.num.div_ceil(self.den) as i64
    }

    /// Longest extent allowed next to a shortest extent of `shortest`.
    pub fn longest_for(&self, shortest: i64) -> i64 {
        ((shortest as i128) * (self.num as i128) / (self.den as i128)) as i64
    }

    /// Whether a box with the given extents satisfies the bound.
    pub fn admits(&self, extents: &[i64]) -> bool {
        let (lo, hi) = min_max(extents);
        lo >= 1 && (hi as i128) * (self.den as i128) <= (lo as i128) * (self.num as i128)
    }

    fn check(&self, extents: &[i64]) -> Result<()> {
        if self.admits(extents) {
            return Ok(());
        }
        let (shortest, longest) = min_max(extents);
        Err(Error::FatnessViolation {
            longest,
            shortest,
            alpha: self.to_string(),
        })
    }
}

impl Default for AspectBound {
    fn default() -> Self {
        AspectBound::SQUARE
    }
}

impl fmt::Display for AspectBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for AspectBound {
    type Err = Error;

    /// Accepts `3`, `3/2` or `1.5`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse aspect bound {s:?}"));
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse().map_err(|_| bad())?;
            let d = d.trim().parse().map_err(|_| bad())?;
            return AspectBound::new(n, d);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let den = 10u64.pow(frac.len() as u32);
            let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
            let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
            return AspectBound::new(int * den + frac, den);
        }
        AspectBound::integer(s.parse().map_err(|_| bad())?)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn min_max(v: &[i64]) -> (i64, i64) {
    v.iter()
        .fold((i64::MAX, i64::MIN), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Start offsets of `side`-long pieces covering `[lo, lo + extent)`. Pieces
/// are laid end to end; the last one is pulled back to end exactly at the
/// far edge and may overlap its predecessor.
fn tile_starts(lo: i64, extent: i64, side: i64) -> Vec<i64> {
    let end = lo + extent;
    let mut starts = Vec::with_capacity((extent / side + 1) as usize);
    let mut t = lo;
    loop {
        if t + side >= end {
            starts.push(end - side);
            return starts;
        }
        starts.push(t);
        t += side;
    }
}

/// Covers a fat rectangle by at most `ceil(alpha)` squares whose side is the
/// rectangle's shorter extent. The union is exactly `q`.
pub fn decompose_fat_rect2(q: &Rect2, bound: AspectBound) -> Result<Vec<Rect2>> {
    let (w, h) = (q.width(), q.height());
    bound.check(&[w, h])?;
    let s = w.min(h);
    let squares = if w >= h {
        tile_starts(q.a, w, s)
            .into_iter()
            .map(|x| Rect2::square(x, q.c, s))
            .collect()
    } else {
        tile_starts(q.c, h, s)
            .into_iter()
            .map(|y| Rect2::square(q.a, y, s))
            .collect()
    };
    Ok(squares)
}

/// Covers a fat box by at most `ceil(alpha)^2` cubes of side equal to the
/// box's shortest extent. The union is exactly `q`.
pub fn decompose_fat_box3(q: &Box3, bound: AspectBound) -> Result<Vec<Box3>> {
    let ext = q.extents();
    bound.check(&ext)?;
    let s = *ext.iter().min().unwrap();
    let starts: Vec<Vec<i64>> = (0..3).map(|i| tile_starts(q.lo[i], ext[i], s)).collect();
    let mut cubes = Vec::with_capacity(starts.iter().map(Vec::len).product());
    for &x in &starts[0] {
        for &y in &starts[1] {
            for &z in &starts[2] {
                cubes.push(Box3::cube([x, y, z], s));
            }
        }
    }
    Ok(cubes)
}
