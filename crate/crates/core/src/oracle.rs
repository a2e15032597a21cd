//! Brute-force reference answers.

use crate::error::{Error, Result};
use crate::geometry::{Box3, Point2, Point3, Rect2, Universe};
use crate::quadtree::Subdivision;
use crate::range2d::{classify_rectangle, RectClass};
use crate::stabbing::{relevant_by_definition, OctCell};

/// Size limits beyond which the oracles refuse to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_n: usize,
    /// Largest universe exponent for full-octree enumeration.
    pub max_octree_log: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_n: 100_000,
            max_octree_log: 8,
        }
    }
}

impl OracleConfig {
    pub fn check_n(&self, n: usize) -> Result<()> {
        if n > self.max_n {
            return Err(Error::OracleGuard(format!("{n} items exceed the scan limit {}", self.max_n)));
        }
        Ok(())
    }

    pub fn check_octree(&self, universe: Universe) -> Result<()> {
        if universe.log() > self.max_octree_log {
            return Err(Error::OracleGuard(format!(
                "octree enumeration limited to U <= 2^{}, got 2^{}",
                self.max_octree_log,
                universe.log()
            )));
        }
        Ok(())
    }
}

/// Ids of the points in the closed rectangle, ascending.
pub fn brute_range2(points: &[Point2], q: &Rect2) -> Vec<u32> {
    (0..points.len() as u32).filter(|&i| q.contains(points[i as usize])).collect()
}

/// Ids of the points in the closed box, ascending.
pub fn brute_range3(points: &[Point3], q: &Box3) -> Vec<u32> {
    (0..points.len() as u32).filter(|&i| q.contains(points[i as usize])).collect()
}

/// Ids of the closed boxes containing `q`, ascending.
pub fn brute_stab3(boxes: &[Box3], q: Point3) -> Vec<u32> {
    (0..boxes.len() as u32).filter(|&i| boxes[i as usize].contains(q)).collect()
}

/// Canonical rectangles crossing two opposite sides of `q` without holding
/// a corner of it.
pub fn brute_spanning(sub: &Subdivision, q: &Rect2) -> Vec<usize> {
    let corners = q.corners();
    sub.rects()
        .iter()
        .enumerate()
        .filter(|(_, r)| {
            let r = r.bounds.to_closed();
            let holds_corner = corners.iter().any(|&p| r.contains(p));
            let across_x = r.a <= q.a && q.b <= r.b && r.c <= q.d && q.c <= r.d;
            let across_y = r.c <= q.c && q.d <= r.d && r.a <= q.b && q.a <= r.b;
            !holds_corner && (across_x || across_y)
        })
        .map(|(i, _)| i)
        .collect()
}

/// Same as [`brute_spanning`] but through [`classify_rectangle`].
pub fn classify_all(sub: &Subdivision, q: &Rect2, class: RectClass) -> Vec<usize> {
    (0..sub.rects().len())
        .filter(|&i| classify_rectangle(&sub.rect(i).bounds.to_closed(), q) == class)
        .collect()
}

/// Octree nodes whose cell has a corner in `b` while no ancestor does,
/// found by searching the whole octree.
pub fn brute_relevant_nodes(b: &Box3, universe: Universe, cfg: &OracleConfig) -> Result<Vec<OctCell>> {
    cfg.check_octree(universe)?;
    Ok(relevant_by_definition(b, universe))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases() {
        let u = Universe::with_log(3).unwrap();
        assert!(brute_range2(&[], &u.square()).is_empty());
        let pts = [Point2::new(0, 0), Point2::new(7, 7), Point2::new(3, 4)];
        assert_eq!(brute_range2(&pts, &u.square()), vec![0, 1, 2]);
        assert_eq!(brute_range2(&pts, &Rect2::new(3, 5, 4, 6).unwrap()), vec![2]);

        let p3 = [Point3::new(1, 2, 3), Point3::new(7, 7, 7)];
        assert_eq!(brute_range3(&p3, &u.cube()), vec![0, 1]);
        assert_eq!(brute_range3(&p3, &Box3::cube([1, 2, 3], 1)), vec![0]);

        let boxes = [Box3::cube([0; 3], 8), Box3::cube([2; 3], 2), Box3::cube([5; 3], 2)];
        assert!(brute_stab3(&[], Point3::new(0, 0, 0)).is_empty());
        assert_eq!(brute_stab3(&boxes, Point3::new(3, 3, 3)), vec![0, 1]);
        assert_eq!(brute_stab3(&boxes, Point3::new(5, 5, 5)), vec![0, 2]);
    }

    #[test]
    fn guards_refuse_large_inputs() {
        let cfg = OracleConfig::default();
        assert!(cfg.check_n(100_001).is_err());
        let big = Universe::with_log(9).unwrap();
        assert!(brute_relevant_nodes(&big.cube(), big, &cfg).is_err());
    }

    #[test]
    fn universe_square_has_no_spanners() {
        let u = Universe::with_log(6).unwrap();
        let pts: Vec<Point2> = (0..40).map(|i| Point2::new((i * 37) % 64, (i * 11) % 64)).collect();
        let (_, _, sub) = Subdivision::build(&pts, u, 5).unwrap();
        assert!(brute_spanning(&sub, &u.square()).is_empty());
    }
}
