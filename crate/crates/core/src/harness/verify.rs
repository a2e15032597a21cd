//! Oracle comparison plus structural bound checks.

use std::fmt;

use super::dataset::{Dataset, Records};
use crate::error::{Error, Result};
use crate::geometry::{decompose_fat_rect2, AspectBound, Box3, Point3, Rect2};
use crate::oracle::{brute_range2, brute_range3, brute_spanning, brute_stab3, OracleConfig};
use crate::quadtree::{default_stride, C_DEC};
use crate::range2d::Range2DIndex;
use crate::range3d::GridIndex3;
use crate::stabbing::OctreeStabIndex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    /// Rectangles per marked node assumed by the spanning bound `2 * c_dec`.
    pub c_dec: usize,
    /// Marking stride; `None` means `floor(log2 n)`.
    pub d: Option<usize>,
    pub b: u32,
    pub alpha: AspectBound,
    pub oracle: OracleConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            c_dec: C_DEC,
            d: None,
            b: 2,
            alpha: AspectBound::integer(2).unwrap(),
            oracle: OracleConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Output differs from the oracle.
    Mismatch,
    /// A structural or cost bound was exceeded.
    Bound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub query: Option<usize>,
    /// Offending structure, e.g. `rect 12` or `node 3`.
    pub structure: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ViolationKind::Mismatch => "mismatch",
            ViolationKind::Bound => "bound",
        };
        match self.query {
            Some(q) => write!(f, "{kind}: query {q}, {}: {}", self.structure, self.message),
            None => write!(f, "{kind}: {}: {}", self.structure, self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub queries: usize,
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mismatches(&self) -> usize {
        self.violations.iter().filter(|v| v.kind == ViolationKind::Mismatch).count()
    }

    pub fn breaches(&self) -> usize {
        self.violations.iter().filter(|v| v.kind == ViolationKind::Bound).count()
    }

    fn push(&mut self, kind: ViolationKind, query: Option<usize>, structure: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            kind,
            query,
            structure: structure.into(),
            message: message.into(),
        });
    }
}

/// Builds the structure matching `data` and checks it on `queries`:
/// rectangles for points2, boxes for points3, points for boxes3.
pub fn verify(data: &Dataset, queries: &Dataset, cfg: &VerifyConfig) -> Result<Report> {
    cfg.oracle.check_n(data.len())?;
    match (&data.records, &queries.records) {
        (Records::Points2(pts), Records::Rects2(qs)) => {
            let d = cfg.d.unwrap_or_else(|| default_stride(pts.len()));
            let idx = Range2DIndex::build(pts, data.universe, d)?;
            verify_range2(&idx, qs, cfg)
        }
        (Records::Points3(pts), Records::Boxes3(qs)) => {
            let idx = GridIndex3::build(pts, data.universe, cfg.b)?;
            verify_range3(&idx, qs, cfg)
        }
        (Records::Boxes3(boxes), Records::Points3(qs)) => {
            let idx = OctreeStabIndex::build(boxes, data.universe, cfg.alpha);
            if let Some((i, why)) = idx.rejected().first() {
                return Err(Error::InvalidParameter(format!("box {i} cannot be indexed: {why}")));
            }
            Ok(verify_stab(&idx, qs))
        }
        _ => Err(Error::InvalidParameter(format!(
            "cannot query a {} dataset with {} records",
            data.kind(),
            queries.kind()
        ))),
    }
}

pub fn verify_range2(idx: &Range2DIndex, queries: &[Rect2], cfg: &VerifyConfig) -> Result<Report> {
    cfg.oracle.check_n(idx.len())?;
    let mut report = Report {
        queries: queries.len(),
        ..Report::default()
    };
    let sub = idx.subdivision();
    let d = sub.stride();
    let n = idx.len();
    for (i, r) in sub.rects().iter().enumerate() {
        if r.len() > 6 * d {
            report.push(ViolationKind::Bound, None, format!("rect {i}"), format!("{} points > 6d = {}", r.len(), 6 * d));
        }
    }
    let budget = 2 * n.div_ceil(d);
    if idx.marking().marked_count() > budget {
        report.push(
            ViolationKind::Bound,
            None,
            "marking",
            format!("{} marked nodes > 2*ceil(n/d) = {budget}", idx.marking().marked_count()),
        );
    }
    for m in sub.marked() {
        if m.rects.len() > cfg.c_dec {
            report.push(
                ViolationKind::Bound,
                None,
                format!("node {}", m.node),
                format!("{} rectangles > C_dec = {}", m.rects.len(), cfg.c_dec),
            );
        }
    }
    let pts = idx.points();
    for (qi, q) in queries.iter().enumerate() {
        let out = if q.is_square() {
            idx.query_square(q)
        } else {
            idx.query_fat_rect(q, cfg.alpha)
        }?;
        let expect = brute_range2(pts, q);
        if out != expect {
            report.push(
                ViolationKind::Mismatch,
                Some(qi),
                "range2d",
                format!("reported {} points, oracle {}", out.len(), expect.len()),
            );
        }
        for s in decompose_fat_rect2(q, cfg.alpha)? {
            let (_, trace) = idx.query_square_traced(&s)?;
            if trace.corner_rects.len() > 4 {
                report.push(
                    ViolationKind::Bound,
                    Some(qi),
                    format!("rects {:?}", trace.corner_rects),
                    format!("{} corner rectangles > 4", trace.corner_rects.len()),
                );
            }
            let spanning = s.clip(idx.universe()).map(|c| brute_spanning(sub, &c)).unwrap_or_default();
            if spanning.len() > 2 * cfg.c_dec {
                report.push(
                    ViolationKind::Bound,
                    Some(qi),
                    format!("rects {spanning:?}"),
                    format!("{} spanning rectangles > 2*C_dec = {}", spanning.len(), 2 * cfg.c_dec),
                );
            }
            for &(touched, reported) in &trace.walks {
                if touched > reported + 2 {
                    report.push(
                        ViolationKind::Bound,
                        Some(qi),
                        "internal walk",
                        format!("touched {touched} for {reported} reported"),
                    );
                }
            }
        }
    }
    Ok(report)
}

pub fn verify_range3(idx: &GridIndex3, queries: &[Box3], cfg: &VerifyConfig) -> Result<Report> {
    cfg.oracle.check_n(idx.len())?;
    let mut report = Report {
        queries: queries.len(),
        ..Report::default()
    };
    let depth = u64::from(idx.max_depth());
    let refs_cap = idx.len() * (1 + 4 * depth as usize);
    if idx.point_refs() > refs_cap {
        report.push(
            ViolationKind::Bound,
            None,
            "grid",
            format!("{} point references > n(1 + 4 depth) = {refs_cap}", idx.point_refs()),
        );
    }
    let pts = idx.points();
    for (qi, q) in queries.iter().enumerate() {
        let (out, trace) = if q.is_cube() {
            idx.query_cube_traced(q)?
        } else {
            idx.query_fat_box_traced(q, cfg.alpha)?
        };
        let expect = brute_range3(pts, q);
        if out != expect {
            report.push(
                ViolationKind::Mismatch,
                Some(qi),
                "range3d",
                format!("reported {} points, oracle {}", out.len(), expect.len()),
            );
        }
        if q.is_cube() {
            if trace.slab_probes > 6 * depth {
                report.push(
                    ViolationKind::Bound,
                    Some(qi),
                    "slab reporters",
                    format!("{} probes > 6*max_depth = {}", trace.slab_probes, 6 * depth),
                );
            }
            if trace.label_descents > depth {
                report.push(
                    ViolationKind::Bound,
                    Some(qi),
                    "label structure",
                    format!("{} descents > max_depth = {depth}", trace.label_descents),
                );
            }
        }
    }
    Ok(report)
}

pub fn verify_stab(idx: &OctreeStabIndex, probes: &[Point3]) -> Report {
    let mut report = Report {
        queries: probes.len(),
        ..Report::default()
    };
    let rejected: Vec<usize> = idx.rejected().iter().map(|r| r.0).collect();
    let levels = u64::from(idx.universe().log()) + 1;
    for (qi, &q) in probes.iter().enumerate() {
        let (out, trace) = idx.query_traced(q);
        let mut expect = brute_stab3(idx.boxes(), q);
        expect.retain(|i| !rejected.contains(&(*i as usize)));
        if out != expect {
            report.push(
                ViolationKind::Mismatch,
                Some(qi),
                "stabbing",
                format!("reported {} boxes, oracle {}", out.len(), expect.len()),
            );
        }
        if trace.visited > levels || trace.probes > 8 * levels {
            report.push(
                ViolationKind::Bound,
                Some(qi),
                "octree path",
                format!("{} nodes, {} dominance probes for log U + 1 = {levels}", trace.visited, trace.probes),
            );
        }
    }
    report
}
