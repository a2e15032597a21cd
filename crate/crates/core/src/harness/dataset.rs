//! Line-based dataset files.
//!
//! ```text
//! fatrange-v1 <kind> <n> <U>
//! <record>
//! ...
//! ```
//!
//! Records are `x y` (points2), `x y z` (points3), `x1 x2 y1 y2 z1 z2`
//! (boxes3) or `x1 x2 y1 y2` (rects2). Ranges are closed and every value is
//! a base-10 integer in `[0, U)`.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Box3, Point2, Point3, Rect2, Universe};

pub const MAGIC: &str = "fatrange-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Points2,
    Points3,
    Boxes3,
    Rects2,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Points2 => "points2",
            Kind::Points3 => "points3",
            Kind::Boxes3 => "boxes3",
            Kind::Rects2 => "rects2",
        }
    }

    fn arity(self) -> usize {
        match self {
            Kind::Points2 => 2,
            Kind::Points3 => 3,
            Kind::Boxes3 => 6,
            Kind::Rects2 => 4,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "points2" => Ok(Kind::Points2),
            "points3" => Ok(Kind::Points3),
            "boxes3" => Ok(Kind::Boxes3),
            "rects2" => Ok(Kind::Rects2),
            _ => Err(Error::InvalidParameter(format!(
                "unknown kind {s:?} (expected points2, points3, boxes3 or rects2)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Records {
    Points2(Vec<Point2>),
    Points3(Vec<Point3>),
    Boxes3(Vec<Box3>),
    Rects2(Vec<Rect2>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub universe: Universe,
    pub records: Records,
}

impl Dataset {
    pub fn kind(&self) -> Kind {
        match self.records {
            Records::Points2(_) => Kind::Points2,
            Records::Points3(_) => Kind::Points3,
            Records::Boxes3(_) => Kind::Boxes3,
            Records::Rects2(_) => Kind::Rects2,
        }
    }

    pub fn len(&self) -> usize {
        match &self.records {
            Records::Points2(v) => v.len(),
            Records::Points3(v) => v.len(),
            Records::Boxes3(v) => v.len(),
            Records::Rects2(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{MAGIC} {} {} {}", self.kind(), self.len(), self.universe.side())?;
        match &self.records {
            Records::Points2(v) => v.iter().try_for_each(|p| writeln!(w, "{} {}", p.x, p.y)),
            Records::Points3(v) => v.iter().try_for_each(|p| writeln!(w, "{} {} {}", p.x, p.y, p.z)),
            Records::Boxes3(v) => v.iter().try_for_each(|b| {
                writeln!(w, "{} {} {} {} {} {}", b.lo[0], b.hi[0], b.lo[1], b.hi[1], b.lo[2], b.hi[2])
            }),
            Records::Rects2(v) => v.iter().try_for_each(|r| writeln!(w, "{} {} {} {}", r.a, r.b, r.c, r.d)),
        }?;
        w.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(BufReader::new(file))
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })??;
        let (kind, n, universe) = parse_header(&header)?;
        let mut values: Vec<Vec<i64>> = Vec::with_capacity(n.min(1 << 20));
        for (i, line) in lines.enumerate() {
            let line = line?;
            let lineno = i + 2;
            if line.trim().is_empty() {
                continue;
            }
            let fields = line
                .split_ascii_whitespace()
                .map(|t| {
                    t.parse::<i64>().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("not an integer: {t:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if fields.len() != kind.arity() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {} values for {kind}, found {}", kind.arity(), fields.len()),
                });
            }
            if let Some(&v) = fields.iter().find(|&&v| !universe.contains(v)) {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("value {v} outside [0, {})", universe.side()),
                });
            }
            if kind == Kind::Boxes3 || kind == Kind::Rects2 {
                for pair in fields.chunks(2) {
                    if pair[0] > pair[1] {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: format!("range {} > {}", pair[0], pair[1]),
                        });
                    }
                }
            }
            values.push(fields);
        }
        if values.len() != n {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header announces {n} records, file has {}", values.len()),
            });
        }
        let records = match kind {
            Kind::Points2 => Records::Points2(values.iter().map(|v| Point2::new(v[0], v[1])).collect()),
            Kind::Points3 => Records::Points3(values.iter().map(|v| Point3::new(v[0], v[1], v[2])).collect()),
            Kind::Boxes3 => Records::Boxes3(
                values
                    .iter()
                    .map(|v| Box3 {
                        lo: [v[0], v[2], v[4]],
                        hi: [v[1], v[3], v[5]],
                    })
                    .collect(),
            ),
            Kind::Rects2 => Records::Rects2(
                values
                    .iter()
                    .map(|v| Rect2 {
                        a: v[0],
                        b: v[1],
                        c: v[2],
                        d: v[3],
                    })
                    .collect(),
            ),
        };
        Ok(Dataset { universe, records })
    }
}

impl FromStr for Dataset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::read_from(s.as_bytes())
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut buf = Vec::new();
        self.write_to(&mut buf).map_err(|_| fmt::Error)?;
        f.write_str(std::str::from_utf8(&buf).map_err(|_| fmt::Error)?)
    }
}

fn parse_header(line: &str) -> Result<(Kind, usize, Universe)> {
    let bad = |msg: String| Error::Parse { line: 1, msg };
    let parts: Vec<&str> = line.split_ascii_whitespace().collect();
    if parts.len() != 4 || parts[0] != MAGIC {
        return Err(bad(format!("expected `{MAGIC} <kind> <n> <U>`, got {line:?}")));
    }
    let kind = parts[1].parse::<Kind>().map_err(|e| bad(e.to_string()))?;
    let n = parts[2].parse::<usize>().map_err(|_| bad(format!("bad record count {:?}", parts[2])))?;
    let side = parts[3].parse::<i64>().map_err(|_| bad(format!("bad universe {:?}", parts[3])))?;
    let universe = Universe::new(side).map_err(|e| bad(e.to_string()))?;
    Ok((kind, n, universe))
}
