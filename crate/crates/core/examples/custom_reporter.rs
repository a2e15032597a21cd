//! Plugging a different orthogonal reporter into the indexes.

use fatrange::counters::Counters;
use fatrange::geometry::{Box3, Point3, Universe};
use fatrange::range3d::GridIndex3;
use fatrange::reporter::{Item, RangeReporter};

/// Keeps items sorted by x and scans the x-range only.
struct SortedScan {
    items: Vec<Item<3>>,
}

impl RangeReporter<3> for SortedScan {
    fn build(mut items: Vec<Item<3>>) -> Self {
        items.sort_unstable_by_key(|it| it.0[0]);
        SortedScan { items }
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn report(&self, lo: &[i64; 3], hi: &[i64; 3], out: &mut Vec<u32>, c: &mut Counters) {
        c.structures_probed += 1;
        let start = self.items.partition_point(|it| it.0[0] < lo[0]);
        for (p, id) in self.items[start..].iter().take_while(|it| it.0[0] <= hi[0]) {
            c.candidates_examined += 1;
            if (1..3).all(|a| lo[a] <= p[a] && p[a] <= hi[a]) {
                out.push(*id);
            }
        }
    }
}

fn main() -> fatrange::Result<()> {
    let u = Universe::with_log(10)?;
    let pts: Vec<Point3> = (0..5000).map(|i| Point3::new(i % 1013, (i * 7) % 1019, (i * 13) % 1021)).collect();
    let default = GridIndex3::build(&pts, u, 2)?;
    let custom = GridIndex3::<SortedScan>::build_with(&pts, u, 2)?;
    let q = Box3::cube([100, 200, 300], 250);
    let (a, ta) = default.query_cube_traced(&q)?;
    let (b, tb) = custom.query_cube_traced(&q)?;
    assert_eq!(a, b);
    println!("{} points either way", a.len());
    println!("range tree: {} candidates", ta.counters.candidates_examined);
    println!("sorted scan: {} candidates", tb.counters.candidates_examined);
    Ok(())
}
