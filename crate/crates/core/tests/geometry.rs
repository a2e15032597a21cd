use fatrange::geometry::{decompose_fat_box3, decompose_fat_rect2, AspectBound, Box3, Rect2};
use proptest::prelude::*;

fn voxel_counts(q: &Box3, cubes: &[Box3]) -> Vec<u32> {
    let e = q.extents();
    let mut count = vec![0u32; (e[0] * e[1] * e[2]) as usize];
    for c in cubes {
        assert!(q.intersection(c) == Some(*c), "{c:?} leaves {q:?}");
        for x in c.lo[0]..=c.hi[0] {
            for y in c.lo[1]..=c.hi[1] {
                for z in c.lo[2]..=c.hi[2] {
                    let i = ((x - q.lo[0]) * e[1] + (y - q.lo[1])) * e[2] + (z - q.lo[2]);
                    count[i as usize] += 1;
                }
            }
        }
    }
    count
}

#[test]
fn box_8_by_12_by_20_is_covered_by_six_cubes() {
    let q = Box3::new([5, 0, 40], [12, 11, 59]).unwrap();
    let cubes = decompose_fat_box3(&q, AspectBound::new(5, 2).unwrap()).unwrap();
    // 2 tiles along y, 3 along z.
    assert_eq!(cubes.len(), 6);
    assert!(cubes.iter().all(|c| c.extents() == [8, 8, 8]));
    assert!(voxel_counts(&q, &cubes).iter().all(|&c| c >= 1));
    assert!(decompose_fat_box3(&q, AspectBound::integer(2).unwrap()).is_err());
}

proptest! {
    #[test]
    fn fat_rect_cover_is_exact(
        x in -50i64..50, y in -50i64..50, s in 1i64..40, k in 2i64..=8, tall in any::<bool>(),
    ) {
        // Long side is s*k/2, so the ratio is at most 4.
        let long = (s * k / 2).max(s);
        let (w, h) = if tall { (s, long) } else { (long, s) };
        let q = Rect2::new(x, x + w - 1, y, y + h - 1).unwrap();
        let alpha = AspectBound::integer(4).unwrap();
        let squares = decompose_fat_rect2(&q, alpha).unwrap();
        prop_assert!(squares.len() as i64 <= alpha.ceil());
        for sq in &squares {
            prop_assert!(sq.is_square() && sq.width() == s);
            prop_assert_eq!(q.intersection(sq), Some(*sq));
        }
        for px in q.a..=q.b {
            for py in q.c..=q.d {
                let hit = squares.iter().any(|sq| sq.a <= px && px <= sq.b && sq.c <= py && py <= sq.d);
                prop_assert!(hit);
            }
        }
    }

    #[test]
    fn fat_box_cover_is_exact(
        lo in prop::array::uniform3(-20i64..20), s in 1i64..10, mult in prop::array::uniform3(2i64..=6),
    ) {
        let e = mult.map(|m| s * m / 2);
        let q = Box3::new(lo, std::array::from_fn(|a| lo[a] + e[a] - 1)).unwrap();
        let alpha = AspectBound::integer(3).unwrap();
        let cubes = decompose_fat_box3(&q, alpha).unwrap();
        prop_assert!(cubes.len() as i64 <= alpha.ceil() * alpha.ceil());
        let shortest = *e.iter().min().unwrap();
        prop_assert!(cubes.iter().all(|c| c.is_cube() && c.extent(0) == shortest));
        prop_assert!(voxel_counts(&q, &cubes).iter().all(|&c| c >= 1));
    }

    #[test]
    fn aspect_bound_admits_matches_ratio(num in 1u64..20, den in 1u64..20, a in 1i64..100, b in 1i64..100) {
        prop_assume!(num >= den);
        let bound = AspectBound::new(num, den).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert_eq!(bound.admits(&[a, b]), (hi as u128) * (den as u128) <= (lo as u128) * (num as u128));
    }
}
