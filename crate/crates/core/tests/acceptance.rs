//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::HashSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fatrange::counters::Counters;
use fatrange::geometry::{decompose_fat_rect2, AspectBound, Box3, Point2, Point3, Rect2, Universe};
use fatrange::harness::bench::{bench, write_csv};
use fatrange::harness::{generate, DatasetSpec, Kind, VerifyConfig};
use fatrange::oracle::{brute_range2, brute_range3, brute_relevant_nodes, brute_spanning, brute_stab3, OracleConfig};
use fatrange::quadtree::{default_stride, Subdivision, C_DEC};
use fatrange::range2d::Range2DIndex;
use fatrange::range3d::{decompose_query_cube, max_depth, stretch_points, FourSidedQuery, GridIndex3};
use fatrange::smallset::{SmallSetIndex, WORK_BETA};
use fatrange::stabbing::{assign_relevant_nodes, OctreeStabIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Line {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn line(name: &'static str, pass: bool, detail: String) -> Line {
    Line { name, pass, detail }
}

fn distinct2(rng: &mut ChaCha8Rng, n: usize, side: i64) -> Vec<Point2> {
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point2::new(rng.random_range(0..side), rng.random_range(0..side));
        if seen.insert(p) {
            out.push(p);
        }
    }
    out
}

fn distinct3(rng: &mut ChaCha8Rng, n: usize, side: i64) -> Vec<Point3> {
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point3::new(rng.random_range(0..side), rng.random_range(0..side), rng.random_range(0..side));
        if seen.insert(p) {
            out.push(p);
        }
    }
    out
}

/// Side length spread evenly over scales `1..=max`.
fn log_uniform(rng: &mut ChaCha8Rng, max: i64) -> i64 {
    let top = 63 - max.leading_zeros();
    let e = rng.random_range(0..=top);
    rng.random_range(1i64 << e..=((1i64 << (e + 1)) - 1).min(max))
}

fn random_square(rng: &mut ChaCha8Rng, side: i64, overhang: bool) -> Rect2 {
    let s = log_uniform(rng, side);
    // Up to a quarter of the square may hang off the universe.
    let slack = if overhang { s / 4 } else { 0 };
    let x = rng.random_range(-slack..=side - s + slack);
    let y = rng.random_range(-slack..=side - s + slack);
    Rect2::square(x, y, s)
}

fn random_fat_rect(rng: &mut ChaCha8Rng, side: i64) -> Rect2 {
    let s = log_uniform(rng, side / 3);
    let long = s * rng.random_range(3..=9) / 3;
    let (w, h) = if rng.random_bool(0.5) { (long, s) } else { (s, long) };
    let x = rng.random_range(-w / 4..=side - w + w / 4);
    let y = rng.random_range(-h / 4..=side - h + h / 4);
    Rect2::new(x, x + w - 1, y, y + h - 1).unwrap()
}

fn random_fat_box(rng: &mut ChaCha8Rng, side: i64, ratio: i64, overhang: bool) -> Box3 {
    let s = log_uniform(rng, side / ratio);
    let e: [i64; 3] = std::array::from_fn(|_| s * rng.random_range(2..=2 * ratio) / 2);
    let e = {
        let mut e = e;
        e[rng.random_range(0..3)] = s;
        e
    };
    let lo: [i64; 3] = std::array::from_fn(|a| {
        let slack = if overhang { e[a] / 4 } else { 0 };
        rng.random_range(-slack..=side - e[a] + slack)
    });
    Box3::new(lo, std::array::from_fn(|a| lo[a] + e[a] - 1)).unwrap()
}

fn range2d_correctness(corner_max: &mut usize, corner_checked: &mut usize) -> Line {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let u = Universe::with_log(20).unwrap();
    let pts = distinct2(&mut rng, 10_000, u.side());
    let idx = Range2DIndex::build(&pts, u, default_stride(pts.len())).unwrap();
    let alpha = AspectBound::integer(3).unwrap();
    let mut mismatches = 0;
    for i in 0..10_000 {
        if i % 2 == 0 {
            let q = random_square(&mut rng, u.side(), true);
            let (out, t) = idx.query_square_traced(&q).unwrap();
            *corner_max = (*corner_max).max(t.corner_rects.len());
            *corner_checked += 1;
            mismatches += usize::from(out != brute_range2(&pts, &q));
        } else {
            let q = random_fat_rect(&mut rng, u.side());
            let out = idx.query_fat_rect(&q, alpha).unwrap();
            mismatches += usize::from(out != brute_range2(&pts, &q));
            for s in decompose_fat_rect2(&q, alpha).unwrap() {
                let (_, t) = idx.query_square_traced(&s).unwrap();
                *corner_max = (*corner_max).max(t.corner_rects.len());
                *corner_checked += 1;
            }
        }
    }
    let took = start.elapsed();
    line(
        "2-D correctness",
        mismatches == 0 && took < Duration::from_secs(60),
        format!("n=10^4, U=2^20, 10^4 square/fat-rect queries, {mismatches} mismatches, {took:.1?} (budget 60 s)"),
    )
}

fn subdivision_builds() -> (Line, Line) {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let u = Universe::with_log(20).unwrap();
    let (mut rect_breaches, mut marked_breaches, mut count_breaches) = (0, 0, 0);
    let (mut worst_rect, mut worst_marked, mut worst_count) = (0.0f64, 0.0f64, 0.0f64);
    for b in 0..100 {
        let n = 1usize << (6 + b % 9);
        let pts = if b % 3 == 2 {
            // Tight clusters give deep compressed paths.
            let centres: Vec<Point2> = distinct2(&mut rng, 5, u.side() - 2000);
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            while out.len() < n {
                let c = centres[rng.random_range(0..centres.len())];
                let p = Point2::new(c.x + rng.random_range(0..2000), c.y + rng.random_range(0..2000));
                if seen.insert(p) {
                    out.push(p);
                }
            }
            out
        } else {
            distinct2(&mut rng, n, u.side())
        };
        let d = default_stride(n);
        let (_, marking, sub) = Subdivision::build(&pts, u, d).unwrap();
        let largest = sub.rects().iter().map(|r| r.len()).max().unwrap_or(0);
        let budget = 2 * n.div_ceil(d);
        rect_breaches += usize::from(largest > 6 * d);
        marked_breaches += usize::from(marking.marked_count() > budget);
        count_breaches += usize::from(sub.rects().len() > C_DEC * budget);
        worst_rect = worst_rect.max(largest as f64 / (6 * d) as f64);
        worst_marked = worst_marked.max(marking.marked_count() as f64 / budget as f64);
        worst_count = worst_count.max(sub.rects().len() as f64 / (C_DEC * budget) as f64);
    }
    (
        line(
            "Rectangle size (<= 6d points)",
            rect_breaches == 0,
            format!("100 builds, n in 2^6..2^14, {rect_breaches} breaches, max fill {:.2} of 6d", worst_rect),
        ),
        line(
            "Subdivision size",
            marked_breaches + count_breaches == 0,
            format!(
                "marked <= 2ceil(n/d): {marked_breaches} breaches (max {:.2}); rects <= C_dec*2ceil(n/d) with C_dec={C_DEC}: {count_breaches} breaches (max {:.2})",
                worst_marked, worst_count
            ),
        ),
    )
}

fn spanning_bound(corner_max: &mut usize, corner_checked: &mut usize) -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let u = Universe::with_log(20).unwrap();
    let pts = distinct2(&mut rng, 10_000, u.side());
    let idx = Range2DIndex::build(&pts, u, default_stride(pts.len())).unwrap();
    let sub = idx.subdivision();
    let (mut over, mut differ, mut max_span, mut nonempty) = (0, 0, 0, 0);
    for _ in 0..100_000 {
        let q = random_square(&mut rng, u.side(), false);
        let brute = brute_spanning(sub, &q);
        let cands = idx.spanning_candidates(&q).unwrap();
        max_span = max_span.max(brute.len());
        nonempty += usize::from(!brute.is_empty());
        over += usize::from(brute.len() > 2 * C_DEC);
        differ += usize::from(brute != cands);
        let (_, t) = idx.query_square_traced(&q).unwrap();
        *corner_max = (*corner_max).max(t.corner_rects.len());
        *corner_checked += 1;
    }
    line(
        "Spanning bound (<= 2 C_dec)",
        over == 0 && differ == 0,
        format!(
            "10^5 squares, max {max_span} spanning (limit {}), {nonempty} queries with any, {over} over, {differ} candidate mismatches",
            2 * C_DEC
        ),
    )
}

fn small_sets() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let (mut wrong, mut beta_breaches, mut queries, mut worst) = (0u64, 0u64, 0u64, 0.0f64);
    let mut largest = 0;
    for _ in 0..500 {
        let d = default_stride(1usize << rng.random_range(6..=14));
        let m = rng.random_range(1..=6 * d);
        largest = largest.max(m);
        let span = (m as i64 / 2).max(2);
        let pts = distinct2(&mut rng, m, span.max(((m as f64).sqrt() as i64) + 2));
        let ids: Vec<u32> = (0..m as u32).map(|i| i * 3 + 7).collect();
        let idx = SmallSetIndex::build(&pts, &ids, 6 * d).unwrap();
        // Independent rank space: x by (x, y), y by (y, x).
        let mut by_x: Vec<usize> = (0..m).collect();
        by_x.sort_by_key(|&i| (pts[i].x, pts[i].y));
        let mut by_y: Vec<usize> = (0..m).collect();
        by_y.sort_by_key(|&i| (pts[i].y, pts[i].x));
        let mut rank = vec![(0usize, 0usize); m];
        for (r, &i) in by_x.iter().enumerate() {
            rank[i].0 = r;
        }
        for (r, &i) in by_y.iter().enumerate() {
            rank[i].1 = r;
        }
        // ids are 3i + 7, so the input index is recovered arithmetically.
        let index_of = |id: u32| (id >= 7 && (id - 7).is_multiple_of(3)).then(|| ((id - 7) / 3) as usize).filter(|&i| i < m);
        let mut stamp = vec![0u64; m];
        let mut generation = 0u64;
        // prefix[x][y] = points with x rank < x and y rank < y.
        let w = m + 1;
        let mut prefix = vec![0u32; w * w];
        for &(rx, ry) in &rank {
            prefix[(rx + 1) * w + ry + 1] += 1;
        }
        for x in 1..w {
            for y in 1..w {
                prefix[x * w + y] += prefix[(x - 1) * w + y] + prefix[x * w + y - 1] - prefix[(x - 1) * w + y - 1];
            }
        }
        let count = |x0: usize, x1: usize, y0: usize, y1: usize| {
            prefix[(x1 + 1) * w + y1 + 1] + prefix[x0 * w + y0] - prefix[x0 * w + y1 + 1] - prefix[(x1 + 1) * w + y0]
        };
        let mut out = Vec::with_capacity(m);
        for x0 in 0..m {
            for x1 in x0..m {
                for y0 in 0..m {
                    for y1 in y0..m {
                        out.clear();
                        let mut c = Counters::default();
                        idx.query_ranks((x0, x1), (y0, y1), &mut out, &mut c);
                        queries += 1;
                        let k = count(x0, x1, y0, y1) as usize;
                        generation += 1;
                        let mut ok = out.len() == k;
                        for &id in &out {
                            match index_of(id) {
                                Some(i) if stamp[i] != generation => {
                                    stamp[i] = generation;
                                    let (rx, ry) = rank[i];
                                    ok &= x0 <= rx && rx <= x1 && y0 <= ry && ry <= y1;
                                }
                                _ => ok = false,
                            }
                        }
                        wrong += u64::from(!ok);
                        beta_breaches += u64::from(c.candidates_examined > WORK_BETA * (k as u64 + 1));
                        worst = worst.max(c.candidates_examined as f64 / (k as f64 + 1.0));
                    }
                }
            }
        }
    }
    line(
        "Small-set structure",
        wrong == 0 && beta_breaches == 0,
        format!(
            "500 sets (up to {largest} points), {queries} rank-space queries, {wrong} wrong, beta={WORK_BETA}: {beta_breaches} over, worst ratio {worst:.2}"
        ),
    )
}

fn range3d() -> (Line, Line) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let u = Universe::with_log(15).unwrap();
    let pts = distinct3(&mut rng, 10_000, u.side());
    let idx = GridIndex3::build(&pts, u, 2).unwrap();
    let depth = max_depth(u.log(), 2);
    let alpha = AspectBound::integer(3).unwrap();
    let (mut mismatches, mut slab_over, mut label_over) = (0, 0, 0);
    let (mut max_slab, mut max_label) = (0u64, 0u64);
    for i in 0..10_000 {
        if i % 2 == 0 {
            let s = log_uniform(&mut rng, u.side());
            let lo: [i64; 3] = std::array::from_fn(|_| rng.random_range(-s / 4..=u.side() - s + s / 4));
            let q = Box3::cube(lo, s);
            let (out, t) = idx.query_cube_traced(&q).unwrap();
            mismatches += usize::from(out != brute_range3(&pts, &q));
            max_slab = max_slab.max(t.slab_probes);
            max_label = max_label.max(t.label_descents);
            slab_over += usize::from(t.slab_probes > 6 * u64::from(depth));
            label_over += usize::from(t.label_descents > u64::from(depth));
        } else {
            let q = random_fat_box(&mut rng, u.side(), 3, true);
            let out = idx.query_fat_box(&q, alpha).unwrap();
            mismatches += usize::from(out != brute_range3(&pts, &q));
        }
    }
    let queries_took = start.elapsed();

    // Voxel check of the cube decomposition in a 64^3 universe.
    let mut voxel_bad = 0;
    let mut decomposed = 0;
    let mut count = vec![0u8; 64 * 64 * 64];
    for cell_log in 2..=5u32 {
        let cell = 1i64 << cell_log;
        let mut done = 0;
        while done < 150 {
            let s = rng.random_range(1..=64);
            let q = Box3::cube(std::array::from_fn(|_| rng.random_range(0..=64 - s)), s);
            let Ok(dec) = decompose_query_cube(&q, [0; 3], cell_log) else {
                continue;
            };
            done += 1;
            count.fill(0);
            let mut shape_ok = dec.pieces.len() <= 6;
            let mut mark = |b: &Box3| {
                for x in b.lo[0]..=b.hi[0] {
                    for y in b.lo[1]..=b.hi[1] {
                        for z in b.lo[2]..=b.hi[2] {
                            let v = &mut count[((x * 64 + y) * 64 + z) as usize];
                            *v = v.saturating_add(1);
                        }
                    }
                }
            };
            if let Some(a) = &dec.aligned {
                shape_ok &= (0..3).all(|i| a.lo[i] % cell == 0 && (a.hi[i] + 1) % cell == 0);
                mark(a);
            }
            for p in &dec.pieces {
                shape_ok &= p.region.lo[p.axis] / cell == p.slab && p.region.hi[p.axis] / cell == p.slab;
                mark(&p.region);
            }
            let mut exact = true;
            for x in 0..64 {
                for y in 0..64 {
                    for z in 0..64 {
                        exact &= count[((x * 64 + y) * 64 + z) as usize] == u8::from(q.contains_coords([x, y, z]));
                    }
                }
            }
            voxel_bad += usize::from(!(exact && shape_ok));
            decomposed += 1;
        }
    }
    let took = start.elapsed();
    (
        line(
            "3-D correctness",
            mismatches == 0 && voxel_bad == 0 && took < Duration::from_secs(120),
            format!(
                "n=10^4, U=2^15, b=2, 10^4 cube/fat-box queries, {mismatches} mismatches ({queries_took:.1?}); {decomposed} decompositions at U=64, {voxel_bad} not exact; {took:.1?} (budget 120 s)"
            ),
        ),
        line(
            "3-D query-cost counters",
            slab_over == 0 && label_over == 0 && idx.max_depth() == depth,
            format!(
                "max_depth(2^15, b=2)={depth}; slab probes max {max_slab} (limit {}), {slab_over} over; label descents max {max_label} (limit {depth}), {label_over} over",
                6 * depth
            ),
        ),
    )
}

fn four_sided() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let small = Universe::with_log(8).unwrap();
    let u = small.side();
    let pts = distinct3(&mut rng, 5000, u);
    let (stretched, big) = stretch_points(&pts, small).unwrap();
    let idx = GridIndex3::build(&stretched, big, 2).unwrap();
    let mut mismatches = 0;
    let mut reported = 0;
    for _ in 0..1000 {
        let x1 = rng.random_range(-u..big.side());
        let x2 = x1 + rng.random_range(u + 1..=big.side());
        let q = FourSidedQuery {
            x1,
            x2,
            y: rng.random_range(0..=u),
            z: rng.random_range(0..=u),
        };
        let got = idx.query_cube(&q.to_cube(small).unwrap()).unwrap();
        // Scan the original points: x1 <= x * U < x2, y < Y, z < Z.
        let want: Vec<u32> = (0..pts.len() as u32)
            .filter(|&i| {
                let p = pts[i as usize];
                q.x1 <= p.x * u && p.x * u < q.x2 && p.y < q.y && p.z < q.z
            })
            .collect();
        reported += want.len();
        mismatches += usize::from(got != want);
    }
    line(
        "4-sided reduction",
        mismatches == 0,
        format!("10^3 queries over 5000 points in [2^8]^3, {reported} points expected in total, {mismatches} mismatches"),
    )
}

fn stabbing() -> (Line, Line) {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let u = Universe::with_log(16).unwrap();
    let alpha = AspectBound::integer(2).unwrap();
    let boxes: Vec<Box3> = (0..1000).map(|_| random_fat_box(&mut rng, u.side(), 2, false)).collect();
    let idx = OctreeStabIndex::build(&boxes, u, alpha);
    let levels = u64::from(u.log()) + 1;
    let (mut mismatches, mut hits, mut visited_over, mut probes_over) = (0, 0, 0, 0);
    let (mut max_visited, mut max_probes) = (0, 0);
    for i in 0..10_000 {
        let q = if i % 2 == 0 {
            Point3::new(rng.random_range(0..u.side()), rng.random_range(0..u.side()), rng.random_range(0..u.side()))
        } else {
            // Inside, on the faces of, or just past a random box.
            let b = boxes[rng.random_range(0..boxes.len())];
            let c: [i64; 3] = std::array::from_fn(|a| match rng.random_range(0..4) {
                0 => b.lo[a],
                1 => b.hi[a],
                2 => (b.hi[a] + 1).min(u.side() - 1),
                _ => rng.random_range(b.lo[a]..=b.hi[a]),
            });
            Point3::from_array(c)
        };
        let (out, t) = idx.query_traced(q);
        let want = brute_stab3(&boxes, q);
        hits += want.len();
        mismatches += usize::from(out != want);
        max_visited = max_visited.max(t.visited);
        max_probes = max_probes.max(t.probes);
        visited_over += usize::from(t.visited > levels);
        probes_over += usize::from(t.probes > 8 * levels);
    }

    let small = Universe::with_log(8).unwrap();
    let cfg = OracleConfig::default();
    let mut def_mismatch = 0;
    let mut max_per_cube = idx.stats().max_per_cube;
    for _ in 0..500 {
        let b = random_fat_box(&mut rng, small.side(), 2, false);
        let asg = assign_relevant_nodes(&b, alpha, small).unwrap();
        def_mismatch += usize::from(asg.nodes != brute_relevant_nodes(&b, small, &cfg).unwrap());
        max_per_cube = max_per_cube.max(asg.per_cube.iter().copied().max().unwrap_or(0));
    }
    (
        line(
            "Stabbing correctness",
            mismatches == 0 && def_mismatch == 0 && idx.rejected().is_empty(),
            format!(
                "10^3 boxes, U=2^16, 10^4 probes ({hits} hits), {mismatches} mismatches; 500 boxes at U=2^8 vs relevant-node definition, {def_mismatch} mismatches"
            ),
        ),
        line(
            "Stabbing bounds",
            max_per_cube <= 8 && visited_over == 0 && probes_over == 0,
            format!(
                "relevant nodes per cube max {max_per_cube} (limit 8); visited max {max_visited} (limit {levels}), {visited_over} over; dominance probes max {max_probes} (limit {}), {probes_over} over",
                8 * levels
            ),
        ),
    )
}

fn scaling() -> Line {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("scaling");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = VerifyConfig::default();
    let mut summary = String::from("log2_u,u,median_candidates_examined,median_nodes_visited,median_wall_time_ns\n");
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for log in 10..=20u32 {
        let u = Universe::with_log(log).unwrap();
        let data = generate(&DatasetSpec::new(Kind::Points2, 1000, u, 200 + u64::from(log))).unwrap();
        let queries = generate(&DatasetSpec::new(Kind::Rects2, 1000, u, 300 + u64::from(log)).max_side(u.side() / 8)).unwrap();
        let rows = bench(&data, &queries, &cfg, 1).unwrap();
        let file = std::fs::File::create(dir.join(format!("bench_u{log}.csv"))).unwrap();
        write_csv(&rows, std::io::BufWriter::new(file)).unwrap();
        let median = |f: fn(&Counters) -> u64| {
            let mut v: Vec<u64> = rows.iter().map(|r| f(&r.counters)).collect();
            v.sort_unstable();
            v[v.len() / 2]
        };
        let mut times: Vec<u64> = rows.iter().map(|r| r.wall_time_ns).collect();
        times.sort_unstable();
        let cand = median(|c| c.candidates_examined);
        summary.push_str(&format!(
            "{log},{},{cand},{},{}\n",
            u.side(),
            median(|c| c.nodes_visited),
            times[times.len() / 2]
        ));
        xs.push(f64::from(log));
        ys.push((cand.max(1) as f64).log2());
    }
    let path = dir.join("scaling.csv");
    std::fs::write(&path, summary).unwrap();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    line(
        "Scaling sanity",
        slope < 1.0,
        format!("n=1000, U=2^10..2^20, log-log slope of median candidates {slope:.3} (must be < 1), CSV {}", path.display()),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut lines = Vec::new();
    let (mut corner_max, mut corner_checked) = (0, 0);
    lines.push(range2d_correctness(&mut corner_max, &mut corner_checked));
    let (lemma1, size) = subdivision_builds();
    lines.push(lemma1);
    lines.push(size);
    lines.push(spanning_bound(&mut corner_max, &mut corner_checked));
    lines.push(line(
        "Corner bound",
        corner_max <= 4,
        format!("{corner_checked} square queries, at most {corner_max} corner rectangles (limit 4)"),
    ));
    lines.push(small_sets());
    let (r3, cost) = range3d();
    lines.push(r3);
    lines.push(cost);
    lines.push(four_sided());
    let (stab, stab_bounds) = stabbing();
    lines.push(stab);
    lines.push(stab_bounds);
    lines.push(scaling());

    let failed = lines.iter().filter(|l| !l.pass).count();
    for l in &lines {
        println!("{} {}: {}", if l.pass { "PASS" } else { "FAIL" }, l.name, l.detail);
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.1?})",
        lines.len() - failed,
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
