use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fatrange::geometry::{AspectBound, Universe};
use fatrange::harness::bench::{bench, write_csv};
use fatrange::harness::{generate, verify, Dataset, DatasetSpec, Distribution, Kind, Records, Report, VerifyConfig};
use fatrange::quadtree::default_stride;
use fatrange::range2d::Range2DIndex;
use fatrange::range3d::GridIndex3;
use fatrange::stabbing::OctreeStabIndex;
use fatrange::Error;

#[derive(Parser)]
#[command(name = "fatrange", version, about = "Fat-box range reporting and stabbing indexes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct IndexOpts {
    /// Marking stride for 2-D indexes (default floor(log2 n)).
    #[arg(long)]
    d: Option<usize>,
    /// Grid branching exponent for 3-D indexes.
    #[arg(long, default_value_t = 2)]
    b: u32,
    /// Aspect bound, an integer or a fraction such as 3/2.
    #[arg(long, default_value = "2")]
    alpha: AspectBound,
    /// Override the per-node rectangle budget used by the spanning check.
    #[arg(long, hide = true)]
    c_dec: Option<usize>,
}

impl IndexOpts {
    fn config(&self) -> VerifyConfig {
        let base = VerifyConfig::default();
        VerifyConfig {
            c_dec: self.c_dec.unwrap_or(base.c_dec),
            d: self.d,
            b: self.b,
            alpha: self.alpha,
            ..base
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a seeded synthetic dataset or query file.
    Gen {
        #[arg(long)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        /// Universe side, a power of two.
        #[arg(long)]
        u: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Aspect bound for boxes and rectangles.
        #[arg(long, default_value = "1")]
        alpha: AspectBound,
        /// Largest shortest-extent of generated boxes (default U/4).
        #[arg(long)]
        max_side: Option<i64>,
        /// Draw around this many cluster centres instead of uniformly.
        #[arg(long)]
        clusters: Option<usize>,
        #[arg(long, default_value_t = 64)]
        spread: i64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the index for a dataset and print its statistics.
    Build {
        data: PathBuf,
        #[command(flatten)]
        opts: IndexOpts,
    },
    /// Compare every query against brute force and check the cost bounds.
    Verify {
        data: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[command(flatten)]
        opts: IndexOpts,
    },
    /// Time every query and write per-query counters as CSV.
    Bench {
        data: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Repetitions per query; the median time is kept.
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[command(flatten)]
        opts: IndexOpts,
    },
    /// Generate small datasets of every kind and verify them.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> Result<bool, Error> {
    match cmd {
        Cmd::Gen {
            kind,
            n,
            u,
            seed,
            alpha,
            max_side,
            clusters,
            spread,
            out,
        } => {
            let mut spec = DatasetSpec::new(kind, n, Universe::new(u)?, seed).alpha(alpha);
            if let Some(centers) = clusters {
                spec = spec.distribution(Distribution::Clustered { centers, spread });
            }
            if let Some(s) = max_side {
                spec = spec.max_side(s);
            }
            generate(&spec)?.save(&out)?;
            println!("wrote {n} {kind} records to {}", out.display());
            Ok(true)
        }
        Cmd::Build { data, opts } => {
            build(&load(&data)?, &opts)?;
            Ok(true)
        }
        Cmd::Verify { data, queries, opts } => {
            let report = verify(&load(&data)?, &load(&queries)?, &opts.config())?;
            print_report(&report);
            Ok(report.passed())
        }
        Cmd::Bench {
            data,
            queries,
            out,
            reps,
            opts,
        } => {
            let rows = bench(&load(&data)?, &load(&queries)?, &opts.config(), reps)?;
            match out {
                Some(path) => write_csv(&rows, std::io::BufWriter::new(std::fs::File::create(path)?))?,
                None => write_csv(&rows, std::io::stdout().lock())?,
            }
            Ok(true)
        }
        Cmd::Selftest { seed } => selftest(seed),
    }
}

fn load(path: &Path) -> Result<Dataset, Error> {
    Dataset::load(path).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    })
}

fn build(data: &Dataset, opts: &IndexOpts) -> Result<(), Error> {
    let u = data.universe;
    match &data.records {
        Records::Points2(pts) => {
            let d = opts.d.unwrap_or_else(|| default_stride(pts.len()));
            let idx = Range2DIndex::build(pts, u, d)?;
            let sub = idx.subdivision();
            println!("points2 n={} U={} d={d}", pts.len(), u.side());
            println!("quadtree nodes={}", idx.quadtree().nodes().len());
            println!("marked nodes={}", idx.marking().marked_count());
            println!("canonical rectangles={}", sub.rects().len());
            println!("largest rectangle={}", sub.rects().iter().map(|r| r.len()).max().unwrap_or(0));
            println!("digest={:016x}", sub.digest());
        }
        Records::Points3(pts) => {
            let idx = GridIndex3::build(pts, u, opts.b)?;
            println!("points3 n={} U={} b={}", pts.len(), u.side(), opts.b);
            println!("max depth={}", idx.max_depth());
            println!("point references={}", idx.point_refs());
            match idx.top_branching() {
                Some(k) => println!("top branching={k}"),
                None => println!("top branching=none (base case)"),
            }
        }
        Records::Boxes3(boxes) => {
            let idx = OctreeStabIndex::build(boxes, u, opts.alpha);
            let s = idx.stats();
            println!("boxes3 n={} U={} alpha={}", boxes.len(), u.side(), opts.alpha);
            println!("rejected={}", idx.rejected().len());
            for (i, why) in idx.rejected().iter().take(10) {
                println!("  box {i}: {why}");
            }
            println!("octree nodes={}", s.nodes);
            println!("assignments={}", s.assignments);
            println!("corner entries={}", s.corner_entries);
            println!("max relevant per cube={}", s.max_per_cube);
        }
        Records::Rects2(_) => {
            return Err(Error::InvalidParameter("rects2 files are queries, not datasets".into()));
        }
    }
    Ok(())
}

fn print_report(r: &Report) {
    // Structural and per-query violations are capped separately so one kind
    // cannot hide the other.
    let (global, per_query): (Vec<_>, Vec<_>) = r.violations.iter().partition(|v| v.query.is_none());
    for group in [global, per_query] {
        for v in group.iter().take(25) {
            println!("{v}");
        }
        if group.len() > 25 {
            println!("... {} more", group.len() - 25);
        }
    }
    println!(
        "{}: {} queries, {} mismatches, {} bound breaches",
        if r.passed() { "PASS" } else { "FAIL" },
        r.queries,
        r.mismatches(),
        r.breaches()
    );
}

fn selftest(seed: u64) -> Result<bool, Error> {
    let alpha = AspectBound::integer(2)?;
    let cases = [
        ("range2d", Kind::Points2, Kind::Rects2, 12, 2000),
        ("range3d", Kind::Points3, Kind::Boxes3, 12, 2000),
        ("stabbing", Kind::Boxes3, Kind::Points3, 12, 500),
    ];
    let mut ok = true;
    for (i, (name, data_kind, query_kind, log, n)) in cases.into_iter().enumerate() {
        let u = Universe::with_log(log)?;
        let s = seed.wrapping_mul(31).wrapping_add(i as u64);
        let mut data_spec = DatasetSpec::new(data_kind, n, u, s).alpha(alpha);
        if data_kind == Kind::Boxes3 {
            data_spec = data_spec.max_side(u.side() / 16);
        }
        let data = generate(&data_spec)?;
        let queries = generate(&DatasetSpec::new(query_kind, 500, u, s + 1000).alpha(alpha))?;
        let report = verify(&data, &queries, &VerifyConfig::default())?;
        println!(
            "{name}: {} ({} queries, {} mismatches, {} bound breaches)",
            if report.passed() { "PASS" } else { "FAIL" },
            report.queries,
            report.mismatches(),
            report.breaches()
        );
        ok &= report.passed();
    }
    Ok(ok)
}
