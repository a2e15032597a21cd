//! Generate, save, reload, verify and benchmark through the library API.

use fatrange::geometry::{AspectBound, Universe};
use fatrange::harness::bench::{bench, write_csv};
use fatrange::harness::{generate, verify, Dataset, DatasetSpec, Distribution, Kind, VerifyConfig};

fn main() -> fatrange::Result<()> {
    let u = Universe::with_log(14)?;
    let data = generate(&DatasetSpec::new(Kind::Points2, 5000, u, 1).distribution(Distribution::Clustered {
        centers: 8,
        spread: 500,
    }))?;
    let queries = generate(&DatasetSpec::new(Kind::Rects2, 200, u, 2).alpha(AspectBound::integer(2)?).max_side(2000))?;

    let dir = std::env::temp_dir().join("fatrange-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("points.txt");
    data.save(&path)?;
    let data = Dataset::load(&path)?;

    let report = verify(&data, &queries, &VerifyConfig::default())?;
    println!(
        "verify: {} queries, {} mismatches, {} bound breaches",
        report.queries,
        report.mismatches(),
        report.breaches()
    );

    let rows = bench(&data, &queries, &VerifyConfig::default(), 3)?;
    let mut csv = Vec::new();
    write_csv(&rows[..3], &mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}
