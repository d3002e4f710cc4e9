//! Time clustering on fields of growing size and print the ratio between
//! successive runs.
//!
//!     cargo run --release --example scaling_bench -- zqs

use cropseg::bench::{format_table, run_bench};
use cropseg::{FieldSpec, Params};

fn main() -> cropseg::Result<()> {
    let algo = std::env::args().nth(1).unwrap_or_else(|| "gdqspp".into());
    let spec = FieldSpec::default();
    let k = spec.points_per_plant / 2;
    let params = match algo.as_str() {
        "rain" => Params::rain(0.1)?,
        "zqs" => Params::zqs(0.1)?,
        "gdqs" => Params::gdqs(0.1, k)?,
        _ => Params::gdqspp(k, 0.3)?,
    };
    let rows = run_bench(&spec, &[25_000, 50_000, 100_000], &params, 3)?;
    print!("{}", format_table(&params, 3, &rows));
    Ok(())
}
