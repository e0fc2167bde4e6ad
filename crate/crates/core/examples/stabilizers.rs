// Shrinking the column set until every row is nearly constant.
//
// ```bash
// cargo run --example stabilizers
// ```

use blocky::littlestone::{bucket_stabilize, majority_stabilize, RowFunction};
use blocky::matrix::{IntMatrix, RealMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> blocky::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let signs = IntMatrix::new(5, 32, (0..160).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect())?;
    let r = majority_stabilize(&signs, 0.25)?;
    println!(
        "majority: kept {} of 32 columns, Ldim = {:?}, size bound {:.4}, worst violation {:.3}",
        r.columns.len(),
        r.dimension,
        r.size_bound.unwrap_or(0.0),
        r.max_violation()
    );

    let reals = RealMatrix::new(4, 64, (0..256).map(|_| rng.gen_range(-1.0..=1.0)).collect())?;
    let r = bucket_stabilize(&reals, 0.125, 0.1)?;
    if let RowFunction::Values(g) = &r.row_function {
        println!("bucket: kept {} of 64 columns, g = {g:.3?}, worst violation {:.3}", r.columns.len(), r.max_violation());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> blocky::Result<()> {
    run_example()
}
