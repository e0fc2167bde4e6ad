// Exact Littlestone dimensions with shattered-tree witnesses.
//
// ```bash
// cargo run --example littlestone_dimension
// ```

use blocky::littlestone::{ldim_alpha_witness, ldim_witness, DEFAULT_BUDGET};
use blocky::matrix::{IntMatrix, RealMatrix};

pub fn run_example() -> blocky::Result<()> {
    // Columns are all eight sign patterns on three rows.
    let mut a = IntMatrix::zeros(3, 8);
    for c in 0..8 {
        for r in 0..3 {
            a.set(r, c, if (c >> r) & 1 == 1 { 1 } else { -1 });
        }
    }
    let tree = ldim_witness(&a, DEFAULT_BUDGET)?;
    println!("all patterns on 3 rows: Ldim = {}", tree.depth);
    assert!(tree.is_shattered_by(&a.to_real()));
    println!("{}", serde_json::to_string(&tree)?);

    let r = RealMatrix::from_rows(&[[0.0, 0.3, 0.6, 0.9], [0.9, 0.0, 0.6, 0.3]]);
    for alpha in [0.1, 0.25, 0.5] {
        let t = ldim_alpha_witness(&r, alpha, DEFAULT_BUDGET)?;
        println!("alpha = {alpha}: Ldim_alpha = {}", t.depth);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> blocky::Result<()> {
    run_example()
}
