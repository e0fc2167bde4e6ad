// End-to-end decomposition, from a certificate or from the solver.
//
// ```bash
// cargo run --example decompose_pipeline
// ```

use blocky::generate::{generate, GeneratorSpec};
use blocky::matrix::IntMatrix;
use blocky::pipeline::{decompose, DecomposeConfig};

pub fn run_example() -> blocky::Result<()> {
    let config = DecomposeConfig::default();

    let g = generate(&GeneratorSpec::RandomBlockySum { rows: 24, cols: 24, terms: 3 }, 11)?;
    let (sum, report) = decompose(&g.matrix, g.factorization, &config)?;
    println!(
        "24x24 sum of 3 blocky terms: {} terms out, {} levels, gamma^2 trajectory {:?}",
        sum.len(),
        report.levels.len(),
        report.gamma_squared_trajectory
    );

    let a = IntMatrix::from_rows(&[[1, 0, 2], [1, 1, 0], [0, -1, 1]]);
    let (sum, report) = decompose(&a, None, &config)?;
    assert_eq!(sum.evaluate(), a);
    println!("3x3 integer matrix: gamma0 = {:.4}, {} terms", report.gamma0, sum.len());
    println!("{}", serde_json::to_string_pretty(&report.bound_fit)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> blocky::Result<()> {
    run_example()
}
