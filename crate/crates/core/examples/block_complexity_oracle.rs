// Exhaustive block complexity for tiny matrices and the random-matrix report.
//
// ```bash
// cargo run --example block_complexity_oracle
// ```

use blocky::matrix::IntMatrix;
use blocky::pipeline::{count_blocky, exact_block_complexity, random_lower_bound_experiment, ExperimentMode, OracleResult};

pub fn run_example() -> blocky::Result<()> {
    println!("nonzero blocky 3x3 matrices: {}", count_blocky(3, 3)?);

    let a = IntMatrix::from_rows(&[[1, 0, 1], [1, 1, 0], [0, 1, 1]]);
    match exact_block_complexity(&a, 4)? {
        OracleResult::Exact { value, witness } => {
            println!("complexity {value}");
            for t in witness.terms() {
                println!("  {:+}:\n{}", t.sign.value(), t.blocky.to_matrix());
            }
        }
        OracleResult::ExceedsLmax => println!("more than 4 terms"),
    }

    let r = random_lower_bound_experiment(3, 100, 0, ExperimentMode::Exact)?;
    println!("random 3x3: histogram {:?}, reference {:.4}", r.histogram, r.reference);
    Ok(())
}

#[allow(dead_code)]
fn main() -> blocky::Result<()> {
    run_example()
}
