// Bracketing the factorization norm: a certified upper bound from an explicit
// factorization and lower bounds from Littlestone arguments.
//
// ```bash
// cargo run --example gamma2_norm
// ```

use blocky::factorize::{gamma2_bracket, gamma2_upper, verify_factorization, Gamma2Options};
use blocky::matrix::RealMatrix;

pub fn run_example() -> blocky::Result<()> {
    let opts = Gamma2Options::default();

    let corner = RealMatrix::from_rows(&[[1.0, 0.0], [1.0, 1.0]]);
    let f = gamma2_upper(&corner, &opts)?;
    let check = verify_factorization(&corner, &f, 1e-9)?;
    println!("[[1,0],[1,1]]: gamma = {:.9} (2/sqrt(3) = {:.9}), valid = {}", f.gamma, 2.0 / 3f64.sqrt(), check.valid);

    let h = RealMatrix::from_rows(&[
        [1.0, 1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ]);
    let b = gamma2_bracket(&h, &opts, 1_000_000)?;
    println!("Hadamard 4x4: {:.6} <= gamma2 <= {:.6} ({:?})", b.lower, b.upper, b.lower_witness);
    Ok(())
}

#[allow(dead_code)]
fn main() -> blocky::Result<()> {
    run_example()
}
