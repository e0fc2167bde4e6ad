// Cyclic convolution matrices: subgroup indicators are blocky, other sets
// need more terms.
//
// ```bash
// cargo run --example convolution_matrices
// ```

use blocky::blocky::is_blocky;
use blocky::generate::{generate, GeneratorSpec};
use blocky::pipeline::{decompose, DecomposeConfig};

pub fn run_example() -> blocky::Result<()> {
    for support in [vec![0, 2, 4], vec![0, 1], vec![1, 2, 4]] {
        let spec = GeneratorSpec::ConvolutionCyclic { n: 6, support: support.clone() };
        let m = generate(&spec, 0)?.matrix;
        let blocky = is_blocky(&m)?.is_blocky();
        let (sum, report) = decompose(&m, None, &DecomposeConfig::default())?;
        println!(
            "Z_6, f = 1_{support:?}: blocky = {blocky}, gamma0 = {:.4}, pipeline terms = {}",
            report.gamma0,
            sum.len()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> blocky::Result<()> {
    run_example()
}
