// The three combinatorial building blocks: row-l1 decomposition, the
// subtract-the-average norm drop, and the greedy column partition.
//
// ```bash
// cargo run --example partition_lemmas
// ```

use blocky::matrix::IntMatrix;
use blocky::partition::{greedy_l1_decompose, greedy_partition, subtract_average, DELTA_GRID};

pub fn run_example() -> blocky::Result<()> {
    let a = IntMatrix::from_rows(&[[2, 0, -1], [0, 1, 1]]);
    let sum = greedy_l1_decompose(&a);
    println!("greedy l1: {} terms (bound {})", sum.len(), 2 * a.max_row_l1());
    assert_eq!(sum.evaluate(), a);

    let vs = [vec![1.0, 0.0], vec![0.0, 1.0], vec![0.8, 0.6]];
    let split = subtract_average(&vs, 1.0)?;
    println!(
        "average {:?}, c = {:.4}, kept {:?} (guaranteed at least {:.3})",
        split.average, split.norm_of_average, split.kept, split.size_bound
    );

    let b = IntMatrix::from_rows(&[[1, 1, 0, 2, 1], [0, 3, 3, 3, 0], [1, 0, 1, 0, 1]]);
    let p = greedy_partition(&b)?;
    for c in &p.classes {
        println!("class: row {} = {} on columns {:?}", c.row, c.value, c.columns);
    }
    println!(
        "max density sum {:.4} <= ln|Y| + 1 = {:.4}; bound violations: {:?}",
        p.max_harmonic_sum(&b),
        p.harmonic_bound(),
        p.check_density_bound(&b, &DELTA_GRID)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> blocky::Result<()> {
    run_example()
}
