// Recognising blocky matrices and evaluating signed blocky sums.
//
// ```bash
// cargo run --example blocky_basics
// ```

use blocky::blocky::{is_blocky, BlockyCheck, BlockyMatrix, Sign, SignedBlockySum};
use blocky::matrix::IntMatrix;

pub fn run_example() -> blocky::Result<()> {
    let identity = IntMatrix::identity(3);
    if let BlockyCheck::Blocky(b) = is_blocky(&identity)? {
        println!("identity: blocky with {} rectangles", b.rectangles().len());
    }

    let corner = IntMatrix::from_rows(&[[1, 0], [1, 1]]);
    if let BlockyCheck::Witness { rows, cols } = is_blocky(&corner)? {
        println!("[[1,0],[1,1]]: not blocky, three ones in rows {rows:?} x cols {cols:?}");
    }

    // [[1,0],[1,1]] = [[1,0],[1,0]] + [[0,0],[0,1]]
    let shape = (2, 2);
    let mut sum = SignedBlockySum::new(shape);
    sum.push(Sign::Plus, BlockyMatrix::single(shape, vec![0, 1], vec![0])?)?;
    sum.push(Sign::Plus, BlockyMatrix::single(shape, vec![1], vec![1])?)?;
    assert_eq!(sum.evaluate(), corner);
    println!("two terms reproduce it:\n{}", sum.evaluate());
    Ok(())
}

#[allow(dead_code)]
fn main() -> blocky::Result<()> {
    run_example()
}
