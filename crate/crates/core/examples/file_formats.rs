// Reading and writing matrices, decompositions, and factorizations.
//
// ```bash
// cargo run --example file_formats
// ```

use blocky::factorize::{gamma2_upper, Gamma2Options};
use blocky::format::{
    decomposition_to_json, factorization_to_json, matrix_to_text, parse_decomposition, parse_factorization,
    parse_matrix, MatrixJson,
};
use blocky::partition::greedy_l1_decompose;

pub fn run_example() -> blocky::Result<()> {
    let text = "# a corner\n2 2 int\n1 0\n1 1\n";
    let a = parse_matrix(text)?;
    println!("{}", serde_json::to_string(&MatrixJson::from_data(&a))?);
    print!("{}", matrix_to_text(&a));

    let ints = a.to_int()?;
    let d = greedy_l1_decompose(&ints);
    let json = decomposition_to_json(&d);
    assert_eq!(parse_decomposition(&json)?, d);
    println!("{json}");

    let f = gamma2_upper(&a.to_real(), &Gamma2Options::default())?;
    let json = factorization_to_json(&f);
    let back = parse_factorization(&json, ints.cols())?;
    assert_eq!(back.u, f.u);
    println!("factorization with gamma {:.6} survives a round trip", back.gamma);
    Ok(())
}

#[allow(dead_code)]
fn main() -> blocky::Result<()> {
    run_example()
}
