// Running part of the reproduction battery and writing its plot tables.
//
// ```bash
// cargo run --release --example reproduction_suite
// ```

use blocky::suite::{run_suite, RunConfig};

pub fn run_example() -> blocky::Result<()> {
    let dir = std::env::temp_dir().join("blocky-suite-example");
    let config = RunConfig {
        criteria: vec![1, 4, 5, 10],
        out_dir: Some(dir.clone()),
        ..RunConfig::default()
    };
    let report = run_suite(&config)?;
    for c in &report.criteria {
        println!("{c}");
    }
    for t in &report.tables {
        println!("wrote {}/{}.tsv ({} rows)", dir.display(), t.name, t.rows.len());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> blocky::Result<()> {
    run_example()
}
