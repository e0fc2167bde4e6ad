//! Runs every example so the documented entry points stay working.

mod block_complexity_oracle {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/block_complexity_oracle.rs"));
}

#[test]
fn block_complexity_oracle() {
    block_complexity_oracle::run_example().unwrap();
}

mod blocky_basics {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/blocky_basics.rs"));
}

#[test]
fn blocky_basics() {
    blocky_basics::run_example().unwrap();
}

mod convolution_matrices {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/convolution_matrices.rs"));
}

#[test]
fn convolution_matrices() {
    convolution_matrices::run_example().unwrap();
}

mod decompose_pipeline {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/decompose_pipeline.rs"));
}

#[test]
fn decompose_pipeline() {
    decompose_pipeline::run_example().unwrap();
}

mod file_formats {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/file_formats.rs"));
}

#[test]
fn file_formats() {
    file_formats::run_example().unwrap();
}

mod gamma2_norm {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/gamma2_norm.rs"));
}

#[test]
fn gamma2_norm() {
    gamma2_norm::run_example().unwrap();
}

mod littlestone_dimension {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/littlestone_dimension.rs"));
}

#[test]
fn littlestone_dimension() {
    littlestone_dimension::run_example().unwrap();
}

mod partition_lemmas {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/partition_lemmas.rs"));
}

#[test]
fn partition_lemmas() {
    partition_lemmas::run_example().unwrap();
}

mod reproduction_suite {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/reproduction_suite.rs"));
}

#[test]
fn reproduction_suite() {
    reproduction_suite::run_example().unwrap();
}

mod stabilizers {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/stabilizers.rs"));
}

#[test]
fn stabilizers() {
    stabilizers::run_example().unwrap();
}
