pub mod arith;
pub mod lattice;
pub mod linalg;
pub mod diff_field;
pub mod tower;
pub mod splitting;
pub mod cli;
