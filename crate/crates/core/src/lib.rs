pub mod error;
pub mod formula;
pub mod harness;
pub mod lattice;
pub mod matching;
pub mod render;
