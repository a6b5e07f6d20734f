pub mod cli;
pub mod determinize;
pub mod dot;
pub mod equivalence;
pub mod graph;
pub mod harness;
pub mod model;
pub mod mutants;
pub mod refusal;
pub mod region;
pub mod synth;
pub mod testcase;
pub mod tester;
pub mod trrg;
