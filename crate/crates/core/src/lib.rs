pub mod abelian;
pub mod cli;
pub mod arith;
pub mod error;
pub mod exactla;
pub mod graphgen;
pub mod invariants;
pub mod montecarlo;
pub mod theory;
