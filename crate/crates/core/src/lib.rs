//! Explorability of pushdown automata: runs, exact membership, the
//! token game and its strategies, and the witness families.

pub mod error;
pub mod pda;
pub mod run;
pub mod dfa;
pub mod grammar;
pub mod turing;
pub mod oracles;
pub mod constructions;
pub mod invalc;
pub mod game;
pub mod strategy;
pub mod families;
pub mod interactive;
pub mod dot;
pub mod experiment;
