pub mod cli;
pub mod elliptope;
pub mod events;
pub mod lp;
pub mod polytope;
pub mod quantum;
pub mod raffles;
pub mod rational;
