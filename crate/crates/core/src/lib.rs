pub mod algebra;
pub mod automorphism;
pub mod cli;
pub mod graph;
pub mod grassmann;
pub mod reconstruct;
pub mod symplectic;
pub mod verify;
