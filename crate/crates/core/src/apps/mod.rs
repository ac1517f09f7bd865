pub mod motif;
pub mod rank;
pub mod subspace;
