//! Inhomogeneous hypergraph clustering: hyperedges with per-split cut costs,
//! projected onto weighted graphs and partitioned spectrally.

pub mod apps;
pub mod cost;
pub mod error;
pub mod hypergraph;
pub mod io;
pub mod lp;
pub mod minimax;
pub mod oracle;
pub mod par;
pub mod project;
pub mod spectral;

pub use cost::{CostKind, CutCost};
pub use error::{Error, Result};
pub use hypergraph::{CutSelection, Hyperedge, Hypergraph, VertexId};
pub use par::Execution;
pub use project::{EdgeProjection, ProjectedGraph, ProjectionMethod};
