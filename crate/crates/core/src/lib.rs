//! Ordered depth-first and breadth-first search by incoming-arc elimination.
//!
//! When a vertex is visited, all arcs pointing into it are unlinked from their
//! sources' adjacency lists in one parallel step. The traversal drivers stay
//! sequential but never meet a dead arc, so with `p` processors a traversal
//! costs `O(m/p + n)` steps and one synchronization per visited vertex.
//!
//! ```
//! use arcelim::{graph::sample_graph, ElimGraph, ParEngine, traversal};
//!
//! let g = sample_graph();
//! let mut engine = ParEngine::simulated(4).unwrap();
//! let mut eg = ElimGraph::build(&g, &mut engine).unwrap();
//! let r = traversal::dfs(&mut eg, 0, 0, &mut engine).unwrap();
//! assert_eq!(r.visit_order(), vec![0, 1, 5, 7, 8, 4, 3, 6, 2]);
//! ```

pub mod bench;
pub mod elim;
pub mod engine;
pub mod error;
pub mod generators;
pub mod graph;
pub mod oracle;
pub mod traversal;

pub use elim::ElimGraph;
pub use engine::{Backend, CostReport, ParEngine};
pub use error::{Error, Result};
pub use graph::{ArcRef, Graph};
pub use traversal::{Kind, TraversalResult};
