//! In-memory named-graph RDF store with a SPARQL-subset engine and
//! N-Quads persistence.

pub mod error;
pub mod nquads;
pub mod query;
pub mod store;
pub mod term;
pub mod vocab;

pub use error::{Result, StoreError};
pub use nquads::{
    load_store, parse_line, parse_nquads, serialize_graph, serialize_quads, serialize_store,
};
pub use query::{
    ask, parse_query, parse_update, select, update, PatTerm, QuadPattern, SelectQuery, Solution,
    UpdateOp,
};
pub use store::{GraphMeta, GraphStore, SharedStore};
pub use term::{Quad, Term};
