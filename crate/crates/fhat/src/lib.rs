//! Compiler and virtual machine for RDF-encoded programs: lowers the
//! object language onto instruction graphs and executes them against a
//! quad store.

mod compile;
mod error;
mod instantiate;
mod lower;
mod machine;
mod memo;
mod ops;
mod perm;
mod state;

pub use compile::{compile_api, compile_method, compile_statements, method_uri};
pub use error::{FhatError, Result};
pub use instantiate::{fresh_object_uri, instantiate, instantiate_as};
pub use lower::{lower_path, PathStep};
pub use machine::{boot, boot_invoke, graph_of, resolve_method, run, step, Mode};
pub use memo::{memo_lookup, memo_record};
pub use ops::{decode, Chain, DecodedInst, Op, INSTRUCTION_KINDS};
pub use perm::{can_write, mark_spawned};
pub use state::{
    erase_state, find_home, load_state, singleton, store_state, write_state, Fault, Frame,
    RvmState, ValueSet,
};
