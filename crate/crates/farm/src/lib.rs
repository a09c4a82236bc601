//! Compute farm: workers that poll a shared store for machines needing
//! cycles, plus a TCP migration protocol between farms.

mod config;
mod error;
mod farm;
mod wire;

pub use config::Config;
pub use error::{FarmError, Result};
pub use farm::{claim, migrate_graph, poll_candidates, process_one, Farm, Session, POLL_QUERY};
pub use wire::{handle_conn, send_graph, IO_TIMEOUT};
