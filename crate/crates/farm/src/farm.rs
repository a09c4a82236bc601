//! The compute farm: poll for runnable machines, claim them, execute a
//! budgeted session, and push suspended machines to a peer.

use std::net::{TcpListener, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use fhat::{load_state, Mode};
use quadstore::{parse_query, select, serialize_graph, vocab, Quad, SharedStore, Term};

use crate::config::Config;
use crate::error::Result;
use crate::wire;

/// Poll query selecting every machine that is asking for cycles.
pub const POLL_QUERY: &str = r#"SELECT ?x
  WHERE {
    ?x <rdf:type> <rvm:RVM> .
    ?x <rvm:needsProcess> "true"^^xsd:boolean }"#;

/// Machines currently advertising that they need cycles.
pub fn poll_candidates(store: &quadstore::GraphStore) -> Vec<Term> {
    let q = parse_query(POLL_QUERY).expect("poll query parses");
    select(store, &q)
        .unwrap_or_default()
        .into_iter()
        .filter_map(|mut sol| sol.remove("x"))
        .collect()
}

/// Atomically claim a machine by flipping its needsProcess flag; only
/// one contender wins.
pub fn claim(store: &SharedStore, machine: &Term) -> bool {
    let home = match fhat::find_home(&store.read(), machine) {
        Some(h) => h,
        None => return false,
    };
    let np = Term::uri(vocab::RVM_NEEDS_PROCESS);
    let expect = Quad::new(machine.clone(), np.clone(), Term::boolean(true), home.clone());
    let replace = Quad::new(machine.clone(), np, Term::boolean(false), home);
    store.compare_and_set(&expect, replace).unwrap_or(false)
}

/// Outcome of one run session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Session {
    Halted,
    Faulted(fhat::Fault),
    /// Budget exhausted with work remaining.
    Suspended,
}

/// Run a claimed machine for one cycle budget. The worker holds the
/// store's writer lock for the whole session.
pub fn process_one(store: &SharedStore, machine: &Term, budget: i64) -> Result<Session> {
    let mut s = store.write();
    let mut st = load_state(&s, machine)?;
    st.cycles_remaining = budget;
    st.needs_process = true;
    fhat::run(&mut s, &mut st, Mode::Fhat)?;
    Ok(if let Some(f) = st.fault {
        Session::Faulted(f)
    } else if st.program_location.is_none() {
        Session::Halted
    } else {
        Session::Suspended
    })
}

/// Serialize a graph, push it to the peer, and delete it locally once
/// acknowledged. The writer lock is held throughout so local workers
/// cannot race the handoff.
pub fn migrate_graph(store: &SharedStore, graph: &Term, peer: &str) -> Result<()> {
    let mut s = store.write();
    let payload = serialize_graph(&s, graph);
    let count = s.graph_len(graph);
    wire::send_graph(peer, graph, &payload, count)?;
    s.drop_graph(graph);
    Ok(())
}

pub struct Farm {
    store: SharedStore,
    cfg: Config,
    local_addr: std::net::SocketAddr,
    shutdown: Arc<AtomicBool>,
    handles: Vec<JoinHandle<()>>,
}

impl Farm {
    /// Bind the listener and spawn the worker threads.
    pub fn start(store: SharedStore, cfg: Config) -> Result<Farm> {
        let listener = TcpListener::bind(
            cfg.listen
                .to_socket_addrs()?
                .next()
                .ok_or_else(|| crate::FarmError::Config("unresolvable listen address".into()))?,
        )?;
        let local_addr = listener.local_addr()?;
        listener.set_nonblocking(true)?;
        let shutdown = Arc::new(AtomicBool::new(false));
        let mut handles = Vec::new();

        {
            let store = store.clone();
            let cfg = cfg.clone();
            let shutdown = shutdown.clone();
            handles.push(thread::spawn(move || {
                while !shutdown.load(Ordering::Relaxed) {
                    match listener.accept() {
                        Ok((stream, _)) => {
                            let _ = stream.set_nonblocking(false);
                            let _ = wire::handle_conn(stream, &store, &cfg);
                        }
                        Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                            thread::sleep(Duration::from_millis(5));
                        }
                        Err(_) => break,
                    }
                }
            }));
        }

        for _ in 0..cfg.max_workers.max(1) {
            let store = store.clone();
            let cfg = cfg.clone();
            let shutdown = shutdown.clone();
            handles.push(thread::spawn(move || {
                while !shutdown.load(Ordering::Relaxed) {
                    let candidates = poll_candidates(&store.read());
                    for m in candidates {
                        if shutdown.load(Ordering::Relaxed) {
                            return;
                        }
                        if !claim(&store, &m) {
                            continue;
                        }
                        // suspended machines re-advertise needsProcess and
                        // get picked up again next poll; migration only
                        // happens on explicit request
                        let _ = process_one(&store, &m, cfg.cycle_budget);
                    }
                    thread::sleep(Duration::from_millis(cfg.poll_ms));
                }
            }));
        }

        Ok(Farm {
            store,
            cfg,
            local_addr,
            shutdown,
            handles,
        })
    }

    pub fn local_addr(&self) -> std::net::SocketAddr {
        self.local_addr
    }

    pub fn store(&self) -> &SharedStore {
        &self.store
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    pub fn stop(mut self) {
        self.shutdown.store(true, Ordering::Relaxed);
        for h in self.handles.drain(..) {
            let _ = h.join();
        }
    }
}

impl Drop for Farm {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::Relaxed);
        for h in self.handles.drain(..) {
            let _ = h.join();
        }
    }
}
