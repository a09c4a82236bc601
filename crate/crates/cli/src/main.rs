//! `rvm`: command-line front door for the RDF computing stack.
//!
//! Exit codes: 0 success, 1 user error, 2 store/protocol fault.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use quadstore::{GraphStore, SharedStore, Term};

#[derive(Parser)]
#[command(name = "rvm", version, about = "RDF virtual machine toolchain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a .neno source file into an API graph.
    Compile {
        file: PathBuf,
        /// Output N-Quads file for the API graph.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Create an object of a compiled class inside a store.
    Instantiate {
        /// N-Quads file holding the API graph.
        #[arg(long)]
        api: PathBuf,
        /// Class URI, `<...>` or bare.
        #[arg(long)]
        class: String,
        #[arg(long)]
        store: PathBuf,
    },
    /// Create a machine that will invoke a method on an object.
    Invoke {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        object: String,
        #[arg(long)]
        method: String,
        /// Arguments in N-Quads term syntax, one per parameter.
        #[arg(long = "arg")]
        args: Vec<String>,
    },
    /// Execute a machine until it halts, faults or exhausts cycles.
    Run {
        #[arg(long)]
        store: PathBuf,
        /// Machine URI; defaults to the first poll result.
        #[arg(long)]
        rvm: Option<String>,
        #[arg(long, default_value = "fhat")]
        mode: String,
        #[arg(long, default_value_t = 10_000)]
        max_cycles: i64,
    },
    /// Serve a compute farm until interrupted.
    Farm {
        #[arg(long)]
        config: PathBuf,
        /// Optional initial store contents.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Push a named graph to a peer farm.
    Migrate {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        graph: String,
        /// Peer address, host:port.
        #[arg(long)]
        to: String,
    },
    /// Evaluate a SELECT or ASK query against a store.
    Query {
        #[arg(long)]
        store: PathBuf,
        query: String,
    },
    /// Print a store (or one graph) as canonical N-Quads.
    Dump {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        graph: Option<String>,
    },
}

/// Error carrying its intended exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn user(message: impl Into<String>) -> CliError {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    fn fault(message: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind::*;
            if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::user(format!("cannot read {}: {e}", path.display())))
}

fn load_store(path: &Path) -> Result<GraphStore> {
    if !path.exists() {
        return Ok(GraphStore::new());
    }
    quadstore::load_store(&read_file(path)?)
        .map_err(|e| CliError::user(format!("{}: {e}", path.display())))
}

fn save_store(path: &Path, store: &GraphStore) -> Result<()> {
    std::fs::write(path, quadstore::serialize_store(store))
        .map_err(|e| CliError::fault(format!("cannot write {}: {e}", path.display())))
}

/// Accept `<uri>` or a bare URI.
fn parse_uri(s: &str) -> Term {
    let trimmed = s
        .strip_prefix('<')
        .and_then(|t| t.strip_suffix('>'))
        .unwrap_or(s);
    Term::uri(trimmed)
}

/// Parse one term in N-Quads syntax by wrapping it in a dummy quad.
fn parse_term(s: &str) -> Result<Term> {
    let line = format!("<x:s> <x:p> {s} .");
    quadstore::parse_line(&line, 1)
        .map(|q| q.o)
        .map_err(|_| CliError::user(format!("malformed term: {s}")))
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Compile { file, output } => {
            let source = read_file(&file)?;
            let unit = neno::parse(&source).map_err(|e| CliError::user(e.to_string()))?;
            let checked = neno::typecheck(&unit).map_err(|e| CliError::user(e.to_string()))?;
            let quads =
                fhat::compile_api(&checked).map_err(|e| CliError::fault(e.to_string()))?;
            std::fs::write(&output, quadstore::serialize_quads(&quads))
                .map_err(|e| CliError::fault(format!("cannot write {}: {e}", output.display())))?;
            Ok(())
        }
        Command::Instantiate { api, class, store } => {
            let mut s = load_store(&store)?;
            for q in quadstore::parse_nquads(&read_file(&api)?)
                .map_err(|e| CliError::user(format!("{}: {e}", api.display())))?
            {
                s.insert(q).map_err(|e| CliError::fault(e.to_string()))?;
            }
            let obj = fhat::instantiate(&mut s, &parse_uri(&class))
                .map_err(|e| CliError::user(e.to_string()))?;
            save_store(&store, &s)?;
            println!("{}", obj.canonical());
            Ok(())
        }
        Command::Invoke {
            store,
            object,
            method,
            args,
        } => {
            let mut s = load_store(&store)?;
            let obj = parse_uri(&object);
            let args = args
                .iter()
                .map(|a| parse_term(a).map(fhat::singleton))
                .collect::<Result<Vec<_>>>()?;
            let machine = fhat::fresh_object_uri();
            let st = fhat::boot_invoke(&s, machine.clone(), &obj, &method, args, 0)
                .map_err(|e| CliError::user(e.to_string()))?;
            fhat::write_state(&mut s, &st).map_err(|e| CliError::fault(e.to_string()))?;
            save_store(&store, &s)?;
            println!("{}", machine.canonical());
            Ok(())
        }
        Command::Run {
            store,
            rvm,
            mode,
            max_cycles,
        } => {
            let mode = match mode.as_str() {
                "fhat" => fhat::Mode::Fhat,
                "r-fhat" => fhat::Mode::RFhat,
                other => return Err(CliError::user(format!("unknown mode: {other}"))),
            };
            let mut s = load_store(&store)?;
            let machine = match rvm {
                Some(u) => parse_uri(&u),
                None => farm::poll_candidates(&s)
                    .into_iter()
                    .next()
                    .ok_or_else(|| CliError::user("no runnable RVM"))?,
            };
            let mut st = fhat::load_state(&s, &machine)
                .map_err(|e| CliError::user(e.to_string()))?;
            st.cycles_remaining = max_cycles;
            st.needs_process = true;
            fhat::run(&mut s, &mut st, mode).map_err(|e| CliError::fault(e.to_string()))?;
            save_store(&store, &s)?;
            let outcome = match (st.fault, st.program_location.is_some()) {
                (Some(f), _) => format!("faulted {f}"),
                (None, true) => "suspended".to_string(),
                (None, false) => "halted".to_string(),
            };
            match st.operand_stack.last() {
                Some(top) if top.len() == 1 => {
                    println!("{outcome}\t{}", top.iter().next().unwrap().canonical())
                }
                Some(top) => {
                    let terms: Vec<String> = top.iter().map(Term::canonical).collect();
                    println!("{outcome}\t{{{}}}", terms.join(", "))
                }
                None => println!("{outcome}"),
            }
            Ok(())
        }
        Command::Farm { config, store } => {
            let cfg = farm::Config::load(&config).map_err(|e| CliError::user(e.to_string()))?;
            let s = match &store {
                Some(p) => load_store(p)?,
                None => GraphStore::new(),
            };
            let farm = farm::Farm::start(SharedStore::new(s), cfg)
                .map_err(|e| CliError::fault(e.to_string()))?;
            eprintln!("farm listening on {}", farm.local_addr());
            loop {
                std::thread::sleep(std::time::Duration::from_secs(3600));
            }
        }
        Command::Migrate { store, graph, to } => {
            let s = SharedStore::new(load_store(&store)?);
            farm::migrate_graph(&s, &parse_uri(&graph), &to)
                .map_err(|e| CliError::fault(e.to_string()))?;
            save_store(&store, &s.read())?;
            Ok(())
        }
        Command::Query { store, query } => {
            let s = load_store(&store)?;
            let q = quadstore::parse_query(&query).map_err(|e| CliError::user(e.to_string()))?;
            if q.is_ask {
                let hit = quadstore::ask(&s, &q).map_err(|e| CliError::user(e.to_string()))?;
                println!("{hit}");
            } else {
                let sols =
                    quadstore::select(&s, &q).map_err(|e| CliError::user(e.to_string()))?;
                for sol in sols {
                    let row: Vec<String> = q
                        .vars
                        .iter()
                        .map(|v| sol.get(v).map(Term::canonical).unwrap_or_default())
                        .collect();
                    println!("{}", row.join("\t"));
                }
            }
            Ok(())
        }
        Command::Dump { store, graph } => {
            let s = load_store(&store)?;
            let text = match graph {
                Some(g) => quadstore::serialize_graph(&s, &parse_uri(&g)),
                None => quadstore::serialize_store(&s),
            };
            print!("{text}");
            Ok(())
        }
    }
}
