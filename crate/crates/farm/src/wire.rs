//! Migration wire protocol.
//!
//! Request:  `MIGRATE <graph-uri> <quad-count>\n` followed by that many
//! N-Quads lines and a terminating `END\n`.
//! Response: `ACK <graph-uri>\n` or `ERR <code> <message>\n` with codes
//! `quota`, `parse` and `conflict`. The sender deletes its copy only
//! after the ACK arrives.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::time::Duration;

use quadstore::{parse_line, Quad, SharedStore, Term};

use crate::config::Config;
use crate::error::{FarmError, Result};

pub const IO_TIMEOUT: Duration = Duration::from_secs(5);

/// Push one graph to a peer; on ACK the caller should drop it locally.
pub fn send_graph(peer: &str, graph: &Term, payload: &str, count: usize) -> Result<()> {
    let uri = graph
        .as_uri()
        .ok_or_else(|| FarmError::Protocol("graph name must be a URI".into()))?;
    let stream = TcpStream::connect(peer)?;
    stream.set_read_timeout(Some(IO_TIMEOUT))?;
    stream.set_write_timeout(Some(IO_TIMEOUT))?;
    let mut writer = stream.try_clone()?;
    write!(writer, "MIGRATE <{uri}> {count}\n{payload}END\n")?;
    writer.flush()?;

    let mut reply = String::new();
    BufReader::new(stream).read_line(&mut reply)?;
    let reply = reply.trim_end();
    if let Some(acked) = reply.strip_prefix("ACK ") {
        if acked == format!("<{uri}>") {
            return Ok(());
        }
        return Err(FarmError::Protocol(format!("unexpected ack: {reply}")));
    }
    if let Some(rest) = reply.strip_prefix("ERR ") {
        let (code, message) = rest.split_once(' ').unwrap_or((rest, ""));
        return Err(FarmError::Rejected {
            code: code.to_string(),
            message: message.to_string(),
        });
    }
    Err(FarmError::Protocol(format!("unexpected reply: {reply}")))
}

/// Handle one inbound connection.
pub fn handle_conn(stream: TcpStream, store: &SharedStore, cfg: &Config) -> Result<()> {
    stream.set_read_timeout(Some(IO_TIMEOUT))?;
    stream.set_write_timeout(Some(IO_TIMEOUT))?;
    let mut writer = stream.try_clone()?;
    let mut reader = BufReader::new(stream);

    let mut header = String::new();
    reader.read_line(&mut header)?;
    let header = header.trim_end();
    let refuse = |writer: &mut TcpStream, code: &str, msg: &str| -> Result<()> {
        writeln!(writer, "ERR {code} {msg}")?;
        Ok(())
    };

    let Some(rest) = header.strip_prefix("MIGRATE ") else {
        return refuse(&mut writer, "parse", "expected MIGRATE header");
    };
    let Some((uri_part, count_part)) = rest.rsplit_once(' ') else {
        return refuse(&mut writer, "parse", "malformed MIGRATE header");
    };
    let Some(uri) = uri_part.strip_prefix('<').and_then(|u| u.strip_suffix('>')) else {
        return refuse(&mut writer, "parse", "graph URI must be <...>");
    };
    let Ok(count) = count_part.parse::<usize>() else {
        return refuse(&mut writer, "parse", "bad quad count");
    };
    let graph = Term::uri(uri);

    if let Some(quota) = cfg.graph_quota {
        if count > quota {
            return refuse(&mut writer, "quota", "graph exceeds quota");
        }
    }

    let mut quads: Vec<Quad> = Vec::with_capacity(count);
    let mut line_no = 0;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            return refuse(&mut writer, "parse", "connection closed before END");
        }
        let trimmed = line.trim_end();
        if trimmed == "END" {
            break;
        }
        line_no += 1;
        match parse_line(trimmed, line_no) {
            Ok(q) => quads.push(q),
            Err(e) => return refuse(&mut writer, "parse", &e.to_string()),
        }
    }
    if quads.len() != count {
        return refuse(&mut writer, "parse", "quad count mismatch");
    }
    if quads.iter().any(|q| q.g != graph) {
        return refuse(&mut writer, "parse", "quad outside announced graph");
    }

    {
        let mut s = store.write();
        if s.graph_len(&graph) > 0 {
            drop(s);
            return refuse(&mut writer, "conflict", "graph already present");
        }
        if let Some(quota) = cfg.graph_quota {
            s.set_quota(&graph, Some(quota));
        }
        for q in quads {
            if let Err(e) = s.insert(q) {
                drop(s);
                return refuse(&mut writer, "quota", &e.to_string());
            }
        }
    }
    writeln!(writer, "ACK <{uri}>")?;
    Ok(())
}
