//! Edge-list TSV and interaction JSON-lines formats.
//!
//! Edge list: one `u<TAB>v` pair per line; a line holding a single id
//! declares an isolated node; `#` starts a comment line.

use std::io::{BufRead, Write};

use super::{BuildMode, BuildReport, NetworkBuilder, RawInteraction, SocialNetwork};
use crate::error::{Error, Result};

pub fn read_edge_list<R: BufRead>(reader: R, mode: BuildMode) -> Result<(SocialNetwork, BuildReport)> {
    let mut builder = NetworkBuilder::new();
    read_edge_list_into(reader, &mut builder)?;
    Ok(builder.build(mode))
}

/// Feed an edge list into an existing builder, so extra nodes from other
/// inputs can be declared before building.
pub fn read_edge_list_into<R: BufRead>(reader: R, builder: &mut NetworkBuilder) -> Result<()> {
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        match fields.as_slice() {
            [u] if !u.is_empty() => {
                builder.add_node(u);
            }
            [u, v] if !u.is_empty() && !v.is_empty() => builder.add_pair(u, v),
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected `u<TAB>v`, got {line:?}"),
                })
            }
        }
    }
    Ok(())
}

/// Writes every node as a declaration line in index order, then every edge
/// once. Reading the output back reproduces the same adjacency and indices.
pub fn write_edge_list<W: Write>(net: &SocialNetwork, mut out: W) -> Result<()> {
    writeln!(out, "# nodes={} edges={}", net.n(), net.edge_count())?;
    for u in 0..net.n() {
        writeln!(out, "{}", net.label(u))?;
    }
    for (u, v) in net.edges() {
        writeln!(out, "{}\t{}", net.label(u), net.label(v))?;
    }
    Ok(())
}

pub fn read_interactions<R: BufRead>(reader: R) -> Result<Vec<RawInteraction>> {
    read_jsonl(reader)
}

pub fn write_interactions<W: Write>(events: &[RawInteraction], out: W) -> Result<()> {
    write_jsonl(events, out)
}

/// Parse JSON-lines, skipping blank lines and reporting the line number of
/// the first malformed record.
pub fn read_jsonl<T, R>(reader: R) -> Result<Vec<T>>
where
    T: serde::de::DeserializeOwned,
    R: BufRead,
{
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}

pub fn write_jsonl<T, W>(items: &[T], mut out: W) -> Result<()>
where
    T: serde::Serialize,
    W: Write,
{
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
