//! Text and JSON encodings of graphs.
//!
//! Text form: a `d=<int>` header followed by one edge per line, `i -> j` for
//! directed and `i -- j` (with `i < j`) for undirected edges. Blank lines and
//! lines starting with `#` are skipped on input.

use serde::{Deserialize, Serialize};

use super::Pdag;
use crate::error::{Error, Result};
use crate::NodeId;

#[derive(Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub d: usize,
    pub directed: Vec<[NodeId; 2]>,
    pub undirected: Vec<[NodeId; 2]>,
}

impl From<&Pdag> for GraphJson {
    fn from(g: &Pdag) -> Self {
        GraphJson {
            d: g.d(),
            directed: g.directed_edges().into_iter().map(|(a, b)| [a, b]).collect(),
            undirected: g.undirected_edges().into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl TryFrom<GraphJson> for Pdag {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Pdag> {
        let directed: Vec<_> = j.directed.iter().map(|e| (e[0], e[1])).collect();
        let undirected: Vec<_> = j.undirected.iter().map(|e| (e[0], e[1])).collect();
        Pdag::from_edges(j.d, &directed, &undirected)
    }
}

pub fn to_text(g: &Pdag) -> String {
    let mut out = format!("d={}\n", g.d());
    for (a, b) in g.directed_edges() {
        out.push_str(&format!("{a} -> {b}\n"));
    }
    for (a, b) in g.undirected_edges() {
        out.push_str(&format!("{a} -- {b}\n"));
    }
    out
}

pub fn from_text(s: &str) -> Result<Pdag> {
    let mut lines = s
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing `d=` header".into()))?;
    let d = header
        .strip_prefix("d=")
        .and_then(|v| v.trim().parse::<usize>().ok())
        .ok_or_else(|| Error::Parse(format!("bad header line `{header}`")))?;
    let mut directed = Vec::new();
    let mut undirected = Vec::new();
    for line in lines {
        let (list, sep) = if line.contains("->") {
            (&mut directed, "->")
        } else if line.contains("--") {
            (&mut undirected, "--")
        } else {
            return Err(Error::Parse(format!("bad edge line `{line}`")));
        };
        let mut parts = line.splitn(2, sep).map(|p| p.trim().parse::<NodeId>());
        match (parts.next(), parts.next()) {
            (Some(Ok(a)), Some(Ok(b))) => list.push((a, b)),
            _ => return Err(Error::Parse(format!("bad edge line `{line}`"))),
        }
    }
    Pdag::from_edges(d, &directed, &undirected)
}

pub fn to_json(g: &Pdag) -> String {
    serde_json::to_string(&GraphJson::from(g)).expect("graph serialization cannot fail")
}

pub fn from_json(s: &str) -> Result<Pdag> {
    let j: GraphJson = serde_json::from_str(s)?;
    Pdag::try_from(j)
}
