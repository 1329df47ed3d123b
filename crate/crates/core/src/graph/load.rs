use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use super::{Graph, GraphError};

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Reject self-loops with an error instead of dropping them.
    pub strict_self_loops: bool,
}

/// Parse a SNAP-style edge list: one `u v` pair per line, `#` comments,
/// blank lines ignored. Node ids are compacted to `0..N` in ascending order
/// of the original ids.
pub fn load_edge_list<R: Read>(source: R, opts: LoadOptions) -> Result<Graph, GraphError> {
    let reader = BufReader::new(source);
    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut ids = BTreeSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(GraphError::Parse {
                line: line_no,
                reason: format!("expected two node ids, got {trimmed:?}"),
            });
        };
        let parse = |s: &str| {
            s.parse::<u64>().map_err(|_| GraphError::Parse {
                line: line_no,
                reason: format!("invalid node id {s:?}"),
            })
        };
        let (u, v) = (parse(a)?, parse(b)?);
        if u == v && opts.strict_self_loops {
            return Err(GraphError::SelfLoop { line: line_no, node: u });
        }
        ids.insert(u);
        ids.insert(v);
        raw.push((u, v));
    }
    if ids.is_empty() {
        return Err(GraphError::Empty);
    }
    let original_ids: Vec<u64> = ids.into_iter().collect();
    let index = |id: u64| original_ids.binary_search(&id).expect("id collected above");
    let edges: Vec<(usize, usize)> = raw.iter().map(|&(u, v)| (index(u), index(v))).collect();
    Graph::from_edges_with_ids(edges, original_ids)
}

pub fn load_edge_list_file(path: &Path, opts: LoadOptions) -> Result<Graph, GraphError> {
    load_edge_list(File::open(path)?, opts)
}
