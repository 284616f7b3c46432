use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{DirectedGraph, Edge, NodeLabels};
use crate::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct EdgeListOptions {
    /// Node count; only valid when ids are integers. Ids `0..n_hint` absent
    /// from the file become isolated nodes.
    pub n_hint: Option<usize>,
    /// Sum the weights of repeated (src, dst) rows instead of rejecting them.
    pub merge_parallel: bool,
}

/// Dense id ↔ original (file) id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdMap {
    original: Vec<String>,
    dense: HashMap<String, usize>,
}

impl IdMap {
    fn from_sorted(original: Vec<String>) -> Self {
        let dense = original
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Self { original, dense }
    }

    /// Identity map `0..n`.
    pub fn identity(n: usize) -> Self {
        Self::from_sorted((0..n).map(|i| i.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    pub fn dense(&self, original: &str) -> Option<usize> {
        self.dense.get(original).copied()
    }

    pub fn original(&self, dense: usize) -> &str {
        &self.original[dense]
    }
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: DirectedGraph,
    pub ids: IdMap,
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(file))
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read_rows(path: &Path, width: usize) -> Result<Vec<(u64, Vec<String>)>> {
    let mut rows = Vec::new();
    for record in reader(path)?.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != width {
            return Err(parse_err(
                path,
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        rows.push((line, record.iter().map(str::to_owned).collect()));
    }
    Ok(rows)
}

/// Reads a `src,dst,weight` file. An optional header row is recognised by a
/// non-numeric last field. Ids are compacted to `0..n` in numeric order when
/// every id is an integer and in lexicographic order otherwise.
pub fn load_edge_list(path: &Path, opts: &EdgeListOptions) -> Result<LoadedGraph> {
    let mut rows = read_rows(path, 3)?;
    if let Some((_, first)) = rows.first() {
        if first[2].parse::<f64>().is_err() {
            rows.remove(0);
        }
    }

    let mut raw: Vec<(u64, String, String, f64)> = Vec::with_capacity(rows.len());
    for (line, r) in rows {
        let w: f64 = r[2]
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad weight `{}`", r[2])))?;
        if !w.is_finite() {
            return Err(parse_err(path, line, "non-finite weight"));
        }
        if r[0].is_empty() || r[1].is_empty() {
            return Err(parse_err(path, line, "empty node id"));
        }
        raw.push((line, r[0].clone(), r[1].clone(), w));
    }

    let ids = compact_ids(path, &raw, opts.n_hint)?;

    let mut merged: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    for (order, (_, s, d, w)) in raw.iter().enumerate() {
        if s == d {
            return Err(Error::SelfLoop(s.clone()));
        }
        let key = (ids.dense[s], ids.dense[d]);
        match merged.get_mut(&key) {
            Some(entry) if opts.merge_parallel => entry.0 += w,
            Some(_) => {
                return Err(Error::DuplicateEdge {
                    src: s.clone(),
                    dst: d.clone(),
                })
            }
            None => {
                if *w == 0.0 && !opts.merge_parallel {
                    return Err(Error::ZeroWeight {
                        src: s.clone(),
                        dst: d.clone(),
                    });
                }
                merged.insert(key, (*w, order));
            }
        }
    }

    // Keep file order; merged rows that cancel out are dropped.
    let mut edges: Vec<(usize, Edge)> = merged
        .into_iter()
        .filter(|(_, (w, _))| *w != 0.0)
        .map(|((s, d), (w, order))| (order, Edge::new(s, d, w)))
        .collect();
    edges.sort_by_key(|(order, _)| *order);
    let graph = DirectedGraph::new(ids.len(), edges.into_iter().map(|(_, e)| e).collect())?;
    Ok(LoadedGraph { graph, ids })
}

fn compact_ids(
    path: &Path,
    raw: &[(u64, String, String, f64)],
    n_hint: Option<usize>,
) -> Result<IdMap> {
    let mut names: Vec<&String> = raw.iter().flat_map(|(_, s, d, _)| [s, d]).collect();
    names.sort();
    names.dedup();
    let numeric: Option<Vec<u64>> = names.iter().map(|s| s.parse::<u64>().ok()).collect();
    match (numeric, n_hint) {
        (Some(mut nums), hint) => {
            nums.sort_unstable();
            nums.dedup();
            if let Some(n) = hint {
                if let Some(&max) = nums.last() {
                    if max as usize >= n {
                        return Err(Error::NodeOutOfRange {
                            id: max as usize,
                            n,
                        });
                    }
                }
                return Ok(IdMap::identity(n));
            }
            if nums.is_empty() {
                return Err(parse_err(path, 0, "edge list is empty"));
            }
            Ok(IdMap::from_sorted(
                nums.into_iter().map(|x| x.to_string()).collect(),
            ))
        }
        (None, Some(_)) => Err(Error::InvalidConfig(
            "a node count hint requires integer node ids".into(),
        )),
        (None, None) => Ok(IdMap::from_sorted(names.into_iter().cloned().collect())),
    }
}

/// Reads `node_id,class_index` rows; every node of `ids` must be labelled.
pub fn load_labels(path: &Path, ids: &IdMap) -> Result<NodeLabels> {
    let mut rows = read_rows(path, 2)?;
    if let Some((_, first)) = rows.first() {
        if first[1].parse::<usize>().is_err() {
            rows.remove(0);
        }
    }
    let mut labels = vec![None; ids.len()];
    for (line, r) in rows {
        let node = ids
            .dense(&r[0])
            .ok_or_else(|| parse_err(path, line, format!("unknown node `{}`", r[0])))?;
        let class: usize = r[1]
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad class index `{}`", r[1])))?;
        if labels[node].replace(class).is_some() {
            return Err(parse_err(
                path,
                line,
                format!("node `{}` labelled twice", r[0]),
            ));
        }
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            l.ok_or_else(|| parse_err(path, 0, format!("node `{}` has no label", ids.original(i))))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NodeLabels::new(labels))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_edge_list(path: &Path, g: &DirectedGraph, ids: &IdMap) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "src,dst,weight").map_err(io)?;
    for e in g.edges() {
        writeln!(
            w,
            "{},{},{}",
            ids.original(e.src),
            ids.original(e.dst),
            e.weight
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_labels(path: &Path, labels: &NodeLabels, ids: &IdMap) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "node_id,class_index").map_err(io)?;
    for (i, l) in labels.labels().iter().enumerate() {
        writeln!(w, "{},{}", ids.original(i), l).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_id_map(path: &Path, ids: &IdMap) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "original_id,dense_id").map_err(io)?;
    for i in 0..ids.len() {
        writeln!(w, "{},{}", ids.original(i), i).map_err(io)?;
    }
    w.flush().map_err(io)
}
