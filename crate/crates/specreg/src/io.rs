//! Text formats: edge lists, label files and embedding CSVs.
//!
//! Edge and label files hold one record per line with tab or space
//! separated fields; blank lines and lines starting with `#` are skipped.
//! Node ids that all parse as integers are used as indices directly.
//! Otherwise ids are indexed in order of first appearance and the table is
//! kept in a [`NodeIndex`] so outputs can be written with the original ids.
//!
//! A comment of the form `# nodes <N>` raises the node count of an integer
//! indexed file to at least `N`, which keeps trailing isolated nodes.
//! Biadjacency lists take `# nodes <N> <M>` for the two parts.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use specreg_core::{BipartiteGraph, Embedding, Labels, Matrix, SparseGraph};

use crate::error::{Error, Result};

/// Dense indexing of node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeIndex {
    names: Vec<String>,
    lookup: HashMap<String, usize>,
    numeric: bool,
}

impl NodeIndex {
    /// Ids `0..n`.
    pub fn identity(n: usize) -> Self {
        Self {
            names: (0..n).map(|i| i.to_string()).collect(),
            lookup: HashMap::new(),
            numeric: true,
        }
    }

    /// Ids in the given order.
    pub fn from_names(names: Vec<String>) -> Self {
        let lookup = names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Self {
            names,
            lookup,
            numeric: false,
        }
    }

    fn build(tokens: &[&str], min_nodes: usize) -> Self {
        let numeric: Option<Vec<usize>> = tokens.iter().map(|t| t.parse().ok()).collect();
        match numeric {
            Some(ids) => {
                let n = ids.iter().map(|&i| i + 1).max().unwrap_or(0).max(min_nodes);
                Self::identity(n)
            }
            None => {
                let mut names = Vec::new();
                let mut lookup = HashMap::new();
                for &t in tokens {
                    lookup.entry(t.to_string()).or_insert_with(|| {
                        names.push(t.to_string());
                        names.len() - 1
                    });
                }
                Self {
                    names,
                    lookup,
                    numeric: false,
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Ids are plain integer indices.
    pub fn is_numeric(&self) -> bool {
        self.numeric
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, id: &str) -> Option<usize> {
        if self.numeric {
            id.parse().ok().filter(|&i| i < self.names.len())
        } else {
            self.lookup.get(id).copied()
        }
    }

    /// Prefixes every id, e.g. to tell the two parts of a bipartite graph apart.
    pub fn prefixed(&self, prefix: &str) -> NodeIndex {
        NodeIndex::from_names(self.names.iter().map(|s| format!("{prefix}{s}")).collect())
    }

    /// Concatenation of two tables; ids must not collide.
    pub fn concat(&self, other: &NodeIndex) -> NodeIndex {
        let mut names = self.names.clone();
        names.extend(other.names.iter().cloned());
        NodeIndex::from_names(names)
    }
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: SparseGraph,
    pub nodes: NodeIndex,
}

#[derive(Debug, Clone)]
pub struct LoadedBipartite {
    pub graph: BipartiteGraph,
    pub rows: NodeIndex,
    pub cols: NodeIndex,
}

impl LoadedBipartite {
    /// Ids of the `(n+m)`-node graph: `row:<id>` then `col:<id>`.
    pub fn stacked_nodes(&self) -> NodeIndex {
        self.rows.prefixed("row:").concat(&self.cols.prefixed("col:"))
    }
}

pub(crate) fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

// (line number, fields) for every record line, plus the `# nodes` hint.
fn records(text: &str) -> (Vec<(usize, Vec<&str>)>, (usize, usize)) {
    let mut out = Vec::new();
    let mut min_nodes = (0, 0);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            if words.next() == Some("nodes") {
                let mut next = || words.next().and_then(|w| w.parse().ok()).unwrap_or(0);
                min_nodes = (next(), next());
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        out.push((i + 1, line.split_whitespace().collect()));
    }
    (out, min_nodes)
}

struct RawEdge<'a> {
    src: &'a str,
    dst: &'a str,
    weight: f64,
}

fn raw_edges(text: &str) -> Result<(Vec<RawEdge<'_>>, (usize, usize))> {
    let (lines, min_nodes) = records(text);
    let mut edges = Vec::with_capacity(lines.len());
    for (line, fields) in lines {
        let weight = match fields.len() {
            2 => 1.0,
            3 => fields[2]
                .parse::<f64>()
                .map_err(|_| Error::parse(line, format!("bad weight {:?}", fields[2])))?,
            c => return Err(Error::parse(line, format!("expected 2 or 3 fields, found {c}"))),
        };
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(Error::parse(line, format!("weight {weight} must be finite and nonnegative")));
        }
        for id in &fields[..2] {
            if id.bytes().all(|b| b.is_ascii_digit()) && id.parse::<usize>().is_err() {
                return Err(Error::parse(line, format!("node index {id} overflows")));
            }
        }
        edges.push(RawEdge {
            src: fields[0],
            dst: fields[1],
            weight,
        });
    }
    Ok((edges, min_nodes))
}

/// Undirected weighted graph; duplicate edges are summed.
pub fn parse_edge_list(text: &str) -> Result<LoadedGraph> {
    let (edges, min_nodes) = raw_edges(text)?;
    if edges.is_empty() && min_nodes.0 == 0 {
        return Err(Error::EmptyFile("edge list".into()));
    }
    let tokens: Vec<&str> = edges.iter().flat_map(|e| [e.src, e.dst]).collect();
    let nodes = NodeIndex::build(&tokens, min_nodes.0);
    let triplets = edges
        .iter()
        .filter(|e| e.weight > 0.0)
        .map(|e| (nodes.get(e.src).unwrap(), nodes.get(e.dst).unwrap(), e.weight));
    let graph = SparseGraph::from_edges(nodes.len(), triplets)?;
    Ok(LoadedGraph { graph, nodes })
}

/// Biadjacency list; the two columns index independent node sets.
pub fn parse_bipartite(text: &str) -> Result<LoadedBipartite> {
    let (edges, (min_rows, min_cols)) = raw_edges(text)?;
    if edges.is_empty() {
        return Err(Error::EmptyFile("bipartite edge list".into()));
    }
    let src: Vec<&str> = edges.iter().map(|e| e.src).collect();
    let dst: Vec<&str> = edges.iter().map(|e| e.dst).collect();
    let rows = NodeIndex::build(&src, min_rows);
    let cols = NodeIndex::build(&dst, min_cols);
    let triplets = edges
        .iter()
        .map(|e| (rows.get(e.src).unwrap(), cols.get(e.dst).unwrap(), e.weight));
    let graph = BipartiteGraph::from_edges(rows.len(), cols.len(), triplets)?;
    Ok(LoadedBipartite { graph, rows, cols })
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<LoadedGraph> {
    parse_edge_list(&read(path.as_ref())?)
}

pub fn load_bipartite(path: impl AsRef<Path>) -> Result<LoadedBipartite> {
    parse_bipartite(&read(path.as_ref())?)
}

/// `(node, label)` pairs in file order.
pub fn parse_label_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let (lines, _) = records(text);
    if lines.is_empty() {
        return Err(Error::EmptyFile("label file".into()));
    }
    lines
        .into_iter()
        .map(|(line, f)| match f.as_slice() {
            [node, label] => Ok((node.to_string(), label.to_string())),
            _ => Err(Error::parse(line, format!("expected 2 fields, found {}", f.len()))),
        })
        .collect()
}

// Label values re-indexed in order of first appearance.
fn dense_labels<'a>(values: impl Iterator<Item = &'a str>) -> (Vec<usize>, usize) {
    let mut ids: HashMap<&str, usize> = HashMap::new();
    let out = values
        .map(|v| {
            let next = ids.len();
            *ids.entry(v).or_insert(next)
        })
        .collect();
    (out, ids.len())
}

/// Labels for every node. Integer node ids must cover `0..n` exactly once;
/// other ids are taken in file order.
pub fn parse_labels(text: &str) -> Result<Labels> {
    let pairs = parse_label_pairs(text)?;
    let (dense, k) = dense_labels(pairs.iter().map(|(_, l)| l.as_str()));
    let numeric: Option<Vec<usize>> = pairs.iter().map(|(n, _)| n.parse().ok()).collect();
    let assignments = match numeric {
        None => dense,
        Some(ids) => {
            let n = ids.len();
            let mut out = vec![usize::MAX; n];
            for (&id, &label) in ids.iter().zip(&dense) {
                if id >= n || out[id] != usize::MAX {
                    return Err(Error::Config(format!(
                        "integer node ids must be a permutation of 0..{n}; got {id}"
                    )));
                }
                out[id] = label;
            }
            out
        }
    };
    Ok(Labels::new(assignments, k)?)
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<Labels> {
    parse_labels(&read(path.as_ref())?)
}

/// Labels aligned to `nodes`, with a mask of the nodes the file covers.
/// Uncovered nodes get label 0.
pub fn parse_labels_for(text: &str, nodes: &NodeIndex) -> Result<(Labels, Vec<bool>)> {
    let pairs = parse_label_pairs(text)?;
    let (dense, k) = dense_labels(pairs.iter().map(|(_, l)| l.as_str()));
    let mut assignments = vec![0; nodes.len()];
    let mut mask = vec![false; nodes.len()];
    for ((node, _), label) in pairs.iter().zip(dense) {
        let i = nodes.get(node).ok_or_else(|| Error::UnknownNode(node.clone()))?;
        if mask[i] {
            return Err(Error::Config(format!("node {node:?} is labelled twice")));
        }
        assignments[i] = label;
        mask[i] = true;
    }
    Ok((Labels::new(assignments, k)?, mask))
}

pub fn load_labels_for(path: impl AsRef<Path>, nodes: &NodeIndex) -> Result<(Labels, Vec<bool>)> {
    parse_labels_for(&read(path.as_ref())?, nodes)
}

fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>> {
    fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// One line per undirected edge, `i <= j`.
pub fn write_edge_list(w: &mut impl Write, g: &SparseGraph, nodes: &NodeIndex) -> std::io::Result<()> {
    writeln!(w, "# nodes {}", g.node_count())?;
    for (i, j, v) in g.edges() {
        if i <= j {
            writeln!(w, "{}\t{}\t{}", nodes.name(i), nodes.name(j), v)?;
        }
    }
    Ok(())
}

pub fn write_bipartite(w: &mut impl Write, b: &BipartiteGraph) -> std::io::Result<()> {
    writeln!(w, "# nodes {} {}", b.left_count(), b.right_count())?;
    for (i, j, v) in b.edges() {
        writeln!(w, "{i}\t{j}\t{v}")?;
    }
    Ok(())
}

pub fn write_labels(w: &mut impl Write, labels: &Labels, nodes: &NodeIndex) -> std::io::Result<()> {
    for (i, &l) in labels.assignments().iter().enumerate() {
        writeln!(w, "{}\t{}", nodes.name(i), l)?;
    }
    Ok(())
}

pub fn save_edge_list(path: impl AsRef<Path>, g: &SparseGraph, nodes: &NodeIndex) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    write_edge_list(&mut w, g, nodes)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn save_bipartite(path: impl AsRef<Path>, b: &BipartiteGraph) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    write_bipartite(&mut w, b)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn save_labels(path: impl AsRef<Path>, labels: &Labels, nodes: &NodeIndex) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    write_labels(&mut w, labels, nodes)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Path of the `key = value` file written next to an embedding CSV.
pub fn sidecar_path(csv: &Path) -> std::path::PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta");
    s.into()
}

/// Writes `node,dim_1,…,dim_k` and a sidecar with eigenvalues and settings.
pub fn save_embedding(path: impl AsRef<Path>, e: &Embedding, nodes: &NodeIndex) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["node".to_string()];
    header.extend((1..=e.dim()).map(|j| format!("dim_{j}")));
    w.write_record(&header)?;
    for i in 0..e.node_count() {
        let mut rec = vec![nodes.name(i).to_string()];
        rec.extend(e.coordinates.row(i).iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|err| Error::io(path, err))?;

    let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ");
    let mut meta = String::new();
    meta.push_str(&format!("alpha = {}\n", e.alpha));
    meta.push_str(&format!("skip_first = {}\n", e.skip_first));
    meta.push_str(&format!("eigenvalues = {}\n", join(&e.eigenvalues)));
    meta.push_str(&format!("residuals = {}\n", join(&e.residuals)));
    if let Some(b) = e.part_boundary {
        meta.push_str(&format!("part_boundary = {b}\n"));
    }
    for warning in &e.warnings {
        meta.push_str(&format!("warning = {warning:?}\n"));
    }
    let side = sidecar_path(path);
    fs::write(&side, meta).map_err(|err| Error::io(side, err))
}

/// Reads an embedding CSV back as node ids and a coordinate matrix.
pub fn load_embedding(path: impl AsRef<Path>) -> Result<(NodeIndex, Matrix)> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    let dim = r.headers()?.len().saturating_sub(1);
    if dim == 0 {
        return Err(Error::Config(format!("{}: no coordinate columns", path.display())));
    }
    let mut names = Vec::new();
    let mut data = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        // header is line 1
        let line = row + 2;
        if rec.len() != dim + 1 {
            return Err(Error::parse(line, format!("expected {} fields, found {}", dim + 1, rec.len())));
        }
        names.push(rec[0].to_string());
        for f in rec.iter().skip(1) {
            data.push(f.parse::<f64>().map_err(|_| Error::parse(line, format!("bad number {f:?}")))?);
        }
    }
    if names.is_empty() {
        return Err(Error::EmptyFile(path.display().to_string()));
    }
    let m = Matrix::from_row_major(names.len(), dim, data)?;
    Ok((NodeIndex::from_names(names), m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let g = parse_edge_list("0\t1\t1.0\n").unwrap();
        assert_eq!(g.graph.node_count(), 2);
        assert_eq!(g.graph.get(0, 1), 1.0);
        assert_eq!(g.graph.get(1, 0), 1.0);
    }

    #[test]
    fn duplicates_are_summed() {
        let g = parse_edge_list("0 1 1.0\n0 1 1.0\n").unwrap();
        assert_eq!(g.graph.get(0, 1), 2.0);
    }

    #[test]
    fn weight_defaults_to_one_and_comments_skip() {
        let g = parse_edge_list("# header\n\n2 0\n").unwrap();
        assert_eq!(g.graph.node_count(), 3);
        assert_eq!(g.graph.get(2, 0), 1.0);
    }

    #[test]
    fn node_hint_keeps_isolated_nodes() {
        let g = parse_edge_list("# nodes 5\n0 1\n").unwrap();
        assert_eq!(g.graph.node_count(), 5);
    }

    #[test]
    fn string_ids_by_first_appearance() {
        let g = parse_edge_list("b a 2\nc b\n").unwrap();
        assert_eq!(g.nodes.names(), ["b", "a", "c"]);
        assert_eq!(g.graph.get(0, 1), 2.0);
        assert_eq!(g.nodes.get("c"), Some(2));
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let e = parse_edge_list("0 1\n# x\n0 1 x\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = parse_edge_list("0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_edge_list("0 1 -1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn overflow_and_empty() {
        let e = parse_edge_list("0 99999999999999999999\n").unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
        assert!(matches!(parse_edge_list("# only\n").unwrap_err(), Error::EmptyFile(_)));
        assert!(matches!(parse_labels("").unwrap_err(), Error::EmptyFile(_)));
    }

    #[test]
    fn labels_reindexed_by_first_appearance() {
        let l = parse_labels("0\ta\n1\tb\n2\ta\n").unwrap();
        assert_eq!(l.assignments(), [0, 1, 0]);
        assert_eq!(l.k(), 2);
        let l = parse_labels("2 x\n0 y\n1 x\n").unwrap();
        assert_eq!(l.assignments(), [1, 0, 0]);
        assert!(parse_labels("0 a\n0 b\n").is_err());
    }

    #[test]
    fn labels_for_partial_cover() {
        let g = parse_edge_list("u v\nv w\n").unwrap();
        let (l, mask) = parse_labels_for("w 7\nu 3\n", &g.nodes).unwrap();
        assert_eq!(mask, [true, false, true]);
        assert_eq!(l.assignments(), [1, 0, 0]);
        assert!(matches!(parse_labels_for("z 1\n", &g.nodes), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn bipartite_index_spaces_are_independent() {
        let b = parse_bipartite("0 0\n0 1 2\n1 0\n").unwrap();
        assert_eq!((b.graph.left_count(), b.graph.right_count()), (2, 2));
        assert_eq!(b.graph.get(0, 1), 2.0);
        assert_eq!(b.stacked_nodes().names(), ["row:0", "row:1", "col:0", "col:1"]);
        let b = parse_bipartite("# nodes 3 4\n0 0\n").unwrap();
        assert_eq!((b.graph.left_count(), b.graph.right_count()), (3, 4));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = parse_edge_list("# nodes 4\n0 1 0.5\n1 2\n2 2 3\n").unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &g.graph, &g.nodes).unwrap();
        let back = parse_edge_list(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.graph, g.graph);
    }
}
