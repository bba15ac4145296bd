use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Simple undirected graph on vertices `0..n`.
///
/// Edges are stored as `(u, v)` with `u < v` in insertion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(vertices: usize, edge_list: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph {
            vertices,
            edges: Vec::with_capacity(edge_list.len()),
            incident: vec![Vec::new(); vertices],
        };
        let mut seen = HashSet::new();
        for &(a, b) in edge_list {
            g.insert(a, b, &mut seen).map_err(Error::Argument)?;
        }
        Ok(g)
    }

    fn insert(
        &mut self,
        a: usize,
        b: usize,
        seen: &mut HashSet<(usize, usize)>,
    ) -> std::result::Result<(), String> {
        if a >= self.vertices || b >= self.vertices {
            return Err(format!("edge ({a},{b}) references a missing vertex"));
        }
        if a == b {
            return Err(format!("self-loop on vertex {}", a + 1));
        }
        let e = (a.min(b), a.max(b));
        if !seen.insert(e) {
            return Err(format!("duplicate edge {} {}", e.0 + 1, e.1 + 1));
        }
        let idx = self.edges.len();
        self.edges.push(e);
        self.incident[e.0].push(idx);
        self.incident[e.1].push(idx);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Indices of edges incident to `v`.
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    /// Star with centre 0 and leaves `1..n`.
    pub fn star(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Graph::new(n, &edges).expect("valid star")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Graph::new(n, &edges).expect("valid complete graph")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges).expect("valid path")
    }

    pub fn generate(kind: GraphKind, n: usize) -> Self {
        match kind {
            GraphKind::Star => Graph::star(n),
            GraphKind::Complete => Graph::complete(n),
            GraphKind::Path => Graph::path(n),
        }
    }

    /// Parse the DIMACS edge format: `c` comments, one `p edge N M` header,
    /// then `e u v` lines with 1-indexed endpoints.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut graph: Option<Graph> = None;
        let mut declared_edges = 0usize;
        let mut header_line = 0usize;
        let mut seen = HashSet::new();
        let err = |line: usize, message: String| Error::Parse { line, message };

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "p" => {
                    if graph.is_some() {
                        return Err(err(line_no, "second problem line".into()));
                    }
                    if fields.len() != 4 || fields[1] != "edge" {
                        return Err(err(line_no, format!("malformed header {line:?}, expected `p edge N M`")));
                    }
                    let n: usize = fields[2]
                        .parse()
                        .map_err(|_| err(line_no, format!("bad vertex count {:?}", fields[2])))?;
                    declared_edges = fields[3]
                        .parse()
                        .map_err(|_| err(line_no, format!("bad edge count {:?}", fields[3])))?;
                    header_line = line_no;
                    graph = Some(Graph {
                        vertices: n,
                        edges: Vec::with_capacity(declared_edges),
                        incident: vec![Vec::new(); n],
                    });
                }
                "e" => {
                    let g = graph
                        .as_mut()
                        .ok_or_else(|| err(line_no, "edge line before `p edge` header".into()))?;
                    if fields.len() != 3 {
                        return Err(err(line_no, format!("malformed edge line {line:?}")));
                    }
                    let mut ends = [0usize; 2];
                    for (slot, f) in ends.iter_mut().zip(&fields[1..]) {
                        let v: usize = f
                            .parse()
                            .map_err(|_| err(line_no, format!("bad vertex {f:?}")))?;
                        if v == 0 || v > g.vertices {
                            return Err(err(line_no, format!("vertex {v} out of range 1..={}", g.vertices)));
                        }
                        *slot = v - 1;
                    }
                    g.insert(ends[0], ends[1], &mut seen)
                        .map_err(|m| err(line_no, m))?;
                }
                other => return Err(err(line_no, format!("unknown line type {other:?}"))),
            }
        }
        let g = graph.ok_or_else(|| err(0, "missing `p edge N M` header".into()))?;
        if g.edges.len() != declared_edges {
            return Err(err(
                header_line,
                format!("header declares {declared_edges} edges, found {}", g.edges.len()),
            ));
        }
        Ok(g)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p edge {} {}\n", self.vertices, self.edges.len());
        for (u, v) in &self.edges {
            s.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        s
    }
}

/// Generated graph families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Star,
    Complete,
    Path,
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "star" => Ok(GraphKind::Star),
            "complete" => Ok(GraphKind::Complete),
            "path" => Ok(GraphKind::Path),
            other => Err(Error::Config(format!(
                "unknown graph kind {other:?} (star, complete, path)"
            ))),
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphKind::Star => "star",
            GraphKind::Complete => "complete",
            GraphKind::Path => "path",
        })
    }
}
