use std::cell::RefCell;

use crate::bits::BitString;

use super::{Direction, Graph, Problem};

/// Node representation: bit `i` puts vertex `i` in the cover.
///
/// `f_v(x) = |x|_1 + n * (uncovered edge incidences)`, where every uncovered
/// edge is counted once from each endpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexCoverNode {
    graph: Graph,
}

impl VertexCoverNode {
    pub fn new(graph: Graph) -> Self {
        VertexCoverNode { graph }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn uncovered_edges(&self, x: &BitString) -> usize {
        self.graph
            .edges()
            .iter()
            .filter(|&&(u, v)| !x.get(u) && !x.get(v))
            .count()
    }

    /// The penalty term of `f_v`.
    pub fn penalty(&self, x: &BitString) -> f64 {
        (self.graph.vertex_count() * 2 * self.uncovered_edges(x)) as f64
    }
}

impl Problem for VertexCoverNode {
    fn dimension(&self) -> usize {
        self.graph.vertex_count()
    }

    fn direction(&self) -> Direction {
        Direction::Minimise
    }

    fn evaluate(&self, x: &BitString) -> f64 {
        x.ones_count() as f64 + self.penalty(x)
    }

    // Any uncovered edge costs at least 2n while a cover costs at most n.
    fn is_target(&self, _: &BitString, fitness: f64) -> bool {
        fitness <= self.graph.vertex_count() as f64
    }

    fn descriptor(&self) -> String {
        format!(
            "vc-node(v={},m={})",
            self.graph.vertex_count(),
            self.graph.edge_count()
        )
    }
}

thread_local! {
    static DEGREES: RefCell<Vec<u32>> = const { RefCell::new(Vec::new()) };
}

/// Edge representation: bit `j` selects edge `j`, whose endpoints join the
/// cover. Adjacent selected edges are penalised by `(|V|+1)(m+1)` per
/// ordered pair.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexCoverEdge {
    graph: Graph,
}

/// Decomposition of `f_e` for one selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeSelectionStats {
    pub cover_size: usize,
    pub uncovered_edges: usize,
    pub adjacent_ordered_pairs: usize,
}

impl VertexCoverEdge {
    pub fn new(graph: Graph) -> Self {
        VertexCoverEdge { graph }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn stats(&self, x: &BitString) -> EdgeSelectionStats {
        DEGREES.with(|cell| {
            let mut deg = cell.borrow_mut();
            deg.clear();
            deg.resize(self.graph.vertex_count(), 0);
            let edges = self.graph.edges();
            for j in x.one_positions() {
                let (u, v) = edges[j];
                deg[u] += 1;
                deg[v] += 1;
            }
            let cover_size = deg.iter().filter(|&&d| d > 0).count();
            // two distinct edges of a simple graph share at most one vertex
            let adjacent_ordered_pairs = deg
                .iter()
                .map(|&d| (d as usize) * (d as usize).saturating_sub(1))
                .sum();
            let uncovered_edges = edges
                .iter()
                .filter(|&&(u, v)| deg[u] == 0 && deg[v] == 0)
                .count();
            EdgeSelectionStats {
                cover_size,
                uncovered_edges,
                adjacent_ordered_pairs,
            }
        })
    }

    pub fn induced_cover(&self, x: &BitString) -> BitString {
        let mut cover = BitString::zeros(self.graph.vertex_count());
        for j in x.one_positions() {
            let (u, v) = self.graph.edges()[j];
            for w in [u, v] {
                if !cover.get(w) {
                    cover.toggle(w);
                }
            }
        }
        cover
    }
}

impl Problem for VertexCoverEdge {
    fn dimension(&self) -> usize {
        self.graph.edge_count()
    }

    fn direction(&self) -> Direction {
        Direction::Minimise
    }

    fn evaluate(&self, x: &BitString) -> f64 {
        let s = self.stats(x);
        let n = self.graph.vertex_count();
        let m = self.graph.edge_count();
        let f_v = s.cover_size + n * 2 * s.uncovered_edges;
        (f_v + (n + 1) * (m + 1) * s.adjacent_ordered_pairs) as f64
    }

    // Both penalty terms exceed |V| whenever present.
    fn is_target(&self, _: &BitString, fitness: f64) -> bool {
        fitness <= self.graph.vertex_count() as f64
    }

    fn descriptor(&self) -> String {
        format!(
            "vc-edge(v={},m={})",
            self.graph.vertex_count(),
            self.graph.edge_count()
        )
    }
}

/// Selected edges form a maximal matching: pairwise non-adjacent, and every
/// edge touches a selected one.
pub fn vc_two_approx_target(x: &BitString, graph: &Graph) -> bool {
    let mut matched = vec![false; graph.vertex_count()];
    for j in x.one_positions() {
        let (u, v) = graph.edges()[j];
        if matched[u] || matched[v] {
            return false;
        }
        matched[u] = true;
        matched[v] = true;
    }
    graph
        .edges()
        .iter()
        .all(|&(u, v)| matched[u] || matched[v])
}
