use crate::error::{Error, Result};

/// An undirected multigraph that only grows.
///
/// Vertex ids are dense and follow creation order. Parallel edges are kept;
/// a vertex's degree counts edge ends.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultiGraph {
    degrees: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl MultiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// The complete simple graph on `s >= 2` vertices.
    pub fn complete(s: u32) -> Result<Self> {
        if s < 2 {
            return Err(Error::SeedTooSmall(s));
        }
        let mut g = MultiGraph::with_vertices(s);
        for u in 0..s {
            for v in u + 1..s {
                g.push_edge(u, v);
            }
        }
        Ok(g)
    }

    /// `count` isolated vertices.
    pub fn with_vertices(count: u32) -> Self {
        MultiGraph {
            degrees: vec![0; count as usize],
            edges: Vec::new(),
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops and ids `>= vertices`.
    pub fn from_edges(vertices: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut g = MultiGraph::with_vertices(vertices);
        for (u, v) in edges {
            if u == v || u >= vertices || v >= vertices {
                return Err(Error::InvalidEdge(u, v));
            }
            g.push_edge(u, v);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: u32) -> u32 {
        self.degrees[v as usize]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub(crate) fn push_vertex(&mut self) -> u32 {
        self.degrees.push(0);
        self.degrees.len() as u32 - 1
    }

    pub(crate) fn push_edge(&mut self, u: u32, v: u32) {
        debug_assert_ne!(u, v);
        self.degrees[u as usize] += 1;
        self.degrees[v as usize] += 1;
        self.edges.push((u, v));
    }

    /// Sorted, de-duplicated neighbour lists: the simple graph underlying
    /// this multigraph.
    pub fn simple_adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}
