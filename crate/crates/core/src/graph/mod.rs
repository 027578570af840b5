//! Finite simple graphs with an optional bipartition and an ordered root list.

pub(crate) mod bipartite;
mod hn;
mod io;

pub use bipartite::{
    is_universal, matrices_match, restricted_matrix, row_histogram, shadow, shadow_with,
    shadows_equal, shadows_equal_positional, NullVectorRule, RestrictedMatrix, ShadowMultiset,
};
pub use hn::{generate_hn, hn_a_vertex, hn_b_vertex};
pub use io::{GraphJson, PartsJson};

/// Graphs up to this order also keep a dense bit matrix for O(1) adjacency.
const DENSE_LIMIT: usize = 12_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side: Vec<Side>,
    a: Vec<usize>,
    b: Vec<usize>,
    /// Position of each vertex inside its own part.
    index: Vec<usize>,
}

impl Bipartition {
    pub fn side(&self, v: usize) -> Side {
        self.side[v]
    }

    /// A-vertices in increasing id order.
    pub fn a(&self) -> &[usize] {
        &self.a
    }

    /// B-vertices in increasing id order.
    pub fn b(&self) -> &[usize] {
        &self.b
    }

    /// Position of `v` in [`a`](Self::a) or [`b`](Self::b).
    pub fn index_in_part(&self, v: usize) -> usize {
        self.index[v]
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("edge ({0},{1}) lies inside one part of the bipartition")]
    EdgeInsidePart(usize, usize),
    #[error("invalid bipartition: {0}")]
    BadBipartition(String),
    #[error("graph has no bipartition")]
    NotBipartite,
    #[error("{what} {value} exceeds the cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
    },
    #[error("vertex lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("shadow dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("basis correspondence is not a permutation of 0..{0}")]
    BadCorrespondence(usize),
    #[error("shadow basis has {0} vertices; at most 64 are supported")]
    TooWide(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    neighbors: Vec<Vec<u32>>,
    dense: Option<Vec<u64>>,
    words: usize,
    edge_count: usize,
    parts: Option<Bipartition>,
    roots: Vec<usize>,
}

impl Graph {
    /// Validates and builds a graph. Duplicate edges collapse; loops,
    /// out-of-range endpoints and edges inside a part are rejected.
    pub fn new(
        n: usize,
        edges: &[(usize, usize)],
        bipartition: Option<(Vec<usize>, Vec<usize>)>,
        roots: Vec<usize>,
    ) -> Result<Graph, GraphError> {
        let parts = bipartition.map(|(a, b)| make_parts(n, a, b)).transpose()?;
        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::OutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if let Some(p) = &parts {
                if p.side(u) == p.side(v) {
                    return Err(GraphError::EdgeInsidePart(u, v));
                }
            }
            neighbors[u].push(v as u32);
            neighbors[v].push(u as u32);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Self::from_neighbors(n, neighbors, parts, roots)
    }

    fn from_neighbors(
        n: usize,
        neighbors: Vec<Vec<u32>>,
        parts: Option<Bipartition>,
        roots: Vec<usize>,
    ) -> Result<Graph, GraphError> {
        if let Some(&r) = roots.iter().find(|&&r| r >= n) {
            return Err(GraphError::OutOfRange { vertex: r, n });
        }
        let words = n.div_ceil(64);
        let dense = (n <= DENSE_LIMIT).then(|| {
            let mut bits = vec![0u64; n * words];
            for (u, list) in neighbors.iter().enumerate() {
                for &v in list {
                    bits[u * words + v as usize / 64] |= 1 << (v % 64);
                }
            }
            bits
        });
        let edge_count = neighbors.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(Graph {
            n,
            neighbors,
            dense,
            words,
            edge_count,
            parts,
            roots,
        })
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Graph::new(n, &edges, None, Vec::new()).expect("complete graph is valid")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        match &self.dense {
            Some(bits) => bits[u * self.words + v / 64] >> (v % 64) & 1 == 1,
            None => {
                let (small, other) = if self.neighbors[u].len() <= self.neighbors[v].len() {
                    (u, v)
                } else {
                    (v, u)
                };
                self.neighbors[small].binary_search(&(other as u32)).is_ok()
            }
        }
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn bipartition(&self) -> Option<&Bipartition> {
        self.parts.as_ref()
    }

    pub fn parts(&self) -> Result<&Bipartition, GraphError> {
        self.parts.as_ref().ok_or(GraphError::NotBipartite)
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    /// Same graph with a different root list.
    pub fn with_roots(&self, roots: Vec<usize>) -> Result<Graph, GraphError> {
        if let Some(&r) = roots.iter().find(|&&r| r >= self.n) {
            return Err(GraphError::OutOfRange { vertex: r, n: self.n });
        }
        let mut g = self.clone();
        g.roots = roots;
        Ok(g)
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .map(move |&v| (u, v as usize))
                .filter(|(u, v)| u < v)
        })
    }

    /// Relabels vertex `v` as `perm[v]`, carrying bipartition and roots along.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n || perm.iter().any(|&p| p >= self.n || std::mem::replace(&mut seen[p], true)) {
            return Err(GraphError::Parse("relabelling is not a permutation".into()));
        }
        let edges: Vec<_> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        let parts = self.parts.as_ref().map(|p| {
            (
                p.a.iter().map(|&v| perm[v]).collect(),
                p.b.iter().map(|&v| perm[v]).collect(),
            )
        });
        let roots = self.roots.iter().map(|&r| perm[r]).collect();
        Graph::new(self.n, &edges, parts, roots)
    }
}

fn make_parts(n: usize, mut a: Vec<usize>, mut b: Vec<usize>) -> Result<Bipartition, GraphError> {
    a.sort_unstable();
    b.sort_unstable();
    let mut side = vec![None; n];
    let mut index = vec![0; n];
    for (list, s) in [(&a, Side::A), (&b, Side::B)] {
        for (i, &v) in list.iter().enumerate() {
            if v >= n {
                return Err(GraphError::OutOfRange { vertex: v, n });
            }
            if side[v].is_some() {
                return Err(GraphError::BadBipartition(format!(
                    "vertex {v} listed twice"
                )));
            }
            side[v] = Some(s);
            index[v] = i;
        }
    }
    let side = side
        .into_iter()
        .enumerate()
        .map(|(v, s)| {
            s.ok_or_else(|| GraphError::BadBipartition(format!("vertex {v} is in neither part")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Bipartition { side, a, b, index })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_graph_examples() {
        let k2 = Graph::new(2, &[(0, 1)], None, vec![]).unwrap();
        assert_eq!(k2.order(), 2);
        assert!(k2.adjacent(0, 1) && k2.adjacent(1, 0));
        let k1 = Graph::new(1, &[], None, vec![]).unwrap();
        assert_eq!((k1.order(), k1.edge_count()), (1, 0));
        assert_eq!(
            Graph::new(2, &[(0, 0)], None, vec![]),
            Err(GraphError::SelfLoop(0))
        );
    }

    #[test]
    fn validation() {
        assert!(matches!(
            Graph::new(2, &[(0, 2)], None, vec![]),
            Err(GraphError::OutOfRange { vertex: 2, .. })
        ));
        assert_eq!(
            Graph::new(3, &[(0, 1)], Some((vec![0, 1], vec![2])), vec![]),
            Err(GraphError::EdgeInsidePart(0, 1))
        );
        assert!(Graph::new(3, &[], Some((vec![0], vec![2])), vec![]).is_err());
        assert!(Graph::new(2, &[], Some((vec![0, 1], vec![1])), vec![]).is_err());
        assert!(Graph::new(2, &[], None, vec![2]).is_err());
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = Graph::new(3, &[(0, 1), (1, 0), (0, 1), (1, 2)], None, vec![]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn sparse_adjacency_agrees_with_dense() {
        let g = Graph::new(5, &[(0, 4), (1, 2), (3, 4)], None, vec![]).unwrap();
        let mut sparse = g.clone();
        sparse.dense = None;
        for u in 0..5 {
            for v in 0..5 {
                assert_eq!(g.adjacent(u, v), sparse.adjacent(u, v));
            }
        }
    }

    #[test]
    fn permutation_keeps_structure() {
        let g = Graph::new(3, &[(0, 1)], Some((vec![0], vec![1, 2])), vec![1]).unwrap();
        let h = g.permuted(&[2, 0, 1]).unwrap();
        assert!(h.adjacent(2, 0));
        assert_eq!(h.roots(), &[0]);
        assert_eq!(h.parts().unwrap().a(), &[2]);
        assert!(g.permuted(&[0, 0, 1]).is_err());
    }
}
