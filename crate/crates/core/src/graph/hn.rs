use super::{make_parts, Graph, GraphError};

/// Vertex id of the A-vertex `(a, copy)` of `H_n`.
pub fn hn_a_vertex(n: u32, a: u64, copy: u32) -> usize {
    (a * n as u64 + copy as u64) as usize
}

/// Vertex id of the B-vertex `b` (0-based bit position) of `H_n`.
pub fn hn_b_vertex(n: u32, b: u32) -> usize {
    (n as u64 * (1u64 << n) + b as u64) as usize
}

/// The bipartite graph `H_n` with `A = [2^n] x [n]` and `B = [n]`: the
/// A-vertex `(a, copy)` is adjacent to `b` iff bit `b` of `a` is set.
///
/// Vertex ids: `(a, copy)` is `a*n + copy`, B-vertex `b` is `n*2^n + b`.
pub fn generate_hn(n: u32, cap: u32) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::Parse("H_n needs n >= 1".into()));
    }
    if n > cap || n > 31 {
        return Err(GraphError::CapExceeded {
            what: "H_n order parameter",
            value: n as u64,
            cap: cap.min(31) as u64,
        });
    }
    let rows = 1u64 << n;
    let a_count = (rows * n as u64) as usize;
    let total = a_count + n as usize;
    let b_base = a_count as u32;
    let mut neighbors: Vec<Vec<u32>> = Vec::with_capacity(total);
    for a in 0..rows {
        let row: Vec<u32> = (0..n).filter(|b| a >> b & 1 == 1).map(|b| b_base + b).collect();
        for _ in 0..n {
            neighbors.push(row.clone());
        }
    }
    for b in 0..n {
        let col: Vec<u32> = (0..rows)
            .filter(|a| a >> b & 1 == 1)
            .flat_map(|a| (0..n as u64).map(move |c| (a * n as u64 + c) as u32))
            .collect();
        neighbors.push(col);
    }
    let parts = make_parts(total, (0..a_count).collect(), (a_count..total).collect())?;
    Graph::from_neighbors(total, neighbors, Some(parts), Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Edge count `n * sum_a popcount(a)` by direct popcount.
    fn popcount_edges(n: u32) -> usize {
        n as usize * (0..1u64 << n).map(|a| a.count_ones() as usize).sum::<usize>()
    }

    #[test]
    fn small_instances() {
        let h1 = generate_hn(1, 20).unwrap();
        assert_eq!((h1.order(), h1.edge_count()), (3, popcount_edges(1)));
        assert_eq!(h1.edge_count(), 1);

        let h2 = generate_hn(2, 20).unwrap();
        assert_eq!((h2.order(), h2.edge_count()), (10, 8));
        assert_eq!(popcount_edges(2), 8);
        for b in 0..2 {
            assert_eq!(h2.degree(hn_b_vertex(2, b)), 4);
        }

        let h3 = generate_hn(3, 20).unwrap();
        assert_eq!(h3.order(), 27);
        let parts = h3.parts().unwrap();
        assert!(parts.b().iter().all(|&b| h3.degree(b) == 12));
        let degs: std::collections::BTreeSet<_> = parts.a().iter().map(|&a| h3.degree(a)).collect();
        assert_eq!(degs, [0, 1, 2, 3].into());
    }

    #[test]
    fn adjacency_rule() {
        let n = 4;
        let g = generate_hn(n, 20).unwrap();
        for a in 0..1u64 << n {
            for copy in 0..n {
                for b in 0..n {
                    assert_eq!(
                        g.adjacent(hn_a_vertex(n, a, copy), hn_b_vertex(n, b)),
                        a >> b & 1 == 1
                    );
                }
            }
        }
    }

    #[test]
    fn cap() {
        assert!(matches!(
            generate_hn(21, 20),
            Err(GraphError::CapExceeded { .. })
        ));
        assert!(generate_hn(0, 20).is_err());
    }
}
