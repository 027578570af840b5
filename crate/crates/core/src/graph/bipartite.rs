//! Bipartite structure: row histograms and universality, adjacency matrices
//! restricted to a played vertex list, and shadows.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use super::{Graph, GraphError, Side};

/// How many times each row vector of `{0,1}^B` occurs among the A-rows.
/// Bit `i` of a row index is the B-vertex at position `i` of `parts.b()`.
pub fn row_histogram(g: &Graph, cap: usize) -> Result<Vec<usize>, GraphError> {
    let parts = g.parts()?;
    let width = parts.b().len();
    if width > cap || width > 32 {
        return Err(GraphError::CapExceeded {
            what: "|B| for universality",
            value: width as u64,
            cap: cap.min(32) as u64,
        });
    }
    let mut hist = vec![0usize; 1 << width];
    for &a in parts.a() {
        let row = g
            .neighbors(a)
            .iter()
            .fold(0usize, |acc, &b| acc | 1 << parts.index_in_part(b as usize));
        hist[row] += 1;
    }
    Ok(hist)
}

/// True iff every vector of `{0,1}^B` occurs at least `l` times among the
/// rows of the A-by-B adjacency matrix.
pub fn is_universal(g: &Graph, l: usize, cap: usize) -> Result<bool, GraphError> {
    Ok(row_histogram(g, cap)?.iter().all(|&c| c >= l))
}

/// Removes repeated vertices, keeping first occurrences in order.
pub(crate) fn dedup_in_order(w: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(w.len());
    for &v in w {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Adjacency matrix restricted to `W_A x W_B`, rows and columns in the order
/// the vertices first appear in the played list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestrictedMatrix {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub entries: Vec<Vec<u8>>,
}

impl RestrictedMatrix {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }
}

pub fn restricted_matrix(g: &Graph, w: &[usize]) -> Result<RestrictedMatrix, GraphError> {
    let parts = g.parts()?;
    if let Some(&v) = w.iter().find(|&&v| v >= g.order()) {
        return Err(GraphError::OutOfRange { vertex: v, n: g.order() });
    }
    let distinct = dedup_in_order(w);
    let (rows, cols): (Vec<usize>, Vec<usize>) =
        distinct.iter().partition(|&&v| parts.side(v) == Side::A);
    let entries = rows
        .iter()
        .map(|&a| cols.iter().map(|&b| g.adjacent(a, b) as u8).collect())
        .collect();
    Ok(RestrictedMatrix { rows, cols, entries })
}

/// Whether the restricted matrices agree under the positional correspondence
/// `w[i] <-> w2[i]`: same side, same repetition pattern, same entries.
pub fn matrices_match(
    g: &Graph,
    w: &[usize],
    g2: &Graph,
    w2: &[usize],
) -> Result<bool, GraphError> {
    if w.len() != w2.len() {
        return Err(GraphError::LengthMismatch(w.len(), w2.len()));
    }
    let (p, p2) = (g.parts()?, g2.parts()?);
    for (&v, graph) in w.iter().map(|v| (v, g)).chain(w2.iter().map(|v| (v, g2))) {
        if v >= graph.order() {
            return Err(GraphError::OutOfRange { vertex: v, n: graph.order() });
        }
    }
    for i in 0..w.len() {
        if p.side(w[i]) != p2.side(w2[i]) {
            return Ok(false);
        }
        for j in 0..i {
            if (w[i] == w[j]) != (w2[i] == w2[j]) {
                return Ok(false);
            }
            if p.side(w[i]) != p.side(w[j]) && g.adjacent(w[i], w[j]) != g2.adjacent(w2[i], w2[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// How the shadow of a set with no A-vertices counts its null vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NullVectorRule {
    /// `min(|B \ W_B|, l)`, the general definition specialised to dimension 0.
    #[default]
    RemainingColumns,
    /// `min(|B|, l)`, counting the played B-vertices too.
    AllColumns,
}

/// Multiset of column patterns over a basis of A-vertices, each multiplicity
/// capped at `cap`. Bit `i` of a pattern is the entry for `basis[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadowMultiset {
    basis: Vec<usize>,
    cap: usize,
    counts: BTreeMap<u64, usize>,
}

impl ShadowMultiset {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn multiplicity(&self, pattern: u64) -> usize {
        self.counts.get(&pattern).copied().unwrap_or(0)
    }

    /// `(pattern, multiplicity)` pairs with positive multiplicity.
    pub fn iter(&self) -> impl Iterator<Item = (u64, usize)> + '_ {
        self.counts.iter().map(|(&u, &m)| (u, m))
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Renders a pattern as a bit string in basis order.
    pub fn pattern_string(&self, pattern: u64) -> String {
        (0..self.dimension())
            .map(|i| if pattern >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Drops one copy of `pattern` (if present) and lowers the cap to
    /// `new_cap`. This is the bookkeeping for a B-vertex leaving the pool of
    /// unplayed columns.
    pub fn remove_one_and_cap(&self, pattern: u64, new_cap: usize) -> ShadowMultiset {
        let mut counts = self.counts.clone();
        if let Some(m) = counts.get_mut(&pattern) {
            *m -= 1;
        }
        counts.retain(|_, m| {
            *m = (*m).min(new_cap);
            *m > 0
        });
        ShadowMultiset {
            basis: self.basis.clone(),
            cap: new_cap,
            counts,
        }
    }
}

impl Serialize for ShadowMultiset {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            u: String,
            m: usize,
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            basis: &'a [usize],
            cap: usize,
            entries: Vec<Entry>,
            total: usize,
        }
        Repr {
            basis: &self.basis,
            cap: self.cap,
            entries: self
                .iter()
                .map(|(u, m)| Entry {
                    u: self.pattern_string(u),
                    m,
                })
                .collect(),
            total: self.total(),
        }
        .serialize(s)
    }
}

/// Column pattern of `b` over `basis`.
pub(crate) fn column_pattern(g: &Graph, basis: &[usize], b: usize) -> u64 {
    basis
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &a)| acc | (g.adjacent(a, b) as u64) << i)
}

/// The `l`-shadow of the vertex list `w`.
pub fn shadow(g: &Graph, w: &[usize], l: usize) -> Result<ShadowMultiset, GraphError> {
    shadow_with(g, w, l, NullVectorRule::default())
}

pub fn shadow_with(
    g: &Graph,
    w: &[usize],
    l: usize,
    rule: NullVectorRule,
) -> Result<ShadowMultiset, GraphError> {
    let parts = g.parts()?;
    if let Some(&v) = w.iter().find(|&&v| v >= g.order()) {
        return Err(GraphError::OutOfRange { vertex: v, n: g.order() });
    }
    let distinct = dedup_in_order(w);
    let basis: Vec<usize> = distinct
        .iter()
        .copied()
        .filter(|&v| parts.side(v) == Side::A)
        .collect();
    if basis.len() > 64 {
        return Err(GraphError::TooWide(basis.len()));
    }
    let mut counts = BTreeMap::new();
    if basis.is_empty() && rule == NullVectorRule::AllColumns {
        let m = parts.b().len().min(l);
        if m > 0 {
            counts.insert(0, m);
        }
    } else {
        for &b in parts.b() {
            if distinct.contains(&b) {
                continue;
            }
            *counts.entry(column_pattern(g, &basis, b)).or_insert(0) += 1;
        }
        counts.retain(|_, m| {
            *m = (*m).min(l);
            *m > 0
        });
    }
    Ok(ShadowMultiset {
        basis,
        cap: l,
        counts,
    })
}

/// Equality of multiplicities after mapping basis index `i` of `s1` to basis
/// index `correspondence[i]` of `s2`.
pub fn shadows_equal(
    s1: &ShadowMultiset,
    s2: &ShadowMultiset,
    correspondence: &[usize],
) -> Result<bool, GraphError> {
    let d = s1.dimension();
    if d != s2.dimension() {
        return Err(GraphError::DimensionMismatch(d, s2.dimension()));
    }
    let mut seen = vec![false; d];
    if correspondence.len() != d
        || correspondence
            .iter()
            .any(|&j| j >= d || std::mem::replace(&mut seen[j], true))
    {
        return Err(GraphError::BadCorrespondence(d));
    }
    if s1.counts.len() != s2.counts.len() {
        return Ok(false);
    }
    Ok(s1.iter().all(|(u, m)| {
        let image = (0..d)
            .filter(|&i| u >> i & 1 == 1)
            .fold(0u64, |acc, i| acc | 1 << correspondence[i]);
        s2.multiplicity(image) == m
    }))
}

/// [`shadows_equal`] under the identity correspondence.
pub fn shadows_equal_positional(
    s1: &ShadowMultiset,
    s2: &ShadowMultiset,
) -> Result<bool, GraphError> {
    let id: Vec<usize> = (0..s1.dimension()).collect();
    shadows_equal(s1, s2, &id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_hn, hn_a_vertex, hn_b_vertex};

    fn hn(n: u32) -> Graph {
        generate_hn(n, 20).unwrap()
    }

    #[test]
    fn universality_examples() {
        assert!(is_universal(&hn(3), 3, 20).unwrap());
        assert!(!is_universal(&hn(3), 4, 20).unwrap());
        // Every row vector of H_3 occurs exactly 3 times.
        assert!(row_histogram(&hn(3), 20).unwrap().iter().all(|&c| c == 3));
        let g = Graph::new(2, &[], Some((vec![0], vec![1])), vec![]).unwrap();
        assert!(!is_universal(&g, 1, 20).unwrap());
        assert_eq!(is_universal(&Graph::complete(2), 1, 20), Err(GraphError::NotBipartite));
    }

    #[test]
    fn universality_cap() {
        let b: Vec<usize> = (1..23).collect();
        let g = Graph::new(23, &[], Some((vec![0], b)), vec![]).unwrap();
        assert!(matches!(is_universal(&g, 1, 20), Err(GraphError::CapExceeded { .. })));
    }

    #[test]
    fn restricted_matrix_examples() {
        let g = hn(2);
        let u = hn_a_vertex(2, 1, 0);
        let b = hn_b_vertex(2, 0);
        let m = restricted_matrix(&g, &[u, b]).unwrap();
        assert_eq!(m.entries, vec![vec![1]]);
        assert_eq!(restricted_matrix(&g, &[]).unwrap().shape(), (0, 0));
        let m = restricted_matrix(&g, &[hn_b_vertex(2, 0), hn_b_vertex(2, 1)]).unwrap();
        assert_eq!(m.shape(), (0, 2));
        let m = restricted_matrix(&g, &[u, u, b, u]).unwrap();
        assert_eq!(m.shape(), (1, 1));
    }

    #[test]
    fn matching_examples() {
        let (h2, h3) = (hn(2), hn(3));
        let w = [hn_a_vertex(2, 1, 0), hn_b_vertex(2, 0)];
        assert!(matrices_match(&h2, &w, &h2, &w).unwrap());
        assert!(!matrices_match(&h2, &[hn_a_vertex(2, 1, 0)], &h2, &[hn_b_vertex(2, 0)]).unwrap());
        let w3 = [hn_a_vertex(3, 1, 0), hn_b_vertex(3, 0)];
        assert!(matrices_match(&h2, &w, &h3, &w3).unwrap());
        // Same pattern of sides but an entry differs.
        let w3_bad = [hn_a_vertex(3, 2, 0), hn_b_vertex(3, 0)];
        assert!(!matrices_match(&h2, &w, &h3, &w3_bad).unwrap());
        assert_eq!(
            matrices_match(&h2, &w, &h3, &w3[..1]),
            Err(GraphError::LengthMismatch(2, 1))
        );
        // Repetition on one side only breaks the correspondence.
        let a = hn_a_vertex(2, 1, 0);
        assert!(!matrices_match(&h2, &[a, a], &h2, &[a, hn_a_vertex(2, 1, 1)]).unwrap());
    }

    #[test]
    fn shadow_examples() {
        let g = hn(2);
        let s = shadow(&g, &[hn_a_vertex(2, 1, 0)], 2).unwrap();
        assert_eq!(s.dimension(), 1);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![(0, 1), (1, 1)]);

        let s = shadow(&g, &[hn_b_vertex(2, 0)], 5).unwrap();
        assert_eq!(s.dimension(), 0);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![(0, 1)]);

        let all_b = [hn_b_vertex(2, 0), hn_b_vertex(2, 1)];
        let s = shadow(&g, &all_b, 3).unwrap();
        assert_eq!(s.total(), 0);

        let strict = shadow_with(&g, &all_b, 3, NullVectorRule::AllColumns).unwrap();
        assert_eq!(strict.iter().collect::<Vec<_>>(), vec![(0, 2)]);
    }

    #[test]
    fn shadow_equality_examples() {
        let g = hn(3);
        let s = shadow(&g, &[hn_a_vertex(3, 5, 0)], 4).unwrap();
        assert!(shadows_equal_positional(&s, &s).unwrap());
        let s2 = shadow(&g, &[hn_a_vertex(3, 5, 0), hn_a_vertex(3, 1, 0)], 4).unwrap();
        assert_eq!(
            shadows_equal_positional(&s, &s2),
            Err(GraphError::DimensionMismatch(1, 2))
        );
        let e4 = shadow(&hn(4), &[], 8).unwrap();
        let e5 = shadow(&hn(5), &[], 8).unwrap();
        assert_eq!((e4.total(), e5.total()), (4, 5));
        assert!(!shadows_equal_positional(&e4, &e5).unwrap());
    }

    #[test]
    fn shadow_reindexing() {
        let g = hn(3);
        let (x, y) = (hn_a_vertex(3, 3, 0), hn_a_vertex(3, 5, 0));
        let s_xy = shadow(&g, &[x, y], 8).unwrap();
        let s_yx = shadow(&g, &[y, x], 8).unwrap();
        assert!(shadows_equal(&s_xy, &s_yx, &[1, 0]).unwrap());
        assert!(shadows_equal(&s_xy, &s_yx, &[0, 0]).is_err());
    }

    #[test]
    fn removal_bookkeeping() {
        let g = hn(3);
        let s = shadow(&g, &[hn_a_vertex(3, 6, 0)], 4).unwrap();
        // b = 1 has pattern 1 (bit 1 of 6 is set).
        let b = hn_b_vertex(3, 1);
        let direct = shadow(&g, &[hn_a_vertex(3, 6, 0), b], 2).unwrap();
        assert_eq!(s.remove_one_and_cap(1, 2), direct);
    }
}
