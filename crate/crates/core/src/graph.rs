//! The weighted complete graph `K_n` as an edge-weight oracle.
//!
//! Two access modes share one interface:
//!
//! * **materialized**: all `n(n−1)/2` labels drawn up front (small `n`);
//! * **lazy**: labels are only created when a vertex's row is streamed in
//!   ascending order. A row over `m` candidates is generated as order
//!   statistics of `m` labels, and the vertex identities attached to them are
//!   a uniform random arrangement of the candidates. Every handed-out edge is
//!   logged; handing out the same edge twice is an error, since the model
//!   never reads a row twice.
//!
//! Vertices are numbered `1..=n`.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{invalid, Error, Result};
use crate::rng::{exp1, label_from_exp, LazyOrderStats, SeededStream};

pub type Vertex = usize;

/// Unordered edge key, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeKey {
    u: Vertex,
    v: Vertex,
}

impl EdgeKey {
    pub fn new(a: Vertex, b: Vertex) -> Result<Self> {
        if a == b {
            return Err(invalid(format!("self-loop ({a}, {a}) is not an edge")));
        }
        Ok(Self {
            u: a.min(b),
            v: a.max(b),
        })
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.u, self.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    Materialized,
    Lazy,
}

#[derive(Debug, Clone)]
enum Store {
    /// Upper triangle, row-major over `u < v`.
    Materialized(Vec<f64>),
    Lazy(HashMap<EdgeKey, f64>),
}

/// Consistent source of edge labels `X(u, v) = n·e·Exp(1) − 1`.
#[derive(Debug, Clone)]
pub struct EdgeOracle {
    n: usize,
    store: Store,
}

/// Edges out of `source` with labels at most `cutoff`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborBatch {
    pub source: Vertex,
    pub entries: Vec<(Vertex, f64)>,
    pub cutoff: f64,
}

impl EdgeOracle {
    /// Draws all labels of `K_n` from `stream`.
    pub fn materialized(n: usize, stream: &mut SeededStream) -> Result<Self> {
        check_n(n)?;
        let weights = (0..n * (n - 1) / 2).map(|_| label_from_exp(n, exp1(stream))).collect();
        Ok(Self {
            n,
            store: Store::Materialized(weights),
        })
    }

    /// Builds a materialized oracle from explicit labels, given as
    /// `(u, v, weight)` triples covering every edge exactly once.
    pub fn from_weights(n: usize, edges: &[(Vertex, Vertex, f64)]) -> Result<Self> {
        check_n(n)?;
        let mut weights = vec![f64::NAN; n * (n - 1) / 2];
        for &(a, b, w) in edges {
            let key = EdgeKey::new(a, b)?;
            check_vertex(n, key.v)?;
            check_vertex(n, key.u)?;
            let slot = &mut weights[tri_index(n, key)];
            if !slot.is_nan() {
                return Err(invalid(format!("edge ({a}, {b}) given twice")));
            }
            *slot = w;
        }
        if weights.iter().any(|w| w.is_nan()) {
            return Err(invalid("explicit weights must cover every edge"));
        }
        Ok(Self {
            n,
            store: Store::Materialized(weights),
        })
    }

    /// An oracle whose labels are created on demand by row streams.
    pub fn lazy(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n,
            store: Store::Lazy(HashMap::new()),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> OracleMode {
        match self.store {
            Store::Materialized(_) => OracleMode::Materialized,
            Store::Lazy(_) => OracleMode::Lazy,
        }
    }

    /// Number of edges whose label is known.
    pub fn revealed_count(&self) -> usize {
        match &self.store {
            Store::Materialized(w) => w.len(),
            Store::Lazy(log) => log.len(),
        }
    }

    pub fn edge_weight(&self, u: Vertex, v: Vertex) -> Result<f64> {
        let key = EdgeKey::new(u, v)?;
        check_vertex(self.n, key.v)?;
        check_vertex(self.n, key.u)?;
        match &self.store {
            Store::Materialized(w) => Ok(w[tri_index(self.n, key)]),
            Store::Lazy(log) => log.get(&key).copied().ok_or(Error::UnknownEdge(u, v)),
        }
    }

    fn reveal(&mut self, u: Vertex, v: Vertex, w: f64) -> Result<()> {
        if let Store::Lazy(log) = &mut self.store {
            let key = EdgeKey::new(u, v)?;
            if log.insert(key, w).is_some() {
                return Err(Error::EdgeRevisited(u, v));
            }
        }
        Ok(())
    }

    /// Opens an ascending stream over the edges from `source` to `allowed`.
    ///
    /// `allowed` must not contain `source` and must be duplicate-free.
    pub fn open_row<'a>(&self, source: Vertex, allowed: &'a [Vertex], stream: SeededStream) -> RowStream<'a> {
        let kind = match &self.store {
            Store::Materialized(w) => {
                let mut entries: Vec<(Vertex, f64)> = allowed
                    .iter()
                    .map(|&v| (v, w[tri_index(self.n, EdgeKey { u: source.min(v), v: source.max(v) })]))
                    .collect();
                entries.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
                RowKind::Sorted { entries, pos: 0 }
            }
            Store::Lazy(_) => {
                let labels_stream = stream.substream(0);
                let shuffle_stream = stream.substream(1);
                RowKind::Lazy {
                    labels: LazyOrderStats::new(labels_stream, self.n, allowed.len()),
                    peeked: None,
                    shuffle: SparseShuffle::new(allowed, shuffle_stream),
                }
            }
        };
        RowStream { source, kind }
    }

    /// All edges from `source` to vertices outside `forbidden` whose label
    /// is at most `cutoff`. `forbidden` must contain `source`.
    pub fn smallest_incident(
        &mut self,
        source: Vertex,
        forbidden: &[Vertex],
        cutoff: f64,
        stream: SeededStream,
    ) -> Result<NeighborBatch> {
        check_vertex(self.n, source)?;
        let mut blocked = vec![false; self.n + 1];
        for &f in forbidden {
            check_vertex(self.n, f)?;
            blocked[f] = true;
        }
        if !blocked[source] {
            return Err(invalid("forbidden set must contain the source"));
        }
        let allowed: Vec<Vertex> = (1..=self.n).filter(|&v| !blocked[v]).collect();
        if allowed.is_empty() {
            return Err(invalid("forbidden set leaves no candidate"));
        }
        let mut row = self.open_row(source, &allowed, stream);
        let mut entries = Vec::new();
        while let Some(w) = row.peek_weight() {
            if w > cutoff {
                break;
            }
            entries.push(row.take(self)?);
        }
        Ok(NeighborBatch {
            source,
            entries,
            cutoff,
        })
    }

    /// Writes `u,v,weight` rows for every known edge, ordered by key.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "u,v,weight")?;
        match &self.store {
            Store::Materialized(w) => {
                for u in 1..=self.n {
                    for v in u + 1..=self.n {
                        writeln!(out, "{u},{v},{}", w[tri_index(self.n, EdgeKey { u, v })])?;
                    }
                }
            }
            Store::Lazy(log) => {
                let mut keys: Vec<_> = log.iter().collect();
                keys.sort_by_key(|(k, _)| **k);
                for (k, w) in keys {
                    writeln!(out, "{},{},{w}", k.u, k.v)?;
                }
            }
        }
        Ok(())
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!("graph needs n >= 2, got {n}")));
    }
    Ok(())
}

fn check_vertex(n: usize, v: Vertex) -> Result<()> {
    if v == 0 || v > n {
        return Err(invalid(format!("vertex {v} outside 1..={n}")));
    }
    Ok(())
}

/// Offset of `(u, v)`, `u < v`, in the row-major upper triangle.
fn tri_index(n: usize, key: EdgeKey) -> usize {
    let (u, v) = (key.u - 1, key.v - 1);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

/// Ascending stream over one vertex's row.
pub struct RowStream<'a> {
    source: Vertex,
    kind: RowKind<'a>,
}

enum RowKind<'a> {
    Sorted {
        entries: Vec<(Vertex, f64)>,
        pos: usize,
    },
    Lazy {
        labels: LazyOrderStats,
        peeked: Option<f64>,
        shuffle: SparseShuffle<'a>,
    },
}

impl RowStream<'_> {
    pub fn source(&self) -> Vertex {
        self.source
    }

    /// Next label in ascending order, without committing to a target vertex.
    pub fn peek_weight(&mut self) -> Option<f64> {
        match &mut self.kind {
            RowKind::Sorted { entries, pos } => entries.get(*pos).map(|e| e.1),
            RowKind::Lazy { labels, peeked, .. } => {
                if peeked.is_none() {
                    *peeked = labels.next();
                }
                *peeked
            }
        }
    }

    /// Consumes the peeked label, assigns its target and logs the edge.
    pub fn take(&mut self, oracle: &mut EdgeOracle) -> Result<(Vertex, f64)> {
        let w = self.peek_weight().ok_or_else(|| invalid("row stream exhausted"))?;
        match &mut self.kind {
            RowKind::Sorted { entries, pos } => {
                let e = entries[*pos];
                *pos += 1;
                Ok(e)
            }
            RowKind::Lazy { peeked, shuffle, .. } => {
                *peeked = None;
                let v = shuffle.next_vertex();
                oracle.reveal(self.source, v, w)?;
                Ok((v, w))
            }
        }
    }
}

/// Sampling without replacement from a borrowed candidate list, by a
/// Fisher–Yates shuffle whose displaced slots live in a hash map.
struct SparseShuffle<'a> {
    items: &'a [Vertex],
    taken: usize,
    moved: HashMap<usize, usize>,
    stream: SeededStream,
}

impl<'a> SparseShuffle<'a> {
    fn new(items: &'a [Vertex], stream: SeededStream) -> Self {
        Self {
            items,
            taken: 0,
            moved: HashMap::new(),
            stream,
        }
    }

    fn next_vertex(&mut self) -> Vertex {
        let k = self.taken;
        let j = k + self.stream.below(self.items.len() - k);
        let at_j = self.moved.get(&j).copied().unwrap_or(j);
        let at_k = self.moved.get(&k).copied().unwrap_or(k);
        self.moved.insert(j, at_k);
        self.moved.remove(&k);
        self.taken += 1;
        self.items[at_j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tri_index_is_a_bijection() {
        let n = 7;
        let mut seen = vec![false; n * (n - 1) / 2];
        for u in 1..=n {
            for v in u + 1..=n {
                let i = tri_index(n, EdgeKey { u, v });
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn weights_are_symmetric_and_stable() {
        let mut s = SeededStream::new(1, 2);
        let o = EdgeOracle::materialized(6, &mut s).unwrap();
        for u in 1..=6 {
            for v in 1..=6 {
                if u != v {
                    let w = o.edge_weight(u, v).unwrap();
                    assert_eq!(w.to_bits(), o.edge_weight(v, u).unwrap().to_bits());
                    assert_eq!(w.to_bits(), o.edge_weight(u, v).unwrap().to_bits());
                    assert!(w > -1.0);
                }
            }
        }
        assert!(o.edge_weight(3, 3).is_err());
        assert!(o.edge_weight(0, 3).is_err());
    }

    #[test]
    fn lazy_unknown_edge_is_an_error() {
        let o = EdgeOracle::lazy(10).unwrap();
        assert!(matches!(o.edge_weight(1, 2), Err(Error::UnknownEdge(1, 2))));
    }

    #[test]
    fn smallest_incident_edges() {
        let mut o = EdgeOracle::lazy(6).unwrap();
        let s = SeededStream::new(3, 3);
        let b = o.smallest_incident(1, &[1], -1.0, s.clone()).unwrap();
        assert!(b.entries.is_empty());
        let b = o.smallest_incident(1, &[1], f64::INFINITY, s.clone()).unwrap();
        assert_eq!(b.entries.len(), 5);
        let mut targets: Vec<_> = b.entries.iter().map(|e| e.0).collect();
        targets.sort();
        assert_eq!(targets, vec![2, 3, 4, 5, 6]);
        assert!(b.entries.windows(2).all(|w| w[0].1 <= w[1].1));
        for &(v, w) in &b.entries {
            assert_eq!(o.edge_weight(1, v).unwrap(), w);
            assert_eq!(o.edge_weight(v, 1).unwrap(), w);
        }
        // reading the same row again trips the revisit guard
        assert!(matches!(
            o.smallest_incident(1, &[1], f64::INFINITY, s),
            Err(Error::EdgeRevisited(..))
        ));
    }

    #[test]
    fn smallest_incident_respects_forbidden() {
        let mut o = EdgeOracle::lazy(10).unwrap();
        let s = SeededStream::new(4, 4);
        assert!(o.smallest_incident(2, &[1], 1.0, s.clone()).is_err());
        let all: Vec<Vertex> = (1..=10).collect();
        assert!(o.smallest_incident(2, &all, 1.0, s.clone()).is_err());
        let b = o.smallest_incident(2, &[2, 3, 4], f64::INFINITY, s).unwrap();
        assert_eq!(b.entries.len(), 7);
        assert!(b.entries.iter().all(|e| e.0 != 2 && e.0 != 3 && e.0 != 4));
    }

    #[test]
    fn csv_dump_has_all_edges() {
        let mut s = SeededStream::new(5, 5);
        let o = EdgeOracle::materialized(4, &mut s).unwrap();
        let mut buf = Vec::new();
        o.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert!(text.starts_with("u,v,weight\n1,2,"));
    }

    #[test]
    fn from_weights_requires_full_cover() {
        assert!(EdgeOracle::from_weights(3, &[(1, 2, 0.5), (2, 3, 0.5)]).is_err());
        let o = EdgeOracle::from_weights(3, &[(1, 2, 0.5), (2, 3, 0.25), (3, 1, 10.0)]).unwrap();
        assert_eq!(o.edge_weight(1, 3).unwrap(), 10.0);
    }
}
