//! Immutable input digraph stored as ordered adjacency arrays.
//!
//! Vertices are `0..n`. The position of a target inside its source's array is
//! significant: ordered DFS and BFS explore arcs in exactly this order.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A simple digraph (no repeated arcs, at most one self-loop per vertex) in
/// compressed adjacency form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

/// One arc named by its position: slot `slot` of `source`'s adjacency array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcRef {
    pub source: usize,
    pub slot: usize,
}

impl ArcRef {
    pub fn new(source: usize, slot: usize) -> Self {
        ArcRef { source, slot }
    }
}

impl Graph {
    /// Builds a graph from per-vertex target lists, keeping their order.
    pub fn from_adjacency<L, T>(lists: L) -> Result<Graph>
    where
        L: IntoIterator<Item = T>,
        T: AsRef<[usize]>,
    {
        let mut offsets = vec![0];
        let mut targets = Vec::new();
        for list in lists {
            targets.extend_from_slice(list.as_ref());
            offsets.push(targets.len());
        }
        Graph::from_csr(offsets, targets)
    }

    /// Validates and wraps an offsets/targets pair. `offsets` has `n + 1`
    /// entries starting at 0; the out-list of `u` is `targets[offsets[u]..offsets[u + 1]]`.
    pub(crate) fn from_csr(offsets: Vec<usize>, targets: Vec<usize>) -> Result<Graph> {
        debug_assert_eq!(offsets.first(), Some(&0));
        debug_assert_eq!(offsets.last(), Some(&targets.len()));
        let n = offsets.len() - 1;
        // Stamp per target: last source that used it. One pass, no hashing.
        let mut seen_from = vec![usize::MAX; n];
        for u in 0..n {
            for (slot, &t) in targets[offsets[u]..offsets[u + 1]].iter().enumerate() {
                if t >= n {
                    return Err(Error::TargetOutOfRange {
                        source_vertex: u,
                        slot,
                        target: t,
                        num_vertices: n,
                    });
                }
                if seen_from[t] == u {
                    return Err(Error::DuplicateArc(u, t));
                }
                seen_from[t] = u;
            }
        }
        Ok(Graph { offsets, targets })
    }

    /// Parses the text edge-list format: a header line `n m`, then exactly `m`
    /// lines `u v`. Lines starting with `#` and blank lines are skipped. The
    /// order in which a source's arcs appear becomes its adjacency order.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut header: Option<(usize, usize)> = None;
        let mut arcs: Vec<(usize, usize)> = Vec::new();
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (a, b) = parse_pair(line, line_no)?;
            match header {
                None => {
                    header = Some((a, b));
                    arcs.reserve(b.min(1 << 24));
                }
                Some((n, _)) => {
                    if a >= n {
                        return Err(Error::Syntax {
                            line: line_no,
                            msg: format!("source {a} is not below n = {n}"),
                        });
                    }
                    arcs.push((a, b));
                }
            }
        }

        let (n, m) = header.ok_or_else(|| Error::Syntax {
            line: last_line + 1,
            msg: "missing \"n m\" header".into(),
        })?;
        if arcs.len() != m {
            return Err(Error::CountMismatch {
                declared: m,
                seen: arcs.len(),
            });
        }

        // Stable counting sort by source keeps order of appearance per source.
        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &arcs {
            offsets[u + 1] += 1;
        }
        for u in 0..n {
            offsets[u + 1] += offsets[u];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; m];
        for &(u, v) in &arcs {
            targets[fill[u]] = v;
            fill[u] += 1;
        }
        Graph::from_csr(offsets, targets)
    }

    /// Writes the edge-list format, arcs grouped by source in adjacency order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + self.num_arcs() * 12);
        let _ = writeln!(out, "{} {}", self.num_vertices(), self.num_arcs());
        for u in 0..self.num_vertices() {
            for &v in self.out(u) {
                let _ = writeln!(out, "{u} {v}");
            }
        }
        out
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn num_arcs(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn outdegree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Ordered targets of `u`.
    #[inline]
    pub fn out(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn target(&self, arc: ArcRef) -> usize {
        self.out(arc.source)[arc.slot]
    }

    /// Index of slot 0 of `u` in the flat arc arrays.
    #[inline]
    pub(crate) fn arc_base(&self, u: usize) -> usize {
        self.offsets[u]
    }

    pub fn out_lists(&self) -> Vec<Vec<usize>> {
        (0..self.num_vertices()).map(|u| self.out(u).to_vec()).collect()
    }

    /// All arcs as `(source, target)` in adjacency order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_vertices()).flat_map(move |u| self.out(u).iter().map(move |&v| (u, v)))
    }
}

fn parse_pair(line: &str, line_no: usize) -> Result<(usize, usize)> {
    let syntax = |msg: &str| Error::Syntax {
        line: line_no,
        msg: msg.to_string(),
    };
    let mut fields = line.split_whitespace();
    let a = fields.next().ok_or_else(|| syntax("expected two integers"))?;
    let b = fields.next().ok_or_else(|| syntax("expected two integers"))?;
    if fields.next().is_some() {
        return Err(syntax("trailing fields"));
    }
    let a = a.parse().map_err(|_| syntax("not a non-negative integer"))?;
    let b = b.parse().map_err(|_| syntax("not a non-negative integer"))?;
    Ok((a, b))
}

/// The nine-vertex example graph used throughout the tests and docs.
///
/// Seven vertex pairs are joined in both directions (0-1, 0-2, 0-3, 0-4, 1-5,
/// 2-5, 3-5) and ten arcs are one-way, 24 arcs in all. Ordered DFS from 0
/// visits 0 1 5 7 8 4 3 6 2; ordered BFS from 0 visits vertices in id order.
pub fn sample_graph() -> Graph {
    Graph::from_adjacency([
        &[1, 2, 3, 4][..],
        &[5, 0],
        &[5, 3, 6, 0],
        &[6, 5, 0],
        &[0, 3, 6],
        &[7, 3, 2, 1],
        &[],
        &[8, 6],
        &[4, 3],
    ])
    .expect("sample graph is valid")
}
