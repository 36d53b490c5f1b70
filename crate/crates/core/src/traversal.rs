//! Ordered DFS and BFS drivers over an [`ElimGraph`].
//!
//! The drivers are sequential. On every visit they eliminate the new vertex's
//! incoming arcs in one par-block, so a vertex's first live arc always leads
//! to an unvisited vertex and no arc is ever examined twice.
//!
//! Driver actions charged through [`ParEngine::seq_tick`], one unit each:
//! every visit, every descent or discovery along a live arc, every DFS
//! return, and every BFS enqueue and dequeue.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};
use std::io;

use crate::elim::ElimGraph;
use crate::engine::ParEngine;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::oracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Dfs,
    Bfs,
}

impl Kind {
    pub const ALL: [Kind; 2] = [Kind::Dfs, Kind::Bfs];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Dfs => "dfs",
            Kind::Bfs => "bfs",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Kind, String> {
        match s.to_ascii_lowercase().as_str() {
            "dfs" => Ok(Kind::Dfs),
            "bfs" => Ok(Kind::Bfs),
            other => Err(format!("unknown traversal kind {other:?}")),
        }
    }
}

/// Per-vertex output of a traversal. Unvisited vertices have `None` everywhere;
/// `distance` is only filled by BFS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraversalResult {
    pub traversal: Vec<Option<usize>>,
    pub parent: Vec<Option<usize>>,
    pub distance: Vec<Option<usize>>,
    pub visited_count: usize,
    pub next_number: usize,
}

impl TraversalResult {
    fn snapshot(eg: &ElimGraph<'_>, visited_count: usize, next_number: usize) -> Self {
        TraversalResult {
            traversal: eg.traversal.clone(),
            parent: eg.parent.clone(),
            distance: eg.distance.clone(),
            visited_count,
            next_number,
        }
    }

    /// Tree arcs `(parent, child)` sorted by child.
    pub fn tree_arcs(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (p, v)))
            .collect()
    }

    /// Visited vertices in visit order.
    pub fn visit_order(&self) -> Vec<usize> {
        let mut order: Vec<(usize, usize)> = self
            .traversal
            .iter()
            .enumerate()
            .filter_map(|(v, t)| t.map(|t| (t, v)))
            .collect();
        order.sort_unstable();
        order.into_iter().map(|(_, v)| v).collect()
    }

    /// One line per vertex, `v traversal parent distance`, `-` for absent.
    pub fn to_dump(&self) -> String {
        fn field(x: Option<usize>) -> String {
            x.map_or_else(|| "-".to_string(), |x| x.to_string())
        }
        let mut out = String::new();
        for v in 0..self.traversal.len() {
            let _ = writeln!(
                out,
                "{v} {} {} {}",
                field(self.traversal[v]),
                field(self.parent[v]),
                field(self.distance[v])
            );
        }
        out
    }

    /// Reads the format written by [`TraversalResult::to_dump`]. Vertices must
    /// appear in id order. `next_number` is taken as one past the largest number.
    pub fn parse_dump(text: &str) -> Result<TraversalResult> {
        let mut r = TraversalResult {
            traversal: Vec::new(),
            parent: Vec::new(),
            distance: Vec::new(),
            visited_count: 0,
            next_number: 0,
        };
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |msg: &str| Error::Syntax {
                line: idx + 1,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(syntax("expected `v traversal parent distance`"));
            }
            let v: usize = fields[0].parse().map_err(|_| syntax("bad vertex id"))?;
            if v != r.traversal.len() {
                return Err(syntax("vertices out of order"));
            }
            let opt = |s: &str| -> Result<Option<usize>> {
                if s == "-" {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|_| syntax("bad field"))
                }
            };
            r.traversal.push(opt(fields[1])?);
            r.parent.push(opt(fields[2])?);
            r.distance.push(opt(fields[3])?);
        }
        r.visited_count = r.traversal.iter().flatten().count();
        r.next_number = r.traversal.iter().flatten().max().map_or(0, |&t| t + 1);
        Ok(r)
    }
}

/// Queues and counters of the level-synchronous BFS driver.
#[derive(Debug, Clone, Default)]
pub struct BfsLevelState {
    /// Current level.
    pub q: VecDeque<usize>,
    /// Level being filled.
    pub q_next: VecDeque<usize>,
    pub level: usize,
    /// Number of the most recently visited vertex.
    pub number: usize,
}

/// Hooks called by the drivers. All methods default to doing nothing.
pub trait Observer {
    /// `v` has just been visited; its incoming arcs are already eliminated.
    /// `level` is the BFS distance or the DFS tree depth.
    fn on_visit(&mut self, _eg: &ElimGraph<'_>, _v: usize, _number: usize, _level: usize) {}

    /// BFS finished scanning one level; `state.q_next` holds the next level.
    fn on_level_done(&mut self, _eg: &ElimGraph<'_>, _state: &BfsLevelState) {}
}

impl Observer for () {}

/// Writes `visit v number=k level=l` for every visit.
pub struct TraceObserver<W> {
    out: W,
}

impl<W: io::Write> TraceObserver<W> {
    pub fn new(out: W) -> Self {
        TraceObserver { out }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: io::Write> Observer for TraceObserver<W> {
    fn on_visit(&mut self, _eg: &ElimGraph<'_>, v: usize, number: usize, level: usize) {
        let _ = writeln!(self.out, "visit {v} number={number} level={level}");
    }
}

/// Audits the elimination structure after every visit: link integrity, every
/// live list equal to its original list minus visited targets (hence no live
/// arc into a visited vertex), and no live arcs inside a BFS next level.
/// Each check walks the whole graph, so this is for tests.
#[derive(Debug, Default)]
pub struct InvariantChecker {
    visited: Vec<bool>,
    pub visits: usize,
    pub violations: Vec<String>,
}

impl InvariantChecker {
    pub fn new() -> Self {
        Self::default()
    }

    fn scan(&mut self, eg: &ElimGraph<'_>) {
        let g = eg.graph();
        for u in 0..g.num_vertices() {
            if let Err(e) = eg.check_links(u) {
                self.violations.push(e);
                continue;
            }
            let live = eg.live_targets(u);
            if let Some(&t) = live.iter().find(|&&t| self.visited[t]) {
                self.violations
                    .push(format!("live arc {u} -> {t} into visited vertex"));
            }
            let expect: Vec<usize> = g.out(u).iter().copied().filter(|&t| !self.visited[t]).collect();
            if live != expect {
                self.violations
                    .push(format!("vertex {u}: live {live:?}, expected {expect:?}"));
            }
        }
    }

    /// Final check: exactly the arcs into visited vertices were eliminated.
    pub fn finish(&mut self, eg: &ElimGraph<'_>) {
        let g = eg.graph();
        self.visited.resize(g.num_vertices(), false);
        let mut into_visited = 0;
        for u in 0..g.num_vertices() {
            for (i, &t) in g.out(u).iter().enumerate() {
                let live = eg.is_live(crate::graph::ArcRef::new(u, i));
                if self.visited[t] {
                    into_visited += 1;
                }
                if live == self.visited[t] {
                    self.violations.push(format!(
                        "arc {u}[{i}] -> {t}: live={live}, target visited={}",
                        self.visited[t]
                    ));
                }
            }
        }
        if eg.eliminated_count() != into_visited {
            self.violations.push(format!(
                "{} arcs eliminated, {into_visited} arcs into visited vertices",
                eg.eliminated_count()
            ));
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Observer for InvariantChecker {
    fn on_visit(&mut self, eg: &ElimGraph<'_>, v: usize, _number: usize, _level: usize) {
        self.visited.resize(eg.num_vertices(), false);
        if self.visited[v] {
            self.violations.push(format!("vertex {v} visited twice"));
        }
        self.visited[v] = true;
        self.visits += 1;
        self.scan(eg);
    }

    fn on_level_done(&mut self, eg: &ElimGraph<'_>, state: &BfsLevelState) {
        let members: std::collections::HashSet<usize> = state.q_next.iter().copied().collect();
        for &w in &state.q_next {
            if let Some(t) = eg.live_targets(w).into_iter().find(|t| members.contains(t)) {
                self.violations.push(format!(
                    "level {}: live arc {w} -> {t} inside next level",
                    state.level
                ));
            }
        }
    }
}

fn check_start(eg: &ElimGraph<'_>, s: usize) -> Result<()> {
    if s >= eg.num_vertices() {
        return Err(Error::InvalidStart(s));
    }
    if eg.is_visited(s) {
        return Err(Error::AlreadyVisited(s));
    }
    Ok(())
}

/// Ordered DFS from `s`, numbering reachable vertices `a, a+1, ...`.
pub fn dfs(eg: &mut ElimGraph<'_>, s: usize, a: usize, engine: &mut ParEngine) -> Result<TraversalResult> {
    dfs_observed(eg, s, a, engine, &mut ())
}

pub fn dfs_observed(
    eg: &mut ElimGraph<'_>,
    s: usize,
    a: usize,
    engine: &mut ParEngine,
    obs: &mut impl Observer,
) -> Result<TraversalResult> {
    let next_number = dfs_inner(eg, s, a, engine, obs)?;
    Ok(TraversalResult::snapshot(eg, next_number - a, next_number))
}

fn dfs_inner(
    eg: &mut ElimGraph<'_>,
    s: usize,
    a: usize,
    engine: &mut ParEngine,
    obs: &mut impl Observer,
) -> Result<usize> {
    check_start(eg, s)?;
    let mut number = a;
    let mut visit = |eg: &mut ElimGraph<'_>, engine: &mut ParEngine, v: usize, depth: usize| -> Result<()> {
        eg.eliminate_incoming(v, engine)?;
        eg.traversal[v] = Some(number);
        engine.seq_tick(1);
        obs.on_visit(eg, v, number, depth);
        number += 1;
        Ok(())
    };

    visit(eg, engine, s, 0)?;
    // Replaces the recursion: after a child returns, re-reading `first` of the
    // parent skips the arc just followed, which the child's visit eliminated.
    let mut stack = vec![s];
    while let Some(&u) = stack.last() {
        engine.seq_tick(1);
        match eg.first_live_target(u) {
            Some(v) => {
                debug_assert!(!eg.is_visited(v));
                eg.parent[v] = Some(u);
                visit(eg, engine, v, stack.len())?;
                stack.push(v);
            }
            None => {
                stack.pop();
            }
        }
    }
    Ok(number)
}

/// DFS forest: runs [`dfs`] from every still-unvisited vertex in id order,
/// numbering continuously from `a`. Not part of the single-source algorithm;
/// provided as a convenience driver.
pub fn dfs_forest(eg: &mut ElimGraph<'_>, a: usize, engine: &mut ParEngine) -> Result<TraversalResult> {
    let mut number = a;
    for s in 0..eg.num_vertices() {
        if !eg.is_visited(s) {
            number = dfs_inner(eg, s, number, engine, &mut ())?;
        }
    }
    Ok(TraversalResult::snapshot(eg, number - a, number))
}

/// Ordered, level-synchronous BFS from `s`. `s` gets number `a` and distance 0;
/// the k-th vertex visited after it gets `a + k`.
pub fn bfs(eg: &mut ElimGraph<'_>, s: usize, a: usize, engine: &mut ParEngine) -> Result<TraversalResult> {
    bfs_observed(eg, s, a, engine, &mut ())
}

pub fn bfs_observed(
    eg: &mut ElimGraph<'_>,
    s: usize,
    a: usize,
    engine: &mut ParEngine,
    obs: &mut impl Observer,
) -> Result<TraversalResult> {
    check_start(eg, s)?;

    eg.eliminate_incoming(s, engine)?;
    let mut st = BfsLevelState {
        number: a,
        ..Default::default()
    };
    eg.traversal[s] = Some(a);
    eg.distance[s] = Some(0);
    engine.seq_tick(1);
    obs.on_visit(eg, s, a, 0);
    st.q.push_back(s);
    engine.seq_tick(1);

    loop {
        st.level += 1;
        while let Some(u) = st.q.pop_front() {
            engine.seq_tick(1);
            while let Some(v) = eg.first_live_target(u) {
                engine.seq_tick(1);
                debug_assert!(!eg.is_visited(v));
                eg.eliminate_incoming(v, engine)?;
                st.number += 1;
                eg.traversal[v] = Some(st.number);
                eg.distance[v] = Some(st.level);
                eg.parent[v] = Some(u);
                engine.seq_tick(1);
                obs.on_visit(eg, v, st.number, st.level);
                st.q_next.push_back(v);
                engine.seq_tick(1);
            }
        }
        obs.on_level_done(eg, &st);
        std::mem::swap(&mut st.q, &mut st.q_next);
        if st.q.is_empty() {
            break;
        }
    }

    let next_number = st.number + 1;
    Ok(TraversalResult::snapshot(eg, next_number - a, next_number))
}

/// Builds an [`ElimGraph`] and runs `kind` from `s` in one call.
pub fn run(
    g: &Graph,
    kind: Kind,
    s: usize,
    a: usize,
    engine: &mut ParEngine,
    obs: &mut impl Observer,
) -> Result<TraversalResult> {
    let mut eg = ElimGraph::build(g, engine)?;
    match kind {
        Kind::Dfs => dfs_observed(&mut eg, s, a, engine, obs),
        Kind::Bfs => bfs_observed(&mut eg, s, a, engine, obs),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultField {
    Traversal,
    Parent,
    Distance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub vertex: usize,
    pub field: ResultField,
    pub expected: Option<usize>,
    pub actual: Option<usize>,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "vertex {}: {:?} expected {:?}, got {:?}",
            self.vertex, self.field, self.expected, self.actual
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchReport {
    pub kind: Kind,
    pub start: usize,
    pub mismatches: Vec<Mismatch>,
}

impl MatchReport {
    pub fn is_match(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn first_mismatch(&self) -> Option<&Mismatch> {
        self.mismatches.first()
    }
}

/// Field-by-field comparison, ordered by vertex. A length difference is
/// reported against the missing vertices.
pub fn compare_results(expected: &TraversalResult, actual: &TraversalResult) -> Vec<Mismatch> {
    let n = expected.traversal.len().max(actual.traversal.len());
    let get = |v: &Vec<Option<usize>>, i: usize| v.get(i).copied().flatten();
    let mut out = Vec::new();
    for v in 0..n {
        let fields = [
            (ResultField::Traversal, &expected.traversal, &actual.traversal),
            (ResultField::Parent, &expected.parent, &actual.parent),
            (ResultField::Distance, &expected.distance, &actual.distance),
        ];
        for (field, e, a) in fields {
            let missing = v >= e.len() || v >= a.len();
            if missing || get(e, v) != get(a, v) {
                out.push(Mismatch {
                    vertex: v,
                    field,
                    expected: get(e, v),
                    actual: get(a, v),
                });
            }
        }
    }
    out
}

pub fn oracle_result(g: &Graph, kind: Kind, s: usize, a: usize) -> Result<TraversalResult> {
    match kind {
        Kind::Dfs => oracle::seq_dfs(g, s, a),
        Kind::Bfs => oracle::seq_bfs(g, s, a),
    }
}

/// Runs the arc-elimination traversal and the sequential oracle from `s`
/// (numbering from 0) and compares them.
pub fn verify_against_oracle(g: &Graph, s: usize, kind: Kind) -> Result<MatchReport> {
    verify_with_engine(g, s, kind, &mut ParEngine::simulated(1)?)
}

pub fn verify_with_engine(g: &Graph, s: usize, kind: Kind, engine: &mut ParEngine) -> Result<MatchReport> {
    let expected = oracle_result(g, kind, s, 0)?;
    let actual = run(g, kind, s, 0, engine, &mut ())?;
    Ok(MatchReport {
        kind,
        start: s,
        mismatches: compare_results(&expected, &actual),
    })
}
