//! The mutable search structure: per-vertex incoming-arc tables plus a doubly
//! linked "live" list threaded through every adjacency array.
//!
//! Eliminating an arc unlinks its slot in O(1); the adjacency array itself
//! never changes. Link cells are atomics so that par-block bodies can mutate
//! them through a shared reference. Every body writes only cells belonging to
//! its own source vertex, and a simple digraph contributes at most one
//! incoming arc per source to any vertex, so `Relaxed` ordering plus the
//! block barrier is enough.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering::Relaxed};

use crate::engine::{BlockCtx, Field, ParEngine};
use crate::error::{Error, Result};
use crate::graph::{ArcRef, Graph};

/// `prev` value of the first live slot.
pub const NIL: usize = usize::MAX;

fn atomics(len: usize, value: usize) -> Vec<AtomicUsize> {
    (0..len).map(|_| AtomicUsize::new(value)).collect()
}

pub struct ElimGraph<'g> {
    graph: &'g Graph,
    in_offsets: Vec<usize>,
    in_arcs: Vec<ArcRef>,
    first: Vec<AtomicUsize>,
    // Flat over all arcs (indexed by `graph.arc_base(u) + slot`); values are
    // slot indices local to the source, `outdeg` marking the end.
    next: Vec<AtomicUsize>,
    prev: Vec<AtomicUsize>,
    dead: Vec<AtomicBool>,
    pub(crate) traversal: Vec<Option<usize>>,
    pub(crate) distance: Vec<Option<usize>>,
    pub(crate) parent: Vec<Option<usize>>,
}

impl<'g> ElimGraph<'g> {
    /// Computes incoming-arc tables and initial links with `1 + n` par-blocks:
    /// one over all vertices, then one over the out-slots of each vertex in
    /// ascending vertex order. In-tables come out sorted by source.
    pub fn build(graph: &'g Graph, engine: &mut ParEngine) -> Result<ElimGraph<'g>> {
        let n = graph.num_vertices();
        let m = graph.num_arcs();

        // Exact in-table sizes from a counting pass, so the blocks below
        // never reallocate.
        let mut in_offsets = vec![0usize; n + 1];
        for (_, t) in graph.arcs() {
            in_offsets[t + 1] += 1;
        }
        for v in 0..n {
            in_offsets[v + 1] += in_offsets[v];
        }

        let indeg = atomics(n, usize::MAX);
        let first = atomics(n, usize::MAX);
        let in_src = atomics(m, 0);
        let in_slot = atomics(m, 0);
        let next = atomics(m, 0);
        let prev = atomics(m, 0);

        engine.par_for(n, |u, ctx| {
            indeg[u].store(0, Relaxed);
            first[u].store(0, Relaxed);
            ctx.wrote(Field::Indeg, u);
            ctx.wrote(Field::First, u);
            Ok(())
        })?;

        for u in 0..n {
            let out = graph.out(u);
            let base = graph.arc_base(u);
            engine.par_for(out.len(), |i, ctx| {
                let v = out[i];
                let d = indeg[v].load(Relaxed);
                let cell = in_offsets[v] + d;
                in_src[cell].store(u, Relaxed);
                in_slot[cell].store(i, Relaxed);
                indeg[v].store(d + 1, Relaxed);
                next[base + i].store(i + 1, Relaxed);
                prev[base + i].store(if i == 0 { NIL } else { i - 1 }, Relaxed);
                ctx.wrote(Field::InTable, cell);
                ctx.wrote(Field::Indeg, v);
                ctx.wrote(Field::Next, base + i);
                ctx.wrote(Field::Prev, base + i);
                Ok(())
            })?;
        }

        debug_assert!((0..n).all(|v| indeg[v].load(Relaxed) == in_offsets[v + 1] - in_offsets[v]));

        let in_arcs = in_src
            .into_iter()
            .zip(in_slot)
            .map(|(s, i)| ArcRef::new(s.into_inner(), i.into_inner()))
            .collect();

        Ok(ElimGraph {
            graph,
            in_offsets,
            in_arcs,
            first,
            next,
            prev,
            dead: (0..m).map(|_| AtomicBool::new(false)).collect(),
            traversal: vec![None; n],
            distance: vec![None; n],
            parent: vec![None; n],
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn outdegree(&self, u: usize) -> usize {
        self.graph.outdegree(u)
    }

    pub fn indegree(&self, v: usize) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    /// The original incoming arcs of `v`, ordered by source.
    pub fn incoming(&self, v: usize) -> &[ArcRef] {
        &self.in_arcs[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// Index of the first live slot of `u`; equals `outdeg(u)` once exhausted.
    pub fn first(&self, u: usize) -> usize {
        self.first[u].load(Relaxed)
    }

    pub fn next(&self, u: usize, slot: usize) -> usize {
        self.next[self.graph.arc_base(u) + slot].load(Relaxed)
    }

    pub fn prev(&self, u: usize, slot: usize) -> usize {
        self.prev[self.graph.arc_base(u) + slot].load(Relaxed)
    }

    pub fn is_live(&self, arc: ArcRef) -> bool {
        !self.dead[self.graph.arc_base(arc.source) + arc.slot].load(Relaxed)
    }

    pub fn first_live_target(&self, u: usize) -> Option<usize> {
        let f = self.first(u);
        self.graph.out(u).get(f).copied()
    }

    /// Live slots of `u`, following `first`/`next`.
    pub fn live_slots(&self, u: usize) -> LiveSlots<'_, 'g> {
        LiveSlots {
            eg: self,
            u,
            cur: self.first(u),
            end: self.outdegree(u),
        }
    }

    pub fn live_targets(&self, u: usize) -> Vec<usize> {
        let out = self.graph.out(u);
        self.live_slots(u).map(|i| out[i]).collect()
    }

    /// Unlinks one arc outside of any par-block.
    pub fn eliminate(&mut self, arc: ArcRef) -> Result<()> {
        self.unlink(arc, &BlockCtx::new(false))
    }

    /// Removes every incoming arc of `v` in one par-block. Afterwards no live
    /// arc targets `v`.
    pub fn eliminate_incoming(&mut self, v: usize, engine: &mut ParEngine) -> Result<()> {
        let arcs = self.incoming(v);
        let this = &*self;
        engine.par_for(arcs.len(), |i, ctx| this.unlink(arcs[i], ctx))
    }

    fn unlink(&self, arc: ArcRef, ctx: &BlockCtx) -> Result<()> {
        let u = arc.source;
        let outdeg = self.outdegree(u);
        assert!(arc.slot < outdeg, "slot {} out of range for vertex {u}", arc.slot);
        let base = self.graph.arc_base(u);
        let k = base + arc.slot;

        if self.dead[k].load(Relaxed) {
            return Err(Error::AlreadyEliminated {
                vertex: u,
                slot: arc.slot,
            });
        }
        self.dead[k].store(true, Relaxed);
        ctx.wrote(Field::Dead, k);

        let p = self.prev[k].load(Relaxed);
        let x = self.next[k].load(Relaxed);
        if p == NIL {
            self.first[u].store(x, Relaxed);
            ctx.wrote(Field::First, u);
        } else {
            self.next[base + p].store(x, Relaxed);
            ctx.wrote(Field::Next, base + p);
        }
        if x < outdeg {
            self.prev[base + x].store(p, Relaxed);
            ctx.wrote(Field::Prev, base + x);
        }
        Ok(())
    }

    pub fn is_visited(&self, v: usize) -> bool {
        self.traversal[v].is_some()
    }

    pub fn traversal_number(&self, v: usize) -> Option<usize> {
        self.traversal[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn distance(&self, v: usize) -> Option<usize> {
        self.distance[v]
    }

    /// Number of eliminated arcs.
    pub fn eliminated_count(&self) -> usize {
        self.dead.iter().filter(|d| d.load(Relaxed)).count()
    }

    /// Checks the live list of `u`: strictly increasing slots from `first`,
    /// ending exactly at `outdeg`, `prev` mirroring `next`, and agreeing with
    /// the dead flags.
    pub fn check_links(&self, u: usize) -> std::result::Result<(), String> {
        let outdeg = self.outdegree(u);
        let base = self.graph.arc_base(u);
        let mut expected_prev = NIL;
        let mut cur = self.first(u);
        let mut live = 0;
        while cur != outdeg {
            if cur > outdeg {
                return Err(format!("vertex {u}: link {cur} past outdeg {outdeg}"));
            }
            if expected_prev != NIL && cur <= expected_prev {
                return Err(format!("vertex {u}: slots not increasing at {cur}"));
            }
            if self.dead[base + cur].load(Relaxed) {
                return Err(format!("vertex {u}: dead slot {cur} is linked"));
            }
            let p = self.prev[base + cur].load(Relaxed);
            if p != expected_prev {
                return Err(format!(
                    "vertex {u}: prev[{cur}] = {p}, expected {expected_prev}"
                ));
            }
            live += 1;
            expected_prev = cur;
            cur = self.next[base + cur].load(Relaxed);
        }
        let alive = (0..outdeg)
            .filter(|&i| !self.dead[base + i].load(Relaxed))
            .count();
        if alive != live {
            return Err(format!(
                "vertex {u}: {alive} slots not dead but {live} linked"
            ));
        }
        Ok(())
    }

    /// One line per vertex: `u: live=[t1,t2] first=f indeg=d`.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        for u in 0..self.num_vertices() {
            let live: Vec<String> = self.live_targets(u).iter().map(usize::to_string).collect();
            let _ = writeln!(
                out,
                "{u}: live=[{}] first={} indeg={}",
                live.join(","),
                self.first(u),
                self.indegree(u)
            );
        }
        out
    }
}

pub struct LiveSlots<'a, 'g> {
    eg: &'a ElimGraph<'g>,
    u: usize,
    cur: usize,
    end: usize,
}

impl Iterator for LiveSlots<'_, '_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.cur >= self.end {
            return None;
        }
        let slot = self.cur;
        self.cur = self.eg.next(self.u, slot);
        Some(slot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_graph;
    use proptest::prelude::*;

    fn sim(p: usize) -> ParEngine {
        ParEngine::simulated(p).unwrap()
    }

    /// Brute force: every (source, slot) whose target is `v`, by scanning all out-lists.
    fn incoming_by_scan(g: &Graph, v: usize) -> Vec<ArcRef> {
        let mut arcs = Vec::new();
        for u in 0..g.num_vertices() {
            for (i, &t) in g.out(u).iter().enumerate() {
                if t == v {
                    arcs.push(ArcRef::new(u, i));
                }
            }
        }
        arcs
    }

    #[test]
    fn build_sample_in_tables() {
        let g = sample_graph();
        let eg = ElimGraph::build(&g, &mut sim(1)).unwrap();
        let pairs = |v| -> Vec<(usize, usize)> {
            eg.incoming(v).iter().map(|a| (a.source, a.slot)).collect()
        };
        assert_eq!(eg.indegree(3), 5);
        assert_eq!(pairs(3), vec![(0, 2), (2, 1), (4, 1), (5, 1), (8, 1)]);
        assert_eq!(eg.indegree(7), 1);
        assert_eq!(pairs(7), vec![(5, 0)]);
        for v in 0..g.num_vertices() {
            assert_eq!(eg.incoming(v), incoming_by_scan(&g, v).as_slice());
        }
    }

    #[test]
    fn build_initial_links() {
        let g = sample_graph();
        let eg = ElimGraph::build(&g, &mut sim(3)).unwrap();
        for u in 0..g.num_vertices() {
            let d = g.outdegree(u);
            assert_eq!(eg.first(u), 0);
            let next: Vec<_> = (0..d).map(|i| eg.next(u, i)).collect();
            let prev: Vec<_> = (0..d).map(|i| eg.prev(u, i)).collect();
            assert_eq!(next, (1..=d).collect::<Vec<_>>());
            let mut want_prev = vec![NIL];
            want_prev.extend(0..d.saturating_sub(1));
            want_prev.truncate(d);
            assert_eq!(prev, want_prev);
            assert_eq!(eg.live_targets(u), g.out(u));
            assert!(eg.traversal_number(u).is_none());
        }
    }

    #[test]
    fn build_cost_on_sample() {
        let g = sample_graph();
        let mut e = sim(1);
        ElimGraph::build(&g, &mut e).unwrap();
        let r = e.report();
        assert_eq!(r.sync_steps, 10);
        assert_eq!(r.work, 9 + 24);
        assert_eq!(r.time_steps, 33);

        let mut e = sim(2);
        ElimGraph::build(&g, &mut e).unwrap();
        // ceil(9/2) + sum over outdegrees 4,2,4,3,3,4,0,2,2 of ceil(d/2)
        assert_eq!(e.report().time_steps, 5 + [2, 1, 2, 2, 2, 2, 0, 1, 1].iter().sum::<u64>());
    }

    #[test]
    fn build_writes_are_disjoint() {
        let g = sample_graph();
        for p in [1, 2, 4] {
            let mut e = ParEngine::threaded(p)
                .unwrap()
                .with_min_parallel_len(0)
                .with_write_validation(true);
            ElimGraph::build(&g, &mut e).unwrap();
        }
    }

    #[test]
    fn eliminate_sequence_on_vertex_zero() {
        let g = sample_graph();
        let mut eg = ElimGraph::build(&g, &mut sim(1)).unwrap();
        eg.eliminate(ArcRef::new(0, 1)).unwrap();
        assert_eq!(eg.live_targets(0), vec![1, 3, 4]);
        assert_eq!(eg.next(0, 0), 2);
        assert_eq!(eg.prev(0, 2), 0);
        eg.check_links(0).unwrap();

        eg.eliminate(ArcRef::new(0, 0)).unwrap();
        assert_eq!(eg.first(0), 2);
        assert_eq!(eg.live_targets(0), vec![3, 4]);
        assert_eq!(eg.prev(0, 2), NIL);
        eg.check_links(0).unwrap();

        assert_eq!(
            eg.eliminate(ArcRef::new(0, 1)),
            Err(Error::AlreadyEliminated { vertex: 0, slot: 1 })
        );
    }

    #[test]
    fn eliminate_only_arc_exhausts_list() {
        let g = Graph::from_adjacency([vec![1], vec![]]).unwrap();
        let mut eg = ElimGraph::build(&g, &mut sim(1)).unwrap();
        eg.eliminate(ArcRef::new(0, 0)).unwrap();
        assert_eq!(eg.first(0), 1);
        assert_eq!(eg.first_live_target(0), None);
    }

    #[test]
    fn eliminate_incoming_of_zero() {
        let g = sample_graph();
        let mut e = sim(2);
        let mut eg = ElimGraph::build(&g, &mut e).unwrap();
        let before = e.report();
        eg.eliminate_incoming(0, &mut e).unwrap();
        assert_eq!((e.report() - before).sync_steps, 1);
        assert_eq!(eg.live_targets(1), vec![5]);
        assert_eq!(eg.first(1), 0);
        assert_eq!(eg.live_targets(2), vec![5, 3, 6]);
        assert_eq!(eg.live_targets(3), vec![6, 5]);
        assert_eq!(eg.live_targets(4), vec![3, 6]);
        assert_eq!(eg.first(4), 1);
        for u in 0..g.num_vertices() {
            assert!(!eg.live_targets(u).contains(&0));
            eg.check_links(u).unwrap();
        }
    }

    #[test]
    fn eliminate_incoming_empty_still_syncs() {
        let g = Graph::from_adjacency([vec![1], vec![]]).unwrap();
        let mut e = sim(4);
        let mut eg = ElimGraph::build(&g, &mut e).unwrap();
        let before = e.report();
        let dump = eg.debug_dump();
        eg.eliminate_incoming(0, &mut e).unwrap();
        let d = e.report() - before;
        assert_eq!((d.sync_steps, d.work, d.time_steps), (1, 0, 0));
        assert_eq!(eg.debug_dump(), dump);
    }

    #[test]
    fn self_loop_is_eliminated() {
        let g = Graph::from_adjacency([vec![0]]).unwrap();
        let mut e = sim(1);
        let mut eg = ElimGraph::build(&g, &mut e).unwrap();
        eg.eliminate_incoming(0, &mut e).unwrap();
        assert_eq!(eg.first(0), 1);
        assert_eq!(eg.first(0), eg.outdegree(0));
    }

    #[test]
    fn first_live_target_examples() {
        let g = sample_graph();
        let mut e = sim(1);
        let mut eg = ElimGraph::build(&g, &mut e).unwrap();
        assert_eq!(eg.first_live_target(5), Some(7));
        assert_eq!(eg.first_live_target(6), None);
        eg.eliminate_incoming(7, &mut e).unwrap();
        assert_eq!(eg.first_live_target(5), Some(3));
    }

    #[test]
    fn second_elimination_of_same_vertex_fails() {
        let g = sample_graph();
        let mut e = sim(1);
        let mut eg = ElimGraph::build(&g, &mut e).unwrap();
        eg.eliminate_incoming(3, &mut e).unwrap();
        assert!(matches!(
            eg.eliminate_incoming(3, &mut e),
            Err(Error::AlreadyEliminated { .. })
        ));
    }

    #[test]
    fn dump_format() {
        let g = Graph::from_adjacency([vec![1, 2], vec![2], vec![]]).unwrap();
        let mut e = sim(1);
        let mut eg = ElimGraph::build(&g, &mut e).unwrap();
        eg.eliminate_incoming(1, &mut e).unwrap();
        assert_eq!(
            eg.debug_dump(),
            "0: live=[2] first=1 indeg=0\n1: live=[2] first=0 indeg=1\n2: live=[] first=0 indeg=2\n"
        );
    }

    proptest! {
        /// Eliminating any set of arcs in any order leaves each live list equal
        /// to the original list filtered by the survivors, with intact links.
        #[test]
        fn live_lists_match_filtered_original(
            lists in (1usize..8).prop_flat_map(|n| proptest::collection::vec(
                proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n).prop_shuffle(), n)),
            order in proptest::collection::vec(any::<proptest::sample::Index>(), 0..40),
        ) {
            let g = Graph::from_adjacency(&lists).unwrap();
            let mut eg = ElimGraph::build(&g, &mut sim(1)).unwrap();
            let all: Vec<ArcRef> = (0..g.num_vertices())
                .flat_map(|u| (0..g.outdegree(u)).map(move |i| ArcRef::new(u, i)))
                .collect();
            prop_assume!(!all.is_empty());
            let mut removed = std::collections::HashSet::new();
            for ix in order {
                let arc = *ix.get(&all);
                let res = eg.eliminate(arc);
                if removed.insert(arc) {
                    prop_assert!(res.is_ok());
                } else {
                    prop_assert!(res.is_err());
                }
                for u in 0..g.num_vertices() {
                    prop_assert!(eg.check_links(u).is_ok());
                    let want: Vec<usize> = g.out(u).iter().enumerate()
                        .filter(|&(i, _)| !removed.contains(&ArcRef::new(u, i)))
                        .map(|(_, &t)| t)
                        .collect();
                    prop_assert_eq!(eg.live_targets(u), want);
                }
            }
        }
    }
}
