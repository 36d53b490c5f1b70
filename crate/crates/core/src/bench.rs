//! Measurement rows for the speedup tables.

use std::io;
use std::time::Instant;

use serde::Serialize;

use crate::elim::ElimGraph;
use crate::engine::{Backend, CostReport, ParEngine};
use crate::error::Result;
use crate::graph::Graph;
use crate::traversal::{self, Kind};

/// Costs of one build + traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    pub build: CostReport,
    pub traverse: CostReport,
    pub visited: usize,
    /// Wall time of build plus traversal, pool start-up excluded.
    pub wall_nanos: u64,
}

impl Measurement {
    pub fn total(&self) -> CostReport {
        CostReport {
            time_steps: self.build.time_steps + self.traverse.time_steps,
            sync_steps: self.build.sync_steps + self.traverse.sync_steps,
            work: self.build.work + self.traverse.work,
            seq_steps: self.build.seq_steps + self.traverse.seq_steps,
        }
    }
}

pub fn measure(g: &Graph, kind: Kind, start: usize, engine: &mut ParEngine) -> Result<Measurement> {
    let t0 = Instant::now();
    let base = engine.report();
    let mut eg = ElimGraph::build(g, engine)?;
    let built = engine.report();
    let r = match kind {
        Kind::Dfs => traversal::dfs(&mut eg, start, 0, engine)?,
        Kind::Bfs => traversal::bfs(&mut eg, start, 0, engine)?,
    };
    let wall_nanos = t0.elapsed().as_nanos() as u64;
    Ok(Measurement {
        build: built - base,
        traverse: engine.report() - built,
        visited: r.visited_count,
        wall_nanos,
    })
}

/// One CSV row. Cost columns cover build plus traversal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub mode: String,
    pub kind: String,
    pub time_steps: u64,
    pub sync_steps_build: u64,
    pub sync_steps_traverse: u64,
    pub work: u64,
    pub seq_steps: u64,
    /// Threaded rows only.
    pub wall_nanos: Option<u64>,
    /// `time_steps` at p = 1 over `time_steps` at this p.
    pub speedup_model: f64,
}

pub const CSV_COLUMNS: [&str; 13] = [
    "family",
    "n",
    "m",
    "p",
    "mode",
    "kind",
    "time_steps",
    "sync_steps_build",
    "sync_steps_traverse",
    "work",
    "seq_steps",
    "wall_nanos",
    "speedup_model",
];

/// Rows for every `(kind, p)` on one graph, kinds outer, `procs` in the given
/// order. The p = 1 baseline is always computed in simulated mode, whether or
/// not 1 is listed.
pub fn bench_graph(
    family: &str,
    g: &Graph,
    start: usize,
    procs: &[usize],
    kinds: &[Kind],
    backend: Backend,
) -> Result<Vec<BenchRecord>> {
    let mut rows = Vec::with_capacity(procs.len() * kinds.len());
    for &kind in kinds {
        let baseline = measure(g, kind, start, &mut ParEngine::simulated(1)?)?.total();
        for &p in procs {
            let mut engine = ParEngine::new(p, backend)?;
            let meas = measure(g, kind, start, &mut engine)?;
            let total = meas.total();
            rows.push(BenchRecord {
                family: family.to_string(),
                n: g.num_vertices(),
                m: g.num_arcs(),
                p,
                mode: backend.name().to_string(),
                kind: kind.name().to_string(),
                time_steps: total.time_steps,
                sync_steps_build: meas.build.sync_steps,
                sync_steps_traverse: meas.traverse.sync_steps,
                work: total.work,
                seq_steps: total.seq_steps,
                wall_nanos: (backend == Backend::Threaded).then_some(meas.wall_nanos),
                speedup_model: baseline.time_steps as f64 / total.time_steps as f64,
            });
        }
    }
    Ok(rows)
}

pub fn write_csv<W: io::Write>(rows: &[BenchRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, gnm, path};
    use crate::graph::sample_graph;

    #[test]
    fn p1_identity() {
        let g = gnm(256, 32768, 5).unwrap();
        for kind in Kind::ALL {
            let rows = bench_graph("gnm", &g, 0, &[1], &[kind], Backend::Simulated).unwrap();
            let r = &rows[0];
            assert_eq!(r.time_steps, r.work + r.seq_steps);
            assert_eq!(r.speedup_model, 1.0);
        }
    }

    #[test]
    fn complete_speedup_window() {
        let g = complete(64).unwrap();
        let rows = bench_graph("complete", &g, 0, &[1, 2, 4, 8], &[Kind::Dfs], Backend::Simulated).unwrap();
        for r in &rows {
            let p = r.p as f64;
            assert!(r.speedup_model >= 0.5 * p && r.speedup_model <= p, "{r:?}");
            assert_eq!(r.sync_steps_traverse, 64);
            assert_eq!(r.sync_steps_build, 65);
        }
    }

    #[test]
    fn path_has_no_speedup() {
        let g = path(1000).unwrap();
        let procs: Vec<usize> = (1..=8).collect();
        let rows = bench_graph("path", &g, 0, &procs, &Kind::ALL, Backend::Simulated).unwrap();
        for r in &rows {
            assert!(r.speedup_model >= 1.0 && r.speedup_model < 1.3, "{r:?}");
        }
    }

    #[test]
    fn csv_shape_and_reproducibility() {
        let g = sample_graph();
        let rows = bench_graph("sample", &g, 0, &[1, 2], &Kind::ALL, Backend::Simulated).unwrap();
        let mut a = Vec::new();
        write_csv(&rows, &mut a).unwrap();
        let again = bench_graph("sample", &g, 0, &[1, 2], &Kind::ALL, Backend::Simulated).unwrap();
        let mut b = Vec::new();
        write_csv(&again, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(lines.next().unwrap(), "sample,9,24,1,simulated,dfs,83,10,9,57,26,,1.0");
        assert_eq!(lines.count(), 3);

        let mut empty = Vec::new();
        write_csv(&[], &mut empty).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().trim_end(), CSV_COLUMNS.join(","));
    }
}
