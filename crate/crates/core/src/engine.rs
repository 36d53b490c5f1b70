//! Execution and cost accounting for `par` blocks.
//!
//! A [`ParEngine`] runs data-parallel loops whose bodies write pairwise
//! disjoint locations and may read anything (the CREW discipline), with a
//! barrier at the end of every block. Two backends share one semantics:
//!
//! * [`Backend::Simulated`] runs each block in index order on the calling
//!   thread. It is fully deterministic and is what the benchmarks use.
//! * [`Backend::Threaded`] splits a block into `p` contiguous chunks of
//!   `ceil(len / p)` indices and runs them on a pool of `p` workers.
//!
//! Both backends charge the same PRAM-style cost: a block over `len`
//! indices costs `ceil(len / p)` time steps, one synchronization step and
//! `len` units of work. Sequential driver actions are charged with
//! [`ParEngine::seq_tick`].

use std::fmt;
use std::ops::Sub;
use std::sync::Mutex;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Simulated,
    Threaded,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Simulated => "simulated",
            Backend::Threaded => "threaded",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Counter snapshot. Subtract two snapshots to get the cost of a phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CostReport {
    pub time_steps: u64,
    pub sync_steps: u64,
    pub work: u64,
    pub seq_steps: u64,
}

impl CostReport {
    pub const CSV_HEADER: &'static str = "time_steps,sync_steps,work,seq_steps";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.time_steps, self.sync_steps, self.work, self.seq_steps
        )
    }

    /// `key=value` lines, one counter per line.
    pub fn to_key_values(&self) -> String {
        format!(
            "time_steps={}\nsync_steps={}\nwork={}\nseq_steps={}\n",
            self.time_steps, self.sync_steps, self.work, self.seq_steps
        )
    }
}

impl Sub for CostReport {
    type Output = CostReport;

    fn sub(self, rhs: CostReport) -> CostReport {
        CostReport {
            time_steps: self.time_steps - rhs.time_steps,
            sync_steps: self.sync_steps - rhs.sync_steps,
            work: self.work - rhs.work,
            seq_steps: self.seq_steps - rhs.seq_steps,
        }
    }
}

/// Which array a par-block body wrote to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Indeg,
    InTable,
    First,
    Next,
    Prev,
    Dead,
}

/// A single memory cell, as reported to the write log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location {
    pub field: Field,
    pub index: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{}]", self.field, self.index)
    }
}

/// Handed to every body invocation. Bodies report their writes through it;
/// outside validation mode the calls cost a branch.
pub struct BlockCtx {
    log: Option<Mutex<Vec<Location>>>,
}

impl BlockCtx {
    pub(crate) fn new(track_writes: bool) -> BlockCtx {
        BlockCtx {
            log: track_writes.then(|| Mutex::new(Vec::new())),
        }
    }

    #[inline]
    pub fn wrote(&self, field: Field, index: usize) {
        if let Some(log) = &self.log {
            log.lock()
                .expect("write log poisoned")
                .push(Location { field, index });
        }
    }
}

pub struct ParEngine {
    processors: usize,
    backend: Backend,
    validate_writes: bool,
    min_parallel_len: usize,
    cost: CostReport,
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl fmt::Debug for ParEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParEngine")
            .field("processors", &self.processors)
            .field("backend", &self.backend)
            .field("validate_writes", &self.validate_writes)
            .field("cost", &self.cost)
            .finish()
    }
}

impl ParEngine {
    pub fn new(processors: usize, backend: Backend) -> Result<ParEngine> {
        if processors == 0 {
            return Err(Error::NoProcessors);
        }
        #[cfg(feature = "parallel")]
        let pool = match backend {
            Backend::Threaded if processors > 1 => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(processors)
                    .thread_name(|i| format!("arcelim-worker-{i}"))
                    .build()
                    .map_err(|e| Error::Pool(e.to_string()))?,
            ),
            _ => None,
        };
        Ok(ParEngine {
            processors,
            backend,
            validate_writes: false,
            min_parallel_len: 256,
            cost: CostReport::default(),
            #[cfg(feature = "parallel")]
            pool,
        })
    }

    pub fn simulated(processors: usize) -> Result<ParEngine> {
        ParEngine::new(processors, Backend::Simulated)
    }

    pub fn threaded(processors: usize) -> Result<ParEngine> {
        ParEngine::new(processors, Backend::Threaded)
    }

    /// Log every write of every block and fail the block on a repeated location.
    pub fn with_write_validation(mut self, on: bool) -> Self {
        self.validate_writes = on;
        self
    }

    /// Threaded blocks shorter than this run on the calling thread. Cost
    /// accounting is unaffected.
    pub fn with_min_parallel_len(mut self, len: usize) -> Self {
        self.min_parallel_len = len;
        self
    }

    pub fn processors(&self) -> usize {
        self.processors
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn report(&self) -> CostReport {
        self.cost
    }

    /// Charges `units` sequential driver steps.
    #[inline]
    pub fn seq_tick(&mut self, units: u64) {
        self.cost.seq_steps += units;
        self.cost.time_steps += units;
    }

    /// Runs `body(i, ctx)` once for every `i` in `0..len`, then synchronizes.
    ///
    /// Bodies must write disjoint locations. If any body fails, the error of
    /// the lowest failing index is returned.
    pub fn par_for<F>(&mut self, len: usize, body: F) -> Result<()>
    where
        F: Fn(usize, &BlockCtx) -> Result<()> + Sync,
    {
        let p = self.processors;
        self.cost.time_steps += len.div_ceil(p) as u64;
        self.cost.sync_steps += 1;
        self.cost.work += len as u64;

        let ctx = BlockCtx::new(self.validate_writes);

        match self.backend {
            Backend::Simulated => (0..len).try_for_each(|i| body(i, &ctx))?,
            Backend::Threaded => self.run_chunked(len, &body, &ctx)?,
        }

        if let Some(log) = ctx.log {
            let mut writes = log.into_inner().expect("write log poisoned");
            writes.sort_unstable();
            if let Some(w) = writes.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::WriteConflict(w[0]));
            }
        }
        Ok(())
    }

    fn run_chunked<F>(&self, len: usize, body: &F, ctx: &BlockCtx) -> Result<()>
    where
        F: Fn(usize, &BlockCtx) -> Result<()> + Sync,
    {
        let p = self.processors;
        let chunk = len.div_ceil(p).max(1);
        let run = |w: usize| -> Option<(usize, Error)> {
            let end = ((w + 1) * chunk).min(len);
            (w * chunk..end).find_map(|i| body(i, ctx).err().map(|e| (i, e)))
        };

        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            if len >= self.min_parallel_len {
                use rayon::prelude::*;
                let first = pool.install(|| {
                    (0..p)
                        .into_par_iter()
                        .filter_map(run)
                        .min_by_key(|(i, _)| *i)
                });
                return first.map_or(Ok(()), |(_, e)| Err(e));
            }
        }

        (0..p).find_map(run).map_or(Ok(()), |(_, e)| Err(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn engines(p: usize) -> Vec<ParEngine> {
        vec![
            ParEngine::simulated(p).unwrap(),
            ParEngine::threaded(p).unwrap().with_min_parallel_len(0),
        ]
    }

    #[test]
    fn zero_processors_rejected() {
        assert_eq!(ParEngine::simulated(0).unwrap_err(), Error::NoProcessors);
    }

    #[test]
    fn block_accounting() {
        for mut e in engines(4) {
            e.par_for(10, |_, _| Ok(())).unwrap();
            assert_eq!(
                e.report(),
                CostReport {
                    time_steps: 3,
                    sync_steps: 1,
                    work: 10,
                    seq_steps: 0
                }
            );
        }
        let mut e = ParEngine::simulated(8).unwrap();
        let hits = AtomicUsize::new(0);
        e.par_for(0, |_, _| {
            hits.fetch_add(1, Ordering::Relaxed);
            Ok(())
        })
        .unwrap();
        assert_eq!(hits.load(Ordering::Relaxed), 0);
        assert_eq!((e.report().time_steps, e.report().sync_steps), (0, 1));

        let mut e = ParEngine::simulated(1).unwrap();
        e.par_for(7, |_, _| Ok(())).unwrap();
        assert_eq!(e.report().time_steps, 7);
    }

    #[test]
    fn seq_ticks() {
        let mut e = ParEngine::simulated(3).unwrap();
        assert_eq!(e.report(), CostReport::default());
        e.seq_tick(0);
        assert_eq!(e.report(), CostReport::default());
        for _ in 0..3 {
            e.seq_tick(1);
        }
        assert_eq!(e.report().seq_steps, 3);
        assert_eq!(e.report().time_steps, 3);
    }

    #[test]
    fn every_index_runs_once() {
        for p in [1, 2, 3, 7, 16] {
            for mut e in engines(p) {
                for len in [0, 1, 5, 16, 100] {
                    let cells: Vec<AtomicUsize> = (0..len).map(|_| AtomicUsize::new(0)).collect();
                    e.par_for(len, |i, _| {
                        cells[i].fetch_add(1, Ordering::Relaxed);
                        Ok(())
                    })
                    .unwrap();
                    assert!(cells.iter().all(|c| c.load(Ordering::Relaxed) == 1));
                }
            }
        }
    }

    #[test]
    fn lowest_failing_index_wins() {
        for mut e in engines(3) {
            let err = e
                .par_for(9, |i, _| {
                    if i == 4 || i == 7 {
                        Err(Error::InvalidStart(i))
                    } else {
                        Ok(())
                    }
                })
                .unwrap_err();
            assert_eq!(err, Error::InvalidStart(4));
        }
    }

    #[test]
    fn validation_catches_overlapping_writes() {
        for e in engines(2) {
            let mut e = e.with_write_validation(true);
            e.par_for(4, |i, ctx| {
                ctx.wrote(Field::Next, i);
                Ok(())
            })
            .unwrap();
            let err = e
                .par_for(4, |i, ctx| {
                    ctx.wrote(Field::First, i / 2);
                    Ok(())
                })
                .unwrap_err();
            assert_eq!(
                err,
                Error::WriteConflict(Location {
                    field: Field::First,
                    index: 0
                })
            );
        }
    }

    #[test]
    fn time_is_monotone_in_p() {
        let lens = [0usize, 1, 3, 17, 64, 65, 1000];
        let mut last = u64::MAX;
        for p in 1..=20 {
            let mut e = ParEngine::simulated(p).unwrap();
            for &l in &lens {
                e.par_for(l, |_, _| Ok(())).unwrap();
                e.seq_tick(2);
            }
            let r = e.report();
            if p == 1 {
                assert_eq!(r.time_steps, r.work + r.seq_steps);
            }
            assert!(r.time_steps <= last);
            last = r.time_steps;
        }
    }

    #[test]
    fn report_difference() {
        let mut e = ParEngine::simulated(2).unwrap();
        e.par_for(5, |_, _| Ok(())).unwrap();
        let before = e.report();
        e.par_for(4, |_, _| Ok(())).unwrap();
        e.seq_tick(1);
        let d = e.report() - before;
        assert_eq!(
            d,
            CostReport {
                time_steps: 3,
                sync_steps: 1,
                work: 4,
                seq_steps: 1
            }
        );
        assert_eq!(d.csv_row(), "3,1,4,1");
        assert_eq!(
            d.to_key_values(),
            "time_steps=3\nsync_steps=1\nwork=4\nseq_steps=1\n"
        );
    }
}
