//! Seeded graph families.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, which is portable,
//! so a given `(family, params, seed)` always yields the same graph. No
//! generator emits self-loops.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

fn require_positive(name: &str, value: usize) -> Result<()> {
    if value == 0 {
        Err(Error::InvalidParameter(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

/// Groups `(source, target)` pairs by source, keeping their relative order.
fn from_arc_sequence(n: usize, arcs: &[(usize, usize)]) -> Result<Graph> {
    let mut offsets = vec![0usize; n + 1];
    for &(u, _) in arcs {
        offsets[u + 1] += 1;
    }
    for u in 0..n {
        offsets[u + 1] += offsets[u];
    }
    let mut fill = offsets.clone();
    let mut targets = vec![0; arcs.len()];
    for &(u, v) in arcs {
        targets[fill[u]] = v;
        fill[u] += 1;
    }
    Graph::from_csr(offsets, targets)
}

/// `m` distinct arcs `u -> v`, `u != v`, drawn uniformly without replacement.
/// A source's adjacency order is the order in which its arcs were drawn.
pub fn gnm(n: usize, m: usize, seed: u64) -> Result<Graph> {
    require_positive("n", n)?;
    let max = n * (n - 1);
    if m > max {
        return Err(Error::TooManyArcs { n, m, max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Pair index k enumerates all off-diagonal (u, v): u = k / (n-1), and v
    // skips over u.
    let arcs: Vec<(usize, usize)> = rand::seq::index::sample(&mut rng, max, m)
        .into_iter()
        .map(|k| {
            let u = k / (n - 1);
            let r = k % (n - 1);
            (u, if r < u { r } else { r + 1 })
        })
        .collect();
    from_arc_sequence(n, &arcs)
}

/// Every ordered pair `u != v`, targets ascending.
pub fn complete(n: usize) -> Result<Graph> {
    require_positive("n", n)?;
    Graph::from_adjacency((0..n).map(|u| (0..n).filter(|&v| v != u).collect::<Vec<_>>()))
}

/// `0 -> 1 -> ... -> n-1`.
pub fn path(n: usize) -> Result<Graph> {
    require_positive("n", n)?;
    Graph::from_adjacency((0..n).map(|u| if u + 1 < n { vec![u + 1] } else { vec![] }))
}

/// `0 -> i` for `i = 1..n`, ascending.
pub fn star_out(n: usize) -> Result<Graph> {
    require_positive("n", n)?;
    Graph::from_adjacency((0..n).map(|u| if u == 0 { (1..n).collect() } else { vec![] }))
}

/// `depth` layers of `width` vertices (layer `k` is `k*width .. (k+1)*width`)
/// with every arc from each layer to the next: `n = width * depth`,
/// `m = width^2 * (depth - 1)`. Each out-list is shuffled with `seed`.
pub fn layered_dag(width: usize, depth: usize, seed: u64) -> Result<Graph> {
    require_positive("width", width)?;
    require_positive("depth", depth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lists = (0..width * depth).map(|u| {
        let layer = u / width;
        if layer + 1 == depth {
            return Vec::new();
        }
        let mut out: Vec<usize> = ((layer + 1) * width..(layer + 2) * width).collect();
        out.shuffle(&mut rng);
        out
    });
    Graph::from_adjacency(lists.collect::<Vec<_>>())
}
