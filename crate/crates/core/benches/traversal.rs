use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use arcelim::generators::{complete, gnm};
use arcelim::traversal::{self, Kind};
use arcelim::{Backend, ParEngine};

// Simulated runs every block on the calling thread; threaded splits blocks
// over a pool of p workers (sequential chunks when built without `parallel`).
fn traversals(c: &mut Criterion) {
    let graphs = [
        ("gnm_1024_65536", gnm(1024, 65_536, 1).unwrap()),
        ("complete_256", complete(256).unwrap()),
    ];
    for (name, g) in &graphs {
        for kind in Kind::ALL {
            let mut group = c.benchmark_group(format!("{kind}/{name}"));
            group.sample_size(20);
            group.bench_function("simulated", |b| {
                let mut engine = ParEngine::simulated(1).unwrap();
                b.iter(|| traversal::run(g, kind, 0, 0, &mut engine, &mut ()).unwrap())
            });
            for p in [1, 2, 4, 8] {
                group.bench_with_input(BenchmarkId::new("threaded", p), &p, |b, &p| {
                    let mut engine = ParEngine::new(p, Backend::Threaded).unwrap();
                    b.iter(|| traversal::run(g, kind, 0, 0, &mut engine, &mut ()).unwrap())
                });
            }
            group.finish();
        }
    }
}

criterion_group!(benches, traversals);
criterion_main!(benches);
