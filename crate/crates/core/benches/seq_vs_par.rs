use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eqv_core::burnside::table_of_marks_with;
use eqv_core::gset::{diagonal_power, orbit_decompose_with};
use eqv_core::lattice::SubgroupLattice;
use eqv_core::mlp::{build_regular_net, Tensor};
use eqv_core::{Builtin, Caps, Exec, GroupAction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn lattice_and_marks(c: &mut Criterion) {
    let mut group = c.benchmark_group("lattice+marks");
    group.sample_size(10);
    for b in [Builtin::Alternating(5), Builtin::Symmetric(5)] {
        let g = Arc::new(b.build().unwrap());
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, b.name()), &g, |bench, g| {
                bench.iter(|| {
                    let l = SubgroupLattice::build_with(g, &Caps::default(), exec).unwrap();
                    table_of_marks_with(l, exec)
                })
            });
        }
    }
    group.finish();
}

fn explicit_power(c: &mut Criterion) {
    let g = Arc::new(Builtin::Alternating(5).build().unwrap());
    let lattice = SubgroupLattice::build(&g, &Caps::default()).unwrap();
    let cube = diagonal_power(&GroupAction::natural(g), 4, &Caps::default()).unwrap();
    let mut group = c.benchmark_group("orbit_decompose A5 on 5^4");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |bench| bench.iter(|| orbit_decompose_with(&cube.action, &lattice, exec).unwrap()));
    }
    group.finish();
}

fn batch_forward(c: &mut Criterion) {
    let g = Arc::new(Builtin::Symmetric(5).build().unwrap());
    let nat = GroupAction::natural(g);
    let mut net = build_regular_net(&nat, &nat, 8).unwrap();
    net.init_uniform(1);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let xs: Vec<Tensor> = (0..512).map(|_| Tensor::vector((0..5).map(|_| rng.gen_range(-1.0..1.0)).collect())).collect();
    let mut group = c.benchmark_group("forward_batch S5 regular x8");
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |bench| bench.iter(|| net.forward_batch(&xs, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, lattice_and_marks, explicit_power, batch_forward);
criterion_main!(benches);
