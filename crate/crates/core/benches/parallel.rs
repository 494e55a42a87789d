//! Sequential (one worker) against the default rayon pool on the heaviest kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use vglab::laws::{run_suite, LawConfig};
use vglab::quantale::chain;
use vglab::vgroup::enumerate_vgroup_structures;
use vglab::vrel::{count_vfunctors, enumerate_vcategories, tensor_cat, FUNCTOR_SEARCH_BOUND};
use vglab::{par, FiniteGroup};

const MODES: [(&str, usize); 2] = [("sequential", 1), ("parallel", 0)];

fn structures(c: &mut Criterion) {
    let q = chain(4).unwrap();
    let g = std::sync::Arc::new(FiniteGroup::symmetric(3));
    let mut group = c.benchmark_group("enumerate_vgroup_structures/S3/chain4");
    for (name, jobs) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::with_jobs(jobs, || {
                b.iter(|| enumerate_vgroup_structures(&g, &q, 100_000).unwrap().len())
            })
        });
    }
    group.finish();
}

fn functors(c: &mut Criterion) {
    let q = chain(3).unwrap();
    let cats = enumerate_vcategories(&q, 3).unwrap();
    let source = tensor_cat(&cats[0], &cats[cats.len() / 2]).unwrap();
    let target = &cats[cats.len() - 1];
    let mut group = c.benchmark_group("count_vfunctors/9x3");
    for (name, jobs) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::with_jobs(jobs, || {
                b.iter(|| count_vfunctors(&source, target, FUNCTOR_SEARCH_BOUND).unwrap())
            })
        });
    }
    group.finish();
}

fn suites(c: &mut Criterion) {
    let cfg = LawConfig::default();
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    for id in ["finite_frame_symmetric", "open_iff_proper"] {
        for (name, jobs) in MODES {
            group.bench_function(BenchmarkId::new(id, name), |b| {
                par::with_jobs(jobs, || b.iter(|| run_suite(id, &cfg).unwrap().attempted))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, structures, functors, suites);
criterion_main!(benches);
