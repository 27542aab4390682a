use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qlam_bench::PROGRAMS;
use qlam_core::machine::{self, invariants::audit_run};
use qlam_core::reducer::{agrees_with_machine, reduce_to_normal};
use qlam_core::{check_well_formed, parse, Calculus};

const BUDGET: usize = machine::DEFAULT_MAX_STEPS;

fn bench(c: &mut Criterion) {
    for &(name, src) in PROGRAMS {
        let t = parse(src).unwrap();
        let mut g = c.benchmark_group(name);
        g.bench_function("parse", |b| b.iter(|| parse(black_box(src)).unwrap()));
        g.bench_function("check", |b| b.iter(|| check_well_formed(black_box(&t)).unwrap()));
        g.bench_function("machine", |b| {
            b.iter(|| machine::run(black_box(&t), Calculus::Quantum, BUDGET).unwrap())
        });
        g.bench_function("reducer", |b| b.iter(|| reduce_to_normal(black_box(&t), BUDGET)));
        g.bench_function("audit", |b| {
            b.iter(|| audit_run(black_box(&t), Calculus::Quantum, BUDGET).unwrap())
        });
        g.bench_function("verify", |b| b.iter(|| agrees_with_machine(black_box(&t), BUDGET).unwrap()));
        g.finish();
    }
}

criterion_group!(benches, bench);
criterion_main!(benches);
