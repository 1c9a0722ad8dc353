//! Throughput of the evaluator, the machine, bracket compilation, and
//! one evidenced-frame row.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use mca::algebra::{bracket::bracket, eval};
use mca::effects::{PartialEffect, PowerEffect};
use mca::frame::{check_ef_laws, Core, FrameSampleSpec};
use mca::machine::Machine;
use mca::modality::{PartialModality, SeparatorSpec};
use mca_bench::{bracket_job, church_sum_term, term_pool};

fn bench_eval(c: &mut Criterion) {
    let eff = PartialEffect::default();
    let pool = term_pool(64, 6);
    c.bench_function("eval/partial/pool64", |b| {
        b.iter(|| {
            for e in &pool {
                let _ = black_box(eval(&eff, e, 2_000));
            }
        })
    });

    let sum = church_sum_term(8, 9);
    c.bench_function("eval/partial/church-iter", |b| {
        b.iter(|| black_box(eval(&eff, &sum, 10_000)))
    });

    let eff = PowerEffect::default();
    let flip_tree = mca::syntax::parse("#flip (#flip <1|0>) <1|0> (#flip <1|1> <1|0> <1|1>)")
        .expect("flip tree parses");
    c.bench_function("eval/power/flip-tree", |b| {
        b.iter(|| black_box(eval(&eff, &flip_tree, 2_000)))
    });
}

fn bench_machine(c: &mut Criterion) {
    let pool = term_pool(64, 6);
    c.bench_function("machine/run/pool64", |b| {
        b.iter(|| {
            for e in &pool {
                let _ = black_box(Machine::new().run(e.clone(), 2_000));
            }
        })
    });
}

fn bench_bracket(c: &mut Criterion) {
    let (n, body) = bracket_job();
    c.bench_function("bracket/s-body", |b| {
        b.iter(|| black_box(bracket(n, &body)))
    });
}

fn bench_frame(c: &mut Criterion) {
    let core = Core::new(PartialModality::default(), SeparatorSpec::pure(), 2_000);
    let spec = FrameSampleSpec {
        per_row: 5,
        seed: 0xbe,
    };
    c.bench_function("frame/ef-laws/5rows", |b| {
        b.iter(|| black_box(check_ef_laws(&core, &spec)))
    });
}

criterion_group!(benches, bench_eval, bench_machine, bench_bracket, bench_frame);
criterion_main!(benches);
