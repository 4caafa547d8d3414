use criterion::{black_box, criterion_group, criterion_main, Criterion};
use pegball_bench::{grid_inputs, search_inputs};
use pegball_core::basis::peg_basis;
use pegball_core::{count_ball, generating_set, grid_member, Method, Model, Oracle, TableKind};

fn tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("tables");
    g.sample_size(10);
    for model in Model::ALL {
        g.bench_function(format!("{model} standard n=8"), |b| {
            b.iter(|| {
                Oracle::default()
                    .build_table(model, 8, TableKind::Standard)
                    .unwrap()
            })
        });
        g.bench_function(format!("{model} peg n=5"), |b| {
            b.iter(|| {
                Oracle::default()
                    .build_table(model, 5, TableKind::Peg)
                    .unwrap()
            })
        });
    }
    g.finish();
}

fn search(c: &mut Criterion) {
    let o = Oracle::default();
    let inputs = search_inputs();
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    for model in Model::ALL {
        g.bench_function(format!("{model} n=12"), |b| {
            b.iter(|| {
                for p in &inputs {
                    black_box(o.distance(model, p).unwrap());
                }
            })
        });
    }
    g.finish();
}

fn constructions(c: &mut Criterion) {
    let mut g = c.benchmark_group("constructions");
    g.sample_size(10);
    g.bench_function("rd generating set k=3", |b| {
        b.iter(|| generating_set(Model::Rd, 3))
    });
    g.bench_function("prd generating set k=6", |b| {
        b.iter(|| generating_set(Model::Prd, 6))
    });
    let o = Oracle::default();
    peg_basis(&o, Model::Prd, 2).unwrap();
    g.bench_function("prd peg basis k=2 (warm tables)", |b| {
        b.iter(|| peg_basis(&o, Model::Prd, 2).unwrap())
    });
    g.bench_function("prd k=2 grid count n=10", |b| {
        b.iter(|| count_ball(&o, Model::Prd, 2, 10, Method::Grid).unwrap())
    });
    let grids = grid_inputs();
    g.bench_function("grid membership", |b| {
        b.iter(|| {
            for (pp, p) in &grids {
                black_box(grid_member(pp, p));
            }
        })
    });
    g.finish();
}

criterion_group!(benches, tables, search, constructions);
criterion_main!(benches);
