use cdga::corpus;
use cdga::extension::extend_to_hodge_type;
use cdga::hodge::hodge_decomposition;
use cdga::homology::homology;
use cdga::orientation::pairing_from_orientation;
use cdga::pipeline::{build_pd_model, Route};
use cdga::random::random_pdga;
use cdga::Field;
use criterion::{criterion_group, criterion_main, Criterion};

const Q: Field = Field::Rational;

fn hodge(c: &mut Criterion) {
    let mut g = c.benchmark_group("hodge_decomposition");
    for name in ["v2", "cp2-sum7", "lambda-abc"] {
        let (a, or) = corpus::by_name(name, Q).unwrap();
        let p = pairing_from_orientation(&a, &or.unwrap());
        g.bench_function(name, |b| b.iter(|| hodge_decomposition(a.complex(), &p).unwrap()));
    }
    g.finish();
}

fn homology_dims(c: &mut Criterion) {
    let (a, _) = corpus::lambda_abc(Q, 12);
    c.bench_function("homology/lambda-abc-12", |b| b.iter(|| homology(a.complex())));
}

fn extension(c: &mut Criterion) {
    let mut g = c.benchmark_group("extension");
    g.sample_size(10);
    let (a, or) = corpus::v2_twisted_pair(Q);
    g.bench_function("v2-twisted-pair", |b| b.iter(|| extend_to_hodge_type(&a, &or).unwrap()));
    let (a, or) = random_pdga(3, Q).unwrap();
    g.bench_function("random-seed-3", |b| b.iter(|| extend_to_hodge_type(&a, &or).unwrap()));
    g.finish();
}

fn model(c: &mut Criterion) {
    let mut g = c.benchmark_group("model");
    g.sample_size(10);
    for name in ["v2", "lambda-abc"] {
        let (a, or) = corpus::by_name(name, Q).unwrap();
        let or = or.unwrap();
        g.bench_function(name, |b| b.iter(|| build_pd_model(&a, &or, Route::Auto).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, hodge, homology_dims, extension, model);
criterion_main!(benches);
