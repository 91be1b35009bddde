//! Sequential against parallel execution on large generated populations.

use buml::model::{check_conformance_with, ClassModel, ObjectModel};
use buml::ocl::{check_all_with, parse_ocl, OclConstraint};
use buml::Execution;
use buml_testkit::{gen, rng};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const SIZES: [usize; 3] = [1_000, 10_000, 50_000];

/// At least `n` objects, merged from independently generated populations
/// with their ids prefixed by the seed.
fn grow(n: usize, mut part: impl FnMut(u64) -> ObjectModel) -> ObjectModel {
    let mut om = ObjectModel::new("bench");
    let mut seed = 0;
    while om.objects.len() < n {
        let p = part(seed);
        let rename = |id: &str| format!("s{seed}_{id}");
        for mut o in p.objects {
            o.id = rename(&o.id);
            om.objects.push(o);
        }
        for mut l in p.links {
            for end in l.ends.iter_mut() {
                end.object_id = rename(&end.object_id);
            }
            om.links.push(l);
        }
        seed += 1;
    }
    om
}

fn population(n: usize) -> (ClassModel, ObjectModel) {
    let m = bench_model();
    let om = grow(n, |seed| gen::instance_of(&mut rng(seed), &m, 40));
    (m, om)
}

/// First generated model with at least four classes and two associations.
fn bench_model() -> ClassModel {
    (0..)
        .map(|s| gen::class_model(&mut rng(s)))
        .find(|m| {
            m.classes.iter().filter(|c| !c.is_abstract).count() >= 4 && m.associations.len() >= 2
        })
        .expect("some seed qualifies")
}

fn constraints() -> (ClassModel, Vec<OclConstraint>) {
    let text = "\
context Node inv positive: self.n > 0
context Node inv tagged: self.tags->forAll(t | t.w >= 0)
context Node inv named: self.s <> '' or self.b
context Tag inv labelled: self.label <> ''
";
    (
        gen::ocl_class_model(),
        parse_ocl(text).model.expect("constraints parse"),
    )
}

fn ocl_population(n: usize) -> ObjectModel {
    grow(n, |seed| gen::ocl_object_model(&mut rng(seed)))
}

fn modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_conformance");
    group.sample_size(10);
    for n in SIZES {
        let (m, om) = population(n);
        group.throughput(Throughput::Elements(om.objects.len() as u64));
        for (label, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(label, n), &om, |b, om| {
                b.iter(|| check_conformance_with(om, &m, exec))
            });
        }
    }
    group.finish();

    let (m, cs) = constraints();
    let mut group = c.benchmark_group("check_all");
    group.sample_size(10);
    for n in SIZES {
        let om = ocl_population(n);
        group.throughput(Throughput::Elements(om.objects.len() as u64));
        for (label, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(label, n), &om, |b, om| {
                b.iter(|| check_all_with(&cs, om, &m, exec))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, modes);
criterion_main!(benches);
