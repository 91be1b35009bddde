use buml::flex::{enforce_conformance, infer_class_model};
use buml::model::{check_conformance, validate_class_model, ObjectModel};
use buml::Code;
use buml_testkit::gen::{self, ObjectShape};
use buml_testkit::rng;
use proptest::prelude::*;

const BREAKING: [Code; 2] = [Code::InferLossyType, Code::InferPartialSlot];

fn homogeneous(seed: u64) -> ObjectModel {
    gen::object_model(&mut rng(seed), ObjectShape::default())
}

fn broad(seed: u64) -> ObjectModel {
    gen::object_model(
        &mut rng(seed),
        ObjectShape {
            heterogeneous: true,
            ..Default::default()
        },
    )
}

/// `sub` keeps a subsequence of `sup`'s objects, slots and links.
fn is_pruning_of(sub: &ObjectModel, sup: &ObjectModel) -> bool {
    fn subsequence<T, U>(xs: &[T], ys: &[U], same: impl Fn(&T, &U) -> bool) -> bool {
        let mut it = ys.iter();
        xs.iter().all(|x| it.any(|y| same(x, y)))
    }
    subsequence(&sub.objects, &sup.objects, |a, b| {
        a.id == b.id
            && a.classifier == b.classifier
            && subsequence(&a.slots, &b.slots, |x, y| x == y)
    }) && subsequence(&sub.links, &sup.links, |a, b| a == b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn inferred_model_accepts_its_source(seed in any::<u64>()) {
        let om = homogeneous(seed);
        let inf = infer_class_model(&om);
        prop_assert_eq!(validate_class_model(&inf.model), vec![]);
        prop_assert!(inf.diagnostics.iter().all(|d| !BREAKING.contains(&d.code)));
        prop_assert_eq!(check_conformance(&om, &inf.model), vec![]);
    }

    #[test]
    fn acceptance_fails_exactly_when_inference_warns(seed in any::<u64>()) {
        let om = broad(seed);
        let inf = infer_class_model(&om);
        prop_assert_eq!(validate_class_model(&inf.model), vec![]);
        let warned = inf.diagnostics.iter().any(|d| BREAKING.contains(&d.code));
        prop_assert_eq!(check_conformance(&om, &inf.model).is_empty(), !warned);
        prop_assert!(inf.diagnostics.iter().all(|d| !d.is_error()));
    }

    #[test]
    fn inference_is_deterministic(seed in any::<u64>()) {
        let om = broad(seed);
        prop_assert_eq!(infer_class_model(&om), infer_class_model(&om.clone()));
    }

    #[test]
    fn enforcement_prunes_to_a_fixpoint(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = gen::class_model(&mut r);
        let om = gen::instance_of(&mut r, &m, 10);
        let once = enforce_conformance(&om, &m);
        prop_assert!(is_pruning_of(&once.objects, &om));
        prop_assert!(once.removed.iter().all(|d| d.is_error() || d.code == Code::MultUpper));
        prop_assert!(once.residual.iter().all(|d| d.code == Code::MultLower));
        prop_assert_eq!(&once.residual, &check_conformance(&once.objects, &m));
        let twice = enforce_conformance(&once.objects, &m);
        prop_assert_eq!(&twice.objects, &once.objects);
        prop_assert!(twice.removed.is_empty());
        prop_assert_eq!(enforce_conformance(&om, &m), once);
    }

    #[test]
    fn enforcement_against_a_foreign_inferred_model(a in any::<u64>(), b in any::<u64>()) {
        let om = broad(a);
        let m = infer_class_model(&broad(b)).model;
        let once = enforce_conformance(&om, &m);
        prop_assert!(is_pruning_of(&once.objects, &om));
        prop_assert_eq!(enforce_conformance(&once.objects, &m).objects, once.objects);
    }

    #[test]
    fn conforming_input_is_left_alone(seed in any::<u64>()) {
        let om = homogeneous(seed);
        let m = infer_class_model(&om).model;
        let e = enforce_conformance(&om, &m);
        prop_assert_eq!(e.objects, om);
        prop_assert!(e.removed.is_empty() && e.residual.is_empty());
    }
}

#[test]
fn broad_populations_exercise_every_warning() {
    let mut seen = std::collections::BTreeSet::new();
    let mut accepted = 0;
    for seed in 0..500 {
        let om = broad(seed);
        let inf = infer_class_model(&om);
        seen.extend(inf.diagnostics.iter().map(|d| d.code));
        accepted += check_conformance(&om, &inf.model).is_empty() as usize;
    }
    for c in BREAKING
        .iter()
        .chain([&Code::InferAllNull, &Code::InferHeterogeneousEnd])
    {
        assert!(seen.contains(c), "{c:?} never produced");
    }
    assert!((50..450).contains(&accepted), "{accepted}");
}
