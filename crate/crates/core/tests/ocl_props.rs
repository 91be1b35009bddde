use buml::model::{ObjectModel, Value};
use buml::ocl::{
    evaluate_constraint, evaluate_constraint_with, parse_expression, parse_ocl, Binding,
    OclConstraint, OclExpr, OclValue, Verdict,
};
use buml::Execution;
use buml_testkit::{gen, ocl_outcome, rng, Outcome};
use proptest::prelude::*;

fn kind(v: &Verdict) -> Outcome {
    match v {
        Verdict::True => Outcome::True,
        Verdict::False => Outcome::False,
        Verdict::Error(_) => Outcome::Error,
    }
}

fn case(seed: u64) -> (OclExpr, ObjectModel) {
    let mut r = rng(seed);
    let e = gen::ocl_expression(&mut r, 4);
    let om = gen::ocl_object_model(&mut r);
    (e, om)
}

fn constraint(body: OclExpr) -> OclConstraint {
    OclConstraint {
        context_class: "Node".into(),
        name: "inv0".into(),
        body,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn verdicts_match_the_reference_interpreter(seed in any::<u64>()) {
        let m = gen::ocl_class_model();
        let (e, om) = case(seed);
        prop_assert!(e.depth() <= 4);
        let res = evaluate_constraint(&constraint(e.clone()), &om, &m);
        prop_assert!(res.error.is_none());
        for r in &res.per_instance {
            prop_assert_eq!(kind(&r.verdict), ocl_outcome(&m, &om, &e, &r.object_id), "{} on {}", e, r.object_id);
        }
    }

    #[test]
    fn printed_expressions_parse_back(seed in any::<u64>()) {
        let (e, _) = case(seed);
        prop_assert_eq!(parse_expression(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn evaluation_is_pure_and_mode_independent(seed in any::<u64>()) {
        let m = gen::ocl_class_model();
        let (e, om) = case(seed);
        let c = constraint(e);
        let a = evaluate_constraint_with(&c, &om, &m, Execution::Sequential);
        let b = evaluate_constraint_with(&c, &om, &m, Execution::Parallel);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a, evaluate_constraint(&c, &om, &m));
    }
}

#[test]
fn generated_cases_cover_all_outcomes() {
    let m = gen::ocl_class_model();
    let mut counts = [0usize; 3];
    for seed in 0..1000 {
        let (e, om) = case(seed);
        for o in om.objects.iter().filter(|o| o.classifier != "Tag") {
            counts[ocl_outcome(&m, &om, &e, &o.id) as usize] += 1;
        }
    }
    assert!(counts.iter().all(|&c| c > 200), "{counts:?}");
}

fn eval(src: &str) -> Result<OclValue, String> {
    let m = gen::ocl_class_model();
    let om = ObjectModel::new("empty").with_object(
        buml::model::ObjectDef::new("n", "Node")
            .with_slot("n", Value::Int(2))
            .with_slot("x", Value::Float(0.5))
            .with_slot("s", Value::str("q"))
            .with_slot("b", Value::Bool(true))
            .with_slot("lvl", Value::enum_literal("Level", "LOW")),
    );
    let env = Binding::new().with_var("self", OclValue::Object(0));
    let e = parse_expression(src).map_err(|d| d.message)?;
    buml::ocl::evaluate_expression(&e, &env, &om, &m).map_err(|e| e.message)
}

#[test]
fn vacuous_truth() {
    assert_eq!(
        eval("self.kids->forAll(k | false)"),
        Ok(OclValue::Bool(true))
    );
    assert_eq!(
        eval("self.kids->exists(k | true)"),
        Ok(OclValue::Bool(false))
    );
    assert_eq!(
        eval("self.tags->forAll(t | t.w / 0 > 1)"),
        Ok(OclValue::Bool(true))
    );
    assert_eq!(eval("self.Tag->exists(true)"), Ok(OclValue::Bool(false)));
}

#[test]
fn short_circuit_identities() {
    let boom = "(1 / 0 > 0)";
    assert!(eval(boom).is_err());
    assert_eq!(
        eval(&format!("false and {boom}")),
        Ok(OclValue::Bool(false))
    );
    assert_eq!(eval(&format!("true or {boom}")), Ok(OclValue::Bool(true)));
    assert_eq!(
        eval(&format!("false implies {boom}")),
        Ok(OclValue::Bool(true))
    );
    // The other side is evaluated when it decides the outcome.
    assert!(eval(&format!("true and {boom}")).is_err());
    assert!(eval(&format!("{boom} or true")).is_err());
}

#[test]
fn null_handling() {
    assert_eq!(eval("self.parent = null"), Ok(OclValue::Bool(true)));
    assert!(eval("self.parent.n > 0").is_err());
    assert!(eval("self.n + null > 0").is_err());
    assert_eq!(eval("self.s = 3"), Ok(OclValue::Bool(false)));
    assert_eq!(eval("self.n = 2.0"), Ok(OclValue::Bool(true)));
}

#[test]
fn select_and_collect_keep_source_order() {
    let m = gen::ocl_class_model();
    let text = "@startobjects\nobject r : Node\nr.n = 0\nr.x = 0.0\nr.s = \"\"\nr.b = true\nr.lvl = Level::LOW\n\
        object t1 : Tag\nt1.label = \"c\"\nt1.w = 3\nobject t2 : Tag\nt2.label = \"a\"\nt2.w = 1\n\
        object t3 : Tag\nt3.label = \"b\"\nt3.w = 2\n\
        link r -- t1 : tagging\nlink r -- t2 : tagging\nlink r -- t3 : tagging\n@endobjects\n";
    let om = buml::plantuml::parse_object_model(text, &m).model.unwrap();
    let env = Binding::new().with_var("self", OclValue::Object(0));
    let run = |src: &str| {
        buml::ocl::evaluate_expression(&parse_expression(src).unwrap(), &env, &om, &m).unwrap()
    };
    let ints = |xs: &[i64]| OclValue::Collection(xs.iter().map(|&i| OclValue::Int(i)).collect());
    assert_eq!(run("self.tags->collect(t | t.w)"), ints(&[3, 1, 2]));
    assert_eq!(
        run("self.tags->select(t | t.w > 1)->collect(w)"),
        ints(&[3, 2])
    );
    assert_eq!(
        run("self.tags->select(t | t.w > 1)->size()"),
        OclValue::Int(2)
    );
    assert!(buml::ocl::evaluate_expression(
        &parse_expression("self.tags->collect(t | t.Node)").unwrap(),
        &env,
        &om,
        &m
    )
    .is_err());
}

#[test]
fn subclass_instances_are_evaluated() {
    let m = gen::ocl_class_model();
    let text = "@startobjects\nobject a : Leaf\na.n = 1\na.x = 0.0\na.s = \"\"\na.b = true\na.lvl = Level::LOW\na.d = 4\n@endobjects\n";
    let om = buml::plantuml::parse_object_model(text, &m).model.unwrap();
    let cs = parse_ocl("context Node inv pos: self.n > 0\ncontext Leaf inv big: self.d > 5")
        .model
        .unwrap();
    let r0 = evaluate_constraint(&cs[0], &om, &m);
    assert_eq!(r0.per_instance.len(), 1);
    assert!(r0.holds());
    let r1 = evaluate_constraint(&cs[1], &om, &m);
    assert_eq!(
        r1.failures()
            .map(|f| f.object_id.as_str())
            .collect::<Vec<_>>(),
        ["a"]
    );
}
