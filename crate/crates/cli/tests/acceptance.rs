//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use buml::flex::{enforce_conformance, infer_class_model};
use buml::model::{
    check_conformance, Association, AssociationEnd, ClassDef, ClassModel, Link, Multiplicity,
    ObjectDef, ObjectModel, PrimitiveType, Value,
};
use buml::ocl::{
    evaluate_constraint, evaluate_expression, parse_expression, Binding, OclConstraint, OclValue,
    Verdict,
};
use buml::plantuml::{parse_class_model, serialize_class_model};
use buml::Code;
use buml_testkit::gen::{self, ObjectShape};
use buml_testkit::{check_sql, ocl_outcome, rng, Outcome};

type Check = Result<String, String>;

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Check,
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn buml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_buml"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .expect("buml binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn expect_exit(o: &Output, code: i32, what: &str) -> Result<(), String> {
    if o.status.code() == Some(code) {
        Ok(())
    } else {
        Err(format!(
            "{what}: exit {:?}, expected {code}\n{}{}",
            o.status.code(),
            stdout(o),
            String::from_utf8_lossy(&o.stderr)
        ))
    }
}

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn tempdir() -> Result<tempfile::TempDir, String> {
    tempfile::tempdir().map_err(|e| e.to_string())
}

fn dpp_end_to_end() -> Check {
    let out = buml(&["validate", "--model", "dpp.buml.puml"]);
    expect_exit(&out, 0, "validate")?;
    ensure(out.stdout.is_empty(), || {
        format!("validate printed {:?}", stdout(&out))
    })?;
    let dir = tempdir()?;
    let target = dir.path().to_str().ok_or("non-UTF-8 temp dir")?;

    let out = buml(&[
        "generate",
        "--model",
        "dpp.buml.puml",
        "--target",
        "classes",
        "--out",
        target,
    ]);
    expect_exit(&out, 0, "generate classes")?;
    let class = fs::read_to_string(dir.path().join("classes/product_passport.gen"))
        .map_err(|e| e.to_string())?;
    let header = class
        .lines()
        .find_map(|l| {
            l.trim()
                .strip_prefix("def __init__(")
                .and_then(|r| r.strip_suffix("):"))
        })
        .ok_or("no constructor in product_passport.gen")?;
    let params: Vec<&str> = header.split(',').map(str::trim).collect();
    ensure(params == ["self", "code", "product_name", "brand"], || {
        format!("constructor params {params:?}")
    })?;

    let out = buml(&[
        "generate",
        "--model",
        "dpp.buml.puml",
        "--target",
        "sql",
        "--out",
        target,
    ]);
    expect_exit(&out, 0, "generate sql")?;
    let sql = fs::read_to_string(dir.path().join("sql/schema.sql")).map_err(|e| e.to_string())?;
    ensure(sql.contains("PRIMARY KEY (code)"), || {
        "no `PRIMARY KEY (code)`".into()
    })?;
    let tables = check_sql(&sql).map_err(|e| e.to_string())?;
    let passport = tables
        .iter()
        .find(|t| t.name == "product_passport")
        .ok_or("no product_passport table")?;
    ensure(passport.primary_key == ["code"], || {
        format!("key {:?}", passport.primary_key)
    })?;
    Ok(format!(
        "constructor ({}), {} tables",
        params[1..].join(", "),
        tables.len()
    ))
}

fn parser_round_trip() -> Check {
    let mut max = (0, 0);
    for seed in 0..500 {
        let m = gen::class_model(&mut rng(seed));
        max = (max.0.max(m.classes.len()), max.1.max(m.associations.len()));
        let text = serialize_class_model(&m).map_err(|d| format!("seed {seed}: {d:?}"))?;
        let back = parse_class_model(&text);
        ensure(back.diagnostics.is_empty(), || {
            format!("seed {seed}: {:?}\n{text}", back.diagnostics)
        })?;
        ensure(back.model.as_ref() == Some(&m), || {
            format!("seed {seed}: model differs\n{text}")
        })?;
    }
    ensure(max.0 <= 8 && max.1 <= 6, || {
        format!("generator exceeded its bounds: {max:?}")
    })?;
    Ok(format!(
        "500 models, up to {} classes and {} associations",
        max.0, max.1
    ))
}

fn ocl_oracle_equivalence() -> Check {
    let m = gen::ocl_class_model();
    let mut counts = [0usize; 3];
    for seed in 0..1000 {
        let mut r = rng(seed);
        let e = gen::ocl_expression(&mut r, 4);
        let om = gen::ocl_object_model(&mut r);
        ensure(e.depth() <= 4 && om.objects.len() <= 8, || {
            format!("seed {seed}: case out of bounds")
        })?;
        let c = OclConstraint {
            context_class: "Node".into(),
            name: "inv".into(),
            body: e.clone(),
        };
        let res = evaluate_constraint(&c, &om, &m);
        if let Some(d) = res.error {
            return Err(format!("seed {seed}: {d}"));
        }
        for i in &res.per_instance {
            let got = match i.verdict {
                Verdict::True => Outcome::True,
                Verdict::False => Outcome::False,
                Verdict::Error(_) => Outcome::Error,
            };
            let want = ocl_outcome(&m, &om, &e, &i.object_id);
            ensure(got == want, || {
                format!("seed {seed}: `{e}` on {}: {got:?} vs {want:?}", i.object_id)
            })?;
            counts[got as usize] += 1;
        }
    }
    Ok(format!(
        "1000 pairs, {} verdicts (true {}, false {}, error {})",
        counts.iter().sum::<usize>(),
        counts[0],
        counts[1],
        counts[2]
    ))
}

fn vacuous_truth_and_short_circuit() -> Check {
    let m = gen::ocl_class_model();
    let om = ObjectModel::new("one").with_object(
        ObjectDef::new("n", "Node")
            .with_slot("n", Value::Int(2))
            .with_slot("x", Value::Float(0.5))
            .with_slot("s", Value::str("q"))
            .with_slot("b", Value::Bool(true))
            .with_slot("lvl", Value::enum_literal("Level", "LOW")),
    );
    let env = Binding::new().with_var("self", OclValue::Object(0));
    let eval = |src: &str| -> Result<OclValue, String> {
        let e = parse_expression(src).map_err(|d| d.message)?;
        evaluate_expression(&e, &env, &om, &m).map_err(|d| d.message)
    };
    let boom = "(1 / 0 > 0)";
    ensure(eval(boom).is_err(), || {
        "division by zero did not fail".into()
    })?;
    let cases = [
        ("self.kids->forAll(k | false)".to_string(), true),
        ("self.kids->exists(k | true)".to_string(), false),
        (format!("self.kids->forAll(k | {boom})"), true),
        (format!("self.kids->exists(k | {boom})"), false),
        (format!("false and {boom}"), false),
        (format!("true or {boom}"), true),
        (format!("false implies {boom}"), true),
    ];
    for (src, want) in &cases {
        let got = eval(src);
        ensure(got == Ok(OclValue::Bool(*want)), || {
            format!("`{src}` gave {got:?}")
        })?;
    }
    Ok(format!("{} identities", cases.len()))
}

fn conformance_boundaries() -> Check {
    let m = ClassModel::new("b")
        .with_class(ClassDef::new("Shape").abstract_class())
        .with_class(ClassDef::new("Box").attr("w", PrimitiveType::Int))
        .with_class(ClassDef::new("Lid"))
        .with_association(Association::new(
            "cover",
            AssociationEnd::new("Box", Multiplicity::new(0, Some(1))),
            AssociationEnd::new("Lid", Multiplicity::new(1, Some(1))),
        ));
    let boxed = |w: Value| ObjectDef::new("b", "Box").with_slot("w", w);
    let one = |o: ObjectDef| ObjectModel::new("o").with_object(o);
    // A single object cannot exceed an upper bound without a duplicate
    // link, so that case adds the two link targets it needs.
    let two_lids = one(boxed(Value::Int(1)))
        .with_object(ObjectDef::new("l1", "Lid"))
        .with_object(ObjectDef::new("l2", "Lid"))
        .with_link(Link::new("cover", "b", "l1"))
        .with_link(Link::new("cover", "b", "l2"));
    let cases = [
        ("lower bound", one(boxed(Value::Int(1))), Code::MultLower),
        ("upper bound", two_lids, Code::MultUpper),
        (
            "abstract class",
            one(ObjectDef::new("s", "Shape")),
            Code::AbstractInstance,
        ),
        (
            "slot type",
            one(ObjectDef::new("l", "Lid"))
                .with_object(boxed(Value::str("wide")))
                .with_link(Link::new("cover", "b", "l")),
            Code::SlotType,
        ),
        (
            "unknown classifier",
            one(ObjectDef::new("g", "Ghost")),
            Code::UnknownClassifier,
        ),
    ];
    for (what, om, code) in &cases {
        let got: Vec<Code> = check_conformance(om, &m).iter().map(|d| d.code).collect();
        ensure(got == [*code], || format!("{what}: {got:?}"))?;
    }
    Ok(format!("{} fixtures", cases.len()))
}

fn flexible_round_trip() -> Check {
    for seed in 0..200 {
        let om = gen::object_model(&mut rng(seed), ObjectShape::default());
        let inf = infer_class_model(&om);
        let diags = check_conformance(&om, &inf.model);
        ensure(diags.is_empty(), || format!("seed {seed}: {diags:?}"))?;
        let once = enforce_conformance(&om, &inf.model);
        ensure(once.objects == om, || {
            format!("seed {seed}: enforcement changed a conforming model")
        })?;
        let twice = enforce_conformance(&once.objects, &inf.model);
        ensure(twice.objects == once.objects, || {
            format!("seed {seed}: enforce not idempotent")
        })?;
    }
    // Populations with mixed slot kinds or missing slots: the inferred
    // model cannot accept all of them under strict slot typing.
    let (mut accepted, mut idempotent) = (0, 0);
    for seed in 0..200 {
        let om = gen::object_model(
            &mut rng(seed),
            ObjectShape {
                heterogeneous: true,
                ..Default::default()
            },
        );
        let m = infer_class_model(&om).model;
        accepted += check_conformance(&om, &m).is_empty() as usize;
        let once = enforce_conformance(&om, &m);
        idempotent += (enforce_conformance(&once.objects, &m).objects == once.objects) as usize;
    }
    ensure(idempotent == 200, || {
        format!(
            "enforce not idempotent on {} broad models",
            200 - idempotent
        )
    })?;
    Ok(format!(
        "200 homogeneous models; broad models: {accepted}/200 accepted, {idempotent}/200 idempotent"
    ))
}

fn tree(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).map_err(|e| format!("{}: {e}", d.display()))? {
            let p = e.map_err(|e| e.to_string())?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p
                    .strip_prefix(dir)
                    .map_err(|e| e.to_string())?
                    .to_string_lossy()
                    .replace('\\', "/");
                out.insert(rel, fs::read(&p).map_err(|e| e.to_string())?);
            }
        }
    }
    Ok(out)
}

fn generator_determinism() -> Check {
    let mut models = vec!["dpp.buml.puml".to_string()];
    let mut rest: Vec<String> = fs::read_dir(fixtures().join("models"))
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".buml.puml"))
        .map(|n| format!("models/{n}"))
        .collect();
    rest.sort();
    models.extend(rest);
    ensure(models.len() == 5, || {
        format!("{} fixture models", models.len())
    })?;
    let mut files = 0;
    for model in &models {
        let stem = Path::new(model)
            .file_name()
            .unwrap()
            .to_string_lossy()
            .trim_end_matches(".buml.puml")
            .to_string();
        for target in ["classes", "sql"] {
            let golden_dir = fixtures().join("golden").join(&stem).join(target);
            let golden = if golden_dir.exists() {
                tree(&golden_dir)?
            } else {
                BTreeMap::new()
            };
            let mut runs = Vec::new();
            for _ in 0..2 {
                let dir = tempdir()?;
                let out = buml(&[
                    "generate",
                    "--model",
                    model,
                    "--target",
                    target,
                    "--out",
                    dir.path().to_str().unwrap(),
                ]);
                expect_exit(&out, 0, &format!("generate {target} {model}"))?;
                let produced = dir.path().join(target);
                runs.push(if produced.exists() {
                    tree(&produced)?
                } else {
                    BTreeMap::new()
                });
            }
            ensure(runs[0] == runs[1], || {
                format!("{model} {target}: runs differ")
            })?;
            ensure(runs[0] == golden, || {
                let names: Vec<&String> = runs[0].keys().chain(golden.keys()).collect();
                format!("{model} {target}: differs from golden ({names:?})")
            })?;
            files += golden.len();
        }
    }
    Ok(format!("{} models, {files} golden files", models.len()))
}

fn fsm_replay() -> Check {
    let out = buml(&[
        "fsm-run",
        "--machine",
        "greeting.fsm",
        "--scenario",
        "greeting.scenario",
    ]);
    expect_exit(&out, 0, "fsm-run greeting")?;
    let stored = fs::read(fixtures().join("greeting.trace")).map_err(|e| e.to_string())?;
    ensure(out.stdout == stored, || {
        format!("trace differs:\n{}", stdout(&out))
    })?;
    let out = buml(&[
        "fsm-run",
        "--machine",
        "greeting_nondeterministic.fsm",
        "--scenario",
        "greeting.scenario",
    ]);
    expect_exit(&out, 2, "fsm-run nondeterministic")?;
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    ensure(
        lines.len() == 1 && lines[0].starts_with("error nondeterministic "),
        || format!("got {text:?}"),
    )?;
    Ok(format!(
        "{} trace lines byte-equal, duplicate transition rejected",
        stored.iter().filter(|b| **b == b'\n').count()
    ))
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "dpp end to end",
            limit: Some(Duration::from_secs(1)),
            run: dpp_end_to_end,
        },
        Criterion {
            id: 2,
            name: "parser round trip",
            limit: Some(Duration::from_secs(30)),
            run: parser_round_trip,
        },
        Criterion {
            id: 3,
            name: "ocl oracle equivalence",
            limit: Some(Duration::from_secs(60)),
            run: ocl_oracle_equivalence,
        },
        Criterion {
            id: 4,
            name: "vacuous truth and short circuit",
            limit: None,
            run: vacuous_truth_and_short_circuit,
        },
        Criterion {
            id: 5,
            name: "conformance boundaries",
            limit: None,
            run: conformance_boundaries,
        },
        Criterion {
            id: 6,
            name: "flexible modeling round trip",
            limit: None,
            run: flexible_round_trip,
        },
        Criterion {
            id: 7,
            name: "generator determinism",
            limit: None,
            run: generator_determinism,
        },
        Criterion {
            id: 8,
            name: "fsm replay",
            limit: None,
            run: fsm_replay,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let took = start.elapsed();
        let result = match (result, c.limit) {
            (Ok(_), Some(limit)) if took > limit => {
                Err(format!("took {took:.2?}, limit {limit:?}"))
            }
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("PASS {} {} ({took:.2?}): {detail}", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {} ({took:.2?}): {why}", c.id, c.name);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
