use buml::codegen::{
    generate_plain_classes, generate_sql_ddl, GenOutput, GeneratedArtifact, GeneratorDescriptor,
    GeneratorRegistry,
};
use buml::model::ClassModel;
use buml::Code;
use buml_testkit::{check_sql, forward_references, gen, rng};
use proptest::prelude::*;

/// Generated class names are `C<n>`, property names `p<c>_<k>`: both
/// snake_case to their lower-case form.
fn lower(s: &str) -> String {
    s.to_lowercase()
}

fn many_to_many(m: &ClassModel) -> usize {
    m.associations
        .iter()
        .filter(|a| a.ends.iter().all(|e| e.multiplicity.upper != Some(1)))
        .count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sql_output_is_well_formed(seed in any::<u64>(), relational in any::<bool>()) {
        let m = if relational {
            gen::relational_class_model(&mut rng(seed))
        } else {
            gen::class_model(&mut rng(seed))
        };
        match generate_sql_ddl(&m) {
            Ok(out) => {
                prop_assert_eq!(out.artifacts.len(), 1);
                let tables = check_sql(&out.artifacts[0].content)
                    .map_err(|e| TestCaseError::fail(format!("{e}\n{}", out.artifacts[0].content)))?;
                let cycles = out.diagnostics.iter().filter(|d| d.code == Code::FkCycle).count();
                if cycles == 0 {
                    prop_assert_eq!(forward_references(&tables), 0);
                }
                let concrete: Vec<_> = m.classes.iter().filter(|c| !c.is_abstract).collect();
                prop_assert_eq!(tables.len(), concrete.len() + many_to_many(&m));
                for c in &m.classes {
                    let hits: Vec<_> = tables.iter().filter(|t| t.name == lower(&c.name)).collect();
                    if c.is_abstract {
                        prop_assert!(hits.is_empty());
                        continue;
                    }
                    prop_assert_eq!(hits.len(), 1);
                    for p in m.all_properties(&c.name).unwrap() {
                        prop_assert!(hits[0].column(&lower(&p.name)).is_some(), "{}.{} missing", c.name, p.name);
                    }
                }
                prop_assert!(out.diagnostics.iter().all(|d| !d.is_error()));
            }
            Err(diags) => {
                prop_assert!(!diags.is_empty());
                prop_assert!(diags.iter().all(|d| matches!(d.code, Code::GenUnsupported | Code::NameCollision)));
            }
        }
    }

    #[test]
    fn plain_classes_assign_every_flattened_property(seed in any::<u64>(), relational in any::<bool>()) {
        let m = if relational {
            gen::relational_class_model(&mut rng(seed))
        } else {
            gen::class_model(&mut rng(seed))
        };
        if let Ok(out) = generate_plain_classes(&m) {
            prop_assert_eq!(out.artifacts.len(), m.classes.len());
            for (c, a) in m.classes.iter().zip(&out.artifacts) {
                prop_assert_eq!(&a.relative_path, &format!("{}.gen", lower(&c.name)));
                let assignments = a.content.lines().filter(|l| l.trim_start().starts_with("self.")).count();
                prop_assert_eq!(assignments, m.all_properties(&c.name).unwrap().len());
            }
        }
    }

    #[test]
    fn generators_are_deterministic(seed in any::<u64>()) {
        let m = gen::class_model(&mut rng(seed));
        let reg = GeneratorRegistry::with_builtins();
        for id in reg.list() {
            prop_assert_eq!(reg.generate(id, &m), reg.generate(id, &m.clone()));
        }
    }
}

#[test]
fn random_models_mostly_generate() {
    let (mut sql_ok, mut classes_ok) = (0, 0);
    for seed in 0..500 {
        let m = gen::class_model(&mut rng(seed));
        classes_ok += generate_plain_classes(&m).is_ok() as usize;
        sql_ok += generate_sql_ddl(&gen::relational_class_model(&mut rng(seed))).is_ok() as usize;
    }
    assert!(sql_ok > 350, "sql {sql_ok}");
    // Role-less ends towards the same class clash in about a third of them.
    assert!(classes_ok > 250, "classes {classes_ok}");
}

#[test]
fn registry_rejects_unknown_and_duplicate_ids() {
    let mut reg = GeneratorRegistry::with_builtins();
    assert_eq!(reg.list(), ["classes", "sql"]);
    let err = reg.generate("bogus", &ClassModel::new("m")).unwrap_err();
    assert_eq!(err[0].code, Code::NoSuchGenerator);
    assert!(err[0].message.contains("classes") && err[0].message.contains("sql"));
    let dup = GeneratorDescriptor::new("sql", "again", |_| Ok(GenOutput::default()));
    assert_eq!(reg.register(dup).unwrap_err().code, Code::DupGenerator);
    let extra = GeneratorDescriptor::new("names", "Class names", |m: &ClassModel| {
        let text: String = m.classes.iter().map(|c| format!("{}\n", c.name)).collect();
        Ok(GenOutput {
            artifacts: vec![GeneratedArtifact::new("names.txt", text)],
            diagnostics: vec![],
        })
    });
    reg.register(extra).unwrap();
    let out = reg
        .generate(
            "names",
            &ClassModel::new("m").with_class(buml::model::ClassDef::new("A")),
        )
        .unwrap();
    assert_eq!(out.artifacts[0].content, "A\n");
}

#[test]
fn invalid_models_are_rejected_before_generation() {
    let m = ClassModel::new("m")
        .with_class(buml::model::ClassDef::new("A"))
        .with_generalization("A", "A");
    let err = GeneratorRegistry::with_builtins()
        .generate("sql", &m)
        .unwrap_err();
    assert_eq!(err[0].code, Code::GenSelf);
}

#[test]
#[should_panic(expected = "normalized relative path")]
fn artifact_paths_may_not_escape() {
    GeneratedArtifact::new("../etc/passwd", "");
}
