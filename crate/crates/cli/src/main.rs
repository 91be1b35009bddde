//! `buml`: batch front end for the modeling kernel.
//!
//! Exit status: 0 when everything passes, 1 for model-level failures
//! (ill-formed models, conformance or invariant failures, aborted
//! scenarios), 2 for usage, parse and I/O problems.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use buml::codegen::GeneratorRegistry;
use buml::diagnostic::has_errors;
use buml::flex::{enforce_conformance, infer_class_model};
use buml::fsm::{parse_machine_file, parse_scenario_file, run_scenario, validate_machine};
use buml::model::{check_conformance, ClassModel, ObjectModel};
use buml::ocl::{check_all, parse_ocl_file, OclConstraint, Verdict};
use buml::plantuml::{
    parse_class_model_file, parse_object_model_file, serialize_class_model, serialize_object_model,
};
use buml::{Code, Diagnostic};
use clap::{Parser, Subcommand};

const PASS: u8 = 0;
const FAIL: u8 = 1;
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "buml",
    version,
    about = "Class models, OCL invariants, code generation, state machines and conformance"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a class model (.buml.puml) for well-formedness.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Check an object model against a class model and OCL invariants.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        objects: PathBuf,
        #[arg(long)]
        ocl: Option<PathBuf>,
    },
    /// Run a generator and write its files under <out>/<target>/.
    Generate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a scenario against a state machine and print the trace.
    #[command(name = "fsm-run")]
    FsmRun {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Infer a class model from an object model.
    Infer {
        #[arg(long)]
        objects: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Remove the elements of an object model that do not conform.
    Enforce {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        objects: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Prints reports on stdout and keeps the counts for the stderr summary.
#[derive(Default)]
struct Reporter {
    errors: usize,
    failures: usize,
}

type Step<T> = Result<T, u8>;

fn name(path: &Path) -> String {
    path.display().to_string()
}

impl Reporter {
    fn report(&mut self, file: &str, diags: &[Diagnostic]) {
        for d in diags {
            println!("{}", d.render(file));
            if d.is_error() {
                self.errors += 1;
            }
        }
    }

    fn read(&self, path: &Path) -> Step<String> {
        fs::read_to_string(path).map_err(|e| {
            eprintln!("buml: cannot read {}: {e}", path.display());
            USAGE
        })
    }

    fn write(&self, path: &Path, text: &str) -> Step<()> {
        let written = match path.parent() {
            Some(dir) if !dir.as_os_str().is_empty() => {
                fs::create_dir_all(dir).and_then(|_| fs::write(path, text))
            }
            _ => fs::write(path, text),
        };
        written.map_err(|e| {
            eprintln!("buml: cannot write {}: {e}", path.display());
            USAGE
        })
    }

    /// Malformed text is a usage error; a well-formed but invalid model is a
    /// model-level failure.
    fn class_model(&mut self, path: &Path) -> Step<ClassModel> {
        let text = self.read(path)?;
        let r = parse_class_model_file(&name(path), &text);
        self.report(&name(path), &r.diagnostics);
        r.model.ok_or_else(|| {
            let syntax = r.diagnostics.iter().any(|d| {
                d.is_error() && matches!(d.code, Code::Syntax | Code::UnsupportedConstruct)
            });
            if syntax {
                USAGE
            } else {
                FAIL
            }
        })
    }

    fn object_model(&mut self, path: &Path, model: Option<&ClassModel>) -> Step<ObjectModel> {
        let text = self.read(path)?;
        let r = parse_object_model_file(&name(path), &text, model);
        self.report(&name(path), &r.diagnostics);
        r.model.ok_or(USAGE)
    }

    fn constraints(&mut self, path: &Path) -> Step<Vec<OclConstraint>> {
        let text = self.read(path)?;
        let r = parse_ocl_file(&name(path), &text);
        self.report(&name(path), &r.diagnostics);
        r.model.ok_or(USAGE)
    }

    fn run(&mut self, command: Command) -> Step<u8> {
        match command {
            Command::Validate { model } => {
                self.class_model(&model)?;
                Ok(PASS)
            }
            Command::Check {
                model,
                objects,
                ocl,
            } => self.check(&model, &objects, ocl.as_deref()),
            Command::Generate { model, target, out } => self.generate(&model, &target, &out),
            Command::FsmRun { machine, scenario } => self.fsm_run(&machine, &scenario),
            Command::Infer { objects, out } => {
                let om = self.object_model(&objects, None)?;
                let inference = infer_class_model(&om);
                self.report(&name(&objects), &inference.diagnostics);
                match serialize_class_model(&inference.model) {
                    Ok(text) => self.write(&out, &text).map(|_| PASS),
                    Err(diags) => {
                        self.report(&name(&out), &diags);
                        Ok(FAIL)
                    }
                }
            }
            Command::Enforce {
                model,
                objects,
                out,
            } => {
                let m = self.class_model(&model)?;
                let om = self.object_model(&objects, Some(&m))?;
                let e = enforce_conformance(&om, &m);
                for d in &e.removed {
                    println!("{}", d.render(&name(&objects)));
                }
                self.write(&out, &serialize_object_model(&e.objects))?;
                self.report(&name(&out), &e.residual);
                Ok(if has_errors(&e.residual) { FAIL } else { PASS })
            }
        }
    }

    fn check(&mut self, model: &Path, objects: &Path, ocl: Option<&Path>) -> Step<u8> {
        let m = self.class_model(model)?;
        let om = self.object_model(objects, Some(&m))?;
        let constraints = match ocl {
            Some(p) => self.constraints(p)?,
            None => Vec::new(),
        };
        let conformance = check_conformance(&om, &m);
        self.report(&name(objects), &conformance);
        let ocl_file = ocl.map(name).unwrap_or_default();
        for r in check_all(&constraints, &om, &m) {
            if let Some(d) = &r.error {
                self.report(&ocl_file, std::slice::from_ref(d));
            }
            for f in r.failures() {
                match &f.verdict {
                    Verdict::Error(why) => println!("FAIL {} {} {why}", r.constraint, f.object_id),
                    _ => println!("FAIL {} {}", r.constraint, f.object_id),
                }
                self.failures += 1;
            }
        }
        Ok(if self.errors > 0 || self.failures > 0 {
            FAIL
        } else {
            PASS
        })
    }

    fn generate(&mut self, model: &Path, target: &str, out: &Path) -> Step<u8> {
        let registry = GeneratorRegistry::with_builtins();
        if registry.get(target).is_none() {
            let d = Diagnostic::error(
                Code::NoSuchGenerator,
                format!(
                    "no generator `{target}`; available: {}",
                    registry.list().join(", ")
                ),
            );
            self.report("<cli>", &[d]);
            return Err(USAGE);
        }
        let m = self.class_model(model)?;
        let output = match registry.generate(target, &m) {
            Ok(o) => o,
            Err(diags) => {
                self.report(&name(model), &diags);
                return Ok(FAIL);
            }
        };
        self.report(&name(model), &output.diagnostics);
        let dir = out.join(target);
        fs::create_dir_all(&dir).map_err(|e| {
            eprintln!("buml: cannot create {}: {e}", dir.display());
            USAGE
        })?;
        for a in &output.artifacts {
            let path = dir.join(&a.relative_path);
            self.write(&path, &a.content)?;
            println!("{}", path.display());
        }
        Ok(PASS)
    }

    fn fsm_run(&mut self, machine: &Path, scenario: &Path) -> Step<u8> {
        let text = self.read(machine)?;
        let parsed = parse_machine_file(&name(machine), &text);
        self.report(&name(machine), &parsed.diagnostics);
        let m = parsed.model.ok_or(USAGE)?;
        let problems = validate_machine(&m);
        self.report(&name(machine), &problems);
        if has_errors(&problems) {
            return Err(USAGE);
        }
        let text = self.read(scenario)?;
        let parsed = parse_scenario_file(&name(scenario), &text);
        self.report(&name(scenario), &parsed.diagnostics);
        let events = parsed.model.ok_or(USAGE)?;
        let run = run_scenario(&m, &events);
        for entry in &run.session.trace {
            println!("{entry}");
        }
        match run.failure {
            Some((i, d)) => {
                let d = Diagnostic {
                    message: format!("event #{}: {}", i + 1, d.message),
                    ..d
                };
                self.report(&name(scenario), &[d]);
                Ok(FAIL)
            }
            None => Ok(PASS),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut reporter = Reporter::default();
    let code = reporter.run(cli.command).unwrap_or_else(|code| code);
    if reporter.errors > 0 || reporter.failures > 0 {
        eprintln!(
            "buml: {} error(s), {} failing invariant instance(s)",
            reporter.errors, reporter.failures
        );
    }
    ExitCode::from(code)
}
