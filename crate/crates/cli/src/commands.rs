use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use rigiscope::framework::{self, Framework};
use rigiscope::polarity::{stiffness_verdict, AngleSystem, AngleSystemDocument};
use rigiscope::polytopes::{self, canonical_polytope, describe, flexible_example};
use rigiscope::rigidity::{
    motion_space, rigidity_matrix, rigidity_verdict, stress_space, VerdictReport,
};
use rigiscope::transfer::{cone_framework, transfer_framework, verify_equivalence};
use rigiscope::{GeometrySpec, Model, RigidityError, Tolerance};
use serde::Serialize;

use crate::{Cli, Command, Format};

/// Exit code and message for a failed run.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: String) -> Self {
        Failure { code: 2, message }
    }

    fn analysis(context: &str, err: RigidityError) -> Self {
        Failure {
            code: if err.is_domain_error() { 1 } else { 2 },
            message: format!("{context}: {err}"),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Outcome<Framework> {
    framework::parse(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn emit(cli: &Cli, text: &str) -> Outcome<()> {
    match &cli.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::usage(format!("stdout: {e}")))
        }
    }
}

fn json_only(cli: &Cli, command: &str) -> Outcome<()> {
    if cli.format == Format::Csv {
        return Err(Failure::usage(format!(
            "`{command}` reports are JSON only; CSV is available for `matrix`"
        )));
    }
    Ok(())
}

/// One object for a single input, an array in input order otherwise.
fn collect<T: Serialize>(items: Vec<T>) -> String {
    if items.len() == 1 {
        to_json(&items[0])
    } else {
        to_json(&items)
    }
}

fn target(name: &str, n: usize) -> Outcome<GeometrySpec> {
    match name {
        "hyperboloid" => Ok(GeometrySpec::hyperboloid(n)),
        "de_sitter" => Ok(GeometrySpec::de_sitter(n)),
        _ => match Model::from_name(name) {
            Some(Model::AmbientForm) | None => Err(Failure::usage(format!(
                "unknown target model {name:?}; expected one of euclidean, sphere_ambient, proj_sphere, \
                 proj_hyperbolic, proj_exterior_hyperbolic, hyperboloid, de_sitter"
            ))),
            Some(model) => Ok(GeometrySpec::for_model(model, n)),
        },
    }
}

#[derive(Serialize)]
struct AnalyzeRecord {
    file: String,
    #[serde(flatten)]
    report: VerdictReport,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct ValidateRecord {
    file: String,
    valid: bool,
    violations: Vec<String>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct MatrixRecord {
    model: Model,
    convention: &'static str,
    rows: Vec<String>,
    columns: Vec<String>,
    matrix: Vec<Vec<f64>>,
    degenerate_rows: Vec<usize>,
}

#[derive(Serialize)]
struct MotionsRecord {
    dimension: usize,
    trivial_dimension: usize,
    internal_dimension: usize,
    columns: Vec<String>,
    motions: Vec<Vec<f64>>,
    trivial: Vec<Vec<f64>>,
    internal: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct StressesRecord {
    dimension: usize,
    rows: Vec<String>,
    stresses: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct Catalog {
    polytopes: Vec<polytopes::ExampleDescriptor>,
    flexible: Vec<polytopes::ExampleDescriptor>,
}

fn basis_columns(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter()
        .map(|c| c.iter().copied().collect())
        .collect()
}

fn checked(fw: &Framework, tol: &Tolerance, context: &str) -> Outcome<()> {
    fw.check(tol).map_err(|e| Failure::analysis(context, e))
}

pub fn run(cli: &Cli) -> Outcome<()> {
    let tol = cli.tolerance()?;
    match &cli.command {
        Command::Analyze { files } => {
            json_only(cli, "analyze")?;
            if files.is_empty() {
                return Err(Failure::usage(
                    "analyze needs at least one framework file".into(),
                ));
            }
            let mut records = Vec::new();
            for path in files {
                let ctx = path.display().to_string();
                let fw = load(path)?;
                let report = rigidity_verdict(&fw, &tol).map_err(|e| Failure::analysis(&ctx, e))?;
                let notes = fw
                    .validate(&tol)
                    .notes
                    .iter()
                    .map(ToString::to_string)
                    .collect();
                records.push(AnalyzeRecord {
                    file: ctx,
                    report,
                    notes,
                });
            }
            emit(cli, &collect(records))
        }
        Command::Validate { files } => {
            json_only(cli, "validate")?;
            let mut records = Vec::new();
            for path in files {
                let fw = load(path)?;
                let report = fw.validate(&tol);
                records.push(ValidateRecord {
                    file: path.display().to_string(),
                    valid: report.is_valid(),
                    violations: report.violations.iter().map(ToString::to_string).collect(),
                    notes: report.notes.iter().map(ToString::to_string).collect(),
                });
            }
            emit(cli, &collect(records))
        }
        Command::Matrix { file } => {
            let ctx = file.display().to_string();
            let fw = load(file)?;
            checked(&fw, &tol, &ctx)?;
            let m = rigidity_matrix(&fw, &tol).map_err(|e| Failure::analysis(&ctx, e))?;
            let text = match cli.format {
                Format::Csv => m.to_csv(),
                Format::Json => to_json(&MatrixRecord {
                    model: m.geometry.model,
                    convention: m.convention.name(),
                    rows: m.rows.iter().map(ToString::to_string).collect(),
                    columns: m.column_labels(),
                    matrix: m
                        .matrix
                        .row_iter()
                        .map(|r| r.iter().copied().collect())
                        .collect(),
                    degenerate_rows: m.degenerate_rows.clone(),
                }),
            };
            emit(cli, &text)
        }
        Command::Motions { file } => {
            json_only(cli, "motions")?;
            let ctx = file.display().to_string();
            let fw = load(file)?;
            checked(&fw, &tol, &ctx)?;
            let m = rigidity_matrix(&fw, &tol).map_err(|e| Failure::analysis(&ctx, e))?;
            let ms = motion_space(&m, &tol).map_err(|e| Failure::analysis(&ctx, e))?;
            emit(
                cli,
                &to_json(&MotionsRecord {
                    dimension: ms.dimension,
                    trivial_dimension: ms.trivial_dimension,
                    internal_dimension: ms.internal_dimension,
                    columns: m.column_labels(),
                    motions: basis_columns(&ms.basis),
                    trivial: basis_columns(&ms.trivial.basis),
                    internal: basis_columns(&ms.internal_flexes()),
                }),
            )
        }
        Command::Stresses { file } => {
            json_only(cli, "stresses")?;
            let ctx = file.display().to_string();
            let fw = load(file)?;
            checked(&fw, &tol, &ctx)?;
            let m = rigidity_matrix(&fw, &tol).map_err(|e| Failure::analysis(&ctx, e))?;
            let ss = stress_space(&m, &tol).map_err(|e| Failure::analysis(&ctx, e))?;
            emit(
                cli,
                &to_json(&StressesRecord {
                    dimension: ss.dimension,
                    rows: ss.rows.iter().map(ToString::to_string).collect(),
                    stresses: basis_columns(&ss.basis),
                }),
            )
        }
        Command::Transfer { file, to } => {
            json_only(cli, "transfer")?;
            let ctx = file.display().to_string();
            let fw = load(file)?;
            let geometry = target(to, fw.dimension())?;
            let out =
                transfer_framework(&fw, &geometry, &tol).map_err(|e| Failure::analysis(&ctx, e))?;
            emit(cli, &framework::serialize(&out))
        }
        Command::VerifyEquivalence { file } => {
            json_only(cli, "verify-equivalence")?;
            let ctx = file.display().to_string();
            let fw = load(file)?;
            checked(&fw, &tol, &ctx)?;
            let report = verify_equivalence(&fw, &tol).map_err(|e| Failure::analysis(&ctx, e))?;
            emit(cli, &to_json(&report))
        }
        Command::Cone { file } => {
            json_only(cli, "cone")?;
            let ctx = file.display().to_string();
            let fw = load(file)?;
            let sphere = if fw.model() == Model::SphereAmbient {
                fw
            } else {
                transfer_framework(&fw, &GeometrySpec::sphere(fw.dimension()), &tol)
                    .map_err(|e| Failure::analysis(&ctx, e))?
            };
            checked(&sphere, &tol, &ctx)?;
            let cone = cone_framework(&sphere).map_err(|e| Failure::analysis(&ctx, e))?;
            emit(cli, &framework::serialize(&cone))
        }
        Command::Polar { file, formal } => {
            json_only(cli, "polar")?;
            let ctx = file.display().to_string();
            match load_either(file)? {
                Input::Angles(doc) => {
                    let sys = doc
                        .to_system(*formal, &tol)
                        .map_err(|e| Failure::analysis(&ctx, e))?;
                    let fw = sys
                        .polar_framework()
                        .map_err(|e| Failure::analysis(&ctx, e))?;
                    emit(cli, &framework::serialize(&fw))
                }
                Input::Framework(fw) => {
                    let sys = AngleSystem::from_framework(&fw, *formal, &tol)
                        .map_err(|e| Failure::analysis(&ctx, e))?;
                    emit(cli, &to_json(&AngleSystemDocument::from_system(&sys)))
                }
            }
        }
        Command::Stiffness { file, formal } => {
            json_only(cli, "stiffness")?;
            let ctx = file.display().to_string();
            let sys = match load_either(file)? {
                Input::Angles(doc) => doc.to_system(*formal, &tol),
                Input::Framework(fw) => AngleSystem::from_framework(&fw, *formal, &tol),
            }
            .map_err(|e| Failure::analysis(&ctx, e))?;
            let report = stiffness_verdict(&sys, &tol).map_err(|e| Failure::analysis(&ctx, e))?;
            emit(cli, &to_json(&report))
        }
        Command::Examples { name, to, scale } => {
            json_only(cli, "examples")?;
            let Some(name) = name else {
                let describe_all = |names: &[&str]| -> Outcome<Vec<polytopes::ExampleDescriptor>> {
                    names
                        .iter()
                        .map(|n| {
                            describe(&n.replace("(n)", "(3)").replace("(m)", "(5)"))
                                .map_err(|e| Failure::analysis(n, e))
                        })
                        .collect()
                };
                let catalog = Catalog {
                    polytopes: describe_all(polytopes::POLYTOPE_NAMES)?,
                    flexible: describe_all(polytopes::FLEXIBLE_NAMES)?,
                };
                return emit(cli, &to_json(&catalog));
            };
            let descriptor = describe(name).map_err(|e| Failure::analysis(name, e))?;
            let geometry = target(to, descriptor.dimension)?;
            let fw = if descriptor.internal_flexes == 0 {
                canonical_polytope(name, &geometry, *scale, &tol)
            } else {
                example_in(name, &geometry, *scale, &tol)
            }
            .map_err(|e| Failure::analysis(name, e))?;
            emit(cli, &framework::serialize(&fw))
        }
    }
}

fn example_in(
    name: &str,
    geometry: &GeometrySpec,
    scale: f64,
    tol: &Tolerance,
) -> rigiscope::Result<Framework> {
    let fw = flexible_example(name)?;
    let fw = fw.with_points(
        fw.points
            .iter()
            .map(|p| p.iter().map(|x| x * scale).collect())
            .collect(),
    );
    if geometry.model == Model::Euclidean {
        return Ok(fw);
    }
    transfer_framework(&fw, geometry, tol)
}

enum Input {
    Angles(AngleSystemDocument),
    Framework(Framework),
}

fn load_either(path: &Path) -> Outcome<Input> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: malformed JSON: {e}", path.display())))?;
    if value.get("hyperplanes").is_some() {
        serde_json::from_value(value)
            .map(Input::Angles)
            .map_err(|e| Failure::usage(format!("{}: malformed angle system: {e}", path.display())))
    } else {
        framework::parse(&text)
            .map(Input::Framework)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }
}
