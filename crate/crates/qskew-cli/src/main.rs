//! Batch command-line front end for the qskew engine.
//!
//! Exit codes: 0 success, 1 computation or verification failure, 2 usage
//! error. `--format json` switches output to the document schemas.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qskew::deriv::DerivationSpec;
use qskew::expr::{eval_str, EvalContext, Value};
use qskew::model::{AlgebraElement, Automorphism, Level, UqModel, ZPoly, DEFAULT_SOLVE_BOUND};
use qskew::torus::TorusElement;
use qskew::verify::{run_suite, VerifyOptions};
use qskew::QElem;

#[derive(Parser)]
#[command(name = "qskew", version, about = "Exact computation in U_q(sl4+) and its quantum torus")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Basis {
    X,
    Y,
    Z,
    T,
    Torus,
}

impl Basis {
    fn context(self) -> EvalContext {
        match self {
            Basis::X => EvalContext::Algebra(Level::X),
            Basis::Y => EvalContext::Algebra(Level::Y),
            Basis::Z => EvalContext::Algebra(Level::Z),
            Basis::T => EvalContext::Algebra(Level::T),
            Basis::Torus => EvalContext::Torus,
        }
    }

    fn level(self) -> Option<Level> {
        match self {
            Basis::X => Some(Level::X),
            Basis::Y => Some(Level::Y),
            Basis::Z => Some(Level::Z),
            Basis::T => Some(Level::T),
            Basis::Torus => None,
        }
    }
}

#[derive(Args)]
struct ContextArg {
    /// Basis the expression is written in
    #[arg(long, value_enum, default_value_t = Basis::X)]
    basis: Basis,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an expression and print its normal form
    Normalize {
        #[command(flatten)]
        ctx: ContextArg,
        expr: String,
    },
    /// Product of two expressions
    Mul {
        #[command(flatten)]
        ctx: ContextArg,
        left: String,
        right: String,
    },
    /// Commutator [a, b] = ab - ba
    Commutator {
        #[command(flatten)]
        ctx: ContextArg,
        left: String,
        right: String,
    },
    /// The exponent m with a b = q^m b a, if the pair q-commutes
    Qcommute {
        #[command(flatten)]
        ctx: ContextArg,
        left: String,
        right: String,
    },
    /// Weight of a weight-homogeneous element
    Weight {
        #[command(flatten)]
        ctx: ContextArg,
        expr: String,
    },
    /// Total degree
    Degree {
        #[command(flatten)]
        ctx: ContextArg,
        expr: String,
    },
    /// The distinguished normal element Delta_i in a basis
    Delta {
        #[command(flatten)]
        ctx: ContextArg,
        index: usize,
    },
    /// Exponent basis of the torus center
    CenterBasis,
    /// Torus expansion of a tower element
    Embed {
        #[command(flatten)]
        ctx: ContextArg,
        expr: String,
    },
    /// Expand a torus element in a tower basis, if it belongs there
    Membership {
        /// Target basis
        #[arg(long, value_enum, default_value_t = Basis::X)]
        to: Basis,
        expr: String,
    },
    /// Re-express an element from one basis in another
    ToBasis {
        #[arg(long, value_enum)]
        from: Basis,
        #[arg(long, value_enum)]
        to: Basis,
        expr: String,
    },
    /// Diagram / diagonal automorphisms
    Automorphism {
        #[command(subcommand)]
        cmd: AutomorphismCmd,
    },
    /// Derivations of the algebra
    Derivation {
        #[command(subcommand)]
        cmd: DerivationCmd,
    },
    /// Run the identity-verification suite
    VerifySuite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run only checks with this tag
        #[arg(long)]
        only: Option<String>,
        /// Check a presentation file instead of the shipped tables
        #[arg(long)]
        presentation: Option<std::path::PathBuf>,
    },
}

#[derive(Args)]
struct LambdaArgs {
    /// Scalar for e1 (an expression evaluating to a scalar)
    #[arg(long, default_value = "1")]
    lambda1: String,
    /// Scalar for e2
    #[arg(long, default_value = "1")]
    lambda2: String,
    /// Scalar for e3
    #[arg(long, default_value = "1")]
    lambda3: String,
    /// Compose with the diagram flip e_i -> e_{4-i}
    #[arg(long)]
    eta: bool,
}

#[derive(Subcommand)]
enum AutomorphismCmd {
    /// Apply eta^eps . phi_lambda to an expression
    Apply {
        #[command(flatten)]
        lambda: LambdaArgs,
        expr: String,
    },
    /// Check that three images of e1, e2, e3 define an automorphism
    Verify { e1: String, e2: String, e3: String },
}

#[derive(Args)]
struct SpecArgs {
    /// Image of e1
    #[arg(long, default_value = "0")]
    e1: String,
    /// Image of e2
    #[arg(long, default_value = "0")]
    e2: String,
    /// Image of e3
    #[arg(long, default_value = "0")]
    e3: String,
}

#[derive(Subcommand)]
enum DerivationCmd {
    /// Check that the images extend to a derivation
    Check {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Apply the derivation to an expression
    Apply {
        #[command(flatten)]
        spec: SpecArgs,
        expr: String,
    },
    /// Extend to the quantum torus and print the images of T_1..T_6
    Extend {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Full decomposition D = ad_x + mu_1 D_1 + mu_4 D_4 + mu_6 D_6
    Decompose {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// The central z with D(z2) = z z2
    Z2 {
        #[command(flatten)]
        spec: SpecArgs,
    },
}

fn solve_bound() -> i64 {
    std::env::var("QSKEW_SOLVE_BOUND")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SOLVE_BOUND)
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn eval(model: &UqModel, basis: Basis, text: &str) -> Result<Value, Failure> {
    Ok(eval_str(model, basis.context(), text)?)
}

fn eval_algebra(model: &UqModel, basis: Basis, text: &str) -> Result<AlgebraElement, Failure> {
    match eval(model, basis, text)? {
        Value::Algebra(u) => Ok(u),
        Value::Torus(_) => Err(Failure("expected a tower element, found a torus element".into())),
    }
}

fn eval_torus(model: &UqModel, text: &str) -> Result<TorusElement, Failure> {
    match eval(model, Basis::Torus, text)? {
        Value::Torus(t) => Ok(t),
        Value::Algebra(_) => Err(Failure("expected a torus element".into())),
    }
}

fn eval_scalar(model: &UqModel, text: &str) -> Result<QElem, Failure> {
    let t = eval_torus(model, text)?;
    match t.as_monomial() {
        Some((exp, c)) if exp.iter().all(|e| *e == 0) => Ok(c.clone()),
        _ => Err(Failure(format!("`{text}` is not a scalar"))),
    }
}

fn eval_spec(model: &UqModel, spec: &SpecArgs) -> Result<DerivationSpec, Failure> {
    let images = [
        eval_algebra(model, Basis::X, &spec.e1)?,
        eval_algebra(model, Basis::X, &spec.e2)?,
        eval_algebra(model, Basis::X, &spec.e3)?,
    ];
    Ok(DerivationSpec::new(images)?)
}

fn print_value(format: Format, v: &Value) {
    match (format, v) {
        (Format::Text, Value::Algebra(u)) => println!("{u}"),
        (Format::Text, Value::Torus(t)) => println!("{t}"),
        (Format::Json, Value::Algebra(u)) => {
            println!("{}", qskew::doc::save_element(u))
        }
        (Format::Json, Value::Torus(t)) => println!("{}", qskew::doc::save_torus(t)),
    }
}

fn zpoly_text(p: &ZPoly) -> String {
    if p.is_empty() {
        return "0".to_string();
    }
    p.iter()
        .map(|(&(a, b), c)| {
            let mut parts = Vec::new();
            let simple = c.as_q_power().is_some() || c.as_rat().is_some();
            if !c.is_one() || (a == 0 && b == 0) {
                parts.push(if simple {
                    format!("{c}")
                } else {
                    format!("({c})")
                });
            }
            if a != 0 {
                parts.push(if a == 1 { "z1".into() } else { format!("z1^{a}") });
            }
            if b != 0 {
                parts.push(if b == 1 { "z2".into() } else { format!("z2^{b}") });
            }
            parts.join("*")
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let model = UqModel::shared();
    let format = cli.format;
    match cli.command {
        Command::Normalize { ctx, expr } => {
            let v = eval(model, ctx.basis, &expr)?;
            print_value(format, &v);
        }
        Command::Mul { ctx, left, right } => {
            let v = match (eval(model, ctx.basis, &left)?, eval(model, ctx.basis, &right)?) {
                (Value::Algebra(a), Value::Algebra(b)) => Value::Algebra(a.mul(&b)?),
                (Value::Torus(a), Value::Torus(b)) => Value::Torus(model.torus().mul(&a, &b)),
                _ => return Err(Failure("mixed contexts".into())),
            };
            print_value(format, &v);
        }
        Command::Commutator { ctx, left, right } => {
            let v = match (eval(model, ctx.basis, &left)?, eval(model, ctx.basis, &right)?) {
                (Value::Algebra(a), Value::Algebra(b)) => Value::Algebra(a.commutator(&b)?),
                (Value::Torus(a), Value::Torus(b)) => {
                    Value::Torus(model.torus().commutator(&a, &b))
                }
                _ => return Err(Failure("mixed contexts".into())),
            };
            print_value(format, &v);
        }
        Command::Qcommute { ctx, left, right } => {
            let m = match (eval(model, ctx.basis, &left)?, eval(model, ctx.basis, &right)?) {
                (Value::Algebra(a), Value::Algebra(b)) => a.pbw.qcommute_exponent(&b.pbw),
                (Value::Torus(a), Value::Torus(b)) => torus_qcommute(model, &a, &b),
                _ => return Err(Failure("mixed contexts".into())),
            };
            match format {
                Format::Text => match m {
                    Some(m) => println!("{m}"),
                    None => println!("none"),
                },
                Format::Json => println!("{}", serde_json::json!({ "exponent": m })),
            }
        }
        Command::Weight { ctx, expr } => {
            let u = eval_algebra(model, ctx.basis, &expr)?;
            let w = model.weight(&u)?;
            match format {
                Format::Text => match w {
                    Some([a, b, c]) => println!("({a}, {b}, {c})"),
                    None => println!("mixed"),
                },
                Format::Json => println!("{}", serde_json::json!({ "weight": w })),
            }
        }
        Command::Degree { ctx, expr } => {
            let u = eval_algebra(model, ctx.basis, &expr)?;
            let d = model.total_degree(&u)?;
            match format {
                Format::Text => println!("{d}"),
                Format::Json => println!("{}", serde_json::json!({ "degree": d })),
            }
        }
        Command::Delta { ctx, index } => {
            let level = ctx
                .basis
                .level()
                .ok_or_else(|| Failure("use `embed` for the torus form".into()))?;
            let d = model.delta_in_basis(index, level)?;
            print_value(format, &Value::Algebra(d));
        }
        Command::CenterBasis => {
            let basis = model.torus().central_exponent_basis();
            match format {
                Format::Text => {
                    for e in &basis {
                        println!("{e:?}");
                    }
                }
                Format::Json => println!("{}", serde_json::json!({ "basis": basis })),
            }
        }
        Command::Embed { ctx, expr } => {
            let u = eval_algebra(model, ctx.basis, &expr)?;
            print_value(format, &Value::Torus(model.embed(&u)));
        }
        Command::Membership { to, expr } => {
            let t = eval_torus(model, &expr)?;
            let level = to
                .level()
                .ok_or_else(|| Failure("membership target must be a tower basis".into()))?;
            match model.membership(&t, level) {
                Some(u) => print_value(format, &Value::Algebra(u)),
                None => match format {
                    Format::Text => println!("none"),
                    Format::Json => println!("{}", serde_json::json!({ "member": false })),
                },
            }
        }
        Command::ToBasis { from, to, expr } => {
            let u = eval_algebra(model, from, &expr)?;
            let level = to
                .level()
                .ok_or_else(|| Failure("use `embed` for the torus form".into()))?;
            match model.membership(&model.embed(&u), level) {
                Some(v) => print_value(format, &Value::Algebra(v)),
                None => match format {
                    Format::Text => println!("none"),
                    Format::Json => println!("{}", serde_json::json!({ "member": false })),
                },
            }
        }
        Command::Automorphism { cmd } => match cmd {
            AutomorphismCmd::Apply { lambda, expr } => {
                let a = Automorphism {
                    lambda: [
                        eval_scalar(model, &lambda.lambda1)?,
                        eval_scalar(model, &lambda.lambda2)?,
                        eval_scalar(model, &lambda.lambda3)?,
                    ],
                    eta: lambda.eta,
                };
                let u = eval_algebra(model, Basis::X, &expr)?;
                let img = model.apply_automorphism(&a, &u)?;
                print_value(format, &Value::Algebra(img));
            }
            AutomorphismCmd::Verify { e1, e2, e3 } => {
                let images = [
                    eval_algebra(model, Basis::X, &e1)?,
                    eval_algebra(model, Basis::X, &e2)?,
                    eval_algebra(model, Basis::X, &e3)?,
                ];
                let ok = model.verify_automorphism(&images)?;
                match format {
                    Format::Text => println!("{ok}"),
                    Format::Json => println!("{}", serde_json::json!({ "automorphism": ok })),
                }
                return Ok(ok);
            }
        },
        Command::Derivation { cmd } => match cmd {
            DerivationCmd::Check { spec } => {
                let d = eval_spec(model, &spec)?;
                let ok = d.check(model)?;
                match format {
                    Format::Text => println!("{ok}"),
                    Format::Json => println!("{}", serde_json::json!({ "derivation": ok })),
                }
                return Ok(ok);
            }
            DerivationCmd::Apply { spec, expr } => {
                let d = eval_spec(model, &spec)?;
                let u = eval_algebra(model, Basis::X, &expr)?;
                print_value(format, &Value::Algebra(d.apply(model, &u)?));
            }
            DerivationCmd::Extend { spec } => {
                let d = eval_spec(model, &spec)?;
                let td = d.extend_to_torus(model)?;
                match format {
                    Format::Text => {
                        for (i, img) in td.images.iter().enumerate() {
                            println!("D(T{}) = {img}", i + 1);
                        }
                    }
                    Format::Json => {
                        let images: Vec<_> =
                            td.images.iter().map(qskew::doc::save_torus).collect();
                        println!(
                            "{}",
                            serde_json::json!({
                                "schema": 1,
                                "kind": "torus-derivation",
                                "images": images,
                            })
                        );
                    }
                }
            }
            DerivationCmd::Decompose { spec } => {
                let d = eval_spec(model, &spec)?;
                let dec = d.decompose(model)?;
                // cross-check the multipliers through the bounded solver
                let bound = solve_bound();
                for mu in &dec.mu {
                    let u = model
                        .z_poly_to_pbw(mu)?
                        .ok_or_else(|| Failure("non-polynomial multiplier".into()))?;
                    if !u.is_zero() && model.express_in_deltas(&u, bound)?.is_none() {
                        return Err(Failure("multiplier failed the central solve".into()));
                    }
                }
                match format {
                    Format::Text => {
                        println!("x = {}", dec.x);
                        for (i, mu) in dec.mu.iter().enumerate() {
                            println!("mu{} = {}", i + 1, zpoly_text(mu));
                        }
                    }
                    Format::Json => println!("{}", qskew::doc::save_decomposition(&dec)),
                }
            }
            DerivationCmd::Z2 { spec } => {
                let d = eval_spec(model, &spec)?;
                let z = d.z2_multiplier(model)?;
                match format {
                    Format::Text => println!("{}", zpoly_text(&z)),
                    Format::Json => {
                        let terms: Vec<_> = z
                            .iter()
                            .map(|(&(a, b), c)| {
                                serde_json::json!({
                                    "exp": [a, b],
                                    "num": qskew::doc::save_torus(
                                        &TorusElement::monomial(vec![0; 6], c.clone())
                                    )["terms"][0]["num"].clone(),
                                    "den": qskew::doc::save_torus(
                                        &TorusElement::monomial(vec![0; 6], c.clone())
                                    )["terms"][0]["den"].clone(),
                                })
                            })
                            .collect();
                        println!(
                            "{}",
                            serde_json::json!({"schema": 1, "kind": "zpoly", "terms": terms})
                        );
                    }
                }
            }
        },
        Command::VerifySuite {
            seed,
            only,
            presentation,
        } => {
            let presentation = match presentation {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
                    let v: serde_json::Value = serde_json::from_str(&text)?;
                    Some(qskew::doc::load_presentation(&v)?)
                }
                None => None,
            };
            let opts = VerifyOptions {
                seed,
                only,
                presentation,
            };
            let report = run_suite(model, &opts);
            match format {
                Format::Text => print!("{}", report.render_text()),
                Format::Json => println!("{}", report.to_json()),
            }
            return Ok(report.pass());
        }
    }
    Ok(true)
}

fn torus_qcommute(model: &UqModel, a: &TorusElement, b: &TorusElement) -> Option<i64> {
    if a.is_zero() || b.is_zero() {
        return Some(0);
    }
    let t = model.torus();
    let ab = t.mul(a, b);
    let ba = t.mul(b, a);
    for m in -64i64..=64 {
        if ab == ba.scale(&QElem::q_power(m)) {
            return Some(m);
        }
    }
    None
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
