//! Command-line front end: curvature tables, classification, model
//! matching, geodesics, solitons, and the blowup experiment, with
//! JSON/CSV output.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use walker3::{
    blowup_experiment_pc, build_cotton_soliton, build_ricci_soliton, classify_sampled, cotton,
    frame_0, frame_1, integrate_geodesic, match_model, model_invariants, nabla_k_r,
    recurrence_form, verify_soliton, CottonCase, Expr2, ExprError, FrameError, GeodesicState,
    RicciCase, SolitonKind, VectorField,
};
use walker3::config::RunConfig;

#[derive(Parser)]
#[command(name = "walker3", version, about = "Symbolic-numeric toolkit for 3D Walker metrics")]
struct Cli {
    /// Optional key=value config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FInput {
    /// File containing f(x,y): JSON expression tree, or infix source.
    #[arg(long, conflicts_with = "expr")]
    f: Option<PathBuf>,
    /// Inline infix expression for f(x,y).
    #[arg(long)]
    expr: Option<String>,
    /// Named parameter for the expression, repeatable: --param b=2.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Args, Clone)]
struct OutputOpts {
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print R, ∇R, …, ∇^K R (plus Cotton and recurrence data) at a point.
    Curvature {
        #[command(flatten)]
        fin: FInput,
        /// Evaluation point as X,Y.
        #[arg(long, default_value = "0,0")]
        point: String,
        /// Highest derivative order K.
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// Cotton orientation sign (+1 or -1).
        #[arg(long, allow_hyphen_values = true)]
        cotton_sign: Option<i32>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Classify f by sampled curvature invariants.
    Classify {
        #[command(flatten)]
        fin: FInput,
        /// Sample grid NX,NY,X0,X1,Y0,Y1.
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Normalized frame, slot record, and matched curvature model.
    ModelMatch {
        #[command(flatten)]
        fin: FInput,
        #[arg(long, default_value = "0,0")]
        point: String,
        /// Slot order (0, 1 or 2).
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Integrate a geodesic from an initial state.
    Geodesic {
        #[command(flatten)]
        fin: FInput,
        /// Initial state X,Y,XT,XP,YP,XTP.
        #[arg(long, allow_hyphen_values = true)]
        initial: String,
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Build a gradient Ricci/Cotton soliton and verify it.
    Soliton {
        /// Family: R1, R2, C1, C2 or C3.
        #[arg(long)]
        build: String,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        /// Coefficient functions of x (infix expressions).
        #[arg(long, default_value = "1")]
        alpha: String,
        #[arg(long, default_value = "0")]
        alpha2: String,
        #[arg(long, default_value = "0")]
        beta: String,
        #[arg(long, default_value = "0")]
        gamma: String,
        /// Quadrature domain X0,X1 for the potential.
        #[arg(long, default_value = "-2,2", allow_hyphen_values = true)]
        domain: String,
        #[arg(long, allow_hyphen_values = true)]
        cotton_sign: Option<i32>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Run the plane-wave incompleteness experiment and emit its table.
    BlowupPc {
        #[arg(long)]
        tol: Option<f64>,
        /// Initial x̃'(0); default 1.5 normalizes g(γ̇,γ̇) = 1.
        #[arg(long, allow_hyphen_values = true)]
        xt_dot0: Option<f64>,
        #[command(flatten)]
        out: OutputOpts,
    },
}

#[derive(Debug)]
enum CliError {
    /// Bad input (expression, flags, config): exit 2.
    Parse(String),
    /// Math/domain failure at runtime: exit 3.
    Domain(String),
}

impl From<ExprError> for CliError {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Parse(_) => CliError::Parse(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn parse_params(raw: &[String]) -> Result<Vec<(String, f64)>, CliError> {
    raw.iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| CliError::Parse(format!("--param expects NAME=VALUE, got {p:?}")))?;
            let val: f64 = v
                .parse()
                .map_err(|e| CliError::Parse(format!("--param {k}: {e}")))?;
            Ok((k.trim().to_string(), val))
        })
        .collect()
}

fn load_f(fin: &FInput) -> Result<Expr2, CliError> {
    let params = parse_params(&fin.params)?;
    let pairs: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    if let Some(src) = &fin.expr {
        return Ok(Expr2::parse(src, &pairs)?);
    }
    let Some(path) = &fin.f else {
        return Err(CliError::Parse("one of --f or --expr is required".into()));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(trimmed)
            .map_err(|e| CliError::Parse(format!("invalid JSON expression: {e}")))?;
        Ok(Expr2::from_json(&v)?)
    } else {
        Ok(Expr2::parse(trimmed, &pairs)?)
    }
}

fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let vals: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let vals = vals.map_err(|e| CliError::Parse(format!("{what}: {e}")))?;
    if vals.len() != n {
        return Err(CliError::Parse(format!(
            "{what}: expected {n} comma-separated numbers, got {}",
            vals.len()
        )));
    }
    Ok(vals)
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    match &cli.config {
        Some(p) => RunConfig::from_file(p).map_err(|e| CliError::Parse(e.to_string())),
        None => Ok(RunConfig::default()),
    }
}

fn emit(out: &OutputOpts, json_val: Option<Value>, csv: Option<String>) -> Result<(), CliError> {
    let text = match out.format {
        Format::Json => match json_val {
            Some(v) => serde_json::to_string_pretty(&v).expect("serializable") + "\n",
            None => return Err(CliError::Parse("no JSON form for this command".into())),
        },
        Format::Csv => match csv {
            Some(c) => c,
            None => return Err(CliError::Parse("no CSV form for this command".into())),
        },
    };
    match &out.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = load_config(&cli)?;
    match cli.command {
        Command::Curvature {
            fin,
            point,
            order,
            cotton_sign,
            out,
        } => {
            let f = load_f(&fin)?;
            let p = parse_floats(&point, 2, "--point")?;
            let pt = (p[0], p[1]);
            let sign = cotton_sign.unwrap_or(cfg.cotton_sign) as f64;
            let mut tensors = Vec::new();
            for k in 0..=order {
                let t = nabla_k_r(&f, pt, k).map_err(|e| CliError::Domain(e.to_string()))?;
                tensors.push(json!({"k": k, "tensor": t.to_json()}));
            }
            let ct = cotton(&f, pt, sign).map_err(|e| CliError::Domain(e.to_string()))?;
            let rec = recurrence_form(&f, pt).ok().map(|(w, res)| {
                json!({"omega": w.to_json(), "residual": res})
            });
            emit(
                &out,
                Some(json!({
                    "point": [pt.0, pt.1],
                    "nabla_k_r": tensors,
                    "cotton": ct.to_json(),
                    "recurrence": rec,
                })),
                None,
            )
        }
        Command::Classify { fin, grid, out } => {
            let f = load_f(&fin)?;
            let domain = match grid {
                Some(g) => {
                    walker3::config::parse_grid(&g)
                        .map_err(CliError::Parse)?
                        .domain
                }
                None => cfg.grid.domain,
            };
            let cl = classify_sampled(&f, domain).map_err(|e| CliError::Domain(e.to_string()))?;
            emit(&out, Some(cl.to_json()), None)
        }
        Command::ModelMatch {
            fin,
            point,
            order,
            out,
        } => {
            let f = load_f(&fin)?;
            let p = parse_floats(&point, 2, "--point")?;
            let pt = (p[0], p[1]);
            if order > 2 {
                return Err(CliError::Parse("--order must be ≤ 2".into()));
            }
            let frame = match frame_1(&f, pt) {
                Ok(fr) => fr,
                Err(FrameError::Division) => frame_0(&f, pt, 0.0)?,
                Err(e) => return Err(e.into()),
            };
            let record = model_invariants(&f, pt, &frame, order)?;
            let tag = match_model(&record)?;
            emit(
                &out,
                Some(json!({
                    "point": [pt.0, pt.1],
                    "frame": {
                        "a11": frame.a11, "a12": frame.a12, "a13": frame.a13,
                        "a22": frame.a22, "a23": frame.a23, "a33": frame.a33,
                    },
                    "record": record.to_json(),
                    "model": tag.to_json(),
                })),
                None,
            )
        }
        Command::Geodesic {
            fin,
            initial,
            tmax,
            tol,
            out,
        } => {
            let f = load_f(&fin)?;
            let s = parse_floats(&initial, 6, "--initial")?;
            let init = GeodesicState::new(0.0, [s[0], s[1], s[2]], [s[3], s[4], s[5]]);
            let traj = integrate_geodesic(&f, &init, tmax, tol.unwrap_or(cfg.ode_tol))
                .map_err(|e| CliError::Domain(e.to_string()))?;
            let last = traj.states.last().expect("at least the initial state");
            let summary = json!({
                "termination": format!("{:?}", traj.termination),
                "t_end": traj.t_end(),
                "energy0": traj.energy0,
                "energy_drift": traj.energy_drift,
                "final_state": {
                    "t": last.t, "pos": last.pos, "vel": last.vel,
                },
                "steps": traj.states.len(),
            });
            emit(&out, Some(summary), Some(traj.to_csv(&f)))
        }
        Command::Soliton {
            build,
            kappa,
            alpha,
            alpha2,
            beta,
            gamma,
            domain,
            cotton_sign,
            out,
        } => {
            let ex = |s: &str| -> Result<Expr2, CliError> { Ok(Expr2::parse(s, &[])?) };
            let dom = parse_floats(&domain, 2, "--domain")?;
            let dom = (dom[0], dom[1]);
            if dom.1 <= dom.0 {
                return Err(CliError::Parse("--domain must satisfy X0 < X1".into()));
            }
            let sign = cotton_sign.unwrap_or(cfg.cotton_sign);
            if sign != 1 && sign != -1 {
                return Err(CliError::Parse("--cotton-sign must be ±1".into()));
            }
            let samples: Vec<[f64; 3]> = cfg
                .grid
                .points()
                .into_iter()
                .map(|(x, y)| [x, y, 0.0])
                .collect();
            let result = match build.to_uppercase().as_str() {
                "R1" | "R2" => {
                    let case = if build.eq_ignore_ascii_case("R1") {
                        RicciCase::R1 {
                            kappa,
                            alpha: ex(&alpha)?,
                            beta: ex(&beta)?,
                            gamma: ex(&gamma)?,
                        }
                    } else {
                        RicciCase::R2 {
                            alpha: ex(&alpha)?,
                            beta: ex(&beta)?,
                            gamma: ex(&gamma)?,
                        }
                    };
                    let (f, h) = build_ricci_soliton(&case, dom)
                        .map_err(|e| CliError::Domain(e.to_string()))?;
                    let cert = verify_soliton(
                        &f,
                        &VectorField::gradient(&h),
                        0.0,
                        SolitonKind::Ricci,
                        sign,
                        &samples,
                    )
                    .map_err(|e| CliError::Domain(e.to_string()))?;
                    json!({
                        "family": build.to_uppercase(),
                        "f": f.to_json(),
                        "mu_y": h.mu_y,
                        "certificate": cert.to_json(),
                    })
                }
                "C1" | "C2" | "C3" => {
                    let case = match build.to_uppercase().as_str() {
                        "C1" => CottonCase::C1 {
                            kappa,
                            alpha1: ex(&alpha)?,
                            alpha2: ex(&alpha2)?,
                            beta: ex(&beta)?,
                            gamma: ex(&gamma)?,
                        },
                        "C2" => CottonCase::C2 {
                            kappa,
                            alpha1: ex(&alpha)?,
                            alpha2: ex(&alpha2)?,
                            beta: ex(&beta)?,
                            gamma: ex(&gamma)?,
                        },
                        _ => CottonCase::C3 {
                            alpha1: ex(&alpha)?,
                            alpha2: ex(&alpha2)?,
                            beta: ex(&beta)?,
                            gamma: ex(&gamma)?,
                        },
                    };
                    let (f, h, report) = build_cotton_soliton(&case, sign, dom)
                        .map_err(|e| CliError::Domain(e.to_string()))?;
                    let cert = verify_soliton(
                        &f,
                        &VectorField::gradient(&h),
                        0.0,
                        SolitonKind::Cotton,
                        sign,
                        &samples,
                    )
                    .map_err(|e| CliError::Domain(e.to_string()))?;
                    json!({
                        "family": build.to_uppercase(),
                        "f": f.to_json(),
                        "mu_y": h.mu_y,
                        "certificate": cert.to_json(),
                        "consistency": report.to_json(),
                    })
                }
                other => {
                    return Err(CliError::Parse(format!(
                        "--build must be one of R1, R2, C1, C2, C3 (got {other})"
                    )))
                }
            };
            emit(&out, Some(result), None)
        }
        Command::BlowupPc { tol, xt_dot0, out } => {
            let report = blowup_experiment_pc(tol.unwrap_or(cfg.ode_tol), xt_dot0);
            let csv = report.to_csv();
            emit(&out, Some(report.to_json()), Some(csv))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Parse(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
