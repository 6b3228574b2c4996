use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use choquet_tower::category::monad_counterexample;
use choquet_tower::choquet::choquet_integral;
use choquet_tower::ellsberg::{ellsberg_report, paradox_demo, UrnParams, Variant};
use choquet_tower::tower::{build_tower, projective_consistency, ProjectiveVector};
use choquet_tower::{
    comonotone_counterexample, run_suite, Backend, FiniteSpace, LawConfig, Rational, Scalar,
    SpaceFile, Suite,
};

const THREADS_VAR: &str = "CHOQUET_TOWER_THREADS";

#[derive(Parser)]
#[command(
    name = "choquet-tower",
    version,
    about = "Choquet integrals, layered Ellsberg reports and monad-law checks"
)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Seed for every random law trial.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 500, value_parser = clap::value_parser!(u32).range(1..))]
    trials: u32,
    #[arg(long, global = true, value_enum, default_value_t = BackendArg::Rational)]
    backend: BackendArg,
    /// Comparison tolerance on the float backend.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum BackendArg {
    Rational,
    Float,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    #[value(name = "X")]
    X,
    #[value(name = "Y")]
    Y,
    #[value(name = "Z")]
    Z,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Choquet,
    Dirac,
    Monad,
    Substitution,
    Retraction,
    UgMap,
    UncMaps,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Comonotonic,
    Monad,
}

#[derive(Args, Clone)]
struct UrnArgs {
    #[arg(long, default_value_t = 10)]
    big_n: u32,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Utility of winning; read exactly on the rational backend.
    #[arg(long, default_value = "0.6")]
    u1: String,
}

#[derive(Args, Clone, Copy)]
struct TowerArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..))]
    grid: u8,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..))]
    depth: u8,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..))]
    space_size: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Value functions of the four Ellsberg acts at one layer.
    Ellsberg {
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[command(flatten)]
        urn: UrnArgs,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=3))]
        layer: u8,
    },
    /// Run one seeded law suite.
    Laws {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[command(flatten)]
        tower: TowerArgs,
    },
    /// Reproduce a known counterexample.
    Counterexample {
        #[arg(value_enum)]
        which: Which,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Choquet integral of a named act against a named capacity.
    Choquet {
        #[arg(long)]
        space_file: PathBuf,
        #[arg(long)]
        capacity: String,
        #[arg(long)]
        act: String,
    },
    /// Level sizes and projective checks of a grid tower.
    Tower {
        #[command(flatten)]
        tower: TowerArgs,
    },
    /// Sure-thing identities and the second-layer verdict for one urn.
    Paradox {
        #[command(flatten)]
        urn: UrnArgs,
    },
}

#[derive(Serialize)]
struct RunConfig {
    seed: u64,
    trials: u32,
    backend: BackendArg,
    tolerance: f64,
    format: Format,
    out: Option<String>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] choquet_tower::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Verdict,
    Law,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Verdict => 2,
            Status::Law => 3,
        }
    }
}

struct Outcome {
    command: &'static str,
    result: Value,
    table: Vec<Vec<String>>,
    status: Status,
}

fn near<T: Scalar>(value: &str, expected: &T, tol: f64) -> Result<bool, CliError> {
    let tol = match T::BACKEND {
        Backend::Rational => 0.0,
        Backend::Float => tol,
    };
    Ok(T::parse_str(value)?.near(expected, tol))
}

fn urn_params<T: Scalar>(urn: &UrnArgs) -> Result<UrnParams<T>, CliError> {
    Ok(UrnParams::new(
        urn.big_n,
        urn.alpha,
        T::parse_str(&urn.u1)?,
    )?)
}

fn cmd_ellsberg<T: Scalar>(
    variant: Variant,
    urn: &UrnArgs,
    layer: u8,
) -> Result<Outcome, CliError> {
    let report = ellsberg_report(variant, &urn_params::<T>(urn)?, layer as usize)?.rendered();
    let mut table = vec![[
        "point", "f1", "f2", "f3", "f4", "order_12", "order_34", "verdict",
    ]
    .map(String::from)
    .to_vec()];
    for r in &report.rows {
        let order = |o| {
            serde_json::to_value(o)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default()
        };
        table.push(vec![
            r.point.clone(),
            r.f1.clone(),
            r.f2.clone(),
            r.f3.clone(),
            r.f4.clone(),
            order(r.order_12),
            order(r.order_34),
            report.verdict.to_string(),
        ]);
    }
    let status = if report.consistent {
        Status::Ok
    } else {
        Status::Verdict
    };
    Ok(Outcome {
        command: "ellsberg",
        result: serde_json::to_value(&report).expect("serializable"),
        table,
        status,
    })
}

fn cmd_laws<T: Scalar>(suite: Suite, cfg: &LawConfig) -> Result<Outcome, CliError> {
    let report = run_suite::<T>(suite, cfg)?;
    let mut table = vec![
        ["suite", "law", "trials", "failures", "first_counterexample"]
            .map(String::from)
            .to_vec(),
    ];
    for law in &report.laws {
        table.push(vec![
            suite.to_string(),
            law.law.clone(),
            law.trials.to_string(),
            law.failures.to_string(),
            law.first_counterexample.clone().unwrap_or_default(),
        ]);
    }
    let status = if report.passed {
        Status::Ok
    } else {
        Status::Law
    };
    Ok(Outcome {
        command: "laws",
        result: json!({ "config": cfg, "report": report }),
        table,
        status,
    })
}

fn cmd_comonotonic<T: Scalar>(tol: f64) -> Result<Outcome, CliError> {
    let ce = comonotone_counterexample::<T>()?;
    let matches = near(&ce.difference_f, &T::ratio(-13, 8), tol)?
        && near(&ce.difference_g, &T::ratio(1, 4), tol)?
        && near(&ce.product, &T::ratio(-13, 32), tol)?
        && ce.inputs_comonotonic
        && !ce.images_comonotonic;
    let table = vec![
        vec!["quantity".into(), "value".into()],
        vec!["xi_f".into(), ce.xi_f.join(" ")],
        vec!["xi_g".into(), ce.xi_g.join(" ")],
        vec!["difference_f".into(), ce.difference_f.clone()],
        vec!["difference_g".into(), ce.difference_g.clone()],
        vec!["product".into(), ce.product.clone()],
    ];
    Ok(Outcome {
        command: "counterexample",
        result: json!({ "which": "comonotonic", "counterexample": ce, "matches": matches }),
        table,
        status: if matches { Status::Ok } else { Status::Law },
    })
}

fn cmd_monad<T: Scalar>(beta: f64, tol: f64) -> Result<Outcome, CliError> {
    let ce = monad_counterexample::<T>(beta)?;
    let expected = if beta == 1.0 {
        Some(T::zero())
    } else if beta == 2.0 {
        Some(T::ratio(4, 9))
    } else {
        None
    };
    let matches = ce.agrees
        && match &expected {
            Some(e) => near(&ce.formula_difference, e, tol)?,
            None => true,
        };
    let table = vec![
        vec!["quantity".into(), "value".into()],
        vec!["mu_side".into(), ce.printed_count.mu_side.clone()],
        vec!["xi_side".into(), ce.printed_count.xi_side.clone()],
        vec!["difference".into(), ce.printed_count.difference.clone()],
        vec!["formula_difference".into(), ce.formula_difference.clone()],
        vec![
            "normalized_difference".into(),
            ce.normalized.difference.clone(),
        ],
    ];
    Ok(Outcome {
        command: "counterexample",
        result: json!({ "which": "monad", "counterexample": ce, "matches": matches }),
        table,
        status: if matches { Status::Ok } else { Status::Law },
    })
}

fn cmd_choquet<T: Scalar>(path: &PathBuf, capacity: &str, act: &str) -> Result<Outcome, CliError> {
    let file = SpaceFile::<T>::load(path)?;
    let value = choquet_integral(file.capacity(capacity)?, file.act(act)?)?.render();
    Ok(Outcome {
        command: "choquet",
        result: json!({
            "space_file": path.display().to_string(),
            "capacity": capacity,
            "act": act,
            "value": value,
        }),
        table: vec![
            vec!["capacity".into(), "act".into(), "value".into()],
            vec![capacity.into(), act.into(), value],
        ],
        status: Status::Ok,
    })
}

fn cmd_tower(args: TowerArgs) -> Result<Outcome, CliError> {
    let base = FiniteSpace::numbered("x", args.space_size as usize)?;
    let tower = build_tower(&base, args.grid as u32, args.depth as usize)?;
    let mut levels = Vec::new();
    let mut table = vec![vec!["level".to_string(), "size".to_string()]];
    for n in 0..=tower.depth() {
        let size = tower.level_size(n)?;
        levels.push(json!({ "level": n, "size": size }));
        table.push(vec![n.to_string(), size.to_string()]);
    }
    let mut consistent = 0;
    for e in tower.points(1)? {
        let v = ProjectiveVector::from_eta_chain(&tower, &e)?;
        if projective_consistency(&tower, &v)?.consistent {
            consistent += 1;
        }
    }
    let chains = tower.level_size(1)?;
    Ok(Outcome {
        command: "tower",
        result: json!({
            "base_size": args.space_size,
            "grid": args.grid,
            "depth": tower.depth(),
            "levels": levels,
            "eta_chains": chains,
            "eta_chains_consistent": consistent,
        }),
        table,
        status: if consistent == chains {
            Status::Ok
        } else {
            Status::Law
        },
    })
}

fn cmd_paradox<T: Scalar>(urn: &UrnArgs) -> Result<Outcome, CliError> {
    let demo = paradox_demo(&urn_params::<T>(urn)?)?;
    let mut table = vec![vec!["check".to_string(), "result".to_string()]];
    for c in &demo.identities {
        table.push(vec![c.identity.clone(), c.holds.to_string()]);
    }
    table.push(vec!["outcome".into(), demo.outcome.to_string()]);
    let holds = demo.identities.iter().all(|c| c.holds) && demo.second_layer.consistent;
    Ok(Outcome {
        command: "paradox",
        result: serde_json::to_value(&demo).expect("serializable"),
        table,
        status: if holds { Status::Ok } else { Status::Verdict },
    })
}

fn law_config(run: &RunArgs, tower: TowerArgs) -> LawConfig {
    LawConfig {
        seed: run.seed,
        trials: run.trials as usize,
        grid: tower.grid as u32,
        depth: tower.depth as usize,
        space_size: tower.space_size as usize,
    }
}

fn dispatch<T: Scalar>(cli: &Cli) -> Result<Outcome, CliError> {
    let run = &cli.run;
    match &cli.command {
        Command::Ellsberg {
            variant,
            urn,
            layer,
        } => {
            let variant = match variant {
                VariantArg::X => Variant::X,
                VariantArg::Y => Variant::Y,
                VariantArg::Z => Variant::Z,
            };
            cmd_ellsberg::<T>(variant, urn, *layer)
        }
        Command::Laws { suite, tower } => {
            let suite = match suite {
                SuiteArg::Choquet => Suite::Choquet,
                SuiteArg::Dirac => Suite::Dirac,
                SuiteArg::Monad => Suite::Monad,
                SuiteArg::Substitution => Suite::Substitution,
                SuiteArg::Retraction => Suite::Retraction,
                SuiteArg::UgMap => Suite::UgMap,
                SuiteArg::UncMaps => Suite::UncMaps,
            };
            cmd_laws::<T>(suite, &law_config(run, *tower))
        }
        Command::Counterexample {
            which: Which::Comonotonic,
            ..
        } => cmd_comonotonic::<T>(run.tolerance),
        Command::Counterexample {
            which: Which::Monad,
            beta,
        } => {
            let beta =
                beta.ok_or_else(|| CliError::Usage("counterexample monad needs --beta".into()))?;
            cmd_monad::<T>(beta, run.tolerance)
        }
        Command::Choquet {
            space_file,
            capacity,
            act,
        } => cmd_choquet::<T>(space_file, capacity, act),
        Command::Tower { tower } => cmd_tower(*tower),
        Command::Paradox { urn } => cmd_paradox::<T>(urn),
    }
}

fn render(cli: &Cli, outcome: &Outcome) -> Result<Vec<u8>, CliError> {
    let run = &cli.run;
    match run.format {
        Format::Json => {
            let config = RunConfig {
                seed: run.seed,
                trials: run.trials,
                backend: run.backend,
                tolerance: run.tolerance,
                format: run.format,
                out: run.out.as_ref().map(|p| p.display().to_string()),
            };
            let doc =
                json!({ "command": outcome.command, "config": config, "result": outcome.result });
            let mut bytes = serde_json::to_vec_pretty(&doc).expect("serializable");
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            for row in &outcome.table {
                writer.write_record(row)?;
            }
            writer
                .into_inner()
                .map_err(|e| CliError::Io(e.into_error()))
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_VAR} must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: &Cli) -> Result<Status, CliError> {
    if !(cli.run.tolerance.is_finite() && cli.run.tolerance > 0.0) {
        return Err(CliError::Usage("--tolerance must be positive".into()));
    }
    configure_threads()?;
    let outcome = match cli.run.backend {
        BackendArg::Rational => dispatch::<Rational>(cli)?,
        BackendArg::Float => dispatch::<f64>(cli)?,
    };
    let bytes = render(cli, &outcome)?;
    match &cli.run.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(outcome.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
