//! Command-line front end.
//!
//! Every subcommand accepts `--config <file.json>` holding the same fields
//! as its flags (snake_case); flags given on the command line win.
//!
//! Exit codes: 0 ok, 1 inequality violation, 2 validation error, 3 I/O
//! error, 4 not found.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::bounds::{
    clamp_for_display, curve_csv, key_rate, reliability_bound, secret_rate, security_exponent_bound,
    symmetric_threshold, threshold_curve, uniform_grid, BoundParams, CurvePoint,
};
use crate::codes::{search_code_pair, CodePair};
use crate::error::Error;
use crate::protocol::{run_protocol, trial_rng, ProtocolParams};
use crate::quantum::AttackModel;
use crate::verify::{report_csv, run_all, violations, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NOT_FOUND: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Violation(String),
    Validation(String),
    Io(String),
    NotFound(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violation(_) => EXIT_VIOLATION,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
            CliError::NotFound(_) => EXIT_NOT_FOUND,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Violation(m) | CliError::Validation(m) | CliError::Io(m) | CliError::NotFound(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "bb84z", version, about = "BB84-INFO-z simulator and bound calculator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the protocol once (transcript JSON) or many times (per-trial CSV).
    Run(RunArgs),
    /// Evaluate the finite-key bounds and key rate (CSV quantity,value).
    Bounds(BoundsArgs),
    /// Emit the asymptotic threshold curve as CSV.
    ThresholdCurve(CurveArgs),
    /// Run the exhaustive inequality suites and write a per-instance report.
    Verify(VerifyArgs),
    /// Search for a code pair with given distance and correction targets.
    CodeSearch(SearchArgs),
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default)]
pub struct Common {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

/// Fills every `None` field of `$a` from `$b`.
macro_rules! fill {
    ($a:expr, $b:expr; $($field:ident),*) => {
        $( if $a.$field.is_none() { $a.$field = $b.$field.take(); } )*
    };
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default)]
pub struct RunArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// INFO block length; defaults to the code's length, or 8.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub nz: Option<usize>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub paz: Option<f64>,
    #[arg(long)]
    pub pax: Option<f64>,
    /// identity, flip-z, rotation:<theta>, conjugate-rotation:<phi>,
    /// rates:<qz>,<qx>, or a path to an attack JSON file.
    #[arg(long)]
    pub attack: Option<String>,
    /// Code pair file; defaults to the single-parity key of length n.
    #[arg(long)]
    pub code: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default)]
pub struct BoundsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub nz: Option<usize>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub paz: Option<f64>,
    #[arg(long)]
    pub pax: Option<f64>,
    #[arg(long)]
    pub eps_sec: Option<f64>,
    #[arg(long)]
    pub eps_rel: Option<f64>,
    /// Key rate R = m/n.
    #[arg(long)]
    pub rate: Option<f64>,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default)]
pub struct CurveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Number of evenly spaced p_az values on [0, 1/2].
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Monte Carlo trials per attack in the joint-event suite.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Multiplies every right-hand side (harness self-test).
    #[arg(long, hide = true)]
    pub rhs_scale: Option<f64>,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default)]
pub struct SearchArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Required d_{r,m}/n lower bound (strict).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Required correction capability.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
}

fn load_config<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn merge_common(a: &mut Common, mut b: Common) {
    fill!(a, b; seed, out);
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

/// Parses an attack preset name or reads an attack JSON file.
pub fn parse_attack(spec: &str) -> CliResult<AttackModel> {
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Validation(format!("bad number '{s}' in attack '{spec}'")))
    };
    let attack = match spec.split_once(':') {
        None if spec == "identity" => AttackModel::identity(2),
        None if spec == "flip-z" => AttackModel::flip_z(),
        Some(("rotation", theta)) => AttackModel::rotation(number(theta)?),
        Some(("conjugate-rotation", phi)) => AttackModel::conjugate_rotation(number(phi)?),
        Some(("rates", rates)) => {
            let (qz, qx) = rates
                .split_once(',')
                .ok_or_else(|| CliError::Validation(format!("expected rates:<qz>,<qx>, got '{spec}'")))?;
            AttackModel::from_error_rates(number(qz)?, number(qx)?)?
        }
        _ => {
            let text = fs::read_to_string(spec).map_err(|e| CliError::Io(format!("attack file {spec}: {e}")))?;
            AttackModel::from_json(&text)?
        }
    };
    Ok(attack)
}

fn check_positive(name: &str, v: usize) -> CliResult<()> {
    if v == 0 {
        return Err(CliError::Validation(format!("--{name} must be positive")));
    }
    Ok(())
}

pub fn cmd_run(mut args: RunArgs) -> CliResult<()> {
    let mut file: RunArgs = load_config(args.common.config.as_deref())?;
    merge_common(&mut args.common, std::mem::take(&mut file.common));
    fill!(args, file; n, nz, nx, paz, pax, attack, code, trials);

    let code = match &args.code {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            CodePair::from_text(&text)?
        }
        None => {
            let n = args.n.unwrap_or(8);
            check_positive("n", n)?;
            CodePair::parity_key(n)?
        }
    };
    if let Some(n) = args.n {
        check_positive("n", n)?;
        if n != code.n() {
            return Err(CliError::Validation(format!(
                "--n {n} differs from the code length {}",
                code.n()
            )));
        }
    }
    let params = ProtocolParams::new(
        args.nz.unwrap_or(8),
        args.nx.unwrap_or(8),
        args.paz.unwrap_or(0.1),
        args.pax.unwrap_or(0.1),
        code,
    )?;
    let attack = parse_attack(args.attack.as_deref().unwrap_or("identity"))?;
    let trials = args.trials.unwrap_or(1);
    if trials == 0 {
        return Err(CliError::Validation("--trials must be at least 1".into()));
    }
    let seed = match args.common.seed {
        Some(s) => s,
        None => {
            let s: u64 = rand::random();
            eprintln!("seed={s}");
            s
        }
    };

    let text = if trials == 1 {
        let mut t = run_protocol(&params, &attack, &mut trial_rng(seed, 0))?.to_json();
        t.push('\n');
        t
    } else {
        let mut csv = String::from("trial,aborted,info_errors,test_z_errors,test_x_errors,keys_equal\n");
        let mut aborted = 0u64;
        for trial in 0..trials {
            let t = run_protocol(&params, &attack, &mut trial_rng(seed, trial))?;
            aborted += t.aborted as u64;
            csv.push_str(&format!(
                "{trial},{},{},{},{},{}\n",
                t.aborted,
                t.info_errors(),
                t.c_z.weight(),
                t.c_b.weight(),
                !t.keys_differ()
            ));
        }
        eprintln!("abort fraction {:.6}", aborted as f64 / trials as f64);
        csv
    };
    write_output(args.common.out.as_deref(), &text)
}

pub fn cmd_bounds(mut args: BoundsArgs) -> CliResult<()> {
    let mut file: BoundsArgs = load_config(args.common.config.as_deref())?;
    merge_common(&mut args.common, std::mem::take(&mut file.common));
    fill!(args, file; n, nz, nx, paz, pax, eps_sec, eps_rel, rate);
    let p = BoundParams::new(
        args.n.unwrap_or(1000),
        args.nz.unwrap_or(1000),
        args.nx.unwrap_or(1000),
        args.paz.unwrap_or(0.05),
        args.pax.unwrap_or(0.05),
        args.eps_sec.unwrap_or(0.05),
        args.eps_rel.unwrap_or(0.05),
        args.rate.unwrap_or(0.1),
    )?;
    let security = security_exponent_bound(&p);
    let rows = [
        ("delta", p.delta()),
        ("security_bound", security),
        ("security_bound_clamped", clamp_for_display(security)),
        ("reliability_bound", reliability_bound(&p)),
        ("key_rate", key_rate(&p)?),
        ("asymptotic_key_rate", secret_rate(p.p_az, p.p_ax, 0.0, 0.0, 0.0)?),
    ];
    let mut csv = String::from("quantity,value\n");
    for (name, value) in rows {
        csv.push_str(&format!("{name},{value:.12}\n"));
    }
    write_output(args.common.out.as_deref(), &csv)
}

/// The curve on `points` grid values with the symmetric point inserted in
/// order.
pub fn curve_with_symmetric_point(points: usize) -> crate::Result<Vec<CurvePoint>> {
    let mut curve = threshold_curve(&uniform_grid(points))?;
    let p = symmetric_threshold();
    let at = curve.partition_point(|c| c.p_az < p);
    curve.insert(at, CurvePoint { p_az: p, p_ax_max: p });
    Ok(curve)
}

pub fn cmd_threshold_curve(mut args: CurveArgs) -> CliResult<()> {
    let mut file: CurveArgs = load_config(args.common.config.as_deref())?;
    merge_common(&mut args.common, std::mem::take(&mut file.common));
    fill!(args, file; points);
    let points = args.points.unwrap_or(101);
    if points < 2 {
        return Err(CliError::Validation("--points must be at least 2".into()));
    }
    let curve = curve_with_symmetric_point(points)?;
    write_output(args.common.out.as_deref(), &curve_csv(&curve))
}

pub fn cmd_verify(mut args: VerifyArgs) -> CliResult<()> {
    let mut file: VerifyArgs = load_config(args.common.config.as_deref())?;
    merge_common(&mut args.common, std::mem::take(&mut file.common));
    fill!(args, file; trials, rhs_scale);
    let seed = args
        .common
        .seed
        .ok_or_else(|| CliError::Validation("verify requires --seed".into()))?;
    let mut options = VerifyOptions::new(seed);
    if let Some(t) = args.trials {
        if t == 0 {
            return Err(CliError::Validation("--trials must be at least 1".into()));
        }
        options.trials = t;
    }
    if let Some(s) = args.rhs_scale {
        options.rhs_scale = s;
    }
    let rows = run_all(&options)?;
    write_output(args.common.out.as_deref(), &report_csv(&rows))?;
    let bad = violations(&rows);
    if bad.is_empty() {
        eprintln!("{} instances, all satisfied", rows.len());
        return Ok(());
    }
    for row in &bad {
        eprintln!(
            "violated: {} {} lhs={:.12e} rhs={:.12e}",
            row.suite, row.instance, row.lhs, row.rhs
        );
    }
    Err(CliError::Violation(format!(
        "{} of {} instances violated",
        bad.len(),
        rows.len()
    )))
}

pub fn cmd_code_search(mut args: SearchArgs) -> CliResult<()> {
    let mut file: SearchArgs = load_config(args.common.config.as_deref())?;
    merge_common(&mut args.common, std::mem::take(&mut file.common));
    fill!(args, file; n, r, m, delta, t, max_iters);
    let n = args.n.unwrap_or(7);
    let r = args.r.unwrap_or(3);
    let m = args.m.unwrap_or(1);
    let delta = args.delta.unwrap_or(0.14);
    let t = args.t.unwrap_or(1);
    let mut rng = trial_rng(args.common.seed.unwrap_or(0), 0);
    match search_code_pair(n, r, m, delta, t, &mut rng, args.max_iters.unwrap_or(10_000))? {
        Some(code) => write_output(args.common.out.as_deref(), &code.to_text()),
        None => Err(CliError::NotFound(format!(
            "no code with n={n} r={r} m={m}, d/n > {delta}, t >= {t} found"
        ))),
    }
}

pub fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Run(a) => cmd_run(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::ThresholdCurve(a) => cmd_threshold_curve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::CodeSearch(a) => cmd_code_search(a),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
