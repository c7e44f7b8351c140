//! Command implementations for the `splitmel` binary.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use splitmel::melnikov::{
    certify_nonintegrability, eval_melnikov, melnikov_series, series_to_json, simple_zeros,
    zero_existence_ratio, MelnikovSeries, Verdict, Zero, TOL_CERT, TOL_COEFF, TOL_SIMPLE,
};
use splitmel::numfmt::num;
use splitmel::separatrix::{orbit_csv, preset_orbit, shoot_separatrix, Orbit, ShootOpts};
use splitmel::splitting::{
    profile_csv, profile_error, splitting_profile, theta_grid, SplittingOpts,
};
use splitmel::system::{parse_system, refine_saddle, TOL_EQ};
use splitmel::variational::{
    asymptotic_data, monodromy_pair, monodromy_via_continuation, ContinuationOpts, MonodromyReport,
    Side, VariationalOpts, TOL_COMMUTATOR,
};
use splitmel::{Error, PlanarSystem, PresetKind, PresetParams};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "splitmel",
    version,
    about = "Melnikov certificates, monodromy obstructions and separatrix splitting"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for report files; nothing is written when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Format of the report printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Melnikov certificate, optionally with the monodromy commutator.
    Certify {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// Also run the variational (monodromy) pipeline.
        #[arg(long)]
        monodromy: bool,
    },
    /// Melnikov series and a θ-grid of M(θ) with its zeros.
    Melnikov {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// Number of θ-grid points on [0, 2π).
        #[arg(long, default_value_t = 360)]
        points: usize,
    },
    /// Closed-form monodromy pair and its commutator.
    Monodromy {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// Harmonic ℓ (default: the Melnikov witness).
        #[arg(long)]
        ell: Option<i32>,
        /// Also continue the variational equation around a saddle (minus or plus).
        #[arg(long)]
        continuation: Option<String>,
    },
    /// Measured separatrix splitting against the Melnikov prediction.
    Splitting {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// Comma-separated perturbation sizes.
        #[arg(long, default_value = "")]
        eps: String,
        /// Number of θ-grid points on [0, 2π).
        #[arg(long, default_value_t = 32)]
        points: usize,
    },
    /// Verdicts and zero thresholds over a preset parameter grid.
    Sweep {
        /// Preset name (duffing1 or duffing2).
        #[arg(long)]
        preset: String,
        /// Comma-separated β values.
        #[arg(long)]
        betas: String,
        /// Comma-separated δ values.
        #[arg(long)]
        deltas: String,
        /// Comma-separated ω values.
        #[arg(long, default_value = "1")]
        omegas: String,
        #[arg(long, default_value_t = 1)]
        branch: i32,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Samples of the separatrix as CSV.
    OrbitDump {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        t_min: f64,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        t_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    /// JSON system definition.
    #[arg(long, conflicts_with = "preset")]
    pub input: Option<PathBuf>,
    /// Preset name (duffing1 or duffing2).
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Separatrix branch (+1 or −1).
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub branch: i32,
    /// Source saddle guess `x1,x2` (required with --input).
    #[arg(long, allow_hyphen_values = true)]
    pub source: Option<String>,
    /// Target saddle guess `x1,x2` (default: the source, homoclinic).
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<String>,
    /// Compute the orbit by shooting even for presets.
    #[arg(long)]
    pub shoot: bool,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct TolArgs {
    #[arg(long, default_value_t = TOL_COEFF)]
    pub tol_coeff: f64,
    #[arg(long, default_value_t = TOL_CERT)]
    pub tol_cert: f64,
    #[arg(long, default_value_t = TOL_SIMPLE)]
    pub tol_simple: f64,
    #[arg(long, default_value_t = TOL_COMMUTATOR)]
    pub tol_commutator: f64,
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Config { kind: String, message: String },
    Numeric { kind: String, message: String },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config {
            kind: "config".into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numeric { .. } => 3,
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        let (class, kind, message) = match self {
            CliError::Config { kind, message } => ("config", kind, message),
            CliError::Numeric { kind, message } => ("numerical", kind, message),
        };
        json!({ "error": class, "kind": kind, "message": message, "exit_code": self.exit_code() })
            .to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (kind, message) = (e.kind().to_string(), e.to_string());
        if e.is_config() {
            CliError::Config { kind, message }
        } else {
            CliError::Numeric { kind, message }
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Files and stdout text produced by a command.
#[derive(Debug, Default, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub files: Vec<(String, String)>,
}

impl Output {
    /// Writes the files under `dir`.
    pub fn write(&self, dir: &Path) -> CliResult<()> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Config {
            kind: "io".into(),
            message: e.to_string(),
        })?;
        for (name, body) in &self.files {
            std::fs::write(dir.join(name), body).map_err(|e| CliError::Config {
                kind: "io".into(),
                message: format!("{name}: {e}"),
            })?;
        }
        Ok(())
    }
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> CliResult<Output> {
    match &cli.command {
        Command::Certify {
            system,
            tol,
            monodromy,
        } => cmd_certify(system, tol, *monodromy, cli.format),
        Command::Melnikov {
            system,
            tol,
            points,
        } => cmd_melnikov(system, tol, *points, cli.format),
        Command::Monodromy {
            system,
            tol,
            ell,
            continuation,
        } => cmd_monodromy(system, tol, *ell, continuation.as_deref()),
        Command::Splitting {
            system,
            tol,
            eps,
            points,
        } => cmd_splitting(system, tol, eps, *points, cli.format),
        Command::Sweep {
            preset,
            betas,
            deltas,
            omegas,
            branch,
            tol,
        } => cmd_sweep(preset, betas, deltas, omegas, *branch, tol, cli.format),
        Command::OrbitDump {
            system,
            t_min,
            t_max,
            points,
        } => cmd_orbit_dump(system, *t_min, *t_max, *points),
    }
}

fn parse_point(s: &str) -> CliResult<[f64; 2]> {
    let v = parse_list(s)?;
    match v.as_slice() {
        [a, b] => Ok([*a, *b]),
        _ => Err(CliError::config(format!("expected `x1,x2`, got `{s}`"))),
    }
}

/// Comma-separated finite numbers; empty input gives an empty list.
pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(CliError::config(format!("not a finite number: `{t}`"))),
        })
        .collect()
}

/// Builds the system and its separatrix.
pub fn load(args: &SystemArgs) -> CliResult<(PlanarSystem, Orbit)> {
    if args.branch != 1 && args.branch != -1 {
        return Err(CliError::config("branch must be 1 or -1"));
    }
    let sys = match (&args.input, &args.preset) {
        (Some(path), None) => {
            let doc = std::fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            parse_system(&doc)?
        }
        (None, Some(name)) => {
            let kind: PresetKind = name.parse()?;
            PlanarSystem::preset(
                kind,
                PresetParams {
                    beta: args.beta,
                    delta: args.delta,
                    omega: args.omega,
                },
            )?
        }
        _ => {
            return Err(CliError::config(
                "exactly one of --input and --preset is required",
            ))
        }
    };
    let orbit = if sys.preset.is_some() && !args.shoot && args.source.is_none() {
        preset_orbit(&sys, args.branch)?
    } else {
        let guess = match (&args.source, sys.preset) {
            (Some(s), _) => parse_point(s)?,
            (None, Some((PresetKind::Duffing1, _))) => [0.0, 0.0],
            (None, Some((PresetKind::Duffing2, _))) => [-args.branch as f64, 0.0],
            (None, None) => return Err(CliError::config("--source is required with --input")),
        };
        let to_guess = match (&args.target, sys.preset) {
            (Some(s), _) => parse_point(s)?,
            (None, Some((PresetKind::Duffing2, _))) => [args.branch as f64, 0.0],
            (None, _) => guess,
        };
        let from = refine_saddle(&sys, guess, TOL_EQ)?;
        let to = refine_saddle(&sys, to_guess, TOL_EQ)?;
        let opts = ShootOpts {
            branch: args.branch,
            ..ShootOpts::default()
        };
        shoot_separatrix(&sys, &from, &to, &opts)?
    };
    log::info!("orbit {} ({})", orbit.id(), orbit.convention());
    Ok((sys, orbit))
}

fn coeff_table(series: &MelnikovSeries) -> Vec<Value> {
    (0..=series.n as i32)
        .map(|j| {
            let c = series.coeff(j);
            json!({ "j": j, "re": c.re, "im": c.im, "abs": c.norm(), "err": series.err(j) })
        })
        .collect()
}

fn system_json(sys: &PlanarSystem, orbit: &Orbit) -> Value {
    let mut v = json!({
        "omega": sys.omega,
        "orbit": orbit.id(),
        "convention": orbit.convention(),
        "source": orbit.source.x,
        "target": orbit.target.x,
        "lambda_minus": orbit.lambda_minus(),
        "lambda_plus": orbit.lambda_plus(),
    });
    if let Some((kind, p)) = sys.preset {
        v["preset"] = json!(kind.name());
        v["params"] = json!(p);
    }
    v
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

pub fn cmd_certify(
    args: &SystemArgs,
    tol: &TolArgs,
    monodromy: bool,
    format: Format,
) -> CliResult<Output> {
    let (sys, orbit) = load(args)?;
    let series = melnikov_series(&orbit, &sys, tol.tol_coeff)?;
    let cert = certify_nonintegrability(&series, tol.tol_cert);
    let mut report = json!({
        "system": system_json(&sys, &orbit),
        "verdict": cert.verdict,
        "witness": cert.witness,
        "margin": cert.margin,
        "tol_cert": cert.tol_cert,
        "coefficients": coeff_table(&series),
    });
    if monodromy {
        let opts = VariationalOpts {
            tol_coeff: tol.tol_coeff,
            ..VariationalOpts::default()
        };
        let data = asymptotic_data(&orbit, &sys, cert.witness, &opts)?;
        let pair = monodromy_pair(&data);
        let m = MonodromyReport::new(&data, &pair, tol.tol_commutator);
        report["monodromy"] = json!({
            "ell": m.ell,
            "commutator_norm": m.commutator_norm,
            "verdict": m.verdict,
            "agrees": m.verdict == cert.verdict,
        });
    }
    let stdout = match format {
        Format::Json => pretty(&report),
        Format::Csv => {
            let mut s = String::from("j,re,im,abs,err\n");
            for j in 0..=series.n as i32 {
                let c = series.coeff(j);
                let _ = writeln!(
                    s,
                    "{j},{},{},{},{}",
                    num(c.re),
                    num(c.im),
                    num(c.norm()),
                    num(series.err(j))
                );
            }
            s
        }
    };
    Ok(Output {
        files: vec![("certify.json".into(), pretty(&report))],
        stdout,
    })
}

/// θ-grid CSV of `M(θ)`; zeros are interleaved as rows with `kind = zero`.
pub fn melnikov_csv(series: &MelnikovSeries, zeros: &[Zero], points: usize) -> String {
    let mut rows: Vec<(f64, f64, &str, Option<&Zero>)> = theta_grid(points)
        .into_iter()
        .map(|t| (t, eval_melnikov(series, t), "grid", None))
        .collect();
    for z in zeros {
        rows.push((
            z.theta,
            eval_melnikov(series, z.theta),
            if z.simple { "simple_zero" } else { "zero" },
            Some(z),
        ));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut s = String::from("theta,M_theta,kind,derivative\n");
    for (t, m, kind, z) in rows {
        match z {
            Some(z) => {
                let _ = writeln!(s, "{},{},{kind},{}", num(t), num(m), num(z.derivative));
            }
            None => {
                let _ = writeln!(s, "{},{},{kind},", num(t), num(m));
            }
        }
    }
    s
}

pub fn cmd_melnikov(
    args: &SystemArgs,
    tol: &TolArgs,
    points: usize,
    format: Format,
) -> CliResult<Output> {
    if points == 0 {
        return Err(CliError::config("--points must be positive"));
    }
    let (sys, orbit) = load(args)?;
    let series = melnikov_series(&orbit, &sys, tol.tol_coeff)?;
    let zeros = match simple_zeros(&series, tol.tol_simple) {
        Ok(z) => z,
        Err(Error::ConstantSeries) => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    let json_doc = series_to_json(&series) + "\n";
    let csv = melnikov_csv(&series, &zeros, points);
    let stdout = match format {
        Format::Json => json_doc.clone(),
        Format::Csv => csv.clone(),
    };
    Ok(Output {
        files: vec![
            ("melnikov.json".into(), json_doc),
            ("melnikov.csv".into(), csv),
        ],
        stdout,
    })
}

pub fn cmd_monodromy(
    args: &SystemArgs,
    tol: &TolArgs,
    ell: Option<i32>,
    continuation: Option<&str>,
) -> CliResult<Output> {
    let (sys, orbit) = load(args)?;
    let ell = match ell {
        Some(0) => return Err(CliError::config("--ell must be nonzero")),
        Some(l) => l,
        None => {
            certify_nonintegrability(&melnikov_series(&orbit, &sys, tol.tol_coeff)?, tol.tol_cert)
                .witness
        }
    };
    let opts = VariationalOpts {
        tol_coeff: tol.tol_coeff,
        ..VariationalOpts::default()
    };
    let data = asymptotic_data(&orbit, &sys, ell, &opts)?;
    let pair = monodromy_pair(&data);
    let report = MonodromyReport::new(&data, &pair, tol.tol_commutator);
    let mut v = serde_json::to_value(&report).expect("report serializes");
    if let Some(side) = continuation {
        let side = match side {
            "minus" => Side::Minus,
            "plus" => Side::Plus,
            other => {
                return Err(CliError::config(format!(
                    "--continuation must be minus or plus, got `{other}`"
                )))
            }
        };
        let c = monodromy_via_continuation(&sys, &orbit, ell, side, &ContinuationOpts::default())?;
        let closed = match side {
            Side::Minus => &pair.m_minus,
            Side::Plus => &pair.m_plus,
        };
        v["continuation"] = json!({
            "side": side.name(),
            "t0": c.t0,
            "delta_chi": [c.delta_chi.re, c.delta_chi.im],
            "matrix": splitmel::variational::matrix_entries(&c.matrix),
            "max_entry_difference": (c.matrix - closed).iter().map(|z| z.norm()).fold(0.0, f64::max),
        });
    }
    let body = pretty(&v);
    Ok(Output {
        files: vec![("monodromy.json".into(), body.clone())],
        stdout: body,
    })
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub max_abs_err: f64,
    pub max_abs_m: f64,
}

/// Slope of `log error` against `log ε` between the two smallest positive ε
/// with nonzero error.
pub fn fitted_order(rows: &[ConvergenceRow]) -> Option<f64> {
    let mut r: Vec<&ConvergenceRow> = rows
        .iter()
        .filter(|r| r.eps > 0.0 && r.max_abs_err > 0.0)
        .collect();
    r.sort_by(|a, b| a.eps.total_cmp(&b.eps));
    match r.as_slice() {
        [a, b, ..] => Some((b.max_abs_err / a.max_abs_err).ln() / (b.eps / a.eps).ln()),
        _ => None,
    }
}

pub fn cmd_splitting(
    args: &SystemArgs,
    tol: &TolArgs,
    eps: &str,
    points: usize,
    format: Format,
) -> CliResult<Output> {
    let eps_grid = parse_list(eps)?;
    if eps_grid.is_empty() {
        return Err(CliError::config("--eps grid is empty"));
    }
    if let Some(e) = eps_grid.iter().find(|e| **e < 0.0) {
        return Err(CliError::config(format!("ε must be nonnegative, got {e}")));
    }
    if points == 0 {
        return Err(CliError::config("--points must be positive"));
    }
    let (sys, orbit) = load(args)?;
    let series = melnikov_series(&orbit, &sys, tol.tol_coeff)?;
    let thetas = theta_grid(points);
    let mut files = Vec::new();
    let mut rows = Vec::new();
    let mut all_csv = String::new();
    for (k, &e) in eps_grid.iter().enumerate() {
        let profile =
            splitting_profile(&sys, &orbit, &series, e, &thetas, &SplittingOpts::default())?;
        let csv = profile_csv(&profile);
        let _ = writeln!(all_csv, "# eps = {}", num(e));
        all_csv.push_str(&csv);
        files.push((format!("splitting_{k}.csv"), csv));
        let max_abs_m = profile.iter().map(|p| p.m_theta.abs()).fold(0.0, f64::max);
        rows.push(ConvergenceRow {
            eps: e,
            max_abs_err: profile_error(&profile),
            max_abs_m,
        });
    }
    let summary = json!({
        "system": system_json(&sys, &orbit),
        "points": points,
        "files": files.iter().map(|f| f.0.clone()).collect::<Vec<_>>(),
        "convergence": rows,
        "fitted_order": fitted_order(&rows),
    });
    files.push(("splitting_summary.json".into(), pretty(&summary)));
    let stdout = match format {
        Format::Json => pretty(&summary),
        Format::Csv => all_csv,
    };
    Ok(Output { files, stdout })
}

/// `β/δ` above which the preset's Melnikov function has simple zeros.
pub fn zero_threshold(kind: PresetKind, omega: f64) -> f64 {
    match kind {
        PresetKind::Duffing1 => 2.0 * 2f64.sqrt() / (3.0 * PI * omega) * (PI * omega / 2.0).cosh(),
        PresetKind::Duffing2 => 2.0 / (3.0 * PI * omega) * (PI * omega / 2f64.sqrt()).sinh(),
    }
}

/// Threshold implied by the uncorrected duffing1 constants `−8δ` and `2πβ`, kept for comparison.
pub fn uncorrected_threshold(kind: PresetKind, omega: f64) -> f64 {
    match kind {
        PresetKind::Duffing1 => 4.0 / PI * (PI * omega / 2.0).cosh(),
        PresetKind::Duffing2 => zero_threshold(kind, omega),
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub beta: f64,
    pub delta: f64,
    pub omega: f64,
    pub verdict: Verdict,
    pub witness: i32,
    pub zero_existence_ratio: f64,
    pub has_simple_zeros: bool,
    pub beta_over_delta: f64,
    pub threshold: f64,
    pub uncorrected_threshold: f64,
    pub above_threshold: bool,
}

pub fn sweep_row(
    kind: PresetKind,
    p: PresetParams,
    branch: i32,
    tol: &TolArgs,
) -> CliResult<SweepRow> {
    let sys = PlanarSystem::preset(kind, p)?;
    let orbit = preset_orbit(&sys, branch)?;
    let series = melnikov_series(&orbit, &sys, tol.tol_coeff)?;
    let cert = certify_nonintegrability(&series, tol.tol_cert);
    let ratio = zero_existence_ratio(&series)?;
    let threshold = zero_threshold(kind, p.omega);
    let beta_over_delta = p.beta.abs() / p.delta.abs();
    Ok(SweepRow {
        beta: p.beta,
        delta: p.delta,
        omega: p.omega,
        verdict: cert.verdict,
        witness: cert.witness,
        zero_existence_ratio: ratio,
        has_simple_zeros: ratio < 1.0,
        beta_over_delta,
        threshold,
        uncorrected_threshold: uncorrected_threshold(kind, p.omega),
        above_threshold: beta_over_delta > threshold,
    })
}

fn num_or_word(v: f64) -> String {
    if v.is_finite() {
        num(v)
    } else if v > 0.0 {
        "inf".into()
    } else {
        "nan".into()
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(
        "beta,delta,omega,verdict,witness,zero_existence_ratio,has_simple_zeros,beta_over_delta,threshold,uncorrected_threshold,above_threshold\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            num(r.beta),
            num(r.delta),
            num(r.omega),
            r.verdict.as_str(),
            r.witness,
            num_or_word(r.zero_existence_ratio),
            r.has_simple_zeros,
            num_or_word(r.beta_over_delta),
            num(r.threshold),
            num(r.uncorrected_threshold),
            r.above_threshold
        );
    }
    s
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_sweep(
    preset: &str,
    betas: &str,
    deltas: &str,
    omegas: &str,
    branch: i32,
    tol: &TolArgs,
    format: Format,
) -> CliResult<Output> {
    let kind: PresetKind = preset.parse()?;
    let (b, d, w) = (parse_list(betas)?, parse_list(deltas)?, parse_list(omegas)?);
    if b.is_empty() || d.is_empty() || w.is_empty() {
        return Err(CliError::config("sweep grids must be nonempty"));
    }
    if branch != 1 && branch != -1 {
        return Err(CliError::config("branch must be 1 or -1"));
    }
    let mut grid = Vec::with_capacity(b.len() * d.len() * w.len());
    for &omega in &w {
        for &delta in &d {
            for &beta in &b {
                grid.push(PresetParams { beta, delta, omega });
            }
        }
    }
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&p| sweep_row(kind, p, branch, tol))
        .collect::<CliResult<Vec<_>>>()?;
    let csv = sweep_csv(&rows);
    let doc = json!({
        "preset": kind.name(),
        "branch": branch,
        "rows": rows.iter().map(|r| {
            let mut v = serde_json::to_value(r).expect("row serializes");
            // JSON has no infinity; spell non-finite values out.
            for (key, x) in [("zero_existence_ratio", r.zero_existence_ratio), ("beta_over_delta", r.beta_over_delta)] {
                if !x.is_finite() {
                    v[key] = json!(num_or_word(x));
                }
            }
            v
        }).collect::<Vec<_>>(),
    });
    let stdout = match format {
        Format::Json => pretty(&doc),
        Format::Csv => csv.clone(),
    };
    Ok(Output {
        files: vec![
            ("sweep.csv".into(), csv),
            ("sweep.json".into(), pretty(&doc)),
        ],
        stdout,
    })
}

pub fn cmd_orbit_dump(
    args: &SystemArgs,
    t_min: f64,
    t_max: f64,
    points: usize,
) -> CliResult<Output> {
    if points < 2 || !(t_max > t_min) {
        return Err(CliError::config("need --points ≥ 2 and --t-max > --t-min"));
    }
    let (_, orbit) = load(args)?;
    let times: Vec<f64> = (0..points)
        .map(|k| t_min + (t_max - t_min) * k as f64 / (points - 1) as f64)
        .collect();
    let csv = orbit_csv(&orbit, &times);
    Ok(Output {
        files: vec![("orbit.csv".into(), csv.clone())],
        stdout: csv,
    })
}
