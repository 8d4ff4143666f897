//! Command-line front-end: figure-data reproduction, witness evaluation,
//! twisting evolution, and Monte-Carlo sensitivity sweeps.
//!
//! Every command reads an optional JSON config file, applies flag overrides
//! (flags win), validates ranges, and writes plot-ready data files plus a
//! `<command>_summary.json` with the resolved config echoed for provenance.
//! Re-running a command with the same inputs produces byte-identical data
//! files; the only varying field is the `generated_at` timestamp confined
//! to the JSON summary.
//!
//! Exit codes: 0 success, 2 validation error, 3 I/O error.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use spinfisher::bayes::{
    find_p_opt, sensitivity_with_support, HeisenbergFit, PSweep, SensitivityPoint, TauRule,
    FOLDED_SUPPORT,
};
use spinfisher::dynamics::{
    chi2_oat_analytic, evolve_oat, twisted_coherent_state, xi2_oat_analytic, xi2_rotated_analytic,
};
use spinfisher::interferometer::{
    default_theta_grid, likelihood_table, substructure_width, SubstructureWidth,
};
use spinfisher::io::{self, fmt_csv_value, fmt_g17};
use spinfisher::rng;
use spinfisher::spinspace::{coherent_spin_state, Direction, Spin};
use spinfisher::witness::{witness_report, Frame, WitnessReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] spinfisher::Error),
}

impl CliError {
    /// Process exit code: 2 for anything the user can fix in the inputs,
    /// 3 for filesystem trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 3,
            CliError::Core(spinfisher::Error::Io(_)) => 3,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// File-level configuration; every field optional, flags override.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub n: Option<u32>,
    pub n_list: Option<Vec<u32>>,
    pub tau: Option<f64>,
    /// "inv_sqrt_n" or a fixed number as a string/float via `tau`.
    pub tau_rule: Option<String>,
    pub theta_true: Option<f64>,
    pub p: Option<u32>,
    pub p_list: Option<Vec<u32>>,
    /// Fixed total-resource values for the measurement-number sweep.
    pub n_t_list: Option<Vec<u64>>,
    pub trials: Option<u32>,
    pub seed: Option<u64>,
    pub theta_points: Option<usize>,
    pub tau_points: Option<usize>,
    pub tau_sqrt_n_max: Option<f64>,
    pub mu_list: Option<Vec<f64>>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

pub fn parse_config(bytes: &[u8]) -> Result<RunConfig> {
    serde_json::from_slice(bytes).map_err(|e| invalid(format!("config: {e}")))
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let bytes = std::fs::read(p).map_err(|source| CliError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            parse_config(&bytes)
        }
    }
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

#[derive(Debug, Parser)]
#[command(
    name = "spinfisher",
    about = "Collective-spin metrology: twisting curves, Fisher-information witnesses, \
             Mach-Zehnder likelihoods, and Bayesian phase-estimation sweeps",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config file; command-line flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// RNG seed (required for stochastic commands).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Data file format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Particle count.
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Twisting phase.
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Monte-Carlo trials per sensitivity point.
    #[arg(long, global = true)]
    pub trials: Option<u32>,
}

#[derive(Debug, Subcommand, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Closed-form twisting curves against τ√N.
    Fig1a,
    /// Bayesian sensitivity vs total particle number, with the
    /// measurement-number sweep.
    Fig1b,
    /// Mach-Zehnder likelihood tables and substructure widths.
    Fig2,
    /// Entanglement-usefulness report for a twisted state or a density file.
    Witness,
    /// One-axis-twisting evolution of the coherent input, written as a
    /// state file.
    Evolve,
    /// Sensitivity over an (N, p) grid.
    Sweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Fig1a => "fig1a",
            Command::Fig1b => "fig1b",
            Command::Fig2 => "fig2",
            Command::Witness => "witness",
            Command::Evolve => "evolve",
            Command::Sweep => "sweep",
        }
    }
}

// ---------------------------------------------------------------------------
// Resolved settings per command
// ---------------------------------------------------------------------------

/// Config after defaulting and validation; echoed into every output.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub command: String,
    pub n: u32,
    pub n_list: Vec<u32>,
    pub tau: Option<f64>,
    pub tau_rule: String,
    pub theta_true: f64,
    pub p: u32,
    pub p_list: Vec<u32>,
    pub n_t_list: Vec<u64>,
    pub trials: u32,
    pub seed: Option<u64>,
    pub theta_points: usize,
    pub tau_points: usize,
    pub tau_sqrt_n_max: f64,
    pub mu_list: Vec<f64>,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub format: Format,
}

const MAX_N_ANALYTIC: u32 = 10_000;
const MAX_N_FULL_STATE: u32 = 500;
const MAX_N_BAYES: u32 = 100;

fn resolve(cli: &Cli, file: RunConfig) -> Result<Resolved> {
    let command = cli.command;
    if let Some(cmd_in_file) = &file.command {
        if cmd_in_file != command.name() {
            return Err(invalid(format!(
                "config file is for command {cmd_in_file:?}, invoked {:?}",
                command.name()
            )));
        }
    }
    let n_default = match command {
        Command::Fig1a => 10_000,
        Command::Fig2 => 15,
        _ => 20,
    };
    let r = Resolved {
        command: command.name().to_string(),
        n: cli.n.or(file.n).unwrap_or(n_default),
        n_list: file.n_list.clone().unwrap_or_else(|| vec![10, 20, 40, 80]),
        tau: cli.tau.or(file.tau),
        tau_rule: file.tau_rule.clone().unwrap_or_else(|| "inv_sqrt_n".into()),
        theta_true: file.theta_true.unwrap_or(FRAC_PI_2),
        p: file.p.unwrap_or(20),
        p_list: file.p_list.clone().unwrap_or_else(|| (1..=100).collect()),
        n_t_list: file.n_t_list.clone().unwrap_or_else(|| vec![200, 400]),
        trials: cli.trials.or(file.trials).unwrap_or(500),
        seed: cli.seed.or(file.seed),
        theta_points: file.theta_points.unwrap_or(8192),
        tau_points: file.tau_points.unwrap_or(500),
        tau_sqrt_n_max: file.tau_sqrt_n_max.unwrap_or(5.0),
        mu_list: file.mu_list.clone().unwrap_or_default(),
        input: file.input.clone(),
        out: cli
            .out
            .clone()
            .or(file.out)
            .unwrap_or_else(|| PathBuf::from(".")),
        format: cli.format.or(file.format).unwrap_or(Format::Csv),
    };
    validate(command, &r)?;
    Ok(r)
}

fn validate(command: Command, r: &Resolved) -> Result<()> {
    let check_n = |n: u32, max: u32, what: &str| -> Result<()> {
        if n < 1 || n > max {
            return Err(invalid(format!(
                "N = {n} outside the supported range 1..={max} for {what}"
            )));
        }
        Ok(())
    };
    if let Some(tau) = r.tau {
        if !tau.is_finite() {
            return Err(invalid("tau must be finite"));
        }
    }
    if !(0.0..=PI).contains(&r.theta_true) {
        return Err(invalid("theta_true must lie in [0, π]"));
    }
    match command {
        Command::Fig1a => {
            check_n(r.n, MAX_N_ANALYTIC, "the analytic curves")?;
            if r.tau_points < 2 || r.tau_sqrt_n_max <= 0.0 {
                return Err(invalid("fig1a needs tau_points >= 2 and a positive range"));
            }
        }
        Command::Fig1b | Command::Sweep => {
            for &n in &r.n_list {
                check_n(n, MAX_N_BAYES, "Bayesian estimation")?;
            }
            if r.p_list.is_empty() || r.trials < 1 {
                return Err(invalid("need a non-empty p_list and trials >= 1"));
            }
            if r.seed.is_none() {
                return Err(invalid(format!(
                    "{} is stochastic: provide --seed or a seed in the config",
                    command.name()
                )));
            }
            if command == Command::Fig1b {
                for &n_t in &r.n_t_list {
                    if n_t < 1 {
                        return Err(invalid("n_t_list entries must be >= 1"));
                    }
                }
            }
        }
        Command::Fig2 => {
            check_n(r.n, MAX_N_FULL_STATE, "likelihood tables")?;
        }
        Command::Witness | Command::Evolve => {
            if r.input.is_none() {
                check_n(r.n, MAX_N_FULL_STATE, "full-state evolution")?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

struct OutputWriter {
    dir: PathBuf,
    format: Format,
    config_echo: Vec<(String, String)>,
    files: Vec<PathBuf>,
}

impl OutputWriter {
    fn new(r: &Resolved) -> Result<Self> {
        std::fs::create_dir_all(&r.out).map_err(|source| CliError::Io {
            path: r.out.clone(),
            source,
        })?;
        let echo_json = serde_json::to_value(r).expect("resolved config serializes");
        let mut config_echo: Vec<(String, String)> = echo_json
            .as_object()
            .unwrap()
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect();
        config_echo.sort();
        Ok(Self {
            dir: r.out.clone(),
            format: r.format,
            config_echo,
            files: Vec::new(),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.path(name);
        std::fs::write(&path, bytes).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.files.push(path.clone());
        Ok(path)
    }

    /// Tabular data: CSV with a `# key = value` config preamble, or a JSON
    /// array of row objects, depending on the configured format.
    fn write_table(
        &mut self,
        stem: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<PathBuf> {
        match self.format {
            Format::Csv => {
                let mut buf = Vec::new();
                for (k, v) in &self.config_echo {
                    writeln!(buf, "# {k} = {v}").unwrap();
                }
                writeln!(buf, "{}", header.join(",")).unwrap();
                for row in rows {
                    writeln!(buf, "{}", row.join(",")).unwrap();
                }
                self.write_bytes(&format!("{stem}.csv"), &buf)
            }
            Format::Json => {
                let objects: Vec<serde_json::Map<String, serde_json::Value>> = rows
                    .iter()
                    .map(|row| {
                        header
                            .iter()
                            .zip(row)
                            .map(|(k, v)| {
                                let value = v
                                    .parse::<f64>()
                                    .ok()
                                    .filter(|x| x.is_finite())
                                    .map(|x| serde_json::json!(x))
                                    .unwrap_or_else(|| serde_json::json!(v));
                                ((*k).to_string(), value)
                            })
                            .collect()
                    })
                    .collect();
                let text = serde_json::to_string_pretty(&objects).unwrap();
                self.write_bytes(&format!("{stem}.json"), text.as_bytes())
            }
        }
    }

    fn write_summary(
        &mut self,
        command: &str,
        resolved: &Resolved,
        results: serde_json::Value,
    ) -> Result<PathBuf> {
        let summary = serde_json::json!({
            "command": command,
            "generated_at": chrono::Utc::now().to_rfc3339(),
            "config": resolved,
            "results": results,
        });
        let text = serde_json::to_string_pretty(&summary).unwrap();
        self.write_bytes(&format!("{command}_summary.json"), text.as_bytes())
    }
}

fn sensitivity_row(pt: &SensitivityPoint) -> Vec<String> {
    vec![
        pt.particles.to_string(),
        pt.p.to_string(),
        pt.total_particles.to_string(),
        pt.trials.to_string(),
        fmt_g17(pt.tau),
        fmt_g17(pt.delta_theta),
        fmt_g17(pt.stderr),
        fmt_g17(pt.credible_halfwidth),
    ]
}

const SENSITIVITY_HEADER: [&str; 8] = [
    "N",
    "p",
    "N_T",
    "trials",
    "tau",
    "delta_theta",
    "stderr",
    "credible_halfwidth",
];

fn tau_rule_of(r: &Resolved) -> Result<TauRule> {
    if let Some(tau) = r.tau {
        return Ok(TauRule::Fixed(tau));
    }
    match r.tau_rule.as_str() {
        "inv_sqrt_n" => Ok(TauRule::InverseSqrtN),
        other => other
            .parse::<f64>()
            .map(TauRule::Fixed)
            .map_err(|_| invalid(format!("unknown tau rule {other:?}"))),
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_fig1a(r: &Resolved, w: &mut OutputWriter) -> Result<serde_json::Value> {
    let n = r.n;
    let sqrt_n = f64::from(n).sqrt();
    let mut rows = Vec::with_capacity(r.tau_points);
    let mut min_rotated = f64::INFINITY;
    let mut min_rotated_tau = 0.0;
    for k in 0..r.tau_points {
        let x = r.tau_sqrt_n_max * k as f64 / (r.tau_points - 1) as f64;
        let tau = x / sqrt_n;
        let xi2_unrot = xi2_oat_analytic(n, tau)?;
        let chi2 = chi2_oat_analytic(n, tau)?;
        let xi2_rot = if tau < FRAC_PI_2 {
            xi2_rotated_analytic(n, tau)?
        } else {
            f64::INFINITY
        };
        if xi2_rot < min_rotated {
            min_rotated = xi2_rot;
            min_rotated_tau = tau;
        }
        rows.push(vec![
            fmt_g17(x),
            fmt_csv_value(xi2_unrot),
            fmt_csv_value(chi2),
            fmt_csv_value(xi2_rot),
        ]);
    }
    w.write_table(
        "fig1a",
        &["tau_sqrt_n", "xi2_unrotated", "chi2", "xi2_rotated"],
        &rows,
    )?;
    Ok(serde_json::json!({
        "rows": rows.len(),
        "xi2_rotated_min": min_rotated,
        "xi2_rotated_min_tau": min_rotated_tau,
    }))
}

fn folded_sensitivity(
    n: u32,
    tau: f64,
    theta_true: f64,
    p: u32,
    trials: u32,
    seed: u64,
) -> Result<SensitivityPoint> {
    Ok(sensitivity_with_support(
        n, tau, theta_true, p, trials, seed, FOLDED_SUPPORT,
    )?)
}

fn cmd_fig1b(r: &Resolved, w: &mut OutputWriter) -> Result<serde_json::Value> {
    let seed = r.seed.expect("validated");
    let rule = tau_rule_of(r)?;

    // Measurement-number sweeps at fixed total resources.
    let mut inset_rows = Vec::new();
    let mut p_opts = Vec::new();
    let mut last_sweep: Option<PSweep> = None;
    for &n_t in &r.n_t_list {
        let mut points = Vec::new();
        let mut skipped = Vec::new();
        for &p in &r.p_list {
            if p == 0 || n_t % u64::from(p) != 0 || n_t / u64::from(p) > u64::from(MAX_N_BAYES) {
                skipped.push(p);
                continue;
            }
            let n = (n_t / u64::from(p)) as u32;
            points.push(folded_sensitivity(
                n,
                rule.tau(n),
                r.theta_true,
                p,
                r.trials,
                rng::mix(seed, rng::mix(n_t, u64::from(p))),
            )?);
        }
        if points.is_empty() {
            return Err(invalid(format!("no admissible p for N_T = {n_t}")));
        }
        let sweep = PSweep {
            total_particles: n_t,
            points,
            skipped,
        };
        for pt in &sweep.points {
            inset_rows.push(sensitivity_row(pt));
        }
        p_opts.push(serde_json::json!({
            "N_T": n_t,
            "p_opt": find_p_opt(&sweep),
            "skipped_p": sweep.skipped,
        }));
        last_sweep = Some(sweep);
    }
    w.write_table("fig1b_inset", &SENSITIVITY_HEADER, &inset_rows)?;
    let p_opt = find_p_opt(last_sweep.as_ref().expect("at least one N_T"));

    // Main curve at the optimal measurement number.
    let mut points = Vec::new();
    for &n in &r.n_list {
        points.push(folded_sensitivity(
            n,
            rule.tau(n),
            r.theta_true,
            p_opt,
            r.trials,
            rng::mix(seed, 77_000 + u64::from(n)),
        )?);
    }
    let fit = fit_points(&points);
    let mut main_rows = Vec::new();
    for pt in &points {
        let n_t = pt.total_particles as f64;
        let mut row = sensitivity_row(pt);
        row.push(fmt_g17(1.0 / n_t.sqrt()));
        row.push(fmt_g17(fit.constant / n_t));
        main_rows.push(row);
    }
    let mut header: Vec<&str> = SENSITIVITY_HEADER.to_vec();
    header.push("shot_noise");
    header.push("heisenberg_fit");
    w.write_table("fig1b_main", &header, &main_rows)?;

    Ok(serde_json::json!({
        "slope": fit.slope,
        "intercept": fit.intercept,
        "constant": fit.constant,
        "p_opt": p_opt,
        "sweeps": p_opts,
        "estimation_support": ["0", "pi/2"],
    }))
}

fn fit_points(points: &[SensitivityPoint]) -> HeisenbergFit {
    let xs: Vec<f64> = points
        .iter()
        .map(|p| (p.total_particles as f64).ln())
        .collect();
    let ys: Vec<f64> = points.iter().map(|p| p.delta_theta.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    let intercept = my - slope * mx;
    let constant = (ys.iter().zip(&xs).map(|(y, x)| y + x).sum::<f64>() / n).exp();
    HeisenbergFit {
        slope,
        intercept,
        constant,
        points: points.to_vec(),
    }
}

fn cmd_fig2(r: &Resolved, w: &mut OutputWriter) -> Result<serde_json::Value> {
    let spin = Spin::from_particles(r.n)?;
    let grid = if r.theta_points == 8192 {
        default_theta_grid(r.n)
    } else {
        spinfisher::interferometer::uniform_grid(r.theta_points)
    };
    let slices: Vec<(f64, &str, Vec<f64>)> = vec![
        (0.0, "tau_0", default_slices(spin, 0.0, &r.mu_list)),
        (FRAC_PI_4, "tau_pi4", default_slices(spin, FRAC_PI_4, &r.mu_list)),
        (FRAC_PI_2, "tau_pi2", default_slices(spin, FRAC_PI_2, &r.mu_list)),
    ];
    let mut width_rows = Vec::new();
    let mut width_report = Vec::new();
    for (tau, tag, mus) in &slices {
        let table = likelihood_table(spin, *tau, &grid)?;
        let mut buf = Vec::new();
        for (k, v) in &w.config_echo {
            writeln!(buf, "# {k} = {v}").unwrap();
        }
        table.write_csv(&mut buf)?;
        w.write_bytes(&format!("fig2_{tag}.csv"), &buf)?;
        for &mu in mus {
            let sw: SubstructureWidth = substructure_width(&table, mu)?;
            width_rows.push(vec![
                fmt_g17(*tau),
                mu.to_string(),
                fmt_g17(sw.width),
                format!("{:?}", sw.kind),
                sw.peaks.to_string(),
            ]);
            width_report.push(serde_json::json!({
                "tau": tau,
                "mu": mu,
                "width": sw.width,
                "kind": format!("{:?}", sw.kind),
                "peaks": sw.peaks,
            }));
        }
    }
    w.write_table(
        "fig2_widths",
        &["tau", "mu", "width", "kind", "peaks"],
        &width_rows,
    )?;
    Ok(serde_json::json!({ "widths": width_report, "theta_points": grid.len() }))
}

/// Fig-2 default μ slices: the figure's values at N = 15, the analogous
/// `μ = j` / `μ ≈ j/2` picks elsewhere.
fn default_slices(spin: Spin, tau: f64, override_list: &[f64]) -> Vec<f64> {
    if !override_list.is_empty() {
        return override_list.to_vec();
    }
    if spin.particles() == 15 {
        if tau == 0.0 {
            return vec![7.5];
        }
        if tau == FRAC_PI_4 {
            return vec![2.5];
        }
        return vec![3.5];
    }
    let j = spin.j();
    if tau == 0.0 {
        vec![j]
    } else {
        let half = (j / 2.0).floor() + if spin.particles() % 2 == 1 { 0.5 } else { 0.0 };
        vec![half]
    }
}

fn cmd_witness(r: &Resolved, w: &mut OutputWriter) -> Result<(serde_json::Value, bool)> {
    let report: WitnessReport = match &r.input {
        Some(path) => {
            let rho = io::read_density(path)?;
            witness_report(&rho, Direction::Y, &Frame::xyz())
        }
        None => {
            let tau = r.tau.unwrap_or(0.0);
            let state = twisted_coherent_state(r.n, tau)?;
            witness_report(&state, Direction::Y, &Frame::xyz())
        }
    };
    let value = serde_json::to_value(&report).expect("report serializes");
    w.write_summary("witness", r, value.clone())?;
    Ok((value, report.entangled_useful))
}

fn cmd_evolve(r: &Resolved, w: &mut OutputWriter) -> Result<serde_json::Value> {
    let tau = r.tau.unwrap_or(0.0);
    let state = match &r.input {
        Some(path) => evolve_oat(&io::read_state(path)?, tau),
        None => {
            let spin = Spin::from_particles(r.n)?;
            evolve_oat(&coherent_spin_state(spin, Direction::X), tau)
        }
    };
    let json = io::state_to_json(&state);
    w.write_bytes("evolved_state.json", json.as_bytes())?;
    Ok(serde_json::json!({
        "n": state.spin().particles(),
        "tau": tau,
        "file": "evolved_state.json",
    }))
}

fn cmd_sweep(r: &Resolved, w: &mut OutputWriter) -> Result<serde_json::Value> {
    let seed = r.seed.expect("validated");
    let rule = tau_rule_of(r)?;
    let mut rows = Vec::new();
    let mut best: Option<SensitivityPoint> = None;
    for &n in &r.n_list {
        for &p in &r.p_list {
            let pt = folded_sensitivity(
                n,
                rule.tau(n),
                r.theta_true,
                p,
                r.trials,
                rng::mix(seed, u64::from(n) << 20 | u64::from(p)),
            )?;
            if best
                .as_ref()
                .map(|b| pt.delta_theta < b.delta_theta)
                .unwrap_or(true)
            {
                best = Some(pt);
            }
            rows.push(sensitivity_row(&pt));
        }
    }
    w.write_table("sweep", &SENSITIVITY_HEADER, &rows)?;
    let best = best.expect("non-empty sweep");
    Ok(serde_json::json!({
        "cells": rows.len(),
        "best": { "N": best.particles, "p": best.p, "delta_theta": best.delta_theta },
    }))
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Runs a parsed command line; returns the summary JSON that was written.
pub fn run(cli: &Cli) -> Result<serde_json::Value> {
    let file = load_config(cli.config.as_deref())?;
    let resolved = resolve(cli, file)?;
    let mut writer = OutputWriter::new(&resolved)?;
    let results = match cli.command {
        Command::Fig1a => cmd_fig1a(&resolved, &mut writer)?,
        Command::Fig1b => cmd_fig1b(&resolved, &mut writer)?,
        Command::Fig2 => cmd_fig2(&resolved, &mut writer)?,
        Command::Witness => {
            let (value, useful) = cmd_witness(&resolved, &mut writer)?;
            println!("entangled_useful: {useful}");
            return Ok(value);
        }
        Command::Evolve => cmd_evolve(&resolved, &mut writer)?,
        Command::Sweep => cmd_sweep(&resolved, &mut writer)?,
    };
    writer.write_summary(&resolved.command, &resolved, results.clone())?;
    Ok(results)
}
