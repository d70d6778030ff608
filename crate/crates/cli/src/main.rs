use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use nlkg_core::coeffs::{CoeffTable, cosine_coeff_c, cosine_coeff_ctilde};
use nlkg_core::config::{load_config, RunConfig};
use nlkg_core::evolve::track::InitialData;
use nlkg_core::evolve::{evolve_and_track, fixed_point_iterate, EvolutionConfig, YangFeldmanConfig};
use nlkg_core::final_data::{scattering_data, sup_weighted_rho, y_norm, ScatteringData};
use nlkg_core::fit::log_space;
use nlkg_core::profiles::{ProfileKind, Profiles};
use nlkg_core::quad::QuadOptions;
use nlkg_core::residual::lemmas::verify_pointwise_lemmas;
use nlkg_core::residual::{residual_decay_scan, ResidualKind};
use nlkg_core::suite::{self, exponent_acceptable, file_stem, Suite};
use serde_json::json;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Modified-scattering profiles, residual checks and spectral evolution for
/// (□+1)u = λ₁|u|^{2/3}u + λ₂|u|^{5/3}.
#[derive(Parser)]
#[command(name = "nlkg", version)]
struct Cli {
    /// TOML run configuration; defaults apply to every missing key.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir` from the config).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for the parallel parts (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Accepted for scripts; every computation is deterministic and uses no random numbers.
    #[arg(long, global = true)]
    seedless: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Coeffs,
    Lemmas,
    Residual,
    Evolve,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    /// (A, ∂_t A) at t_start.
    A,
    /// The linear solution of the final state.
    Linear,
}

#[derive(Subcommand)]
enum Command {
    /// Cosine coefficients c_n, c̃_n and correction amplitudes d_n.
    Coeffs {
        #[arg(long)]
        n_max: Option<u32>,
    },
    /// Scattering data ρ, β on a |μ| grid, with sup ⟨μ⟩^{3/2}ρ and the data norm.
    Data {
        #[arg(long, default_value_t = 10.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// One profile sampled on a radial grid at time t.
    Profile {
        /// uap, uap_free, uap_tilde, v_ap_tilde, A, or v<n> for a single mode (e.g. v3).
        #[arg(long, default_value = "A")]
        kind: String,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1001)]
        points: usize,
    },
    /// Light-cone norm of a residual over a log-spaced time grid, with a power-law fit.
    Residual {
        /// uap_tilde_vs_Nr, uap_tilde_only, A_full, or vn_vs_Nn(n).
        #[arg(long)]
        kind: String,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Report the fit with a log t factor instead of the plain one.
        #[arg(long)]
        with_log: bool,
    },
    /// Pointwise inequality sweep over (s, |μ|).
    Lemmas {
        /// Exit with failure status if any inequality fails.
        #[arg(long)]
        check: bool,
    },
    /// Spectral evolution from t_start to t_end, tracking the distance to u_ap.
    Evolve {
        #[arg(long)]
        t_start: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        modes: Option<usize>,
        #[arg(long)]
        radius: Option<f64>,
        /// Also measure the distance to the profile without phase correction.
        #[arg(long)]
        uncorrected_baseline: bool,
        #[arg(long, value_enum, default_value = "a")]
        initial: InitArg,
    },
    /// Yang-Feldman fixed-point iteration for v = u − A.
    YangFeldman {
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Acceptance criteria with a JSON verdict; exit status 0 iff every executed criterion passes.
    Suite {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
}

fn parse_kind(s: &str) -> Result<ProfileKind> {
    Ok(match s {
        "uap" => ProfileKind::Uap,
        "uap_free" => ProfileKind::UapFree,
        "uap_tilde" => ProfileKind::UapTilde,
        "v_ap_tilde" => ProfileKind::VapTilde,
        "A" | "a" => ProfileKind::A,
        _ => match s.strip_prefix('v').and_then(|n| n.parse().ok()) {
            Some(n) => ProfileKind::VMode(n),
            None => bail!("unknown profile kind {s:?}"),
        },
    })
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("thread pool")?;
    }
    let mut cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = cli.output {
        cfg.output_dir = o;
    }
    let state = cfg.final_state()?;
    let profiles = || Profiles::new(scattering_data(&state), cfg.profile.clone());

    match cli.command {
        Command::Coeffs { n_max } => {
            let n_max = n_max.unwrap_or(cfg.profile.n_max);
            let table = CoeffTable::new(n_max, cfg.profile.lambda1, cfg.profile.lambda2);
            let mut csv = String::from("n,c_n,c_tilde_n,d_n\n");
            for n in 0..=n_max {
                let d = if n % 2 == 1 && n >= 3 { table.d(n)? } else { 0.0 };
                writeln!(csv, "{n},{:e},{:e},{:e}", cosine_coeff_c(n), cosine_coeff_ctilde(n), d)?;
            }
            let dir = prepare(&cfg)?;
            write(&dir, "coeffs.csv", &csv)?;
            let summary = json!({"n_max": n_max, "series_tail_bound": table.series_tail_bound()});
            write(&dir, "coeffs.json", &serde_json::to_string_pretty(&summary)?)?;
            println!("{summary}");
        }
        Command::Data { mu_max, points } => {
            let sd = scattering_data(&state);
            let mut csv = String::from("mu,rho,beta,weighted_rho\n");
            for mu in log_space(1.0, mu_max + 1.0, points.max(2)).into_iter().map(|x| x - 1.0) {
                writeln!(csv, "{mu:e},{:e},{:e},{:e}", sd.rho(mu), sd.beta(mu), sd.weighted_rho(mu))?;
            }
            let summary = json!({
                "sup_weighted_rho": sup_weighted_rho(&sd),
                "y_norm": y_norm(&state, QuadOptions::default())?,
                "state": state,
            });
            let dir = prepare(&cfg)?;
            write(&dir, "data.csv", &csv)?;
            write(&dir, "data.json", &serde_json::to_string_pretty(&summary)?)?;
            println!("{summary}");
        }
        Command::Profile { kind, t, points } => {
            let k = parse_kind(&kind)?;
            let p = profiles()?;
            let mut csv = String::from("r,value\n");
            for i in 0..points {
                let r = t * i as f64 / (points.max(2) - 1) as f64;
                writeln!(csv, "{r:e},{:e}", p.eval(k, t, r))?;
            }
            let dir = prepare(&cfg)?;
            write(&dir, &format!("profile_{kind}.csv"), &csv)?;
        }
        Command::Residual { kind, t_min, t_max, points, with_log } => {
            let Some(k) = ResidualKind::parse(&kind) else { bail!("unknown residual kind {kind:?}") };
            let r = &cfg.residual;
            let times = log_space(t_min.unwrap_or(r.t_min), t_max.unwrap_or(r.t_max), points.unwrap_or(r.points));
            let p = Profiles::new(scattering_data(&state.scaled(r.data_scale)), cfg.profile.clone())?;
            let rep = residual_decay_scan(&p, k, &times, r.derivatives)?;
            let fit = if with_log { rep.log_corrected } else { rep.plain };
            let (exponent, amplitude, r2) = fit.map(|f| (f.exponent, f.amplitude, f.r_squared)).unwrap_or((f64::NAN, 0.0, 0.0));
            let passed = rep.degenerate() || (r2 >= 0.98 && exponent_acceptable(k, exponent));
            let mut csv = String::from("t,norm\n");
            for (t, n) in rep.times.iter().zip(&rep.norms) {
                writeln!(csv, "{t:e},{n:e}")?;
            }
            let stem = format!("residual_{}", file_stem(&rep.kind));
            let summary = json!({"kind": rep.kind, "exponent": exponent, "amplitude": amplitude, "r_squared": r2, "with_log": with_log, "passed": passed});
            let dir = prepare(&cfg)?;
            write(&dir, &format!("{stem}.csv"), &csv)?;
            write(&dir, &format!("{stem}.json"), &serde_json::to_string_pretty(&summary)?)?;
            println!("{summary}");
            return Ok(passed);
        }
        Command::Lemmas { check } => {
            let mut all = vec![];
            let mut ok = true;
            for &target in &cfg.lemmas.targets {
                let sd = scattering_data(&suite::rescaled_to(&state, target));
                for rep in verify_pointwise_lemmas(&sd, cfg.profile.lambda1, &cfg.lemmas.grid)? {
                    ok &= rep.passed();
                    println!("{}", json!({"sup_weighted_rho": target, "report": rep, "passed": rep.passed()}));
                    all.push(json!({"sup_weighted_rho": target, "report": rep}));
                }
            }
            let dir = prepare(&cfg)?;
            write(&dir, "lemmas.json", &serde_json::to_string_pretty(&all)?)?;
            return Ok(!check || ok);
        }
        Command::Evolve { t_start, t_end, dt, modes, radius, uncorrected_baseline, initial } => {
            let d = &cfg.evolve;
            let evo = EvolutionConfig {
                t_start: t_start.unwrap_or(d.t_start),
                t_end: t_end.unwrap_or(d.t_end),
                dt: dt.unwrap_or(d.dt),
                modes: modes.unwrap_or(d.modes),
                radius: radius.unwrap_or(d.radius),
                uncorrected_baseline: uncorrected_baseline || d.uncorrected_baseline,
                ..d.clone()
            };
            let init = match initial {
                InitArg::A => InitialData::ProfileA,
                InitArg::Linear => InitialData::LinearFinalState { state },
            };
            let rep = evolve_and_track(&profiles()?, &evo, &init)?;
            let mut csv = String::from("t,err_l2,err_h_half,err_l2_uncorrected,energy\n");
            for i in 0..rep.times.len() {
                let unc = rep.err_l2_uncorrected.as_ref().map(|u| format!("{:e}", u[i])).unwrap_or_default();
                writeln!(csv, "{:e},{:e},{:e},{unc},{:e}", rep.times[i], rep.err_l2[i], rep.err_h_half[i], rep.energy[i])?;
            }
            let summary = json!({
                "fitted_gamma": rep.fitted_gamma,
                "gamma_r_squared": rep.gamma_r_squared,
                "max_energy_drift": rep.max_energy_drift,
                "metric_mismatch": rep.metric_mismatch,
                "final_err_l2": rep.err_l2.last(),
                "final_err_l2_uncorrected": rep.err_l2_uncorrected.as_ref().and_then(|u| u.last()),
            });
            let dir = prepare(&cfg)?;
            write(&dir, "evolve.csv", &csv)?;
            write(&dir, "evolve.json", &serde_json::to_string_pretty(&summary)?)?;
            println!("{summary}");
        }
        Command::YangFeldman { iters } => {
            let yf = YangFeldmanConfig { iterations: iters.unwrap_or(cfg.yang_feldman.iterations), ..cfg.yang_feldman.clone() };
            let rep = fixed_point_iterate(&profiles()?, &yf)?;
            let mut csv = String::from("k,d_k,ratio\n");
            for (k, d) in rep.d.iter().enumerate() {
                let r = if k == 0 { String::new() } else { format!("{:e}", rep.ratios[k - 1]) };
                writeln!(csv, "{k},{d:e},{r}")?;
            }
            let dir = prepare(&cfg)?;
            write(&dir, "yang_feldman.csv", &csv)?;
            write(&dir, "yang_feldman.json", &serde_json::to_string_pretty(&rep)?)?;
            println!("{}", serde_json::to_string(&rep)?);
            return Ok(rep.contracted);
        }
        Command::Suite { suite: which } => {
            let which = match which {
                SuiteArg::Coeffs => Suite::Coeffs,
                SuiteArg::Lemmas => Suite::Lemmas,
                SuiteArg::Residual => Suite::Residual,
                SuiteArg::Evolve => Suite::Evolve,
                SuiteArg::All => Suite::All,
            };
            let report = suite::run_suite(&cfg, which)?;
            let dir = prepare(&cfg)?;
            suite::write_reports(&report, &dir, &cfg.emit)?;
            for o in &report.outcomes {
                println!("{}", o.line());
            }
            return Ok(report.all_passed());
        }
    }
    Ok(true)
}

/// Creates the output directory and writes the effective configuration into it.
fn prepare(cfg: &RunConfig) -> Result<PathBuf> {
    cfg.write_echo()?;
    Ok(cfg.output_dir.clone())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
