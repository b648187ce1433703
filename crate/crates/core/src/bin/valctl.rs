use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use wassval::analytic::ScalarLinearPair;
use wassval::transport::SampleComplexityParams;
use wassval::valctl::{self, calc, Report, ValidationConfig};
use wassval::Error;

#[derive(Parser)]
#[command(name = "valctl", version, about = "Wasserstein model validation driver")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run propagation, distances and certificates from a config.
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// Directory of per-snapshot ensemble CSVs (sorted by name).
        #[arg(long)]
        data: Option<PathBuf>,
        /// Output directory for the report and series.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Closed-form and LP calculators; prints JSON.
    Calc {
        #[command(subcommand)]
        sub: CalcCmd,
    },
    /// Turn a report into plot-ready CSV series.
    Plotdata {
        /// Report JSON written by `validate`.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct EpsDelta {
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    delta: f64,
}

#[derive(Subcommand)]
enum CalcCmd {
    /// W2 between two ensemble CSVs via the transport LP.
    W2Lp {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        /// Write the plan triplets as CSV.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// 1-D W2 via quantiles; each side is an ensemble CSV or a family JSON.
    W2_1d {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
    },
    /// Gaussian closed form; covariances are row-major.
    W2Gauss {
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        m1: Vec<f64>,
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        cov1: Vec<f64>,
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        m2: Vec<f64>,
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        cov2: Vec<f64>,
    },
    /// W2 between Beta(alpha, beta) and Beta(beta, alpha).
    BetaW2 {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
    },
    /// Scalar linear (optionally affine) pair gap at time t.
    ScalarGap {
        #[arg(long, allow_negative_numbers = true)]
        a1: f64,
        #[arg(long, allow_negative_numbers = true)]
        c1: f64,
        #[arg(long, allow_negative_numbers = true)]
        a2: f64,
        #[arg(long, allow_negative_numbers = true)]
        c2: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        b1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        d1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        b2: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        d2: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        m10: f64,
        #[arg(long)]
        m20: f64,
        #[arg(long)]
        t: f64,
    },
    /// Discrete LTI gap and bounds for k = 0..=k-max; matrices row-major.
    LtiBounds {
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        a: Vec<f64>,
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        a_hat: Vec<f64>,
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        p0: Vec<f64>,
        #[arg(long)]
        k_max: u32,
    },
    /// Chernoff sample size for a PRVC.
    NChernoff(EpsDelta),
    /// Worst-case sample size for a PWVC.
    NWorstcase(EpsDelta),
    /// Samples for an eps-accurate empirical W2 estimate.
    NWass {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
    },
    /// Reachability invalidation for x' = -p x^3.
    Prajna {
        #[arg(long, num_args = 2, allow_negative_numbers = true)]
        x0: Vec<f64>,
        #[arg(long = "xT", num_args = 2, allow_negative_numbers = true)]
        xt: Vec<f64>,
        #[arg(long, num_args = 2)]
        p: Vec<f64>,
        #[arg(long = "T")]
        t: f64,
    },
}

fn pair(v: &[f64]) -> [f64; 2] {
    [v[0], v[1]]
}

fn run_calc(sub: CalcCmd) -> wassval::Result<Value> {
    match sub {
        CalcCmd::W2Lp { source, target, plan } => calc::calc_w2_lp(&source, &target, plan.as_deref()),
        CalcCmd::W2_1d { source, target } => calc::calc_w2_1d(&source, &target),
        CalcCmd::W2Gauss { m1, cov1, m2, cov2 } => calc::calc_w2_gauss(&m1, &cov1, &m2, &cov2),
        CalcCmd::BetaW2 { alpha, beta } => calc::calc_beta_w2(alpha, beta),
        CalcCmd::ScalarGap {
            a1,
            c1,
            a2,
            c2,
            b1,
            d1,
            b2,
            d2,
            m10,
            m20,
            t,
        } => {
            let p = ScalarLinearPair::new(a1, c1, a2, c2)?.with_affine(b1, d1, b2, d2);
            calc::calc_scalar_gap(&p, m10, m20, t)
        }
        CalcCmd::LtiBounds { a, a_hat, p0, k_max } => calc::calc_lti_bounds(&a, &a_hat, &p0, k_max),
        CalcCmd::NChernoff(e) => calc::calc_n_chernoff(e.eps, e.delta),
        CalcCmd::NWorstcase(e) => calc::calc_n_worstcase(e.eps, e.delta),
        CalcCmd::NWass { eps, delta, c, k } => calc::calc_n_wass(&SampleComplexityParams {
            epsilon: eps,
            delta,
            c,
            k,
        }),
        CalcCmd::Prajna { x0, xt, p, t } => calc::calc_prajna(pair(&x0), pair(&xt), pair(&p), t),
    }
}

fn fail(e: &Error) -> ExitCode {
    let msg = serde_json::json!({"error": {"code": e.code(), "message": e.to_string()}});
    eprintln!("{msg}");
    ExitCode::from(valctl::EXIT_ERROR as u8)
}

fn validate(config: &Path, data: Option<&Path>, out: Option<&Path>, seed: Option<u64>) -> wassval::Result<Report> {
    let mut cfg = ValidationConfig::load(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = valctl::run_validate(&cfg, data)?;
    match out {
        Some(dir) => {
            let path = valctl::write_report(&report, &cfg, dir)?;
            log::info!("report written to {}", path.display());
        }
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(report)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("WASSVAL_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not set thread count: {e}");
        }
    }
    match cli.cmd {
        Cmd::Validate { config, data, out, seed } => {
            match validate(&config, data.as_deref(), out.as_deref(), seed) {
                Ok(r) => {
                    for w in &r.warnings {
                        log::warn!("{}: {}", w.code, w.message);
                    }
                    if r.invalidated() {
                        ExitCode::from(valctl::EXIT_INVALIDATED as u8)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => fail(&e),
            }
        }
        Cmd::Calc { sub } => match run_calc(sub) {
            Ok(v) => {
                println!("{}", serde_json::to_string(&v).expect("json value"));
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Cmd::Plotdata { config, out } => {
            let res = std::fs::read_to_string(&config)
                .map_err(Error::from)
                .and_then(|t| serde_json::from_str::<Report>(&t).map_err(Error::from))
                .and_then(|r| valctl::emit_plot_data(&r, &out));
            match res {
                Ok((files, warnings)) => {
                    for w in &warnings {
                        log::warn!("{}: {}", w.code, w.message);
                    }
                    let v = serde_json::json!({
                        "files": files,
                        "warnings": warnings,
                    });
                    println!("{v}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    }
}
