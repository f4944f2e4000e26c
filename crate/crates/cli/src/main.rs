use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use matchlab::family::{read_edge_list, write_edge_list};
use matchlab::graph::{f_bound, max_nu_subgraph};
use matchlab::harness::campaign::{run_campaign, CampaignConfig};
use matchlab::oracle::{max_family_nu_le, theorem_verdict};
use matchlab::regime::{prop23_diagnostics, regime_report, RegimeInputs};
use matchlab::resilience::{branching_cover, fan_cover, greedy_decompose, proof_decompose};
use matchlab::sampler::{mix_seed, sample_kp, SampleSpec};
use matchlab::{Error, Vertex};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_FLOOR: u8 = 3;

#[derive(Parser)]
#[command(name = "matchlab", version, about = "Matchings and covers in random hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoverAlg {
    Fan,
    Branch,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the binomial random k-graph K_p.
    Sample {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Write the edge list here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest subfamily with matching number at most s.
    Oracle {
        #[arg(long)]
        s: usize,
        /// Emit the full trivial/non-trivial verdict.
        #[arg(long)]
        verdict: bool,
        file: PathBuf,
    },
    /// Cover basis for a resilient family.
    Cover {
        #[arg(long, value_enum)]
        alg: CoverAlg,
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Comma-separated vertex set every edge of the family meets.
        #[arg(long, value_delimiter = ',')]
        meet: Option<Vec<Vertex>>,
        file: PathBuf,
    },
    /// Greedy decomposition into resilient pieces.
    Decompose {
        #[arg(long)]
        t: usize,
        file: PathBuf,
    },
    /// Star / non-trivial part certificate.
    Certify {
        /// Comma-separated vertices to delete first.
        #[arg(long, value_delimiter = ',', default_value = "")]
        avoid: Vec<String>,
        file: PathBuf,
    },
    /// Largest subgraph of G(n,p) with matching number at most s.
    K2 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u32,
        #[arg(long, default_value_t = 0.3)]
        epsilon: f64,
        /// Also write per-trial rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Use the generic oracle when the partition search refuses small n.
        #[arg(long)]
        force_oracle: bool,
    },
    /// Threshold conditions at given parameters.
    Regime {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Union-bound numbers for the sparse non-trivial regime.
    Diag {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        p: f64,
    },
    /// Run a Monte Carlo campaign from a JSON config.
    Campaign {
        #[arg(long)]
        config: PathBuf,
    },
}

fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn print(value: &impl Serialize) -> Result<()> {
    emit(&format!("{}\n", serde_json::to_string_pretty(value)?))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Sample {
            n,
            k,
            p,
            seed,
            trial,
            out,
        } => {
            let f = sample_kp(&SampleSpec {
                n,
                k,
                p,
                seed,
                trial_index: trial,
            })?;
            let text = write_edge_list(&f);
            match out {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => emit(&text)?,
            }
        }
        Command::Oracle { s, verdict, file } => {
            let f = read_edge_list(&file)?;
            if verdict {
                print(&theorem_verdict(&f, s)?)?;
            } else {
                let (size, family) = max_family_nu_le(&f, s)?;
                print(&json!({ "s": s, "size": size, "family": family }))?;
            }
        }
        Command::Cover { alg, t, meet, file } => {
            let f = read_edge_list(&file)?;
            let basis = match alg {
                CoverAlg::Fan => fan_cover(&f)?,
                CoverAlg::Branch => branching_cover(&f, t, meet.as_deref())?,
            };
            print(&basis)?;
        }
        Command::Decompose { t, file } => {
            print(&greedy_decompose(&read_edge_list(&file)?, t)?)?;
        }
        Command::Certify { avoid, file } => {
            let avoid = avoid
                .iter()
                .filter(|v| !v.trim().is_empty())
                .map(|v| v.trim().parse::<Vertex>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .context("--avoid expects comma-separated vertices")?;
            print(&proof_decompose(&read_edge_list(&file)?, &avoid)?)?;
        }
        Command::K2 {
            n,
            s,
            p,
            seed,
            trials,
            epsilon,
            csv,
            force_oracle,
        } => return k2(n, s, p, seed, trials, epsilon, csv, force_oracle),
        Command::Regime { n, k, s, t, eps, p } => {
            print(&regime_report(RegimeInputs { n, k, s, t, eps, p })?)?;
        }
        Command::Diag { n, k, s, p } => print(&prop23_diagnostics(n, k, s, p)?)?,
        Command::Campaign { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            let cfg = CampaignConfig::from_json(&text)?;
            let summary = run_campaign(&cfg)?;
            print(&summary)?;
            if !summary.all_floors_met {
                return Ok(EXIT_FLOOR);
            }
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct K2Row {
    n: u32,
    s: usize,
    p: f64,
    epsilon: f64,
    trial: u32,
    edges: usize,
    x: usize,
    f: u64,
    lower: f64,
    upper: f64,
    within: bool,
    method: &'static str,
}

#[allow(clippy::too_many_arguments)]
fn k2(
    n: u32,
    s: usize,
    p: f64,
    seed: u64,
    trials: u32,
    epsilon: f64,
    csv: Option<PathBuf>,
    force_oracle: bool,
) -> Result<u8> {
    let f = f_bound(n as u64, s as u64);
    let mean = p * f as f64;
    let (lower, upper) = ((1.0 - epsilon) * mean, (1.0 + epsilon) * mean);
    let small = (n as usize) < 2 * s + 2;
    let mut rows = Vec::new();
    for trial in 0..trials {
        let g = sample_kp(&SampleSpec {
            n,
            k: 2,
            p,
            seed: mix_seed(seed, 0),
            trial_index: trial as u64,
        })?;
        let (x, method) = if small && force_oracle {
            (max_family_nu_le(&g, s)?.0, "oracle")
        } else {
            (max_nu_subgraph(&g, s)?.0, "partition")
        };
        rows.push(K2Row {
            n,
            s,
            p,
            epsilon,
            trial,
            edges: g.len(),
            x,
            f,
            lower,
            upper,
            within: lower <= x as f64 && x as f64 <= upper,
            method,
        });
    }
    let hits = rows.iter().filter(|r| r.within).count();
    if let Some(path) = csv {
        let mut w = csv::Writer::from_path(&path)
            .with_context(|| format!("writing {}", path.display()))?;
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    print(&json!({
        "n": n, "s": s, "p": p, "epsilon": epsilon, "f": f,
        "lower": lower, "upper": upper,
        "within_fraction": hits as f64 / trials.max(1) as f64,
        "trials": rows,
    }))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let config = matches!(err.downcast_ref::<Error>(), Some(Error::Config(_)));
            ExitCode::from(if config { EXIT_CONFIG } else { EXIT_FAILURE })
        }
    }
}
