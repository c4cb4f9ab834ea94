use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use riskbench::bench::{format_percent_table, run_study, BenchConfig, OutputFormat};
use riskbench::coherence::check_all;
use riskbench::consistency::{empirical_consistency, Builder, SpectrumApproximation, CONSISTENCY_CSV_HEADER};
use riskbench::distributions::{true_risk, DistributionSpec, OracleConfig};
use riskbench::estimators::{
    EsSpectrum, EstimatorId, ExpVarEstimator, GaussianPluginEs, LEstimatorSpec, LinearSpectrum, RiskEstimator,
    Spectrum, UniformSpectrum,
};
use riskbench::{Result, RiskError};

#[derive(Parser)]
#[command(name = "riskbench", version, about = "Coherent risk estimators and the ES benchmark study")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the weight vector of a named estimator.
    Weights {
        #[arg(long)]
        estimator: EstimatorId,
        #[arg(long, default_value_t = 0.025)]
        alpha: f64,
        #[arg(long, default_value_t = 250)]
        n: usize,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Check the coherence axioms of an estimator.
    Coherence {
        /// An estimator id, or `gaussian` / `expvar` for the non-L black boxes.
        #[arg(long)]
        estimator: String,
        #[arg(long, default_value_t = 0.025)]
        alpha: f64,
        #[arg(long, default_value_t = 250)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Print VaR and ES of a distribution as JSON.
    TrueRisk {
        #[arg(long)]
        dist: DistributionSpec,
        #[arg(long, default_value_t = 0.025)]
        alpha: f64,
        #[arg(long, default_value_t = riskbench::distributions::DEFAULT_ORACLE_K)]
        oracle_k: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Convergence table of a spectral estimator on Normal data.
    Consistency {
        /// `es`, `uniform` or `linear`.
        #[arg(long, default_value = "es")]
        spectrum: String,
        #[arg(long, default_value_t = 0.025)]
        alpha: f64,
        #[arg(long, default_value = "integral")]
        builder: Builder,
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,100000")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        reps: usize,
        #[arg(long, default_value_t = 11)]
        seed: u64,
        #[arg(long, default_value = "normal:0:1")]
        dist: DistributionSpec,
    },
    /// Run the benchmark study.
    Bench {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        oracle_k: Option<usize>,
        #[arg(long)]
        format: Option<OutputFormat>,
        #[arg(long)]
        threads: Option<usize>,
        /// Also print the percent table to stdout.
        #[arg(long)]
        table: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Weights { estimator, alpha, n, json, csv } => {
            let spec = LEstimatorSpec::build(estimator, alpha, n)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&spec).expect("specs serialize"));
            } else if csv {
                println!("i,weight");
                for (i, w) in spec.weights().iter().enumerate() {
                    println!("{},{w}", i + 1);
                }
                println!("sum,{}", spec.weight_sum());
                println!("is_cre,{}", spec.is_cre);
            } else {
                for (i, w) in spec.weights().iter().enumerate() {
                    if *w != 0.0 {
                        println!("a_{:<4} {w}", i + 1);
                    }
                }
                println!("sum    {}", spec.weight_sum());
                println!("is_cre {}", spec.is_cre);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Coherence { estimator, alpha, n, trials, seed, json } => {
            let boxed: Box<dyn RiskEstimator> = match estimator.as_str() {
                "gaussian" => Box::new(GaussianPluginEs::new(alpha)?),
                "expvar" => Box::new(ExpVarEstimator::new(alpha)?),
                id => Box::new(LEstimatorSpec::build(id.parse()?, alpha, n)?),
            };
            let report = check_all(boxed.as_ref(), n, trials, seed)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            } else {
                print!("{report}");
            }
            Ok(if report.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::TrueRisk { dist, alpha, oracle_k, seed } => {
            let r = true_risk(&dist, alpha, &OracleConfig { k: oracle_k, seed })?;
            println!("{}", serde_json::to_string_pretty(&r).expect("risks serialize"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Consistency { spectrum, alpha, builder, n, reps, seed, dist } => {
            let s: Box<dyn Spectrum> = match spectrum.as_str() {
                "es" => Box::new(EsSpectrum::new(alpha)?),
                "uniform" => Box::new(UniformSpectrum),
                "linear" => Box::new(LinearSpectrum),
                other => return Err(RiskError::Parse(format!("unknown spectrum '{other}'"))),
            };
            let approx = SpectrumApproximation::new(s.as_ref(), builder);
            let rows = empirical_consistency(&dist, &approx, alpha, &n, reps, seed)?;
            println!("{CONSISTENCY_CSV_HEADER}");
            for r in rows {
                println!("{}", r.to_csv());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { config, out, seed, k, oracle_k, format, threads, table } => {
            let mut c = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| RiskError::Config(format!("{}: {e}", path.display())))?;
                    BenchConfig::from_json(&text)?
                }
                None => BenchConfig::default(),
            };
            c.seed = seed.unwrap_or(c.seed);
            c.k = k.unwrap_or(c.k);
            c.oracle_k = oracle_k.unwrap_or(c.oracle_k);
            c.format = format.unwrap_or(c.format);
            c.threads = threads.or(c.threads);
            c.output = out.or(c.output);
            let result = run_study(&c)?;
            let text = result.render(c.format);
            match &c.output {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| RiskError::Config(format!("{}: {e}", path.display())))?,
                None if !table => print!("{text}"),
                None => {}
            }
            if table {
                print!("{}", format_percent_table(&result)?);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
