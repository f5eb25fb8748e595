//! Command-line front door: verification suites, parameter chains,
//! weight reports, bound computation, and solver runs, all emitting
//! machine-readable reports.
//!
//! Exit codes: 0 success, 1 assertion failure (failing labels on
//! stderr), 2 config parse error.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use moserlab_core::config::RunConfig;
use moserlab_core::forge::{doubling_report, lbeta_mass_check, AnnularWeightSpec, Schedule};
use moserlab_core::grid::{derive_params, estimate_admissibility};
use moserlab_core::pde::{
    assemble_and_solve, bound_consistency, random_admissible_test, snapshot_csv, weak_residual,
};
use moserlab_core::verify::{default_registry, run_all_with_timings, ClaimKind, SampleSpec};

#[derive(Parser)]
#[command(name = "moserlab", about = "verification lab for a degenerate parabolic bound")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the claim verification suites
    Verify {
        /// all | identities | positivity | inequalities
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// include wall-clock runtimes (breaks byte determinism)
        #[arg(long)]
        timings: bool,
    },
    /// Derive the exponent chain from (N, tbar)
    Params {
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        tbar: f64,
        #[arg(long, default_value_t = 0.5)]
        rbar_fraction: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Annular weight doubling and integrability reports
    Weight {
        #[arg(long = "N", default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        beta: u32,
        #[arg(long, default_value_t = 10)]
        k_max: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Full bound pipeline for a configured problem
    Bound {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Solve a configured problem and check the weak identity
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Aggregate verify + params + weight + bound into one report
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| e.to_string()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run_verify(
    suite: &str,
    seed: u64,
    out: &Option<PathBuf>,
    format: Format,
    timings: bool,
) -> i32 {
    let registry = default_registry();
    let filtered: Vec<_> = match suite {
        "all" => registry,
        "identities" => registry
            .into_iter()
            .filter(|c| c.kind == ClaimKind::ExactIdentity)
            .collect(),
        "positivity" => registry
            .into_iter()
            .filter(|c| c.kind == ClaimKind::CertifiedPositivity)
            .collect(),
        "inequalities" => registry
            .into_iter()
            .filter(|c| c.kind == ClaimKind::SampledInequality)
            .collect(),
        other => {
            eprintln!("unknown suite `{other}`");
            return 2;
        }
    };
    let spec = SampleSpec {
        seed,
        ..SampleSpec::default()
    };
    let report = run_all_with_timings(&filtered, &spec, timings);
    let ok = report.all_passed;
    let wrapped = json!({ "seed": seed, "suite": suite, "report": report });
    if format == Format::Csv {
        let mut csv = String::from("label,kind,status,margin\n");
        for c in &report.claims {
            csv.push_str(&format!(
                "{},{:?},{},{}\n",
                c.label,
                c.kind,
                c.status,
                c.margin.map_or(String::new(), |m| m.to_string())
            ));
        }
        if emit(out, &csv).is_err() {
            return 2;
        }
    } else if emit(out, &serde_json::to_string_pretty(&wrapped).unwrap()).is_err() {
        return 2;
    }
    if !ok {
        for c in report.claims.iter().filter(|c| c.status != "pass") {
            eprintln!("FAIL {}", c.label);
        }
        return 1;
    }
    0
}

fn run_params(n: u32, tbar: f64, fraction: f64, out: &Option<PathBuf>, format: Format) -> i32 {
    match derive_params(n, tbar, fraction) {
        Ok(chain) => {
            let text = if format == Format::Csv {
                format!(
                    "N,tbar,r,tstar,rbar\n{},{},{},{},{}\n",
                    chain.n, chain.tbar, chain.r, chain.tstar, chain.rbar
                )
            } else {
                serde_json::to_string_pretty(&chain).unwrap()
            };
            if emit(out, &text).is_err() {
                return 2;
            }
            0
        }
        Err(e) => {
            eprintln!("FAIL params: {e}");
            1
        }
    }
}

fn weight_report(n: u32, beta: u32, k_max: u32) -> Result<serde_json::Value, String> {
    let spec = AnnularWeightSpec::new(n, beta, k_max, Schedule::Steep).map_err(|e| e.to_string())?;
    let mut doubling = Vec::new();
    let mut mass = Vec::new();
    for k in spec.k_range() {
        doubling.push(doubling_report(&spec, k).map_err(|e| e.to_string())?);
        let m = lbeta_mass_check(&spec, k).map_err(|e| e.to_string())?;
        if !m.pass {
            return Err(format!("mass bound failed at k = {k}"));
        }
        mass.push(m);
    }
    Ok(json!({ "N": n, "beta": beta, "doubling": doubling, "mass": mass }))
}

fn run_weight(n: u32, beta: u32, k_max: u32, out: &Option<PathBuf>, format: Format) -> i32 {
    match weight_report(n, beta, k_max) {
        Ok(v) => {
            let text = if format == Format::Csv {
                let mut csv = String::from("k,log2_ratio,lower_bound,margin\n");
                for d in v["doubling"].as_array().unwrap() {
                    csv.push_str(&format!(
                        "{},{},{},{}\n",
                        d["k"], d["log2_ratio"], d["lower_bound"], d["margin"]
                    ));
                }
                csv
            } else {
                serde_json::to_string_pretty(&v).unwrap()
            };
            if emit(out, &text).is_err() {
                return 2;
            }
            0
        }
        Err(e) => {
            eprintln!("FAIL weight: {e}");
            1
        }
    }
}

fn load_config(path: &PathBuf) -> Result<RunConfig, i32> {
    RunConfig::from_path(path).map_err(|e| {
        eprintln!("config error: {e}");
        2
    })
}

fn run_bound(
    config: &PathBuf,
    alpha: Option<f64>,
    seed: Option<u64>,
    out: &Option<PathBuf>,
    _format: Format,
) -> i32 {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let seed = seed.unwrap_or(cfg.seed);
    let result = (|| -> Result<serde_json::Value, String> {
        let chain = cfg.build_chain().map_err(|e| e.to_string())?;
        let domain = cfg.build_domain().map_err(|e| e.to_string())?;
        let problem = cfg.build_problem().map_err(|e| e.to_string())?;
        // sampled lower-bound estimate times the safety factor 2: the
        // pipeline is certified relative to this estimate
        let c_est =
            estimate_admissibility(&domain, &chain, 24, 200, seed).map_err(|e| e.to_string())?;
        let c_adm = 2.0 * c_est;
        let alpha = alpha.unwrap_or(cfg.problem.alpha);
        let rep = bound_consistency(&problem, &chain, c_adm, alpha).map_err(|e| e.to_string())?;
        Ok(json!({
            "seed": seed,
            "chain": chain,
            "admissibility_estimate": c_est,
            "admissibility_constant": c_adm,
            "alpha": alpha,
            "consistency": rep,
        }))
    })();
    match result {
        Ok(v) => {
            if emit(out, &serde_json::to_string_pretty(&v).unwrap()).is_err() {
                return 2;
            }
            0
        }
        Err(e) => {
            eprintln!("FAIL bound: {e}");
            1
        }
    }
}

fn run_solve(config: &PathBuf, seed: Option<u64>, out: &Option<PathBuf>, format: Format) -> i32 {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let seed = seed.unwrap_or(cfg.seed);
    let result = (|| -> Result<(serde_json::Value, String), String> {
        let problem = cfg.build_problem().map_err(|e| e.to_string())?;
        let (u, stats) = assemble_and_solve(&problem).map_err(|e| e.to_string())?;
        let mut max_residual = 0.0f64;
        for probe in 0..10 {
            let phi = random_admissible_test(&problem.grid, seed.wrapping_add(probe));
            let r = weak_residual(&u, &problem, &phi).map_err(|e| e.to_string())?;
            max_residual = max_residual.max(r);
        }
        let csv = snapshot_csv(&u, &problem.grid, problem.grid.nt);
        Ok((
            json!({
                "seed": seed,
                "steps": stats.steps,
                "unknowns": stats.unknowns,
                "sup_norm": u.sup_norm(),
                "max_weak_residual": max_residual,
            }),
            csv,
        ))
    })();
    match result {
        Ok((v, csv)) => {
            let text = if format == Format::Csv {
                csv
            } else {
                serde_json::to_string_pretty(&v).unwrap()
            };
            if emit(out, &text).is_err() {
                return 2;
            }
            0
        }
        Err(e) => {
            eprintln!("FAIL solve: {e}");
            1
        }
    }
}

fn run_report(config: &PathBuf, seed: Option<u64>, out: &Option<PathBuf>, format: Format) -> i32 {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let seed = seed.unwrap_or(cfg.seed);
    let spec = SampleSpec {
        seed,
        ..SampleSpec::default()
    };
    let verify = run_all_with_timings(&default_registry(), &spec, false);
    if !verify.all_passed {
        for c in verify.claims.iter().filter(|c| c.status != "pass") {
            eprintln!("FAIL {}", c.label);
        }
        return 1;
    }
    let result = (|| -> Result<serde_json::Value, String> {
        let chain = cfg.build_chain().map_err(|e| e.to_string())?;
        let weight = weight_report(2, 2, 10)?;
        let domain = cfg.build_domain().map_err(|e| e.to_string())?;
        let problem = cfg.build_problem().map_err(|e| e.to_string())?;
        let c_est =
            estimate_admissibility(&domain, &chain, 24, 200, seed).map_err(|e| e.to_string())?;
        let rep = bound_consistency(&problem, &chain, 2.0 * c_est, cfg.problem.alpha)
            .map_err(|e| e.to_string())?;
        Ok(json!({
            "seed": seed,
            "verify": verify,
            "chain": chain,
            "weight": weight,
            "bound": rep,
        }))
    })();
    match result {
        Ok(v) => {
            let text = if format == Format::Csv {
                // gnuplot-ready weight table; the rest is JSON-only
                let mut csv = String::from("k,log2_ratio,lower_bound\n");
                for d in v["weight"]["doubling"].as_array().unwrap() {
                    csv.push_str(&format!(
                        "{},{},{}\n",
                        d["k"], d["log2_ratio"], d["lower_bound"]
                    ));
                }
                csv
            } else {
                serde_json::to_string_pretty(&v).unwrap()
            };
            if emit(out, &text).is_err() {
                return 2;
            }
            0
        }
        Err(e) => {
            eprintln!("FAIL report: {e}");
            1
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match &cli.cmd {
        Cmd::Verify {
            suite,
            seed,
            out,
            format,
            timings,
        } => run_verify(suite, *seed, out, *format, *timings),
        Cmd::Params {
            n,
            tbar,
            rbar_fraction,
            out,
            format,
        } => run_params(*n, *tbar, *rbar_fraction, out, *format),
        Cmd::Weight {
            n,
            beta,
            k_max,
            out,
            format,
        } => run_weight(*n, *beta, *k_max, out, *format),
        Cmd::Bound {
            config,
            alpha,
            seed,
            out,
            format,
        } => {
            let _ = format;
            run_bound(config, *alpha, *seed, out, *format)
        }
        Cmd::Solve {
            config,
            seed,
            out,
            format,
        } => run_solve(config, *seed, out, *format),
        Cmd::Report {
            config,
            seed,
            out,
            format,
        } => run_report(config, *seed, out, *format),
    };
    std::process::exit(code);
}
