//! `cohere` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification suite fails, 2 on any
//! input error (with a one-line diagnostic on stderr).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cohere::conversion::verify_conversion;
use cohere::harness::{run_suites, Budgets, SCHEMA};
use cohere::io::{read_state, write_state, StateInput};
use cohere::monotones::l1_coherence;
use cohere::multislit::{distinguishability, sweep, MultiSlitConfig, SWEEP_HEADER};
use cohere::random::{random_mixed, random_pure};
use cohere::roof::minimize_roof;
use cohere::{Decomposition, Error, MonotoneId, RoofOptions, RoofProblem};

#[derive(Parser)]
#[command(name = "cohere", version, about = "Coherence k-concurrence toolkit")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    output: Format,
    /// Print nothing; report through the exit code only.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct RoofArgs {
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Ensemble size; defaults to rank^2.
    #[arg(long)]
    ensemble: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

impl RoofArgs {
    fn options(&self) -> RoofOptions {
        RoofOptions {
            ensemble_size: self.ensemble,
            restarts: self.restarts,
            seed: self.seed,
            tol: self.tol,
            ..RoofOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form value on a pure state, or C_l1 on any state.
    Monotone {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        measure: String,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Convex-roof estimate on a mixed state.
    Roof {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        measure: String,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        roof: RoofArgs,
    },
    /// Both sides of the coherence-to-entanglement conversion identity.
    Convert {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        roof: RoofArgs,
    },
    /// Path distinguishability of a multi-slit configuration.
    Multislit {
        #[arg(long)]
        config: PathBuf,
        /// PARAM:LO:HI:STEPS, PARAM being `overlap` or `phi<i>`.
        #[arg(long)]
        sweep: Option<String>,
        #[command(flatten)]
        roof: RoofArgs,
    },
    /// Run the property suites.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override every sample count.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Write a random state file.
    Random {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// What a command produced: JSON document(s), their CSV rendering, and whether it passed.
struct Output {
    json: Vec<Value>,
    csv: String,
    passed: bool,
}

impl Output {
    fn single(value: Value, csv: String) -> Self {
        Self {
            json: vec![value],
            csv,
            passed: true,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match run(&cli.command) {
        Ok(out) => {
            if !cli.quiet {
                let mut stdout = std::io::stdout().lock();
                let text = match cli.output {
                    Format::Json => out.json.iter().map(|v| format!("{v}\n")).collect(),
                    Format::Csv => out.csv,
                };
                let _ = stdout.write_all(text.as_bytes());
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(2)
        }
    }
}

fn measure(name: &str, k: Option<usize>) -> cohere::Result<MonotoneId> {
    MonotoneId::from_parts(name, k)
}

fn id_json(id: MonotoneId) -> (Value, Value) {
    (json!(id.family()), id.k().map_or(Value::Null, |k| json!(k)))
}

fn opt_k(id: MonotoneId) -> String {
    id.k().map_or(String::new(), |k| k.to_string())
}

fn decomposition_json(dec: &Decomposition) -> Value {
    let states: Vec<Value> = dec
        .states()
        .iter()
        .map(|s| {
            json!(s
                .amplitudes()
                .iter()
                .map(|z| [z.re, z.im])
                .collect::<Vec<_>>())
        })
        .collect();
    json!({"weights": dec.weights(), "states": states})
}

fn run(command: &Command) -> cohere::Result<Output> {
    match command {
        Command::Monotone {
            state,
            measure: name,
            k,
        } => {
            let id = measure(name, *k)?;
            let state = read_state(state)?;
            let value = match (&state, id) {
                (_, MonotoneId::L1Coherence) => l1_coherence(&state.density()),
                (StateInput::Pure(psi), _) => id.evaluate_pure(psi)?,
                (StateInput::Mixed(rho), _) => match rho.as_pure() {
                    Some(psi) => id.evaluate_pure(&psi)?,
                    None => {
                        return Err(Error::Parameter(format!(
                            "{} has no closed form on mixed states; use `roof`",
                            id.family()
                        )))
                    }
                },
            };
            let (family, k) = id_json(id);
            Ok(Output::single(
                json!({"schema": SCHEMA, "measure": family, "k": k, "dim": state.dim(), "value": value}),
                format!("measure,k,value\n{},{},{}\n", id.family(), opt_k(id), value),
            ))
        }
        Command::Roof {
            state,
            measure: name,
            k,
            roof,
        } => {
            let id = measure(name, *k)?;
            let rho = read_state(state)?.density();
            let problem = RoofProblem::new(rho, id, roof.options())?;
            let est = minimize_roof(&problem, &[])?;
            let (family, k) = id_json(id);
            Ok(Output::single(
                json!({
                    "schema": SCHEMA,
                    "measure": family,
                    "k": k,
                    "value": est.value,
                    "converged": est.converged,
                    "iterations": est.iterations,
                    "restart_values": est.restart_values,
                    "ensemble_size": problem.ensemble_size(),
                    "certificate": decomposition_json(&est.certificate),
                }),
                format!(
                    "measure,k,value,converged\n{},{},{},{}\n",
                    id.family(),
                    opt_k(id),
                    est.value,
                    est.converged
                ),
            ))
        }
        Command::Convert { state, k, roof } => {
            let state = read_state(state)?;
            let r = verify_conversion(&state, *k, &roof.options())?;
            Ok(Output::single(
                json!({
                    "schema": SCHEMA,
                    "kind": state.kind(),
                    "dim": state.dim(),
                    "k": r.k,
                    "coherence": r.coherence_side,
                    "entanglement": r.entanglement_side,
                    "delta": r.delta,
                }),
                format!(
                    "k,coherence,entanglement,delta\n{},{},{},{}\n",
                    r.k, r.coherence_side, r.entanglement_side, r.delta
                ),
            ))
        }
        Command::Multislit {
            config,
            sweep: spec,
            roof,
        } => {
            let cfg = MultiSlitConfig::read(config)?;
            let opts = roof.options();
            match spec {
                None => {
                    let rep = distinguishability(&cfg.quanton, &cfg.detector, &opts)?;
                    let [b1, b2, r] = rep.q_lower_bounds;
                    Ok(Output::single(
                        json!({
                            "schema": SCHEMA,
                            "slits": rep.rho_s.dim(),
                            "dq": rep.d_q,
                            "l1_bound": rep.l1_bound,
                            "q_lower_bounds": [b1, b2, r],
                            "slit_count": rep.slit_count,
                            "slit_count_evidence_based": true,
                        }),
                        format!(
                            "{SWEEP_HEADER}\n,{},{},{},{},{}\n",
                            rep.d_q, rep.l1_bound, b1, b2, rep.slit_count
                        ),
                    ))
                }
                Some(spec) => {
                    let (param, lo, hi, steps) = parse_sweep(spec)?;
                    let rows = sweep(&cfg, &param, lo, hi, steps, &opts)?;
                    let mut csv = format!("{SWEEP_HEADER}\n");
                    for row in &rows {
                        csv.push_str(&row.to_csv());
                        csv.push('\n');
                    }
                    let json_rows: Vec<Value> = rows
                        .iter()
                        .map(|r| {
                            json!({"param": r.param, "dq": r.d_q, "l1_bound": r.l1_bound,
                                   "bound1": r.bound1, "bound2": r.bound2, "slits": r.slits})
                        })
                        .collect();
                    Ok(Output::single(
                        json!({"schema": SCHEMA, "sweep": param, "rows": json_rows}),
                        csv,
                    ))
                }
            }
        }
        Command::Verify {
            suite,
            seed,
            samples,
        } => {
            let budgets = samples.map_or_else(Budgets::default, Budgets::uniform);
            let reports = run_suites(*seed, &budgets, suite.as_deref())?;
            let mut csv = String::from("suite,samples,tolerance,max_defect,violations,passed\n");
            for r in &reports {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.suite,
                    r.samples,
                    r.tolerance,
                    r.max_defect,
                    r.violations.len(),
                    r.passed
                ));
            }
            Ok(Output {
                passed: reports.iter().all(|r| r.passed),
                json: reports
                    .iter()
                    .map(|r| serde_json::to_value(r).expect("reports are plain data"))
                    .collect(),
                csv,
            })
        }
        Command::Random {
            dim,
            rank,
            seed,
            out,
        } => {
            let state = if *rank == 1 {
                StateInput::Pure(random_pure(*dim, *seed)?)
            } else {
                StateInput::Mixed(random_mixed(*dim, *rank, *seed)?)
            };
            write_state(out, &state)?;
            Ok(Output::single(
                json!({"schema": SCHEMA, "path": out.display().to_string(), "dim": dim, "rank": rank, "kind": state.kind()}),
                format!(
                    "path,dim,rank,kind\n{},{},{},{}\n",
                    out.display(),
                    dim,
                    rank,
                    state.kind()
                ),
            ))
        }
    }
}

fn parse_sweep(spec: &str) -> cohere::Result<(String, f64, f64, usize)> {
    let bad = || Error::Parameter(format!("sweep must be PARAM:LO:HI:STEPS, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [param, lo, hi, steps] = parts.as_slice() else {
        return Err(bad());
    };
    Ok((
        param.to_string(),
        lo.parse().map_err(|_| bad())?,
        hi.parse().map_err(|_| bad())?,
        steps.parse().map_err(|_| bad())?,
    ))
}
