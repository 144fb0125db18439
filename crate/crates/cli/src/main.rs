use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use gnp_forest::coding::{
    decode_tree_with_independent_set, encode_tree_with_independent_set, PrueferCode,
};
use gnp_forest::exact::{format_rational, parse_rational, to_f64, Rational};
use gnp_forest::harness::{
    emit_plot_data, render_concentration_csv, render_concentration_json, run_concentration,
    run_verify, ExperimentConfig, OutputFormat, VerifySuite,
};
use gnp_forest::moments::{expected_xk_exact, expected_xk_log, second_moment_exact, window};
use gnp_forest::{max_induced_forest, sample_gnp, GnpParams, Graph, SolveStatus};

#[derive(Parser)]
#[command(
    name = "gnp",
    version,
    about = "Induced forests in G(n,p): sampling, exact solving, moments, and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a seeded G(n,p) graph and write it in the text format.
    Sample {
        #[arg(long)]
        n: usize,
        /// Edge probability as an exact rational: "1/2", "0.3", "3/10".
        #[arg(long)]
        p: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the maximum induced forest of a graph, exactly.
    Solve {
        /// Graph file to solve; alternatively give --n/--p/--seed to sample.
        #[arg(long = "in", conflicts_with_all = ["n", "p", "seed"])]
        input: Option<PathBuf>,
        #[arg(long, requires = "p", requires = "seed")]
        n: Option<usize>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Node budget; the search reports an explicit incomplete status when
        /// it runs out.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Concentration window endpoints for F(G(n,p)).
    Window {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: String,
        #[arg(long)]
        eps: String,
    },
    /// Expected counts of induced rooted forests on k vertices.
    Moments {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        p: String,
        /// Also print the exact rational E[X_k].
        #[arg(long)]
        exact: bool,
        /// Also print the exact rational E[X_k^2].
        #[arg(long = "second-moment")]
        second_moment: bool,
    },
    /// Monte Carlo containment experiment for the concentration window.
    Concentration {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Per-sample solver node budget.
        #[arg(long)]
        budget: Option<u64>,
        /// csv (default) or json.
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the forest-size histogram with window columns.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Run a cross-module verification suite; nonzero exit on failure.
    Verify {
        /// codec, counting, moments, or solver.
        #[arg(long)]
        suite: String,
        #[arg(long = "max-n")]
        max_n: Option<u64>,
    },
    /// Encode/decode trees with an independent prefix as JSON codes.
    Codec {
        #[command(subcommand)]
        action: CodecAction,
    },
}

#[derive(Subcommand)]
enum CodecAction {
    /// Tree text on stdin/--in to a JSON code on stdout/--out.
    Encode {
        /// Size of the independent prefix {0..m-1}.
        #[arg(long)]
        m: usize,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// JSON code on stdin/--in back to tree text on stdout/--out.
    Decode {
        /// Optional cross-check against the code's own prefix size.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    /// Bad argument values: exit code 2.
    Usage(String),
    /// Failures while running the command: exit code 1.
    Runtime(String),
    /// A verification suite ran and failed: exit code 1.
    VerificationFailed,
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Runtime(_) | CliError::VerificationFailed => ExitCode::from(1),
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Runtime(msg) => eprintln!("error: {msg}"),
                CliError::VerificationFailed => {}
            }
            e.code()
        }
    }
}

fn parse_probability(s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(usage)
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut f = File::create(path).map_err(runtime)?;
            f.write_all(content.as_bytes()).map_err(runtime)
        }
        None => io::stdout().write_all(content.as_bytes()).map_err(runtime),
    }
}

fn read_input(input: Option<&Path>) -> Result<String, CliError> {
    match input {
        Some(path) => std::fs::read_to_string(path).map_err(runtime),
        None => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf).map_err(runtime)?;
            Ok(buf)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Sample { n, p, seed, out } => {
            let p = parse_probability(&p)?;
            let params = GnpParams::new(n, p, seed).map_err(usage)?;
            let g = sample_gnp(&params);
            write_output(out.as_deref(), &g.to_text())
        }
        Command::Solve {
            input,
            n,
            p,
            seed,
            budget,
        } => {
            let g = match (input, n, p, seed) {
                (Some(path), None, None, None) => {
                    let file = File::open(&path).map_err(runtime)?;
                    Graph::read_text(&mut BufReader::new(file)).map_err(runtime)?
                }
                (None, Some(n), Some(p), Some(seed)) => {
                    let p = parse_probability(&p)?;
                    let params = GnpParams::new(n, p, seed).map_err(usage)?;
                    sample_gnp(&params)
                }
                _ => {
                    return Err(CliError::Usage(
                        "give either --in FILE or all of --n/--p/--seed".into(),
                    ))
                }
            };
            let result = max_induced_forest(&g, budget);
            let status = match result.status {
                SolveStatus::Optimal => "optimal",
                SolveStatus::Incomplete => "incomplete",
            };
            println!("n={} edges={}", g.vertex_count(), g.edge_count());
            println!(
                "forest_size={} status={} nodes={} elapsed_ms={}",
                result.size,
                status,
                result.nodes_explored,
                result.elapsed.as_millis()
            );
            println!(
                "witness={}",
                result
                    .witness
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            Ok(())
        }
        Command::Window { n, p, eps } => {
            let p = parse_probability(&p)?;
            let eps = parse_rational(&eps).map_err(usage)?;
            let w = window(n, &p, &eps).map_err(usage)?;
            println!(
                "n={} p={} eps={} np={}",
                w.n,
                format_rational(&w.p),
                format_rational(&w.eps),
                w.np()
            );
            println!("k_minus={} k_plus={}", w.k_minus, w.k_plus);
            Ok(())
        }
        Command::Moments {
            n,
            k,
            p,
            exact,
            second_moment,
        } => {
            let p_rat = parse_probability(&p)?;
            let ln = expected_xk_log(n, k, to_f64(&p_rat)).map_err(usage)?;
            println!("ln_expected_count={ln}");
            if exact {
                let e = expected_xk_exact(n, k, &p_rat).map_err(usage)?;
                println!("expected_count={} (~{})", format_rational(&e), to_f64(&e));
            }
            if second_moment {
                let s = second_moment_exact(n, k, &p_rat).map_err(usage)?;
                println!("second_moment={} (~{})", format_rational(&s), to_f64(&s));
            }
            Ok(())
        }
        Command::Concentration {
            n,
            p,
            eps,
            samples,
            seed,
            jobs,
            budget,
            format,
            out,
            plot,
        } => {
            let config = ExperimentConfig {
                n,
                p: parse_probability(&p)?,
                eps: parse_rational(&eps).map_err(usage)?,
                samples,
                master_seed: seed,
                solver_budget: budget,
                parallelism: jobs.unwrap_or(0),
                output_path: out.clone(),
                output_format: format
                    .as_deref()
                    .map(|f| f.parse::<OutputFormat>())
                    .transpose()
                    .map_err(usage)?
                    .unwrap_or_default(),
            };
            let report = run_concentration(&config).map_err(usage)?;
            let rendered = match config.output_format {
                OutputFormat::Csv => render_concentration_csv(&report),
                OutputFormat::Json => {
                    let mut s = render_concentration_json(&config, &report).to_string();
                    s.push('\n');
                    s
                }
            };
            write_output(out.as_deref(), &rendered)?;
            if let Some(plot_path) = plot {
                emit_plot_data(&report, &plot_path).map_err(runtime)?;
            }
            if out.is_some() {
                eprintln!(
                    "window=[{}, {}] completed={} incomplete={} hits={} hit_rate={}",
                    report.window.k_minus,
                    report.window.k_plus,
                    report.completed,
                    report.incomplete,
                    report.hits,
                    report
                        .hit_rate
                        .map(|r| format!("{r:.4}"))
                        .unwrap_or_else(|| "n/a".into())
                );
            }
            if let Some(warning) = &report.warning {
                eprintln!("warning: {warning}");
            }
            Ok(())
        }
        Command::Verify { suite, max_n } => {
            let suite: VerifySuite = suite.parse().map_err(usage)?;
            let report = run_verify(suite, max_n).map_err(runtime)?;
            print!("{}", report.render_lines());
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::VerificationFailed)
            }
        }
        Command::Codec { action } => match action {
            CodecAction::Encode { m, input, out } => {
                let text = read_input(input.as_deref())?;
                let tree = Graph::from_text(&text).map_err(runtime)?;
                let code = encode_tree_with_independent_set(&tree, m).map_err(runtime)?;
                let value = json!({
                    "n": code.n(),
                    "m": code.m(),
                    "a": code.a(),
                    "b": code.b(),
                });
                write_output(out.as_deref(), &format!("{value}\n"))
            }
            CodecAction::Decode { m, input, out } => {
                let text = read_input(input.as_deref())?;
                let value: serde_json::Value = serde_json::from_str(&text).map_err(runtime)?;
                let get_usize = |key: &str| -> Result<usize, CliError> {
                    value[key]
                        .as_u64()
                        .map(|v| v as usize)
                        .ok_or_else(|| CliError::Runtime(format!("missing or bad field {key:?}")))
                };
                let get_seq = |key: &str| -> Result<Vec<usize>, CliError> {
                    value[key]
                        .as_array()
                        .ok_or_else(|| CliError::Runtime(format!("missing or bad field {key:?}")))?
                        .iter()
                        .map(|v| {
                            v.as_u64()
                                .map(|x| x as usize)
                                .ok_or_else(|| CliError::Runtime(format!("bad entry in {key:?}")))
                        })
                        .collect()
                };
                let n = get_usize("n")?;
                let code_m = get_usize("m")?;
                if let Some(m) = m {
                    if m != code_m {
                        return Err(CliError::Usage(format!(
                            "--m {m} contradicts the code's m={code_m}"
                        )));
                    }
                }
                let code = PrueferCode::new(n, code_m, get_seq("a")?, get_seq("b")?)
                    .map_err(runtime)?;
                let tree = decode_tree_with_independent_set(&code).map_err(runtime)?;
                write_output(out.as_deref(), &tree.to_text())
            }
        },
    }
}
