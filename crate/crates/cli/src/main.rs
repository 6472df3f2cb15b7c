//! Command-line surface for the transportation cost space computations.
//!
//! Every subcommand prints deterministic JSON (or CSV where the output is
//! tabular): exact values appear as `p/q` strings with a decimal
//! convenience field. Exit codes: 0 success, 1 verification failure,
//! 2 usage error, 3 capacity exceeded.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tcs_core::diamond;
use tcs_core::embed;
use tcs_core::error::Error as CoreError;
use tcs_core::graphs::{Family, RecursiveGraph};
use tcs_core::json as tjson;
use tcs_core::projections::{build_pn, operator_l1_norm, orthogonal_projection};
use tcs_core::rational::{rat, rat_f64, rat_str};
use tcs_core::spaces::OrthoBasis;
use tcs_core::transport::{boundary, quotient_norm, tc_norm, TreeWitness};
use tcs_core::verify::{run_all, VerifyConfig};

#[derive(Parser)]
#[command(
    name = "tcs",
    about = "Exact transportation cost space computations on Laakso and diamond graphs",
    version
)]
struct Cli {
    /// Cap on constructed edge counts.
    #[arg(long, global = true, default_value_t = tcs_core::DEFAULT_EDGE_CAP)]
    max_edges: usize,
    /// Worker threads for the parallel scans (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Laakso,
    Diamond,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichProjection {
    /// The inductively defined low-norm projection.
    #[value(alias = "Pn")]
    Pn,
    /// The orthogonal projection.
    #[value(alias = "Orth")]
    Orth,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichSpace {
    #[value(alias = "T")]
    T,
    #[value(alias = "F")]
    F,
}

#[derive(Args)]
struct FamilySelect {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: usize,
    /// Branching (diamond only).
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a graph and emit it (or its shortest-path metric).
    Gen {
        #[command(flatten)]
        select: FamilySelect,
        /// Emit the all-pairs shortest-path metric instead of the graph.
        #[arg(long)]
        metric: bool,
        #[arg(long)]
        json: bool,
        #[arg(long, conflicts_with = "json")]
        csv: bool,
    },
    /// Emit the full labeled orthogonal basis.
    Basis {
        #[command(flatten)]
        select: FamilySelect,
        #[arg(long)]
        json: bool,
        #[arg(long, conflicts_with = "json")]
        csv: bool,
    },
    /// Exact l1 operator norm of a projection onto the cycle space.
    ProjNorm {
        #[command(flatten)]
        select: FamilySelect,
        #[arg(long, value_enum)]
        which: WhichProjection,
        #[arg(long)]
        json: bool,
    },
    /// Transportation cost norm of a problem over a metric space file.
    TcNorm {
        /// JSON file {"points": [...], "dist": [["p/q", ...], ...]}.
        #[arg(long)]
        space: PathBuf,
        /// JSON file {"values": {"point": "p/q", ...}} with zero sum.
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Quotient norm of an edge vector over the cycle space, with the
    /// transport cross-check.
    Quotient {
        #[command(flatten)]
        select: FamilySelect,
        /// JSON file {"edge-index": "p/q", ...}.
        #[arg(long)]
        vector: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Exact projection constant of the diamond Lipschitz space.
    Lambda {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        json: bool,
    },
    /// Weighted-tree test for a metric space file.
    TreeCheck {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Verify the sup-norm cube embeddings on the fixed 6- or 8-point space.
    EmbedCheck {
        #[arg(long, value_enum)]
        which: WhichSpace,
        #[arg(long)]
        json: bool,
    },
    /// Run the full verification suite and print one line per criterion.
    VerifyAll {
        /// Cap on the Laakso level exercised by each criterion.
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        /// Random vectors per graph for the transport comparison.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0x7C5)]
        seed: u64,
        #[arg(long)]
        csv: bool,
        /// Print every detail line, not only failures.
        #[arg(long)]
        verbose: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                CoreError::Capacity { .. } => ExitCode::from(3),
                CoreError::Parse(_) | CoreError::Range(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn build_graph(select: &FamilySelect, cap: usize) -> Result<RecursiveGraph, CoreError> {
    match select.family {
        FamilyArg::Laakso => {
            if select.k.is_some() {
                return Err(CoreError::Range(
                    "--k applies to the diamond family only".into(),
                ));
            }
            RecursiveGraph::laakso(select.n, cap)
        }
        FamilyArg::Diamond => {
            let k = select
                .k
                .ok_or_else(|| CoreError::Range("the diamond family needs --k".into()))?;
            RecursiveGraph::diamond(select.n, k, cap)
        }
    }
}

fn read_json(path: &PathBuf) -> Result<Value, CoreError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CoreError::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CoreError::Parse(format!("invalid JSON in {}: {e}", path.display())))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cli: Cli) -> Result<ExitCode, CoreError> {
    let cap = cli.max_edges;
    match cli.command {
        Command::Gen {
            select,
            metric,
            csv,
            ..
        } => {
            let g = build_graph(&select, cap)?;
            if metric {
                print_json(&tjson::metric_to_json(&g.shortest_path_metric()));
            } else if csv {
                println!("edge,address,tail,head");
                for e in 0..g.edge_count() {
                    println!("{e},{},{},{}", g.edge_address(e), g.tail(e), g.head(e));
                }
            } else {
                print_json(&tjson::graph_to_json(&g));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Basis { select, csv, .. } => {
            let g = build_graph(&select, cap)?;
            match g.family() {
                Family::Laakso => {
                    let basis = OrthoBasis::new(&g)?;
                    if csv {
                        println!("id,class,level,address,l1,l2_sq");
                        for (id, el) in basis.elements().iter().enumerate() {
                            println!(
                                "{id},{},{},{},{},{}",
                                el.class.label(),
                                el.level,
                                el.address,
                                rat_str(&el.l1),
                                rat_str(&el.l2_sq)
                            );
                        }
                    } else {
                        print_json(&tjson::basis_to_json(&basis));
                    }
                }
                Family::Diamond { k } => {
                    let cells = |v: &diamond::AtomVector| -> Vec<String> {
                        v.cells().iter().map(rat_str).collect()
                    };
                    let cut: Vec<Value> = diamond::cut_basis(select.n, k, cap)?
                        .iter()
                        .map(|v| json!(cells(v)))
                        .collect();
                    let cycle: Vec<Value> = diamond::cycle_system(select.n, k, cap)?
                        .iter()
                        .map(|v| json!(cells(v)))
                        .collect();
                    print_json(&json!({
                        "n": select.n,
                        "k": k,
                        "cut_basis": cut,
                        "cycle_system": cycle,
                    }));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ProjNorm { select, which, .. } => {
            if !matches!(select.family, FamilyArg::Laakso) {
                return Err(CoreError::Range(
                    "projections onto the cycle space are computed for the Laakso family".into(),
                ));
            }
            let g = build_graph(&select, cap)?;
            let basis = Arc::new(OrthoBasis::new(&g)?);
            let n = select.n as i64;
            let out = match which {
                WhichProjection::Pn => {
                    let (p, _) = build_pn(&g, &basis)?;
                    let (norm, witness) = operator_l1_norm(&p);
                    json!({
                        "n": select.n,
                        "which": "Pn",
                        "norm": rat_str(&norm),
                        "norm_decimal": rat_f64(&norm),
                        "upper": rat_str(&rat(n + 1, 2)),
                        "lower": rat_str(&rat(3 * (n + 1), 8)),
                        "witness_edge": witness,
                    })
                }
                WhichProjection::Orth => {
                    let p = orthogonal_projection(&basis);
                    let (norm, witness) = operator_l1_norm(&p);
                    json!({
                        "n": select.n,
                        "which": "orth",
                        "norm": rat_str(&norm),
                        "norm_decimal": rat_f64(&norm),
                        "lower": rat_str(&tcs_core::rational::fpow(4, 3, select.n as u32 - 1)),
                        "witness_edge": witness,
                    })
                }
            };
            print_json(&out);
            Ok(ExitCode::SUCCESS)
        }
        Command::TcNorm { space, problem, .. } => {
            let metric = tjson::metric_from_json(&read_json(&space)?)?;
            let prob = tjson::problem_from_json(&metric, &read_json(&problem)?)?;
            let (norm, plan) = tc_norm(&metric, &prob);
            plan.verify(&metric, &prob)?;
            print_json(&json!({
                "norm": rat_str(&norm),
                "norm_decimal": rat_f64(&norm),
                "plan": tjson::plan_to_json(&metric, &plan),
            }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Quotient { select, vector, .. } => {
            let g = build_graph(&select, cap)?;
            let x = tjson::vector_from_json(g.edge_count(), &read_json(&vector)?)?;
            let q = quotient_norm(&g, &x);
            let metric = g.shortest_path_metric();
            let (t, _) = tc_norm(&metric, &boundary(&g, &x));
            print_json(&json!({
                "l1": rat_str(&x.l1()),
                "quotient_norm": rat_str(&q),
                "quotient_decimal": rat_f64(&q),
                "tc_norm": rat_str(&t),
                "agree": q == t,
            }));
            Ok(if q == t {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Lambda { n, k, .. } => {
            let rep = diamond::lambda_diamond(n, k, cap)?;
            print_json(&json!({
                "n": n,
                "k": k,
                "computed": rat_str(&rep.computed),
                "computed_decimal": rat_f64(&rep.computed),
                "formula": rat_str(&rep.formula),
                "match": rep.computed == rep.formula,
            }));
            Ok(ExitCode::SUCCESS)
        }
        Command::TreeCheck { space, .. } => {
            let metric = tjson::metric_from_json(&read_json(&space)?)?;
            let essential = tcs_core::transport::essential_edges(&metric);
            let (is_tree, witness) = tcs_core::transport::is_weighted_tree_metric(&metric);
            let witness_json = match &witness {
                TreeWitness::Tree(edges) => json!({
                    "tree": edges
                        .iter()
                        .map(|&(u, v)| json!([metric.labels()[u], metric.labels()[v]]))
                        .collect::<Vec<_>>()
                }),
                TreeWitness::WrongCount {
                    essential,
                    expected,
                } => {
                    json!({ "wrong_count": { "essential": essential, "expected": expected } })
                }
                TreeWitness::NotSpanning => json!("essential edges do not span"),
                TreeWitness::MetricMismatch { u, v, tree, actual } => json!({
                    "metric_mismatch": {
                        "pair": [metric.labels()[*u], metric.labels()[*v]],
                        "tree_distance": rat_str(tree),
                        "actual_distance": rat_str(actual),
                    }
                }),
            };
            print_json(&json!({
                "is_tree_metric": is_tree,
                "essential_count": essential.len(),
                "extreme_pairs": tcs_core::transport::extreme_pair_count(&metric),
                "witness": witness_json,
            }));
            Ok(ExitCode::SUCCESS)
        }
        Command::EmbedCheck { which, .. } => {
            let (space, problems, label) = match which {
                WhichSpace::T => (embed::metric_t(), embed::problems_t(), "T"),
                WhichSpace::F => (embed::metric_f(), embed::problems_f(), "F"),
            };
            let rep = embed::verify_linfty(&space, &problems);
            let norms: Vec<Value> = rep
                .norms
                .iter()
                .map(|(signs, norm)| json!({ "signs": signs, "norm": rat_str(norm) }))
                .collect();
            print_json(&json!({
                "which": label,
                "patterns": rep.patterns,
                "max_deviation": rat_str(&rep.max_deviation),
                "norms": norms,
            }));
            Ok(if rep.max_deviation == rat(0, 1) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::VerifyAll {
            max_n,
            samples,
            seed,
            csv,
            verbose,
        } => {
            let cfg = VerifyConfig {
                max_n,
                edge_cap: cap,
                quotient_samples: samples,
                seed,
                ..VerifyConfig::default()
            };
            let outcomes = run_all(&cfg);
            let mut all_ok = true;
            if csv {
                println!("criterion,name,status,elapsed_ms");
                for o in &outcomes {
                    println!(
                        "{},{},{},{}",
                        o.id,
                        o.name,
                        if o.passed { "PASS" } else { "FAIL" },
                        o.elapsed.as_millis()
                    );
                    all_ok &= o.passed;
                }
            } else {
                for o in &outcomes {
                    println!(
                        "criterion {:2} ({}): {} [{:.2?}]",
                        o.id,
                        o.name,
                        if o.passed { "PASS" } else { "FAIL" },
                        o.elapsed
                    );
                    for d in &o.details {
                        if verbose || !o.passed {
                            println!("    {d}");
                        }
                    }
                    all_ok &= o.passed;
                }
            }
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
