//! `minlob` command-line front end.
//!
//! Exit codes: 0 yes/solved, 1 no/infeasible/invalid, 2 input or usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use minlob::format::{certify, parse_certificate, parse_cnf, parse_graph, write_graph, Certificate};
use minlob::generate::random_digraph;
use minlob::reduction::{assignment_to_branching, canonical_width1_dpd, decode_assignment, reduce_cnf};
use minlob::solvers::{check_k_leaves_contraction, min_leaf_brute_force, min_leaf_contraction};
use minlob::width::{dpw_exact_with_cap, validate_dpd, DEFAULT_DPW_CAP};
use minlob::{validate_out_branching, Digraph, OutTree, SolveResult};

#[derive(Parser)]
#[command(name = "minlob", version, about = "Minimum leaf out-branchings and directed width decompositions")]
struct Cli {
    /// Print one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Brute,
    Contraction,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum number of leaves over all out-branchings, with a witness.
    Solve {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "brute")]
        method: Method,
    },
    /// Does some out-branching have at most K leaves?
    Check {
        #[arg(short)]
        k: usize,
        graph: PathBuf,
    },
    /// Build the hardness instance of a 3-CNF formula.
    Reduce {
        cnf: PathBuf,
        /// Also print the canonical width-1 directed path decomposition.
        #[arg(long)]
        dpd: bool,
        /// Solve the formula and map the result through the instance and back.
        #[arg(long)]
        certify: bool,
    },
    /// Exact directed path-width.
    Dpw {
        graph: PathBuf,
        /// Largest order accepted by the exponential search.
        #[arg(long, default_value_t = DEFAULT_DPW_CAP)]
        cap: usize,
    },
    /// Audit a certificate file against a digraph.
    Certify { graph: PathBuf, certificate: PathBuf },
    /// Reproducible random digraph.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        density: f64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Serialize)]
struct Branching {
    root: usize,
    arcs: Vec<[usize; 2]>,
}

impl Branching {
    fn of(t: &OutTree) -> Self {
        Branching { root: t.root() + 1, arcs: t.arcs().into_iter().map(|(p, c)| [p + 1, c + 1]).collect() }
    }
}

#[derive(Serialize)]
struct Certification {
    satisfiable: bool,
    assignment: Option<Vec<i64>>,
    branching_leaves: Option<usize>,
    decoded_satisfies: Option<bool>,
    dpd_width: usize,
}

#[derive(Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
enum Report {
    Solve {
        method: Method,
        has_out_branching: bool,
        min_leaves: Option<usize>,
        witness: Option<Branching>,
    },
    Check {
        k: usize,
        answer: bool,
        witness: Option<Branching>,
    },
    Reduce {
        variables: usize,
        clauses: usize,
        order: usize,
        graph: String,
        dpd: Option<String>,
        certification: Option<Certification>,
    },
    Dpw {
        width: usize,
        bags: Vec<Vec<usize>>,
    },
    Certify {
        kind: &'static str,
        valid: bool,
        value: Option<usize>,
        error: Option<String>,
    },
    Gen {
        n: usize,
        density: f64,
        seed: u64,
        graph: String,
    },
}

struct InputError(String);

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Digraph, InputError> {
    parse_graph(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn input<E: std::fmt::Display>(e: E) -> InputError {
    InputError(e.to_string())
}

fn one_based(vs: &[usize]) -> Vec<usize> {
    vs.iter().map(|v| v + 1).collect()
}

/// Runs a command; returns the report and whether the answer is "yes".
fn run(command: Command) -> Result<(Report, bool), InputError> {
    Ok(match command {
        Command::Solve { graph, method } => {
            let d = load_graph(&graph)?;
            let result = match method {
                Method::Brute => min_leaf_brute_force(&d).map_err(input)?,
                Method::Contraction => min_leaf_contraction(&d).map_err(input)?,
            };
            let ok = matches!(result, SolveResult::Optimal { .. });
            let report = Report::Solve {
                method,
                has_out_branching: ok,
                min_leaves: result.min_leaves(),
                witness: result.witness().map(Branching::of),
            };
            (report, ok)
        }
        Command::Check { k, graph } => {
            let d = load_graph(&graph)?;
            let decision = check_k_leaves_contraction(&d, k).map_err(input)?;
            let answer = decision.answer();
            (Report::Check { k, answer, witness: decision.witness.as_ref().map(Branching::of) }, answer)
        }
        Command::Reduce { cnf, dpd, certify: want_certificate } => {
            let f = parse_cnf(&read(&cnf)?).map_err(|e| InputError(format!("{}: {e}", cnf.display())))?;
            let inst = reduce_cnf(&f);
            let d = inst.digraph();
            let canonical = canonical_width1_dpd(&inst);
            let mut ok = true;
            let certification = if want_certificate {
                let dpd_width = validate_dpd(d, &canonical).map_err(input)?;
                let found = f.brute_force_satisfying();
                let mut c = Certification {
                    satisfiable: found.is_some(),
                    assignment: None,
                    branching_leaves: None,
                    decoded_satisfies: None,
                    dpd_width,
                };
                if let Some(a) = found {
                    let b = assignment_to_branching(&inst, &a).map_err(input)?;
                    let leaves = validate_out_branching(d, &b).map_err(input)?;
                    let back = decode_assignment(&inst, &b).map_err(input)?;
                    c.assignment = Some(
                        a.0.iter().enumerate().map(|(i, &t)| if t { i as i64 + 1 } else { -(i as i64 + 1) }).collect(),
                    );
                    c.branching_leaves = Some(leaves);
                    c.decoded_satisfies = Some(f.is_satisfied_by(&back));
                    ok = leaves == f.var_count() && f.is_satisfied_by(&back);
                } else {
                    ok = false;
                }
                Some(c)
            } else {
                None
            };
            let report = Report::Reduce {
                variables: inst.var_count(),
                clauses: inst.clause_count(),
                order: d.order(),
                graph: write_graph(d),
                dpd: dpd.then(|| Certificate::from_path(&canonical).to_text()),
                certification,
            };
            (report, ok)
        }
        Command::Dpw { graph, cap } => {
            let d = load_graph(&graph)?;
            let (width, dec) = dpw_exact_with_cap(&d, cap).map_err(input)?;
            (Report::Dpw { width, bags: dec.bags().iter().map(|b| one_based(b)).collect() }, true)
        }
        Command::Certify { graph, certificate } => {
            let d = load_graph(&graph)?;
            let cert = parse_certificate(&read(&certificate)?)
                .map_err(|e| InputError(format!("{}: {e}", certificate.display())))?;
            let report = match certify(&d, &cert) {
                Ok(audit) => Report::Certify { kind: audit.kind, valid: true, value: Some(audit.value), error: None },
                Err(e) => Report::Certify { kind: cert.kind(), valid: false, value: None, error: Some(e.one_based()) },
            };
            let ok = matches!(report, Report::Certify { valid: true, .. });
            (report, ok)
        }
        Command::Gen { n, density, seed } => {
            let d = random_digraph(n, density, seed).map_err(input)?;
            (Report::Gen { n, density, seed, graph: write_graph(&d) }, true)
        }
    })
}

fn arcs_text(w: &Branching) -> String {
    let mut s = format!("b root {}\n", w.root);
    for [p, c] in &w.arcs {
        s.push_str(&format!("b {p} {c}\n"));
    }
    s
}

fn text(report: &Report) -> String {
    match report {
        Report::Solve { min_leaves: Some(m), witness: Some(w), .. } => format!("c min_leaves {m}\n{}", arcs_text(w)),
        Report::Solve { .. } => "c no out-branching\n".into(),
        Report::Check { k, answer: true, witness: Some(w) } => format!("c yes: at most {k} leaves\n{}", arcs_text(w)),
        Report::Check { k, .. } => format!("c no: every out-branching has more than {k} leaves, or none exists\n"),
        Report::Reduce { graph, dpd, certification, .. } => {
            let mut s = graph.clone();
            if let Some(dpd) = dpd {
                s.push_str(dpd);
            }
            if let Some(c) = certification {
                s.push_str(&format!("c satisfiable {}\n", c.satisfiable));
                if let Some(a) = &c.assignment {
                    let lits: Vec<String> = a.iter().map(i64::to_string).collect();
                    s.push_str(&format!("c assignment {}\n", lits.join(" ")));
                }
                if let Some(l) = c.branching_leaves {
                    s.push_str(&format!("c branching_leaves {l}\n"));
                }
                if let Some(ok) = c.decoded_satisfies {
                    s.push_str(&format!("c decoded_satisfies {ok}\n"));
                }
                s.push_str(&format!("c dpd_width {}\n", c.dpd_width));
            }
            s
        }
        Report::Dpw { width, bags } => {
            let mut s = format!("c dpw {width}\n");
            for (i, b) in bags.iter().enumerate() {
                let ids: String = b.iter().map(|v| format!(" {v}")).collect();
                s.push_str(&format!("bag {}{ids}\n", i + 1));
            }
            s
        }
        Report::Certify { kind, valid: true, value: Some(v), .. } => {
            let what = if *kind == "out-branching" { "leaves" } else { "width" };
            format!("valid {kind}: {what} {v}\n")
        }
        Report::Certify { error, .. } => format!("{}\n", error.as_deref().unwrap_or("invalid")),
        Report::Gen { graph, .. } => graph.clone(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((report, ok)) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", text(&report));
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(msg)) => {
            eprintln!("minlob: {msg}");
            ExitCode::from(2)
        }
    }
}
