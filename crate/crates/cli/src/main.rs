use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use termcert::checker::{check, Problem, Verdict};
use termcert::dp::{mark, mkdp, unmark_root};
use termcert::graph::build_graph;
use termcert::io::trs::rule_to_string;
use termcert::io::{parse_certificate, parse_trs, NameTable};
use termcert::rewrite::Trs;
use termcert::term::Rule;
use termcert::unify::Approx;

const ACCEPTED: u8 = 0;
const REJECTED: u8 = 1;
const INPUT_ERROR: u8 = 2;

/// Checks termination certificates for first-order rewrite systems.
#[derive(Parser)]
#[command(name = "termcert", version)]
struct Cli {
    /// Print a JSON report on standard output instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one or more certificates against a rewrite system.
    Check {
        trs: PathBuf,
        #[arg(required = true)]
        certs: Vec<PathBuf>,
    },
    /// Print the marked dependency pairs of a rewrite system.
    Dp { trs: PathBuf },
    /// Print the approximated dependency graph and its strongly connected components.
    Graph {
        trs: PathBuf,
        #[arg(long, default_value = "hde")]
        approx: Approx,
    },
}

struct InputError(String);

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_trs(path: &Path) -> Result<(Trs, NameTable), InputError> {
    parse_trs(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_pairs(path: &Path) -> Result<(Trs, Vec<Rule>, Vec<String>), InputError> {
    let (trs, names) = load_trs(path)?;
    let marked =
        mark(&trs, &mkdp(&trs)).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let shown = marked
        .pairs
        .iter()
        .map(|p| {
            let lhs = unmark_root(&p.lhs);
            let origin = trs.rules().iter().position(|r| r.lhs == lhs);
            let var_names = origin.map(|i| names.rule_vars(i)).unwrap_or(&[]);
            rule_to_string(p, var_names)
        })
        .collect();
    Ok((marked.trs, marked.pairs, shown))
}

fn check_one(trs: &Trs, names: &NameTable, cert: &Path) -> Result<Verdict, InputError> {
    let proof = parse_certificate(&read(cert)?, trs.sig(), names)
        .map_err(|e| InputError(format!("{}: {e}", cert.display())))?;
    Ok(check(&Problem::Full(trs.clone()), &proof))
}

fn cmd_check(trs_path: &Path, certs: &[PathBuf], json: bool) -> u8 {
    let (trs, names) = match load_trs(trs_path) {
        Ok(x) => x,
        Err(e) => return report_error(&e, json),
    };
    let results: Vec<Result<Verdict, InputError>> = thread::scope(|s| {
        let handles: Vec<_> = certs
            .iter()
            .map(|c| s.spawn(|| check_one(&trs, &names, c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("checker thread"))
            .collect()
    });

    let mut status = ACCEPTED;
    let mut reports = Vec::new();
    for (cert, result) in certs.iter().zip(&results) {
        let label = if certs.len() > 1 {
            format!("{}: ", cert.display())
        } else {
            String::new()
        };
        let (code, report) = match result {
            Ok(Verdict::Accepted) => {
                if !json {
                    println!("{label}ACCEPTED");
                }
                (ACCEPTED, json!({ "file": cert, "verdict": "accepted" }))
            }
            Ok(Verdict::Rejected { path, reason }) => {
                if !json {
                    println!("{label}REJECTED");
                    eprintln!("{label}rejected at {path}: {reason}");
                }
                let steps: Vec<String> = path.steps().iter().map(|s| s.to_string()).collect();
                (
                    REJECTED,
                    json!({
                        "file": cert,
                        "verdict": "rejected",
                        "path": path.to_string(),
                        "steps": steps,
                        "reason": reason.to_string(),
                    }),
                )
            }
            Err(InputError(msg)) => {
                if !json {
                    eprintln!("error: {msg}");
                }
                (
                    INPUT_ERROR,
                    json!({ "file": cert, "verdict": "error", "error": msg }),
                )
            }
        };
        status = status.max(code);
        reports.push(report);
    }
    if json {
        let out = if reports.len() == 1 {
            reports.pop().unwrap()
        } else {
            Value::Array(reports)
        };
        println!("{out}");
    }
    status
}

fn cmd_dp(trs_path: &Path, json: bool) -> Result<(), InputError> {
    let (_, _, shown) = load_pairs(trs_path)?;
    if json {
        println!("{}", json!({ "pairs": shown }));
    } else {
        for p in shown {
            println!("{p}");
        }
    }
    Ok(())
}

fn cmd_graph(trs_path: &Path, approx: Approx, json: bool) -> Result<(), InputError> {
    let (modulo, pairs, shown) = load_pairs(trs_path)?;
    let graph = build_graph(approx.edge(&modulo), &pairs);
    let edges: Vec<(usize, usize)> = graph.edges().collect();
    let sccs = graph.sccs();
    if json {
        let report = json!({
            "approx": approx.name(),
            "nodes": shown,
            "edges": edges,
            "sccs": sccs,
            "acyclic": graph.is_acyclic(),
        });
        println!("{report}");
        return Ok(());
    }
    println!("approximation: {}", approx.name());
    println!("nodes:");
    for (i, p) in shown.iter().enumerate() {
        println!("  {i}: {p}");
    }
    println!("edges:");
    for (i, j) in &edges {
        println!("  {i} -> {j}");
    }
    println!("sccs:");
    for c in &sccs {
        let members: Vec<String> = c.iter().map(|i| i.to_string()).collect();
        println!("  {{{}}}", members.join(", "));
    }
    Ok(())
}

fn report_error(e: &InputError, json: bool) -> u8 {
    if json {
        println!("{}", json!({ "verdict": "error", "error": e.0 }));
    } else {
        eprintln!("error: {}", e.0);
    }
    INPUT_ERROR
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT_ERROR } else { 0 });
        }
    };
    let code = match &cli.command {
        Command::Check { trs, certs } => cmd_check(trs, certs, cli.json),
        Command::Dp { trs } => {
            cmd_dp(trs, cli.json).map_or_else(|e| report_error(&e, cli.json), |()| 0)
        }
        Command::Graph { trs, approx } => {
            cmd_graph(trs, *approx, cli.json).map_or_else(|e| report_error(&e, cli.json), |()| 0)
        }
    };
    ExitCode::from(code)
}
