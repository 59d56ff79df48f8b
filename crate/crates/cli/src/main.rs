//! Command-line runner for blocklace payment simulations.
//!
//! `run` executes one scenario file and prints its verdict and cost
//! report; `sweep` re-runs a scenario across network sizes and fits how
//! per-payment costs scale. Output for a fixed (scenario, seed) is
//! byte-stable across invocations, so saved reports and traces double as
//! regression fixtures.
//!
//! Exit codes: 0 when every verdict passes (a declared assumption
//! violation that occurs counts as passing), 1 when any verdict fails,
//! 2 for unusable input — bad flags, unreadable files, invalid scenarios.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use blocklace_netsim::{run_traced, sweep, RunResult, Scenario, Sweep};

#[derive(Parser)]
#[command(name = "blocklace", version, about = "Asynchronous payment protocol simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute one scenario and report verdict, costs, and conflicts.
    Run {
        /// Scenario file (TOML).
        path: PathBuf,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the scenario's event budget.
        #[arg(long)]
        max_events: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Directory for report.json (and trace.jsonl with --trace).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record the full event trace.
        #[arg(long)]
        trace: bool,
    },
    /// Re-run a scenario across network sizes and fit cost scaling.
    Sweep {
        /// Scenario file (TOML), used as the base at every size.
        path: PathBuf,
        /// Comma-separated network sizes, at least two (e.g. 4,8,16,32).
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        /// Seeds per size, numbered from the scenario's own seed.
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Directory for sweep.json and sweep.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Run {
            path,
            seed,
            max_events,
            format,
            out,
            trace,
        } => run_cmd(&path, seed, max_events, format, out.as_deref(), trace),
        Cmd::Sweep {
            path,
            n,
            seeds,
            format,
            out,
        } => sweep_cmd(&path, &n, seeds, format, out.as_deref()),
    }
    .unwrap_or_else(|msg| {
        eprintln!("error: {msg}");
        ExitCode::from(2)
    })
}

fn run_cmd(
    path: &Path,
    seed: Option<u64>,
    max_events: Option<u64>,
    format: Format,
    out: Option<&Path>,
    trace: bool,
) -> Result<ExitCode, String> {
    let mut scenario = Scenario::load(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    if let Some(budget) = max_events {
        scenario.max_events = budget;
    }
    scenario
        .validate()
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let result = run_traced(&scenario, trace).map_err(|e| e.to_string())?;
    print!("{}", render_run(&result, format));
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        let report = serde_json::to_string_pretty(&result).expect("report serializes");
        write_file(&dir.join("report.json"), &(report + "\n"))?;
        if trace {
            let lines: String = result.trace.iter().map(|e| e.to_line()).collect();
            write_file(&dir.join("trace.jsonl"), &lines)?;
        }
    }
    Ok(ExitCode::from(u8::try_from(result.exit_code()).unwrap_or(1)))
}

fn sweep_cmd(
    path: &Path,
    sizes: &[u32],
    seeds: u64,
    format: Format,
    out: Option<&Path>,
) -> Result<ExitCode, String> {
    if sizes.len() < 2 {
        return Err("sweep needs at least two network sizes".into());
    }
    if seeds == 0 {
        return Err("sweep needs at least one seed per size".into());
    }
    let scenario = Scenario::load(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let seed_list: Vec<u64> = (0..seeds).map(|k| scenario.seed + k).collect();
    let swept = sweep(&scenario, sizes, &seed_list).map_err(|e| e.to_string())?;
    print!("{}", render_sweep(&scenario.name, &swept, format));
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        let json = serde_json::to_string_pretty(&swept).expect("sweep serializes");
        write_file(&dir.join("sweep.json"), &(json + "\n"))?;
        write_file(&dir.join("sweep.csv"), &sweep_csv(&swept))?;
    }
    Ok(ExitCode::from(if swept.all_ok() { 0 } else { 1 }))
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

fn render_run(r: &RunResult, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("result serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from(
                "scenario,seed,n,f,verdict,messages,bytes,blocks,payments_finalized,\
                 msgs_per_payment,bytes_per_payment,retransmissions,ack_blocks,latency_rounds_max\n",
            );
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{:.6},{:.6},{},{},{}",
                r.scenario,
                r.seed,
                r.n,
                r.f,
                r.verdict.label(),
                r.report.messages,
                r.report.bytes,
                r.report.blocks,
                r.report.payments_finalized,
                r.report.msgs_per_payment,
                r.report.bytes_per_payment,
                r.report.retransmissions,
                r.report.ack_blocks,
                r.report.latency_rounds.max,
            );
            s
        }
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "scenario {} (n={} f={} seed={}) — {} events over {} ticks",
                r.scenario, r.n, r.f, r.seed, r.events, r.ticks
            );
            let _ = writeln!(s, "verdict: {}", describe_verdict(r));
            let _ = writeln!(
                s,
                "blocks {} | payments finalized {} | messages {} | bytes {}",
                r.report.blocks, r.report.payments_finalized, r.report.messages, r.report.bytes
            );
            let _ = writeln!(
                s,
                "per payment: {:.3} msgs, {:.1} bytes | retransmissions {} | acks {}",
                r.report.msgs_per_payment,
                r.report.bytes_per_payment,
                r.report.retransmissions,
                r.report.ack_blocks
            );
            let l = &r.report.latency_rounds;
            let _ = writeln!(
                s,
                "finality latency (rounds): mean {:.2}, p50 {}, p90 {}, max {} over {} blocks",
                l.mean, l.p50, l.p90, l.max, l.count
            );
            for c in &r.conflicts {
                let _ = writeln!(
                    s,
                    "conflict: {} by agent {} — side {} final at {:?}, side {} final at {:?}",
                    c.kind,
                    c.creator,
                    &c.a[..12.min(c.a.len())],
                    c.a_final_at,
                    &c.b[..12.min(c.b.len())],
                    c.b_final_at
                );
            }
            if !r.note_counts.is_empty() {
                let notes: Vec<String> = r
                    .note_counts
                    .iter()
                    .map(|(k, v)| format!("{k} x{v}"))
                    .collect();
                let _ = writeln!(s, "notes: {}", notes.join(", "));
            }
            s
        }
    }
}

fn describe_verdict(r: &RunResult) -> String {
    match serde_json::to_value(&r.verdict) {
        Ok(serde_json::Value::Object(map)) => match map.get("detail") {
            Some(serde_json::Value::String(detail)) => {
                format!("{} — {detail}", r.verdict.label())
            }
            _ => r.verdict.label().to_string(),
        },
        _ => r.verdict.label().to_string(),
    }
}

fn render_sweep(name: &str, sw: &Sweep, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(sw).expect("sweep serializes");
            s.push('\n');
            s
        }
        Format::Csv => sweep_csv(sw),
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "sweep of {name}: {} sizes", sw.points.len());
            let _ = writeln!(
                s,
                "{:>4} {:>5} {:>18} {:>18} {:>10} {:>6}",
                "n", "runs", "msgs/payment", "bytes/payment", "payments", "ok"
            );
            for p in &sw.points {
                let _ = writeln!(
                    s,
                    "{:>4} {:>5} {:>18.3} {:>18.1} {:>10} {:>6}",
                    p.n,
                    p.runs,
                    p.msgs_per_payment,
                    p.bytes_per_payment,
                    p.payments_finalized,
                    if p.all_ok { "yes" } else { "NO" }
                );
            }
            if let Some(fit) = &sw.msgs_fit {
                let _ = writeln!(
                    s,
                    "messages/payment ~ n^{:.3} (r2 {:.4})",
                    fit.slope, fit.r2
                );
            }
            if let Some(fit) = &sw.bytes_fit {
                let _ = writeln!(s, "bytes/payment ~ n^{:.3} (r2 {:.4})", fit.slope, fit.r2);
            }
            s
        }
    }
}

fn sweep_csv(sw: &Sweep) -> String {
    let mut s = String::from("n,runs,msgs_per_payment,bytes_per_payment,payments_finalized,all_ok\n");
    for p in &sw.points {
        let _ = writeln!(
            s,
            "{},{},{:.6},{:.6},{},{}",
            p.n, p.runs, p.msgs_per_payment, p.bytes_per_payment, p.payments_finalized, p.all_ok
        );
    }
    s
}
