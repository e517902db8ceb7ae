use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use swcrdsa::analytics::{p_first, p_i, p_not, p_uins_fr, p_uins_sw};
use swcrdsa::decoder::TraceEvent;
use swcrdsa::experiment::{
    compare_with_oracle, histogram_csv, load_config, parse_placements, parse_trace,
    placements_csv, run_single, run_sweep, summary_csv, summary_json, write_sweep_outputs,
    SummaryRow, SweepPoint,
};
use swcrdsa::metrics::{delay_distribution, RunSummary};

#[derive(Parser)]
#[command(name = "swcrdsa", version, about = "Framed vs sliding-window CRDSA/IRSA simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single run at the first lambda and seed of the config; writes the
    /// summary row and the full delay histogram.
    Run {
        config: PathBuf,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Arrival-rate sweep over every mode, distribution, lambda and seed.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Prints the per-slot placement probability terms for FR and SW.
    Analytic { l: u64, n_f: u64, n_sw: u64 },
    /// Re-decodes a placement trace with the brute-force oracle and diffs
    /// it against a decoder event trace (or the streaming decoder).
    Oracle {
        trace: PathBuf,
        #[arg(long)]
        events: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> swcrdsa::Result<ExitCode> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Run { config, no_timestamp } => {
            let spec = load_config(&config)?;
            let (result, events) = run_single(&spec)?;
            let summary = RunSummary::of(&result);
            let point = SweepPoint {
                mode: spec.modes[0],
                dist: 0,
                lambda: spec.lambdas[0],
            };
            let row = SummaryRow::from_runs(&spec, point, &[summary]);
            let csv = summary_csv(std::slice::from_ref(&row), !no_timestamp);
            match &spec.output {
                Some(p) => std::fs::write(p, csv)?,
                None => out.write_all(csv.as_bytes())?,
            }
            if let Some(p) = &spec.json {
                std::fs::write(p, summary_json(&spec, std::slice::from_ref(&row))?)?;
            }
            let hist = histogram_csv(&delay_distribution(&result, spec.bin_width_ms));
            match &spec.histograms {
                Some(p) => std::fs::write(p, hist)?,
                None => {
                    writeln!(out)?;
                    out.write_all(hist.as_bytes())?;
                }
            }
            if let Some(p) = &spec.trace {
                let mut buf = Vec::new();
                writeln!(buf, "{}", TraceEvent::CSV_HEADER)?;
                for e in &events {
                    e.write_csv(&mut buf)?;
                }
                std::fs::write(p, buf)?;
            }
            if let Some(p) = &spec.placements {
                std::fs::write(p, placements_csv(&result))?;
            }
            let stats = result.decoder_stats;
            if stats.cap_hits > 0 {
                eprintln!(
                    "warning: IC iteration cap reached in {} peel(s)",
                    stats.cap_hits
                );
            }
        }
        Command::Sweep { config, no_timestamp } => {
            let spec = load_config(&config)?;
            let output = run_sweep(&spec)?;
            write_sweep_outputs(&spec, &output, !no_timestamp, &mut out)?;
        }
        Command::Analytic { l, n_f, n_sw } => {
            if !(1 <= l && l <= n_sw && n_sw <= n_f) {
                eprintln!("error: need 1 <= l <= N_sw <= N_f");
                return Ok(ExitCode::FAILURE);
            }
            writeln!(out, "l={l} N_f={n_f} N_sw={n_sw}")?;
            writeln!(out, "FR terms (N = N_f = {n_f}):")?;
            for i in 1..=l {
                let (pn, pi) = (p_not(i - 1, n_f), p_i(i, n_f));
                writeln!(out, "  i={i}  P_NOT({})={pn:.12}  P_{i}={pi:.12}  product={:.12}", i - 1, pn * pi)?;
            }
            writeln!(out, "SW terms (first replica over N_f, others over N_sw - 1 = {}):", n_sw - 1)?;
            writeln!(out, "  P_1^N_f={:.12}  P_first={:.12}", p_i(1, n_f), p_first(n_sw, n_f))?;
            for k in 1..l {
                let m = n_sw - 1;
                let (pn, pi) = (p_not(k - 1, m), p_i(k, m));
                writeln!(out, "  replica {}  P_NOT({})={pn:.12}  P_{k}={pi:.12}  product={:.12}", k + 1, k - 1, pn * pi)?;
            }
            let fr = p_uins_fr(l, n_f);
            let sw = p_uins_sw(l, n_f, n_sw);
            let target = l as f64 / n_f as f64;
            writeln!(out, "P_UinS FR = {fr:.15}")?;
            writeln!(out, "P_UinS SW = {sw:.15}")?;
            writeln!(out, "l / N_f   = {target:.15}")?;
            let equal = (fr - target).abs() < 1e-12 && (sw - target).abs() < 1e-12;
            writeln!(out, "equal: {equal}")?;
            if !equal {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Oracle { trace, events } => {
            let rows = parse_placements(&std::fs::read_to_string(&trace)?)?;
            let events = match &events {
                Some(p) => Some(parse_trace(&std::fs::read_to_string(p)?)?),
                None => None,
            };
            let report = compare_with_oracle(&rows, events.as_deref())?;
            writeln!(out, "packets: {}", report.packets)?;
            writeln!(out, "oracle decoded: {}", report.oracle_decoded.len())?;
            writeln!(out, "decoder decoded: {}", report.decoder_decoded.len())?;
            writeln!(out, "residual is a stopping set: {}", report.residual_is_stopping_set)?;
            let only_oracle = report.only_oracle();
            let only_decoder = report.only_decoder();
            for id in &only_oracle {
                writeln!(out, "- {id} decoded by oracle only")?;
            }
            for id in &only_decoder {
                writeln!(out, "+ {id} decoded by decoder only")?;
            }
            writeln!(out, "agree: {}", report.agrees())?;
            // with a finite receiver memory the decoder may legitimately
            // decode less than the oracle, never more
            if !only_decoder.is_empty() || !report.residual_is_stopping_set {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
