//! Experiment files, arrival-rate sweeps and result files.
//!
//! An experiment is a flat `key=value` text file, one key per line, `#`
//! starting a comment:
//!
//! ```text
//! mode=SW            # FR, SW, or a list such as FR,SW
//! window=100         # N_f for FR, N_sw for SW
//! n_rx=500           # SW receiver memory (default 5 * window)
//! dist=crdsa2        # crdsa<l>, irsa4, irsa8, sa or inline 2:0.5,3:0.28,8:0.22
//!                    # several: crdsa2,irsa4 (inline ones separated by ;)
//! lambda=0.1:1.2:0.1 # single value, list, or start:stop:step
//! total_slots=100000
//! seed=1             # base seed, or an explicit list
//! seeds=5            # replications: seeds base, base+1, ...
//! ```
//!
//! Optional keys and their defaults: `i_max=50`, `warmup=10*window`,
//! `slot_ms=1`, `prop_ms=250`, `bin_width_ms=1`, and the output paths
//! `output` (summary CSV, stdout if absent), `json`, `histograms` (a file
//! for `run`, a directory for `sweep`), `trace` and `placements` (`run`
//! only).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::oracle_decode;
use crate::decoder::{decode_placements, TraceEvent};
use crate::engine::{run_simulation, run_simulation_traced, RunResult};
use crate::error::{Error, Result};
use crate::metrics::{delay_distribution, DelayDistribution, RunSummary};
use crate::model::{
    AccessMode, DegreeDistribution, PacketId, SchemeConfig, SlotIndex, TimeConfig, TrafficConfig,
    DEFAULT_MAX_IC_ITERATIONS,
};

pub const SUMMARY_HEADER: &str = "lambda,mode,dist,window,n_rx,seeds,throughput_mean,throughput_sd,loss_rate_mean,delay_mean_ms,delay_p50_ms,delay_p95_ms,delay_p99_ms";
pub const HISTOGRAM_HEADER: &str = "delay_ms,count,pdf,cdf";
pub const PLACEMENT_HEADER: &str = "packet_id,arrival_slot,replica_slots";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedDistribution {
    pub name: String,
    pub distribution: DegreeDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub modes: Vec<AccessMode>,
    pub window: u32,
    /// Receiver memory used by SW points; FR points always use `window`.
    pub n_rx: u32,
    pub dists: Vec<NamedDistribution>,
    pub max_ic_iterations: u32,
    pub lambdas: Vec<f64>,
    pub total_slots: u64,
    pub warmup_slots: u64,
    pub seeds: Vec<u64>,
    pub time: TimeConfig,
    pub bin_width_ms: f64,
    pub output: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub histograms: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub placements: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn scheme(&self, mode: AccessMode, dist: &DegreeDistribution) -> SchemeConfig {
        let scheme = match mode {
            AccessMode::Framed => SchemeConfig::framed(self.window, dist.clone()),
            AccessMode::SlidingWindow => SchemeConfig::sliding(self.window, self.n_rx, dist.clone()),
        };
        scheme.with_max_ic_iterations(self.max_ic_iterations)
    }

    pub fn traffic(&self, lambda: f64, seed: u64) -> TrafficConfig {
        TrafficConfig::new(lambda, self.total_slots, self.warmup_slots, seed)
    }

    /// Every (mode, distribution, λ̄) point, in output order.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut points = Vec::new();
        for &mode in &self.modes {
            for dist in 0..self.dists.len() {
                for &lambda in &self.lambdas {
                    points.push(SweepPoint { mode, dist, lambda });
                }
            }
        }
        points
    }
}

const KEYS: &[&str] = &[
    "mode",
    "window",
    "n_rx",
    "dist",
    "i_max",
    "lambda",
    "total_slots",
    "warmup",
    "seed",
    "seeds",
    "slot_ms",
    "prop_ms",
    "bin_width_ms",
    "output",
    "json",
    "histograms",
    "trace",
    "placements",
];

/// Parses the flat key=value experiment format.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected key=value, got `{line}`"),
        })?;
        let key = key.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("unknown key `{key}`"),
            });
        }
        if let Some((first, _)) = kv.get(&key) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate key `{key}` (first set on line {first})"),
            });
        }
        kv.insert(key, (line_no, value.trim().to_string()));
    }
    let last_line = text.lines().count();

    let required = |key: &str| -> Result<(usize, &str)> {
        kv.get(key)
            .map(|(l, v)| (*l, v.as_str()))
            .ok_or_else(|| Error::Parse {
                line: last_line,
                msg: format!("missing required key `{key}`"),
            })
    };
    let optional = |key: &str| kv.get(key).map(|(l, v)| (*l, v.as_str()));
    let bad = |line: usize, msg: String| Error::Parse { line, msg };

    let (line, v) = required("mode")?;
    let modes = v
        .split(',')
        .map(|m| m.parse::<AccessMode>().map_err(|e| bad(line, e.to_string())))
        .collect::<Result<Vec<_>>>()?;

    let (window_line, v) = required("window")?;
    let window = parse_num::<u32>(v, window_line)?;
    if window == 0 {
        return Err(bad(window_line, "window must be at least 1 slot".into()));
    }

    let n_rx = match optional("n_rx") {
        Some((line, v)) => {
            let n_rx = parse_num::<u32>(v, line)?;
            if modes.contains(&AccessMode::SlidingWindow) && n_rx < window {
                return Err(bad(line, format!("n_rx ({n_rx}) must be at least window ({window})")));
            }
            n_rx
        }
        None => window.saturating_mul(5),
    };

    let dists = match optional("dist") {
        Some((line, v)) => v
            .split(';')
            .flat_map(split_dist_list)
            .map(|name| {
                let distribution =
                    DegreeDistribution::by_name(&name).map_err(|e| bad(line, e.to_string()))?;
                if distribution.max_degree() > window {
                    return Err(bad(
                        line,
                        format!(
                            "max degree {} of `{name}` exceeds window {window}",
                            distribution.max_degree()
                        ),
                    ));
                }
                Ok(NamedDistribution { name, distribution })
            })
            .collect::<Result<Vec<_>>>()?,
        None => vec![NamedDistribution {
            name: "crdsa2".into(),
            distribution: DegreeDistribution::regular(2)?,
        }],
    };
    if dists.is_empty() {
        return Err(bad(optional("dist").map_or(0, |d| d.0), "empty distribution list".into()));
    }

    let max_ic_iterations = match optional("i_max") {
        Some((line, v)) => {
            let n = parse_num::<u32>(v, line)?;
            if n == 0 {
                return Err(bad(line, "i_max must be positive".into()));
            }
            n
        }
        None => DEFAULT_MAX_IC_ITERATIONS,
    };

    let (line, v) = required("lambda")?;
    let lambdas = parse_lambdas(v).map_err(|msg| bad(line, msg))?;

    let (total_line, v) = required("total_slots")?;
    let total_slots = parse_num::<u64>(v, total_line)?;
    if total_slots == 0 {
        return Err(bad(total_line, "total_slots must be positive".into()));
    }
    let (warmup_line, warmup_slots) = match optional("warmup") {
        Some((line, v)) => (line, parse_num::<u64>(v, line)?),
        None => (total_line, 10 * window as u64),
    };
    if warmup_slots >= total_slots {
        return Err(bad(
            warmup_line,
            format!("warmup ({warmup_slots}) must be shorter than total_slots ({total_slots})"),
        ));
    }

    let base_seeds = match optional("seed") {
        Some((line, v)) => v
            .split(',')
            .map(|s| parse_num::<u64>(s, line))
            .collect::<Result<Vec<_>>>()?,
        None => vec![1],
    };
    let seeds = match optional("seeds") {
        Some((line, v)) => {
            let count = parse_num::<u64>(v, line)?;
            if count == 0 {
                return Err(bad(line, "seeds must be at least 1".into()));
            }
            if base_seeds.len() > 1 {
                return Err(bad(line, "give either a seed list or a seed count, not both".into()));
            }
            (0..count).map(|i| base_seeds[0].wrapping_add(i)).collect()
        }
        None => base_seeds,
    };

    let mut time = TimeConfig::default();
    if let Some((line, v)) = optional("slot_ms") {
        time.slot_duration_ms = parse_num(v, line)?;
    }
    if let Some((line, v)) = optional("prop_ms") {
        time.propagation_delay_ms = parse_num(v, line)?;
    }
    time.validate().map_err(|e| {
        let line = optional("slot_ms").or(optional("prop_ms")).map_or(0, |x| x.0);
        bad(line, e.to_string())
    })?;

    let bin_width_ms = match optional("bin_width_ms") {
        Some((line, v)) => {
            let w: f64 = parse_num(v, line)?;
            if !(w > 0.0) {
                return Err(bad(line, "bin_width_ms must be positive".into()));
            }
            w
        }
        None => time.slot_duration_ms,
    };

    let path = |key: &str| optional(key).map(|(_, v)| PathBuf::from(v));
    Ok(ExperimentSpec {
        modes,
        window,
        n_rx,
        dists,
        max_ic_iterations,
        lambdas,
        total_slots,
        warmup_slots,
        seeds,
        time,
        bin_width_ms,
        output: path("output"),
        json: path("json"),
        histograms: path("histograms"),
        trace: path("trace"),
        placements: path("placements"),
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentSpec> {
    parse_config(&std::fs::read_to_string(path)?)
}

fn parse_num<T: std::str::FromStr>(v: &str, line: usize) -> Result<T> {
    v.trim().parse::<T>().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse `{}` as a number", v.trim()),
    })
}

// Splits "crdsa2,irsa4" into names but keeps inline "2:0.5,4:0.5" whole.
fn split_dist_list(v: &str) -> Vec<String> {
    let v = v.trim();
    if v.is_empty() {
        return Vec::new();
    }
    if v.contains(':') {
        vec![v.to_string()]
    } else {
        v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
    }
}

fn parse_lambdas(v: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("cannot parse `{}` as an arrival rate", s.trim()))
    };
    let lambdas: Vec<f64> = if v.contains(':') {
        let parts: Vec<&str> = v.split(':').collect();
        if parts.len() != 3 {
            return Err("range must be start:stop:step".into());
        }
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err("range needs step > 0 and stop >= start".into());
        }
        let n = ((stop - start) / step + 1e-9).floor() as u64;
        (0..=n)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect()
    } else {
        v.split(',').map(num).collect::<std::result::Result<_, _>>()?
    };
    if lambdas.is_empty() {
        return Err("no arrival rates given".into());
    }
    if let Some(bad) = lambdas.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
        return Err(format!("arrival rate {bad} must be finite and non-negative"));
    }
    Ok(lambdas)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub mode: AccessMode,
    /// Index into `ExperimentSpec::dists`.
    pub dist: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub lambda: f64,
    pub mode: AccessMode,
    pub dist: String,
    pub window: u32,
    pub n_rx: u32,
    pub seeds: usize,
    pub throughput_mean: f64,
    pub throughput_sd: f64,
    pub loss_rate_mean: f64,
    pub delay_mean_ms: f64,
    pub delay_p50_ms: f64,
    pub delay_p95_ms: f64,
    pub delay_p99_ms: f64,
}

impl SummaryRow {
    pub fn from_runs(spec: &ExperimentSpec, point: SweepPoint, runs: &[RunSummary]) -> Self {
        let tp: Vec<f64> = runs.iter().map(|r| r.throughput).collect();
        let throughput_mean = mean(&tp);
        let throughput_sd = if tp.len() > 1 {
            (tp.iter().map(|t| (t - throughput_mean).powi(2)).sum::<f64>() / (tp.len() - 1) as f64)
                .sqrt()
        } else {
            0.0
        };
        let finite_mean = |f: fn(&RunSummary) -> f64| {
            let v: Vec<f64> = runs.iter().map(f).filter(|x| !x.is_nan()).collect();
            if v.is_empty() {
                f64::NAN
            } else {
                mean(&v)
            }
        };
        SummaryRow {
            lambda: point.lambda,
            mode: point.mode,
            dist: spec.dists[point.dist].name.clone(),
            window: spec.window,
            n_rx: match point.mode {
                AccessMode::Framed => spec.window,
                AccessMode::SlidingWindow => spec.n_rx,
            },
            seeds: runs.len(),
            throughput_mean,
            throughput_sd,
            loss_rate_mean: mean(&runs.iter().map(|r| r.loss_rate).collect::<Vec<_>>()),
            delay_mean_ms: finite_mean(|r| r.delay_mean_ms),
            delay_p50_ms: finite_mean(|r| r.delay_p50_ms),
            delay_p95_ms: finite_mean(|r| r.delay_p95_ms),
            delay_p99_ms: finite_mean(|r| r.delay_p99_ms),
        }
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.lambda,
            self.mode,
            self.dist.replace(',', ";"),
            self.window,
            self.n_rx,
            self.seeds,
            fmt6(self.throughput_mean),
            fmt6(self.throughput_sd),
            fmt6(self.loss_rate_mean),
            fmt6(self.delay_mean_ms),
            fmt6(self.delay_p50_ms),
            fmt6(self.delay_p95_ms),
            fmt6(self.delay_p99_ms),
        )
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn fmt6(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.6}")
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub point: SweepPoint,
    pub seed: u64,
    pub summary: RunSummary,
    pub histogram: Option<DelayDistribution>,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SummaryRow>,
    pub runs: Vec<RunRecord>,
}

impl SweepOutput {
    pub fn rows_for(&self, mode: AccessMode, dist: &str) -> impl Iterator<Item = &SummaryRow> {
        let dist = dist.to_string();
        self.rows
            .iter()
            .filter(move |r| r.mode == mode && r.dist == dist)
    }

    /// Highest mean throughput over the λ̄ grid for one curve.
    pub fn peak_throughput(&self, mode: AccessMode, dist: &str) -> Option<f64> {
        self.rows_for(mode, dist)
            .map(|r| r.throughput_mean)
            .fold(None, |m, t| Some(m.map_or(t, |m: f64| m.max(t))))
    }
}

/// Runs every (mode, distribution, λ̄, seed) combination, in parallel, and
/// reduces the seeds of each point to one summary row.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepOutput> {
    let keep_histograms = spec.histograms.is_some();
    let jobs: Vec<(SweepPoint, u64)> = spec
        .points()
        .into_iter()
        .flat_map(|p| spec.seeds.iter().map(move |&s| (p, s)))
        .collect();
    let results: Vec<Result<RunRecord>> = jobs
        .par_iter()
        .map(|&(point, seed)| {
            let scheme = spec.scheme(point.mode, &spec.dists[point.dist].distribution);
            let run = run_simulation(&scheme, &spec.traffic(point.lambda, seed), &spec.time)
                .map_err(|e| Error::SweepPoint {
                    lambda: point.lambda,
                    seed,
                    source: Box::new(e),
                })?;
            Ok(RunRecord {
                point,
                seed,
                summary: RunSummary::of(&run),
                histogram: keep_histograms.then(|| delay_distribution(&run, spec.bin_width_ms)),
            })
        })
        .collect();
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;

    let rows = runs
        .chunks(spec.seeds.len())
        .map(|chunk| {
            let summaries: Vec<RunSummary> = chunk.iter().map(|r| r.summary).collect();
            SummaryRow::from_runs(spec, chunk[0].point, &summaries)
        })
        .collect();
    Ok(SweepOutput { rows, runs })
}

/// One full run at the first λ̄ and seed of the experiment, with trace events
/// collected when `spec.trace` is set.
pub fn run_single(spec: &ExperimentSpec) -> Result<(RunResult, Vec<TraceEvent>)> {
    let mode = spec.modes[0];
    let scheme = spec.scheme(mode, &spec.dists[0].distribution);
    let traffic = spec.traffic(spec.lambdas[0], spec.seeds[0]);
    let mut events = Vec::new();
    let run = if spec.trace.is_some() {
        run_simulation_traced(&scheme, &traffic, &spec.time, |e| events.push(*e))?
    } else {
        run_simulation(&scheme, &traffic, &spec.time)?
    };
    Ok((run, events))
}

pub fn summary_csv(rows: &[SummaryRow], timestamp: bool) -> String {
    let mut out = String::new();
    if timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        let _ = writeln!(out, "# generated_unix={secs}");
    }
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

pub fn summary_json(spec: &ExperimentSpec, rows: &[SummaryRow]) -> Result<String> {
    #[derive(Serialize)]
    struct Doc<'a> {
        config: &'a ExperimentSpec,
        rows: &'a [SummaryRow],
    }
    Ok(serde_json::to_string_pretty(&Doc { config: spec, rows })?)
}

pub fn histogram_csv(d: &DelayDistribution) -> String {
    let mut out = String::from(HISTOGRAM_HEADER);
    out.push('\n');
    for b in &d.bins {
        let _ = writeln!(out, "{},{},{:.9},{:.9}", b.delay_ms, b.count, b.pdf, b.cdf);
    }
    out
}

/// File name used for one run's histogram inside a sweep's histogram
/// directory.
pub fn histogram_file_name(spec: &ExperimentSpec, record: &RunRecord) -> String {
    format!(
        "hist_{}_{}_lambda{}_seed{}.csv",
        record.point.mode,
        spec.dists[record.point.dist].name.replace([':', ',', ' '], "_"),
        record.point.lambda,
        record.seed
    )
}

/// Writes the sweep's summary CSV (to `spec.output` or `stdout`), JSON
/// summary and per-run histograms as configured.
pub fn write_sweep_outputs<W: Write>(
    spec: &ExperimentSpec,
    out: &SweepOutput,
    timestamp: bool,
    stdout: &mut W,
) -> Result<()> {
    let csv = summary_csv(&out.rows, timestamp);
    match &spec.output {
        Some(path) => std::fs::write(path, csv)?,
        None => stdout.write_all(csv.as_bytes())?,
    }
    if let Some(path) = &spec.json {
        std::fs::write(path, summary_json(spec, &out.rows)?)?;
    }
    if let Some(dir) = &spec.histograms {
        std::fs::create_dir_all(dir)?;
        for record in &out.runs {
            if let Some(h) = &record.histogram {
                std::fs::write(dir.join(histogram_file_name(spec, record)), histogram_csv(h))?;
            }
        }
    }
    Ok(())
}

pub fn placements_csv(run: &RunResult) -> String {
    let mut out = String::from(PLACEMENT_HEADER);
    out.push('\n');
    for p in &run.packets {
        let slots: Vec<String> = p.replica_slots.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(out, "{},{},{}", p.id, p.arrival_slot, slots.join(";"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementRow {
    pub packet_id: PacketId,
    pub arrival_slot: SlotIndex,
    pub replica_slots: Vec<SlotIndex>,
}

pub fn parse_placements(text: &str) -> Result<Vec<PlacementRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == PLACEMENT_HEADER {
            continue;
        }
        let bad = |msg: &str| Error::Parse {
            line: line_no,
            msg: msg.to_string(),
        };
        let mut f = line.split(',');
        let id = f.next().and_then(|x| x.trim().parse().ok()).ok_or_else(|| bad("bad packet_id"))?;
        let arrival = f.next().and_then(|x| x.trim().parse().ok()).ok_or_else(|| bad("bad arrival_slot"))?;
        let mut slots = f
            .next()
            .ok_or_else(|| bad("missing replica_slots"))?
            .split(';')
            .map(|s| s.trim().parse::<SlotIndex>().map_err(|_| bad("bad replica slot")))
            .collect::<Result<Vec<_>>>()?;
        slots.sort_unstable();
        if slots.windows(2).any(|w| w[0] == w[1]) {
            return Err(bad("repeated replica slot"));
        }
        rows.push(PlacementRow {
            packet_id: PacketId(id),
            arrival_slot: arrival,
            replica_slots: slots,
        });
    }
    Ok(rows)
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceEvent>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#') && l != TraceEvent::CSV_HEADER
        })
        .map(|(i, l)| {
            TraceEvent::parse_csv(l).ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("bad trace line `{l}`"),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub packets: usize,
    pub oracle_decoded: BTreeSet<PacketId>,
    pub decoder_decoded: BTreeSet<PacketId>,
    pub residual_is_stopping_set: bool,
}

impl OracleReport {
    pub fn only_oracle(&self) -> Vec<PacketId> {
        self.oracle_decoded.difference(&self.decoder_decoded).copied().collect()
    }

    pub fn only_decoder(&self) -> Vec<PacketId> {
        self.decoder_decoded.difference(&self.oracle_decoded).copied().collect()
    }

    pub fn agrees(&self) -> bool {
        self.oracle_decoded == self.decoder_decoded
    }
}

/// Re-decodes a placement trace with the oracle and compares against
/// `events` (a decoder trace), or, when `events` is `None`, against the
/// streaming decoder run with memory spanning the whole trace.
pub fn compare_with_oracle(rows: &[PlacementRow], events: Option<&[TraceEvent]>) -> Result<OracleReport> {
    let placements: Vec<Vec<SlotIndex>> = rows.iter().map(|r| r.replica_slots.clone()).collect();
    let outcome = oracle_decode(&placements);
    let oracle_decoded = outcome.decoded.iter().map(|&i| rows[i].packet_id).collect();
    let decoder_decoded = match events {
        Some(events) => events
            .iter()
            .filter_map(|e| match e {
                TraceEvent::Decoded(d) => Some(d.packet_id),
                TraceEvent::Lost(_) => None,
            })
            .collect(),
        None => {
            let span = placements
                .iter()
                .flatten()
                .fold((SlotIndex::MAX, 0), |(lo, hi), &s| (lo.min(s), hi.max(s)));
            let capacity = if span.0 > span.1 { 1 } else { (span.1 - span.0 + 1) as usize };
            decode_placements(&placements, capacity, u32::MAX)?
                .iter()
                .map(|e| rows[e.packet_id.0 as usize].packet_id)
                .collect()
        }
    };
    Ok(OracleReport {
        packets: rows.len(),
        oracle_decoded,
        decoder_decoded,
        residual_is_stopping_set: outcome.residual_is_stopping_set(&placements),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SW_DELAY_RUN: &str = "mode=SW\nwindow=100\nn_rx=500\ndist=crdsa2\nlambda=0.6\ntotal_slots=100000\nseed=1";

    #[test]
    fn parses_minimal_sw_spec() {
        let spec = parse_config(SW_DELAY_RUN).unwrap();
        assert_eq!(spec.modes, vec![AccessMode::SlidingWindow]);
        assert_eq!((spec.window, spec.n_rx), (100, 500));
        assert_eq!(spec.lambdas, vec![0.6]);
        assert_eq!(spec.seeds, vec![1]);
        assert_eq!(spec.warmup_slots, 1000);
        assert_eq!(spec.max_ic_iterations, 50);
        assert_eq!(spec.time, TimeConfig::default());
        assert_eq!(spec.dists[0].distribution, DegreeDistribution::regular(2).unwrap());
    }

    #[test]
    fn fr_with_irsa8() {
        let spec = parse_config("mode=FR\nwindow=100\ndist=irsa8\nlambda=0.5\ntotal_slots=5000").unwrap();
        assert_eq!(spec.dists[0].distribution.max_degree(), 8);
    }

    #[test]
    fn degree_larger_than_window() {
        let err = parse_config("mode=SW\nwindow=4\ndist=irsa8\nlambda=0.5\ntotal_slots=5000").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("exceeds window 4"), "{msg}");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("mode=SW\nwindow=10\nbogus=1\nlambda=1\ntotal_slots=100", 3, "unknown key"),
            ("# c\nmode=XX\nwindow=10\nlambda=1\ntotal_slots=100", 2, "unknown mode"),
            ("mode=SW\nwindow=10\nn_rx=5\nlambda=1\ntotal_slots=100", 3, "n_rx"),
            ("mode=SW\nwindow=10\nlambda=1\ntotal_slots=100\nwarmup=100", 5, "warmup"),
            ("mode=SW\nwindow=10\nlambda=-1\ntotal_slots=100", 3, "non-negative"),
            ("mode=SW\nwindow=10\nlambda=1\nlambda=2\ntotal_slots=100", 4, "duplicate"),
            ("mode=SW\nwindow=0\nlambda=1\ntotal_slots=100", 2, "window"),
            ("mode=SW\nwindow=10\nlambda=1\ntotal_slots=1000\nprop_ms=-3", 5, "propagation"),
        ];
        for (text, want_line, want_msg) in cases {
            match parse_config(text) {
                Err(Error::Parse { line, msg }) => {
                    assert_eq!(line, want_line, "{text}: {msg}");
                    assert!(msg.contains(want_msg), "{text}: {msg}");
                }
                other => panic!("{text}: {other:?}"),
            }
        }
        for key in ["mode", "window", "lambda", "total_slots"] {
            let text: String = ["mode=SW", "window=10", "lambda=1", "total_slots=100"]
                .iter()
                .filter(|l| !l.starts_with(key))
                .map(|l| format!("{l}\n"))
                .collect();
            let msg = parse_config(&text).unwrap_err().to_string();
            assert!(msg.contains(&format!("missing required key `{key}`")), "{msg}");
        }
    }

    #[test]
    fn lambda_ranges_and_lists() {
        let spec = parse_config("mode=FR,SW\nwindow=10\nlambda=0.1:1.2:0.1\ntotal_slots=1000\nseed=4\nseeds=3\ndist=crdsa2,irsa4").unwrap();
        assert_eq!(spec.lambdas.len(), 12);
        assert_eq!(spec.lambdas[2], 0.3);
        assert_eq!(spec.lambdas[11], 1.2);
        assert_eq!(spec.seeds, vec![4, 5, 6]);
        assert_eq!(spec.modes.len(), 2);
        assert_eq!(spec.dists.len(), 2);
        assert_eq!(spec.points().len(), 48);
        let spec = parse_config("mode=SW\nwindow=10\nlambda=0.2, 0.4\ntotal_slots=1000\nseed=9,2\ndist=2:0.5,3:0.5").unwrap();
        assert_eq!(spec.lambdas, vec![0.2, 0.4]);
        assert_eq!(spec.seeds, vec![9, 2]);
        assert_eq!(spec.dists.len(), 1);
        assert_eq!(spec.n_rx, 50);
    }

    #[test]
    fn placement_trace_round_trip() {
        let text = "packet_id,arrival_slot,replica_slots\n0,3,3;9\n1,4,4;5;11\n";
        let rows = parse_placements(text).unwrap();
        assert_eq!(rows[1].replica_slots, vec![4, 5, 11]);
        assert!(parse_placements("0,3,3;3\n").is_err());
        assert!(parse_placements("x,3,3\n").is_err());
    }
}
