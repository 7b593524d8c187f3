//! `amoeba-tsp` command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when a
//! single solve runs out of iterations.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amoeba_tsp::harness::{
    plot_iterations_csv, plot_ratio_csv, results_csv, BatchSpec, MapPolicy, NuPolicy, ScalingFit,
};
use amoeba_tsp::reference::{self, compare, Tolerance};
use amoeba_tsp::solver::{TraceRow, DEFAULT_MAX_ITERS};
use amoeba_tsp::variant::{preset, ElementA, ElementB, ElementC, VariantConfig, DEFAULT_NORMAL_SD};
use amoeba_tsp::{fit_scaling, generate_map, run_batch, run_sweep, run_trial, AggregateStats, ParamSet, TspInstance};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::RunConfigFile;

const EXIT_USAGE: u8 = 1;
const EXIT_NO_SOLUTION: u8 = 2;

#[derive(Parser)]
#[command(name = "amoeba-tsp", version, about = "Amoeba-inspired TSP solver and ablation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random symmetric map.
    GenMap(GenMapArgs),
    /// Run one trial on a map file.
    Solve(SolveArgs),
    /// Run a batch of seeded trials at one map size.
    Batch(BatchArgs),
    /// Run batches over several map sizes, optionally fitting the scaling.
    Sweep(SweepArgs),
    /// Fit `iterations ~ n^a` on a results CSV or the published column.
    FitScaling(FitArgs),
    /// Rerun a published table and compare.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct GenMapArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100.0)]
    mean: f64,
    #[arg(long, default_value_t = 17.0)]
    sd: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Default)]
struct VariantArgs {
    /// original, a1, a2, b1, b2, b3, b4, c1, c2, c3 or improved.
    #[arg(long, conflicts_with_all = ["element_a", "element_b", "element_c"])]
    preset: Option<String>,
    /// uniform, zero or normal.
    #[arg(long)]
    element_a: Option<String>,
    /// original, scale-i:FACTOR, zero-delta-in or denom-n.
    #[arg(long)]
    element_b: Option<String>,
    /// Comma-separated: o-const, l-outer-step, l-inner-step.
    #[arg(long)]
    element_c: Option<String>,
    /// Standard deviation of normal fluctuations.
    #[arg(long)]
    normal_sd: Option<f64>,
}

impl VariantArgs {
    fn given(&self) -> bool {
        self.preset.is_some() || self.element_a.is_some() || self.element_b.is_some() || self.element_c.is_some()
    }

    fn resolve(&self) -> Result<(String, VariantConfig)> {
        let (name, mut cfg) = if let Some(name) = &self.preset {
            (name.to_ascii_lowercase(), preset(name)?)
        } else {
            let base = VariantConfig::original();
            let a = self.element_a.as_deref().map(parse_element_a).transpose()?.unwrap_or(base.element_a);
            let b = self.element_b.as_deref().map(parse_element_b).transpose()?.unwrap_or(base.element_b);
            let c = self.element_c.as_deref().map(parse_element_c).transpose()?.unwrap_or_default();
            let cfg = VariantConfig { element_a: a, element_b: b, element_c: c, normal_sd: DEFAULT_NORMAL_SD };
            let name = if self.given() { "custom" } else { "original" };
            (name.to_string(), cfg)
        };
        if let Some(sd) = self.normal_sd {
            cfg.normal_sd = sd;
        }
        cfg.validate()?;
        Ok((name, cfg))
    }
}

fn parse_element_a(s: &str) -> Result<ElementA> {
    Ok(match s {
        "uniform" => ElementA::Uniform,
        "zero" => ElementA::Zero,
        "normal" => ElementA::Normal,
        _ => bail!("unknown element A `{s}`"),
    })
}

fn parse_element_b(s: &str) -> Result<ElementB> {
    if let Some(f) = s.strip_prefix("scale-i:") {
        return Ok(ElementB::ScaleI(f.parse().with_context(|| format!("bad factor `{f}`"))?));
    }
    Ok(match s {
        "original" => ElementB::Original,
        "zero-delta-in" => ElementB::ZeroDeltaIn,
        "denom-n" => ElementB::DenomN,
        _ => bail!("unknown element B `{s}`"),
    })
}

fn parse_element_c(s: &str) -> Result<ElementC> {
    let mut c = ElementC::default();
    for flag in s.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        match flag {
            "o-const" => c.o_const = true,
            "l-outer-step" => c.l_outer_step = true,
            "l-inner-step" => c.l_inner_step = true,
            _ => bail!("unknown element C flag `{flag}`"),
        }
    }
    Ok(c)
}

fn parse_map_policy(s: &str) -> Result<MapPolicy> {
    if s == "fresh" {
        return Ok(MapPolicy::FreshPerTrial);
    }
    if let Some(seed) = s.strip_prefix("fixed:") {
        return Ok(MapPolicy::Fixed(seed.parse().with_context(|| format!("bad map seed `{seed}`"))?));
    }
    bail!("map policy must be `fresh` or `fixed:SEED`, got `{s}`")
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    map: PathBuf,
    #[command(flatten)]
    variant: VariantArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: u64,
    /// Write a per-step trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct CommonRunArgs {
    /// TOML run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    variant: VariantArgs,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iters: Option<u64>,
    /// `fresh` or `fixed:SEED`.
    #[arg(long)]
    map_policy: Option<String>,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Results CSV path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    #[command(flatten)]
    common: CommonRunArgs,
    #[arg(long)]
    n: Option<usize>,
    /// Write per-trial summaries as JSON here.
    #[arg(long)]
    per_trial: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonRunArgs,
    /// Comma-separated map sizes; `N:TRIALS` overrides the trial count.
    #[arg(long)]
    ns: Option<String>,
    /// Write the scaling fit JSON here.
    #[arg(long)]
    fit: Option<PathBuf>,
    /// Write plot-data CSVs into this directory.
    #[arg(long)]
    plot_dir: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Results CSV produced by `batch` or `sweep`.
    #[arg(long, conflicts_with = "published", required_unless_present = "published")]
    input: Option<PathBuf>,
    /// Fit the published improved-preset column instead.
    #[arg(long)]
    published: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=5))]
    table: u8,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: u64,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Map sizes for the improved-preset table.
    #[arg(long, default_value = "10,20,50,100")]
    ns: String,
    /// Results CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_gen_map(a: GenMapArgs) -> Result<u8> {
    let inst = generate_map(a.n as usize, a.seed, a.mean, a.sd)?;
    inst.save(&a.out)?;
    eprintln!("wrote {}-city map to {}", inst.n(), a.out.display());
    Ok(0)
}

fn cmd_solve(a: SolveArgs) -> Result<u8> {
    let inst = TspInstance::load(&a.map)?;
    let (name, cfg) = a.variant.resolve()?;
    let params = ParamSet::default().calibrated(&inst);
    let r = run_trial(&inst, &params, &cfg, a.seed, a.max_iters, a.trace.is_some())?;
    if let (Some(path), Some(rows)) = (&a.trace, &r.trace) {
        let mut text = String::from(TraceRow::CSV_HEADER);
        text.push('\n');
        for row in rows {
            text.push_str(&row.to_csv());
            text.push('\n');
        }
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("variant: {name}");
    println!("cities: {}", inst.n());
    println!("nu: {}", params.nu);
    if let (Some(tour), Some(r_calc), Some(ratio)) = (&r.tour, r.r_calc, r.ratio) {
        println!("success: true");
        println!("iterations: {}", r.iterations);
        println!("tour: {tour}");
        println!("route length: {r_calc}");
        println!("ratio to 100n: {ratio}");
        Ok(0)
    } else {
        println!("success: false");
        println!("no solution within {} iterations", a.max_iters);
        Ok(EXIT_NO_SOLUTION)
    }
}

struct Resolved {
    spec: BatchSpec,
    out: Option<PathBuf>,
    file: RunConfigFile,
}

fn resolve_common(c: &CommonRunArgs, n: Option<usize>) -> Result<Resolved> {
    let file = match &c.config {
        Some(p) => RunConfigFile::load(p)?,
        None => RunConfigFile::default(),
    };
    let (name, cfg) = if c.variant.given() {
        c.variant.resolve()?
    } else {
        match file.variant()? {
            Some(v) => v,
            None => c.variant.resolve()?,
        }
    };
    let (base, fixed_nu) = file.params();
    let mut spec = BatchSpec::new(name, cfg, n.or(file.n).unwrap_or(20), c.trials.or(file.trials).unwrap_or(200));
    spec.params = base;
    spec.nu_policy = fixed_nu.map_or(NuPolicy::Calibrate, NuPolicy::Fixed);
    spec.global_seed = c.seed.or(file.seed).unwrap_or(0);
    spec.max_iters = c.max_iters.or(file.max_iters).unwrap_or(DEFAULT_MAX_ITERS);
    spec.workers = c.workers.or(file.workers).unwrap_or(0);
    if let Some(p) = c.map_policy.as_deref().or(file.map_policy.as_deref()) {
        spec.map_policy = parse_map_policy(p)?;
    }
    if spec.trials == 0 {
        bail!("--trials must be at least 1");
    }
    if spec.n < 3 {
        bail!("--n must be at least 3");
    }
    let out = c.out.clone().or_else(|| file.output.results.clone());
    Ok(Resolved { spec, out, file })
}

fn cmd_batch(a: BatchArgs) -> Result<u8> {
    let Resolved { mut spec, out, .. } = resolve_common(&a.common, a.n)?;
    spec.keep_trials = a.per_trial.is_some();
    let stats = run_batch(&spec)?;
    if let Some(p) = &a.per_trial {
        let json = serde_json::to_string_pretty(&stats.per_trial)?;
        std::fs::write(p, json).with_context(|| format!("writing {}", p.display()))?;
    }
    write_or_print(out.as_deref(), &results_csv(std::slice::from_ref(&stats)))?;
    Ok(0)
}

fn parse_ns(s: &str, default_trials: usize) -> Result<Vec<(usize, usize)>> {
    let mut points = Vec::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let (n, trials) = match item.split_once(':') {
            Some((n, t)) => (n.parse::<usize>()?, t.parse::<usize>()?),
            None => (item.parse::<usize>()?, default_trials),
        };
        if n < 3 || trials == 0 {
            bail!("bad sweep point `{item}`");
        }
        points.push((n, trials));
    }
    if points.is_empty() {
        bail!("the list of map sizes is empty");
    }
    Ok(points)
}

fn write_fit_outputs(stats: &[AggregateStats], fit: Option<&Path>, plot_dir: Option<&Path>) -> Result<()> {
    if let Some(path) = fit {
        let f = fit_scaling(stats)?;
        std::fs::write(path, serde_json::to_string_pretty(&f)?)?;
        eprintln!("exponent {:.4}, prefactor {:.4}, r^2 {:.4}", f.exponent, f.prefactor, f.r_squared);
    }
    if let Some(dir) = plot_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("iterations_vs_n.csv"), plot_iterations_csv(stats))?;
        std::fs::write(dir.join("ratio_vs_n.csv"), plot_ratio_csv(stats))?;
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<u8> {
    let Resolved { spec, out, file } = resolve_common(&a.common, None)?;
    let points = match (&a.ns, &file.ns) {
        (Some(s), _) => parse_ns(s, spec.trials)?,
        (None, Some(ns)) if !ns.is_empty() => ns.iter().map(|&n| (n, spec.trials)).collect(),
        _ => bail!("--ns is required and must not be empty"),
    };
    let stats = run_sweep(&points, &spec)?;
    write_or_print(out.as_deref(), &results_csv(&stats))?;
    let fit = a.fit.clone().or(file.output.fit.clone());
    let plot_dir = a.plot_dir.clone().or(file.output.plot_dir.clone());
    write_fit_outputs(&stats, fit.as_deref(), plot_dir.as_deref())?;
    Ok(0)
}

fn read_results_points(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| anyhow!("empty results file"))?;
    if header.trim() != amoeba_tsp::harness::RESULTS_CSV_HEADER {
        bail!("unexpected results header `{header}`");
    }
    let mut points = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 8 {
            bail!("malformed results row `{line}`");
        }
        if cols[4] == amoeba_tsp::harness::ABSENT {
            continue;
        }
        points.push((cols[1].parse()?, cols[4].parse()?));
    }
    Ok(points)
}

fn cmd_fit(a: FitArgs) -> Result<u8> {
    let points: Vec<(f64, f64)> = if a.published {
        reference::TABLE_5.iter().map(|r| (r.n as f64, r.avg_iterations.unwrap_or(f64::NAN))).collect()
    } else {
        read_results_points(a.input.as_deref().expect("clap enforces input or published"))?
    };
    let fit: ScalingFit = amoeba_tsp::harness::fit_points(&points)?;
    let mut json = serde_json::to_string_pretty(&fit)?;
    json.push('\n');
    write_or_print(a.out.as_deref(), &json)?;
    Ok(0)
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "---".to_string(), |x| format!("{x:.digits$}"))
}

fn cmd_reproduce(a: ReproduceArgs) -> Result<u8> {
    let rows = reference::table(a.table).ok_or_else(|| anyhow!("no table {}", a.table))?;
    let selected: Vec<_> = if a.table == 5 {
        let wanted = parse_ns(&a.ns, a.trials)?;
        let picked: Vec<_> = rows.iter().filter(|r| wanted.iter().any(|&(n, _)| n == r.n)).collect();
        if picked.len() != wanted.len() {
            bail!("--ns must be a subset of the published sizes 10-20, 30, 40, ..., 100");
        }
        picked
    } else {
        rows.iter().collect()
    };

    println!("variant    n     success (pub)        iterations (pub)        ratio (pub)       result");
    let mut all = Vec::new();
    let mut failures = 0;
    for row in selected {
        let mut spec = BatchSpec::new(row.preset, preset(row.preset)?, row.n, a.trials).with_seed(a.seed);
        spec.max_iters = a.max_iters;
        spec.workers = a.workers;
        let stats = run_batch(&spec)?;
        let cmp = compare(&stats, row, Tolerance::for_preset(row.preset));
        if !cmp.passed() {
            failures += 1;
        }
        let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
        println!(
            "{:<9} {:>3}   {:.3} ({:.3}) {:<4}   {:>7} ({:>7}) {:<4}   {} ({}) {:<4}  {}",
            row.preset,
            row.n,
            stats.success_rate,
            row.success_rate,
            mark(cmp.success_ok),
            fmt_opt(stats.avg_iterations, 1),
            fmt_opt(row.avg_iterations, 1),
            mark(cmp.iterations_ok),
            fmt_opt(stats.avg_ratio, 3),
            fmt_opt(row.avg_ratio, 3),
            mark(cmp.ratio_ok),
            if cmp.passed() { "PASS" } else { "FAIL" }
        );
        all.push(stats);
    }
    println!("{} of {} rows within tolerance", all.len() - failures, all.len());
    if let Some(p) = &a.out {
        std::fs::write(p, results_csv(&all))?;
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::GenMap(a) => cmd_gen_map(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Batch(a) => cmd_batch(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::FitScaling(a) => cmd_fit(a),
        Command::Reproduce(a) => cmd_reproduce(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
