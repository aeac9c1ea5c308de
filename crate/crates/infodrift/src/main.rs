//! Command-line front end: configure and run experiments, emit plot-ready
//! CSV/JSON tables, and run the full verification suite.
//!
//! Exit codes: 0 pass, 1 usage/parameter error, 2 statistical or
//! verification failure.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use infodrift::config::{ConfigFile, OutputHeader};
use infodrift::drift::{DriftEvaluator, NoiseClock};
use infodrift::error::Error;
use infodrift::montecarlo::{Budget, CaseId, CaseRun};
use infodrift::partition::mesh_study;
use infodrift::verify::{
    gaussian_bound_report, json_doc_bounds, json_doc_report, laplace_bound_report,
    render_output_files, run_suite,
};

#[derive(Parser)]
#[command(
    name = "infodrift",
    version,
    about = "Insider information drifts, log-optimal portfolios, and Shannon-information identities"
)]
struct Cli {
    /// Master seed for the path substreams
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo paths per estimate
    #[arg(long, global = true)]
    paths: Option<u64>,
    /// Uniform grid steps before the tail refinement
    #[arg(long = "grid-steps", global = true)]
    grid_steps: Option<usize>,
    /// Where the geometric tail refinement starts (distance from the horizon)
    #[arg(long = "tail-cut", global = true)]
    tail_cut: Option<f64>,
    /// Number of geometric tail-halving levels
    #[arg(long = "tail-levels", global = true)]
    tail_levels: Option<u32>,
    /// Output file (directory for `verify`); stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Force JSON output
    #[arg(long, global = true)]
    json: bool,
    /// Force CSV output (per-refinement diagnostics for `utility`)
    #[arg(long, global = true)]
    csv: bool,
    /// Worker threads (results are identical for any value)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Flat key-value config file; flags override file values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the utility-equals-information identity for a named case or
    /// an ad-hoc drift (JSON utility report)
    Utility {
        /// Registry case: NT-1, PART-2, PART-3, MAX-1, DYN-1
        #[arg(long)]
        case: Option<String>,
        /// Ad-hoc drift kind: noisy-terminal, running-max,
        /// terminal-partition, dynamic-noise
        #[arg(long)]
        drift: Option<String>,
        /// Noise variance for noisy-terminal
        #[arg(long, allow_negative_numbers = true)]
        w: Option<f64>,
        /// Level for running-max
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        /// Comma-separated thresholds for terminal-partition
        #[arg(long, allow_hyphen_values = true)]
        thresholds: Option<String>,
        /// Noise clock family for dynamic-noise: sqrt, power, const
        #[arg(long)]
        g: Option<String>,
        /// Power clock coefficient
        #[arg(long = "C")]
        coeff: Option<f64>,
        /// Power clock exponent
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
        /// Constant clock level
        #[arg(long, allow_negative_numbers = true)]
        v: Option<f64>,
        /// Log-price drift of the market model
        #[arg(long, allow_negative_numbers = true)]
        b: Option<f64>,
    },
    /// Partition-measure mesh study (CSV)
    Pi {
        /// Noise clock family: sqrt, power, const
        #[arg(long)]
        g: Option<String>,
        #[arg(long = "C")]
        coeff: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        v: Option<f64>,
        /// Dyadic refinement levels
        #[arg(long)]
        levels: Option<u32>,
    },
    /// Gaussian and Laplace information bounds (JSON)
    Bounds {
        /// Comma-separated observation times
        #[arg(long)]
        times: Option<String>,
        /// Isotropic Gaussian noise variance
        #[arg(long, allow_negative_numbers = true)]
        kappa: Option<f64>,
        /// Two-sided exponential bound instead of the Gaussian one
        #[arg(long)]
        laplace: bool,
        #[arg(long, allow_negative_numbers = true)]
        k1: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        k2: Option<f64>,
    },
    /// Run every registry case plus the deterministic invariant suites
    Verify,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    let workers = cli.workers;
    let run = || match dispatch(cli) {
        Ok(code) => code,
        Err(err @ Error::ViolationRate { .. }) => {
            eprintln!("statistical fail: {err}");
            2
        }
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    };
    let code = match workers {
        Some(n) if n > 0 => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: cannot build worker pool: {e}");
                    return ExitCode::from(1);
                }
            };
            pool.install(run)
        }
        _ => run(),
    };
    ExitCode::from(code)
}

struct Resolver {
    file: ConfigFile,
    section: &'static str,
}

impl Resolver {
    fn value<T: FromStr + Copy>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, Error> {
        if let Some(v) = flag {
            return Ok(v);
        }
        Ok(self.file.get_parsed::<T>(self.section, key)?.unwrap_or(default))
    }

    fn optional<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Error> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file.get_parsed::<T>(self.section, key)
    }

    fn optional_str(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.file.get(self.section, key).map(str::to_string))
    }
}

fn dispatch(cli: Cli) -> Result<u8, Error> {
    let section = match cli.command {
        Command::Utility { .. } => "utility",
        Command::Pi { .. } => "pi",
        Command::Bounds { .. } => "bounds",
        Command::Verify => "verify",
    };
    let resolver = Resolver {
        file: match &cli.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        },
        section,
    };
    let defaults = Budget::default();
    let budget = Budget {
        n_paths: resolver.value(cli.paths, "paths", defaults.n_paths)?,
        grid_steps: resolver.value(cli.grid_steps, "grid_steps", defaults.grid_steps)?,
        tail_cut: resolver.value(cli.tail_cut, "tail_cut", defaults.tail_cut)?,
        tail_levels: resolver.value(cli.tail_levels, "tail_levels", defaults.tail_levels)?,
        master_seed: resolver.value(cli.seed, "seed", defaults.master_seed)?,
    };
    if budget.n_paths == 0 {
        return Err(Error::parameter("--paths must be at least 1"));
    }
    budget.grid()?;

    match cli.command {
        Command::Utility {
            case,
            drift,
            w,
            c,
            thresholds,
            g,
            coeff,
            p,
            v,
            b,
        } => cmd_utility(
            &resolver, &budget, &cli.out, cli.csv, case, drift, w, c, thresholds, g, coeff, p, v,
            b,
        ),
        Command::Pi {
            g,
            coeff,
            p,
            v,
            levels,
        } => cmd_pi(&resolver, &budget, &cli.out, g, coeff, p, v, levels),
        Command::Bounds {
            times,
            kappa,
            laplace,
            k1,
            k2,
        } => cmd_bounds(&resolver, &budget, &cli.out, times, kappa, laplace, k1, k2),
        Command::Verify => cmd_verify(&budget, &cli.out),
    }
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::parameter(format!("cannot parse {what} entry `{s}`")))
        })
        .collect()
}

fn noise_clock(
    family: &str,
    coeff: Option<f64>,
    p: Option<f64>,
    v: Option<f64>,
) -> Result<NoiseClock, Error> {
    match family {
        "sqrt" => Ok(NoiseClock::Sqrt),
        "power" => Ok(NoiseClock::Power {
            coeff: coeff.unwrap_or(1.0),
            exponent: p
                .ok_or_else(|| Error::parameter("power clock needs --p <exponent>"))?,
        }),
        "const" | "constant" => Ok(NoiseClock::Constant {
            level: v.ok_or_else(|| Error::parameter("constant clock needs --v <level>"))?,
        }),
        other => Err(Error::parameter(format!("unknown noise clock family `{other}`"))),
    }
}

fn adhoc_drift(
    kind: &str,
    w: Option<f64>,
    c: Option<f64>,
    thresholds: Option<String>,
    g: Option<String>,
    coeff: Option<f64>,
    p: Option<f64>,
    v: Option<f64>,
) -> Result<DriftEvaluator, Error> {
    match kind {
        "noisy-terminal" => DriftEvaluator::noisy_terminal(
            w.ok_or_else(|| Error::parameter("noisy-terminal needs --w <variance>"))?,
        ),
        "running-max" => DriftEvaluator::running_max_indicator(
            c.ok_or_else(|| Error::parameter("running-max needs --c <level>"))?,
        ),
        "terminal-partition" => {
            let raw = thresholds
                .ok_or_else(|| Error::parameter("terminal-partition needs --thresholds a,b,..."))?;
            DriftEvaluator::terminal_partition(parse_f64_list(&raw, "threshold")?)
        }
        "dynamic-noise" => {
            let family = g.ok_or_else(|| Error::parameter("dynamic-noise needs --g <family>"))?;
            DriftEvaluator::dynamic_noise(noise_clock(&family, coeff, p, v)?)
        }
        other => Err(Error::parameter(format!("unknown drift kind `{other}`"))),
    }
}

fn write_output(out: &Option<PathBuf>, contents: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, contents).map_err(Error::from),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn utility_header(budget: &Budget, extra: &[(&str, String)]) -> OutputHeader {
    let mut cfg = BTreeMap::new();
    cfg.insert("paths".into(), budget.n_paths.to_string());
    cfg.insert("grid_steps".into(), budget.grid_steps.to_string());
    cfg.insert("tail_cut".into(), budget.tail_cut.to_string());
    cfg.insert("tail_levels".into(), budget.tail_levels.to_string());
    for (k, v) in extra {
        cfg.insert((*k).into(), v.clone());
    }
    OutputHeader::new(budget.master_seed, cfg)
}

#[allow(clippy::too_many_arguments)]
fn cmd_utility(
    resolver: &Resolver,
    budget: &Budget,
    out: &Option<PathBuf>,
    csv: bool,
    case: Option<String>,
    drift: Option<String>,
    w: Option<f64>,
    c: Option<f64>,
    thresholds: Option<String>,
    g: Option<String>,
    coeff: Option<f64>,
    p: Option<f64>,
    v: Option<f64>,
    b: Option<f64>,
) -> Result<u8, Error> {
    let case = resolver.optional_str(case, "case");
    let drift = resolver.optional_str(drift, "drift");
    let w = resolver.optional(w, "w")?;
    let c = resolver.optional(c, "c")?;
    let thresholds = resolver.optional_str(thresholds, "thresholds");
    let g = resolver.optional_str(g, "g");
    let coeff = resolver.optional(coeff, "C")?;
    let p = resolver.optional(p, "p")?;
    let v = resolver.optional(v, "v")?;
    let b = resolver.optional(b, "b")?;

    enum Target {
        Case(CaseId),
        Adhoc(DriftEvaluator),
    }
    let (target, label) = match (&case, &drift) {
        (Some(name), None) => {
            let id: CaseId = name.parse()?;
            (Target::Case(id), name.clone())
        }
        (None, Some(kind)) => (
            Target::Adhoc(adhoc_drift(kind, w, c, thresholds.clone(), g.clone(), coeff, p, v)?),
            kind.clone(),
        ),
        _ => {
            return Err(Error::parameter(
                "utility needs exactly one of --case or --drift",
            ))
        }
    };
    let b_used = match (&target, b) {
        (_, Some(b)) => b,
        (Target::Case(id), None) => infodrift::montecarlo::case_definition(*id).b,
        (Target::Adhoc(_), None) => -0.5,
    };
    let execute = |with: &Budget| -> Result<CaseRun, Error> {
        match &target {
            Target::Case(id) => infodrift::montecarlo::run_case_with_b(*id, b_used, with),
            Target::Adhoc(d) => infodrift::montecarlo::verify_adhoc(d, b_used, with),
        }
    };
    let run = execute(budget)?;

    if csv {
        // per-refinement diagnostics: the tail cut halved twice
        let mut lines = String::from(
            "tail_cut,tail_levels,increment_mc,stderr_mc,increment_analytic,gap\n",
        );
        for halvings in 0..3i32 {
            let mut refined = *budget;
            refined.tail_cut = budget.tail_cut / f64::powi(2.0, halvings);
            let r = if halvings == 0 { run.clone() } else { execute(&refined)? };
            lines.push_str(&format!(
                "{},{},{},{},{},{}\n",
                refined.tail_cut,
                refined.tail_levels,
                r.report.increment_mc,
                r.report.stderr_mc,
                r.report.increment_analytic,
                r.report.increment_analytic - r.report.increment_mc,
            ));
        }
        let header = utility_header(
            budget,
            &[
                ("command", "utility".into()),
                ("target", label),
                ("b", b_used.to_string()),
            ],
        );
        write_output(out, &format!("{}{}", header.csv_comments(), lines))?;
        return Ok(if run.report.verdict.pass { 0 } else { 2 });
    }

    let header = utility_header(
        budget,
        &[
            ("command", "utility".to_string()),
            ("target", label),
            ("b", b_used.to_string()),
        ],
    );
    write_output(out, &json_doc_report(&header, &run.report))?;
    if !run.report.verdict.pass {
        eprintln!(
            "statistical fail: z = {:+.2}, gap = {:.3e} (analytic {:.6}, mc {:.6})",
            run.report.verdict.z_score,
            (run.report.increment_mc - run.report.increment_analytic).abs(),
            run.report.increment_analytic,
            run.report.increment_mc
        );
        if 3.0 * run.report.stderr_mc > 0.05 * run.report.increment_analytic.abs() {
            eprintln!(
                "under-powered: 3*stderr = {:.3e} exceeds the 5% gate {:.3e}; increase --paths",
                3.0 * run.report.stderr_mc,
                0.05 * run.report.increment_analytic.abs()
            );
        }
        return Ok(2);
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_pi(
    resolver: &Resolver,
    budget: &Budget,
    out: &Option<PathBuf>,
    g: Option<String>,
    coeff: Option<f64>,
    p: Option<f64>,
    v: Option<f64>,
    levels: Option<u32>,
) -> Result<u8, Error> {
    let family = resolver
        .optional_str(g, "g")
        .ok_or_else(|| Error::parameter("pi needs --g <family> (sqrt, power, const)"))?;
    let coeff = resolver.optional(coeff, "C")?;
    let p = resolver.optional(p, "p")?;
    let v = resolver.optional(v, "v")?;
    let levels = resolver.value(levels, "levels", 12u32)?;
    let clock = noise_clock(&family, coeff, p, v)?;
    let study = mesh_study(&clock, levels)?;

    let mut extra = vec![("command", "pi".to_string()), ("g", family), ("levels", levels.to_string())];
    if let Some(cv) = coeff {
        extra.push(("C", cv.to_string()));
    }
    if let Some(pv) = p {
        extra.push(("p", pv.to_string()));
    }
    if let Some(vv) = v {
        extra.push(("v", vv.to_string()));
    }
    let mut cfg = BTreeMap::new();
    for (k, val) in extra {
        cfg.insert(k.to_string(), val);
    }
    let header = OutputHeader::new(budget.master_seed, cfg);
    write_output(out, &format!("{}{}", header.csv_comments(), study.to_csv()))?;
    // divergence is a result, not an error
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bounds(
    resolver: &Resolver,
    budget: &Budget,
    out: &Option<PathBuf>,
    times: Option<String>,
    kappa: Option<f64>,
    laplace: bool,
    k1: Option<f64>,
    k2: Option<f64>,
) -> Result<u8, Error> {
    if laplace {
        let k1 = resolver
            .optional(k1, "k1")?
            .ok_or_else(|| Error::parameter("--laplace needs --k1 <E|X-EX|>"))?;
        let k2 = resolver
            .optional(k2, "k2")?
            .ok_or_else(|| Error::parameter("--laplace needs --k2 <E|Y|>"))?;
        let report = laplace_bound_report(k1, k2)?;
        let mut cfg = BTreeMap::new();
        cfg.insert("command".into(), "bounds".into());
        cfg.insert("k1".into(), k1.to_string());
        cfg.insert("k2".into(), k2.to_string());
        let header = OutputHeader::new(budget.master_seed, cfg);
        #[derive(serde::Serialize)]
        struct Doc<'a> {
            header: &'a OutputHeader,
            bounds: &'a infodrift::verify::LaplaceBoundReport,
        }
        let mut text = serde_json::to_string_pretty(&Doc {
            header: &header,
            bounds: &report,
        })
        .unwrap();
        text.push('\n');
        write_output(out, &text)?;
        return Ok(0);
    }
    let raw = resolver
        .optional_str(times, "times")
        .ok_or_else(|| Error::parameter("bounds needs --times t1,t2,... or --laplace"))?;
    let times = parse_f64_list(&raw, "time")?;
    let kappa = resolver.value(kappa, "kappa", 1.0f64)?;
    let report = gaussian_bound_report(&times, kappa)?;
    let mut cfg = BTreeMap::new();
    cfg.insert("command".into(), "bounds".into());
    cfg.insert("times".into(), raw);
    cfg.insert("kappa".into(), kappa.to_string());
    let header = OutputHeader::new(budget.master_seed, cfg);
    write_output(out, &json_doc_bounds(&header, &report))?;
    Ok(0)
}

fn cmd_verify(budget: &Budget, out: &Option<PathBuf>) -> Result<u8, Error> {
    let summary = run_suite(budget)?;
    print!("{}", summary.table());
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        for (name, contents) in render_output_files(&summary) {
            std::fs::write(dir.join(name), contents)?;
        }
    }
    Ok(if summary.all_pass() { 0 } else { 2 })
}
