use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mallows_core::analysis::{
    coupling_constant, domination_constant, hardy_ramanujan, hardy_ramanujan_display, q_pochhammer_inf,
    verify_stable, CONSTANT_TOL,
};
use mallows_core::samplers::{
    sample_semiinfinite, sample_tame, stable_match_finite, CutProcess, DistCutChain, GraphCutChain,
    MatchOptions, TameSampleConfig,
};
use mallows_core::wild::{build_wild, build_wild_sharp, WildConfig, WildSharpConfig, WildVariant};
use mallows_core::{EdgeOracle, Error as CoreError, IndexSet, Interval, WindowMatching};
use mallows_harness::{print_table, run_all, run_experiment, write_report, BatteryConfig, NAMES};

#[derive(Parser)]
#[command(name = "mallows-match", version, about = "Stable matchings of percolated bipartite graphs on the integers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct GraphArgs {
    /// Edge probability.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a stable matching and print it as JSON.
    Sample {
        #[command(subcommand)]
        kind: SampleKind,
    },
    /// Run the cut chain and print `step,unmatched,cut` as CSV.
    Chain {
        #[arg(long, default_value_t = 1000)]
        steps: u64,
        #[arg(long, value_enum, default_value_t = Backend::Graph)]
        backend: Backend,
        #[arg(long, default_value_t = 0)]
        burn_in: u64,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Build a wild matching and print the construction as JSON.
    Wild {
        /// not-perfect, not-locally-finite, locally-finite-wild or sharp.
        #[arg(long, default_value = "locally-finite-wild")]
        variant: String,
        #[arg(long, default_value_t = 12)]
        steps: usize,
        /// Comma-separated ranks; missing entries default to 1.
        #[arg(long, value_delimiter = ',')]
        a_seq: Vec<u64>,
        #[arg(long)]
        scan_cap: Option<u64>,
        #[arg(long, default_value_t = 20)]
        negative_window: i64,
        /// Omit the oracle query log from the output.
        #[arg(long)]
        no_trace: bool,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Print the blocking pairs of a matching JSON file on its window.
    Verify {
        #[arg(long)]
        matching: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Print q-series constants as CSV.
    Qseries {
        #[arg(long, num_args = 1.., default_values_t = vec![0.3, 0.5, 0.9, 0.99])]
        q: Vec<f64>,
    },
    /// List the registered experiments.
    List,
    /// Run one experiment.
    Run {
        name: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Parameter override `key=value`, the value in TOML syntax.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
    },
    /// Run every experiment of a battery config.
    RunAll {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum SampleKind {
    /// Unique stable matching of `[lo,hi] × [lo,hi]`.
    Finite {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
        window: Interval,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Stable matching of `(−∞,m]²` revealed on the window.
    Semiinf {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
        window: Interval,
        /// Top of the ray; defaults to the window's upper end.
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i64>,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Tame matching of flow `n` on the window, to a residual tolerance.
    Tame {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
        window: Interval,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        flow: i64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        graph: GraphArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Graph,
    Dist,
}

fn parse_window(s: &str) -> Result<Interval, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}"));
    Interval::new(parse(lo)?, parse(hi)?).map_err(|e| e.to_string())
}

fn parse_set(items: &[String]) -> anyhow::Result<toml::Table> {
    let mut t = toml::Table::new();
    for item in items {
        let (k, v) = item.split_once('=').with_context(|| format!("expected key=value, got {item:?}"))?;
        let parsed: toml::Table = toml::from_str(&format!("v = {v}"))
            .or_else(|_| toml::from_str(&format!("v = {:?}", v)))
            .with_context(|| format!("cannot parse value of {k}"))?;
        t.insert(k.trim().to_string(), parsed["v"].clone());
    }
    Ok(t)
}

fn print_json(value: &impl serde::Serialize) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn sample(kind: SampleKind) -> anyhow::Result<WindowMatching> {
    let opts = MatchOptions::default();
    Ok(match kind {
        SampleKind::Finite { window, graph } => {
            let a = IndexSet::interval(window.lo, window.hi);
            stable_match_finite(&a, &a, &EdgeOracle::new(graph.p, graph.seed)?)?
        }
        SampleKind::Semiinf { window, m, graph } => {
            let m = m.unwrap_or(window.hi);
            sample_semiinfinite(m, window, &EdgeOracle::new(graph.p, graph.seed)?, opts)?
        }
        SampleKind::Tame { window, flow, tol, graph } => {
            let o = EdgeOracle::new(graph.p, graph.seed)?;
            let s = sample_tame(&TameSampleConfig::new(flow, window, tol), &o, opts)?;
            eprintln!("m = {}, residual bound = {:.3e}", s.m_used, s.residual_bound);
            s.matching
        }
    })
}

fn chain(steps: u64, backend: Backend, burn_in: u64, graph: GraphArgs) -> anyhow::Result<()> {
    let o = EdgeOracle::new(graph.p, graph.seed)?;
    let mut c: Box<dyn CutProcess + '_> = match backend {
        Backend::Graph => Box::new(GraphCutChain::new(&o)),
        Backend::Dist => Box::new(DistCutChain::new(1.0 - graph.p, graph.seed)),
    };
    for _ in 0..burn_in {
        c.step();
    }
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(["step", "unmatched", "cut"])?;
    for _ in 0..steps {
        let cut = c.step();
        let s = c.state();
        w.serialize((s.position, s.unmatched_count, cut as u8))?;
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn wild(
    variant: &str,
    steps: usize,
    a_seq: Vec<u64>,
    scan_cap: Option<u64>,
    negative_window: i64,
    trace: bool,
    graph: GraphArgs,
) -> anyhow::Result<ExitCode> {
    let o = EdgeOracle::new(graph.p, graph.seed)?;
    let result = if variant == "sharp" {
        let mut c = WildSharpConfig::new(steps);
        c.scan_cap = scan_cap.unwrap_or(c.scan_cap);
        c.negative_window = negative_window;
        c.trace = trace;
        build_wild_sharp(&c, &o)
    } else {
        let v: WildVariant = variant.parse()?;
        let mut c = WildConfig::new(v, steps);
        c.a_seq = a_seq;
        c.scan_cap = scan_cap.unwrap_or(c.scan_cap);
        c.negative_window = negative_window;
        c.trace = trace;
        build_wild(&c, &o)
    };
    match result {
        Ok(w) => {
            print_json(&w)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(CoreError::WildStalled { step, source, partial }) => {
            print_json(&partial)?;
            eprintln!("stopped at step {step}: {source}");
            Ok(ExitCode::from(2))
        }
        Err(e) => Err(e.into()),
    }
}

fn qseries(qs: &[f64]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record([
        "q",
        "q_pochhammer_inf",
        "truncation_k",
        "tail_bound",
        "coupling_constant",
        "domination_constant",
        "hardy_ramanujan",
        "hardy_ramanujan_display",
    ])?;
    for &q in qs {
        let v = q_pochhammer_inf(q, CONSTANT_TOL)?;
        w.serialize((
            q,
            v.value,
            v.truncation_k,
            v.tail_bound,
            coupling_constant(q),
            domination_constant(q),
            hardy_ramanujan(q),
            hardy_ramanujan_display(q),
        ))?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Sample { kind } => print_json(&sample(kind)?)?,
        Command::Chain { steps, backend, burn_in, graph } => chain(steps, backend, burn_in, graph)?,
        Command::Wild { variant, steps, a_seq, scan_cap, negative_window, no_trace, graph } => {
            return wild(&variant, steps, a_seq, scan_cap, negative_window, !no_trace, graph)
        }
        Command::Verify { matching, graph } => {
            let text = std::fs::read_to_string(&matching).with_context(|| format!("reading {}", matching.display()))?;
            let m: WindowMatching = serde_json::from_str(&text)?;
            let blocking = verify_stable(&m, &EdgeOracle::new(graph.p, graph.seed)?, m.window());
            print_json(&blocking)?;
            if !blocking.is_empty() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Qseries { q } => qseries(&q)?,
        Command::List => NAMES.iter().for_each(|n| println!("{n}")),
        Command::Run { name, seed, set, out } => {
            let outcome = run_experiment(&name, &parse_set(&set)?, seed)?;
            std::fs::create_dir_all(&out)?;
            write_report(&out, &name, &outcome)?;
            print_json(&outcome.report)?;
            if !outcome.report.pass {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::RunAll { config, seed, out } => {
            let cfg = BatteryConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            let Some(seed) = seed.or(cfg.seed) else {
                bail!("no seed given on the command line or in the config");
            };
            let summary = run_all(&cfg, seed, &out)?;
            print_table(&summary, &mut std::io::stdout().lock())?;
            if !summary.pass {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    let pipe = |io: &std::io::Error| io.kind() == std::io::ErrorKind::BrokenPipe;
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>().is_some_and(pipe)
            || c.downcast_ref::<csv::Error>()
                .is_some_and(|e| matches!(e.kind(), csv::ErrorKind::Io(io) if pipe(io)))
            || c.downcast_ref::<serde_json::Error>()
                .is_some_and(|e| e.io_error_kind() == Some(std::io::ErrorKind::BrokenPipe))
    })
}

fn main() -> anyhow::Result<ExitCode> {
    match run(Cli::parse()) {
        // Output piped into `head` and the like.
        Err(e) if is_broken_pipe(&e) => Ok(ExitCode::SUCCESS),
        r => r,
    }
}
