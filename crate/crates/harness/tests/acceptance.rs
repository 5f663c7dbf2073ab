//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mallows_harness::{run_all, run_experiment, BatteryConfig, Outcome};

const SEED: u64 = 42;

struct Criterion {
    id: u32,
    title: &'static str,
    experiment: &'static str,
    params: &'static str,
    time_limit: Option<Duration>,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        title: "exact Mallows law of the perfect finite matching",
        experiment: "exact-mallows",
        params: r#"
            n_exact = 3
            q_exact = ["1/2", "1/3", "4/5"]
            n_float = 4
            q_float = [0.5, 0.3]
            float_tol = 1e-12
        "#,
        time_limit: Some(Duration::from_secs(10)),
    },
    Criterion {
        id: 2,
        title: "perfectness probability",
        experiment: "perfect-prob",
        params: r#"
            trials = 100000
            cases = [{ n = 5, p = 0.5 }, { n = 10, p = 0.6 }]
        "#,
        time_limit: Some(Duration::from_secs(30)),
    },
    Criterion {
        id: 3,
        title: "cut density of the graph-coupled chain",
        experiment: "cut-density",
        params: r#"
            qs = [0.3, 0.5]
            steps = 100000
            burn_in = 1000
            backend = "graph"
        "#,
        time_limit: Some(Duration::from_secs(60)),
    },
    Criterion {
        id: 4,
        title: "cut-chain jump law",
        experiment: "cut-jump",
        params: r#"
            q = 0.5
            u_max = 3
            min_visits = 10000
            backend = "graph"
        "#,
        time_limit: None,
    },
    Criterion {
        id: 5,
        title: "Bernoulli domination of the cut process",
        experiment: "no-cut-runs",
        params: r#"
            q = 0.5
            k_max = 10
        "#,
        time_limit: None,
    },
    Criterion {
        id: 6,
        title: "coupling tail of low pairs",
        experiment: "coupling-tail",
        params: r#"
            q = 0.5
            ns = [1, 3, 5]
            trials = 10000
        "#,
        time_limit: None,
    },
    Criterion {
        id: 7,
        title: "correlation of perfectness events",
        experiment: "correlation",
        params: r#"
            p = 0.5
            trials = 100000
            pairs = [{ first = [0, 2], second = [1, 3] }, { first = [0, 3], second = [2, 5] }]
        "#,
        time_limit: None,
    },
    Criterion {
        id: 8,
        title: "tame shift ladder and flows",
        experiment: "tame-ladder",
        params: r#"
            p = 0.5
            seeds = 100
            window = [-15, 15]
            tol = 1e-6
        "#,
        time_limit: None,
    },
    Criterion {
        id: 9,
        title: "tame crossing lengths: logarithmic lower bound and ceiling",
        experiment: "tame-sharpness",
        params: r#"
            q = 0.5
            seeds = 10
            half_width = 2000
            ladder_lo = 500
            lower_factor = 0.5
            tame_ceiling = 20.0
        "#,
        time_limit: None,
    },
    Criterion {
        id: 10,
        title: "wild constructions audit",
        experiment: "wild-audit",
        params: r#"
            p = 0.3
            steps = 10
            runs = 20
        "#,
        time_limit: None,
    },
    Criterion {
        id: 11,
        title: "wild crossing growth rate",
        experiment: "wild-sharp",
        params: r#"
            q = 0.5
            steps = 16
            runs = 200
            band = [0.3, 1.5]
        "#,
        time_limit: None,
    },
];

fn report_line(pass: bool, id: u32, title: &str, detail: &str) -> bool {
    println!("[{}] {id:>2} {title}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn check_experiment(c: &Criterion) -> bool {
    let params: toml::Table = toml::from_str(c.params).expect("criterion params parse");
    let start = Instant::now();
    let outcome: Outcome = match run_experiment(c.experiment, &params, SEED) {
        Ok(o) => o,
        Err(e) => return report_line(false, c.id, c.title, &format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    let r = &outcome.report;
    let in_time = c.time_limit.is_none_or(|t| elapsed < t);
    let mut detail = format!(
        "{} checks, {} errored trials, {:.2}s",
        r.checks.len(),
        r.errored,
        elapsed.as_secs_f64()
    );
    if let Some(t) = c.time_limit.filter(|_| !in_time) {
        detail += &format!(" (limit {}s)", t.as_secs());
    }
    for ch in r.checks.iter().filter(|ch| !ch.pass) {
        detail += &format!("; failed `{}` estimate {:.6} target {:.6}", ch.label, ch.estimate, ch.target);
    }
    report_line(r.pass && in_time, c.id, c.title, &detail)
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .expect("report dir")
        .map(|e| {
            let e = e.expect("dir entry");
            let name = e.file_name().to_string_lossy().into_owned();
            (name, std::fs::read(e.path()).expect("report file"))
        })
        .collect();
    files.sort();
    files
}

fn check_determinism() -> bool {
    let title = "run-all is byte-for-byte reproducible";
    let config = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/battery.toml");
    let cfg = match BatteryConfig::load(&config) {
        Ok(c) => c,
        Err(e) => return report_line(false, 12, title, &format!("config error: {e}")),
    };
    let dirs = [tempfile::tempdir().expect("tempdir"), tempfile::tempdir().expect("tempdir")];
    for d in &dirs {
        if let Err(e) = run_all(&cfg, SEED, d.path()) {
            return report_line(false, 12, title, &format!("error: {e}"));
        }
    }
    let (a, b) = (read_dir_sorted(dirs[0].path()), read_dir_sorted(dirs[1].path()));
    let names = |v: &[(String, Vec<u8>)]| v.iter().map(|x| x.0.clone()).collect::<Vec<_>>();
    if names(&a) != names(&b) {
        return report_line(false, 12, title, "different file sets");
    }
    let differing: Vec<&str> = a.iter().zip(&b).filter(|(x, y)| x.1 != y.1).map(|(x, _)| x.0.as_str()).collect();
    let detail = if differing.is_empty() {
        format!("{} files identical", a.len())
    } else {
        format!("differing: {}", differing.join(", "))
    };
    report_line(differing.is_empty(), 12, title, &detail)
}

fn main() -> ExitCode {
    let mut failed = 0;
    for c in CRITERIA {
        failed += !check_experiment(c) as usize;
    }
    failed += !check_determinism() as usize;
    println!("{} criteria, {failed} failed", CRITERIA.len() + 1);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
