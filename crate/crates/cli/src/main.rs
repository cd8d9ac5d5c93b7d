//! `surfchar`: batch experiments on SU(2) character varieties of surfaces.
//!
//! Exit status: 0 when the verdict passes, 2 when it fails (or the sample is
//! too small for a verdict), 1 on usage, configuration or runtime errors.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use surfchar::ergolab::{
    circle_orbit_test, invariance_test, run_random_walk_chains, two_start_test, ExperimentReport, Verdict,
    ORBIT_TOL, REPORT_SCHEMA,
};
use surfchar::repvar::{tangent_rank, trace_coordinates, write_csv};
use surfchar::rng::{stream, streams};
use surfchar::twist::{catalog, validate_splitting, walk_entries};
use surfchar::{
    BoundaryCondition, CharacterPoint, CurveCatalogEntry, FiberSampler, GroupElement, IndexSet, SurfacePresentation,
    Word,
};

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "surfchar", version, about = "Twist dynamics and ergodicity experiments on SU(2) character varieties")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Independent walk chains.
    #[arg(long, global = true, value_name = "K")]
    chains: Option<usize>,
    /// Surface as `genus,boundary`.
    #[arg(long, global = true, value_name = "G,N", value_parser = parse_surface)]
    surface: Option<(u32, u32)>,
    /// Boundary traces, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    b: Option<Vec<f64>>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Store wall-clock runtime in the JSON report (breaks byte-identity).
    #[arg(long, global = true)]
    record_runtime: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw fiber points and write their trace coordinates.
    Sample {
        #[arg(long)]
        count: Option<usize>,
    },
    /// Dehn-twist random walk against the reference measure.
    Walk {
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        burn_in: Option<u64>,
        #[arg(long)]
        thinning: Option<u64>,
        #[arg(long)]
        reference_samples: Option<usize>,
    },
    /// Two walks from independent starts, compared with each other.
    TwoStart {
        #[arg(long)]
        seed2: Option<u64>,
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Validate every splitting in the curve catalogs.
    VerifyRecipes {
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Tangent rank of the trace coordinates at sampled fiber points.
    RankCheck {
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Print the trace polynomial of a word.
    ReduceTrace {
        /// Word such as "a1 a2 A1 A2" (capital letters are inverses).
        #[arg(long)]
        word: String,
        /// Number of generators.
        #[arg(long)]
        n: usize,
    },
    /// Iterate one Dehn twist and read the orbit on the twist circle.
    OrbitCircle {
        /// Curve index set, e.g. `1,2`.
        #[arg(long, value_delimiter = ',')]
        curve: Option<Vec<u32>>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        trace: Option<f64>,
    },
    /// Compare fiber samples with their images under one Dehn twist.
    Invariance {
        #[arg(long, value_delimiter = ',')]
        curve: Option<Vec<u32>>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

fn parse_surface(s: &str) -> Result<(u32, u32), String> {
    let (g, n) = s.split_once(',').ok_or("expected `genus,boundary`, e.g. 1,1")?;
    let num = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("`{x}`: {e}"));
    Ok((num(g)?, num(n)?))
}

/// Failure with exit status 1.
struct Failure(String);

impl From<surfchar::Error> for Failure {
    fn from(e: surfchar::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<Verdict, Failure>;

fn resolve(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(Failure)?,
        None => RunConfig::default(),
    };
    if let Some((g, n)) = cli.surface {
        if n != cfg.boundary && cli.b.is_none() {
            cfg.b = None;
        }
        cfg.genus = g;
        cfg.boundary = n;
    }
    if let Some(b) = &cli.b {
        cfg.b = Some(b.clone());
    }
    if let Some(x) = cli.epsilon {
        cfg.epsilon = x;
    }
    if let Some(x) = cli.seed {
        cfg.seed = x;
    }
    if let Some(x) = &cli.out_dir {
        cfg.out_dir = x.clone();
    }
    if let Some(x) = cli.chains {
        cfg.chains = x;
    }
    cfg.record_runtime |= cli.record_runtime;
    if cfg.chains == 0 {
        return Err(Failure("chains must be at least 1".into()));
    }
    match &cli.command {
        Command::Sample { count } => set(&mut cfg.sample.count, *count),
        Command::Walk {
            steps,
            burn_in,
            thinning,
            reference_samples,
        } => {
            set(&mut cfg.walk.steps, *steps);
            set(&mut cfg.walk.burn_in, *burn_in);
            set(&mut cfg.walk.thinning, *thinning);
            set(&mut cfg.walk.reference_samples, *reference_samples);
        }
        Command::TwoStart { seed2, steps } => {
            set(&mut cfg.two_start.seed2, *seed2);
            set(&mut cfg.walk.steps, *steps);
        }
        Command::VerifyRecipes { trials } => set(&mut cfg.verify.trials, *trials),
        Command::RankCheck { samples } => set(&mut cfg.rank.samples, *samples),
        Command::OrbitCircle {
            curve,
            iterations,
            trace,
        } => {
            set(&mut cfg.orbit.curve, curve.clone());
            set(&mut cfg.orbit.iterations, *iterations);
            if trace.is_some() {
                cfg.orbit.trace = *trace;
            }
        }
        Command::Invariance { curve, samples } => {
            set(&mut cfg.invariance.curve, curve.clone());
            set(&mut cfg.invariance.samples, *samples);
        }
        Command::ReduceTrace { .. } => {}
    }
    Ok(cfg)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// The common part of every config echo.
fn echo(cfg: &RunConfig, section: &str, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("genus".into(), json!(cfg.genus));
    m.insert("boundary".into(), json!(cfg.boundary));
    m.insert("b".into(), json!(cfg.boundary_values()));
    m.insert("epsilon".into(), json!(cfg.epsilon));
    m.insert("seed".into(), json!(cfg.seed));
    m.insert(section.into(), body);
    Value::Object(m)
}

fn report(experiment: &str, config: Value, seed: u64, threshold: f64, verdict: Verdict) -> ExperimentReport {
    ExperimentReport {
        schema: REPORT_SCHEMA.into(),
        experiment: experiment.into(),
        config,
        seed,
        ks: Map::new(),
        threshold,
        verdict,
        runtime_seconds: None,
        acceptance_rate: 1.0,
        diagnostics: Map::new(),
    }
}

fn presentation(cfg: &RunConfig) -> Result<Arc<SurfacePresentation>, Failure> {
    Ok(Arc::new(SurfacePresentation::new(cfg.genus, cfg.boundary)?))
}

fn sampler(cfg: &RunConfig) -> Result<FiberSampler, Failure> {
    let b = BoundaryCondition::new(cfg.boundary_values())?;
    Ok(FiberSampler::new(presentation(cfg)?, b, cfg.epsilon)?)
}

/// The catalog entry named by `curve`, or the first walk entry when empty.
fn pick_entry(cfg: &RunConfig, curve: &[u32]) -> Result<CurveCatalogEntry, Failure> {
    if curve.is_empty() {
        return walk_entries(cfg.genus, cfg.boundary)?
            .into_iter()
            .next()
            .ok_or_else(|| Failure(surfchar::Error::TrivialWalkGroup.to_string()));
    }
    let index = IndexSet::new(curve)?;
    catalog(cfg.genus, cfg.boundary)?
        .into_iter()
        .find(|e| e.index == index)
        .ok_or_else(|| Failure(format!("{} is not a curve of the ({},{}) catalog", index.name(), cfg.genus, cfg.boundary)))
}

struct Writer<'a> {
    dir: &'a Path,
    record_runtime: bool,
    started: Instant,
}

impl Writer<'_> {
    fn json(&self, name: &str, mut r: ExperimentReport) -> Result<Verdict, Failure> {
        if self.record_runtime {
            r.runtime_seconds = Some(self.started.elapsed().as_secs_f64());
        }
        let path = self.dir.join(format!("{name}.json"));
        fs::write(&path, r.to_json())?;
        eprintln!("{name}: wrote {}", path.display());
        eprintln!("{name}: verdict {}", serde_json::to_value(r.verdict).unwrap().as_str().unwrap_or("?"));
        Ok(r.verdict)
    }

    fn csv(&self, name: &str, pres: &SurfacePresentation, points: &[CharacterPoint]) -> Result<(), Failure> {
        let mut buf = Vec::new();
        write_csv(&mut buf, pres, points)?;
        let path = self.dir.join(format!("{name}.csv"));
        fs::write(&path, buf)?;
        eprintln!("{name}: wrote {} ({} rows)", path.display(), points.len());
        Ok(())
    }

    fn raw(&self, file: &str, body: String) -> Result<(), Failure> {
        let path = self.dir.join(file);
        fs::write(&path, body)?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }
}

fn cmd_sample(cfg: &RunConfig, out: &Writer) -> Outcome {
    let mut s = sampler(cfg)?;
    let mut rng = stream(cfg.seed, streams::REFERENCE);
    let mut points = Vec::with_capacity(cfg.sample.count);
    for _ in 0..cfg.sample.count {
        points.push(trace_coordinates(&s.sample(&mut rng)?));
    }
    out.csv("sample", s.surface(), &points)?;
    let mut r = report("sample", echo(cfg, "sample", json!(cfg.sample)), cfg.seed, cfg.epsilon, Verdict::Pass);
    r.acceptance_rate = s.acceptance_rate();
    r.diagnostics.insert("records".into(), json!(points.len()));
    r.diagnostics.insert("proposals".into(), json!(s.proposals()));
    out.json("sample", r)
}

fn cmd_walk(cfg: &RunConfig, out: &Writer) -> Outcome {
    let wc = cfg.walk_config();
    let pres = presentation(cfg)?;
    let outcome = run_random_walk_chains(&wc, cfg.chains)?;
    out.csv("walk", &pres, &outcome.points)?;
    out.json("walk", outcome.report)
}

fn cmd_two_start(cfg: &RunConfig, out: &Writer) -> Outcome {
    let wc = cfg.walk_config();
    let mut r = two_start_test(&wc, cfg.two_start.seed2)?;
    if let Value::Object(m) = &mut r.config {
        m.insert("seed2".into(), json!(cfg.two_start.seed2));
    }
    out.json("two-start", r)
}

fn cmd_verify(cfg: &RunConfig, out: &Writer) -> Outcome {
    let mut rng = stream(cfg.seed, streams::VALIDATION);
    let mut entries = Map::new();
    let mut all = true;
    for (g, n) in [(0, 3), (0, 4), (1, 1), (1, 2)] {
        let pres = SurfacePresentation::new(g, n)?;
        for e in catalog(g, n)? {
            let Some(d) = e.datum() else {
                entries.insert(e.label(), json!({ "splitting": false }));
                continue;
            };
            let v = validate_splitting(&pres, d, cfg.verify.trials, &mut rng)?;
            all &= v.passed();
            eprintln!("verify-recipes: {} {}", e.label(), if v.passed() { "ok" } else { "FAIL" });
            let checks: Map<String, Value> = v
                .checks
                .iter()
                .map(|c| (c.name.to_string(), json!({ "passed": c.passed, "max_error": c.max_error, "detail": c.detail })))
                .collect();
            entries.insert(e.label(), json!({ "splitting": true, "passed": v.passed(), "checks": checks }));
        }
    }
    let config = json!({ "seed": cfg.seed, "verify": cfg.verify });
    let verdict = if all { Verdict::Pass } else { Verdict::Fail };
    let mut r = report("verify-recipes", config, cfg.seed, surfchar::twist::FLOW_TOL, verdict);
    r.diagnostics.insert("entries".into(), Value::Object(entries));
    out.json("verify-recipes", r)
}

fn cmd_rank(cfg: &RunConfig, out: &Writer) -> Outcome {
    let mut s = sampler(cfg)?;
    let mut rng = stream(cfg.seed, streams::REFERENCE);
    let expected = (6 * cfg.genus + 2 * cfg.boundary).saturating_sub(6) as usize;
    let mut counts = std::collections::BTreeMap::<usize, usize>::new();
    for _ in 0..cfg.rank.samples {
        *counts.entry(tangent_rank(&s.sample(&mut rng)?)).or_default() += 1;
    }
    let hits = counts.get(&expected).copied().unwrap_or(0);
    let ok = cfg.rank.samples > 0 && hits as f64 >= cfg.rank.min_fraction * cfg.rank.samples as f64;
    let mut r = report(
        "rank-check",
        echo(cfg, "rank", json!(cfg.rank)),
        cfg.seed,
        cfg.rank.min_fraction,
        if ok { Verdict::Pass } else { Verdict::Fail },
    );
    r.acceptance_rate = s.acceptance_rate();
    r.diagnostics.insert("expected_rank".into(), json!(expected));
    r.diagnostics.insert("hits".into(), json!(hits));
    let hist: Map<String, Value> = counts.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    r.diagnostics.insert("rank_counts".into(), Value::Object(hist));
    out.json("rank-check", r)
}

fn cmd_orbit(cfg: &RunConfig, out: &Writer) -> Outcome {
    let entry = pick_entry(cfg, &cfg.orbit.curve)?;
    let mut s = sampler(cfg)?;
    let mut rho = s.sample(&mut stream(cfg.seed, streams::START))?;
    if let Some(f) = cfg.orbit.trace {
        let [i] = entry.index.indices() else {
            return Err(Failure("orbit trace override needs a single-index curve".into()));
        };
        if !(-2.0..=2.0).contains(&f) {
            return Err(Failure(format!("orbit trace {f} outside [-2, 2]")));
        }
        let mut values = rho.values().to_vec();
        let [_, x, y, z] = values[*i as usize - 1].components();
        let axis = if x * x + y * y + z * z > 0.0 { [x, y, z] } else { [0.0, 0.0, 1.0] };
        values[*i as usize - 1] = GroupElement::with_trace(f, axis);
        rho = rho.with_values(values);
    }
    let k = cfg.orbit.iterations;
    let orbit = circle_orbit_test(&rho, &entry, k)?;
    let bound = 5.0 / (k as f64).sqrt();
    let finite = orbit.distinct_points < k;
    let ok = orbit.max_flow_error <= ORBIT_TOL && (finite || orbit.discrepancy <= bound);
    let mut csv = String::from("k,phase\n");
    for (j, p) in orbit.phases.iter().enumerate() {
        csv.push_str(&format!("{},{p:.16e}\n", j + 1));
    }
    out.raw("orbit-circle.csv", csv)?;
    let mut r = report(
        "orbit-circle",
        echo(cfg, "orbit", json!(cfg.orbit)),
        cfg.seed,
        bound,
        if ok { Verdict::Pass } else { Verdict::Fail },
    );
    let d = &mut r.diagnostics;
    d.insert("curve".into(), json!(entry.index.name()));
    d.insert("trace".into(), json!(rho.evaluate(&entry.curve()).trace()));
    d.insert("twist_time".into(), json!(orbit.twist_time));
    d.insert("period".into(), json!(orbit.period));
    d.insert("discrepancy".into(), json!(orbit.discrepancy));
    d.insert("distinct_points".into(), json!(orbit.distinct_points));
    d.insert("finite_orbit".into(), json!(finite));
    d.insert("max_flow_error".into(), json!(orbit.max_flow_error));
    out.json("orbit-circle", r)
}

fn cmd_invariance(cfg: &RunConfig, out: &Writer) -> Outcome {
    let entry = pick_entry(cfg, &cfg.invariance.curve)?;
    let b = BoundaryCondition::new(cfg.boundary_values())?;
    let mut rng = stream(cfg.seed, streams::REFERENCE);
    let res = invariance_test(
        presentation(cfg)?,
        &b,
        cfg.epsilon,
        &entry,
        cfg.invariance.samples,
        cfg.invariance.threshold,
        &mut rng,
    )?;
    let verdict = match res.verdict {
        Some(true) => Verdict::Pass,
        Some(false) => Verdict::Fail,
        None => Verdict::InsufficientPower,
    };
    let mut r = report(
        "invariance",
        echo(cfg, "invariance", json!(cfg.invariance)),
        cfg.seed,
        res.threshold,
        verdict,
    );
    r.ks = res.ks.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    r.acceptance_rate = res.acceptance_rate;
    r.diagnostics.insert("curve".into(), json!(entry.index.name()));
    r.diagnostics.insert("samples".into(), json!(res.samples));
    out.json("invariance", r)
}

fn cmd_reduce(word: &str, n: usize) -> Outcome {
    let w = Word::parse_in(word, n)?;
    println!("{}", surfchar::trace::reduce_trace(&w, n)?);
    Ok(Verdict::Pass)
}

fn run(cli: Cli) -> Outcome {
    if let Command::ReduceTrace { word, n } = &cli.command {
        return cmd_reduce(word, *n);
    }
    let cfg = resolve(&cli)?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Failure(format!("cannot create {}: {e}", cfg.out_dir.display())))?;
    let out = Writer {
        dir: &cfg.out_dir,
        record_runtime: cfg.record_runtime,
        started: Instant::now(),
    };
    match &cli.command {
        Command::Sample { .. } => cmd_sample(&cfg, &out),
        Command::Walk { .. } => cmd_walk(&cfg, &out),
        Command::TwoStart { .. } => cmd_two_start(&cfg, &out),
        Command::VerifyRecipes { .. } => cmd_verify(&cfg, &out),
        Command::RankCheck { .. } => cmd_rank(&cfg, &out),
        Command::OrbitCircle { .. } => cmd_orbit(&cfg, &out),
        Command::Invariance { .. } => cmd_invariance(&cfg, &out),
        Command::ReduceTrace { .. } => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
