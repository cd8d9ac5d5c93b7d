//! Monte Carlo experiments on the action of Dehn twists: random walks compared
//! with the conditioned Haar reference measure, two-start comparisons, single
//! twist invariance, and circle orbits of one twist.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::repvar::{character_distance, trace_coordinates, BoundaryCondition, CharacterPoint, FiberSampler, Representation};
use crate::rng::{chain_seed, stream, streams};
use crate::trace::{reduce_trace, CompiledPolynomial};
use crate::twist::{twist_automorphism_power, walk_entries, CurveCatalogEntry, CurveRole, SplittingDatum};
use crate::word::{IndexSet, SurfacePresentation};

/// Version tag written into every report.
pub const REPORT_SCHEMA: &str = "surfchar.report/1";

/// Significance level for KS thresholds.
pub const KS_ALPHA: f64 = 0.001;

/// Default KS threshold for single-twist invariance at 10⁴ samples.
pub const INVARIANCE_THRESHOLD: f64 = 0.02;

/// Below this many samples an invariance test reports no verdict.
pub const MIN_INVARIANCE_SAMPLES: usize = 200;

/// Tolerance of the tracked-versus-recomputed coordinate check.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Tolerance of the iterate-versus-flow check in circle orbits.
pub const ORBIT_TOL: f64 = 1e-6;

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = if x[i] <= y[j] { x[i] } else { y[j] };
        while i < x.len() && x[i] == v {
            i += 1;
        }
        while j < y.len() && y[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// Critical KS distance `c(α)·√((n+m)/(nm))`, `c(α) = √(−ln(α/2)/2)`,
/// rounded up to one significant figure.
pub fn ks_threshold(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let raw = c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt();
    let scale = 10f64.powf(raw.log10().floor());
    // guard against 0.0299999 rounding to 0.04
    (raw / scale - 1e-9).ceil() * scale
}

/// Star discrepancy of points in `[0, 1)` against the uniform law.
pub fn star_discrepancy(points: &[f64]) -> f64 {
    let mut x = points.to_vec();
    x.sort_by(f64::total_cmp);
    let k = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(i, &v)| ((i as f64 + 1.0) / k - v).max(v - i as f64 / k))
        .fold(0.0, f64::max)
}

/// Sample autocorrelation at `lag`.
pub fn autocorrelation(series: &[f64], lag: usize) -> f64 {
    let n = series.len();
    if lag >= n {
        return 0.0;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let var: f64 = series.iter().map(|x| (x - mean).powi(2)).sum();
    if var == 0.0 {
        return 0.0;
    }
    let cov: f64 = (0..n - lag).map(|i| (series[i] - mean) * (series[i + lag] - mean)).sum();
    cov / var
}

/// Two-sample χ² statistic on a `bins × bins` grid over `[−2, 2]²`, with the
/// number of occupied cells minus one as degrees of freedom.
pub fn binned_chi2(a: &[(f64, f64)], b: &[(f64, f64)], bins: usize) -> (f64, usize) {
    let cell = |v: f64| (((v + 2.0) / 4.0 * bins as f64).floor() as isize).clamp(0, bins as isize - 1) as usize;
    let mut ca = vec![0.0; bins * bins];
    let mut cb = vec![0.0; bins * bins];
    for &(x, y) in a {
        ca[cell(x) * bins + cell(y)] += 1.0;
    }
    for &(x, y) in b {
        cb[cell(x) * bins + cell(y)] += 1.0;
    }
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (k1, k2) = ((m / n).sqrt(), (n / m).sqrt());
    let mut chi2 = 0.0;
    let mut used = 0;
    for (o, e) in ca.iter().zip(&cb) {
        if o + e > 0.0 {
            chi2 += (k1 * o - k2 * e).powi(2) / (o + e);
            used += 1;
        }
    }
    (chi2, used.max(1) - 1)
}

/// Outcome of a statistical comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    InsufficientPower,
}

/// Result of an experiment, serialized as the JSON report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub experiment: String,
    pub config: Value,
    pub seed: u64,
    /// KS distance per judged coordinate, in coordinate order.
    pub ks: Map<String, Value>,
    pub threshold: f64,
    pub verdict: Verdict,
    pub runtime_seconds: Option<f64>,
    pub acceptance_rate: f64,
    pub diagnostics: Map<String, Value>,
}

impl ExperimentReport {
    pub fn max_ks(&self) -> f64 {
        self.ks.values().filter_map(Value::as_f64).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Parameters of a Dehn-twist random walk.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkConfig {
    pub genus: u32,
    pub boundary: u32,
    pub b: Vec<f64>,
    pub epsilon: f64,
    pub seed: u64,
    pub steps: u64,
    pub burn_in: u64,
    pub thinning: u64,
    /// Index sets of the curves to twist along; empty means every simple,
    /// non-peripheral catalog curve.
    pub curves: Vec<Vec<u32>>,
    pub reference_samples: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            genus: 1,
            boundary: 1,
            b: vec![0.47],
            epsilon: 1e-2,
            seed: 1,
            steps: 100_000,
            burn_in: 1_000,
            thinning: 10,
            curves: Vec::new(),
            reference_samples: 10_000,
        }
    }
}

impl WalkConfig {
    pub fn for_surface(genus: u32, boundary: u32) -> Self {
        WalkConfig {
            genus,
            boundary,
            b: vec![0.47; boundary as usize],
            ..WalkConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps <= self.burn_in {
            return Err(Error::Config(format!(
                "steps ({}) must exceed burn_in ({})",
                self.steps, self.burn_in
            )));
        }
        if self.thinning == 0 {
            return Err(Error::Config("thinning must be at least 1".into()));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if self.b.len() != self.boundary as usize {
            return Err(Error::BoundaryArity {
                expected: self.boundary as usize,
                got: self.b.len(),
            });
        }
        Ok(())
    }

    fn presentation(&self) -> Result<Arc<SurfacePresentation>> {
        Ok(Arc::new(SurfacePresentation::new(self.genus, self.boundary)?))
    }

    fn boundary_condition(&self) -> Result<BoundaryCondition> {
        BoundaryCondition::new(self.b.clone())
    }

    /// The walk's step curves.
    pub fn step_entries(&self) -> Result<Vec<CurveCatalogEntry>> {
        let all = walk_entries(self.genus, self.boundary)?;
        let chosen: Vec<CurveCatalogEntry> = if self.curves.is_empty() {
            all
        } else {
            let mut out = Vec::new();
            for c in &self.curves {
                let i = IndexSet::new(c)?;
                let e = all
                    .iter()
                    .find(|e| e.index == i)
                    .ok_or_else(|| Error::Config(format!("{} is not a simple non-peripheral catalog curve", i.name())))?;
                out.push(e.clone());
            }
            out
        };
        if chosen.is_empty() {
            return Err(Error::TrivialWalkGroup);
        }
        Ok(chosen)
    }
}

/// Coordinates of `pres` that are boundary traces (conserved by every twist).
pub fn conserved_coordinates(pres: &SurfacePresentation) -> Vec<bool> {
    pres.index_sets()
        .iter()
        .map(|i| pres.peripheral_index(&i.curve_word()).is_some())
        .collect()
}

/// Recorded states of one chain plus its diagnostics.
#[derive(Clone, Debug)]
pub struct ChainRun {
    pub start: CharacterPoint,
    pub points: Vec<CharacterPoint>,
    /// Largest change of any boundary trace over a single step.
    pub max_step_drift: f64,
    /// Largest deviation of any boundary trace from its starting value.
    pub max_total_drift: f64,
    /// Largest gap, over single steps, between the coordinates pushed through
    /// the trace polynomials of the step and the coordinates recomputed from
    /// the new representation.
    pub max_consistency_error: f64,
    /// The same gap when the polynomials are chained over a whole thinning
    /// interval, re-anchored at each record. Rounding errors grow along the
    /// interval at the rate the twists stretch the coordinates.
    pub max_interval_gap: f64,
    pub proposals: u64,
    pub accepted: u64,
}

struct StepMap {
    entry: CurveCatalogEntry,
    // compiled trace polynomials of φ^{±1}(A_I), I in index-set order
    plus: Vec<CompiledPolynomial>,
    minus: Vec<CompiledPolynomial>,
}

fn step_maps(pres: &SurfacePresentation, entries: Vec<CurveCatalogEntry>) -> Result<Vec<StepMap>> {
    let n = pres.rank();
    let sets = pres.index_sets();
    let compile = |d: &SplittingDatum, power: i64| -> Result<Vec<CompiledPolynomial>> {
        let phi = twist_automorphism_power(d, power);
        sets.iter()
            .map(|i| reduce_trace(&i.curve_word().substitute(&phi), n)?.compile(n))
            .collect()
    };
    entries
        .into_iter()
        .map(|entry| {
            let d = match &entry.role {
                CurveRole::Splitting(d) => d.clone(),
                _ => return Err(Error::Config(format!("{} has no twist", entry.label()))),
            };
            Ok(StepMap {
                plus: compile(&d, 1)?,
                minus: compile(&d, -1)?,
                entry,
            })
        })
        .collect()
}

/// One chain of the walk with its own seed.
pub fn run_chain(cfg: &WalkConfig, seed: u64) -> Result<ChainRun> {
    cfg.validate()?;
    let pres = cfg.presentation()?;
    let maps = step_maps(&pres, cfg.step_entries()?)?;
    let mut sampler = FiberSampler::new(pres.clone(), cfg.boundary_condition()?, cfg.epsilon)?;
    let mut start_rng = stream(seed, streams::START);
    let mut rho = sampler.sample(&mut start_rng)?;
    let start = trace_coordinates(&rho);
    let b0 = rho.boundary_traces();
    let mut prev_b = b0.clone();
    let mut tracked = start.coords().to_vec();
    let mut current = tracked.clone();
    let mut rng = stream(seed, streams::WALK);
    let mut run = ChainRun {
        start: start.clone(),
        points: Vec::new(),
        max_step_drift: 0.0,
        max_total_drift: 0.0,
        max_consistency_error: 0.0,
        max_interval_gap: 0.0,
        proposals: sampler.proposals(),
        accepted: sampler.accepted(),
    };
    for step in 1..=cfg.steps {
        let k = rng.random_range(0..maps.len());
        let power = if rng.random::<bool>() { 1 } else { -1 };
        let m = &maps[k];
        rho = m.entry.dehn_twist(&rho, power)?;
        let polys = if power == 1 { &m.plus } else { &m.minus };
        let point = trace_coordinates(&rho);
        let one_step: Vec<f64> = polys.iter().map(|p| p.eval(&current)).collect();
        run.max_consistency_error = run.max_consistency_error.max(max_gap(&one_step, point.coords()));
        tracked = polys.iter().map(|p| p.eval(&tracked)).collect();
        current = point.coords().to_vec();
        let bt = rho.boundary_traces();
        for i in 0..bt.len() {
            run.max_step_drift = run.max_step_drift.max((bt[i] - prev_b[i]).abs());
            run.max_total_drift = run.max_total_drift.max((bt[i] - b0[i]).abs());
        }
        prev_b = bt;
        if step > cfg.burn_in && (step - cfg.burn_in).is_multiple_of(cfg.thinning) {
            run.max_interval_gap = run.max_interval_gap.max(max_gap(&tracked, &current));
            tracked = current.clone();
            run.points.push(CharacterPoint::new(start.surface(), current.clone()));
        }
    }
    Ok(run)
}

/// Reference draws from the conditioned Haar measure.
pub fn reference_sample(cfg: &WalkConfig, seed: u64, count: usize) -> Result<(Vec<CharacterPoint>, f64)> {
    let pres = cfg.presentation()?;
    let mut sampler = FiberSampler::new(pres, cfg.boundary_condition()?, cfg.epsilon)?;
    let mut rng = stream(seed, streams::REFERENCE);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(trace_coordinates(&sampler.sample(&mut rng)?));
    }
    Ok((out, sampler.acceptance_rate()))
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn column(points: &[CharacterPoint], k: usize) -> Vec<f64> {
    points.iter().map(|p| p.coords()[k]).collect()
}

fn ks_columns(
    pres: &SurfacePresentation,
    a: &[CharacterPoint],
    b: &[CharacterPoint],
) -> Result<(Map<String, Value>, Map<String, Value>)> {
    let conserved = conserved_coordinates(pres);
    let mut judged = Map::new();
    let mut other = Map::new();
    for (k, set) in pres.index_sets().iter().enumerate() {
        let d = ks_statistic(&column(a, k), &column(b, k))?;
        if conserved[k] {
            other.insert(set.name(), json!(d));
        } else {
            judged.insert(set.name(), json!(d));
        }
    }
    Ok((judged, other))
}

fn verdict(ks: &Map<String, Value>, threshold: f64) -> Verdict {
    if ks.values().filter_map(Value::as_f64).all(|d| d <= threshold) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Runs `chains` independent chains (seeds derived from `cfg.seed`), in
/// parallel when `chains > 1`, and returns them in chain order.
pub fn run_chains(cfg: &WalkConfig, chains: usize) -> Result<Vec<ChainRun>> {
    if chains <= 1 {
        return Ok(vec![run_chain(cfg, cfg.seed)?]);
    }
    let results: Vec<Result<ChainRun>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..chains)
            .map(|i| s.spawn(move || run_chain(cfg, chain_seed(cfg.seed, i as u64))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread")).collect()
    });
    results.into_iter().collect()
}

/// Random walk outcome: report plus the recorded coordinate stream.
#[derive(Clone, Debug)]
pub struct WalkOutcome {
    pub report: ExperimentReport,
    pub points: Vec<CharacterPoint>,
}

/// Dehn-twist random walk compared with the reference measure.
pub fn run_random_walk(cfg: &WalkConfig) -> Result<WalkOutcome> {
    run_random_walk_chains(cfg, 1)
}

/// As [`run_random_walk`] with several chains pooled in chain order.
pub fn run_random_walk_chains(cfg: &WalkConfig, chains: usize) -> Result<WalkOutcome> {
    cfg.validate()?;
    let pres = cfg.presentation()?;
    let runs = run_chains(cfg, chains)?;
    let points: Vec<CharacterPoint> = runs.iter().flat_map(|r| r.points.iter().cloned()).collect();
    let (reference, rate) = reference_sample(cfg, cfg.seed, cfg.reference_samples)?;
    let (ks, conserved) = ks_columns(&pres, &points, &reference)?;
    let threshold = ks_threshold(points.len(), reference.len(), KS_ALPHA);

    let mut diag = Map::new();
    diag.insert("records".into(), json!(points.len()));
    diag.insert("reference_samples".into(), json!(reference.len()));
    diag.insert("chains".into(), json!(runs.len()));
    diag.insert("conserved_ks".into(), Value::Object(conserved));
    diag.insert(
        "max_step_boundary_drift".into(),
        json!(runs.iter().map(|r| r.max_step_drift).fold(0.0, f64::max)),
    );
    diag.insert(
        "max_total_boundary_drift".into(),
        json!(runs.iter().map(|r| r.max_total_drift).fold(0.0, f64::max)),
    );
    diag.insert(
        "max_consistency_error".into(),
        json!(runs.iter().map(|r| r.max_consistency_error).fold(0.0, f64::max)),
    );
    diag.insert(
        "max_interval_gap".into(),
        json!(runs.iter().map(|r| r.max_interval_gap).fold(0.0, f64::max)),
    );
    diag.insert("autocorrelation".into(), mixing_summary(&pres, &runs[0].points));
    diag.insert("chi2".into(), chi2_summary(&pres, &points, &reference));

    let report = ExperimentReport {
        schema: REPORT_SCHEMA.into(),
        experiment: "walk".into(),
        config: serde_json::to_value(cfg).expect("config serializes"),
        seed: cfg.seed,
        verdict: verdict(&ks, threshold),
        ks,
        threshold,
        runtime_seconds: None,
        acceptance_rate: rate,
        diagnostics: diag,
    };
    Ok(WalkOutcome { report, points })
}

fn mixing_summary(pres: &SurfacePresentation, points: &[CharacterPoint]) -> Value {
    let conserved = conserved_coordinates(pres);
    let mut out = Map::new();
    for (k, set) in pres.index_sets().iter().enumerate() {
        if conserved[k] {
            continue;
        }
        let series = column(points, k);
        let first_below = (1..=50).find(|&lag| autocorrelation(&series, lag).abs() < 0.1);
        out.insert(
            set.name(),
            json!({
                "lag1": autocorrelation(&series, 1),
                "lag50": autocorrelation(&series, 50),
                "first_lag_below_0.1": first_below,
            }),
        );
    }
    Value::Object(out)
}

/// χ² on the pair `(f1, f2)`, or on the first two non-boundary coordinates
/// when `f1` or `f2` is a boundary trace.
fn chi2_summary(pres: &SurfacePresentation, a: &[CharacterPoint], b: &[CharacterPoint]) -> Value {
    let conserved = conserved_coordinates(pres);
    let sets = pres.index_sets();
    let pair: Vec<usize> = if !conserved[0] && !conserved[1] {
        vec![0, 1]
    } else {
        (0..sets.len()).filter(|&k| !conserved[k]).take(2).collect()
    };
    if pair.len() < 2 {
        return Value::Null;
    }
    let proj = |p: &[CharacterPoint]| -> Vec<(f64, f64)> {
        p.iter().map(|c| (c.coords()[pair[0]], c.coords()[pair[1]])).collect()
    };
    let (chi2, dof) = binned_chi2(&proj(a), &proj(b), 16);
    json!({
        "pair": [sets[pair[0]].name(), sets[pair[1]].name()],
        "bins": 16,
        "statistic": chi2,
        "dof": dof,
    })
}

/// Two walks from independent starting points, compared with each other.
pub fn two_start_test(cfg: &WalkConfig, seed2: u64) -> Result<ExperimentReport> {
    cfg.validate()?;
    let pres = cfg.presentation()?;
    let a = run_chain(cfg, cfg.seed)?;
    let b = if seed2 == cfg.seed { a.clone() } else { run_chain(cfg, seed2)? };
    let (ks, conserved) = ks_columns(&pres, &a.points, &b.points)?;
    let threshold = ks_threshold(a.points.len(), b.points.len(), KS_ALPHA);
    let mut diag = Map::new();
    diag.insert("seed2".into(), json!(seed2));
    diag.insert("records".into(), json!(a.points.len()));
    diag.insert("conserved_ks".into(), Value::Object(conserved));
    diag.insert(
        "start_distance".into(),
        json!(character_distance(&a.start, &b.start)?),
    );
    let rate = (a.accepted + b.accepted) as f64 / (a.proposals + b.proposals).max(1) as f64;
    Ok(ExperimentReport {
        schema: REPORT_SCHEMA.into(),
        experiment: "two-start".into(),
        config: serde_json::to_value(cfg).expect("config serializes"),
        seed: cfg.seed,
        verdict: verdict(&ks, threshold),
        ks,
        threshold,
        runtime_seconds: None,
        acceptance_rate: rate,
        diagnostics: diag,
    })
}

/// Single-twist invariance: fresh fiber samples against their images.
#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceResult {
    pub ks: Vec<(String, f64)>,
    pub samples: usize,
    pub threshold: f64,
    /// `None` when there are fewer than [`MIN_INVARIANCE_SAMPLES`] samples.
    pub verdict: Option<bool>,
    pub acceptance_rate: f64,
}

impl InvarianceResult {
    pub fn max_ks(&self) -> f64 {
        self.ks.iter().map(|(_, d)| *d).fold(0.0, f64::max)
    }
}

/// KS distances between the coordinates of `samples` fiber draws and the
/// coordinates of their images under one Dehn twist. Peripheral twists act
/// trivially on characters, so their images are the points themselves.
pub fn invariance_test<R: Rng + ?Sized>(
    pres: Arc<SurfacePresentation>,
    b: &BoundaryCondition,
    epsilon: f64,
    entry: &CurveCatalogEntry,
    samples: usize,
    threshold: f64,
    rng: &mut R,
) -> Result<InvarianceResult> {
    if samples == 0 {
        return Err(Error::EmptySample);
    }
    let mut sampler = FiberSampler::new(pres.clone(), b.clone(), epsilon)?;
    let mut before = Vec::with_capacity(samples);
    let mut after = Vec::with_capacity(samples);
    for _ in 0..samples {
        let rho: Representation = sampler.sample(rng)?;
        let c = trace_coordinates(&rho);
        let image = match &entry.role {
            CurveRole::Peripheral { .. } => c.clone(),
            _ => trace_coordinates(&entry.dehn_twist(&rho, 1)?),
        };
        before.push(c);
        after.push(image);
    }
    let mut ks = Vec::new();
    for (k, set) in pres.index_sets().iter().enumerate() {
        ks.push((set.name(), ks_statistic(&column(&before, k), &column(&after, k))?));
    }
    let verdict = (samples >= MIN_INVARIANCE_SAMPLES).then(|| ks.iter().all(|(_, d)| *d <= threshold));
    Ok(InvarianceResult {
        ks,
        samples,
        threshold,
        verdict,
        acceptance_rate: sampler.acceptance_rate(),
    })
}

/// Orbit of one Dehn twist read on the circle of the twist flow.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleOrbit {
    /// `t_k / T` for `k = 1..=K`.
    pub phases: Vec<f64>,
    pub discrepancy: f64,
    /// Largest distance between the k-th iterate and the flow at `t_k`.
    pub max_flow_error: f64,
    /// Number of distinct phases up to `1e−9`.
    pub distinct_points: usize,
    pub twist_time: f64,
    pub period: f64,
}

/// Iterates the Dehn twist of `entry` `k` times, maps the k-th iterate to
/// `t_k = k·sign·s(ρ(α)) mod T(ρ(α))`, checks it against the flow at `t_k`,
/// and measures the star discrepancy of `t_k / T`.
pub fn circle_orbit_test(rho: &Representation, entry: &CurveCatalogEntry, k: usize) -> Result<CircleOrbit> {
    let d = entry
        .datum()
        .ok_or_else(|| Error::Config(format!("{} has no twist flow", entry.label())))?;
    let a = rho.evaluate(d.driving_word());
    let s = a.twist_time()?;
    let period = a.period()?;
    let sign = d.dehn_sign() as f64;
    let mut phases = Vec::with_capacity(k);
    let mut cur = rho.clone();
    let mut worst: f64 = 0.0;
    for step in 1..=k {
        cur = crate::twist::apply_dehn_twist(&cur, d, 1);
        let t = (step as f64 * sign * s).rem_euclid(period);
        let flowed = crate::twist::apply_twist_flow(rho, d, t);
        worst = worst.max(character_distance(&trace_coordinates(&cur), &trace_coordinates(&flowed))?);
        phases.push(t / period);
    }
    let mut sorted = phases.clone();
    sorted.sort_by(f64::total_cmp);
    let mut distinct = usize::from(!sorted.is_empty());
    for w in sorted.windows(2) {
        if w[1] - w[0] > 1e-9 {
            distinct += 1;
        }
    }
    // phases near 0 and near 1 are the same circle point
    if distinct > 1 && sorted[0] + 1.0 - sorted[sorted.len() - 1] <= 1e-9 {
        distinct -= 1;
    }
    Ok(CircleOrbit {
        discrepancy: star_discrepancy(&phases),
        phases,
        max_flow_error: worst,
        distinct_points: distinct,
        twist_time: s,
        period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::{haar_sample, GroupElement};
    use crate::twist::catalog;
    use std::f64::consts::PI;

    #[test]
    fn ks_examples() {
        let a = [0.1, 0.5, 0.9, 0.3];
        assert_eq!(ks_statistic(&a, &a).unwrap(), 0.0);
        let lo: Vec<f64> = (0..100).map(f64::from).collect();
        let hi: Vec<f64> = (1000..1100).map(f64::from).collect();
        assert_eq!(ks_statistic(&lo, &hi).unwrap(), 1.0);
        assert!(matches!(ks_statistic(&[], &a), Err(Error::EmptySample)));
        // ties across the samples
        assert_eq!(ks_statistic(&[1.0, 1.0, 2.0], &[1.0, 2.0, 2.0]).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn ks_against_brute_force() {
        let mut rng = stream(1, 0);
        for _ in 0..50 {
            let a: Vec<f64> = (0..37).map(|_| (rng.random::<f64>() * 10.0).floor()).collect();
            let b: Vec<f64> = (0..23).map(|_| (rng.random::<f64>() * 12.0).floor()).collect();
            let ecdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
            let brute = a
                .iter()
                .chain(&b)
                .map(|&x| (ecdf(&a, x) - ecdf(&b, x)).abs())
                .fold(0.0, f64::max);
            assert!((ks_statistic(&a, &b).unwrap() - brute).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_samples_pass_at_the_threshold() {
        let mut rng = stream(2, 0);
        let a: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
        assert!(ks_statistic(&a, &b).unwrap() <= 0.03);
    }

    #[test]
    fn thresholds() {
        assert_eq!(ks_threshold(10_000, 10_000, 0.001), 0.03);
        assert_eq!(ks_threshold(9_900, 10_000, 0.001), 0.03);
        assert!((ks_threshold(100, 100, 0.001) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn discrepancy_examples() {
        assert!((star_discrepancy(&[0.3]) - 0.7).abs() < 1e-15);
        assert!((star_discrepancy(&[0.125, 0.375, 0.625, 0.875]) - 0.125).abs() < 1e-15);
        let grid: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!((star_discrepancy(&grid) - 0.0005).abs() < 1e-12);
    }

    #[test]
    fn autocorrelation_examples() {
        let alt: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!((autocorrelation(&alt, 1) + 1.0).abs() < 1e-2);
        assert!((autocorrelation(&alt, 2) - 1.0).abs() < 1e-2);
        assert_eq!(autocorrelation(&[1.0; 10], 1), 0.0);
    }

    #[test]
    fn chi2_of_identical_samples_is_zero() {
        let pts: Vec<(f64, f64)> = (0..100).map(|i| ((i as f64) / 50.0 - 1.0, 0.3)).collect();
        assert_eq!(binned_chi2(&pts, &pts, 16).0, 0.0);
    }

    fn torus_with_trace(f: f64) -> Representation {
        let p = Arc::new(SurfacePresentation::new(1, 1).unwrap());
        let a = GroupElement::with_trace(f, [0.2, 0.9, -0.4]);
        let b = haar_sample(&mut stream(3, 0));
        Representation::new(p, vec![a, b])
    }

    #[test]
    fn circle_orbit_examples() {
        let e = &catalog(1, 1).unwrap()[0];
        let one = circle_orbit_test(&torus_with_trace(0.47), e, 1).unwrap();
        let x = one.phases[0];
        assert!((one.discrepancy - x.max(1.0 - x)).abs() < 1e-15);

        let quarter = circle_orbit_test(&torus_with_trace(0.0), e, 400).unwrap();
        assert_eq!(quarter.distinct_points, 4);
        assert!(quarter.discrepancy >= 0.125 - 1e-12);
        assert!((quarter.twist_time - PI / 2.0).abs() < 1e-12);

        let k = 2000;
        let irr = circle_orbit_test(&torus_with_trace(0.47), e, k).unwrap();
        assert!(irr.discrepancy <= 5.0 / (k as f64).sqrt());
        assert!(irr.max_flow_error <= ORBIT_TOL);
        assert_eq!(irr.distinct_points, k);
    }

    #[test]
    fn central_curve_has_no_circle() {
        let p = Arc::new(SurfacePresentation::new(1, 1).unwrap());
        let rho = Representation::new(p, vec![GroupElement::identity(), haar_sample(&mut stream(4, 0))]);
        let e = &catalog(1, 1).unwrap()[0];
        assert!(matches!(circle_orbit_test(&rho, e, 10), Err(Error::CentralElement { .. })));
    }

    #[test]
    fn walk_config_validation() {
        let mut c = WalkConfig::default();
        assert!(c.validate().is_ok());
        c.burn_in = c.steps;
        assert!(c.validate().is_err());
        let mut c = WalkConfig::default();
        c.thinning = 0;
        assert!(c.validate().is_err());
        let c = WalkConfig::for_surface(0, 3);
        assert!(matches!(run_random_walk(&c), Err(Error::TrivialWalkGroup)));
        let mut c = WalkConfig::default();
        c.curves = vec![vec![1, 2, 3]];
        assert!(c.step_entries().is_err());
    }

    #[test]
    fn short_walk_is_deterministic_and_consistent() {
        let cfg = WalkConfig {
            steps: 3_000,
            burn_in: 100,
            reference_samples: 300,
            ..WalkConfig::for_surface(1, 2)
        };
        let a = run_random_walk(&cfg).unwrap();
        let b = run_random_walk(&cfg).unwrap();
        assert_eq!(a.report.to_json(), b.report.to_json());
        assert_eq!(a.points, b.points);
        assert_eq!(a.points.len(), 290);
        let diag = &a.report.diagnostics;
        assert!(diag["max_consistency_error"].as_f64().unwrap() <= CONSISTENCY_TOL, "{}", diag["max_consistency_error"]);
        assert!(diag["max_step_boundary_drift"].as_f64().unwrap() <= 1e-12);
        // f3 is the first boundary trace on this surface and is not judged
        assert!(!a.report.ks.contains_key("f3"));
    }

    #[test]
    fn same_seed_two_start_is_zero() {
        let cfg = WalkConfig {
            steps: 2_000,
            burn_in: 100,
            ..WalkConfig::default()
        };
        let r = two_start_test(&cfg, cfg.seed).unwrap();
        assert_eq!(r.max_ks(), 0.0);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn chains_are_pooled_in_order() {
        let cfg = WalkConfig {
            steps: 1_000,
            burn_in: 0,
            reference_samples: 100,
            ..WalkConfig::default()
        };
        let runs = run_chains(&cfg, 3).unwrap();
        for (i, r) in runs.iter().enumerate() {
            let solo = run_chain(&cfg, chain_seed(cfg.seed, i as u64)).unwrap();
            assert_eq!(solo.points, r.points);
        }
    }

    #[test]
    fn invariance_small_sample_has_no_verdict() {
        let p = Arc::new(SurfacePresentation::new(1, 1).unwrap());
        let b = BoundaryCondition::uniform(1, 0.47).unwrap();
        let e = &catalog(1, 1).unwrap()[0];
        let r = invariance_test(p, &b, 1e-2, e, 10, INVARIANCE_THRESHOLD, &mut stream(5, 0)).unwrap();
        assert_eq!(r.verdict, None);
        assert_eq!(r.samples, 10);
    }

    #[test]
    fn peripheral_invariance_is_exact() {
        let p = Arc::new(SurfacePresentation::new(0, 4).unwrap());
        let b = BoundaryCondition::uniform(4, 0.47).unwrap();
        let e = &catalog(0, 4).unwrap()[0];
        let r = invariance_test(p, &b, 1e-2, e, 300, INVARIANCE_THRESHOLD, &mut stream(6, 0)).unwrap();
        assert_eq!(r.max_ks(), 0.0);
        assert_eq!(r.verdict, Some(true));
    }
}
