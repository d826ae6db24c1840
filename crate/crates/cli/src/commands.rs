use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use qdlab_core::combdisc::{disc_exact_capped, disc_heuristic, DEFAULT_EXHAUSTIVE_CAP};
use qdlab_core::concentration::{comparison_check, default_c_grid, lower_bound_constants};
use qdlab_core::dpp::{self, DppKernel, EXACT_DISTRIBUTION_CAP};
use qdlab_core::io::{hermitian_from_json, matrix_to_json, MatrixJson, ProjectionSystemJson};
use qdlab_core::matcore::OrthogonalProjection;
use qdlab_core::qdisc::{check_delta_event, qdisc_estimate, qdisc_estimate_set_system, QdiscEstimate, QdiscOptions};
use qdlab_core::randmat::{
    concentration_probe, default_probe_deltas, exact_mean_trace, exact_mean_trace_sq, moment_gates,
    random_projection_of_rank, random_projection_system, random_quantum_coloring,
};
use qdlab_core::seeding::{derive_seed, rng_for, stream};
use qdlab_core::setsys::{arithmetic_progressions, evaluate_coloring, random_set_system, ProjectionSystem, SetSystem};
use qdlab_core::stats::{frequencies, total_variation, wilson_interval, Z95};
use qdlab_core::Rational;

use crate::args::*;
use crate::report::{num, opt, Report};
use crate::{CliError, Common};

// ---------------------------------------------------------------------------
// Inputs

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("bad {what} {}: {e}", path.display())))
}

fn positive(value: usize, name: &str) -> Result<usize, CliError> {
    if value == 0 {
        return Err(CliError::Validation(format!("{name} must be at least 1")));
    }
    Ok(value)
}

/// A set system from a file or generator, with the resolved source fields
/// for the report header.
struct SetSource {
    system: SetSystem,
    echo: Value,
}

fn set_source(
    input: &Option<PathBuf>,
    generator: Option<Generator>,
    n: Option<usize>,
    m: Option<usize>,
    common: &Common,
    what: &str,
) -> Result<SetSource, CliError> {
    if let Some(path) = input {
        if generator.is_some() {
            return Err(CliError::Usage("give either an input file or a generator, not both".into()));
        }
        let system: SetSystem = read_json(path, "set system")?;
        return Ok(SetSource { system, echo: json!({"input": path}) });
    }
    let generator = generator.ok_or_else(|| CliError::Usage(format!("{what} needs an input file or a generator")))?;
    let n = positive(n.unwrap_or(8), "n")?;
    match generator {
        Generator::Ap => Ok(SetSource {
            system: arithmetic_progressions(n)?,
            echo: json!({"generator": generator, "n": n}),
        }),
        Generator::Singletons => Ok(SetSource {
            system: SetSystem::from_zero_based(n, (0..n).map(|i| vec![i]).collect())?,
            echo: json!({"generator": generator, "n": n}),
        }),
        Generator::Random => {
            let m = positive(m.unwrap_or(n), "m")?;
            let seed = common.require_seed("a random set system")?;
            Ok(SetSource {
                system: random_set_system(n, m, seed)?,
                echo: json!({"generator": generator, "n": n, "m": m}),
            })
        }
        Generator::RandomProjections | Generator::Identity => {
            Err(CliError::Usage(format!("generator {generator:?} yields projections, not a set system")))
        }
    }
}

/// Header echo: the resolved subcommand parameters plus the seed.
fn echo(source: Value, params: impl Serialize, seed: Option<u64>) -> Value {
    let mut map = match source {
        Value::Object(m) => m,
        _ => Default::default(),
    };
    if let Value::Object(p) = serde_json::to_value(params).expect("parameters serialize") {
        map.extend(p);
    }
    map.insert("seed".into(), json!(seed));
    Value::Object(map)
}

// ---------------------------------------------------------------------------
// disc

pub fn disc(a: DiscArgs, common: &Common) -> Result<Report, CliError> {
    let src = set_source(&a.input, a.generator, a.n, a.m, common, "disc")?;
    let s = &src.system;
    let heuristic = a.heuristic.unwrap_or(false);
    let cap = a.cap.unwrap_or(DEFAULT_EXHAUSTIVE_CAP);
    let n = s.ground_size();

    #[derive(Serialize)]
    struct Params {
        heuristic: bool,
        cap: usize,
        trials: Option<usize>,
    }
    let (result, exact_value, seed_used) = if heuristic {
        let trials = positive(a.trials.unwrap_or(64), "trials")?;
        let seed = common.require_seed("disc --heuristic")?;
        let h = disc_heuristic(s, trials, seed)?;
        let exact = if n <= cap { Some(disc_exact_capped(s, cap)?.value) } else { None };
        (h, exact, Some(trials))
    } else {
        if n > cap {
            return Err(CliError::Validation(format!(
                "ground set of size {n} exceeds the exhaustive cap {cap}; pass --heuristic"
            )));
        }
        (disc_exact_capped(s, cap)?, None, None)
    };
    let config = echo(src.echo, Params { heuristic, cap, trials: seed_used }, common.seed);

    let mut r = Report::new("disc", config, &["set", "size", "signed_sum"]);
    for (j, (set, sum)) in s.sets().iter().zip(evaluate_coloring(s, &result.witness)?).enumerate() {
        r.push_row(vec![json!(j + 1), json!(set.len()), json!(sum)]);
    }
    r.set("n", n);
    r.set("m", s.len());
    r.set("value", result.value);
    r.set("method", if heuristic { "heuristic" } else { "exact" });
    r.set("witness", &result.witness);
    if heuristic {
        r.set("exact_value", exact_value);
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// qdisc

pub fn qdisc(a: QdiscArgs, common: &Common) -> Result<Report, CliError> {
    let seed = common.require_seed("qdisc")?;
    let opts = QdiscOptions {
        restarts: positive(a.restarts.unwrap_or(4), "restarts")?,
        sweeps: a.sweeps.unwrap_or(30),
        seed,
        plus_counts: a.plus_counts.clone(),
    };

    enum Source {
        Sets(SetSystem),
        Projections(ProjectionSystem<f64>),
    }
    let (source, source_echo) = match (&a.projections, a.generator) {
        (Some(path), None) => {
            let j: ProjectionSystemJson = read_json(path, "projection system")?;
            (Source::Projections(j.into_system()?), json!({"projections": path}))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("give either a projection file or a generator, not both".into()))
        }
        (None, Some(g @ Generator::RandomProjections)) => {
            let n = a.n.unwrap_or(8);
            if n < 2 {
                return Err(CliError::Validation("random projections need n >= 2".into()));
            }
            let m = positive(a.m.unwrap_or(n), "m")?;
            let system = random_projection_system::<f64>(n, m, derive_seed(seed, &[stream::PROJECTION]))?;
            (Source::Projections(system), json!({"generator": g, "n": n, "m": m}))
        }
        (None, Some(g @ Generator::Identity)) => {
            let n = positive(a.n.unwrap_or(8), "n")?;
            let system = ProjectionSystem::new(vec![OrthogonalProjection::identity(n)])?;
            (Source::Projections(system), json!({"generator": g, "n": n}))
        }
        (None, g) => {
            let src = set_source(&a.input, g, a.n, a.m, common, "qdisc")?;
            (Source::Sets(src.system), src.echo)
        }
    };

    #[derive(Serialize)]
    struct Params<'a> {
        restarts: usize,
        sweeps: usize,
        plus_counts: &'a Option<Vec<usize>>,
    }
    let config = echo(
        source_echo,
        Params { restarts: opts.restarts, sweeps: opts.sweeps, plus_counts: &opts.plus_counts },
        common.seed,
    );

    let mut r = Report::new("qdisc", config, &["projection", "rank", "trace_term", "commutator_term", "value"]);
    let (est, ranks): (QdiscEstimate<f64>, Vec<usize>) = match source {
        Source::Sets(s) => {
            let e = qdisc_estimate_set_system::<f64>(&s, &opts)?;
            r.set("disc", e.disc);
            r.set("disc_exact", e.disc_exact);
            (e.qdisc, s.sets().iter().map(Vec::len).collect())
        }
        Source::Projections(p) => {
            let e = qdisc_estimate(&p, &opts)?;
            (e, p.iter().map(|q| q.rank()).collect())
        }
    };
    for (j, (o, rank)) in est.per_projection.iter().zip(&ranks).enumerate() {
        r.push_row(vec![json!(j + 1), json!(rank), num(o.trace_term), num(o.commutator_term), num(o.value)]);
    }
    r.set("n", est.witness.dim());
    r.set("m", ranks.len());
    r.set("value", num(est.value));
    r.set("plus_count", est.plus_count);
    r.set("restarts_used", est.restarts_used);
    r.set("converged", est.converged);
    let witness: MatrixJson = matrix_to_json(est.witness.matrix());
    r.set("witness", witness);
    Ok(r)
}

// ---------------------------------------------------------------------------
// ubound

pub fn ubound(a: UboundArgs, common: &Common) -> Result<Report, CliError> {
    let seed = common.require_seed("ubound")?;
    let n_grid = a.n_grid.clone().unwrap_or_else(|| vec![16]);
    let m_grid = a.m_grid.clone().unwrap_or_else(|| vec![4, 64, 1024]);
    let trials = positive(a.trials.unwrap_or(1000), "trials")?;
    let probe_trials = a.probe_trials.unwrap_or(2000);
    if let Some(c) = a.c {
        if !(c > 0.0) || !c.is_finite() {
            return Err(CliError::Validation(format!("c must be positive, got {c}")));
        }
    }
    if n_grid.iter().any(|&n| n < 2) || m_grid.iter().any(|&m| m == 0) {
        return Err(CliError::Validation("grid needs n >= 2 and m >= 1".into()));
    }

    #[derive(Serialize)]
    struct Params<'a> {
        n_grid: &'a [usize],
        m_grid: &'a [usize],
        c: Option<f64>,
        trials: usize,
        probe_trials: Option<usize>,
    }
    let params = Params {
        n_grid: &n_grid,
        m_grid: &m_grid,
        c: a.c,
        trials,
        probe_trials: a.c.is_none().then_some(probe_trials),
    };
    let config = echo(Value::Null, params, common.seed);
    let mut r = Report::new(
        "ubound",
        config,
        &["n", "m", "c", "trials", "satisfied", "fraction", "ci_lo", "ci_hi", "max_delta", "ratio", "max_objective"],
    );

    let mut min_fraction = f64::INFINITY;
    for &n in &n_grid {
        let c = match a.c {
            Some(c) => c,
            None => {
                let probe = concentration_probe(n, probe_trials, &default_probe_deltas(), derive_seed(seed, &[stream::PROBE, n as u64]))?;
                r.set(&format!("probe_n{n}_c_hat_f1"), opt(probe.c_hat_f1));
                r.set(&format!("probe_n{n}_c_hat_f2"), opt(probe.c_hat_f2));
                r.set(&format!("probe_n{n}_fit_points"), [probe.fit_points_f1, probe.fit_points_f2]);
                probe.c_hat().ok_or_else(|| {
                    CliError::Validation(format!("the tail probe at n = {n} had too few exceedances to fit c; pass --c"))
                })?
            }
        };
        for &m in &m_grid {
            let system = random_projection_system::<f64>(n, m, derive_seed(seed, &[stream::PROJECTION, n as u64, m as u64]))?;
            let outcomes: Vec<(bool, f64, f64)> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = rng_for(seed, &[stream::COLORING, n as u64, m as u64, t as u64]);
                    let chi = random_quantum_coloring::<f64, _>(n, &mut rng)?;
                    let rec = check_delta_event(&system, &chi, c)?;
                    let worst = rec.values.iter().copied().fold(0.0, f64::max);
                    let top = rec.thresholds.iter().copied().fold(0.0, f64::max);
                    Ok((rec.all_satisfied, worst, top))
                })
                .collect::<qdlab_core::Result<_>>()?;
            let satisfied = outcomes.iter().filter(|o| o.0).count();
            let max_objective = outcomes.iter().map(|o| o.1).fold(0.0, f64::max);
            let max_delta = outcomes.iter().map(|o| o.2).fold(0.0, f64::max);
            let fraction = satisfied as f64 / trials as f64;
            min_fraction = min_fraction.min(fraction);
            let (lo, hi) = wilson_interval(satisfied, trials, Z95);
            let scale = (n as f64 + (m as f64).ln()).sqrt();
            r.push_row(vec![
                json!(n),
                json!(m),
                num(c),
                json!(trials),
                json!(satisfied),
                num(fraction),
                num(lo),
                num(hi),
                num(max_delta),
                num(max_delta / scale),
                num(max_objective),
            ]);
        }
    }
    r.set("min_fraction", num(min_fraction));
    r.set("all_fractions_at_least_half", min_fraction >= 0.5);
    Ok(r)
}

// ---------------------------------------------------------------------------
// lbound

pub fn lbound(a: LboundArgs, common: &Common) -> Result<Report, CliError> {
    let seed = common.require_seed("lbound")?;
    let n_grid = a.n_grid.clone().unwrap_or_else(|| vec![4, 6, 8]);
    let m_cap = positive(a.m_cap.unwrap_or(256), "m_cap")?;
    let alpha = a.alpha.unwrap_or(1.0);
    let instances = positive(a.instances.unwrap_or(2), "instances")?;
    let restarts = positive(a.restarts.unwrap_or(2), "restarts")?;
    let sweeps = a.sweeps.unwrap_or(20);
    if n_grid.iter().any(|&n| n < 2) {
        return Err(CliError::Validation("grid needs n >= 2".into()));
    }
    let (epsilon, zeta) = lower_bound_constants(alpha)?;

    #[derive(Serialize)]
    struct Params<'a> {
        n_grid: &'a [usize],
        m_cap: usize,
        alpha: f64,
        instances: usize,
        restarts: usize,
        sweeps: usize,
    }
    let config = echo(Value::Null, Params { n_grid: &n_grid, m_cap, alpha, instances, restarts, sweeps }, common.seed);
    let mut r = Report::new("lbound", config, &["n", "m", "instance", "qdisc_est", "ratio", "regime_ok"]);

    let mut warnings = Vec::new();
    for &n in &n_grid {
        // M ∈ {N, N², 2^{N/2}} up to the cap
        let mut ms: Vec<usize> = [n, n * n, 1usize.checked_shl((n / 2) as u32).unwrap_or(usize::MAX)]
            .into_iter()
            .map(|m| m.min(m_cap))
            .collect();
        ms.sort_unstable();
        ms.dedup();
        for m in ms {
            let regime_ok = m >= n && (m as f64).ln() <= alpha * n as f64;
            if !regime_ok {
                warnings.push(format!("n={n} m={m}"));
                eprintln!("qdlab: warning: (n, m) = ({n}, {m}) is outside the admissible regime");
            }
            for i in 0..instances {
                let path = [stream::PROJECTION, n as u64, m as u64, i as u64];
                let system = random_projection_system::<f64>(n, m, derive_seed(seed, &path))?;
                let opts = QdiscOptions { restarts, sweeps, seed: derive_seed(seed, &[stream::QDISC, n as u64, m as u64, i as u64]), plus_counts: None };
                let est = qdisc_estimate(&system, &opts)?;
                let ratio = est.value / (n as f64 + (m as f64).ln()).sqrt();
                r.push_row(vec![json!(n), json!(m), json!(i), num(est.value), num(ratio), json!(regime_ok)]);
            }
        }
    }
    r.set("epsilon", num(epsilon));
    r.set("zeta", num(zeta));
    r.set("alpha", num(alpha));
    r.set("regime_warnings", warnings);
    Ok(r)
}

// ---------------------------------------------------------------------------
// dpp

fn z_binomial(p: f64, freq: f64, samples: usize) -> f64 {
    let se = (p * (1.0 - p) / samples as f64).sqrt();
    if se <= 1e-12 {
        if (freq - p).abs() <= 1e-9 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (freq - p) / se
    }
}

pub fn dpp(a: DppArgs, common: &Common) -> Result<Report, CliError> {
    let action = a.action.ok_or_else(|| CliError::Usage("dpp needs an action: sample or check".into()))?;
    let seed = common.require_seed("dpp")?;
    let samples = positive(a.samples.unwrap_or(match action {
        DppAction::Sample => 10,
        DppAction::Check => 100_000,
    }), "samples")?;
    let tv_gate = a.tv_gate.unwrap_or(0.02);

    let (kernel, source_echo) = match (&a.kernel, a.kind) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either a kernel file or a kind, not both".into())),
        (Some(path), None) => {
            let m: MatrixJson = read_json(path, "kernel")?;
            (DppKernel::new(hermitian_from_json(&m)?)?, json!({"kernel": path}))
        }
        (None, kind) => {
            let kind = kind.unwrap_or(KernelKind::Half);
            let n = positive(a.n.unwrap_or(4), "n")?;
            let mut rng = rng_for(seed, &[stream::KERNEL]);
            let (k, rank) = match kind {
                KernelKind::Half => (dpp::diagonal_kernel(&vec![0.5; n])?, None),
                KernelKind::Zero => (dpp::diagonal_kernel(&vec![0.0; n])?, None),
                KernelKind::Identity => (dpp::diagonal_kernel(&vec![1.0; n])?, None),
                KernelKind::Projection => {
                    let rank = a.rank.unwrap_or(n / 2);
                    let p = random_projection_of_rank::<f64, _>(n, rank, &mut rng)?;
                    (DppKernel::from_projection(&p), Some(rank))
                }
                KernelKind::Random => (dpp::random_kernel(n, &mut rng), None),
            };
            (k, json!({"kind": kind, "n": n, "rank": rank}))
        }
    };
    let n = kernel.dim();

    #[derive(Serialize)]
    struct Params {
        action: DppAction,
        samples: usize,
        tv_gate: Option<f64>,
    }
    let params = Params { action, samples, tv_gate: (action == DppAction::Check).then_some(tv_gate) };
    let config = echo(source_echo, params, common.seed);

    let draws: Vec<dpp::ProcessSample> = (0..samples)
        .into_par_iter()
        .map(|i| dpp::sample(&kernel, &mut rng_for(seed, &[stream::DPP, i as u64])))
        .collect::<qdlab_core::Result<_>>()?;

    if action == DppAction::Sample {
        let mut r = Report::new("dpp", config, &["sample", "size", "points"]);
        for (i, s) in draws.iter().enumerate() {
            let points: Vec<String> = s.one_based().iter().map(usize::to_string).collect();
            r.push_row(vec![json!(i + 1), json!(s.len()), json!(points.join(" "))]);
        }
        let mean = draws.iter().map(|s| s.len() as f64).sum::<f64>() / samples as f64;
        r.set("n", n);
        r.set("mean_size", num(mean));
        r.set("expected_size", num(kernel.hermitian().trace()));
        return Ok(r);
    }

    if n > EXACT_DISTRIBUTION_CAP {
        return Err(CliError::Validation(format!(
            "dpp check needs n <= {EXACT_DISTRIBUTION_CAP} for the exact law, got {n}"
        )));
    }
    let mut r = Report::new("dpp", config, &["check", "item", "exact", "empirical", "statistic", "pass"]);
    let exact = dpp::exact_distribution(&kernel)?;
    let mut subset = vec![0u64; exact.len()];
    let mut size = vec![0u64; n + 1];
    let mut inclusion = vec![0u64; n];
    for s in &draws {
        subset[s.mask() as usize] += 1;
        size[s.len()] += 1;
        for &i in s.points() {
            inclusion[i] += 1;
        }
    }
    let (subset, size) = (frequencies(&subset), frequencies(&size));
    let inclusion: Vec<f64> = inclusion.iter().map(|&c| c as f64 / samples as f64).collect();
    let mut all_pass = true;
    let mut push = |r: &mut Report, check: &str, item: Value, exact: Value, emp: Value, stat: f64, pass: bool| {
        all_pass &= pass;
        r.push_row(vec![json!(check), item, exact, emp, num(stat), json!(pass)]);
    };

    let tv = total_variation(&exact, &subset);
    push(&mut r, "subset_tv", Value::Null, Value::Null, Value::Null, tv, tv <= tv_gate);
    let pmf = dpp::size_pmf(&kernel);
    let tv = total_variation(&pmf, &size);
    push(&mut r, "size_tv", Value::Null, Value::Null, Value::Null, tv, tv <= tv_gate);
    for i in 0..n {
        let p = kernel.hermitian().get(i, i).re;
        let z = z_binomial(p, inclusion[i], samples);
        push(&mut r, "inclusion_z", json!(i + 1), num(p), num(inclusion[i]), z, z.abs() <= 4.0);
    }
    if kernel.is_projection() {
        let rank = kernel.hermitian().trace().round() as usize;
        let frac = size.get(rank).copied().unwrap_or(0.0);
        let constant = draws.iter().all(|s| s.len() == rank);
        push(&mut r, "constant_size", json!(rank), num(1.0), num(frac), frac, constant);
    }
    r.set("n", n);
    r.set("samples", samples);
    r.set("all_pass", all_pass);
    r.gate_failed = !all_pass;
    Ok(r)
}

// ---------------------------------------------------------------------------
// compare

pub fn compare(a: CompareArgs, common: &Common) -> Result<Report, CliError> {
    let seed = common.require_seed("compare")?;
    let ap_min = a.ap_min.unwrap_or(6);
    let ap_max = a.ap_max.unwrap_or(12);
    let random_count = a.random_count.unwrap_or(4);
    let random_n = a.random_n.unwrap_or(8);
    let random_m = a.random_m.unwrap_or(8);
    let singletons = a.singletons.unwrap_or(4);
    let restarts = positive(a.restarts.unwrap_or(2), "restarts")?;
    let sweeps = a.sweeps.unwrap_or(20);

    #[derive(Serialize)]
    struct Params {
        ap_min: usize,
        ap_max: usize,
        random_count: usize,
        random_n: usize,
        random_m: usize,
        singletons: usize,
        restarts: usize,
        sweeps: usize,
    }
    let params = Params { ap_min, ap_max, random_count, random_n, random_m, singletons, restarts, sweeps };
    let config = echo(Value::Null, params, common.seed);

    let mut corpus: Vec<(String, SetSystem)> = Vec::new();
    for n in ap_min.max(1)..=ap_max {
        corpus.push((format!("ap-{n}"), arithmetic_progressions(n)?));
    }
    for i in 0..random_count {
        let s = random_set_system(random_n, random_m, derive_seed(seed, &[stream::SET_SYSTEM, i as u64]))?;
        corpus.push((format!("random-{i}"), s));
    }
    if singletons > 0 {
        let s = SetSystem::from_zero_based(singletons, (0..singletons).map(|i| vec![i]).collect())?;
        corpus.push((format!("singletons-{singletons}"), s));
    }

    let mut r = Report::new(
        "compare",
        config,
        &["system_id", "N", "M", "disc", "qdisc_est", "min_feasible_c_variant_i", "min_feasible_c_variant_ii", "sandwich"],
    );
    let grid = default_c_grid();
    let mut violations = 0;
    for (i, (id, s)) in corpus.iter().enumerate() {
        let opts = QdiscOptions { restarts, sweeps, seed: derive_seed(seed, &[stream::QDISC, i as u64]), plus_counts: None };
        let row = comparison_check(s, &grid, &opts)?;
        violations += usize::from(!row.sandwich);
        r.push_row(vec![
            json!(id),
            json!(row.n),
            json!(row.m),
            json!(row.disc),
            num(row.qdisc_est),
            opt(row.min_c_log),
            opt(row.min_c_sqrt_log),
            json!(row.sandwich),
        ]);
    }
    r.set("systems", corpus.len());
    r.set("sandwich_violations", violations);
    r.gate_failed = violations > 0;
    Ok(r)
}

// ---------------------------------------------------------------------------
// haar

pub fn haar(a: HaarArgs, common: &Common) -> Result<Report, CliError> {
    let seed = common.require_seed("haar")?;
    let n_grid = a.n_grid.clone().unwrap_or_else(|| (2..=8).collect());
    let trials = a.trials.unwrap_or(100_000);
    let z_max = a.z_max.unwrap_or(4.0);
    if trials < 2 {
        return Err(CliError::Validation(format!("trials must be at least 2, got {trials}")));
    }

    #[derive(Serialize)]
    struct Params<'a> {
        n_grid: &'a [usize],
        trials: usize,
        z_max: f64,
    }
    let config = echo(Value::Null, Params { n_grid: &n_grid, trials, z_max }, common.seed);
    let mut r = Report::new("haar", config, &["family", "n", "param", "exact", "mean", "se", "z", "pass"]);

    let mut failed = 0;
    let mut total = 0;
    for &n in &n_grid {
        for g in moment_gates(n, trials, derive_seed(seed, &[stream::HAAR, n as u64]), z_max)? {
            total += 1;
            failed += usize::from(!g.pass);
            r.push_row(vec![
                json!(g.family),
                json!(g.n),
                json!(g.param),
                num(g.exact),
                num(g.estimate.mean),
                num(g.estimate.se),
                num(g.z),
                json!(g.pass),
            ]);
        }
    }
    let spot = |x: Rational| x.to_string();
    r.set("exact_mean_trace_n4_r2", spot(exact_mean_trace::<Rational>(4, 2)?));
    r.set("exact_mean_trace_n3_r2", spot(exact_mean_trace::<Rational>(3, 2)?));
    r.set("exact_mean_trace_sq_n2_r1", spot(exact_mean_trace_sq::<Rational>(2, 1)?));
    r.set("gates", total);
    r.set("gates_failed", failed);
    r.gate_failed = failed > 0;
    Ok(r)
}
