//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::time::{Duration, Instant};

use hiersearch::config::{ExperimentConfig, Method, SearchParams};
use hiersearch::exec::{ExecMode, Rayon};
use hiersearch::harness::{run_experiment, run_method, MethodSummary};
use hiersearch::Problem;
use hiersearch_core::benchmarks::{self, lookup, BenchmarkFunction, Family};
use hiersearch_core::rng::stream;
use hiersearch_core::sampler::{complement, full_range, generate_candidates, local_range, Region};
use hiersearch_core::{
    build_hierarchy, hierarchy_stats, tune, CapacityPolicy, Coordinate, Dimension, Direction, SearchSpace,
    Sequential, StopCriteria, TerminalDefaults,
};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn unit_space(n: usize) -> SearchSpace {
    SearchSpace::all_objective(
        (1..=n).map(|i| Dimension::continuous(format!("x{i}"), 0.0, 1.0)).collect(),
        Direction::Minimize,
    )
    .unwrap()
}

fn ceil_log(n: usize, c: usize) -> usize {
    let mut d = 0;
    let mut reach = 1;
    while reach < n {
        reach *= c;
        d += 1;
    }
    d
}

fn hierarchy_shape() -> Outcome {
    let defaults = TerminalDefaults::uniform(3, 0.1, 2.0);
    let mut checked = 0;
    for n in 1..=64 {
        let space = unit_space(n);
        for c in 2..=8 {
            let h = build_hierarchy(&space, &CapacityPolicy::Uniform(c), &defaults).map_err(|e| e.to_string())?;
            let s = hierarchy_stats(&h);
            let d = ceil_log(n, c);
            let lower = (c.pow(d as u32) - 1) / (c - 1);
            let upper = (c.pow(d as u32 + 1) - 1) / (c - 1);
            ensure(s.depth == d, || format!("n={n} c={c}: depth {} != {d}", s.depth))?;
            ensure(lower < s.total_nodes && s.total_nodes <= upper, || {
                format!("n={n} c={c}: {} nodes outside ({lower}, {upper}]", s.total_nodes)
            })?;
            ensure(s.terminal_count == n, || format!("n={n} c={c}: {} terminals", s.terminal_count))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (n, c) pairs"))
}

/// Position of `v` along the concatenation of the region's intervals.
fn offset_in(region: &Region, v: f64) -> Option<f64> {
    let mut before = 0.0;
    for &(lo, hi) in region.intervals() {
        if v >= lo && v < hi {
            return Some(before + v - lo);
        }
        before += hi - lo;
    }
    None
}

fn in_slot(region: &Region, slots: usize, slot: usize, v: f64) -> bool {
    let w = region.measure() / slots as f64;
    offset_in(region, v).is_some_and(|o| o >= w * (slot - 1) as f64 - 1e-9 && o <= w * slot as f64 + 1e-9)
}

fn random_space<R: Rng>(rng: &mut R) -> SearchSpace {
    let d = rng.random_range(1..=6);
    let dims = (0..d)
        .map(|i| match rng.random_range(0..3) {
            0 => {
                let lo = rng.random_range(-10.0..10.0);
                Dimension::continuous(format!("d{i}"), lo, lo + rng.random_range(0.1..20.0))
            }
            1 => Dimension::log10(format!("d{i}"), 1e-3, 10f64.powi(rng.random_range(0..5))),
            _ => Dimension::categorical(format!("d{i}"), (0..rng.random_range(2..8)).map(|k| format!("k{k}"))),
        })
        .collect();
    SearchSpace::all_objective(dims, Direction::Minimize).unwrap()
}

fn sampler_bias() -> Outcome {
    let mut rng = stream(2024, 0);
    let mut fallbacks = 0;
    for instance in 0..1000 {
        let space = random_space(&mut rng);
        let budget = rng.random_range(1..=6);
        let eps = if rng.random_bool(0.1) { 1e3 } else { rng.random_range(0.0..3.0) };
        let defaults = TerminalDefaults::uniform(budget, eps, 2.0).with_subsidiary_eps(0.0);
        let h = build_hierarchy(&space, &CapacityPolicy::Uniform(2), &defaults).map_err(|e| e.to_string())?;
        let start = Coordinate(
            space
                .dimensions
                .iter()
                .map(|dim| {
                    let (lo, hi) = dim.bounds();
                    let v = rng.random_range(lo..hi);
                    if dim.is_categorical() {
                        v.floor()
                    } else {
                        v
                    }
                })
                .collect(),
        );
        for node in h.terminal_nodes() {
            let own = space.index_of(&node.primary[0]).unwrap();
            let dim = &space.dimensions[own];
            let cands = generate_candidates(node, &start, 0.0, &space, &mut rng).map_err(|e| e.to_string())?;
            let fail = |what: &str| format!("instance {instance}, dim {}: {what}", dim.name);
            ensure(cands.generated().len() == budget, || fail("wrong sample count"))?;
            let local = local_range(dim, start[own], eps);
            let rest = complement(dim, &local);
            let fallback = budget >= 2 && rest.is_empty();
            fallbacks += usize::from(fallback);
            for (i, x) in cands.generated().iter().enumerate() {
                let slot = i + 1;
                ensure(space.contains(x), || fail("sample outside the domain"))?;
                let v = x[own];
                let ok = if fallback {
                    dim.is_categorical() || in_slot(&full_range(dim), budget, slot, v)
                } else if slot == 1 {
                    local.contains(v) || (local.is_empty() && v == start[own])
                } else if dim.is_categorical() {
                    rest.contains(v)
                } else {
                    in_slot(&rest, budget - 1, slot - 1, v)
                };
                ensure(ok, || fail(&format!("sample {slot} = {v} misplaced")))?;
                for k in (0..space.dimensions.len()).filter(|&k| k != own) {
                    ensure(x[k] == start[k], || fail("subsidiary value moved with eps = 0"))?;
                }
            }
        }
    }
    Ok(format!("1000 instances, {fallbacks} whole-domain fallbacks"))
}

fn uniformity() -> Outcome {
    let space = SearchSpace::all_objective(vec![Dimension::continuous("x", -2.0, 3.0)], Direction::Minimize).unwrap();
    let h = build_hierarchy(&space, &CapacityPolicy::Uniform(2), &TerminalDefaults::uniform(1, 5.0, 2.0))
        .map_err(|e| e.to_string())?;
    let node = h.terminal_nodes().next().unwrap();
    let mut rng = stream(99, 1);
    let n = 10_000;
    let bins = 20;
    let mut counts = vec![0usize; bins];
    for i in 0..n {
        let start = Coordinate(vec![-2.0 + 5.0 * (i % 97) as f64 / 97.0]);
        let cands = generate_candidates(node, &start, 0.0, &space, &mut rng).map_err(|e| e.to_string())?;
        let v = cands.coords[1][0];
        counts[(((v + 2.0) / 5.0 * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let expected = n as f64 / bins as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat);
    ensure(p > 0.001, || format!("chi2 = {stat:.2}, p = {p:.2e}"))?;
    Ok(format!("chi2 = {stat:.2}, p = {p:.3}"))
}

fn benchmark_optima() -> Outcome {
    let argmin_value = |key: &str| -> Result<f64, String> {
        let b = lookup(key).map_err(|e| e.to_string())?;
        b.evaluate(b.known_argmin.as_ref().unwrap()).map_err(|e| e.to_string())
    };
    for (key, table) in [("hartmann-3d", -3.86278), ("hartmann-4d", -3.135474), ("hartmann-6d", -3.32237)] {
        let v = argmin_value(key)?;
        ensure((v - table).abs() <= 1e-3, || format!("{key}: {v} vs {table}"))?;
    }
    for d in [3, 6, 10] {
        let v = argmin_value(&format!("rastrigin-{d}d"))?;
        ensure(v == 0.0, || format!("rastrigin-{d}d: {v}"))?;
        let mae = BenchmarkFunction::new(Family::Mae, d).unwrap();
        let obj = mae.instantiate(&mut stream(d as u64, 7));
        let v = obj.value(&obj.chi).map_err(|e| e.to_string())?;
        ensure(v == 0.0, || format!("mae-{d}d: {v}"))?;
    }
    for (key, table) in [("styblinski_tang-3d", -117.4979), ("styblinski_tang-6d", -234.9959)] {
        let v = argmin_value(key)?;
        ensure((v - table).abs() <= 1e-2, || format!("{key}: {v} vs {table}"))?;
    }
    let st10 = argmin_value("styblinski_tang-10d")?;
    ensure((st10 + 391.6599).abs() <= 1e-2, || format!("styblinski_tang-10d: {st10}"))?;
    ensure(benchmarks::rastrigin(&[5.12, 0.0]).is_ok(), || "rastrigin rejects its own bound".into())?;
    Ok(format!("hartmann-4d gap {:.2e}", (argmin_value("hartmann-4d")? + 3.135474).abs()))
}

fn monotone_best() -> Outcome {
    let b = lookup("rastrigin-6d").unwrap();
    let space = b.search_space();
    let obj = b.instantiate(&mut stream(0, 0));
    let params = SearchParams::default();
    let h = build_hierarchy(
        &space,
        &CapacityPolicy::Uniform(params.connections),
        &TerminalDefaults::uniform(params.budget, params.eps(), params.delta),
    )
    .unwrap();
    for seed in 0..200 {
        let r = tune(&h, &space, &obj, StopCriteria::iterations(params.iterations), seed, &Sequential)
            .map_err(|e| e.to_string())?;
        let trace: Vec<f64> = r.per_iteration.iter().map(|t| t.global_best_psi).collect();
        ensure(trace.windows(2).all(|w| w[1] <= w[0]), || format!("seed {seed}: {trace:?}"))?;
    }
    Ok("200 runs".into())
}

fn evaluation_parity() -> Outcome {
    let mut cells = 0;
    for d in [3, 6, 10] {
        let problem = Problem::resolve(&format!("rastrigin-{d}d")).unwrap();
        let space = problem.space();
        for budget in [1, 2, 3, 5] {
            for iterations in [0, 1, 4] {
                let params = SearchParams { budget, iterations, ..SearchParams::default() };
                for method in Method::ALL {
                    let obj = problem.instantiate(1);
                    let r = run_method(&space, obj.as_ref(), method, &params, 1, &Sequential)
                        .map_err(|e| e.to_string())?;
                    let want = (d * budget * iterations) as u64;
                    ensure(r.evaluations_used == want, || {
                        format!("{method} d={d} b={budget} I={iterations}: {} != {want}", r.evaluations_used)
                    })?;
                }
                cells += 1;
            }
        }
    }
    let cfg = ExperimentConfig::new("rastrigin-6d", Method::ALL.to_vec(), SearchParams::default(), 3, 0);
    let summary = run_experiment(&cfg, ExecMode::Sequential).map_err(|e| e.to_string())?;
    for m in &summary[0].methods {
        ensure(m.evals_per_trial == 180, || format!("{} reports {} evals per trial", m.method, m.evals_per_trial))?;
    }
    Ok(format!("{cells} (d, b, I) cells x 3 methods"))
}

fn determinism() -> Outcome {
    let problem = Problem::resolve("rastrigin-3d").unwrap();
    let space = problem.space();
    let params = SearchParams::default();
    let parallel = ExecMode::Parallel(Some(4));
    for seed in 0..20 {
        for method in Method::ALL {
            let obj = problem.instantiate(seed);
            let seq = run_method(&space, obj.as_ref(), method, &params, seed, &Sequential).map_err(|e| e.to_string())?;
            let par = parallel
                .install(|| run_method(&space, obj.as_ref(), method, &params, seed, &Rayon))
                .map_err(|e| e.to_string())?
                .map_err(|e| e.to_string())?;
            let a = serde_json::to_vec(&seq).unwrap();
            let b = serde_json::to_vec(&par).unwrap();
            ensure(a == b, || format!("{method} seed {seed}: reports differ"))?;
        }
    }
    let cfg = ExperimentConfig::new("rastrigin-3d", Method::ALL.to_vec(), params, 20, 0);
    let seq = run_experiment(&cfg, ExecMode::Sequential).map_err(|e| e.to_string())?;
    let par = run_experiment(&cfg, parallel).map_err(|e| e.to_string())?;
    ensure(seq == par, || "experiment summaries differ between modes".into())?;
    Ok("20 seeds x 3 methods".into())
}

fn pooled_se(a: &MethodSummary, b: &MethodSummary) -> f64 {
    (a.std_error * a.std_error + b.std_error * b.std_error).sqrt()
}

fn compare(objective: &str, budget: usize) -> Result<Vec<MethodSummary>, String> {
    let params = SearchParams { budget, ..SearchParams::default() };
    let cfg = ExperimentConfig::new(objective, Method::ALL.to_vec(), params, 50, 0);
    let mut out = run_experiment(&cfg, ExecMode::from_env().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    Ok(out.remove(0).methods)
}

fn describe(ms: &[MethodSummary]) -> String {
    ms.iter().map(|m| format!("{} {:.3}±{:.3}", m.method, m.mean_best_psi, m.std_error)).collect::<Vec<_>>().join(", ")
}

/// The collaborative method beats both baselines by more than one pooled SE.
fn leads(ms: &[MethodSummary]) -> bool {
    let ours = &ms[0];
    ms[1..].iter().all(|m| m.mean_best_psi - ours.mean_best_psi > pooled_se(ours, m))
}

fn directional() -> Outcome {
    let mut notes = Vec::new();
    for objective in ["rastrigin-10d", "styblinski_tang-10d"] {
        let ms = compare(objective, 3)?;
        ensure(leads(&ms), || format!("{objective}: {}", describe(&ms)))?;
        notes.push(format!("{objective}: {}", describe(&ms)));
    }
    Ok(notes.join("; "))
}

fn budget_limits() -> Outcome {
    let low = compare("rastrigin-6d", 1)?;
    let high = compare("rastrigin-6d", 10)?;
    let ours = &high[0];
    let close = high[1..].iter().all(|m| (m.mean_best_psi - ours.mean_best_psi).abs() <= 3.0 * pooled_se(ours, m));
    let b10 = close || leads(&high);
    let b1 = leads(&low);
    let detail = format!("b=1: {} [{}]; b=10: {} [{}]", describe(&low), ok(b1), describe(&high), ok(b10));
    if b1 && b10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "not met"
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 hierarchy shape", hierarchy_shape, Duration::from_secs(1)),
        ("2 sampler bias", sampler_bias, Duration::from_secs(5)),
        ("3 full-domain uniformity", uniformity, Duration::from_secs(1)),
        ("4 benchmark optima", benchmark_optima, Duration::from_secs(1)),
        ("5 monotone best-so-far", monotone_best, Duration::from_secs(10)),
        ("6 evaluation parity", evaluation_parity, Duration::MAX),
        ("7 determinism", determinism, Duration::from_secs(10)),
        ("8 directional comparison", directional, Duration::from_secs(60)),
        ("9 budget limits", budget_limits, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let t = Instant::now();
        let outcome = run();
        let elapsed = t.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({elapsed:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
