//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use flexstop_core::entrance::EntranceSystem;
use flexstop_core::fixtures::{five::*, five_set, five_state_chain};
use flexstop_core::oracle::simulate::{for_each_path, Merge, Moments};
use flexstop_core::oracle::{bellman_value, exhaustive_optimal, lemma_property_check};
use flexstop_core::rule::discounted_payoff;
use flexstop_core::{
    build_grid, improve_set, Fii, GridSpec, ImprovedRule, IterationTrace, LookAheadSet, Model, RandomModelSpec,
    StateSet, StoppingRule, WindowSchedule,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed < budget, || format!("took {elapsed:?}, budget {budget:?}"))
}

fn err(e: flexstop_core::Error) -> String {
    e.to_string()
}

fn d(k: usize) -> LookAheadSet {
    LookAheadSet::initial_segment(k).expect("k >= 1")
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_set(n: usize, seed: u64) -> StateSet {
    // Deterministic mix of states; never empty.
    let mut s = StateSet::from_predicate(n, |z| (seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> (z % 61)) & 1 == 1);
    if s.is_empty() {
        s.insert((seed as usize) % n);
    }
    s
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let m = five_state_chain();
    let s = StateSet::full(5);
    let one = improve_set(&m, &s, &d(1)).map_err(err)?;
    let two = improve_set(&m, &s, &d(2)).map_err(err)?;
    within(started.elapsed(), Duration::from_secs(1))?;
    ensure(one == five_set(&[A, B, D, E]), || format!("S^*{{1}} = {one:?}"))?;
    ensure(two == five_set(&[B, D, E]), || format!("S^*{{1,2}} = {two:?}"))?;
    Ok(format!("{{1}} -> {one:?}, {{1,2}} -> {two:?}"))
}

fn criterion_2() -> Outcome {
    let started = Instant::now();
    let m = five_state_chain();
    let s = StateSet::full(5);
    let trace = Fii::new(&m).run(&s, &WindowSchedule::Constant(1)).map_err(err)?;
    let exhaustive = exhaustive_optimal(&m, &s, 5).map_err(err)?;
    within(started.elapsed(), Duration::from_secs(1))?;
    ensure(trace.final_set == five_set(&[B, D, E]), || format!("F = {:?}", trace.final_set))?;
    let expected = [3.5, 4.0, 4.0, 2.5, 2.0];
    let e1 = max_diff(&trace.final_values, &expected);
    let e2 = max_diff(&trace.final_values, &exhaustive);
    ensure(e1 <= 1e-10 && e2 <= 1e-10, || format!("errors {e1:e} / {e2:e}"))?;
    Ok(format!("F = {:?}, h = {:?}", trace.final_set, trace.final_values.0))
}

#[derive(Default)]
struct Violations {
    paths: usize,
    violating: usize,
}

impl Merge for Violations {
    fn merge(&mut self, other: Self) {
        self.paths += other.paths;
        self.violating += other.violating;
    }
}

fn count_violations(m: &Model, rule: &ImprovedRule, n_paths: usize, seed: u64) -> Result<Violations, String> {
    for_each_path(m, A, n_paths, seed, 64, |path, acc: &mut Violations| {
        let times = rule.evaluate(path)?;
        acc.paths += 1;
        if times.ordering_violation().is_some() {
            acc.violating += 1;
        }
        Ok(())
    })
    .map_err(err)
}

fn criterion_3() -> Outcome {
    let m = five_state_chain();
    let fii = Fii::new(&m);
    let s = StateSet::full(5);
    let sigma = StoppingRule::Fixed(0);
    let rho = StoppingRule::Fixed(0);
    let uncapped = fii.uncapped_rule(&s, &d(2), sigma.clone(), rho.clone()).map_err(err)?;
    let capped = fii.improved_rule(&s, &d(2), sigma, rho).map_err(err)?;
    let bad = count_violations(&m, &uncapped, 100, 3)?;
    let good = count_violations(&m, &capped, 100_000, 3)?;
    ensure(bad.violating >= 1, || "uncapped rule never exceeded the cap in 100 paths".into())?;
    ensure(good.paths == 100_000 && good.violating == 0, || {
        format!("capped rule violated on {} of {} paths", good.violating, good.paths)
    })?;
    Ok(format!(
        "uncapped: {}/100 paths exceed tau_sigma(B*D); capped: 0/{}",
        bad.violating, good.paths
    ))
}

fn criterion_4() -> Outcome {
    let started = Instant::now();
    let spec = GridSpec::toy();
    let m = build_grid(&spec).map_err(err)?;
    let trace = Fii::new(&m).run(&StateSet::full(m.n_states()), &WindowSchedule::Constant(1)).map_err(err)?;
    within(started.elapsed(), Duration::from_secs(10))?;
    let improving = trace.improving_iterations();
    ensure(trace.iterations() <= 40, || format!("{} iterations", trace.iterations()))?;
    let verdict = if improving == 19 { "matches 19" } else { "differs from 19 (px = py = 0.5 assumed)" };
    Ok(format!(
        "{improving} improving + 1 confirming iterations, |F| = {}, {verdict}",
        trace.final_set.len()
    ))
}

fn large_grid_run(k: usize) -> Result<(GridSpec, IterationTrace), String> {
    let spec = GridSpec::large();
    let m = build_grid(&spec).map_err(err)?;
    let trace = Fii::new(&m).run(&StateSet::full(m.n_states()), &WindowSchedule::Constant(k)).map_err(err)?;
    Ok((spec, trace))
}

fn criterion_5() -> Outcome {
    let started = Instant::now();
    let (spec, trace) = large_grid_run(5)?;
    within(started.elapsed(), Duration::from_secs(600))?;
    let mut described = StateSet::empty(spec.n_states());
    for (x, y) in [(50, 150), (150, 150)] {
        for (nx, ny) in [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)] {
            described.insert(spec.index(nx, ny));
        }
    }
    described.insert(spec.index(50, 50));
    let verdict = if trace.final_set == described {
        "matches the described 9-point set".to_string()
    } else {
        format!(
            "MISMATCH with the described 9-point set: |F| = {}, described points in F: {}/9, (50,50) in F: {}",
            trace.final_set.len(),
            described.intersection(&trace.final_set).len(),
            trace.final_set.contains(spec.index(50, 50))
        )
    };
    Ok(format!("terminated after {} iterations in {:?}; {verdict}", trace.iterations(), started.elapsed()))
}

fn random_models(count: u64, max_states: usize, alpha: (f64, f64), salt: u64) -> Vec<Model> {
    (0..count)
        .map(|i| {
            let n = 2 + (i as usize * 7 + 3) % (max_states - 1);
            RandomModelSpec::new(n)
                .alpha(alpha.0, alpha.1)
                .out_degree(1 + (i as usize % 4))
                .generate(salt * 1_000 + i)
                .expect("valid spec")
        })
        .collect()
}

fn oracle_traces() -> Result<Vec<(Model, Vec<IterationTrace>)>, String> {
    random_models(200, 30, (0.3, 0.95), 6)
        .into_iter()
        .map(|m| {
            let full = StateSet::full(m.n_states());
            let traces = [1, 4]
                .into_iter()
                .map(|k| Fii::new(&m).run(&full, &WindowSchedule::Constant(k)).map_err(err))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((m, traces))
        })
        .collect()
}

fn criterion_6(runs: &[(Model, Vec<IterationTrace>)]) -> Outcome {
    let mut worst = 0.0f64;
    for (i, (m, traces)) in runs.iter().enumerate() {
        let bellman = bellman_value(m, &StateSet::full(m.n_states()), 1e-12).map_err(err)?;
        for (trace, k) in traces.iter().zip([1, 4]) {
            let e = max_diff(&trace.final_values, &bellman.values);
            worst = worst.max(e);
            ensure(e <= 1e-6, || format!("model {i}, kappa = {k}: error {e:e}"))?;
        }
    }
    Ok(format!("{} models x kappa in {{1,4}}, max error {worst:.2e}", runs.len()))
}

fn criterion_7(runs: &[(Model, Vec<IterationTrace>)]) -> Outcome {
    let mut checked = 0;
    for (i, (_, traces)) in runs.iter().enumerate() {
        for trace in traces {
            let sets = trace.sets();
            for w in sets.windows(2) {
                ensure(w[1].is_subset(&w[0]), || format!("model {i}: sets not nested"))?;
            }
            for w in trace.records.windows(2) {
                let dropped = w[0].values.iter().zip(w[1].values.iter()).any(|(a, b)| *b < a - 1e-8);
                ensure(!dropped, || format!("model {i}: value decreased at iteration {}", w[1].iteration))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} consecutive iteration pairs nested and nondecreasing"))
}

#[derive(Default)]
struct Paired {
    gain: Moments,
    cap_gain: Moments,
    misordered: usize,
}

impl Merge for Paired {
    fn merge(&mut self, other: Self) {
        self.gain.merge(&other.gain);
        self.cap_gain.merge(&other.cap_gain);
        self.misordered += other.misordered;
    }
}

fn criterion_8() -> Outcome {
    let mut comparisons = 0;
    let mut worst = f64::INFINITY;
    for (i, m) in random_models(50, 10, (0.3, 0.95), 8).iter().enumerate() {
        let n = m.n_states();
        let base = random_set(n, i as u64 + 17);
        let fii = Fii::new(m);
        for k in 1..=3 {
            for t in 0..=2 {
                let sigma = StoppingRule::entrance_after(base.clone(), StoppingRule::Fixed(t));
                let rule = fii.improved_rule(&base, &d(k), sigma.clone(), sigma).map_err(err)?;
                let horizon = 400;
                for start in 0..n {
                    let seed = (i as u64) << 16 | (k as u64) << 8 | t as u64;
                    let acc: Paired = for_each_path(m, start, 10_000, seed, horizon, |path, acc: &mut Paired| {
                        let times = rule.evaluate(path)?;
                        let x_rho = discounted_payoff(m, path, times.rho, horizon);
                        let x_hat = discounted_payoff(m, path, times.result, horizon);
                        let x_cap = discounted_payoff(m, path, times.cap, horizon);
                        acc.gain.push(x_hat - x_rho);
                        acc.cap_gain.push(x_cap - x_rho);
                        acc.misordered += usize::from(times.ordering_violation().is_some());
                        Ok(())
                    })
                    .map_err(err)?;
                    ensure(acc.misordered == 0, || {
                        format!("model {i}, D = {{1..{k}}}, start {start}: {} paths misordered", acc.misordered)
                    })?;
                    for (what, mo) in [("rho-hat", acc.gain), ("tau_sigma(B*D)", acc.cap_gain)] {
                        let z = mo.mean + 4.0 * mo.std_error();
                        worst = worst.min(z);
                        comparisons += 1;
                        ensure(z >= 0.0, || {
                            format!(
                                "model {i}, D = {{1..{k}}}, sigma = tau_{t}(B), start {start}: {what} loses {:.4} (se {:.4})",
                                -mo.mean,
                                mo.std_error()
                            )
                        })?;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{comparisons} paired comparisons, min (mean + 4 se) = {worst:.3e}, pathwise ordering held on every path"
    ))
}

fn criterion_9() -> Outcome {
    let mut checks = 0;
    let mut unsatisfiable = 0;
    let mut cases: Vec<(Model, StateSet, LookAheadSet)> = Vec::new();
    let m = five_state_chain();
    for k in 1..=3 {
        cases.push((m.clone(), StateSet::full(5), d(k)));
    }
    for (i, m) in random_models(50, 12, (0.3, 0.99), 9).into_iter().enumerate() {
        let base = if i % 2 == 0 { StateSet::full(m.n_states()) } else { random_set(m.n_states(), i as u64) };
        let depths = d(1 + i % 3);
        cases.push((m, base, depths));
    }
    for (i, (m, base, depths)) in cases.iter().enumerate() {
        let report = lemma_property_check(m, base, depths, i as u64).map_err(err)?;
        if let Some(f) = report.failures().next() {
            return Err(format!("case {i}: {:?} fails: {} > {}", f.lemma, f.lhs, f.rhs));
        }
        checks += report.checks.len();
        unsatisfiable += report.unsatisfiable.len();
    }
    Ok(format!(
        "{} cases, {checks} exact configurations hold, {unsatisfiable} hypotheses unsatisfiable (reported)",
        cases.len()
    ))
}

fn criterion_10() -> Outcome {
    let mut solves = 0;
    let mut worst = 0.0f64;
    let mut check = |m: &Model, b: &StateSet| -> Result<(), String> {
        let fii = Fii::new(m);
        let h = fii.solver().entrance_value(b).map_err(err)?;
        let system = EntranceSystem::new(m, fii.solver().kernel(), b);
        let r = system.residual(&h);
        worst = worst.max(r / system.residual_bound());
        solves += 1;
        ensure(r <= system.residual_bound(), || format!("residual {r:e} > {:e}", system.residual_bound()))
    };
    let m = five_state_chain();
    for sets in [&[A, B, C, D, E][..], &[A, B, D, E], &[B, D, E], &[B, E, C, D]] {
        check(&m, &five_set(sets))?;
    }
    for (i, m) in random_models(100, 30, (0.3, 0.99), 10).iter().enumerate() {
        let n = m.n_states();
        let trace = Fii::new(m).run(&StateSet::full(n), &WindowSchedule::Constant(1 + i % 3)).map_err(err)?;
        for set in trace.sets() {
            check(m, &set)?;
        }
    }
    let toy = build_grid(&GridSpec::toy()).map_err(err)?;
    let trace = Fii::new(&toy).run(&StateSet::full(toy.n_states()), &WindowSchedule::Constant(1)).map_err(err)?;
    for set in trace.sets() {
        check(&toy, &set)?;
    }
    Ok(format!("{solves} solves, max residual / bound = {worst:.2e}"))
}

fn criterion_11() -> Outcome {
    let mut rows = Vec::new();
    for k in [1, 2, 5, 10] {
        let started = Instant::now();
        let (_, trace) = large_grid_run(k)?;
        rows.push((k, trace.iterations(), trace.total_matvecs(), started.elapsed()));
    }
    let iterations: Vec<usize> = rows.iter().map(|r| r.1).collect();
    let matvecs: Vec<usize> = rows.iter().map(|r| r.2).collect();
    let summary = rows
        .iter()
        .map(|(k, it, mv, wall)| format!("k={k}: {it} it, {mv} matvecs, {:.0} ms", wall.as_secs_f64() * 1e3))
        .collect::<Vec<_>>()
        .join("; ");
    ensure(iterations.windows(2).all(|w| w[1] <= w[0]), || format!("iterations increase: {summary}"))?;
    let increasing = matvecs.windows(2).all(|w| w[1] >= w[0]);
    let decreasing = matvecs.windows(2).all(|w| w[1] <= w[0]);
    let shape = match (increasing, decreasing) {
        (true, _) => "matvecs monotone increasing",
        (_, true) => "matvecs monotone decreasing",
        _ => "matvecs non-monotone",
    };
    Ok(format!("{summary}; iterations nonincreasing, {shape}"))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "counterexample improvement sets", criterion_1()),
        (2, "counterexample optimum vs exhaustive oracle", criterion_2()),
        (3, "uncapped rule fails, capped rule holds", criterion_3()),
        (4, "toy grid iteration count (soft)", criterion_4()),
        (5, "large grid stopping set (soft)", criterion_5()),
    ];
    match oracle_traces() {
        Ok(runs) => {
            results.push((6, "oracle equivalence on 200 random models", criterion_6(&runs)));
            results.push((7, "monotonicity of sets and values", criterion_7(&runs)));
        }
        Err(e) => {
            results.push((6, "oracle equivalence on 200 random models", Err(e.clone())));
            results.push((7, "monotonicity of sets and values", Err(e)));
        }
    }
    results.push((8, "Monte Carlo improvement checks", criterion_8()));
    results.push((9, "exact partial-improvement inequalities", criterion_9()));
    results.push((10, "linear-system residual", criterion_10()));
    results.push((11, "bench shape over k (soft)", criterion_11()));

    let mut failed = 0;
    for (id, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {}/{} passed in {:.1} s",
        results.len() - failed,
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
