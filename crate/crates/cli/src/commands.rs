use std::fs;
use std::time::Instant;

use flexstop_core::oracle::simulate::simulate as run_simulation;
use flexstop_core::{Fii, IterationTrace, ModelFile, SolveOptions, SolverKind, StoppingRule, WindowSchedule};

use crate::error::{CliError, Result};
use crate::input::{self, Loaded};
use crate::output;
use crate::{BenchArgs, GridgenArgs, ModelArgs, SimulateArgs, SolveArgs};

struct Problem {
    loaded: Loaded,
    schedule: WindowSchedule,
    options: SolveOptions,
}

impl Problem {
    fn new(args: &ModelArgs) -> Result<Self> {
        let mut loaded = input::load(args.model.as_ref(), args.grid.as_ref())?;
        if let Some(text) = &args.initial_set {
            loaded.initial = input::parse_state_set(&loaded.model, text)?;
        }
        let schedule: WindowSchedule = args.kappa.parse()?;
        let options = match args.tol {
            Some(tol) if tol > 0.0 && tol.is_finite() => SolveOptions {
                solver: SolverKind::FixedPoint,
                fixed_point_tol: tol,
            },
            Some(tol) => return Err(CliError::Usage(format!("--tol must be positive, got {tol}"))),
            None => SolveOptions::default(),
        };
        Ok(Self {
            loaded,
            schedule,
            options,
        })
    }

    fn run(&self, schedule: &WindowSchedule) -> Result<IterationTrace> {
        let fii = Fii::with_options(&self.loaded.model, self.options);
        Ok(fii.run(&self.loaded.initial, schedule)?)
    }
}

pub fn solve(args: &SolveArgs) -> Result<()> {
    let problem = Problem::new(&args.model)?;
    let trace = problem.run(&problem.schedule)?;
    let Loaded { model, grid, .. } = &problem.loaded;
    let dir = &args.out;
    output::ensure_dir(dir)?;
    output::stopping_set(&dir.join("stopping_set.csv"), model, grid.as_ref(), &trace.final_set)?;
    output::values(&dir.join("values.csv"), model, grid.as_ref(), &trace.final_values)?;
    output::trace(&dir.join("trace.csv"), &trace)?;
    if let Some(spec) = grid {
        output::grid_matrix(&dir.join("values_grid.csv"), spec, |z| trace.final_values[z])?;
        output::grid_matrix(&dir.join("stopping_grid.csv"), spec, |z| u8::from(trace.final_set.contains(z)))?;
    }
    println!(
        "states={} kappa={} iterations={} improving={} stopping_set_size={} wall_ms={:.3}",
        model.n_states(),
        args.model.kappa,
        trace.iterations(),
        trace.improving_iterations(),
        trace.final_set.len(),
        trace.total_wall().as_secs_f64() * 1e3
    );
    Ok(())
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    let problem = Problem::new(&args.model)?;
    let sweep = input::parse_sweep(&args.sweep)?;
    if args.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    output::ensure_dir(&args.out)?;
    let path = args.out.join("bench.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["k", "repetition", "iterations", "total_wall_ms", "matvec_count", "solve_count"])?;
    for &k in &sweep {
        for rep in 1..=args.reps {
            let started = Instant::now();
            let trace = problem.run(&WindowSchedule::Constant(k))?;
            let wall = started.elapsed();
            w.write_record([
                k.to_string(),
                rep.to_string(),
                trace.iterations().to_string(),
                format!("{:.3}", wall.as_secs_f64() * 1e3),
                trace.total_matvecs().to_string(),
                trace.total_solves().to_string(),
            ])?;
            eprintln!("k={k} rep={rep} iterations={} wall_ms={:.1}", trace.iterations(), wall.as_secs_f64() * 1e3);
        }
    }
    w.flush().map_err(|source| CliError::Io { path, source })
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let problem = Problem::new(&args.model)?;
    let model = &problem.loaded.model;
    let start = input::parse_state(model, &args.start)?;
    let rule = match args.rule.as_str() {
        "stop" => StoppingRule::Fixed(0),
        "F" => StoppingRule::entrance(problem.run(&problem.schedule)?.final_set),
        other => match other.strip_prefix("set:") {
            Some(states) => StoppingRule::entrance(input::parse_state_set(model, states)?),
            None => return Err(CliError::Usage(format!("unknown rule {other:?}"))),
        },
    };
    let report = run_simulation(model, &rule, start, args.paths, args.seed, args.horizon)?;
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(["start", "rule", "paths", "seed", "mean", "std_error", "horizon", "capped", "rng"])?;
    w.write_record([
        start.to_string(),
        args.rule.clone(),
        report.n_paths.to_string(),
        args.seed.to_string(),
        report.mean.to_string(),
        report.std_error.to_string(),
        report.horizon.to_string(),
        report.capped.to_string(),
        report.rng.to_string(),
    ])?;
    w.flush().map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })
}

pub fn gridgen(args: &GridgenArgs) -> Result<()> {
    let spec = input::read_grid(&args.grid)?;
    let model = flexstop_core::build_grid(&spec)?;
    let json = ModelFile::from_model(&model, None).to_json();
    fs::write(&args.out, json + "\n").map_err(|source| CliError::Io {
        path: args.out.clone(),
        source,
    })?;
    println!("states={} transitions={}", model.n_states(), model.transitions().nnz());
    Ok(())
}
