//! Grid execution. Points run in parallel; rows come back in grid order and
//! each point draws from its own seed, so thread count never changes output.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use swaptest::gates::PulseEnvelope;
use swaptest::rng::derive_seed;
use swaptest::{noisy_swap_test, prepare_registers, SwapTest};

use crate::config::{Experiment, ExperimentConfig, SweepSpec};
use crate::error::{Result, RunnerError};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "SWAPTEST_THREADS";

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub axis_values: Vec<f64>,
    pub p_g_exact: f64,
    pub overlap_from_pg: f64,
    pub overlap_oracle: f64,
    pub p_g_sampled: Option<f64>,
    pub stderr: Option<f64>,
    pub shots: Option<u64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub axis_names: Vec<String>,
    pub rows: Vec<SweepRow>,
}

/// Runs `f` on a pool sized by [`THREADS_ENV`], or rayon's default.
pub fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => return Err(RunnerError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunnerError::Usage(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn circuit(spec: &SweepSpec) -> Result<SwapTest<f64>> {
    Ok(match spec.pulse {
        None => SwapTest::new(spec.layout)?,
        Some(p) => {
            let transfer = PulseEnvelope::ramped_with_area(p.omega0, p.ramp_tau, PI);
            let interfere = PulseEnvelope::ramped_with_area(p.omega0, p.ramp_tau, FRAC_PI_2);
            SwapTest::pulsed(spec.layout, &transfer, &interfere, p.steps)?
        }
    })
}

fn describe(spec: &SweepSpec, values: &[f64]) -> String {
    spec.axes.iter().zip(values).map(|(a, v)| format!("{} = {v}", a.name)).collect::<Vec<_>>().join(", ")
}

fn run_point(spec: &SweepSpec, circuit: &SwapTest<f64>, index: usize, master: u64, shots: Option<u64>) -> Result<SweepRow> {
    let values = spec.point(index);
    let seed = derive_seed(master, index as u64);
    let fail = |source| RunnerError::Simulation { index, values: describe(spec, &values), source };
    let (b, c) = spec
        .recipes_at(&values)
        .map_err(|m| fail(swaptest::Error::InvalidParameter(m)))?;
    let simulate = || -> swaptest::Result<_> {
        let input = prepare_registers(spec.layout, &b, &c)?;
        let result = match &spec.noise {
            None => circuit.run(&input, shots, seed)?,
            Some(cfg) => noisy_swap_test(circuit, &input, cfg, shots, seed)?.result,
        };
        spec.contrast.apply(&result, &input)
    };
    let r = simulate().map_err(fail)?;
    Ok(SweepRow {
        axis_values: values,
        p_g_exact: r.p_g_exact,
        overlap_from_pg: r.overlap_from_pg,
        overlap_oracle: r.overlap_oracle,
        p_g_sampled: r.p_g_sampled,
        stderr: r.stderr,
        shots: r.shots,
        seed,
    })
}

/// Runs every grid point of a sweep configuration.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepTable> {
    let Experiment::Sweep(spec) = &config.experiment else {
        return Err(RunnerError::Usage(format!("{} is a calibration, not a sweep", config.name)));
    };
    let circuit = circuit(spec)?;
    let rows = with_pool(|| {
        (0..spec.point_count())
            .into_par_iter()
            .map(|i| run_point(spec, &circuit, i, config.seed, config.shots))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(SweepTable { axis_names: spec.axes.iter().map(|a| a.name.clone()).collect(), rows })
}
