//! Beam-splitter calibration: excitation probability against gate duration
//! for the `|g⟩|1⟩_A|1⟩_B` input, and the sine-squared fit that recovers Ω₀.

use rayon::prelude::*;

use swaptest::gates::PulseEnvelope;
use swaptest::protocols::calibration_excitation;
use swaptest::rng::{derive_seed, sample_shots, stream_rng};
use swaptest::{fit, FitModel, FitModelKind, FitResult64};

use crate::config::CalibrationSpec;
use crate::error::{Result, RunnerError};
use crate::sweep::with_pool;

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationRow {
    pub duration: f64,
    pub p_e_exact: f64,
    pub p_e_sampled: Option<f64>,
    pub stderr: Option<f64>,
    pub shots: Option<u64>,
    pub seed: u64,
}

impl CalibrationRow {
    /// The value a fit should see: the shot estimate when there is one.
    pub fn observed(&self) -> f64 {
        self.p_e_sampled.unwrap_or(self.p_e_exact)
    }
}

fn envelope(spec: &CalibrationSpec, duration: f64) -> PulseEnvelope<f64> {
    if spec.ramp_tau > 0.0 {
        PulseEnvelope::ramped(spec.omega0, spec.ramp_tau, duration)
    } else {
        PulseEnvelope::constant(spec.omega0, duration)
    }
}

pub fn run_calibration(spec: &CalibrationSpec, shots: Option<u64>, master: u64) -> Result<Vec<CalibrationRow>> {
    let point = |index: usize| -> Result<CalibrationRow> {
        let duration = spec.durations[index];
        let seed = derive_seed(master, index as u64);
        let fail = |source| RunnerError::Simulation { index, values: format!("duration = {duration}"), source };
        // rounding can leave a certain outcome a hair outside [0, 1]
        let p = calibration_excitation(&envelope(spec, duration), spec.steps).map_err(fail)?.clamp(0.0, 1.0);
        let (p_e_sampled, stderr) = match shots {
            Some(n) => {
                let est = sample_shots(p, n, &mut stream_rng(seed, 0)).map_err(fail)?;
                (Some(est.p_hat), Some(est.stderr))
            }
            None => (None, None),
        };
        Ok(CalibrationRow { duration, p_e_exact: p, p_e_sampled, stderr, shots, seed })
    };
    with_pool(|| (0..spec.durations.len()).into_par_iter().map(point).collect::<Result<Vec<_>>>())?
}

/// Fits `P₀ sin²(Ω₀T)` to the observed excitation.
pub fn fit_calibration(rows: &[CalibrationRow]) -> Result<FitResult64> {
    let xs: Vec<f64> = rows.iter().map(|r| r.duration).collect();
    let ys: Vec<f64> = rows.iter().map(CalibrationRow::observed).collect();
    fit(&FitModel::new(FitModelKind::SineSquared), &xs, &ys, None).map_err(|e| RunnerError::Fit(e.to_string()))
}
