//! Phenomenological motional noise and contrast factors.
//!
//! Heating and dephasing act on trajectories: every ensemble branch follows
//! one stochastic pure-state path, so the ensemble representation survives
//! and averages over many trajectories reproduce the channel.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::gates::apply_in_place;
use crate::hilbert::{partial_trace, qubit_ground_probability, Ensemble, Factor, PureState, ReducedDensity};
use crate::protocols::{register_overlap, SwapTest, SwapTestResult};
use crate::rng::{stream_rng, SimRng};
use crate::scalar::{phase, Real};

/// Measured heating rates of modes A, B, C in quanta/s.
pub const MEASURED_HEATING_RATES: [f64; 3] = [0.8, 0.9, 20.2];
/// Motional phase coherence time in s.
pub const MOTIONAL_COHERENCE_TIME: f64 = 10e-3;
/// Beam-splitter coupling `Ω₀` in rad/s.
pub const GATE_OMEGA0: f64 = 2.0 * std::f64::consts::PI * 680.0;

pub const GAMMA_00: f64 = 0.92;
pub const GAMMA_11: f64 = 0.88;
pub const GAMMA_CAT: f64 = 0.62;
pub const GAMMA_COHERENT: f64 = 0.79;

/// Largest `rate · duration` accepted by the first-order heating model.
pub const FIRST_ORDER_LIMIT: f64 = 0.1;

/// Wall-clock time of a beam-splitter gate of area `theta` at [`GATE_OMEGA0`].
pub fn gate_duration<T: Real>(theta: T) -> T {
    theta / T::lit(GATE_OMEGA0)
}

/// Durations of the two SWAP-test gates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateDurations<T> {
    pub transfer: T,
    pub interfere: T,
}

impl<T: Real> Default for GateDurations<T> {
    fn default() -> Self {
        Self { transfer: gate_duration(T::PI()), interfere: gate_duration(T::FRAC_PI_2()) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseConfig<T> {
    /// `(ṅ_A, ṅ_B, ṅ_C)` in quanta/s.
    pub heating_rates: [T; 3],
    /// Motional coherence time in s; `None` disables dephasing.
    pub dephasing_time: Option<T>,
    pub gate_durations: GateDurations<T>,
    pub trajectories: usize,
}

impl<T: Real> NoiseConfig<T> {
    pub fn measured(trajectories: usize) -> Self {
        Self {
            heating_rates: MEASURED_HEATING_RATES.map(T::lit),
            dephasing_time: Some(T::lit(MOTIONAL_COHERENCE_TIME)),
            gate_durations: GateDurations::default(),
            trajectories,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.heating_rates.iter().find(|r| !(**r >= T::zero() && r.is_finite())) {
            return Err(Error::InvalidParameter(format!("heating rate {r} must be finite and ≥ 0")));
        }
        if let Some(t2) = self.dephasing_time {
            if !(t2 > T::zero()) {
                return Err(Error::InvalidParameter(format!("coherence time {t2} must be > 0")));
            }
        }
        let d = self.gate_durations;
        if !(d.transfer >= T::zero() && d.interfere >= T::zero()) {
            return Err(Error::InvalidParameter("gate durations must be ≥ 0".into()));
        }
        if self.trajectories == 0 {
            return Err(Error::InvalidParameter("trajectory count must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// Applies `a†` (`raise`) or `a` to `mode` without normalizing.
fn ladder<T: Real>(state: &PureState<T>, mode: Factor, raise: bool) -> Vec<Complex<T>> {
    let layout = state.layout();
    let d = layout.dim(mode);
    let stride = layout.strides()[mode.position()];
    let mut out = vec![Complex::zero(); layout.total_dim()];
    for (idx, &z) in state.amplitudes().iter().enumerate() {
        if z.is_zero() {
            continue;
        }
        let n = (idx / stride) % d;
        if raise && n + 1 < d {
            out[idx + stride] = z * T::from_usize_lossy(n + 1).sqrt();
        } else if !raise && n > 0 {
            out[idx - stride] = z * T::from_usize_lossy(n).sqrt();
        }
    }
    out
}

fn norm_sqr<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// One first-order heating trajectory step on a pure state.
///
/// The channel has jump operators `√ṅ a†` and `√ṅ a`. Over `duration` the
/// up-jump fires with probability `ṅt‖a†ψ‖²`, the down-jump with
/// `ṅt‖aψ‖²`; otherwise the no-jump propagator `1 − ṅt(a†a + aa†)/2` acts.
/// The mean occupation then grows by `ṅt` for every input.
pub fn heating_trajectory<T: Real>(
    state: &PureState<T>,
    mode: Factor,
    rate: T,
    duration: T,
    rng: &mut SimRng,
) -> Result<PureState<T>> {
    let p = rate * duration;
    if p.as_f64() > FIRST_ORDER_LIMIT {
        return Err(Error::FirstOrderRegime(p.as_f64()));
    }
    if !(p > T::zero()) {
        return Ok(state.clone());
    }
    let up = ladder(state, mode, true);
    let down = ladder(state, mode, false);
    let p_up = p * norm_sqr(&up);
    let p_down = p * norm_sqr(&down);
    let u: f64 = rng.random();
    let layout = *state.layout();
    if u < p_up.as_f64() {
        return PureState::from_amplitudes(layout, up);
    }
    if u < (p_up + p_down).as_f64() {
        return PureState::from_amplitudes(layout, down);
    }
    let d = layout.dim(mode);
    let stride = layout.strides()[mode.position()];
    let half = p / T::lit(2.0);
    let damped = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(idx, &z)| {
            let n = T::from_usize_lossy((idx / stride) % d);
            z * (T::one() - half * (T::lit(2.0) * n + T::one()))
        })
        .collect();
    PureState::from_amplitudes(layout, damped)
}

/// One dephasing trajectory: `e^{iφn̂}` with `φ ~ N(0, 2·duration/T₂)`.
pub fn dephasing_trajectory<T: Real>(
    state: &PureState<T>,
    mode: Factor,
    coherence_time: T,
    duration: T,
    rng: &mut SimRng,
) -> Result<PureState<T>> {
    if duration < T::zero() {
        return Err(Error::InvalidParameter(format!("duration {duration} is negative")));
    }
    if !(coherence_time > T::zero()) {
        return Err(Error::InvalidParameter(format!("coherence time {coherence_time} must be > 0")));
    }
    if duration.is_zero() {
        return Ok(state.clone());
    }
    let sd = (T::lit(2.0) * duration / coherence_time).sqrt().as_f64();
    let normal = Normal::new(0.0, sd).map_err(|e| Error::InvalidParameter(format!("dephasing: {e}")))?;
    let phi = T::lit(normal.sample(rng));
    let layout = *state.layout();
    let d = layout.dim(mode);
    let stride = layout.strides()[mode.position()];
    let rotated = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(idx, &z)| z * phase(phi * T::from_usize_lossy((idx / stride) % d)))
        .collect();
    PureState::from_amplitudes(layout, rotated)
}

/// Heating on every branch of an ensemble, one trajectory per branch.
pub fn apply_heating<T: Real>(
    state: &Ensemble<T>,
    mode: Factor,
    rate: T,
    duration: T,
    rng: &mut SimRng,
) -> Result<Ensemble<T>> {
    state.map_states(|s| heating_trajectory(s, mode, rate, duration, rng))
}

/// Dephasing on every branch of an ensemble, one trajectory per branch.
pub fn apply_dephasing<T: Real>(
    state: &Ensemble<T>,
    mode: Factor,
    coherence_time: T,
    duration: T,
    rng: &mut SimRng,
) -> Result<Ensemble<T>> {
    state.map_states(|s| dephasing_trajectory(s, mode, coherence_time, duration, rng))
}

/// Heating then dephasing on all modes over one window.
fn noise_window<T: Real>(state: &Ensemble<T>, cfg: &NoiseConfig<T>, duration: T, rng: &mut SimRng) -> Result<Ensemble<T>> {
    let mut s = state.clone();
    for (mode, &rate) in Factor::MODES.into_iter().zip(&cfg.heating_rates) {
        if rate > T::zero() {
            s = apply_heating(&s, mode, rate, duration, rng)?;
        }
    }
    if let Some(t2) = cfg.dephasing_time {
        for mode in Factor::MODES {
            s = apply_dephasing(&s, mode, t2, duration, rng)?;
        }
    }
    Ok(s)
}

/// Trajectory-averaged SWAP test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisyOutcome<T> {
    pub result: SwapTestResult<T>,
    /// Standard error of the trajectory mean of `P_g`.
    pub trajectory_stderr: T,
}

/// Runs the SWAP test under noise. Each gate is preceded by a noise window
/// of that gate's duration. Trajectory `k` draws from stream `k + 1` of
/// `seed`; stream 0 is reserved for shot sampling.
pub fn noisy_swap_test<T: Real>(
    circuit: &SwapTest<T>,
    input: &Ensemble<T>,
    cfg: &NoiseConfig<T>,
    shots: Option<u64>,
    seed: u64,
) -> Result<NoisyOutcome<T>> {
    cfg.validate()?;
    circuit.check_input(input)?;
    let oracle = register_overlap(input)?;
    let durations = [cfg.gate_durations.transfer, cfg.gate_durations.interfere];
    let n = cfg.trajectories;
    // Welford running mean and squared deviation
    let mut mean = T::zero();
    let mut m2 = T::zero();
    for k in 0..n {
        let mut rng = stream_rng(seed, k as u64 + 1);
        let mut s = input.clone();
        for (gate, &dur) in circuit.gates().into_iter().zip(&durations) {
            s = noise_window(&s, cfg, dur, &mut rng)?;
            s = s.map_states(|b| {
                let mut out = b.clone();
                apply_in_place(gate, &mut out)?;
                Ok(out)
            })?;
        }
        let p = qubit_ground_probability(&s);
        let delta = p - mean;
        mean += delta / T::from_usize_lossy(k + 1);
        m2 += delta * (p - mean);
    }
    let nf = T::from_usize_lossy(n);
    let var = if n > 1 { m2 / (nf - T::one()) } else { T::zero() };
    Ok(NoisyOutcome {
        result: SwapTestResult::from_probability(mean, oracle, shots, seed)?,
        trajectory_stderr: (var / nf).sqrt(),
    })
}

/// `γ · ideal_overlap`.
pub fn apply_contrast<T: Real>(ideal_overlap: T, gamma: T) -> Result<T> {
    let tol = T::lit(1e-9);
    if !(ideal_overlap >= -tol && ideal_overlap <= T::one() + tol) {
        return Err(Error::InvalidParameter(format!("overlap {ideal_overlap} outside [0, 1]")));
    }
    if !(gamma >= T::zero() && gamma <= T::one()) {
        return Err(Error::InvalidParameter(format!("contrast {gamma} outside [0, 1]")));
    }
    Ok(gamma * ideal_overlap)
}

/// Phenomenological reduction of the measured overlap.
#[derive(Clone, Debug, PartialEq)]
pub enum ContrastModel<T> {
    Ideal,
    /// One factor for the whole overlap.
    Uniform(T),
    /// Per-Fock-level factors `γ_n`: the overlap becomes `Tr(D ρ_B D ρ_C)`
    /// with `D = diag(√γ_n)`. Levels past the list reuse its last entry.
    FockDiagonal(Vec<T>),
}

impl<T: Real> ContrastModel<T> {
    pub fn validate(&self) -> Result<()> {
        let check = |g: T| {
            if g > T::zero() && g <= T::one() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("contrast {g} outside (0, 1]")))
            }
        };
        match self {
            Self::Ideal => Ok(()),
            Self::Uniform(g) => check(*g),
            Self::FockDiagonal(gs) if gs.is_empty() => {
                Err(Error::InvalidParameter("Fock-diagonal contrast needs at least one factor".into()))
            }
            Self::FockDiagonal(gs) => gs.iter().try_for_each(|&g| check(g)),
        }
    }

    fn level_factor(gs: &[T], n: usize) -> T {
        gs.get(n).or(gs.last()).copied().unwrap_or(T::one())
    }

    /// Contrast-scaled `Tr(ρ_B ρ_C)`.
    pub fn scaled_overlap(&self, rho_b: &ReducedDensity<T>, rho_c: &ReducedDensity<T>) -> Result<T> {
        let d = rho_b.dim().max(rho_c.dim());
        let (b, c) = (rho_b.padded_to(d)?, rho_c.padded_to(d)?);
        let ideal = crate::hilbert::overlap_exact(&b, &c)?;
        match self {
            Self::Ideal => Ok(ideal),
            Self::Uniform(g) => apply_contrast(ideal, *g),
            Self::FockDiagonal(gs) => {
                let s: Vec<T> = (0..d).map(|n| Self::level_factor(gs, n).sqrt()).collect();
                let (mb, mc) = (b.matrix(), c.matrix());
                let mut acc = Complex::zero();
                for i in 0..d {
                    for j in 0..d {
                        acc += mb[(i, j)] * mc[(j, i)] * (s[i] * s[j]);
                    }
                }
                Ok(acc.re)
            }
        }
    }

    /// Rescales the interference signal `2P_g − 1` of a result and
    /// resamples its shots from the same seed.
    ///
    /// A uniform factor scales the simulated signal. Fock-diagonal factors
    /// are defined on the register densities, so the signal is replaced by
    /// the scaled density overlap.
    pub fn apply(&self, result: &SwapTestResult<T>, input: &Ensemble<T>) -> Result<SwapTestResult<T>> {
        self.validate()?;
        let two = T::lit(2.0);
        let signal = two * result.p_g_exact - T::one();
        let (signal, oracle) = match self {
            Self::Ideal => return Ok(*result),
            Self::Uniform(g) => (*g * signal, apply_contrast(result.overlap_oracle, *g)?),
            Self::FockDiagonal(_) => {
                let rb = partial_trace(input, &[Factor::B])?;
                let rc = partial_trace(input, &[Factor::C])?;
                let v = self.scaled_overlap(&rb, &rc)?;
                (v, v)
            }
        };
        SwapTestResult::from_probability((T::one() + signal) / two, oracle, result.shots, result.seed)
    }
}
