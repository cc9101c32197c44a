//! Composite procedures: register preparation, optical pumping, the SWAP
//! test and its controlled-SWAP equivalence, and the purity experiment.

use num_complex::Complex;
use num_traits::Zero;

use crate::bosonic::{cat_state, coherent_state, fock_state, squeezed_vacuum, superposition01};
use crate::error::{Error, Result};
use crate::gates::{
    apply, apply_in_place, beam_splitter, controlled_beam_splitter, evolve_pulsed_cbs, rotation, sideband,
    spin_displacement, GateOp, PulseEnvelope, SidebandColor,
};
use crate::hilbert::{
    fit_mode_vector, minus_state, overlap_exact, partial_trace, plus_state, qubit_ground_probability, Ensemble,
    Factor, ModeLayout, PureState, Qubit,
};
use crate::rng::{sample_shots, stream_rng};
use crate::scalar::{cr, Cplx, Real};

/// Tolerance for the vacuum and ground-state preconditions.
const PRECONDITION_TOL: f64 = 1e-10;

/// Register state recipe for one motional mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PrepRecipe<T> {
    Vacuum,
    Fock { n: usize },
    /// `(|0⟩ − e^{iφ}|1⟩)/√2`.
    Superposition01 { phi: T },
    Coherent { alpha: Cplx<T> },
    /// Squeezed vacuum labelled `|r e^{iφ/2}⟩`.
    Squeezed { r: T, phi: T },
    Cat { alpha: Cplx<T>, phi_cat: T },
    /// `cos²(φ₁/2)|0⟩⟨0| + sin²(φ₁/2)|1⟩⟨1|` via sideband and pumping.
    MixedRho1 { phi1: T },
    /// `sin²(φ₂/2+π/4)|α⟩⟨α| + cos²(φ₂/2+π/4)|−α⟩⟨−α|` via spin-dependent
    /// displacement and pumping, with real `α = √alpha_sq`.
    MixedRho2 { phi2: T, alpha_sq: T },
}

impl<T: Real> PrepRecipe<T> {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Vacuum => "vacuum",
            Self::Fock { .. } => "fock",
            Self::Superposition01 { .. } => "superposition01",
            Self::Coherent { .. } => "coherent",
            Self::Squeezed { .. } => "squeezed",
            Self::Cat { .. } => "cat",
            Self::MixedRho1 { .. } => "mixed-rho1",
            Self::MixedRho2 { .. } => "mixed-rho2",
        }
    }

    pub fn is_mixed(&self) -> bool {
        matches!(self, Self::MixedRho1 { .. } | Self::MixedRho2 { .. })
    }

    /// Single-mode Fock vector of a pure recipe at dimension `dim`.
    pub fn mode_vector(&self, dim: usize) -> Result<Vec<Cplx<T>>> {
        match *self {
            Self::Vacuum => fock_state(0, dim),
            Self::Fock { n } => fock_state(n, dim),
            Self::Superposition01 { phi } => superposition01(phi, dim),
            Self::Coherent { alpha } => coherent_state(alpha, dim),
            Self::Squeezed { r, phi } => squeezed_vacuum(r, phi, dim),
            Self::Cat { alpha, phi_cat } => cat_state(alpha, phi_cat, dim),
            Self::MixedRho1 { .. } | Self::MixedRho2 { .. } => {
                Err(Error::InvalidParameter(format!("{} is not a pure recipe", self.kind_name())))
            }
        }
    }
}

fn require_vacuum<T: Real>(state: &PureState<T>, mode: Factor) -> Result<()> {
    let p0 = state.marginal(mode)[0];
    if (T::one() - p0).as_f64() > PRECONDITION_TOL {
        return Err(Error::NotVacuum(mode));
    }
    Ok(())
}

fn require_ground<T: Real>(state: &PureState<T>) -> Result<()> {
    if (T::one() - state.ground_probability()).as_f64() > PRECONDITION_TOL {
        return Err(Error::QubitNotGround);
    }
    Ok(())
}

/// Replaces the vacuum of `mode` by `v`, keeping every other factor.
fn install_mode_vector<T: Real>(state: &PureState<T>, mode: Factor, v: &[Cplx<T>]) -> Result<PureState<T>> {
    require_vacuum(state, mode)?;
    let layout = *state.layout();
    let d = layout.dim(mode);
    let v = fit_mode_vector(mode, v, d)?;
    let stride = layout.strides()[mode.position()];
    let mut out = vec![Complex::zero(); layout.total_dim()];
    for (idx, &a) in state.amplitudes().iter().enumerate() {
        if !(idx / stride).is_multiple_of(d) || a.is_zero() {
            continue;
        }
        for (k, &vk) in v.iter().enumerate() {
            out[idx + k * stride] = a * vk;
        }
    }
    PureState::from_amplitudes(layout, out)
}

/// Installs `recipe` on `mode` in every branch of `state`.
///
/// Pure recipes are built at the layout's register dimension and
/// zero-padded, so modes of different size receive identical vectors.
pub fn prepare<T: Real>(recipe: &PrepRecipe<T>, mode: Factor, state: &Ensemble<T>) -> Result<Ensemble<T>> {
    if !mode.is_mode() {
        return Err(Error::InvalidParameter("preparation target must be a motional mode".into()));
    }
    let layout = *state.layout();
    for (_, s) in state.branches() {
        require_vacuum(s, mode)?;
    }
    let out = match *recipe {
        PrepRecipe::MixedRho1 { phi1 } => {
            let bsb = sideband(&layout, SidebandColor::Blue, phi1, mode)?;
            let theta1 = if phi1 <= T::FRAC_PI_2() { T::zero() } else { T::PI() };
            let r = rotation(theta1);
            let evolved = state.map_states(|s| {
                require_ground(s)?;
                apply(&r, &apply(&bsb, s)?)
            })?;
            optical_pump(&evolved)?
        }
        PrepRecipe::MixedRho2 { phi2, alpha_sq } => {
            if alpha_sq < T::zero() {
                return Err(Error::InvalidParameter(format!("|α|² = {alpha_sq} is negative")));
            }
            let dx = spin_displacement(&layout, cr(alpha_sq.sqrt()), mode)?;
            let theta2 = if phi2 < T::zero() { T::FRAC_PI_2() } else { -T::FRAC_PI_2() };
            let (r_in, r_out) = (rotation(phi2), rotation(theta2));
            let evolved = state.map_states(|s| {
                require_ground(s)?;
                apply(&r_out, &apply(&dx, &apply(&r_in, s)?)?)
            })?;
            optical_pump(&evolved)?
        }
        _ => {
            let v = recipe.mode_vector(layout.register_dim())?;
            state.map_states(|s| install_mode_vector(s, mode, &v))?
        }
    };
    out.check_tail()?;
    Ok(out)
}

/// Projects the qubit onto `|g⟩`/`|e⟩`, then resets it to `|g⟩`.
///
/// Each branch splits into at most two renormalized sub-branches weighted
/// by the projection probabilities; negligible sub-branches are dropped.
pub fn optical_pump<T: Real>(state: &Ensemble<T>) -> Result<Ensemble<T>> {
    let layout = *state.layout();
    let half = layout.motional_dim();
    let mut branches = Vec::with_capacity(2 * state.len());
    for (w, s) in state.branches() {
        let amps = s.amplitudes();
        for part in [&amps[..half], &amps[half..]] {
            let p: T = part.iter().map(|z| z.norm_sqr()).sum();
            if p.as_f64() <= crate::hilbert::PRUNE_WEIGHT {
                continue;
            }
            let mut v = Vec::with_capacity(layout.total_dim());
            v.extend_from_slice(part);
            v.resize(layout.total_dim(), Complex::zero());
            branches.push((*w * p, PureState::from_amplitudes(layout, v)?));
        }
    }
    Ensemble::from_unnormalized(branches)
}

/// Outcome of one SWAP-test run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwapTestResult<T> {
    pub p_g_exact: T,
    /// `|1 − 2P_g|`.
    pub overlap_from_pg: T,
    /// `Tr(ρ_B ρ_C)` of the input registers.
    pub overlap_oracle: T,
    pub shots: Option<u64>,
    pub p_g_sampled: Option<T>,
    pub stderr: Option<T>,
    pub seed: u64,
}

impl<T: Real> SwapTestResult<T> {
    /// Builds the result from an exact `P_g`, sampling shots if requested.
    pub fn from_probability(p_g: T, overlap_oracle: T, shots: Option<u64>, seed: u64) -> Result<Self> {
        let (p_g_sampled, stderr) = match shots {
            Some(n) => {
                let est = sample_shots(p_g, n, &mut stream_rng(seed, 0))?;
                (Some(est.p_hat), Some(est.stderr))
            }
            None => (None, None),
        };
        Ok(Self {
            p_g_exact: p_g,
            overlap_from_pg: (T::one() - T::lit(2.0) * p_g).abs(),
            overlap_oracle,
            shots,
            p_g_sampled,
            stderr,
            seed,
        })
    }
}

/// `Tr(ρ_B ρ_C)` of an ensemble, padding the smaller register.
pub fn register_overlap<T: Real>(state: &Ensemble<T>) -> Result<T> {
    let rb = partial_trace(state, &[Factor::B])?;
    let rc = partial_trace(state, &[Factor::C])?;
    let d = rb.dim().max(rc.dim());
    overlap_exact(&rb.padded_to(d)?, &rc.padded_to(d)?)
}

/// The SWAP-test circuit `U^{AB}_CBS(π/2, π) U^{AC}_CBS(π, 0)` on a fixed layout.
#[derive(Clone, Debug)]
pub struct SwapTest<T> {
    layout: ModeLayout,
    transfer: GateOp<T>,
    interfere: GateOp<T>,
}

impl<T: Real> SwapTest<T> {
    pub fn new(layout: ModeLayout) -> Result<Self> {
        Ok(Self {
            layout,
            transfer: controlled_beam_splitter(&layout, T::PI(), T::zero(), (Factor::A, Factor::C))?,
            interfere: controlled_beam_splitter(&layout, T::FRAC_PI_2(), T::PI(), (Factor::A, Factor::B))?,
        })
    }

    /// Circuit with both gates built from pulsed envelopes (areas π and π/2).
    pub fn pulsed(layout: ModeLayout, transfer: &PulseEnvelope<T>, interfere: &PulseEnvelope<T>, steps: usize) -> Result<Self> {
        Ok(Self {
            layout,
            transfer: evolve_pulsed_cbs(&layout, transfer, T::zero(), (Factor::A, Factor::C), steps)?,
            interfere: evolve_pulsed_cbs(&layout, interfere, T::PI(), (Factor::A, Factor::B), steps)?,
        })
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    /// The two gates in application order.
    pub fn gates(&self) -> [&GateOp<T>; 2] {
        [&self.transfer, &self.interfere]
    }

    /// Checks that every branch has the qubit in `|g⟩` and mode A in vacuum.
    pub fn check_input(&self, state: &Ensemble<T>) -> Result<()> {
        if state.layout() != &self.layout {
            return Err(Error::LayoutMismatch(format!("{:?} vs {:?}", state.layout(), self.layout)));
        }
        for (_, s) in state.branches() {
            require_ground(s)?;
            require_vacuum(s, Factor::A)?;
        }
        Ok(())
    }

    /// Final state of the circuit.
    pub fn evolve(&self, state: &Ensemble<T>) -> Result<Ensemble<T>> {
        self.check_input(state)?;
        state.map_states(|s| {
            let mut out = s.clone();
            apply_in_place(&self.transfer, &mut out)?;
            apply_in_place(&self.interfere, &mut out)?;
            Ok(out)
        })
    }

    pub fn run(&self, state: &Ensemble<T>, shots: Option<u64>, seed: u64) -> Result<SwapTestResult<T>> {
        let oracle = register_overlap(state)?;
        let p_g = qubit_ground_probability(&self.evolve(state)?);
        SwapTestResult::from_probability(p_g, oracle, shots, seed)
    }
}

/// One-shot SWAP test on the ensemble's own layout.
pub fn swap_test<T: Real>(state: &Ensemble<T>, shots: Option<u64>, seed: u64) -> Result<SwapTestResult<T>> {
    SwapTest::new(*state.layout())?.run(state, shots, seed)
}

/// Input `|g⟩|0⟩_A|Ψ⟩_B|Φ⟩_C` with the two recipes installed.
pub fn prepare_registers<T: Real>(
    layout: ModeLayout,
    on_b: &PrepRecipe<T>,
    on_c: &PrepRecipe<T>,
) -> Result<Ensemble<T>> {
    let start = Ensemble::pure(PureState::ground(layout));
    let with_b = prepare(on_b, Factor::B, &start)?;
    prepare(on_c, Factor::C, &with_b)
}

/// Swaps the B and C occupations of every amplitude.
fn swap_bc<T: Real>(state: &PureState<T>) -> Result<PureState<T>> {
    let layout = *state.layout();
    let mut out = vec![Complex::zero(); layout.total_dim()];
    for (idx, &z) in state.amplitudes().iter().enumerate() {
        if z.is_zero() {
            continue;
        }
        let (q, [a, b, c]) = layout.decode(idx);
        out[layout.encode(q, [a, c, b])?] = z;
    }
    PureState::from_amplitudes(layout, out)
}

/// Fidelity of the SWAP-test circuit, followed by `U^{AC}_BS(π,π) U^{AB}_BS(π/2,0)`,
/// with the controlled-SWAP output `(|+⟩|0⟩|Ψ⟩ − |−⟩|0⟩ SWAP_{BC}|Ψ⟩)/√2`.
pub fn controlled_swap_equivalence<T: Real>(state: &PureState<T>) -> Result<T> {
    require_ground(state)?;
    require_vacuum(state, Factor::A)?;
    let layout = *state.layout();
    let circuit = SwapTest::new(layout)?;
    let mut out = state.clone();
    for g in circuit.gates() {
        apply_in_place(g, &mut out)?;
    }
    apply_in_place(&beam_splitter(&layout, T::FRAC_PI_2(), T::zero(), (Factor::A, Factor::B))?, &mut out)?;
    apply_in_place(&beam_splitter(&layout, T::PI(), T::PI(), (Factor::A, Factor::C))?, &mut out)?;

    // The motional part of |g⟩|0⟩|Ψ⟩ sits in the first half of the amplitudes.
    let half = layout.motional_dim();
    let motion = PureState::from_amplitudes(layout, state.amplitudes().to_vec())?;
    let swapped = swap_bc(&motion)?;
    let (plus, minus) = (plus_state::<T>(), minus_state::<T>());
    let h = T::FRAC_1_SQRT_2();
    let mut expected = vec![Complex::zero(); layout.total_dim()];
    for (q, slot) in [Qubit::G, Qubit::E].into_iter().enumerate() {
        let base = slot.index() * half;
        for i in 0..half {
            expected[base + i] = (plus[q] * motion.amplitudes()[i] - minus[q] * swapped.amplitudes()[i]) * h;
        }
    }
    let expected = PureState::from_amplitudes(layout, expected)?;
    Ok(expected.inner(&out)?.norm_sqr())
}

/// Prepares `recipe` on both B and C and runs the SWAP test, estimating `Tr(ρ²)`.
pub fn purity_experiment<T: Real>(
    circuit: &SwapTest<T>,
    recipe: &PrepRecipe<T>,
    shots: Option<u64>,
    seed: u64,
) -> Result<SwapTestResult<T>> {
    let input = prepare_registers(*circuit.layout(), recipe, recipe)?;
    circuit.run(&input, shots, seed)
}

/// Excited-state probability after a controlled beam splitter with envelope
/// `envelope` on `|g⟩|1⟩_A|1⟩_B`.
pub fn calibration_excitation<T: Real>(envelope: &PulseEnvelope<T>, steps: usize) -> Result<T> {
    let layout = ModeLayout::new([3, 3, 1])?;
    let gate = evolve_pulsed_cbs(&layout, envelope, T::zero(), (Factor::A, Factor::B), steps)?;
    let out = apply(&gate, &PureState::basis(layout, Qubit::G, [1, 1, 0])?)?;
    Ok(T::one() - out.ground_probability())
}
