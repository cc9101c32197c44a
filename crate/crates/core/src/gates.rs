//! Circuit unitaries on their minimal support.
//!
//! A [`GateOp`] never materializes a full-space matrix. Two-mode beam
//! splitters conserve the total excitation number of the pair and are
//! stored as one dense block per excitation number; spin-dependent gates
//! are stored as one mode action per `σx` eigen-sector.

use num_complex::Complex;
use num_traits::Zero;

use crate::bosonic::{annihilation, displacement};
use crate::error::{Error, Result};
use crate::hilbert::{strides, Factor, ModeLayout, PureState};
use crate::linalg::CMatrix;
use crate::scalar::{cr, phase, Cplx, Real};

/// Minimum number of exponential steps used by [`evolve_pulsed_cbs`].
pub const MIN_PULSE_STEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SidebandColor {
    Blue,
    Red,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind<T> {
    /// `R(θ) = cos(θ/2) I − i sin(θ/2) σy`.
    Rotation { theta: T },
    /// Sideband pulse of area `Ω_sb t`.
    Sideband { color: SidebandColor, area: T },
    /// `exp[−i(θ/2) σx (x†y e^{iψ} + x y† e^{−iψ})]`.
    ControlledBeamSplitter { theta: T, psi: T },
    /// `exp[−i(θ/2) (x†y e^{iψ} + x y† e^{−iψ})]`.
    BeamSplitter { theta: T, psi: T },
    /// `exp[σx (α x† − α* x)]`.
    SpinDisplacement { alpha: Cplx<T> },
}

/// How a gate acts on its support.
#[derive(Clone, Debug, PartialEq)]
enum Action<T> {
    /// Dense unitary on the support, row-major in support order.
    Dense(CMatrix<T>),
    /// Two-mode number-conserving unitary, one block per excitation number.
    NumberBlocks(Vec<CMatrix<T>>),
    /// Qubit-conditioned action: the inner actions live on the remaining
    /// support factors in the `|+⟩` and `|−⟩` sectors of `σx`.
    SigmaX { plus: Box<Action<T>>, minus: Box<Action<T>> },
}

/// A unitary acting on an ordered subset of the tensor factors.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp<T> {
    kind: GateKind<T>,
    support: Vec<Factor>,
    support_dims: Vec<usize>,
    action: Action<T>,
}

impl<T: Real> GateOp<T> {
    pub fn kind(&self) -> &GateKind<T> {
        &self.kind
    }

    pub fn support(&self) -> &[Factor] {
        &self.support
    }

    pub fn support_dims(&self) -> &[usize] {
        &self.support_dims
    }

    pub fn support_dim(&self) -> usize {
        self.support_dims.iter().product()
    }

    /// Dense unitary on the support subspace, row-major in support order.
    /// Intended for verification on small dimensions.
    pub fn to_dense(&self) -> CMatrix<T> {
        let d = self.support_dim();
        let positions: Vec<usize> = (0..self.support.len()).collect();
        let mut m = CMatrix::zeros(d, d);
        let mut col = vec![Complex::zero(); d];
        for j in 0..d {
            col.iter_mut().for_each(|z| *z = Complex::zero());
            col[j] = cr(T::one());
            apply_action(&self.action, &mut col, &self.support_dims, &positions);
            for i in 0..d {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    /// Gate with the inverse action.
    pub fn adjoint(&self) -> Self {
        Self {
            kind: self.kind,
            support: self.support.clone(),
            support_dims: self.support_dims.clone(),
            action: adjoint_action(&self.action),
        }
    }
}

fn adjoint_action<T: Real>(a: &Action<T>) -> Action<T> {
    match a {
        Action::Dense(m) => Action::Dense(m.adjoint()),
        Action::NumberBlocks(bs) => Action::NumberBlocks(bs.iter().map(CMatrix::adjoint).collect()),
        Action::SigmaX { plus, minus } => {
            Action::SigmaX { plus: Box::new(adjoint_action(plus)), minus: Box::new(adjoint_action(minus)) }
        }
    }
}

fn mode_pair(layout: &ModeLayout, modes: (Factor, Factor)) -> Result<(usize, usize)> {
    let (x, y) = modes;
    if !x.is_mode() || !y.is_mode() || x == y {
        return Err(Error::InvalidParameter(format!("beam splitter needs two distinct modes, got {modes:?}")));
    }
    Ok((layout.dim(x), layout.dim(y)))
}

fn require_mode(mode: Factor) -> Result<()> {
    if !mode.is_mode() {
        return Err(Error::InvalidParameter("expected a motional mode, got the qubit".into()));
    }
    Ok(())
}

/// `R(θ) = cos(θ/2) I − i sin(θ/2) σy` with `σy = −i|g⟩⟨e| + i|e⟩⟨g|`.
pub fn rotation<T: Real>(theta: T) -> GateOp<T> {
    let half = theta / T::lit(2.0);
    let (s, co) = half.sin_cos();
    // −i sin·σy = [[0, −sin], [sin, 0]]
    let m = CMatrix::from_row_major(2, 2, vec![cr(co), cr(-s), cr(s), cr(co)]);
    GateOp {
        kind: GateKind::Rotation { theta },
        support: vec![Factor::Qubit],
        support_dims: vec![ModeLayout::QUBIT_DIM],
        action: Action::Dense(m),
    }
}

/// Sideband pulse on `(qubit, mode)`: `exp(−i·area/2·(σ⁺a† + σ⁻a))` for blue,
/// `exp(−i·area/2·(σ⁻a† + σ⁺a))` for red, with `σ⁺ = |e⟩⟨g|`.
pub fn sideband<T: Real>(layout: &ModeLayout, color: SidebandColor, area: T, mode: Factor) -> Result<GateOp<T>> {
    require_mode(mode)?;
    if area < T::zero() {
        return Err(Error::InvalidParameter(format!("sideband pulse area {area} is negative")));
    }
    let n = layout.dim(mode);
    let a = annihilation::<T>(n).into_matrix();
    let ad = a.adjoint();
    // qubit index 0 = g, 1 = e; σ⁺ = |e⟩⟨g|
    let zero = Complex::zero();
    let one = cr(T::one());
    let sigma_plus = CMatrix::from_row_major(2, 2, vec![zero, zero, one, zero]);
    let sigma_minus = sigma_plus.adjoint();
    let coupling = match color {
        SidebandColor::Blue => &sigma_plus.kron(&ad) + &sigma_minus.kron(&a),
        SidebandColor::Red => &sigma_minus.kron(&ad) + &sigma_plus.kron(&a),
    };
    let u = coupling.scale(Complex::new(T::zero(), -area / T::lit(2.0))).expm();
    Ok(GateOp {
        kind: GateKind::Sideband { color, area },
        support: vec![Factor::Qubit, mode],
        support_dims: vec![ModeLayout::QUBIT_DIM, n],
        action: Action::Dense(u),
    })
}

/// States `(n_x, K − n_x)` of the excitation-number block `K`.
fn block_range(dx: usize, dy: usize, k: usize) -> std::ops::RangeInclusive<usize> {
    let lo = k.saturating_sub(dy - 1);
    let hi = k.min(dx - 1);
    lo..=hi
}

/// Blocks of `exp[−i(θ/2)(x†y e^{iψ} + x y† e^{−iψ})]` on modes of
/// dimension `dx`, `dy`.
fn beam_splitter_blocks<T: Real>(dx: usize, dy: usize, theta: T, psi: T) -> Vec<CMatrix<T>> {
    let coeff = Complex::new(T::zero(), -theta / T::lit(2.0));
    let e_plus = phase(psi);
    let e_minus = e_plus.conj();
    (0..dx + dy - 1)
        .map(|k| {
            let range = block_range(dx, dy, k);
            let lo = *range.start();
            let size = range.end() - lo + 1;
            let mut g = CMatrix::zeros(size, size);
            for i in 0..size {
                let nx = lo + i;
                let ny = k - nx;
                // x†y|nx,ny⟩ = √((nx+1)ny) |nx+1, ny−1⟩
                if i + 1 < size && ny > 0 {
                    let amp = T::from_usize_lossy((nx + 1) * ny).sqrt();
                    g[(i + 1, i)] += e_plus * amp;
                    g[(i, i + 1)] += e_minus * amp;
                }
            }
            g.scale(coeff).expm()
        })
        .collect()
}

/// Spin-independent beam splitter `U_BS(θ, ψ)` on `modes = (x, y)`.
pub fn beam_splitter<T: Real>(layout: &ModeLayout, theta: T, psi: T, modes: (Factor, Factor)) -> Result<GateOp<T>> {
    let (dx, dy) = mode_pair(layout, modes)?;
    if theta < T::zero() {
        return Err(Error::InvalidParameter(format!("mixing angle {theta} is negative")));
    }
    Ok(GateOp {
        kind: GateKind::BeamSplitter { theta, psi },
        support: vec![modes.0, modes.1],
        support_dims: vec![dx, dy],
        action: Action::NumberBlocks(beam_splitter_blocks(dx, dy, theta, psi)),
    })
}

/// Controlled beam splitter `U_CBS(θ, ψ)` on `(qubit, x, y)`.
///
/// In the `σx = ±1` sectors this is the beam splitter with mixing angle
/// `±θ`; equivalently phase `ψ` in `|+⟩` and `ψ + π` in `|−⟩`.
pub fn controlled_beam_splitter<T: Real>(
    layout: &ModeLayout,
    theta: T,
    psi: T,
    modes: (Factor, Factor),
) -> Result<GateOp<T>> {
    let (dx, dy) = mode_pair(layout, modes)?;
    if theta < T::zero() {
        return Err(Error::InvalidParameter(format!("mixing angle {theta} is negative")));
    }
    Ok(cbs_from_blocks(
        GateKind::ControlledBeamSplitter { theta, psi },
        modes,
        (dx, dy),
        beam_splitter_blocks(dx, dy, theta, psi),
        beam_splitter_blocks(dx, dy, -theta, psi),
    ))
}

fn cbs_from_blocks<T: Real>(
    kind: GateKind<T>,
    modes: (Factor, Factor),
    (dx, dy): (usize, usize),
    plus: Vec<CMatrix<T>>,
    minus: Vec<CMatrix<T>>,
) -> GateOp<T> {
    GateOp {
        kind,
        support: vec![Factor::Qubit, modes.0, modes.1],
        support_dims: vec![ModeLayout::QUBIT_DIM, dx, dy],
        action: Action::SigmaX {
            plus: Box::new(Action::NumberBlocks(plus)),
            minus: Box::new(Action::NumberBlocks(minus)),
        },
    }
}

/// Spin-dependent displacement `D_x(α) = exp[σx(α x† − α* x)]`, mapping
/// `|±⟩|0⟩ → |±⟩|±α⟩`.
pub fn spin_displacement<T: Real>(layout: &ModeLayout, alpha: Cplx<T>, mode: Factor) -> Result<GateOp<T>> {
    require_mode(mode)?;
    let n = layout.dim(mode);
    let plus = displacement(alpha, n)?.into_matrix();
    let minus = displacement(-alpha, n)?.into_matrix();
    Ok(GateOp {
        kind: GateKind::SpinDisplacement { alpha },
        support: vec![Factor::Qubit, mode],
        support_dims: vec![ModeLayout::QUBIT_DIM, n],
        action: Action::SigmaX { plus: Box::new(Action::Dense(plus)), minus: Box::new(Action::Dense(minus)) },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnvelopeShape {
    /// `sin²` rise over `τ`, flat top, `sin²` fall over `τ`.
    RampedFlatTop,
    Constant,
}

/// Coupling-strength envelope `Ω(t)` of a beam-splitter pulse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseEnvelope<T> {
    /// Peak coupling `Ω₀` in rad/s.
    pub omega0: T,
    /// Ramp time constant `τ` in s.
    pub ramp_tau: T,
    /// Total duration `T` in s.
    pub total_t: T,
    pub shape: EnvelopeShape,
}

impl<T: Real> PulseEnvelope<T> {
    pub fn constant(omega0: T, total_t: T) -> Self {
        Self { omega0, ramp_tau: T::zero(), total_t, shape: EnvelopeShape::Constant }
    }

    pub fn ramped(omega0: T, ramp_tau: T, total_t: T) -> Self {
        Self { omega0, ramp_tau, total_t, shape: EnvelopeShape::RampedFlatTop }
    }

    /// Ramped envelope whose area equals `theta`.
    pub fn ramped_with_area(omega0: T, ramp_tau: T, theta: T) -> Self {
        Self::ramped(omega0, ramp_tau, theta / omega0 + ramp_tau)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidEnvelope(msg));
        if !(self.omega0.is_finite() && self.omega0 >= T::zero()) {
            return bad(format!("Ω₀ = {} must be finite and ≥ 0", self.omega0));
        }
        if !(self.total_t.is_finite() && self.total_t >= T::zero()) {
            return bad(format!("T = {} must be finite and ≥ 0", self.total_t));
        }
        if self.shape == EnvelopeShape::RampedFlatTop {
            if !(self.ramp_tau > T::zero()) {
                return bad(format!("ramp τ = {} must be > 0", self.ramp_tau));
            }
            if self.total_t < T::lit(2.0) * self.ramp_tau {
                return bad(format!("T = {} shorter than 2τ = {}", self.total_t, T::lit(2.0) * self.ramp_tau));
            }
        }
        Ok(())
    }

    /// `Ω(t)`.
    pub fn omega(&self, t: T) -> T {
        if t < T::zero() || t > self.total_t {
            return T::zero();
        }
        match self.shape {
            EnvelopeShape::Constant => self.omega0,
            EnvelopeShape::RampedFlatTop => {
                let tau = self.ramp_tau;
                let k = T::PI() / (T::lit(2.0) * tau);
                if t < tau {
                    self.omega0 * (k * t).sin().powi(2)
                } else if t > self.total_t - tau {
                    self.omega0 * (k * (self.total_t - t)).sin().powi(2)
                } else {
                    self.omega0
                }
            }
        }
    }

    /// Closed-form area `θ = ∫Ω dt`.
    pub fn area(&self) -> T {
        match self.shape {
            EnvelopeShape::Constant => self.omega0 * self.total_t,
            EnvelopeShape::RampedFlatTop => self.omega0 * (self.total_t - self.ramp_tau),
        }
    }

    /// Breakpoints between smooth pieces.
    fn segments(&self) -> Vec<(T, T)> {
        match self.shape {
            EnvelopeShape::Constant => vec![(T::zero(), self.total_t)],
            EnvelopeShape::RampedFlatTop => {
                let tau = self.ramp_tau;
                let t = self.total_t;
                vec![(T::zero(), tau), (tau, t - tau), (t - tau, t)]
            }
        }
    }
}

/// Time-ordered evolution under `H_CBS(ψ, t) = Ω(t)/2 σx (x†y e^{iψ} + h.c.)`.
///
/// Each smooth piece of the envelope is split into equal steps; each step
/// contributes `exp(−i Ω(t_mid) dt/2 · σx G)` and the block unitaries are
/// multiplied in time order. `steps` is raised to [`MIN_PULSE_STEPS`].
pub fn evolve_pulsed_cbs<T: Real>(
    layout: &ModeLayout,
    envelope: &PulseEnvelope<T>,
    psi: T,
    modes: (Factor, Factor),
    steps: usize,
) -> Result<GateOp<T>> {
    envelope.validate()?;
    let (dx, dy) = mode_pair(layout, modes)?;
    let steps = steps.max(MIN_PULSE_STEPS);
    let segments = envelope.segments();
    let span = envelope.total_t;

    let identity_blocks = || beam_splitter_blocks(dx, dy, T::zero(), psi);
    let mut plus = identity_blocks();
    let mut minus = identity_blocks();
    for (t0, t1) in segments {
        let len = t1 - t0;
        if len <= T::zero() {
            continue;
        }
        let n = if span > T::zero() {
            ((T::from_usize_lossy(steps) * len / span).ceil().to_usize().unwrap_or(1)).max(1)
        } else {
            1
        };
        let dt = len / T::from_usize_lossy(n);
        for k in 0..n {
            let mid = t0 + dt * (T::from_usize_lossy(k) + T::lit(0.5));
            let theta = envelope.omega(mid) * dt;
            let step_plus = beam_splitter_blocks(dx, dy, theta, psi);
            let step_minus = beam_splitter_blocks(dx, dy, -theta, psi);
            for (acc, s) in plus.iter_mut().zip(&step_plus) {
                *acc = s * &*acc;
            }
            for (acc, s) in minus.iter_mut().zip(&step_minus) {
                *acc = s * &*acc;
            }
        }
    }
    Ok(cbs_from_blocks(
        GateKind::ControlledBeamSplitter { theta: envelope.area(), psi },
        modes,
        (dx, dy),
        plus,
        minus,
    ))
}

/// Applies `gate` to `state`. Factors outside the support are untouched.
pub fn apply<T: Real>(gate: &GateOp<T>, state: &PureState<T>) -> Result<PureState<T>> {
    let mut out = state.clone();
    apply_in_place(gate, &mut out)?;
    Ok(out)
}

pub fn apply_in_place<T: Real>(gate: &GateOp<T>, state: &mut PureState<T>) -> Result<()> {
    let layout = *state.layout();
    for (f, &d) in gate.support.iter().zip(&gate.support_dims) {
        if layout.dim(*f) != d {
            return Err(Error::LayoutMismatch(format!(
                "gate expects dimension {d} on {f:?}, state has {}",
                layout.dim(*f)
            )));
        }
    }
    let positions: Vec<usize> = gate.support.iter().map(|f| f.position()).collect();
    apply_action(&gate.action, state.amplitudes_mut(), &layout.dims(), &positions);
    Ok(())
}

/// Applies `action` on the factors at `support` (positions into `dims`).
fn apply_action<T: Real>(action: &Action<T>, amps: &mut [Cplx<T>], dims: &[usize], support: &[usize]) {
    match action {
        Action::Dense(m) => apply_dense(m, amps, dims, support),
        Action::NumberBlocks(blocks) => apply_blocks(blocks, amps, dims, support[0], support[1]),
        Action::SigmaX { plus, minus } => {
            // the qubit must be the leading factor of both the support and the layout
            debug_assert_eq!(support[0], 0);
            let half = amps.len() / 2;
            let h = T::FRAC_1_SQRT_2();
            let (g, e) = amps.split_at_mut(half);
            // c₊ = (c_g + c_e)/√2, c₋ = (c_e − c_g)/√2
            let mut p: Vec<Cplx<T>> = g.iter().zip(e.iter()).map(|(a, b)| (a + b) * h).collect();
            let mut m: Vec<Cplx<T>> = g.iter().zip(e.iter()).map(|(a, b)| (b - a) * h).collect();
            let inner_dims = &dims[1..];
            let inner_support: Vec<usize> = support[1..].iter().map(|s| s - 1).collect();
            apply_action(plus, &mut p, inner_dims, &inner_support);
            apply_action(minus, &mut m, inner_dims, &inner_support);
            for i in 0..half {
                g[i] = (p[i] - m[i]) * h;
                e[i] = (p[i] + m[i]) * h;
            }
        }
    }
}

/// Offsets of every index combination over `factors`, row-major.
fn offsets(dims: &[usize], strides: &[usize], factors: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(out.len() * dims[f]);
        for &base in &out {
            for i in 0..dims[f] {
                next.push(base + i * strides[f]);
            }
        }
        out = next;
    }
    out
}

fn rest_offsets(dims: &[usize], strides: &[usize], support: &[usize]) -> Vec<usize> {
    let rest: Vec<usize> = (0..dims.len()).filter(|f| !support.contains(f)).collect();
    offsets(dims, strides, &rest)
}

fn apply_dense<T: Real>(m: &CMatrix<T>, amps: &mut [Cplx<T>], dims: &[usize], support: &[usize]) {
    let st = strides(dims);
    let inner = offsets(dims, &st[..dims.len()], support);
    let outer = rest_offsets(dims, &st[..dims.len()], support);
    let mut x = vec![Complex::zero(); inner.len()];
    let mut y = vec![Complex::zero(); inner.len()];
    for &base in &outer {
        for (xi, &o) in x.iter_mut().zip(&inner) {
            *xi = amps[base + o];
        }
        if x.iter().all(|z| z.is_zero()) {
            continue;
        }
        m.mul_vec_into(&x, &mut y);
        for (&yi, &o) in y.iter().zip(&inner) {
            amps[base + o] = yi;
        }
    }
}

fn apply_blocks<T: Real>(blocks: &[CMatrix<T>], amps: &mut [Cplx<T>], dims: &[usize], fx: usize, fy: usize) {
    let st = strides(dims);
    let (dx, dy) = (dims[fx], dims[fy]);
    let (sx, sy) = (st[fx], st[fy]);
    let outer = rest_offsets(dims, &st[..dims.len()], &[fx, fy]);
    let cap = dx.min(dy);
    let mut x = vec![Complex::zero(); cap];
    let mut y = vec![Complex::zero(); cap];
    let mut nz = Vec::with_capacity(cap);
    for &base in &outer {
        for (k, block) in blocks.iter().enumerate() {
            let range = block_range(dx, dy, k);
            let lo = *range.start();
            let size = block.rows();
            nz.clear();
            for (i, xi) in x[..size].iter_mut().enumerate() {
                let nx = lo + i;
                let z = amps[base + nx * sx + (k - nx) * sy];
                if !z.is_zero() {
                    nz.push(i);
                }
                *xi = z;
            }
            if nz.is_empty() {
                continue;
            }
            if 2 * nz.len() < size {
                // sparse input, common when one register is still empty
                y[..size].fill(Complex::zero());
                for &j in &nz {
                    let xj = x[j];
                    for (i, yi) in y[..size].iter_mut().enumerate() {
                        *yi += block[(i, j)] * xj;
                    }
                }
            } else {
                block.mul_vec_into(&x[..size], &mut y[..size]);
            }
            for (i, &yi) in y[..size].iter().enumerate() {
                let nx = lo + i;
                amps[base + nx * sx + (k - nx) * sy] = yi;
            }
        }
    }
}

/// Heisenberg image `U† x† U` restricted to one-phonon inputs, as the
/// coefficients `(on x†, on y†)` in the given `σx` sector. Used to check the
/// creation-operator transformation rules.
pub fn heisenberg_creation_image<T: Real>(
    gate: &GateOp<T>,
    sector_plus: bool,
    source_is_x: bool,
) -> Result<(Cplx<T>, Cplx<T>)> {
    let blocks = match &gate.action {
        Action::NumberBlocks(b) => b,
        Action::SigmaX { plus, minus } => match (sector_plus, plus.as_ref(), minus.as_ref()) {
            (true, Action::NumberBlocks(b), _) | (false, _, Action::NumberBlocks(b)) => b,
            _ => return Err(Error::InvalidParameter("gate is not a beam splitter".into())),
        },
        Action::Dense(_) => return Err(Error::InvalidParameter("gate is not a beam splitter".into())),
    };
    let (dx, dy) = match gate.support.len() {
        2 => (gate.support_dims[0], gate.support_dims[1]),
        _ => (gate.support_dims[1], gate.support_dims[2]),
    };
    if dx < 2 || dy < 2 {
        return Err(Error::InvalidParameter("one-phonon subspace needs dimension ≥ 2".into()));
    }
    // K = 1 block in basis (|0,1⟩, |1,0⟩); U† = block†.
    let b = blocks[1].adjoint();
    debug_assert_eq!(*block_range(dx, dy, 1).start(), 0);
    // U† x† U |vac⟩ = U† x† |vac⟩ = U† |1,0⟩
    let col = if source_is_x { 1 } else { 0 };
    Ok((b[(1, col)], b[(0, col)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{minus_state, plus_state, Qubit};
    use std::f64::consts::{FRAC_PI_2, PI};

    type C = Cplx<f64>;

    fn layout(n: usize) -> ModeLayout {
        ModeLayout::uniform(n).unwrap()
    }

    fn fock(n: usize, d: usize) -> Vec<C> {
        crate::bosonic::fock_state(n, d).unwrap()
    }

    #[test]
    fn rotation_examples() {
        let l = layout(2);
        let g = PureState::<f64>::ground(l);
        assert_eq!(apply(&rotation(0.0), &g).unwrap(), g);
        let flipped = apply(&rotation(PI), &g).unwrap();
        assert!((flipped.amplitude(Qubit::E, [0, 0, 0]).unwrap().norm() - 1.0).abs() < 1e-15);
        let half = apply(&rotation(FRAC_PI_2), &g).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((half.amplitude(Qubit::G, [0, 0, 0]).unwrap() - cr(h)).norm() < 1e-15);
        assert!((half.amplitude(Qubit::E, [0, 0, 0]).unwrap() - cr(h)).norm() < 1e-15);
    }

    #[test]
    fn blue_sideband_on_ground_vacuum() {
        let l = layout(5);
        let phi: f64 = 1.3;
        let u = sideband(&l, SidebandColor::Blue, phi, Factor::B).unwrap();
        let out = apply(&u, &PureState::ground(l)).unwrap();
        let g0 = out.amplitude(Qubit::G, [0, 0, 0]).unwrap();
        let e1 = out.amplitude(Qubit::E, [0, 1, 0]).unwrap();
        assert!((g0 - cr((phi / 2.0).cos())).norm() < 1e-14);
        assert!((e1 - C::new(0.0, -(phi / 2.0).sin())).norm() < 1e-14);
    }

    #[test]
    fn red_sideband_leaves_ground_vacuum() {
        let l = layout(4);
        let u = sideband(&l, SidebandColor::Red, 2.1, Factor::C).unwrap();
        let g = PureState::<f64>::ground(l);
        let out = apply(&u, &g).unwrap();
        assert!((out.inner(&g).unwrap().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn blue_sideband_one_phonon_ladder_factor() {
        // |g,1⟩ ↔ |e,2⟩ couples with strength √2
        let l = layout(5);
        let phi = 0.9;
        let u = sideband(&l, SidebandColor::Blue, phi, Factor::A).unwrap();
        let s = PureState::<f64>::basis(l, Qubit::G, [1, 0, 0]).unwrap();
        let out = apply(&u, &s).unwrap();
        let eff = phi * 2f64.sqrt();
        assert!((out.amplitude(Qubit::G, [1, 0, 0]).unwrap() - cr((eff / 2.0).cos())).norm() < 1e-13);
        assert!((out.amplitude(Qubit::E, [2, 0, 0]).unwrap() - C::new(0.0, -(eff / 2.0).sin())).norm() < 1e-13);
    }

    #[test]
    fn sideband_rejects_negative_area() {
        assert!(sideband::<f64>(&layout(3), SidebandColor::Blue, -0.1, Factor::A).is_err());
    }

    #[test]
    fn cbs_full_transfer_phases() {
        // U_CBS(π, 0) maps |±⟩|0⟩_A|n⟩_C to (∓i)ⁿ |±⟩|n⟩_A|0⟩_C
        let d = 6;
        let l = layout(d);
        let u = controlled_beam_splitter(&l, PI, 0.0, (Factor::A, Factor::C)).unwrap();
        for n in 0..=4usize {
            for (qubit, base) in [(plus_state::<f64>(), C::new(0.0, -1.0)), (minus_state(), C::new(0.0, 1.0))] {
                let s = PureState::product(l, qubit, &fock(0, d), &fock(0, d), &fock(n, d)).unwrap();
                let expected = PureState::product(l, qubit, &fock(n, d), &fock(0, d), &fock(0, d)).unwrap();
                let out = apply(&u, &s).unwrap();
                let amp = expected.inner(&out).unwrap();
                assert!((amp - base.powu(n as u32)).norm() < 1e-12, "n={n} amp={amp}");
            }
        }
    }

    #[test]
    fn zero_angle_gates_are_identity() {
        let l = layout(4);
        for g in [
            controlled_beam_splitter::<f64>(&l, 0.0, 0.3, (Factor::A, Factor::B)).unwrap(),
            beam_splitter::<f64>(&l, 0.0, 1.0, (Factor::B, Factor::C)).unwrap(),
            spin_displacement::<f64>(&l, C::zero(), Factor::C).unwrap(),
        ] {
            let m = g.to_dense();
            assert!(m.max_abs_diff(&CMatrix::identity(m.rows())) < 1e-15);
        }
    }

    #[test]
    fn cbs_half_angle_on_plus_sector() {
        // in |+⟩ the phonon splits evenly, picking up −i e^{−iψ} on B
        let d = 4;
        let l = layout(d);
        let u = controlled_beam_splitter(&l, FRAC_PI_2, PI, (Factor::A, Factor::B)).unwrap();
        let s = PureState::product(l, plus_state::<f64>(), &fock(1, d), &fock(0, d), &fock(0, d)).unwrap();
        let out = apply(&u, &s).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let on_a = PureState::product(l, plus_state(), &fock(1, d), &fock(0, d), &fock(0, d)).unwrap();
        let on_b = PureState::product(l, plus_state(), &fock(0, d), &fock(1, d), &fock(0, d)).unwrap();
        assert!((on_a.inner(&out).unwrap() - cr(h)).norm() < 1e-13);
        // −i e^{iψ} sin(π/4) with ψ = π
        assert!((on_b.inner(&out).unwrap() - C::new(0.0, h)).norm() < 1e-13);
    }

    #[test]
    fn beam_splitter_full_swap_with_pi_phase() {
        let d = 3;
        let l = layout(d);
        let u = beam_splitter(&l, PI, PI, (Factor::A, Factor::C)).unwrap();
        let s = PureState::product(l, plus_state::<f64>(), &fock(1, d), &fock(0, d), &fock(0, d)).unwrap();
        let t = PureState::product(l, plus_state::<f64>(), &fock(0, d), &fock(0, d), &fock(1, d)).unwrap();
        let out = apply(&u, &s).unwrap();
        assert!((t.inner(&out).unwrap() - C::new(0.0, 1.0)).norm() < 1e-13);
    }

    #[test]
    fn beam_splitter_half_heisenberg_maps_combination_to_b() {
        // U† (b† − i a†) U = √2 b†, so U† sends (|1⟩_B − i|1⟩_A)/√2 to |1⟩_B
        let d = 3;
        let l = layout(d);
        let u = beam_splitter(&l, FRAC_PI_2, 0.0, (Factor::A, Factor::B)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![C::zero(); l.total_dim()];
        amps[l.encode(Qubit::G, [0, 1, 0]).unwrap()] = cr(h);
        amps[l.encode(Qubit::G, [1, 0, 0]).unwrap()] = C::new(0.0, -h);
        let s = PureState::from_amplitudes(l, amps).unwrap();
        let out = apply(&u.adjoint(), &s).unwrap();
        let target = PureState::basis(l, Qubit::G, [0, 1, 0]).unwrap();
        assert!((target.inner(&out).unwrap() - cr(1.0)).norm() < 1e-13);
    }

    #[test]
    fn spin_displacement_sectors() {
        let d = 20;
        let l = ModeLayout::new([1, d, 1]).unwrap();
        let alpha = 0.8;
        let u = spin_displacement(&l, cr(alpha), Factor::B).unwrap();
        for (q, sign) in [(plus_state::<f64>(), 1.0), (minus_state(), -1.0)] {
            let s = PureState::product(l, q, &[cr(1.0)], &fock(0, d), &[cr(1.0)]).unwrap();
            let coh = crate::bosonic::coherent_state(cr(sign * alpha), d).unwrap();
            let expected = PureState::product(l, q, &[cr(1.0)], &coh, &[cr(1.0)]).unwrap();
            let out = apply(&u, &s).unwrap();
            assert!((expected.inner(&out).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_then_adjoint_restores() {
        let l = layout(5);
        let u = controlled_beam_splitter(&l, 1.234, 0.77, (Factor::A, Factor::C)).unwrap();
        let s = PureState::product(
            l,
            [C::new(0.6, 0.1), C::new(0.2, -0.77)],
            &[cr(0.3), C::new(0.1, 0.4), cr(0.5)],
            &[cr(1.0), cr(0.2)],
            &[cr(0.2), C::new(0.0, 0.6), cr(0.1), cr(0.4)],
        )
        .unwrap();
        let back = apply(&u.adjoint(), &apply(&u, &s).unwrap()).unwrap();
        let diff: f64 = back.amplitudes().iter().zip(s.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn apply_rejects_mismatched_layout() {
        let u = beam_splitter::<f64>(&layout(3), 1.0, 0.0, (Factor::A, Factor::B)).unwrap();
        let s = PureState::ground(layout(4));
        assert!(matches!(apply(&u, &s), Err(Error::LayoutMismatch(_))));
    }

    #[test]
    fn gate_dense_forms_are_unitary() {
        let l = ModeLayout::new([4, 3, 5]).unwrap();
        let gates = vec![
            rotation(0.7),
            sideband(&l, SidebandColor::Blue, 2.2, Factor::C).unwrap(),
            sideband(&l, SidebandColor::Red, 0.4, Factor::A).unwrap(),
            controlled_beam_splitter(&l, 2.0, 0.3, (Factor::A, Factor::C)).unwrap(),
            beam_splitter(&l, 1.0, -0.3, (Factor::B, Factor::A)).unwrap(),
        ];
        for g in gates {
            assert!(g.to_dense().unitarity_defect() < 1e-12, "{:?}", g.kind());
            assert_eq!(g.to_dense().rows(), g.support_dim());
        }
    }

    #[test]
    fn envelope_validation_and_area() {
        let e = PulseEnvelope::<f64>::ramped(2.0, 0.1, 0.15);
        assert!(e.validate().is_err());
        let e = PulseEnvelope::<f64>::ramped(2.0, 0.1, 1.0);
        assert!(e.validate().is_ok());
        assert!((e.area() - 2.0 * 0.9).abs() < 1e-15);
        // numeric area by fine midpoint quadrature
        let n = 200_000;
        let dt = 1.0 / n as f64;
        let num: f64 = (0..n).map(|k| e.omega((k as f64 + 0.5) * dt) * dt).sum();
        assert!((num - e.area()).abs() < 1e-8);
    }

    #[test]
    fn constant_pulse_equals_closed_form() {
        let l = layout(4);
        let omega0 = 2.0 * PI * 680.0;
        let env = PulseEnvelope::constant(omega0, FRAC_PI_2 / omega0);
        let pulsed = evolve_pulsed_cbs(&l, &env, 0.4, (Factor::A, Factor::B), 200).unwrap();
        let closed = controlled_beam_splitter(&l, FRAC_PI_2, 0.4, (Factor::A, Factor::B)).unwrap();
        assert!(pulsed.to_dense().max_abs_diff(&closed.to_dense()) < 1e-10);
    }

    #[test]
    fn flat_top_timing_at_680_hz() {
        let omega0 = 2.0 * PI * 680.0;
        let env = PulseEnvelope::constant(omega0, FRAC_PI_2 / omega0);
        assert!((env.total_t * 1e6 - 367.6).abs() < 0.1);
    }
}
