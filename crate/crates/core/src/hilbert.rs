//! Composite Hilbert space `qubit ⊗ A ⊗ B ⊗ C`.
//!
//! Factor order is fixed: qubit first (slowest-varying index), then the
//! motional modes A, B, C. A global index is
//! `((q·N_A + n_A)·N_B + n_B)·N_C + n_C`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{Cplx, Real};

/// Probability mass allowed in the top two Fock levels of any mode.
pub const TAIL_LIMIT: f64 = 1.0e-6;

/// Number of top Fock levels inspected by the tail diagnostic.
pub const TAIL_LEVELS: usize = 2;

/// Weight below which ensemble branches are dropped.
pub const PRUNE_WEIGHT: f64 = 1.0e-14;

/// One tensor factor of the composite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    Qubit,
    A,
    B,
    C,
}

impl Factor {
    pub const ALL: [Factor; 4] = [Factor::Qubit, Factor::A, Factor::B, Factor::C];
    pub const MODES: [Factor; 3] = [Factor::A, Factor::B, Factor::C];

    /// Position in the tensor order.
    pub fn position(self) -> usize {
        match self {
            Factor::Qubit => 0,
            Factor::A => 1,
            Factor::B => 2,
            Factor::C => 3,
        }
    }

    pub fn is_mode(self) -> bool {
        self != Factor::Qubit
    }
}

/// Qubit basis level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Qubit {
    G,
    E,
}

impl Qubit {
    pub fn index(self) -> usize {
        match self {
            Qubit::G => 0,
            Qubit::E => 1,
        }
    }
}

/// Qubit amplitudes `(c_g, c_e)` of `|+⟩ = (|g⟩ + |e⟩)/√2`.
pub fn plus_state<T: Real>() -> [Cplx<T>; 2] {
    let h = T::FRAC_1_SQRT_2();
    [Complex::new(h, T::zero()), Complex::new(h, T::zero())]
}

/// Qubit amplitudes of `|−⟩ = (|e⟩ − |g⟩)/√2`, so that `|g⟩ = (|+⟩ − |−⟩)/√2`.
pub fn minus_state<T: Real>() -> [Cplx<T>; 2] {
    let h = T::FRAC_1_SQRT_2();
    [Complex::new(-h, T::zero()), Complex::new(h, T::zero())]
}

/// Truncation dimensions of the three motional modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModeLayout {
    mode_dims: [usize; 3],
}

impl ModeLayout {
    pub const QUBIT_DIM: usize = 2;
    pub const DEFAULT_TRUNCATION: usize = 20;

    pub fn new(mode_dims: [usize; 3]) -> Result<Self> {
        if mode_dims.contains(&0) {
            return Err(Error::InvalidLayout(format!("mode dimensions must be ≥ 1, got {mode_dims:?}")));
        }
        Ok(Self { mode_dims })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new([n, n, n])
    }

    /// Layout on which the SWAP-test circuit is exact for register states
    /// supported below `register_dim`.
    ///
    /// Mode A receives the content of C and is then mixed with B, so the
    /// two-mode excitation number on (A, B) reaches `2·(register_dim − 1)`.
    /// Sizing A and B to `2·register_dim − 1` keeps every beam-splitter
    /// block complete.
    pub fn for_swap_test(register_dim: usize) -> Result<Self> {
        if register_dim == 0 {
            return Err(Error::InvalidLayout("register dimension must be ≥ 1".into()));
        }
        let wide = 2 * register_dim - 1;
        Self::new([wide, wide, register_dim])
    }

    pub fn mode_dims(&self) -> [usize; 3] {
        self.mode_dims
    }

    /// Dimensions of all four factors in tensor order.
    pub fn dims(&self) -> [usize; 4] {
        let [a, b, c] = self.mode_dims;
        [Self::QUBIT_DIM, a, b, c]
    }

    pub fn dim(&self, factor: Factor) -> usize {
        self.dims()[factor.position()]
    }

    /// Smallest mode dimension. Register states are constructed at this
    /// size so that every mode receives an identically truncated vector.
    pub fn register_dim(&self) -> usize {
        self.mode_dims.iter().copied().min().unwrap_or(1)
    }

    pub fn motional_dim(&self) -> usize {
        self.mode_dims.iter().product()
    }

    pub fn total_dim(&self) -> usize {
        Self::QUBIT_DIM * self.motional_dim()
    }

    /// Index strides of the four factors.
    pub fn strides(&self) -> [usize; 4] {
        strides(&self.dims())
    }

    pub fn encode(&self, q: Qubit, occupations: [usize; 3]) -> Result<usize> {
        for (mode, (&n, &d)) in Factor::MODES.iter().zip(occupations.iter().zip(&self.mode_dims)) {
            if n >= d {
                return Err(Error::OutOfTruncation { mode: *mode, occupation: n, dim: d });
            }
        }
        let [a, b, c] = occupations;
        let [_, na, nb, nc] = self.dims();
        Ok(((q.index() * na + a) * nb + b) * nc + c)
    }

    /// Inverse of [`encode`](Self::encode). Panics if `index` is out of range.
    pub fn decode(&self, index: usize) -> (Qubit, [usize; 3]) {
        assert!(index < self.total_dim(), "index {index} out of range");
        let [_, na, nb, nc] = self.dims();
        let c = index % nc;
        let rest = index / nc;
        let b = rest % nb;
        let rest = rest / nb;
        let a = rest % na;
        let q = if rest / na == 0 { Qubit::G } else { Qubit::E };
        (q, [a, b, c])
    }
}

pub(crate) fn strides(dims: &[usize]) -> [usize; 4] {
    let mut s = [1usize; 4];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Normalized pure state on a [`ModeLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    layout: ModeLayout,
    amplitudes: Vec<Cplx<T>>,
}

impl<T: Real> PureState<T> {
    /// `|q⟩|n_A⟩|n_B⟩|n_C⟩`.
    pub fn basis(layout: ModeLayout, q: Qubit, occupations: [usize; 3]) -> Result<Self> {
        let idx = layout.encode(q, occupations)?;
        let mut amplitudes = vec![Complex::zero(); layout.total_dim()];
        amplitudes[idx] = Complex::new(T::one(), T::zero());
        Ok(Self { layout, amplitudes })
    }

    /// `|g⟩|0,0,0⟩`.
    pub fn ground(layout: ModeLayout) -> Self {
        Self::basis(layout, Qubit::G, [0, 0, 0]).expect("vacuum is always in range")
    }

    /// Normalizes `amplitudes` and wraps them.
    pub fn from_amplitudes(layout: ModeLayout, amplitudes: Vec<Cplx<T>>) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch { left: amplitudes.len(), right: layout.total_dim() });
        }
        let mut s = Self { layout, amplitudes };
        s.renormalize()?;
        Ok(s)
    }

    /// Product state `|qubit⟩ ⊗ |a⟩ ⊗ |b⟩ ⊗ |c⟩`. Mode vectors shorter than
    /// the mode dimension are zero-padded; longer ones must vanish beyond it.
    pub fn product(
        layout: ModeLayout,
        qubit: [Cplx<T>; 2],
        a: &[Cplx<T>],
        b: &[Cplx<T>],
        c: &[Cplx<T>],
    ) -> Result<Self> {
        let a = fit_mode_vector(Factor::A, a, layout.dim(Factor::A))?;
        let b = fit_mode_vector(Factor::B, b, layout.dim(Factor::B))?;
        let c = fit_mode_vector(Factor::C, c, layout.dim(Factor::C))?;
        let mut amplitudes = Vec::with_capacity(layout.total_dim());
        for q in qubit {
            for &x in &a {
                for &y in &b {
                    let qxy = q * x * y;
                    amplitudes.extend(c.iter().map(|&z| qxy * z));
                }
            }
        }
        Self::from_amplitudes(layout, amplitudes)
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Cplx<T>] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Cplx<T>] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Cplx<T>> {
        self.amplitudes
    }

    pub fn amplitude(&self, q: Qubit, occupations: [usize; 3]) -> Result<Cplx<T>> {
        Ok(self.amplitudes[self.layout.encode(q, occupations)?])
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub(crate) fn renormalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n <= T::min_positive_value() {
            return Err(Error::ZeroNorm);
        }
        let inv = T::one() / n;
        for z in &mut self.amplitudes {
            *z *= inv;
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Cplx<T>> {
        inner_product(self, other)
    }

    /// Probability of the qubit being in `|g⟩`.
    pub fn ground_probability(&self) -> T {
        let m = self.layout.motional_dim();
        self.amplitudes[..m].iter().map(|z| z.norm_sqr()).sum()
    }

    /// Occupation distribution of one factor.
    pub fn marginal(&self, factor: Factor) -> Vec<T> {
        let dims = self.layout.dims();
        let stride = self.layout.strides()[factor.position()];
        let d = dims[factor.position()];
        let mut p = vec![T::zero(); d];
        for chunk in self.amplitudes.chunks(stride * d) {
            for (n, level) in chunk.chunks(stride).enumerate() {
                p[n] += level.iter().map(|z| z.norm_sqr()).sum::<T>();
            }
        }
        p
    }

    /// Probability mass in the top [`TAIL_LEVELS`] Fock levels of `mode`.
    pub fn tail_mass(&self, mode: Factor) -> T {
        tail_of(&self.marginal(mode))
    }

    /// Fails if any mode carries more than [`TAIL_LIMIT`] in its top levels.
    pub fn check_tail(&self) -> Result<()> {
        for mode in Factor::MODES {
            let mass = self.tail_mass(mode);
            if mass.as_f64() > TAIL_LIMIT {
                return Err(Error::TruncationTail {
                    context: format!("mode {mode:?}"),
                    mass: mass.as_f64(),
                    limit: TAIL_LIMIT,
                });
            }
        }
        Ok(())
    }
}

fn tail_of<T: Real>(p: &[T]) -> T {
    // A one-level mode has nothing to truncate.
    if p.len() <= TAIL_LEVELS {
        return T::zero();
    }
    p[p.len() - TAIL_LEVELS..].iter().copied().sum()
}

/// Zero-pads (or crops a vanishing tail of) a single-mode vector.
pub(crate) fn fit_mode_vector<T: Real>(mode: Factor, v: &[Cplx<T>], dim: usize) -> Result<Vec<Cplx<T>>> {
    if let Some((n, _)) = v.iter().enumerate().skip(dim).find(|(_, z)| !z.is_zero()) {
        return Err(Error::OutOfTruncation { mode, occupation: n, dim });
    }
    let mut out = v[..v.len().min(dim)].to_vec();
    out.resize(dim, Complex::zero());
    Ok(out)
}

/// `⟨x|y⟩`, conjugating `x`.
pub fn inner_product<T: Real>(x: &PureState<T>, y: &PureState<T>) -> Result<Cplx<T>> {
    if x.layout != y.layout {
        return Err(Error::LayoutMismatch(format!("{:?} vs {:?}", x.layout, y.layout)));
    }
    Ok(x.amplitudes.iter().zip(&y.amplitudes).map(|(a, b)| a.conj() * b).sum())
}

/// Mixed state as a weighted list of pure branches.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble<T> {
    branches: Vec<(T, PureState<T>)>,
}

impl<T: Real> Ensemble<T> {
    pub fn new(branches: Vec<(T, PureState<T>)>) -> Result<Self> {
        let Some((_, first)) = branches.first() else {
            return Err(Error::InvalidEnsemble("no branches".into()));
        };
        let layout = first.layout;
        let mut total = T::zero();
        for (w, s) in &branches {
            if !(*w > T::zero()) {
                return Err(Error::InvalidEnsemble(format!("non-positive weight {w}")));
            }
            if s.layout != layout {
                return Err(Error::LayoutMismatch("ensemble branches on different layouts".into()));
            }
            total += *w;
        }
        if (total - T::one()).abs() > T::tolerance(1e-12) {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Ok(Self { branches })
    }

    /// Drops branches below [`PRUNE_WEIGHT`] and rescales the rest to unit total.
    pub(crate) fn from_unnormalized(branches: Vec<(T, PureState<T>)>) -> Result<Self> {
        let kept: Vec<_> = branches.into_iter().filter(|(w, _)| w.as_f64() > PRUNE_WEIGHT).collect();
        let total: T = kept.iter().map(|(w, _)| *w).sum();
        if kept.is_empty() || total <= T::zero() {
            return Err(Error::InvalidEnsemble("all branch weights vanish".into()));
        }
        Self::new(kept.into_iter().map(|(w, s)| (w / total, s)).collect())
    }

    pub fn pure(state: PureState<T>) -> Self {
        Self { branches: vec![(T::one(), state)] }
    }

    pub fn branches(&self) -> &[(T, PureState<T>)] {
        &self.branches
    }

    pub fn into_branches(self) -> Vec<(T, PureState<T>)> {
        self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn layout(&self) -> &ModeLayout {
        self.branches[0].1.layout()
    }

    pub fn total_weight(&self) -> T {
        self.branches.iter().map(|(w, _)| *w).sum()
    }

    pub fn map_states(&self, mut f: impl FnMut(&PureState<T>) -> Result<PureState<T>>) -> Result<Self> {
        let branches = self
            .branches
            .iter()
            .map(|(w, s)| Ok((*w, f(s)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { branches })
    }

    /// Weighted occupation distribution of one factor.
    pub fn marginal(&self, factor: Factor) -> Vec<T> {
        let mut acc = vec![T::zero(); self.layout().dim(factor)];
        for (w, s) in &self.branches {
            for (a, p) in acc.iter_mut().zip(s.marginal(factor)) {
                *a += *w * p;
            }
        }
        acc
    }

    pub fn check_tail(&self) -> Result<()> {
        for mode in Factor::MODES {
            let mass = tail_of(&self.marginal(mode));
            if mass.as_f64() > TAIL_LIMIT {
                return Err(Error::TruncationTail {
                    context: format!("mode {mode:?}"),
                    mass: mass.as_f64(),
                    limit: TAIL_LIMIT,
                });
            }
        }
        Ok(())
    }
}

impl<T: Real> From<PureState<T>> for Ensemble<T> {
    fn from(s: PureState<T>) -> Self {
        Self::pure(s)
    }
}

/// Reduced density operator on a subset of factors.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDensity<T> {
    subsystem: Vec<Factor>,
    dims: Vec<usize>,
    matrix: CMatrix<T>,
}

impl<T: Real> ReducedDensity<T> {
    /// Wraps a density matrix for a single factor of dimension `matrix.rows()`.
    pub fn single(factor: Factor, matrix: CMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { left: matrix.rows(), right: matrix.cols() });
        }
        Ok(Self { subsystem: vec![factor], dims: vec![matrix.rows()], matrix })
    }

    /// `Σ_k w_k |v_k⟩⟨v_k|` for single-mode vectors `v_k`.
    pub fn from_mode_mixture(factor: Factor, branches: &[(T, Vec<Cplx<T>>)]) -> Result<Self> {
        let dim = branches.first().map(|(_, v)| v.len()).ok_or(Error::InvalidEnsemble("no branches".into()))?;
        let mut m = CMatrix::zeros(dim, dim);
        for (w, v) in branches {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { left: v.len(), right: dim });
            }
            for i in 0..dim {
                for j in 0..dim {
                    m[(i, j)] += v[i] * v[j].conj() * *w;
                }
            }
        }
        Self::single(factor, m)
    }

    pub fn subsystem(&self) -> &[Factor] {
        &self.subsystem
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn trace(&self) -> Cplx<T> {
        self.matrix.trace()
    }

    pub fn purity(&self) -> T {
        overlap_matrices(&self.matrix, &self.matrix)
    }

    /// Embeds a single-factor density into a larger Fock space by zero padding.
    pub fn padded_to(&self, dim: usize) -> Result<Self> {
        if self.subsystem.len() != 1 {
            return Err(Error::InvalidParameter("padding applies to single-factor densities".into()));
        }
        let d = self.dim();
        if dim < d {
            return Err(Error::DimensionMismatch { left: d, right: dim });
        }
        let m = CMatrix::from_fn(dim, dim, |i, j| if i < d && j < d { self.matrix[(i, j)] } else { Complex::zero() });
        Self::single(self.subsystem[0], m)
    }
}

/// Reduced density of `state` on `keep`, `Σ_k w_k Tr_rest |ψ_k⟩⟨ψ_k|`.
pub fn partial_trace<T: Real>(state: &Ensemble<T>, keep: &[Factor]) -> Result<ReducedDensity<T>> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let mut keep: Vec<Factor> = keep.to_vec();
    keep.sort();
    keep.dedup();

    let layout = state.layout();
    let dims = layout.dims();
    let kept_dims: Vec<usize> = keep.iter().map(|f| dims[f.position()]).collect();
    let kept_dim: usize = kept_dims.iter().product();
    let rest_dim = layout.total_dim() / kept_dim;

    // Split every global index into (kept index, discarded index).
    let total = layout.total_dim();
    let mut kept_of = vec![0usize; total];
    let mut rest_of = vec![0usize; total];
    let mut idx = 0;
    for q in 0..dims[0] {
        for a in 0..dims[1] {
            for b in 0..dims[2] {
                for c in 0..dims[3] {
                    let digits = [q, a, b, c];
                    let (mut k, mut r) = (0usize, 0usize);
                    for f in Factor::ALL {
                        let p = f.position();
                        if keep.contains(&f) {
                            k = k * dims[p] + digits[p];
                        } else {
                            r = r * dims[p] + digits[p];
                        }
                    }
                    kept_of[idx] = k;
                    rest_of[idx] = r;
                    idx += 1;
                }
            }
        }
    }

    let mut rho = CMatrix::zeros(kept_dim, kept_dim);
    let mut column = vec![usize::MAX; rest_dim];
    for (w, s) in state.branches() {
        // only discarded configurations that carry amplitude contribute
        column.iter_mut().for_each(|c| *c = usize::MAX);
        let mut used = 0;
        for (idx, z) in s.amplitudes().iter().enumerate() {
            if !z.is_zero() && column[rest_of[idx]] == usize::MAX {
                column[rest_of[idx]] = used;
                used += 1;
            }
        }
        let mut block = vec![Complex::zero(); kept_dim * used];
        for (idx, &z) in s.amplitudes().iter().enumerate() {
            if !z.is_zero() {
                block[kept_of[idx] * used + column[rest_of[idx]]] = z;
            }
        }
        let live: Vec<usize> =
            (0..kept_dim).filter(|&i| block[i * used..(i + 1) * used].iter().any(|z| !z.is_zero())).collect();
        for (n, &i) in live.iter().enumerate() {
            let ri = &block[i * used..(i + 1) * used];
            for &j in &live[..=n] {
                let rj = &block[j * used..(j + 1) * used];
                let v: Cplx<T> = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum::<Cplx<T>>() * *w;
                rho[(i, j)] += v;
                if i != j {
                    rho[(j, i)] += v.conj();
                }
            }
        }
    }
    Ok(ReducedDensity { subsystem: keep, dims: kept_dims, matrix: rho })
}

/// `P_g = ⟨g| Tr_motion ρ |g⟩`.
pub fn qubit_ground_probability<T: Real>(state: &Ensemble<T>) -> T {
    state.branches().iter().map(|(w, s)| *w * s.ground_probability()).sum()
}

/// `Tr(ρ₁ρ₂)`.
pub fn overlap_exact<T: Real>(rho1: &ReducedDensity<T>, rho2: &ReducedDensity<T>) -> Result<T> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch { left: rho1.dim(), right: rho2.dim() });
    }
    Ok(overlap_matrices(&rho1.matrix, &rho2.matrix))
}

fn overlap_matrices<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let n = a.rows();
    let mut acc = Complex::zero();
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    let acc: Cplx<T> = acc;
    acc.re
}
