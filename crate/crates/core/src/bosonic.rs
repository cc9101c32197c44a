//! Single-mode bosonic operators and state constructors on a truncated
//! Fock space `span{|0⟩, …, |dim−1⟩}`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hilbert::{TAIL_LEVELS, TAIL_LIMIT};
use crate::linalg::CMatrix;
use crate::scalar::{cr, ln_factorial, phase, Cplx, Real};

/// Extra Fock levels used when an analytic amplitude sequence is evaluated
/// past the truncation to measure its tail.
const TAIL_LOOKAHEAD: usize = 96;

/// Operator on a single truncated mode, in the Fock basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeOperator<T> {
    matrix: CMatrix<T>,
}

impl<T: Real> ModeOperator<T> {
    pub fn from_matrix(matrix: CMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { left: matrix.rows(), right: matrix.cols() });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn apply(&self, v: &[Cplx<T>]) -> Result<Vec<Cplx<T>>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { left: v.len(), right: self.dim() });
        }
        Ok(self.matrix.mul_vec(v))
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }
}

/// `a`, with `⟨n−1|a|n⟩ = √n`.
pub fn annihilation<T: Real>(dim: usize) -> ModeOperator<T> {
    let matrix = CMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            cr(T::from_usize_lossy(j).sqrt())
        } else {
            Complex::zero()
        }
    });
    ModeOperator { matrix }
}

pub fn creation<T: Real>(dim: usize) -> ModeOperator<T> {
    annihilation(dim).adjoint()
}

pub fn number<T: Real>(dim: usize) -> ModeOperator<T> {
    let matrix =
        CMatrix::from_fn(dim, dim, |i, j| if i == j { cr(T::from_usize_lossy(i)) } else { Complex::zero() });
    ModeOperator { matrix }
}

/// First Fock level counted as "tail" for a mode of dimension `dim`.
pub(crate) fn tail_start(dim: usize) -> usize {
    dim.saturating_sub(TAIL_LEVELS).max(1)
}

fn check_tail_mass<T: Real>(context: impl FnOnce() -> String, mass: T) -> Result<()> {
    if mass.as_f64() > TAIL_LIMIT {
        return Err(Error::TruncationTail { context: context(), mass: mass.as_f64(), limit: TAIL_LIMIT });
    }
    Ok(())
}

/// Untruncated coherent amplitudes `e^{−|α|²/2} αⁿ/√(n!)` for `n < len`.
fn coherent_amplitudes<T: Real>(alpha: Cplx<T>, len: usize) -> Vec<Cplx<T>> {
    let mod_sq = alpha.norm_sqr();
    let (r, theta) = alpha.to_polar();
    (0..len)
        .map(|n| {
            if r.is_zero() {
                return if n == 0 { cr(T::one()) } else { Complex::zero() };
            }
            let nf = T::from_usize_lossy(n);
            let log_mag = -mod_sq / T::lit(2.0) + nf * r.ln() - ln_factorial::<T>(n) / T::lit(2.0);
            phase(nf * theta) * log_mag.exp()
        })
        .collect()
}

fn poisson_tail<T: Real>(mean: T, from: usize) -> T {
    coherent_amplitudes(cr(mean.sqrt()), from + TAIL_LOOKAHEAD)[from..].iter().map(|z| z.norm_sqr()).sum()
}

fn renormalized<T: Real>(mut v: Vec<Cplx<T>>) -> Result<Vec<Cplx<T>>> {
    let n: T = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if n <= T::min_positive_value() {
        return Err(Error::ZeroNorm);
    }
    v.iter_mut().for_each(|z| *z /= n);
    Ok(v)
}

/// `D(α) = exp(α a† − α* a)`.
///
/// Fails if the Poisson mass of `D(α)|0⟩` in the top Fock levels exceeds
/// the tail limit.
pub fn displacement<T: Real>(alpha: Cplx<T>, dim: usize) -> Result<ModeOperator<T>> {
    check_tail_mass(|| format!("displacement |α|²={}", alpha.norm_sqr()), poisson_tail(alpha.norm_sqr(), tail_start(dim)))?;
    Ok(displacement_unchecked(alpha, dim))
}

pub(crate) fn displacement_unchecked<T: Real>(alpha: Cplx<T>, dim: usize) -> ModeOperator<T> {
    let a = annihilation::<T>(dim).into_matrix();
    let ad = a.adjoint();
    let generator = &ad.scale(alpha) - &a.scale(alpha.conj());
    ModeOperator { matrix: generator.expm() }
}

/// Squeezing parameter `ζ` for the state labelled `|r e^{iφ/2}⟩`.
///
/// The label's half-angle is read as the generator phase `ζ = r e^{iφ}`,
/// which makes overlaps `2π`-periodic in `φ`.
pub fn squeeze_parameter<T: Real>(r: T, phi: T) -> Cplx<T> {
    phase(phi) * r
}

/// `S(ζ) = exp[(ζ* a² − ζ a†²)/2]` with `ζ = r e^{iφ}`.
pub fn squeeze<T: Real>(r: T, phi: T, dim: usize) -> Result<ModeOperator<T>> {
    check_tail_mass(|| format!("squeeze r={r}"), squeezed_vacuum_tail(r, tail_start(dim)))?;
    Ok(squeeze_unchecked(squeeze_parameter(r, phi), dim))
}

fn squeeze_unchecked<T: Real>(zeta: Cplx<T>, dim: usize) -> ModeOperator<T> {
    let a = annihilation::<T>(dim).into_matrix();
    let a2 = &a * &a;
    let ad2 = a2.adjoint();
    let half = cr(T::lit(0.5));
    let generator = &a2.scale(zeta.conj() * half) - &ad2.scale(zeta * half);
    ModeOperator { matrix: generator.expm() }
}

/// Mass of the squeezed-vacuum photon distribution at `n ≥ from`.
fn squeezed_vacuum_tail<T: Real>(r: T, from: usize) -> T {
    // P(2m) = tanh^{2m} r · (2m)! / (4^m (m!)²) / cosh r
    let t2 = r.tanh().powi(2);
    let mut tail = T::zero();
    let mut p = T::one() / r.cosh();
    let mut m = 0usize;
    while 2 * m < from + TAIL_LOOKAHEAD {
        if 2 * m >= from {
            tail += p;
        }
        let mf = T::from_usize_lossy(m);
        p = p * t2 * (T::lit(2.0) * mf + T::one()) / (T::lit(2.0) * mf + T::lit(2.0));
        m += 1;
    }
    tail
}

/// Coherent state `|α⟩`, renormalized after truncation.
pub fn coherent_state<T: Real>(alpha: Cplx<T>, dim: usize) -> Result<Vec<Cplx<T>>> {
    check_tail_mass(|| format!("coherent state |α|²={}", alpha.norm_sqr()), poisson_tail(alpha.norm_sqr(), tail_start(dim)))?;
    renormalized(coherent_amplitudes(alpha, dim))
}

/// Exact cat normalization `𝒩 = 2(1 + cos φ · e^{−2|α|²})`.
pub fn cat_normalization<T: Real>(alpha: Cplx<T>, phi_cat: T) -> T {
    T::lit(2.0) * (T::one() + phi_cat.cos() * (-T::lit(2.0) * alpha.norm_sqr()).exp())
}

/// `(|α⟩ + e^{iφ}|−α⟩)/√𝒩`, renormalized after truncation.
pub fn cat_state<T: Real>(alpha: Cplx<T>, phi_cat: T, dim: usize) -> Result<Vec<Cplx<T>>> {
    let norm = cat_normalization(alpha, phi_cat);
    if norm.as_f64() < 1e-12 {
        return Err(Error::DegenerateCat(norm.as_f64()));
    }
    let len = dim + TAIL_LOOKAHEAD;
    let plus = coherent_amplitudes(alpha, len);
    let minus = coherent_amplitudes(-alpha, len);
    let rel = phase(phi_cat);
    let scale = T::one() / norm.sqrt();
    let full: Vec<Cplx<T>> = plus.iter().zip(&minus).map(|(&p, &m)| (p + rel * m) * scale).collect();
    let tail: T = full[tail_start(dim)..].iter().map(|z| z.norm_sqr()).sum();
    check_tail_mass(|| format!("cat state |α|²={}", alpha.norm_sqr()), tail)?;
    renormalized(full[..dim].to_vec())
}

/// Squeezed vacuum `S(r e^{iφ})|0⟩`, truncated to `dim` and renormalized.
///
/// `a²` and `a†²` preserve parity, so the generator is exponentiated on
/// the even levels only, over a range wide enough that the kept amplitudes
/// are free of truncation artifacts from the generator.
pub fn squeezed_vacuum<T: Real>(r: T, phi: T, dim: usize) -> Result<Vec<Cplx<T>>> {
    let evens = dim + 8;
    let zeta = squeeze_parameter(r, phi);
    let half = cr(T::lit(0.5));
    // ⟨2m−2| a² |2m⟩ = √(2m(2m−1))
    let generator = CMatrix::from_fn(evens, evens, |i, j| {
        let lowered = |m: usize| T::from_usize_lossy(2 * m * (2 * m - 1)).sqrt();
        if j == i + 1 {
            zeta.conj() * half * lowered(j)
        } else if i == j + 1 {
            -zeta * half * lowered(i)
        } else {
            Complex::zero()
        }
    });
    let s = generator.expm();
    let mut full = vec![Complex::zero(); 2 * evens];
    for m in 0..evens {
        full[2 * m] = s[(m, 0)];
    }
    let tail: T = full[tail_start(dim)..].iter().map(|z| z.norm_sqr()).sum();
    check_tail_mass(|| format!("squeezed vacuum r={r}"), tail)?;
    renormalized(full[..dim].to_vec())
}

pub fn fock_state<T: Real>(n: usize, dim: usize) -> Result<Vec<Cplx<T>>> {
    if n >= dim {
        return Err(Error::InvalidParameter(format!("Fock level {n} outside dimension {dim}")));
    }
    let mut v = vec![Complex::zero(); dim];
    v[n] = cr(T::one());
    Ok(v)
}

/// `(|0⟩ − e^{iφ}|1⟩)/√2`.
pub fn superposition01<T: Real>(phi: T, dim: usize) -> Result<Vec<Cplx<T>>> {
    if dim < 2 {
        return Err(Error::InvalidParameter("superposition needs dimension ≥ 2".into()));
    }
    let h = T::FRAC_1_SQRT_2();
    let mut v = vec![Complex::zero(); dim];
    v[0] = cr(h);
    v[1] = -phase(phi) * h;
    Ok(v)
}

/// Mean occupation `⟨n⟩` of a single-mode vector.
pub fn mean_occupation<T: Real>(v: &[Cplx<T>]) -> T {
    v.iter().enumerate().map(|(n, z)| T::from_usize_lossy(n) * z.norm_sqr()).sum()
}
