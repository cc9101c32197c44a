//! Reference values for overlaps and purities.
//!
//! Nothing here calls the simulator. Closed forms are evaluated directly
//! and brute-force values sum Fock amplitudes generated by their own
//! recurrences, always in `f64`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::TAIL_LIMIT;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMethod {
    ClosedForm,
    FockSum,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub method: OracleMethod,
    pub truncation_used: Option<usize>,
}

impl OracleResult {
    fn closed(value: f64) -> Self {
        Self { value, method: OracleMethod::ClosedForm, truncation_used: None }
    }

    fn summed(value: f64, truncation: usize) -> Self {
        Self { value, method: OracleMethod::FockSum, truncation_used: Some(truncation) }
    }
}

/// Default truncation for brute-force sums.
pub const ORACLE_TRUNCATION: usize = 160;

/// `δ_mn`.
pub fn fock_overlap(m: usize, n: usize) -> OracleResult {
    OracleResult::closed(if m == n { 1.0 } else { 0.0 })
}

/// `|⟨Ψ|Φ⟩|²` for `(|0⟩+|1⟩)/√2` against `(|0⟩ − e^{iφ}|1⟩)/√2`, i.e. `sin²(φ/2)`.
pub fn superposition01_overlap(phi01: f64) -> OracleResult {
    OracleResult::closed((phi01 / 2.0).sin().powi(2))
}

/// `exp(−|α − β|²)`.
pub fn coherent_overlap(alpha: Complex64, beta: Complex64) -> OracleResult {
    OracleResult::closed((-(alpha - beta).norm_sqr()).exp())
}

/// Coherent-state amplitudes `e^{−|α|²/2} αⁿ/√n!` by forward recurrence.
fn coherent_amplitudes(alpha: Complex64, len: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(len);
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..len {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        out.push(c);
    }
    out
}

/// Squeezed-vacuum amplitudes for `ζ = r e^{iφ}` and `S(ζ) = exp[(ζ*a² − ζa†²)/2]`:
/// `c_{2n} = (−e^{iφ} tanh r)ⁿ √((2n)!) / (2ⁿ n! √cosh r)`.
fn squeezed_amplitudes(r: f64, phi: f64, len: usize) -> Vec<Complex64> {
    let t = -Complex64::from_polar(r.tanh(), phi);
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    let mut c = Complex64::new(1.0 / r.cosh().sqrt(), 0.0);
    let mut n = 0usize;
    while 2 * n < len {
        if n > 0 {
            // c_{2n} / c_{2n−2} = t √((2n)(2n−1)) / (2n)
            let k = (2 * n) as f64;
            c = c * t * (k * (k - 1.0)).sqrt() / k;
        }
        out[2 * n] = c;
        n += 1;
    }
    out
}

/// `|⟨x|y⟩|²`.
fn overlap_sq(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr()
}

/// Mass missing from the first `len − 2` levels of a normalized distribution.
fn check_truncation(context: &str, v: &[Complex64]) -> Result<()> {
    let kept: f64 = v[..v.len().saturating_sub(2)].iter().map(|z| z.norm_sqr()).sum();
    let missing = 1.0 - kept;
    if missing > TAIL_LIMIT {
        return Err(Error::TruncationTail { context: context.into(), mass: missing, limit: TAIL_LIMIT });
    }
    Ok(())
}

/// Brute-force `|⟨α|β⟩|²` over `truncation` Fock levels.
pub fn coherent_overlap_fock_sum(alpha: Complex64, beta: Complex64, truncation: usize) -> Result<OracleResult> {
    let a = coherent_amplitudes(alpha, truncation);
    let b = coherent_amplitudes(beta, truncation);
    check_truncation("coherent oracle", &a)?;
    check_truncation("coherent oracle", &b)?;
    Ok(OracleResult::summed(overlap_sq(&a, &b), truncation))
}

/// Overlap of squeezed vacua `|r⟩` and `|r e^{iΔφ/2}⟩` (generator phases 0
/// and `Δφ`) by Fock sum.
pub fn squeezed_overlap(r: f64, dphi: f64, truncation: usize) -> Result<OracleResult> {
    squeezed_overlap_general(r, 0.0, r, dphi, truncation)
}

pub fn squeezed_overlap_general(r1: f64, phi1: f64, r2: f64, phi2: f64, truncation: usize) -> Result<OracleResult> {
    if r1 < 0.0 || r2 < 0.0 {
        return Err(Error::InvalidParameter("squeeze magnitude must be ≥ 0".into()));
    }
    let a = squeezed_amplitudes(r1, phi1, truncation);
    let b = squeezed_amplitudes(r2, phi2, truncation);
    check_truncation("squeezed oracle", &a)?;
    check_truncation("squeezed oracle", &b)?;
    Ok(OracleResult::summed(overlap_sq(&a, &b), truncation))
}

/// Overlap of the normalized cats `|α⟩+|−α⟩` and `|α⟩+e^{iφ}|−α⟩` scaled by
/// `γ`: `γ(1+cos φ)(1+e^{−2|α|²}) / [2(1 + cos φ e^{−2|α|²})]`.
pub fn cat_overlap(alpha_sq: f64, phi_cat: f64, gamma: f64) -> Result<OracleResult> {
    if alpha_sq < 0.0 {
        return Err(Error::InvalidParameter(format!("|α|² = {alpha_sq} is negative")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter(format!("γ = {gamma} outside (0, 1]")));
    }
    let e = (-2.0 * alpha_sq).exp();
    let c = phi_cat.cos();
    let den = 2.0 * (1.0 + c * e);
    // φ = π with α → 0 makes the odd cat degenerate; the overlap limit is 0
    let value = if den.abs() < 1e-300 { 0.0 } else { gamma * (1.0 + c) * (1.0 + e) / den };
    Ok(OracleResult::closed(value))
}

fn cat_amplitudes(alpha: f64, phi_cat: f64, len: usize) -> Result<Vec<Complex64>> {
    let plus = coherent_amplitudes(Complex64::new(alpha, 0.0), len);
    let minus = coherent_amplitudes(Complex64::new(-alpha, 0.0), len);
    let ph = Complex64::from_polar(1.0, phi_cat);
    let v: Vec<Complex64> = plus.iter().zip(&minus).map(|(a, b)| a + ph * b).collect();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-6 {
        return Err(Error::DegenerateCat(norm * norm));
    }
    Ok(v.into_iter().map(|z| z / norm).collect())
}

/// Brute-force version of [`cat_overlap`] with `γ = 1`.
pub fn cat_overlap_fock_sum(alpha_sq: f64, phi_cat: f64, truncation: usize) -> Result<OracleResult> {
    let alpha = alpha_sq.sqrt();
    let a = cat_amplitudes(alpha, 0.0, truncation)?;
    let b = cat_amplitudes(alpha, phi_cat, truncation)?;
    check_truncation("cat oracle", &coherent_amplitudes(Complex64::new(alpha, 0.0), truncation))?;
    Ok(OracleResult::summed(overlap_sq(&a, &b), truncation))
}

/// `γ₀₀cos⁴(φ₁/2) + γ₁₁sin⁴(φ₁/2)`.
pub fn purity_rho1(phi1: f64, gamma00: f64, gamma11: f64) -> OracleResult {
    let (s, c) = (phi1 / 2.0).sin_cos();
    OracleResult::closed(gamma00 * c.powi(4) + gamma11 * s.powi(4))
}

/// `γ_α(sin⁴(φ₂/2+π/4) + cos⁴(φ₂/2+π/4))`, treating `|±α⟩` as orthogonal.
pub fn purity_rho2(phi2: f64, gamma_alpha: f64) -> OracleResult {
    let (s, c) = (phi2 / 2.0 + std::f64::consts::FRAC_PI_4).sin_cos();
    OracleResult::closed(gamma_alpha * (s.powi(4) + c.powi(4)))
}

/// `Tr(ρ₂²) = s⁴ + c⁴ + 2s²c² e^{−4|α|²}` including the overlap of `|±α⟩`.
pub fn purity_rho2_exact(phi2: f64, alpha_sq: f64) -> OracleResult {
    let (s, c) = (phi2 / 2.0 + std::f64::consts::FRAC_PI_4).sin_cos();
    let (s2, c2) = (s * s, c * c);
    OracleResult::closed(s2 * s2 + c2 * c2 + 2.0 * s2 * c2 * (-4.0 * alpha_sq).exp())
}

/// `Tr(ρ₂²)` from the Fock-basis density matrix.
pub fn purity_rho2_fock_sum(phi2: f64, alpha_sq: f64, truncation: usize) -> Result<OracleResult> {
    let alpha = alpha_sq.sqrt();
    let (s, c) = (phi2 / 2.0 + std::f64::consts::FRAC_PI_4).sin_cos();
    let plus = coherent_amplitudes(Complex64::new(alpha, 0.0), truncation);
    let minus = coherent_amplitudes(Complex64::new(-alpha, 0.0), truncation);
    check_truncation("ρ₂ oracle", &plus)?;
    let branches = [(s * s, plus), (c * c, minus)];
    Ok(OracleResult::summed(mixture_overlap(&branches, &branches), truncation))
}

/// `Tr(ρσ)` for `ρ = Σ wᵢ|xᵢ⟩⟨xᵢ|`, `σ = Σ vⱼ|yⱼ⟩⟨yⱼ|`.
pub fn mixture_overlap(rho: &[(f64, Vec<Complex64>)], sigma: &[(f64, Vec<Complex64>)]) -> f64 {
    rho.iter()
        .flat_map(|(w, x)| sigma.iter().map(move |(v, y)| w * v * overlap_sq(x, y)))
        .sum()
}
