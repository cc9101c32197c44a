//! Nonlinear least squares for the calibration and overlap models.
//!
//! Levenberg–Marquardt on unconstrained internal coordinates; bounded
//! parameters are mapped through `exp` or a logistic. Jacobians are analytic
//! and [`jacobian_check`] compares them with central differences.

use std::fmt;
use std::str::FromStr;

use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::scalar::Real;

pub const DEFAULT_MAX_ITERATIONS: usize = 200;
const INITIAL_DAMPING: f64 = 1e-3;
const DAMPING_FACTOR: f64 = 10.0;
const COST_TOL: f64 = 1e-10;
const GRADIENT_TOL: f64 = 1e-10;
/// Largest failed-replica fraction tolerated by [`bootstrap_errors`].
pub const MAX_BOOTSTRAP_FAILURE_RATE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FitModelKind {
    /// `P₀ sin²(x Ω₀)`.
    SineSquared,
    /// `A sin(x + phase) + offset`.
    Sinusoid,
    /// `A exp(−(x − c)²/(2w²))`.
    Gaussian,
    /// `γ(1+cos x)(1+e^{−2|α|²}) / [2(1 + cos x e^{−2|α|²})]`.
    CatEq2,
}

impl FitModelKind {
    pub const ALL: [FitModelKind; 4] = [Self::SineSquared, Self::Sinusoid, Self::Gaussian, Self::CatEq2];

    pub fn name(self) -> &'static str {
        match self {
            Self::SineSquared => "sine-squared",
            Self::Sinusoid => "sinusoid",
            Self::Gaussian => "gaussian",
            Self::CatEq2 => "cat-eq2",
        }
    }

    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            Self::SineSquared => &["p0", "omega0"],
            Self::Sinusoid => &["amplitude", "phase", "offset"],
            Self::Gaussian => &["amplitude", "center", "width"],
            Self::CatEq2 => &["gamma_cat", "alpha_sq"],
        }
    }

    pub fn parameter_count(self) -> usize {
        self.parameter_names().len()
    }

    pub fn default_bounds(self) -> Vec<Bound> {
        match self {
            Self::SineSquared => vec![Bound::Free, Bound::Positive],
            Self::Sinusoid => vec![Bound::Free, Bound::Free, Bound::Free],
            Self::Gaussian => vec![Bound::NonNegative, Bound::Free, Bound::Positive],
            Self::CatEq2 => vec![Bound::UnitInterval, Bound::Positive],
        }
    }

    /// Model value and its gradient with respect to the parameters.
    pub fn eval<T: Real>(self, x: T, p: &[T], grad: &mut [T]) -> T {
        let two = T::lit(2.0);
        match self {
            Self::SineSquared => {
                let (s, c) = (x * p[1]).sin_cos();
                grad[0] = s * s;
                grad[1] = p[0] * two * s * c * x;
                p[0] * s * s
            }
            Self::Sinusoid => {
                let (s, c) = (x + p[1]).sin_cos();
                grad[0] = s;
                grad[1] = p[0] * c;
                grad[2] = T::one();
                p[0] * s + p[2]
            }
            Self::Gaussian => {
                let (a, c, w) = (p[0], p[1], p[2]);
                let d = x - c;
                let e = (-(d * d) / (two * w * w)).exp();
                grad[0] = e;
                grad[1] = a * e * d / (w * w);
                grad[2] = a * e * d * d / (w * w * w);
                a * e
            }
            Self::CatEq2 => {
                let (g, a2) = (p[0], p[1]);
                let e = (-two * a2).exp();
                let c = x.cos();
                let den = T::one() + c * e;
                let base = (T::one() + c) * (T::one() + e) / (two * den);
                grad[0] = base;
                grad[1] = -g * (T::one() - c * c) * e / (den * den);
                g * base
            }
        }
    }
}

impl fmt::Display for FitModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FitModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown fit model '{s}'")))
    }
}

/// Parameter domain, enforced by a transform of an unconstrained coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Free,
    /// `p = eᵘ`.
    Positive,
    /// `p = u²`.
    NonNegative,
    /// `p = 1/(1 + e⁻ᵘ)`.
    UnitInterval,
}

impl Bound {
    fn to_external<T: Real>(self, u: T) -> (T, T) {
        match self {
            Self::Free => (u, T::one()),
            Self::Positive => {
                let p = u.exp();
                (p, p)
            }
            Self::NonNegative => (u * u, T::lit(2.0) * u),
            Self::UnitInterval => {
                let p = T::one() / (T::one() + (-u).exp());
                (p, p * (T::one() - p))
            }
        }
    }

    fn to_internal<T: Real>(self, p: T) -> Result<T> {
        let bad = || Err(Error::InvalidParameter(format!("initial value {p} outside bound {self:?}")));
        match self {
            Self::Free => Ok(p),
            Self::Positive if p > T::zero() => Ok(p.ln()),
            Self::NonNegative if p >= T::zero() => Ok(p.sqrt()),
            Self::UnitInterval if p > T::zero() && p < T::one() => Ok((p / (T::one() - p)).ln()),
            _ => bad(),
        }
    }

    fn contains<T: Real>(self, p: T) -> bool {
        match self {
            Self::Free => true,
            Self::Positive => p > T::zero(),
            Self::NonNegative => p >= T::zero(),
            Self::UnitInterval => p > T::zero() && p < T::one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitModel<T> {
    pub kind: FitModelKind,
    /// Starting point; derived from the data when `None`.
    pub initial: Option<Vec<T>>,
    pub bounds: Vec<Bound>,
    pub max_iterations: usize,
}

impl<T: Real> FitModel<T> {
    pub fn new(kind: FitModelKind) -> Self {
        Self { kind, initial: None, bounds: kind.default_bounds(), max_iterations: DEFAULT_MAX_ITERATIONS }
    }

    pub fn with_initial(mut self, initial: Vec<T>) -> Self {
        self.initial = Some(initial);
        self
    }

    pub fn with_bounds(mut self, bounds: Vec<Bound>) -> Self {
        self.bounds = bounds;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult<T> {
    pub kind: FitModelKind,
    pub parameters: Vec<T>,
    /// Standard errors from the covariance; `None` for degenerate parameters.
    pub std_errors: Vec<Option<T>>,
    /// `‖r‖₂` of the (weighted) residuals.
    pub residual_norm: T,
    pub converged: bool,
    pub iterations: usize,
    /// Names of parameters the data cannot determine.
    pub degenerate: Vec<&'static str>,
}

impl<T: Real> FitResult<T> {
    pub fn get(&self, name: &str) -> Option<T> {
        let i = self.kind.parameter_names().iter().position(|n| *n == name)?;
        Some(self.parameters[i])
    }

    pub fn std_error(&self, name: &str) -> Option<T> {
        let i = self.kind.parameter_names().iter().position(|n| *n == name)?;
        self.std_errors[i]
    }
}

/// Largest relative deviation of the analytic gradient from central
/// differences with relative step `rel_step`. Components below 1e-5 are
/// compared absolutely, since the difference quotient itself carries
/// roundoff of order `ε f / h` there.
pub fn jacobian_check<T: Real>(kind: FitModelKind, x: T, params: &[T], rel_step: T) -> T {
    let n = kind.parameter_count();
    let mut grad = vec![T::zero(); n];
    kind.eval(x, params, &mut grad);
    let mut scratch = vec![T::zero(); n];
    let mut worst = T::zero();
    for j in 0..n {
        let h = rel_step * params[j].abs().max(T::one());
        let mut p = params.to_vec();
        p[j] = params[j] + h;
        let up = kind.eval(x, &p, &mut scratch);
        p[j] = params[j] - h;
        let down = kind.eval(x, &p, &mut scratch);
        let fd = (up - down) / (T::lit(2.0) * h);
        let scale = grad[j].abs().max(fd.abs()).max(T::lit(1e-5));
        worst = worst.max((grad[j] - fd).abs() / scale);
    }
    worst
}

fn validate_data<T: Real>(kind: FitModelKind, xs: &[T], ys: &[T], sigmas: Option<&[T]>) -> Result<()> {
    let k = kind.parameter_count();
    if xs.len() != ys.len() {
        return Err(Error::InvalidData(format!("{} x values but {} y values", xs.len(), ys.len())));
    }
    if xs.len() < 2 * k {
        return Err(Error::InvalidData(format!("{} points; {} needs at least {}", xs.len(), kind, 2 * k)));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("non-finite value".into()));
    }
    if let Some(s) = sigmas {
        if s.len() != xs.len() {
            return Err(Error::InvalidData(format!("{} sigmas for {} points", s.len(), xs.len())));
        }
        if s.iter().any(|v| !(v.is_finite() && *v > T::zero())) {
            return Err(Error::InvalidData("sigmas must be finite and > 0".into()));
        }
    }
    Ok(())
}

fn argmax<T: Real>(v: &[T]) -> usize {
    (0..v.len()).fold(0, |best, i| if v[i] > v[best] { i } else { best })
}

/// Best scale `a` for `y ≈ a·f` and the resulting squared error.
fn linear_scale<T: Real>(f: &[T], ys: &[T]) -> (T, T) {
    let ff: T = f.iter().map(|v| *v * *v).sum();
    if ff <= T::zero() {
        return (T::zero(), ys.iter().map(|y| *y * *y).sum());
    }
    let a = f.iter().zip(ys).map(|(u, v)| *u * *v).sum::<T>() / ff;
    let err = f.iter().zip(ys).map(|(u, v)| (a * *u - *v).powi(2)).sum();
    (a, err)
}

/// Data-driven starting point for `kind`.
pub fn initial_guess<T: Real>(kind: FitModelKind, xs: &[T], ys: &[T]) -> Vec<T> {
    let lo = xs.iter().copied().fold(T::infinity(), T::min);
    let hi = xs.iter().copied().fold(T::neg_infinity(), T::max);
    let span = (hi - lo).max(T::epsilon());
    let xmax = xs.iter().map(|x| x.abs()).fold(T::zero(), T::max).max(T::epsilon());
    match kind {
        FitModelKind::SineSquared => {
            // Scan Ω from a quarter period to the sampling limit over the largest |x|.
            let n = xs.len().max(2);
            let w_lo = T::PI() / (T::lit(4.0) * xmax);
            let w_hi = T::PI() * T::from_usize_lossy(n) / (T::lit(2.0) * span);
            let steps = 4000;
            let mut best = (T::infinity(), T::one(), w_lo);
            let mut f = vec![T::zero(); xs.len()];
            for k in 0..=steps {
                let t = T::from_usize_lossy(k) / T::from_usize_lossy(steps);
                let w = w_lo * (w_hi / w_lo).powf(t);
                for (fi, x) in f.iter_mut().zip(xs) {
                    *fi = (*x * w).sin().powi(2);
                }
                let (a, err) = linear_scale(&f, ys);
                if err < best.0 {
                    best = (err, a, w);
                }
            }
            vec![best.1, best.2]
        }
        FitModelKind::Sinusoid => {
            // y = a sin x + b cos x + c by normal equations
            let rows: Vec<[T; 3]> = xs.iter().map(|x| [x.sin(), x.cos(), T::one()]).collect();
            let mut m = vec![T::zero(); 9];
            let mut v = vec![T::zero(); 3];
            for (r, y) in rows.iter().zip(ys) {
                for i in 0..3 {
                    v[i] += r[i] * *y;
                    for j in 0..3 {
                        m[i * 3 + j] += r[i] * r[j];
                    }
                }
            }
            match solve_spd(&m, &v, 3) {
                Some(s) => vec![(s[0] * s[0] + s[1] * s[1]).sqrt(), s[1].atan2(s[0]), s[2]],
                None => vec![T::zero(), T::zero(), ys.iter().copied().sum::<T>() / T::from_usize_lossy(ys.len())],
            }
        }
        FitModelKind::Gaussian => {
            let i = argmax(ys);
            let a = ys[i].max(T::zero());
            let half = a / T::lit(2.0);
            let above: Vec<T> = xs.iter().zip(ys).filter(|(_, y)| **y >= half).map(|(x, _)| *x).collect();
            let lo_x = above.iter().copied().fold(T::infinity(), T::min);
            let hi_x = above.iter().copied().fold(T::neg_infinity(), T::max);
            let mut w = (hi_x - lo_x) / T::lit(2.3548);
            if !(a > T::zero() && w > T::zero() && w.is_finite()) {
                w = span / T::lit(4.0);
            }
            vec![a, xs[i], w]
        }
        FitModelKind::CatEq2 => {
            let mut best = (T::infinity(), T::lit(0.5), T::one());
            let mut f = vec![T::zero(); xs.len()];
            let mut scratch = [T::zero(); 2];
            for k in 1..=600 {
                let a2 = T::from_usize_lossy(k) * T::lit(0.01);
                for (fi, x) in f.iter_mut().zip(xs) {
                    *fi = kind.eval(*x, &[T::one(), a2], &mut scratch);
                }
                let (g, err) = linear_scale(&f, ys);
                if err < best.0 {
                    best = (err, g, a2);
                }
            }
            let g = best.1.max(T::lit(1e-3)).min(T::one() - T::lit(1e-3));
            vec![g, best.2]
        }
    }
}

/// Cholesky solve of the `n × n` symmetric positive-definite system `m x = b`.
fn solve_spd<T: Real>(m: &[T], b: &[T], n: usize) -> Option<Vec<T>> {
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > T::zero()) {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Some(x)
}

struct Problem<'a, T> {
    kind: FitModelKind,
    bounds: &'a [Bound],
    xs: &'a [T],
    ys: &'a [T],
    weights: Vec<T>,
}

impl<T: Real> Problem<'_, T> {
    fn external(&self, u: &[T]) -> (Vec<T>, Vec<T>) {
        u.iter().zip(self.bounds).map(|(&ui, b)| b.to_external(ui)).unzip()
    }

    /// Weighted residuals, and optionally the Jacobian in external parameters.
    fn residuals(&self, p: &[T], jac: Option<&mut Vec<T>>) -> Vec<T> {
        let k = p.len();
        let mut grad = vec![T::zero(); k];
        let mut r = Vec::with_capacity(self.xs.len());
        let mut rows = Vec::new();
        for ((x, y), w) in self.xs.iter().zip(self.ys).zip(&self.weights) {
            let f = self.kind.eval(*x, p, &mut grad);
            r.push((f - *y) * *w);
            rows.extend(grad.iter().map(|g| *g * *w));
        }
        if let Some(j) = jac {
            *j = rows;
        }
        r
    }
}

fn half_sum_sq<T: Real>(r: &[T]) -> T {
    r.iter().map(|v| *v * *v).sum::<T>() / T::lit(2.0)
}

/// Least-squares fit of `model` to `(xs, ys)`, weighting by `1/σ` if given.
pub fn fit<T: Real>(model: &FitModel<T>, xs: &[T], ys: &[T], sigmas: Option<&[T]>) -> Result<FitResult<T>> {
    let kind = model.kind;
    let k = kind.parameter_count();
    validate_data(kind, xs, ys, sigmas)?;
    if model.bounds.len() != k {
        return Err(Error::InvalidParameter(format!("{} bounds for {} parameters", model.bounds.len(), k)));
    }
    let start = match &model.initial {
        Some(p) if p.len() == k => p.clone(),
        Some(p) => return Err(Error::InvalidParameter(format!("{} initial values for {} parameters", p.len(), k))),
        None => initial_guess(kind, xs, ys),
    };
    let start: Vec<T> = start
        .into_iter()
        .zip(&model.bounds)
        .map(|(p, b)| match b {
            // Nudge data-derived guesses that sit on an open boundary.
            Bound::UnitInterval if !b.contains(p) => p.max(T::lit(1e-6)).min(T::one() - T::lit(1e-6)),
            Bound::Positive if !b.contains(p) => T::lit(1e-6),
            _ => p,
        })
        .collect();
    let problem = Problem {
        kind,
        bounds: &model.bounds,
        xs,
        ys,
        weights: match sigmas {
            Some(s) => s.iter().map(|v| T::one() / *v).collect(),
            None => vec![T::one(); xs.len()],
        },
    };
    let mut u: Vec<T> = start.iter().zip(&model.bounds).map(|(p, b)| b.to_internal(*p)).collect::<Result<_>>()?;

    let mut lambda = T::lit(INITIAL_DAMPING);
    let (mut p, mut dpdu) = problem.external(&u);
    let mut jac = Vec::new();
    let mut r = problem.residuals(&p, Some(&mut jac));
    let mut cost = half_sum_sq(&r);
    let scale_floor = T::lit(1e-300);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < model.max_iterations {
        iterations += 1;
        // internal Jacobian and normal equations
        let mut jtj = vec![T::zero(); k * k];
        let mut g = vec![T::zero(); k];
        for (row, ri) in jac.chunks(k).zip(&r) {
            for a in 0..k {
                let ja = row[a] * dpdu[a];
                g[a] += ja * *ri;
                for b in 0..k {
                    jtj[a * k + b] += ja * row[b] * dpdu[b];
                }
            }
        }
        let gnorm = g.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if gnorm < T::lit(GRADIENT_TOL) || cost <= T::epsilon() * T::epsilon() {
            converged = true;
            break;
        }
        let mut accepted = false;
        while !accepted {
            let mut a = jtj.clone();
            for i in 0..k {
                a[i * k + i] += lambda * jtj[i * k + i].max(scale_floor) + lambda * T::epsilon();
            }
            let rhs: Vec<T> = g.iter().map(|v| -*v).collect();
            let Some(step) = solve_spd(&a, &rhs, k) else {
                lambda *= T::lit(DAMPING_FACTOR);
                if lambda > T::lit(1e30) {
                    return Err(Error::SingularJacobian(format!("{kind}: damped normal equations not positive definite")));
                }
                continue;
            };
            let trial: Vec<T> = u.iter().zip(&step).map(|(a, b)| *a + *b).collect();
            let (tp, tdp) = problem.external(&trial);
            let mut tj = Vec::new();
            let tr = problem.residuals(&tp, Some(&mut tj));
            let tcost = half_sum_sq(&tr);
            let step_norm = step.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            let u_norm = u.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            if tcost.is_finite() && tcost <= cost {
                let rel = (cost - tcost) / cost.max(T::min_positive_value());
                u = trial;
                p = tp;
                dpdu = tdp;
                r = tr;
                jac = tj;
                cost = tcost;
                lambda = (lambda / T::lit(DAMPING_FACTOR)).max(T::lit(1e-12));
                accepted = true;
                if rel < T::lit(COST_TOL) {
                    converged = true;
                }
            } else {
                lambda *= T::lit(DAMPING_FACTOR);
            }
            // No representable descent step remains: the point is a minimum.
            if !accepted && step_norm <= T::epsilon() * (u_norm + T::one()) {
                converged = true;
                break;
            }
        }
        if converged {
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { iterations });
    }
    finish(kind, p, &jac, &r, sigmas.is_some(), iterations)
}

/// Degeneracy flags and covariance-based standard errors at the optimum.
fn finish<T: Real>(
    kind: FitModelKind,
    p: Vec<T>,
    jac: &[T],
    r: &[T],
    absolute_sigma: bool,
    iterations: usize,
) -> Result<FitResult<T>> {
    let k = p.len();
    let n = r.len();
    let names = kind.parameter_names();
    let col_norm = |j: usize| jac.chunks(k).map(|row| row[j] * row[j]).sum::<T>().sqrt();
    let scaled: Vec<T> = (0..k).map(|j| col_norm(j) * p[j].abs().max(T::one())).collect();
    let threshold = T::lit(1e-9) * T::from_usize_lossy(n).sqrt();
    let active: Vec<usize> = (0..k).filter(|&j| scaled[j] > threshold).collect();
    let degenerate: Vec<&'static str> = (0..k).filter(|j| !active.contains(j)).map(|j| names[j]).collect();

    let residual_norm = r.iter().map(|v| *v * *v).sum::<T>().sqrt();
    let mut std_errors = vec![None; k];
    if !active.is_empty() {
        let m = active.len();
        let mut jtj = vec![T::zero(); m * m];
        for row in jac.chunks(k) {
            for (a, &ja) in active.iter().enumerate() {
                for (b, &jb) in active.iter().enumerate() {
                    jtj[a * m + b] += row[ja] * row[jb];
                }
            }
        }
        let dof = n.saturating_sub(m).max(1);
        let variance = if absolute_sigma { T::one() } else { residual_norm * residual_norm / T::from_usize_lossy(dof) };
        for (a, &j) in active.iter().enumerate() {
            let mut e = vec![T::zero(); m];
            e[a] = T::one();
            let col = solve_spd(&jtj, &e, m).ok_or_else(|| {
                Error::SingularJacobian(format!("{kind}: parameters {:?} are not jointly identifiable", active.iter().map(|&i| names[i]).collect::<Vec<_>>()))
            })?;
            std_errors[j] = Some((col[a] * variance).max(T::zero()).sqrt());
        }
    }
    Ok(FitResult { kind, parameters: p, std_errors, residual_norm, converged: true, iterations, degenerate })
}

/// Spread of refitted parameters over shot-noise resamplings of `ys`.
#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapResult<T> {
    pub kind: FitModelKind,
    pub means: Vec<T>,
    pub std_devs: Vec<T>,
    pub replicas: usize,
    pub failures: usize,
}

/// Resamples every point as `Binomial(shots, y)/shots`, refits, and reports
/// the parameter standard deviations. Replica `i` uses stream `i` of `seed`.
pub fn bootstrap_errors<T: Real>(
    model: &FitModel<T>,
    xs: &[T],
    ys: &[T],
    shots_per_point: u64,
    replicas: usize,
    seed: u64,
) -> Result<BootstrapResult<T>> {
    if replicas < 100 {
        return Err(Error::InvalidParameter(format!("bootstrap needs ≥ 100 replicas, got {replicas}")));
    }
    if shots_per_point == 0 {
        return Err(Error::InvalidParameter("shots per point must be ≥ 1".into()));
    }
    validate_data(model.kind, xs, ys, None)?;
    let k = model.kind.parameter_count();
    let mut samples: Vec<Vec<T>> = Vec::with_capacity(replicas);
    let mut failures = 0;
    let n = shots_per_point as f64;
    for i in 0..replicas {
        let mut rng = stream_rng(seed, i as u64);
        let resampled: Vec<T> = ys
            .iter()
            .map(|y| {
                let p = y.as_f64().clamp(0.0, 1.0);
                let dist = Binomial::new(shots_per_point, p).expect("p is clamped to [0, 1]");
                T::lit(dist.sample(&mut rng) as f64 / n)
            })
            .collect();
        match fit(model, xs, &resampled, None) {
            Ok(f) => samples.push(f.parameters),
            Err(_) => failures += 1,
        }
    }
    if (failures as f64) > MAX_BOOTSTRAP_FAILURE_RATE * replicas as f64 {
        return Err(Error::BootstrapFailures { failed: failures, replicas });
    }
    let m = T::from_usize_lossy(samples.len());
    let means: Vec<T> = (0..k).map(|j| samples.iter().map(|s| s[j]).sum::<T>() / m).collect();
    let std_devs = (0..k)
        .map(|j| {
            let ss: T = samples.iter().map(|s| (s[j] - means[j]).powi(2)).sum();
            (ss / (m - T::one()).max(T::one())).sqrt()
        })
        .collect();
    Ok(BootstrapResult { kind: model.kind, means, std_devs, replicas, failures })
}
