//! Mirror maps onto the simplex.
//!
//! Three maps are provided:
//!
//! - the logit map, `∇h*` of the entropic regularizer (exponential weights);
//! - `∇h_p*` for `h_p(x) = ½‖x‖_p²` restricted to the simplex, `p ∈ (1, 2]`;
//! - the Tsallis/INF potential `F_q(x) = -(q/(q-1)) Σ x_i^{1-1/q}`, with its
//!   gradient, inverse gradient and Bregman projection onto the simplex.
//!
//! `∇h_p*` and the Bregman projection have no closed form. Both reduce, through
//! their KKT conditions, to a monotone equation in a scalar multiplier `λ`,
//! which is solved by Newton's method inside a shrinking bisection bracket.

use crate::error::{Error, Result};
use crate::simplex::SimplexDistribution;

/// Iteration cap for the scalar root finders.
pub const MAX_ROOT_ITERATIONS: usize = 200;
/// Bracket width at which the scalar root finders stop.
pub const ROOT_INTERVAL_TOLERANCE: f64 = 1e-13;
/// Iterates are floored here before taking `x^{-1/q}`.
pub const POSITIVITY_FLOOR: f64 = 1e-300;
/// Projected weights below this are clipped up to it, then renormalized.
pub const WEIGHT_CLIP: f64 = 1e-15;

/// `h_p(x) = ½‖x‖_p²` on the simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PNormRegularizer {
    p: f64,
    q: f64,
}

impl PNormRegularizer {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(Error::InvalidParameter(format!("p = {p} is not in (1, 2]")));
        }
        Ok(PNormRegularizer {
            p,
            q: 1.0 / (1.0 - 1.0 / p),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Dual exponent, `1/p + 1/q = 1`.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Strong-convexity modulus with respect to `‖·‖_p`.
    pub fn strong_convexity(&self) -> f64 {
        self.p - 1.0
    }

    /// Upper bound on `max h_p - min h_p` over the simplex.
    pub fn range_bound(&self) -> f64 {
        0.5
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        0.5 * p_norm(x, self.p).powi(2)
    }
}

fn p_norm(x: &[f64], p: f64) -> f64 {
    let sum: f64 = x
        .iter()
        .filter(|v| **v > 0.0)
        .map(|v| (p * v.ln()).exp())
        .sum();
    (sum.ln() / p).exp()
}

/// The Tsallis/INF potential `F_q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsallisPotential {
    q: f64,
}

impl TsallisPotential {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "q = {q} must be finite and > 1"
            )));
        }
        Ok(TsallisPotential { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `F_q(x)` for a nonnegative vector.
    pub fn value(&self, x: &[f64]) -> f64 {
        let e = 1.0 - 1.0 / self.q;
        -(self.q / (self.q - 1.0)) * x.iter().map(|&v| pow(v, e)).sum::<f64>()
    }

    /// Bregman divergence `D_F(x, z) = F(x) - F(z) - <∇F(z), x - z>`.
    pub fn divergence(&self, x: &[f64], z: &[f64]) -> f64 {
        let inv_q = 1.0 / self.q;
        let linear: f64 = x
            .iter()
            .zip(z)
            .map(|(&xi, &zi)| pow(zi, -inv_q) * (xi - zi))
            .sum();
        self.value(x) - self.value(z) + linear
    }
}

/// `a^b` computed as `exp(b ln a)`; `0^b = 0` for `b > 0`.
#[inline]
fn pow(a: f64, b: f64) -> f64 {
    if a == 0.0 && b > 0.0 {
        0.0
    } else {
        (b * a.ln()).exp()
    }
}

/// Exponential-weights distribution `x_i ∝ exp(η · cumulative_i)`.
///
/// `η > 0` for gains, `η < 0` for losses.
pub fn logit_map(cumulative: &[f64], eta: f64) -> Result<SimplexDistribution> {
    if cumulative.is_empty() {
        return Err(Error::InvalidParameter("empty cumulative vector".into()));
    }
    if !eta.is_finite() || cumulative.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidParameter(
            "logit map inputs must be finite".into(),
        ));
    }
    let scaled: Vec<f64> = cumulative.iter().map(|c| eta * c).collect();
    let max = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scaled.iter().map(|z| (z - max).exp()).collect();
    SimplexDistribution::normalize(exps)
}

/// `∇h_p*(y) = argmax_{x ∈ Δ} <y, x> - ½‖x‖_p²`.
///
/// KKT gives `x_i ∝ ((y_i - λ)_+)^{1/(p-1)}` with the multiplier fixed by
/// `Σ u_i = ‖u‖_p^{2-p}` for `u_i = ((y_i - λ)_+)^{1/(p-1)}`; the left side
/// minus the right is strictly decreasing in `λ`, and the root lies in
/// `[min y - 1, max y]`.
pub fn lp_mirror_map(y: &[f64], reg: &PNormRegularizer) -> Result<SimplexDistribution> {
    if y.is_empty() {
        return Err(Error::InvalidParameter("empty argument vector".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "mirror map argument must be finite".into(),
        ));
    }
    if y.len() == 1 {
        return SimplexDistribution::new(vec![1.0]);
    }
    let p = reg.p();
    let a = 1.0 / (p - 1.0);
    let c = (2.0 - p) / p;
    let y_max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let y_min = y.iter().copied().fold(f64::INFINITY, f64::min);

    // Log of Σu / ‖u‖_p^{2-p} and its λ-derivative, evaluated with u rescaled
    // by its largest component so that large exponents cannot under/overflow.
    let eval = |lambda: f64| -> (f64, f64) {
        let top = y_max - lambda;
        if top <= 0.0 {
            return (f64::NEG_INFINITY, f64::NAN);
        }
        let (mut s1, mut sp, mut t1, mut tp) = (0.0, 0.0, 0.0, 0.0);
        for &yi in y {
            let g = yi - lambda;
            if g > 0.0 {
                let lr = (g / top).ln();
                let w = (a * lr).exp();
                let wp = (a * p * lr).exp();
                s1 += w;
                sp += wp;
                t1 += w / g;
                tp += wp / g;
            }
        }
        let r = top.ln() + s1.ln() - c * sp.ln();
        let dr = -a * (t1 / s1 - (2.0 - p) * tp / sp);
        (r, dr)
    };

    // Solve -r(λ) = 0 (increasing).
    let lambda = solve_increasing(
        |l| {
            let (r, dr) = eval(l);
            (-r, -dr)
        },
        y_min - 1.0,
        y_max,
        y_min - 1.0,
        "lp_mirror_map",
    )?;

    let top = y_max - lambda;
    if !(top > 0.0) {
        return Err(Error::numerical(
            "lp_mirror_map",
            "multiplier reached max y",
        ));
    }
    let weights: Vec<f64> = y
        .iter()
        .map(|&yi| {
            let g = yi - lambda;
            if g > 0.0 {
                (a * (g / top).ln()).exp()
            } else {
                0.0
            }
        })
        .collect();
    SimplexDistribution::normalize(weights)
}

/// `∇F_q(x)_i = -x_i^{-1/q}`; requires every `x_i > 0`.
pub fn tsallis_gradient(x: &[f64], pot: &TsallisPotential) -> Result<Vec<f64>> {
    if let Some((i, v)) = x
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0) || !v.is_finite())
    {
        return Err(Error::InvalidParameter(format!(
            "x[{i}] = {v} is outside the domain of the Tsallis potential"
        )));
    }
    let inv_q = 1.0 / pot.q();
    Ok(x.iter()
        .map(|&v| -pow(v.max(POSITIVITY_FLOOR), -inv_q))
        .collect())
}

/// `(∇F_q)^{-1}(y)_i = (-y_i)^{-q}`; requires every `y_i < 0`.
pub fn tsallis_gradient_inverse(y: &[f64], pot: &TsallisPotential) -> Result<Vec<f64>> {
    if let Some((i, v)) = y
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v < 0.0) || !v.is_finite())
    {
        return Err(Error::InvalidParameter(format!(
            "y[{i}] = {v} must be strictly negative"
        )));
    }
    Ok(y.iter().map(|&v| pow(-v, -pot.q())).collect())
}

/// `argmin_{x ∈ Δ} D_{F_q}(x, z)` for a positive vector `z`.
///
/// The minimizer is `x_i = (z_i^{-1/q} + λ)^{-q}` with `λ` the unique root of
/// `Σ x_i(λ) = 1` on `λ > -min_i z_i^{-1/q}`.
pub fn bregman_project(z: &[f64], pot: &TsallisPotential) -> Result<SimplexDistribution> {
    if z.is_empty() {
        return Err(Error::InvalidParameter("empty vector".into()));
    }
    if let Some((i, v)) = z
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0) || !v.is_finite())
    {
        return Err(Error::InvalidParameter(format!(
            "z[{i}] = {v} must be positive and finite"
        )));
    }
    let q = pot.q();
    let inv_q = 1.0 / q;
    let base: Vec<f64> = z
        .iter()
        .map(|&v| pow(v.max(POSITIVITY_FLOOR), -inv_q))
        .collect();
    let base_min = base.iter().copied().fold(f64::INFINITY, f64::min);

    // φ(λ) = S(λ)^{-1/q} - 1 with S(λ) = Σ (b_i + λ)^{-q}. φ is increasing and
    // concave, which keeps Newton iterates on the left of the root.
    let eval = |lambda: f64| -> (f64, f64) {
        let mut s = 0.0;
        let mut s1 = 0.0;
        for &b in &base {
            let v = b + lambda;
            if v <= 0.0 {
                return (-1.0, f64::NAN);
            }
            let t = (-q * v.ln()).exp();
            s += t;
            s1 += t / v;
        }
        let m = (-inv_q * s.ln()).exp();
        (m - 1.0, m / s * s1)
    };

    let lo = -base_min;
    let mut hi = 1.0_f64.max(lo + 1.0);
    let mut grown = 0;
    while eval(hi).0 <= 0.0 {
        hi = lo + 2.0 * (hi - lo);
        grown += 1;
        if grown > 2000 || !hi.is_finite() {
            return Err(Error::numerical(
                "bregman_project",
                "could not bracket the multiplier",
            ));
        }
    }
    let lambda = solve_increasing(eval, lo, hi, 0.0, "bregman_project")?;

    let mut x: Vec<f64> = base
        .iter()
        .map(|&b| (-q * (b + lambda).ln()).exp().max(WEIGHT_CLIP))
        .collect();
    let sum: f64 = x.iter().sum();
    if !(sum.is_finite() && sum > 0.0) {
        return Err(Error::numerical(
            "bregman_project",
            format!("projected mass {sum}"),
        ));
    }
    x.iter_mut().for_each(|v| *v /= sum);
    SimplexDistribution::new(x)
}

/// Finds the root of an increasing function given `f(lo) < 0 < f(hi)`.
///
/// Newton steps are taken when they land strictly inside the current bracket,
/// bisection otherwise. `eval` returns `(f, f')`; `f` may be infinite and `f'`
/// NaN outside the function's domain.
fn solve_increasing(
    mut eval: impl FnMut(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    start: f64,
    routine: &'static str,
) -> Result<f64> {
    let mut x = if start > lo && start < hi {
        start
    } else {
        lo + 0.5 * (hi - lo)
    };
    for _ in 0..MAX_ROOT_ITERATIONS {
        let (f, df) = eval(x);
        if f.is_nan() {
            return Err(Error::numerical(
                routine,
                format!("NaN residual at λ = {x}"),
            ));
        }
        if f.abs() <= 1e-15 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= ROOT_INTERVAL_TOLERANCE {
            return Ok(x);
        }
        let newton = x - f / df;
        let next = if df > 0.0 && newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            lo + 0.5 * (hi - lo)
        };
        if next == x || (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::numerical(
        routine,
        format!("no convergence in {MAX_ROOT_ITERATIONS} iterations (bracket [{lo}, {hi}])"),
    ))
}
