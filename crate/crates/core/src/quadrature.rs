//! Adaptive Gauss–Legendre quadrature for oscillatory integrands.
//!
//! An interval is first cut into panels that each carry a bounded number of
//! phase cycles, then every panel is bisected until the 20-point rule on the
//! halves agrees with the rule on the whole panel. Panel results are reduced
//! left to right, so the value does not depend on the execution mode.

use crate::exec::Exec;
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::OnceLock;

/// Number of Gauss–Legendre nodes per panel.
pub const GAUSS_NODES: usize = 20;

/// Upper bound on phase cycles carried by one initial panel.
pub const MAX_PANEL_CYCLES: f64 = 2.0;

const CHUNK: usize = 256;

/// Non-convergence of an adaptive integral.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error(
    "quadrature stopped after {evaluations} evaluations (evaluation budget or bisection depth exhausted) \
     with estimated error {achieved:.3e} against tolerance {tol:.3e}"
)]
pub struct QuadFailure {
    /// Best available value, one entry per component.
    pub partial: Vec<Complex64>,
    pub achieved: f64,
    pub tol: f64,
    pub evaluations: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    /// Absolute tolerance on the integral.
    pub tol: f64,
    /// Maximum number of integrand evaluations.
    pub budget: u64,
    /// Maximum bisection depth below an initial panel.
    pub max_depth: u32,
}

impl QuadConfig {
    pub fn new(tol: f64, budget: u64) -> Self {
        QuadConfig {
            tol,
            budget,
            max_depth: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadOutcome<V> {
    pub value: V,
    pub est_error: f64,
    pub evaluations: u64,
}

/// Values the engine can integrate.
pub trait Value: Clone + Send + Sync {
    /// `self += w * x`
    fn add_scaled(&mut self, w: f64, x: &Self);
    fn scale(&mut self, w: f64);
    /// Max-norm distance.
    fn dist(&self, other: &Self) -> f64;
    fn components(&self) -> Vec<Complex64>;
}

impl Value for f64 {
    fn add_scaled(&mut self, w: f64, x: &Self) {
        *self += w * x;
    }
    fn scale(&mut self, w: f64) {
        *self *= w;
    }
    fn dist(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
    fn components(&self) -> Vec<Complex64> {
        vec![Complex64::new(*self, 0.0)]
    }
}

impl Value for Complex64 {
    fn add_scaled(&mut self, w: f64, x: &Self) {
        *self += x * w;
    }
    fn scale(&mut self, w: f64) {
        *self *= w;
    }
    fn dist(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
    fn components(&self) -> Vec<Complex64> {
        vec![*self]
    }
}

impl Value for Vec<Complex64> {
    fn add_scaled(&mut self, w: f64, x: &Self) {
        for (a, b) in self.iter_mut().zip(x) {
            *a += b * w;
        }
    }
    fn scale(&mut self, w: f64) {
        for a in self.iter_mut() {
            *a *= w;
        }
    }
    fn dist(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
    fn components(&self) -> Vec<Complex64> {
        self.clone()
    }
}

/// Nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre() -> &'static ([f64; GAUSS_NODES], [f64; GAUSS_NODES]) {
    static RULE: OnceLock<([f64; GAUSS_NODES], [f64; GAUSS_NODES])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_NODES;
        let mut x = [0.0; GAUSS_NODES];
        let mut w = [0.0; GAUSS_NODES];
        for i in 0..n / 2 {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let wi = 2.0 / ((1.0 - z * z) * dp * dp);
            x[i] = -z;
            x[n - 1 - i] = z;
            w[i] = wi;
            w[n - 1 - i] = wi;
        }
        (x, w)
    })
}

/// One application of the Gauss rule on `[lo, hi]`.
pub fn gauss_panel<V: Value, F: Fn(f64) -> V>(f: &F, lo: f64, hi: f64) -> V {
    let (x, w) = gauss_legendre();
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut acc = f(c + h * x[0]);
    acc.scale(w[0]);
    for i in 1..GAUSS_NODES {
        acc.add_scaled(w[i], &f(c + h * x[i]));
    }
    acc.scale(h);
    acc
}

/// Splits `[lo, hi]` into at least `min_panels` panels, each with at most
/// `max_cycles` according to the monotone bound `cycles(lo, hi)`.
pub fn partition<C: Fn(f64, f64) -> f64>(
    lo: f64,
    hi: f64,
    cycles: C,
    max_cycles: f64,
    min_panels: usize,
) -> Vec<f64> {
    let max_w = (hi - lo) / min_panels.max(1) as f64;
    let mut pts = vec![lo];
    let mut x = lo;
    let mut w = max_w;
    while x < hi {
        w = (2.0 * w).min(max_w);
        if x + w >= hi {
            w = hi - x;
        }
        while cycles(x, x + w) > max_cycles && x + 0.5 * w > x {
            w *= 0.5;
        }
        let next = if x + w >= hi || hi - (x + w) <= 1e-14 * hi.abs() {
            hi
        } else {
            x + w
        };
        pts.push(next);
        x = next;
    }
    pts
}

struct Ctx<'a> {
    tol_density: f64,
    budget: u64,
    max_depth: u32,
    evals: &'a AtomicU64,
    exhausted: &'a AtomicBool,
}

impl Ctx<'_> {
    fn charge(&self, n: u64) -> bool {
        let used = self.evals.fetch_add(n, Ordering::Relaxed) + n;
        if used > self.budget {
            self.exhausted.store(true, Ordering::Relaxed);
            false
        } else {
            true
        }
    }
}

fn refine<V: Value, F: Fn(f64) -> V>(
    f: &F,
    lo: f64,
    hi: f64,
    whole: V,
    depth: u32,
    ctx: &Ctx<'_>,
    leaves: &mut Option<Vec<(f64, f64, V)>>,
) -> (V, f64) {
    let mid = 0.5 * (lo + hi);
    let left = gauss_panel(f, lo, mid);
    let right = gauss_panel(f, mid, hi);
    let within = ctx.charge(2 * GAUSS_NODES as u64);
    let mut sum = left.clone();
    sum.add_scaled(1.0, &right);
    let err = sum.dist(&whole);
    if err <= ctx.tol_density * (hi - lo)
        || depth >= ctx.max_depth
        || !within
        || mid <= lo
        || mid >= hi
    {
        if let Some(l) = leaves {
            l.push((lo, mid, left));
            l.push((mid, hi, right));
        }
        return (sum, err);
    }
    let (mut a, ea) = refine(f, lo, mid, left, depth + 1, ctx, leaves);
    let (b, eb) = refine(f, mid, hi, right, depth + 1, ctx, leaves);
    a.add_scaled(1.0, &b);
    (a, ea + eb)
}

/// Adaptive integral over the partition `breaks` (sorted, at least two points).
/// When `keep_leaves` is set the accepted subpanels are returned in order.
fn run<V: Value, F: Fn(f64) -> V + Sync>(
    f: &F,
    breaks: &[f64],
    cfg: &QuadConfig,
    exec: Exec,
    keep_leaves: bool,
) -> Result<(QuadOutcome<V>, Vec<(f64, f64, V)>), QuadFailure> {
    assert!(breaks.len() >= 2, "partition needs two points");
    let total = breaks[breaks.len() - 1] - breaks[0];
    let evals = AtomicU64::new(0);
    let exhausted = AtomicBool::new(false);
    let ctx = Ctx {
        tol_density: if total > 0.0 {
            cfg.tol / total
        } else {
            f64::INFINITY
        },
        budget: cfg.budget,
        max_depth: cfg.max_depth,
        evals: &evals,
        exhausted: &exhausted,
    };
    let panels = breaks.len() - 1;
    let chunks = panels.div_ceil(CHUNK);
    let parts = exec.map_range(chunks, |c| {
        let mut acc: Option<V> = None;
        let mut err = 0.0;
        let mut leaves = keep_leaves.then(Vec::new);
        for p in c * CHUNK..((c + 1) * CHUNK).min(panels) {
            let (lo, hi) = (breaks[p], breaks[p + 1]);
            let whole = gauss_panel(f, lo, hi);
            ctx.charge(GAUSS_NODES as u64);
            let (v, e) = refine(f, lo, hi, whole, 0, &ctx, &mut leaves);
            err += e;
            match acc.as_mut() {
                Some(a) => a.add_scaled(1.0, &v),
                None => acc = Some(v),
            }
        }
        (
            acc.expect("chunk is nonempty"),
            err,
            leaves.unwrap_or_default(),
        )
    });
    let mut value: Option<V> = None;
    let mut est_error = 0.0;
    let mut leaves = Vec::new();
    for (v, e, l) in parts {
        est_error += e;
        leaves.extend(l);
        match value.as_mut() {
            Some(a) => a.add_scaled(1.0, &v),
            None => value = Some(v),
        }
    }
    let value = value.expect("at least one panel");
    let evaluations = evals.load(Ordering::Relaxed);
    if exhausted.load(Ordering::Relaxed) || est_error > cfg.tol {
        return Err(QuadFailure {
            partial: value.components(),
            achieved: est_error,
            tol: cfg.tol,
            evaluations,
        });
    }
    Ok((
        QuadOutcome {
            value,
            est_error,
            evaluations,
        },
        leaves,
    ))
}

pub fn integrate<V: Value, F: Fn(f64) -> V + Sync>(
    f: &F,
    breaks: &[f64],
    cfg: &QuadConfig,
    exec: Exec,
) -> Result<QuadOutcome<V>, QuadFailure> {
    run(f, breaks, cfg, exec, false).map(|(o, _)| o)
}

/// As [`integrate`], also returning the accepted subpanels with their values.
pub fn integrate_with_leaves<V: Value, F: Fn(f64) -> V + Sync>(
    f: &F,
    breaks: &[f64],
    cfg: &QuadConfig,
    exec: Exec,
) -> Result<(QuadOutcome<V>, Vec<(f64, f64, V)>), QuadFailure> {
    run(f, breaks, cfg, exec, true)
}

/// `e(x) = exp(2πi x)`, reducing `x` modulo 1 first.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let r = x - x.floor();
    let (s, c) = (TAU * r).sin_cos();
    Complex64::new(c, s)
}

/// A real phase `Σ c_k (t + s_k)^{p_k}` with `p_k > 0` and `t + s_k >= 0`,
/// measured in cycles.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PowerPhase {
    pub terms: Vec<PowerTerm>,
}

/// `c (t + s)^p`, or `c ((t + s)^p − (t + s')^p)` when `paired` holds `s'`.
/// Either form is monotone in `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerTerm {
    pub coeff: f64,
    pub power: f64,
    pub shift: f64,
    pub paired: Option<f64>,
}

impl PowerTerm {
    #[inline]
    fn shape(&self, t: f64) -> f64 {
        let x = (t + self.shift).powf(self.power);
        match self.paired {
            Some(s) => x - (t + s).powf(self.power),
            None => x,
        }
    }
}

impl PowerPhase {
    /// `Σ_j c_j t^{j/d}`; zero coefficients are dropped.
    pub fn fractional(coeffs: &[f64], height: u32) -> Self {
        PowerPhase {
            terms: coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(j, &c)| PowerTerm {
                    coeff: c,
                    power: (j + 1) as f64 / height as f64,
                    shift: 0.0,
                    paired: None,
                })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|k| k.coeff * k.shape(t)).sum()
    }

    /// Phase of `t ↦ θ(t^α)`.
    pub fn compose_power(&self, alpha: f64) -> Self {
        assert!(
            self.terms
                .iter()
                .all(|k| k.shift == 0.0 && k.paired.is_none()),
            "cannot compose a shifted phase"
        );
        PowerPhase {
            terms: self
                .terms
                .iter()
                .map(|k| PowerTerm {
                    power: k.power * alpha,
                    ..*k
                })
                .collect(),
        }
    }

    /// Phase of `t ↦ θ₁(t + h) − θ₂(t)` for unshifted `θ₁ = self`, `θ₂ = other`.
    /// Terms with equal power and coefficient are paired, so that e.g. the
    /// linear parts cancel exactly and the cycle bound stays small.
    pub fn shifted_difference(&self, h: f64, other: &PowerPhase) -> Self {
        let mut used = vec![false; other.terms.len()];
        let mut terms = Vec::new();
        for k in &self.terms {
            let partner = other.terms.iter().enumerate().position(|(i, o)| {
                !used[i]
                    && o.power == k.power
                    && o.coeff == k.coeff
                    && o.shift == 0.0
                    && o.paired.is_none()
            });
            match partner {
                Some(i) => {
                    used[i] = true;
                    terms.push(PowerTerm {
                        shift: k.shift + h,
                        paired: Some(0.0),
                        ..*k
                    });
                }
                None => terms.push(PowerTerm {
                    shift: k.shift + h,
                    ..*k
                }),
            }
        }
        for (o, _) in other.terms.iter().zip(&used).filter(|(_, u)| !**u) {
            terms.push(PowerTerm {
                coeff: -o.coeff,
                ..*o
            });
        }
        PowerPhase { terms }
    }

    /// Upper bound on the number of cycles on `[lo, hi]`; each term is
    /// monotone, so its variation is the difference of its endpoint values.
    pub fn cycles(&self, lo: f64, hi: f64) -> f64 {
        self.terms
            .iter()
            .map(|k| k.coeff.abs() * (k.shape(hi) - k.shape(lo)).abs())
            .sum()
    }
}

/// Average of `e(θ(t))` over `(a, b)` for an arbitrary power phase.
pub fn phase_average(
    phase: &PowerPhase,
    a: f64,
    b: f64,
    tol: f64,
    budget: u64,
    exec: Exec,
) -> Result<QuadOutcome<Complex64>, QuadFailure> {
    if phase.is_zero() {
        return Ok(QuadOutcome {
            value: Complex64::new(1.0, 0.0),
            est_error: 0.0,
            evaluations: 0,
        });
    }
    let len = b - a;
    let breaks = partition(a, b, |x, y| phase.cycles(x, y), MAX_PANEL_CYCLES, 16);
    let cfg = QuadConfig::new(tol * len, budget);
    let f = |t: f64| e(phase.eval(t));
    integrate(&f, &breaks, &cfg, exec)
        .map(|o| QuadOutcome {
            value: o.value / len,
            est_error: o.est_error / len,
            evaluations: o.evaluations,
        })
        .map_err(|mut fail| {
            fail.partial.iter_mut().for_each(|z| *z /= len);
            fail.achieved /= len;
            fail.tol = tol;
            fail
        })
}

/// Average of `e(Σ_j c_j t^{j/d})` over `(a, b)`, `0 <= a < b`.
///
/// Substituting `t = u^d` turns the phase into the polynomial
/// `P(u) = Σ c_j u^j` with Jacobian `d u^{d-1}`, so the integrand is smooth
/// down to `t = 0`. `tol` bounds the error of the average.
pub fn fractional_phase_average(
    coeffs: &[f64],
    a: f64,
    b: f64,
    tol: f64,
    budget: u64,
    exec: Exec,
) -> Result<QuadOutcome<Complex64>, QuadFailure> {
    let d = coeffs.len();
    if coeffs.iter().all(|&c| c == 0.0) {
        return Ok(QuadOutcome {
            value: Complex64::new(1.0, 0.0),
            est_error: 0.0,
            evaluations: 0,
        });
    }
    let len = b - a;
    let inv = 1.0 / d as f64;
    let (ua, ub) = (a.powf(inv), b.powf(inv));
    let poly = |u: f64| {
        let mut p = 0.0;
        for &c in coeffs.iter().rev() {
            p = (p + c) * u;
        }
        p
    };
    let cycles = |x: f64, y: f64| {
        let (mut xp, mut yp, mut s) = (1.0, 1.0, 0.0);
        for &c in coeffs {
            xp *= x;
            yp *= y;
            s += c.abs() * (yp - xp);
        }
        s
    };
    let breaks = partition(ua, ub, cycles, MAX_PANEL_CYCLES, 16);
    let cfg = QuadConfig::new(tol * len, budget);
    let df = d as f64;
    let f = |u: f64| e(poly(u)) * (df * u.powi(d as i32 - 1));
    integrate(&f, &breaks, &cfg, exec)
        .map(|o| QuadOutcome {
            value: o.value / len,
            est_error: o.est_error / len,
            evaluations: o.evaluations,
        })
        .map_err(|mut fail| {
            fail.partial.iter_mut().for_each(|z| *z /= len);
            fail.achieved /= len;
            fail.tol = tol;
            fail
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for k in 0..40 {
            let got: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(k)).sum();
            let want = if k % 2 == 1 {
                0.0
            } else {
                2.0 / (k as f64 + 1.0)
            };
            assert!((got - want).abs() < 1e-13, "degree {k}: {got} vs {want}");
        }
    }

    #[test]
    fn partition_respects_cycle_bound() {
        let breaks = partition(0.0, 1000.0, |a, b| 3.0 * (b - a), 2.0, 4);
        assert_eq!(*breaks.last().unwrap(), 1000.0);
        for w in breaks.windows(2) {
            assert!(3.0 * (w[1] - w[0]) <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn linear_phase_matches_closed_form() {
        let t = 1234.5;
        let c = 0.7;
        let got = fractional_phase_average(&[c], 0.0, t, 1e-10, 10_000_000, Exec::Serial).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let want = (e(c * t) - 1.0) / (i * TAU * c * t);
        assert!((got.value - want).norm() < 1e-10);
    }

    #[test]
    fn square_root_phase_matches_closed_form() {
        // ∫_0^T e(c√t) dt with u = √t: ∫ 2u e(cu) du
        let (c, t): (f64, f64) = (1.3, 400.0);
        let u = t.sqrt();
        let k = TAU * c;
        let i = Complex64::new(0.0, 1.0);
        let anti = |x: f64| 2.0 * (i * k * x).exp() * (x / (i * k) + 1.0 / (k * k));
        let want = (anti(u) - anti(0.0)) / t;
        let got =
            fractional_phase_average(&[c, 0.0], 0.0, t, 1e-10, 10_000_000, Exec::Serial).unwrap();
        assert!(
            (got.value - want).norm() < 1e-10,
            "{} vs {}",
            got.value,
            want
        );
        let direct = phase_average(
            &PowerPhase::fractional(&[c, 0.0], 2),
            0.0,
            t,
            1e-9,
            10_000_000,
            Exec::Serial,
        )
        .unwrap();
        assert!((direct.value - want).norm() < 1e-9);
    }

    #[test]
    fn paired_difference_cancels_linear_part() {
        let theta = PowerPhase::fractional(&[0.5, 3.0], 2);
        let d = theta.shifted_difference(2.0, &theta);
        assert!((d.eval(100.0) - (theta.eval(102.0) - theta.eval(100.0))).abs() < 1e-12);
        assert!(d.cycles(0.0, 1e4) < 1.0);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let err =
            fractional_phase_average(&[3.0], 0.0, 1e6, 1e-8, 10_000, Exec::Serial).unwrap_err();
        assert!(err.evaluations > 10_000);
        assert_eq!(err.partial.len(), 1);
    }

    #[test]
    fn modes_agree_bitwise() {
        let c = [0.3, -1.1, 0.25];
        let a = fractional_phase_average(&c, 10.0, 5e4, 1e-9, 50_000_000, Exec::Serial).unwrap();
        let b = fractional_phase_average(&c, 10.0, 5e4, 1e-9, 50_000_000, Exec::Parallel).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
    }
}
