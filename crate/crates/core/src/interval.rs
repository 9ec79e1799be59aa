//! Tempered interval sequences and fractional-power time changes.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::quadrature::{
    self, e, gauss_panel, integrate, integrate_with_leaves, PowerPhase, QuadConfig, QuadOutcome,
};
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

type Generator = Arc<dyn Fn(u64) -> (f64, f64) + Send + Sync>;

/// A rule `n ↦ (a_n, b_n)` (for `n >= 1`) with a declared constant `K`.
#[derive(Clone)]
pub struct TemperedSequence {
    id: String,
    k: f64,
    generator: Generator,
}

impl fmt::Debug for TemperedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TemperedSequence")
            .field("id", &self.id)
            .field("k", &self.k)
            .finish()
    }
}

impl TemperedSequence {
    pub fn new(
        id: impl Into<String>,
        k: f64,
        generator: impl Fn(u64) -> (f64, f64) + Send + Sync + 'static,
    ) -> Self {
        TemperedSequence {
            id: id.into(),
            k,
            generator: Arc::new(generator),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Same intervals, different declared constant.
    pub fn with_k(&self, k: f64) -> Self {
        TemperedSequence { k, ..self.clone() }
    }

    /// `(a_n, b_n)`; fails unless `0 <= a_n < b_n` are finite.
    pub fn interval(&self, n: u64) -> Result<(f64, f64)> {
        let (a, b) = (self.generator)(n);
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && a < b) {
            return Err(Error::MalformedSequence { n, a, b });
        }
        Ok((a, b))
    }
}

/// Ids accepted by [`tempered_family`].
pub const FAMILY_IDS: [&str; 4] = ["pinned", "sliding-k1", "sliding-k5", "irregular"];

fn pow2(n: u64) -> f64 {
    2f64.powi(n as i32)
}

/// The raw irregular rule `a_m = ⌊K m ln(m+2)⌋`, `b_m = a_m + m ln(m+2)`.
pub fn irregular_interval(k: f64, m: u64) -> (f64, f64) {
    let m = m as f64;
    let len = m * (m + 2.0).ln();
    let a = (k * len).floor();
    (a, a + len)
}

/// Index into the irregular rule used for the `n`-th interval: the rule is
/// sampled along `m_n = ⌈2^n / 8⌉` so lengths grow geometrically, like the
/// other families.
pub fn irregular_index(n: u64) -> u64 {
    (pow2(n) / 8.0).ceil().max(1.0) as u64
}

/// Pinned `(0, 2^n)`, sliding `(K 2^n, (K+1) 2^n)` for `K ∈ {1, 5}`, and the
/// irregular family with `K = 2`.
pub fn standard_tempered_families() -> Vec<TemperedSequence> {
    FAMILY_IDS
        .iter()
        .map(|id| tempered_family(id).expect("known id"))
        .collect()
}

pub fn tempered_family(id: &str) -> Result<TemperedSequence> {
    Ok(match id {
        "pinned" => TemperedSequence::new(id, 0.0, |n| (0.0, pow2(n))),
        "sliding-k1" => TemperedSequence::new(id, 1.0, |n| (pow2(n), 2.0 * pow2(n))),
        "sliding-k5" => TemperedSequence::new(id, 5.0, |n| (5.0 * pow2(n), 6.0 * pow2(n))),
        "irregular" => {
            TemperedSequence::new(id, 2.0, |n| irregular_interval(2.0, irregular_index(n)))
        }
        _ => {
            return Err(Error::Domain(format!(
                "unknown interval family `{id}` (expected one of {})",
                FAMILY_IDS.join(", ")
            )))
        }
    })
}

/// Finite-prefix temperedness: every `a_n <= K (b_n − a_n)` for `n <= n_max`,
/// and the longest interval of the prefix is strictly longer than every
/// interval in its first half, so lengths keep setting new records.
pub fn is_tempered_prefix(seq: &TemperedSequence, n_max: u64) -> Result<bool> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let mut ok = true;
    let mut first_half_max = 0.0f64;
    let mut overall_max = 0.0f64;
    for n in 1..=n_max {
        let (a, b) = seq.interval(n)?;
        let len = b - a;
        ok &= a <= seq.k * len;
        if n <= n_max / 2 {
            first_half_max = first_half_max.max(len);
        }
        overall_max = overall_max.max(len);
    }
    Ok(ok && overall_max > first_half_max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelCase {
    /// `α = 1`: no kernel.
    Identity,
    /// `α < 1`: kernel `κ (B − t) t^p` weighting averages over `(t, B)`.
    Contracting,
    /// `α > 1`: kernel `κ (t − A) t^p` weighting averages over `(A, t)`.
    Expanding,
}

/// Decomposition of the average of `v(s^α)` over `(a, b)` into
/// `w0 · avg_{(A,B)} v` plus a kernel-weighted mixture of averages of `v` over
/// subintervals of `(A, B) = (a^α, b^α)`; `p = 1/α − 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeChangeWeights {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub lo: f64,
    pub hi: f64,
    pub w0: f64,
    pub case: KernelCase,
    /// `|1 − α| / (α² (b − a))`
    pub kappa: f64,
    pub power: f64,
}

pub fn time_change_weights(alpha: f64, (a, b): (f64, f64)) -> Result<TimeChangeWeights> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!("α must be positive, got {alpha}")));
    }
    if !(a.is_finite() && b.is_finite() && a >= 0.0 && a < b) {
        return Err(Error::Domain(format!(
            "interval ({a}, {b}) must satisfy 0 <= a < b"
        )));
    }
    if alpha < 1.0 && a == 0.0 {
        return Err(Error::Domain("α < 1 needs a > 0".into()));
    }
    let (lo, hi) = (a.powf(alpha), b.powf(alpha));
    let case = if alpha == 1.0 {
        KernelCase::Identity
    } else if alpha < 1.0 {
        KernelCase::Contracting
    } else {
        KernelCase::Expanding
    };
    let scale = (hi - lo) / (alpha * (b - a));
    let w0 = match case {
        KernelCase::Identity => 1.0,
        KernelCase::Contracting => a.powf(1.0 - alpha) * scale,
        KernelCase::Expanding => b.powf(1.0 - alpha) * scale,
    };
    Ok(TimeChangeWeights {
        alpha,
        a,
        b,
        lo,
        hi,
        w0,
        case,
        kappa: (1.0 - alpha).abs() / (alpha * alpha * (b - a)),
        power: 1.0 / alpha - 2.0,
    })
}

/// `∫_A^B t^q dt` for `q ≠ −1`.
fn power_integral(lo: f64, hi: f64, q: f64) -> f64 {
    (hi.powf(q + 1.0) - lo.powf(q + 1.0)) / (q + 1.0)
}

impl TimeChangeWeights {
    /// Kernel density at `t ∈ (A, B)`.
    pub fn kernel(&self, t: f64) -> f64 {
        match self.case {
            KernelCase::Identity => 0.0,
            KernelCase::Contracting => self.kappa * (self.hi - t) * t.powf(self.power),
            KernelCase::Expanding => self.kappa * (t - self.lo) * t.powf(self.power),
        }
    }

    /// Total kernel mass from the antiderivatives of the kernel.
    pub fn kernel_mass(&self) -> f64 {
        let (lo, hi, p) = (self.lo, self.hi, self.power);
        match self.case {
            KernelCase::Identity => 0.0,
            // p = 0 exactly at α = 1/2: the kernel is linear in t.
            KernelCase::Contracting if p == 0.0 => self.kappa * 0.5 * (hi - lo) * (hi - lo),
            KernelCase::Contracting => {
                self.kappa * (hi * power_integral(lo, hi, p) - power_integral(lo, hi, p + 1.0))
            }
            KernelCase::Expanding => {
                let upper = power_integral(lo, hi, p + 1.0);
                let lower = if lo == 0.0 {
                    0.0
                } else {
                    lo * power_integral(lo, hi, p)
                };
                self.kappa * (upper - lower)
            }
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.w0 + self.kernel_mass()
    }
}

/// A bounded continuous curve `[0, ∞) → ℂ^dim`.
pub trait Curve: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64) -> Vec<Complex64>;
    /// Upper bound on the oscillation cycles over `[lo, hi]`, used to size
    /// quadrature panels. Zero for slowly varying curves.
    fn cycles(&self, _lo: f64, _hi: f64) -> f64 {
        0.0
    }
}

/// `t ↦ e(θ(t))`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseCurve {
    pub phase: PowerPhase,
}

impl PhaseCurve {
    /// `e(Σ_j c_j t^{j/d})`.
    pub fn fractional(coeffs: &[f64], height: u32) -> Self {
        PhaseCurve {
            phase: PowerPhase::fractional(coeffs, height),
        }
    }
}

impl Curve for PhaseCurve {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, t: f64) -> Vec<Complex64> {
        vec![e(self.phase.eval(t))]
    }
    fn cycles(&self, lo: f64, hi: f64) -> f64 {
        self.phase.cycles(lo, hi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantCurve(pub Vec<Complex64>);

impl Curve for ConstantCurve {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn eval(&self, _t: f64) -> Vec<Complex64> {
        self.0.clone()
    }
}

/// Curve given by a closure, with a constant cycles-per-unit bound.
pub struct FnCurve<F> {
    pub dim: usize,
    pub f: F,
    pub cycles_per_unit: f64,
}

impl<F: Fn(f64) -> Vec<Complex64> + Sync> Curve for FnCurve<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, t: f64) -> Vec<Complex64> {
        (self.f)(t)
    }
    fn cycles(&self, lo: f64, hi: f64) -> f64 {
        self.cycles_per_unit * (hi - lo)
    }
}

/// `s ↦ v(s^α)`.
pub struct TimeChanged<'a> {
    pub inner: &'a dyn Curve,
    pub alpha: f64,
}

impl Curve for TimeChanged<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, s: f64) -> Vec<Complex64> {
        self.inner.eval(s.powf(self.alpha))
    }
    fn cycles(&self, lo: f64, hi: f64) -> f64 {
        self.inner.cycles(lo.powf(self.alpha), hi.powf(self.alpha))
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() && a >= 0.0 && a < b {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "interval ({a}, {b}) must satisfy 0 <= a < b"
        )))
    }
}

fn breaks_for(v: &dyn Curve, a: f64, b: f64) -> Vec<f64> {
    quadrature::partition(
        a,
        b,
        |x, y| v.cycles(x, y),
        quadrature::MAX_PANEL_CYCLES,
        16,
    )
}

/// Average of `v` over `(a, b)`; `tol` bounds the error of the average.
pub fn curve_average(
    v: &dyn Curve,
    (a, b): (f64, f64),
    tol: f64,
    budget: u64,
    exec: Exec,
) -> Result<QuadOutcome<Vec<Complex64>>> {
    check_interval(a, b)?;
    let len = b - a;
    let f = |t: f64| v.eval(t);
    let out = integrate(
        &f,
        &breaks_for(v, a, b),
        &QuadConfig::new(tol * len, budget),
        exec,
    )
    .map_err(|mut fail| {
        fail.partial.iter_mut().for_each(|z| *z /= len);
        fail.achieved /= len;
        fail.tol = tol;
        fail
    })?;
    Ok(QuadOutcome {
        value: out.value.iter().map(|z| z / len).collect(),
        est_error: out.est_error / len,
        evaluations: out.evaluations,
    })
}

/// Both evaluations of the average of `v(s^α)` over `(a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeChangeResult {
    /// Quadrature of `v(s^α)` in `s`.
    pub direct: Vec<Complex64>,
    pub direct_error: f64,
    /// Weight decomposition over averages of `v`; absent when the weights are
    /// undefined (`α < 1` with `a = 0`).
    pub decomposition: Option<Vec<Complex64>>,
    pub decomposition_error: f64,
    /// Max-norm difference of the two routes.
    pub discrepancy: f64,
    /// `discrepancy <= 2 tol` (true when only one route is available).
    pub consistent: bool,
}

/// Cumulative integral `F(x) = ∫_A^x v` from the accepted panels of an
/// adaptive run.
struct Cumulative<'a> {
    v: &'a dyn Curve,
    leaves: Vec<(f64, f64)>,
    prefix: Vec<Vec<Complex64>>,
}

impl Cumulative<'_> {
    fn at(&self, x: f64) -> Vec<Complex64> {
        let i = self.leaves.partition_point(|&(_, hi)| hi <= x);
        if i >= self.leaves.len() {
            return self.prefix[self.leaves.len()].clone();
        }
        let (lo, _) = self.leaves[i];
        let mut out = self.prefix[i].clone();
        if x > lo {
            let f = |t: f64| self.v.eval(t);
            let part = gauss_panel(&f, lo, x);
            for (o, p) in out.iter_mut().zip(part) {
                *o += p;
            }
        }
        out
    }
}

/// Average of `v(s^α)` over `(a, b)` by direct quadrature, cross-checked
/// against the weight decomposition of [`time_change_weights`].
pub fn time_changed_average(
    v: &dyn Curve,
    alpha: f64,
    (a, b): (f64, f64),
    tol: f64,
    budget: u64,
    exec: Exec,
) -> Result<TimeChangeResult> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!("α must be positive, got {alpha}")));
    }
    check_interval(a, b)?;
    let changed = TimeChanged { inner: v, alpha };
    let direct = curve_average(&changed, (a, b), tol / 2.0, budget, exec)?;
    let weights = match time_change_weights(alpha, (a, b)) {
        Ok(w) => w,
        Err(_) => {
            return Ok(TimeChangeResult {
                direct: direct.value,
                direct_error: direct.est_error,
                decomposition: None,
                decomposition_error: 0.0,
                discrepancy: 0.0,
                consistent: true,
            })
        }
    };
    let (lo, hi) = (weights.lo, weights.hi);
    let f = |t: f64| v.eval(t);
    let (table, leaves) = integrate_with_leaves(
        &f,
        &breaks_for(v, lo, hi),
        &QuadConfig::new(tol * (hi - lo) / 4.0, budget),
        exec,
    )?;
    let mut prefix = vec![vec![Complex64::new(0.0, 0.0); v.dim()]];
    for (_, _, val) in &leaves {
        let mut next = prefix.last().expect("nonempty").clone();
        for (n, x) in next.iter_mut().zip(val) {
            *n += x;
        }
        prefix.push(next);
    }
    let cumulative = Cumulative {
        v,
        leaves: leaves.iter().map(|&(l, h, _)| (l, h)).collect(),
        prefix,
    };
    let total = table.value;
    let mut value: Vec<Complex64> = total.iter().map(|z| z * (weights.w0 / (hi - lo))).collect();
    let mut decomposition_error = table.est_error / (hi - lo);
    if weights.case != KernelCase::Identity {
        let scale = weights.kappa * alpha;
        let outer = |s: f64| -> Vec<Complex64> {
            let fs = cumulative.at(s.powf(alpha));
            let w = scale * s.powf(-alpha);
            match weights.case {
                KernelCase::Contracting => {
                    total.iter().zip(&fs).map(|(t, x)| (t - x) * w).collect()
                }
                _ => fs.iter().map(|x| x * w).collect(),
            }
        };
        let breaks = breaks_for(&changed, a, b);
        let mixed = integrate(&outer, &breaks, &QuadConfig::new(tol / 4.0, budget), exec)?;
        for (v, m) in value.iter_mut().zip(&mixed.value) {
            *v += m;
        }
        decomposition_error += mixed.est_error;
    }
    let discrepancy = direct
        .value
        .iter()
        .zip(&value)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    Ok(TimeChangeResult {
        direct: direct.value,
        direct_error: direct.est_error,
        decomposition: Some(value),
        decomposition_error,
        discrepancy,
        consistent: discrepancy <= 2.0 * tol,
    })
}
