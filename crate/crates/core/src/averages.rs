//! Multiple ergodic averages of fractional polynomial flows on tori, their
//! exact limits, Furstenberg self-joining moments, and the diagnostics built
//! on them.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fpoly::FPolyFamily;
use crate::interval::TemperedSequence;
use crate::quadrature::{self, fractional_phase_average, gauss_legendre, PowerPhase, QuadFailure};
use crate::rational::{self, QVec, Q};
use crate::torus::{
    project_factor, xi_factor, CharacterLattice, FloatTrigPoly, Freq, Phasor, TorusSystem, TrigPoly,
};
use num_complex::Complex64;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Quadrature settings for finite averages. `tol` bounds the error of each
/// oscillatory average; `budget` caps evaluations per average.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AverageConfig {
    pub tol: f64,
    pub budget: u64,
}

impl Default for AverageConfig {
    fn default() -> Self {
        AverageConfig {
            tol: 1e-8,
            budget: 10_000_000,
        }
    }
}

/// One term of the expansion of `Π_i f_i ∘ τ^{φ_i(t)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyTuple {
    pub chis: Vec<Freq>,
    /// `Σ_i χ_i`
    pub output: Freq,
    /// `Π_i c_{χ_i}`
    pub coeff: Phasor,
    /// `c_j = Σ_i χ_iᵀ A v_{i,j}` for `j = 1..=d`.
    pub phase: QVec,
}

impl FrequencyTuple {
    pub fn is_resonant(&self) -> bool {
        self.phase.iter().all(Zero::is_zero)
    }

    pub fn phase_f64(&self) -> Vec<f64> {
        self.phase.iter().map(rational::to_f64).collect()
    }
}

fn check_shapes(sys: &TorusSystem, fam: &FPolyFamily, fs: &[TrigPoly]) -> Result<()> {
    if fs.len() != fam.len() {
        return Err(Error::Shape(format!(
            "{} observables for a family of {} members",
            fs.len(),
            fam.len()
        )));
    }
    if fam.ambient_dim() != sys.acting_dim() {
        return Err(Error::Shape(format!(
            "family in ℝ^{} for an action of ℝ^{}",
            fam.ambient_dim(),
            sys.acting_dim()
        )));
    }
    if let Some(f) = fs.iter().find(|f| f.m() != sys.m()) {
        return Err(Error::Shape(format!(
            "observable on 𝕋^{} for a system on 𝕋^{}",
            f.m(),
            sys.m()
        )));
    }
    Ok(())
}

/// `images[i][j] = A v_{i,j+1}`.
fn images(sys: &TorusSystem, fam: &FPolyFamily) -> Result<Vec<Vec<QVec>>> {
    fam.members()
        .iter()
        .map(|p| p.coeffs().iter().map(|v| sys.apply(v)).collect())
        .collect()
}

/// All frequency tuples in lexicographic order of term indices (the first
/// observable varies slowest). `rotation(i, χ)` is an extra turn applied to
/// the coefficient of `χ` in `f_i`.
fn enumerate_tuples(
    sys: &TorusSystem,
    fam: &FPolyFamily,
    fs: &[TrigPoly],
    rotation: &dyn Fn(usize, &[i64]) -> Q,
) -> Result<Vec<FrequencyTuple>> {
    check_shapes(sys, fam, fs)?;
    let imgs = images(sys, fam)?;
    let terms: Vec<Vec<(&Freq, &Phasor)>> = fs.iter().map(|f| f.terms().iter().collect()).collect();
    if terms.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }
    let d = fam.height() as usize;
    let m = sys.m();
    let mut out = Vec::new();
    let mut idx = vec![0usize; terms.len()];
    loop {
        let mut output = vec![0i64; m];
        let mut coeff = Phasor::one();
        let mut phase = rational::zeros(d);
        let mut chis = Vec::with_capacity(terms.len());
        for (i, &k) in idx.iter().enumerate() {
            let (chi, c) = terms[i][k];
            for (o, x) in output.iter_mut().zip(chi) {
                *o += x;
            }
            let turn = rotation(i, chi);
            let c = if turn.is_zero() {
                c.clone()
            } else {
                c.rotate(&turn)
            };
            coeff = coeff.mul(&c);
            for (j, slot) in phase.iter_mut().enumerate() {
                *slot += TorusSystem::pair(chi, &imgs[i][j]);
            }
            chis.push(chi.clone());
        }
        out.push(FrequencyTuple {
            chis,
            output,
            coeff,
            phase,
        });
        // odometer, last index fastest
        let mut pos = terms.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < terms[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

pub fn frequency_tuples(
    sys: &TorusSystem,
    fam: &FPolyFamily,
    fs: &[TrigPoly],
) -> Result<Vec<FrequencyTuple>> {
    enumerate_tuples(sys, fam, fs, &|_, _| Q::zero())
}

/// `A_I(f_1, …, f_k)` in Fourier coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct AverageResult {
    pub value: FloatTrigPoly,
    pub interval: (f64, f64),
    /// Largest per-coefficient error bound.
    pub est_error: f64,
    pub evaluations: u64,
}

/// Average over `(a, b)` of `Π_i f_i ∘ τ^{φ_i(t)}`. Each frequency tuple
/// contributes `(Π c_{χ_i}) · avg e(θ(t))` at `Σ χ_i`; resonant tuples
/// (θ ≡ 0) contribute their coefficient exactly.
pub fn multiple_average(
    sys: &TorusSystem,
    fam: &FPolyFamily,
    fs: &[TrigPoly],
    (a, b): (f64, f64),
    cfg: AverageConfig,
    exec: Exec,
) -> Result<AverageResult> {
    if !(cfg.tol > 0.0) {
        return Err(Error::Domain("tol must be positive".into()));
    }
    if !(a.is_finite() && b.is_finite() && a >= 0.0 && a < b) {
        return Err(Error::Domain(format!(
            "interval ({a}, {b}) must satisfy 0 <= a < b"
        )));
    }
    let tuples = frequency_tuples(sys, fam, fs)?;
    let averages: Vec<std::result::Result<quadrature::QuadOutcome<Complex64>, QuadFailure>> = exec
        .map(&tuples, |t| {
            fractional_phase_average(&t.phase_f64(), a, b, cfg.tol, cfg.budget, exec)
        });
    let mut value: BTreeMap<Freq, Complex64> = BTreeMap::new();
    let mut errors: BTreeMap<Freq, f64> = BTreeMap::new();
    let mut evaluations = 0;
    let mut failure: Option<QuadFailure> = None;
    for (t, avg) in tuples.iter().zip(averages) {
        let (v, err) = match avg {
            Ok(o) => {
                evaluations += o.evaluations;
                (o.value, o.est_error)
            }
            Err(f) => {
                evaluations += f.evaluations;
                let v = f.partial[0];
                let err = f.achieved;
                if failure.as_ref().is_none_or(|g| f.achieved > g.achieved) {
                    failure = Some(f);
                }
                (v, err)
            }
        };
        let c = t.coeff.to_c64();
        *value.entry(t.output.clone()).or_default() += c * v;
        *errors.entry(t.output.clone()).or_default() += c.norm() * err;
    }
    let est_error = errors.values().copied().fold(0.0, f64::max);
    if let Some(f) = failure {
        return Err(Error::Quadrature(QuadFailure {
            partial: value.values().copied().collect(),
            achieved: est_error,
            tol: f.tol,
            evaluations,
        }));
    }
    Ok(AverageResult {
        value: FloatTrigPoly {
            m: sys.m(),
            terms: value,
        },
        interval: (a, b),
        est_error,
        evaluations,
    })
}

/// Limit of `avg e(Σ c_j t^{j/d})` along tempered sequences: 1 when every
/// `c_j` vanishes, 0 otherwise. The test is exact.
pub fn weyl_limit(coeffs: &[Q]) -> Q {
    if coeffs.iter().all(Zero::is_zero) {
        Q::one()
    } else {
        Q::zero()
    }
}

/// Exact limit of [`multiple_average`]: the resonant tuples only.
pub fn symbolic_limit(sys: &TorusSystem, fam: &FPolyFamily, fs: &[TrigPoly]) -> Result<TrigPoly> {
    let mut out = TrigPoly::zero(sys.m());
    for t in frequency_tuples(sys, fam, fs)? {
        if t.is_resonant() {
            out.add_term(t.output, t.coeff);
        }
    }
    Ok(out)
}

/// Off-diagonal flow at coordinate `j` (1-based, `j <= d`) for time `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shift {
    pub j: u32,
    pub t: Q,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentQuery {
    pub f0: TrigPoly,
    pub fs: Vec<TrigPoly>,
    pub fam: FPolyFamily,
    pub shift: Option<Shift>,
}

/// `∫ f_0 ⊗ f_1 ⊗ … ⊗ f_k dμ^F`: the sum over resonant tuples of
/// `c_{χ_0} Π c_{χ_i}` with `χ_0 = −Σ χ_i`. With a shift, each `c_{χ_i}`
/// (`i >= 1`) is first multiplied by `e(t χ_iᵀ A v_{i,j})`.
pub fn furstenberg_moment(sys: &TorusSystem, q: &MomentQuery) -> Result<Phasor> {
    if !q.fam.is_good() {
        return Err(Error::Domain(
            "moments are defined for good families".into(),
        ));
    }
    if q.f0.m() != sys.m() {
        return Err(Error::Shape("f_0 lives on a different torus".into()));
    }
    let imgs = images(sys, &q.fam)?;
    let rotation = |i: usize, chi: &[i64]| -> Q {
        match &q.shift {
            Some(s) => &s.t * TorusSystem::pair(chi, &imgs[i][s.j as usize - 1]),
            None => Q::zero(),
        }
    };
    if let Some(s) = &q.shift {
        if s.j == 0 || s.j > q.fam.height() {
            return Err(Error::Domain(format!(
                "shift coordinate {} outside 1..={}",
                s.j,
                q.fam.height()
            )));
        }
    }
    let mut total = Phasor::zero();
    for t in enumerate_tuples(sys, &q.fam, &q.fs, &rotation)? {
        if !t.is_resonant() {
            continue;
        }
        let chi0: Freq = t.output.iter().map(|x| -x).collect();
        let c0 = q.f0.coeff(&chi0);
        if !c0.is_zero() {
            total = total.add(&c0.mul(&t.coeff));
        }
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticConfig {
    pub average: AverageConfig,
    /// Pass threshold on the final distance to the exact limit.
    pub threshold: f64,
}

impl Default for DiagnosticConfig {
    fn default() -> Self {
        DiagnosticConfig {
            average: AverageConfig::default(),
            threshold: 1e-2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: u64,
    pub a: f64,
    pub b: f64,
    /// `‖A_{I_n} − L‖₂`
    pub distance: f64,
    /// `‖A_{I_n} − A_{I_{n−1}}‖₂`, absent for the first row.
    pub cauchy_diff: Option<f64>,
    pub max_coeff_err: f64,
    /// Number of output frequencies (for error propagation).
    pub support: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Set when quadrature failed; rows stop before the failing `n`.
    pub truncation: Option<String>,
    pub limit: TrigPoly,
    pub threshold: f64,
    pub passed: bool,
}

impl ConvergenceReport {
    pub fn final_distance(&self) -> Option<f64> {
        self.rows.last().map(|r| r.distance)
    }

    /// Cauchy differences are non-increasing from row `skip` on. Increases
    /// smaller than the propagated quadrature error count as ties.
    pub fn cauchy_monotone_after(&self, skip: usize) -> bool {
        self.rows.windows(2).enumerate().skip(skip).all(|(i, w)| {
            let (Some(prev), Some(next)) = (w[0].cauchy_diff, w[1].cauchy_diff) else {
                return true;
            };
            let before = if i > 0 {
                self.rows[i - 1].max_coeff_err
            } else {
                0.0
            };
            let noise = 2.0
                * (w[1].support.max(w[0].support) as f64).sqrt()
                * (before + w[0].max_coeff_err + w[1].max_coeff_err);
            next <= prev + noise
        })
    }
}

/// Averages along `I_1, …, I_{n_max}` compared with the exact limit.
pub fn convergence_diagnostic(
    sys: &TorusSystem,
    fam: &FPolyFamily,
    fs: &[TrigPoly],
    seq: &TemperedSequence,
    n_max: u64,
    cfg: DiagnosticConfig,
    exec: Exec,
) -> Result<ConvergenceReport> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let limit = symbolic_limit(sys, fam, fs)?;
    let exact = limit.to_float();
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    let mut previous: Option<FloatTrigPoly> = None;
    let mut truncation = None;
    for n in 1..=n_max {
        let interval = seq.interval(n)?;
        let avg = match multiple_average(sys, fam, fs, interval, cfg.average, exec) {
            Ok(r) => r,
            Err(Error::Quadrature(f)) => {
                truncation = Some(format!("truncated at n = {n}: {f}"));
                break;
            }
            Err(e) => return Err(e),
        };
        rows.push(ConvergenceRow {
            n,
            a: interval.0,
            b: interval.1,
            distance: avg.value.dist(&exact),
            cauchy_diff: previous.as_ref().map(|p| avg.value.dist(p)),
            max_coeff_err: avg.est_error,
            support: avg.value.terms.len().max(1),
        });
        previous = Some(avg.value);
    }
    let passed = truncation.is_none() && rows.last().is_some_and(|r| r.distance < cfg.threshold);
    Ok(ConvergenceReport {
        rows,
        truncation,
        limit,
        threshold: cfg.threshold,
        passed,
    })
}

/// Both sides of the van der Corput inequality for
/// `u(t) = Π f_i ∘ τ^{φ_i(t)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct VdcReport {
    /// `‖avg_{(0,T)} u‖₂²`
    pub lhs: f64,
    /// `avg_{h ∈ [0,H]} |avg_{(0,T)} ⟨u(t+h), u(t)⟩|`
    pub rhs: f64,
    /// `C (H/T + 1/H)` with `C = VDC_CONSTANT · Π (Σ_χ |c_χ|)²`.
    pub slack: f64,
    /// `rhs − lhs`
    pub margin: f64,
    pub passed: bool,
}

/// Absolute constant in the van der Corput slack.
pub const VDC_CONSTANT: f64 = 8.0;

/// Panels of the fixed composite Gauss rule used for the average over `h`.
pub const VDC_H_PANELS: usize = 8;

/// Passes iff `lhs <= rhs + slack`. The `h`-average uses a fixed composite
/// Gauss rule; the inner `t`-averages are adaptive.
pub fn vdc_bound_check(
    sys: &TorusSystem,
    fam: &FPolyFamily,
    fs: &[TrigPoly],
    t_max: f64,
    h_max: f64,
    cfg: AverageConfig,
    exec: Exec,
) -> Result<VdcReport> {
    if !(t_max > 0.0 && h_max > 0.0) {
        return Err(Error::Domain("T and H must be positive".into()));
    }
    let avg = multiple_average(sys, fam, fs, (0.0, t_max), cfg, exec)?;
    let lhs = avg.value.norm_sqr();

    let tuples = frequency_tuples(sys, fam, fs)?;
    let height = fam.height();
    let phases: Vec<(PowerPhase, Complex64)> = tuples
        .iter()
        .map(|t| {
            (
                PowerPhase::fractional(&t.phase_f64(), height),
                t.coeff.to_c64(),
            )
        })
        .collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (i, a) in tuples.iter().enumerate() {
        for (j, b) in tuples.iter().enumerate() {
            if a.output == b.output {
                pairs.push((i, j));
            }
        }
    }
    let (x, w) = gauss_legendre();
    let width = h_max / VDC_H_PANELS as f64;
    let nodes: Vec<(f64, f64)> = (0..VDC_H_PANELS)
        .flat_map(|p| {
            let c = (p as f64 + 0.5) * width;
            x.iter()
                .zip(w)
                .map(move |(x, w)| (c + 0.5 * width * x, 0.5 * width * w))
        })
        .collect();
    let correlations = exec.map(&nodes, |&(h, _)| -> std::result::Result<f64, QuadFailure> {
        let mut inner = Complex64::new(0.0, 0.0);
        for &(i, j) in &pairs {
            let (p1, c1) = &phases[i];
            let (p2, c2) = &phases[j];
            let psi = p1.shifted_difference(h, p2);
            let v = quadrature::phase_average(&psi, 0.0, t_max, cfg.tol, cfg.budget, Exec::Serial)?;
            inner += c1 * c2.conj() * v.value;
        }
        Ok(inner.norm())
    });
    let mut rhs = 0.0;
    for (&(_, wt), c) in nodes.iter().zip(correlations) {
        rhs += wt * c?;
    }
    rhs /= h_max;
    let bound: f64 = fs.iter().map(|f| f.sup_bound().powi(2)).product();
    let slack = VDC_CONSTANT * bound * (h_max / t_max + 1.0 / h_max);
    Ok(VdcReport {
        lhs,
        rhs,
        slack,
        margin: rhs - lhs,
        passed: lhs <= rhs + slack,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Agree,
    Disagree,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicReport {
    pub verdict: Verdict,
    /// `‖L − L'‖₂`
    pub distance: f64,
    pub xi: CharacterLattice,
    /// Resonant tuples whose last frequency lies outside `ξ`.
    pub witnesses: Vec<Vec<Freq>>,
}

/// Compares the exact limit with the one obtained after projecting `f_k`
/// onto `ξ`. Disagreement is reported, not raised.
pub fn partially_characteristic_check(
    sys: &TorusSystem,
    fam: &FPolyFamily,
    fs: &[TrigPoly],
) -> Result<CharacteristicReport> {
    check_shapes(sys, fam, fs)?;
    let xi = xi_factor(sys, fam)?;
    let full = symbolic_limit(sys, fam, fs)?;
    let mut projected_fs = fs.to_vec();
    let last = projected_fs.last_mut().expect("family is nonempty");
    *last = project_factor(last, &xi);
    let projected = symbolic_limit(sys, fam, &projected_fs)?;
    let diff = full.sub(&projected)?;
    let witnesses = frequency_tuples(sys, fam, fs)?
        .into_iter()
        .filter(|t| t.is_resonant() && !xi.contains(t.chis.last().expect("nonempty")))
        .map(|t| t.chis)
        .collect();
    Ok(CharacteristicReport {
        verdict: if diff.is_zero() {
            Verdict::Agree
        } else {
            Verdict::Disagree
        },
        distance: diff.norm_sqr().sqrt(),
        xi,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpoly::FPoly;
    use crate::rational::{frac, q, qvec};
    use std::f64::consts::TAU;

    fn linear_pair() -> (TorusSystem, FPolyFamily) {
        let fam = FPolyFamily::new(vec![
            FPoly::new(1, 2, vec![qvec(&[1, 0])]).unwrap(),
            FPoly::new(1, 2, vec![qvec(&[0, 1])]).unwrap(),
        ])
        .unwrap();
        (TorusSystem::identity(2), fam)
    }

    fn one(m: usize) -> TrigPoly {
        TrigPoly::constant(m, Phasor::one())
    }

    #[test]
    fn constants_average_to_one_exactly() {
        let (sys, fam) = linear_pair();
        let r = multiple_average(
            &sys,
            &fam,
            &[one(2), one(2)],
            (0.0, 50.0),
            AverageConfig::default(),
            Exec::Serial,
        )
        .unwrap();
        assert_eq!(r.value.terms.len(), 1);
        assert_eq!(r.value.coeff(&[0, 0]), Complex64::new(1.0, 0.0));
        assert_eq!(
            symbolic_limit(&sys, &fam, &[one(2), one(2)]).unwrap(),
            one(2)
        );
    }

    #[test]
    fn single_linear_orbit() {
        let sys = TorusSystem::identity(1);
        let fam = FPolyFamily::new(vec![FPoly::new(1, 1, vec![qvec(&[1])]).unwrap()]).unwrap();
        let f = TrigPoly::character(vec![1]);
        let t = 123.37;
        let r = multiple_average(
            &sys,
            &fam,
            &[f.clone()],
            (0.0, t),
            AverageConfig::default(),
            Exec::Serial,
        )
        .unwrap();
        let i = Complex64::new(0.0, 1.0);
        let want = ((i * TAU * t).exp() - 1.0) / (i * TAU * t);
        assert!((r.value.coeff(&[1]) - want).norm() < 1e-8);
        assert!(symbolic_limit(&sys, &fam, &[f]).unwrap().is_zero());
    }

    #[test]
    fn resonant_pair() {
        let (sys, fam) = linear_pair();
        let fs = [
            TrigPoly::character(vec![1, 0]),
            TrigPoly::character(vec![0, -1]),
        ];
        let r = multiple_average(
            &sys,
            &fam,
            &fs,
            (3.0, 40.0),
            AverageConfig::default(),
            Exec::Serial,
        )
        .unwrap();
        assert_eq!(r.value.coeff(&[1, -1]), Complex64::new(1.0, 0.0));
        let l = symbolic_limit(&sys, &fam, &fs).unwrap();
        assert_eq!(l, TrigPoly::character(vec![1, -1]));
        let q = MomentQuery {
            f0: TrigPoly::character(vec![-1, 1]),
            fs: fs.to_vec(),
            fam: fam.clone(),
            shift: None,
        };
        assert_eq!(furstenberg_moment(&sys, &q).unwrap(), Phasor::one());
        let shifted = MomentQuery {
            shift: Some(Shift {
                j: 1,
                t: frac(1, 3),
            }),
            ..q
        };
        assert_eq!(furstenberg_moment(&sys, &shifted).unwrap(), Phasor::one());
        let report = partially_characteristic_check(&sys, &fam, &fs).unwrap();
        assert_eq!(report.verdict, Verdict::Agree);
    }

    #[test]
    fn weyl_oracle() {
        assert_eq!(weyl_limit(&[q(0), q(0)]), q(1));
        assert_eq!(weyl_limit(&[q(0), q(1)]), q(0));
        assert_eq!(weyl_limit(&[frac(1, 1_000_000_007), q(0)]), q(0));
    }

    #[test]
    fn moment_of_constants_is_one() {
        let (sys, fam) = linear_pair();
        let q = MomentQuery {
            f0: one(2),
            fs: vec![one(2), one(2)],
            fam,
            shift: Some(Shift { j: 1, t: q(7) }),
        };
        assert_eq!(furstenberg_moment(&sys, &q).unwrap(), Phasor::one());
    }

    #[test]
    fn vdc_constant_and_resonant() {
        let (sys, fam) = linear_pair();
        let r = vdc_bound_check(
            &sys,
            &fam,
            &[one(2), one(2)],
            100.0,
            10.0,
            AverageConfig::default(),
            Exec::Serial,
        )
        .unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-12);
        assert!(r.margin.abs() < 1e-12 && r.passed);
        let fs = [
            TrigPoly::character(vec![1, 0]),
            TrigPoly::character(vec![0, -1]),
        ];
        let r = vdc_bound_check(
            &sys,
            &fam,
            &fs,
            100.0,
            10.0,
            AverageConfig::default(),
            Exec::Serial,
        )
        .unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-9 && (r.rhs - 1.0).abs() < 1e-9);
    }

    #[test]
    fn characteristic_precondition() {
        let sys = TorusSystem::identity(2);
        let fam = FPolyFamily::new(vec![
            FPoly::new(2, 2, vec![qvec(&[1, 0]), qvec(&[0, 0])]).unwrap()
        ])
        .unwrap();
        let err = partially_characteristic_check(&sys, &fam, &[TrigPoly::character(vec![1, 0])]);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn shapes_are_checked() {
        let (sys, fam) = linear_pair();
        assert!(matches!(
            symbolic_limit(&sys, &fam, &[one(2)]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            symbolic_limit(&sys, &fam, &[one(2), one(3)]),
            Err(Error::Shape(_))
        ));
    }
}
