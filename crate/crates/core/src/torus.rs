//! Translation flows on tori, trigonometric-polynomial observables, and
//! character lattices of isotropy factors.

use crate::error::{from_toml, Error, Result};
use crate::fpoly::FPolyFamily;
use crate::linalg::{clear_denominators, hermite_rows, in_lattice, integer_kernel, rref};
use crate::rational::{self, format_q, parse_q, QVec, Q};
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Gaussian rational `re + i·im`.
pub type GaussQ = Complex<Q>;

/// Integer frequency vector in `ℤ^m`.
pub type Freq = Vec<i64>;

/// An exact complex number `Σ a_k e(r_k)` with Gaussian-rational amplitudes
/// and rational turns, `e(r) = exp(2πi r)`.
///
/// Turns are kept in `[0, 1/4)`; the quarter turns are absorbed into the
/// amplitude as powers of `i`. Values with only the zero turn are exactly the
/// Gaussian rationals. Structural equality implies equality of values; the
/// converse can fail through cyclotomic relations, so `is_zero` is a
/// sufficient test only when turns other than zero are present.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Phasor {
    terms: BTreeMap<Q, GaussQ>,
}

fn times_i_pow(z: GaussQ, k: u32) -> GaussQ {
    match k % 4 {
        0 => z,
        1 => Complex::new(-z.im, z.re),
        2 => Complex::new(-z.re, -z.im),
        _ => Complex::new(z.im, -z.re),
    }
}

impl Phasor {
    pub fn zero() -> Self {
        Phasor::default()
    }

    pub fn one() -> Self {
        Phasor::from_gauss(Complex::new(Q::one(), Q::zero()))
    }

    pub fn from_gauss(z: GaussQ) -> Self {
        let mut p = Phasor::zero();
        p.push(Q::zero(), z);
        p
    }

    pub fn from_parts(re: Q, im: Q) -> Self {
        Phasor::from_gauss(Complex::new(re, im))
    }

    /// `e(turn)`.
    pub fn unit(turn: &Q) -> Self {
        let mut p = Phasor::zero();
        p.push(turn.clone(), Complex::new(Q::one(), Q::zero()));
        p
    }

    fn push(&mut self, turn: Q, amp: GaussQ) {
        if amp.is_zero() {
            return;
        }
        let r = rational::fract(&turn);
        let k = (&r * Q::from_integer(BigInt::from(4))).floor().to_integer();
        let k = k.to_u32().expect("quarter index is in 0..4");
        let rest = r - rational::frac(k as i64, 4);
        let amp = times_i_pow(amp, k);
        let slot = self
            .terms
            .entry(rest.clone())
            .or_insert_with(|| Complex::new(Q::zero(), Q::zero()));
        *slot = &*slot + amp;
        if slot.is_zero() {
            self.terms.remove(&rest);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a Gaussian rational, when no nonzero turn remains.
    pub fn as_gauss(&self) -> Option<GaussQ> {
        match self.terms.len() {
            0 => Some(Complex::new(Q::zero(), Q::zero())),
            1 => self.terms.get(&Q::zero()).cloned(),
            _ => None,
        }
    }

    /// Multiplication by `e(turn)`.
    pub fn rotate(&self, turn: &Q) -> Self {
        let mut out = Phasor::zero();
        for (r, a) in &self.terms {
            out.push(r + turn, a.clone());
        }
        out
    }

    pub fn mul(&self, other: &Phasor) -> Self {
        let mut out = Phasor::zero();
        for (r1, a1) in &self.terms {
            for (r2, a2) in &other.terms {
                out.push(r1 + r2, a1 * a2);
            }
        }
        out
    }

    pub fn add(&self, other: &Phasor) -> Self {
        let mut out = self.clone();
        for (r, a) in &other.terms {
            out.push(r.clone(), a.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Phasor {
            terms: self
                .terms
                .iter()
                .map(|(r, a)| (r.clone(), -a.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Phasor) -> Self {
        self.add(&other.neg())
    }

    pub fn conj(&self) -> Self {
        let mut out = Phasor::zero();
        for (r, a) in &self.terms {
            out.push(-r, a.conj());
        }
        out
    }

    pub fn to_c64(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|(r, a)| {
                let amp = Complex64::new(rational::to_f64(&a.re), rational::to_f64(&a.im));
                amp * crate::quadrature::e(rational::to_f64(r))
            })
            .sum()
    }

    /// `Σ |a_k|`, an upper bound on the modulus.
    pub fn abs_bound(&self) -> f64 {
        self.terms
            .values()
            .map(|a| Complex64::new(rational::to_f64(&a.re), rational::to_f64(&a.im)).norm())
            .sum()
    }
}

impl fmt::Display for Phasor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (r, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(
                f,
                "({}{}{}i)",
                format_q(&a.re),
                if a.im.is_negative() { "" } else { "+" },
                format_q(&a.im)
            )?;
            if !r.is_zero() {
                write!(f, "e({})", format_q(r))?;
            }
        }
        Ok(())
    }
}

/// Finitely supported Fourier series on `𝕋^m` with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrigPoly {
    m: usize,
    terms: BTreeMap<Freq, Phasor>,
}

impl TrigPoly {
    pub fn zero(m: usize) -> Self {
        TrigPoly {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(m: usize, c: Phasor) -> Self {
        let mut p = TrigPoly::zero(m);
        p.add_term(vec![0; m], c);
        p
    }

    /// `e(χ·x)` with coefficient 1.
    pub fn character(chi: Freq) -> Self {
        let mut p = TrigPoly::zero(chi.len());
        p.add_term(chi, Phasor::one());
        p
    }

    pub fn from_terms(m: usize, terms: impl IntoIterator<Item = (Freq, Phasor)>) -> Result<Self> {
        let mut p = TrigPoly::zero(m);
        for (chi, c) in terms {
            if chi.len() != m {
                return Err(Error::Shape(format!(
                    "frequency of length {} on a torus of dimension {m}",
                    chi.len()
                )));
            }
            p.add_term(chi, c);
        }
        Ok(p)
    }

    /// Adds `c·e(χ·x)`; zero coefficients are not stored.
    pub fn add_term(&mut self, chi: Freq, c: Phasor) {
        assert_eq!(chi.len(), self.m, "frequency dimension");
        let slot = self.terms.entry(chi.clone()).or_default();
        *slot = slot.add(&c);
        if slot.is_zero() {
            self.terms.remove(&chi);
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &BTreeMap<Freq, Phasor> {
        &self.terms
    }

    pub fn coeff(&self, chi: &[i64]) -> Phasor {
        self.terms.get(chi).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> Vec<Freq> {
        self.terms.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sub(&self, other: &TrigPoly) -> Result<TrigPoly> {
        if self.m != other.m {
            return Err(Error::Shape(
                "trigonometric polynomials on different tori".into(),
            ));
        }
        let mut out = self.clone();
        for (chi, c) in &other.terms {
            out.add_term(chi.clone(), c.neg());
        }
        Ok(out)
    }

    /// `‖f‖₂² = Σ |c_χ|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_c64().norm_sqr())
            .fold(0.0, |acc, x| acc + x)
    }

    /// `Σ |c_χ|`, which bounds `‖f‖_∞`.
    pub fn sup_bound(&self) -> f64 {
        self.terms
            .values()
            .map(Phasor::abs_bound)
            .fold(0.0, |acc, x| acc + x)
    }

    pub fn to_float(&self) -> FloatTrigPoly {
        FloatTrigPoly {
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.to_c64()))
                .collect(),
        }
    }

    /// Observable file: `m` and a list of `{ freq = [..], coeff = ["re", "im"] }`.
    pub fn from_toml(text: &str, source_name: &str) -> Result<Self> {
        let doc: ObservableDocIn =
            toml::from_str(text).map_err(|e| from_toml(source_name, text, e))?;
        let mut p = TrigPoly::zero(doc.m);
        for (i, term) in doc.terms.iter().enumerate() {
            let freq = term.freq.get_ref();
            if freq.len() != doc.m {
                return Err(Error::parse_at(
                    source_name,
                    text,
                    term.freq.span().start,
                    format!(
                        "terms[{i}].freq has length {}, expected {}",
                        freq.len(),
                        doc.m
                    ),
                ));
            }
            let [re, im] = &term.coeff;
            let parse = |s: &toml::Spanned<String>, part: &str| {
                parse_q(s.get_ref()).map_err(|e| {
                    Error::parse_at(
                        source_name,
                        text,
                        s.span().start,
                        format!("terms[{i}].coeff {part}: {e}"),
                    )
                })
            };
            p.add_term(
                freq.clone(),
                Phasor::from_parts(parse(re, "re")?, parse(im, "im")?),
            );
        }
        Ok(p)
    }

    /// Fails when a coefficient is not a Gaussian rational.
    pub fn to_toml(&self) -> Result<String> {
        let terms = self
            .terms
            .iter()
            .map(|(chi, c)| {
                let z = c.as_gauss().ok_or_else(|| {
                    Error::Domain(format!("coefficient {c} is not a Gaussian rational"))
                })?;
                Ok(ObservableTermOut {
                    freq: chi.clone(),
                    coeff: [format_q(&z.re), format_q(&z.im)],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(toml::to_string(&ObservableDocOut { m: self.m, terms })
            .expect("observable documents always serialize"))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservableDocIn {
    m: usize,
    terms: Vec<ObservableTermIn>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservableTermIn {
    freq: toml::Spanned<Freq>,
    coeff: [toml::Spanned<String>; 2],
}

#[derive(Serialize)]
struct ObservableDocOut {
    m: usize,
    terms: Vec<ObservableTermOut>,
}

#[derive(Serialize)]
struct ObservableTermOut {
    freq: Freq,
    coeff: [String; 2],
}

/// Fourier series with floating-point coefficients, the output of finite
/// averages.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatTrigPoly {
    pub m: usize,
    pub terms: BTreeMap<Freq, Complex64>,
}

impl FloatTrigPoly {
    pub fn zero(m: usize) -> Self {
        FloatTrigPoly {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn coeff(&self, chi: &[i64]) -> Complex64 {
        self.terms.get(chi).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.norm_sqr())
            .fold(0.0, |acc, x| acc + x)
    }

    /// `‖self − other‖₂²` by Parseval over the union of supports.
    pub fn dist_sqr(&self, other: &FloatTrigPoly) -> f64 {
        let mut s = 0.0;
        for (chi, a) in &self.terms {
            s += (a - other.coeff(chi)).norm_sqr();
        }
        for (chi, b) in &other.terms {
            if !self.terms.contains_key(chi) {
                s += b.norm_sqr();
            }
        }
        s
    }

    pub fn dist(&self, other: &FloatTrigPoly) -> f64 {
        self.dist_sqr(other).sqrt()
    }
}

/// The `ℝ^D`-action `τ^w x = x + A w (mod 1)` on `𝕋^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusSystem {
    m: usize,
    d: usize,
    /// `m` rows of length `D`.
    a: Vec<QVec>,
}

impl TorusSystem {
    pub fn new(a: Vec<QVec>) -> Result<Self> {
        let m = a.len();
        let d = a.first().map_or(0, Vec::len);
        if m == 0 || d == 0 {
            return Err(Error::Domain(
                "the embedding matrix must be nonempty".into(),
            ));
        }
        if a.iter().any(|r| r.len() != d) {
            return Err(Error::Shape("ragged embedding matrix".into()));
        }
        Ok(TorusSystem { m, d, a })
    }

    pub fn identity(m: usize) -> Self {
        TorusSystem::new((0..m).map(|i| rational::unit(m, i)).collect()).expect("m >= 1")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn acting_dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &[QVec] {
        &self.a
    }

    /// `A w`.
    pub fn apply(&self, w: &[Q]) -> Result<QVec> {
        if w.len() != self.d {
            return Err(Error::Shape(format!(
                "vector of length {} for an action of ℝ^{}",
                w.len(),
                self.d
            )));
        }
        Ok(self.a.iter().map(|row| rational::dot(row, w)).collect())
    }

    /// `χᵀ A w` for `Aw` precomputed.
    pub fn pair(chi: &[i64], aw: &[Q]) -> Q {
        chi.iter()
            .zip(aw)
            .filter(|(c, _)| **c != 0)
            .fold(Q::zero(), |acc, (c, x)| {
                acc + x * Q::from_integer(BigInt::from(*c))
            })
    }

    /// `f ∘ τ^w`: each coefficient `c_χ` becomes `c_χ e(χᵀ A w)`.
    pub fn act(&self, w: &[Q], f: &TrigPoly) -> Result<TrigPoly> {
        if f.m != self.m {
            return Err(Error::Shape("observable lives on a different torus".into()));
        }
        let aw = self.apply(w)?;
        Ok(TrigPoly {
            m: self.m,
            terms: f
                .terms
                .iter()
                .map(|(chi, c)| (chi.clone(), c.rotate(&Self::pair(chi, &aw))))
                .collect(),
        })
    }

    /// As [`TorusSystem::act`] for a floating-point `w`, converted exactly.
    pub fn act_f64(&self, w: &[f64], f: &TrigPoly) -> Result<TrigPoly> {
        let w = w
            .iter()
            .map(|&x| {
                rational::from_f64(x).ok_or_else(|| Error::Domain(format!("non-finite entry {x}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.act(&w, f)
    }

    /// Characters fixed by the subaction of `V = span(basis)`:
    /// `{χ ∈ ℤ^m : χᵀ A v = 0 for every basis vector v}`.
    pub fn isotropy_lattice(&self, basis: &[QVec]) -> Result<CharacterLattice> {
        let constraints = basis
            .iter()
            .map(|v| self.apply(v).map(|av| clear_denominators(&av)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CharacterLattice {
            m: self.m,
            basis: integer_kernel(&constraints, self.m),
        })
    }

    /// System file: `m`, `D`, and `A` as rows of rational strings.
    pub fn from_toml(text: &str, source_name: &str) -> Result<Self> {
        let doc: SystemDocIn = toml::from_str(text).map_err(|e| from_toml(source_name, text, e))?;
        if doc.a.len() != doc.m {
            return Err(Error::parse_at(
                source_name,
                text,
                0,
                format!("A has {} rows, expected m = {}", doc.a.len(), doc.m),
            ));
        }
        let mut rows = Vec::with_capacity(doc.m);
        for (i, row) in doc.a.iter().enumerate() {
            if row.len() != doc.d {
                return Err(Error::parse_at(
                    source_name,
                    text,
                    row.first().map_or(0, |s| s.span().start),
                    format!("A[{i}] has {} entries, expected D = {}", row.len(), doc.d),
                ));
            }
            let parsed = row
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    parse_q(s.get_ref()).map_err(|e| {
                        Error::parse_at(
                            source_name,
                            text,
                            s.span().start,
                            format!("A[{i}][{j}]: {e}"),
                        )
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(parsed);
        }
        TorusSystem::new(rows).map_err(|e| Error::parse_at(source_name, text, 0, e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        let doc = SystemDocOut {
            m: self.m,
            d: self.d,
            a: self
                .a
                .iter()
                .map(|r| r.iter().map(format_q).collect())
                .collect(),
        };
        toml::to_string(&doc).expect("system documents always serialize")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDocIn {
    m: usize,
    #[serde(rename = "D")]
    d: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<toml::Spanned<String>>>,
}

#[derive(Serialize)]
struct SystemDocOut {
    m: usize,
    #[serde(rename = "D")]
    d: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
}

/// A subgroup of `ℤ^m`, stored as the rows of its Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharacterLattice {
    m: usize,
    basis: Vec<Vec<BigInt>>,
}

impl CharacterLattice {
    pub fn full(m: usize) -> Self {
        let gens: Vec<Vec<BigInt>> = (0..m)
            .map(|i| (0..m).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        CharacterLattice::from_generators(m, &gens)
    }

    pub fn zero(m: usize) -> Self {
        CharacterLattice {
            m,
            basis: Vec::new(),
        }
    }

    pub fn from_generators(m: usize, gens: &[Vec<BigInt>]) -> Self {
        CharacterLattice {
            m,
            basis: hermite_rows(gens, m),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, chi: &[i64]) -> bool {
        chi.len() == self.m
            && in_lattice(
                &self.basis,
                &chi.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>(),
            )
    }

    pub fn is_sublattice_of(&self, other: &CharacterLattice) -> bool {
        self.m == other.m && self.basis.iter().all(|b| in_lattice(&other.basis, b))
    }

    /// `(L ⊗ ℚ) ∩ ℤ^m`, the smallest saturated lattice containing `L`.
    pub fn saturation(&self) -> Self {
        if self.basis.is_empty() {
            return self.clone();
        }
        let complement = integer_kernel(&self.basis, self.m);
        if complement.is_empty() {
            return CharacterLattice::full(self.m);
        }
        CharacterLattice {
            m: self.m,
            basis: integer_kernel(&complement, self.m),
        }
    }

    /// `ℤ^m / L` is torsion-free.
    pub fn is_saturated(&self) -> bool {
        self.saturation() == *self
    }

    /// Subgroup generated by both lattices.
    pub fn join(&self, other: &CharacterLattice) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::Shape(format!(
                "lattices in ℤ^{} and ℤ^{}",
                self.m, other.m
            )));
        }
        let gens: Vec<Vec<BigInt>> = self.basis.iter().chain(&other.basis).cloned().collect();
        Ok(CharacterLattice::from_generators(self.m, &gens))
    }

    /// Intersection, from the integer relations `x B₁ = y B₂`.
    pub fn meet(&self, other: &CharacterLattice) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::Shape(format!(
                "lattices in ℤ^{} and ℤ^{}",
                self.m, other.m
            )));
        }
        let (r1, r2) = (self.basis.len(), other.basis.len());
        if r1 == 0 || r2 == 0 {
            return Ok(CharacterLattice::zero(self.m));
        }
        // Columns of [B₁; −B₂] give one constraint per coordinate.
        let constraints: Vec<Vec<BigInt>> = (0..self.m)
            .map(|c| {
                self.basis
                    .iter()
                    .map(|row| row[c].clone())
                    .chain(other.basis.iter().map(|row| -&row[c]))
                    .collect()
            })
            .collect();
        let relations = integer_kernel(&constraints, r1 + r2);
        let gens: Vec<Vec<BigInt>> = relations
            .iter()
            .map(|rel| {
                (0..self.m)
                    .map(|c| {
                        rel[..r1]
                            .iter()
                            .zip(&self.basis)
                            .map(|(x, row)| x * &row[c])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Ok(CharacterLattice::from_generators(self.m, &gens))
    }
}

/// Join of one or more lattices.
pub fn lattice_join(lattices: &[CharacterLattice]) -> Result<CharacterLattice> {
    let (first, rest) = lattices
        .split_first()
        .ok_or_else(|| Error::Domain("lattice_join needs at least one lattice".into()))?;
    rest.iter().try_fold(first.clone(), |acc, l| acc.join(l))
}

/// Conditional expectation onto the factor with character group `l`: keeps
/// the terms whose frequency lies in `l`.
pub fn project_factor(f: &TrigPoly, l: &CharacterLattice) -> TrigPoly {
    TrigPoly {
        m: f.m,
        terms: f
            .terms
            .iter()
            .filter(|(chi, _)| l.contains(chi))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect(),
    }
}

/// `ζ_{ℝ v_{k,d}} ∨ ⋁_{i<k} ζ_{V(φ_i − φ_k)}` for a good family whose last
/// member is top-degree.
pub fn xi_factor(sys: &TorusSystem, fam: &FPolyFamily) -> Result<CharacterLattice> {
    if fam.ambient_dim() != sys.acting_dim() {
        return Err(Error::Shape(format!(
            "family in ℝ^{} for an action of ℝ^{}",
            fam.ambient_dim(),
            sys.acting_dim()
        )));
    }
    if !fam.is_good() {
        return Err(Error::Domain("ξ is defined for good families only".into()));
    }
    let last = fam
        .members()
        .last()
        .ok_or_else(|| Error::Domain("empty family".into()))?;
    if !last.is_top_degree() {
        return Err(Error::Domain(
            "the last member of the family must be top-degree".into(),
        ));
    }
    let lead = last.coeff(fam.height()).clone();
    let mut parts = vec![sys.isotropy_lattice(&[lead])?];
    for member in &fam.members()[..fam.len() - 1] {
        let diff = member.subtract(last)?;
        parts.push(sys.isotropy_lattice(&diff.span_v())?);
    }
    lattice_join(&parts)
}

/// Canonical basis of a rational subspace, for comparing subspaces.
pub fn subspace_basis(gens: &[QVec]) -> Vec<QVec> {
    rref(gens)
}
