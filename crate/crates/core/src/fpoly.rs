//! Fractional polynomials `t ↦ Σ_{j=1}^d t^{j/d} v_j` with exact rational
//! coefficient vectors, and families of them.

use crate::error::{from_toml, Error, Result};
use crate::linalg;
use crate::rational::{self, format_q, is_zero_vec, parse_q, QVec, Q};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// A degree `j/d`, kept unreduced so the height stays visible. Comparison and
/// equality are by value, so `1/2 == 2/4`.
#[derive(Clone, Copy, Debug)]
pub struct Degree {
    pub num: u32,
    pub den: u32,
}

impl Degree {
    pub const ZERO: Degree = Degree { num: 0, den: 1 };

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_one(self) -> bool {
        self.num == self.den
    }

    pub fn to_q(self) -> Q {
        rational::frac(self.num as i64, self.den as i64)
    }
}

impl PartialEq for Degree {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Degree {}

impl PartialOrd for Degree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Degree {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u64 * other.den as u64).cmp(&(other.num as u64 * self.den as u64))
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_q(&self.to_q()))
    }
}

/// One fractional polynomial of a declared height.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FPoly {
    height: u32,
    ambient_dim: usize,
    /// `coeffs[j - 1]` is the coefficient of `t^{j/height}`.
    coeffs: Vec<QVec>,
}

impl FPoly {
    pub fn new(height: u32, ambient_dim: usize, coeffs: Vec<QVec>) -> Result<Self> {
        if height == 0 || ambient_dim == 0 {
            return Err(Error::Domain(
                "height and ambient dimension must be positive".into(),
            ));
        }
        if coeffs.len() != height as usize {
            return Err(Error::Shape(format!(
                "height {height} needs {height} coefficient vectors, got {}",
                coeffs.len()
            )));
        }
        if let Some(bad) = coeffs.iter().find(|v| v.len() != ambient_dim) {
            return Err(Error::Shape(format!(
                "coefficient vector of length {} in ambient dimension {ambient_dim}",
                bad.len()
            )));
        }
        Ok(FPoly {
            height,
            ambient_dim,
            coeffs,
        })
    }

    pub fn zero(height: u32, ambient_dim: usize) -> Self {
        FPoly {
            height,
            ambient_dim,
            coeffs: vec![rational::zeros(ambient_dim); height as usize],
        }
    }

    /// Builds `Σ t^{j/height} v` over the given `(j, v)` terms, `1 <= j <= height`.
    pub fn from_terms(height: u32, ambient_dim: usize, terms: &[(u32, QVec)]) -> Result<Self> {
        let mut p = FPoly::zero(height, ambient_dim);
        for (j, v) in terms {
            if *j == 0 || *j > height {
                return Err(Error::Domain(format!(
                    "exponent index {j} outside 1..={height}"
                )));
            }
            if v.len() != ambient_dim {
                return Err(Error::Shape(format!(
                    "vector of length {} in dimension {ambient_dim}",
                    v.len()
                )));
            }
            p.coeffs[*j as usize - 1] = v.clone();
        }
        Ok(p)
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn coeffs(&self) -> &[QVec] {
        &self.coeffs
    }

    /// Coefficient of `t^{j/d}` (1-based `j`).
    pub fn coeff(&self, j: u32) -> &QVec {
        &self.coeffs[j as usize - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|v| is_zero_vec(v))
    }

    /// Largest `j` with `v_j != 0`, or 0 for the zero map.
    pub fn leading_index(&self) -> u32 {
        self.coeffs
            .iter()
            .rposition(|v| !is_zero_vec(v))
            .map_or(0, |i| i as u32 + 1)
    }

    pub fn degree(&self) -> Degree {
        match self.leading_index() {
            0 => Degree::ZERO,
            j => Degree {
                num: j,
                den: self.height,
            },
        }
    }

    pub fn is_top_degree(&self) -> bool {
        self.leading_index() == self.height
    }

    /// `Σ_j t^{j/d} v_j` in floating point.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!(
                "f-polynomials are evaluated at t >= 0, got {t}"
            )));
        }
        let d = self.height as f64;
        let mut out = vec![0.0; self.ambient_dim];
        for (j, v) in self.coeffs.iter().enumerate() {
            if is_zero_vec(v) {
                continue;
            }
            let w = t.powf((j + 1) as f64 / d);
            for (o, x) in out.iter_mut().zip(v) {
                *o += w * rational::to_f64(x);
            }
        }
        Ok(out)
    }

    /// `v_1, …, v_{d·deg}` are nonzero and linearly independent over ℚ.
    /// The zero map is never good.
    pub fn is_good(&self) -> bool {
        let top = self.leading_index() as usize;
        top > 0 && linalg::independent(&self.coeffs[..top])
    }

    /// Canonical (reduced row-echelon) basis of `span{v_1, …, v_d}`.
    pub fn span_v(&self) -> Vec<QVec> {
        linalg::rref(&self.coeffs)
    }

    /// The map with its `t^{d/d}` coefficient removed; height unchanged.
    pub fn lower_part(&self) -> FPoly {
        let mut p = self.clone();
        if let Some(last) = p.coeffs.last_mut() {
            *last = rational::zeros(self.ambient_dim);
        }
        p
    }

    pub fn subtract(&self, other: &FPoly) -> Result<FPoly> {
        self.check_same_shape(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| rational::sub_vec(a, b))
            .collect();
        Ok(FPoly {
            coeffs,
            ..self.clone()
        })
    }

    fn check_same_shape(&self, other: &FPoly) -> Result<()> {
        if self.height != other.height || self.ambient_dim != other.ambient_dim {
            return Err(Error::Shape(format!(
                "height/dimension mismatch: ({}, {}) vs ({}, {})",
                self.height, self.ambient_dim, other.height, other.ambient_dim
            )));
        }
        Ok(())
    }

    /// Rewrites the same map at height `factor · d`: `v'_{factor·j} = v_j`,
    /// all other coefficients zero.
    pub fn with_height_multiplied(&self, factor: u32) -> FPoly {
        let h = self.height * factor;
        let mut p = FPoly::zero(h, self.ambient_dim);
        for (j, v) in self.coeffs.iter().enumerate() {
            p.coeffs[(j + 1) * factor as usize - 1] = v.clone();
        }
        p
    }

    /// Substitutes `t = s^{d/new_height}`: the first `new_height` coefficients
    /// are kept verbatim at the new height. Only meaningful when the degree is
    /// at most `new_height / d`.
    pub fn time_changed(&self, new_height: u32) -> Result<FPoly> {
        if new_height == 0 || self.leading_index() > new_height {
            return Err(Error::Domain(format!(
                "cannot re-express degree {} at height {new_height}",
                self.degree()
            )));
        }
        Ok(FPoly {
            height: new_height,
            ambient_dim: self.ambient_dim,
            coeffs: self.coeffs[..new_height as usize].to_vec(),
        })
    }

    /// Applies a rational linear map `R^D -> R^{D'}` (given by its rows) to
    /// every coefficient.
    pub fn map_linear(&self, rows: &[QVec]) -> Result<FPoly> {
        if rows.iter().any(|r| r.len() != self.ambient_dim) {
            return Err(Error::Shape(
                "linear map width differs from ambient dimension".into(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|v| rows.iter().map(|r| rational::dot(r, v)).collect())
            .collect();
        Ok(FPoly {
            height: self.height,
            ambient_dim: rows.len(),
            coeffs,
        })
    }

    /// Compact one-line form `[v_1|v_2|…]` with comma-separated components.
    pub fn compact(&self) -> String {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|v| v.iter().map(format_q).collect::<Vec<_>>().join(","))
            .collect();
        format!("[{}]", parts.join("|"))
    }
}

/// An ordered family of f-polynomials sharing height and ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FPolyFamily {
    height: u32,
    ambient_dim: usize,
    members: Vec<FPoly>,
    good: bool,
}

impl FPolyFamily {
    pub fn new(members: Vec<FPoly>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::Domain("a family needs at least one member".into()))?;
        let (height, ambient_dim) = (first.height, first.ambient_dim);
        Self::with_shape(height, ambient_dim, members)
    }

    /// Like [`FPolyFamily::new`] but admits the empty family, which ends a
    /// chain of precedents.
    pub fn with_shape(height: u32, ambient_dim: usize, members: Vec<FPoly>) -> Result<Self> {
        for m in &members {
            if m.height != height || m.ambient_dim != ambient_dim {
                return Err(Error::Shape(format!(
                    "member of height {} / dimension {} in a family of height {height} / dimension {ambient_dim}",
                    m.height, m.ambient_dim
                )));
            }
        }
        let good = family_goodness(&members);
        Ok(FPolyFamily {
            height,
            ambient_dim,
            members,
            good,
        })
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn members(&self) -> &[FPoly] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Every member is good and all nonzero `v_{i,j}` across the family are
    /// jointly independent over ℚ.
    pub fn is_good(&self) -> bool {
        self.good
    }

    /// Degrees of the members, non-increasing.
    pub fn sorted_degrees(&self) -> Vec<Degree> {
        let mut d: Vec<Degree> = self.members.iter().map(FPoly::degree).collect();
        d.sort_by(|a, b| b.cmp(a));
        d
    }

    /// Members sorted by degree (descending), then lexicographically by
    /// coefficients. Families are sets; this is their canonical listing.
    pub fn canonical(&self) -> FPolyFamily {
        let mut members = self.members.clone();
        members.sort_by(|a, b| {
            b.degree()
                .cmp(&a.degree())
                .then_with(|| a.coeffs.cmp(&b.coeffs))
        });
        FPolyFamily {
            members,
            ..self.clone()
        }
    }

    /// One-line text form used as the node label in DAG exports.
    pub fn canonical_line(&self) -> String {
        let c = self.canonical();
        let members: Vec<String> = c.members.iter().map(FPoly::compact).collect();
        format!(
            "d={} D={} {{{}}}",
            self.height,
            self.ambient_dim,
            members.join(",")
        )
    }

    pub fn to_toml(&self) -> String {
        let doc = FamilyDocOut {
            height: self.height,
            ambient_dim: self.ambient_dim,
            v: self
                .members
                .iter()
                .map(|m| {
                    m.coeffs
                        .iter()
                        .map(|v| v.iter().map(format_q).collect())
                        .collect()
                })
                .collect(),
        };
        toml::to_string(&doc).expect("family documents always serialize")
    }

    pub fn from_toml(text: &str, source_name: &str) -> Result<Self> {
        let doc: FamilyDocIn = toml::from_str(text).map_err(|e| from_toml(source_name, text, e))?;
        let mut members = Vec::with_capacity(doc.v.len());
        for (i, member) in doc.v.iter().enumerate() {
            let mut coeffs = Vec::with_capacity(member.len());
            for (j, vector) in member.iter().enumerate() {
                let mut v = Vec::with_capacity(vector.len());
                for (r, entry) in vector.iter().enumerate() {
                    let x = parse_q(entry.get_ref()).map_err(|e| {
                        Error::parse_at(
                            source_name,
                            text,
                            entry.span().start,
                            format!("v[{i}][{j}][{r}]: {e}"),
                        )
                    })?;
                    v.push(x);
                }
                coeffs.push(v);
            }
            let p = FPoly::new(doc.height, doc.ambient_dim, coeffs)
                .map_err(|e| Error::parse_at(source_name, text, 0, format!("member {i}: {e}")))?;
            members.push(p);
        }
        FPolyFamily::with_shape(doc.height, doc.ambient_dim, members)
            .map_err(|e| Error::parse_at(source_name, text, 0, e.to_string()))
    }
}

fn family_goodness(members: &[FPoly]) -> bool {
    if !members.iter().all(FPoly::is_good) {
        return false;
    }
    let all: Vec<QVec> = members
        .iter()
        .flat_map(|m| m.coeffs.iter())
        .filter(|v| !is_zero_vec(v))
        .cloned()
        .collect();
    linalg::independent(&all)
}

#[derive(Serialize)]
struct FamilyDocOut {
    height: u32,
    ambient_dim: usize,
    v: Vec<Vec<Vec<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDocIn {
    height: u32,
    ambient_dim: usize,
    v: Vec<Vec<Vec<toml::Spanned<String>>>>,
}

/// A polynomial map `t ↦ Σ_{j=1}^d t^j u_j` into ℚ^D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    /// `coeffs[j - 1]` multiplies `t^j`.
    pub coeffs: Vec<QVec>,
}

/// Result of [`lift_to_independent`].
#[derive(Clone, Debug)]
pub struct Lifted {
    pub family: FPolyFamily,
    /// The `D × D'` matrix sending formal basis vector `e_{(i-1)d + j}` to
    /// `u_{i,j}`; stored by rows.
    pub matrix: Vec<QVec>,
}

/// Replaces every coefficient `u_{i,j}` of the inputs by a fresh standard
/// basis vector of `ℝ^{k·d}`, so the lifted family (at height `d`, exponents
/// `j/d`) is good, and returns the matrix recovering the originals.
pub fn lift_to_independent(polys: &[PolyMap]) -> Result<Lifted> {
    if polys.is_empty() {
        return Err(Error::Domain(
            "lift_to_independent needs at least one polynomial".into(),
        ));
    }
    let d = polys.iter().map(|p| p.coeffs.len()).max().unwrap_or(0);
    if d == 0 {
        return Err(Error::Domain(
            "polynomials need at least one coefficient".into(),
        ));
    }
    let dim = polys
        .iter()
        .flat_map(|p| p.coeffs.iter().map(Vec::len))
        .next()
        .ok_or_else(|| Error::Domain("empty coefficient list".into()))?;
    if polys.iter().flat_map(|p| &p.coeffs).any(|u| u.len() != dim) {
        return Err(Error::Shape(
            "polynomial coefficients disagree on dimension".into(),
        ));
    }
    let k = polys.len();
    let lifted_dim = k * d;
    let mut matrix = vec![rational::zeros(lifted_dim); dim];
    let mut members = Vec::with_capacity(k);
    for (i, p) in polys.iter().enumerate() {
        let mut coeffs = Vec::with_capacity(d);
        for j in 0..d {
            let col = i * d + j;
            coeffs.push(rational::unit(lifted_dim, col));
            if let Some(u) = p.coeffs.get(j) {
                for (row, x) in matrix.iter_mut().zip(u) {
                    row[col] = x.clone();
                }
            }
        }
        members.push(FPoly::new(d as u32, lifted_dim, coeffs)?);
    }
    Ok(Lifted {
        family: FPolyFamily::new(members)?,
        matrix,
    })
}

impl Lifted {
    /// `A'` applied to every lifted coefficient.
    pub fn reexpand(&self) -> Result<Vec<PolyMap>> {
        self.family
            .members()
            .iter()
            .map(|m| {
                let mapped = m.map_linear(&self.matrix)?;
                Ok(PolyMap {
                    coeffs: mapped.coeffs,
                })
            })
            .collect()
    }
}

impl PolyMap {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|v| v.iter().all(Zero::is_zero))
    }
}
