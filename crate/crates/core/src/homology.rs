//! First homology of a compact surface: basis conventions, the intersection
//! pairing, curve classes, quadratic forms over GF(2), and abelian quotients.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{smith_normal_form, Matrix};
use crate::{Error, Int, Result};

/// Genus, boundary and marked-point profile of a surface `Σ_{g,k}^b`.
///
/// The homology basis is `α_1, β_1, …, α_g, β_g, δ_1, …, δ_{b−1}`; the last
/// boundary class is implicit, `δ_b = −(δ_1 + … + δ_{b−1})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceModel {
    pub genus: usize,
    pub boundary: usize,
    pub marked: usize,
}

impl SurfaceModel {
    pub fn new(genus: usize, boundary: usize, marked: usize) -> Self {
        SurfaceModel { genus, boundary, marked }
    }

    /// The closed surface `Σ_g`.
    pub fn closed(genus: usize) -> Self {
        Self::new(genus, 0, 0)
    }

    /// Number of explicit boundary basis classes, `max(b − 1, 0)`.
    pub fn delta_count(&self) -> usize {
        self.boundary.saturating_sub(1)
    }

    /// Rank of the homology lattice, `2g + max(b − 1, 0)`.
    pub fn rank(&self) -> usize {
        2 * self.genus + self.delta_count()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary == 0
    }

    /// The pairing matrix `J` with `⟨α_i, β_i⟩ = +1`.
    pub fn pairing_matrix(&self) -> Matrix<Int> {
        let mut j = Matrix::zeros(self.rank(), self.rank());
        for i in 0..self.genus {
            j.set(2 * i, 2 * i + 1, Int::one());
            j.set(2 * i + 1, 2 * i, -Int::one());
        }
        j
    }

    fn unit(&self, index: usize) -> CurveClass {
        let mut v = vec![Int::zero(); self.rank()];
        v[index] = Int::one();
        CurveClass::new(v)
    }

    /// `α_i` (1-based).
    pub fn alpha(&self, i: usize) -> CurveClass {
        assert!(1 <= i && i <= self.genus, "alpha index out of range");
        self.unit(2 * (i - 1))
    }

    /// `β_i` (1-based).
    pub fn beta(&self, i: usize) -> CurveClass {
        assert!(1 <= i && i <= self.genus, "beta index out of range");
        self.unit(2 * (i - 1) + 1)
    }

    /// Signed coordinates of the boundary class `δ_j` (1-based, `j ≤ b`),
    /// without sign normalization.
    pub fn delta_coords(&self, j: usize) -> Vec<Int> {
        assert!(1 <= j && j <= self.boundary, "delta index out of range");
        let mut v = vec![Int::zero(); self.rank()];
        if j < self.boundary {
            v[2 * self.genus + j - 1] = Int::one();
        } else {
            for x in &mut v[2 * self.genus..] {
                *x = -Int::one();
            }
        }
        v
    }

    /// The boundary class `δ_j` (1-based, `j ≤ b`).
    pub fn delta(&self, j: usize) -> CurveClass {
        CurveClass::new(self.delta_coords(j))
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len == self.rank() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.rank(), found: len })
        }
    }
}

impl fmt::Display for SurfaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Σ(g={}, b={}, k={})", self.genus, self.boundary, self.marked)
    }
}

/// Integer homology class standing in for a simple closed curve.
///
/// Classes are stored sign-normalized (first nonzero coordinate positive),
/// since `t_c = t_{−c}`. Equality and hashing use the coordinates only; the
/// label is decoration.
#[derive(Clone, Debug)]
pub struct CurveClass {
    coords: Vec<Int>,
    label: Option<String>,
}

impl CurveClass {
    /// Creates a sign-normalized class.
    pub fn new(mut coords: Vec<Int>) -> Self {
        if coords.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
            for x in &mut coords {
                *x = -x.clone();
            }
        }
        CurveClass { coords, label: None }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&x| Int::from(x)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        CurveClass { coords: vec![Int::zero(); rank], label: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn coords(&self) -> &[Int] {
        &self.coords
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Reduction modulo 2.
    pub fn mod2(&self) -> Vec<bool> {
        self.coords.iter().map(|x| x.is_odd()).collect()
    }

    /// Class with every coordinate reduced to `{0, 1}`.
    pub fn reduced_mod2(&self) -> Self {
        let coords = self.mod2().into_iter().map(|b| if b { Int::one() } else { Int::zero() }).collect();
        CurveClass { coords, label: self.label.clone() }
    }

    /// Applies a linear map and renormalizes; the label is kept.
    pub fn transform(&self, m: &Matrix<Int>) -> Self {
        let mut c = Self::new(m.mul_vec(&self.coords));
        c.label = self.label.clone();
        c
    }

    /// Coordinates as machine integers, if they fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coords.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl PartialEq for CurveClass {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}

impl Eq for CurveClass {}

impl std::hash::Hash for CurveClass {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// `⟨x, y⟩ = Σ_i (x_{α_i} y_{β_i} − x_{β_i} y_{α_i})` on raw coordinates.
pub(crate) fn pairing_coords(x: &[Int], y: &[Int], genus: usize) -> Int {
    (0..genus).fold(Int::zero(), |acc, i| acc + &x[2 * i] * &y[2 * i + 1] - &x[2 * i + 1] * &y[2 * i])
}

/// The algebraic intersection number `xᵀ J y`.
pub fn pairing(x: &CurveClass, y: &CurveClass, s: &SurfaceModel) -> Result<Int> {
    s.check_len(x.len())?;
    s.check_len(y.len())?;
    Ok(pairing_coords(x.coords(), y.coords(), s.genus))
}

/// A quadratic refinement of the mod-2 intersection pairing, given by its
/// values on the homology basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticFormZ2 {
    pub basis_values: Vec<bool>,
}

impl QuadraticFormZ2 {
    pub fn new(basis_values: Vec<bool>) -> Self {
        QuadraticFormZ2 { basis_values }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        Self::new(bits.iter().map(|&b| b % 2 == 1).collect())
    }

    /// The form with every basis value equal to `value`.
    pub fn constant(rank: usize, value: bool) -> Self {
        Self::new(vec![value; rank])
    }

    /// Evaluates `q` on a mod-2 coordinate vector.
    pub fn eval_bits(&self, x: &[bool], s: &SurfaceModel) -> Result<bool> {
        s.check_len(self.basis_values.len())?;
        s.check_len(x.len())?;
        let linear = x.iter().zip(&self.basis_values).filter(|(a, b)| **a && **b).count();
        let cross = (0..s.genus).filter(|&i| x[2 * i] && x[2 * i + 1]).count();
        Ok((linear + cross) % 2 == 1)
    }
}

/// `q(Σ x_i e_i) = Σ x_i q(e_i) + Σ_{i<j} x_i x_j ⟨e_i, e_j⟩ (mod 2)`.
pub fn q_eval(q: &QuadraticFormZ2, x: &CurveClass, s: &SurfaceModel) -> Result<bool> {
    q.eval_bits(&x.mod2(), s)
}

/// Arf invariant `Σ q(α_i) q(β_i)`; boundary values are ignored.
pub fn arf(q: &QuadraticFormZ2, s: &SurfaceModel) -> bool {
    (0..s.genus).filter(|&i| q.basis_values[2 * i] && q.basis_values[2 * i + 1]).count() % 2 == 1
}

/// Invariant factors of a finitely generated abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroupInvariants {
    pub free_rank: usize,
    #[serde(with = "int_list")]
    pub torsion: Vec<Int>,
}

impl AbelianGroupInvariants {
    pub fn free(rank: usize) -> Self {
        AbelianGroupInvariants { free_rank: rank, torsion: Vec::new() }
    }

    pub fn from_parts(free_rank: usize, torsion: &[i64]) -> Self {
        AbelianGroupInvariants { free_rank, torsion: torsion.iter().map(|&t| Int::from(t)).collect() }
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> Int {
        self.torsion.iter().fold(Int::one(), |acc, t| acc * t)
    }
}

impl fmt::Display for AbelianGroupInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        parts.extend(self.torsion.iter().rev().map(|t| format!("Z{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Serializes integer lists as JSON numbers (decimal strings beyond `i64`).
pub(crate) mod int_list {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Small(i64),
        Big(String),
    }

    pub fn serialize<S: Serializer>(v: &[Int], s: S) -> std::result::Result<S::Ok, S::Error> {
        let reprs: Vec<Repr> =
            v.iter().map(|x| x.to_i64().map(Repr::Small).unwrap_or_else(|| Repr::Big(x.to_string()))).collect();
        reprs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Int>, D::Error> {
        let reprs = Vec::<Repr>::deserialize(d)?;
        reprs
            .into_iter()
            .map(|r| match r {
                Repr::Small(x) => Ok(Int::from(x)),
                Repr::Big(s) => s.parse().map_err(D::Error::custom),
            })
            .collect()
    }
}

/// Invariant factors of `Z^rank / ⟨relations⟩`.
pub fn abelian_quotient(rank: usize, relations: &[Vec<Int>]) -> Result<AbelianGroupInvariants> {
    if let Some(bad) = relations.iter().find(|r| r.len() != rank) {
        return Err(Error::DimensionMismatch { expected: rank, found: bad.len() });
    }
    if relations.is_empty() || rank == 0 {
        return Ok(AbelianGroupInvariants::free(rank));
    }
    let m = Matrix::from_rows(relations.to_vec()).expect("rows checked above");
    let diag = smith_normal_form(&m).diagonal();
    let nonzero: Vec<BigInt> = diag.into_iter().filter(|d| !d.is_zero()).collect();
    Ok(AbelianGroupInvariants {
        free_rank: rank - nonzero.len(),
        torsion: nonzero.into_iter().filter(|d| !d.is_one()).collect(),
    })
}
