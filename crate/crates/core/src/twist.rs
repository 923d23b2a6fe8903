//! Factorizations as words in signed Dehn twists and point-pushes, their
//! action on homology, and the word moves used to rearrange them.
//!
//! Conventions: a word `t_1 t_2 ⋯ t_n` acts starting with the rightmost
//! factor, so its matrix is the ordered product `T_1 T_2 ⋯ T_n`. A twist of
//! sign `s` along `c` acts by `x ↦ x + s·⟨c, x⟩·c`.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::homology::{pairing_coords, CurveClass, SurfaceModel};
use crate::linalg::{inverse, Matrix};
use crate::{Error, Int, Rational, Result};

/// What a factor of a word represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    /// A Dehn twist; acts on homology by a transvection.
    Dehn,
    /// A point-pushing map along a loop; homologically trivial but its loop
    /// class feeds the fiber-divisibility computation.
    Push,
    /// A twist along a boundary component; central and homologically trivial.
    Boundary,
}

/// One signed factor of a factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwistTerm {
    pub kind: TermKind,
    pub curve: CurveClass,
    /// `+1` for a right-handed twist, `−1` for its inverse.
    pub sign: i8,
    /// For boundary twists, the 1-based boundary component (classes alone
    /// cannot tell `δ_1` from `δ_2` on a two-holed surface).
    pub component: Option<usize>,
}

impl TwistTerm {
    pub fn dehn(curve: CurveClass, sign: i8) -> Self {
        TwistTerm { kind: TermKind::Dehn, curve, sign, component: None }
    }

    /// A positive Dehn twist.
    pub fn positive(curve: CurveClass) -> Self {
        Self::dehn(curve, 1)
    }

    pub fn push(curve: CurveClass) -> Self {
        TwistTerm { kind: TermKind::Push, curve, sign: 1, component: None }
    }

    /// A twist along the boundary component `j` (1-based) of `s`.
    pub fn boundary(s: &SurfaceModel, j: usize, sign: i8) -> Self {
        TwistTerm { kind: TermKind::Boundary, curve: s.delta(j), sign, component: Some(j) }
    }

    /// The inverse factor.
    pub fn inverse(&self) -> Self {
        TwistTerm { sign: -self.sign, ..self.clone() }
    }

    /// Whether this factor acts nontrivially (as a transvection) on H1.
    pub fn acts_on_homology(&self) -> bool {
        self.kind == TermKind::Dehn
    }
}

/// Coefficient ring in which the classes of a factorization are meaningful.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficients {
    /// Integer classes (the default).
    #[default]
    Integer,
    /// Only the mod-2 reductions are known; integer-only invariants refuse
    /// such factorizations.
    Z2,
}

/// An ordered word of twist terms together with its boundary target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub surface: SurfaceModel,
    pub terms: Vec<TwistTerm>,
    /// Exponents of the boundary multi-twist `t_{δ_1}^{e_1} ⋯ t_{δ_b}^{e_b}`
    /// the word equals; empty for identity relators.
    pub target: Vec<i64>,
    pub coefficients: Coefficients,
}

impl Factorization {
    /// Builds and validates a factorization with integer coefficients.
    pub fn new(surface: SurfaceModel, terms: Vec<TwistTerm>, target: Vec<i64>) -> Result<Self> {
        let f = Factorization { surface, terms, target, coefficients: Coefficients::Integer };
        f.validate()?;
        Ok(f)
    }

    /// A word on `surface` expected to equal the identity.
    pub fn relator(surface: SurfaceModel, terms: Vec<TwistTerm>) -> Result<Self> {
        Self::new(surface, terms, Vec::new())
    }

    /// The empty word.
    pub fn empty(surface: SurfaceModel) -> Self {
        Factorization { surface, terms: Vec::new(), target: Vec::new(), coefficients: Coefficients::Integer }
    }

    /// Marks the classes as mod-2 data; classes are reduced into `{0, 1}`.
    pub fn into_z2(mut self) -> Self {
        self.coefficients = Coefficients::Z2;
        for t in &mut self.terms {
            t.curve = t.curve.reduced_mod2();
        }
        self
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        let s = &self.surface;
        for (i, t) in self.terms.iter().enumerate() {
            s.check_len(t.curve.len())?;
            if t.sign != 1 && t.sign != -1 {
                return Err(Error::InvalidTerm(format!("term {i}: sign must be +1 or -1")));
            }
            match t.kind {
                TermKind::Boundary if s.boundary == 0 => {
                    return Err(Error::InvalidTerm(format!("term {i}: boundary twist on a closed surface")));
                }
                TermKind::Boundary if t.component.is_some_and(|j| j == 0 || j > s.boundary) => {
                    return Err(Error::InvalidTerm(format!("term {i}: boundary component out of range")));
                }
                TermKind::Push if s.marked == 0 => {
                    return Err(Error::InvalidTerm(format!("term {i}: point-push without a marked point")));
                }
                _ => {}
            }
        }
        if !self.target.is_empty() && self.target.len() != s.boundary {
            return Err(Error::IncompatibleTarget(format!(
                "target has {} exponents for {} boundary components",
                self.target.len(),
                s.boundary
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of Dehn twist terms (Lefschetz critical points when positive).
    pub fn dehn_count(&self) -> usize {
        self.terms.iter().filter(|t| t.kind == TermKind::Dehn).count()
    }

    /// Classes of the Dehn twist terms, in order.
    pub fn dehn_classes(&self) -> Vec<CurveClass> {
        self.terms.iter().filter(|t| t.kind == TermKind::Dehn).map(|t| t.curve.clone()).collect()
    }

    /// Sum of the point-push loop classes (the class `α` of a lift).
    pub fn push_class_sum(&self) -> CurveClass {
        let mut acc = vec![Int::zero(); self.surface.rank()];
        for t in self.terms.iter().filter(|t| t.kind == TermKind::Push) {
            for (a, x) in acc.iter_mut().zip(t.curve.coords()) {
                *a += x * Int::from(t.sign);
            }
        }
        CurveClass::new(acc)
    }

    /// Concatenation `self · other` (targets multiply).
    pub fn concat(&self, other: &Factorization) -> Result<Self> {
        if self.surface != other.surface {
            return Err(Error::SurfaceMismatch(format!("{} vs {}", self.surface, other.surface)));
        }
        let target = match (self.target.is_empty(), other.target.is_empty()) {
            (true, _) => other.target.clone(),
            (_, true) => self.target.clone(),
            _ => self.target.iter().zip(&other.target).map(|(a, b)| a + b).collect(),
        };
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Factorization {
            surface: self.surface,
            terms,
            target,
            coefficients: self.coefficients.max(other.coefficients),
        })
    }

    /// The word repeated `n` times.
    pub fn power(&self, n: usize) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * n);
        for _ in 0..n {
            terms.extend(self.terms.iter().cloned());
        }
        let target = self.target.iter().map(|e| e * n as i64).collect();
        Factorization { surface: self.surface, terms, target, coefficients: self.coefficients }
    }

    /// The inverse word (reversed, with flipped signs).
    pub fn inverse(&self) -> Self {
        let terms = self.terms.iter().rev().map(TwistTerm::inverse).collect();
        let target = self.target.iter().map(|e| -e).collect();
        Factorization { surface: self.surface, terms, target, coefficients: self.coefficients }
    }

    fn normalize(&self, c: CurveClass) -> CurveClass {
        match self.coefficients {
            Coefficients::Integer => c,
            Coefficients::Z2 => c.reduced_mod2(),
        }
    }
}

impl PartialOrd for Coefficients {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coefficients {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}

/// An integer matrix preserving the intersection pairing, `Mᵀ J M = J`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticMatrix {
    matrix: Matrix<Int>,
}

impl SymplecticMatrix {
    /// Validates that `matrix` preserves the pairing of `s` and is invertible
    /// over the integers.
    pub fn new(matrix: Matrix<Int>, s: &SurfaceModel) -> Result<Self> {
        if matrix.rows() != s.rank() || matrix.cols() != s.rank() {
            return Err(Error::DimensionMismatch { expected: s.rank(), found: matrix.rows() });
        }
        if !is_symplectic(&matrix, s) {
            return Err(Error::NotSymplectic);
        }
        let det = crate::linalg::determinant(&matrix);
        if det != Int::one() && det != -Int::one() {
            return Err(Error::NotSymplectic);
        }
        Ok(SymplecticMatrix { matrix })
    }

    pub(crate) fn from_trusted(matrix: Matrix<Int>) -> Self {
        SymplecticMatrix { matrix }
    }

    pub fn identity(rank: usize) -> Self {
        SymplecticMatrix { matrix: Matrix::identity(rank) }
    }

    pub fn matrix(&self) -> &Matrix<Int> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<Int> {
        self.matrix
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    pub fn mul(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix { matrix: self.matrix.mul(&other.matrix) }
    }

    /// Exact inverse (unimodular, so again integral).
    pub fn inverse(&self) -> SymplecticMatrix {
        let rational = self.matrix.map(|x| Rational::from_integer(x.clone()));
        let inv = inverse(&rational).expect("symplectic matrices are invertible");
        SymplecticMatrix { matrix: inv.map(|x| x.to_integer()) }
    }

    /// Image of a class, sign-normalized.
    pub fn apply(&self, c: &CurveClass) -> CurveClass {
        c.transform(&self.matrix)
    }
}

/// Whether `Mᵀ J M = J` for the pairing of `s`.
pub fn is_symplectic(m: &Matrix<Int>, s: &SurfaceModel) -> bool {
    let j = s.pairing_matrix();
    m.rows() == s.rank() && m.cols() == s.rank() && m.transpose().mul(&j).mul(m) == j
}

/// Row vector `r` with `r · x = ⟨c, x⟩`.
fn pairing_row(c: &[Int], genus: usize, rank: usize) -> Vec<Int> {
    let mut r = vec![Int::zero(); rank];
    for i in 0..genus {
        r[2 * i] = -c[2 * i + 1].clone();
        r[2 * i + 1] = c[2 * i].clone();
    }
    r
}

/// The homological action `x ↦ x + sign·⟨c, x⟩·c` of a twist along `c`.
pub fn transvection(c: &CurveClass, sign: i8, s: &SurfaceModel) -> Result<SymplecticMatrix> {
    s.check_len(c.len())?;
    let rank = s.rank();
    let r = pairing_row(c.coords(), s.genus, rank);
    let mut m = Matrix::identity(rank);
    let sg = Int::from(sign);
    for (i, ci) in c.coords().iter().enumerate() {
        if ci.is_zero() {
            continue;
        }
        for (j, rj) in r.iter().enumerate() {
            if !rj.is_zero() {
                let v = m.get(i, j) + &sg * ci * rj;
                m.set(i, j, v);
            }
        }
    }
    Ok(SymplecticMatrix { matrix: m })
}

/// Image of `x` under the twist `t_c^sign`.
pub(crate) fn twist_coords(c: &[Int], sign: i8, x: &[Int], genus: usize) -> Vec<Int> {
    let k = pairing_coords(c, x, genus) * Int::from(sign);
    if k.is_zero() {
        return x.to_vec();
    }
    x.iter().zip(c).map(|(a, b)| a + &k * b).collect()
}

/// `m ← m · T_c^sign` in O(rank²).
fn multiply_by_twist(m: &mut Matrix<Int>, c: &[Int], sign: i8, genus: usize, modulus: Option<&Int>) {
    let rank = m.cols();
    let r = pairing_row(c, genus, rank);
    let mc = m.mul_vec(c);
    let sg = Int::from(sign);
    for (i, mci) in mc.iter().enumerate() {
        if mci.is_zero() {
            continue;
        }
        let f = &sg * mci;
        for (j, rj) in r.iter().enumerate() {
            if !rj.is_zero() {
                let mut v = m.get(i, j) + &f * rj;
                if let Some(p) = modulus {
                    v = v.mod_floor(p);
                }
                m.set(i, j, v);
            }
        }
    }
}

fn product(surface: &SurfaceModel, terms: &[TwistTerm], modulus: Option<&Int>) -> Matrix<Int> {
    let mut m = Matrix::identity(surface.rank());
    for t in terms.iter().filter(|t| t.acts_on_homology()) {
        multiply_by_twist(&mut m, t.curve.coords(), t.sign, surface.genus, modulus);
    }
    m
}

/// Ordered product of the term transvections (point-push and boundary terms
/// contribute the identity).
///
/// For Z2-coefficient factorizations the integer lifts are multiplied; use
/// [`homological_triviality`] for a check that respects the coefficients.
pub fn factor_matrix(f: &Factorization) -> SymplecticMatrix {
    SymplecticMatrix::from_trusted(product(&f.surface, &f.terms, None))
}

/// Product matrix of a bare word of terms on `s`.
pub fn word_matrix(terms: &[TwistTerm], s: &SurfaceModel) -> Result<SymplecticMatrix> {
    for t in terms {
        s.check_len(t.curve.len())?;
    }
    Ok(SymplecticMatrix::from_trusted(product(s, terms, None)))
}

/// Outcome of [`homological_triviality`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrivialityReport {
    pub trivial: bool,
    /// The product matrix (reduced mod 2 for Z2-coefficient data).
    pub matrix: Matrix<Int>,
    /// `Some(2)` when the check was performed modulo 2.
    pub modulus: Option<u32>,
}

/// Whether the word acts trivially on H1. Boundary twists act trivially, so
/// the target is recorded, not checked. Z2-coefficient data is checked
/// modulo 2.
pub fn homological_triviality(f: &Factorization) -> TrivialityReport {
    let (matrix, modulus) = match f.coefficients {
        Coefficients::Integer => (product(&f.surface, &f.terms, None), None),
        Coefficients::Z2 => (product(&f.surface, &f.terms, Some(&Int::from(2))), Some(2)),
    };
    TrivialityReport { trivial: matrix.is_identity(), matrix, modulus }
}

/// Direction of an elementary Hurwitz move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `(t_a, t_b) ↦ (t_{T_a(b)}, t_a)`.
    Left,
    /// `(t_a, t_b) ↦ (t_b, t_{T_b^{-1}(a)})`.
    Right,
}

/// Elementary Hurwitz move on the pair at positions `i, i + 1`. The product
/// matrix is unchanged.
pub fn hurwitz_move(f: &Factorization, i: usize, direction: Direction) -> Result<Factorization> {
    if i + 1 >= f.terms.len() {
        return Err(Error::IndexOutOfRange { index: i + 1, len: f.terms.len() });
    }
    let mut out = f.clone();
    let a = &f.terms[i];
    let b = &f.terms[i + 1];
    let g = f.surface.genus;
    match direction {
        Direction::Right => {
            let moved = if b.acts_on_homology() {
                CurveClass::new(twist_coords(b.curve.coords(), -b.sign, a.curve.coords(), g))
            } else {
                a.curve.clone()
            };
            out.terms[i] = b.clone();
            out.terms[i + 1] = TwistTerm { curve: f.normalize(keep_label(moved, a)), ..a.clone() };
        }
        Direction::Left => {
            let moved = if a.acts_on_homology() {
                CurveClass::new(twist_coords(a.curve.coords(), a.sign, b.curve.coords(), g))
            } else {
                b.curve.clone()
            };
            out.terms[i] = TwistTerm { curve: f.normalize(keep_label(moved, b)), ..b.clone() };
            out.terms[i + 1] = a.clone();
        }
    }
    Ok(out)
}

fn keep_label(c: CurveClass, from: &TwistTerm) -> CurveClass {
    match from.curve.label() {
        Some(l) => c.with_label(l),
        None => c,
    }
}

/// Moves the term at `from` to position `to` by successive Hurwitz moves
/// that keep its class: rightward travel uses left moves, leftward travel
/// uses right moves. The terms it passes over are conjugated.
pub fn slide(f: &Factorization, from: usize, to: usize) -> Result<Factorization> {
    let n = f.terms.len();
    if from >= n {
        return Err(Error::IndexOutOfRange { index: from, len: n });
    }
    if to >= n {
        return Err(Error::IndexOutOfRange { index: to, len: n });
    }
    let mut out = f.clone();
    if from < to {
        for i in from..to {
            out = hurwitz_move(&out, i, Direction::Left)?;
        }
    } else {
        for i in (to..from).rev() {
            out = hurwitz_move(&out, i, Direction::Right)?;
        }
    }
    Ok(out)
}

/// Rotates the word left by `k` (negative `k` rotates right).
///
/// Always allowed for identity relators and boundary multi-twist targets,
/// which are central; a target whose length does not match the boundary
/// count is incompatible.
pub fn cyclic_permute(f: &Factorization, k: i64) -> Result<Factorization> {
    if !f.target.is_empty() && f.target.len() != f.surface.boundary {
        return Err(Error::IncompatibleTarget(format!(
            "target of length {} on a surface with {} boundary components",
            f.target.len(),
            f.surface.boundary
        )));
    }
    let mut out = f.clone();
    if !out.terms.is_empty() {
        let shift = k.rem_euclid(out.terms.len() as i64) as usize;
        out.terms.rotate_left(shift);
    }
    Ok(out)
}

/// Replaces every class `c` by `W(c)` (the conjugate word `W t_c W^{-1}`
/// has class `W(c)`).
pub fn conjugate_by(f: &Factorization, w: &SymplecticMatrix) -> Result<Factorization> {
    f.surface.check_len(w.matrix().rows())?;
    let mut out = f.clone();
    for t in &mut out.terms {
        t.curve = f.normalize(w.apply(&t.curve));
    }
    Ok(out)
}

/// Global conjugation by the word `w` on the same surface.
pub fn conjugate_global(f: &Factorization, w: &[TwistTerm]) -> Result<Factorization> {
    let m = word_matrix(w, &f.surface)?;
    conjugate_by(f, &m)
}

/// Repeatedly removes adjacent inverse pairs (same kind and class, opposite
/// signs). Point-pushes are never cancelled.
pub fn cancel_pairs(f: &Factorization) -> Factorization {
    let mut stack: Vec<TwistTerm> = Vec::with_capacity(f.terms.len());
    for t in &f.terms {
        let cancels = stack.last().is_some_and(|top| {
            top.kind == t.kind && t.kind != TermKind::Push && top.curve == t.curve && top.sign == -t.sign
        });
        if cancels {
            stack.pop();
        } else {
            stack.push(t.clone());
        }
    }
    Factorization { terms: stack, ..f.clone() }
}

/// Twisted fiber sum: the terms of `f1` followed by the `glue`-conjugated
/// terms of `f2`.
pub fn fiber_sum(f1: &Factorization, f2: &Factorization, glue: &SymplecticMatrix) -> Result<Factorization> {
    if f1.surface != f2.surface {
        return Err(Error::SurfaceMismatch(format!("{} vs {}", f1.surface, f2.surface)));
    }
    if !f1.target.is_empty() || !f2.target.is_empty() {
        return Err(Error::IncompatibleTarget("fiber sums require identity relators".into()));
    }
    if !is_symplectic(glue.matrix(), &f1.surface) {
        return Err(Error::NotSymplectic);
    }
    let conj = conjugate_by(f2, glue)?;
    f1.concat(&conj)
}

/// Projection of H1 when the boundary components in `capped` (1-based) are
/// filled with disks. Returns the new surface and the projection matrix.
pub fn capping_projection(s: &SurfaceModel, capped: &[usize]) -> Result<(SurfaceModel, Matrix<Int>)> {
    let capped: BTreeSet<usize> = capped.iter().copied().collect();
    if let Some(&bad) = capped.iter().find(|&&j| j == 0 || j > s.boundary) {
        return Err(Error::IndexOutOfRange { index: bad, len: s.boundary });
    }
    let remaining: Vec<usize> = (1..=s.boundary).filter(|j| !capped.contains(j)).collect();
    let new = SurfaceModel::new(s.genus, remaining.len(), s.marked);
    let mut p = Matrix::zeros(new.rank(), s.rank());
    for i in 0..2 * s.genus {
        p.set(i, i, Int::one());
    }
    // New coordinate of each surviving boundary; the last survivor is the
    // implicit one.
    let image = |j: usize| -> Vec<Int> {
        match remaining.iter().position(|&r| r == j) {
            None => vec![Int::zero(); new.rank()],
            Some(pos) => new.delta_coords(pos + 1),
        }
    };
    for j in 1..s.boundary {
        let col = image(j);
        for (i, x) in col.into_iter().enumerate() {
            p.set(i, 2 * s.genus + j - 1, x);
        }
    }
    Ok((new, p))
}

/// Caps the listed boundary components (1-based). Classes are projected,
/// boundary twists along capped components are deleted, and their target
/// exponents dropped.
pub fn cap_boundary(f: &Factorization, which: &[usize]) -> Result<Factorization> {
    let (new, p) = capping_projection(&f.surface, which)?;
    let capped: BTreeSet<usize> = which.iter().copied().collect();
    let remaining: Vec<usize> = (1..=f.surface.boundary).filter(|j| !capped.contains(j)).collect();
    let capped_classes: Vec<CurveClass> = capped.iter().map(|&j| f.surface.delta(j)).collect();
    let mut terms = Vec::with_capacity(f.terms.len());
    for t in &f.terms {
        let mut component = None;
        if t.kind == TermKind::Boundary {
            let deleted = match t.component {
                Some(j) => capped.contains(&j),
                None => capped_classes.contains(&t.curve),
            };
            if deleted {
                continue;
            }
            component = t.component.and_then(|j| remaining.iter().position(|&r| r == j)).map(|p| p + 1);
        }
        let mut curve = f.normalize(t.curve.transform(&p));
        if let Some(l) = t.curve.label() {
            curve = curve.with_label(l);
        }
        terms.push(TwistTerm { kind: t.kind, curve, sign: t.sign, component });
    }
    let target = if f.target.is_empty() {
        Vec::new()
    } else {
        let kept: Vec<i64> =
            f.target.iter().enumerate().filter(|(j, _)| !capped.contains(&(j + 1))).map(|(_, e)| *e).collect();
        if new.boundary == 0 {
            Vec::new()
        } else {
            kept
        }
    };
    let out = Factorization { surface: new, terms, target, coefficients: f.coefficients };
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> SurfaceModel {
        SurfaceModel::closed(1)
    }

    #[test]
    fn transvection_examples() {
        let s = g1();
        assert!(transvection(&CurveClass::zero(2), 1, &s).unwrap().is_identity());
        let t = transvection(&s.alpha(1), 1, &s).unwrap();
        // β ↦ β + ⟨α, β⟩ α = β + α.
        assert_eq!(t.apply(&s.beta(1)), CurveClass::from_i64(&[1, 1]));
        assert_eq!(t.apply(&s.alpha(1)), s.alpha(1));
    }

    #[test]
    fn two_chain_has_order_six() {
        let s = g1();
        let word = vec![TwistTerm::positive(s.alpha(1)), TwistTerm::positive(s.beta(1))];
        let f = Factorization::relator(s, word).unwrap().power(6);
        assert!(factor_matrix(&f).is_identity());
        assert!(factor_matrix(&Factorization::empty(s)).is_identity());
    }

    #[test]
    fn hurwitz_examples() {
        let s = g1();
        let f =
            Factorization::relator(s, vec![TwistTerm::positive(s.alpha(1)), TwistTerm::positive(s.beta(1))]).unwrap();
        let r = hurwitz_move(&f, 0, Direction::Right).unwrap();
        assert_eq!(r.terms[0].curve, s.beta(1));
        assert_eq!(r.terms[1].curve, CurveClass::from_i64(&[1, 1]));
        assert_eq!(factor_matrix(&r), factor_matrix(&f));
        assert_eq!(hurwitz_move(&r, 0, Direction::Left).unwrap(), f);
        assert!(hurwitz_move(&f, 1, Direction::Left).is_err());
    }

    #[test]
    fn cancellation() {
        let s = g1();
        let c = s.alpha(1);
        let f = Factorization::relator(s, vec![TwistTerm::positive(c.clone()), TwistTerm::dehn(c, -1)]).unwrap();
        assert!(cancel_pairs(&f).is_empty());
    }

    #[test]
    fn capping_projects_boundary_classes() {
        let s = SurfaceModel::new(1, 3, 0);
        let (new, p) = capping_projection(&s, &[3]).unwrap();
        assert_eq!(new, SurfaceModel::new(1, 2, 0));
        // δ1 survives as the explicit class, δ2 becomes the implicit one.
        assert_eq!(CurveClass::new(p.mul_vec(s.delta(1).coords())), new.delta(1));
        assert_eq!(CurveClass::new(p.mul_vec(s.delta(2).coords())), new.delta(2));
        assert_eq!(CurveClass::new(p.mul_vec(s.delta(3).coords())), CurveClass::zero(3));
    }
}
