//! Builtin relation templates, embeddings of model surfaces, and relation
//! substitution with signature bookkeeping.

use std::ops::Range;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::invariants::{LedgerEntry, LedgerKind};
use crate::linalg::Matrix;
use crate::twist::{cap_boundary, word_matrix};
use crate::{Coefficients, CurveClass, Error, Factorization, Int, Result, SurfaceModel, TermKind, TwistTerm};

/// A relation `lhs = rhs` on a model surface. By convention `rhs` is the
/// boundary (or empty) side and `lhs` the word of interior twists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationTemplate {
    pub name: String,
    pub surface: SurfaceModel,
    pub lhs: Vec<TwistTerm>,
    pub rhs: Vec<TwistTerm>,
    /// Signature change when `rhs` is replaced by `lhs`; `None` when the
    /// relation carries no known value.
    pub ledger_kind: Option<LedgerKind>,
    pub coefficients: Coefficients,
}

/// Names of the builtin relation families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationSpec {
    /// The lantern relation on the four-holed sphere.
    Lantern,
    /// The `k`-chain relation, `2 ≤ k ≤ 5`.
    Chain(usize),
    /// `(c_1 ⋯ c_{2g+1})^{2g+2} = t_{δ_1} t_{δ_2}` on `Σ_g^2`.
    OddChain(usize),
    /// `(c_1 ⋯ c_{2g})^{4g+2} = t_δ` on `Σ_g^1`.
    EvenChain(usize),
    /// `(c_1 ⋯ c_{2g} c_{2g+1}^2 c_{2g} ⋯ c_1)^2 = 1` on the closed surface.
    Hyperelliptic(usize),
    /// Yun's genus-`2m+n−1` relator, known only modulo 2.
    Yun { m: usize, n: usize },
}

impl RelationSpec {
    /// Parses `lantern`, `chain(k)`, `odd_chain(g)`, `even_chain(g)`,
    /// `hyperelliptic(g)` or `yun(m,n)`.
    pub fn parse(text: &str) -> Result<Self> {
        let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let unknown = || Error::UnknownRelation(text.clone());
        if text == "lantern" {
            return Ok(RelationSpec::Lantern);
        }
        let (head, rest) = text.split_once('(').ok_or_else(unknown)?;
        let args = rest.strip_suffix(')').ok_or_else(unknown)?;
        let nums: Vec<usize> = args.split(',').map(|a| a.parse().map_err(|_| unknown())).collect::<Result<_>>()?;
        Ok(match (head, nums.as_slice()) {
            ("chain", [k]) => RelationSpec::Chain(*k),
            ("odd_chain", [g]) => RelationSpec::OddChain(*g),
            ("even_chain", [g]) => RelationSpec::EvenChain(*g),
            ("hyperelliptic", [g]) => RelationSpec::Hyperelliptic(*g),
            ("yun", [m, n]) => RelationSpec::Yun { m: *m, n: *n },
            _ => return Err(unknown()),
        })
    }
}

impl std::fmt::Display for RelationSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RelationSpec::Lantern => write!(f, "lantern"),
            RelationSpec::Chain(k) => write!(f, "chain({k})"),
            RelationSpec::OddChain(g) => write!(f, "odd_chain({g})"),
            RelationSpec::EvenChain(g) => write!(f, "even_chain({g})"),
            RelationSpec::Hyperelliptic(g) => write!(f, "hyperelliptic({g})"),
            RelationSpec::Yun { m, n } => write!(f, "yun({m},{n})"),
        }
    }
}

/// Builds a builtin relation template.
pub fn builtin_relation(spec: RelationSpec) -> Result<RelationTemplate> {
    let bad = |msg: &str| Err(Error::UnknownRelation(format!("{spec}: {msg}")));
    match spec {
        RelationSpec::Lantern => Ok(lantern()),
        RelationSpec::Chain(2) => Ok(even_chain(1)),
        RelationSpec::Chain(3) => Ok(odd_chain(1)),
        RelationSpec::Chain(4) => Ok(even_chain(2)),
        RelationSpec::Chain(5) => Ok(odd_chain(2)),
        RelationSpec::Chain(_) => bad("chain length must be between 2 and 5"),
        RelationSpec::OddChain(0) | RelationSpec::EvenChain(0) | RelationSpec::Hyperelliptic(0) => {
            bad("genus must be positive")
        }
        RelationSpec::OddChain(g) => Ok(odd_chain(g)),
        RelationSpec::EvenChain(g) => Ok(even_chain(g)),
        RelationSpec::Hyperelliptic(g) => Ok(hyperelliptic(g)),
        RelationSpec::Yun { m, n } if m == 0 || n < 2 => bad("requires m ≥ 1 and n ≥ 2"),
        RelationSpec::Yun { m, n } => Ok(yun(m, n)),
    }
}

/// Builds a builtin relation template from its textual name.
pub fn builtin_relation_by_name(name: &str) -> Result<RelationTemplate> {
    builtin_relation(RelationSpec::parse(name)?)
}

/// Class of the `i`-th curve (1-based) of the standard chain on `s`:
/// `c_1 = β_1`, `c_{2k} = α_k`, `c_{2k+1} = β_{k+1} − β_k`, and
/// `c_{2g+1} = δ_1 − β_g` (just `−β_g` on a closed surface).
pub fn chain_class(s: &SurfaceModel, i: usize) -> CurveClass {
    let g = s.genus;
    assert!(1 <= i && i <= 2 * g + 1, "chain index out of range");
    let mut v = vec![Int::zero(); s.rank()];
    let beta = |k: usize| 2 * (k - 1) + 1;
    if i == 1 {
        v[beta(1)] = Int::one();
    } else if i % 2 == 0 {
        v[2 * (i / 2 - 1)] = Int::one();
    } else if i < 2 * g + 1 {
        let k = (i - 1) / 2;
        v[beta(k + 1)] = Int::one();
        v[beta(k)] = -Int::one();
    } else {
        v[beta(g)] = -Int::one();
        if s.boundary >= 2 {
            v[2 * g] = Int::one();
        }
    }
    CurveClass::new(v).with_label(format!("c{i}"))
}

fn positives(s: &SurfaceModel, indices: impl IntoIterator<Item = usize>) -> Vec<TwistTerm> {
    indices.into_iter().map(|i| TwistTerm::positive(chain_class(s, i))).collect()
}

fn boundary_side(s: &SurfaceModel) -> Vec<TwistTerm> {
    (1..=s.boundary).map(|j| TwistTerm::boundary(s, j, 1)).collect()
}

fn repeat(word: Vec<TwistTerm>, n: usize) -> Vec<TwistTerm> {
    let mut out = Vec::with_capacity(word.len() * n);
    for _ in 0..n {
        out.extend(word.iter().cloned());
    }
    out
}

fn template(
    name: String,
    surface: SurfaceModel,
    lhs: Vec<TwistTerm>,
    rhs: Vec<TwistTerm>,
    kind: Option<LedgerKind>,
) -> RelationTemplate {
    RelationTemplate { name, surface, lhs, rhs, ledger_kind: kind, coefficients: Coefficients::Integer }
}

/// `t_x t_y t_z = t_{δ_1} t_{δ_2} t_{δ_3} t_{δ_4}` on `Σ_0^4`.
pub fn lantern() -> RelationTemplate {
    let s = SurfaceModel::new(0, 4, 0);
    let c = |v: [i64; 3], l: &str| TwistTerm::positive(CurveClass::from_i64(&v).with_label(l));
    let lhs = vec![c([1, 1, 0], "x"), c([0, 1, 1], "y"), c([1, 0, 1], "z")];
    template("lantern".into(), s, lhs, boundary_side(&s), Some(LedgerKind::Lantern))
}

/// `(c_1 ⋯ c_{2g+1})^{2g+2} = t_{δ_1} t_{δ_2}` on `Σ_g^2`.
pub fn odd_chain(g: usize) -> RelationTemplate {
    let s = SurfaceModel::new(g, 2, 0);
    let kind = match g {
        1 => Some(LedgerKind::Chain3),
        2 => Some(LedgerKind::Chain5),
        _ => None,
    };
    let lhs = repeat(positives(&s, 1..=2 * g + 1), 2 * g + 2);
    template(format!("odd_chain({g})"), s, lhs, boundary_side(&s), kind)
}

/// `(c_1 ⋯ c_{2g})^{4g+2} = t_δ` on `Σ_g^1`.
pub fn even_chain(g: usize) -> RelationTemplate {
    let s = SurfaceModel::new(g, 1, 0);
    let kind = match g {
        1 => Some(LedgerKind::Chain2),
        2 => Some(LedgerKind::Chain4),
        _ => None,
    };
    let lhs = repeat(positives(&s, 1..=2 * g), 4 * g + 2);
    template(format!("even_chain({g})"), s, lhs, boundary_side(&s), kind)
}

/// `(c_1 ⋯ c_{2g} c_{2g+1}^2 c_{2g} ⋯ c_1)^2 = 1` on the closed surface,
/// with signature `−4(g+1)`.
pub fn hyperelliptic(g: usize) -> RelationTemplate {
    let s = SurfaceModel::closed(g);
    let half: Vec<usize> = (1..=2 * g).chain([2 * g + 1, 2 * g + 1]).chain((1..=2 * g).rev()).collect();
    let lhs = repeat(positives(&s, half), 2);
    let kind = LedgerKind::Custom { name: format!("hyperelliptic_{g}"), value: -4 * (g as i64 + 1) };
    template(format!("hyperelliptic({g})"), s, lhs, Vec::new(), Some(kind))
}

/// Yun's relator on the closed surface of genus `2m + n − 1` (`m ≥ 1`,
/// `n ≥ 2`). Only the mod-2 classes are known, so the template has Z2
/// coefficients and no signature value.
///
/// Basis: `α_i, β_i` for `i < n` followed by `α'_j, β'_j` for `j ≤ 2m`.
pub fn yun(m: usize, n: usize) -> RelationTemplate {
    assert!(m >= 1 && n >= 2, "yun(m, n) requires m ≥ 1 and n ≥ 2");
    let g = 2 * m + n - 1;
    let s = SurfaceModel::closed(g);
    let a = |i: usize| 2 * (i - 1);
    let b = |i: usize| 2 * (i - 1) + 1;
    let ap = |j: usize| 2 * (n - 1 + j - 1);
    let bp = |j: usize| 2 * (n - 1 + j - 1) + 1;
    let class = |idx: &[usize], label: String| {
        let mut v = vec![Int::zero(); s.rank()];
        for &i in idx {
            v[i] = (&v[i] + Int::one()) % Int::from(2);
        }
        TwistTerm::positive(CurveClass::new(v).with_label(label))
    };
    // A_1, …, A_{2n−1}.
    let big_a = |k: usize| -> TwistTerm {
        let idx = if k % 2 == 0 {
            vec![a(k / 2)]
        } else if k == 1 {
            vec![b(1)]
        } else if k == 2 * n - 1 {
            vec![b(n - 1)]
        } else {
            let i = k.div_ceil(2);
            vec![b(i - 1), b(i)]
        };
        class(&idx, format!("A{k}"))
    };
    // B_0, …, B_{2m}.
    let big_b = |k: usize| -> TwistTerm {
        let mut idx = vec![b(n - 1)];
        if k == 0 {
            idx.extend((1..=2 * m).map(ap));
        } else if k % 2 == 0 {
            let j = k / 2;
            idx.extend((j + 1..=2 * m - j).map(ap));
            idx.push(bp(j));
            idx.push(bp(2 * m + 1 - j));
        } else {
            let j = k.div_ceil(2);
            idx.extend((j..=2 * m + 1 - j).map(ap));
            idx.push(bp(j));
            idx.push(bp(2 * m + 1 - j));
        }
        class(&idx, format!("B{k}"))
    };
    let mut word = Vec::new();
    word.extend((2..=2 * n - 2).rev().map(big_a));
    word.push(big_a(1));
    word.push(big_a(1));
    word.extend((2..=2 * n - 2).map(big_a));
    word.extend((0..=2 * m).map(big_b));
    word.push(big_a(2 * n - 1));
    let lhs = repeat(word, 2);
    RelationTemplate {
        name: format!("yun({m},{n})"),
        surface: s,
        lhs,
        rhs: Vec::new(),
        ledger_kind: None,
        coefficients: Coefficients::Z2,
    }
}

impl RelationTemplate {
    /// The interior side as a factorization whose target records the
    /// boundary side (all ones for the builtin templates with boundary).
    pub fn pencil(&self) -> Factorization {
        let mut target = vec![0i64; self.surface.boundary];
        for t in self.rhs.iter().filter(|t| t.kind == TermKind::Boundary) {
            if let Some(j) = t.component {
                target[j - 1] += i64::from(t.sign);
            }
        }
        if target.iter().all(|e| *e == 0) {
            target.clear();
        }
        Factorization { surface: self.surface, terms: self.lhs.clone(), target, coefficients: self.coefficients }
    }

    /// The pencil with every boundary component capped.
    pub fn capped(&self) -> Result<Factorization> {
        let all: Vec<usize> = (1..=self.surface.boundary).collect();
        cap_boundary(&self.pencil(), &all)
    }

    /// The relator `lhs · rhs^{-1}`.
    pub fn relator(&self) -> Factorization {
        let mut terms = self.lhs.clone();
        terms.extend(self.rhs.iter().rev().map(TwistTerm::inverse));
        Factorization { surface: self.surface, terms, target: Vec::new(), coefficients: self.coefficients }
    }

    /// Whether both sides have the same product on homology (mod 2 for Z2
    /// templates).
    pub fn is_balanced(&self) -> Result<bool> {
        let l = word_matrix(&self.lhs, &self.surface)?;
        let r = word_matrix(&self.rhs, &self.surface)?;
        Ok(same_product(l.matrix(), r.matrix(), self.coefficients))
    }
}

fn same_product(a: &Matrix<Int>, b: &Matrix<Int>, coefficients: Coefficients) -> bool {
    match coefficients {
        Coefficients::Integer => a == b,
        Coefficients::Z2 => {
            let two = Int::from(2);
            a.map(|x| x.mod_floor(&two)) == b.map(|x| x.mod_floor(&two))
        }
    }
}

/// A homological embedding of a model surface into a target surface:
/// column `i` is the image of the `i`-th basis class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingMap {
    pub small: SurfaceModel,
    pub big: SurfaceModel,
    pub matrix: Matrix<Int>,
    /// For each boundary component of `small`, the boundary component of
    /// `big` it is identified with (`None`: it becomes an interior curve).
    pub boundary_map: Vec<Option<usize>>,
}

/// Checks that `matrix` (`rank(big) × rank(small)`) preserves the pairing,
/// `Eᵀ J_big E = J_small`.
pub fn make_embedding(matrix: Matrix<Int>, small: SurfaceModel, big: SurfaceModel) -> Result<EmbeddingMap> {
    if matrix.rows() != big.rank() || matrix.cols() != small.rank() {
        return Err(Error::InvalidEmbedding(format!(
            "matrix is {}×{}, expected {}×{}",
            matrix.rows(),
            matrix.cols(),
            big.rank(),
            small.rank()
        )));
    }
    let pulled = matrix.transpose().mul(&big.pairing_matrix()).mul(&matrix);
    if pulled != small.pairing_matrix() {
        return Err(Error::InvalidEmbedding("the map does not preserve the intersection pairing".into()));
    }
    Ok(EmbeddingMap { small, big, matrix, boundary_map: vec![None; small.boundary] })
}

impl EmbeddingMap {
    /// Embedding given by the images of the basis classes of `small`.
    ///
    /// Images are signed coordinate vectors: unlike [`CurveClass`], whose
    /// sign is normalized away, the orientation of each image matters here.
    pub fn from_images(small: SurfaceModel, big: SurfaceModel, images: &[Vec<Int>]) -> Result<Self> {
        for c in images {
            big.check_len(c.len())?;
        }
        let matrix = Matrix::from_cols(big.rank(), images)
            .filter(|m| m.cols() == small.rank())
            .ok_or_else(|| Error::InvalidEmbedding(format!("expected {} images", small.rank())))?;
        make_embedding(matrix, small, big)
    }

    /// The identity embedding, matching boundary components one-to-one.
    pub fn identity(s: SurfaceModel) -> Self {
        EmbeddingMap {
            small: s,
            big: s,
            matrix: Matrix::identity(s.rank()),
            boundary_map: (1..=s.boundary).map(Some).collect(),
        }
    }

    /// Identifies small boundary components with big ones.
    pub fn with_boundary_map(mut self, map: Vec<Option<usize>>) -> Result<Self> {
        if map.len() != self.small.boundary || map.iter().flatten().any(|&j| j == 0 || j > self.big.boundary) {
            return Err(Error::InvalidEmbedding("boundary map does not fit the surfaces".into()));
        }
        self.boundary_map = map;
        Ok(self)
    }

    /// Image of a class of the small surface.
    pub fn apply(&self, c: &CurveClass) -> CurveClass {
        let img = CurveClass::new(self.matrix.mul_vec(c.coords()));
        match c.label() {
            Some(l) => img.with_label(l),
            None => img,
        }
    }

    /// Image of a template term.
    pub fn apply_term(&self, t: &TwistTerm) -> TwistTerm {
        let mapped = t.component.and_then(|j| self.boundary_map.get(j - 1).copied().flatten());
        let curve = match (t.kind, mapped) {
            (TermKind::Boundary, Some(j)) => {
                let d = self.big.delta(j);
                match t.curve.label() {
                    Some(l) => d.with_label(l),
                    None => d,
                }
            }
            _ => self.apply(&t.curve),
        };
        let (kind, component) = match (t.kind, mapped) {
            (TermKind::Boundary, Some(j)) => (TermKind::Boundary, Some(j)),
            (TermKind::Boundary, None) => (TermKind::Dehn, None),
            (k, _) => (k, None),
        };
        TwistTerm { kind, curve, sign: t.sign, component }
    }
}

/// Outcome of [`substitute`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    pub factorization: Factorization,
    pub ledger_entry: LedgerEntry,
}

fn terms_match(seg: &TwistTerm, img: &TwistTerm, z2: bool) -> bool {
    if seg.kind == TermKind::Push || seg.sign != img.sign {
        return false;
    }
    if z2 {
        seg.curve.reduced_mod2() == img.curve.reduced_mod2()
    } else {
        seg.curve == img.curve
    }
}

fn first_mismatch(seg: &[TwistTerm], img: &[TwistTerm], z2: bool) -> Option<usize> {
    if seg.len() != img.len() {
        return Some(seg.len().min(img.len()));
    }
    seg.iter().zip(img).position(|(s, i)| !terms_match(s, i, z2))
}

/// Replaces the terms of `f` in `range` by the other side of `rel` (mapped
/// through `emb`).
///
/// If the segment matches the embedded boundary side it is replaced by the
/// interior side and the ledger gains the relation kind; if it matches the
/// interior side it is replaced by the boundary side and the ledger gains
/// the inverse kind. The product over the segment must be unchanged.
pub fn substitute(
    f: &Factorization,
    range: Range<usize>,
    rel: &RelationTemplate,
    emb: &EmbeddingMap,
) -> Result<Substitution> {
    if emb.small != rel.surface {
        return Err(Error::SurfaceMismatch(format!(
            "embedding source {} vs relation surface {}",
            emb.small, rel.surface
        )));
    }
    if emb.big != f.surface {
        return Err(Error::SurfaceMismatch(format!(
            "embedding target {} vs factorization surface {}",
            emb.big, f.surface
        )));
    }
    if range.start > range.end || range.end > f.terms.len() {
        return Err(Error::IndexOutOfRange { index: range.end, len: f.terms.len() });
    }
    let kind = rel.ledger_kind.clone().ok_or_else(|| Error::NoLedgerValue(rel.name.clone()))?;
    let coefficients = f.coefficients.max(rel.coefficients);
    let z2 = coefficients == Coefficients::Z2;
    let seg = &f.terms[range.clone()];
    let lhs: Vec<TwistTerm> = rel.lhs.iter().map(|t| emb.apply_term(t)).collect();
    let rhs: Vec<TwistTerm> = rel.rhs.iter().map(|t| emb.apply_term(t)).collect();
    let (replacement, entry_kind) = match (first_mismatch(seg, &rhs, z2), first_mismatch(seg, &lhs, z2)) {
        (None, _) => (lhs, kind),
        (_, None) => (rhs, kind.inverse()),
        (Some(a), Some(b)) => {
            let (pos, side) = if a >= b { (a, "boundary") } else { (b, "interior") };
            return Err(Error::SubstitutionMismatch {
                position: range.start + pos,
                message: format!("segment does not match the {side} side of {}", rel.name),
            });
        }
    };
    let before = word_matrix(seg, &f.surface)?;
    let after = word_matrix(&replacement, &f.surface)?;
    if !same_product(before.matrix(), after.matrix(), coefficients) {
        return Err(Error::ProductChanged);
    }
    let mut terms = f.terms[..range.start].to_vec();
    terms.extend(replacement.into_iter().map(|mut t| {
        if z2 {
            let label = t.curve.label().map(str::to_string);
            t.curve = t.curve.reduced_mod2();
            if let Some(l) = label {
                t.curve = t.curve.with_label(l);
            }
        }
        t
    }));
    terms.extend(f.terms[range.end..].iter().cloned());
    let factorization = Factorization { terms, ..f.clone() };
    factorization.validate()?;
    Ok(Substitution { factorization, ledger_entry: LedgerEntry::new(entry_kind, 1) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twist::homological_triviality;

    #[test]
    fn builtin_templates_are_balanced() {
        for name in [
            "lantern",
            "chain(2)",
            "chain(3)",
            "chain(4)",
            "chain(5)",
            "odd_chain(3)",
            "even_chain(3)",
            "hyperelliptic(4)",
            "yun(1,2)",
            "yun(2,3)",
        ] {
            let t = builtin_relation_by_name(name).unwrap();
            assert!(t.is_balanced().unwrap(), "{name}");
        }
    }

    #[test]
    fn term_counts() {
        assert_eq!(builtin_relation_by_name("hyperelliptic(3)").unwrap().lhs.len(), 8 * 3 + 4);
        assert_eq!(builtin_relation_by_name("chain(2)").unwrap().lhs.len(), 12);
        assert_eq!(builtin_relation_by_name("chain(5)").unwrap().lhs.len(), 30);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(RelationSpec::parse("yun( 2, 3 )").unwrap(), RelationSpec::Yun { m: 2, n: 3 });
        assert!(RelationSpec::parse("chain").is_err());
        assert!(builtin_relation_by_name("chain(6)").is_err());
        assert!(builtin_relation_by_name("yun(1,1)").is_err());
    }

    #[test]
    fn capped_odd_chain_is_trivial() {
        let f = odd_chain(3).capped().unwrap();
        assert!(f.surface.is_closed());
        assert!(homological_triviality(&f).trivial);
    }
}
