//! Numerical invariants of the total space: Euler characteristic, signature
//! by relation ledger and by the Meyer cocycle, first homology, and
//! fiber-class divisibility.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::homology::{abelian_quotient, int_list, AbelianGroupInvariants, CurveClass, SurfaceModel};
use crate::linalg::{kernel, signature, smith_normal_form, Matrix};
use crate::twist::{factor_matrix, homological_triviality, is_symplectic, SymplecticMatrix, TermKind};
use crate::{Coefficients, Error, Factorization, Int, Rational, Result};

/// Global sign relating the summed Meyer cocycle to the signature, fixed by
/// calibration: `(t_a t_b)^6` on the torus has signature `−8`.
pub const MEYER_GLOBAL_SIGN: i64 = -1;

/// Local signature contribution of a positive twist along an essential
/// separating (zero-class) curve; negative twists contribute the opposite.
/// Experimental: no builtin fixture has separating vanishing cycles.
pub const SEPARATING_LOCAL_TERM: i64 = -1;

/// Base of a fibration, for the Euler characteristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Base {
    /// Fibration over a closed surface of genus `h` (`h = 0` is the sphere).
    Genus(usize),
    /// Pencil over the sphere with one base point per boundary component.
    Pencil,
}

impl Base {
    pub const SPHERE: Base = Base::Genus(0);
}

/// `4(g−1)(h−1) + n` for fibrations, `4 − 4g + n − b` for pencils, with `n`
/// the number of Dehn twist terms.
pub fn euler_char(f: &Factorization, base: Base) -> Result<i64> {
    let g = f.surface.genus as i64;
    let n = f.dehn_count() as i64;
    match base {
        Base::Genus(h) => Ok(4 * (g - 1) * (h as i64 - 1) + n),
        Base::Pencil => {
            if f.surface.boundary == 0 {
                return Err(Error::NotPencil("a pencil needs at least one boundary component".into()));
            }
            Ok(4 - 4 * g + n - f.surface.boundary as i64)
        }
    }
}

/// Relation kinds with a fixed signature contribution per use.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LedgerKind {
    Lantern,
    Chain2,
    Chain3,
    Chain4,
    Chain5,
    Chain5Inverse,
    /// Capping a boundary component (filling a base point) blows up the
    /// total space once.
    Blowup,
    Custom {
        name: String,
        value: i64,
    },
}

impl LedgerKind {
    /// Signature contribution of one use.
    pub fn value(&self) -> i64 {
        match self {
            LedgerKind::Lantern => 1,
            LedgerKind::Chain2 => -7,
            LedgerKind::Chain3 => -6,
            LedgerKind::Chain4 => -23,
            LedgerKind::Chain5 => -16,
            LedgerKind::Chain5Inverse => 16,
            LedgerKind::Blowup => -1,
            LedgerKind::Custom { value, .. } => *value,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            LedgerKind::Lantern => "lantern",
            LedgerKind::Chain2 => "chain_2",
            LedgerKind::Chain3 => "chain_3",
            LedgerKind::Chain4 => "chain_4",
            LedgerKind::Chain5 => "chain_5",
            LedgerKind::Chain5Inverse => "chain_5_inverse",
            LedgerKind::Blowup => "blowup",
            LedgerKind::Custom { name, .. } => name,
        }
    }

    /// Parses a builtin kind name.
    pub fn builtin(name: &str) -> Option<Self> {
        Some(match name {
            "lantern" => LedgerKind::Lantern,
            "chain_2" => LedgerKind::Chain2,
            "chain_3" => LedgerKind::Chain3,
            "chain_4" => LedgerKind::Chain4,
            "chain_5" => LedgerKind::Chain5,
            "chain_5_inverse" => LedgerKind::Chain5Inverse,
            "blowup" => LedgerKind::Blowup,
            _ => return None,
        })
    }

    /// The kind recorded when a relation is used backwards.
    pub fn inverse(&self) -> Self {
        match self {
            LedgerKind::Chain5 => LedgerKind::Chain5Inverse,
            LedgerKind::Chain5Inverse => LedgerKind::Chain5,
            other => match other.name().strip_suffix("_inverse") {
                Some(base) => LedgerKind::builtin(base)
                    .unwrap_or(LedgerKind::Custom { name: base.to_string(), value: -other.value() }),
                None => LedgerKind::Custom { name: format!("{}_inverse", other.name()), value: -other.value() },
            },
        }
    }
}

impl fmt::Display for LedgerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A relation kind and the number of times it was used.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LedgerEntry {
    pub kind: LedgerKind,
    pub count: u64,
}

impl LedgerEntry {
    pub fn new(kind: LedgerKind, count: u64) -> Self {
        LedgerEntry { kind, count }
    }
}

/// `Σ count × contribution`.
pub fn signature_ledger(entries: &[LedgerEntry]) -> i64 {
    entries.iter().map(|e| e.kind.value() * e.count as i64).sum()
}

/// Adds `entry` to a ledger, merging with an existing entry of equal kind.
pub fn ledger_add(ledger: &mut Vec<LedgerEntry>, entry: LedgerEntry) {
    match ledger.iter_mut().find(|e| e.kind == entry.kind) {
        Some(e) => e.count += entry.count,
        None => ledger.push(entry),
    }
}

/// Inverse of a matrix preserving a (possibly degenerate) pairing.
fn symplectic_inverse(a: &Matrix<Int>, s: &SurfaceModel) -> Matrix<Int> {
    if s.is_closed() {
        // A⁻¹ = −J Aᵀ J when J is nondegenerate.
        let j = s.pairing_matrix();
        j.mul(&a.transpose()).mul(&j).neg()
    } else {
        SymplecticMatrix::new(a.clone(), s).map(|m| m.inverse().into_matrix()).unwrap_or_else(|_| a.clone())
    }
}

/// Meyer's signature cocycle `τ(A, B)`.
///
/// The signature of the symmetrized form
/// `((x₁,y₁),(x₂,y₂)) ↦ (x₁+y₁)ᵀ J (I−B) y₂` on
/// `V = {(x, y) : (A⁻¹ − I)x + (B − I)y = 0}`, in exact rational arithmetic.
pub fn meyer_cocycle(a: &Matrix<Int>, b: &Matrix<Int>, s: &SurfaceModel) -> Result<i64> {
    if !is_symplectic(a, s) || !is_symplectic(b, s) {
        return Err(Error::NotSymplectic);
    }
    Ok(meyer_unchecked(a, b, s))
}

fn meyer_unchecked(a: &Matrix<Int>, b: &Matrix<Int>, s: &SurfaceModel) -> i64 {
    let n = s.rank();
    let a_inv = symplectic_inverse(a, s);
    let id = Matrix::<Int>::identity(n);
    let left = a_inv.sub(&id);
    let right = b.sub(&id);
    let mut system = Matrix::<Rational>::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            system.set(i, j, Rational::from_integer(left.get(i, j).clone()));
            system.set(i, n + j, Rational::from_integer(right.get(i, j).clone()));
        }
    }
    let basis = integral_kernel(&system);
    if basis.is_empty() {
        return 0;
    }
    let j_i_minus_b = s.pairing_matrix().mul(&id.sub(b));
    let sums: Vec<Vec<Int>> = basis.iter().map(|v| (0..n).map(|i| &v[i] + &v[n + i]).collect()).collect();
    let images: Vec<Vec<Int>> = basis.iter().map(|v| j_i_minus_b.mul_vec(&v[n..])).collect();
    let dot = |x: &[Int], y: &[Int]| x.iter().zip(y).fold(Int::zero(), |acc, (p, q)| acc + p * q);
    let k = basis.len();
    // Twice the symmetrized form; the factor 2 does not change the signature.
    let mut gram = Matrix::<Rational>::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = dot(&sums[i], &images[j]) + dot(&sums[j], &images[i]);
            gram.set(i, j, Rational::from_integer(v.clone()));
            gram.set(j, i, Rational::from_integer(v));
        }
    }
    signature(&gram)
}

/// Kernel basis scaled to primitive integer vectors.
fn integral_kernel(m: &Matrix<Rational>) -> Vec<Vec<Int>> {
    kernel(m)
        .into_iter()
        .map(|v| {
            let l = v.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
            let ints: Vec<Int> = v.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
            let g = ints.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
            if g.is_zero() || g.is_one() {
                ints
            } else {
                ints.into_iter().map(|x| x / &g).collect()
            }
        })
        .collect()
}

/// Signature of the total space of a homologically trivial factorization on
/// a closed surface, by summing the Meyer cocycle along prefix products.
///
/// `σ = MEYER_GLOBAL_SIGN · Σ_j τ(P_{j−1}, T_j) + Σ local terms`, where each
/// Dehn twist along a zero class contributes `SEPARATING_LOCAL_TERM × sign`.
/// A trivial commutator pair over a torus base adds nothing, so the value
/// applies to sphere and torus bases alike.
pub fn signature_meyer(f: &Factorization) -> Result<i64> {
    if f.coefficients != Coefficients::Integer {
        return Err(Error::RequiresIntegerCoefficients("the Meyer signature"));
    }
    if !f.surface.is_closed() {
        return Err(Error::RequiresClosedSurface("the Meyer signature"));
    }
    if !homological_triviality(f).trivial {
        return Err(Error::NotTrivial);
    }
    let s = &f.surface;
    let mut prefix = Matrix::<Int>::identity(s.rank());
    let mut cocycles = 0i64;
    let mut local = 0i64;
    for t in f.terms.iter().filter(|t| t.kind == TermKind::Dehn) {
        if t.curve.is_zero() {
            local += SEPARATING_LOCAL_TERM * t.sign as i64;
            continue;
        }
        let tj = crate::twist::transvection(&t.curve, t.sign, s)?.into_matrix();
        cocycles += meyer_unchecked(&prefix, &tj, s);
        prefix = prefix.mul(&tj);
    }
    debug_assert!(prefix == factor_matrix(f).into_matrix());
    Ok(MEYER_GLOBAL_SIGN * cocycles + local)
}

/// How the base of the fibration contributes to first homology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum H1Base {
    Sphere,
    /// Torus base whose extra monodromy pair is a trivial commutator.
    TorusTrivialCommutator,
}

/// First homology of the total space: `Z^{2g} / ⟨vanishing classes, α⟩`,
/// plus `Z²` over a torus base with trivial commutator. Boundary
/// coordinates are dropped (pencils are blown up at their base points).
pub fn h1_total_space(f: &Factorization, base: H1Base, pushes: Option<&CurveClass>) -> Result<AbelianGroupInvariants> {
    if f.coefficients != Coefficients::Integer {
        return Err(Error::RequiresIntegerCoefficients("first homology"));
    }
    let closed = 2 * f.surface.genus;
    let mut relations: Vec<Vec<Int>> = f.dehn_classes().iter().map(|c| c.coords()[..closed].to_vec()).collect();
    if let Some(p) = pushes {
        f.surface.check_len(p.len())?;
        relations.push(p.coords()[..closed].to_vec());
    }
    let mut h1 = abelian_quotient(closed, &relations)?;
    if base == H1Base::TorusTrivialCommutator {
        h1.free_rank += 2;
    }
    Ok(h1)
}

/// Outcome of [`fiber_divisibility`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisibilityResult {
    /// Least `d ≥ 1` with `d·α` in the span of the cycles; `None` if `α`
    /// has infinite order in the quotient.
    pub d: Option<u64>,
    /// The class `α` (sum of point-push loop classes).
    #[serde(with = "int_list")]
    pub alpha_class: Vec<Int>,
    /// Whether `d = 1`, i.e. the fiber class is primitive.
    pub primitive: bool,
}

/// Least `d ≥ 1` with `d·alpha ∈ span_Z(cycles)`, via the Smith normal form
/// of the cycle matrix.
pub fn fiber_divisibility(cycles: &[CurveClass], alpha: &CurveClass) -> Result<DivisibilityResult> {
    let n = alpha.len();
    if let Some(bad) = cycles.iter().find(|c| c.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
    }
    let alpha_class = alpha.coords().to_vec();
    if alpha.is_zero() {
        return Ok(DivisibilityResult { d: Some(1), alpha_class, primitive: true });
    }
    if cycles.is_empty() {
        return Ok(DivisibilityResult { d: None, alpha_class, primitive: false });
    }
    // Rows of M span L; with U M V = D, L = span of d_i · (row i of V⁻¹), so
    // α has coordinates y = α V in the adapted basis.
    let m = Matrix::from_rows(cycles.iter().map(|c| c.coords().to_vec()).collect()).expect("equal lengths");
    let snf = smith_normal_form(&m);
    let diag = snf.diagonal();
    let y: Vec<Int> =
        (0..n).map(|j| (0..n).fold(Int::zero(), |acc, i| acc + &alpha_class[i] * snf.v.get(i, j))).collect();
    let mut d = Int::one();
    for (j, yj) in y.iter().enumerate() {
        let dj = diag.get(j).cloned().unwrap_or_else(Int::zero);
        if dj.is_zero() {
            if !yj.is_zero() {
                return Ok(DivisibilityResult { d: None, alpha_class, primitive: false });
            }
            continue;
        }
        let order = &dj / dj.gcd(yj);
        d = d.lcm(&order);
    }
    let d = u64::try_from(d.abs()).ok();
    Ok(DivisibilityResult { primitive: d == Some(1), d, alpha_class })
}

/// Summary of the computable invariants of a factorization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub euler: i64,
    pub sigma_ledger: Option<i64>,
    /// Absent for pencils and Z2-only data, where the cocycle is unavailable.
    pub sigma_meyer: Option<i64>,
    pub h1: Option<AbelianGroupInvariants>,
    pub divisibility: Option<u64>,
}

impl InvariantReport {
    /// Ledger and Meyer signatures agree whenever both are present.
    pub fn consistent(&self) -> bool {
        match (self.sigma_ledger, self.sigma_meyer) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }
}

/// Computes every invariant available for `f`.
///
/// The class `α` of a lift is the sum of the point-push terms of `f`, or
/// `pseudosection` when given. Divisibility is only reported for closed
/// fibrations where `α` is known (push terms present or a pseudosection
/// supplied); first homology includes `α` whenever it is known.
pub fn invariant_report(
    f: &Factorization,
    ledger: Option<&[LedgerEntry]>,
    pseudosection: Option<&CurveClass>,
) -> Result<InvariantReport> {
    let base = if f.surface.is_closed() { Base::SPHERE } else { Base::Pencil };
    let euler = euler_char(f, base)?;
    let integer = f.coefficients == Coefficients::Integer;
    let sigma_meyer = if integer && f.surface.is_closed() { Some(signature_meyer(f)?) } else { None };
    let has_push = f.terms.iter().any(|t| t.kind == TermKind::Push);
    let alpha = match pseudosection {
        Some(p) => {
            f.surface.check_len(p.len())?;
            Some(p.clone())
        }
        None => has_push.then(|| f.push_class_sum()),
    };
    let (h1, divisibility) = if integer {
        let h1 = h1_total_space(f, H1Base::Sphere, alpha.as_ref())?;
        let div = match &alpha {
            Some(a) if f.surface.is_closed() => fiber_divisibility(&f.dehn_classes(), a)?.d,
            _ => None,
        };
        (Some(h1), div)
    } else {
        (None, None)
    };
    Ok(InvariantReport { euler, sigma_ledger: ledger.map(signature_ledger), sigma_meyer, h1, divisibility })
}
