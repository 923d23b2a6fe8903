//! Quadratic forms over GF(2) constrained by vanishing cycles, and the spin
//! decision procedures for pencils and fibrations.

use serde::{Deserialize, Serialize};

use crate::homology::{arf, q_eval};
use crate::invariants::DivisibilityResult;
use crate::linalg::solve_gf2;
use crate::twist::homological_triviality;
use crate::{CurveClass, Error, Factorization, QuadraticFormZ2, Result, SurfaceModel};

/// Default enumeration cap, as a power of two.
pub const DEFAULT_CAP_LOG2: usize = 20;

/// Affine space of quadratic forms satisfying prescribed values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormSolutionSet {
    pub particular: Option<QuadraticFormZ2>,
    pub homogeneous_basis: Vec<Vec<bool>>,
    /// `2^dim`, or 0 when there is no solution.
    pub count: u128,
}

impl FormSolutionSet {
    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.particular.as_ref().map(|_| self.homogeneous_basis.len())
    }

    /// Whether `q` lies in the set.
    pub fn contains(&self, q: &QuadraticFormZ2) -> bool {
        let Some(p) = &self.particular else { return false };
        // q − p must lie in the span of the homogeneous basis.
        let diff: Vec<bool> = q.basis_values.iter().zip(&p.basis_values).map(|(a, b)| a ^ b).collect();
        let n = diff.len();
        let rows: Vec<Vec<bool>> = (0..n).map(|i| self.homogeneous_basis.iter().map(|v| v[i]).collect()).collect();
        solve_gf2(&rows, &diff, self.homogeneous_basis.len()).is_some()
    }

    /// Enumerates all members; errors if the dimension exceeds `2^cap_log2`.
    pub fn members(&self, cap_log2: usize) -> Result<Vec<QuadraticFormZ2>> {
        let Some(p) = &self.particular else { return Ok(Vec::new()) };
        let dim = self.homogeneous_basis.len();
        if dim > cap_log2 {
            return Err(Error::CapExceeded { dim, cap_log2 });
        }
        let mut out = Vec::with_capacity(1 << dim);
        for mask in 0u64..(1u64 << dim) {
            let mut v = p.basis_values.clone();
            for (k, h) in self.homogeneous_basis.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    for (x, y) in v.iter_mut().zip(h) {
                        *x ^= *y;
                    }
                }
            }
            out.push(QuadraticFormZ2::new(v));
        }
        Ok(out)
    }
}

/// All quadratic forms with `q(c) = 1` for every cycle and `q(x) = v` for
/// every extra constraint `(x, v)`.
///
/// Expanding `q(Σ x_i e_i) = Σ x_i q(e_i) + Σ_k x_{α_k} x_{β_k}` makes each
/// constraint linear in the basis values.
pub fn solve_forms(cycles: &[CurveClass], extra: &[(CurveClass, bool)], s: &SurfaceModel) -> Result<FormSolutionSet> {
    let n = s.rank();
    let constraints = cycles.iter().map(|c| (c, true)).chain(extra.iter().map(|(c, v)| (c, *v)));
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (c, value) in constraints {
        s.check_len(c.len())?;
        let bits = c.mod2();
        let cross = (0..s.genus).filter(|&k| bits[2 * k] && bits[2 * k + 1]).count() % 2 == 1;
        rows.push(bits);
        rhs.push(value ^ cross);
    }
    Ok(match solve_gf2(&rows, &rhs, n) {
        None => FormSolutionSet { particular: None, homogeneous_basis: Vec::new(), count: 0 },
        Some(sol) => {
            let count = 1u128 << sol.homogeneous.len();
            FormSolutionSet {
                particular: Some(QuadraticFormZ2::new(sol.particular)),
                homogeneous_basis: sol.homogeneous,
                count,
            }
        }
    })
}

/// Solutions for the Dehn twist classes of a factorization.
pub fn solve_factorization_forms(f: &Factorization) -> Result<FormSolutionSet> {
    solve_forms(&f.dehn_classes(), &[], &f.surface)
}

/// Numbers of solutions with Arf invariant 0 and 1, with the default cap.
pub fn classify_arf(sol: &FormSolutionSet, s: &SurfaceModel) -> Result<(u64, u64)> {
    classify_arf_with_cap(sol, s, DEFAULT_CAP_LOG2)
}

/// Numbers of solutions with Arf invariant 0 and 1, by enumeration.
pub fn classify_arf_with_cap(sol: &FormSolutionSet, s: &SurfaceModel, cap_log2: usize) -> Result<(u64, u64)> {
    let members = sol.members(cap_log2)?;
    let ones = members.iter().filter(|q| arf(q, s)).count() as u64;
    Ok((members.len() as u64 - ones, ones))
}

/// Decision of a spin check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinStatus {
    Spin,
    NotSpin,
    Inconclusive,
}

/// A spin decision; a `Spin` verdict always carries a witness form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinVerdict {
    pub status: SpinStatus,
    pub witness: Option<QuadraticFormZ2>,
    pub reason: String,
}

impl SpinVerdict {
    fn spin(witness: QuadraticFormZ2, reason: impl Into<String>) -> Self {
        SpinVerdict { status: SpinStatus::Spin, witness: Some(witness), reason: reason.into() }
    }

    fn not_spin(reason: impl Into<String>) -> Self {
        SpinVerdict { status: SpinStatus::NotSpin, witness: None, reason: reason.into() }
    }

    fn inconclusive(reason: impl Into<String>) -> Self {
        SpinVerdict { status: SpinStatus::Inconclusive, witness: None, reason: reason.into() }
    }

    pub fn is_spin(&self) -> bool {
        self.status == SpinStatus::Spin
    }
}

/// Whether `q` certifies the pencil criterion for `f`: `q = 1` on every
/// vanishing cycle and on some boundary class `δ_j`.
pub fn verify_pencil_witness(f: &Factorization, q: &QuadraticFormZ2) -> Result<bool> {
    let s = &f.surface;
    for c in f.dehn_classes() {
        if !q_eval(q, &c, s)? {
            return Ok(false);
        }
    }
    for j in 1..=s.boundary {
        if q_eval(q, &s.delta(j), s)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Spin criterion for pencils: spin iff some boundary index `j` admits a
/// form with value 1 on every twist and on `δ_j`.
pub fn pencil_spin_check(f: &Factorization) -> Result<SpinVerdict> {
    let s = &f.surface;
    if s.boundary == 0 {
        return Err(Error::NotPencil("no boundary components (base points)".into()));
    }
    let cycles = f.dehn_classes();
    if solve_forms(&cycles, &[], s)?.is_empty() {
        return Ok(SpinVerdict::not_spin("no quadratic form is 1 on every vanishing cycle"));
    }
    for j in 1..=s.boundary {
        let sol = solve_forms(&cycles, &[(s.delta(j), true)], s)?;
        if let Some(q) = sol.particular {
            debug_assert!(verify_pencil_witness(f, &q)?);
            return Ok(SpinVerdict::spin(q, format!("form is 1 on every vanishing cycle and on δ_{j}")));
        }
    }
    Ok(SpinVerdict::not_spin("every admissible form vanishes on all boundary classes"))
}

/// Self-intersection parity of an algebraic dual of the fiber (supplied by
/// the caller; not computable from the monodromy).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualParity {
    Even,
    Odd,
    Unknown,
}

/// Spin criterion for fibrations over the sphere. With `doubled`, the word
/// is treated as the square of a relator, which is spin as soon as an
/// admissible form exists; otherwise the dual parity decides.
pub fn fibration_spin_check(f: &Factorization, parity: DualParity, doubled: bool) -> Result<SpinVerdict> {
    if !f.surface.is_closed() {
        return Err(Error::RequiresClosedSurface("the fibration spin check"));
    }
    let sol = solve_factorization_forms(f)?;
    let Some(q) = sol.particular else {
        return Ok(SpinVerdict::not_spin("no quadratic form is 1 on every vanishing cycle"));
    };
    if doubled {
        return Ok(SpinVerdict::spin(q, "doubled factorization with an admissible form"));
    }
    Ok(match parity {
        DualParity::Even => SpinVerdict::spin(q, "admissible form and a dual of even square"),
        DualParity::Odd => SpinVerdict::not_spin("the dual of the fiber has odd square"),
        DualParity::Unknown => SpinVerdict::inconclusive("admissible forms exist but the dual parity is unknown"),
    })
}

/// Arf-invariant spin criterion for fibrations with primitive fiber class.
///
/// `σ ≢ 0 (mod 16)` rules out spin (Rokhlin); `d = 1`, `σ ≡ 0 (mod 16)` and
/// an admissible form of Arf invariant 1 give spin. Anything else,
/// including unmet preconditions, is inconclusive.
pub fn spin_via_arf(f: &Factorization, sigma: i64, div: &DivisibilityResult) -> Result<SpinVerdict> {
    if sigma.rem_euclid(16) != 0 {
        return Ok(SpinVerdict::not_spin(format!("signature {sigma} is not divisible by 16")));
    }
    if !f.surface.is_closed() {
        return Ok(SpinVerdict::inconclusive("not a closed-surface fibration"));
    }
    if !homological_triviality(f).trivial {
        return Ok(SpinVerdict::inconclusive("factorization is not homologically trivial"));
    }
    if !div.primitive {
        return Ok(SpinVerdict::inconclusive("fiber class is not known to be primitive"));
    }
    let sol = solve_factorization_forms(f)?;
    let members = match sol.members(DEFAULT_CAP_LOG2) {
        Ok(m) => m,
        Err(_) => return Ok(SpinVerdict::inconclusive("solution space exceeds the enumeration cap")),
    };
    match members.into_iter().find(|q| arf(q, &f.surface)) {
        Some(q) => Ok(SpinVerdict::spin(q, "primitive fiber, σ ≡ 0 (mod 16), admissible form with Arf 1")),
        None => Ok(SpinVerdict::inconclusive("no admissible form has Arf invariant 1")),
    }
}
