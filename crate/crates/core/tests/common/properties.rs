//! Randomized invariants of the homology model, 10,000 cases each.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{TestCaseError, TestRunner};
use twistbench::homology::{arf, pairing, q_eval};
use twistbench::invariants::meyer_cocycle;
use twistbench::linalg::{determinant, smith_normal_form, Matrix};
use twistbench::twist::{factor_matrix, hurwitz_move, is_symplectic, transvection};
use twistbench::{CurveClass, Direction, Factorization, Int, QuadraticFormZ2, SurfaceModel, TwistTerm};

const CASES: u32 = 10_000;

fn config() -> ProptestConfig {
    ProptestConfig { cases: CASES, failure_persistence: None, ..ProptestConfig::default() }
}

/// A surface of positive rank with genus ≤ 3 and at most two extra boundary
/// classes.
fn surface() -> impl Strategy<Value = SurfaceModel> {
    (0usize..=3, 0usize..=3)
        .prop_filter("positive rank", |(g, b)| 2 * g + b.saturating_sub(1) > 0)
        .prop_map(|(g, b)| SurfaceModel::new(g, b, 0))
}

fn coords(rank: usize, bound: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-bound..=bound, rank)
}

fn class(v: &[i64]) -> CurveClass {
    CurveClass::from_i64(v)
}

fn surface_with_classes(count: usize) -> impl Strategy<Value = (SurfaceModel, Vec<Vec<i64>>)> {
    surface().prop_flat_map(move |s| (Just(s), prop::collection::vec(coords(s.rank(), 3), count)))
}

/// Product of a few random transvections on a closed surface of genus 1–2.
fn symplectic_word(s: SurfaceModel) -> impl Strategy<Value = Matrix<Int>> {
    prop::collection::vec((coords(s.rank(), 2), prop::bool::ANY), 1..=3).prop_map(move |ts| {
        let terms: Vec<TwistTerm> =
            ts.iter().map(|(v, pos)| TwistTerm::dehn(class(v), if *pos { 1 } else { -1 })).collect();
        factor_matrix(&Factorization::relator(s, terms).unwrap()).into_matrix()
    })
}

/// Runs `test` on `CASES` inputs drawn from `strategy`.
fn check<S: Strategy>(strategy: &S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(config());
    runner.run(strategy, test).map_err(|e| e.to_string())
}

pub fn pairing_is_antisymmetric() -> Result<(), String> {
    check(&surface_with_classes(2), |(s, v)| {
        let (x, y) = (class(&v[0]), class(&v[1]));
        let xy = pairing(&x, &y, &s).unwrap();
        let yx = pairing(&y, &x, &s).unwrap();
        prop_assert_eq!(xy, -yx);
        prop_assert!(pairing(&x, &x, &s).unwrap().is_zero());
        Ok(())
    })
}

pub fn quadratic_forms_refine_the_pairing() -> Result<(), String> {
    check(
        &surface_with_classes(2)
            .prop_flat_map(|(s, v)| (Just(s), Just(v), prop::collection::vec(prop::bool::ANY, s.rank()))),
        |(s, v, bits)| {
            let q = QuadraticFormZ2::new(bits);
            let (x, y) = (class(&v[0]), class(&v[1]));
            let sum: Vec<i64> = v[0].iter().zip(&v[1]).map(|(a, b)| a + b).collect();
            let lhs = q_eval(&q, &class(&sum), &s).unwrap();
            let dot = pairing(&x, &y, &s).unwrap();
            let rhs = q_eval(&q, &x, &s).unwrap() ^ q_eval(&q, &y, &s).unwrap() ^ dot.is_odd();
            prop_assert_eq!(lhs, rhs);
            Ok(())
        },
    )
}

pub fn arf_is_invariant_under_symplectic_change_of_basis() -> Result<(), String> {
    check(
        &(1usize..=3)
            .prop_map(SurfaceModel::closed)
            .prop_flat_map(|s| (Just(s), symplectic_word(s), prop::collection::vec(prop::bool::ANY, s.rank()))),
        |(s, m, bits)| {
            let q = QuadraticFormZ2::new(bits);
            // The pulled-back form q∘M is again a quadratic refinement.
            let pulled: Vec<bool> =
                (0..s.rank()).map(|i| q_eval(&q, &CurveClass::new(m.col(i)), &s).unwrap()).collect();
            prop_assert_eq!(arf(&QuadraticFormZ2::new(pulled), &s), arf(&q, &s));
            Ok(())
        },
    )
}

pub fn transvections_are_symplectic() -> Result<(), String> {
    check(&surface_with_classes(1).prop_flat_map(|(s, v)| (Just(s), Just(v), prop::bool::ANY)), |(s, v, pos)| {
        let t = transvection(&class(&v[0]), if pos { 1 } else { -1 }, &s).unwrap();
        prop_assert!(is_symplectic(t.matrix(), &s));
        // T_c and T_c^{-1} are mutually inverse.
        let inv = transvection(&class(&v[0]), if pos { -1 } else { 1 }, &s).unwrap();
        prop_assert!(t.mul(&inv).is_identity());
        Ok(())
    })
}

pub fn hurwitz_moves_preserve_the_product() -> Result<(), String> {
    check(
        &surface_with_classes(6).prop_flat_map(|(s, v)| {
            (Just(s), Just(v), prop::collection::vec(prop::bool::ANY, 6), 0usize..5, prop::bool::ANY)
        }),
        |(s, v, signs, i, right)| {
            let terms: Vec<TwistTerm> =
                v.iter().zip(&signs).map(|(c, p)| TwistTerm::dehn(class(c), if *p { 1 } else { -1 })).collect();
            let f = Factorization::relator(s, terms).unwrap();
            let dir = if right { Direction::Right } else { Direction::Left };
            let g = hurwitz_move(&f, i, dir).unwrap();
            prop_assert_eq!(factor_matrix(&g), factor_matrix(&f));
            prop_assert_eq!(g.len(), f.len());
            Ok(())
        },
    )
}

pub fn meyer_cocycle_identity() -> Result<(), String> {
    check(
        &(1usize..=2)
            .prop_map(SurfaceModel::closed)
            .prop_flat_map(|s| (Just(s), symplectic_word(s), symplectic_word(s), symplectic_word(s))),
        |(s, a, b, c)| {
            let tau = |x: &Matrix<Int>, y: &Matrix<Int>| meyer_cocycle(x, y, &s).unwrap();
            let lhs = tau(&a, &b) + tau(&a.mul(&b), &c);
            let rhs = tau(&a, &b.mul(&c)) + tau(&b, &c);
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(tau(&a, &b), tau(&b, &a));
            prop_assert_eq!(tau(&Matrix::identity(s.rank()), &a), 0);
            Ok(())
        },
    )
}

pub fn smith_normal_form_is_unimodular() -> Result<(), String> {
    check(&(1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| prop::collection::vec(coords(c, 5), r)), |rows| {
        let m = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect()).unwrap();
        let snf = smith_normal_form(&m);
        prop_assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.d.clone());
        prop_assert!(determinant(&snf.u).abs().is_one());
        prop_assert!(determinant(&snf.v).abs().is_one());
        for i in 0..snf.d.rows() {
            for j in 0..snf.d.cols() {
                if i != j {
                    prop_assert!(snf.d.get(i, j).is_zero());
                }
            }
        }
        let diag = snf.diagonal();
        prop_assert!(diag.iter().all(|x| !x.is_negative()));
        for w in diag.windows(2) {
            // Each invariant factor divides the next (0 is divisible by all).
            let divides = if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() };
            prop_assert!(divides);
        }
        Ok(())
    })
}

pub type Property = fn() -> Result<(), String>;

/// Every property, by name.
pub const ALL: [(&str, Property); 7] = [
    ("pairing_is_antisymmetric", pairing_is_antisymmetric),
    ("quadratic_forms_refine_the_pairing", quadratic_forms_refine_the_pairing),
    ("arf_is_invariant_under_symplectic_change_of_basis", arf_is_invariant_under_symplectic_change_of_basis),
    ("transvections_are_symplectic", transvections_are_symplectic),
    ("hurwitz_moves_preserve_the_product", hurwitz_moves_preserve_the_product),
    ("meyer_cocycle_identity", meyer_cocycle_identity),
    ("smith_normal_form_is_unimodular", smith_normal_form_is_unimodular),
];
