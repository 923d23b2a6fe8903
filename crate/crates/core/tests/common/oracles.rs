//! Independent reference computations used to cross-check the library.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use twistbench::homology::abelian_quotient;
use twistbench::invariants::fiber_divisibility;
use twistbench::{CurveClass, Int};

/// Integer row echelon form: pivot columns strictly increase and every
/// entry left of a pivot is zero. Only unimodular row operations are used,
/// so the rows span the same lattice.
pub fn echelon(rows: &[Vec<Int>], n: usize) -> Vec<(usize, Vec<Int>)> {
    let mut rest: Vec<Vec<Int>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut out = Vec::new();
    for col in 0..n {
        // Euclid on the column until a single nonzero entry remains.
        loop {
            let nonzero: Vec<usize> = (0..rest.len()).filter(|&i| !rest[i][col].is_zero()).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let p = *nonzero.iter().min_by_key(|&&i| rest[i][col].abs()).unwrap();
            let pivot = rest[p].clone();
            for &i in &nonzero {
                if i != p {
                    let q = rest[i][col].div_floor(&pivot[col]);
                    for (x, y) in rest[i].iter_mut().zip(&pivot) {
                        *x -= &q * y;
                    }
                }
            }
        }
        if let Some(i) = rest.iter().position(|r| !r[col].is_zero()) {
            out.push((col, rest.remove(i)));
        }
        rest.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    out
}

/// Whether `v` lies in the lattice spanned by the echelon rows.
pub fn in_lattice(basis: &[(usize, Vec<Int>)], v: &[Int]) -> bool {
    let mut v = v.to_vec();
    for (col, row) in basis {
        if !(&v[*col] % &row[*col]).is_zero() {
            return false;
        }
        let q = &v[*col] / &row[*col];
        for (x, y) in v.iter_mut().zip(row) {
            *x -= &q * y;
        }
    }
    v.iter().all(Zero::is_zero)
}

/// Least `d ≥ 1` with `d·α` in the span of `cycles`, by trying every `d` up
/// to the product of the echelon pivots (a multiple of the torsion order).
pub fn divisibility_by_search(cycles: &[Vec<Int>], alpha: &[Int]) -> Option<u64> {
    let basis = echelon(cycles, alpha.len());
    let bound: Int = basis.iter().fold(Int::one(), |acc, (c, r)| acc * r[*c].abs());
    let bound = u64::try_from(bound).expect("small instances");
    (1..=bound).find(|&d| {
        let scaled: Vec<Int> = alpha.iter().map(|x| x * Int::from(d)).collect();
        in_lattice(&basis, &scaled)
    })
}

fn minors(m: &[Vec<Int>], k: usize) -> Vec<Int> {
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut with: Vec<Vec<usize>> = subsets(n - 1, k - 1)
            .into_iter()
            .map(|mut s| {
                s.push(n - 1);
                s
            })
            .collect();
        with.extend(subsets(n - 1, k));
        with
    }
    fn det(m: &[Vec<Int>]) -> Int {
        // Laplace expansion; k ≤ 3 here.
        match m.len() {
            0 => Int::one(),
            1 => m[0][0].clone(),
            n => (0..n)
                .map(|j| {
                    let sub: Vec<Vec<Int>> = m[1..]
                        .iter()
                        .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                        .collect();
                    let term = &m[0][j] * det(&sub);
                    if j % 2 == 0 {
                        term
                    } else {
                        -term
                    }
                })
                .fold(Int::zero(), |a, b| a + b),
        }
    }
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for rs in subsets(m.len(), k) {
        for cs in subsets(cols, k) {
            let sub: Vec<Vec<Int>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c].clone()).collect()).collect();
            out.push(det(&sub));
        }
    }
    out
}

/// Free rank and torsion of `Z^n / ⟨rows⟩` from determinantal divisors:
/// the k-th invariant factor is `D_k / D_{k-1}`, `D_k` the gcd of k×k minors.
pub fn quotient_by_minors(n: usize, rows: &[Vec<Int>]) -> (usize, Vec<Int>) {
    let mut prev = Int::one();
    let mut torsion = Vec::new();
    let mut rank = 0;
    for k in 1..=n.min(rows.len()) {
        let d = minors(rows, k).iter().fold(Int::zero(), |acc, x| acc.gcd(x));
        if d.is_zero() {
            break;
        }
        let factor = &d / &prev;
        if !factor.is_one() {
            torsion.push(factor);
        }
        prev = d;
        rank = k;
    }
    (n - rank, torsion)
}

/// `|Hom(Z^n/⟨rows⟩, Z_m)|`: the number of `x ∈ (Z_m)^n` killed by every
/// relation, by enumeration.
pub fn hom_count(n: usize, rows: &[Vec<i64>], m: i64) -> u64 {
    let total = (m as u64).pow(n as u32);
    (0..total)
        .filter(|&code| {
            let x: Vec<i64> = (0..n).map(|i| (code / (m as u64).pow(i as u32) % m as u64) as i64).collect();
            rows.iter().all(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum::<i64>().rem_euclid(m) == 0)
        })
        .count() as u64
}

fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

/// Compares `fiber_divisibility` with the search oracle on `cases` random
/// instances of rank ≤ 6 with entries in [−3, 3].
pub fn divisibility_agreement(cases: u32) -> Result<(), String> {
    let strategy = (1usize..=6).prop_flat_map(|n| {
        (prop::collection::vec(prop::collection::vec(-3i64..=3, n), 0..=6), prop::collection::vec(-3i64..=3, n))
    });
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner
        .run(&strategy, |(cycles, alpha)| {
            let classes: Vec<CurveClass> = cycles.iter().map(|c| CurveClass::from_i64(c)).collect();
            let got = fiber_divisibility(&classes, &CurveClass::from_i64(&alpha))
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            let rows: Vec<Vec<Int>> = cycles.iter().map(|c| ints(c)).collect();
            let want = divisibility_by_search(&rows, &ints(&alpha));
            prop_assert_eq!(got.d, want);
            prop_assert_eq!(got.primitive, want == Some(1));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Compares `abelian_quotient` with determinantal divisors and with
/// enumerated homomorphism counts on random rank ≤ 3 presentations.
pub fn quotient_agreement(cases: u32) -> Result<(), String> {
    let strategy =
        (1usize..=3).prop_flat_map(|n| (Just(n), prop::collection::vec(prop::collection::vec(-3i64..=3, n), 0..=4)));
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner
        .run(&strategy, |(n, rows)| {
            let big: Vec<Vec<Int>> = rows.iter().map(|r| ints(r)).collect();
            let got = abelian_quotient(n, &big).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let (free, torsion) = quotient_by_minors(n, &big);
            prop_assert_eq!(got.free_rank, free);
            prop_assert_eq!(&got.torsion, &torsion);
            for m in 2..=8i64 {
                let predicted: u64 = (m as u64).pow(got.free_rank as u32)
                    * got.torsion.iter().map(|d| u64::try_from(d.gcd(&Int::from(m))).unwrap()).product::<u64>();
                prop_assert_eq!(hom_count(n, &rows, m), predicted, "m = {}", m);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}
