//! The end-to-end acceptance checks, each returning a description of the
//! first failed expectation.

use std::collections::BTreeMap;

use twistbench::fixtures::builtin_fixture;
use twistbench::homology::{arf, pairing};
use twistbench::invariants::{fiber_divisibility, invariant_report, signature_ledger, signature_meyer, LedgerKind};
use twistbench::relations::{even_chain, hyperelliptic, odd_chain, yun};
use twistbench::script::{run_script_text, EmitOutput, Report};
use twistbench::spin::{
    classify_arf, pencil_spin_check, solve_factorization_forms, spin_via_arf, verify_pencil_witness, SpinStatus,
};
use twistbench::twist::{factor_matrix, homological_triviality};
use twistbench::{AbelianGroupInvariants, CurveClass, Int, QuadraticFormZ2, SurfaceModel};

use super::{oracles, properties};

pub const LANTERN_REPLAY: &str = include_str!("../../scripts/lantern_replay.tb");
pub const INVERSE_CHAIN_REPLAY: &str = include_str!("../../scripts/inverse_chain_replay.tb");
pub const SIX_COPIES: &str = include_str!("../../scripts/six_copies.tb");
pub const GENUS3_REARRANGEMENT: &str = include_str!("../../scripts/genus3_rearrangement.tb");
pub const GENUS9_VERIFY: &str = include_str!("../../scripts/genus9_verify.tb");

pub type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

macro_rules! ensure_eq {
    ($got:expr, $want:expr, $what:expr) => {{
        let (got, want) = (&$got, &$want);
        if got != want {
            return Err(format!("{}: expected {:?}, got {:?}", $what, want, got));
        }
    }};
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ledger_counts(entries: &[twistbench::invariants::LedgerEntry]) -> BTreeMap<String, u64> {
    entries.iter().map(|e| (e.kind.name().to_string(), e.count)).collect()
}

/// Basis values all 1 except at the listed indices.
pub fn ones_except(rank: usize, zeros: &[usize]) -> QuadraticFormZ2 {
    QuadraticFormZ2::new((0..rank).map(|i| !zeros.contains(&i)).collect())
}

pub fn genus9_fixture() -> Outcome {
    let fx = builtin_fixture("genus9_signature_zero").map_err(err)?;
    let f = &fx.factorization;
    ensure!(homological_triviality(f).trivial, "monodromy is not trivial");
    let alpha = fx.expected.pseudosection_class().ok_or("fixture has no pseudosection")?;
    let r = invariant_report(f, Some(&fx.ledger), Some(&alpha)).map_err(err)?;
    ensure_eq!(r.euler, 16, "euler characteristic");
    ensure_eq!(r.sigma_meyer, Some(0), "Meyer signature");
    ensure_eq!(ledger_counts(&fx.ledger), BTreeMap::from([("chain_2".into(), 12), ("lantern".into(), 84)]), "ledger");
    ensure_eq!(signature_ledger(&fx.ledger), 0, "ledger signature");
    ensure_eq!(r.h1, Some(AbelianGroupInvariants::from_parts(7, &[2, 4])), "H1");
    let div = fiber_divisibility(&f.dehn_classes(), &alpha).map_err(err)?;
    ensure_eq!(div.d, Some(1), "fiber divisibility");
    let sol = solve_factorization_forms(f).map_err(err)?;
    ensure_eq!(sol.count, 512, "admissible form count");
    let s = f.surface;
    // β9 is basis index 17, α7 is index 12.
    let q0 = ones_except(18, &[17]);
    let q1 = ones_except(18, &[12, 17]);
    ensure!(sol.contains(&q0) && !arf(&q0, &s), "q0 must be admissible with Arf 0");
    ensure!(sol.contains(&q1) && arf(&q1, &s), "q1 must be admissible with Arf 1");
    ensure_eq!(classify_arf(&sol, &s).map_err(err)?, (256, 256), "Arf split");
    let verdict = spin_via_arf(f, r.sigma_meyer.unwrap_or(1), &div).map_err(err)?;
    ensure_eq!(verdict.status, SpinStatus::Spin, "spin_via_arf");
    Ok(())
}

pub fn genus3_pencil() -> Outcome {
    let fx = builtin_fixture("genus3_pencil").map_err(err)?;
    let f = &fx.factorization;
    ensure!(homological_triviality(f).trivial, "product is not the boundary multitwist");
    let r = invariant_report(f, Some(&fx.ledger), None).map_err(err)?;
    ensure_eq!(r.euler, 0, "euler characteristic");
    ensure_eq!(ledger_counts(&fx.ledger), BTreeMap::from([("chain_2".into(), 2), ("lantern".into(), 14)]), "ledger");
    ensure_eq!(signature_ledger(&fx.ledger), 0, "ledger signature");
    ensure_eq!(r.h1, Some(AbelianGroupInvariants::free(4)), "H1 quotient");
    ensure_eq!(pencil_spin_check(f).map_err(err)?.status, SpinStatus::Spin, "pencil spin check");
    Ok(())
}

pub fn genus2_pencil() -> Outcome {
    let fx = builtin_fixture("genus2_pencil").map_err(err)?;
    let f = &fx.factorization;
    ensure!(homological_triviality(f).trivial, "product is not the boundary multitwist");
    let r = invariant_report(f, Some(&fx.ledger), None).map_err(err)?;
    ensure_eq!(r.euler, 0, "euler characteristic");
    ensure_eq!(ledger_counts(&fx.ledger), BTreeMap::from([("chain_2".into(), 1), ("lantern".into(), 7)]), "ledger");
    ensure_eq!(signature_ledger(&fx.ledger), 0, "ledger signature");
    ensure_eq!(pencil_spin_check(f).map_err(err)?.status, SpinStatus::Spin, "pencil spin check");
    let all_ones = QuadraticFormZ2::constant(f.surface.rank(), true);
    ensure!(verify_pencil_witness(f, &all_ones).map_err(err)?, "the all-ones form is not a pencil witness");
    Ok(())
}

pub fn meyer_calibration() -> Outcome {
    let sig = |f| signature_meyer(&f).map_err(err);
    ensure_eq!(sig(even_chain(1).capped().map_err(err)?)?, -8, "capped 2-chain, genus 1");
    ensure_eq!(sig(even_chain(2).capped().map_err(err)?)?, -24, "capped even chain, genus 2");
    ensure_eq!(sig(hyperelliptic(9).capped().map_err(err)?)?, -40, "hyperelliptic, genus 9");
    for g in [1usize, 3] {
        let doubled = hyperelliptic(g).relator().power(2);
        ensure_eq!(sig(doubled)?, -8 * (g as i64 + 1), format!("doubled hyperelliptic, genus {g}"));
    }
    Ok(())
}

/// Witness for Yun's relator: `q(α_i) = 1`, `q(β_i) = 1` for odd `i`, and
/// every primed class 1.
pub fn yun_witness(m: usize, n: usize) -> QuadraticFormZ2 {
    let mut v = Vec::new();
    for i in 1..n {
        v.push(true);
        v.push(i % 2 == 1);
    }
    v.extend(std::iter::repeat_n(true, 4 * m));
    QuadraticFormZ2::new(v)
}

pub fn parity_sweeps() -> Outcome {
    for g in 1..=8usize {
        let odd = odd_chain(g);
        let pencil_spin = pencil_spin_check(&odd.pencil()).map_err(err)?.is_spin();
        ensure_eq!(pencil_spin, g % 2 == 0, format!("odd chain pencil spin, genus {g}"));
        let capped = solve_factorization_forms(&odd.capped().map_err(err)?).map_err(err)?;
        ensure_eq!(!capped.is_empty(), g % 2 == 1, format!("capped odd chain solvable, genus {g}"));
        let even = even_chain(g);
        ensure!(!pencil_spin_check(&even.pencil()).map_err(err)?.is_spin(), "even chain pencil spin at genus {g}");
    }
    for g in 1..=9usize {
        let sol = solve_factorization_forms(&hyperelliptic(g).relator()).map_err(err)?;
        ensure_eq!(!sol.is_empty(), g % 2 == 1, format!("hyperelliptic solvable, genus {g}"));
    }
    for m in 1..=2usize {
        for n in 2..=10usize {
            let rel = yun(m, n);
            let sol = solve_factorization_forms(&rel.relator()).map_err(err)?;
            ensure_eq!(!sol.is_empty(), n % 2 == 0, format!("yun({m},{n}) solvable"));
            if n % 2 == 0 {
                let q = yun_witness(m, n);
                ensure!(sol.contains(&q), "constructed witness is not admissible for yun({m},{n})");
                ensure_eq!(!arf(&q, &rel.surface), n % 4 == 0, format!("witness Arf 0 for yun({m},{n})"));
            }
        }
    }
    Ok(())
}

fn outputs<'a>(report: &'a Report, name: &'a str) -> Vec<&'a EmitOutput> {
    report.for_name(name).collect()
}

fn last_invariants<'a>(report: &'a Report, name: &str) -> Option<&'a twistbench::invariants::InvariantReport> {
    report.entries.iter().rev().filter(|e| e.name == name).find_map(|e| match &e.output {
        EmitOutput::Invariants { report, .. } => Some(report),
        _ => None,
    })
}

fn all_trivial(report: &Report, name: &str) -> bool {
    let checks: Vec<bool> = outputs(report, name)
        .into_iter()
        .filter_map(|o| match o {
            EmitOutput::Triviality { trivial, .. } => Some(*trivial),
            _ => None,
        })
        .collect();
    !checks.is_empty() && checks.iter().all(|t| *t)
}

fn ledger_of(report: &Report, name: &str) -> Option<(Vec<(String, u64)>, i64)> {
    report.entries.iter().rev().filter(|e| e.name == name).find_map(|e| match &e.output {
        EmitOutput::Ledger { entries: Some(rows), sigma: Some(s) } => {
            Some((rows.iter().map(|r| (r.kind.clone(), r.count)).collect(), *s))
        }
        _ => None,
    })
}

pub fn lantern_replay() -> Outcome {
    let report = run_script_text(LANTERN_REPLAY).map_err(err)?;
    ensure!(all_trivial(&report, "G"), "lantern replay is not homologically trivial");
    let count = report.for_name("G").find_map(|o| match o {
        EmitOutput::Terms { count, .. } => Some(*count),
        _ => None,
    });
    ensure_eq!(count, Some(191), "terms after lantern substitution");
    let (_, sigma) = ledger_of(&report, "G").ok_or("no ledger emitted")?;
    ensure_eq!(sigma, 1, "ledger signature");
    let inv = last_invariants(&report, "G").ok_or("no invariants emitted")?;
    ensure_eq!(inv.sigma_meyer, Some(1), "Meyer signature");
    Ok(())
}

pub fn inverse_chain_replay() -> Outcome {
    let report = run_script_text(INVERSE_CHAIN_REPLAY).map_err(err)?;
    ensure!(all_trivial(&report, "G"), "inverse chain replay is not homologically trivial");
    let (rows, sigma) = ledger_of(&report, "G").ok_or("no ledger emitted")?;
    ensure!(rows.contains(&("chain_5_inverse".to_string(), 1)), "ledger lacks one inverse 5-chain: {rows:?}");
    ensure_eq!(LedgerKind::Chain5.inverse().value(), 16, "inverse 5-chain contribution");
    ensure_eq!(sigma, 16, "ledger signature");
    let inv = last_invariants(&report, "G").ok_or("no invariants emitted")?;
    ensure_eq!(inv.sigma_meyer, Some(16), "Meyer signature");
    Ok(())
}

pub fn substitution_replays() -> Outcome {
    lantern_replay().map_err(|e| format!("lantern: {e}"))?;
    inverse_chain_replay().map_err(|e| format!("inverse 5-chain: {e}"))
}

pub fn six_copies() -> Outcome {
    let report = run_script_text(SIX_COPIES).map_err(err)?;
    ensure!(all_trivial(&report, "G"), "six-copy sum is not homologically trivial");
    let inv = last_invariants(&report, "G").ok_or("no invariants emitted")?;
    // #127(S²×S²): e = 2 + 2·127, σ = 0, b1 = 0.
    ensure_eq!(inv.euler, 2 + 2 * 127, "euler characteristic");
    ensure_eq!(inv.sigma_meyer, Some(0), "Meyer signature");
    ensure_eq!(inv.h1, Some(AbelianGroupInvariants::free(0)), "H1");
    let count = report.for_name("G").find_map(|o| match o {
        EmitOutput::Forms { count, .. } => Some(*count),
        _ => None,
    });
    ensure!(count.is_some_and(|c| c > 0), "no admissible quadratic form");
    Ok(())
}

pub fn property_suites() -> Outcome {
    for (name, check) in properties::ALL {
        check().map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(())
}

pub fn oracle_equivalence() -> Outcome {
    oracles::divisibility_agreement(200).map_err(|e| format!("divisibility: {e}"))?;
    oracles::quotient_agreement(200).map_err(|e| format!("abelian quotient: {e}"))
}

/// Right Hurwitz move `(a, b) → (b, T_b^{-1} a)` with `T_c(x) = x + ⟨c,x⟩c`,
/// computed directly on coordinate vectors.
fn right_move(terms: &mut [Vec<Int>], i: usize, s: &SurfaceModel) {
    let (a, b) = (terms[i].clone(), terms[i + 1].clone());
    let ba = pairing(&CurveClass::new(b.clone()), &CurveClass::new(a.clone()), s).unwrap();
    // The sign of b cancels in ⟨b,a⟩b, so normalized classes are fine.
    let moved: Vec<Int> = a.iter().zip(&b).map(|(x, y)| x - &ba * y).collect();
    terms[i] = b;
    terms[i + 1] = CurveClass::new(moved).coords().to_vec();
}

/// Term positions (1-based) of the recorded right-move sequence.
pub const GENUS3_MOVES: [usize; 22] = [1, 2, 3, 4, 5, 7, 8, 9, 10, 11, 1, 2, 3, 4, 7, 8, 9, 10, 2, 3, 8, 9];

pub fn genus3_rearrangement() -> Outcome {
    let report = run_script_text(GENUS3_REARRANGEMENT).map_err(err)?;
    let listings: Vec<Vec<(Vec<Int>, Option<String>)>> = report
        .for_name("P")
        .filter_map(|o| match o {
            EmitOutput::Terms { terms, .. } => Some(terms.iter().map(|t| (t.class.clone(), t.label.clone())).collect()),
            _ => None,
        })
        .collect();
    ensure_eq!(listings.len(), 2, "term listings");
    let (before, after) = (&listings[0], &listings[1]);
    let labels: Vec<&str> = before.iter().map(|(_, l)| l.as_deref().unwrap_or("?")).collect();
    ensure_eq!(labels, ["d'", "w", "a", "a'", "x", "b", "b'", "y", "c", "c'", "z", "d"], "starting order");
    // Replay independently of the library's Hurwitz implementation.
    let s = SurfaceModel::new(3, 4, 0);
    let mut expected: Vec<Vec<Int>> = before.iter().map(|(c, _)| c.clone()).collect();
    for &i in &GENUS3_MOVES {
        right_move(&mut expected, i - 1, &s);
    }
    let got: Vec<Vec<Int>> = after.iter().map(|(c, _)| c.clone()).collect();
    ensure_eq!(got, expected, "classes after the moves");
    let (mut ms_got, mut ms_want) = (got.clone(), expected.clone());
    ms_got.sort();
    ms_want.sort();
    ensure_eq!(ms_got, ms_want, "class multiset");
    // a x b … c z d keep their classes; the other six are the A-blocks.
    let class_of = |label: &str| before.iter().find(|(_, l)| l.as_deref() == Some(label)).map(|(c, _)| c.clone());
    for (pos, label) in [(0, "a"), (1, "x"), (2, "b"), (6, "c"), (7, "z"), (8, "d")] {
        ensure_eq!(Some(got[pos].clone()), class_of(label), format!("position {} holds {label}", pos + 1));
    }
    // The product matrix is unchanged.
    let fx = builtin_fixture("genus3_pencil").map_err(err)?;
    let mut f = fx.factorization.clone();
    f.terms.retain(|t| t.kind == twistbench::TermKind::Dehn);
    let original = factor_matrix(&f);
    f.terms = got.iter().map(|c| twistbench::TwistTerm::positive(CurveClass::new(c.clone()))).collect();
    ensure!(factor_matrix(&f) == original, "product matrix changed");
    ensure!(all_trivial(&report, "P"), "rearranged word is not the boundary multitwist");
    Ok(())
}

pub type Criterion = fn() -> Outcome;

/// All criteria in order, with short descriptions.
pub const ALL: [(&str, Criterion); 10] = [
    ("genus-9 fibration invariants and Arf spin criterion", genus9_fixture),
    ("genus-3 pencil invariants and spin", genus3_pencil),
    ("genus-2 pencil invariants and all-ones witness", genus2_pencil),
    ("Meyer signature calibration", meyer_calibration),
    ("spin parity sweeps over relation families", parity_sweeps),
    ("lantern and inverse 5-chain substitution replays", substitution_replays),
    ("six-copy twisted fiber sum", six_copies),
    ("randomized property suites (10,000 cases each)", property_suites),
    ("oracle equivalence for divisibility and quotients", oracle_equivalence),
    ("genus-3 pencil Hurwitz rearrangement", genus3_rearrangement),
];
