//! `twistbench` command-line interface.
//!
//! Exit status: 0 on success, 1 when a verification or computation fails,
//! 2 for usage, input-format, and script syntax errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use twistbench::codec::decode_document;
use twistbench::fixtures::{builtin_fixture, Expected, FIXTURE_NAMES};
use twistbench::invariants::{fiber_divisibility, invariant_report, signature_meyer, LedgerEntry};
use twistbench::script::{parse_script, run_script};
use twistbench::spin::{
    fibration_spin_check, pencil_spin_check, solve_factorization_forms, spin_via_arf, DualParity, SpinStatus,
};
use twistbench::twist::homological_triviality;
use twistbench::{Coefficients, CurveClass, Factorization, TermKind};

#[derive(Parser)]
#[command(name = "twistbench", version, about = "Homology-level workbench for Lefschetz fibration monodromies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a factorization is well formed and homologically trivial;
    /// builtin fixtures are also checked against their expected invariants.
    Verify(InputArgs),
    /// Euler characteristic, signatures, first homology, divisibility.
    Invariants(InputArgs),
    /// Decide whether the total space is spin.
    Spin {
        #[command(flatten)]
        input: InputArgs,
        /// Use the pencil criterion (requires boundary components).
        #[arg(long, conflicts_with_all = ["doubled", "dual_parity"])]
        pencil: bool,
        /// Treat the word as a doubled relator.
        #[arg(long, conflicts_with = "dual_parity")]
        doubled: bool,
        /// Parity of the square of an algebraic dual of the fiber.
        #[arg(long, value_enum)]
        dual_parity: Option<Parity>,
    },
    /// Divisibility of the fiber class.
    Divisibility(InputArgs),
    /// Run a construction script.
    Run {
        script: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(clap::Args)]
struct InputArgs {
    /// A factorization JSON file or the name of a builtin fixture.
    input: String,
    /// Print machine-readable JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Parity {
    Even,
    Odd,
}

/// Failure categories mapped to exit codes.
enum Failure {
    Check(String),
    Usage(String),
}

impl From<twistbench::Error> for Failure {
    fn from(e: twistbench::Error) -> Self {
        match e {
            twistbench::Error::Schema { .. } | twistbench::Error::UnknownFixture(_) => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

struct Loaded {
    f: Factorization,
    ledger: Option<Vec<LedgerEntry>>,
    pseudosection: Option<CurveClass>,
    expected: Option<Expected>,
}

fn load(input: &str) -> Result<Loaded, Failure> {
    let path = Path::new(input);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{input}: {e}")))?;
        let doc = decode_document(&text).map_err(|e| Failure::Usage(format!("{input}: {e}")))?;
        let ledger = (!doc.ledger.is_empty()).then_some(doc.ledger);
        return Ok(Loaded { f: doc.factorization, ledger, pseudosection: None, expected: None });
    }
    if FIXTURE_NAMES.contains(&input) {
        let fx = builtin_fixture(input)?;
        return Ok(Loaded {
            pseudosection: fx.expected.pseudosection_class(),
            f: fx.factorization,
            ledger: Some(fx.ledger),
            expected: Some(fx.expected),
        });
    }
    Err(Failure::Usage(format!("{input}: no such file or builtin fixture (fixtures: {})", FIXTURE_NAMES.join(", "))))
}

fn alpha_of(l: &Loaded) -> Option<CurveClass> {
    let has_push = l.f.terms.iter().any(|t| t.kind == TermKind::Push);
    l.pseudosection.clone().or_else(|| has_push.then(|| l.f.push_class_sum()))
}

fn print(json_mode: bool, value: serde_json::Value, text: String) {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(&value).expect("JSON values serialize"));
    } else {
        println!("{text}");
    }
}

fn show<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

fn verify(args: &InputArgs) -> Result<(), Failure> {
    let l = load(&args.input)?;
    let triv = homological_triviality(&l.f);
    let mut problems = Vec::new();
    if !triv.trivial {
        problems.push("the monodromy is not homologically trivial".to_string());
    }
    if let (Some(exp), true) = (&l.expected, triv.trivial) {
        let report = invariant_report(&l.f, l.ledger.as_deref(), l.pseudosection.as_ref())?;
        let mut compare = |what: &str, want: Option<String>, got: Option<String>| {
            if let Some(w) = want {
                if Some(&w) != got.as_ref() {
                    problems.push(format!("{what}: expected {w}, computed {}", show(got)));
                }
            }
        };
        compare("euler", exp.euler.map(|x| x.to_string()), Some(report.euler.to_string()));
        // Meyer's cocycle only applies to closed-surface fibrations with
        // integer data; the ledger signature is compared in every case.
        if let Some(meyer) = report.sigma_meyer {
            compare("signature (Meyer)", exp.sigma.map(|x| x.to_string()), Some(meyer.to_string()));
        }
        compare("signature (ledger)", exp.sigma.map(|x| x.to_string()), report.sigma_ledger.map(|x| x.to_string()));
        compare("H1", exp.h1.as_ref().map(|x| x.to_string()), report.h1.as_ref().map(|x| x.to_string()));
        compare("divisibility", exp.divisibility.map(|x| x.to_string()), report.divisibility.map(|x| x.to_string()));
        let forms = solve_factorization_forms(&l.f)?;
        compare("form count", exp.form_count.map(|x| x.to_string()), Some(forms.count.to_string()));
    }
    let ok = problems.is_empty();
    let text = if ok {
        format!(
            "ok: {} terms, homologically trivial{}",
            l.f.len(),
            if l.expected.is_some() { ", invariants match" } else { "" }
        )
    } else {
        format!("FAILED:\n  {}", problems.join("\n  "))
    };
    print(args.json, json!({ "ok": ok, "trivial": triv.trivial, "modulus": triv.modulus, "problems": problems }), text);
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(String::new()))
    }
}

fn invariants(args: &InputArgs) -> Result<(), Failure> {
    let l = load(&args.input)?;
    let r = invariant_report(&l.f, l.ledger.as_deref(), l.pseudosection.as_ref())?;
    let text = format!(
        "euler characteristic: {}\nsignature (ledger):   {}\nsignature (Meyer):    {}\nH1:                   {}\ndivisibility:         {}",
        r.euler,
        show(r.sigma_ledger),
        show(r.sigma_meyer),
        show(r.h1.as_ref()),
        show(r.divisibility)
    );
    let consistent = r.consistent();
    print(args.json, json!({ "report": r, "consistent": consistent }), text);
    if consistent {
        Ok(())
    } else {
        Err(Failure::Check("ledger and Meyer signatures disagree".into()))
    }
}

fn spin(args: &InputArgs, pencil: bool, doubled: bool, parity: Option<Parity>) -> Result<(), Failure> {
    let l = load(&args.input)?;
    let f = &l.f;
    let verdict = if pencil || (!f.surface.is_closed() && !doubled && parity.is_none()) {
        pencil_spin_check(f)?
    } else if doubled {
        fibration_spin_check(f, DualParity::Unknown, true)?
    } else if let Some(p) = parity {
        let p = match p {
            Parity::Even => DualParity::Even,
            Parity::Odd => DualParity::Odd,
        };
        fibration_spin_check(f, p, false)?
    } else {
        match alpha_of(&l) {
            Some(a) if f.coefficients == Coefficients::Integer => {
                let sigma = signature_meyer(f)?;
                let div = fiber_divisibility(&f.dehn_classes(), &a)?;
                spin_via_arf(f, sigma, &div)?
            }
            _ => fibration_spin_check(f, DualParity::Unknown, false)?,
        }
    };
    let status = match verdict.status {
        SpinStatus::Spin => "spin",
        SpinStatus::NotSpin => "not spin",
        SpinStatus::Inconclusive => "inconclusive",
    };
    let text = match &verdict.witness {
        Some(q) => {
            let bits: String = q.basis_values.iter().map(|b| if *b { '1' } else { '0' }).collect();
            format!("{status}: {}\nwitness: {bits}", verdict.reason)
        }
        None => format!("{status}: {}", verdict.reason),
    };
    print(args.json, json!(verdict), text);
    Ok(())
}

fn divisibility(args: &InputArgs) -> Result<(), Failure> {
    let l = load(&args.input)?;
    if !l.f.surface.is_closed() {
        return Err(Failure::Check("divisibility is defined for closed-surface fibrations".into()));
    }
    let alpha = alpha_of(&l)
        .ok_or_else(|| Failure::Check("no point-push terms or pseudosection: the lift class is unknown".into()))?;
    let r = fiber_divisibility(&l.f.dehn_classes(), &alpha)?;
    let text = match r.d {
        Some(d) => format!("divisibility: {d}{}", if r.primitive { " (primitive)" } else { "" }),
        None => "divisibility: undefined (the fiber class has infinite order)".to_string(),
    };
    print(args.json, json!(r), text);
    Ok(())
}

fn run(path: &Path, json_mode: bool) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let script = parse_script(&text).map_err(|e| Failure::Usage(format!("{}:{e}", path.display())))?;
    let report = run_script(&script).map_err(|e| Failure::Check(format!("{}:{e}", path.display())))?;
    if json_mode {
        print!("{}", report.to_json());
    } else {
        print!("{report}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Invariants(a) => invariants(a),
        Command::Spin { input, pencil, doubled, dual_parity } => spin(input, *pencil, *doubled, *dual_parity),
        Command::Divisibility(a) => divisibility(a),
        Command::Run { script, json } => run(script, *json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
