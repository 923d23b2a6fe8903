//! A line-oriented construction language for replaying derivations.
//!
//! Each non-empty line is one statement; `#` starts a comment. Positions in
//! factorizations are 1-based and ranges `i..j` are inclusive.
//!
//! ```text
//! surface g=<n> [b=<n>] [k=<n>]        set the current surface
//! curve C = b1 + a2 - 2 d1             class as a combination of α_i, β_i, δ_j
//! curve C = [1, 0, -1, 0]              class by coordinates
//! relation R = lantern | chain(k) | odd_chain(g) | even_chain(g)
//!            | hyperelliptic(g) | yun(m,n)
//! fixture F = genus9_signature_zero    builtin fixture (with its ledger)
//! pencil P = R                         interior side of a relation
//! word W = t(C) t(a1)^-1 push(b2) bd(1) F^6
//! target F = [1, 1]                    declare the boundary target
//! embedding E = R : C1, -C2, C3        images of the basis classes of R
//! embedding E = R : identity
//! hurwitz F i left|right
//! slide F from to
//! cyclic F k
//! conjugate F by W
//! cancel F
//! fiber_sum G = F1 + F2 by W + F3
//! substitute F i..j with R via E
//! cap F j1 j2 ...
//! forget F                             drop point-pushes and marked points
//! emit invariants|triviality|ledger|terms|forms F
//! emit spin F [pencil | doubled | parity even|odd]
//! ```
//!
//! Names live in a single scope and must be declared before use.
//! Factorizations built from relators carry an obligation to stay
//! homologically trivial, which is checked after every statement.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::fixtures::builtin_fixture;
use crate::invariants::{fiber_divisibility, invariant_report, ledger_add, signature_ledger, signature_meyer};
use crate::invariants::{InvariantReport, LedgerEntry, LedgerKind};
use crate::linalg::Matrix;
use crate::relations::{builtin_relation, make_embedding, substitute, EmbeddingMap, RelationSpec, RelationTemplate};
use crate::spin::{
    classify_arf, fibration_spin_check, pencil_spin_check, solve_factorization_forms, spin_via_arf, DualParity,
    SpinVerdict,
};
use crate::twist::{
    cancel_pairs, cap_boundary, conjugate_by, cyclic_permute, fiber_sum, homological_triviality, hurwitz_move, slide,
    word_matrix,
};
use crate::{Coefficients, CurveClass, Direction, Factorization, Int, SurfaceModel, TermKind, TwistTerm};

/// Category of a script diagnostic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptErrorKind {
    Syntax,
    Undeclared,
    Redeclared,
    WrongKind,
    Runtime,
}

/// A diagnostic with a 1-based source position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScriptError {
    pub kind: ScriptErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
    /// Tokens that would have been accepted (syntax errors only).
    pub expected: Vec<String>,
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ScriptError {}

/// Source position of a statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

/// An atom of a class expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Alpha(usize),
    Beta(usize),
    Delta(usize),
    Named(String),
}

/// A curve class expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurveExpr {
    Vector(Vec<i64>),
    Linear(Vec<(i64, Atom)>),
}

/// One factor (or spliced block) of a `word` statement.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum WordItem {
    Twist { curve: CurveExpr, power: i64 },
    Push { curve: CurveExpr, power: i64 },
    Boundary { component: usize, power: i64 },
    Splice { name: String, power: i64 },
}

/// One operand of a `fiber_sum` statement.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SumPart {
    pub name: String,
    pub glue: Option<String>,
}

/// How `emit spin` decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpinMode {
    /// Pencil criterion with boundary, Arf criterion otherwise.
    Auto,
    Pencil,
    Doubled,
    Parity(DualParity),
}

/// What an `emit` statement reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EmitKind {
    Invariants,
    Spin(SpinMode),
    Triviality,
    Ledger,
    Terms,
    Forms,
}

/// A parsed statement.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Statement {
    Surface { genus: usize, boundary: usize, marked: usize },
    Curve { name: String, value: CurveExpr },
    Relation { name: String, spec: RelationSpec },
    Fixture { name: String, fixture: String },
    Pencil { name: String, relation: String },
    Word { name: String, items: Vec<WordItem> },
    Target { name: String, exponents: Vec<i64> },
    Embedding { name: String, relation: String, images: Option<Vec<CurveExpr>> },
    Hurwitz { name: String, index: usize, direction: Direction },
    Slide { name: String, from: usize, to: usize },
    Cyclic { name: String, shift: i64 },
    Conjugate { name: String, by: String },
    Cancel { name: String },
    FiberSum { name: String, parts: Vec<SumPart> },
    Substitute { name: String, start: usize, end: usize, relation: String, embedding: String },
    Cap { name: String, components: Vec<usize> },
    Forget { name: String },
    Emit { kind: EmitKind, name: String },
}

/// A parsed script: statements with their source positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Script {
    pub statements: Vec<Statement>,
    pub positions: Vec<Position>,
}

// ---------------------------------------------------------------------------
// Lexing

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    column: usize,
}

const SYMBOLS: [&str; 11] = ["..", "=", "[", "]", "(", ")", ",", "+", "-", "^", ":"];

fn syntax(line: usize, column: usize, message: impl Into<String>, expected: &[&str]) -> ScriptError {
    ScriptError {
        kind: ScriptErrorKind::Syntax,
        line,
        column,
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

fn tokenize(text: &str, line: usize) -> Result<Vec<Token>, ScriptError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), column });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse().map_err(|_| syntax(line, column, "integer literal out of range", &[]))?;
            out.push(Token { tok: Tok::Int(n), column });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push(Token { tok: Tok::Sym(s), column });
                i += s.len();
            }
            None => return Err(syntax(line, column, format!("unexpected character `{c}`"), &[])),
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parsing

/// Kinds of named values, for static checking.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum NameKind {
    Curve,
    Relation,
    Factorization,
    Embedding,
}

impl NameKind {
    fn describe(self) -> &'static str {
        match self {
            NameKind::Curve => "a curve",
            NameKind::Relation => "a relation",
            NameKind::Factorization => "a factorization",
            NameKind::Embedding => "an embedding",
        }
    }
}

const RESERVED: [&str; 4] = ["t", "push", "bd", "identity"];

fn basis_atom(name: &str) -> Option<Atom> {
    let (head, digits) = name.split_at(1);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let i: usize = digits.parse().ok()?;
    match head {
        "a" => Some(Atom::Alpha(i)),
        "b" => Some(Atom::Beta(i)),
        "d" => Some(Atom::Delta(i)),
        _ => None,
    }
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    end_column: usize,
    scope: &'a BTreeMap<String, NameKind>,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_column, |t| t.column)
    }

    fn error(&self, expected: &[&str]) -> ScriptError {
        let found = match self.peek() {
            Some(t) => format!("unexpected {t}"),
            None => "unexpected end of line".to_string(),
        };
        syntax(self.line, self.column(), found, expected)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.peek()
            == Some(&Tok::Sym(match SYMBOLS.iter().find(|x| **x == s) {
                Some(x) => x,
                None => return false,
            }))
        {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ScriptError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{s}`")]))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ScriptError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn keyword(&mut self, options: &[&str]) -> Result<String, ScriptError> {
        match self.peek() {
            Some(Tok::Ident(s)) if options.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => {
                let quoted: Vec<String> = options.iter().map(|o| format!("`{o}`")).collect();
                let mut e = self.error(&[]);
                e.expected = quoted;
                Err(e)
            }
        }
    }

    fn int(&mut self) -> Result<i64, ScriptError> {
        let negative = self.eat_sym("-");
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(if negative { -n } else { n })
            }
            _ => Err(self.error(&["an integer"])),
        }
    }

    fn position(&mut self) -> Result<usize, ScriptError> {
        let column = self.column();
        let n = self.int()?;
        if n < 1 {
            return Err(syntax(self.line, column, "positions are 1-based", &[]));
        }
        Ok(n as usize)
    }

    fn end(&self) -> Result<(), ScriptError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.error(&["end of line"]))
        }
    }

    /// A previously declared name of the given kind.
    fn reference(&mut self, kind: NameKind) -> Result<String, ScriptError> {
        let column = self.column();
        let name = self.ident(kind.describe())?;
        match self.scope.get(&name) {
            None => Err(ScriptError {
                kind: ScriptErrorKind::Undeclared,
                line: self.line,
                column,
                message: format!("`{name}` is not declared"),
                expected: Vec::new(),
            }),
            Some(k) if *k != kind => Err(ScriptError {
                kind: ScriptErrorKind::WrongKind,
                line: self.line,
                column,
                message: format!("`{name}` is {}, expected {}", k.describe(), kind.describe()),
                expected: Vec::new(),
            }),
            Some(_) => Ok(name),
        }
    }

    /// A fresh name being declared.
    fn declaration(&mut self) -> Result<(String, usize), ScriptError> {
        let column = self.column();
        let name = self.ident("a name")?;
        let bad = |message: String, kind| ScriptError { kind, line: self.line, column, message, expected: Vec::new() };
        if RESERVED.contains(&name.as_str()) || basis_atom(&name).is_some() {
            return Err(bad(format!("`{name}` is reserved"), ScriptErrorKind::Syntax));
        }
        if self.scope.contains_key(&name) {
            return Err(bad(format!("`{name}` is already declared"), ScriptErrorKind::Redeclared));
        }
        Ok((name, column))
    }

    fn power(&mut self) -> Result<i64, ScriptError> {
        if !self.eat_sym("^") {
            return Ok(1);
        }
        let column = self.column();
        let p = self.int()?;
        if p == 0 {
            return Err(syntax(self.line, column, "exponent must be nonzero", &[]));
        }
        Ok(p)
    }

    fn curve_expr(&mut self) -> Result<CurveExpr, ScriptError> {
        if self.eat_sym("[") {
            let mut v = Vec::new();
            if !self.eat_sym("]") {
                loop {
                    v.push(self.int()?);
                    if self.eat_sym("]") {
                        break;
                    }
                    self.expect_sym(",")?;
                }
            }
            return Ok(CurveExpr::Vector(v));
        }
        let mut terms = Vec::new();
        let mut sign = if self.eat_sym("-") { -1 } else { 1 };
        loop {
            let coefficient = match self.peek() {
                Some(Tok::Int(n)) => {
                    let n = *n;
                    self.pos += 1;
                    n
                }
                _ => 1,
            };
            let atom = self.atom()?;
            terms.push((sign * coefficient, atom));
            if self.eat_sym("+") {
                sign = 1;
            } else if self.eat_sym("-") {
                sign = -1;
            } else {
                break;
            }
        }
        Ok(CurveExpr::Linear(terms))
    }

    fn atom(&mut self) -> Result<Atom, ScriptError> {
        match self.peek() {
            Some(Tok::Ident(s)) => match basis_atom(s) {
                Some(a) => {
                    self.pos += 1;
                    Ok(a)
                }
                None => Ok(Atom::Named(self.reference(NameKind::Curve)?)),
            },
            _ => Err(self.error(&["a basis class `a<i>`, `b<i>`, `d<j>`", "a curve name"])),
        }
    }

    fn word_item(&mut self) -> Result<WordItem, ScriptError> {
        let is_call = matches!(self.toks.get(self.pos + 1).map(|t| &t.tok), Some(Tok::Sym("(")));
        match self.peek() {
            Some(Tok::Ident(s)) if is_call && (s == "t" || s == "push") => {
                let push = s == "push";
                self.pos += 2;
                let curve = self.curve_expr()?;
                self.expect_sym(")")?;
                let power = self.power()?;
                Ok(if push { WordItem::Push { curve, power } } else { WordItem::Twist { curve, power } })
            }
            Some(Tok::Ident(s)) if is_call && s == "bd" => {
                self.pos += 2;
                let component = self.position()?;
                self.expect_sym(")")?;
                let power = self.power()?;
                Ok(WordItem::Boundary { component, power })
            }
            Some(Tok::Ident(_)) => {
                let name = self.reference(NameKind::Factorization)?;
                let power = self.power()?;
                Ok(WordItem::Splice { name, power })
            }
            _ => Err(self.error(&["`t(...)`", "`push(...)`", "`bd(...)`", "a factorization name"])),
        }
    }
}

fn parse_statement(c: &mut Cursor<'_>) -> Result<(Statement, Option<(String, NameKind)>), ScriptError> {
    const KEYWORDS: [&str; 18] = [
        "surface",
        "curve",
        "relation",
        "fixture",
        "pencil",
        "word",
        "target",
        "embedding",
        "hurwitz",
        "slide",
        "cyclic",
        "conjugate",
        "cancel",
        "fiber_sum",
        "substitute",
        "cap",
        "forget",
        "emit",
    ];
    let keyword = c.keyword(&KEYWORDS)?;
    let fact = NameKind::Factorization;
    let stmt = match keyword.as_str() {
        "surface" => {
            let mut values = [None, None, None];
            for (slot, key) in ["g", "b", "k"].iter().enumerate() {
                if c.peek() == Some(&Tok::Ident(key.to_string())) {
                    c.pos += 1;
                    c.expect_sym("=")?;
                    let column = c.column();
                    let n = c.int()?;
                    if n < 0 {
                        return Err(syntax(c.line, column, "must be non-negative", &[]));
                    }
                    values[slot] = Some(n as usize);
                } else if slot == 0 {
                    return Err(c.error(&["`g`"]));
                }
            }
            let [g, b, k] = values;
            Statement::Surface { genus: g.unwrap_or(0), boundary: b.unwrap_or(0), marked: k.unwrap_or(0) }
        }
        "curve" => {
            let (name, _) = c.declaration()?;
            c.expect_sym("=")?;
            let value = c.curve_expr()?;
            c.end()?;
            return Ok((Statement::Curve { name: name.clone(), value }, Some((name, NameKind::Curve))));
        }
        "relation" => {
            let (name, _) = c.declaration()?;
            c.expect_sym("=")?;
            let column = c.column();
            let text: String = c.toks[c.pos..]
                .iter()
                .map(|t| match &t.tok {
                    Tok::Ident(s) => s.clone(),
                    Tok::Int(n) => n.to_string(),
                    Tok::Sym(s) => s.to_string(),
                })
                .collect();
            c.pos = c.toks.len();
            let spec = RelationSpec::parse(&text).map_err(|_| {
                syntax(
                    c.line,
                    column,
                    format!("unknown relation `{text}`"),
                    &[
                        "`lantern`",
                        "`chain(k)`",
                        "`odd_chain(g)`",
                        "`even_chain(g)`",
                        "`hyperelliptic(g)`",
                        "`yun(m,n)`",
                    ],
                )
            })?;
            return Ok((Statement::Relation { name: name.clone(), spec }, Some((name, NameKind::Relation))));
        }
        "fixture" => {
            let (name, _) = c.declaration()?;
            c.expect_sym("=")?;
            let fixture = c.ident("a fixture name")?;
            c.end()?;
            return Ok((Statement::Fixture { name: name.clone(), fixture }, Some((name, fact))));
        }
        "pencil" => {
            let (name, _) = c.declaration()?;
            c.expect_sym("=")?;
            let relation = c.reference(NameKind::Relation)?;
            c.end()?;
            return Ok((Statement::Pencil { name: name.clone(), relation }, Some((name, fact))));
        }
        "word" => {
            let (name, _) = c.declaration()?;
            c.expect_sym("=")?;
            let mut items = Vec::new();
            while c.peek().is_some() {
                items.push(c.word_item()?);
            }
            return Ok((Statement::Word { name: name.clone(), items }, Some((name, fact))));
        }
        "target" => {
            let name = c.reference(fact)?;
            c.expect_sym("=")?;
            c.expect_sym("[")?;
            let mut exponents = Vec::new();
            if !c.eat_sym("]") {
                loop {
                    exponents.push(c.int()?);
                    if c.eat_sym("]") {
                        break;
                    }
                    c.expect_sym(",")?;
                }
            }
            Statement::Target { name, exponents }
        }
        "embedding" => {
            let (name, _) = c.declaration()?;
            c.expect_sym("=")?;
            let relation = c.reference(NameKind::Relation)?;
            c.expect_sym(":")?;
            let images = if c.peek() == Some(&Tok::Ident("identity".into())) {
                c.pos += 1;
                None
            } else {
                let mut v = vec![c.curve_expr()?];
                while c.eat_sym(",") {
                    v.push(c.curve_expr()?);
                }
                Some(v)
            };
            c.end()?;
            return Ok((
                Statement::Embedding { name: name.clone(), relation, images },
                Some((name, NameKind::Embedding)),
            ));
        }
        "hurwitz" => {
            let name = c.reference(fact)?;
            let index = c.position()?;
            let direction = match c.keyword(&["left", "right"])?.as_str() {
                "left" => Direction::Left,
                _ => Direction::Right,
            };
            Statement::Hurwitz { name, index, direction }
        }
        "slide" => {
            let name = c.reference(fact)?;
            let from = c.position()?;
            let to = c.position()?;
            Statement::Slide { name, from, to }
        }
        "cyclic" => {
            let name = c.reference(fact)?;
            let shift = c.int()?;
            Statement::Cyclic { name, shift }
        }
        "conjugate" => {
            let name = c.reference(fact)?;
            c.keyword(&["by"])?;
            let by = c.reference(fact)?;
            Statement::Conjugate { name, by }
        }
        "cancel" => Statement::Cancel { name: c.reference(fact)? },
        "forget" => Statement::Forget { name: c.reference(fact)? },
        "fiber_sum" => {
            let (name, _) = c.declaration()?;
            c.expect_sym("=")?;
            let mut parts = Vec::new();
            loop {
                let part = c.reference(fact)?;
                let glue = if c.peek() == Some(&Tok::Ident("by".into())) {
                    c.pos += 1;
                    Some(c.reference(fact)?)
                } else {
                    None
                };
                parts.push(SumPart { name: part, glue });
                if !c.eat_sym("+") {
                    break;
                }
            }
            c.end()?;
            return Ok((Statement::FiberSum { name: name.clone(), parts }, Some((name, fact))));
        }
        "substitute" => {
            let name = c.reference(fact)?;
            let start = c.position()?;
            c.expect_sym("..")?;
            let column = c.column();
            let end = c.position()?;
            if end < start {
                return Err(syntax(c.line, column, "range end precedes its start", &[]));
            }
            c.keyword(&["with"])?;
            let relation = c.reference(NameKind::Relation)?;
            c.keyword(&["via"])?;
            let embedding = c.reference(NameKind::Embedding)?;
            Statement::Substitute { name, start, end, relation, embedding }
        }
        "cap" => {
            let name = c.reference(fact)?;
            let mut components = vec![c.position()?];
            while c.peek().is_some() {
                components.push(c.position()?);
            }
            Statement::Cap { name, components }
        }
        "emit" => {
            let what = c.keyword(&["invariants", "spin", "triviality", "ledger", "terms", "forms"])?;
            let name = c.reference(fact)?;
            let kind = match what.as_str() {
                "invariants" => EmitKind::Invariants,
                "triviality" => EmitKind::Triviality,
                "ledger" => EmitKind::Ledger,
                "terms" => EmitKind::Terms,
                "forms" => EmitKind::Forms,
                _ => EmitKind::Spin(if c.peek().is_none() {
                    SpinMode::Auto
                } else {
                    match c.keyword(&["pencil", "doubled", "parity"])?.as_str() {
                        "pencil" => SpinMode::Pencil,
                        "doubled" => SpinMode::Doubled,
                        _ => match c.keyword(&["even", "odd"])?.as_str() {
                            "even" => SpinMode::Parity(DualParity::Even),
                            _ => SpinMode::Parity(DualParity::Odd),
                        },
                    }
                }),
            };
            Statement::Emit { kind, name }
        }
        _ => unreachable!("keyword list is exhaustive"),
    };
    c.end()?;
    Ok((stmt, None))
}

/// Parses a script, reporting the first error with its position.
pub fn parse_script(text: &str) -> Result<Script, ScriptError> {
    let mut scope = BTreeMap::new();
    let mut statements = Vec::new();
    let mut positions = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokenize(raw, line)?;
        if toks.is_empty() {
            continue;
        }
        let column = toks[0].column;
        let end_column = raw.chars().count() + 1;
        let (stmt, declared) = {
            let mut c = Cursor { toks: &toks, pos: 0, line, end_column, scope: &scope };
            parse_statement(&mut c)?
        };
        if let Some((name, kind)) = declared {
            scope.insert(name, kind);
        }
        statements.push(stmt);
        positions.push(Position { line, column });
    }
    Ok(Script { statements, positions })
}

// ---------------------------------------------------------------------------
// Pretty printing

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Alpha(i) => write!(f, "a{i}"),
            Atom::Beta(i) => write!(f, "b{i}"),
            Atom::Delta(j) => write!(f, "d{j}"),
            Atom::Named(n) => f.write_str(n),
        }
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    f.write_str("[")?;
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("]")
}

impl fmt::Display for CurveExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveExpr::Vector(v) => write_list(f, v),
            CurveExpr::Linear(terms) => {
                for (i, (c, atom)) in terms.iter().enumerate() {
                    let magnitude = c.unsigned_abs();
                    match (i, *c < 0) {
                        (0, false) => {}
                        (0, true) => f.write_str("-")?,
                        (_, false) => f.write_str(" + ")?,
                        (_, true) => f.write_str(" - ")?,
                    }
                    if magnitude != 1 {
                        write!(f, "{magnitude} ")?;
                    }
                    write!(f, "{atom}")?;
                }
                Ok(())
            }
        }
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, power: i64) -> fmt::Result {
    if power != 1 {
        write!(f, "^{power}")?;
    }
    Ok(())
}

impl fmt::Display for WordItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordItem::Twist { curve, power } => {
                write!(f, "t({curve})")?;
                write_power(f, *power)
            }
            WordItem::Push { curve, power } => {
                write!(f, "push({curve})")?;
                write_power(f, *power)
            }
            WordItem::Boundary { component, power } => {
                write!(f, "bd({component})")?;
                write_power(f, *power)
            }
            WordItem::Splice { name, power } => {
                f.write_str(name)?;
                write_power(f, *power)
            }
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Surface { genus, boundary, marked } => write!(f, "surface g={genus} b={boundary} k={marked}"),
            Statement::Curve { name, value } => write!(f, "curve {name} = {value}"),
            Statement::Relation { name, spec } => write!(f, "relation {name} = {spec}"),
            Statement::Fixture { name, fixture } => write!(f, "fixture {name} = {fixture}"),
            Statement::Pencil { name, relation } => write!(f, "pencil {name} = {relation}"),
            Statement::Word { name, items } => {
                write!(f, "word {name} =")?;
                for item in items {
                    write!(f, " {item}")?;
                }
                Ok(())
            }
            Statement::Target { name, exponents } => {
                write!(f, "target {name} = ")?;
                write_list(f, exponents)
            }
            Statement::Embedding { name, relation, images } => {
                write!(f, "embedding {name} = {relation} : ")?;
                match images {
                    None => f.write_str("identity"),
                    Some(v) => {
                        for (i, e) in v.iter().enumerate() {
                            if i > 0 {
                                f.write_str(", ")?;
                            }
                            write!(f, "{e}")?;
                        }
                        Ok(())
                    }
                }
            }
            Statement::Hurwitz { name, index, direction } => {
                let d = match direction {
                    Direction::Left => "left",
                    Direction::Right => "right",
                };
                write!(f, "hurwitz {name} {index} {d}")
            }
            Statement::Slide { name, from, to } => write!(f, "slide {name} {from} {to}"),
            Statement::Cyclic { name, shift } => write!(f, "cyclic {name} {shift}"),
            Statement::Conjugate { name, by } => write!(f, "conjugate {name} by {by}"),
            Statement::Cancel { name } => write!(f, "cancel {name}"),
            Statement::Forget { name } => write!(f, "forget {name}"),
            Statement::FiberSum { name, parts } => {
                write!(f, "fiber_sum {name} =")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" +")?;
                    }
                    write!(f, " {}", p.name)?;
                    if let Some(g) = &p.glue {
                        write!(f, " by {g}")?;
                    }
                }
                Ok(())
            }
            Statement::Substitute { name, start, end, relation, embedding } => {
                write!(f, "substitute {name} {start}..{end} with {relation} via {embedding}")
            }
            Statement::Cap { name, components } => {
                write!(f, "cap {name}")?;
                for j in components {
                    write!(f, " {j}")?;
                }
                Ok(())
            }
            Statement::Emit { kind, name } => match kind {
                EmitKind::Invariants => write!(f, "emit invariants {name}"),
                EmitKind::Triviality => write!(f, "emit triviality {name}"),
                EmitKind::Ledger => write!(f, "emit ledger {name}"),
                EmitKind::Terms => write!(f, "emit terms {name}"),
                EmitKind::Forms => write!(f, "emit forms {name}"),
                EmitKind::Spin(mode) => {
                    write!(f, "emit spin {name}")?;
                    match mode {
                        SpinMode::Auto => Ok(()),
                        SpinMode::Pencil => f.write_str(" pencil"),
                        SpinMode::Doubled => f.write_str(" doubled"),
                        SpinMode::Parity(DualParity::Even) => f.write_str(" parity even"),
                        SpinMode::Parity(DualParity::Odd) => f.write_str(" parity odd"),
                        SpinMode::Parity(DualParity::Unknown) => Ok(()),
                    }
                }
            },
        }
    }
}

/// Canonical text of a script: one statement per line.
pub fn pretty_print(script: &Script) -> String {
    script.statements.iter().map(|s| format!("{s}\n")).collect()
}

// ---------------------------------------------------------------------------
// Execution

/// One ledger line of a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerRow {
    pub kind: String,
    pub count: u64,
    pub value: i64,
}

/// One term of a `terms` report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermRow {
    pub kind: TermKind,
    #[serde(with = "crate::homology::int_list")]
    pub class: Vec<Int>,
    pub sign: i8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl TermRow {
    fn new(t: &TwistTerm) -> Self {
        TermRow {
            kind: t.kind,
            class: t.curve.coords().to_vec(),
            sign: t.sign,
            label: t.curve.label().map(str::to_string),
        }
    }
}

impl fmt::Display for TermRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            TermKind::Dehn => "t",
            TermKind::Push => "push",
            TermKind::Boundary => "bd",
        };
        let class: Vec<String> = self.class.iter().map(Int::to_string).collect();
        write!(f, "{kind}([{}])", class.join(","))?;
        if self.sign < 0 {
            f.write_str("^-1")?;
        }
        if let Some(l) = &self.label {
            write!(f, "  {l}")?;
        }
        Ok(())
    }
}

/// Output of one `emit` statement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "emit", rename_all = "snake_case")]
pub enum EmitOutput {
    Invariants { report: InvariantReport, consistent: bool },
    Spin { verdict: SpinVerdict },
    Triviality { trivial: bool, modulus: Option<u32>, target: Vec<i64> },
    Ledger { entries: Option<Vec<LedgerRow>>, sigma: Option<i64> },
    Terms { count: usize, dehn: usize, terms: Vec<TermRow> },
    Forms { count: u128, arf0: Option<u64>, arf1: Option<u64> },
}

/// A report line: which statement emitted what.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportEntry {
    pub line: usize,
    pub name: String,
    #[serde(flatten)]
    pub output: EmitOutput,
}

/// Everything emitted by a script, in statement order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub entries: Vec<ReportEntry>,
}

impl Report {
    /// Canonical JSON serialization (pretty-printed, newline-terminated).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    /// All entries emitted for `name`.
    pub fn for_name<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a EmitOutput> + 'a {
        self.entries.iter().filter(move |e| e.name == name).map(|e| &e.output)
    }
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

impl fmt::Display for EmitOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmitOutput::Invariants { report, consistent } => write!(
                f,
                "e = {}, sigma(ledger) = {}, sigma(Meyer) = {}, H1 = {}, d = {}{}",
                report.euler,
                opt(&report.sigma_ledger),
                opt(&report.sigma_meyer),
                opt(&report.h1),
                opt(&report.divisibility),
                if *consistent { "" } else { "  [signatures disagree]" }
            ),
            EmitOutput::Spin { verdict } => {
                let status = match verdict.status {
                    crate::spin::SpinStatus::Spin => "spin",
                    crate::spin::SpinStatus::NotSpin => "not spin",
                    crate::spin::SpinStatus::Inconclusive => "inconclusive",
                };
                write!(f, "{status} ({})", verdict.reason)?;
                if let Some(q) = &verdict.witness {
                    let bits: String = q.basis_values.iter().map(|b| if *b { '1' } else { '0' }).collect();
                    write!(f, ", witness {bits}")?;
                }
                Ok(())
            }
            EmitOutput::Triviality { trivial, modulus, target } => {
                write!(f, "{}", if *trivial { "homologically trivial" } else { "NOT homologically trivial" })?;
                if let Some(m) = modulus {
                    write!(f, " (mod {m})")?;
                }
                if !target.is_empty() {
                    write!(f, ", target {target:?}")?;
                }
                Ok(())
            }
            EmitOutput::Ledger { entries, sigma } => match (entries, sigma) {
                (Some(rows), Some(s)) => {
                    let parts: Vec<String> =
                        rows.iter().map(|r| format!("{} x {} ({:+})", r.count, r.kind, r.value)).collect();
                    write!(
                        f,
                        "{} => sigma = {s}",
                        if parts.is_empty() { "empty".to_string() } else { parts.join(", ") }
                    )
                }
                _ => f.write_str("unknown"),
            },
            EmitOutput::Terms { count, dehn, terms } => {
                write!(f, "{count} terms ({dehn} Dehn twists)")?;
                for t in terms {
                    write!(f, "\n    {t}")?;
                }
                Ok(())
            }
            EmitOutput::Forms { count, arf0, arf1 } => {
                write!(f, "{count} admissible quadratic forms")?;
                if let (Some(a), Some(b)) = (arf0, arf1) {
                    write!(f, " (Arf 0: {a}, Arf 1: {b})")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let kind = match &e.output {
                EmitOutput::Invariants { .. } => "invariants",
                EmitOutput::Spin { .. } => "spin",
                EmitOutput::Triviality { .. } => "triviality",
                EmitOutput::Ledger { .. } => "ledger",
                EmitOutput::Terms { .. } => "terms",
                EmitOutput::Forms { .. } => "forms",
            };
            writeln!(f, "line {}: {kind} {}: {}", e.line, e.name, e.output)?;
        }
        Ok(())
    }
}

/// A factorization together with its script-level bookkeeping.
#[derive(Clone, Debug)]
struct FactValue {
    f: Factorization,
    /// `None` when the signature contributions are unknown.
    ledger: Option<Vec<LedgerEntry>>,
    pseudosection: Option<CurveClass>,
    /// Whether the word must stay homologically trivial.
    relator: bool,
}

#[derive(Clone, Debug)]
enum Value {
    /// Signed coordinates: the orientation matters in linear combinations.
    Curve(Vec<Int>),
    Relation(RelationTemplate),
    Fact(FactValue),
    Embedding(EmbeddingMap),
}

struct Machine {
    surface: Option<SurfaceModel>,
    values: BTreeMap<String, Value>,
    report: Report,
}

type Fallible<T> = std::result::Result<T, String>;

fn merge_ledgers(a: Option<Vec<LedgerEntry>>, b: &Option<Vec<LedgerEntry>>, times: u64) -> Option<Vec<LedgerEntry>> {
    let (mut a, b) = (a?, b.as_ref()?);
    for e in b {
        ledger_add(&mut a, LedgerEntry::new(e.kind.clone(), e.count * times));
    }
    Some(a)
}

impl Machine {
    fn surface(&self) -> Fallible<SurfaceModel> {
        self.surface.ok_or_else(|| "no surface declared".to_string())
    }

    fn fact(&self, name: &str) -> &FactValue {
        match self.values.get(name) {
            Some(Value::Fact(v)) => v,
            _ => unreachable!("the parser checks name kinds"),
        }
    }

    fn fact_mut(&mut self, name: &str) -> &mut FactValue {
        match self.values.get_mut(name) {
            Some(Value::Fact(v)) => v,
            _ => unreachable!("the parser checks name kinds"),
        }
    }

    fn relation(&self, name: &str) -> &RelationTemplate {
        match self.values.get(name) {
            Some(Value::Relation(r)) => r,
            _ => unreachable!("the parser checks name kinds"),
        }
    }

    fn eval_coords(&self, e: &CurveExpr, s: &SurfaceModel) -> Fallible<Vec<Int>> {
        Ok(match e {
            CurveExpr::Vector(v) => {
                if v.len() != s.rank() {
                    return Err(format!("class has {} coordinates, the surface has rank {}", v.len(), s.rank()));
                }
                v.iter().map(|&x| Int::from(x)).collect()
            }
            CurveExpr::Linear(terms) => {
                let mut acc = vec![Int::from(0); s.rank()];
                for (c, atom) in terms {
                    let v: Vec<Int> = match atom {
                        Atom::Alpha(i) if (1..=s.genus).contains(i) => s.alpha(*i).coords().to_vec(),
                        Atom::Beta(i) if (1..=s.genus).contains(i) => s.beta(*i).coords().to_vec(),
                        Atom::Delta(j) if (1..=s.boundary).contains(j) => s.delta_coords(*j),
                        Atom::Named(n) => match self.values.get(n) {
                            Some(Value::Curve(cc)) if cc.len() == s.rank() => cc.clone(),
                            Some(Value::Curve(_)) => return Err(format!("curve `{n}` lives on another surface")),
                            _ => unreachable!("the parser checks name kinds"),
                        },
                        other => return Err(format!("`{other}` is not a basis class of {s}")),
                    };
                    for (a, x) in acc.iter_mut().zip(v) {
                        *a += x * Int::from(*c);
                    }
                }
                acc
            }
        })
    }

    /// Curves keep the label of their name when used as a single atom.
    fn labelled_curve(&self, e: &CurveExpr, s: &SurfaceModel) -> Fallible<CurveClass> {
        let c = CurveClass::new(self.eval_coords(e, s)?);
        Ok(match e {
            CurveExpr::Linear(terms) if terms.len() == 1 && terms[0].0.abs() == 1 => {
                c.with_label(terms[0].1.to_string())
            }
            _ => c,
        })
    }

    fn check_relator(&self, name: &str) -> Fallible<()> {
        let v = self.fact(name);
        if v.relator && !homological_triviality(&v.f).trivial {
            return Err(format!("`{name}` is no longer homologically trivial"));
        }
        Ok(())
    }

    fn build_word(&self, items: &[WordItem]) -> Fallible<FactValue> {
        let splice_surface = items.iter().find_map(|i| match i {
            WordItem::Splice { name, .. } => Some(self.fact(name).f.surface),
            _ => None,
        });
        let s = match self.surface.or(splice_surface) {
            Some(s) => s,
            None => return Err("no surface declared".into()),
        };
        let mut f = Factorization::empty(s);
        let mut ledger = Some(Vec::new());
        let mut relator = true;
        let mut pseudosection = None;
        let repeat = |term: TwistTerm, power: i64| -> Vec<TwistTerm> {
            let t = if power < 0 { term.inverse() } else { term };
            vec![t; power.unsigned_abs() as usize]
        };
        for item in items {
            match item {
                WordItem::Twist { curve, power } => {
                    let c = self.labelled_curve(curve, &s)?;
                    f.terms.extend(repeat(TwistTerm::positive(c), *power));
                    ledger = None;
                    relator = false;
                }
                WordItem::Push { curve, power } => {
                    let c = self.labelled_curve(curve, &s)?;
                    f.terms.extend(repeat(TwistTerm::push(c), *power));
                }
                WordItem::Boundary { component, power } => {
                    if *component > s.boundary {
                        return Err(format!("boundary component {component} out of range for {s}"));
                    }
                    f.terms.extend(repeat(TwistTerm::boundary(&s, *component, 1), *power));
                    ledger = None;
                    relator = false;
                }
                WordItem::Splice { name, power } => {
                    let v = self.fact(name);
                    if v.f.surface != s {
                        return Err(format!("`{name}` lives on {}, the word on {s}", v.f.surface));
                    }
                    let block = if *power < 0 { v.f.inverse() } else { v.f.clone() };
                    let block = block.power(power.unsigned_abs() as usize);
                    f = f.concat(&block).map_err(|e| e.to_string())?;
                    let sub = v.ledger.as_ref().map(|l| {
                        l.iter()
                            .map(|e| {
                                LedgerEntry::new(if *power < 0 { e.kind.inverse() } else { e.kind.clone() }, e.count)
                            })
                            .collect::<Vec<_>>()
                    });
                    ledger = merge_ledgers(ledger, &sub, power.unsigned_abs());
                    relator &= v.relator;
                    if items.len() == 1 && *power == 1 {
                        pseudosection = v.pseudosection.clone();
                    }
                }
            }
        }
        f.validate().map_err(|e| e.to_string())?;
        Ok(FactValue { f, ledger, pseudosection, relator })
    }

    fn emit(&self, kind: EmitKind, name: &str) -> Fallible<EmitOutput> {
        let v = self.fact(name);
        let f = &v.f;
        let err = |e: crate::Error| e.to_string();
        Ok(match kind {
            EmitKind::Invariants => {
                let report = invariant_report(f, v.ledger.as_deref(), v.pseudosection.as_ref()).map_err(err)?;
                EmitOutput::Invariants { consistent: report.consistent(), report }
            }
            EmitKind::Triviality => {
                let r = homological_triviality(f);
                EmitOutput::Triviality { trivial: r.trivial, modulus: r.modulus, target: f.target.clone() }
            }
            EmitKind::Ledger => EmitOutput::Ledger {
                sigma: v.ledger.as_deref().map(signature_ledger),
                entries: v.ledger.as_ref().map(|l| {
                    l.iter()
                        .map(|e| LedgerRow { kind: e.kind.name().to_string(), count: e.count, value: e.kind.value() })
                        .collect()
                }),
            },
            EmitKind::Terms => EmitOutput::Terms {
                count: f.len(),
                dehn: f.dehn_count(),
                terms: f.terms.iter().map(TermRow::new).collect(),
            },
            EmitKind::Forms => {
                let sol = solve_factorization_forms(f).map_err(err)?;
                let (arf0, arf1) = match classify_arf(&sol, &f.surface) {
                    Ok((a, b)) => (Some(a), Some(b)),
                    Err(_) => (None, None),
                };
                EmitOutput::Forms { count: sol.count, arf0, arf1 }
            }
            EmitKind::Spin(mode) => {
                let verdict = match mode {
                    SpinMode::Pencil => pencil_spin_check(f).map_err(err)?,
                    SpinMode::Doubled => fibration_spin_check(f, DualParity::Unknown, true).map_err(err)?,
                    SpinMode::Parity(p) => fibration_spin_check(f, p, false).map_err(err)?,
                    SpinMode::Auto if f.surface.boundary > 0 => pencil_spin_check(f).map_err(err)?,
                    SpinMode::Auto => {
                        let has_push = f.terms.iter().any(|t| t.kind == TermKind::Push);
                        let alpha = v.pseudosection.clone().or_else(|| has_push.then(|| f.push_class_sum()));
                        match alpha {
                            Some(a) if f.coefficients == Coefficients::Integer => {
                                let sigma = signature_meyer(f).map_err(err)?;
                                let div = fiber_divisibility(&f.dehn_classes(), &a).map_err(err)?;
                                spin_via_arf(f, sigma, &div).map_err(err)?
                            }
                            _ => fibration_spin_check(f, DualParity::Unknown, false).map_err(err)?,
                        }
                    }
                };
                EmitOutput::Spin { verdict }
            }
        })
    }

    fn exec(&mut self, stmt: &Statement, line: usize) -> Fallible<()> {
        let err = |e: crate::Error| e.to_string();
        match stmt {
            Statement::Surface { genus, boundary, marked } => {
                self.surface = Some(SurfaceModel::new(*genus, *boundary, *marked));
            }
            Statement::Curve { name, value } => {
                let s = self.surface()?;
                let c = self.eval_coords(value, &s)?;
                self.values.insert(name.clone(), Value::Curve(c));
            }
            Statement::Relation { name, spec } => {
                let r = builtin_relation(*spec).map_err(err)?;
                self.values.insert(name.clone(), Value::Relation(r));
            }
            Statement::Fixture { name, fixture } => {
                let fx = builtin_fixture(fixture).map_err(err)?;
                let v = FactValue {
                    pseudosection: fx.expected.pseudosection_class(),
                    f: fx.factorization,
                    ledger: Some(fx.ledger),
                    relator: true,
                };
                self.values.insert(name.clone(), Value::Fact(v));
                self.check_relator(name)?;
            }
            Statement::Pencil { name, relation } => {
                let r = self.relation(relation);
                let ledger = r.ledger_kind.clone().map(|k| vec![LedgerEntry::new(k, 1)]);
                let v = FactValue { f: r.pencil(), ledger, pseudosection: None, relator: true };
                self.values.insert(name.clone(), Value::Fact(v));
                self.check_relator(name)?;
            }
            Statement::Word { name, items } => {
                let v = self.build_word(items)?;
                self.values.insert(name.clone(), Value::Fact(v));
                self.check_relator(name)?;
            }
            Statement::Target { name, exponents } => {
                let v = self.fact_mut(name);
                let mut f = v.f.clone();
                f.target = exponents.clone();
                f.validate().map_err(err)?;
                v.f = f;
                v.relator = true;
                self.check_relator(name)?;
            }
            Statement::Embedding { name, relation, images } => {
                let r = self.relation(relation).clone();
                let emb = match images {
                    None => EmbeddingMap::identity(r.surface),
                    Some(exprs) => {
                        let s = self.surface()?;
                        if exprs.len() != r.surface.rank() {
                            return Err(format!("{} needs {} images, got {}", r.name, r.surface.rank(), exprs.len()));
                        }
                        let cols = exprs.iter().map(|e| self.eval_coords(e, &s)).collect::<Fallible<Vec<_>>>()?;
                        let m = Matrix::from_cols(s.rank(), &cols).ok_or("malformed images")?;
                        make_embedding(m, r.surface, s).map_err(err)?
                    }
                };
                self.values.insert(name.clone(), Value::Embedding(emb));
            }
            Statement::Hurwitz { name, index, direction } => {
                let v = self.fact_mut(name);
                v.f = hurwitz_move(&v.f, index - 1, *direction).map_err(err)?;
            }
            Statement::Slide { name, from, to } => {
                let v = self.fact_mut(name);
                v.f = slide(&v.f, from - 1, to - 1).map_err(err)?;
            }
            Statement::Cyclic { name, shift } => {
                let v = self.fact_mut(name);
                v.f = cyclic_permute(&v.f, *shift).map_err(err)?;
            }
            Statement::Conjugate { name, by } => {
                let w = self.fact(by).f.clone();
                let v = self.fact(name);
                if w.surface != v.f.surface {
                    return Err(format!("`{by}` lives on {}, `{name}` on {}", w.surface, v.f.surface));
                }
                let m = word_matrix(&w.terms, &w.surface).map_err(err)?;
                let f = conjugate_by(&v.f, &m).map_err(err)?;
                let pseudosection = v.pseudosection.as_ref().map(|p| m.apply(p));
                let v = self.fact_mut(name);
                v.f = f;
                v.pseudosection = pseudosection;
            }
            Statement::Cancel { name } => {
                let v = self.fact_mut(name);
                v.f = cancel_pairs(&v.f);
            }
            Statement::Forget { name } => {
                let v = self.fact_mut(name);
                v.f.terms.retain(|t| t.kind != TermKind::Push);
                v.f.surface.marked = 0;
                v.pseudosection = None;
            }
            Statement::FiberSum { name, parts } => {
                let first = self.fact(&parts[0].name).clone();
                let mut acc = first.f.clone();
                if let Some(g) = &parts[0].glue {
                    let m = word_matrix(&self.fact(g).f.terms, &acc.surface).map_err(err)?;
                    acc = conjugate_by(&acc, &m).map_err(err)?;
                }
                let mut ledger = first.ledger.clone();
                let mut relator = first.relator;
                for p in &parts[1..] {
                    let v = self.fact(&p.name);
                    let glue = match &p.glue {
                        Some(g) => word_matrix(&self.fact(g).f.terms, &v.f.surface).map_err(err)?,
                        None => crate::SymplecticMatrix::identity(v.f.surface.rank()),
                    };
                    acc = fiber_sum(&acc, &v.f, &glue).map_err(err)?;
                    ledger = merge_ledgers(ledger, &v.ledger, 1);
                    relator &= v.relator;
                }
                self.values
                    .insert(name.clone(), Value::Fact(FactValue { f: acc, ledger, pseudosection: None, relator }));
                self.check_relator(name)?;
            }
            Statement::Substitute { name, start, end, relation, embedding } => {
                let r = self.relation(relation).clone();
                let emb = match self.values.get(embedding) {
                    Some(Value::Embedding(e)) => e.clone(),
                    _ => unreachable!("the parser checks name kinds"),
                };
                let v = self.fact_mut(name);
                let sub = substitute(&v.f, start - 1..*end, &r, &emb).map_err(|e| match e {
                    // Report script (1-based) positions.
                    crate::Error::SubstitutionMismatch { position, message } => {
                        format!("substitution mismatch at position {}: {message}", position + 1)
                    }
                    other => other.to_string(),
                })?;
                v.f = sub.factorization;
                if let Some(l) = v.ledger.as_mut() {
                    ledger_add(l, sub.ledger_entry);
                }
                v.pseudosection = None;
            }
            Statement::Cap { name, components } => {
                let v = self.fact_mut(name);
                v.f = cap_boundary(&v.f, components).map_err(err)?;
                if let Some(l) = v.ledger.as_mut() {
                    ledger_add(l, LedgerEntry::new(LedgerKind::Blowup, components.len() as u64));
                }
                v.pseudosection = None;
            }
            Statement::Emit { kind, name } => {
                let output = self.emit(*kind, name)?;
                self.report.entries.push(ReportEntry { line, name: name.clone(), output });
                return Ok(());
            }
        }
        let touched = match stmt {
            Statement::Hurwitz { name, .. }
            | Statement::Slide { name, .. }
            | Statement::Cyclic { name, .. }
            | Statement::Conjugate { name, .. }
            | Statement::Cancel { name }
            | Statement::Forget { name }
            | Statement::Substitute { name, .. }
            | Statement::Cap { name, .. } => Some(name),
            _ => None,
        };
        if let Some(name) = touched {
            self.check_relator(name)?;
        }
        Ok(())
    }
}

/// Executes a parsed script. Errors carry the position of the failing
/// statement.
pub fn run_script(script: &Script) -> Result<Report, ScriptError> {
    let mut m = Machine { surface: None, values: BTreeMap::new(), report: Report::default() };
    for (i, stmt) in script.statements.iter().enumerate() {
        let pos = script.positions.get(i).copied().unwrap_or(Position { line: i + 1, column: 1 });
        m.exec(stmt, pos.line).map_err(|message| ScriptError {
            kind: ScriptErrorKind::Runtime,
            line: pos.line,
            column: pos.column,
            message,
            expected: Vec::new(),
        })?;
    }
    Ok(m.report)
}

/// Parses and runs script text.
pub fn run_script_text(text: &str) -> Result<Report, ScriptError> {
    run_script(&parse_script(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_statement_example() {
        let s = parse_script("surface g=9 b=0\nfixture F = genus9_signature_zero\nemit invariants F").unwrap();
        assert_eq!(s.statements.len(), 3);
    }

    #[test]
    fn undeclared_name() {
        let e = parse_script("hurwitz F 3 right").unwrap_err();
        assert_eq!(e.kind, ScriptErrorKind::Undeclared);
        assert_eq!((e.line, e.column), (1, 9));
    }

    #[test]
    fn empty_script() {
        assert_eq!(run_script_text("# nothing\n\n").unwrap(), Report::default());
    }

    #[test]
    fn expressions_round_trip() {
        let text = "surface g=2 b=2 k=0\ncurve X = -b1 + 2 a2 - d1\ncurve Y = [1, 0, -1, 0, 2]\nword W = t(X) t(Y)^-1 t(a1 + b2)^3\n";
        let s = parse_script(text).unwrap();
        assert_eq!(pretty_print(&s), text);
    }

    #[test]
    fn syntax_error_position() {
        let e = parse_script("surface g=1\ncurve X = a1 +").unwrap_err();
        assert_eq!(e.kind, ScriptErrorKind::Syntax);
        assert_eq!(e.line, 2);
        assert_eq!(e.column, 15);
    }
}
