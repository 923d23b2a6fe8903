//! JSON exchange format for factorizations and fixtures.
//!
//! ```json
//! {
//!   "surface": {"g":1,"b":0,"k":0},
//!   "terms": [
//!     {"kind":"dehn","class":[1,0],"sign":1,"label":"a"}
//!   ],
//!   "target": [],
//!   "ledger": [{"kind":"chain_2","count":1}]
//! }
//! ```
//!
//! Optional top-level fields: `"coefficients": "z2"` for mod-2 data, and, in
//! fixture files, `"name"` and `"expected"`. Encoding is canonical: fixed
//! field order, one term per line, UTF-8, newline-terminated.

use serde::{Deserialize, Serialize};

use crate::fixtures::{Expected, Fixture};
use crate::invariants::{LedgerEntry, LedgerKind};
use crate::{Coefficients, CurveClass, Error, Factorization, Result, SurfaceModel, TermKind, TwistTerm};

#[derive(Serialize, Deserialize)]
struct SurfaceDto {
    g: usize,
    b: usize,
    k: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDto {
    kind: TermKind,
    class: Vec<i64>,
    sign: i8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    component: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LedgerDto {
    kind: String,
    count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentDto {
    #[serde(default)]
    name: Option<String>,
    surface: SurfaceDto,
    #[serde(default)]
    coefficients: Option<Coefficients>,
    terms: Vec<TermDto>,
    #[serde(default)]
    target: Option<Vec<i64>>,
    #[serde(default)]
    ledger: Option<Vec<LedgerDto>>,
    #[serde(default)]
    expected: Option<Expected>,
}

/// A factorization file: the word plus its construction ledger.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub factorization: Factorization,
    pub ledger: Vec<LedgerEntry>,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

fn parse(text: &str) -> Result<DocumentDto> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(if path.is_empty() || path == "." { "$".to_string() } else { path }, e.into_inner().to_string())
    })
}

fn build(dto: DocumentDto) -> Result<(Option<String>, Document, Option<Expected>)> {
    let surface = SurfaceModel::new(dto.surface.g, dto.surface.b, dto.surface.k);
    let mut terms = Vec::with_capacity(dto.terms.len());
    for (i, t) in dto.terms.into_iter().enumerate() {
        if t.class.len() != surface.rank() {
            return Err(schema(
                format!("terms[{i}].class"),
                format!("expected {} coordinates, found {}", surface.rank(), t.class.len()),
            ));
        }
        if t.sign != 1 && t.sign != -1 {
            return Err(schema(format!("terms[{i}].sign"), "sign must be 1 or -1"));
        }
        if t.component.is_some() && t.kind != TermKind::Boundary {
            return Err(schema(format!("terms[{i}].component"), "only boundary terms name a component"));
        }
        let mut curve = CurveClass::from_i64(&t.class);
        if let Some(l) = t.label {
            curve = curve.with_label(l);
        }
        terms.push(TwistTerm { kind: t.kind, curve, sign: t.sign, component: t.component });
    }
    let mut ledger = Vec::new();
    for (i, e) in dto.ledger.unwrap_or_default().into_iter().enumerate() {
        let kind = match (LedgerKind::builtin(&e.kind), e.value) {
            (Some(k), None) => k,
            (Some(k), Some(v)) if v == k.value() => k,
            (Some(_), Some(_)) => return Err(schema(format!("ledger[{i}].value"), "conflicts with builtin value")),
            (None, Some(value)) => LedgerKind::Custom { name: e.kind, value },
            (None, None) => return Err(schema(format!("ledger[{i}].kind"), "unknown kind without a value")),
        };
        ledger.push(LedgerEntry::new(kind, e.count));
    }
    let factorization = Factorization {
        surface,
        terms,
        target: dto.target.unwrap_or_default(),
        coefficients: dto.coefficients.unwrap_or_default(),
    };
    factorization.validate().map_err(|e| schema("$", e.to_string()))?;
    Ok((dto.name, Document { factorization, ledger }, dto.expected))
}

/// Decodes a factorization document (fixture files are accepted too).
pub fn decode_document(text: &str) -> Result<Document> {
    build(parse(text)?).map(|(_, doc, _)| doc)
}

/// Decodes only the factorization.
pub fn decode_factorization(text: &str) -> Result<Factorization> {
    decode_document(text).map(|d| d.factorization)
}

/// Decodes a fixture file; `name` and `expected` are required.
pub fn decode_fixture(text: &str) -> Result<Fixture> {
    let (name, doc, expected) = build(parse(text)?)?;
    let name = name.ok_or_else(|| schema("name", "missing field"))?;
    Ok(Fixture { name, factorization: doc.factorization, ledger: doc.ledger, expected: expected.unwrap_or_default() })
}

fn compact<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data always serializes")
}

fn term_dto(t: &TwistTerm) -> Result<TermDto> {
    let class = t.curve.to_i64().ok_or_else(|| schema("terms", "class coordinate exceeds 64 bits"))?;
    Ok(TermDto {
        kind: t.kind,
        class,
        sign: t.sign,
        component: t.component,
        label: t.curve.label().map(str::to_string),
    })
}

fn ledger_dto(e: &LedgerEntry) -> LedgerDto {
    let value = match &e.kind {
        LedgerKind::Custom { value, .. } => Some(*value),
        _ => None,
    };
    LedgerDto { kind: e.kind.name().to_string(), count: e.count, value }
}

fn encode_body(
    name: Option<&str>,
    f: &Factorization,
    ledger: &[LedgerEntry],
    expected: Option<&Expected>,
    always_ledger: bool,
) -> Result<String> {
    let mut out = String::from("{\n");
    if let Some(n) = name {
        out += &format!("  \"name\": {},\n", compact(&n));
    }
    let s = &f.surface;
    out += &format!("  \"surface\": {},\n", compact(&SurfaceDto { g: s.genus, b: s.boundary, k: s.marked }));
    if f.coefficients == Coefficients::Z2 {
        out += &format!("  \"coefficients\": {},\n", compact(&f.coefficients));
    }
    out += "  \"terms\": [\n";
    let lines =
        f.terms.iter().map(|t| term_dto(t).map(|d| format!("    {}", compact(&d)))).collect::<Result<Vec<_>>>()?;
    out += &lines.join(",\n");
    if !lines.is_empty() {
        out += "\n";
    }
    out += "  ],\n";
    out += &format!("  \"target\": {}", compact(&f.target));
    if always_ledger || !ledger.is_empty() {
        let dtos: Vec<LedgerDto> = ledger.iter().map(ledger_dto).collect();
        out += &format!(",\n  \"ledger\": {}", compact(&dtos));
    }
    if let Some(e) = expected {
        out += &format!(",\n  \"expected\": {}", compact(e));
    }
    out += "\n}\n";
    Ok(out)
}

/// Canonical encoding of a document.
pub fn encode_document(doc: &Document) -> Result<String> {
    encode_body(None, &doc.factorization, &doc.ledger, None, false)
}

/// Canonical encoding of a bare factorization.
pub fn encode_factorization(f: &Factorization) -> Result<String> {
    encode_body(None, f, &[], None, false)
}

/// Canonical encoding of a fixture file.
pub fn encode_fixture(fx: &Fixture) -> Result<String> {
    encode_body(Some(&fx.name), &fx.factorization, &fx.ledger, Some(&fx.expected), true)
}
