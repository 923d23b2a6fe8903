//! Builtin fixtures: versioned JSON data files with a SHA-256 manifest.
//!
//! The files are embedded at compile time; setting `TWISTBENCH_FIXTURES` to
//! a directory loads them from there instead (the directory must contain
//! the same `checksums.sha256` manifest format).

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codec::decode_fixture;
use crate::invariants::LedgerEntry;
use crate::{AbelianGroupInvariants, CurveClass, Error, Factorization, Result};

/// Environment variable overriding the fixture directory.
pub const FIXTURE_DIR_ENV: &str = "TWISTBENCH_FIXTURES";

/// Names accepted by [`builtin_fixture`].
pub const FIXTURE_NAMES: [&str; 4] = ["genus2_pencil", "genus3_pencil", "genus9_signature_zero", "genus9_with_pushes"];

const MANIFEST: &str = include_str!("../fixtures/checksums.sha256");

const EMBEDDED: [(&str, &str); 4] = [
    ("genus2_pencil", include_str!("../fixtures/genus2_pencil.json")),
    ("genus3_pencil", include_str!("../fixtures/genus3_pencil.json")),
    ("genus9_signature_zero", include_str!("../fixtures/genus9_signature_zero.json")),
    ("genus9_with_pushes", include_str!("../fixtures/genus9_with_pushes.json")),
];

/// Invariants a fixture is expected to reproduce.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h1: Option<AbelianGroupInvariants>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisibility: Option<u64>,
    /// Number of quadratic forms taking the value 1 on every vanishing cycle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form_count: Option<u64>,
    /// Point-push class of a lift, when the factorization itself omits it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pseudosection: Option<Vec<i64>>,
}

impl Expected {
    pub fn pseudosection_class(&self) -> Option<CurveClass> {
        self.pseudosection.as_deref().map(CurveClass::from_i64)
    }
}

/// A named factorization with its construction ledger and expected
/// invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub name: String,
    pub factorization: Factorization,
    pub ledger: Vec<LedgerEntry>,
    pub expected: Expected,
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn manifest_digest(manifest: &str, file: &str) -> Option<String> {
    manifest.lines().find_map(|line| {
        let (digest, name) = line.split_once(char::is_whitespace)?;
        (name.trim().trim_start_matches('*') == file).then(|| digest.to_string())
    })
}

fn verify(manifest: &str, file: &str, text: &str) -> Result<()> {
    let want = manifest_digest(manifest, file)
        .ok_or_else(|| Error::FixtureData(format!("{file} is not listed in the checksum manifest")))?;
    let got = sha256_hex(text.as_bytes());
    if got != want {
        return Err(Error::FixtureData(format!("checksum mismatch for {file}: manifest {want}, file {got}")));
    }
    Ok(())
}

/// Raw text of a fixture file after checksum verification.
pub fn fixture_text(name: &str) -> Result<String> {
    let file = format!("{name}.json");
    match std::env::var_os(FIXTURE_DIR_ENV) {
        Some(dir) => {
            let dir = Path::new(&dir);
            let read =
                |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::FixtureData(format!("{}: {e}", p.display())));
            let manifest = read(&dir.join("checksums.sha256"))?;
            let path = dir.join(&file);
            if !path.exists() {
                return Err(Error::UnknownFixture(name.to_string()));
            }
            let text = read(&path)?;
            verify(&manifest, &file, &text)?;
            Ok(text)
        }
        None => {
            let (_, text) =
                EMBEDDED.iter().find(|(n, _)| *n == name).ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
            verify(MANIFEST, &file, text)?;
            Ok(text.to_string())
        }
    }
}

/// Loads a builtin fixture by name.
pub fn builtin_fixture(name: &str) -> Result<Fixture> {
    let fx = decode_fixture(&fixture_text(name)?)?;
    if fx.name != name {
        return Err(Error::FixtureData(format!("file for {name} declares name {}", fx.name)));
    }
    Ok(fx)
}
