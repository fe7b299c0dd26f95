//! Self-contained JSON certificates.
//!
//! Keys are emitted in sorted order. The `digest` field is the SHA-256 of the
//! compact serialization of every other field except `timing`, so rerunning a
//! command with the same inputs reproduces the digest exactly.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use prodone_core::GroupParams;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA: &str = "prodone-certificate/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Atom,
    NonAtom,
    DavenportSmall,
    InverseReport,
    ElasticityWitness,
    LemmaReport,
    Checkpoint,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::Atom,
        Kind::NonAtom,
        Kind::DavenportSmall,
        Kind::InverseReport,
        Kind::ElasticityWitness,
        Kind::LemmaReport,
        Kind::Checkpoint,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Atom => "atom",
            Kind::NonAtom => "non_atom",
            Kind::DavenportSmall => "davenport_small",
            Kind::InverseReport => "inverse_report",
            Kind::ElasticityWitness => "elasticity_witness",
            Kind::LemmaReport => "lemma_report",
            Kind::Checkpoint => "checkpoint",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::format(format!("unknown kind {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub kind: Kind,
    pub group: GroupParams,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub payload: Value,
    pub elapsed_ms: Option<u64>,
    /// As recorded; compare with [`Certificate::compute_digest`].
    pub digest: String,
}

impl Certificate {
    pub fn new(kind: Kind, group: GroupParams, seed: Option<u64>, payload: Value) -> Self {
        let mut cert = Certificate {
            kind,
            group,
            seed,
            tool_version: TOOL_VERSION.to_string(),
            payload,
            elapsed_ms: None,
            digest: String::new(),
        };
        cert.digest = cert.compute_digest();
        cert
    }

    pub fn with_elapsed(mut self, ms: u64) -> Self {
        self.elapsed_ms = Some(ms);
        self
    }

    fn body(&self) -> Map<String, Value> {
        let mut body = Map::new();
        body.insert("schema".into(), json!(SCHEMA));
        body.insert("kind".into(), json!(self.kind.as_str()));
        body.insert("group".into(), json!(self.group.to_string()));
        body.insert("seed".into(), json!(self.seed));
        body.insert("tool_version".into(), json!(self.tool_version));
        body.insert("payload".into(), self.payload.clone());
        body
    }

    pub fn compute_digest(&self) -> String {
        let canonical = serde_json::to_string(&Value::Object(self.body())).expect("JSON values serialize");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn digest_ok(&self) -> bool {
        self.digest == self.compute_digest()
    }

    pub fn to_value(&self) -> Value {
        let mut body = self.body();
        body.insert("digest".into(), json!(self.digest));
        body.insert("timing".into(), json!({ "elapsed_ms": self.elapsed_ms }));
        Value::Object(body)
    }

    pub fn to_pretty(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_value()).expect("JSON values serialize");
        text.push('\n');
        text
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::format("top level is not an object"))?;
        let field = |name: &str| {
            obj.get(name)
                .ok_or_else(|| Error::format(format!("missing field {name:?}")))
        };
        let text = |name: &str| -> Result<String> {
            field(name)?
                .as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::format(format!("field {name:?} is not a string")))
        };
        let schema = text("schema")?;
        if schema != SCHEMA {
            return Err(Error::format(format!("unsupported schema {schema:?}")));
        }
        let seed = match field("seed")? {
            Value::Null => None,
            v => Some(v.as_u64().ok_or_else(|| Error::format("seed is not an integer"))?),
        };
        let elapsed_ms = obj
            .get("timing")
            .and_then(|t| t.get("elapsed_ms"))
            .and_then(Value::as_u64);
        Ok(Certificate {
            kind: text("kind")?.parse()?,
            group: text("group")?.parse()?,
            seed,
            tool_version: text("tool_version")?,
            payload: field("payload")?.clone(),
            elapsed_ms,
            digest: text("digest")?,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_value(&serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Writes through a temporary file and a rename, so readers never see a partial certificate.
    pub fn write(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_pretty()).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_ignores_timing_only() {
        let g = GroupParams::new(3, 7, 2);
        let a = Certificate::new(Kind::Atom, g, None, json!({"sequence": "(0,1)^7"}));
        let b = a.clone().with_elapsed(1234);
        assert_eq!(a.digest, b.digest);
        assert!(b.digest_ok());
        let back = Certificate::parse(&b.to_pretty()).unwrap();
        assert_eq!(back, b);
        let mut c = a.clone();
        c.seed = Some(1);
        assert!(!c.digest_ok());
    }

    #[test]
    fn keys_are_sorted() {
        let g = GroupParams::new(3, 7, 2);
        let cert = Certificate::new(Kind::Atom, g, Some(5), json!({"z": 1, "a": 2}));
        let text = cert.to_pretty();
        let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("digest") < pos("group") && pos("group") < pos("kind") && pos("kind") < pos("payload"));
        assert!(pos("a") < pos("z"));
    }
}
