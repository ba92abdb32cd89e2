//! On-disk artifacts: a kind tag, a format version and an ordered list of
//! `key = value` fields. Text is the default encoding; JSON is accepted and
//! detected by a leading `{`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Params,
    MasterKey,
    KeyPair,
    Warrant,
    Delegation,
    Registry,
    SubShare,
    Share,
    Signature,
    Report,
}

impl Kind {
    const ALL: [Kind; 10] = [
        Kind::Params,
        Kind::MasterKey,
        Kind::KeyPair,
        Kind::Warrant,
        Kind::Delegation,
        Kind::Registry,
        Kind::SubShare,
        Kind::Share,
        Kind::Signature,
        Kind::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Params => "params",
            Kind::MasterKey => "master-key",
            Kind::KeyPair => "key-pair",
            Kind::Warrant => "warrant",
            Kind::Delegation => "delegation",
            Kind::Registry => "registry",
            Kind::SubShare => "sub-share",
            Kind::Share => "share",
            Kind::Signature => "signature",
            Kind::Report => "report",
        }
    }

    /// Artifacts of these kinds carry secret material.
    pub fn is_secret(self) -> bool {
        matches!(self, Kind::MasterKey | Kind::KeyPair | Kind::SubShare | Kind::Share)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown artifact kind {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub kind: Kind,
    fields: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonArtifact {
    kind: Kind,
    version: u32,
    fields: Vec<(String, String)>,
}

fn valid_key(k: &str) -> bool {
    !k.is_empty()
        && k != "kind"
        && k != "version"
        && k.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '/' | '.'))
}

impl Artifact {
    pub fn new(kind: Kind) -> Self {
        Self { kind, fields: Vec::new() }
    }

    /// Appends a field. Keys are restricted to `[A-Za-z0-9_./-]` and values
    /// must fit on one line.
    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let (key, value) = (key.into(), value.into());
        assert!(valid_key(&key), "bad artifact key {key:?}");
        assert!(!value.contains(['\n', '\r']), "artifact value for {key} spans lines");
        self.fields.push((key, value));
    }

    pub fn push_hex(&mut self, key: impl Into<String>, bytes: &[u8]) {
        self.push(key, hex::encode(bytes));
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    pub fn get(&self, key: &str) -> Result<&str, String> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| format!("{} artifact has no field {key:?}", self.kind))
    }

    pub fn get_hex(&self, key: &str) -> Result<Vec<u8>, String> {
        hex::decode(self.get(key)?).map_err(|e| format!("field {key:?} is not hex: {e}"))
    }

    pub fn get_usize(&self, key: &str) -> Result<usize, String> {
        self.get(key)?.parse().map_err(|_| format!("field {key:?} is not an integer"))
    }

    /// Fields whose key starts with `prefix`, with the prefix removed.
    pub fn with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a str)> + 'a {
        self.fields
            .iter()
            .filter_map(move |(k, v)| k.strip_prefix(prefix).map(|rest| (rest, v.as_str())))
    }

    pub fn expect_kind(self, kind: Kind) -> Result<Self, String> {
        if self.kind == kind {
            Ok(self)
        } else {
            Err(format!("expected a {kind} artifact, found {}", self.kind))
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("kind = {}\nversion = {VERSION}\n", self.kind);
        for (k, v) in &self.fields {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = JsonArtifact { kind: self.kind, version: VERSION, fields: self.fields.clone() };
        let mut s = serde_json::to_string_pretty(&doc).expect("artifact serializes");
        s.push('\n');
        s
    }

    pub fn encode(&self, json: bool) -> String {
        if json {
            self.to_json()
        } else {
            self.to_text()
        }
    }

    /// Parses either encoding.
    pub fn parse(input: &str) -> Result<Self, String> {
        if input.trim_start().starts_with('{') {
            Self::parse_json(input)
        } else {
            Self::parse_text(input)
        }
    }

    fn parse_json(input: &str) -> Result<Self, String> {
        let doc: JsonArtifact = serde_json::from_str(input).map_err(|e| format!("bad JSON artifact: {e}"))?;
        check_version(doc.version)?;
        let mut a = Artifact::new(doc.kind);
        for (k, v) in doc.fields {
            if !valid_key(&k) || v.contains(['\n', '\r']) {
                return Err(format!("bad field {k:?}"));
            }
            a.fields.push((k, v));
        }
        Ok(a)
    }

    fn parse_text(input: &str) -> Result<Self, String> {
        let mut lines = input
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.split_once('=')
                    .map(|(k, v)| (k.trim(), v.trim()))
                    .ok_or_else(|| format!("expected key = value, got {l:?}"))
            });
        let kind = match lines.next() {
            Some(Ok(("kind", v))) => v.parse::<Kind>()?,
            _ => return Err("artifact must start with a kind line".into()),
        };
        match lines.next() {
            Some(Ok(("version", v))) => check_version(v.parse().map_err(|_| format!("bad version {v:?}"))?)?,
            _ => return Err("artifact has no version line".into()),
        }
        let mut a = Artifact::new(kind);
        for line in lines {
            let (k, v) = line?;
            if !valid_key(k) {
                return Err(format!("bad field name {k:?}"));
            }
            a.fields.push((k.to_string(), v.to_string()));
        }
        Ok(a)
    }
}

fn check_version(v: u32) -> Result<(), String> {
    if v == VERSION {
        Ok(())
    } else {
        Err(format!("unsupported artifact version {v}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Artifact {
        let mut a = Artifact::new(Kind::Delegation);
        a.push_hex("u_w", &[1, 2, 3]);
        a.push("note", "two words");
        a
    }

    #[test]
    fn text_and_json_round_trip() {
        let a = sample();
        assert_eq!(Artifact::parse(&a.to_text()).unwrap(), a);
        assert_eq!(Artifact::parse(&a.to_json()).unwrap(), a);
        assert_eq!(a.get_hex("u_w").unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn unknown_versions_and_kinds_are_rejected() {
        let text = sample().to_text();
        assert!(Artifact::parse(&text.replace("version = 1", "version = 2")).is_err());
        assert!(Artifact::parse(&text.replace("delegation", "grimoire")).is_err());
        assert!(Artifact::parse(&sample().to_json().replace("\"version\": 1", "\"version\": 9")).is_err());
    }

    #[test]
    fn secrecy_by_kind() {
        assert!(Kind::KeyPair.is_secret());
        assert!(!Kind::Signature.is_secret());
    }
}
