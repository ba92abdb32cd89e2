//! The delegation warrant `m_w` and its canonical text form.
//!
//! The warrant names the original signer, the proxy group (whose order fixes
//! the party indices `1..=n`), the threshold, the verifier binding
//! `X = Q_IDB * Q_IDC` and free-form terms. Its canonical bytes are what
//! gets signed and hashed.

use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::error::{Error, Result};

const HEADER: &str = "tproxy-warrant v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warrant {
    pub original_signer: String,
    pub proxies: Vec<String>,
    pub threshold: usize,
    /// `X = Q_IDB * Q_IDC mod q`.
    pub verifier_binding: BigUint,
    pub terms: String,
}

impl Warrant {
    pub fn new(
        original_signer: impl Into<String>,
        proxies: Vec<String>,
        threshold: usize,
        verifier_binding: BigUint,
        terms: impl Into<String>,
    ) -> Result<Self> {
        let w = Warrant {
            original_signer: original_signer.into(),
            proxies,
            threshold,
            verifier_binding,
            terms: terms.into(),
        };
        w.validate()?;
        Ok(w)
    }

    pub fn group_size(&self) -> usize {
        self.proxies.len()
    }

    fn validate(&self) -> Result<()> {
        let single_line = |s: &str| !s.contains('\n') && !s.contains('\r');
        if self.original_signer.is_empty() || !single_line(&self.original_signer) {
            return Err(Error::MalformedWarrant("original signer must be a nonempty single line".into()));
        }
        if self.proxies.is_empty() {
            return Err(Error::MalformedWarrant("no proxy signers".into()));
        }
        for (i, p) in self.proxies.iter().enumerate() {
            if p.is_empty() || !single_line(p) {
                return Err(Error::MalformedWarrant(format!("proxy {} has an invalid identity", i + 1)));
            }
            if self.proxies[..i].contains(p) {
                return Err(Error::MalformedWarrant(format!("proxy {p} listed twice")));
            }
        }
        if self.threshold == 0 || self.threshold > self.proxies.len() {
            return Err(Error::InvalidThreshold { t: self.threshold, n: self.proxies.len() });
        }
        if !single_line(&self.terms) {
            return Err(Error::MalformedWarrant("terms must be a single line".into()));
        }
        Ok(())
    }

    /// Canonical encoding; this is `m_w`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = String::new();
        writeln!(out, "{HEADER}").unwrap();
        writeln!(out, "original-signer: {}", self.original_signer).unwrap();
        writeln!(out, "threshold: {}", self.threshold).unwrap();
        for p in &self.proxies {
            writeln!(out, "proxy: {p}").unwrap();
        }
        writeln!(out, "verifier-binding: {}", self.verifier_binding.to_str_radix(16)).unwrap();
        writeln!(out, "terms: {}", self.terms).unwrap();
        out.into_bytes()
    }

    /// Parses canonical bytes; anything that does not re-encode to the same
    /// bytes is rejected.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::MalformedWarrant(msg.to_string());
        let text = std::str::from_utf8(bytes).map_err(|_| bad("not utf-8"))?;
        let lines: Vec<&str> = text.lines().collect();
        let field = |idx: usize, key: &str| -> Result<&str> {
            lines
                .get(idx)
                .and_then(|l| l.strip_prefix(key))
                .and_then(|rest| rest.strip_prefix(": "))
                .ok_or_else(|| Error::MalformedWarrant(format!("expected {key} on line {}", idx + 1)))
        };
        if lines.first() != Some(&HEADER) {
            return Err(bad("missing header"));
        }
        let original_signer = field(1, "original-signer")?;
        let threshold = field(2, "threshold")?.parse().map_err(|_| bad("threshold"))?;
        let mut idx = 3;
        let mut proxies = Vec::new();
        while let Ok(p) = field(idx, "proxy") {
            proxies.push(p.to_string());
            idx += 1;
        }
        let binding = field(idx, "verifier-binding")?;
        let verifier_binding = BigUint::parse_bytes(binding.as_bytes(), 16).ok_or_else(|| bad("verifier-binding"))?;
        let terms = field(idx + 1, "terms")?;
        let w = Warrant::new(original_signer, proxies, threshold, verifier_binding, terms)?;
        if w.to_bytes() != bytes {
            return Err(bad("non-canonical encoding"));
        }
        Ok(w)
    }
}
