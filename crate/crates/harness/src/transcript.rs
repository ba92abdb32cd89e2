use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A participant in the simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PartyId {
    Kgc,
    Alice,
    Proxy(usize),
    Bob,
    Cindy,
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartyId::Kgc => f.write_str("kgc"),
            PartyId::Alice => f.write_str("alice"),
            PartyId::Proxy(i) => write!(f, "proxy-{i}"),
            PartyId::Bob => f.write_str("bob"),
            PartyId::Cindy => f.write_str("cindy"),
        }
    }
}

impl FromStr for PartyId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "kgc" => PartyId::Kgc,
            "alice" => PartyId::Alice,
            "bob" => PartyId::Bob,
            "cindy" => PartyId::Cindy,
            other => {
                let i = other
                    .strip_prefix("proxy-")
                    .and_then(|i| i.parse().ok())
                    .filter(|&i| i > 0)
                    .ok_or_else(|| format!("unknown party {other:?}"))?;
                PartyId::Proxy(i)
            }
        })
    }
}

impl Serialize for PartyId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PartyId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Setup,
    KeyGeneration,
    SecretShares,
    ProxyShares,
    Signing,
    Verification,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Setup,
        Stage::KeyGeneration,
        Stage::SecretShares,
        Stage::ProxyShares,
        Stage::Signing,
        Stage::Verification,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Stage::Setup => "setup",
            Stage::KeyGeneration => "key-generation",
            Stage::SecretShares => "secret-shares",
            Stage::ProxyShares => "proxy-shares",
            Stage::Signing => "signing",
            Stage::Verification => "verification",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Secret values tracked by the confinement audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SecretKind {
    /// `s`.
    MasterKey,
    /// `S_ID` of a party.
    IdentityKey { of: PartyId },
    /// `f_i`.
    VssPolynomial { dealer: usize },
    /// `f_i(j)`.
    VssSubShare { dealer: usize, recipient: usize },
    /// `r_i`.
    SecretShare { holder: usize },
    /// `r_w`.
    WarrantNonce,
    /// `S_i`.
    ProxySecret { owner: usize },
    /// `g_i`.
    ProxyPolynomial { dealer: usize },
    /// `g_i(j)`.
    ProxySubShare { dealer: usize, recipient: usize },
    /// `SK_Pi`.
    ProxyKeyShare { holder: usize },
}

impl SecretKind {
    /// Parties entitled to hold this value.
    pub fn allowed_holders(self) -> Vec<PartyId> {
        use SecretKind::*;
        match self {
            MasterKey => vec![PartyId::Kgc],
            IdentityKey { of } => vec![PartyId::Kgc, of],
            VssPolynomial { dealer } | ProxyPolynomial { dealer } => vec![PartyId::Proxy(dealer)],
            VssSubShare { dealer, recipient } | ProxySubShare { dealer, recipient } => {
                vec![PartyId::Proxy(dealer), PartyId::Proxy(recipient)]
            }
            SecretShare { holder } | ProxyKeyShare { holder } => vec![PartyId::Proxy(holder)],
            ProxySecret { owner } => vec![PartyId::Proxy(owner)],
            WarrantNonce => vec![PartyId::Alice],
        }
    }
}

impl fmt::Display for SecretKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SecretKind::*;
        match self {
            MasterKey => f.write_str("s"),
            IdentityKey { of } => write!(f, "S_ID({of})"),
            VssPolynomial { dealer } => write!(f, "f_{dealer}"),
            VssSubShare { dealer, recipient } => write!(f, "f_{dealer}({recipient})"),
            SecretShare { holder } => write!(f, "r_{holder}"),
            WarrantNonce => f.write_str("r_w"),
            ProxySecret { owner } => write!(f, "S_{owner}"),
            ProxyPolynomial { dealer } => write!(f, "g_{dealer}"),
            ProxySubShare { dealer, recipient } => write!(f, "g_{dealer}({recipient})"),
            ProxyKeyShare { holder } => write!(f, "SK_P{holder}"),
        }
    }
}

/// Message body as it appears in the log: public values in hex, secrets by
/// kind only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Payload {
    Public(String),
    Secret(SecretKind),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum Event {
    Stage { stage: Stage },
    Publish { stage: Stage, party: PartyId, label: String, value: String },
    Send { stage: Stage, from: PartyId, to: PartyId, label: String, payload: Payload },
    Hold { party: PartyId, secret: SecretKind },
    Check { stage: Stage, party: PartyId, check: String, subject: String, ok: bool },
    Abort { stage: Stage, culprit: Option<PartyId>, reason: String },
    Signature { participants: Vec<usize>, n: usize, u: String, v: String, v_w: String },
    Decision { verifier: PartyId, accept: bool, reason: Option<String> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub events: Vec<Event>,
}

impl Transcript {
    pub fn push(&mut self, event: Event) {
        self.events.push(event);
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let events = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?;
        Ok(Transcript { events })
    }

    pub fn abort(&self) -> Option<(Stage, Option<PartyId>, &str)> {
        self.events.iter().find_map(|e| match e {
            Event::Abort { stage, culprit, reason } => Some((*stage, *culprit, reason.as_str())),
            _ => None,
        })
    }

    /// `(verifier, accept, reason)` in the order they were reached.
    pub fn decisions(&self) -> Vec<(PartyId, bool, Option<&str>)> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::Decision { verifier, accept, reason } => Some((*verifier, *accept, reason.as_deref())),
                _ => None,
            })
            .collect()
    }

    pub fn decision_of(&self, verifier: PartyId) -> Option<bool> {
        self.decisions().into_iter().find(|d| d.0 == verifier).map(|d| d.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn party_names_round_trip() {
        for p in [PartyId::Kgc, PartyId::Alice, PartyId::Proxy(12), PartyId::Bob, PartyId::Cindy] {
            assert_eq!(p.to_string().parse::<PartyId>().unwrap(), p);
        }
        assert!("proxy-0".parse::<PartyId>().is_err());
        assert!("mallory".parse::<PartyId>().is_err());
    }

    #[test]
    fn jsonl_round_trip() {
        let mut t = Transcript::default();
        t.push(Event::Stage { stage: Stage::Setup });
        t.push(Event::Send {
            stage: Stage::SecretShares,
            from: PartyId::Proxy(1),
            to: PartyId::Proxy(2),
            label: "f_1(2)".into(),
            payload: Payload::Secret(SecretKind::VssSubShare { dealer: 1, recipient: 2 }),
        });
        t.push(Event::Decision { verifier: PartyId::Bob, accept: false, reason: Some("u-mismatch".into()) });
        let text = t.to_jsonl();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(1).unwrap().contains(r#""to":"proxy-2""#));
        assert_eq!(Transcript::from_jsonl(&text).unwrap(), t);
    }
}
