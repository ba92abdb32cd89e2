use std::fmt;

use serde::Serialize;

use crate::transcript::{Event, PartyId, Payload, SecretKind, Transcript};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub party: PartyId,
    pub secret: SecretKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} held {}", self.party, self.secret)
    }
}

/// Lists every party that held, or was sent, a secret it is not entitled to.
///
/// This covers the master key staying at the KGC, Alice never seeing any
/// signer's identity key, `r_i` or `SK_Pi`, and each `r_i` and `SK_Pi`
/// staying with party `i`.
pub fn confinement_audit(transcript: &Transcript) -> Vec<Violation> {
    let mut out = Vec::new();
    for e in &transcript.events {
        let (party, secret) = match e {
            Event::Hold { party, secret } => (*party, *secret),
            Event::Send { to, payload: Payload::Secret(secret), .. } => (*to, *secret),
            _ => continue,
        };
        let v = Violation { party, secret };
        if !secret.allowed_holders().contains(&party) && !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_only_unentitled_holders() {
        let mut t = Transcript::default();
        t.push(Event::Hold { party: PartyId::Kgc, secret: SecretKind::MasterKey });
        t.push(Event::Hold { party: PartyId::Proxy(2), secret: SecretKind::VssSubShare { dealer: 1, recipient: 2 } });
        t.push(Event::Hold { party: PartyId::Bob, secret: SecretKind::IdentityKey { of: PartyId::Bob } });
        assert!(confinement_audit(&t).is_empty());

        t.push(Event::Hold { party: PartyId::Alice, secret: SecretKind::ProxyKeyShare { holder: 1 } });
        t.push(Event::Hold { party: PartyId::Alice, secret: SecretKind::ProxyKeyShare { holder: 1 } });
        t.push(Event::Hold { party: PartyId::Proxy(1), secret: SecretKind::MasterKey });
        let v = confinement_audit(&t);
        assert_eq!(
            v,
            vec![
                Violation { party: PartyId::Alice, secret: SecretKind::ProxyKeyShare { holder: 1 } },
                Violation { party: PartyId::Proxy(1), secret: SecretKind::MasterKey },
            ]
        );
        assert_eq!(v[0].to_string(), "alice held SK_P1");
    }
}
