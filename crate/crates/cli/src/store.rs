//! Loading and saving protocol objects as artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use tproxy_core::arith::Scalar;
use tproxy_core::idkgc::{Identity, KeyPair, SystemParams};
use tproxy_core::pairing::{AnySuite, Pairing, SuiteParams};
use tproxy_core::thsign::AggregateSignature;

use crate::artifact::{Artifact, Kind};
use crate::Failure;

pub fn read_artifact(path: &Path) -> Result<Artifact, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    Artifact::parse(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path, kind: Kind) -> Result<Artifact, Failure> {
    read_artifact(path)?.expect_kind(kind).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Writes `artifact` to `path`, or to stdout for `-`.
pub fn save(path: &Path, artifact: &Artifact, json: bool, insecure: bool) -> Result<(), Failure> {
    if artifact.kind.is_secret() && !insecure {
        return Err(Failure::usage(format!(
            "refusing to write {} artifact without --insecure-write",
            artifact.kind
        )));
    }
    let body = artifact.encode(json);
    if path == Path::new("-") {
        print!("{body}");
        return Ok(());
    }
    fs::write(path, body).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

pub fn params_artifact<S: Pairing>(params: &SystemParams<S>) -> Artifact {
    let mut a = Artifact::new(Kind::Params);
    for line in params.suite.params().to_text().lines() {
        let (k, v) = line.split_once('=').expect("suite text is key = value");
        a.push(k.trim(), v.trim());
    }
    a.push_hex("p_pub", &params.suite.g1_to_bytes(&params.p_pub));
    a
}

/// The suite plus the encoded `P_pub`; decode the latter with
/// [`finish_params`] once the concrete suite is known.
pub fn load_params(path: &Path) -> Result<(AnySuite, Vec<u8>), Failure> {
    let a = load(path, Kind::Params)?;
    let text: String = a
        .fields()
        .iter()
        .filter(|(k, _)| k != "p_pub")
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect();
    let suite_params: SuiteParams = text.parse().map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let suite = suite_params.build().map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    Ok((suite, a.get_hex("p_pub").map_err(Failure::usage)?))
}

pub fn finish_params<S: Pairing>(suite: S, p_pub: &[u8]) -> Result<SystemParams<S>, Failure> {
    let p_pub = suite.g1_from_bytes(p_pub).map_err(|e| Failure::usage(format!("P_pub: {e}")))?;
    Ok(SystemParams::new(suite, p_pub))
}

pub fn g1<S: Pairing>(suite: &S, a: &Artifact, key: &str) -> Result<S::G1, String> {
    suite.g1_from_bytes(&a.get_hex(key)?).map_err(|e| format!("{key}: {e}"))
}

pub fn scalar<S: Pairing>(suite: &S, a: &Artifact, key: &str) -> Result<Scalar, String> {
    suite.scalars().from_bytes(&a.get_hex(key)?).ok_or_else(|| format!("{key} is not a scalar"))
}

pub fn keypair_artifact<S: Pairing>(params: &SystemParams<S>, kp: &KeyPair<S>) -> Artifact {
    let suite = &params.suite;
    let mut a = Artifact::new(Kind::KeyPair);
    a.push_hex("identity", kp.identity.as_bytes());
    a.push_hex("q_id", &suite.scalars().to_bytes(&kp.public));
    a.push_hex("s_id", &suite.g1_to_bytes(&kp.secret));
    a
}

pub fn load_keypair<S: Pairing>(params: &SystemParams<S>, path: &Path) -> Result<KeyPair<S>, Failure> {
    let a = load(path, Kind::KeyPair)?;
    let bad = |e: String| Failure::usage(format!("{}: {e}", path.display()));
    let identity = Identity::new(a.get_hex("identity").map_err(bad)?).map_err(|e| bad(e.to_string()))?;
    let kp = KeyPair {
        identity,
        public: scalar(&params.suite, &a, "q_id").map_err(bad)?,
        secret: g1(&params.suite, &a, "s_id").map_err(bad)?,
    };
    if !kp.is_consistent(params) {
        return Err(bad("key pair does not belong to these system parameters".into()));
    }
    Ok(kp)
}

pub fn signature_artifact<S: Pairing>(suite: &S, sigma: &AggregateSignature<S>) -> Artifact {
    let mut a = Artifact::new(Kind::Signature);
    a.push_hex("message", &sigma.message);
    a.push_hex("warrant", &sigma.warrant);
    a.push_hex("v_w", &suite.g1_to_bytes(&sigma.v_w));
    a.push_hex("u", &suite.g1_to_bytes(&sigma.u));
    a.push_hex("v", &suite.g1_to_bytes(&sigma.v));
    a.push("participants", join_indices(&sigma.participants));
    a.push("n", sigma.n.to_string());
    a
}

pub fn parse_signature<S: Pairing>(suite: &S, a: &Artifact) -> Result<AggregateSignature<S>, String> {
    if a.kind != Kind::Signature {
        return Err(format!("expected a signature artifact, found {}", a.kind));
    }
    Ok(AggregateSignature {
        message: a.get_hex("message")?,
        warrant: a.get_hex("warrant")?,
        v_w: g1(suite, a, "v_w")?,
        u: g1(suite, a, "u")?,
        v: g1(suite, a, "v")?,
        participants: parse_indices(a.get("participants")?)?,
        n: a.get_usize("n")?,
    })
}

pub fn join_indices(indices: &[usize]) -> String {
    indices.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

pub fn parse_indices(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad index list {s:?}")))
        .collect()
}

/// Write-once public registry kept as a single artifact file.
pub struct RegistryFile {
    artifact: Artifact,
}

impl RegistryFile {
    /// Loads `path`, or starts an empty registry if it does not exist.
    pub fn open(path: &Path) -> Result<Self, Failure> {
        if path.exists() {
            Ok(Self { artifact: load(path, Kind::Registry)? })
        } else {
            Ok(Self { artifact: Artifact::new(Kind::Registry) })
        }
    }

    pub fn publish(&mut self, key: String, value: &[u8]) -> Result<(), Failure> {
        if self.artifact.get(&key).is_ok() {
            return Err(Failure::usage(format!("registry already holds {key}")));
        }
        self.artifact.push_hex(key, value);
        Ok(())
    }

    pub fn save(&self, path: &Path, json: bool) -> Result<(), Failure> {
        save(path, &self.artifact, json, false)
    }

    pub fn bytes(&self, key: &str) -> Result<Vec<u8>, Failure> {
        self.artifact.get_hex(key).map_err(|_| Failure::usage(format!("registry has no {key}")))
    }

    /// Entries `<prefix><index>`, keyed by index.
    pub fn indexed(&self, prefix: &str) -> Result<BTreeMap<usize, Vec<u8>>, Failure> {
        let mut out = BTreeMap::new();
        for (rest, v) in self.artifact.with_prefix(prefix) {
            if let Ok(i) = rest.parse::<usize>() {
                out.insert(i, hex::decode(v).map_err(|e| Failure::usage(format!("registry {prefix}{rest}: {e}")))?);
            }
        }
        Ok(out)
    }

    /// `<prefix><dealer>/0 ..` up to the first gap.
    pub fn sequence(&self, prefix: &str, start: usize) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        for l in start.. {
            match self.artifact.get_hex(&format!("{prefix}{l}")) {
                Ok(v) => out.push(v),
                Err(_) => break,
            }
        }
        out
    }
}
