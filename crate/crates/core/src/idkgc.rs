//! Key generating center: master key setup, the hash family `H1`/`H2`/`H3`
//! and identity-based key extraction.
//!
//! An identity's public key is the scalar `Q_ID = H1(ID)` and its secret key
//! is the `G1` element `S_ID = s^-1 * Q_ID * P`, so every extracted key
//! satisfies `e(P_pub, S_ID) = e(P, P)^Q_ID`.

use std::fmt;

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use crate::arith::Scalar;
use crate::error::{Error, Result};
use crate::pairing::Pairing;
use crate::rng::derive_rng;

/// Name of the digest behind every hash in the family.
pub const HASH_DIGEST: &str = "sha256";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HashTag {
    /// `{0,1}* -> Z_q*`
    H1,
    /// `{0,1}* x G1 -> Z_q*`
    H2,
    /// `{0,1}* x G1 x G2 -> Z_q*`
    H3,
}

impl HashTag {
    fn domain(self) -> &'static [u8] {
        match self {
            HashTag::H1 => b"tproxy/H1",
            HashTag::H2 => b"tproxy/H2",
            HashTag::H3 => b"tproxy/H3",
        }
    }

    fn name(self) -> &'static str {
        match self {
            HashTag::H1 => "H1",
            HashTag::H2 => "H2",
            HashTag::H3 => "H3",
        }
    }
}

pub enum HashInput<'a, S: Pairing> {
    Bytes(&'a [u8]),
    G1(&'a S::G1),
    G2(&'a S::G2),
}

/// Public system parameters `(q, G1, G2, e, P, P_pub, H1, H2, H3)`.
#[derive(Clone, Debug)]
pub struct SystemParams<S: Pairing> {
    pub suite: S,
    pub p_pub: S::G1,
}

impl<S: Pairing> SystemParams<S> {
    /// Rebuilds parameters from a published `P_pub`.
    pub fn new(suite: S, p_pub: S::G1) -> Self {
        Self { suite, p_pub }
    }

    /// `e(P, P)`.
    pub fn gt_base(&self) -> S::G2 {
        let p = self.suite.generator();
        self.suite.pair(&p, &p)
    }

    /// Domain-separated hash into `[1, q)`.
    ///
    /// The digest runs over the tag and each input length-prefixed (group
    /// elements in canonical encoding), followed by a counter byte; the
    /// counter is bumped while the reduced output is zero.
    pub fn hash_to_scalar(&self, tag: HashTag, inputs: &[HashInput<'_, S>]) -> Result<Scalar> {
        let arity_ok = match (tag, inputs) {
            (HashTag::H1, [HashInput::Bytes(_)]) => true,
            (HashTag::H2, [HashInput::Bytes(_), HashInput::G1(_)]) => true,
            (HashTag::H3, [HashInput::Bytes(_), HashInput::G1(_), HashInput::G2(_)]) => true,
            _ => false,
        };
        if !arity_ok {
            let expected = match tag {
                HashTag::H1 => "one byte string",
                HashTag::H2 => "a byte string and a G1 element",
                HashTag::H3 => "a byte string, a G1 element and a G2 element",
            };
            return Err(Error::HashArity { tag: tag.name(), expected });
        }
        let encoded: Vec<Vec<u8>> = inputs
            .iter()
            .map(|input| match input {
                HashInput::Bytes(b) => b.to_vec(),
                HashInput::G1(x) => self.suite.g1_to_bytes(x),
                HashInput::G2(z) => self.suite.g2_to_bytes(z),
            })
            .collect();
        let zq = self.suite.scalars();
        // 16 extra bytes keep the reduction bias below 2^-128.
        let want = zq.byte_width() + 16;
        for counter in 0u8..=u8::MAX {
            let mut wide = Vec::with_capacity(want + 32);
            let mut block = 0u32;
            while wide.len() < want {
                let mut h = Sha256::new();
                h.update((tag.domain().len() as u64).to_be_bytes());
                h.update(tag.domain());
                for part in &encoded {
                    h.update((part.len() as u64).to_be_bytes());
                    h.update(part);
                }
                h.update([counter]);
                h.update(block.to_be_bytes());
                wide.extend_from_slice(&h.finalize());
                block += 1;
            }
            let s = zq.reduce(&BigUint::from_bytes_be(&wide));
            if !s.is_zero() {
                return Ok(s);
            }
        }
        unreachable!("256 consecutive zero hash outputs")
    }

    pub fn h1(&self, identity: &[u8]) -> Scalar {
        self.hash_to_scalar(HashTag::H1, &[HashInput::Bytes(identity)])
            .expect("arity is correct")
    }

    pub fn h2(&self, msg: &[u8], u: &S::G1) -> Scalar {
        self.hash_to_scalar(HashTag::H2, &[HashInput::Bytes(msg), HashInput::G1(u)])
            .expect("arity is correct")
    }

    pub fn h3(&self, msg: &[u8], u: &S::G1, y: &S::G2) -> Scalar {
        self.hash_to_scalar(HashTag::H3, &[HashInput::Bytes(msg), HashInput::G1(u), HashInput::G2(y)])
            .expect("arity is correct")
    }
}

/// The KGC's secret `s` with its inverse.
#[derive(Clone, PartialEq, Eq)]
pub struct MasterKey {
    s: Scalar,
    s_inv: Scalar,
}

impl MasterKey {
    pub fn secret(&self) -> &Scalar {
        &self.s
    }

    pub fn inverse(&self) -> &Scalar {
        &self.s_inv
    }
}

impl fmt::Debug for MasterKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MasterKey(..)")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Identity(Vec<u8>);

impl Identity {
    pub fn new(id: impl Into<Vec<u8>>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::EmptyIdentity);
        }
        Ok(Identity(id))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.0))
    }
}

/// `(ID, Q_ID, S_ID)`.
#[derive(Clone, PartialEq, Eq)]
pub struct KeyPair<S: Pairing> {
    pub identity: Identity,
    pub public: Scalar,
    pub secret: S::G1,
}

impl<S: Pairing> fmt::Debug for KeyPair<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KeyPair")
            .field("identity", &self.identity)
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

impl<S: Pairing> KeyPair<S> {
    /// `e(P_pub, S_ID) == e(P, P)^Q_ID`.
    pub fn is_consistent(&self, params: &SystemParams<S>) -> bool {
        let lhs = params.suite.pair(&params.p_pub, &self.secret);
        lhs == params.suite.g2_pow(&params.gt_base(), &self.public)
    }
}

/// Draws `s` uniformly from `[1, q)` using a stream keyed by `seed`.
pub fn setup<S: Pairing>(suite: S, seed: &[u8]) -> Result<(SystemParams<S>, MasterKey)> {
    if seed.is_empty() {
        return Err(Error::EmptySeed);
    }
    let mut rng = derive_rng("setup", &[seed]);
    let s = suite.scalars().sample_nonzero(&mut rng);
    setup_with_master(suite, s)
}

pub fn setup_with_master<S: Pairing>(suite: S, s: Scalar) -> Result<(SystemParams<S>, MasterKey)> {
    let s_inv = suite.scalars().inv(&s).ok_or(Error::ZeroScalar("master key"))?;
    let p_pub = suite.mul_gen(&s);
    Ok((SystemParams { suite, p_pub }, MasterKey { s, s_inv }))
}

/// `Q_ID = H1(ID)`, `S_ID = s^-1 * Q_ID * P`.
pub fn extract<S: Pairing>(params: &SystemParams<S>, master: &MasterKey, identity: &Identity) -> KeyPair<S> {
    let q_id = params.h1(identity.as_bytes());
    extract_with_public(params, master, identity, q_id)
}

/// [`extract`] with `Q_ID` supplied instead of hashed.
pub fn extract_with_public<S: Pairing>(
    params: &SystemParams<S>,
    master: &MasterKey,
    identity: &Identity,
    q_id: Scalar,
) -> KeyPair<S> {
    let zq = params.suite.scalars();
    let k = zq.mul(&master.s_inv, &q_id);
    KeyPair {
        identity: identity.clone(),
        secret: params.suite.mul_gen(&k),
        public: q_id,
    }
}
