//! Verification by either designated verifier.
//!
//! A verifier holding `(Q_self, S_self)` recovers `Q_peer = Q_self^-1 * X`,
//! recomputes `Y* = e(Q_peer * S_self, sum_{i in D} eta_i Q_IDPi U_i)`, derives
//! `H = H3(m, U, Y*)` and accepts iff
//! `e(P_pub, V) = e(P_pub, U + n*H*V_w) * e(P, (sum_k Q_IDPk) * P)^H`.
//! Since `Q_IDC * S_IDB = s^-1 X P = Q_IDB * S_IDC`, Bob and Cindy reach the
//! same `Y*`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;

use crate::arith::{Scalar, ScalarField};
use crate::error::{Error, Result};
use crate::idkgc::{KeyPair, SystemParams};
use crate::pairing::Pairing;
use crate::thsign::{lagrange_at_zero, AggregateSignature, LagrangeCoeffs, SignerSet};
use crate::warrant::Warrant;

/// `Q_peer = Q_self^-1 * X mod q`.
pub fn recover_peer(zq: &ScalarField, q_self: &Scalar, x: &Scalar) -> Result<Scalar> {
    let inv = zq.inv(q_self).ok_or(Error::ZeroScalar("verifier public key"))?;
    Ok(zq.mul(&inv, x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RejectReason {
    UMismatch,
    RegistryMissing,
    PairingInequality,
    MalformedParticipants,
    WarrantMismatch,
}

impl RejectReason {
    pub fn tag(self) -> &'static str {
        match self {
            RejectReason::UMismatch => "u-mismatch",
            RejectReason::RegistryMissing => "registry-missing",
            RejectReason::PairingInequality => "pairing-inequality",
            RejectReason::MalformedParticipants => "malformed-participants",
            RejectReason::WarrantMismatch => "warrant-mismatch",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    Accept,
    Reject(RejectReason),
}

impl Decision {
    pub fn is_accept(self) -> bool {
        self == Decision::Accept
    }

    pub fn reason(self) -> Option<RejectReason> {
        match self {
            Decision::Accept => None,
            Decision::Reject(r) => Some(r),
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Accept => f.write_str("accept"),
            Decision::Reject(r) => write!(f, "reject ({r})"),
        }
    }
}

/// `Y* = e(Q_peer * S_self, sum_{i in D} eta_i Q_IDPi U_i)`.
///
/// `proxy_keys[k - 1]` is `Q_IDPk`.
pub fn compute_y_star<S: Pairing>(
    params: &SystemParams<S>,
    own: &KeyPair<S>,
    q_peer: &Scalar,
    eta: &LagrangeCoeffs,
    u_shares: &BTreeMap<usize, S::G1>,
    proxy_keys: &[Scalar],
) -> std::result::Result<S::G2, RejectReason> {
    let suite = &params.suite;
    let zq = suite.scalars();
    let mut weighted = Vec::with_capacity(eta.len());
    for (&i, eta_i) in eta {
        let q_i = proxy_keys.get(i.wrapping_sub(1)).ok_or(RejectReason::MalformedParticipants)?;
        let u_i = u_shares.get(&i).ok_or(RejectReason::RegistryMissing)?;
        weighted.push((zq.mul(eta_i, q_i), u_i));
    }
    let right = suite.g1_lincomb(weighted.iter().map(|(c, u)| (c, *u)));
    Ok(suite.pair(&suite.g1_mul(q_peer, &own.secret), &right))
}

/// Public inputs every verification needs besides the verifier's own key.
#[derive(Clone, Debug)]
pub struct VerifyInputs<'a, S: Pairing> {
    /// `Q_IDA`.
    pub original_signer: &'a Scalar,
    /// `Q_IDP1 .. Q_IDPn` in warrant order.
    pub proxy_keys: &'a [Scalar],
    /// `X = Q_IDB * Q_IDC`.
    pub x: &'a Scalar,
    /// Published `U_i`, keyed by party index.
    pub registry: &'a BTreeMap<usize, S::G1>,
}

fn warrant_consistent<S: Pairing>(params: &SystemParams<S>, sigma: &AggregateSignature<S>, inputs: &VerifyInputs<'_, S>) -> bool {
    let Ok(w) = Warrant::from_bytes(&sigma.warrant) else {
        return false;
    };
    let zq = params.suite.scalars();
    w.group_size() == sigma.n
        && inputs.proxy_keys.len() == sigma.n
        && params.h1(w.original_signer.as_bytes()) == *inputs.original_signer
        && w.proxies.iter().zip(inputs.proxy_keys).all(|(id, q)| params.h1(id.as_bytes()) == *q)
        && zq.reduce(&w.verifier_binding) == *inputs.x
        && w.verifier_binding < *zq.modulus()
}

/// Full verification as one designated verifier.
pub fn verify<S: Pairing>(
    params: &SystemParams<S>,
    sigma: &AggregateSignature<S>,
    inputs: &VerifyInputs<'_, S>,
    own: &KeyPair<S>,
) -> Decision {
    match verify_inner(params, sigma, inputs, own) {
        Ok(()) => Decision::Accept,
        Err(r) => Decision::Reject(r),
    }
}

fn verify_inner<S: Pairing>(
    params: &SystemParams<S>,
    sigma: &AggregateSignature<S>,
    inputs: &VerifyInputs<'_, S>,
    own: &KeyPair<S>,
) -> std::result::Result<(), RejectReason> {
    if !warrant_consistent(params, sigma, inputs) {
        return Err(RejectReason::WarrantMismatch);
    }
    let suite = &params.suite;
    let zq = suite.scalars();
    let signers = SignerSet::new(&sigma.participants, sigma.n).map_err(|_| RejectReason::MalformedParticipants)?;
    if signers.is_empty() || signers.indices() != sigma.participants.as_slice() {
        return Err(RejectReason::MalformedParticipants);
    }
    let eta = lagrange_at_zero(zq, signers.indices()).map_err(|_| RejectReason::MalformedParticipants)?;
    let mut u_shares = BTreeMap::new();
    for &i in signers.indices() {
        let u_i = inputs.registry.get(&i).ok_or(RejectReason::RegistryMissing)?;
        u_shares.insert(i, u_i.clone());
    }
    let u = suite.g1_lincomb(eta.iter().map(|(i, e)| (e, &u_shares[i])));
    if u != sigma.u {
        return Err(RejectReason::UMismatch);
    }
    let q_peer = recover_peer(zq, &own.public, inputs.x).map_err(|_| RejectReason::PairingInequality)?;
    let y_star = compute_y_star(params, own, &q_peer, &eta, &u_shares, inputs.proxy_keys)?;
    let h = params.h3(&sigma.message, &sigma.u, &y_star);
    if final_equation_holds(params, sigma, inputs.proxy_keys, &h) {
        Ok(())
    } else {
        Err(RejectReason::PairingInequality)
    }
}

/// `e(P_pub, V) == e(P_pub, U + n*H*V_w) * e(P, (sum_k Q_IDPk) * P)^H`.
pub fn final_equation_holds<S: Pairing>(
    params: &SystemParams<S>,
    sigma: &AggregateSignature<S>,
    proxy_keys: &[Scalar],
    h: &Scalar,
) -> bool {
    let suite = &params.suite;
    let zq = suite.scalars();
    let n = zq.reduce(&BigUint::from(sigma.n));
    let lhs = suite.pair(&params.p_pub, &sigma.v);
    let shifted = suite.g1_add(&sigma.u, &suite.g1_mul(&zq.mul(&n, h), &sigma.v_w));
    let q_sum = zq.sum(proxy_keys);
    let rhs = suite.g2_mul(
        &suite.pair(&params.p_pub, &shifted),
        &suite.g2_pow(&params.gt_base(), &zq.mul(&q_sum, h)),
    );
    lhs == rhs
}
