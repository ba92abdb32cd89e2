//! Delegation from the original signer to the proxy group.
//!
//! Alice signs the warrant `m_w` as `w = (U_w, V_w)` with
//! `U_w = r_w * Q_IDA * P`, `h_w = H2(m_w, U_w)`, `V_w = (r_w + h_w) * S_IDA`.
//! Each proxy signer checks `e(P_pub, V_w) = e(P, U_w + h_w * Q_IDA * P)`,
//! forms its proxy secret `S_i = S_IDi + V_w`, and then shares `S_i` with a
//! `G1`-valued polynomial `g_i(x) = S_i + sum_{l>=1} b_il x^l`.
//!
//! Commitments to the higher coefficients are `B_il = e(P_pub, b_il)`; the
//! constant commitment `B_i0 = e(P, U_w + (Q_IDPi + h_w * Q_IDA) * P)` is
//! computable by anyone from public data and equals `e(P_pub, S_i)`. With
//! that base, `e(P_pub, g_j(i)) = prod_k B_jk^(i^k)` holds for honest shares.

use std::collections::BTreeMap;

use rand::RngCore;

use crate::arith::Scalar;
use crate::error::{Error, Result};
use crate::idkgc::{KeyPair, SystemParams};
use crate::pairing::Pairing;
use crate::vss::{check_index, check_threshold};

/// `w = (U_w, V_w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelegationSig<S: Pairing> {
    pub u_w: S::G1,
    pub v_w: S::G1,
}

pub fn sign_warrant<S: Pairing, R: RngCore + ?Sized>(
    params: &SystemParams<S>,
    alice: &KeyPair<S>,
    m_w: &[u8],
    rng: &mut R,
) -> DelegationSig<S> {
    let r_w = params.suite.scalars().sample_nonzero(rng);
    sign_warrant_with(params, alice, m_w, &r_w, None)
}

/// [`sign_warrant`] with the nonce supplied and, optionally, `h_w` forced
/// instead of hashed.
pub fn sign_warrant_with<S: Pairing>(
    params: &SystemParams<S>,
    alice: &KeyPair<S>,
    m_w: &[u8],
    r_w: &Scalar,
    h_w: Option<Scalar>,
) -> DelegationSig<S> {
    let zq = params.suite.scalars();
    let u_w = params.suite.mul_gen(&zq.mul(r_w, &alice.public));
    let h_w = h_w.unwrap_or_else(|| params.h2(m_w, &u_w));
    let v_w = params.suite.g1_mul(&zq.add(r_w, &h_w), &alice.secret);
    DelegationSig { u_w, v_w }
}

pub fn verify_warrant<S: Pairing>(params: &SystemParams<S>, q_a: &Scalar, m_w: &[u8], w: &DelegationSig<S>) -> bool {
    let h_w = params.h2(m_w, &w.u_w);
    verify_warrant_with_hash(params, q_a, w, &h_w)
}

/// `e(P_pub, V_w) == e(P, U_w + h_w * Q_IDA * P)`.
pub fn verify_warrant_with_hash<S: Pairing>(
    params: &SystemParams<S>,
    q_a: &Scalar,
    w: &DelegationSig<S>,
    h_w: &Scalar,
) -> bool {
    let suite = &params.suite;
    let zq = suite.scalars();
    let lhs = suite.pair(&params.p_pub, &w.v_w);
    let rhs_point = suite.g1_add(&w.u_w, &suite.mul_gen(&zq.mul(h_w, q_a)));
    lhs == suite.pair(&suite.generator(), &rhs_point)
}

/// A delegation whose signature has been checked. Only obtainable through
/// [`accept_warrant`], so holding one proves the check ran and passed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcceptedWarrant<S: Pairing> {
    sig: DelegationSig<S>,
    h_w: Scalar,
    q_a: Scalar,
}

impl<S: Pairing> AcceptedWarrant<S> {
    pub fn signature(&self) -> &DelegationSig<S> {
        &self.sig
    }

    pub fn h_w(&self) -> &Scalar {
        &self.h_w
    }

    pub fn original_signer_key(&self) -> &Scalar {
        &self.q_a
    }
}

pub fn accept_warrant<S: Pairing>(
    params: &SystemParams<S>,
    q_a: &Scalar,
    m_w: &[u8],
    w: &DelegationSig<S>,
) -> Result<AcceptedWarrant<S>> {
    let h_w = params.h2(m_w, &w.u_w);
    accept_warrant_with_hash(params, q_a, w, h_w)
}

/// [`accept_warrant`] with `h_w` supplied instead of hashed; the pairing
/// check still runs.
pub fn accept_warrant_with_hash<S: Pairing>(
    params: &SystemParams<S>,
    q_a: &Scalar,
    w: &DelegationSig<S>,
    h_w: Scalar,
) -> Result<AcceptedWarrant<S>> {
    if !verify_warrant_with_hash(params, q_a, w, &h_w) {
        return Err(Error::WarrantRejected);
    }
    Ok(AcceptedWarrant { sig: w.clone(), h_w, q_a: q_a.clone() })
}

/// `S_i = S_IDi + V_w`.
#[derive(Clone, PartialEq, Eq)]
pub struct ProxySecret<S: Pairing> {
    pub owner: usize,
    pub value: S::G1,
}

impl<S: Pairing> std::fmt::Debug for ProxySecret<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProxySecret").field("owner", &self.owner).finish_non_exhaustive()
    }
}

pub fn derive_proxy_secret<S: Pairing>(
    params: &SystemParams<S>,
    own: &KeyPair<S>,
    owner: usize,
    accepted: &AcceptedWarrant<S>,
) -> ProxySecret<S> {
    ProxySecret { owner, value: params.suite.g1_add(&own.secret, &accepted.sig.v_w) }
}

/// `B_i0 = e(P, U_w + (Q_IDPi + h_w * Q_IDA) * P)`, computable from public
/// data by every proxy signer.
pub fn proxy_base_commitment<S: Pairing>(
    params: &SystemParams<S>,
    accepted: &AcceptedWarrant<S>,
    q_pi: &Scalar,
) -> S::G2 {
    let suite = &params.suite;
    let zq = suite.scalars();
    let k = zq.add(q_pi, &zq.mul(&accepted.h_w, &accepted.q_a));
    let point = suite.g1_add(&accepted.sig.u_w, &suite.mul_gen(&k));
    suite.pair(&suite.generator(), &point)
}

/// `g_i(x) = S_i + sum_{l=1}^{t-1} b_il x^l` with `G1` coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct ProxyPolynomial<S: Pairing> {
    dealer: usize,
    n: usize,
    constant: S::G1,
    coeffs: Vec<S::G1>,
}

impl<S: Pairing> std::fmt::Debug for ProxyPolynomial<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProxyPolynomial")
            .field("dealer", &self.dealer)
            .field("degree_bound", &(self.coeffs.len() + 1))
            .finish_non_exhaustive()
    }
}

impl<S: Pairing> ProxyPolynomial<S> {
    pub fn dealer(&self) -> usize {
        self.dealer
    }

    pub fn threshold(&self) -> usize {
        self.coeffs.len() + 1
    }

    pub fn eval(&self, suite: &S, x: &Scalar) -> S::G1 {
        let high = self
            .coeffs
            .iter()
            .rev()
            .fold(suite.g1_identity(), |acc, b| suite.g1_add(b, &suite.g1_mul(x, &acc)));
        suite.g1_add(&self.constant, &suite.g1_mul(x, &high))
    }
}

/// `B_i0` and `B_i1 .. B_i,t-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProxyCommitments<S: Pairing> {
    pub dealer: usize,
    pub base: S::G2,
    pub higher: Vec<S::G2>,
}

impl<S: Pairing> ProxyCommitments<S> {
    pub fn threshold(&self) -> usize {
        self.higher.len() + 1
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct ProxySubShare<S: Pairing> {
    pub dealer: usize,
    pub recipient: usize,
    pub value: S::G1,
}

impl<S: Pairing> std::fmt::Debug for ProxySubShare<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProxySubShare")
            .field("dealer", &self.dealer)
            .field("recipient", &self.recipient)
            .finish_non_exhaustive()
    }
}

/// `SK_Pi` and its published commitment `C_i = e(P_pub, SK_Pi)`.
#[derive(Clone, PartialEq, Eq)]
pub struct ProxyKeyShare<S: Pairing> {
    pub holder: usize,
    pub secret: S::G1,
    pub commitment: S::G2,
}

impl<S: Pairing> std::fmt::Debug for ProxyKeyShare<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProxyKeyShare")
            .field("holder", &self.holder)
            .field("commitment", &self.commitment)
            .finish_non_exhaustive()
    }
}

/// Samples `b_il = c_il * P` for uniform nonzero `c_il`.
#[allow(clippy::too_many_arguments)]
pub fn deal_proxy<S: Pairing, R: RngCore + ?Sized>(
    params: &SystemParams<S>,
    secret: &ProxySecret<S>,
    t: usize,
    n: usize,
    accepted: &AcceptedWarrant<S>,
    q_pi: &Scalar,
    rng: &mut R,
) -> Result<(ProxyPolynomial<S>, ProxyCommitments<S>)> {
    let zq = params.suite.scalars();
    check_threshold(zq, t, n)?;
    let coeffs = (1..t).map(|_| zq.sample_nonzero(rng)).collect();
    deal_proxy_with(params, secret, n, accepted, q_pi, coeffs)
}

/// [`deal_proxy`] with the discrete logs of `b_i1 .. b_i,t-1` supplied.
pub fn deal_proxy_with<S: Pairing>(
    params: &SystemParams<S>,
    secret: &ProxySecret<S>,
    n: usize,
    accepted: &AcceptedWarrant<S>,
    q_pi: &Scalar,
    coeff_logs: Vec<Scalar>,
) -> Result<(ProxyPolynomial<S>, ProxyCommitments<S>)> {
    let suite = &params.suite;
    check_threshold(suite.scalars(), coeff_logs.len() + 1, n)?;
    check_index(secret.owner, n)?;
    let coeffs: Vec<S::G1> = coeff_logs.iter().map(|c| suite.mul_gen(c)).collect();
    let higher = coeffs.iter().map(|b| suite.pair(&params.p_pub, b)).collect();
    let base = proxy_base_commitment(params, accepted, q_pi);
    Ok((
        ProxyPolynomial { dealer: secret.owner, n, constant: secret.value.clone(), coeffs },
        ProxyCommitments { dealer: secret.owner, base, higher },
    ))
}

/// `g_i(j)`.
pub fn proxy_subshare<S: Pairing>(suite: &S, poly: &ProxyPolynomial<S>, recipient: usize) -> Result<ProxySubShare<S>> {
    check_index(recipient, poly.n)?;
    let x = suite.scalars().from_u64(recipient as u64);
    Ok(ProxySubShare { dealer: poly.dealer, recipient, value: poly.eval(suite, &x) })
}

/// `e(P_pub, g_j(i)) == prod_k B_jk^(i^k)`.
pub fn verify_proxy_subshare<S: Pairing>(
    params: &SystemParams<S>,
    share: &ProxySubShare<S>,
    commitments: &ProxyCommitments<S>,
) -> bool {
    if share.dealer != commitments.dealer || share.recipient == 0 {
        return false;
    }
    let suite = &params.suite;
    let zq = suite.scalars();
    let i = zq.from_u64(share.recipient as u64);
    let bases: Vec<&S::G2> = std::iter::once(&commitments.base).chain(&commitments.higher).collect();
    let powers: Vec<Scalar> = (0..bases.len() as u64).map(|k| zq.pow(&i, k)).collect();
    let rhs = suite.gt_prodpow(bases.into_iter().zip(&powers));
    suite.pair(&params.p_pub, &share.value) == rhs
}

/// `SK_Pi = sum_{k=1}^{n} g_k(i)`, summed over all `n` dealers.
pub fn combine_proxy_shares<S: Pairing>(
    params: &SystemParams<S>,
    holder: usize,
    n: usize,
    shares: &[ProxySubShare<S>],
) -> Result<ProxyKeyShare<S>> {
    check_index(holder, n)?;
    let mut by_dealer = BTreeMap::new();
    for share in shares {
        if share.recipient != holder {
            return Err(Error::RecipientMismatch { expected: holder, got: share.recipient });
        }
        check_index(share.dealer, n)?;
        if by_dealer.insert(share.dealer, &share.value).is_some() {
            return Err(Error::DuplicateDealer(share.dealer));
        }
    }
    if let Some(k) = (1..=n).find(|k| !by_dealer.contains_key(k)) {
        return Err(Error::MissingDealer(k));
    }
    let suite = &params.suite;
    let secret = by_dealer.values().fold(suite.g1_identity(), |acc, v| suite.g1_add(&acc, v));
    let commitment = suite.pair(&params.p_pub, &secret);
    Ok(ProxyKeyShare { holder, secret, commitment })
}
