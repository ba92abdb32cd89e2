use std::collections::BTreeMap;

use tproxy_core::delegation::{
    accept_warrant, combine_proxy_shares, deal_proxy, derive_proxy_secret, proxy_base_commitment, proxy_subshare,
    sign_warrant, verify_proxy_subshare, ProxyCommitments, ProxyKeyShare,
};
use tproxy_core::dvverify::{verify, Decision, RejectReason, VerifyInputs};
use tproxy_core::idkgc::{extract, setup, Identity, KeyPair, SystemParams};
use tproxy_core::pairing::{CurveSuite, Pairing, TransparentSuite};
use tproxy_core::rng::derive_rng;
use tproxy_core::thsign::{
    aggregate, build_context, compute_x, make_y_share, partial_sign, AggregateSignature, RoundOne, SignerSet,
};
use tproxy_core::vss::{combine_shares, deal, subshare, verify_subshare, SecretShare};
use tproxy_core::warrant::Warrant;

struct World<S: Pairing> {
    params: SystemParams<S>,
    alice: KeyPair<S>,
    proxies: Vec<KeyPair<S>>,
    bob: KeyPair<S>,
    cindy: KeyPair<S>,
    eve: KeyPair<S>,
    sigma: AggregateSignature<S>,
    registry: BTreeMap<usize, S::G1>,
}

fn id(s: &str) -> Identity {
    Identity::new(s).unwrap()
}

fn world<S: Pairing>(suite: S, t: usize, n: usize, d: &[usize]) -> World<S> {
    let mut rng = derive_rng("protocol test", &[b"seed"]);
    let (params, master) = setup(suite, b"protocol test").unwrap();
    let key = |s: &str| extract(&params, &master, &id(s));
    let alice = key("alice");
    let proxies: Vec<_> = (1..=n).map(|i| key(&format!("proxy {i}"))).collect();
    let (bob, cindy, eve) = (key("bob"), key("cindy"), key("eve"));

    let dealt: Vec<_> = (1..=n).map(|i| deal(&params, t, n, i, &mut rng).unwrap()).collect();
    let zq = params.suite.scalars();
    let shares: Vec<SecretShare<S>> = (1..=n)
        .map(|j| {
            let subs: Vec<_> = dealt
                .iter()
                .map(|(poly, comm)| {
                    let s = subshare(zq, poly, j).unwrap();
                    assert!(verify_subshare(&params, &s, comm));
                    s
                })
                .collect();
            combine_shares(&params, j, n, &subs).unwrap()
        })
        .collect();

    let x = compute_x(zq, &bob.public, &cindy.public).unwrap();
    let names = (1..=n).map(|i| format!("proxy {i}")).collect();
    let m_w = Warrant::new("alice", names, t, x.value().clone(), "test terms").unwrap().to_bytes();
    let w = sign_warrant(&params, &alice, &m_w, &mut rng);
    let accepted = accept_warrant(&params, &alice.public, &m_w, &w).unwrap();

    let proxy_dealt: Vec<_> = proxies
        .iter()
        .enumerate()
        .map(|(k, kp)| {
            let secret = derive_proxy_secret(&params, kp, k + 1, &accepted);
            deal_proxy(&params, &secret, t, n, &accepted, &kp.public, &mut rng).unwrap()
        })
        .collect();
    let key_shares: Vec<ProxyKeyShare<S>> = (1..=n)
        .map(|j| {
            let subs: Vec<_> = proxy_dealt
                .iter()
                .enumerate()
                .map(|(k, (poly, comm))| {
                    let s = proxy_subshare(&params.suite, poly, j).unwrap();
                    let base = proxy_base_commitment(&params, &accepted, &proxies[k].public);
                    let local = ProxyCommitments { dealer: k + 1, base, higher: comm.higher.clone() };
                    assert!(verify_proxy_subshare(&params, &s, &local));
                    s
                })
                .collect();
            combine_proxy_shares(&params, j, n, &subs).unwrap()
        })
        .collect();

    let signers = SignerSet::new(d, n).unwrap();
    let round_one: Vec<_> = d
        .iter()
        .map(|&i| {
            let share = &shares[i - 1];
            let y = make_y_share(&params, i, &proxies[i - 1].secret, &share.r, &x).y;
            RoundOne { index: i, u: share.u.clone(), y }
        })
        .collect();
    let ctx = build_context(&params, b"release batch 17", &signers, &round_one).unwrap();
    let partials: Vec<_> =
        d.iter().map(|&i| partial_sign(&params, &ctx.h, i, &ctx.u_shares[&i], &key_shares[i - 1].secret)).collect();
    let commitments = d.iter().map(|&i| (i, key_shares[i - 1].commitment.clone())).collect();
    let sigma = aggregate(&params, &ctx, &m_w, &w.v_w, &partials, &commitments).unwrap();
    let registry = shares.iter().map(|s| (s.holder, s.u.clone())).collect();
    World { params, alice, proxies, bob, cindy, eve, sigma, registry }
}

impl<S: Pairing> World<S> {
    fn decide(&self, own: &KeyPair<S>, sigma: &AggregateSignature<S>) -> Decision {
        let zq = self.params.suite.scalars();
        let x = compute_x(zq, &self.bob.public, &self.cindy.public).unwrap();
        let keys: Vec<_> = self.proxies.iter().map(|p| p.public.clone()).collect();
        let inputs = VerifyInputs { original_signer: &self.alice.public, proxy_keys: &keys, x: &x, registry: &self.registry };
        verify(&self.params, sigma, &inputs, own)
    }
}

#[test]
fn three_of_five_on_the_transparent_suite() {
    let w = world(TransparentSuite::large(), 3, 5, &[2, 4, 5]);
    assert_eq!(w.decide(&w.bob, &w.sigma), Decision::Accept);
    assert_eq!(w.decide(&w.cindy, &w.sigma), Decision::Accept);

    let mut forged = w.sigma.clone();
    forged.message = b"release batch 18".to_vec();
    assert_eq!(w.decide(&w.bob, &forged), Decision::Reject(RejectReason::PairingInequality));
}

#[test]
fn any_kgc_issued_key_can_check_the_signature() {
    // The verification key only enters through Q_peer * S_self = s^-1 * X * P,
    // which every extracted key pair can compute.
    let w = world(TransparentSuite::large(), 2, 3, &[1, 3]);
    assert_eq!(w.decide(&w.eve, &w.sigma), Decision::Accept);

    let suite = &w.params.suite;
    let zq = suite.scalars();
    let mut rng = derive_rng("outsider", &[]);
    let outsider = KeyPair {
        identity: id("mallory"),
        public: zq.sample_nonzero(&mut rng),
        secret: suite.mul_gen(&zq.sample_nonzero(&mut rng)),
    };
    assert_eq!(w.decide(&outsider, &w.sigma), Decision::Reject(RejectReason::PairingInequality));
}

#[test]
fn two_of_three_on_the_curve_suite() {
    let w = world(CurveSuite::standard(), 2, 3, &[1, 2]);
    assert_eq!(w.decide(&w.bob, &w.sigma), Decision::Accept);
    assert_eq!(w.decide(&w.cindy, &w.sigma), Decision::Accept);
}
