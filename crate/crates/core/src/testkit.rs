//! An honest end-to-end run without message passing, for unit tests.

use std::collections::BTreeMap;

use crate::arith::Scalar;
use crate::delegation::{
    accept_warrant, combine_proxy_shares, deal_proxy, derive_proxy_secret, proxy_subshare, sign_warrant,
    verify_proxy_subshare, DelegationSig, ProxyKeyShare, ProxySecret,
};
use crate::dvverify::VerifyInputs;
use crate::idkgc::{extract, setup, Identity, KeyPair, MasterKey, SystemParams};
use crate::pairing::Pairing;
use crate::rng::derive_rng;
use crate::thsign::{
    aggregate, build_context, compute_x, make_y_share, partial_sign, AggregateSignature, RoundOne, SignContext,
    SignerSet, YShare,
};
use crate::vss::{combine_shares, deal, subshare, verify_subshare, DealerPolynomial, SecretShare};
use crate::warrant::Warrant;

pub struct Run<S: Pairing> {
    pub params: SystemParams<S>,
    pub master: MasterKey,
    pub alice: KeyPair<S>,
    pub proxies: Vec<KeyPair<S>>,
    pub bob: KeyPair<S>,
    pub cindy: KeyPair<S>,
    pub x: Scalar,
    pub warrant: Vec<u8>,
    pub delegation: DelegationSig<S>,
    pub vss_polys: Vec<DealerPolynomial>,
    pub shares: Vec<SecretShare<S>>,
    pub proxy_secrets: Vec<ProxySecret<S>>,
    pub key_shares: Vec<ProxyKeyShare<S>>,
    pub y_shares: Vec<YShare<S>>,
    pub ctx: SignContext<S>,
    pub sigma: AggregateSignature<S>,
    pub registry: BTreeMap<usize, S::G1>,
    pub commitments: BTreeMap<usize, S::G2>,
}

impl<S: Pairing> Run<S> {
    pub fn proxy_keys(&self) -> Vec<Scalar> {
        self.proxies.iter().map(|k| k.public.clone()).collect()
    }

    pub fn inputs<'a>(&'a self, proxy_keys: &'a [Scalar]) -> VerifyInputs<'a, S> {
        VerifyInputs { original_signer: &self.alice.public, proxy_keys, x: &self.x, registry: &self.registry }
    }
}

pub fn honest_run<S: Pairing>(suite: S, t: usize, n: usize, signers: &[usize], seed: u64) -> Run<S> {
    let seed_bytes = seed.to_be_bytes();
    let (params, master) = setup(suite, &seed_bytes).unwrap();
    let zq = params.suite.scalars().clone();
    let key = |name: &str| extract(&params, &master, &Identity::new(name).unwrap());
    let alice = key("alice");
    let names: Vec<String> = (1..=n).map(|i| format!("proxy-{i}")).collect();
    let proxies: Vec<_> = names.iter().map(|id| key(id)).collect();
    let (bob, cindy) = (key("bob"), key("cindy"));
    let x = compute_x(&zq, &bob.public, &cindy.public).unwrap();
    let mut rng = derive_rng("testkit", &[&seed_bytes]);

    let mut vss_polys = Vec::new();
    let mut vss_comms = Vec::new();
    for i in 1..=n {
        let (poly, comms) = deal(&params, t, n, i, &mut rng).unwrap();
        vss_polys.push(poly);
        vss_comms.push(comms);
    }
    let shares: Vec<SecretShare<S>> = (1..=n)
        .map(|j| {
            let subs: Vec<_> = vss_polys.iter().map(|f| subshare(&zq, f, j).unwrap()).collect();
            for (s, c) in subs.iter().zip(&vss_comms) {
                assert!(verify_subshare(&params, s, c));
            }
            combine_shares(&params, j, n, &subs).unwrap()
        })
        .collect();

    let warrant = Warrant::new("alice", names.clone(), t, x.value().clone(), "test delegation").unwrap().to_bytes();
    let delegation = sign_warrant(&params, &alice, &warrant, &mut rng);
    let accepted = accept_warrant(&params, &alice.public, &warrant, &delegation).unwrap();
    let proxy_secrets: Vec<_> =
        proxies.iter().enumerate().map(|(k, kp)| derive_proxy_secret(&params, kp, k + 1, &accepted)).collect();
    let mut proxy_polys = Vec::new();
    let mut proxy_comms = Vec::new();
    for (k, secret) in proxy_secrets.iter().enumerate() {
        let (poly, comms) = deal_proxy(&params, secret, t, n, &accepted, &proxies[k].public, &mut rng).unwrap();
        proxy_polys.push(poly);
        proxy_comms.push(comms);
    }
    let key_shares: Vec<_> = (1..=n)
        .map(|j| {
            let subs: Vec<_> = proxy_polys.iter().map(|g| proxy_subshare(&params.suite, g, j).unwrap()).collect();
            for (s, c) in subs.iter().zip(&proxy_comms) {
                assert!(verify_proxy_subshare(&params, s, c));
            }
            combine_proxy_shares(&params, j, n, &subs).unwrap()
        })
        .collect();

    let set = SignerSet::new(signers, n).unwrap();
    let y_shares: Vec<_> = set
        .indices()
        .iter()
        .map(|&i| make_y_share(&params, i, &proxies[i - 1].secret, &shares[i - 1].r, &x))
        .collect();
    let round_one: Vec<_> = y_shares
        .iter()
        .map(|y| RoundOne { index: y.index, u: shares[y.index - 1].u.clone(), y: y.y.clone() })
        .collect();
    let message = b"pay 10 units to carol".to_vec();
    let ctx = build_context(&params, &message, &set, &round_one).unwrap();
    let partials: Vec<_> = set
        .indices()
        .iter()
        .map(|&i| partial_sign(&params, &ctx.h, i, &shares[i - 1].u, &key_shares[i - 1].secret))
        .collect();
    let commitments: BTreeMap<_, _> = key_shares.iter().map(|k| (k.holder, k.commitment.clone())).collect();
    let sigma = aggregate(&params, &ctx, &warrant, &delegation.v_w, &partials, &commitments).unwrap();
    let registry = shares.iter().map(|s| (s.holder, s.u.clone())).collect();

    Run {
        params,
        master,
        alice,
        proxies,
        bob,
        cindy,
        x,
        warrant,
        delegation,
        vss_polys,
        shares,
        proxy_secrets,
        key_shares,
        y_shares,
        ctx,
        sigma,
        registry,
        commitments,
    }
}
