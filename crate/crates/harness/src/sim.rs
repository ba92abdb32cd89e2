//! The sequential scheduler. Stages run in protocol order and, inside a
//! stage, parties act in ascending order. Secret values only move through
//! mailboxes, and every move is logged so the audit can replay it.

use std::collections::{BTreeMap, VecDeque};

use rand_chacha::ChaCha20Rng;
use tproxy_core::arith::Scalar;
use tproxy_core::delegation::{
    accept_warrant, combine_proxy_shares, deal_proxy, derive_proxy_secret, proxy_base_commitment, proxy_subshare,
    sign_warrant, verify_proxy_subshare, AcceptedWarrant, DelegationSig, ProxyCommitments, ProxyKeyShare,
    ProxySubShare,
};
use tproxy_core::dvverify::{compute_y_star, recover_peer, verify, Decision, RejectReason, VerifyInputs};
use tproxy_core::idkgc::{extract, setup, Identity, KeyPair, MasterKey, SystemParams};
use tproxy_core::pairing::{AnySuite, Pairing};
use tproxy_core::rng::derive_rng;
use tproxy_core::thsign::{
    aggregate, build_context, clerk_verify_partial, compute_x, lagrange_at_zero, make_y_share, partial_sign,
    AggregateSignature, PartialSignature, RoundOne, SignContext, SignerSet,
};
use tproxy_core::vss::{check_threshold, combine_shares, deal, subshare, verify_subshare, SecretShare, SubShare};
use tproxy_core::warrant::Warrant;
use tproxy_core::with_suite;

use crate::config::ProtocolConfig;
use crate::registry::Registry;
use crate::transcript::{Event, PartyId, Payload, SecretKind, Stage, Transcript};
use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaultKind {
    /// A dealer hands one recipient a wrong `f_i(j)`.
    BadVssSubshare,
    /// A dealer hands one recipient a wrong `g_i(j)`.
    BadProxySubshare,
    /// A signer returns a wrong `V_i`.
    BadPartialSig,
    /// A signer sends the clerk a wrong `Y_i`.
    BadYShare,
    /// Only `t - 1` signers take part: the target if it is in `D`,
    /// otherwise the highest index, sits out.
    SmallQuorum,
    /// A verifier uses a key pair the KGC never issued.
    WrongVerifierKey,
}

impl FaultKind {
    pub const ALL: [FaultKind; 6] = [
        FaultKind::BadVssSubshare,
        FaultKind::BadProxySubshare,
        FaultKind::BadPartialSig,
        FaultKind::BadYShare,
        FaultKind::SmallQuorum,
        FaultKind::WrongVerifierKey,
    ];

    /// The stage at which the run is expected to stop or fail.
    pub fn stage(self) -> Stage {
        match self {
            FaultKind::BadVssSubshare => Stage::SecretShares,
            FaultKind::BadProxySubshare => Stage::ProxyShares,
            FaultKind::BadPartialSig => Stage::Signing,
            FaultKind::BadYShare | FaultKind::SmallQuorum | FaultKind::WrongVerifierKey => Stage::Verification,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FaultKind::BadVssSubshare => "bad-vss-subshare",
            FaultKind::BadProxySubshare => "bad-proxy-subshare",
            FaultKind::BadPartialSig => "bad-partial-sig",
            FaultKind::BadYShare => "bad-y-share",
            FaultKind::SmallQuorum => "small-quorum",
            FaultKind::WrongVerifierKey => "wrong-verifier-key",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FaultSpec {
    pub kind: FaultKind,
    /// The misbehaving dealer or signer, or the verifier whose key is
    /// replaced. For `SmallQuorum`, the signer left out.
    pub target: PartyId,
}

impl FaultSpec {
    pub fn new(kind: FaultKind, target: PartyId) -> Self {
        FaultSpec { kind, target }
    }

    pub fn stage(&self) -> Stage {
        self.kind.stage()
    }

    fn check(&self, cfg: &ProtocolConfig) -> Result<(), HarnessError> {
        let d = cfg.signer_set();
        let ok = match (self.kind, self.target) {
            (FaultKind::BadVssSubshare | FaultKind::BadProxySubshare, PartyId::Proxy(i)) => i <= cfg.n,
            (FaultKind::BadPartialSig | FaultKind::BadYShare, PartyId::Proxy(i)) => d.contains(&i),
            (FaultKind::WrongVerifierKey, PartyId::Bob | PartyId::Cindy) => true,
            (FaultKind::SmallQuorum, _) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(HarnessError::Config(format!("fault {} cannot target {}", self.kind.name(), self.target)))
        }
    }

    fn hits(&self, kind: FaultKind, party: PartyId) -> bool {
        self.kind == kind && self.target == party
    }
}

/// Everything a run produced, including values only an oracle should see.
#[derive(Clone, Debug)]
pub struct RunOutcome<S: Pairing> {
    pub transcript: Transcript,
    pub registry: Registry,
    pub params: SystemParams<S>,
    pub master: MasterKey,
    /// `Q_IDA`.
    pub original_signer: Scalar,
    /// `Q_IDP1 .. Q_IDPn`.
    pub proxy_keys: Vec<Scalar>,
    pub delegation: Option<DelegationSig<S>>,
    /// The clerk's signing context, once round one completed.
    pub context: Option<SignContext<S>>,
    pub signature: Option<AggregateSignature<S>>,
    /// `Y*` as recomputed by each verifier.
    pub y_star: BTreeMap<PartyId, S::G2>,
    pub decisions: BTreeMap<PartyId, Decision>,
}

/// Runs the protocol on the preset named in the config.
pub fn run(cfg: &ProtocolConfig, fault: Option<FaultSpec>) -> Result<Transcript, HarnessError> {
    let suite = AnySuite::preset(&cfg.suite).ok_or_else(|| HarnessError::UnknownSuite(cfg.suite.clone()))?;
    with_suite!(suite, s => run_detailed(s, cfg, fault).map(|o| o.transcript))
}

struct Abort {
    stage: Stage,
    culprit: Option<PartyId>,
    reason: String,
}

enum Msg<S: Pairing> {
    IdentityKey(KeyPair<S>),
    VssSubShare(SubShare),
    Warrant { m_w: Vec<u8>, sig: DelegationSig<S> },
    ProxySubShare(ProxySubShare<S>),
    RoundOne(RoundOne<S>),
    Challenge(Scalar),
    Partial(PartialSignature<S>),
    Signature(AggregateSignature<S>),
}

struct ProxyState<S: Pairing> {
    key: Option<KeyPair<S>>,
    share: Option<SecretShare<S>>,
    warrant: Option<(Vec<u8>, AcceptedWarrant<S>)>,
    key_share: Option<ProxyKeyShare<S>>,
}

impl<S: Pairing> Default for ProxyState<S> {
    fn default() -> Self {
        ProxyState { key: None, share: None, warrant: None, key_share: None }
    }
}

struct Sim<'c, S: Pairing> {
    cfg: &'c ProtocolConfig,
    fault: Option<FaultSpec>,
    params: SystemParams<S>,
    registry: Registry,
    transcript: Transcript,
    mailboxes: BTreeMap<PartyId, VecDeque<(PartyId, Msg<S>)>>,
    identities: BTreeMap<PartyId, Identity>,
    keys: BTreeMap<PartyId, KeyPair<S>>,
    proxies: BTreeMap<usize, ProxyState<S>>,
    delegation: Option<DelegationSig<S>>,
    context: Option<SignContext<S>>,
    signature: Option<AggregateSignature<S>>,
    y_star: BTreeMap<PartyId, S::G2>,
    decisions: BTreeMap<PartyId, Decision>,
}

/// Runs the protocol on an explicit suite and returns every intermediate
/// value of interest.
pub fn run_detailed<S: Pairing>(
    suite: S,
    cfg: &ProtocolConfig,
    fault: Option<FaultSpec>,
) -> Result<RunOutcome<S>, HarnessError> {
    cfg.validate()?;
    check_threshold(suite.scalars(), cfg.t, cfg.n).map_err(|e| HarnessError::Config(e.to_string()))?;
    if let Some(f) = &fault {
        f.check(cfg)?;
    }

    let mut transcript = Transcript::default();
    let mut registry = Registry::default();
    transcript.push(Event::Stage { stage: Stage::Setup });
    let mut seed = [0u8; 32];
    rand::RngCore::fill_bytes(&mut party_rng(cfg.seed, PartyId::Kgc, Stage::Setup), &mut seed);
    let (params, master) = setup(suite, &seed)?;
    transcript.push(Event::Hold { party: PartyId::Kgc, secret: SecretKind::MasterKey });
    let p_pub = params.suite.g1_to_bytes(&params.p_pub);
    let suite_text = params.suite.params().to_text().into_bytes();
    for (label, value) in [("suite", suite_text), ("P_pub", p_pub)] {
        registry.publish(Stage::Setup, PartyId::Kgc, label, value.clone())?;
        transcript.push(Event::Publish {
            stage: Stage::Setup,
            party: PartyId::Kgc,
            label: label.into(),
            value: hex::encode(value),
        });
    }

    let mut identities = BTreeMap::new();
    identities.insert(PartyId::Alice, Identity::new(cfg.alice.as_str())?);
    for (k, id) in cfg.proxies.iter().enumerate() {
        identities.insert(PartyId::Proxy(k + 1), Identity::new(id.as_str())?);
    }
    identities.insert(PartyId::Bob, Identity::new(cfg.bob.as_str())?);
    identities.insert(PartyId::Cindy, Identity::new(cfg.cindy.as_str())?);

    let mut sim = Sim {
        cfg,
        fault,
        params,
        registry,
        transcript,
        mailboxes: BTreeMap::new(),
        identities,
        keys: BTreeMap::new(),
        proxies: (1..=cfg.n).map(|i| (i, ProxyState::default())).collect(),
        delegation: None,
        context: None,
        signature: None,
        y_star: BTreeMap::new(),
        decisions: BTreeMap::new(),
    };

    let stages: [(Stage, fn(&mut Sim<'_, S>, &MasterKey) -> Result<Result<(), Abort>, HarnessError>); 5] = [
        (Stage::KeyGeneration, |sim, m| sim.key_generation(m)),
        (Stage::SecretShares, |sim, _| sim.secret_shares()),
        (Stage::ProxyShares, |sim, _| sim.proxy_shares()),
        (Stage::Signing, |sim, _| sim.signing()),
        (Stage::Verification, |sim, _| sim.verification()),
    ];
    for (stage, step) in stages {
        sim.transcript.push(Event::Stage { stage });
        if let Err(abort) = step(&mut sim, &master)? {
            sim.transcript.push(Event::Abort { stage: abort.stage, culprit: abort.culprit, reason: abort.reason });
            break;
        }
    }

    let original_signer = sim.public_key(PartyId::Alice)?;
    let proxy_keys = (1..=cfg.n).map(|i| sim.public_key(PartyId::Proxy(i))).collect::<Result<_, _>>()?;
    Ok(RunOutcome {
        transcript: sim.transcript,
        registry: sim.registry,
        params: sim.params,
        master,
        original_signer,
        proxy_keys,
        delegation: sim.delegation,
        context: sim.context,
        signature: sim.signature,
        y_star: sim.y_star,
        decisions: sim.decisions,
    })
}

fn party_rng(seed: u64, party: PartyId, stage: Stage) -> ChaCha20Rng {
    derive_rng("tproxy-harness", &[&seed.to_be_bytes(), party.to_string().as_bytes(), stage.label().as_bytes()])
}

type StageResult = Result<Result<(), Abort>, HarnessError>;

fn abort(stage: Stage, culprit: Option<PartyId>, reason: String) -> StageResult {
    Ok(Err(Abort { stage, culprit, reason }))
}

impl<S: Pairing> Sim<'_, S> {
    fn suite(&self) -> &S {
        &self.params.suite
    }

    fn g1_hex(&self, a: &S::G1) -> String {
        hex::encode(self.suite().g1_to_bytes(a))
    }

    fn g2_hex(&self, z: &S::G2) -> String {
        hex::encode(self.suite().g2_to_bytes(z))
    }

    fn publish(&mut self, stage: Stage, party: PartyId, label: &str, value: Vec<u8>) -> Result<(), HarnessError> {
        self.registry.publish(stage, party, label, value.clone())?;
        self.transcript.push(Event::Publish { stage, party, label: label.into(), value: hex::encode(value) });
        Ok(())
    }

    fn read_g1(&self, stage: Stage, party: PartyId, label: &str) -> Result<S::G1, HarnessError> {
        let bytes = self.registry.get(stage, party, label).ok_or_else(|| HarnessError::missing(party, label))?;
        self.suite().g1_from_bytes(bytes).map_err(|e| HarnessError::Decode(e.to_string()))
    }

    fn read_g2(&self, stage: Stage, party: PartyId, label: &str) -> Result<S::G2, HarnessError> {
        let bytes = self.registry.get(stage, party, label).ok_or_else(|| HarnessError::missing(party, label))?;
        self.suite().g2_from_bytes(bytes).map_err(|e| HarnessError::Decode(e.to_string()))
    }

    fn public_key(&self, party: PartyId) -> Result<Scalar, HarnessError> {
        let bytes = self
            .registry
            .get(Stage::KeyGeneration, party, "Q_ID")
            .ok_or_else(|| HarnessError::missing(party, "Q_ID"))?;
        self.suite().scalars().from_bytes(bytes).ok_or_else(|| HarnessError::Decode(format!("Q_ID of {party}")))
    }

    fn hold(&mut self, party: PartyId, secret: SecretKind) {
        self.transcript.push(Event::Hold { party, secret });
    }

    fn check(&mut self, stage: Stage, party: PartyId, check: &str, subject: String, ok: bool) {
        self.transcript.push(Event::Check { stage, party, check: check.into(), subject, ok });
    }

    fn send(&mut self, stage: Stage, from: PartyId, to: PartyId, msg: Msg<S>) {
        let (label, payload) = match &msg {
            Msg::IdentityKey(_) => ("S_ID".to_string(), Payload::Secret(SecretKind::IdentityKey { of: to })),
            Msg::VssSubShare(s) => (
                format!("f_{}({})", s.dealer, s.recipient),
                Payload::Secret(SecretKind::VssSubShare { dealer: s.dealer, recipient: s.recipient }),
            ),
            Msg::Warrant { m_w, sig } => (
                "m_w,w".to_string(),
                Payload::Public(format!("{}:{}:{}", hex::encode(m_w), self.g1_hex(&sig.u_w), self.g1_hex(&sig.v_w))),
            ),
            Msg::ProxySubShare(s) => (
                format!("g_{}({})", s.dealer, s.recipient),
                Payload::Secret(SecretKind::ProxySubShare { dealer: s.dealer, recipient: s.recipient }),
            ),
            Msg::RoundOne(r) => {
                (format!("U_{0},Y_{0}", r.index), Payload::Public(format!("{}:{}", self.g1_hex(&r.u), self.g2_hex(&r.y))))
            }
            Msg::Challenge(h) => ("H".to_string(), Payload::Public(hex::encode(self.suite().scalars().to_bytes(h)))),
            Msg::Partial(p) => (
                format!("U_{0},V_{0}", p.index),
                Payload::Public(format!("{}:{}", self.g1_hex(&p.u), self.g1_hex(&p.v))),
            ),
            Msg::Signature(s) => ("sigma".to_string(), Payload::Public(format!("{}:{}", self.g1_hex(&s.u), self.g1_hex(&s.v)))),
        };
        self.transcript.push(Event::Send { stage, from, to, label, payload });
        self.mailboxes.entry(to).or_default().push_back((from, msg));
    }

    /// Delivers the whole mailbox; secret payloads become held by the
    /// recipient at this point.
    fn drain(&mut self, party: PartyId) -> Vec<(PartyId, Msg<S>)> {
        let msgs: Vec<_> = self.mailboxes.remove(&party).unwrap_or_default().into();
        for (_, m) in &msgs {
            let secret = match m {
                Msg::IdentityKey(_) => Some(SecretKind::IdentityKey { of: party }),
                Msg::VssSubShare(s) => Some(SecretKind::VssSubShare { dealer: s.dealer, recipient: s.recipient }),
                Msg::ProxySubShare(s) => Some(SecretKind::ProxySubShare { dealer: s.dealer, recipient: s.recipient }),
                _ => None,
            };
            if let Some(secret) = secret {
                self.hold(party, secret);
            }
        }
        msgs
    }

    fn key_generation(&mut self, master: &MasterKey) -> StageResult {
        let stage = Stage::KeyGeneration;
        let parties: Vec<PartyId> = self.identities.keys().copied().collect();
        for &party in &parties {
            let q = self.params.h1(self.identities[&party].as_bytes());
            self.publish(stage, party, "Q_ID", self.suite().scalars().to_bytes(&q))?;
        }
        for &party in &parties {
            let kp = extract(&self.params, master, &self.identities[&party]);
            self.hold(PartyId::Kgc, SecretKind::IdentityKey { of: party });
            self.send(stage, PartyId::Kgc, party, Msg::IdentityKey(kp));
        }
        for &party in &parties {
            for (_, msg) in self.drain(party) {
                let Msg::IdentityKey(kp) = msg else { continue };
                let ok = kp.is_consistent(&self.params) && kp.public == self.public_key(party)?;
                self.check(stage, party, "identity-key", party.to_string(), ok);
                if !ok {
                    return abort(stage, Some(PartyId::Kgc), format!("inconsistent identity key for {party}"));
                }
                if let PartyId::Proxy(i) = party {
                    self.proxies.get_mut(&i).expect("proxy exists").key = Some(kp.clone());
                }
                self.keys.insert(party, kp);
            }
        }
        Ok(Ok(()))
    }

    fn victim(&self, dealer: usize) -> usize {
        (1..=self.cfg.n).find(|&j| j != dealer).unwrap_or(dealer)
    }

    fn secret_shares(&mut self) -> StageResult {
        let stage = Stage::SecretShares;
        let (t, n) = (self.cfg.t, self.cfg.n);
        let zq = self.suite().scalars().clone();
        let mut own = BTreeMap::new();
        for i in 1..=n {
            let me = PartyId::Proxy(i);
            let mut rng = party_rng(self.cfg.seed, me, stage);
            let (poly, comms) = deal(&self.params, t, n, i, &mut rng)?;
            self.hold(me, SecretKind::VssPolynomial { dealer: i });
            for (l, a) in comms.points.iter().enumerate() {
                self.publish(stage, me, &format!("A_{l}"), self.suite().g1_to_bytes(a))?;
            }
            for j in 1..=n {
                let mut share = subshare(&zq, &poly, j)?;
                if j == self.victim(i) && self.fault.is_some_and(|f| f.hits(FaultKind::BadVssSubshare, me)) {
                    share.value = zq.add(&share.value, &zq.one());
                }
                if j == i {
                    self.hold(me, SecretKind::VssSubShare { dealer: i, recipient: i });
                    own.insert(i, share);
                } else {
                    self.send(stage, me, PartyId::Proxy(j), Msg::VssSubShare(share));
                }
            }
        }
        for j in 1..=n {
            let me = PartyId::Proxy(j);
            let mut received: Vec<SubShare> = self
                .drain(me)
                .into_iter()
                .filter_map(|(_, m)| if let Msg::VssSubShare(s) = m { Some(s) } else { None })
                .collect();
            received.extend(own.remove(&j));
            received.sort_by_key(|s| s.dealer);
            for share in &received {
                let dealer = PartyId::Proxy(share.dealer);
                let points = (0..t).map(|l| self.read_g1(stage, dealer, &format!("A_{l}"))).collect::<Result<_, _>>()?;
                let comms = tproxy_core::vss::FeldmanCommitments { dealer: share.dealer, points };
                let ok = verify_subshare(&self.params, share, &comms);
                self.check(stage, me, "feldman", format!("f_{}({j})", share.dealer), ok);
                if !ok {
                    return abort(stage, Some(dealer), format!("subshare f_{}({j}) fails the commitment check", share.dealer));
                }
            }
            let combined = combine_shares(&self.params, j, n, &received)?;
            self.hold(me, SecretKind::SecretShare { holder: j });
            self.publish(stage, me, "U", self.suite().g1_to_bytes(&combined.u))?;
            self.proxies.get_mut(&j).expect("proxy exists").share = Some(combined);
        }
        Ok(Ok(()))
    }

    fn proxy_shares(&mut self) -> StageResult {
        let stage = Stage::ProxyShares;
        let (t, n) = (self.cfg.t, self.cfg.n);
        let zq = self.suite().scalars().clone();

        let alice = self.keys[&PartyId::Alice].clone();
        let x = compute_x(&zq, &self.public_key(PartyId::Bob)?, &self.public_key(PartyId::Cindy)?)?;
        let warrant = Warrant::new(
            self.cfg.alice.clone(),
            self.cfg.proxies.clone(),
            t,
            x.value().clone(),
            self.cfg.terms.clone(),
        )?
        .to_bytes();
        let mut rng = party_rng(self.cfg.seed, PartyId::Alice, stage);
        self.hold(PartyId::Alice, SecretKind::WarrantNonce);
        let sig = sign_warrant(&self.params, &alice, &warrant, &mut rng);
        self.delegation = Some(sig.clone());
        for i in 1..=n {
            self.send(stage, PartyId::Alice, PartyId::Proxy(i), Msg::Warrant { m_w: warrant.clone(), sig: sig.clone() });
        }

        let q_a = self.public_key(PartyId::Alice)?;
        let mut secrets = BTreeMap::new();
        let mut own = BTreeMap::new();
        for i in 1..=n {
            let me = PartyId::Proxy(i);
            let Some((_, Msg::Warrant { m_w, sig })) = self.drain(me).into_iter().next() else {
                return abort(stage, Some(PartyId::Alice), format!("no warrant delivered to {me}"));
            };
            let accepted = accept_warrant(&self.params, &q_a, &m_w, &sig);
            self.check(stage, me, "warrant", "w".into(), accepted.is_ok());
            let Ok(accepted) = accepted else {
                return abort(stage, Some(PartyId::Alice), "delegation signature rejected".into());
            };
            let key = self.proxies[&i].key.clone().expect("key issued");
            let secret = derive_proxy_secret(&self.params, &key, i, &accepted);
            self.hold(me, SecretKind::ProxySecret { owner: i });
            self.proxies.get_mut(&i).expect("proxy exists").warrant = Some((m_w, accepted));
            secrets.insert(i, (key, secret));
        }
        for i in 1..=n {
            let me = PartyId::Proxy(i);
            let (key, secret) = secrets.remove(&i).expect("proxy secret derived");
            let accepted = self.proxies[&i].warrant.as_ref().expect("warrant accepted").1.clone();
            let mut rng = party_rng(self.cfg.seed, me, stage);
            let (poly, comms) = deal_proxy(&self.params, &secret, t, n, &accepted, &key.public, &mut rng)?;
            self.hold(me, SecretKind::ProxyPolynomial { dealer: i });
            for (l, b) in comms.higher.iter().enumerate() {
                self.publish(stage, me, &format!("B_{}", l + 1), self.suite().g2_to_bytes(b))?;
            }
            for j in 1..=n {
                let mut share = proxy_subshare(self.suite(), &poly, j)?;
                if j == self.victim(i) && self.fault.is_some_and(|f| f.hits(FaultKind::BadProxySubshare, me)) {
                    share.value = self.suite().g1_add(&share.value, &self.suite().generator());
                }
                if j == i {
                    self.hold(me, SecretKind::ProxySubShare { dealer: i, recipient: i });
                    own.insert(i, share);
                } else {
                    self.send(stage, me, PartyId::Proxy(j), Msg::ProxySubShare(share));
                }
            }
        }

        for j in 1..=n {
            let me = PartyId::Proxy(j);
            let mut received: Vec<ProxySubShare<S>> = self
                .drain(me)
                .into_iter()
                .filter_map(|(_, m)| if let Msg::ProxySubShare(s) = m { Some(s) } else { None })
                .collect();
            received.extend(own.remove(&j));
            received.sort_by_key(|s| s.dealer);
            let accepted = self.proxies[&j].warrant.as_ref().expect("warrant accepted").1.clone();
            for share in &received {
                let dealer = PartyId::Proxy(share.dealer);
                let base = proxy_base_commitment(&self.params, &accepted, &self.public_key(dealer)?);
                let higher = (1..t).map(|l| self.read_g2(stage, dealer, &format!("B_{l}"))).collect::<Result<_, _>>()?;
                let comms = ProxyCommitments { dealer: share.dealer, base, higher };
                let ok = verify_proxy_subshare(&self.params, share, &comms);
                self.check(stage, me, "proxy-commitment", format!("g_{}({j})", share.dealer), ok);
                if !ok {
                    return abort(stage, Some(dealer), format!("subshare g_{}({j}) fails the commitment check", share.dealer));
                }
            }
            let key_share = combine_proxy_shares(&self.params, j, n, &received)?;
            self.hold(me, SecretKind::ProxyKeyShare { holder: j });
            self.publish(stage, me, "C", self.suite().g2_to_bytes(&key_share.commitment))?;
            self.proxies.get_mut(&j).expect("proxy exists").key_share = Some(key_share);
        }
        Ok(Ok(()))
    }

    fn signing(&mut self) -> StageResult {
        let stage = Stage::Signing;
        let configured = self.cfg.signer_set();
        let clerk_index = configured[0];
        let clerk = PartyId::Proxy(clerk_index);
        let mut d = configured;
        if let Some(f) = self.fault.filter(|f| f.kind == FaultKind::SmallQuorum) {
            match d.iter().position(|&i| f.target == PartyId::Proxy(i)) {
                Some(k) => {
                    d.remove(k);
                }
                None => {
                    d.pop();
                }
            }
        }
        let signers = SignerSet::new(&d, self.cfg.n)?;
        let message = self.cfg.message.clone().into_bytes();

        for &i in &d {
            let me = PartyId::Proxy(i);
            let state = &self.proxies[&i];
            let (m_w, _) = state.warrant.as_ref().expect("warrant accepted");
            let x = Warrant::from_bytes(m_w)?.verifier_binding;
            let x = self.suite().scalars().reduce(&x);
            let share = state.share.clone().expect("share combined");
            let s_id = state.key.as_ref().expect("key issued").secret.clone();
            let mut y = make_y_share(&self.params, i, &s_id, &share.r, &x).y;
            if self.fault.is_some_and(|f| f.hits(FaultKind::BadYShare, me)) {
                y = self.suite().g2_mul(&y, &self.params.gt_base());
            }
            self.send(stage, me, clerk, Msg::RoundOne(RoundOne { index: i, u: share.u, y }));
        }

        let round_one: Vec<RoundOne<S>> = self
            .drain(clerk)
            .into_iter()
            .filter_map(|(_, m)| if let Msg::RoundOne(r) = m { Some(r) } else { None })
            .collect();
        let ctx = build_context(&self.params, &message, &signers, &round_one)?;
        self.context = Some(ctx.clone());
        for &i in &d {
            self.send(stage, clerk, PartyId::Proxy(i), Msg::Challenge(ctx.h.clone()));
        }

        for &i in &d {
            let me = PartyId::Proxy(i);
            let Some((_, Msg::Challenge(h))) = self.drain(me).into_iter().next() else {
                return abort(stage, Some(clerk), format!("no challenge delivered to {me}"));
            };
            let state = &self.proxies[&i];
            let u_i = state.share.as_ref().expect("share combined").u.clone();
            let sk = state.key_share.as_ref().expect("key share combined").secret.clone();
            let mut partial = partial_sign(&self.params, &h, i, &u_i, &sk);
            if self.fault.is_some_and(|f| f.hits(FaultKind::BadPartialSig, me)) {
                partial.v = self.suite().g1_add(&partial.v, &self.suite().generator());
            }
            self.send(stage, me, clerk, Msg::Partial(partial));
        }

        let partials: Vec<PartialSignature<S>> = self
            .drain(clerk)
            .into_iter()
            .filter_map(|(_, m)| if let Msg::Partial(p) = m { Some(p) } else { None })
            .collect();
        let mut commitments = BTreeMap::new();
        for p in &partials {
            let c_i = self.read_g2(Stage::ProxyShares, PartyId::Proxy(p.index), "C")?;
            let ok = clerk_verify_partial(&self.params, p, &c_i, &ctx.h);
            self.check(stage, clerk, "partial", format!("sigma_{}", p.index), ok);
            commitments.insert(p.index, c_i);
        }
        let (m_w, _) = self.proxies[&clerk_index].warrant.clone().expect("warrant accepted");
        let v_w = self.delegation.as_ref().expect("delegation signed").v_w.clone();
        let sigma = match aggregate(&self.params, &ctx, &m_w, &v_w, &partials, &commitments) {
            Ok(s) => s,
            Err(tproxy_core::Error::RejectedPartial(i)) => {
                return abort(stage, Some(PartyId::Proxy(i)), format!("partial signature of signer {i} rejected"));
            }
            Err(e) => return Err(e.into()),
        };
        self.transcript.push(Event::Signature {
            participants: sigma.participants.clone(),
            n: sigma.n,
            u: self.g1_hex(&sigma.u),
            v: self.g1_hex(&sigma.v),
            v_w: self.g1_hex(&sigma.v_w),
        });
        self.signature = Some(sigma.clone());
        for verifier in [PartyId::Bob, PartyId::Cindy] {
            self.send(stage, clerk, verifier, Msg::Signature(sigma.clone()));
        }
        Ok(Ok(()))
    }

    fn verification(&mut self) -> StageResult {
        let stage = Stage::Verification;
        let n = self.cfg.n;
        let original_signer = self.public_key(PartyId::Alice)?;
        let proxy_keys: Vec<Scalar> = (1..=n).map(|i| self.public_key(PartyId::Proxy(i))).collect::<Result<_, _>>()?;
        let mut registry = BTreeMap::new();
        for i in 1..=n {
            registry.insert(i, self.read_g1(Stage::SecretShares, PartyId::Proxy(i), "U")?);
        }
        for verifier in [PartyId::Bob, PartyId::Cindy] {
            let Some((_, Msg::Signature(sigma))) = self.drain(verifier).into_iter().next() else {
                return abort(stage, None, format!("no signature delivered to {verifier}"));
            };
            let own = if self.fault.is_some_and(|f| f.hits(FaultKind::WrongVerifierKey, verifier)) {
                let mut rng = party_rng(self.cfg.seed, verifier, stage);
                let zq = self.suite().scalars();
                let public = zq.sample_nonzero(&mut rng);
                let secret = self.suite().mul_gen(&zq.sample_nonzero(&mut rng));
                KeyPair { identity: self.identities[&verifier].clone(), public, secret }
            } else {
                self.keys[&verifier].clone()
            };
            let x = Warrant::from_bytes(&sigma.warrant)
                .map(|w| self.suite().scalars().reduce(&w.verifier_binding))
                .unwrap_or_else(|_| self.suite().scalars().zero());
            if let Some(y) = self.y_star_for(&own, &x, &sigma, &registry, &proxy_keys) {
                self.y_star.insert(verifier, y);
            }
            let inputs = VerifyInputs { original_signer: &original_signer, proxy_keys: &proxy_keys, x: &x, registry: &registry };
            let decision = verify(&self.params, &sigma, &inputs, &own);
            self.decisions.insert(verifier, decision);
            self.transcript.push(Event::Decision {
                verifier,
                accept: decision.is_accept(),
                reason: decision.reason().map(|r: RejectReason| r.tag().to_string()),
            });
        }
        Ok(Ok(()))
    }

    fn y_star_for(
        &self,
        own: &KeyPair<S>,
        x: &Scalar,
        sigma: &AggregateSignature<S>,
        registry: &BTreeMap<usize, S::G1>,
        proxy_keys: &[Scalar],
    ) -> Option<S::G2> {
        let zq = self.suite().scalars();
        let eta = lagrange_at_zero(zq, &sigma.participants).ok()?;
        let q_peer = recover_peer(zq, &own.public, x).ok()?;
        compute_y_star(&self.params, own, &q_peer, &eta, registry, proxy_keys).ok()
    }
}
