use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::rngs::OsRng;
use rand::RngCore;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};
use tproxy_core::delegation::{
    accept_warrant, combine_proxy_shares, deal_proxy, derive_proxy_secret, proxy_base_commitment, proxy_subshare,
    sign_warrant, verify_proxy_subshare, AcceptedWarrant, DelegationSig, ProxyCommitments, ProxySubShare,
};
use tproxy_core::dvverify::{self, Decision, RejectReason, VerifyInputs};
use tproxy_core::idkgc::{extract, setup, setup_with_master, Identity, SystemParams};
use tproxy_core::pairing::{AnySuite, Pairing};
use tproxy_core::rng::derive_rng;
use tproxy_core::thsign::{
    aggregate, build_context, compute_x, make_y_share, partial_sign, RoundOne, SignerSet,
};
use tproxy_core::vss::{self, combine_shares, subshare, verify_subshare, FeldmanCommitments, SubShare};
use tproxy_core::warrant::Warrant;
use tproxy_core::{with_suite, Error as CoreError};
use tproxy_harness::{confinement_audit, FaultKind, FaultSpec, PartyId, ProtocolConfig, Transcript};

use crate::artifact::{Artifact, Kind};
use crate::store::{self, RegistryFile};
use crate::{
    AuditArgs, Cli, Command, DelegateArgs, DemoArgs, Failure, KeygenArgs, ProxyCombineArgs, ProxyDealArgs,
    ProxyShareCommand, SetupArgs, SignArgs, VerifyArgs, VssCombineArgs, VssDealArgs, WarrantArgs,
};

type Out<T = ()> = Result<T, Failure>;

fn usage_err(e: impl std::fmt::Display) -> Failure {
    Failure::usage(e.to_string())
}

/// Loads the params artifact at `$path` and evaluates `$body` with `$p`
/// bound to the typed system parameters.
macro_rules! with_params {
    ($path:expr, $p:ident => $body:expr) => {{
        let (suite, p_pub) = store::load_params($path)?;
        with_suite!(suite, s => {
            let $p = store::finish_params(s, &p_pub)?;
            $body
        })
    }};
}

pub fn run(cli: &Cli) -> Out {
    match &cli.command {
        Command::Setup(a) => cmd_setup(cli, a),
        Command::Keygen(a) => with_params!(&a.params, p => cmd_keygen(cli, a, &p)),
        Command::VssDeal(a) => with_params!(&a.params, p => cmd_vss_deal(cli, a, &p)),
        Command::VssCombine(a) => with_params!(&a.params, p => cmd_vss_combine(cli, a, &p)),
        Command::Delegate(a) => with_params!(&a.params, p => cmd_delegate(cli, a, &p)),
        Command::ProxyShare(ProxyShareCommand::Deal(a)) => with_params!(&a.params, p => cmd_proxy_deal(cli, a, &p)),
        Command::ProxyShare(ProxyShareCommand::Combine(a)) => {
            with_params!(&a.params, p => cmd_proxy_combine(cli, a, &p))
        }
        Command::Sign(a) => with_params!(&a.params, p => cmd_sign(cli, a, &p)),
        Command::Verify(a) => with_params!(&a.params, p => cmd_verify(cli, a, &p)),
        Command::Demo(a) => cmd_demo(a),
        Command::Audit(a) => cmd_audit(a),
    }
}

/// Secret outputs are refused before any work is done.
fn require_insecure(cli: &Cli, what: &str) -> Out {
    if cli.insecure_write {
        Ok(())
    } else {
        Err(Failure::usage(format!("{what} contains secrets; pass --insecure-write to write it")))
    }
}

fn seed_bytes(seed: &Option<String>) -> Vec<u8> {
    match seed {
        Some(s) => s.as_bytes().to_vec(),
        None => {
            let mut buf = vec![0u8; 32];
            OsRng.fill_bytes(&mut buf);
            buf
        }
    }
}

fn command_rng(domain: &str, seed: &Option<String>, index: usize) -> ChaCha20Rng {
    derive_rng(domain, &[&seed_bytes(seed), &(index as u64).to_be_bytes()])
}

fn ext(cli: &Cli) -> &'static str {
    if cli.json {
        "json"
    } else {
        "txt"
    }
}

fn identity_text(id: &Identity) -> Out<String> {
    String::from_utf8(id.as_bytes().to_vec()).map_err(|_| Failure::usage("identity is not UTF-8"))
}

fn cmd_setup(cli: &Cli, a: &SetupArgs) -> Out {
    if a.master_out.is_some() {
        require_insecure(cli, "the master key")?;
    }
    let suite = AnySuite::preset(&a.suite.suite)
        .ok_or_else(|| Failure::usage(format!("unknown suite {:?}", a.suite.suite)))?;
    let seed = seed_bytes(&a.seed);
    with_suite!(suite, s => {
        let (params, master) = setup(s, &seed).map_err(usage_err)?;
        store::save(&a.out, &store::params_artifact(&params), cli.json, false)?;
        if let Some(path) = &a.master_out {
            let mut m = Artifact::new(Kind::MasterKey);
            m.push_hex("s", &params.suite.scalars().to_bytes(master.secret()));
            store::save(path, &m, cli.json, true)?;
        }
        eprintln!("setup: {} suite, q has {} bits", params.suite.backend(), params.suite.scalars().modulus().bits());
        Ok(())
    })
}

fn cmd_keygen<S: Pairing>(cli: &Cli, a: &KeygenArgs, params: &SystemParams<S>) -> Out {
    require_insecure(cli, "a key pair")?;
    let m = store::load(&a.master, Kind::MasterKey)?;
    let s = store::scalar(&params.suite, &m, "s").map_err(usage_err)?;
    let (check, master) = setup_with_master(params.suite.clone(), s).map_err(usage_err)?;
    if check.p_pub != params.p_pub {
        return Err(Failure::usage("master key does not match P_pub"));
    }
    let identity = Identity::new(a.identity.as_bytes()).map_err(usage_err)?;
    let kp = extract(params, &master, &identity);
    store::save(&a.out, &store::keypair_artifact(params, &kp), cli.json, true)?;
    eprintln!("keygen: {} Q_ID = {}", a.identity, kp.public);
    Ok(())
}

fn sub_share_artifact(layer: &str, dealer: usize, recipient: usize, value: Vec<u8>) -> Artifact {
    let mut s = Artifact::new(Kind::SubShare);
    s.push("layer", layer);
    s.push("dealer", dealer.to_string());
    s.push("recipient", recipient.to_string());
    s.push_hex("value", &value);
    s
}

/// `(dealer, value)` from a sub-share file addressed to `holder`.
fn read_sub_share(path: &Path, layer: &str, holder: usize) -> Out<(usize, Artifact)> {
    let a = store::load(path, Kind::SubShare)?;
    let bad = |e: String| Failure::usage(format!("{}: {e}", path.display()));
    if a.get("layer").map_err(bad)? != layer {
        return Err(bad(format!("not a {layer} sub-share")));
    }
    let recipient = a.get_usize("recipient").map_err(bad)?;
    if recipient != holder {
        return Err(bad(format!("addressed to party {recipient}, not {holder}")));
    }
    Ok((a.get_usize("dealer").map_err(bad)?, a))
}

fn cmd_vss_deal<S: Pairing>(cli: &Cli, a: &VssDealArgs, params: &SystemParams<S>) -> Out {
    require_insecure(cli, "a sub-share")?;
    let mut rng = command_rng("tproxy-cli vss-deal", &a.seed, a.dealer);
    let (poly, commitments) = vss::deal(params, a.t, a.n, a.dealer, &mut rng).map_err(usage_err)?;
    let mut registry = RegistryFile::open(&a.registry)?;
    for (l, point) in commitments.points.iter().enumerate() {
        registry.publish(format!("A/{}/{l}", a.dealer), &params.suite.g1_to_bytes(point))?;
    }
    fs::create_dir_all(&a.out_dir).map_err(usage_err)?;
    let zq = params.suite.scalars();
    for j in 1..=a.n {
        let share = subshare(zq, &poly, j).map_err(usage_err)?;
        let file = a.out_dir.join(format!("vss-{}-to-{j}.{}", a.dealer, ext(cli)));
        store::save(&file, &sub_share_artifact("vss", a.dealer, j, zq.to_bytes(&share.value)), cli.json, true)?;
    }
    registry.save(&a.registry, cli.json)?;
    eprintln!("vss-deal: dealer {} published {} commitments", a.dealer, a.t);
    Ok(())
}

fn cmd_vss_combine<S: Pairing>(cli: &Cli, a: &VssCombineArgs, params: &SystemParams<S>) -> Out {
    require_insecure(cli, "a secret share")?;
    let mut registry = RegistryFile::open(&a.registry)?;
    let suite = &params.suite;
    let mut shares = Vec::new();
    let mut threshold = None;
    for path in &a.shares {
        let (dealer, art) = read_sub_share(path, "vss", a.holder)?;
        let value = store::scalar(suite, &art, "value").map_err(usage_err)?;
        let points = registry
            .sequence(&format!("A/{dealer}/"), 0)
            .into_iter()
            .map(|b| suite.g1_from_bytes(&b).map_err(usage_err))
            .collect::<Out<Vec<_>>>()?;
        if points.is_empty() {
            return Err(Failure::usage(format!("registry has no commitments from dealer {dealer}")));
        }
        if *threshold.get_or_insert(points.len()) != points.len() {
            return Err(Failure::abort(format!("dealer {dealer} committed to a polynomial of the wrong degree")));
        }
        let share = SubShare { dealer, recipient: a.holder, value };
        if !verify_subshare(params, &share, &FeldmanCommitments { dealer, points }) {
            return Err(Failure::abort(format!("sub-share from dealer {dealer} fails its commitment check")));
        }
        shares.push(share);
    }
    let combined = combine_shares(params, a.holder, a.n, &shares).map_err(usage_err)?;
    registry.publish(format!("U/{}", a.holder), &suite.g1_to_bytes(&combined.u))?;
    let mut out = Artifact::new(Kind::Share);
    out.push("layer", "vss");
    out.push("holder", a.holder.to_string());
    out.push_hex("r", &suite.scalars().to_bytes(&combined.r));
    out.push_hex("u", &suite.g1_to_bytes(&combined.u));
    store::save(&a.out, &out, cli.json, true)?;
    registry.save(&a.registry, cli.json)?;
    eprintln!("vss-combine: party {} checked {} sub-shares and published U_{}", a.holder, shares.len(), a.holder);
    Ok(())
}

fn cmd_delegate<S: Pairing>(cli: &Cli, a: &DelegateArgs, params: &SystemParams<S>) -> Out {
    let alice = store::load_keypair(params, &a.key)?;
    let zq = params.suite.scalars();
    vss::check_threshold(zq, a.t, a.proxies.len()).map_err(usage_err)?;
    let x = compute_x(zq, &params.h1(a.bob.as_bytes()), &params.h1(a.cindy.as_bytes())).map_err(usage_err)?;
    let warrant = Warrant::new(identity_text(&alice.identity)?, a.proxies.clone(), a.t, x.value().clone(), &a.terms)
        .map_err(usage_err)?;
    let m_w = warrant.to_bytes();
    let mut rng = command_rng("tproxy-cli delegate", &a.seed, 0);
    let sig = sign_warrant(params, &alice, &m_w, &mut rng);
    let mut w = Artifact::new(Kind::Warrant);
    w.push_hex("m_w", &m_w);
    store::save(&a.warrant_out, &w, cli.json, false)?;
    let mut d = Artifact::new(Kind::Delegation);
    d.push_hex("u_w", &params.suite.g1_to_bytes(&sig.u_w));
    d.push_hex("v_w", &params.suite.g1_to_bytes(&sig.v_w));
    store::save(&a.out, &d, cli.json, false)?;
    eprintln!("delegate: {} delegates to {} proxies with threshold {}", warrant.original_signer, a.proxies.len(), a.t);
    Ok(())
}

struct LoadedWarrant<S: Pairing> {
    warrant: Warrant,
    m_w: Vec<u8>,
    accepted: AcceptedWarrant<S>,
}

/// Reads the warrant and its delegation signature; an invalid signature
/// aborts.
fn load_warrant<S: Pairing>(params: &SystemParams<S>, a: &WarrantArgs) -> Out<LoadedWarrant<S>> {
    let w = store::load(&a.warrant, Kind::Warrant)?;
    let m_w = w.get_hex("m_w").map_err(usage_err)?;
    let warrant = Warrant::from_bytes(&m_w).map_err(usage_err)?;
    let d = store::load(&a.delegation, Kind::Delegation)?;
    let sig = DelegationSig {
        u_w: store::g1(&params.suite, &d, "u_w").map_err(usage_err)?,
        v_w: store::g1(&params.suite, &d, "v_w").map_err(usage_err)?,
    };
    let q_a = params.h1(warrant.original_signer.as_bytes());
    let accepted = accept_warrant(params, &q_a, &m_w, &sig)
        .map_err(|_| Failure::abort(format!("delegation signature from {} does not verify", warrant.original_signer)))?;
    Ok(LoadedWarrant { warrant, m_w, accepted })
}

/// The warrant position of the key pair's identity, as a 1-based index.
fn proxy_index(warrant: &Warrant, identity: &Identity) -> Out<usize> {
    let id = identity_text(identity)?;
    warrant
        .proxies
        .iter()
        .position(|p| *p == id)
        .map(|i| i + 1)
        .ok_or_else(|| Failure::usage(format!("{id} is not a proxy signer in this warrant")))
}

fn cmd_proxy_deal<S: Pairing>(cli: &Cli, a: &ProxyDealArgs, params: &SystemParams<S>) -> Out {
    require_insecure(cli, "a proxy sub-share")?;
    let key = store::load_keypair(params, &a.key)?;
    let lw = load_warrant(params, &a.warrant)?;
    if proxy_index(&lw.warrant, &key.identity)? != a.index {
        return Err(Failure::usage(format!("the warrant lists this key at a different index than {}", a.index)));
    }
    let (t, n) = (lw.warrant.threshold, lw.warrant.group_size());
    let secret = derive_proxy_secret(params, &key, a.index, &lw.accepted);
    let mut rng = command_rng("tproxy-cli proxy-deal", &a.seed, a.index);
    let (poly, commitments) =
        deal_proxy(params, &secret, t, n, &lw.accepted, &key.public, &mut rng).map_err(usage_err)?;
    let mut registry = RegistryFile::open(&a.registry)?;
    for (l, b) in commitments.higher.iter().enumerate() {
        registry.publish(format!("B/{}/{}", a.index, l + 1), &params.suite.g2_to_bytes(b))?;
    }
    fs::create_dir_all(&a.out_dir).map_err(usage_err)?;
    for j in 1..=n {
        let share = proxy_subshare(&params.suite, &poly, j).map_err(usage_err)?;
        let file = a.out_dir.join(format!("proxy-{}-to-{j}.{}", a.index, ext(cli)));
        let art = sub_share_artifact("proxy", a.index, j, params.suite.g1_to_bytes(&share.value));
        store::save(&file, &art, cli.json, true)?;
    }
    registry.save(&a.registry, cli.json)?;
    eprintln!("proxy-share deal: proxy {} published {} commitments", a.index, t - 1);
    Ok(())
}

fn cmd_proxy_combine<S: Pairing>(cli: &Cli, a: &ProxyCombineArgs, params: &SystemParams<S>) -> Out {
    require_insecure(cli, "a proxy key share")?;
    let lw = load_warrant(params, &a.warrant)?;
    let (t, n) = (lw.warrant.threshold, lw.warrant.group_size());
    let mut registry = RegistryFile::open(&a.registry)?;
    let suite = &params.suite;
    let mut shares = Vec::new();
    for path in &a.shares {
        let (dealer, art) = read_sub_share(path, "proxy", a.holder)?;
        if dealer == 0 || dealer > n {
            return Err(Failure::usage(format!("{}: dealer {dealer} is not in the group", path.display())));
        }
        let value = store::g1(suite, &art, "value").map_err(usage_err)?;
        let higher = registry
            .sequence(&format!("B/{dealer}/"), 1)
            .into_iter()
            .map(|b| suite.g2_from_bytes(&b).map_err(usage_err))
            .collect::<Out<Vec<_>>>()?;
        if higher.len() != t - 1 {
            return Err(Failure::usage(format!(
                "registry holds {} commitments from proxy {dealer}, expected {}",
                higher.len(),
                t - 1
            )));
        }
        let q_pi = params.h1(lw.warrant.proxies[dealer - 1].as_bytes());
        let base = proxy_base_commitment(params, &lw.accepted, &q_pi);
        let share = ProxySubShare { dealer, recipient: a.holder, value };
        if !verify_proxy_subshare(params, &share, &ProxyCommitments { dealer, base, higher }) {
            return Err(Failure::abort(format!("proxy sub-share from dealer {dealer} fails its commitment check")));
        }
        shares.push(share);
    }
    let key_share = combine_proxy_shares(params, a.holder, n, &shares).map_err(usage_err)?;
    registry.publish(format!("C/{}", a.holder), &suite.g2_to_bytes(&key_share.commitment))?;
    let mut out = Artifact::new(Kind::Share);
    out.push("layer", "proxy");
    out.push("holder", a.holder.to_string());
    out.push_hex("sk", &suite.g1_to_bytes(&key_share.secret));
    out.push_hex("c", &suite.g2_to_bytes(&key_share.commitment));
    store::save(&a.out, &out, cli.json, true)?;
    registry.save(&a.registry, cli.json)?;
    eprintln!("proxy-share combine: proxy {} published C_{}", a.holder, a.holder);
    Ok(())
}

/// Share artifacts of one layer, keyed by holder.
fn load_shares(paths: &[PathBuf], layer: &str) -> Out<BTreeMap<usize, Artifact>> {
    let mut out = BTreeMap::new();
    for path in paths {
        let a = store::load(path, Kind::Share)?;
        let bad = |e: String| Failure::usage(format!("{}: {e}", path.display()));
        if a.get("layer").map_err(bad)? != layer {
            return Err(bad(format!("not a {layer} share")));
        }
        let holder = a.get_usize("holder").map_err(bad)?;
        if out.insert(holder, a).is_some() {
            return Err(bad(format!("second {layer} share for party {holder}")));
        }
    }
    Ok(out)
}

fn cmd_sign<S: Pairing>(cli: &Cli, a: &SignArgs, params: &SystemParams<S>) -> Out {
    let lw = load_warrant(params, &a.warrant)?;
    let (t, n) = (lw.warrant.threshold, lw.warrant.group_size());
    let suite = &params.suite;
    let mut keys = BTreeMap::new();
    for path in &a.keys {
        let kp = store::load_keypair(params, path)?;
        keys.insert(proxy_index(&lw.warrant, &kp.identity)?, kp);
    }
    let vss_shares = load_shares(&a.vss_shares, "vss")?;
    let key_shares = load_shares(&a.key_shares, "proxy")?;
    let indices: Vec<usize> = keys.keys().copied().collect();
    if vss_shares.keys().ne(keys.keys()) || key_shares.keys().ne(keys.keys()) {
        return Err(Failure::usage("key pairs, secret shares and key shares must cover the same signers"));
    }
    let signers = SignerSet::new(&indices, n).map_err(usage_err)?;
    if signers.len() < t {
        return Err(Failure::usage(format!("{} signers cannot meet threshold {t}", signers.len())));
    }
    let x = suite.scalars().reduce(&lw.warrant.verifier_binding);
    let mut round_one = Vec::new();
    let mut sks = BTreeMap::new();
    for &i in &indices {
        let r = store::scalar(suite, &vss_shares[&i], "r").map_err(usage_err)?;
        let u = store::g1(suite, &vss_shares[&i], "u").map_err(usage_err)?;
        let y = make_y_share(params, i, &keys[&i].secret, &r, &x).y;
        round_one.push(RoundOne { index: i, u, y });
        sks.insert(i, store::g1(suite, &key_shares[&i], "sk").map_err(usage_err)?);
    }
    let ctx = build_context(params, a.message.as_bytes(), &signers, &round_one).map_err(usage_err)?;
    let partials: Vec<_> = indices.iter().map(|&i| partial_sign(params, &ctx.h, i, &ctx.u_shares[&i], &sks[&i])).collect();
    let registry = RegistryFile::open(&a.registry)?;
    let mut commitments = BTreeMap::new();
    for &i in &indices {
        let c = suite.g2_from_bytes(&registry.bytes(&format!("C/{i}"))?).map_err(usage_err)?;
        commitments.insert(i, c);
    }
    let sigma = aggregate(params, &ctx, &lw.m_w, &lw.accepted.signature().v_w, &partials, &commitments).map_err(
        |e| match e {
            CoreError::RejectedPartial(i) => Failure::abort(format!("partial signature from proxy {i} fails the clerk check")),
            other => usage_err(other),
        },
    )?;
    store::save(&a.out, &store::signature_artifact(suite, &sigma), cli.json, false)?;
    eprintln!("sign: proxies {} of {n} signed, clerk {}", store::join_indices(&indices), indices[0]);
    Ok(())
}

fn cmd_verify<S: Pairing>(cli: &Cli, a: &VerifyArgs, params: &SystemParams<S>) -> Out {
    let own = store::load_keypair(params, &a.key)?;
    let me = identity_text(&own.identity)?;
    let registry = RegistryFile::open(&a.registry)?;
    let mut u_shares = BTreeMap::new();
    for (i, bytes) in registry.indexed("U/")? {
        u_shares.insert(i, params.suite.g1_from_bytes(&bytes).map_err(usage_err)?);
    }
    let raw = fs::read(&a.signature).map_err(|e| Failure::usage(format!("cannot read {}: {e}", a.signature.display())))?;
    let digest = hex::encode(Sha256::digest(&raw));
    let sigma = std::str::from_utf8(&raw)
        .map_err(|e| e.to_string())
        .and_then(Artifact::parse)
        .and_then(|art| store::parse_signature(&params.suite, &art));
    let reason = match sigma {
        Err(_) => Some("malformed-signature"),
        Ok(sigma) => match Warrant::from_bytes(&sigma.warrant) {
            Err(_) => Some(RejectReason::WarrantMismatch.tag()),
            Ok(w) => {
                let signer = a.original_signer.as_deref().unwrap_or(&w.original_signer);
                let q_a = params.h1(signer.as_bytes());
                let proxy_keys: Vec<_> = w.proxies.iter().map(|p| params.h1(p.as_bytes())).collect();
                let zq = params.suite.scalars();
                let x = match &a.peer {
                    Some(peer) => compute_x(zq, &own.public, &params.h1(peer.as_bytes())).map_err(usage_err)?,
                    None => zq.reduce(&w.verifier_binding),
                };
                let inputs =
                    VerifyInputs { original_signer: &q_a, proxy_keys: &proxy_keys, x: &x, registry: &u_shares };
                match dvverify::verify(params, &sigma, &inputs, &own) {
                    Decision::Accept => None,
                    Decision::Reject(r) => Some(r.tag()),
                }
            }
        },
    };
    match reason {
        None => println!("{me}: accept"),
        Some(r) => println!("{me}: reject ({r})"),
    }
    if let Some(path) = &a.report {
        let mut rep = Artifact::new(Kind::Report);
        rep.push("signature_sha256", digest);
        rep.push_hex("verifier", own.identity.as_bytes());
        rep.push("decision", if reason.is_none() { "accept" } else { "reject" });
        if let Some(r) = reason {
            rep.push("reason", r);
        }
        store::save(path, &rep, cli.json, false)?;
    }
    match reason {
        None => Ok(()),
        Some(_) => Err(Failure::Reject(String::new())),
    }
}

fn demo_config(a: &DemoArgs) -> Out<ProtocolConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            ProtocolConfig::from_toml(&text).map_err(usage_err)?
        }
        None => {
            let (Some(t), Some(n)) = (a.t, a.n) else {
                return Err(Failure::usage("demo needs --t and --n, or --config"));
            };
            ProtocolConfig::new(t, n, "transparent", 0)
        }
    };
    if let Some(t) = a.t {
        cfg.t = t;
    }
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(s) = &a.suite {
        cfg.suite = s.clone();
    }
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(signers) = &a.signers {
        cfg.signers = Some(signers.clone());
    }
    cfg.validate().map_err(usage_err)?;
    Ok(cfg)
}

fn parse_fault(spec: &str) -> Out<FaultSpec> {
    let (kind, target) = spec
        .split_once('@')
        .ok_or_else(|| Failure::usage(format!("fault {spec:?} should look like KIND@PARTY")))?;
    let kind = FaultKind::from_name(kind).ok_or_else(|| {
        let names: Vec<_> = FaultKind::ALL.iter().map(|k| k.name()).collect();
        Failure::usage(format!("unknown fault {kind:?}; expected one of {}", names.join(", ")))
    })?;
    let target: PartyId = target.parse().map_err(|_| Failure::usage(format!("unknown party {target:?}")))?;
    Ok(FaultSpec::new(kind, target))
}

fn cmd_demo(a: &DemoArgs) -> Out {
    let cfg = demo_config(a)?;
    let fault = a.fault.as_deref().map(parse_fault).transpose()?;
    let transcript = tproxy_harness::run(&cfg, fault).map_err(usage_err)?;
    if let Some(path) = &a.transcript {
        fs::write(path, transcript.to_jsonl()).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some((stage, culprit, reason)) = transcript.abort() {
        let who = culprit.map(|c| format!(" ({c})")).unwrap_or_default();
        return Err(Failure::abort(format!("{} stage{who}: {reason}", stage.label())));
    }
    let mut all_accept = true;
    for (verifier, accept, reason) in transcript.decisions() {
        match (accept, reason) {
            (true, _) => println!("{verifier}: accept"),
            (false, r) => {
                all_accept = false;
                println!("{verifier}: reject ({})", r.unwrap_or("unspecified"));
            }
        }
    }
    if all_accept {
        Ok(())
    } else {
        Err(Failure::Reject(String::new()))
    }
}

fn cmd_audit(a: &AuditArgs) -> Out {
    let text = fs::read_to_string(&a.transcript)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", a.transcript.display())))?;
    let transcript = Transcript::from_jsonl(&text).map_err(|e| Failure::usage(format!("bad transcript: {e}")))?;
    let violations = confinement_audit(&transcript);
    if violations.is_empty() {
        println!("audit: no violations in {} events", transcript.events.len());
        return Ok(());
    }
    for v in &violations {
        println!("violation: {v}");
    }
    Err(Failure::Reject(format!("audit: {} violations", violations.len())))
}
