use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// Everything a run needs. Loads from TOML; missing identities get defaults.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub t: usize,
    pub n: usize,
    #[serde(default = "default_suite")]
    pub suite: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_alice")]
    pub alice: String,
    #[serde(default)]
    pub proxies: Vec<String>,
    #[serde(default = "default_bob")]
    pub bob: String,
    #[serde(default = "default_cindy")]
    pub cindy: String,
    #[serde(default = "default_message")]
    pub message: String,
    #[serde(default = "default_terms")]
    pub terms: String,
    /// The signing quorum `D`; defaults to `1..=t`.
    #[serde(default)]
    pub signers: Option<Vec<usize>>,
}

fn default_suite() -> String {
    "transparent".into()
}

fn default_alice() -> String {
    "alice@delegation.test".into()
}

fn default_bob() -> String {
    "bob@verifier.test".into()
}

fn default_cindy() -> String {
    "cindy@verifier.test".into()
}

fn default_message() -> String {
    "transfer 250 credits to account 7731".into()
}

fn default_terms() -> String {
    "sign transfers below 1000 credits".into()
}

pub fn default_proxy(i: usize) -> String {
    format!("proxy-{i}@group.test")
}

impl ProtocolConfig {
    pub fn new(t: usize, n: usize, suite: &str, seed: u64) -> Self {
        ProtocolConfig {
            t,
            n,
            suite: suite.into(),
            seed,
            alice: default_alice(),
            proxies: (1..=n).map(default_proxy).collect(),
            bob: default_bob(),
            cindy: default_cindy(),
            message: default_message(),
            terms: default_terms(),
            signers: None,
        }
    }

    pub fn with_signers(mut self, signers: Vec<usize>) -> Self {
        self.signers = Some(signers);
        self
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let mut cfg: ProtocolConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        if cfg.proxies.is_empty() {
            cfg.proxies = (1..=cfg.n).map(default_proxy).collect();
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// `D`, sorted.
    pub fn signer_set(&self) -> Vec<usize> {
        let mut d = self.signers.clone().unwrap_or_else(|| (1..=self.t).collect());
        d.sort_unstable();
        d
    }

    /// Checks the parts that do not depend on the group order.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.t == 0 || self.t > self.n {
            return bad(format!("need 1 <= t <= n, got t = {}, n = {}", self.t, self.n));
        }
        if self.proxies.len() != self.n {
            return bad(format!("{} proxy identities for n = {}", self.proxies.len(), self.n));
        }
        let mut all: Vec<&str> = vec![&self.alice, &self.bob, &self.cindy];
        all.extend(self.proxies.iter().map(String::as_str));
        for (k, id) in all.iter().enumerate() {
            if id.is_empty() || id.contains('\n') {
                return bad(format!("invalid identity {id:?}"));
            }
            if all[..k].contains(id) {
                return bad(format!("identity {id} used twice"));
            }
        }
        if let Some(d) = &self.signers {
            let set = self.signer_set();
            if set.len() != self.t || set.windows(2).any(|w| w[0] == w[1]) || set.iter().any(|&i| i == 0 || i > self.n) {
                return bad(format!("signers {d:?} are not {} distinct indices in 1..={}", self.t, self.n));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_defaults_and_round_trip() {
        let cfg = ProtocolConfig::from_toml("t = 2\nn = 3\nseed = 42\n").unwrap();
        assert_eq!(cfg, ProtocolConfig::new(2, 3, "transparent", 42));
        assert_eq!(ProtocolConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        assert!(ProtocolConfig::from_toml("t = 2\nn = 3\ncolour = 1\n").is_err());
    }

    #[test]
    fn validation() {
        assert!(ProtocolConfig::new(2, 3, "transparent", 1).validate().is_ok());
        assert!(ProtocolConfig::new(4, 3, "transparent", 1).validate().is_err());
        assert!(ProtocolConfig::new(0, 3, "transparent", 1).validate().is_err());
        assert!(ProtocolConfig::new(2, 3, "transparent", 1).with_signers(vec![1, 3]).validate().is_ok());
        assert!(ProtocolConfig::new(2, 3, "transparent", 1).with_signers(vec![1]).validate().is_err());
        assert!(ProtocolConfig::new(2, 3, "transparent", 1).with_signers(vec![2, 2]).validate().is_err());
        assert!(ProtocolConfig::new(2, 3, "transparent", 1).with_signers(vec![1, 4]).validate().is_err());
        let mut dup = ProtocolConfig::new(2, 3, "transparent", 1);
        dup.bob = dup.alice.clone();
        assert!(dup.validate().is_err());
    }
}
