mod artifact;
mod commands;
mod store;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit status 2: bad invocation or unusable input.
/// Exit status 3: a protocol step aborted.
/// Exit status 1: a verifier rejected, or an audit found violations.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Abort(String),
    Reject(String),
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }

    pub fn abort(msg: impl Into<String>) -> Self {
        Failure::Abort(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Reject(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Abort(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "tproxy", version, about = "Identity-based bi-designated-verifier threshold proxy signatures")]
pub struct Cli {
    /// Write artifacts as JSON instead of key = value text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Allow writing artifacts that contain secret keys or shares.
    #[arg(long, global = true)]
    pub insecure_write: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate system parameters and a master key.
    Setup(SetupArgs),
    /// Extract the key pair of an identity.
    Keygen(KeygenArgs),
    /// Deal one party's share of the group secret.
    VssDeal(VssDealArgs),
    /// Check and combine the sub-shares addressed to one party.
    VssCombine(VssCombineArgs),
    /// Sign a warrant as the original signer.
    Delegate(DelegateArgs),
    /// Proxy key distribution.
    #[command(subcommand)]
    ProxyShare(ProxyShareCommand),
    /// Run both signing rounds for a quorum and aggregate.
    Sign(SignArgs),
    /// Verify a signature as one designated verifier.
    Verify(VerifyArgs),
    /// Run the whole protocol in-process.
    Demo(DemoArgs),
    /// Check a transcript for secrets held by the wrong party.
    Audit(AuditArgs),
}

#[derive(Args)]
pub struct SuiteArg {
    /// transparent, transparent-large or curve.
    #[arg(long, env = "TPROXY_SUITE", default_value = "transparent")]
    pub suite: String,
}

#[derive(Args)]
pub struct SetupArgs {
    #[command(flatten)]
    pub suite: SuiteArg,
    /// Seed for the master key; fresh entropy when omitted.
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub master_out: Option<PathBuf>,
}

#[derive(Args)]
pub struct KeygenArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub master: PathBuf,
    #[arg(long)]
    pub identity: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct VssDealArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub dealer: usize,
    #[arg(long)]
    pub seed: Option<String>,
    /// Public registry; created when missing.
    #[arg(long)]
    pub registry: PathBuf,
    /// Directory for the sub-share files, one per recipient.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct VssCombineArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub registry: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub holder: usize,
    /// One sub-share file from each dealer.
    #[arg(long, num_args = 1.., required = true)]
    pub shares: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct DelegateArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// The original signer's key pair.
    #[arg(long)]
    pub key: PathBuf,
    /// Proxy identities in index order, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub proxies: Vec<String>,
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub bob: String,
    #[arg(long)]
    pub cindy: String,
    #[arg(long, default_value = "")]
    pub terms: String,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub warrant_out: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Subcommand)]
pub enum ProxyShareCommand {
    /// Check the delegation and deal this proxy's key share polynomial.
    Deal(ProxyDealArgs),
    /// Check and combine the proxy sub-shares addressed to one party.
    Combine(ProxyCombineArgs),
}

#[derive(Args)]
pub struct WarrantArgs {
    #[arg(long)]
    pub warrant: PathBuf,
    #[arg(long)]
    pub delegation: PathBuf,
}

#[derive(Args)]
pub struct ProxyDealArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[command(flatten)]
    pub warrant: WarrantArgs,
    /// This proxy's key pair.
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long)]
    pub index: usize,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub registry: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct ProxyCombineArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[command(flatten)]
    pub warrant: WarrantArgs,
    #[arg(long)]
    pub registry: PathBuf,
    #[arg(long)]
    pub holder: usize,
    #[arg(long, num_args = 1.., required = true)]
    pub shares: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SignArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[command(flatten)]
    pub warrant: WarrantArgs,
    #[arg(long)]
    pub registry: PathBuf,
    #[arg(long)]
    pub message: String,
    /// Key pairs of the signing proxies.
    #[arg(long, num_args = 1.., required = true)]
    pub keys: Vec<PathBuf>,
    /// Their secret shares from vss-combine.
    #[arg(long, num_args = 1.., required = true)]
    pub vss_shares: Vec<PathBuf>,
    /// Their proxy key shares from proxy-share combine.
    #[arg(long, num_args = 1.., required = true)]
    pub key_shares: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub registry: PathBuf,
    #[arg(long)]
    pub signature: PathBuf,
    /// The verifier's own key pair.
    #[arg(long)]
    pub key: PathBuf,
    /// Expected original signer; taken from the warrant when omitted.
    #[arg(long)]
    pub original_signer: Option<String>,
    /// The other designated verifier; taken from the warrant when omitted.
    #[arg(long)]
    pub peer: Option<String>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct DemoArgs {
    /// TOML protocol configuration; other flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, env = "TPROXY_SUITE")]
    pub suite: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Signing quorum, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub signers: Option<Vec<usize>>,
    /// Inject a fault, written KIND@PARTY, for example bad-partial-sig@proxy-2.
    #[arg(long)]
    pub fault: Option<String>,
    /// Write the JSONL transcript here.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
}

#[derive(Args)]
pub struct AuditArgs {
    /// JSONL transcript from demo.
    #[arg(long)]
    pub transcript: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Abort(m) => eprintln!("abort: {m}"),
                Failure::Reject(m) if !m.is_empty() => eprintln!("{m}"),
                Failure::Reject(_) => {}
            }
            ExitCode::from(f.exit_code())
        }
    }
}
