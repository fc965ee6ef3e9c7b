//! `rclab`: exact and Monte Carlo numerics for bond-cluster and spin
//! models on small planar boxes. Four subcommands: `enumerate` (exact
//! probabilities), `sample` (one Monte Carlo estimate), `scan` (crossing
//! probabilities over a control grid and box sizes), and `audit`
//! (identity and inequality checks with machine-readable slack).
//!
//! Exit codes: 0 success, 1 a verified bound failed to hold, 2 invalid
//! configuration or filesystem trouble. Identical configuration and seed
//! produce byte-identical artifacts.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rclab::config::{
    self, AuditCfg, BcArg, ChainCfg, CommandCfg, GridSpec, ModelCfg, RunConfig, ScanModelCfg,
    SpinBcArg,
};
use rclab::{artifact, run};

#[derive(Parser)]
#[command(name = "rclab", version, about, max_term_width = 100)]
struct Cli {
    /// Artifact directory (defaults to $RCLAB_OUT when set; stdout only otherwise)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact event probability by full enumeration on a small box
    #[command(subcommand)]
    Enumerate(PointCmd),
    /// Monte Carlo crossing estimate on one box
    #[command(subcommand)]
    Sample(SamplePointCmd),
    /// Crossing-probability scan over a control grid and box sizes
    #[command(subcommand)]
    Scan(ScanCmd),
    /// Identity and inequality audits with machine-readable slack
    #[command(subcommand)]
    Audit(AuditCmd),
}

#[derive(Args, Clone, Copy)]
struct BoxArgs {
    /// Box width (vertices span 0..=k horizontally)
    #[arg(long)]
    k: u32,
    /// Box height (vertices span 0..=m vertically)
    #[arg(long)]
    m: u32,
}

#[derive(Args, Clone, Copy)]
struct ChainArgs {
    /// Master seed for the deterministic random streams
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Independent chains
    #[arg(long, default_value_t = 2)]
    chains: u32,
    /// Retained sweeps per chain (one sample per sweep)
    #[arg(long, default_value_t = 2000)]
    sweeps: u32,
    /// Discarded warm-up sweeps per chain
    #[arg(long, default_value_t = 200)]
    burnin: u32,
}

impl ChainArgs {
    fn to_cfg(self) -> ChainCfg {
        ChainCfg { seed: self.seed, chains: self.chains, sweeps: self.sweeps, burnin: self.burnin }
    }
}

#[derive(Args, Clone, Copy)]
struct RcModelArgs {
    /// Edge parameter
    #[arg(long)]
    p: f64,
    /// Cluster weight
    #[arg(long)]
    q: f64,
    /// Cluster-counting boundary condition
    #[arg(long, value_enum, default_value_t = BcArg::Free)]
    bc: BcArg,
}

#[derive(Args, Clone, Copy)]
struct IsingModelArgs {
    /// Inverse temperature
    #[arg(long)]
    beta: f64,
    /// External field
    #[arg(long, allow_hyphen_values = true)]
    h: f64,
    /// Boundary spins free or clamped up
    #[arg(long, value_enum, default_value_t = SpinBcArg::Free)]
    bc: SpinBcArg,
}

#[derive(Args, Clone, Copy)]
struct CrcmModelArgs {
    /// Edge parameter
    #[arg(long)]
    p: f64,
    /// Cluster weight
    #[arg(long)]
    q: f64,
    /// Colour bias
    #[arg(long)]
    alpha: f64,
    /// External field
    #[arg(long, allow_hyphen_values = true)]
    h: f64,
}

/// Model arguments for `enumerate`.
#[derive(Subcommand)]
enum PointCmd {
    /// Bond-cluster model: left-right open crossing
    Rc {
        #[command(flatten)]
        size: BoxArgs,
        #[command(flatten)]
        model: RcModelArgs,
    },
    /// Spin model: left-right plus-spin crossing
    Ising {
        #[command(flatten)]
        size: BoxArgs,
        #[command(flatten)]
        model: IsingModelArgs,
    },
    /// Coloured-cluster model: left-right open crossing of the bond layer
    Crcm {
        #[command(flatten)]
        size: BoxArgs,
        #[command(flatten)]
        model: CrcmModelArgs,
    },
}

impl PointCmd {
    fn into_parts(self) -> (ModelCfg, BoxArgs) {
        match self {
            PointCmd::Rc { size, model } => {
                (ModelCfg::Rc { p: model.p, q: model.q, bc: model.bc }, size)
            }
            PointCmd::Ising { size, model } => {
                (ModelCfg::Ising { beta: model.beta, h: model.h, bc: model.bc }, size)
            }
            PointCmd::Crcm { size, model } => (
                ModelCfg::Crcm { p: model.p, q: model.q, alpha: model.alpha, h: model.h },
                size,
            ),
        }
    }
}

/// Model arguments for `sample` (point model plus chain settings).
#[derive(Subcommand)]
enum SamplePointCmd {
    /// Bond-cluster model: left-right open crossing
    Rc {
        #[command(flatten)]
        size: BoxArgs,
        #[command(flatten)]
        model: RcModelArgs,
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// Spin model: left-right plus-spin crossing
    Ising {
        #[command(flatten)]
        size: BoxArgs,
        #[command(flatten)]
        model: IsingModelArgs,
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// Coloured-cluster model: left-right open crossing of the bond layer
    Crcm {
        #[command(flatten)]
        size: BoxArgs,
        #[command(flatten)]
        model: CrcmModelArgs,
        #[command(flatten)]
        chain: ChainArgs,
    },
}

#[derive(Args, Clone)]
struct ScanArgs {
    /// Control grid lo:hi:n, endpoints included
    #[arg(long, value_parser = GridSpec::parse)]
    grid: GridSpec,
    /// Comma-separated box sizes; size k spans k by k-1
    #[arg(long, value_delimiter = ',', required = true)]
    boxes: Vec<u32>,
    #[command(flatten)]
    chain: ChainArgs,
}

#[derive(Subcommand)]
enum ScanCmd {
    /// Bond-cluster crossings on a grid of edge parameters
    Rc {
        /// Cluster weight
        #[arg(long)]
        q: f64,
        /// Cluster-counting boundary condition
        #[arg(long, value_enum, default_value_t = BcArg::Free)]
        bc: BcArg,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Spin-model plus crossings on a grid of external fields
    Ising {
        /// Inverse temperature
        #[arg(long)]
        beta: f64,
        /// Boundary spins free or clamped up
        #[arg(long, value_enum, default_value_t = SpinBcArg::Free)]
        bc: SpinBcArg,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Coloured-model bond crossings on a grid of external fields
    Crcm {
        /// Edge parameter
        #[arg(long)]
        p: f64,
        /// Cluster weight
        #[arg(long)]
        q: f64,
        /// Colour bias
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        scan: ScanArgs,
    },
}

#[derive(Subcommand)]
enum AuditCmd {
    /// Crossing/blocking complement identity with the quotient dual
    Duality {
        #[command(flatten)]
        size: BoxArgs,
        /// Edge parameter
        #[arg(long)]
        p: f64,
        /// Cluster weight
        #[arg(long)]
        q: f64,
        /// Enumerate both sides instead of sampling them
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// Conditional-influence bound from the self-dual radius tail
    Lemma {
        #[command(flatten)]
        size: BoxArgs,
        /// Radius of the centered box the bound is enumerated on
        #[arg(long)]
        n: u32,
        /// Edge parameter
        #[arg(long)]
        p: f64,
        /// Cluster weight
        #[arg(long)]
        q: f64,
    },
    /// Window bound between the grid endpoints
    Corollary {
        #[command(flatten)]
        size: BoxArgs,
        /// Cluster weight
        #[arg(long)]
        q: f64,
        /// Cluster-counting boundary condition
        #[arg(long, value_enum, default_value_t = BcArg::Free)]
        bc: BcArg,
        /// Edge-parameter window and integration grid lo:hi:n
        #[arg(long, value_parser = GridSpec::parse)]
        grid: GridSpec,
        /// Influence constant in the exponent
        #[arg(long, default_value_t = 0.1)]
        c: f64,
    },
}

fn build_command(cmd: Cmd) -> CommandCfg {
    match cmd {
        Cmd::Enumerate(point) => {
            let (model, size) = point.into_parts();
            CommandCfg::Enumerate { model, k: size.k, m: size.m }
        }
        Cmd::Sample(point) => match point {
            SamplePointCmd::Rc { size, model, chain } => CommandCfg::Sample {
                model: ModelCfg::Rc { p: model.p, q: model.q, bc: model.bc },
                k: size.k,
                m: size.m,
                chain: chain.to_cfg(),
            },
            SamplePointCmd::Ising { size, model, chain } => CommandCfg::Sample {
                model: ModelCfg::Ising { beta: model.beta, h: model.h, bc: model.bc },
                k: size.k,
                m: size.m,
                chain: chain.to_cfg(),
            },
            SamplePointCmd::Crcm { size, model, chain } => CommandCfg::Sample {
                model: ModelCfg::Crcm {
                    p: model.p,
                    q: model.q,
                    alpha: model.alpha,
                    h: model.h,
                },
                k: size.k,
                m: size.m,
                chain: chain.to_cfg(),
            },
        },
        Cmd::Scan(scan) => match scan {
            ScanCmd::Rc { q, bc, scan } => CommandCfg::Scan {
                model: ScanModelCfg::Rc { q, bc },
                grid: scan.grid,
                boxes: scan.boxes,
                chain: scan.chain.to_cfg(),
            },
            ScanCmd::Ising { beta, bc, scan } => CommandCfg::Scan {
                model: ScanModelCfg::Ising { beta, bc },
                grid: scan.grid,
                boxes: scan.boxes,
                chain: scan.chain.to_cfg(),
            },
            ScanCmd::Crcm { p, q, alpha, scan } => CommandCfg::Scan {
                model: ScanModelCfg::Crcm { p, q, alpha },
                grid: scan.grid,
                boxes: scan.boxes,
                chain: scan.chain.to_cfg(),
            },
        },
        Cmd::Audit(audit) => CommandCfg::Audit {
            audit: match audit {
                AuditCmd::Duality { size, p, q, exact, chain } => AuditCfg::Duality {
                    k: size.k,
                    m: size.m,
                    p,
                    q,
                    exact,
                    chain: chain.to_cfg(),
                },
                AuditCmd::Lemma { size, n, p, q } => {
                    AuditCfg::Lemma { k: size.k, m: size.m, n, p, q }
                }
                AuditCmd::Corollary { size, q, bc, grid, c } => {
                    AuditCfg::Corollary { k: size.k, m: size.m, q, bc, grid, c }
                }
            },
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.or_else(|| std::env::var_os("RCLAB_OUT").map(PathBuf::from));
    let cfg = RunConfig::new(build_command(cli.command), out);
    if let Err(msg) = config::validate(&cfg) {
        eprintln!("invalid configuration: {msg}");
        return ExitCode::from(2);
    }
    match run::execute(&cfg) {
        Ok(run::RunOutcome::Ok) => ExitCode::SUCCESS,
        Ok(run::RunOutcome::AuditFailed) => ExitCode::from(1),
        Err(artifact::Failure::Invalid(msg)) => {
            eprintln!("invalid configuration: {msg}");
            ExitCode::from(2)
        }
        Err(artifact::Failure::Io { path, err }) => {
            eprintln!("filesystem error at {}: {err}", path.display());
            ExitCode::from(2)
        }
    }
}
