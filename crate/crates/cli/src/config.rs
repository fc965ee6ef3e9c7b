//! Resolved run configuration: everything one invocation needs, as a JSON
//! document that reproduces the run exactly. Written next to the other
//! artifacts so every output directory is self-describing.

use std::path::PathBuf;

use clap::ValueEnum;
use rclab_core::exact::IsingBc;
use rclab_core::lab::ScanModel;
use rclab_core::lattice::Bc;
use rclab_core::sampler::ChainSpec;
use serde::{Deserialize, Serialize};

/// Version of the JSON config layout; bumped on breaking changes.
pub const CONFIG_SCHEMA: u32 = 1;

/// Cluster-counting rule for the bond models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BcArg {
    /// Clusters counted as they are.
    Free,
    /// Boundary vertices merged into one cluster before counting.
    Wired,
}

impl BcArg {
    pub fn to_core(self) -> Bc {
        match self {
            BcArg::Free => Bc::Free,
            BcArg::Wired => Bc::Wired,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BcArg::Free => "free",
            BcArg::Wired => "wired",
        }
    }
}

/// Boundary rule for the spin model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SpinBcArg {
    Free,
    /// Boundary spins clamped up.
    Plus,
}

impl SpinBcArg {
    pub fn to_core(self) -> IsingBc {
        match self {
            SpinBcArg::Free => IsingBc::Free,
            SpinBcArg::Plus => IsingBc::Plus,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SpinBcArg::Free => "free",
            SpinBcArg::Plus => "plus",
        }
    }
}

/// Control grid `lo:hi:n` with both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: u32,
}

impl GridSpec {
    pub fn parse(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid must have the form lo:hi:n, got {s:?}"));
        }
        let lo: f64 = parts[0]
            .parse()
            .map_err(|_| format!("grid lower endpoint {:?} is not a number", parts[0]))?;
        let hi: f64 = parts[1]
            .parse()
            .map_err(|_| format!("grid upper endpoint {:?} is not a number", parts[1]))?;
        let n: u32 = parts[2]
            .parse()
            .map_err(|_| format!("grid point count {:?} is not a whole number", parts[2]))?;
        Ok(Self { lo, hi, n })
    }

    /// The `n` evenly spaced control values; the endpoints are exact.
    pub fn points(&self) -> Vec<f64> {
        if self.n <= 1 {
            return vec![self.lo];
        }
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i == self.n - 1 {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / last
                }
            })
            .collect()
    }
}

/// Monte Carlo chain settings; thinning is fixed at one sweep per sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainCfg {
    pub seed: u64,
    pub chains: u32,
    pub sweeps: u32,
    pub burnin: u32,
}

impl ChainCfg {
    pub fn to_spec(self) -> ChainSpec {
        ChainSpec::new(self.seed, self.chains, self.burnin, self.sweeps, 1)
    }
}

/// Model for a single-point command (exact enumeration or one estimate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelCfg {
    Rc { p: f64, q: f64, bc: BcArg },
    Ising { beta: f64, h: f64, bc: SpinBcArg },
    Crcm { p: f64, q: f64, alpha: f64, h: f64 },
}

impl ModelCfg {
    /// Value written to the `control` column: edge parameter for the bond
    /// models, external field for the spin and coloured models.
    pub fn control(&self) -> f64 {
        match *self {
            ModelCfg::Rc { p, .. } => p,
            ModelCfg::Ising { h, .. } => h,
            ModelCfg::Crcm { h, .. } => h,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            ModelCfg::Rc { p, q, bc } => format!("rc p={p} q={q} bc={}", bc.label()),
            ModelCfg::Ising { beta, h, bc } => {
                format!("ising beta={beta} h={h} bc={}", bc.label())
            }
            ModelCfg::Crcm { p, q, alpha, h } => {
                format!("crcm p={p} q={q} alpha={alpha} h={h}")
            }
        }
    }
}

/// Model family for a threshold scan; the grid supplies the control value
/// (edge parameter for `rc`, external field for `ising` and `crcm`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScanModelCfg {
    Rc { q: f64, bc: BcArg },
    Ising { beta: f64, bc: SpinBcArg },
    Crcm { p: f64, q: f64, alpha: f64 },
}

impl ScanModelCfg {
    pub fn to_lab(self) -> ScanModel {
        match self {
            ScanModelCfg::Rc { q, bc } => ScanModel::RcCrossing { q, bc: bc.to_core() },
            ScanModelCfg::Ising { beta, bc } => {
                ScanModel::IsingPlusCrossing { beta, bc: bc.to_core() }
            }
            ScanModelCfg::Crcm { p, q, alpha } => ScanModel::CrcmCrossing { p, q, alpha },
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            ScanModelCfg::Rc { q, bc } => format!("rc q={q} bc={} (control: p)", bc.label()),
            ScanModelCfg::Ising { beta, bc } => {
                format!("ising beta={beta} bc={} (control: h)", bc.label())
            }
            ScanModelCfg::Crcm { p, q, alpha } => {
                format!("crcm p={p} q={q} alpha={alpha} (control: h)")
            }
        }
    }
}

/// Which audit to run and its inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum AuditCfg {
    /// Crossing/blocking complement identity between a box and its planar
    /// quotient dual; exact enumeration or two-sided Monte Carlo.
    Duality { k: u32, m: u32, p: f64, q: f64, exact: bool, chain: ChainCfg },
    /// Conditional-influence upper bound from the radius tail at the
    /// self-dual point, enumerated on a centered box of radius `n`.
    Lemma { k: u32, m: u32, n: u32, p: f64, q: f64 },
    /// Two-point window bound `mu_lo(A)(1 - mu_hi(A)) <= kappa^{B (hi-lo)}`
    /// with the constants enumerated over the grid.
    Corollary { k: u32, m: u32, q: f64, bc: BcArg, grid: GridSpec, c: f64 },
}

/// The command with its resolved arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum CommandCfg {
    Enumerate { model: ModelCfg, k: u32, m: u32 },
    Sample { model: ModelCfg, k: u32, m: u32, chain: ChainCfg },
    Scan { model: ScanModelCfg, grid: GridSpec, boxes: Vec<u32>, chain: ChainCfg },
    Audit { audit: AuditCfg },
}

/// One full invocation. Serializing and re-reading this document yields an
/// identical configuration, and identical configurations yield identical
/// artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema: u32,
    pub command: CommandCfg,
    /// Artifact directory; `None` renders to stdout only.
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: CommandCfg, out: Option<PathBuf>) -> Self {
        Self { schema: CONFIG_SCHEMA, command, out }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, String> {
        serde_json::from_str(s).map_err(|e| e.to_string())
    }
}

fn finite(name: &str, v: f64) -> Result<(), String> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(format!("{name} must be finite (got {v})"))
    }
}

fn check_q(q: f64) -> Result<(), String> {
    finite("q", q)?;
    if q > 0.0 {
        Ok(())
    } else {
        Err(format!("q must be positive (got {q})"))
    }
}

fn check_unit_open(name: &str, v: f64) -> Result<(), String> {
    finite(name, v)?;
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(format!("{name} must lie strictly between 0 and 1 (got {v})"))
    }
}

fn check_beta(beta: f64) -> Result<(), String> {
    finite("beta", beta)?;
    if beta >= 0.0 {
        Ok(())
    } else {
        Err(format!("beta must be nonnegative (got {beta})"))
    }
}

fn check_box(k: u32, m_min: u32, m: u32) -> Result<(), String> {
    if k < 1 {
        return Err(format!("box width k must be at least 1 (got {k})"));
    }
    if m < m_min {
        return Err(format!("box height m must be at least {m_min} (got {m})"));
    }
    Ok(())
}

fn check_chain(c: &ChainCfg) -> Result<(), String> {
    if c.chains < 1 {
        return Err(format!("chains must be at least 1 (got {})", c.chains));
    }
    if c.sweeps < 1 {
        return Err(format!("sweeps must be at least 1 (got {})", c.sweeps));
    }
    Ok(())
}

fn check_grid(g: &GridSpec, unit_interval: bool) -> Result<(), String> {
    finite("grid lower endpoint", g.lo)?;
    finite("grid upper endpoint", g.hi)?;
    if g.n < 1 {
        return Err(String::from("grid must have at least 1 point"));
    }
    if g.lo > g.hi {
        return Err(format!("grid endpoints must be ordered (got {}:{})", g.lo, g.hi));
    }
    if g.lo == g.hi && g.n > 1 {
        return Err(String::from("a multi-point grid needs distinct endpoints"));
    }
    if unit_interval && !(g.lo > 0.0 && g.hi < 1.0) {
        return Err(format!(
            "edge-parameter grid must lie strictly between 0 and 1 (got {}:{})",
            g.lo, g.hi
        ));
    }
    Ok(())
}

fn check_model(m: &ModelCfg) -> Result<(), String> {
    match *m {
        ModelCfg::Rc { p, q, .. } => {
            check_unit_open("p", p)?;
            check_q(q)
        }
        ModelCfg::Ising { beta, h, .. } => {
            check_beta(beta)?;
            finite("h", h)
        }
        ModelCfg::Crcm { p, q, alpha, h } => {
            check_unit_open("p", p)?;
            check_q(q)?;
            check_unit_open("alpha", alpha)?;
            finite("h", h)
        }
    }
}

fn check_scan_model(m: &ScanModelCfg) -> Result<(), String> {
    match *m {
        ScanModelCfg::Rc { q, .. } => check_q(q),
        ScanModelCfg::Ising { beta, .. } => check_beta(beta),
        ScanModelCfg::Crcm { p, q, alpha } => {
            check_unit_open("p", p)?;
            check_q(q)?;
            check_unit_open("alpha", alpha)
        }
    }
}

/// Full schema check; the returned message names the offending field.
pub fn validate(cfg: &RunConfig) -> Result<(), String> {
    if cfg.schema != CONFIG_SCHEMA {
        return Err(format!(
            "config schema version {} is not supported (expected {CONFIG_SCHEMA})",
            cfg.schema
        ));
    }
    match &cfg.command {
        CommandCfg::Enumerate { model, k, m } => {
            check_model(model)?;
            check_box(*k, 0, *m)
        }
        CommandCfg::Sample { model, k, m, chain } => {
            check_model(model)?;
            check_box(*k, 0, *m)?;
            check_chain(chain)
        }
        CommandCfg::Scan { model, grid, boxes, chain } => {
            check_scan_model(model)?;
            check_grid(grid, matches!(model, ScanModelCfg::Rc { .. }))?;
            if boxes.is_empty() {
                return Err(String::from("boxes must list at least one size"));
            }
            for &k in boxes {
                if k < 2 {
                    return Err(format!(
                        "each scan box size must be at least 2 (a size-k box spans k by k-1, got {k})"
                    ));
                }
            }
            check_chain(chain)
        }
        CommandCfg::Audit { audit } => match audit {
            AuditCfg::Duality { k, m, p, q, exact, chain } => {
                check_box(*k, 1, *m)?;
                check_unit_open("p", *p)?;
                check_q(*q)?;
                if !exact {
                    check_chain(chain)?;
                }
                Ok(())
            }
            AuditCfg::Lemma { k, m, n, p, q } => {
                check_box(*k, 1, *m)?;
                if *n < 1 {
                    return Err(format!("enumeration radius n must be at least 1 (got {n})"));
                }
                check_unit_open("p", *p)?;
                check_q(*q)?;
                if *q < 1.0 {
                    return Err(format!("the influence bound audit needs q >= 1 (got {q})"));
                }
                Ok(())
            }
            AuditCfg::Corollary { k, m, q, grid, c, .. } => {
                check_box(*k, 1, *m)?;
                check_q(*q)?;
                check_grid(grid, true)?;
                if grid.n < 2 {
                    return Err(format!(
                        "the window bound grid needs at least 2 points (got {})",
                        grid.n
                    ));
                }
                finite("c", *c)?;
                if *c > 0.0 {
                    Ok(())
                } else {
                    Err(format!("c must be positive (got {c})"))
                }
            }
        },
    }
}
