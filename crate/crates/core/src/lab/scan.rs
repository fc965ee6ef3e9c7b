//! Threshold scans: crossing-probability curves over a control-parameter
//! grid, per-box logistic steepness fits, and the per-sample spin
//! complementarity check for the spin model.
//!
//! A scan is a grid of independent estimation jobs (one per control value
//! and box); job seeds are derived deterministically from the master seed,
//! so a parallel map over [`scan_point`] reproduces the sequential
//! [`threshold_scan`] bit for bit.

use alloc::vec::Vec;

use super::BoundReport;
use crate::error::LabError;
use crate::exact::{
    event_holds_spins, EventSpec, IsingBc, IsingParams, RcParams,
};
use crate::exact::CrcmParams;
use crate::lattice::{Bc, Direction, GraphKind, LatticeGraph, PathMode, SpinConfig};
use crate::math;
use crate::rng::{chain_rng, derive_seed};
use crate::sampler::{
    estimate_event, ising_glauber_sweep, BatchAccumulator, ChainSpec, Estimate, SampleModel,
};

/// Which model family a scan drives, and which parameter the grid varies.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ScanModel {
    /// Random-cluster left-right crossing; the control value is the edge
    /// parameter `p`.
    RcCrossing { q: f64, bc: Bc },
    /// Spin-model plus left-right crossing; the control value is the
    /// external field `h`.
    IsingPlusCrossing { beta: f64, bc: IsingBc },
    /// Coloured-model left-right open crossing of the edge marginal; the
    /// control value is the colour field `h`.
    CrcmCrossing { p: f64, q: f64, alpha: f64 },
}

/// One estimation job of a scan.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScanPoint {
    pub control: f64,
    pub k: u32,
    pub m: u32,
    pub estimate: Estimate,
    /// The derived per-job seed the estimate was produced with.
    pub seed: u64,
    /// Samples violating the plus-crossing/minus-star-crossing
    /// complementarity (spin model only; a theorem, so expected zero).
    pub xor_failures: u64,
}

/// Weighted least-squares line through the logit-transformed estimates.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LogisticFit {
    /// Control value where the fitted curve crosses 1/2.
    pub midpoint: f64,
    /// Slope of the logit line; steepness of the threshold.
    pub slope: f64,
    /// Standard error of the slope under the delta-method weights
    /// (`NaN` when the fit did not converge).
    pub slope_se: f64,
    /// False when fewer than two usable points remain or the system is
    /// singular; the fit is still reported, never dropped.
    pub converged: bool,
    /// Points entering the fit (estimates strictly inside (0, 1) with a
    /// finite positive standard error).
    pub points_used: u32,
}

/// All scan points of one box, with the fit and the monotonicity check.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoxScan {
    pub k: u32,
    pub m: u32,
    pub points: Vec<ScanPoint>,
    pub fit: LogisticFit,
    /// Estimates never decrease along the grid by more than three pooled
    /// standard errors (stochastic monotonicity in the control value).
    pub monotone_3se: bool,
}

/// A full scan: the grid, and one [`BoxScan`] per requested box.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ThresholdScan {
    pub model: ScanModel,
    pub grid: Vec<f64>,
    pub boxes: Vec<BoxScan>,
}

fn validate_grid(model: &ScanModel, grid: &[f64]) -> Result<(), LabError> {
    if grid.is_empty() {
        return Err(LabError::BadGrid("scan grid must not be empty"));
    }
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(LabError::BadGrid("scan grid must be strictly increasing"));
        }
    }
    for &c in grid {
        if !c.is_finite() {
            return Err(LabError::BadGrid("control values must be finite"));
        }
        if matches!(model, ScanModel::RcCrossing { .. }) && !(c > 0.0 && c < 1.0) {
            return Err(LabError::BadGrid("edge-parameter grid must lie inside (0, 1)"));
        }
    }
    Ok(())
}

/// Runs one scan job: the crossing estimate for one control value on one
/// box. `spec.seed` is used as-is; [`threshold_scan`] passes a seed
/// derived from the master seed and the job index.
pub fn scan_point(
    model: &ScanModel,
    control: f64,
    k: u32,
    m: u32,
    spec: &ChainSpec,
) -> Result<ScanPoint, LabError> {
    if k == 0 || m == 0 {
        return Err(LabError::InvalidParams("scan boxes need k, m >= 1"));
    }
    let g = LatticeGraph::build_box(GraphKind::Box { k, m })?;
    let open_crossing =
        EventSpec::Crossing { direction: Direction::LeftRight, mode: PathMode::OpenPath };
    let (estimate, xor_failures) = match model {
        ScanModel::RcCrossing { q, bc } => {
            let params = RcParams::new(control, *q, *bc)?;
            (estimate_event(&g, &SampleModel::Rc(params), &open_crossing, spec)?, 0)
        }
        ScanModel::CrcmCrossing { p, q, alpha } => {
            let params = CrcmParams::new(*p, *q, *alpha, control)?;
            (estimate_event(&g, &SampleModel::CrcmEdges(params), &open_crossing, spec)?, 0)
        }
        ScanModel::IsingPlusCrossing { beta, bc } => {
            let params = IsingParams::new(*beta, control, *bc)?;
            ising_point(&g, &params, spec)?
        }
    };
    Ok(ScanPoint { control, k, m, estimate, seed: spec.seed, xor_failures })
}

/// Spin-model scan job: estimates the plus left-right crossing and checks
/// every retained sample for the complementarity "plus crosses left-right
/// if and only if minus does not star-cross top-bottom".
fn ising_point(
    g: &LatticeGraph,
    params: &IsingParams,
    spec: &ChainSpec,
) -> Result<(Estimate, u64), LabError> {
    spec.validate()?;
    params.validate()?;
    let plus = EventSpec::Crossing { direction: Direction::LeftRight, mode: PathMode::PlusPath };
    let minus_star =
        EventSpec::Crossing { direction: Direction::TopBottom, mode: PathMode::MinusStarPath };
    let mut acc = BatchAccumulator::new(spec.samples_per_chain());
    let mut xor_failures = 0u64;
    for chain in 0..spec.chains {
        let mut rng = chain_rng(spec.seed, chain as u64);
        let mut s = SpinConfig::all_down(g.vertex_count());
        if params.bc == IsingBc::Plus {
            for v in g.boundary_vertices() {
                s.set(v, true);
            }
        }
        for _ in 0..spec.burnin_sweeps {
            ising_glauber_sweep(g, &mut s, params, &mut rng)?;
        }
        let mut since = 0;
        for _ in 0..spec.sample_sweeps {
            ising_glauber_sweep(g, &mut s, params, &mut rng)?;
            since += 1;
            if since == spec.thinning {
                since = 0;
                let a = event_holds_spins(g, &plus, &s)?;
                let b = event_holds_spins(g, &minus_star, &s)?;
                if a == b {
                    xor_failures += 1;
                }
                acc.push(if a { 1.0 } else { 0.0 });
            }
        }
        acc.end_chain();
    }
    Ok((acc.finish(spec.chains), xor_failures))
}

/// Weighted least squares on the logit scale. Points with estimates at 0
/// or 1, or without a finite positive standard error, are excluded;
/// weights are the delta-method inverse variances of the logit values.
pub fn logistic_fit(points: &[ScanPoint]) -> LogisticFit {
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0f64, 0.0, 0.0, 0.0, 0.0);
    let mut used = 0u32;
    for pt in points {
        let p = pt.estimate.mean;
        let se = pt.estimate.std_error;
        if !(p > 0.0 && p < 1.0) || !se.is_finite() || !(se > 0.0) {
            continue;
        }
        let y = math::ln(p / (1.0 - p));
        let d = p * (1.0 - p);
        let w = (d * d) / (se * se);
        let x = pt.control;
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
        used += 1;
    }
    let failed = LogisticFit {
        midpoint: f64::NAN,
        slope: f64::NAN,
        slope_se: f64::NAN,
        converged: false,
        points_used: used,
    };
    if used < 2 {
        return failed;
    }
    let det = sw * sxx - sx * sx;
    if !(det > f64::EPSILON * sw * sxx) {
        return failed;
    }
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let midpoint = -intercept / slope;
    let slope_se = math::sqrt(sw / det);
    let converged = slope.is_finite() && midpoint.is_finite();
    LogisticFit { midpoint, slope, slope_se, converged, points_used: used }
}

/// True when estimates never drop by more than three pooled standard
/// errors between adjacent grid points.
pub fn monotone_up_to_3se(points: &[ScanPoint]) -> bool {
    for w in points.windows(2) {
        let (a, b) = (&w[0].estimate, &w[1].estimate);
        let pooled =
            math::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
        if !pooled.is_finite() {
            continue; // degenerate error bars cannot falsify monotonicity
        }
        if b.mean < a.mean - 3.0 * pooled {
            return false;
        }
    }
    true
}

/// Runs the whole scan: every control value on every box, a logistic fit
/// and monotonicity check per box. Job seeds come from
/// [`derive_seed`]`(spec.seed, job)` with jobs numbered box-major in grid
/// order, so parallel callers can reproduce the exact same points.
pub fn threshold_scan(
    model: &ScanModel,
    grid: &[f64],
    boxes: &[(u32, u32)],
    spec: &ChainSpec,
) -> Result<ThresholdScan, LabError> {
    validate_grid(model, grid)?;
    if boxes.is_empty() {
        return Err(LabError::InvalidParams("scan needs at least one box"));
    }
    spec.validate()?;
    let mut out = Vec::with_capacity(boxes.len());
    for (bi, &(k, m)) in boxes.iter().enumerate() {
        let mut points = Vec::with_capacity(grid.len());
        for (gi, &control) in grid.iter().enumerate() {
            let job = (bi * grid.len() + gi) as u64;
            let pspec = ChainSpec { seed: derive_seed(spec.seed, job), ..*spec };
            points.push(scan_point(model, control, k, m, &pspec)?);
        }
        let fit = logistic_fit(&points);
        let monotone_3se = monotone_up_to_3se(&points);
        out.push(BoxScan { k, m, points, fit, monotone_3se });
    }
    Ok(ThresholdScan { model: *model, grid: grid.to_vec(), boxes: out })
}

/// Compact audit view of a scan's monotonicity invariant, for report
/// emission alongside the bound audits: `lhs` is the largest downward
/// step between adjacent estimates, `rhs` three pooled standard errors at
/// that step.
pub fn scan_monotonicity_report(scan: &ThresholdScan) -> BoundReport {
    let mut worst_drop = 0.0f64;
    let mut worst_tol = 0.0f64;
    for bx in &scan.boxes {
        for w in bx.points.windows(2) {
            let (a, b) = (&w[0].estimate, &w[1].estimate);
            let pooled = math::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
            if !pooled.is_finite() {
                continue;
            }
            let drop = a.mean - b.mean;
            if drop > worst_drop {
                worst_drop = drop;
                worst_tol = 3.0 * pooled;
            }
        }
    }
    BoundReport::upper(
        worst_drop,
        worst_tol,
        0.0,
        alloc::vec![("boxes", scan.boxes.len() as f64), ("grid_len", scan.grid.len() as f64)],
    )
}
