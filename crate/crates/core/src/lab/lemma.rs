//! Influence upper bound audit.
//!
//! For an ambient centred box of half-width `n` containing the crossing
//! box `[0, k] x [0, m]`, the conditional influence of any edge on the
//! left-right crossing event is bounded by a radius-tail value at the
//! self-dual point:
//!
//! * free boundary, `p <= p_sd`: `J(e) <= (q / p) * eta_k`, where `eta_k`
//!   bounds the probability that some vertex's open cluster reaches
//!   sup-norm distance `floor(k/2)`;
//! * wired boundary, `p >= p_sd`: `J(e) <= (q / p_d) * eta*_{m+1}`, where
//!   `eta*` bounds the probability that some face's cluster of *closed*
//!   edges reaches face distance `floor((m+1)/2)` or the outer face.
//!
//! Both sides are enumerated exactly; the inequality is a theorem, so any
//! violation beyond numerical tolerance is an implementation bug.

use alloc::vec;
use alloc::vec::Vec;

use super::{dual_parameter, self_dual_point, BoundReport};
use crate::error::LabError;
use crate::exact::{event_prob, influence_profile, ClusterCounter, EventSpec, RcParams};
use crate::lattice::{Bc, Direction, GraphKind, LatticeGraph, PathMode, Rect, UnionFind};

/// Numerical tolerance on the (exact) inequality.
pub const LEMMA_TOL: f64 = 1e-9;

/// Result of [`audit_lemma1`]: the bound report plus the full per-edge
/// influence profile it was taken over.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LemmaAudit {
    /// `lhs` is the largest conditional influence, `rhs` the radius-tail
    /// bound for the active regime.
    pub bound: BoundReport,
    /// Conditional influence of every ambient edge on the crossing event.
    pub influences: Vec<f64>,
    /// The radius-tail value entering the bound.
    pub eta_hat: f64,
    /// Distance tested: `floor(k/2)` (free regime) or `floor((m+1)/2)`.
    pub radius: u32,
    /// True when the dual (wired, `p >= p_sd`) form was audited.
    pub wired: bool,
    /// Edges whose influence exceeds the bound beyond tolerance.
    pub violations: u32,
}

/// Face adjacency of the centred box: every unit square face once, plus
/// one outer node; links carry the primal edge whose closure joins the
/// two faces.
struct FaceGrid {
    /// Faces `(i, j)` with `i, j` in `[-n, n-1]`, row-major.
    coords: Vec<(i32, i32)>,
    /// `(face, other face or outer, primal edge)`, each link once.
    links: Vec<(u32, u32, u32)>,
    /// Index of the outer node (`== coords.len()`).
    outer: usize,
}

impl FaceGrid {
    fn build(g: &LatticeGraph, n: u32) -> Self {
        let n = n as i32;
        let side = 2 * n;
        let fid = |i: i32, j: i32| ((i + n) + (j + n) * side) as u32;
        let outer = (side * side) as usize;
        let edge = |ax: i32, ay: i32, bx: i32, by: i32| -> u32 {
            let a = g.vertex_at(ax, ay).expect("face grid vertex");
            let b = g.vertex_at(bx, by).expect("face grid vertex");
            g.edge_between(a, b).expect("face grid edge") as u32
        };
        let mut coords = Vec::with_capacity(outer);
        let mut links = Vec::new();
        for j in -n..n {
            for i in -n..n {
                coords.push((i, j));
                let f = fid(i, j);
                // Right neighbour across the vertical edge at x = i + 1.
                let right = if i + 1 < n { fid(i + 1, j) } else { outer as u32 };
                links.push((f, right, edge(i + 1, j, i + 1, j + 1)));
                // Upper neighbour across the horizontal edge at y = j + 1.
                let up = if j + 1 < n { fid(i, j + 1) } else { outer as u32 };
                links.push((f, up, edge(i, j + 1, i + 1, j + 1)));
                // Outer links across the left and bottom sides of the box.
                if i == -n {
                    links.push((f, outer as u32, edge(-n, j, -n, j + 1)));
                }
                if j == -n {
                    links.push((f, outer as u32, edge(i, -n, i + 1, -n)));
                }
            }
        }
        Self { coords, links, outer }
    }
}

/// For every face `u`, the exact wired-boundary probability at
/// `(p_sd, q)` that the cluster of faces joined to `u` through closed
/// edges reaches face sup-distance `r` from `u` or touches the outer
/// face. Returns the maximum over `u`.
fn dual_radius_tail(
    g: &LatticeGraph,
    n: u32,
    p_sd: f64,
    q: f64,
    r: u32,
) -> Result<f64, LabError> {
    let ne = g.edge_count();
    let grid = FaceGrid::build(g, n);
    let nf = grid.coords.len();
    let mut pow_p = vec![1.0f64; ne + 1];
    let mut pow_1p = vec![1.0f64; ne + 1];
    for i in 1..=ne {
        pow_p[i] = pow_p[i - 1] * p_sd;
        pow_1p[i] = pow_1p[i - 1] * (1.0 - p_sd);
    }
    let nv = g.vertex_count();
    let mut pow_q = vec![1.0f64; nv + 2];
    for i in 1..=nv + 1 {
        pow_q[i] = pow_q[i - 1] * q;
    }
    let mut counter = ClusterCounter::new(g, Bc::Wired);
    let mut uf = UnionFind::new(nf + 1);
    let mut bbox = vec![(0i32, 0i32, 0i32, 0i32); nf + 1];
    let mut seen = vec![false; nf + 1];
    let mut z = 0.0;
    let mut numer = vec![0.0f64; nf];
    for mask in 0..1u64 << ne {
        let o = mask.count_ones() as usize;
        let kc = counter.count(mask);
        let w = pow_p[o] * pow_1p[ne - o] * pow_q[kc];
        z += w;
        uf.reset();
        for &(a, b, e) in &grid.links {
            if mask >> e & 1 == 0 {
                uf.union(a as usize, b as usize);
            }
        }
        // Bounding box of each root's face cluster.
        for s in seen.iter_mut() {
            *s = false;
        }
        for (f, &(i, j)) in grid.coords.iter().enumerate() {
            let root = uf.find(f);
            let bb = &mut bbox[root];
            if seen[root] {
                bb.0 = bb.0.min(i);
                bb.1 = bb.1.max(i);
                bb.2 = bb.2.min(j);
                bb.3 = bb.3.max(j);
            } else {
                *bb = (i, i, j, j);
                seen[root] = true;
            }
        }
        let outer_root = uf.find(grid.outer);
        for (u, &(i, j)) in grid.coords.iter().enumerate() {
            let root = uf.find(u);
            let hit = if root == outer_root {
                true
            } else {
                let (x0, x1, y0, y1) = bbox[root];
                let reach = (i - x0).max(x1 - i).max(j - y0).max(y1 - j);
                reach >= r as i32
            };
            if hit {
                numer[u] += w;
            }
        }
    }
    let top = numer.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok(top / z)
}

/// Audits the influence upper bound on the centred box of half-width `n`
/// for the left-right crossing of `[0, k] x [0, m]`, exactly enumerated.
/// `p <= p_sd` audits the free-boundary primal form; `p > p_sd` the
/// wired-boundary dual form.
pub fn audit_lemma1(k: u32, m: u32, n: u32, p: f64, q: f64) -> Result<LemmaAudit, LabError> {
    if k == 0 || m == 0 {
        return Err(LabError::InvalidParams("crossing box needs k, m >= 1"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(LabError::InvalidParams("influence bound audit needs 0 < p < 1"));
    }
    if !(q >= 1.0) {
        return Err(LabError::InvalidParams("influence bound audit needs q >= 1"));
    }
    if n < k.max(m) {
        return Err(LabError::MarginTooSmall { need: k.max(m), got: n });
    }
    let g = LatticeGraph::build_box(GraphKind::CenteredBox { n })?;
    let p_sd = self_dual_point(q);
    let pd = dual_parameter(p, q);
    let primal = p <= p_sd;
    let bc = if primal { Bc::Free } else { Bc::Wired };
    let event = EventSpec::RectCrossing {
        rect: Rect { x0: 0, y0: 0, x1: k as i32, y1: m as i32 },
        direction: Direction::LeftRight,
        mode: PathMode::OpenPath,
    };
    let profile = influence_profile(&g, &RcParams::new(p, q, bc)?, &event)?;
    let influences = (0..profile.edge_count())
        .map(|s| profile.conditional_influence(s))
        .collect::<Result<Vec<f64>, _>>()?;
    let (eta_hat, radius, factor) = if primal {
        let r = k / 2;
        let eta = if r == 0 {
            1.0
        } else {
            let params = RcParams::new(p_sd, q, Bc::Free)?;
            let mut top = 0.0f64;
            for x in 0..g.vertex_count() {
                let ev = EventSpec::Radius { x, r, mode: PathMode::OpenPath };
                top = top.max(event_prob(&g, &params, &ev)?);
            }
            top
        };
        (eta, r, q / p)
    } else {
        let r = (m + 1) / 2;
        (dual_radius_tail(&g, n, p_sd, q, r)?, r, q / pd)
    };
    let rhs = factor * eta_hat;
    let lhs = influences.iter().fold(0.0f64, |a, &b| a.max(b));
    let violations = influences.iter().filter(|&&j| j > rhs + LEMMA_TOL).count() as u32;
    let bound = BoundReport::upper(
        lhs,
        rhs,
        LEMMA_TOL,
        vec![
            ("p", p),
            ("q", q),
            ("p_sd", p_sd),
            ("p_dual", pd),
            ("k", k as f64),
            ("m", m as f64),
            ("n", n as f64),
            ("eta_hat", eta_hat),
            ("radius", radius as f64),
            ("wired", if primal { 0.0 } else { 1.0 }),
        ],
    );
    Ok(LemmaAudit { bound, influences, eta_hat, radius, wired: !primal, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ExactError;

    #[test]
    fn bound_holds_across_p_q_grid() {
        // Both regimes, several cluster weights; the inequality is a
        // theorem, so violations must be exactly zero.
        let ps = [0.2, 0.35, 0.5, 0.65, 0.8];
        let qs = [1.0, 1.5, 2.0, 4.0];
        let mut audited = 0;
        for &q in &qs {
            for &p in &ps {
                let out = audit_lemma1(1, 1, 1, p, q).unwrap();
                assert_eq!(out.violations, 0, "p={p} q={q}: {:?}", out.bound);
                assert!(out.bound.holds, "p={p} q={q}");
                assert!(out.bound.lhs >= -1e-12, "negative influence at p={p} q={q}");
                audited += 1;
            }
            // The self-dual point itself (primal regime by convention).
            let p = self_dual_point(q);
            let out = audit_lemma1(1, 1, 1, p, q).unwrap();
            assert_eq!(out.violations, 0, "p=p_sd q={q}");
            assert!(!out.wired);
            audited += 1;
        }
        assert_eq!(audited, 24);
    }

    #[test]
    fn regimes_split_at_self_dual_point() {
        let out = audit_lemma1(1, 1, 1, 0.2, 2.0).unwrap();
        assert!(!out.wired);
        assert_eq!(out.radius, 0); // floor(1/2)
        assert_eq!(out.eta_hat, 1.0); // radius-0 event is sure
        let out = audit_lemma1(1, 1, 1, 0.8, 2.0).unwrap();
        assert!(out.wired);
        assert_eq!(out.radius, 1); // floor((1+1)/2)
        assert!(out.eta_hat > 0.0 && out.eta_hat <= 1.0);
    }

    #[test]
    fn influences_are_probabilities_and_lhs_is_max() {
        let out = audit_lemma1(1, 1, 1, 0.5, 1.5).unwrap();
        assert_eq!(out.influences.len(), 12);
        let mut top = 0.0f64;
        for &j in &out.influences {
            assert!((-1e-12..=1.0).contains(&j), "j={j}");
            top = top.max(j);
        }
        assert!((out.bound.lhs - top).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_geometry_and_params() {
        assert!(matches!(
            audit_lemma1(2, 1, 1, 0.5, 1.0),
            Err(LabError::MarginTooSmall { need: 2, got: 1 })
        ));
        assert!(matches!(
            audit_lemma1(0, 1, 1, 0.5, 1.0),
            Err(LabError::InvalidParams(_))
        ));
        assert!(matches!(
            audit_lemma1(1, 1, 1, 0.5, 0.5),
            Err(LabError::InvalidParams(_))
        ));
        // Half-width 2 exceeds the enumeration budget: exact-only audit.
        assert!(matches!(
            audit_lemma1(1, 1, 2, 0.5, 1.0),
            Err(LabError::Exact(ExactError::EdgeBudget { .. }))
        ));
    }
}
