//! Randomised invariant checks: theorems that hold for every configuration
//! are exercised on random masks and parameters rather than exhaustively.

use proptest::prelude::*;
use rclab_core::exact::{event_prob, EventSpec, RcParams};
use rclab_core::lattice::{clusters, dual_box, dual_config, has_crossing, StateRef};
use rclab_core::{Bc, Direction, EdgeConfig, GraphKind, LatticeGraph, PathMode};

fn lr_open() -> EventSpec {
    EventSpec::Crossing { direction: Direction::LeftRight, mode: PathMode::OpenPath }
}

fn graph_pool() -> Vec<LatticeGraph> {
    [
        GraphKind::Box { k: 2, m: 2 },
        GraphKind::Box { k: 3, m: 1 },
        GraphKind::Box { k: 3, m: 2 },
        GraphKind::CenteredBox { n: 1 },
    ]
    .into_iter()
    .map(|kind| LatticeGraph::build_box(kind).unwrap())
    .collect()
}

proptest! {
    // Box(4, 3) has 31 edges, beyond exhaustion; random configurations
    // must still satisfy the crossing complementarity exactly.
    #[test]
    fn crossing_complementarity_on_random_configs(mask in any::<u64>()) {
        let g = LatticeGraph::build_box(GraphKind::Box { k: 4, m: 3 }).unwrap();
        let (d, pairing) = dual_box(&g).unwrap();
        let ne = g.edge_count();
        let cfg = EdgeConfig::from_mask(mask & ((1u64 << ne) - 1), ne);
        let dual = dual_config(&cfg, &pairing).unwrap();
        let lr = has_crossing(&g, StateRef::Edges(&cfg), Direction::LeftRight, PathMode::OpenPath)
            .unwrap();
        let tb = has_crossing(&d, StateRef::Edges(&dual), Direction::TopBottom, PathMode::OpenPath)
            .unwrap();
        prop_assert!(lr != tb, "both or neither crossing on mask {mask:#x}");
    }

    // Merging the boundary can only reduce the number of clusters.
    #[test]
    fn wired_count_never_exceeds_free_count(which in 0usize..4, mask in any::<u64>()) {
        let g = &graph_pool()[which];
        let ne = g.edge_count();
        let cfg = EdgeConfig::from_mask(mask & ((1u64 << ne) - 1), ne);
        let free = clusters(g, &cfg, Bc::Free).unwrap().cluster_count();
        let wired = clusters(g, &cfg, Bc::Wired).unwrap().cluster_count();
        prop_assert!(wired <= free);
        prop_assert!(wired >= 1);
        prop_assert!(free <= g.vertex_count());
    }

    // At unit cluster weight the measure is independent percolation: the
    // crossing probability must equal the plain product-measure sum.
    #[test]
    fn unit_weight_reduces_to_independent_percolation(p in 0.05f64..0.95) {
        let g = LatticeGraph::build_box(GraphKind::Box { k: 2, m: 1 }).unwrap();
        let params = RcParams::new(p, 1.0, Bc::Free).unwrap();
        let got = event_prob(&g, &params, &lr_open()).unwrap();
        let ne = g.edge_count();
        let mut want = 0.0;
        for m in 0..1u64 << ne {
            let cfg = EdgeConfig::from_mask(m, ne);
            let hit = has_crossing(&g, StateRef::Edges(&cfg), Direction::LeftRight, PathMode::OpenPath)
                .unwrap();
            if hit {
                let o = m.count_ones() as i32;
                want += p.powi(o) * (1.0 - p).powi(ne as i32 - o);
            }
        }
        prop_assert!((got - want).abs() < 1e-12, "got {got} want {want}");
    }

    // The closed form for a single edge under free boundary conditions.
    #[test]
    fn single_edge_closed_form(p in 0.01f64..0.99, q in 0.05f64..8.0) {
        let g = rclab_core::corpus::single_edge();
        let params = RcParams::new(p, q, Bc::Free).unwrap();
        let got = event_prob(&g, &params, &EventSpec::EdgeOpen { edge: 0 }).unwrap();
        let want = p / (p + (1.0 - p) * q);
        prop_assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn edge_mask_round_trip(ne in 1usize..=20, mask in any::<u64>()) {
        let m = mask & ((1u64 << ne) - 1);
        let cfg = EdgeConfig::from_mask(m, ne);
        prop_assert_eq!(cfg.to_mask(), Some(m));
        prop_assert_eq!(cfg.len(), ne);
        prop_assert_eq!(cfg.count_open(), m.count_ones() as usize);
    }
}
