//! Union-find cluster partitions with free or wired boundary counting.

use alloc::vec;
use alloc::vec::Vec;

use super::{Bc, EdgeConfig, LatticeGraph};
use crate::error::GraphError;

/// Plain union-find over vertex indices, reusable across configurations.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
    count: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), rank: vec![0; n], count: n }
    }

    /// Resets to all-singletons without reallocating.
    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
        self.rank.fill(0);
        self.count = self.parent.len();
    }

    pub fn find(&mut self, v: usize) -> usize {
        let mut root = v;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        // Path compression.
        let mut cur = v;
        while self.parent[cur] as usize != cur {
            let next = self.parent[cur] as usize;
            self.parent[cur] = root as u32;
            cur = next;
        }
        root
    }

    /// Merges the clusters of `a` and `b`; returns true if they were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[lo] = hi as u32;
        if self.rank[ra] == self.rank[rb] {
            self.rank[hi] += 1;
        }
        self.count -= 1;
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }
}

/// The open-cluster partition of a configuration: representative labels,
/// cluster sizes, and the cluster count under the chosen boundary condition.
#[derive(Debug, Clone)]
pub struct ClusterPartition {
    label: Vec<u32>,
    size_by_vertex: Vec<u32>,
    count: usize,
    bc: Bc,
}

impl ClusterPartition {
    /// Representative vertex of the cluster containing `v`.
    pub fn label(&self, v: usize) -> usize {
        self.label[v] as usize
    }

    /// Number of vertices in the cluster containing `v`. Under wired
    /// counting the boundary super-cluster size includes every merged
    /// boundary vertex.
    pub fn cluster_size(&self, v: usize) -> usize {
        self.size_by_vertex[v] as usize
    }

    /// Number of clusters, with the wired boundary counted once.
    pub fn cluster_count(&self) -> usize {
        self.count
    }

    pub fn bc(&self) -> Bc {
        self.bc
    }

    pub fn same_cluster(&self, a: usize, b: usize) -> bool {
        self.label[a] == self.label[b]
    }

    /// Representatives in increasing vertex order, one per cluster.
    pub fn roots(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.count);
        for (v, &l) in self.label.iter().enumerate() {
            if l as usize == v {
                out.push(v);
            }
        }
        out
    }
}

/// Computes the open-cluster partition of `cfg` on `g` under `bc`.
pub fn clusters(
    g: &LatticeGraph,
    cfg: &EdgeConfig,
    bc: Bc,
) -> Result<ClusterPartition, GraphError> {
    g.check_edge_config(cfg)?;
    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    if bc == Bc::Wired {
        let mut first = None;
        for v in g.boundary_vertices() {
            match first {
                None => first = Some(v),
                Some(f) => {
                    uf.union(f, v);
                }
            }
        }
    }
    for (i, e) in g.edges().iter().enumerate() {
        if cfg.is_open(i) {
            uf.union(e.a, e.b);
        }
    }
    // Canonical labels: smallest vertex index in each cluster.
    let mut label = vec![u32::MAX; n];
    for v in 0..n {
        let r = uf.find(v);
        if label[r] == u32::MAX {
            label[r] = v as u32;
        }
    }
    let mut size_by_root = vec![0u32; n];
    for v in 0..n {
        size_by_root[uf.find(v)] += 1;
    }
    let mut out_label = vec![0u32; n];
    let mut size_by_vertex = vec![0u32; n];
    for v in 0..n {
        let r = uf.find(v);
        out_label[v] = label[r];
        size_by_vertex[v] = size_by_root[r];
    }
    Ok(ClusterPartition { label: out_label, size_by_vertex, count: uf.count(), bc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GraphKind;

    #[test]
    fn all_closed_free_counts_singletons() {
        let g = LatticeGraph::build_box(GraphKind::Box { k: 2, m: 1 }).unwrap();
        let cfg = EdgeConfig::all_closed(g.edge_count());
        let part = clusters(&g, &cfg, Bc::Free).unwrap();
        assert_eq!(part.cluster_count(), 6);
        assert_eq!(part.cluster_size(0), 1);
    }

    #[test]
    fn all_closed_wired_merges_boundary() {
        // Every vertex of Box(2, 1) is on the frame, so the wired count is 1.
        let g = LatticeGraph::build_box(GraphKind::Box { k: 2, m: 1 }).unwrap();
        let cfg = EdgeConfig::all_closed(g.edge_count());
        let part = clusters(&g, &cfg, Bc::Wired).unwrap();
        assert_eq!(part.cluster_count(), 1);
        assert_eq!(part.cluster_size(0), 6);
    }

    #[test]
    fn wired_interior_stays_separate() {
        let g = LatticeGraph::build_box(GraphKind::CenteredBox { n: 1 }).unwrap();
        let cfg = EdgeConfig::all_closed(g.edge_count());
        let part = clusters(&g, &cfg, Bc::Wired).unwrap();
        // Boundary super-cluster plus the isolated origin.
        assert_eq!(part.cluster_count(), 2);
        let origin = g.vertex_at(0, 0).unwrap();
        assert_eq!(part.cluster_size(origin), 1);
        let b0 = g.boundary_vertices().next().unwrap();
        assert_eq!(part.cluster_size(b0), 8);
        // All boundary vertices share one label.
        let l = part.label(b0);
        assert!(g.boundary_vertices().all(|v| part.label(v) == l));
    }

    #[test]
    fn open_edges_merge() {
        let g = LatticeGraph::build_box(GraphKind::Box { k: 2, m: 1 }).unwrap();
        let mut cfg = EdgeConfig::all_closed(g.edge_count());
        cfg.set(0, true); // (0,0)-(1,0)
        let part = clusters(&g, &cfg, Bc::Free).unwrap();
        assert_eq!(part.cluster_count(), 5);
        assert!(part.same_cluster(0, 1));
        assert_eq!(part.cluster_size(0), 2);
        assert_eq!(part.label(1), 0);
    }

    #[test]
    fn all_open_single_cluster() {
        let g = LatticeGraph::build_box(GraphKind::CenteredBox { n: 1 }).unwrap();
        let cfg = EdgeConfig::all_open(g.edge_count());
        for bc in [Bc::Free, Bc::Wired] {
            let part = clusters(&g, &cfg, bc).unwrap();
            assert_eq!(part.cluster_count(), 1);
            assert_eq!(part.cluster_size(3), 9);
        }
    }
}
