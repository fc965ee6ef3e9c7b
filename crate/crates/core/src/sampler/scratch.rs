//! Reusable breadth-first connectivity scratch for heat-bath sweeps: no
//! per-query allocation, stamp-based visited marks, optional boundary
//! identification for the wired condition.

use alloc::vec;
use alloc::vec::Vec;

use crate::lattice::{Bc, EdgeConfig, LatticeGraph};

pub(crate) struct ConnScratch {
    seen: Vec<u32>,
    stamp: u32,
    queue: Vec<usize>,
    last_size: usize,
}

impl ConnScratch {
    pub fn new(vertices: usize) -> Self {
        Self { seen: vec![0; vertices], stamp: 0, queue: Vec::with_capacity(vertices), last_size: 0 }
    }

    fn next_stamp(&mut self) -> u32 {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen.iter_mut().for_each(|s| *s = 0);
            self.stamp = 1;
        }
        self.stamp
    }

    /// True when `a` and `b` are joined by open edges other than
    /// `skip_edge`; under the wired condition every boundary vertex counts
    /// as one identified vertex. When the result is false, the full size
    /// of `a`'s component is available via [`Self::last_component_size`].
    pub fn connected_off_edge(
        &mut self,
        g: &LatticeGraph,
        cfg: &EdgeConfig,
        a: usize,
        b: usize,
        skip_edge: usize,
        bc: Bc,
    ) -> bool {
        let stamp = self.next_stamp();
        self.queue.clear();
        self.seen[a] = stamp;
        self.queue.push(a);
        let mut head = 0;
        let mut boundary_added = false;
        let mut size = 1usize;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            if v == b {
                return true;
            }
            if bc == Bc::Wired && !boundary_added && g.is_boundary(v) {
                boundary_added = true;
                for w in g.boundary_vertices() {
                    if self.seen[w] != stamp {
                        self.seen[w] = stamp;
                        size += 1;
                        self.queue.push(w);
                    }
                }
            }
            for &(w, ei) in g.adjacency(v) {
                if ei == skip_edge || !cfg.is_open(ei) || self.seen[w] == stamp {
                    continue;
                }
                self.seen[w] = stamp;
                size += 1;
                self.queue.push(w);
            }
        }
        self.last_size = size;
        false
    }

    /// Size of the component found by the last negative
    /// [`Self::connected_off_edge`] query.
    pub fn last_component_size(&self) -> usize {
        self.last_size
    }

    /// Size of `start`'s component through open edges other than
    /// `skip_edge`, with no boundary identification.
    pub fn component_size_off_edge(
        &mut self,
        g: &LatticeGraph,
        cfg: &EdgeConfig,
        start: usize,
        skip_edge: usize,
    ) -> usize {
        let stamp = self.next_stamp();
        self.queue.clear();
        self.seen[start] = stamp;
        self.queue.push(start);
        let mut head = 0;
        let mut size = 1usize;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            for &(w, ei) in g.adjacency(v) {
                if ei == skip_edge || !cfg.is_open(ei) || self.seen[w] == stamp {
                    continue;
                }
                self.seen[w] = stamp;
                size += 1;
                self.queue.push(w);
            }
        }
        size
    }
}
