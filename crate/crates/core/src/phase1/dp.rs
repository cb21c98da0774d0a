//! Exact dynamic program over (visited circle subset, end node).
//!
//! For every slot of circle 0 a cost-to-go table is filled backwards:
//! `h[mask][v]` is the cheapest way to start at node `v`, whose circle is in
//! `mask`, visit every circle outside `mask` and return to the seed node.
//! Working backwards lets the reconstruction walk forward and take the
//! smallest next circle among all optimal continuations, which yields the
//! lexicographically smallest optimal order.

use super::{build_node_graph, finish_tour, tie_eps, NodeGraph};
use crate::error::{Error, Result};
use crate::model::{DiscreteTour, Instance};

pub fn solve_exact_dp(instance: &Instance, k: usize, exact_limit: usize) -> Result<DiscreteTour> {
    let n = instance.len();
    if n > exact_limit {
        return Err(Error::ExactSizeLimit {
            n,
            limit: exact_limit,
        });
    }
    if n >= usize::BITS as usize {
        return Err(Error::ExactSizeLimit {
            n,
            limit: usize::BITS as usize - 1,
        });
    }
    let graph = build_node_graph(instance, k)?;

    let mut candidates: Vec<(f64, Vec<usize>)> = Vec::with_capacity(k);
    for seed_slot in 0..k {
        let table = CostToGo::fill(&graph, seed_slot);
        candidates.push(table.lexicographic_tour());
    }
    let best = candidates
        .iter()
        .map(|(v, _)| *v)
        .fold(f64::INFINITY, f64::min);
    let limit = best + tie_eps(best);
    let order = candidates
        .into_iter()
        .filter(|(v, _)| *v <= limit)
        .map(|(_, o)| o)
        .min()
        .expect("some seed attains the optimum");
    Ok(finish_tour(&graph, &order))
}

struct CostToGo<'g> {
    graph: &'g NodeGraph,
    seed: usize,
    /// circles other than 0
    m: usize,
    h: Vec<f64>,
}

impl<'g> CostToGo<'g> {
    #[inline]
    fn idx(&self, mask: usize, circle: usize, slot: usize) -> usize {
        (mask * self.m + (circle - 1)) * self.graph.k + slot
    }

    fn fill(graph: &'g NodeGraph, seed_slot: usize) -> Self {
        let k = graph.k;
        let m = graph.n - 1;
        let full = (1usize << m) - 1;
        let mut t = CostToGo {
            graph,
            seed: graph.node(0, seed_slot),
            m,
            h: vec![f64::INFINITY; (full + 1) * m * k],
        };
        for mask in (1..=full).rev() {
            for bit in 0..m {
                if mask & (1 << bit) == 0 {
                    continue;
                }
                let c = bit + 1;
                for l in 0..k {
                    let v = graph.node(c, l);
                    let value = if mask == full {
                        graph.d(v, t.seed)
                    } else {
                        let mut best = f64::INFINITY;
                        for nbit in 0..m {
                            if mask & (1 << nbit) != 0 {
                                continue;
                            }
                            let nmask = mask | (1 << nbit);
                            let nc = nbit + 1;
                            for nl in 0..k {
                                let cand =
                                    graph.d(v, graph.node(nc, nl)) + t.h[t.idx(nmask, nc, nl)];
                                if cand < best {
                                    best = cand;
                                }
                            }
                        }
                        best
                    };
                    let i = t.idx(mask, c, l);
                    t.h[i] = value;
                }
            }
        }
        t
    }

    /// Optimal length from this seed and the lexicographically smallest
    /// circle order attaining it.
    fn lexicographic_tour(&self) -> (f64, Vec<usize>) {
        let graph = self.graph;
        let k = graph.k;
        let m = self.m;
        let full = (1usize << m) - 1;

        let mut total = f64::INFINITY;
        for c in 1..=m {
            for l in 0..k {
                let v = graph.d(self.seed, graph.node(c, l)) + self.h[self.idx(1 << (c - 1), c, l)];
                total = total.min(v);
            }
        }
        let limit = total + tie_eps(total);

        let mut order = vec![0];
        // frontier: (node, cost of the chosen prefix up to that node)
        let mut frontier: Vec<(usize, f64)> = vec![(self.seed, 0.0)];
        let mut mask = 0usize;
        while mask != full {
            let mut next: Option<(usize, Vec<(usize, f64)>)> = None;
            for nc in 1..=m {
                if mask & (1 << (nc - 1)) != 0 {
                    continue;
                }
                let nmask = mask | (1 << (nc - 1));
                let mut reach: Vec<(usize, f64)> = Vec::new();
                for nl in 0..k {
                    let w = graph.node(nc, nl);
                    let prefix = frontier
                        .iter()
                        .map(|&(v, g)| g + graph.d(v, w))
                        .fold(f64::INFINITY, f64::min);
                    if prefix + self.h[self.idx(nmask, nc, nl)] <= limit {
                        reach.push((w, prefix));
                    }
                }
                if !reach.is_empty() {
                    next = Some((nc, reach));
                    break;
                }
            }
            let (nc, reach) = next.expect("an optimal continuation exists");
            order.push(nc);
            mask |= 1 << (nc - 1);
            frontier = reach;
        }
        (total, order)
    }
}
