//! Discretized tour search: every circle contributes `k` candidate nodes and a
//! tour must pass through exactly one node per circle.
//!
//! Three solvers share the [`NodeGraph`]:
//! - [`solve_exact_dp`], a Held-Karp style program over (circle subset, end node);
//! - [`solve_cutting_plane`], an assignment relaxation with lazily added
//!   subtour-elimination cuts inside branch and bound;
//! - [`solve_heuristic`], nearest neighbor plus 2-opt with slot re-optimization.

mod assignment;
mod cutting_plane;
mod dp;
mod heuristic;
mod slots;

pub use assignment::solve_assignment;
pub use cutting_plane::{solve_cutting_plane, CuttingPlaneOutcome};
pub use dp::solve_exact_dp;
pub use heuristic::solve_heuristic;
pub use slots::{optimal_slots, reoptimize_slots};

use crate::error::{Error, Result};
use crate::geometry::{discrete_node, DiscreteNode};
use crate::model::{DiscreteTour, Instance};

/// Largest `k * N` accepted by [`build_node_graph`].
pub const MAX_GRAPH_NODES: usize = 4096;

/// Relative tolerance under which two tour lengths count as tied.
pub(crate) const TIE_REL: f64 = 1e-12;

pub(crate) fn tie_eps(value: f64) -> f64 {
    TIE_REL * value.abs()
}

/// All discretization nodes of an instance with their pairwise distances.
///
/// Node `c * k + s` is slot `s` of circle `c`. Entries between two nodes of
/// the same circle are `f64::INFINITY`: a tour never moves inside one circle.
#[derive(Debug, Clone)]
pub struct NodeGraph {
    pub n: usize,
    pub k: usize,
    pub nodes: Vec<DiscreteNode>,
    pub dist: Vec<f64>,
}

impl NodeGraph {
    #[inline]
    pub fn node(&self, circle: usize, slot: usize) -> usize {
        circle * self.k + slot
    }

    #[inline]
    pub fn d(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.nodes.len() + b]
    }

    #[inline]
    pub fn slot_dist(&self, ci: usize, si: usize, cj: usize, sj: usize) -> f64 {
        self.d(self.node(ci, si), self.node(cj, sj))
    }

    /// Cheapest slot pair between two distinct circles; a lower bound on any
    /// tour edge joining them.
    pub fn min_arc_cost(&self, ci: usize, cj: usize) -> f64 {
        let mut best = f64::INFINITY;
        for si in 0..self.k {
            for sj in 0..self.k {
                best = best.min(self.slot_dist(ci, si, cj, sj));
            }
        }
        best
    }

    /// `n x n` matrix of [`min_arc_cost`](Self::min_arc_cost), infinite on the diagonal.
    pub fn min_arc_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.min_arc_cost(i, j)).collect())
            .collect()
    }

    /// Cyclic length of `order` visiting slot `slots[c]` of each circle `c`.
    pub fn tour_length(&self, order: &[usize], slots: &[usize]) -> f64 {
        let n = order.len();
        (0..n)
            .map(|i| {
                let a = order[i];
                let b = order[(i + 1) % n];
                self.slot_dist(a, slots[a], b, slots[b])
            })
            .sum()
    }
}

pub fn build_node_graph(instance: &Instance, k: usize) -> Result<NodeGraph> {
    if k < 1 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    let n = instance.len();
    let total = n * k;
    if total > MAX_GRAPH_NODES {
        return Err(Error::GraphTooLarge {
            nodes: total,
            limit: MAX_GRAPH_NODES,
        });
    }
    let nodes: Vec<DiscreteNode> = instance
        .circles
        .iter()
        .enumerate()
        .flat_map(|(c, circle)| (0..k).map(move |s| discrete_node(c, circle, s, k)))
        .collect();
    let mut dist = vec![f64::INFINITY; total * total];
    for a in 0..total {
        for b in 0..total {
            if nodes[a].circle != nodes[b].circle {
                dist[a * total + b] = nodes[a].point.dist(nodes[b].point);
            }
        }
    }
    Ok(NodeGraph { n, k, nodes, dist })
}

/// Splits a successor permutation into its directed cycles. Each cycle starts
/// at its smallest member; cycles are sorted by that member.
pub fn find_subtours(successor: &[usize]) -> Result<Vec<Vec<usize>>> {
    let n = successor.len();
    let mut seen_target = vec![false; n];
    for (i, &s) in successor.iter().enumerate() {
        if s >= n {
            return Err(Error::Contract(format!(
                "successor of {i} is {s}, outside 0..{n}"
            )));
        }
        if std::mem::replace(&mut seen_target[s], true) {
            return Err(Error::Contract(format!(
                "circle {s} has in-degree > 1; successor map is not a permutation"
            )));
        }
    }
    let mut visited = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = start;
        while !visited[cur] {
            visited[cur] = true;
            cycle.push(cur);
            cur = successor[cur];
        }
        cycles.push(cycle);
    }
    Ok(cycles)
}

/// Successor map of a cyclic visiting order.
pub fn successors(order: &[usize]) -> Vec<usize> {
    let n = order.len();
    let mut succ = vec![0; n];
    for i in 0..n {
        succ[order[i]] = order[(i + 1) % n];
    }
    succ
}

/// Rotates `order` to start at circle 0 and picks the direction with
/// `order[1] < order[n - 1]`.
pub fn canonical_order(order: &[usize]) -> Vec<usize> {
    let n = order.len();
    let start = order.iter().position(|&c| c == 0).unwrap_or(0);
    let mut out: Vec<usize> = (0..n).map(|i| order[(start + i) % n]).collect();
    if n >= 3 && out[1] > out[n - 1] {
        out[1..].reverse();
    }
    out
}

/// Final canonical form shared by all solvers: canonical direction,
/// lexicographically smallest optimal slots, length recomputed along the order.
pub(crate) fn finish_tour(graph: &NodeGraph, order: &[usize]) -> DiscreteTour {
    let order = canonical_order(order);
    let (slots, length) = reoptimize_slots(graph, &order);
    DiscreteTour {
        order,
        slots,
        k: graph.k,
        length,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Circle;

    #[test]
    fn two_circle_graph_counts() {
        let inst = Instance::new(vec![
            Circle::new(0.0, 0.0, 1.0),
            Circle::new(10.0, 0.0, 1.0),
        ])
        .unwrap();
        let g = build_node_graph(&inst, 4).unwrap();
        assert_eq!(g.nodes.len(), 8);
        assert_eq!(g.dist.len(), 64);
        assert_eq!(g.dist.iter().filter(|d| d.is_finite()).count(), 32);
    }

    #[test]
    fn zero_radius_graph_depends_only_on_circles() {
        let inst = Instance::new(vec![
            Circle::new(0.0, 0.0, 0.0),
            Circle::new(4.0, 0.0, 0.0),
            Circle::new(0.0, 3.0, 0.0),
        ])
        .unwrap();
        let g = build_node_graph(&inst, 4).unwrap();
        for (ci, cj, want) in [(0, 1, 4.0), (1, 2, 5.0), (0, 2, 3.0)] {
            for si in 0..4 {
                for sj in 0..4 {
                    assert_eq!(g.slot_dist(ci, si, cj, sj), want);
                    assert_eq!(g.slot_dist(cj, sj, ci, si), want);
                }
            }
        }
    }

    #[test]
    fn graph_size_guard() {
        let inst = Instance::new(vec![Circle::new(0.0, 0.0, 1.0); 2]).unwrap();
        assert!(matches!(
            build_node_graph(&inst, 2049),
            Err(Error::GraphTooLarge { .. })
        ));
        assert!(build_node_graph(&inst, 2048).is_ok());
    }

    #[test]
    fn subtour_examples() {
        assert_eq!(
            find_subtours(&[1, 0, 3, 2]).unwrap(),
            vec![vec![0, 1], vec![2, 3]]
        );
        assert_eq!(find_subtours(&[1, 2, 0]).unwrap(), vec![vec![0, 1, 2]]);
        assert_eq!(
            find_subtours(&[0, 2, 1]).unwrap(),
            vec![vec![0], vec![1, 2]]
        );
        // reported from the smallest member
        assert_eq!(find_subtours(&[2, 0, 1]).unwrap(), vec![vec![0, 2, 1]]);
    }

    #[test]
    fn non_permutation_is_rejected() {
        assert!(matches!(find_subtours(&[1, 1, 0]), Err(Error::Contract(_))));
        assert!(matches!(find_subtours(&[3, 0, 1]), Err(Error::Contract(_))));
    }

    #[test]
    fn canonical_orders() {
        assert_eq!(canonical_order(&[2, 0, 1, 3]), vec![0, 1, 3, 2]);
        assert_eq!(canonical_order(&[0, 3, 1, 2]), vec![0, 2, 1, 3]);
        assert_eq!(canonical_order(&[1, 0]), vec![0, 1]);
    }
}
