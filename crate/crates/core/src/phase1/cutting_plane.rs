//! Relax-and-cut exact solver.
//!
//! The relaxation drops subtour elimination: each circle picks one successor
//! (in-degree and out-degree one) at the cheapest slot-pair cost, which is an
//! assignment problem. A relaxed solution with several cycles violates the
//! subtour-elimination inequality of its smallest cycle `S`, i.e. it uses all
//! `|S|` arcs of `S` while at most `|S| - 1` are allowed. The cut is enforced
//! by partitioning: child `t` forbids arc `t` of the cycle and fixes arcs
//! `0..t`, so every child satisfies the cut and no feasible tour is lost.
//!
//! Slot-pair minima only bound the true edge costs from below, so a relaxed
//! solution that is already a single tour is priced exactly with the slot
//! program and then partitioned away the same way; search ends when every
//! open subproblem's relaxation reaches the incumbent.
//!
//! Bounds get one strengthening on top of the assignment value: along a chain
//! of fixed arcs the tour uses a single slot per circle, so the chain costs at
//! least its slot-program value rather than the sum of its slot-pair minima.
//! Children are re-solved incrementally from the parent's dual potentials.

use std::time::{Duration, Instant};

use super::assignment::AssignmentState;
use super::{
    build_node_graph, find_subtours, finish_tour, optimal_slots, solve_heuristic, tie_eps,
    NodeGraph,
};
use crate::error::Result;
use crate::model::{DiscreteTour, Instance};

#[derive(Debug, Clone)]
pub struct CuttingPlaneOutcome {
    pub tour: DiscreteTour,
    /// True when the search completed; false when the time limit stopped it.
    pub proven_optimal: bool,
    /// Valid lower bound on the optimal discrete length at termination.
    pub lower_bound: f64,
    /// Value of the assignment relaxation before any cut.
    pub root_bound: f64,
    /// Subtour-elimination cuts generated.
    pub cuts: usize,
    /// Relaxations solved.
    pub nodes: usize,
}

const NONE: usize = usize::MAX;

/// Branching decisions of a subproblem. An included arc `(i, j)` forbids
/// every other arc out of `i` or into `j`.
#[derive(Clone)]
struct ArcRules {
    n: usize,
    succ: Vec<usize>,
    pred: Vec<usize>,
    banned: Vec<bool>,
}

impl ArcRules {
    fn new(n: usize) -> Self {
        Self {
            n,
            succ: vec![NONE; n],
            pred: vec![NONE; n],
            banned: vec![false; n * n],
        }
    }

    fn include(&mut self, (i, j): (usize, usize)) {
        self.succ[i] = j;
        self.pred[j] = i;
    }

    fn exclude(&mut self, (i, j): (usize, usize)) {
        self.banned[i * self.n + j] = true;
    }

    fn cost(&self, base: &[f64], i: usize, j: usize) -> f64 {
        let blocked = self.banned[i * self.n + j]
            || (self.succ[i] != NONE && self.succ[i] != j)
            || (self.pred[j] != NONE && self.pred[j] != i);
        if blocked {
            f64::INFINITY
        } else {
            base[i * self.n + j]
        }
    }
}

/// Extra cost forced by slot consistency along chains of included arcs.
///
/// Every arc of a chain is priced at its cheapest slot pair in the
/// relaxation, but a tour uses one slot per circle, so the chain costs at
/// least its slot program value. The difference is added to the bound.
fn chain_excess(graph: &NodeGraph, base: &[f64], rules: &ArcRules) -> f64 {
    let (n, k) = (graph.n, graph.k);
    let mut excess = 0.0;
    let mut f = vec![0.0; k];
    let mut g = vec![0.0; k];
    let mut seen = vec![false; n];
    // open chains start at circles with an included out-arc and no in-arc;
    // a fully included cycle has no start and is priced from any circle
    let starts = (0..n)
        .filter(|&c| rules.succ[c] != NONE && rules.pred[c] == NONE)
        .chain((0..n).filter(|&c| rules.succ[c] != NONE));
    for start in starts {
        if seen[start] {
            continue;
        }
        let closed = rules.pred[start] != NONE;
        let first_slots: Vec<Option<usize>> = if closed {
            (0..k).map(Some).collect()
        } else {
            vec![None]
        };
        let mut best = f64::INFINITY;
        let mut relaxed = 0.0;
        for fixed in first_slots {
            for (s, v) in f.iter_mut().enumerate() {
                *v = if fixed.is_none_or(|x| x == s) {
                    0.0
                } else {
                    f64::INFINITY
                };
            }
            relaxed = 0.0;
            let mut c = start;
            loop {
                seen[c] = true;
                let next = rules.succ[c];
                if next == NONE {
                    break;
                }
                relaxed += base[c * n + next];
                for (t, gt) in g.iter_mut().enumerate() {
                    *gt = (0..k)
                        .map(|s| f[s] + graph.slot_dist(c, s, next, t))
                        .fold(f64::INFINITY, f64::min);
                }
                std::mem::swap(&mut f, &mut g);
                c = next;
                if c == start {
                    break;
                }
            }
            let end = match fixed {
                Some(x) => f[x],
                None => f.iter().copied().fold(f64::INFINITY, f64::min),
            };
            best = best.min(end);
        }
        excess += (best - relaxed).max(0.0);
    }
    excess
}

struct Subproblem {
    rules: ArcRules,
    state: AssignmentState,
    bound: f64,
}

/// Order of a single Hamiltonian successor cycle, starting at circle 0.
fn cycle_order(successor: &[usize]) -> Vec<usize> {
    let mut order = Vec::with_capacity(successor.len());
    let mut c = 0;
    loop {
        order.push(c);
        c = successor[c];
        if c == 0 {
            return order;
        }
    }
}

pub fn solve_cutting_plane(
    instance: &Instance,
    k: usize,
    time_limit: Option<Duration>,
) -> Result<CuttingPlaneOutcome> {
    let start = Instant::now();
    let graph = build_node_graph(instance, k)?;
    let n = graph.n;
    let base: Vec<f64> = graph.min_arc_matrix().concat();

    let warm = solve_heuristic(instance, k, 0)?;
    let mut best_order = warm.order;
    let mut best_len = warm.length;

    let at = |i: usize, j: usize| base[i * n + j];
    let root = AssignmentState::solve(at, n).expect("complete graph has an assignment");
    let root_bound = root.cost(at);
    let mut stack = vec![Subproblem {
        rules: ArcRules::new(n),
        state: root,
        bound: root_bound,
    }];
    let mut cuts = 0usize;
    let mut nodes = 1usize;
    let mut timed_out = false;

    while let Some(sub) = stack.pop() {
        if sub.bound >= best_len - tie_eps(best_len) {
            continue;
        }
        if time_limit.is_some_and(|t| start.elapsed() >= t) {
            stack.push(sub);
            timed_out = true;
            break;
        }
        let successor = sub.state.row_to_col();
        let cycles = find_subtours(&successor)?;
        let cycle = if cycles.len() == 1 {
            let order = cycle_order(&successor);
            let (_, len) = optimal_slots(&graph, &order);
            if len < best_len - tie_eps(best_len) {
                best_len = len;
                best_order = order;
            }
            if sub.bound >= best_len - tie_eps(best_len) {
                continue;
            }
            &cycles[0]
        } else {
            cuts += 1;
            cycles
                .iter()
                .min_by_key(|c| c.len())
                .expect("at least one cycle")
        };

        let arcs: Vec<(usize, usize)> = (0..cycle.len())
            .map(|t| (cycle[t], cycle[(t + 1) % cycle.len()]))
            .collect();
        let mut children = Vec::with_capacity(arcs.len());
        let mut rules = sub.rules.clone();
        for &arc in &arcs {
            if rules.succ[arc.0] == arc.1 {
                continue;
            }
            let mut child = rules.clone();
            child.exclude(arc);
            nodes += 1;
            // costs only rise from parent to child, so the parent's duals
            // stay feasible and only the rows that lost their pairing need
            // new augmenting paths
            let cost = |i: usize, j: usize| child.cost(&base, i, j);
            if let Some(state) = sub.state.repair(cost) {
                let bound = state.cost(cost) + chain_excess(&graph, &base, &child);
                if bound < best_len - tie_eps(best_len) {
                    children.push(Subproblem {
                        rules: child,
                        state,
                        bound,
                    });
                }
            }
            rules.include(arc);
        }
        // depth first, most promising child on top
        children.sort_by(|a, b| b.bound.total_cmp(&a.bound));
        stack.extend(children);
    }

    let open_bound = stack.iter().map(|s| s.bound).fold(f64::INFINITY, f64::min);
    let tour = finish_tour(&graph, &best_order);
    // slot re-optimization can move the last ulp, so clamp to the tour itself
    let lower_bound = if timed_out {
        open_bound.min(best_len)
    } else {
        best_len
    }
    .min(tour.length);
    Ok(CuttingPlaneOutcome {
        tour,
        proven_optimal: !timed_out,
        lower_bound,
        root_bound,
        cuts,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Circle;

    #[test]
    fn unit_square_corners() {
        let inst = Instance::new(vec![
            Circle::new(0.0, 0.0, 0.0),
            Circle::new(1.0, 0.0, 0.0),
            Circle::new(1.0, 1.0, 0.0),
            Circle::new(0.0, 1.0, 0.0),
        ])
        .unwrap();
        let out = solve_cutting_plane(&inst, 4, None).unwrap();
        assert!(out.proven_optimal);
        assert!((out.tour.length - 4.0).abs() < 1e-12);
        assert_eq!(out.tour.order, vec![0, 1, 2, 3]);
        assert!(out.cuts <= 4, "cuts = {}", out.cuts);
        assert!(out.root_bound <= 4.0 + 1e-12);
    }

    #[test]
    fn two_circles_need_no_cut() {
        let inst = Instance::new(vec![
            Circle::new(0.0, 0.0, 1.0),
            Circle::new(10.0, 0.0, 1.0),
        ])
        .unwrap();
        let out = solve_cutting_plane(&inst, 4, None).unwrap();
        assert_eq!(out.cuts, 0);
        assert!(out.proven_optimal);
        assert!((out.tour.length - 2.0 * (10.0 - 2f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn chain_excess_matches_slot_enumeration() {
        let inst = Instance::new(vec![
            Circle::new(0.0, 0.0, 2.0),
            Circle::new(6.0, 1.0, 3.0),
            Circle::new(9.0, 8.0, 1.0),
            Circle::new(-3.0, 7.0, 2.5),
        ])
        .unwrap();
        let graph = build_node_graph(&inst, 4).unwrap();
        let n = graph.n;
        let base: Vec<f64> = graph.min_arc_matrix().concat();
        let mut rules = ArcRules::new(n);
        rules.include((0, 1));
        rules.include((1, 2));
        let mut best = f64::INFINITY;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    best = best.min(graph.slot_dist(0, a, 1, b) + graph.slot_dist(1, b, 2, c));
                }
            }
        }
        let relaxed = base[1] + base[n + 2];
        let got = chain_excess(&graph, &base, &rules);
        assert!(
            (got - (best - relaxed)).abs() < 1e-12,
            "{got} vs {}",
            best - relaxed
        );
        assert!(got >= 0.0);
    }

    #[test]
    fn zero_time_limit_returns_a_bounded_incumbent() {
        let inst = Instance::new(
            (0..9)
                .map(|i| Circle::new((i * 7 % 9) as f64 * 10.0, (i * 4 % 9) as f64 * 10.0, 2.0))
                .collect(),
        )
        .unwrap();
        let out = solve_cutting_plane(&inst, 4, Some(Duration::ZERO)).unwrap();
        assert!(!out.proven_optimal);
        assert!(out.lower_bound <= out.tour.length);
        assert!(out.lower_bound >= out.root_bound - 1e-9);
    }

    #[test]
    fn cycle_order_starts_at_zero() {
        assert_eq!(cycle_order(&[2, 0, 3, 1]), vec![0, 2, 3, 1]);
    }
}
