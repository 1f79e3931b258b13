//! Small integral max-flow solver (Dinic) plus the lower-bound
//! reduction used to round fractional parent assignments into
//! degree-constrained integral ones.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: u32,
}

/// Dinic max-flow on a unit-ish network; capacities stay small here.
#[derive(Debug)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Adds a directed arc and its residual twin; returns the arc id.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: u32) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap });
        self.arcs.push(Arc { to: from, cap: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Flow pushed through the arc with this id.
    pub fn flow_of(&self, id: usize) -> u32 {
        self.arcs[id + 1].cap
    }

    pub fn max_flow(&mut self, source: usize, sink: usize) -> u64 {
        let mut total = 0u64;
        loop {
            let level = self.bfs_levels(source, sink);
            if level[sink].is_none() {
                return total;
            }
            let mut iter = vec![0usize; self.adj.len()];
            loop {
                let pushed = self.dfs_push(source, sink, u32::MAX, &level, &mut iter);
                if pushed == 0 {
                    break;
                }
                total += pushed as u64;
            }
        }
    }

    fn bfs_levels(&self, source: usize, sink: usize) -> Vec<Option<u32>> {
        let mut level = vec![None; self.adj.len()];
        let mut queue = std::collections::VecDeque::new();
        level[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            if u == sink {
                break;
            }
            for &id in &self.adj[u] {
                let arc = &self.arcs[id];
                if arc.cap > 0 && level[arc.to].is_none() {
                    level[arc.to] = Some(level[u].unwrap() + 1);
                    queue.push_back(arc.to);
                }
            }
        }
        level
    }

    fn dfs_push(
        &mut self,
        u: usize,
        sink: usize,
        limit: u32,
        level: &[Option<u32>],
        iter: &mut [usize],
    ) -> u32 {
        if u == sink || limit == 0 {
            return limit;
        }
        while iter[u] < self.adj[u].len() {
            let id = self.adj[u][iter[u]];
            let (to, cap) = (self.arcs[id].to, self.arcs[id].cap);
            let advances = level[to] == level[u].map(|l| l + 1);
            if cap > 0 && advances {
                let pushed = self.dfs_push(to, sink, limit.min(cap), level, iter);
                if pushed > 0 {
                    self.arcs[id].cap -= pushed;
                    self.arcs[id + 1].cap += pushed;
                    return pushed;
                }
            }
            iter[u] += 1;
        }
        0
    }
}

/// Assigns one parent to every child with parent degrees in
/// [`min_degree`, `max_degree`], given the admissible (parent, child)
/// pairs.  Feasibility is decided by a circulation with lower bounds;
/// an infeasible instance is reported as a numerical failure because
/// the callers' instances are guaranteed feasible by construction.
pub fn degree_constrained_assignment(
    parents: usize,
    children: usize,
    edges: &[(usize, usize)],
    min_degree: u32,
    max_degree: u32,
) -> Result<Vec<usize>> {
    if parents == 0 {
        return if children == 0 {
            Ok(Vec::new())
        } else {
            Err(Error::invalid("children without any admissible parent"))
        };
    }
    // Node layout: source, sink, parents, children, then the two
    // auxiliary terminals of the lower-bound reduction.
    let source = 0usize;
    let sink = 1usize;
    let parent_node = |a: usize| 2 + a;
    let child_node = |b: usize| 2 + parents + b;
    let mut net = FlowNetwork::new(2 + parents + children);
    let super_source = net.add_node();
    let super_sink = net.add_node();

    let mut demand = vec![0i64; net.adj.len()];
    // source -> parent with bounds [min_degree, max_degree].
    for a in 0..parents {
        net.add_arc(source, parent_node(a), max_degree - min_degree);
        demand[parent_node(a)] += min_degree as i64;
        demand[source] -= min_degree as i64;
    }
    // parent -> child admissible pairs, each usable once.
    let mut pair_arcs = Vec::with_capacity(edges.len());
    for &(a, b) in edges {
        pair_arcs.push(net.add_arc(parent_node(a), child_node(b), 1));
    }
    // child -> sink with bounds [1, 1].
    for b in 0..children {
        demand[sink] += 1;
        demand[child_node(b)] -= 1;
    }
    // Close the circulation.
    net.add_arc(sink, source, u32::MAX / 2);

    let mut need = 0u64;
    for (v, &d) in demand.iter().enumerate() {
        if d > 0 {
            net.add_arc(super_source, v, d as u32);
            need += d as u64;
        } else if d < 0 {
            net.add_arc(v, super_sink, (-d) as u32);
        }
    }
    let reached = net.max_flow(super_source, super_sink);
    if reached != need {
        return Err(Error::Numerical {
            message: format!(
                "degree-constrained assignment infeasible: routed {reached} of {need}"
            ),
            best_residual: f64::NAN,
        });
    }

    let mut assignment = vec![usize::MAX; children];
    for (arc, &(a, b)) in pair_arcs.iter().zip(edges) {
        if net.flow_of(*arc) == 1 {
            if assignment[b] != usize::MAX {
                return Err(Error::Numerical {
                    message: "child received two parents".into(),
                    best_residual: f64::NAN,
                });
            }
            assignment[b] = a;
        }
    }
    if let Some(b) = assignment.iter().position(|&a| a == usize::MAX) {
        return Err(Error::Numerical {
            message: format!("child {b} left unassigned by a saturating flow"),
            best_residual: f64::NAN,
        });
    }
    Ok(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dinic_on_a_diamond() {
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 3);
        net.add_arc(0, 2, 2);
        net.add_arc(1, 3, 2);
        net.add_arc(2, 3, 3);
        net.add_arc(1, 2, 5);
        assert_eq!(net.max_flow(0, 3), 5);
    }

    #[test]
    fn assignment_respects_degrees() {
        // Two parents, five children, complete bipartite: degrees must
        // land in [1, 4] with every child covered.
        let edges: Vec<(usize, usize)> =
            (0..2).flat_map(|a| (0..5).map(move |b| (a, b))).collect();
        let f = degree_constrained_assignment(2, 5, &edges, 1, 4).unwrap();
        let mut counts = [0usize; 2];
        for &a in &f {
            counts[a] += 1;
        }
        assert_eq!(counts[0] + counts[1], 5);
        assert!(counts.iter().all(|&c| (1..=4).contains(&c)));
    }

    #[test]
    fn assignment_detects_infeasibility() {
        // Five children but one parent capped at four.
        let edges: Vec<(usize, usize)> = (0..5).map(|b| (0, b)).collect();
        assert!(degree_constrained_assignment(1, 5, &edges, 1, 4).is_err());
        // A child with no admissible parent.
        assert!(degree_constrained_assignment(2, 2, &[(0, 0), (1, 0)], 1, 4).is_err());
    }

    #[test]
    fn assignment_handles_tight_lower_bounds() {
        // Four parents, four children, star-restricted menus forcing a
        // perfect matching.
        let edges = vec![(0, 0), (1, 1), (2, 2), (3, 3), (0, 1), (1, 2)];
        let f = degree_constrained_assignment(4, 4, &edges, 1, 4).unwrap();
        assert_eq!(f, vec![0, 1, 2, 3]);
    }
}
