//! Min-cost flow by successive shortest paths with Bellman-Ford, over any
//! scalar cost type. Negative edge costs are allowed as long as the initial
//! network has no negative cycle.

use crate::scalar::Scalar;

#[derive(Debug, Clone)]
struct Edge<T> {
    to: usize,
    cap: i64,
    cost: T,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork<T> {
    edges: Vec<Edge<T>>,
    adj: Vec<Vec<usize>>,
}

impl<T: Scalar> FlowNetwork<T> {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    /// Adds `u -> v` and its residual twin; returns the forward edge id.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: i64, cost: T) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to: v, cap, cost });
        self.edges.push(Edge {
            to: u,
            cap: 0,
            cost: -cost,
        });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    /// Units currently sent along forward edge `id`.
    pub fn flow(&self, id: usize) -> i64 {
        self.edges[id + 1].cap
    }

    fn shortest_path(&self, s: usize) -> (Vec<Option<T>>, Vec<Option<usize>>) {
        let n = self.adj.len();
        let mut dist: Vec<Option<T>> = vec![None; n];
        let mut via: Vec<Option<usize>> = vec![None; n];
        dist[s] = Some(T::zero());
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                let Some(du) = dist[u] else { continue };
                for &e in &self.adj[u] {
                    let edge = &self.edges[e];
                    if edge.cap <= 0 {
                        continue;
                    }
                    let cand = du + edge.cost;
                    // Floating costs relax only on a clear improvement, so
                    // rounding cannot create phantom negative cycles.
                    if dist[edge.to].is_none_or(|dv| !dv.approx_le(cand)) {
                        dist[edge.to] = Some(cand);
                        via[edge.to] = Some(e);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        (dist, via)
    }

    /// Edges from `s` to `t` along the predecessor links, or `None` if they
    /// do not lead back to `s`.
    fn path_to(&self, s: usize, t: usize, via: &[Option<usize>]) -> Option<Vec<usize>> {
        let mut path = Vec::new();
        let mut v = t;
        while v != s {
            if path.len() > self.adj.len() {
                return None;
            }
            let e = via[v]?;
            path.push(e);
            v = self.edges[e ^ 1].to;
        }
        Some(path)
    }

    /// Augments along cheapest paths while they have negative cost, which
    /// yields a minimum-cost flow of unconstrained value. Returns the flow
    /// value and its cost.
    pub fn min_cost_flow(&mut self, s: usize, t: usize) -> (i64, T) {
        let mut value = 0;
        let mut total = T::zero();
        loop {
            let (dist, via) = self.shortest_path(s);
            let Some(dt) = dist[t] else { break };
            if T::zero().approx_le(dt) {
                break;
            }
            let Some(path) = self.path_to(s, t, &via) else {
                break;
            };
            let push = path.iter().map(|&e| self.edges[e].cap).min().unwrap_or(0);
            for &e in &path {
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
            }
            value += push;
            total = total + dt * T::from_usize(push as usize);
        }
        (value, total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_cheapest_parallel_route() {
        let mut g = FlowNetwork::<f64>::new(4);
        let a = g.add_edge(0, 1, 1, -10.0);
        let b = g.add_edge(0, 2, 1, -10.0);
        let c = g.add_edge(1, 3, 1, 1.0);
        let d = g.add_edge(2, 3, 1, 5.0);
        let (value, cost) = g.min_cost_flow(0, 3);
        assert_eq!(value, 2);
        assert_eq!(cost, -14.0);
        assert_eq!([g.flow(a), g.flow(b), g.flow(c), g.flow(d)], [1, 1, 1, 1]);
    }

    #[test]
    fn stops_when_paths_stop_paying() {
        let mut g = FlowNetwork::<f64>::new(3);
        g.add_edge(0, 1, 5, -1.0);
        g.add_edge(1, 2, 5, 2.0);
        assert_eq!(g.min_cost_flow(0, 2), (0, 0.0));
    }

    #[test]
    fn reroutes_through_residual_edges() {
        use num_rational::Rational64 as R;
        let m = R::from_integer(-1000);
        let mut g = FlowNetwork::<R>::new(6);
        g.add_edge(0, 1, 1, m);
        g.add_edge(0, 2, 1, m);
        let p1c1 = g.add_edge(1, 3, 1, R::from_integer(1));
        let p1c2 = g.add_edge(1, 4, 1, R::from_integer(2));
        let p2c1 = g.add_edge(2, 3, 1, R::from_integer(1));
        let p2c2 = g.add_edge(2, 4, 1, R::from_integer(100));
        g.add_edge(3, 5, 1, R::from_integer(0));
        g.add_edge(4, 5, 1, R::from_integer(0));
        let (value, cost) = g.min_cost_flow(0, 5);
        assert_eq!(value, 2);
        assert_eq!(cost, R::from_integer(3 - 2000));
        assert_eq!(
            [g.flow(p1c1), g.flow(p1c2), g.flow(p2c1), g.flow(p2c2)],
            [0, 1, 1, 0]
        );
    }
}
