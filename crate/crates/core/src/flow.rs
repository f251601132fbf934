//! Small exact max-flow solver (Edmonds-Karp) over rational capacities.
//!
//! Used for covering matchings in the support decomposition and for the
//! minimum-cut step of the maximum-welfare stable matching. Capacities are
//! exact rationals; on 0/1 capacities the flow is integral.

use std::collections::VecDeque;

use num_traits::Zero;

use crate::rational::Rat;

#[derive(Debug, Clone)]
struct FlowEdge {
    to: usize,
    cap: Rat,
}

#[derive(Debug, Clone, Default)]
pub struct FlowNetwork {
    edges: Vec<FlowEdge>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Adds a directed edge and its residual twin; returns the edge id.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: Rat) -> usize {
        let id = self.edges.len();
        self.edges.push(FlowEdge { to, cap });
        self.edges.push(FlowEdge {
            to: from,
            cap: Rat::zero(),
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Flow currently pushed through edge `id` (the residual twin's cap).
    pub fn flow(&self, id: usize) -> Rat {
        self.edges[id ^ 1].cap.clone()
    }

    /// Runs Edmonds-Karp from `s` to `t`; returns the max-flow value.
    pub fn max_flow(&mut self, s: usize, t: usize) -> Rat {
        let mut total = Rat::zero();
        loop {
            // BFS for a shortest augmenting path.
            let mut prev_edge = vec![usize::MAX; self.adj.len()];
            let mut visited = vec![false; self.adj.len()];
            visited[s] = true;
            let mut queue = VecDeque::from([s]);
            'bfs: while let Some(v) = queue.pop_front() {
                for &eid in &self.adj[v] {
                    let e = &self.edges[eid];
                    if !visited[e.to] && !e.cap.is_zero() {
                        visited[e.to] = true;
                        prev_edge[e.to] = eid;
                        if e.to == t {
                            break 'bfs;
                        }
                        queue.push_back(e.to);
                    }
                }
            }
            if !visited[t] {
                return total;
            }
            // Bottleneck along the path.
            let mut bottleneck: Option<Rat> = None;
            let mut v = t;
            while v != s {
                let eid = prev_edge[v];
                let cap = self.edges[eid].cap.clone();
                bottleneck = Some(match bottleneck {
                    None => cap,
                    Some(b) => b.min(cap),
                });
                v = self.edges[eid ^ 1].to;
            }
            let push = bottleneck.unwrap();
            let mut v = t;
            while v != s {
                let eid = prev_edge[v];
                self.edges[eid].cap -= push.clone();
                self.edges[eid ^ 1].cap += push.clone();
                v = self.edges[eid ^ 1].to;
            }
            total += push;
        }
    }

    /// After `max_flow`, the source side of a minimum cut: nodes reachable
    /// from `s` in the residual network.
    pub fn min_cut_source_side(&self, s: usize) -> Vec<bool> {
        let mut visited = vec![false; self.adj.len()];
        visited[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &eid in &self.adj[v] {
                let e = &self.edges[eid];
                if !visited[e.to] && !e.cap.is_zero() {
                    visited[e.to] = true;
                    queue.push_back(e.to);
                }
            }
        }
        visited
    }
}
