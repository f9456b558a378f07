//! Dinic max-flow over [`Weight`] capacities, with min-cut extraction.

use std::collections::VecDeque;

use crate::weight::Weight;

#[derive(Debug, Clone)]
struct Edge<W> {
    to: usize,
    rev: usize,
    cap: W,
}

#[derive(Debug, Clone)]
pub struct Dinic<W> {
    graph: Vec<Vec<Edge<W>>>,
    level: Vec<i64>,
    iter: Vec<usize>,
}

impl<W: Weight> Dinic<W> {
    pub fn new(n: usize) -> Self {
        Dinic {
            graph: vec![Vec::new(); n],
            level: vec![-1; n],
            iter: vec![0; n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.graph.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: W) {
        let rev_from = self.graph[to].len();
        let rev_to = self.graph[from].len();
        self.graph[from].push(Edge {
            to,
            rev: rev_from,
            cap,
        });
        self.graph[to].push(Edge {
            to: from,
            rev: rev_to,
            cap: W::zero(),
        });
    }

    fn live(cap: W) -> bool {
        cap > W::eps_residual()
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for e in &self.graph[v] {
                if Self::live(e.cap) && self.level[e.to] < 0 {
                    self.level[e.to] = self.level[v] + 1;
                    queue.push_back(e.to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, f: W) -> W {
        if v == t {
            return f;
        }
        while self.iter[v] < self.graph[v].len() {
            let i = self.iter[v];
            let (to, cap) = (self.graph[v][i].to, self.graph[v][i].cap);
            if Self::live(cap) && self.level[v] < self.level[to] {
                let d = self.dfs(to, t, f.min(cap));
                if d > W::zero() {
                    self.graph[v][i].cap = self.graph[v][i].cap - d;
                    let rev = self.graph[v][i].rev;
                    self.graph[to][rev].cap = self.graph[to][rev].cap + d;
                    return d;
                }
            }
            self.iter[v] += 1;
        }
        W::zero()
    }

    pub fn max_flow(&mut self, s: usize, t: usize, bound: W) -> W {
        let mut flow = W::zero();
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, bound);
                if !(f > W::zero()) {
                    break;
                }
                flow = flow + f;
            }
        }
    }

    /// Nodes reachable from `s` in the residual graph (source side of a min cut).
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.graph.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for e in &self.graph[v] {
                if Self::live(e.cap) && !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        seen
    }
}
