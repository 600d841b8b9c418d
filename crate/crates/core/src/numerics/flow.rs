//! Integral max-flow (Edmonds–Karp) and feasibility of supply/demand
//! networks with exact-fill arcs via the lower-bound reduction.

use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub capacity: i64,
    /// When set, the arc must carry exactly `capacity`.
    pub exact: bool,
}

/// Transshipment network: `supply[v] > 0` is a source, `< 0` a sink.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FlowNetwork {
    pub nodes: usize,
    pub arcs: Vec<FlowArc>,
    pub supply: Vec<i64>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            nodes,
            arcs: Vec::new(),
            supply: vec![0; nodes],
        }
    }

    pub fn arc(&mut self, from: usize, to: usize, capacity: i64, exact: bool) -> usize {
        self.arcs.push(FlowArc {
            from,
            to,
            capacity,
            exact,
        });
        self.arcs.len() - 1
    }

    /// Checks conservation, capacities and exact fills of `flow`.
    pub fn is_feasible_flow(&self, flow: &[i64]) -> bool {
        if flow.len() != self.arcs.len() {
            return false;
        }
        let mut net = vec![0i64; self.nodes];
        for (a, &f) in self.arcs.iter().zip(flow) {
            if f < 0 || f > a.capacity || (a.exact && f != a.capacity) {
                return false;
            }
            net[a.from] += f;
            net[a.to] -= f;
        }
        net == self.supply
    }
}

/// Residual graph for max-flow.
struct Residual {
    head: Vec<usize>,
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(n: usize) -> Self {
        Self {
            head: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, u: usize, v: usize, c: i64) -> usize {
        let e = self.head.len();
        self.head.push(v);
        self.cap.push(c);
        self.adj[u].push(e);
        self.head.push(u);
        self.cap.push(0);
        self.adj[v].push(e + 1);
        e
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let mut prev = vec![usize::MAX; self.adj.len()];
            let mut queue = VecDeque::from([s]);
            let mut seen = vec![false; self.adj.len()];
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &e in &self.adj[u] {
                    let v = self.head[e];
                    if !seen[v] && self.cap[e] > 0 {
                        seen[v] = true;
                        prev[v] = e;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut push = i64::MAX;
            let mut v = t;
            while v != s {
                let e = prev[v];
                push = push.min(self.cap[e]);
                v = self.head[e ^ 1];
            }
            let mut v = t;
            while v != s {
                let e = prev[v];
                self.cap[e] -= push;
                self.cap[e ^ 1] += push;
                v = self.head[e ^ 1];
            }
            total += push;
        }
    }
}

/// Finds an integral flow meeting all supplies, capacities and exact-fill
/// arcs, or `None` when no such flow exists.
pub fn max_flow_exact_fill(net: &FlowNetwork) -> Option<Vec<i64>> {
    if net.supply.len() != net.nodes || net.supply.iter().sum::<i64>() != 0 {
        return None;
    }
    if net.arcs.iter().any(|a| a.capacity < 0) {
        return None;
    }
    let n = net.nodes;
    let (ss, tt) = (n, n + 1);
    let mut g = Residual::new(n + 2);
    let mut excess = net.supply.clone();
    let mut edge_of = Vec::with_capacity(net.arcs.len());
    for a in &net.arcs {
        let lower = if a.exact { a.capacity } else { 0 };
        excess[a.from] -= lower;
        excess[a.to] += lower;
        edge_of.push(g.add(a.from, a.to, a.capacity - lower));
    }
    let mut need = 0;
    for (v, &b) in excess.iter().enumerate() {
        if b > 0 {
            g.add(ss, v, b);
            need += b;
        } else if b < 0 {
            g.add(v, tt, -b);
        }
    }
    if g.max_flow(ss, tt) != need {
        return None;
    }
    Some(
        net.arcs
            .iter()
            .zip(&edge_of)
            .map(|(a, &e)| {
                let lower = if a.exact { a.capacity } else { 0 };
                lower + g.cap[e ^ 1]
            })
            .collect(),
    )
}

/// Assigns each row to one allowed column so that column `j` receives at
/// most `caps[j]` rows, and exactly `caps[j]` when `exact[j]`. Returns the
/// chosen column per row.
pub fn assign_rows(allowed: &[Vec<usize>], caps: &[i64], exact: &[bool]) -> Option<Vec<usize>> {
    let rows = allowed.len();
    let cols = caps.len();
    let source = rows + cols;
    let sink = source + 1;
    let mut net = FlowNetwork::new(rows + cols + 2);
    net.supply[source] = rows as i64;
    net.supply[sink] = -(rows as i64);
    for i in 0..rows {
        net.arc(source, i, 1, true);
    }
    let mut row_arcs = Vec::new();
    for (i, cs) in allowed.iter().enumerate() {
        for &j in cs {
            row_arcs.push((i, j, net.arc(i, rows + j, 1, false)));
        }
    }
    for j in 0..cols {
        net.arc(rows + j, sink, caps[j], exact[j]);
    }
    let flow = max_flow_exact_fill(&net)?;
    let mut out = vec![usize::MAX; rows];
    for (i, j, a) in row_arcs {
        if flow[a] == 1 {
            out[i] = j;
        }
    }
    Some(out)
}
