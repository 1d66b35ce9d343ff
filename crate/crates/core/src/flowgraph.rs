//! Truncated signal flow graph and the gammoids defined on it.
//!
//! Stage `-1` holds one vertex per source symbol. Every later stage holds one
//! vertex per stored symbol `(i, j)`. Edges only go from stage `t` to `t+1`:
//! the source layer feeds all of stage 0, surviving symbols carry over
//! unchanged, and each symbol of the newcomer receives one edge from every
//! transferred symbol.
//!
//! A set of vertices is independent in the gammoid when it can be linked
//! back to the source layer by vertex-disjoint paths. By Menger's theorem
//! that is a unit-capacity max-flow problem on the vertex-split reversed
//! graph, which is how [`gammoid_rank`] computes it.

use std::collections::VecDeque;
use std::fmt;
use std::io::{self, Write};

use serde::Serialize;

use crate::choice::FailureHistory;
use crate::error::{Error, Result};
use crate::field::Matrix;
use crate::params::SystemParams;

/// Plain adjacency-list digraph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Digraph {
    adj: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(vertices: usize) -> Self {
        Digraph {
            adj: vec![Vec::new(); vertices],
        }
    }

    pub fn from_edges(vertices: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(vertices);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        self.adj[from].push(to);
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn reversed(&self) -> Digraph {
        let mut r = Digraph::new(self.adj.len());
        for (u, outs) in self.adj.iter().enumerate() {
            for &v in outs {
                r.adj[v].push(u);
            }
        }
        r
    }

    /// Largest subset of `from` that can be linked into `sinks` along edge
    /// direction by vertex-disjoint paths.
    pub fn linking_rank(&self, from: &[usize], sinks: &[bool]) -> usize {
        let mut net = UnitFlow::new(self, from, sinks);
        net.max_flow()
    }
}

/// Residual network for the vertex-split unit-capacity flow problem.
struct UnitFlow {
    head: Vec<usize>,
    next: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<u8>,
    source: usize,
    sink: usize,
}

const NIL: usize = usize::MAX;

impl UnitFlow {
    fn new(g: &Digraph, from: &[usize], sinks: &[bool]) -> Self {
        let v = g.vertex_count();
        let nodes = 2 * v + 2;
        let mut net = UnitFlow {
            head: vec![NIL; nodes],
            next: Vec::new(),
            to: Vec::new(),
            cap: Vec::new(),
            source: 2 * v,
            sink: 2 * v + 1,
        };
        let mut seen = vec![false; v];
        for &x in from {
            if !seen[x] {
                seen[x] = true;
                net.link(net.source, 2 * x);
            }
        }
        for (u, &is_sink) in sinks.iter().enumerate().take(v) {
            net.link(2 * u, 2 * u + 1);
            for &w in g.successors(u) {
                net.link(2 * u + 1, 2 * w);
            }
            if is_sink {
                net.link(2 * u + 1, net.sink);
            }
        }
        net
    }

    fn link(&mut self, u: usize, v: usize) {
        for (a, b, c) in [(u, v, 1), (v, u, 0)] {
            self.to.push(b);
            self.cap.push(c);
            self.next.push(self.head[a]);
            self.head[a] = self.to.len() - 1;
        }
    }

    fn max_flow(&mut self) -> usize {
        let nodes = self.head.len();
        let mut flow = 0;
        let mut parent = vec![NIL; nodes];
        let mut queue = VecDeque::new();
        loop {
            parent.iter_mut().for_each(|p| *p = NIL);
            queue.clear();
            queue.push_back(self.source);
            let mut found = false;
            'bfs: while let Some(u) = queue.pop_front() {
                let mut e = self.head[u];
                while e != NIL {
                    let w = self.to[e];
                    if self.cap[e] > 0 && parent[w] == NIL && w != self.source {
                        parent[w] = e;
                        if w == self.sink {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(w);
                    }
                    e = self.next[e];
                }
            }
            if !found {
                return flow;
            }
            let mut w = self.sink;
            while w != self.source {
                let e = parent[w];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                w = self.to[e ^ 1];
            }
            flow += 1;
        }
    }
}

/// Vertex of the signal flow graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    /// Source symbol `b` (1-based) at stage `-1`.
    Source(usize),
    /// Symbol `(node, index)` at a stage `>= 0`.
    Stored {
        stage: usize,
        node: usize,
        index: usize,
    },
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Source(b) => write!(f, "-1:{b}"),
            Vertex::Stored { stage, node, index } => write!(f, "{stage}:({node},{index})"),
        }
    }
}

/// How an edge's global-encoding contribution is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeLabel {
    /// Source symbol `row` into a stage-0 symbol: an entry of `E_0`.
    Init { row: usize },
    /// Surviving symbol carried over unchanged.
    Identity,
    /// Local coefficient `b_t(helper, index)`.
    Coefficient {
        stage: usize,
        helper: usize,
        index: usize,
    },
}

/// Signal flow graph truncated at stage `horizon`.
#[derive(Debug, Clone)]
pub struct FlowGraph {
    n: usize,
    alpha: usize,
    file_size: usize,
    horizon: usize,
    history: FailureHistory,
    forward: Digraph,
    reverse: Digraph,
    labels: Vec<Vec<EdgeLabel>>,
    sinks: Vec<bool>,
}

/// Builds the graph for stages `-1..=horizon` from the first `horizon`
/// recorded stages of `history`.
pub fn build_graph(
    params: &SystemParams,
    history: &FailureHistory,
    horizon: usize,
) -> Result<FlowGraph> {
    if history.len() < horizon {
        return Err(Error::InvalidHistory(format!(
            "graph up to stage {horizon} needs {horizon} recorded stages, have {}",
            history.len()
        )));
    }
    if history.n() != params.n || history.alpha() != params.alpha {
        return Err(Error::InvalidHistory(format!(
            "history is for n={}, alpha={} but parameters have n={}, alpha={}",
            history.n(),
            history.alpha(),
            params.n,
            params.alpha
        )));
    }
    let (n, alpha, b) = (params.n, params.alpha, params.file_size);
    let per_stage = n * alpha;
    let total = b + (horizon + 1) * per_stage;
    let mut graph = FlowGraph {
        n,
        alpha,
        file_size: b,
        horizon,
        history: history.truncated(horizon),
        forward: Digraph::new(total),
        reverse: Digraph::new(total),
        labels: vec![Vec::new(); total],
        sinks: (0..total).map(|v| v < b).collect(),
    };
    for row in 1..=b {
        for i in 1..=n {
            for j in 1..=alpha {
                let to = graph.index(0, i, j);
                graph.push_edge(row - 1, to, EdgeLabel::Init { row });
            }
        }
    }
    for t in 0..horizon {
        let failed = history.failed(t);
        for i in (1..=n).filter(|&i| i != failed) {
            for j in 1..=alpha {
                graph.push_edge(graph.index(t, i, j), graph.index(t + 1, i, j), EdgeLabel::Identity);
            }
        }
        for jn in 1..=alpha {
            let to = graph.index(t + 1, failed, jn);
            for i in (1..=n).filter(|&i| i != failed) {
                let from = graph.index(t, i, history.choice(t, i));
                graph.push_edge(
                    from,
                    to,
                    EdgeLabel::Coefficient {
                        stage: t,
                        helper: i,
                        index: jn,
                    },
                );
            }
        }
    }
    Ok(graph)
}

impl FlowGraph {
    fn push_edge(&mut self, from: usize, to: usize, label: EdgeLabel) {
        self.forward.add_edge(from, to);
        self.reverse.add_edge(to, from);
        self.labels[from].push(label);
    }

    #[inline]
    fn index(&self, stage: usize, node: usize, index: usize) -> usize {
        self.file_size + stage * self.n * self.alpha + (node - 1) * self.alpha + (index - 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn file_size(&self) -> usize {
        self.file_size
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn history(&self) -> &FailureHistory {
        &self.history
    }

    pub fn vertex_count(&self) -> usize {
        self.forward.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.forward.edge_count()
    }

    /// The graph with edges pointing from later stages back toward the sources.
    pub fn reversed(&self) -> &Digraph {
        &self.reverse
    }

    pub fn forward(&self) -> &Digraph {
        &self.forward
    }

    /// Marks the stage `-1` vertices.
    pub fn source_mask(&self) -> &[bool] {
        &self.sinks
    }

    /// Dense id of a vertex, `None` when it lies outside the truncation.
    pub fn id(&self, v: Vertex) -> Option<usize> {
        match v {
            Vertex::Source(b) if (1..=self.file_size).contains(&b) => Some(b - 1),
            Vertex::Stored { stage, node, index }
                if stage <= self.horizon
                    && (1..=self.n).contains(&node)
                    && (1..=self.alpha).contains(&index) =>
            {
                Some(self.index(stage, node, index))
            }
            _ => None,
        }
    }

    pub fn vertex(&self, id: usize) -> Vertex {
        if id < self.file_size {
            return Vertex::Source(id + 1);
        }
        let rel = id - self.file_size;
        let per_stage = self.n * self.alpha;
        Vertex::Stored {
            stage: rel / per_stage,
            node: rel % per_stage / self.alpha + 1,
            index: rel % self.alpha + 1,
        }
    }

    pub fn in_degree(&self, v: Vertex) -> usize {
        self.id(v).map_or(0, |id| self.reverse.successors(id).len())
    }

    pub fn predecessors(&self, v: Vertex) -> Vec<Vertex> {
        self.id(v).map_or_else(Vec::new, |id| {
            self.reverse
                .successors(id)
                .iter()
                .map(|&u| self.vertex(u))
                .collect()
        })
    }

    /// Every vertex of node `node` at `stage`.
    pub fn node_vertices(&self, stage: usize, node: usize) -> Vec<Vertex> {
        (1..=self.alpha)
            .map(|index| Vertex::Stored { stage, node, index })
            .collect()
    }

    /// Writes one edge per line: `from -> to label`. Labels are symbolic
    /// unless `values` supplies `E_0` and the local coefficient matrices.
    pub fn export_adjacency<W: Write>(
        &self,
        out: &mut W,
        values: Option<(&Matrix, &[Matrix])>,
    ) -> io::Result<()> {
        for from in 0..self.vertex_count() {
            for (&to, label) in self.forward.successors(from).iter().zip(&self.labels[from]) {
                let text = match (label, values) {
                    (EdgeLabel::Identity, _) => "1".to_string(),
                    (EdgeLabel::Init { row }, Some((e0, _))) => {
                        let Vertex::Stored { node, index, .. } = self.vertex(to) else {
                            unreachable!("init edges end at stage 0")
                        };
                        e0.get(row - 1, (node - 1) * self.alpha + index - 1).to_string()
                    }
                    (EdgeLabel::Init { row }, None) => format!("e0[{row}]"),
                    (
                        EdgeLabel::Coefficient {
                            stage,
                            helper,
                            index,
                        },
                        Some((_, coeffs)),
                    ) if *stage < coeffs.len() => {
                        let failed = self.history.failed(*stage);
                        let col = helper - 1 - usize::from(*helper > failed);
                        coeffs[*stage].get(index - 1, col).to_string()
                    }
                    (
                        EdgeLabel::Coefficient {
                            stage,
                            helper,
                            index,
                        },
                        _,
                    ) => format!("b{stage}({helper},{index})"),
                };
                writeln!(out, "{} -> {} {}", self.vertex(from), self.vertex(to), text)?;
            }
        }
        Ok(())
    }
}

/// Largest subset of `vertices` linkable into the source layer by
/// vertex-disjoint paths running backward through the stages.
pub fn gammoid_rank(graph: &FlowGraph, vertices: &[Vertex]) -> usize {
    let ids: Vec<usize> = vertices.iter().filter_map(|&v| graph.id(v)).collect();
    graph.reverse.linking_rank(&ids, &graph.sinks)
}

/// Which of the two stages of a gammoid ground set an element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    /// Stage `t`.
    Current,
    /// Stage `t + 1`.
    Next,
}

/// Element `(node, index)_m` of the ground set of the gammoid at stage `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Element {
    pub layer: Layer,
    pub node: usize,
    pub index: usize,
}

impl Element {
    pub fn current(node: usize, index: usize) -> Self {
        Element {
            layer: Layer::Current,
            node,
            index,
        }
    }

    pub fn next(node: usize, index: usize) -> Self {
        Element {
            layer: Layer::Next,
            node,
            index,
        }
    }

    pub fn vertex(&self, t: usize) -> Vertex {
        Vertex::Stored {
            stage: match self.layer {
                Layer::Current => t,
                Layer::Next => t + 1,
            },
            node: self.node,
            index: self.index,
        }
    }

    pub fn label(&self) -> String {
        let m = match self.layer {
            Layer::Current => "t",
            Layer::Next => "t+1",
        };
        format!("({},{})_{m}", self.node, self.index)
    }
}

/// A subset of the ground set spanning stages `t` and `t + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammoidQuery {
    pub t: usize,
    pub elements: Vec<Element>,
}

/// Whether the query's vertices can all be linked into the source layer.
pub fn is_independent(query: &GammoidQuery, graph: &FlowGraph) -> Result<bool> {
    if query.t + 1 > graph.horizon() {
        return Err(Error::InvalidHistory(format!(
            "stage {} needs a graph through stage {}",
            query.t,
            query.t + 1
        )));
    }
    let mut vertices: Vec<Vertex> = query.elements.iter().map(|e| e.vertex(query.t)).collect();
    if vertices.iter().any(|&v| graph.id(v).is_none()) {
        return Err(Error::InvalidParams("query element outside the graph".into()));
    }
    vertices.sort();
    vertices.dedup();
    if vertices.len() != query.elements.len() {
        return Err(Error::InvalidParams("query elements are not distinct".into()));
    }
    Ok(gammoid_rank(graph, &vertices) == vertices.len())
}

/// Gammoid rank of the collectors' symbols at `stage`; the file is
/// recoverable from them at graph level iff this equals the file size.
pub fn recovery_rank_at(graph: &FlowGraph, stage: usize, collectors: &[usize]) -> usize {
    let vertices: Vec<Vertex> = collectors
        .iter()
        .flat_map(|&i| graph.node_vertices(stage, i))
        .collect();
    gammoid_rank(graph, &vertices)
}

/// [`recovery_rank_at`] for the last stage of the truncation.
pub fn recovery_rank_at_stage(graph: &FlowGraph, collectors: &[usize]) -> usize {
    recovery_rank_at(graph, graph.horizon(), collectors)
}

/// Sizes of the active-vertex sets, walked from the last stage back to stage 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActiveVertexTrace {
    /// `|AV_N|, |AV_{N-1}|, .., |AV_0|`.
    pub sizes: Vec<usize>,
    /// Active symbols `(node, index)` at stage 0.
    pub stage_zero: Vec<(usize, usize)>,
    /// `min(|AV_0|, B)`: paths that reach the source layer.
    pub linked_to_source: usize,
}

/// Walks active vertices backward from the collectors' symbols at the last
/// stage. At each stage surviving symbols map to themselves and the
/// newcomer's active symbols are matched to transferred symbols of
/// available helpers, smallest node first. Each step's size is compared with
/// the size the choice-function analysis predicts; a mismatch is reported as
/// [`Error::InfeasibleLinking`].
pub fn active_vertex_trace(graph: &FlowGraph, collectors: &[usize]) -> Result<ActiveVertexTrace> {
    let (n, alpha) = (graph.n, graph.alpha);
    let mut is_collector = vec![false; n + 1];
    for &c in collectors {
        if c < 1 || c > n || is_collector[c] {
            return Err(Error::InvalidParams(format!(
                "collector set {collectors:?} is not a set of nodes in 1..={n}"
            )));
        }
        is_collector[c] = true;
    }
    let history = &graph.history;
    let horizon = graph.horizon;
    // active[i][j] for node i (1-based), index j (0-based)
    let mut active = vec![vec![false; alpha]; n + 1];
    for &c in collectors {
        active[c].iter_mut().for_each(|a| *a = true);
    }
    let count = |a: &Vec<Vec<bool>>| a.iter().flatten().filter(|&&x| x).count();
    let mut sizes = vec![count(&active)];
    let outside = (1..=n).filter(|&i| !is_collector[i]).count();

    for s in (0..horizon).rev() {
        let failed = history.failed(s);
        let before = *sizes.last().unwrap();
        let failed_vertices = active[failed].iter().filter(|&&x| x).count();
        let available: Vec<usize> = (1..=n)
            .filter(|&m| m != failed && !active[m][history.choice(s, m) - 1])
            .collect();
        active[failed].iter_mut().for_each(|a| *a = false);
        for &m in available.iter().take(failed_vertices) {
            active[m][history.choice(s, m) - 1] = true;
        }
        let realized = count(&active);

        let fails_again = history.failures()[s + 1..horizon].contains(&failed);
        let expected = if fails_again || !is_collector[failed] {
            before
        } else {
            let mut later: Vec<usize> = history.failures()[s + 1..horizon]
                .iter()
                .copied()
                .filter(|&f| is_collector[f])
                .collect();
            later.sort_unstable();
            later.dedup();
            let o = alpha.min(later.len() + outside);
            before - (alpha - o)
        };
        if realized != expected {
            return Err(Error::InfeasibleLinking {
                stage: s,
                realized,
                expected,
            });
        }
        sizes.push(realized);
    }
    let stage_zero = (1..=n)
        .flat_map(|i| (0..alpha).map(move |j| (i, j)))
        .filter(|&(i, j)| active[i][j])
        .map(|(i, j)| (i, j + 1))
        .collect();
    let last = *sizes.last().unwrap();
    Ok(ActiveVertexTrace {
        sizes,
        stage_zero,
        linked_to_source: last.min(graph.file_size),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::collector_sets;

    fn sample_graph() -> FlowGraph {
        let params = SystemParams::new(4, 3, 2, 53).unwrap();
        let mut h = FailureHistory::new(4, 2);
        h.push_with_choices(2, vec![1, 0, 1, 1]).unwrap();
        h.push_with_choices(3, vec![2, 2, 0, 2]).unwrap();
        build_graph(&params, &h, 2).unwrap()
    }

    fn stored(stage: usize, node: usize, index: usize) -> Vertex {
        Vertex::Stored { stage, node, index }
    }

    #[test]
    fn path_graph_path_graph() {
        // v1 -> v2 -> v3 -> v4 with sinks {v1, v4}
        let g = Digraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let sinks = [true, false, false, true];
        assert_eq!(g.linking_rank(&[1, 2], &sinks), 1);
        let mut independent = Vec::new();
        for mask in 0u32..16 {
            let set: Vec<usize> = (0..4).filter(|v| mask >> v & 1 == 1).collect();
            if g.linking_rank(&set, &sinks) == set.len() {
                independent.push(set.iter().map(|v| v + 1).collect::<Vec<_>>());
            }
        }
        independent.sort_by_key(|s| (s.len(), s.clone()));
        assert_eq!(
            independent,
            vec![
                vec![],
                vec![1],
                vec![2],
                vec![3],
                vec![4],
                vec![1, 2],
                vec![1, 3],
                vec![1, 4]
            ]
        );
    }

    #[test]
    fn sample_graph_structure() {
        let g = sample_graph();
        assert_eq!(g.vertex_count(), 5 + 3 * 8);
        for j in 1..=2 {
            let v = stored(1, 2, j);
            assert_eq!(g.in_degree(v), 3);
            let mut preds = g.predecessors(v);
            preds.sort();
            assert_eq!(preds, vec![stored(0, 1, 1), stored(0, 3, 1), stored(0, 4, 1)]);
        }
        for j in 1..=2 {
            let mut preds = g.predecessors(stored(2, 3, j));
            preds.sort();
            assert_eq!(preds, vec![stored(1, 1, 2), stored(1, 2, 2), stored(1, 4, 2)]);
        }
        // survivors have exactly one incoming edge
        assert_eq!(g.predecessors(stored(1, 1, 2)), vec![stored(0, 1, 2)]);
        let mut v = g.node_vertices(1, 1);
        v.extend(g.node_vertices(1, 2));
        assert_eq!(gammoid_rank(&g, &v), 4);
    }

    #[test]
    fn zero_horizon_is_complete_bipartite() {
        let params = SystemParams::new(4, 3, 2, 53).unwrap();
        let g = build_graph(&params, &FailureHistory::new(4, 2), 0).unwrap();
        assert_eq!(g.edge_count(), 5 * 8);
        for c in collector_sets(4, 3) {
            assert_eq!(recovery_rank_at_stage(&g, &c), 5);
            let trace = active_vertex_trace(&g, &c).unwrap();
            assert_eq!(trace.sizes, vec![6]);
            assert_eq!(trace.linked_to_source, 5);
        }
    }

    #[test]
    fn history_too_short() {
        let params = SystemParams::new(4, 3, 2, 53).unwrap();
        assert!(build_graph(&params, &FailureHistory::new(4, 2), 1).is_err());
    }

    #[test]
    fn single_vertex_has_rank_one() {
        let g = sample_graph();
        for id in 0..g.vertex_count() {
            assert_eq!(gammoid_rank(&g, &[g.vertex(id)]), 1);
        }
    }

    #[test]
    fn independence_examples() {
        let g = sample_graph();
        let empty = GammoidQuery {
            t: 1,
            elements: vec![],
        };
        assert!(is_independent(&empty, &g).unwrap());
        // a survivor's symbol at both stages
        let twin = GammoidQuery {
            t: 1,
            elements: vec![Element::current(1, 1), Element::next(1, 1)],
        };
        assert!(!is_independent(&twin, &g).unwrap());
        // all transferred symbols plus one newcomer symbol
        let mut elements: Vec<Element> = [1, 2, 4]
            .iter()
            .map(|&i| Element::current(i, g.history().choice(1, i)))
            .collect();
        elements.push(Element::next(3, 1));
        assert!(!is_independent(&GammoidQuery { t: 1, elements }, &g).unwrap());
        let dup = GammoidQuery {
            t: 0,
            elements: vec![Element::current(1, 1), Element::current(1, 1)],
        };
        assert!(is_independent(&dup, &g).is_err());
        let late = GammoidQuery {
            t: 2,
            elements: vec![],
        };
        assert!(is_independent(&late, &g).is_err());
    }

    #[test]
    fn export_lists_every_edge() {
        let g = sample_graph();
        let mut buf = Vec::new();
        g.export_adjacency(&mut buf, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), g.edge_count());
        assert!(text.contains("-1:1 -> 0:(1,1) e0[1]"));
        assert!(text.contains("0:(1,2) -> 1:(1,2) 1"));
        assert!(text.contains("0:(3,1) -> 1:(2,2) b0(3,2)"));
    }

    #[test]
    fn vertex_ids_round_trip() {
        let g = sample_graph();
        for id in 0..g.vertex_count() {
            assert_eq!(g.id(g.vertex(id)), Some(id));
        }
        assert_eq!(g.id(stored(3, 1, 1)), None);
        assert_eq!(g.id(Vertex::Source(6)), None);
    }
}
