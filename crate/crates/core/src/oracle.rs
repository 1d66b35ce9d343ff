//! Exhaustive ground truth for the gammoid and linear matroids.
//!
//! Everything here enumerates subsets or path systems outright and is only
//! meant for small instances. Size guards return [`Error::TooLarge`] instead
//! of running for hours.

use std::env;

use serde::Serialize;

use crate::codec::EncodingState;
use crate::error::{Error, Result};
use crate::field::Matrix;
use crate::flowgraph::{gammoid_rank, Digraph, Element, FlowGraph, Layer, Vertex};
use crate::params::{binomial, SystemParams};

/// Largest graph [`brute_linking_rank`] will search.
pub const MAX_BRUTE_VERTICES: usize = 30;

/// Largest graph for which [`brute_rank_table`] materializes all subsets.
pub const MAX_TABLE_VERTICES: usize = 24;

/// Default cap on the ground-set size of strict isomorphism checks.
pub const DEFAULT_MAX_STRICT_GROUND_SET: usize = 24;

/// Ground-set cap for strict checks, from `REGEN_SIM_MAX_STRICT_GROUND_SET`
/// when set to a positive integer.
pub fn max_strict_ground_set() -> usize {
    env::var("REGEN_SIM_MAX_STRICT_GROUND_SET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&v: &usize| v > 0)
        .unwrap_or(DEFAULT_MAX_STRICT_GROUND_SET)
}

/// Tries to route every vertex of `set` (a bitmask) into `sinks` along
/// vertex-disjoint paths by exhaustive search.
fn linkable(g: &Digraph, sinks: &[bool], set: u64) -> bool {
    let members: Vec<usize> = (0..g.vertex_count()).filter(|v| set >> v & 1 == 1).collect();
    route(g, sinks, &members, set)
}

fn route(g: &Digraph, sinks: &[bool], pending: &[usize], used: u64) -> bool {
    let Some((&v, rest)) = pending.split_first() else {
        return true;
    };
    // `used` always contains v itself; the path may not touch other used vertices.
    walk(g, sinks, v, used, rest)
}

fn walk(g: &Digraph, sinks: &[bool], at: usize, used: u64, rest: &[usize]) -> bool {
    if sinks[at] && route(g, sinks, rest, used) {
        return true;
    }
    g.successors(at).iter().any(|&w| {
        used >> w & 1 == 0 && walk(g, sinks, w, used | 1 << w, rest)
    })
}

/// Size of the largest subset of `from` linkable into `sinks`, found by
/// searching path systems outright.
pub fn brute_linking_rank_digraph(g: &Digraph, sinks: &[bool], from: &[usize]) -> Result<usize> {
    if g.vertex_count() > MAX_BRUTE_VERTICES {
        return Err(Error::TooLarge {
            size: g.vertex_count(),
            limit: MAX_BRUTE_VERTICES,
        });
    }
    let mut from: Vec<usize> = from.to_vec();
    from.sort_unstable();
    from.dedup();
    for size in (0..=from.len()).rev() {
        let mut found = false;
        for_each_combination(from.len(), size, |idx| {
            let mask = idx.iter().fold(0u64, |m, &i| m | 1 << from[i]);
            found = linkable(g, sinks, mask);
            found
        });
        if found {
            return Ok(size);
        }
    }
    Ok(0)
}

/// Exhaustive linking rank of `vertices` into the source layer.
pub fn brute_linking_rank(graph: &FlowGraph, vertices: &[Vertex]) -> Result<usize> {
    let ids: Vec<usize> = vertices.iter().filter_map(|&v| graph.id(v)).collect();
    brute_linking_rank_digraph(graph.reversed(), graph.source_mask(), &ids)
}

/// Linking rank of every subset of the vertex set, indexed by bitmask.
/// Independence comes from path search; ranks of dependent sets follow from
/// `rank(S) = max_x rank(S - x)`.
pub fn brute_rank_table(g: &Digraph, sinks: &[bool]) -> Result<Vec<u8>> {
    let v = g.vertex_count();
    if v > MAX_TABLE_VERTICES {
        return Err(Error::TooLarge {
            size: v,
            limit: MAX_TABLE_VERTICES,
        });
    }
    let sink_count = sinks.iter().filter(|&&s| s).count();
    let mut rank = vec![0u8; 1 << v];
    for mask in 1usize..1 << v {
        let size = mask.count_ones() as usize;
        if size <= sink_count && linkable(g, sinks, mask as u64) {
            rank[mask] = size as u8;
            continue;
        }
        let mut best = 0;
        let mut bits = mask;
        while bits != 0 {
            let low = bits & bits.wrapping_neg();
            best = best.max(rank[mask ^ low]);
            bits ^= low;
        }
        rank[mask] = best;
    }
    Ok(rank)
}

/// Checks normalization, monotonicity and submodularity of a rank table over
/// `m` elements. Returns the first offending pair of masks.
pub fn check_rank_axioms(rank: &[u8], m: usize) -> std::result::Result<(), (usize, usize)> {
    for s in 0usize..1 << m {
        if rank[s] as u32 > s.count_ones() {
            return Err((s, s));
        }
        for x in (0..m).filter(|x| s >> x & 1 == 0) {
            let sx = s | 1 << x;
            if rank[sx] < rank[s] || rank[sx] > rank[s] + 1 {
                return Err((s, sx));
            }
            for y in (x + 1..m).filter(|y| s >> y & 1 == 0) {
                let sy = s | 1 << y;
                if u32::from(rank[sx]) + u32::from(rank[sy]) < u32::from(rank[sx | sy]) + u32::from(rank[s]) {
                    return Err((sx, sy));
                }
            }
        }
    }
    Ok(())
}

/// Calls `visit` with each `size`-subset of `0..n` in lexicographic order
/// until it returns `true`.
pub(crate) fn for_each_combination(n: usize, size: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        if visit(&idx) {
            return;
        }
        let Some(pos) = (0..size).rev().find(|&p| idx[p] != p + n - size) else {
            return;
        };
        idx[pos] += 1;
        for p in pos + 1..size {
            idx[p] = idx[p - 1] + 1;
        }
    }
}

/// Where the independence bitmap of a [`MatroidSnapshot`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatroidSource {
    Gammoid,
    Linear,
}

/// Independent sets of size at most the rank bound over a small ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatroidSnapshot {
    pub source: MatroidSource,
    pub ground: Vec<Element>,
    pub max_size: usize,
    independent: Vec<bool>,
}

impl MatroidSnapshot {
    fn build(
        source: MatroidSource,
        ground: Vec<Element>,
        max_size: usize,
        mut indep: impl FnMut(&[Element]) -> bool,
    ) -> Result<Self> {
        let m = ground.len();
        if m > MAX_TABLE_VERTICES {
            return Err(Error::TooLarge {
                size: m,
                limit: MAX_TABLE_VERTICES,
            });
        }
        let independent = (0usize..1 << m)
            .map(|mask| {
                mask.count_ones() as usize <= max_size && {
                    let set: Vec<Element> = (0..m)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| ground[i])
                        .collect();
                    indep(&set)
                }
            })
            .collect();
        let snap = MatroidSnapshot {
            source,
            ground,
            max_size,
            independent,
        };
        snap.check_axioms()?;
        Ok(snap)
    }

    /// Gammoid on `X_t` (optionally reduced) read off `graph`.
    pub fn gammoid(graph: &FlowGraph, t: usize, reduced: bool) -> Result<Self> {
        let ground = ground_set(graph, t, reduced)?;
        Self::build(MatroidSource::Gammoid, ground, graph.file_size(), |set| {
            let vs: Vec<Vertex> = set.iter().map(|e| e.vertex(t)).collect();
            gammoid_rank(graph, &vs) == vs.len()
        })
    }

    /// Linear matroid of the encoding vectors of stages `t` and `t + 1`.
    pub fn linear(e_t: &Matrix, e_next: &Matrix, graph: &FlowGraph, t: usize, reduced: bool) -> Result<Self> {
        let ground = ground_set(graph, t, reduced)?;
        let alpha = graph.alpha();
        Self::build(MatroidSource::Linear, ground, graph.file_size(), |set| {
            linear_rank(e_t, e_next, alpha, set) == set.len()
        })
    }

    pub fn is_independent(&self, mask: usize) -> bool {
        self.independent[mask]
    }

    /// Checks I1 (empty set), I2 (closed under subsets) and I3 (augmentation
    /// between sets whose sizes differ by one) on the stored family.
    pub fn check_axioms(&self) -> Result<()> {
        let m = self.ground.len();
        if !self.independent[0] {
            return Err(Error::AxiomViolation("empty set is dependent".into()));
        }
        let indep: Vec<usize> = (0usize..1 << m).filter(|&s| self.independent[s]).collect();
        for &s in &indep {
            for x in (0..m).filter(|x| s >> x & 1 == 1) {
                if !self.independent[s ^ 1 << x] {
                    return Err(Error::AxiomViolation(format!(
                        "subset {:#b} of independent {s:#b} is dependent",
                        s ^ 1 << x
                    )));
                }
            }
        }
        let mut by_size = vec![Vec::new(); m + 1];
        for &s in &indep {
            by_size[s.count_ones() as usize].push(s);
        }
        for k in 0..m {
            for &a in &by_size[k] {
                for &b in &by_size[k + 1] {
                    let diff = b & !a;
                    let ok = (0..m).any(|x| diff >> x & 1 == 1 && self.independent[a | 1 << x]);
                    if !ok {
                        return Err(Error::AxiomViolation(format!(
                            "{a:#b} cannot be augmented from {b:#b}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn column_of(alpha: usize, e: &Element) -> usize {
    (e.node - 1) * alpha + (e.index - 1)
}

/// Rank of the encoding vectors of `set`.
pub fn linear_rank(e_t: &Matrix, e_next: &Matrix, alpha: usize, set: &[Element]) -> usize {
    let field = e_t.field();
    let rows = e_t.rows();
    let mut m = Matrix::zeros(field, rows, set.len());
    for (c, el) in set.iter().enumerate() {
        let src = match el.layer {
            Layer::Current => e_t,
            Layer::Next => e_next,
        };
        let col = column_of(alpha, el);
        for r in 0..rows {
            m.set(r, c, src.get(r, col));
        }
    }
    m.rank()
}

/// Ground set of the gammoid at stage `t`: every symbol at stages `t` and
/// `t + 1`, or in reduced form the stage-`t` symbols plus the newcomer's.
pub fn ground_set(graph: &FlowGraph, t: usize, reduced: bool) -> Result<Vec<Element>> {
    if t + 1 > graph.horizon() {
        return Err(Error::InvalidHistory(format!(
            "stage {t} needs a graph through stage {}",
            t + 1
        )));
    }
    let (n, alpha) = (graph.n(), graph.alpha());
    let failed = graph.history().failed(t);
    let mut ground = Vec::with_capacity(2 * n * alpha);
    for i in 1..=n {
        for j in 1..=alpha {
            ground.push(Element::current(i, j));
        }
    }
    for i in 1..=n {
        if reduced && i != failed {
            continue;
        }
        for j in 1..=alpha {
            ground.push(Element::next(i, j));
        }
    }
    Ok(ground)
}

/// First subset on which the two matroids disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoWitness {
    pub elements: Vec<String>,
    pub linear_rank: usize,
    pub gammoid_rank: usize,
}

/// Outcome of a strict isomorphism check at one stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoVerdict {
    pub t: usize,
    pub holds: bool,
    pub ground_set: usize,
    pub subsets_checked: usize,
    pub witness: Option<IsoWitness>,
}

/// Gammoid side of the isomorphism check, computed once per stage so that
/// many candidate coefficient matrices can be tested against it.
#[derive(Debug, Clone)]
pub struct IsoChecker {
    t: usize,
    alpha: usize,
    ground: Vec<Element>,
    /// Subsets of size at most `B` as ground indices, with their gammoid rank,
    /// in size-major lexicographic order.
    subsets: Vec<(Vec<usize>, usize)>,
}

impl IsoChecker {
    /// Prepares the check at stage `t`. `reduced` keeps only the newcomer's
    /// stage-`t+1` symbols, which loses nothing: a survivor's symbol is the
    /// same vertex and vector at both stages.
    pub fn new(graph: &FlowGraph, t: usize, reduced: bool, limit: usize) -> Result<Self> {
        let ground = ground_set(graph, t, reduced)?;
        if ground.len() > limit {
            return Err(Error::TooLarge {
                size: ground.len(),
                limit,
            });
        }
        let mut subsets = Vec::new();
        for size in 0..=graph.file_size().min(ground.len()) {
            for_each_combination(ground.len(), size, |idx| {
                let vs: Vec<Vertex> = idx.iter().map(|&i| ground[i].vertex(t)).collect();
                subsets.push((idx.to_vec(), gammoid_rank(graph, &vs)));
                false
            });
        }
        Ok(IsoChecker {
            t,
            alpha: graph.alpha(),
            ground,
            subsets,
        })
    }

    pub fn ground(&self) -> &[Element] {
        &self.ground
    }

    pub fn subset_count(&self) -> usize {
        self.subsets.len()
    }

    /// Compares linear and gammoid independence on every prepared subset.
    pub fn check(&self, e_t: &Matrix, e_next: &Matrix) -> IsoVerdict {
        let mut checked = 0;
        for (idx, grank) in &self.subsets {
            checked += 1;
            let set: Vec<Element> = idx.iter().map(|&i| self.ground[i]).collect();
            let lrank = linear_rank(e_t, e_next, self.alpha, &set);
            if (lrank == set.len()) != (*grank == set.len()) {
                return IsoVerdict {
                    t: self.t,
                    holds: false,
                    ground_set: self.ground.len(),
                    subsets_checked: checked,
                    witness: Some(IsoWitness {
                        elements: set.iter().map(Element::label).collect(),
                        linear_rank: lrank,
                        gammoid_rank: *grank,
                    }),
                };
            }
        }
        IsoVerdict {
            t: self.t,
            holds: true,
            ground_set: self.ground.len(),
            subsets_checked: checked,
            witness: None,
        }
    }
}

/// Independence check for the symbols of stage `t + 1` that needs only
/// `E_t`, not the graph.
///
/// When the columns of `E_t` already behave exactly like the gammoid on the
/// stage-`t` vertices, a stage-`t+1` set made of newcomer symbols `I_1` and
/// survivor symbols `I_2` is gammoid-independent iff `I_2` is independent and
/// `I_2` together with the transferred symbols has rank at least
/// `|I_1| + |I_2|`. Checking that every such set of size `B` with nonempty
/// `I_1` is linearly independent after the repair therefore carries the
/// exact correspondence from one stage to the next. Starting from an MDS
/// `E_0`, it holds at every stage.
#[derive(Debug, Clone)]
pub struct OneLayerCheck {
    alpha: usize,
    failed: usize,
    /// `(newcomer indices, survivor columns)` of every gammoid basis that
    /// touches the newcomer.
    bases: Vec<(Vec<usize>, Vec<usize>)>,
}

impl OneLayerCheck {
    pub fn new(params: &SystemParams, e_t: &Matrix, failed: usize, choices: &[usize]) -> Self {
        let (n, alpha, b) = (params.n, params.alpha, params.file_size);
        let survivors: Vec<usize> = (1..=n)
            .filter(|&i| i != failed)
            .flat_map(|i| (1..=alpha).map(move |j| params.column(i, j)))
            .collect();
        let transferred: Vec<usize> = (1..=n)
            .filter(|&i| i != failed)
            .map(|i| params.column(i, choices[i - 1]))
            .collect();
        let mut bases = Vec::new();
        for o in 1..=alpha.min(b) {
            let mut picks = Vec::new();
            for_each_combination(alpha, o, |idx| {
                picks.push(idx.iter().map(|j| j + 1).collect::<Vec<_>>());
                false
            });
            for_each_combination(survivors.len(), b - o, |idx| {
                let i2: Vec<usize> = idx.iter().map(|&k| survivors[k]).collect();
                if e_t.select_columns(&i2).rank() < i2.len() {
                    return false;
                }
                let mut with_t = i2.clone();
                with_t.extend(transferred.iter().filter(|c| !i2.contains(c)));
                if e_t.select_columns(&with_t).rank() < b {
                    return false;
                }
                for i1 in &picks {
                    bases.push((i1.clone(), i2.clone()));
                }
                false
            });
        }
        OneLayerCheck {
            alpha,
            failed,
            bases,
        }
    }

    /// Number of sets that must stay independent.
    pub fn basis_count(&self) -> usize {
        self.bases.len()
    }

    /// First required set that `e_next` leaves dependent, as
    /// `(newcomer indices, survivor columns)`.
    pub fn first_violation(&self, e_next: &Matrix) -> Option<(&[usize], &[usize])> {
        self.bases
            .iter()
            .find(|(i1, i2)| {
                let mut cols: Vec<usize> = i1
                    .iter()
                    .map(|j| (self.failed - 1) * self.alpha + j - 1)
                    .collect();
                cols.extend_from_slice(i2);
                e_next.select_columns(&cols).rank() < cols.len()
            })
            .map(|(a, b)| (a.as_slice(), b.as_slice()))
    }
}

/// Checks that the encoding vectors of stages `t` and `t + 1` form a linear
/// matroid matching the gammoid at stage `t` on every subset of size at most
/// `B` of the reduced ground set.
pub fn isomorphism_check(
    state_t: &EncodingState,
    state_next: &EncodingState,
    graph: &FlowGraph,
    t: usize,
) -> Result<IsoVerdict> {
    let checker = IsoChecker::new(graph, t, true, max_strict_ground_set())?;
    Ok(checker.check(&state_t.e, &state_next.e))
}

/// As [`isomorphism_check`] over the unreduced ground set of `2 n alpha` symbols.
pub fn isomorphism_check_full(
    state_t: &EncodingState,
    state_next: &EncodingState,
    graph: &FlowGraph,
    t: usize,
) -> Result<IsoVerdict> {
    let checker = IsoChecker::new(graph, t, false, max_strict_ground_set())?;
    Ok(checker.check(&state_t.e, &state_next.e))
}

/// Evaluates the one-layer criterion for independence of `set` at stage `t`:
/// after replacing survivors' stage-`t+1` symbols by their stage-`t` copies,
/// the newcomer's symbols `I_1` must be matched to distinct transferred
/// symbols `Y` outside `I_2` with `Y + I_2` independent one stage earlier.
pub fn one_layer_criterion(graph: &FlowGraph, t: usize, set: &[Element]) -> Result<bool> {
    if t + 1 > graph.horizon() {
        return Err(Error::InvalidHistory(format!(
            "stage {t} needs a graph through stage {}",
            t + 1
        )));
    }
    let history = graph.history();
    let failed = history.failed(t);
    let mut i1 = Vec::new();
    let mut i2: Vec<(usize, usize)> = Vec::new();
    for e in set {
        match e.layer {
            Layer::Next if e.node == failed => i1.push(*e),
            _ => {
                if i2.contains(&(e.node, e.index)) {
                    return Ok(false);
                }
                i2.push((e.node, e.index));
            }
        }
    }
    let transferred: Vec<(usize, usize)> = (1..=graph.n())
        .filter(|&i| i != failed)
        .map(|i| (i, history.choice(t, i)))
        .filter(|p| !i2.contains(p))
        .collect();
    if transferred.len() < i1.len() {
        return Ok(false);
    }
    let stored = |(node, index): (usize, usize)| Vertex::Stored {
        stage: t,
        node,
        index,
    };
    let mut found = false;
    for_each_combination(transferred.len(), i1.len(), |idx| {
        let vs: Vec<Vertex> = idx
            .iter()
            .map(|&k| stored(transferred[k]))
            .chain(i2.iter().map(|&p| stored(p)))
            .collect();
        found = gammoid_rank(graph, &vs) == vs.len();
        found
    });
    Ok(found)
}

/// Whether [`one_layer_criterion`] agrees with direct linking independence.
pub fn one_layer_agrees(graph: &FlowGraph, t: usize, set: &[Element]) -> Result<bool> {
    if graph.vertex_count() > MAX_BRUTE_VERTICES * 8 {
        return Err(Error::TooLarge {
            size: graph.vertex_count(),
            limit: MAX_BRUTE_VERTICES * 8,
        });
    }
    let criterion = one_layer_criterion(graph, t, set)?;
    let mut vs: Vec<Vertex> = set.iter().map(|e| e.vertex(t)).collect();
    vs.sort();
    vs.dedup();
    let direct = vs.len() == set.len() && gammoid_rank(graph, &vs) == vs.len();
    Ok(criterion == direct)
}

/// Union bound on the fraction of local coefficient matrices that break
/// some gammoid-independent set: `sum_o C(alpha, o) C((n-1) alpha, B-o) / q`.
/// The numerator equals `C(n alpha, B) - C((n-1) alpha, B)`.
pub fn bad_coefficient_bound(params: &SystemParams) -> (u128, u64) {
    let (n, alpha, b) = (params.n as u64, params.alpha as u64, params.file_size as u64);
    let numerator = (1..=alpha.min(b))
        .map(|o| binomial(alpha, o) * binomial((n - 1) * alpha, b - o))
        .sum();
    (numerator, params.q())
}
