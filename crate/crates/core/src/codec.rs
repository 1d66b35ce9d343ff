//! The storage system itself: global encoding vectors, repair rounds, and
//! encoding/decoding of actual payloads.
//!
//! Column `(i - 1) * alpha + (j - 1)` of `E_t` is the global encoding vector
//! of symbol `j` on node `i` at stage `t`. A stored symbol is the message
//! row vector times its column.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::choice::FailureHistory;
use crate::error::{Error, Result};
use crate::field::{self, Field, Matrix};
use crate::flowgraph::build_graph;
use crate::oracle::{max_strict_ground_set, IsoChecker, IsoVerdict, OneLayerCheck};
use crate::params::{collector_sets, SystemParams};

/// Default number of coefficient draws before a repair gives up.
pub const DEFAULT_MAX_RETRIES: u32 = 64;

/// Global encoding vectors at one stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingState {
    pub params: SystemParams,
    pub t: usize,
    /// `B x n alpha` matrix of global encoding vectors.
    pub e: Matrix,
}

/// Everything needed to replay one repair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairRecord {
    pub t: usize,
    pub failed: usize,
    /// Indexed by `node - 1`; `0` for the failed node.
    pub choices: Vec<usize>,
    /// `alpha x (n - 1)`; column `c` belongs to the `c`-th helper in
    /// ascending node order, row `j` produces the newcomer's symbol `j + 1`.
    pub coefficients: Matrix,
}

/// Symbols held by one node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodePayload {
    pub node: usize,
    pub symbols: Vec<u64>,
}

/// Per-run tallies of helper-side work during repairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IoCounters {
    pub repairs: u64,
    pub symbols_read: u64,
    pub symbols_sent: u64,
    pub helper_field_ops: u64,
}

/// How thoroughly candidate coefficients are vetted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    /// Only checks that every collector set containing the newcomer keeps
    /// full rank. Cheap, but can steer into states from which some later
    /// repair has no valid coefficients at all.
    Recovery,
    /// Recovery ranks plus [`OneLayerCheck`]: every gammoid-independent set
    /// of the new stage stays linearly independent. Cost does not grow with
    /// the stage number.
    #[default]
    Fast,
    /// Fast checks plus the full isomorphism check against the flow graph
    /// on the reduced ground set. Desk scale only.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepairConfig {
    pub tier: Tier,
    pub max_retries: u32,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            tier: Tier::Fast,
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }
}

/// Result of a successful repair.
#[derive(Debug, Clone)]
pub struct RepairOutcome {
    pub state: EncodingState,
    pub record: RepairRecord,
    /// Coefficient draws used, including the accepted one.
    pub attempts: u32,
    /// Isomorphism verdict of the accepted draw (strict tier only).
    pub iso: Option<IsoVerdict>,
}

/// Stage-0 state: a Vandermonde matrix on `n alpha` distinct nonzero points
/// drawn from the seed, so every `B` columns are independent.
pub fn init_state(params: &SystemParams, seed: u64) -> Result<EncodingState> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    let total = params.total_symbols();
    let q = params.q();
    if q <= total as u64 {
        return Err(Error::FieldTooSmall {
            q,
            required: total as u128 + 1,
        });
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<u64> = if (q as usize) < 1 << 20 {
        let mut all: Vec<u64> = (1..q).collect();
        all.shuffle(&mut rng);
        all.truncate(total);
        all
    } else {
        let mut picked = Vec::with_capacity(total);
        while picked.len() < total {
            let x = rng.gen_range(1..q);
            if !picked.contains(&x) {
                picked.push(x);
            }
        }
        picked
    };
    Ok(EncodingState {
        params: *params,
        t: 0,
        e: Matrix::vandermonde(params.field, params.file_size, &points),
    })
}

/// Rank of the encoding vectors stored on `collectors`.
pub fn collector_rank(state: &EncodingState, collectors: &[usize]) -> usize {
    state
        .e
        .select_columns(&state.params.node_columns(collectors))
        .rank()
}

/// Collector sets whose rank falls below `B`. With `touching`, only sets
/// containing that node are examined.
pub fn recovery_violations(state: &EncodingState, touching: Option<usize>) -> Vec<Vec<usize>> {
    let p = &state.params;
    collector_sets(p.n, p.k)
        .into_iter()
        .filter(|c| touching.is_none_or(|f| c.contains(&f)))
        .filter(|c| collector_rank(state, c) < p.file_size)
        .collect()
}

fn check_choices(params: &SystemParams, failed: usize, choices: &[usize]) -> Result<()> {
    if failed < 1 || failed > params.n {
        return Err(Error::InvalidParams(format!(
            "failed node {failed} outside 1..={}",
            params.n
        )));
    }
    let ok = choices.len() == params.n
        && choices.iter().enumerate().all(|(idx, &p)| {
            if idx + 1 == failed {
                p == 0
            } else {
                (1..=params.alpha).contains(&p)
            }
        });
    if !ok {
        return Err(Error::InvalidHistory(format!(
            "choices {choices:?} invalid for failed node {failed}"
        )));
    }
    Ok(())
}

/// Successor state for the given local coefficients.
pub fn apply_coefficients(
    state: &EncodingState,
    failed: usize,
    choices: &[usize],
    coefficients: &Matrix,
) -> Result<EncodingState> {
    let p = &state.params;
    check_choices(p, failed, choices)?;
    if coefficients.rows() != p.alpha || coefficients.cols() != p.n - 1 {
        return Err(Error::DimensionMismatch(format!(
            "coefficients are {}x{}, expected {}x{}",
            coefficients.rows(),
            coefficients.cols(),
            p.alpha,
            p.n - 1
        )));
    }
    let f = p.field;
    let helpers: Vec<usize> = (1..=p.n).filter(|&i| i != failed).collect();
    let mut e = state.e.clone();
    for j in 1..=p.alpha {
        let col = p.column(failed, j);
        for r in 0..p.file_size {
            let mut acc = 0;
            for (c, &i) in helpers.iter().enumerate() {
                let src = state.e.get(r, p.column(i, choices[i - 1]));
                acc = f.add(acc, f.mul(coefficients.get(j - 1, c), src));
            }
            e.set(r, col, acc);
        }
    }
    Ok(EncodingState {
        params: *p,
        t: state.t + 1,
        e,
    })
}

fn random_matrix<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let q = field.modulus();
    let data = (0..rows * cols).map(|_| rng.gen_range(0..q)).collect();
    Matrix::from_vec(field, rows, cols, data).expect("dimensions match")
}

/// Repairs the node that `history` records as failed at stage `state.t`,
/// using the choices recorded there. Local coefficients are drawn uniformly
/// until a draw passes the configured tier.
pub fn repair<R: Rng + ?Sized>(
    state: &EncodingState,
    history: &FailureHistory,
    rng: &mut R,
    config: &RepairConfig,
) -> Result<RepairOutcome> {
    let t = state.t;
    if history.len() <= t {
        return Err(Error::InvalidHistory(format!(
            "no failure recorded for stage {t}"
        )));
    }
    let p = &state.params;
    let failed = history.failed(t);
    let choices = history.choices(t).to_vec();
    check_choices(p, failed, &choices)?;
    let layer = match config.tier {
        Tier::Recovery => None,
        Tier::Fast | Tier::Strict => Some(OneLayerCheck::new(p, &state.e, failed, &choices)),
    };
    let checker = match config.tier {
        Tier::Recovery | Tier::Fast => None,
        Tier::Strict => {
            let graph = build_graph(p, history, t + 1)?;
            Some(IsoChecker::new(&graph, t, true, max_strict_ground_set())?)
        }
    };
    for attempt in 1..=config.max_retries {
        let coefficients = random_matrix(p.field, p.alpha, p.n - 1, rng);
        let next = apply_coefficients(state, failed, &choices, &coefficients)?;
        if !recovery_violations(&next, Some(failed)).is_empty() {
            continue;
        }
        if layer.as_ref().is_some_and(|l| l.first_violation(&next.e).is_some()) {
            continue;
        }
        let iso = match &checker {
            Some(c) => {
                let verdict = c.check(&state.e, &next.e);
                if !verdict.holds {
                    continue;
                }
                Some(verdict)
            }
            None => None,
        };
        return Ok(RepairOutcome {
            state: next,
            record: RepairRecord {
                t,
                failed,
                choices,
                coefficients,
            },
            attempts: attempt,
            iso,
        });
    }
    Err(Error::CoefficientSearchExhausted {
        stage: t,
        failed,
        retries: config.max_retries,
    })
}

/// Collects the transferred symbols, one per helper in ascending node order.
/// Symbols are copied as stored; no field arithmetic happens here.
pub fn helper_extract(
    payloads: &[NodePayload],
    failed: usize,
    choices: &[usize],
    counters: &mut IoCounters,
) -> Result<Vec<u64>> {
    let before = field::ops_performed();
    let mut out = Vec::with_capacity(choices.len().saturating_sub(1));
    for node in (1..=choices.len()).filter(|&i| i != failed) {
        let payload = payloads
            .iter()
            .find(|p| p.node == node)
            .ok_or(Error::MissingHelper(node))?;
        let index = choices[node - 1];
        let symbol = *payload
            .symbols
            .get(index.wrapping_sub(1))
            .ok_or_else(|| Error::InvalidHistory(format!("node {node} has no symbol {index}")))?;
        counters.symbols_read += 1;
        counters.symbols_sent += 1;
        out.push(symbol);
    }
    counters.repairs += 1;
    counters.helper_field_ops += field::ops_performed() - before;
    Ok(out)
}

/// The newcomer's symbols: row `j` of the coefficients applied to the
/// received symbols.
pub fn newcomer_compute(node: usize, received: &[u64], coefficients: &Matrix) -> Result<NodePayload> {
    if received.len() != coefficients.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{} received symbols for {} coefficient columns",
            received.len(),
            coefficients.cols()
        )));
    }
    let f = coefficients.field();
    let symbols = (0..coefficients.rows())
        .map(|j| {
            coefficients
                .row(j)
                .iter()
                .zip(received)
                .fold(0, |acc, (&b, &s)| f.add(acc, f.mul(b, s)))
        })
        .collect();
    Ok(NodePayload { node, symbols })
}

/// Stores `message` (length `B`) under the state's encoding vectors.
pub fn encode_file(message: &[u64], state: &EncodingState) -> Result<Vec<NodePayload>> {
    let p = &state.params;
    let m: Vec<u64> = message.iter().map(|&v| p.field.reduce(v)).collect();
    let coded = state.e.left_mul_vec(&m)?;
    Ok((1..=p.n)
        .map(|node| NodePayload {
            node,
            symbols: coded[p.column(node, 1)..=p.column(node, p.alpha)].to_vec(),
        })
        .collect())
}

/// Recovers the message from the payloads of `collectors`.
pub fn reconstruct(
    collectors: &[usize],
    payloads: &[NodePayload],
    state: &EncodingState,
) -> Result<Vec<u64>> {
    let p = &state.params;
    let mut rhs = Vec::with_capacity(collectors.len() * p.alpha);
    for &c in collectors {
        let payload = payloads
            .iter()
            .find(|x| x.node == c)
            .ok_or(Error::MissingHelper(c))?;
        if payload.symbols.len() != p.alpha {
            return Err(Error::DimensionMismatch(format!(
                "node {c} holds {} symbols, expected {}",
                payload.symbols.len(),
                p.alpha
            )));
        }
        rhs.extend_from_slice(&payload.symbols);
    }
    let a = state.e.select_columns(&p.node_columns(collectors)).transpose();
    let b = Matrix::from_vec(p.field, rhs.len(), 1, rhs)?;
    Ok(field::solve(&a, &b)?.as_slice().to_vec())
}

/// `n alpha x n alpha` matrix `H_t` with `E_{t+1} = E_t H_t`.
pub fn build_transfer_matrix(record: &RepairRecord, params: &SystemParams) -> Matrix {
    let size = params.total_symbols();
    let mut h = Matrix::zeros(params.field, size, size);
    for i in (1..=params.n).filter(|&i| i != record.failed) {
        for j in 1..=params.alpha {
            let c = params.column(i, j);
            h.set(c, c, 1);
        }
    }
    let helpers = (1..=params.n).filter(|&i| i != record.failed);
    for (c, i) in helpers.enumerate() {
        let row = params.column(i, record.choices[i - 1]);
        for j in 1..=params.alpha {
            h.set(row, params.column(record.failed, j), record.coefficients.get(j - 1, c));
        }
    }
    h
}

/// Self-describing record of a run: parameters, initial and current
/// encoding vectors, and every repair that led from one to the other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub params: SystemParams,
    pub seed: u64,
    pub t: usize,
    pub e0: Vec<Vec<u64>>,
    pub e: Vec<Vec<u64>>,
    pub repairs: Vec<SnapshotRepair>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotRepair {
    pub t: usize,
    pub failed: usize,
    pub choices: Vec<usize>,
    pub coefficients: Vec<Vec<u64>>,
}

impl Snapshot {
    pub fn new(seed: u64, initial: &EncodingState, current: &EncodingState, records: &[RepairRecord]) -> Self {
        Snapshot {
            params: current.params,
            seed,
            t: current.t,
            e0: initial.e.to_rows(),
            e: current.e.to_rows(),
            repairs: records
                .iter()
                .map(|r| SnapshotRepair {
                    t: r.t,
                    failed: r.failed,
                    choices: r.choices.clone(),
                    coefficients: r.coefficients.to_rows(),
                })
                .collect(),
        }
    }

    fn state(&self, t: usize, rows: &[Vec<u64>]) -> Result<EncodingState> {
        let e = Matrix::from_rows(self.params.field, rows)?;
        if e.rows() != self.params.file_size || e.cols() != self.params.total_symbols() {
            return Err(Error::DimensionMismatch(format!(
                "encoding matrix is {}x{}, expected {}x{}",
                e.rows(),
                e.cols(),
                self.params.file_size,
                self.params.total_symbols()
            )));
        }
        Ok(EncodingState {
            params: self.params,
            t,
            e,
        })
    }

    pub fn initial_state(&self) -> Result<EncodingState> {
        self.state(0, &self.e0)
    }

    pub fn current_state(&self) -> Result<EncodingState> {
        self.state(self.t, &self.e)
    }

    pub fn records(&self) -> Result<Vec<RepairRecord>> {
        self.repairs
            .iter()
            .map(|r| {
                let coefficients = Matrix::from_rows(self.params.field, &r.coefficients)?;
                if coefficients.rows() != self.params.alpha || coefficients.cols() != self.params.n - 1 {
                    return Err(Error::DimensionMismatch(format!(
                        "stage {} coefficients are {}x{}",
                        r.t,
                        coefficients.rows(),
                        coefficients.cols()
                    )));
                }
                Ok(RepairRecord {
                    t: r.t,
                    failed: r.failed,
                    choices: r.choices.clone(),
                    coefficients,
                })
            })
            .collect()
    }

    pub fn history(&self) -> Result<FailureHistory> {
        let mut h = FailureHistory::new(self.params.n, self.params.alpha);
        for r in &self.repairs {
            h.push_with_choices(r.failed, r.choices.clone())?;
        }
        Ok(h)
    }

    /// Every intermediate state, replayed from `e0` through the recorded
    /// coefficients.
    pub fn replay_states(&self) -> Result<Vec<EncodingState>> {
        let mut states = vec![self.initial_state()?];
        for r in self.records()? {
            let last = states.last().unwrap();
            states.push(apply_coefficients(last, r.failed, &r.choices, &r.coefficients)?);
        }
        Ok(states)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}
