//! Experiment driver: failure models, the repair loop with payload tracking,
//! JSON-lines reports, and the file-level commands used by `regen-sim`.

use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::choice::{compute_choice, verify_fpair_condition, FPairVerdict, FailureHistory, WindowScope};
use crate::codec::{
    self, apply_coefficients, encode_file, helper_extract, init_state, newcomer_compute,
    reconstruct, EncodingState, IoCounters, NodePayload, RepairConfig,
    RepairOutcome, Snapshot, Tier,
};
use crate::error::{Error, Result};
use crate::flowgraph::{build_graph, recovery_rank_at_stage};
use crate::oracle::{for_each_combination, max_strict_ground_set, IsoChecker, IsoVerdict};
use crate::params::{collector_sets, tradeoff_curve, Rational, SystemParams};

/// How the next failed node is picked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureModel {
    /// Uniform over all nodes.
    Uniform,
    /// Nodes `1, 2, .., n, 1, ..`.
    RoundRobin,
    /// Greedy adversary: tries every node and fails the one whose repair
    /// leaves the least slack (see [`stress_margin`]).
    AdversarialWorstNode,
    /// Fixed sequence of nodes.
    Scripted(Vec<usize>),
}

impl FailureModel {
    /// Parses `uniform`, `round-robin`, `adversarial-worst-node`; scripted
    /// sequences come from [`FailureModel::scripted_from_text`].
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "uniform" | "uniform-random" => Ok(FailureModel::Uniform),
            "round-robin" => Ok(FailureModel::RoundRobin),
            "adversarial-worst-node" | "adversarial" => Ok(FailureModel::AdversarialWorstNode),
            other => Err(Error::InvalidParams(format!("unknown failure model `{other}`"))),
        }
    }

    /// Node indices separated by whitespace or commas; `#` starts a comment.
    pub fn scripted_from_text(text: &str) -> Result<Self> {
        let mut nodes = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line.split(|c: char| c.is_whitespace() || c == ',') {
                if tok.is_empty() {
                    continue;
                }
                let v = tok.parse().map_err(|_| {
                    Error::Parse(format!("line {}: `{tok}` is not a node index", lineno + 1))
                })?;
                nodes.push(v);
            }
        }
        Ok(FailureModel::Scripted(nodes))
    }

    pub fn name(&self) -> &'static str {
        match self {
            FailureModel::Uniform => "uniform",
            FailureModel::RoundRobin => "round-robin",
            FailureModel::AdversarialWorstNode => "adversarial-worst-node",
            FailureModel::Scripted(_) => "scripted",
        }
    }
}

/// Which collector sets are rank-checked after each repair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Collectors {
    All,
    /// This many distinct sets drawn at random each stage.
    Sample(usize),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    /// `None` picks the smallest prime satisfying the field-size bound.
    pub q: Option<u64>,
    pub allow_small_field: bool,
    pub rounds: usize,
    pub failure_model: FailureModel,
    pub tier: Tier,
    pub collectors: Collectors,
    pub seed: u64,
    pub max_retries: u32,
    /// Stages at which the stored payload is decoded from every collector
    /// set. Empty means the first and last stage.
    pub reconstruct_at: Vec<usize>,
    /// Adds wall-clock time to stage reports (breaks byte-identical replay).
    pub timings: bool,
}

impl RunConfig {
    pub fn new(n: usize, k: usize, ell: usize) -> Self {
        RunConfig {
            n,
            k,
            ell,
            q: None,
            allow_small_field: false,
            rounds: 100,
            failure_model: FailureModel::Uniform,
            tier: Tier::Fast,
            collectors: Collectors::All,
            seed: 0,
            max_retries: codec::DEFAULT_MAX_RETRIES,
            reconstruct_at: Vec::new(),
            timings: false,
        }
    }

    pub fn params(&self) -> Result<SystemParams> {
        let q = match self.q {
            Some(q) => q,
            None => SystemParams::auto_q(self.n, self.k, self.ell)?,
        };
        if self.allow_small_field {
            SystemParams::allow_small_field(self.n, self.k, self.ell, q)
        } else {
            SystemParams::new(self.n, self.k, self.ell, q)
        }
    }

    fn reconstruct_stages(&self) -> Vec<usize> {
        if self.reconstruct_at.is_empty() {
            vec![0, self.rounds]
        } else {
            self.reconstruct_at.clone()
        }
    }
}

/// Collector sets whose decoded payload did not match the stored message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReconstructCheck {
    pub collectors_checked: usize,
    pub failures: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub t: usize,
    pub failed: usize,
    pub choices: Vec<usize>,
    pub attempts: u32,
    pub collectors_checked: usize,
    pub violations: Vec<Vec<usize>>,
    /// Newcomer's computed symbols equal the message times its new vectors.
    pub payload_consistent: bool,
    pub symbols_sent: u64,
    pub helper_field_ops: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iso: Option<IsoVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruct: Option<ReconstructCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_us: Option<u64>,
}

impl StageReport {
    fn passed(&self) -> bool {
        self.violations.is_empty()
            && self.payload_consistent
            && self.helper_field_ops == 0
            && self.iso.as_ref().is_none_or(|v| v.holds)
            && self.reconstruct.as_ref().is_none_or(|r| r.failures.is_empty())
    }
}

/// One line of the run report.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Report {
    Init {
        n: usize,
        k: usize,
        ell: usize,
        alpha: usize,
        file_size: usize,
        q: u64,
        required_q: u128,
        seed: u64,
        tier: Tier,
        failure_model: String,
        collectors_checked: usize,
        violations: Vec<Vec<usize>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        reconstruct: Option<ReconstructCheck>,
    },
    Stage(StageReport),
    Summary {
        rounds_completed: usize,
        passed: bool,
        io: IoCounters,
        max_attempts: u32,
        fpair: FPairVerdict,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub params: SystemParams,
    pub reports: Vec<Report>,
    pub snapshot: Snapshot,
    pub history: FailureHistory,
    pub states: Vec<EncodingState>,
    pub io: IoCounters,
    pub passed: bool,
    pub error: Option<Error>,
}

impl RunOutcome {
    pub fn report_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            out.push_str(&serde_json::to_string(r).expect("report serializes"));
            out.push('\n');
        }
        out
    }

    /// `0` iff every enabled check passed.
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.passed)
    }

    pub fn stage_reports(&self) -> impl Iterator<Item = &StageReport> {
        self.reports.iter().filter_map(|r| match r {
            Report::Stage(s) => Some(s),
            _ => None,
        })
    }
}

/// Slack left in a state, compared lexicographically (smaller is tighter):
/// the fewest columns that can be erased from any collector set while
/// keeping rank `B`, then the number of `B`-column subsets of the whole
/// matrix that still have full rank.
pub fn stress_margin(state: &EncodingState) -> (usize, usize) {
    let p = &state.params;
    let b = p.file_size;
    let width = p.k * p.alpha;
    let mut tolerance = width - b;
    for c in collector_sets(p.n, p.k) {
        let cols = p.node_columns(&c);
        let mut m = 0;
        while m < tolerance {
            let mut all_full = true;
            for_each_combination(width, width - m - 1, |idx| {
                let sub: Vec<usize> = idx.iter().map(|&i| cols[i]).collect();
                all_full = state.e.select_columns(&sub).rank() == b;
                !all_full
            });
            if !all_full {
                break;
            }
            m += 1;
        }
        tolerance = tolerance.min(m);
    }
    let mut full = 0;
    for_each_combination(p.total_symbols(), b, |idx| {
        if state.e.select_columns(idx).rank() == b {
            full += 1;
        }
        false
    });
    (tolerance, full)
}

fn checked_collectors(params: &SystemParams, mode: Collectors, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let all = collector_sets(params.n, params.k);
    match mode {
        Collectors::All => all,
        Collectors::Sample(m) if m >= all.len() => all,
        Collectors::Sample(m) => {
            let mut picked: Vec<usize> = index::sample(rng, all.len(), m).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| all[i].clone()).collect()
        }
    }
}

fn rank_violations(state: &EncodingState, sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    sets.iter()
        .filter(|c| codec::collector_rank(state, c) < state.params.file_size)
        .cloned()
        .collect()
}

fn reconstruct_check(
    sets: &[Vec<usize>],
    payloads: &[NodePayload],
    state: &EncodingState,
    message: &[u64],
) -> ReconstructCheck {
    ReconstructCheck {
        collectors_checked: sets.len(),
        failures: sets
            .iter()
            .filter(|c| reconstruct(c, payloads, state).ok().as_deref() != Some(message))
            .cloned()
            .collect(),
    }
}

fn pick_adversarial(
    state: &EncodingState,
    history: &FailureHistory,
    rng: &ChaCha8Rng,
    config: &RepairConfig,
) -> Result<(FailureHistory, std::result::Result<RepairOutcome, Error>, ChaCha8Rng)> {
    let n = state.params.n;
    let last_failure = |node: usize| -> isize {
        history
            .failures()
            .iter()
            .rposition(|&f| f == node)
            .map_or(-1, |t| t as isize)
    };
    type Key = (Option<(usize, usize)>, isize, usize);
    let mut best: Option<(Key, FailureHistory, std::result::Result<RepairOutcome, Error>, ChaCha8Rng)> =
        None;
    for node in 1..=n {
        let mut h = history.clone();
        h.record(node)?;
        let mut r = rng.clone();
        let result = codec::repair(state, &h, &mut r, config);
        // A node whose repair cannot be completed is the worst case of all.
        let margin = match &result {
            Ok(out) => Some(stress_margin(&out.state)),
            Err(_) => None,
        };
        let key = (margin, last_failure(node), node);
        let better = match &best {
            None => true,
            Some((k, ..)) => key < *k,
        };
        if better {
            best = Some((key, h, result, r));
        }
    }
    let (_, h, result, r) = best.expect("at least one node");
    Ok((h, result, r))
}

/// Runs `config.rounds` repairs and every enabled check. Setup problems
/// (bad parameters, field too small for the initial encoding) are returned
/// as errors; problems during the run end it early and are recorded in the
/// outcome.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let params = config.params()?;
    if let FailureModel::Scripted(nodes) = &config.failure_model {
        if nodes.len() < config.rounds {
            return Err(Error::InvalidParams(format!(
                "script has {} failures, {} rounds requested",
                nodes.len(),
                config.rounds
            )));
        }
        if let Some(bad) = nodes.iter().find(|&&v| v < 1 || v > params.n) {
            return Err(Error::InvalidParams(format!(
                "scripted node {bad} outside 1..={}",
                params.n
            )));
        }
    }
    let initial = init_state(&params, config.seed)?;
    let mut fail_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut coef_rng = ChaCha8Rng::seed_from_u64(config.seed);
    coef_rng.set_stream(1);
    let mut msg_rng = ChaCha8Rng::seed_from_u64(config.seed);
    msg_rng.set_stream(2);
    let mut sample_rng = ChaCha8Rng::seed_from_u64(config.seed);
    sample_rng.set_stream(3);

    let q = params.q();
    let message: Vec<u64> = (0..params.file_size).map(|_| msg_rng.gen_range(0..q)).collect();
    let mut payloads = encode_file(&message, &initial)?;
    let repair_cfg = RepairConfig {
        tier: config.tier,
        max_retries: config.max_retries,
    };
    let recon_at = config.reconstruct_stages();
    let all_sets = collector_sets(params.n, params.k);

    let sets = checked_collectors(&params, config.collectors, &mut sample_rng);
    let init_violations = rank_violations(&initial, &sets);
    let init_recon = recon_at
        .contains(&0)
        .then(|| reconstruct_check(&all_sets, &payloads, &initial, &message));
    let mut passed = init_violations.is_empty()
        && init_recon.as_ref().is_none_or(|r| r.failures.is_empty());
    let mut reports = vec![Report::Init {
        n: params.n,
        k: params.k,
        ell: params.ell,
        alpha: params.alpha,
        file_size: params.file_size,
        q,
        required_q: params.required_field_size()?,
        seed: config.seed,
        tier: config.tier,
        failure_model: config.failure_model.name().to_string(),
        collectors_checked: sets.len(),
        violations: init_violations,
        reconstruct: init_recon,
    }];

    let mut history = FailureHistory::new(params.n, params.alpha);
    let mut states = vec![initial.clone()];
    let mut records = Vec::new();
    let mut io = IoCounters::default();
    let mut error: Option<Error> = None;
    let mut max_attempts = 0;

    for t in 0..config.rounds {
        let started = Instant::now();
        let state = states.last().unwrap();
        let result = match &config.failure_model {
            FailureModel::AdversarialWorstNode => {
                let (h, result, r) = pick_adversarial(state, &history, &coef_rng, &repair_cfg)?;
                history = h;
                coef_rng = r;
                result
            }
            model => {
                let node = match model {
                    FailureModel::Uniform => fail_rng.gen_range(1..=params.n),
                    FailureModel::RoundRobin => t % params.n + 1,
                    FailureModel::Scripted(nodes) => nodes[t],
                    FailureModel::AdversarialWorstNode => unreachable!(),
                };
                history.record(node)?;
                codec::repair(state, &history, &mut coef_rng, &repair_cfg)
            }
        };
        let outcome = match result {
            Ok(o) => o,
            Err(e) => {
                error = Some(e);
                passed = false;
                break;
            }
        };
        let failed = outcome.record.failed;
        let before = io;
        let received = helper_extract(&payloads, failed, &outcome.record.choices, &mut io)?;
        let newcomer = newcomer_compute(failed, &received, &outcome.record.coefficients)?;
        let expected = encode_file(&message, &outcome.state)?;
        let payload_consistent = newcomer == expected[failed - 1];
        payloads[failed - 1] = newcomer;

        let sets = checked_collectors(&params, config.collectors, &mut sample_rng);
        let violations = rank_violations(&outcome.state, &sets);
        let reconstruct = recon_at
            .contains(&(t + 1))
            .then(|| reconstruct_check(&all_sets, &payloads, &outcome.state, &message));
        let report = StageReport {
            t,
            failed,
            choices: outcome.record.choices.clone(),
            attempts: outcome.attempts,
            collectors_checked: sets.len(),
            violations,
            payload_consistent,
            symbols_sent: io.symbols_sent - before.symbols_sent,
            helper_field_ops: io.helper_field_ops - before.helper_field_ops,
            iso: outcome.iso.clone(),
            reconstruct,
            elapsed_us: config.timings.then(|| started.elapsed().as_micros() as u64),
        };
        passed &= report.passed();
        max_attempts = max_attempts.max(outcome.attempts);
        reports.push(Report::Stage(report));
        records.push(outcome.record);
        states.push(outcome.state);
    }

    let fpair = verify_fpair_condition(&history, params.alpha, history.len(), WindowScope::Suffix)?;
    passed &= fpair.holds;
    reports.push(Report::Summary {
        rounds_completed: records.len(),
        passed,
        io,
        max_attempts,
        fpair,
        error: error.as_ref().map(ToString::to_string),
    });
    let snapshot = Snapshot::new(config.seed, &initial, states.last().unwrap(), &records);
    Ok(RunOutcome {
        params,
        reports,
        snapshot,
        history: history.truncated(records.len()),
        states,
        io,
        passed,
        error,
    })
}

/// Tradeoff vertices as CSV: `ell,alpha,beta,alpha_decimal,beta_decimal`.
pub fn cmd_tradeoff(file_size: Rational, k: u32, d: u32) -> Result<String> {
    let mut out = String::from("ell,alpha,beta,alpha_decimal,beta_decimal\n");
    for p in tradeoff_curve(file_size, k, d)? {
        let dec = |r: Rational| *r.numer() as f64 / *r.denom() as f64;
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{:.6}",
            p.ell,
            p.alpha,
            p.beta,
            dec(p.alpha),
            dec(p.beta)
        );
    }
    Ok(out)
}

/// Parses `3`, `3/2` as an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("`{text}` is not a rational number"));
    match text.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Ok(Rational::new(a, b))
        }
        None => Ok(Rational::from_integer(text.trim().parse().map_err(|_| bad())?)),
    }
}

/// First stage and node at which recorded choices differ from the rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleMismatch {
    pub t: usize,
    pub node: usize,
    pub recorded: usize,
    pub rule: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecoveryVerdict {
    pub collectors_checked: usize,
    pub violations: Vec<Vec<usize>>,
}

/// Output of [`cmd_verify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub input: &'static str,
    pub passed: bool,
    pub stages: usize,
    pub fpair: FPairVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule_mismatch: Option<RuleMismatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovery: Option<RecoveryVerdict>,
    /// Current matrix equals `E_0` pushed through every recorded repair.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistent_with_records: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub iso: Vec<IsoVerdict>,
}

fn rule_mismatch(history: &FailureHistory) -> Result<Option<RuleMismatch>> {
    for t in 0..history.len() {
        for node in 1..=history.n() {
            let rule = if node == history.failed(t) {
                0
            } else {
                compute_choice(node, t, history)?
            };
            let recorded = history.choice(t, node);
            if rule != recorded {
                return Ok(Some(RuleMismatch {
                    t,
                    node,
                    recorded,
                    rule,
                }));
            }
        }
    }
    Ok(None)
}

fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// Verifies a snapshot (JSON) or a replay (text).
///
/// Snapshots get the collector-rank check on the current matrix, a replay of
/// every recorded repair from `E_0`, and the F-pair condition; the strict
/// tier adds the isomorphism check at every stage. Replays get the F-pair
/// condition and, when `k` is given, graph-level recovery ranks at the last
/// stage. Both report the first place the recorded choices depart from the
/// choice rule; that alone does not fail verification.
pub fn cmd_verify(text: &str, tier: Tier, alpha: Option<usize>, k: Option<usize>) -> Result<VerifyReport> {
    if looks_like_json(text) {
        let snap = Snapshot::from_json(text)?;
        let history = snap.history()?;
        let current = snap.current_state()?;
        let p = snap.params;
        let sets = collector_sets(p.n, p.k);
        let violations = rank_violations(&current, &sets);
        let states = snap.replay_states()?;
        let consistent = states.last() == Some(&current) && snap.t == history.len();
        let fpair = verify_fpair_condition(&history, p.alpha, history.len(), WindowScope::Suffix)?;
        let mut iso = Vec::new();
        if tier == Tier::Strict && !history.is_empty() {
            let graph = build_graph(&p, &history, history.len())?;
            for t in 0..history.len() {
                let checker = IsoChecker::new(&graph, t, true, max_strict_ground_set())?;
                iso.push(checker.check(&states[t].e, &states[t + 1].e));
            }
        }
        let passed = violations.is_empty() && consistent && fpair.holds && iso.iter().all(|v| v.holds);
        Ok(VerifyReport {
            input: "snapshot",
            passed,
            stages: history.len(),
            fpair,
            rule_mismatch: rule_mismatch(&history)?,
            recovery: Some(RecoveryVerdict {
                collectors_checked: sets.len(),
                violations,
            }),
            consistent_with_records: Some(consistent),
            iso,
        })
    } else {
        let history = FailureHistory::from_replay(text, alpha)?;
        let fpair = verify_fpair_condition(&history, history.alpha(), history.len(), WindowScope::Suffix)?;
        let recovery = match k {
            Some(k) => {
                let params = geometry(history.n(), k, history.alpha())?;
                let graph = build_graph(&params, &history, history.len())?;
                let sets = collector_sets(params.n, params.k);
                let violations = sets
                    .iter()
                    .filter(|c| recovery_rank_at_stage(&graph, c) < params.file_size)
                    .cloned()
                    .collect();
                Some(RecoveryVerdict {
                    collectors_checked: sets.len(),
                    violations,
                })
            }
            None => None,
        };
        let passed = fpair.holds && recovery.as_ref().is_none_or(|r| r.violations.is_empty());
        Ok(VerifyReport {
            input: "replay",
            passed,
            stages: history.len(),
            fpair,
            rule_mismatch: rule_mismatch(&history)?,
            recovery,
            consistent_with_records: None,
            iso: Vec::new(),
        })
    }
}

/// Parameters that only fix the graph shape; the field is irrelevant there.
fn geometry(n: usize, k: usize, alpha: usize) -> Result<SystemParams> {
    if alpha == 0 || alpha >= n {
        return Err(Error::InvalidParams(format!(
            "alpha={alpha} does not fit n={n}"
        )));
    }
    SystemParams::allow_small_field(n, k, n - alpha, 2)
}

/// Adjacency listing of the flow graph behind a snapshot (with coefficient
/// values) or a replay (symbolic labels; needs `k`).
pub fn cmd_export_graph(text: &str, alpha: Option<usize>, k: Option<usize>) -> Result<String> {
    let mut out = Vec::new();
    if looks_like_json(text) {
        let snap = Snapshot::from_json(text)?;
        let history = snap.history()?;
        let graph = build_graph(&snap.params, &history, history.len())?;
        let e0 = snap.initial_state()?.e;
        let coeffs: Vec<_> = snap.records()?.into_iter().map(|r| r.coefficients).collect();
        graph
            .export_adjacency(&mut out, Some((&e0, &coeffs)))
            .expect("writing to a Vec cannot fail");
    } else {
        let history = FailureHistory::from_replay(text, alpha)?;
        let k = k.ok_or_else(|| Error::InvalidParams("exporting a replay needs k".into()))?;
        let params = geometry(history.n(), k, history.alpha())?;
        let graph = build_graph(&params, &history, history.len())?;
        graph
            .export_adjacency(&mut out, None)
            .expect("writing to a Vec cannot fail");
    }
    Ok(String::from_utf8(out).expect("labels are ASCII"))
}

/// Replays a run's repairs from a snapshot, checking each stored matrix
/// against `E_0` and the coefficients. Returns the stage of the first
/// disagreement.
pub fn first_inconsistent_stage(snapshot: &Snapshot) -> Result<Option<usize>> {
    let records = snapshot.records()?;
    let mut state = snapshot.initial_state()?;
    for r in &records {
        state = apply_coefficients(&state, r.failed, &r.choices, &r.coefficients)?;
    }
    Ok((state != snapshot.current_state()?).then_some(snapshot.t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tradeoff_csv_for_unit_file() {
        let csv = cmd_tradeoff(Rational::from_integer(1), 4, 8).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "ell,alpha,beta,alpha_decimal,beta_decimal");
        assert_eq!(lines[4], "4,1/4,1/20,0.250000,0.050000");
        assert_eq!(lines.len(), 5);
        let single = cmd_tradeoff(Rational::from_integer(1), 1, 1).unwrap();
        assert_eq!(single.lines().nth(1), Some("1,1,1,1.000000,1.000000"));
    }

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rational("3/2").unwrap(), Rational::new(3, 2));
        assert_eq!(parse_rational("4").unwrap(), Rational::from_integer(4));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn scripted_model_parses() {
        let m = FailureModel::scripted_from_text("1 2, 3\n# comment\n4 # tail\n").unwrap();
        assert_eq!(m, FailureModel::Scripted(vec![1, 2, 3, 4]));
        assert!(FailureModel::scripted_from_text("1 two").is_err());
        assert!(FailureModel::parse("chaos").is_err());
    }

    #[test]
    fn zero_rounds_reports_init_only() {
        let mut cfg = RunConfig::new(4, 3, 2);
        cfg.rounds = 0;
        let out = run(&cfg).unwrap();
        assert!(out.passed);
        assert_eq!(out.reports.len(), 2);
        assert!(matches!(out.reports[0], Report::Init { .. }));
        assert_eq!(out.stage_reports().count(), 0);
    }

    #[test]
    fn short_uniform_run_passes() {
        let mut cfg = RunConfig::new(4, 3, 2);
        cfg.rounds = 30;
        cfg.seed = 3;
        let out = run(&cfg).unwrap();
        assert!(out.passed, "{}", out.report_jsonl());
        assert_eq!(out.stage_reports().count(), 30);
        assert_eq!(first_inconsistent_stage(&out.snapshot).unwrap(), None);
    }

    #[test]
    fn adversary_prefers_tight_states() {
        let mut cfg = RunConfig::new(4, 3, 2);
        cfg.rounds = 10;
        cfg.failure_model = FailureModel::AdversarialWorstNode;
        let out = run(&cfg).unwrap();
        assert!(out.passed);
    }

    #[test]
    fn margin_of_initial_state() {
        let p = SystemParams::new(4, 3, 2, 53).unwrap();
        let s = init_state(&p, 1).unwrap();
        // MDS start: any one column of a 6-column collector set can go
        assert_eq!(stress_margin(&s), (1, 56));
    }
}
