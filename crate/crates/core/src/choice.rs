//! Causal choice function: which stored symbol each helper transfers.
//!
//! Stage `t` repairs node `F_t`; every other node `i` ships exactly one of
//! its `alpha` symbols, `p_t(i)`. The rule implemented in
//! [`compute_choice`] keeps the choices of a node pairwise distinct across
//! every window of at most `alpha` distinct failures between two failures of
//! that node, which is what makes unlimited repair possible.
//! [`verify_fpair_condition`] checks that property directly on any history.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

/// Failed nodes and per-stage choices. Nodes are 1-based; a choice of `0`
/// marks the failed node itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureHistory {
    n: usize,
    alpha: usize,
    failures: Vec<usize>,
    choices: Vec<Vec<usize>>,
}

impl FailureHistory {
    pub fn new(n: usize, alpha: usize) -> Self {
        FailureHistory {
            n,
            alpha,
            failures: Vec::new(),
            choices: Vec::new(),
        }
    }

    /// History whose failures are known but whose choices are not yet
    /// assigned. Use [`FailureHistory::assign_next`] to fill them stage by stage.
    pub fn with_failures(n: usize, alpha: usize, failures: Vec<usize>) -> Result<Self> {
        let mut h = Self::new(n, alpha);
        for f in failures {
            h.push_failure(f)?;
        }
        Ok(h)
    }

    /// Runs the choice rule over a whole failure sequence.
    pub fn from_failures(n: usize, alpha: usize, failures: &[usize]) -> Result<Self> {
        let mut h = Self::new(n, alpha);
        for &f in failures {
            h.record(f)?;
        }
        Ok(h)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// Number of stages with assigned choices.
    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn failures(&self) -> &[usize] {
        &self.failures
    }

    pub fn failed(&self, t: usize) -> usize {
        self.failures[t]
    }

    /// Choices of stage `t`, indexed by `node - 1`.
    pub fn choices(&self, t: usize) -> &[usize] {
        &self.choices[t]
    }

    pub fn choice(&self, t: usize, node: usize) -> usize {
        self.choices[t][node - 1]
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node < 1 || node > self.n {
            return Err(Error::InvalidHistory(format!(
                "node {node} outside 1..={}",
                self.n
            )));
        }
        Ok(())
    }

    /// Appends a failure without assigning its choices.
    pub fn push_failure(&mut self, node: usize) -> Result<()> {
        self.check_node(node)?;
        self.failures.push(node);
        Ok(())
    }

    /// Assigns choices for the oldest stage that has a failure but no choices.
    pub fn assign_next(&mut self) -> Result<&[usize]> {
        let t = self.choices.len();
        if t >= self.failures.len() {
            return Err(Error::InvalidHistory(format!(
                "stage {t} has no recorded failure"
            )));
        }
        let row = (1..=self.n)
            .map(|i| compute_choice(i, t, self))
            .collect::<Result<Vec<_>>>()?;
        self.choices.push(row);
        Ok(&self.choices[t])
    }

    /// Records the failure of `node` at the next stage and assigns choices.
    pub fn record(&mut self, node: usize) -> Result<&[usize]> {
        if self.failures.len() != self.choices.len() {
            return Err(Error::InvalidHistory(
                "pending failures without choices".into(),
            ));
        }
        self.push_failure(node)?;
        match self.assign_next() {
            Ok(_) => Ok(&self.choices[self.choices.len() - 1]),
            Err(e) => {
                self.failures.pop();
                Err(e)
            }
        }
    }

    /// Choices the rule would assign if `node` failed next, without
    /// modifying the history.
    pub fn peek_choices(&self, node: usize) -> Result<Vec<usize>> {
        let mut h = self.clone();
        h.record(node).map(<[usize]>::to_vec)
    }

    /// Records a stage with externally supplied choices (replays, tests).
    pub fn push_with_choices(&mut self, node: usize, choices: Vec<usize>) -> Result<()> {
        if self.failures.len() != self.choices.len() {
            return Err(Error::InvalidHistory(
                "pending failures without choices".into(),
            ));
        }
        self.check_node(node)?;
        if choices.len() != self.n {
            return Err(Error::InvalidHistory(format!(
                "stage {} has {} choices, expected {}",
                self.choices.len(),
                choices.len(),
                self.n
            )));
        }
        for (idx, &p) in choices.iter().enumerate() {
            let i = idx + 1;
            let ok = if i == node {
                p == 0
            } else {
                (1..=self.alpha).contains(&p)
            };
            if !ok {
                return Err(Error::InvalidHistory(format!(
                    "stage {}: choice {p} for node {i} (failed node {node}, alpha {})",
                    self.choices.len(),
                    self.alpha
                )));
            }
        }
        self.failures.push(node);
        self.choices.push(choices);
        Ok(())
    }

    /// Prefix consisting of the first `stages` stages.
    pub fn truncated(&self, stages: usize) -> FailureHistory {
        let stages = stages.min(self.choices.len());
        FailureHistory {
            n: self.n,
            alpha: self.alpha,
            failures: self.failures[..stages].to_vec(),
            choices: self.choices[..stages].to_vec(),
        }
    }

    /// Line-oriented replay form: a `# n=.. alpha=..` header followed by one
    /// `t F_t p_t(1) .. p_t(n)` line per stage.
    pub fn to_replay(&self) -> String {
        let mut out = format!("# n={} alpha={}\n", self.n, self.alpha);
        for (t, row) in self.choices.iter().enumerate() {
            let _ = write!(out, "{t} {}", self.failures[t]);
            for p in row {
                let _ = write!(out, " {p}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the replay form. `alpha` is taken from the header when present,
    /// otherwise from `alpha_hint`.
    pub fn from_replay(text: &str, alpha_hint: Option<usize>) -> Result<Self> {
        let mut n_header = None;
        let mut alpha = alpha_hint;
        let mut rows: Vec<(usize, Vec<usize>)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                for tok in comment.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("n=") {
                        n_header = Some(parse_usize(v, lineno)?);
                    } else if let Some(v) = tok.strip_prefix("alpha=") {
                        alpha = Some(parse_usize(v, lineno)?);
                    }
                }
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|tok| parse_usize(tok, lineno))
                .collect::<Result<Vec<_>>>()?;
            if nums.len() < 3 {
                return Err(Error::Parse(format!(
                    "line {}: expected `t F_t p_t(1) .. p_t(n)`",
                    lineno + 1
                )));
            }
            if nums[0] != rows.len() {
                return Err(Error::Parse(format!(
                    "line {}: stage {} out of order (expected {})",
                    lineno + 1,
                    nums[0],
                    rows.len()
                )));
            }
            rows.push((nums[1], nums[2..].to_vec()));
        }
        let n = match (n_header, rows.first()) {
            (Some(n), _) => n,
            (None, Some((_, p))) => p.len(),
            (None, None) => {
                return Err(Error::Parse("empty replay without `# n=` header".into()))
            }
        };
        let alpha = alpha.ok_or_else(|| {
            Error::Parse("replay has no `alpha=` header and no alpha was given".into())
        })?;
        let mut h = FailureHistory::new(n, alpha);
        for (failed, choices) in rows {
            h.push_with_choices(failed, choices)?;
        }
        Ok(h)
    }
}

fn parse_usize(tok: &str, lineno: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::Parse(format!("line {}: `{tok}` is not a count", lineno + 1)))
}

/// The latest stage `c < t` such that `F_c, .., F_{t-1}` contain exactly
/// `alpha` distinct nodes.
pub fn cutoff_stage(history: &FailureHistory, t: usize, alpha: usize) -> Result<usize> {
    let failures = history.failures();
    let mut seen = HashSet::new();
    for c in (0..t.min(failures.len())).rev() {
        seen.insert(failures[c]);
        if seen.len() == alpha {
            return Ok(c);
        }
    }
    Err(Error::NotEnoughHistory { stage: t, alpha })
}

/// `p_t(i)` for node `i` at stage `t`.
///
/// Needs `F_0..F_t` and the choices of stages `0..t`. Ties in the fresh pick
/// go to the smallest unused index.
pub fn compute_choice(i: usize, t: usize, history: &FailureHistory) -> Result<usize> {
    let alpha = history.alpha();
    let failures = history.failures();
    if t >= failures.len() || t > history.len() {
        return Err(Error::InvalidHistory(format!(
            "stage {t} needs failures through {t} and choices through {}",
            t as isize - 1
        )));
    }
    let ft = failures[t];
    if ft == i {
        return Ok(0);
    }
    // Nearest earlier stage where either F_t or i failed.
    let s = (0..t).rev().find(|&m| failures[m] == ft || failures[m] == i);
    let lo = s.map_or(0, |s| s + 1);
    let distinct: HashSet<usize> = failures[lo..t].iter().copied().collect();
    if distinct.len() < alpha {
        if let Some(s) = s {
            let prev = history.choice(s, i);
            if prev != 0 {
                return Ok(prev);
            }
        }
        let used: HashSet<usize> = (lo..t).map(|m| history.choice(m, i)).collect();
        (1..=alpha)
            .find(|j| !used.contains(j))
            .ok_or(Error::ExhaustedIndices { node: i, stage: t })
    } else {
        let c = cutoff_stage(history, t, alpha)?;
        Ok(history.choice(c, i))
    }
}

/// Which consecutive windows of a pair's intermediate stages are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowScope {
    /// Windows ending at the stage just before the pair's right end.
    #[default]
    Suffix,
    /// Every consecutive window of intermediate stages.
    All,
}

/// Two consecutive failures of the same node. `left = -1` and
/// `right = horizon` stand for the virtual endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FPair {
    pub node: usize,
    pub left: isize,
    pub right: usize,
}

/// A window of intermediate stages where the choice counts fell short.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FPairWitness {
    pub pair: FPair,
    /// Inclusive stage range of the offending window.
    pub window: (usize, usize),
    pub distinct_failures: usize,
    pub distinct_choices: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FPairVerdict {
    pub holds: bool,
    pub pairs_checked: usize,
    pub windows_checked: usize,
    pub witness: Option<FPairWitness>,
}

/// Every F-pair of `F_0..F_{horizon-1}`, including virtual endpoints.
/// A node that never fails contributes the pair `(-1, horizon)`.
pub fn fpairs(history: &FailureHistory, horizon: usize) -> Vec<FPair> {
    let failures = &history.failures()[..horizon];
    let mut pairs = Vec::new();
    for node in 1..=history.n() {
        let mut left: isize = -1;
        for (t, &f) in failures.iter().enumerate() {
            if f == node {
                pairs.push(FPair {
                    node,
                    left,
                    right: t,
                });
                left = t as isize;
            }
        }
        pairs.push(FPair {
            node,
            left,
            right: horizon,
        });
    }
    pairs
}

/// Checks that within every F-pair, every window of intermediate stages with
/// at most `alpha` distinct failures sees as many distinct choices of the
/// pair's node as it sees distinct failures.
pub fn verify_fpair_condition(
    history: &FailureHistory,
    alpha: usize,
    horizon: usize,
    scope: WindowScope,
) -> Result<FPairVerdict> {
    if horizon > history.len() {
        return Err(Error::InvalidHistory(format!(
            "horizon {horizon} beyond {} recorded stages",
            history.len()
        )));
    }
    let failures = history.failures();
    let mut verdict = FPairVerdict {
        holds: true,
        pairs_checked: 0,
        windows_checked: 0,
        witness: None,
    };
    for pair in fpairs(history, horizon) {
        verdict.pairs_checked += 1;
        let lo = (pair.left + 1) as usize;
        if pair.right <= lo {
            continue;
        }
        let last = pair.right - 1;
        let ends: Vec<usize> = match scope {
            WindowScope::Suffix => vec![last],
            WindowScope::All => (lo..=last).collect(),
        };
        for end in ends {
            let mut fs = HashSet::new();
            let mut ps = HashSet::new();
            for start in (lo..=end).rev() {
                fs.insert(failures[start]);
                if fs.len() > alpha {
                    break;
                }
                ps.insert(history.choice(start, pair.node));
                verdict.windows_checked += 1;
                if ps.len() != fs.len() {
                    verdict.holds = false;
                    verdict.witness = Some(FPairWitness {
                        pair,
                        window: (start, end),
                        distinct_failures: fs.len(),
                        distinct_choices: ps.len(),
                    });
                    return Ok(verdict);
                }
            }
        }
    }
    Ok(verdict)
}
