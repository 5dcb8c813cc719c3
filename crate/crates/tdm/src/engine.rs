//! Configuration validity, enumeration, counting, spec completion, and dead
//! value detection.
//!
//! The engine is an exhaustive depth-first search over feature domains in
//! declaration order, checking rules at each complete leaf. A safety cap
//! (default 1,000,000 assignments, overridable) rejects oversized state
//! spaces up front.

use crate::check::ResolvedModel;
use crate::model::{Assignment, ConfigurationSpec, ControlRule, RelationSemantics};
use std::collections::BTreeSet;
use std::fmt;

pub const DEFAULT_STATE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EngineError {
    /// Precondition violation: the model was not certified by the checker.
    UncertifiedModel,
    /// The assignment misses features a rule or the space mentions.
    IncompleteAssignment { missing: Vec<String> },
    /// E0401: state space exceeds the safety cap without the force flag.
    StateSpaceExceeded { size: u128, cap: u64 },
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::UncertifiedModel => {
                write!(f, "model is not certified; run the checker first")
            }
            EngineError::IncompleteAssignment { missing } => {
                write!(f, "assignment misses features: {}", missing.join(", "))
            }
            EngineError::StateSpaceExceeded { size, cap } => write!(
                f,
                "E0401: state space of {size} assignments exceeds the safety cap {cap}"
            ),
        }
    }
}

impl std::error::Error for EngineError {}

/// A falsified rule together with the assignment excerpt that falsifies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: ControlRule,
    /// The (feature, value) choices the rule mentions.
    pub excerpt: Vec<(String, String)>,
    pub explanation: String,
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerateOptions {
    pub limit: Option<usize>,
    pub cap: u64,
    pub force: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            limit: None,
            cap: DEFAULT_STATE_CAP,
            force: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub assignments: Vec<Assignment>,
    pub truncated: bool,
}

/// REQUIRES: choosing lhs forces rhs. EXCLUDES: lhs and rhs cannot both be
/// chosen. A false antecedent satisfies the rule.
pub fn evaluate_rule(
    resolved: &ResolvedModel,
    rule: &ControlRule,
    a: &Assignment,
) -> Result<bool, EngineError> {
    let mut missing = Vec::new();
    for feature in [&rule.lhs.feature, &rule.rhs.feature] {
        if a.get(feature).is_none() {
            missing.push(feature.clone());
        }
    }
    if !missing.is_empty() {
        return Err(EngineError::IncompleteAssignment { missing });
    }
    let lhs_holds = a.get(&rule.lhs.feature) == Some(rule.lhs.value.as_str());
    let rhs_holds = a.get(&rule.rhs.feature) == Some(rule.rhs.value.as_str());
    let semantics = resolved
        .relation_semantics(&rule.relation)
        .unwrap_or(RelationSemantics::Requires);
    Ok(match semantics {
        RelationSemantics::Requires => !lhs_holds || rhs_holds,
        RelationSemantics::Excludes => !(lhs_holds && rhs_holds),
    })
}

pub fn is_valid_configuration(
    resolved: &ResolvedModel,
    a: &Assignment,
) -> Result<(bool, Vec<Violation>), EngineError> {
    require_certified(resolved)?;
    let missing = a.missing_from(
        resolved
            .enumeration_space()
            .iter()
            .map(|f| f.name.as_str()),
    );
    if !missing.is_empty() {
        return Err(EngineError::IncompleteAssignment { missing });
    }
    let mut violations = Vec::new();
    for rule in resolved.rules() {
        if !evaluate_rule(resolved, rule, a)? {
            let excerpt = vec![
                (
                    rule.lhs.feature.clone(),
                    a.get(&rule.lhs.feature).unwrap().to_string(),
                ),
                (
                    rule.rhs.feature.clone(),
                    a.get(&rule.rhs.feature).unwrap().to_string(),
                ),
            ];
            let explanation = format!(
                "rule `{} {} {}` is falsified by {}={}, {}={}",
                rule.lhs,
                rule.relation,
                rule.rhs,
                excerpt[0].0,
                excerpt[0].1,
                excerpt[1].0,
                excerpt[1].1
            );
            violations.push(Violation {
                rule: rule.clone(),
                excerpt,
                explanation,
            });
        }
    }
    Ok((violations.is_empty(), violations))
}

/// All valid complete assignments in lexicographic order of (feature
/// declaration order, value declaration order).
pub fn enumerate_configurations(
    resolved: &ResolvedModel,
    opts: &EnumerateOptions,
) -> Result<Enumeration, EngineError> {
    search(resolved, opts, None)
}

pub fn count_configurations(resolved: &ResolvedModel, opts: &EnumerateOptions) -> Result<u64, EngineError> {
    let no_limit = EnumerateOptions {
        limit: None,
        ..*opts
    };
    Ok(enumerate_configurations(resolved, &no_limit)?.assignments.len() as u64)
}

/// Valid completions of a partial spec: required literals pinned, discarded
/// literals avoided, all rules satisfied. Same ordering as enumeration.
pub fn complete_configuration(
    resolved: &ResolvedModel,
    spec: &ConfigurationSpec,
    opts: &EnumerateOptions,
) -> Result<Vec<Assignment>, EngineError> {
    Ok(search(resolved, opts, Some(spec))?.assignments)
}

/// (feature, value) pairs that no valid configuration selects, in
/// declaration order.
pub fn detect_dead_values(
    resolved: &ResolvedModel,
    opts: &EnumerateOptions,
) -> Result<Vec<(String, String)>, EngineError> {
    let no_limit = EnumerateOptions {
        limit: None,
        ..*opts
    };
    let all = enumerate_configurations(resolved, &no_limit)?;
    let mut alive: BTreeSet<(&str, &str)> = BTreeSet::new();
    for a in &all.assignments {
        for (f, v) in &a.0 {
            alive.insert((f, v));
        }
    }
    let mut dead = Vec::new();
    for f in resolved.enumeration_space() {
        for v in &f.values {
            if !alive.contains(&(f.name.as_str(), v.as_str())) {
                dead.push((f.name.clone(), v.clone()));
            }
        }
    }
    Ok(dead)
}

fn require_certified(resolved: &ResolvedModel) -> Result<(), EngineError> {
    if resolved.certified {
        Ok(())
    } else {
        Err(EngineError::UncertifiedModel)
    }
}

fn search(
    resolved: &ResolvedModel,
    opts: &EnumerateOptions,
    spec: Option<&ConfigurationSpec>,
) -> Result<Enumeration, EngineError> {
    require_certified(resolved)?;
    let space = resolved.enumeration_space();
    let size: u128 = space.iter().map(|f| f.values.len() as u128).product();
    if size > opts.cap as u128 && !opts.force {
        return Err(EngineError::StateSpaceExceeded {
            size,
            cap: opts.cap,
        });
    }
    // collect one past the limit so truncation is exact
    let keep = opts.limit.map(|l| l + 1);
    let mut out = Vec::new();
    let mut current = Assignment::new();
    dfs(resolved, spec, 0, keep, &mut current, &mut out)?;
    let mut truncated = false;
    if let Some(limit) = opts.limit {
        if out.len() > limit {
            out.truncate(limit);
            truncated = true;
        }
    }
    Ok(Enumeration {
        assignments: out,
        truncated,
    })
}

fn dfs(
    resolved: &ResolvedModel,
    spec: Option<&ConfigurationSpec>,
    depth: usize,
    keep: Option<usize>,
    current: &mut Assignment,
    out: &mut Vec<Assignment>,
) -> Result<(), EngineError> {
    if keep.is_some_and(|k| out.len() >= k) {
        return Ok(());
    }
    let space = resolved.enumeration_space();
    if depth == space.len() {
        for rule in resolved.rules() {
            if !evaluate_rule(resolved, rule, current)? {
                return Ok(());
            }
        }
        out.push(current.clone());
        return Ok(());
    }
    let feature = &space[depth];
    for value in &feature.values {
        if let Some(spec) = spec {
            if spec
                .required
                .iter()
                .any(|l| l.feature == feature.name && &l.value != value)
            {
                continue;
            }
            if spec
                .discarded
                .iter()
                .any(|l| l.feature == feature.name && &l.value == value)
            {
                continue;
            }
        }
        current.set(&feature.name, value);
        dfs(resolved, spec, depth + 1, keep, current, out)?;
        current.0.remove(&feature.name);
    }
    Ok(())
}
