//! Independent exhaustive oracle and random model generator.
//!
//! The oracle evaluates rules by direct truth-table semantics over the full
//! Cartesian product of feature domains. It shares no code with the engine's
//! search path.

use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Requires,
    Excludes,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleRule {
    /// (feature index, value index)
    pub lhs: (usize, usize),
    pub kind: RuleKind,
    pub rhs: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct OracleModel {
    /// (feature name, value names)
    pub features: Vec<(String, Vec<String>)>,
    pub rules: Vec<OracleRule>,
}

impl OracleModel {
    /// All assignments (as value indices per feature) in odometer order:
    /// last feature varies fastest. Matches declaration-order lexicographic
    /// enumeration.
    pub fn cartesian_product(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for (_, values) in &self.features {
            let mut next = Vec::new();
            for prefix in &out {
                for vi in 0..values.len() {
                    let mut row = prefix.clone();
                    row.push(vi);
                    next.push(row);
                }
            }
            out = next;
        }
        out
    }

    pub fn rule_holds(&self, rule: &OracleRule, row: &[usize]) -> bool {
        let lhs_holds = row[rule.lhs.0] == rule.lhs.1;
        let rhs_holds = row[rule.rhs.0] == rule.rhs.1;
        match rule.kind {
            RuleKind::Requires => !lhs_holds || rhs_holds,
            RuleKind::Excludes => !(lhs_holds && rhs_holds),
        }
    }

    /// Rows of the Cartesian product on which every rule holds.
    pub fn valid_rows(&self) -> Vec<Vec<usize>> {
        self.cartesian_product()
            .into_iter()
            .filter(|row| self.rules.iter().all(|r| self.rule_holds(r, row)))
            .collect()
    }

    pub fn row_pairs(&self, row: &[usize]) -> Vec<(String, String)> {
        row.iter()
            .enumerate()
            .map(|(fi, &vi)| {
                (
                    self.features[fi].0.clone(),
                    self.features[fi].1[vi].clone(),
                )
            })
            .collect()
    }

    fn rule_source(&self, rule: &OracleRule) -> String {
        let rel = match rule.kind {
            RuleKind::Requires => "requires",
            RuleKind::Excludes => "excludes",
        };
        format!(
            "{}.{} {rel} {}.{}",
            self.features[rule.lhs.0].0,
            self.features[rule.lhs.0].1[rule.lhs.1],
            self.features[rule.rhs.0].0,
            self.features[rule.rhs.0].1[rule.rhs.1]
        )
    }

    /// TDM source text for this model.
    pub fn to_source(&self) -> String {
        self.to_source_with_extra_rule(None)
    }

    pub fn to_source_with_extra_rule(&self, extra: Option<&OracleRule>) -> String {
        let mut src = String::from("features RandModel {\n  types {\n");
        for (name, values) in &self.features {
            src.push_str(&format!("    feature {name} = {{ {} }}\n", values.join(", ")));
        }
        src.push_str("  }\n");
        let rules: Vec<&OracleRule> = self.rules.iter().chain(extra).collect();
        if !rules.is_empty() {
            src.push_str("  control {\n");
            for r in rules {
                src.push_str(&format!("    {}\n", self.rule_source(r)));
            }
            src.push_str("  }\n");
        }
        src.push_str("}\n");
        src
    }
}

/// Random model with up to 4 features, up to 3 values each, up to 6 rules.
pub fn random_model(rng: &mut impl Rng, min_features: usize) -> OracleModel {
    let n_features = rng.gen_range(min_features..=4);
    let features: Vec<(String, Vec<String>)> = (0..n_features)
        .map(|fi| {
            let n_values = rng.gen_range(1..=3);
            (
                format!("F{fi}"),
                (0..n_values).map(|vi| format!("v{vi}")).collect(),
            )
        })
        .collect();
    let mut rules = Vec::new();
    if n_features >= 2 {
        let n_rules = rng.gen_range(0..=6);
        for _ in 0..n_rules {
            rules.push(random_rule(rng, &features));
        }
    }
    OracleModel { features, rules }
}

/// Random rule over two distinct features.
pub fn random_rule(rng: &mut impl Rng, features: &[(String, Vec<String>)]) -> OracleRule {
    assert!(features.len() >= 2);
    let lf = rng.gen_range(0..features.len());
    let rf = loop {
        let c = rng.gen_range(0..features.len());
        if c != lf {
            break c;
        }
    };
    OracleRule {
        lhs: (lf, rng.gen_range(0..features[lf].1.len())),
        kind: if rng.gen_bool(0.5) {
            RuleKind::Requires
        } else {
            RuleKind::Excludes
        },
        rhs: (rf, rng.gen_range(0..features[rf].1.len())),
    }
}
