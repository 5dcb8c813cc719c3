//! Name resolution and conformance checking.
//!
//! A parsed model is checked against the fixed meta-model schema: every
//! literal must name a declared feature and an in-domain value, relations
//! must resolve to builtin semantics, and product declarations must be
//! consistent with the interfaces they reference. A model with zero ERROR
//! diagnostics is certified for the configuration engine.
//!
//! Error codes:
//!   E0201 unknown feature in literal
//!   E0202 value not in feature's domain
//!   E0203 duplicate name in a scope
//!   E0204 configuration requires two values of one feature
//!   E0205 rule uses relation with no builtin semantics
//!   E0206 implementation realizes unknown interface
//!   E0207 predicate references feature not visible to the interface
//!   E0208 implementation body names a method absent from the interface
//!   E0209 require/discard overlap in one configuration spec
//! Warnings:
//!   W0301 same-feature control rule
//!   W0302 feature value unused by any rule, guard, or spec
//!   W0303 association names a feature that no rule connects

use crate::diag::{has_errors, sort_diagnostics, Diagnostic};
use crate::model::*;
use crate::span::SourceSpan;
use std::collections::{BTreeMap, BTreeSet};

/// Checked model plus the symbol information the engine and generator need.
#[derive(Debug, Clone)]
pub struct ResolvedModel {
    pub model: Model,
    pub certified: bool,
    relations: BTreeMap<String, RelationSemantics>,
    /// All features by name: domain, global, and inherent.
    features: BTreeMap<String, FeatureDecl>,
    /// Enumeration space in canonical order: domain, global, then inherent
    /// features referenced by a rule, spec, or implementation predicate.
    space: Vec<FeatureDecl>,
}

impl ResolvedModel {
    pub fn feature(&self, name: &str) -> Option<&FeatureDecl> {
        self.features.get(name)
    }

    pub fn relation_semantics(&self, name: &str) -> Option<RelationSemantics> {
        self.relations.get(name).copied().or(match name {
            "requires" => Some(RelationSemantics::Requires),
            "excludes" => Some(RelationSemantics::Excludes),
            _ => None,
        })
    }

    pub fn enumeration_space(&self) -> &[FeatureDecl] {
        &self.space
    }

    /// Control rules followed by global rules.
    pub fn rules(&self) -> impl Iterator<Item = &ControlRule> {
        self.model
            .meta
            .control
            .iter()
            .chain(self.model.meta.global.rules.iter())
    }

    pub fn configuration(&self, name: &str) -> Option<&ConfigurationSpec> {
        self.model
            .meta
            .configurations
            .iter()
            .find(|c| c.name == name)
    }

    pub fn interfaces(&self) -> &[InterfaceDecl] {
        self.model
            .product
            .as_ref()
            .map(|p| p.interfaces.as_slice())
            .unwrap_or(&[])
    }

    pub fn implementations(&self) -> &[ImplementationDecl] {
        self.model
            .product
            .as_ref()
            .map(|p| p.implementations.as_slice())
            .unwrap_or(&[])
    }
}

/// Sub-span of a literal covering only its value part, assuming the literal
/// sits on one line.
fn value_span(lit: &Literal) -> SourceSpan {
    let mut s = lit.span.clone();
    if s.line_start == s.line_end {
        s.col_start += lit.feature.chars().count() as u32 + 1;
    }
    s
}

pub fn check(model: &Model) -> (ResolvedModel, Vec<Diagnostic>) {
    let mut cx = Checker {
        model,
        diags: Vec::new(),
        features: BTreeMap::new(),
        relations: BTreeMap::new(),
        used_values: BTreeSet::new(),
        referenced_inherent: BTreeSet::new(),
    };
    cx.collect_features();
    cx.collect_relations();
    cx.check_rules();
    cx.check_configurations();
    cx.check_product();
    cx.warn_unused_values();
    cx.warn_unconnected_associations();

    let mut diags = cx.diags;
    sort_diagnostics(&mut diags);
    let certified = !has_errors(&diags);

    let mut space: Vec<FeatureDecl> = Vec::new();
    for f in model
        .meta
        .features
        .iter()
        .chain(model.meta.global.features.iter())
    {
        space.push(f.clone());
    }
    if let Some(p) = &model.product {
        for iface in &p.interfaces {
            for f in &iface.inherent_features {
                if cx.referenced_inherent.contains(&f.name)
                    && !space.iter().any(|g| g.name == f.name)
                {
                    space.push(f.clone());
                }
            }
        }
    }

    (
        ResolvedModel {
            model: model.clone(),
            certified,
            relations: cx.relations,
            features: cx.features,
            space,
        },
        diags,
    )
}

struct Checker<'a> {
    model: &'a Model,
    diags: Vec<Diagnostic>,
    features: BTreeMap<String, FeatureDecl>,
    relations: BTreeMap<String, RelationSemantics>,
    /// (feature, value) pairs mentioned by any rule, guard, or spec.
    used_values: BTreeSet<(String, String)>,
    /// Inherent features mentioned by a rule, spec, or implementation
    /// predicate; these join the enumeration space.
    referenced_inherent: BTreeSet<String>,
}

impl<'a> Checker<'a> {
    fn error(&mut self, code: &'static str, span: &SourceSpan, msg: String) {
        self.diags.push(Diagnostic::error(code, span.clone(), msg));
    }

    fn warning(&mut self, code: &'static str, span: &SourceSpan, msg: String) {
        self.diags.push(Diagnostic::warning(code, span.clone(), msg));
    }

    fn collect_features(&mut self) {
        // domain and global features share one scope
        for f in self
            .model
            .meta
            .features
            .iter()
            .chain(self.model.meta.global.features.iter())
        {
            self.declare_feature(f, "model");
        }
        if let Some(p) = &self.model.product {
            for iface in &p.interfaces {
                let mut seen_here: BTreeSet<&str> = BTreeSet::new();
                for f in &iface.inherent_features {
                    if seen_here.contains(f.name.as_str()) || self.features.contains_key(&f.name) {
                        self.error(
                            "E0203",
                            &f.span,
                            format!(
                                "duplicate feature name `{}` in scope of interface `{}`",
                                f.name, iface.name
                            ),
                        );
                        continue;
                    }
                    seen_here.insert(&f.name);
                    self.check_value_domain(f);
                    self.features.insert(f.name.clone(), f.clone());
                }
            }
        }
    }

    fn declare_feature(&mut self, f: &FeatureDecl, scope: &str) {
        if self.features.contains_key(&f.name) {
            self.error(
                "E0203",
                &f.span,
                format!("duplicate feature name `{}` in {scope} scope", f.name),
            );
            return;
        }
        self.check_value_domain(f);
        self.features.insert(f.name.clone(), f.clone());
    }

    fn check_value_domain(&mut self, f: &FeatureDecl) {
        let mut seen = BTreeSet::new();
        for v in &f.values {
            if !seen.insert(v.as_str()) {
                self.error(
                    "E0203",
                    &f.span,
                    format!("duplicate value `{v}` in feature `{}`", f.name),
                );
            }
        }
        if f.values.iter().any(|v| v == &f.name) {
            self.error(
                "E0203",
                &f.span,
                format!("feature name `{}` also appears among its values", f.name),
            );
        }
    }

    fn collect_relations(&mut self) {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for r in &self.model.meta.relations {
            if !seen.insert(&r.name) {
                self.error(
                    "E0203",
                    &r.span,
                    format!("duplicate relation name `{}`", r.name),
                );
                continue;
            }
            let semantics = r.semantics.or(match r.name.as_str() {
                "requires" => Some(RelationSemantics::Requires),
                "excludes" => Some(RelationSemantics::Excludes),
                _ => None,
            });
            match semantics {
                Some(s) => {
                    self.relations.insert(r.name.clone(), s);
                }
                None => self.error(
                    "E0205",
                    &r.span,
                    format!(
                        "relation `{}` has no builtin semantics; alias it with \
                         `= requires` or `= excludes`",
                        r.name
                    ),
                ),
            }
        }
    }

    /// Resolves a literal against the full feature table. Returns whether it
    /// resolved cleanly.
    fn resolve_literal(&mut self, lit: &Literal) -> bool {
        let Some(f) = self.features.get(&lit.feature) else {
            self.error(
                "E0201",
                &lit.span,
                format!("unknown feature `{}`", lit.feature),
            );
            return false;
        };
        if !f.values.contains(&lit.value) {
            let domain = f.values.join(", ");
            self.error(
                "E0202",
                &value_span(lit),
                format!(
                    "`{}` is not a value of feature `{}` (domain: {domain})",
                    lit.value, lit.feature
                ),
            );
            return false;
        }
        self.used_values
            .insert((lit.feature.clone(), lit.value.clone()));
        self.mark_inherent(&lit.feature);
        true
    }

    fn mark_inherent(&mut self, feature: &str) {
        let Some(p) = &self.model.product else { return };
        if p.interfaces
            .iter()
            .flat_map(|i| i.inherent_features.iter())
            .any(|f| f.name == feature)
        {
            self.referenced_inherent.insert(feature.to_string());
        }
    }

    fn check_rule(&mut self, rule: &ControlRule) {
        self.resolve_literal(&rule.lhs);
        self.resolve_literal(&rule.rhs);
        let builtin = match rule.relation.as_str() {
            "requires" => Some(RelationSemantics::Requires),
            "excludes" => Some(RelationSemantics::Excludes),
            _ => None,
        };
        let semantics = self.relations.get(&rule.relation).copied().or(builtin);
        let Some(semantics) = semantics else {
            self.error(
                "E0205",
                &rule.span,
                format!(
                    "relation `{}` has no builtin semantics in rule `{} {} {}`",
                    rule.relation, rule.lhs, rule.relation, rule.rhs
                ),
            );
            return;
        };
        if rule.lhs.feature == rule.rhs.feature {
            let effect = match semantics {
                RelationSemantics::Requires if rule.lhs.value == rule.rhs.value => "vacuous",
                RelationSemantics::Requires => "contradictory when the antecedent holds",
                RelationSemantics::Excludes if rule.lhs.value == rule.rhs.value => {
                    "contradictory when the value is chosen"
                }
                RelationSemantics::Excludes => "vacuous: a feature takes one value",
            };
            self.warning(
                "W0301",
                &rule.span,
                format!(
                    "rule relates two values of feature `{}`; it is {effect}",
                    rule.lhs.feature
                ),
            );
        }
    }

    fn check_rules(&mut self) {
        let rules: Vec<ControlRule> = self
            .model
            .meta
            .control
            .iter()
            .chain(self.model.meta.global.rules.iter())
            .cloned()
            .collect();
        for rule in &rules {
            self.check_rule(rule);
        }
    }

    fn check_configurations(&mut self) {
        let specs = self.model.meta.configurations.clone();
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for spec in &specs {
            if !seen.insert(spec.name.clone()) {
                self.error(
                    "E0203",
                    &spec.span,
                    format!("duplicate configuration name `{}`", spec.name),
                );
            }
            let mut required_features: BTreeMap<&str, &Literal> = BTreeMap::new();
            for lit in &spec.required {
                self.resolve_literal(lit);
                if let Some(prev) = required_features.get(lit.feature.as_str()) {
                    self.error(
                        "E0204",
                        &lit.span,
                        format!(
                            "configuration `{}` requires both `{}` and `{}` of feature `{}`",
                            spec.name, prev.value, lit.value, lit.feature
                        ),
                    );
                } else {
                    required_features.insert(&lit.feature, lit);
                }
            }
            for lit in &spec.discarded {
                self.resolve_literal(lit);
                if spec
                    .required
                    .iter()
                    .any(|r| r.feature == lit.feature && r.value == lit.value)
                {
                    self.error(
                        "E0209",
                        &lit.span,
                        format!(
                            "configuration `{}` both requires and discards `{}`",
                            spec.name, lit
                        ),
                    );
                }
            }
        }
    }

    fn check_product(&mut self) {
        let Some(product) = self.model.product.clone() else {
            return;
        };
        let mut iface_names: BTreeSet<&str> = BTreeSet::new();
        for iface in &product.interfaces {
            if !iface_names.insert(&iface.name) {
                self.error(
                    "E0203",
                    &iface.span,
                    format!("duplicate interface name `{}`", iface.name),
                );
            }
            self.check_interface(iface);
        }
        let mut impl_names: BTreeSet<&str> = BTreeSet::new();
        for imp in &product.implementations {
            if !impl_names.insert(&imp.name) {
                self.error(
                    "E0203",
                    &imp.span,
                    format!("duplicate implementation name `{}`", imp.name),
                );
            }
            let iface = product.interfaces.iter().find(|i| i.name == imp.realizes);
            match iface {
                None => self.error(
                    "E0206",
                    &imp.span,
                    format!(
                        "implementation `{}` realizes unknown interface `{}`",
                        imp.name, imp.realizes
                    ),
                ),
                Some(iface) => {
                    self.check_predicate(&imp.when, iface, true);
                    let methods: BTreeSet<&str> = iface
                        .members
                        .iter()
                        .filter(|m| m.kind == MemberKind::Method)
                        .map(|m| m.name.as_str())
                        .collect();
                    for (mname, _) in &imp.bodies {
                        if !methods.contains(mname.as_str()) {
                            self.error(
                                "E0208",
                                &imp.span,
                                format!(
                                    "implementation `{}` defines method `{mname}` absent from \
                                     interface `{}`",
                                    imp.name, imp.realizes
                                ),
                            );
                        }
                    }
                }
            }
        }
    }

    fn check_interface(&mut self, iface: &InterfaceDecl) {
        for used in &iface.used_features {
            let declared = self
                .model
                .meta
                .features
                .iter()
                .chain(self.model.meta.global.features.iter())
                .any(|f| &f.name == used);
            if !declared {
                self.error(
                    "E0201",
                    &iface.span,
                    format!(
                        "interface `{}` uses undeclared feature `{used}`",
                        iface.name
                    ),
                );
            }
        }
        let mut seen: Vec<(&MemberKind, &str, &Option<Predicate>)> = Vec::new();
        for member in &iface.members {
            let key = (&member.kind, member.name.as_str(), &member.guard);
            if seen.contains(&key) {
                self.error(
                    "E0203",
                    &member.span,
                    format!(
                        "duplicate member `{}` (same kind and guard) in interface `{}`",
                        member.name, iface.name
                    ),
                );
            }
            seen.push(key);
            if let Some(guard) = &member.guard {
                self.check_predicate(guard, iface, false);
            }
        }
    }

    /// `joins_space`: implementation predicates pull referenced inherent
    /// features into the enumeration space; member guards do not.
    fn check_predicate(&mut self, pred: &Predicate, iface: &InterfaceDecl, joins_space: bool) {
        let visible: BTreeSet<String> = visible_features(self.model, iface)
            .iter()
            .map(|f| f.name.clone())
            .collect();
        for lit in pred.literals() {
            let Some(f) = self.features.get(&lit.feature).cloned() else {
                self.error(
                    "E0201",
                    &lit.span,
                    format!("unknown feature `{}`", lit.feature),
                );
                continue;
            };
            if !visible.contains(&lit.feature) {
                self.error(
                    "E0207",
                    &lit.span,
                    format!(
                        "feature `{}` is not visible to interface `{}` (not used, global, \
                         or inherent)",
                        lit.feature, iface.name
                    ),
                );
                continue;
            }
            if !f.values.contains(&lit.value) {
                let domain = f.values.join(", ");
                self.error(
                    "E0202",
                    &value_span(lit),
                    format!(
                        "`{}` is not a value of feature `{}` (domain: {domain})",
                        lit.value, lit.feature
                    ),
                );
                continue;
            }
            self.used_values
                .insert((lit.feature.clone(), lit.value.clone()));
            if joins_space {
                self.mark_inherent(&lit.feature);
            }
        }
    }

    fn warn_unused_values(&mut self) {
        let all: Vec<FeatureDecl> = self
            .model
            .meta
            .features
            .iter()
            .chain(self.model.meta.global.features.iter())
            .chain(
                self.model
                    .product
                    .iter()
                    .flat_map(|p| p.interfaces.iter())
                    .flat_map(|i| i.inherent_features.iter()),
            )
            .cloned()
            .collect();
        for f in all {
            for v in &f.values {
                if !self.used_values.contains(&(f.name.clone(), v.clone())) {
                    self.warning(
                        "W0302",
                        &f.span,
                        format!(
                            "value `{v}` of feature `{}` is unused by any rule, guard, or spec",
                            f.name
                        ),
                    );
                }
            }
        }
    }

    fn warn_unconnected_associations(&mut self) {
        let feats: Vec<FeatureDecl> = self
            .model
            .meta
            .features
            .iter()
            .chain(self.model.meta.global.features.iter())
            .cloned()
            .collect();
        for f in feats {
            for assoc in &f.associations {
                if !self.features.contains_key(assoc) {
                    self.error(
                        "E0201",
                        &f.span,
                        format!(
                            "association of feature `{}` names unknown feature `{assoc}`",
                            f.name
                        ),
                    );
                    continue;
                }
                let connected = self
                    .model
                    .meta
                    .control
                    .iter()
                    .chain(self.model.meta.global.rules.iter())
                    .any(|r| {
                        (r.lhs.feature == f.name && &r.rhs.feature == assoc)
                            || (&r.lhs.feature == assoc && r.rhs.feature == f.name)
                    });
                if !connected {
                    self.warning(
                        "W0303",
                        &f.span,
                        format!(
                            "feature `{}` is associated with `{assoc}` but no rule connects them",
                            f.name
                        ),
                    );
                }
            }
        }
    }
}

/// Human-readable per-feature summary: value count, incident rules,
/// associations, in declaration order.
pub fn conformance_report(resolved: &ResolvedModel) -> String {
    let meta = &resolved.model.meta;
    let mut out = format!("feature conformance for {}\n", meta.name);
    for f in meta.features.iter().chain(meta.global.features.iter()) {
        let incident = resolved
            .rules()
            .filter(|r| r.lhs.feature == f.name || r.rhs.feature == f.name)
            .count();
        out.push_str(&format!(
            "{}: {} values, {} rules, assoc [{}]\n",
            f.name,
            f.values.len(),
            incident,
            f.associations.join(", ")
        ));
    }
    out
}
