//! Immutable value model of a parsed TDM source.
//!
//! Nothing here performs validation beyond construction; name resolution and
//! the conformance checks live in [`crate::check`].

use crate::span::SourceSpan;
use std::collections::BTreeMap;
use std::fmt;

/// A feature axis: a name with its finite, ordered value domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureDecl {
    pub name: String,
    pub values: Vec<String>,
    pub associations: Vec<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationSemantics {
    Requires,
    Excludes,
}

impl fmt::Display for RelationSemantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationSemantics::Requires => write!(f, "requires"),
            RelationSemantics::Excludes => write!(f, "excludes"),
        }
    }
}

/// Relation name declared in the types block. `semantics` is `None` for a
/// bare `relation NAME` until the checker resolves it against the builtins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationDecl {
    pub name: String,
    pub semantics: Option<RelationSemantics>,
    pub span: SourceSpan,
}

/// `feature.value` reference, the atomic unit of rules, specs, and predicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub feature: String,
    pub value: String,
    pub span: SourceSpan,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.feature, self.value)
    }
}

/// `lhs RELATION rhs` constraint every configuration must satisfy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlRule {
    pub lhs: Literal,
    pub relation: String,
    pub rhs: Literal,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GlobalBlock {
    pub features: Vec<FeatureDecl>,
    pub rules: Vec<ControlRule>,
}

/// Named partial configuration: literals that must hold and literals that
/// must not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigurationSpec {
    pub name: String,
    pub required: Vec<Literal>,
    pub discarded: Vec<Literal>,
    pub span: SourceSpan,
}

/// The feature side of a model: types, global, control, and configuration
/// modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaFeaturesModel {
    pub name: String,
    pub features: Vec<FeatureDecl>,
    pub relations: Vec<RelationDecl>,
    pub global: GlobalBlock,
    pub control: Vec<ControlRule>,
    pub configurations: Vec<ConfigurationSpec>,
    pub span: SourceSpan,
}

/// Boolean formula over feature-value literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    Lit(Literal),
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
    Not(Box<Predicate>),
}

impl Predicate {
    /// Literals in left-to-right source order.
    pub fn literals(&self) -> Vec<&Literal> {
        let mut out = Vec::new();
        self.collect_literals(&mut out);
        out
    }

    fn collect_literals<'a>(&'a self, out: &mut Vec<&'a Literal>) {
        match self {
            Predicate::Lit(l) => out.push(l),
            Predicate::And(a, b) | Predicate::Or(a, b) => {
                a.collect_literals(out);
                b.collect_literals(out);
            }
            Predicate::Not(p) => p.collect_literals(out),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemberKind {
    Attribute,
    Method,
}

/// Interface member; `guard` makes it variant over features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberDecl {
    pub kind: MemberKind,
    pub name: String,
    /// Attribute type, or method return type when present. Opaque text.
    pub type_text: Option<String>,
    pub params: Vec<(String, String)>,
    pub guard: Option<Predicate>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfaceDecl {
    pub name: String,
    pub used_features: Vec<String>,
    pub inherent_features: Vec<FeatureDecl>,
    pub members: Vec<MemberDecl>,
    pub span: SourceSpan,
}

/// Candidate realization of an interface, selected when `when` holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplementationDecl {
    pub name: String,
    pub realizes: String,
    pub when: Predicate,
    /// (method name, opaque body text); bodies are never interpreted.
    pub bodies: Vec<(String, String)>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductModel {
    pub name: String,
    pub interfaces: Vec<InterfaceDecl>,
    pub implementations: Vec<ImplementationDecl>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub meta: MetaFeaturesModel,
    pub product: Option<ProductModel>,
}

/// Mapping feature name -> chosen value.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment(pub BTreeMap<String, String>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        Assignment(
            pairs
                .into_iter()
                .map(|(f, v)| (f.to_string(), v.to_string()))
                .collect(),
        )
    }

    pub fn get(&self, feature: &str) -> Option<&str> {
        self.0.get(feature).map(String::as_str)
    }

    pub fn set(&mut self, feature: &str, value: &str) {
        self.0.insert(feature.to_string(), value.to_string());
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Feature names mentioned by `features` but absent from this assignment.
    pub fn missing_from<'a>(&self, features: impl IntoIterator<Item = &'a str>) -> Vec<String> {
        features
            .into_iter()
            .filter(|f| !self.0.contains_key(*f))
            .map(str::to_string)
            .collect()
    }
}

/// Finds the unique feature with `name`, searching domain features, global
/// features, then each interface's inherent features in declaration order.
pub fn feature_lookup<'a>(model: &'a Model, name: &str) -> Option<&'a FeatureDecl> {
    model
        .meta
        .features
        .iter()
        .chain(model.meta.global.features.iter())
        .chain(
            model
                .product
                .iter()
                .flat_map(|p| p.interfaces.iter())
                .flat_map(|i| i.inherent_features.iter()),
        )
        .find(|f| f.name == name)
}

/// Features visible to an interface: used, then global, then inherent, in
/// declaration order without duplicates.
pub fn visible_features<'a>(model: &'a Model, iface: &'a InterfaceDecl) -> Vec<&'a FeatureDecl> {
    let mut out: Vec<&FeatureDecl> = Vec::new();
    let mut push = |f: &'a FeatureDecl| {
        if !out.iter().any(|g| g.name == f.name) {
            out.push(f);
        }
    };
    for used in &iface.used_features {
        if let Some(f) = feature_lookup(model, used) {
            push(f);
        }
    }
    for f in &model.meta.global.features {
        push(f);
    }
    for f in &iface.inherent_features {
        push(f);
    }
    out
}

// Deep copies with every span replaced by the dummy span, so structural
// equality can ignore source positions.

impl Model {
    pub fn without_spans(&self) -> Model {
        Model {
            meta: self.meta.without_spans(),
            product: self.product.as_ref().map(ProductModel::without_spans),
        }
    }
}

impl MetaFeaturesModel {
    fn without_spans(&self) -> Self {
        MetaFeaturesModel {
            name: self.name.clone(),
            features: self.features.iter().map(FeatureDecl::without_spans).collect(),
            relations: self.relations.iter().map(RelationDecl::without_spans).collect(),
            global: GlobalBlock {
                features: self.global.features.iter().map(FeatureDecl::without_spans).collect(),
                rules: self.global.rules.iter().map(ControlRule::without_spans).collect(),
            },
            control: self.control.iter().map(ControlRule::without_spans).collect(),
            configurations: self
                .configurations
                .iter()
                .map(ConfigurationSpec::without_spans)
                .collect(),
            span: SourceSpan::dummy(),
        }
    }
}

impl FeatureDecl {
    fn without_spans(&self) -> Self {
        FeatureDecl {
            span: SourceSpan::dummy(),
            ..self.clone()
        }
    }
}

impl RelationDecl {
    fn without_spans(&self) -> Self {
        RelationDecl {
            span: SourceSpan::dummy(),
            ..self.clone()
        }
    }
}

impl Literal {
    fn without_spans(&self) -> Self {
        Literal {
            span: SourceSpan::dummy(),
            ..self.clone()
        }
    }
}

impl ControlRule {
    fn without_spans(&self) -> Self {
        ControlRule {
            lhs: self.lhs.without_spans(),
            relation: self.relation.clone(),
            rhs: self.rhs.without_spans(),
            span: SourceSpan::dummy(),
        }
    }
}

impl ConfigurationSpec {
    fn without_spans(&self) -> Self {
        ConfigurationSpec {
            name: self.name.clone(),
            required: self.required.iter().map(Literal::without_spans).collect(),
            discarded: self.discarded.iter().map(Literal::without_spans).collect(),
            span: SourceSpan::dummy(),
        }
    }
}

impl Predicate {
    fn without_spans(&self) -> Self {
        match self {
            Predicate::Lit(l) => Predicate::Lit(l.without_spans()),
            Predicate::And(a, b) => {
                Predicate::And(Box::new(a.without_spans()), Box::new(b.without_spans()))
            }
            Predicate::Or(a, b) => {
                Predicate::Or(Box::new(a.without_spans()), Box::new(b.without_spans()))
            }
            Predicate::Not(p) => Predicate::Not(Box::new(p.without_spans())),
        }
    }
}

impl MemberDecl {
    fn without_spans(&self) -> Self {
        MemberDecl {
            guard: self.guard.as_ref().map(Predicate::without_spans),
            span: SourceSpan::dummy(),
            ..self.clone()
        }
    }
}

impl InterfaceDecl {
    fn without_spans(&self) -> Self {
        InterfaceDecl {
            name: self.name.clone(),
            used_features: self.used_features.clone(),
            inherent_features: self
                .inherent_features
                .iter()
                .map(FeatureDecl::without_spans)
                .collect(),
            members: self.members.iter().map(MemberDecl::without_spans).collect(),
            span: SourceSpan::dummy(),
        }
    }
}

impl ImplementationDecl {
    fn without_spans(&self) -> Self {
        ImplementationDecl {
            name: self.name.clone(),
            realizes: self.realizes.clone(),
            when: self.when.without_spans(),
            bodies: self.bodies.clone(),
            span: SourceSpan::dummy(),
        }
    }
}

impl ProductModel {
    fn without_spans(&self) -> Self {
        ProductModel {
            name: self.name.clone(),
            interfaces: self.interfaces.iter().map(InterfaceDecl::without_spans).collect(),
            implementations: self
                .implementations
                .iter()
                .map(ImplementationDecl::without_spans)
                .collect(),
            span: SourceSpan::dummy(),
        }
    }
}
