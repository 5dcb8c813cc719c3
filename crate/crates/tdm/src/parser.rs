//! Recursive-descent parser producing an unresolved [`Model`].
//!
//! Grammar (authoritative for this artifact):
//!
//! ```text
//! model        := metaModel productModel?
//! metaModel    := "features" IDENT "{" typesBlock globalBlock? controlBlock? configBlock* "}"
//! typesBlock   := "types" "{" (featureDecl | relationDecl)* "}"
//! featureDecl  := "feature" IDENT "=" "{" IDENT ("," IDENT)* "}" ("assoc" "(" IDENT ("," IDENT)* ")")?
//! relationDecl := "relation" IDENT ("=" ("requires" | "excludes"))?
//! globalBlock  := "global" "{" (featureDecl | rule)* "}"
//! controlBlock := "control" "{" rule* "}"
//! rule         := literal IDENT literal
//! literal      := IDENT "." IDENT
//! configBlock  := "configuration" IDENT "{" ("require" literal ("," literal)*)?
//!                                           ("discard" literal ("," literal)*)? "}"
//! productModel := "product" IDENT "{" (ifaceDecl | implDecl)* "}"
//! ifaceDecl    := "interface" IDENT ("features" "(" IDENT ("," IDENT)* ")")?
//!                 ("inherent" "{" featureDecl* "}")? "{" member* "}"
//! member       := ("attr" IDENT ":" IDENT
//!                 | "method" IDENT "(" (IDENT ":" IDENT ("," IDENT ":" IDENT)*)? ")" (":" IDENT)?)
//!                 ("when" pred)?
//! pred         := "not" pred | pred "and" pred | pred "or" pred | "(" pred ")" | literal
//! implDecl     := "implementation" IDENT "realizes" IDENT "when" pred "{" body* "}"
//! body         := "method" IDENT "{" OPAQUE "}"
//! ```
//!
//! Precedence in predicates: `not` > `and` > `or`, left-associative.
//!
//! Syntax error codes, one per production family:
//! E0101 model structure, E0102 feature/relation declaration, E0103 empty
//! value set, E0104 rule/literal, E0105 configuration block, E0106
//! interface/member, E0107 implementation, E0108 predicate.
//!
//! The parser recovers at block boundaries so a single run can report
//! several errors.

use crate::diag::{sort_diagnostics, Diagnostic};
use crate::lexer::{tokenize, Keyword, Token, TokenKind};
use crate::model::*;
use crate::span::SourceSpan;

pub fn parse_model(source: &str, file: &str) -> Result<Model, Vec<Diagnostic>> {
    let tokens = match tokenize(source, file) {
        Ok(t) => t,
        Err(mut diags) => {
            sort_diagnostics(&mut diags);
            return Err(diags);
        }
    };
    let mut p = Parser {
        tokens,
        pos: 0,
        diags: Vec::new(),
    };
    let model = p.model();
    if p.diags.is_empty() {
        if let Some(m) = model {
            return Ok(m);
        }
        // defensive: a failed parse always carries at least one diagnostic
        p.diags.push(Diagnostic::error(
            "E0101",
            p.current_span(),
            "malformed model".to_string(),
        ));
    }
    sort_diagnostics(&mut p.diags);
    Err(p.diags)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

/// Parse failure already reported as a diagnostic; callers recover.
struct Failed;
type PResult<T> = Result<T, Failed>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn current_span(&self) -> SourceSpan {
        self.peek().span.clone()
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        self.peek().kind == TokenKind::Keyword(kw)
    }

    fn at_punct(&self, c: char) -> bool {
        self.peek().kind == TokenKind::Punct(c)
    }

    fn at_eoi(&self) -> bool {
        self.peek().kind == TokenKind::Eoi
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn describe(tok: &Token) -> String {
        match &tok.kind {
            TokenKind::Keyword(k) => format!("`{}`", k.as_str()),
            TokenKind::Ident => format!("identifier `{}`", tok.text),
            TokenKind::Punct(c) => format!("`{c}`"),
            TokenKind::Opaque => "body text".to_string(),
            TokenKind::Eoi => "end of input".to_string(),
        }
    }

    fn err(&mut self, code: &'static str, msg: String) -> Failed {
        let span = self.current_span();
        self.diags.push(Diagnostic::error(code, span, msg));
        Failed
    }

    fn expect_kw(&mut self, kw: Keyword, code: &'static str) -> PResult<Token> {
        if self.at_kw(kw) {
            Ok(self.bump())
        } else {
            let found = Self::describe(self.peek());
            Err(self.err(code, format!("expected `{}`, found {found}", kw.as_str())))
        }
    }

    fn expect_punct(&mut self, c: char, code: &'static str) -> PResult<Token> {
        if self.at_punct(c) {
            Ok(self.bump())
        } else {
            let found = Self::describe(self.peek());
            Err(self.err(code, format!("expected `{c}`, found {found}")))
        }
    }

    fn expect_ident(&mut self, what: &str, code: &'static str) -> PResult<Token> {
        if self.peek().kind == TokenKind::Ident {
            Ok(self.bump())
        } else {
            let found = Self::describe(self.peek());
            Err(self.err(code, format!("expected {what}, found {found}")))
        }
    }

    /// Skips past the end of the block whose `{` has already been consumed,
    /// or to end of input.
    fn recover_to_block_end(&mut self) {
        let mut depth = 1u32;
        while !self.at_eoi() {
            match self.peek().kind {
                TokenKind::Punct('{') => depth += 1,
                TokenKind::Punct('}') => {
                    depth -= 1;
                    if depth == 0 {
                        self.bump();
                        return;
                    }
                }
                _ => {}
            }
            self.bump();
        }
    }

    /// Skips to the next token for which `sync` holds, without consuming it.
    /// Nested blocks are skipped whole.
    fn recover_to(&mut self, sync: impl Fn(&Token) -> bool) {
        while !self.at_eoi() {
            if sync(self.peek()) {
                return;
            }
            if self.at_punct('{') {
                self.bump();
                self.recover_to_block_end();
            } else {
                self.bump();
            }
        }
    }

    // model := metaModel productModel?
    fn model(&mut self) -> Option<Model> {
        let meta = self.meta_model();
        let product = if self.at_kw(Keyword::Product) {
            self.product_model()
        } else {
            None
        };
        if !self.at_eoi() {
            let found = Self::describe(self.peek());
            let _ = self.err(
                "E0101",
                format!("expected `product` or end of input, found {found}"),
            );
        }
        Some(Model {
            meta: meta?,
            product,
        })
    }

    fn meta_model(&mut self) -> Option<MetaFeaturesModel> {
        let start = if self.at_kw(Keyword::Features) {
            self.bump()
        } else {
            let found = Self::describe(self.peek());
            let _ = self.err("E0101", format!("expected `features`, found {found}"));
            self.recover_to(|t| t.kind == TokenKind::Keyword(Keyword::Product));
            return None;
        };
        let mut meta = MetaFeaturesModel {
            name: String::new(),
            features: Vec::new(),
            relations: Vec::new(),
            global: GlobalBlock::default(),
            control: Vec::new(),
            configurations: Vec::new(),
            span: start.span.clone(),
        };
        match self.expect_ident("model name", "E0101") {
            Ok(t) => meta.name = t.text,
            Err(_) => {
                self.recover_to(|t| t.kind == TokenKind::Keyword(Keyword::Product));
                return Some(meta);
            }
        }
        if self.expect_punct('{', "E0101").is_err() {
            self.recover_to(|t| t.kind == TokenKind::Keyword(Keyword::Product));
            return Some(meta);
        }
        loop {
            if self.at_punct('}') {
                let end = self.bump();
                meta.span = meta.span.merge(&end.span);
                break;
            }
            if self.at_eoi() {
                let _ = self.err("E0101", "unclosed `features` block".to_string());
                break;
            }
            if self.at_kw(Keyword::Types) {
                self.types_block(&mut meta);
            } else if self.at_kw(Keyword::Global) {
                self.global_block(&mut meta);
            } else if self.at_kw(Keyword::Control) {
                self.control_block(&mut meta);
            } else if self.at_kw(Keyword::Configuration) {
                if let Some(spec) = self.config_block() {
                    meta.configurations.push(spec);
                }
            } else {
                let found = Self::describe(self.peek());
                let _ = self.err(
                    "E0101",
                    format!(
                        "expected `types`, `global`, `control`, or `configuration`, found {found}"
                    ),
                );
                self.recover_to(|t| {
                    matches!(
                        t.kind,
                        TokenKind::Keyword(
                            Keyword::Types
                                | Keyword::Global
                                | Keyword::Control
                                | Keyword::Configuration
                        ) | TokenKind::Punct('}')
                    )
                });
            }
        }
        Some(meta)
    }

    fn types_block(&mut self, meta: &mut MetaFeaturesModel) {
        self.bump(); // `types`
        if self.expect_punct('{', "E0101").is_err() {
            return;
        }
        loop {
            if self.at_punct('}') {
                self.bump();
                return;
            }
            if self.at_eoi() {
                let _ = self.err("E0101", "unclosed `types` block".to_string());
                return;
            }
            if self.at_kw(Keyword::Feature) {
                match self.feature_decl() {
                    Ok(f) => meta.features.push(f),
                    Err(_) => self.sync_types_item(),
                }
            } else if self.at_kw(Keyword::Relation) {
                match self.relation_decl() {
                    Ok(r) => meta.relations.push(r),
                    Err(_) => self.sync_types_item(),
                }
            } else {
                let found = Self::describe(self.peek());
                let _ = self.err(
                    "E0102",
                    format!("expected `feature` or `relation`, found {found}"),
                );
                self.sync_types_item();
            }
        }
    }

    fn sync_types_item(&mut self) {
        self.recover_to(|t| {
            matches!(
                t.kind,
                TokenKind::Keyword(Keyword::Feature | Keyword::Relation) | TokenKind::Punct('}')
            )
        });
    }

    // featureDecl := "feature" IDENT "=" "{" IDENT ("," IDENT)* "}" ("assoc" "(" IDENT ("," IDENT)* ")")?
    fn feature_decl(&mut self) -> PResult<FeatureDecl> {
        let start = self.expect_kw(Keyword::Feature, "E0102")?;
        let name = self.expect_ident("feature name", "E0102")?;
        self.expect_punct('=', "E0102")?;
        let open = self.expect_punct('{', "E0102")?;
        if self.at_punct('}') {
            let span = open.span.merge(&self.current_span());
            self.diags
                .push(Diagnostic::error("E0103", span, "empty value set".to_string()));
            self.bump();
            return Err(Failed);
        }
        let mut values = vec![self.expect_ident("feature value", "E0102")?.text];
        while self.at_punct(',') {
            self.bump();
            values.push(self.expect_ident("feature value", "E0102")?.text);
        }
        let close = self.expect_punct('}', "E0102")?;
        let mut span = start.span.merge(&close.span);
        let mut associations = Vec::new();
        if self.eat_kw(Keyword::Assoc) {
            self.expect_punct('(', "E0102")?;
            associations.push(self.expect_ident("associated feature", "E0102")?.text);
            while self.at_punct(',') {
                self.bump();
                associations.push(self.expect_ident("associated feature", "E0102")?.text);
            }
            let close = self.expect_punct(')', "E0102")?;
            span = span.merge(&close.span);
        }
        Ok(FeatureDecl {
            name: name.text,
            values,
            associations,
            span,
        })
    }

    // relationDecl := "relation" IDENT ("=" ("requires" | "excludes"))?
    fn relation_decl(&mut self) -> PResult<RelationDecl> {
        let start = self.expect_kw(Keyword::Relation, "E0102")?;
        let name = self.relation_name("E0102")?;
        let mut span = start.span.merge(&name.span);
        let mut semantics = None;
        if self.at_punct('=') {
            self.bump();
            let tok = self.bump();
            span = span.merge(&tok.span);
            semantics = match tok.kind {
                TokenKind::Keyword(Keyword::Requires) => Some(RelationSemantics::Requires),
                TokenKind::Keyword(Keyword::Excludes) => Some(RelationSemantics::Excludes),
                _ => {
                    let found = Self::describe(&tok);
                    self.diags.push(Diagnostic::error(
                        "E0102",
                        tok.span.clone(),
                        format!("expected `requires` or `excludes`, found {found}"),
                    ));
                    return Err(Failed);
                }
            };
        }
        Ok(RelationDecl {
            name: name.text,
            semantics,
            span,
        })
    }

    /// Relation names may be plain identifiers or the builtin keywords.
    fn relation_name(&mut self, code: &'static str) -> PResult<Token> {
        match self.peek().kind {
            TokenKind::Ident
            | TokenKind::Keyword(Keyword::Requires)
            | TokenKind::Keyword(Keyword::Excludes) => Ok(self.bump()),
            _ => {
                let found = Self::describe(self.peek());
                Err(self.err(code, format!("expected relation name, found {found}")))
            }
        }
    }

    fn global_block(&mut self, meta: &mut MetaFeaturesModel) {
        self.bump(); // `global`
        if self.expect_punct('{', "E0101").is_err() {
            return;
        }
        loop {
            if self.at_punct('}') {
                self.bump();
                return;
            }
            if self.at_eoi() {
                let _ = self.err("E0101", "unclosed `global` block".to_string());
                return;
            }
            if self.at_kw(Keyword::Feature) {
                match self.feature_decl() {
                    Ok(f) => meta.global.features.push(f),
                    Err(_) => self.sync_rule_item(),
                }
            } else {
                match self.rule() {
                    Ok(r) => meta.global.rules.push(r),
                    Err(_) => self.sync_rule_item(),
                }
            }
        }
    }

    fn control_block(&mut self, meta: &mut MetaFeaturesModel) {
        self.bump(); // `control`
        if self.expect_punct('{', "E0101").is_err() {
            return;
        }
        loop {
            if self.at_punct('}') {
                self.bump();
                return;
            }
            if self.at_eoi() {
                let _ = self.err("E0101", "unclosed `control` block".to_string());
                return;
            }
            match self.rule() {
                Ok(r) => meta.control.push(r),
                Err(_) => self.sync_rule_item(),
            }
        }
    }

    fn sync_rule_item(&mut self) {
        self.recover_to(|t| {
            matches!(
                t.kind,
                TokenKind::Ident
                    | TokenKind::Keyword(Keyword::Feature)
                    | TokenKind::Punct('}')
            )
        });
    }

    // rule := literal IDENT literal
    fn rule(&mut self) -> PResult<ControlRule> {
        let lhs = self.literal()?;
        let rel = self.relation_name("E0104")?;
        let rhs = self.literal()?;
        let span = lhs.span.merge(&rhs.span);
        Ok(ControlRule {
            lhs,
            relation: rel.text,
            rhs,
            span,
        })
    }

    // literal := IDENT "." IDENT
    fn literal(&mut self) -> PResult<Literal> {
        let feature = self.expect_ident("feature name", "E0104")?;
        self.expect_punct('.', "E0104")?;
        let value = self.expect_ident("feature value", "E0104")?;
        let span = feature.span.merge(&value.span);
        Ok(Literal {
            feature: feature.text,
            value: value.text,
            span,
        })
    }

    fn config_block(&mut self) -> Option<ConfigurationSpec> {
        let start = self.bump(); // `configuration`
        let mut spec = ConfigurationSpec {
            name: String::new(),
            required: Vec::new(),
            discarded: Vec::new(),
            span: start.span,
        };
        let parsed: PResult<()> = (|| {
            let name = self.expect_ident("configuration name", "E0105")?;
            spec.name = name.text;
            self.expect_punct('{', "E0105")?;
            if self.eat_kw(Keyword::Require) {
                spec.required.push(self.literal()?);
                while self.at_punct(',') {
                    self.bump();
                    spec.required.push(self.literal()?);
                }
            }
            if self.eat_kw(Keyword::Discard) {
                spec.discarded.push(self.literal()?);
                while self.at_punct(',') {
                    self.bump();
                    spec.discarded.push(self.literal()?);
                }
            }
            let close = self.expect_punct('}', "E0105")?;
            spec.span = spec.span.merge(&close.span);
            Ok(())
        })();
        match parsed {
            Ok(()) => Some(spec),
            Err(_) => {
                self.recover_to(|t| {
                    matches!(
                        t.kind,
                        TokenKind::Keyword(Keyword::Configuration | Keyword::Product)
                            | TokenKind::Punct('}')
                    )
                });
                None
            }
        }
    }

    fn product_model(&mut self) -> Option<ProductModel> {
        let start = self.bump(); // `product`
        let mut product = ProductModel {
            name: String::new(),
            interfaces: Vec::new(),
            implementations: Vec::new(),
            span: start.span,
        };
        match self.expect_ident("product name", "E0101") {
            Ok(t) => product.name = t.text,
            Err(_) => return Some(product),
        }
        if self.expect_punct('{', "E0101").is_err() {
            return Some(product);
        }
        loop {
            if self.at_punct('}') {
                let end = self.bump();
                product.span = product.span.merge(&end.span);
                return Some(product);
            }
            if self.at_eoi() {
                let _ = self.err("E0101", "unclosed `product` block".to_string());
                return Some(product);
            }
            if self.at_kw(Keyword::Interface) {
                match self.iface_decl() {
                    Ok(i) => product.interfaces.push(i),
                    Err(_) => self.sync_product_item(),
                }
            } else if self.at_kw(Keyword::Implementation) {
                match self.impl_decl() {
                    Ok(i) => product.implementations.push(i),
                    Err(_) => self.sync_product_item(),
                }
            } else {
                let found = Self::describe(self.peek());
                let _ = self.err(
                    "E0101",
                    format!("expected `interface` or `implementation`, found {found}"),
                );
                self.sync_product_item();
            }
        }
    }

    fn sync_product_item(&mut self) {
        self.recover_to(|t| {
            matches!(
                t.kind,
                TokenKind::Keyword(Keyword::Interface | Keyword::Implementation)
                    | TokenKind::Punct('}')
            )
        });
    }

    fn iface_decl(&mut self) -> PResult<InterfaceDecl> {
        let start = self.bump(); // `interface`
        let name = self.expect_ident("interface name", "E0106")?;
        let mut iface = InterfaceDecl {
            name: name.text,
            used_features: Vec::new(),
            inherent_features: Vec::new(),
            members: Vec::new(),
            span: start.span,
        };
        if self.eat_kw(Keyword::Features) {
            self.expect_punct('(', "E0106")?;
            iface
                .used_features
                .push(self.expect_ident("feature name", "E0106")?.text);
            while self.at_punct(',') {
                self.bump();
                iface
                    .used_features
                    .push(self.expect_ident("feature name", "E0106")?.text);
            }
            self.expect_punct(')', "E0106")?;
        }
        if self.eat_kw(Keyword::Inherent) {
            self.expect_punct('{', "E0106")?;
            while self.at_kw(Keyword::Feature) {
                iface.inherent_features.push(self.feature_decl()?);
            }
            self.expect_punct('}', "E0106")?;
        }
        self.expect_punct('{', "E0106")?;
        loop {
            if self.at_punct('}') {
                let end = self.bump();
                iface.span = iface.span.merge(&end.span);
                return Ok(iface);
            }
            if self.at_eoi() {
                return Err(self.err("E0106", "unclosed `interface` block".to_string()));
            }
            iface.members.push(self.member()?);
        }
    }

    fn member(&mut self) -> PResult<MemberDecl> {
        let start_span = self.current_span();
        let mut member = if self.eat_kw(Keyword::Attr) {
            let name = self.expect_ident("attribute name", "E0106")?;
            self.expect_punct(':', "E0106")?;
            let ty = self.expect_ident("attribute type", "E0106")?;
            MemberDecl {
                kind: MemberKind::Attribute,
                name: name.text,
                type_text: Some(ty.text),
                params: Vec::new(),
                guard: None,
                span: start_span.merge(&ty.span),
            }
        } else if self.eat_kw(Keyword::Method) {
            let name = self.expect_ident("method name", "E0106")?;
            self.expect_punct('(', "E0106")?;
            let mut params = Vec::new();
            if !self.at_punct(')') {
                loop {
                    let pname = self.expect_ident("parameter name", "E0106")?;
                    self.expect_punct(':', "E0106")?;
                    let pty = self.expect_ident("parameter type", "E0106")?;
                    params.push((pname.text, pty.text));
                    if self.at_punct(',') {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            let close = self.expect_punct(')', "E0106")?;
            let mut span = start_span.merge(&close.span);
            let mut type_text = None;
            if self.at_punct(':') {
                self.bump();
                let ty = self.expect_ident("return type", "E0106")?;
                span = span.merge(&ty.span);
                type_text = Some(ty.text);
            }
            MemberDecl {
                kind: MemberKind::Method,
                name: name.text,
                type_text,
                params,
                guard: None,
                span,
            }
        } else {
            let found = Self::describe(self.peek());
            return Err(self.err(
                "E0106",
                format!("expected `attr` or `method`, found {found}"),
            ));
        };
        if self.eat_kw(Keyword::When) {
            let guard = self.predicate()?;
            member.span = member.span.merge(&self.tokens[self.pos - 1].span);
            member.guard = Some(guard);
        }
        Ok(member)
    }

    // pred := or-level; `not` binds tighter than `and`, `and` tighter than `or`
    fn predicate(&mut self) -> PResult<Predicate> {
        let mut left = self.pred_and()?;
        while self.eat_kw(Keyword::Or) {
            let right = self.pred_and()?;
            left = Predicate::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn pred_and(&mut self) -> PResult<Predicate> {
        let mut left = self.pred_not()?;
        while self.eat_kw(Keyword::And) {
            let right = self.pred_not()?;
            left = Predicate::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn pred_not(&mut self) -> PResult<Predicate> {
        if self.eat_kw(Keyword::Not) {
            let inner = self.pred_not()?;
            return Ok(Predicate::Not(Box::new(inner)));
        }
        self.pred_primary()
    }

    fn pred_primary(&mut self) -> PResult<Predicate> {
        if self.at_punct('(') {
            self.bump();
            let inner = self.predicate()?;
            self.expect_punct(')', "E0108")?;
            return Ok(inner);
        }
        if self.peek().kind == TokenKind::Ident {
            return Ok(Predicate::Lit(self.literal()?));
        }
        let found = Self::describe(self.peek());
        Err(self.err(
            "E0108",
            format!("expected `not`, `(`, or a feature literal, found {found}"),
        ))
    }

    fn impl_decl(&mut self) -> PResult<ImplementationDecl> {
        let start = self.bump(); // `implementation`
        let name = self.expect_ident("implementation name", "E0107")?;
        self.expect_kw(Keyword::Realizes, "E0107")?;
        let realizes = self.expect_ident("interface name", "E0107")?;
        self.expect_kw(Keyword::When, "E0107")?;
        let when = self.predicate()?;
        self.expect_punct('{', "E0107")?;
        let mut bodies = Vec::new();
        loop {
            if self.at_punct('}') {
                let end = self.bump();
                return Ok(ImplementationDecl {
                    name: name.text,
                    realizes: realizes.text,
                    when,
                    bodies,
                    span: start.span.merge(&end.span),
                });
            }
            if self.at_eoi() {
                return Err(self.err("E0107", "unclosed `implementation` block".to_string()));
            }
            self.expect_kw(Keyword::Method, "E0107")?;
            let mname = self.expect_ident("method name", "E0107")?;
            self.expect_punct('{', "E0107")?;
            let text = if self.peek().kind == TokenKind::Opaque {
                self.bump().text
            } else {
                String::new()
            };
            self.expect_punct('}', "E0107")?;
            bodies.push((mname.text, text.trim().to_string()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SET_TDM: &str = include_str!("../../../corpus/set.tdm");

    #[test]
    fn set_corpus_shape() {
        let m = parse_model(SET_TDM, "set.tdm").expect("corpus parses");
        assert_eq!(m.meta.name, "SetFeatures");
        assert_eq!(m.meta.features.len(), 2);
        assert_eq!(m.meta.configurations.len(), 1);
        let p = m.product.expect("has product model");
        assert_eq!(p.interfaces.len(), 1);
        assert_eq!(p.implementations.len(), 4);
        assert_eq!(p.interfaces[0].members.len(), 3);
    }

    #[test]
    fn minimal_model_has_empty_feature_list() {
        let m = parse_model("features F { types { } }", "t.tdm").unwrap();
        assert!(m.meta.features.is_empty());
        assert!(m.product.is_none());
    }

    #[test]
    fn empty_value_set_is_e0103() {
        let errs = parse_model("features F { types { feature A = { } } }", "t.tdm").unwrap_err();
        assert!(errs.iter().any(|d| d.code == "E0103"), "{errs:?}");
    }

    #[test]
    fn recovery_reports_multiple_errors() {
        let src = "features F { types { feature A = { } feature = { x } feature B = { y } } }";
        let errs = parse_model(src, "t.tdm").unwrap_err();
        assert!(errs.len() >= 2, "{errs:?}");
    }

    #[test]
    fn predicate_precedence_not_and_or() {
        let src = "features F { types { feature A = { x } feature B = { y } feature C = { z } } } \
                   product P { interface I features (A, B, C) { \
                   attr a : t when not A.x and B.y or C.z } }";
        let m = parse_model(src, "t.tdm").unwrap();
        let guard = m.product.unwrap().interfaces[0].members[0]
            .guard
            .clone()
            .unwrap();
        // ((not A.x) and B.y) or C.z
        match guard {
            Predicate::Or(l, r) => {
                assert!(matches!(*l, Predicate::And(ref a, _) if matches!(**a, Predicate::Not(_))));
                assert!(matches!(*r, Predicate::Lit(_)));
            }
            other => panic!("unexpected shape: {other:?}"),
        }
    }

    #[test]
    fn parens_override_precedence() {
        let src = "features F { types { feature A = { x } feature B = { y } feature C = { z } } } \
                   product P { interface I features (A, B, C) { \
                   attr a : t when A.x and (B.y or C.z) } }";
        let m = parse_model(src, "t.tdm").unwrap();
        let guard = m.product.unwrap().interfaces[0].members[0]
            .guard
            .clone()
            .unwrap();
        assert!(matches!(guard, Predicate::And(_, ref r) if matches!(**r, Predicate::Or(_, _))));
    }

    #[test]
    fn relation_alias_parses() {
        let src = "features F { types { relation needs = requires relation excludes } }";
        let m = parse_model(src, "t.tdm").unwrap();
        assert_eq!(m.meta.relations[0].name, "needs");
        assert_eq!(m.meta.relations[0].semantics, Some(RelationSemantics::Requires));
        assert_eq!(m.meta.relations[1].name, "excludes");
        assert_eq!(m.meta.relations[1].semantics, None);
    }

    #[test]
    fn implementation_bodies_are_opaque() {
        let src = "features F { types { feature A = { x } } } \
                   product P { interface I features (A) { method m() } \
                   implementation X realizes I when A.x { method m { return { 1 }; } } }";
        let m = parse_model(src, "t.tdm").unwrap();
        let bodies = &m.product.unwrap().implementations[0].bodies;
        assert_eq!(bodies.len(), 1);
        assert_eq!(bodies[0], ("m".to_string(), "return { 1 };".to_string()));
    }

    #[test]
    fn inherent_block_parses() {
        let src = "features F { types { feature A = { x } } } \
                   product P { interface I features (A) inherent { feature K = { a, b } } { \
                   attr c : t when K.a } }";
        let m = parse_model(src, "t.tdm").unwrap();
        let iface = &m.product.unwrap().interfaces[0];
        assert_eq!(iface.inherent_features.len(), 1);
        assert_eq!(iface.inherent_features[0].values, vec!["a", "b"]);
    }

    #[test]
    fn error_spans_lie_within_source() {
        let src = "features F { types { feature A = { } } }";
        let errs = parse_model(src, "t.tdm").unwrap_err();
        let lines: Vec<&str> = src.lines().collect();
        for d in &errs {
            let line = d.span.line_start as usize;
            assert!(line >= 1 && line <= lines.len());
            assert!((d.span.col_start as usize) <= lines[line - 1].len() + 1);
        }
    }
}
