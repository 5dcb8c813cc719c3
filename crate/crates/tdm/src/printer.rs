//! Canonical formatter: 2-space indent, one declaration per line, blocks in
//! fixed order (types, global, control, configurations, product), LF line
//! endings. Output is deterministic and idempotent.

use crate::model::*;

pub fn pretty_print(model: &Model) -> String {
    let mut out = String::new();
    print_meta(&model.meta, &mut out);
    if let Some(product) = &model.product {
        out.push('\n');
        print_product(product, &mut out);
    }
    out
}

fn print_meta(meta: &MetaFeaturesModel, out: &mut String) {
    out.push_str(&format!("features {} {{\n", meta.name));
    if meta.features.is_empty() && meta.relations.is_empty() {
        out.push_str("  types { }\n");
    } else {
        out.push_str("  types {\n");
        for f in &meta.features {
            out.push_str(&format!("    {}\n", feature_decl(f)));
        }
        for r in &meta.relations {
            out.push_str(&format!("    {}\n", relation_decl(r)));
        }
        out.push_str("  }\n");
    }
    if !meta.global.features.is_empty() || !meta.global.rules.is_empty() {
        out.push_str("  global {\n");
        for f in &meta.global.features {
            out.push_str(&format!("    {}\n", feature_decl(f)));
        }
        for r in &meta.global.rules {
            out.push_str(&format!("    {}\n", rule(r)));
        }
        out.push_str("  }\n");
    }
    if !meta.control.is_empty() {
        out.push_str("  control {\n");
        for r in &meta.control {
            out.push_str(&format!("    {}\n", rule(r)));
        }
        out.push_str("  }\n");
    }
    for spec in &meta.configurations {
        print_config(spec, out);
    }
    out.push_str("}\n");
}

fn feature_decl(f: &FeatureDecl) -> String {
    let mut s = format!("feature {} = {{ {} }}", f.name, f.values.join(", "));
    if !f.associations.is_empty() {
        s.push_str(&format!(" assoc ({})", f.associations.join(", ")));
    }
    s
}

fn relation_decl(r: &RelationDecl) -> String {
    match r.semantics {
        Some(sem) => format!("relation {} = {}", r.name, sem),
        None => format!("relation {}", r.name),
    }
}

fn rule(r: &ControlRule) -> String {
    format!("{} {} {}", r.lhs, r.relation, r.rhs)
}

fn print_config(spec: &ConfigurationSpec, out: &mut String) {
    if spec.required.is_empty() && spec.discarded.is_empty() {
        out.push_str(&format!("  configuration {} {{ }}\n", spec.name));
        return;
    }
    out.push_str(&format!("  configuration {} {{\n", spec.name));
    if !spec.required.is_empty() {
        let lits: Vec<String> = spec.required.iter().map(|l| l.to_string()).collect();
        out.push_str(&format!("    require {}\n", lits.join(", ")));
    }
    if !spec.discarded.is_empty() {
        let lits: Vec<String> = spec.discarded.iter().map(|l| l.to_string()).collect();
        out.push_str(&format!("    discard {}\n", lits.join(", ")));
    }
    out.push_str("  }\n");
}

fn print_product(product: &ProductModel, out: &mut String) {
    out.push_str(&format!("product {} {{\n", product.name));
    for iface in &product.interfaces {
        print_interface(iface, out);
    }
    for imp in &product.implementations {
        print_implementation(imp, out);
    }
    out.push_str("}\n");
}

fn print_interface(iface: &InterfaceDecl, out: &mut String) {
    let mut header = format!("  interface {}", iface.name);
    if !iface.used_features.is_empty() {
        header.push_str(&format!(" features ({})", iface.used_features.join(", ")));
    }
    if !iface.inherent_features.is_empty() {
        out.push_str(&format!("{header} inherent {{\n"));
        for f in &iface.inherent_features {
            out.push_str(&format!("    {}\n", feature_decl(f)));
        }
        out.push_str("  }");
    } else {
        out.push_str(&header);
    }
    if iface.members.is_empty() {
        out.push_str(" { }\n");
        return;
    }
    out.push_str(" {\n");
    for m in &iface.members {
        out.push_str(&format!("    {}\n", member(m)));
    }
    out.push_str("  }\n");
}

fn member(m: &MemberDecl) -> String {
    let mut s = match m.kind {
        MemberKind::Attribute => format!(
            "attr {} : {}",
            m.name,
            m.type_text.as_deref().unwrap_or("")
        ),
        MemberKind::Method => {
            let params: Vec<String> =
                m.params.iter().map(|(n, t)| format!("{n} : {t}")).collect();
            let mut s = format!("method {}({})", m.name, params.join(", "));
            if let Some(ret) = &m.type_text {
                s.push_str(&format!(" : {ret}"));
            }
            s
        }
    };
    if let Some(guard) = &m.guard {
        s.push_str(&format!(" when {}", predicate(guard)));
    }
    s
}

fn print_implementation(imp: &ImplementationDecl, out: &mut String) {
    let header = format!(
        "  implementation {} realizes {} when {}",
        imp.name,
        imp.realizes,
        predicate(&imp.when)
    );
    if imp.bodies.is_empty() {
        out.push_str(&format!("{header} {{ }}\n"));
        return;
    }
    out.push_str(&format!("{header} {{\n"));
    for (name, text) in &imp.bodies {
        if text.is_empty() {
            out.push_str(&format!("    method {name} {{ }}\n"));
        } else if !text.contains('\n') {
            out.push_str(&format!("    method {name} {{ {text} }}\n"));
        } else {
            // multi-line bodies stay verbatim; reindenting opaque text would
            // break idempotence
            out.push_str(&format!("    method {name} {{\n{text}\n    }}\n"));
        }
    }
    out.push_str("  }\n");
}

/// Renders with minimal parentheses under `not` > `and` > `or`,
/// left-associative.
pub fn predicate(p: &Predicate) -> String {
    let mut s = String::new();
    fmt_pred(p, 1, &mut s);
    s
}

fn fmt_pred(p: &Predicate, min_prec: u8, out: &mut String) {
    match p {
        Predicate::Or(a, b) => {
            let parens = min_prec > 1;
            if parens {
                out.push('(');
            }
            fmt_pred(a, 1, out);
            out.push_str(" or ");
            fmt_pred(b, 2, out);
            if parens {
                out.push(')');
            }
        }
        Predicate::And(a, b) => {
            let parens = min_prec > 2;
            if parens {
                out.push('(');
            }
            fmt_pred(a, 2, out);
            out.push_str(" and ");
            fmt_pred(b, 3, out);
            if parens {
                out.push(')');
            }
        }
        Predicate::Not(inner) => {
            out.push_str("not ");
            fmt_pred(inner, 3, out);
        }
        Predicate::Lit(l) => out.push_str(&l.to_string()),
    }
}
