//! Product derivation: bind a configuration to implementations, project
//! active members, and emit a deterministic release manifest.
//!
//! Error codes: E0501 no implementation matches an interface, E0502
//! ambiguous selection, E0503 spec has no valid completion (or is unknown),
//! E0504 spec completes to more than one configuration.

use crate::check::ResolvedModel;
use crate::diag::Diagnostic;
use crate::engine::{complete_configuration, EngineError, EnumerateOptions};
use crate::model::{
    Assignment, InterfaceDecl, MemberDecl, MemberKind, Model, Predicate,
};
use std::collections::BTreeMap;
use std::fmt;

/// A named configuration bound to exactly one implementation per interface,
/// with the members active under it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Release {
    pub model: String,
    pub name: String,
    pub assignment: Assignment,
    pub bindings: BTreeMap<String, String>,
    pub active_members: BTreeMap<String, Vec<MemberDecl>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReleaseError {
    /// Precondition violation: model not certified by the checker.
    Uncertified,
    Engine(EngineError),
    /// E05xx findings, in canonical diagnostic order.
    Diagnostics(Vec<Diagnostic>),
}

impl fmt::Display for ReleaseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReleaseError::Uncertified => {
                write!(f, "model is not certified; run the checker first")
            }
            ReleaseError::Engine(e) => write!(f, "{e}"),
            ReleaseError::Diagnostics(ds) => {
                let lines: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
                write!(f, "{}", lines.join("\n"))
            }
        }
    }
}

impl From<EngineError> for ReleaseError {
    fn from(e: EngineError) -> Self {
        ReleaseError::Engine(e)
    }
}

/// Standard and/or/not semantics over literal tests `a(feature) = value`.
pub fn eval_predicate(p: &Predicate, a: &Assignment) -> Result<bool, EngineError> {
    match p {
        Predicate::Lit(lit) => match a.get(&lit.feature) {
            Some(v) => Ok(v == lit.value),
            None => Err(EngineError::IncompleteAssignment {
                missing: vec![lit.feature.clone()],
            }),
        },
        Predicate::And(l, r) => Ok(eval_predicate(l, a)? && eval_predicate(r, a)?),
        Predicate::Or(l, r) => Ok(eval_predicate(l, a)? || eval_predicate(r, a)?),
        Predicate::Not(inner) => Ok(!eval_predicate(inner, a)?),
    }
}

/// Extends `a` with defaults for the interface's inherent features that the
/// enumeration space left unpinned: each takes its first declared value.
fn extend_for_interface(iface: &InterfaceDecl, a: &Assignment) -> Assignment {
    let mut extended = a.clone();
    for f in &iface.inherent_features {
        if extended.get(&f.name).is_none() {
            if let Some(first) = f.values.first() {
                extended.set(&f.name, first);
            }
        }
    }
    extended
}

/// For each interface with at least one implementation, the unique one whose
/// `when` predicate holds under `a`.
pub fn select_implementations(
    resolved: &ResolvedModel,
    a: &Assignment,
) -> Result<BTreeMap<String, String>, ReleaseError> {
    if !resolved.certified {
        return Err(ReleaseError::Uncertified);
    }
    let mut bindings = BTreeMap::new();
    let mut diags = Vec::new();
    for iface in resolved.interfaces() {
        let candidates: Vec<&str> = {
            let mut hits = Vec::new();
            for imp in resolved
                .implementations()
                .iter()
                .filter(|i| i.realizes == iface.name)
            {
                if eval_predicate(&imp.when, a)? {
                    hits.push(imp.name.as_str());
                }
            }
            hits
        };
        let has_any = resolved
            .implementations()
            .iter()
            .any(|i| i.realizes == iface.name);
        if !has_any {
            // pure specification component, absent from bindings
            continue;
        }
        match candidates.as_slice() {
            [unique] => {
                bindings.insert(iface.name.clone(), unique.to_string());
            }
            [] => diags.push(Diagnostic::error(
                "E0501",
                iface.span.clone(),
                format!(
                    "no implementation of interface `{}` matches the configuration",
                    iface.name
                ),
            )),
            many => diags.push(Diagnostic::error(
                "E0502",
                iface.span.clone(),
                format!(
                    "ambiguous selection for interface `{}`: {}",
                    iface.name,
                    many.join(", ")
                ),
            )),
        }
    }
    if diags.is_empty() {
        Ok(bindings)
    } else {
        Err(ReleaseError::Diagnostics(diags))
    }
}

/// Members whose guard holds under `a` (unguarded members always), in source
/// order.
pub fn project_members(
    iface: &InterfaceDecl,
    a: &Assignment,
) -> Result<Vec<MemberDecl>, EngineError> {
    let mut out = Vec::new();
    for m in &iface.members {
        let active = match &m.guard {
            None => true,
            Some(guard) => eval_predicate(guard, a)?,
        };
        if active {
            out.push(m.clone());
        }
    }
    Ok(out)
}

pub fn generate_release(
    resolved: &ResolvedModel,
    spec_name: &str,
    opts: &EnumerateOptions,
) -> Result<Release, ReleaseError> {
    if !resolved.certified {
        return Err(ReleaseError::Uncertified);
    }
    let model: &Model = &resolved.model;
    let Some(spec) = resolved.configuration(spec_name) else {
        let available: Vec<&str> = model
            .meta
            .configurations
            .iter()
            .map(|c| c.name.as_str())
            .collect();
        let listing = if available.is_empty() {
            "none declared".to_string()
        } else {
            available.join(", ")
        };
        return Err(ReleaseError::Diagnostics(vec![Diagnostic::error(
            "E0503",
            model.meta.span.clone(),
            format!("unknown configuration `{spec_name}` (available: {listing})"),
        )]));
    };
    let completions = complete_configuration(resolved, spec, opts)?;
    let assignment = match completions.as_slice() {
        [unique] => unique.clone(),
        [] => {
            return Err(ReleaseError::Diagnostics(vec![Diagnostic::error(
                "E0503",
                spec.span.clone(),
                format!("configuration `{spec_name}` has no valid completion"),
            )]))
        }
        many => {
            return Err(ReleaseError::Diagnostics(vec![Diagnostic::error(
                "E0504",
                spec.span.clone(),
                format!(
                    "configuration `{spec_name}` completes to {} configurations; \
                     tighten its require/discard lists",
                    many.len()
                ),
            )]))
        }
    };
    let bindings = select_implementations(resolved, &assignment)?;
    let mut active_members = BTreeMap::new();
    for iface in resolved.interfaces() {
        let extended = extend_for_interface(iface, &assignment);
        active_members.insert(iface.name.clone(), project_members(iface, &extended)?);
    }
    Ok(Release {
        model: model.meta.name.clone(),
        name: spec_name.to_string(),
        assignment,
        bindings,
        active_members,
    })
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn member_signature(m: &MemberDecl) -> String {
    match m.kind {
        MemberKind::Attribute => m.type_text.clone().unwrap_or_default(),
        MemberKind::Method => {
            let params: Vec<String> =
                m.params.iter().map(|(n, t)| format!("{n}: {t}")).collect();
            let mut s = format!("({})", params.join(", "));
            if let Some(ret) = &m.type_text {
                s.push_str(&format!(": {ret}"));
            }
            s
        }
    }
}

/// Deterministic JSON manifest: fixed top-level key order (`model`,
/// `release`, `assignment`, `bindings`, `members`, `fingerprint`), object
/// keys sorted ascending, 2-space indent, LF endings. The fingerprint is the
/// 64-bit FNV-1a of the manifest body rendered without the fingerprint
/// entry.
pub fn emit_manifest(release: &Release) -> String {
    let body = render(release, None);
    let fp = format!("{:016x}", fnv1a64(body.as_bytes()));
    render(release, Some(&fp))
}

fn render(release: &Release, fingerprint: Option<&str>) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"model\": \"{}\",\n", json_escape(&release.model)));
    out.push_str(&format!("  \"release\": \"{}\",\n", json_escape(&release.name)));
    render_string_map("assignment", release.assignment.0.iter(), &mut out);
    out.push_str(",\n");
    render_string_map("bindings", release.bindings.iter(), &mut out);
    out.push_str(",\n");
    if release.active_members.is_empty() {
        out.push_str("  \"members\": {}");
    } else {
        out.push_str("  \"members\": {\n");
        let n = release.active_members.len();
        for (i, (iface, members)) in release.active_members.iter().enumerate() {
            if members.is_empty() {
                out.push_str(&format!("    \"{}\": []", json_escape(iface)));
            } else {
                out.push_str(&format!("    \"{}\": [\n", json_escape(iface)));
                let m_count = members.len();
                for (j, m) in members.iter().enumerate() {
                    let kind = match m.kind {
                        MemberKind::Attribute => "attr",
                        MemberKind::Method => "method",
                    };
                    out.push_str("      {\n");
                    out.push_str(&format!("        \"kind\": \"{kind}\",\n"));
                    out.push_str(&format!("        \"name\": \"{}\",\n", json_escape(&m.name)));
                    out.push_str(&format!(
                        "        \"signature\": \"{}\"\n",
                        json_escape(&member_signature(m))
                    ));
                    out.push_str(if j + 1 < m_count { "      },\n" } else { "      }\n" });
                }
                out.push_str("    ]");
            }
            out.push_str(if i + 1 < n { ",\n" } else { "\n" });
        }
        out.push_str("  }");
    }
    match fingerprint {
        Some(fp) => out.push_str(&format!(",\n  \"fingerprint\": \"{fp}\"\n")),
        None => out.push('\n'),
    }
    out.push_str("}\n");
    out
}

fn render_string_map<'a>(
    key: &str,
    entries: impl Iterator<Item = (&'a String, &'a String)>,
    out: &mut String,
) {
    let entries: Vec<_> = entries.collect();
    if entries.is_empty() {
        out.push_str(&format!("  \"{key}\": {{}}"));
        return;
    }
    out.push_str(&format!("  \"{key}\": {{\n"));
    let n = entries.len();
    for (i, (k, v)) in entries.into_iter().enumerate() {
        out.push_str(&format!(
            "    \"{}\": \"{}\"",
            json_escape(k),
            json_escape(v)
        ));
        out.push_str(if i + 1 < n { ",\n" } else { "\n" });
    }
    out.push_str("  }");
}
