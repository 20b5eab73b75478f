//! Graph exports in DOT syntax. Node order follows the object's own
//! indexing, so output is deterministic.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use pomreal::cfsm::Cfsm;
use pomreal::system::ConfigGraph;
use pomreal::Pomset;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("unsupported graph format `{0}` (supported: dot)")]
    UnsupportedFormat(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
}

impl FromStr for GraphFormat {
    type Err = ExportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dot" | "gv" => Ok(GraphFormat::Dot),
            _ => Err(ExportError::UnsupportedFormat(s.to_string())),
        }
    }
}

pub enum GraphObject<'a> {
    /// Drawn as its Hasse diagram.
    Pomset(&'a Pomset),
    Cfsm(&'a Cfsm),
    Configurations(&'a ConfigGraph),
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn pomset_dot(r: &Pomset, name: &str) -> String {
    let mut out = format!("digraph {} {{\n", quote(name));
    for e in r.events() {
        writeln!(out, "  {} [label={}];", quote(e.id.as_str()), quote(&e.label.to_string())).unwrap();
    }
    for &(a, b) in r.hasse() {
        writeln!(out, "  {} -> {};", quote(r.id(a).as_str()), quote(r.id(b).as_str())).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn cfsm_dot(m: &Cfsm) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=LR;\n", quote(m.owner().as_str()));
    for (q, name) in m.states().iter().enumerate() {
        let mut attrs = vec![format!("label={}", quote(name))];
        attrs.push(format!(
            "shape={}",
            if m.is_accepting(q) { "doublecircle" } else { "circle" }
        ));
        if q == m.initial() {
            attrs.push("style=bold".into());
        }
        writeln!(out, "  q{q} [{}];", attrs.join(", ")).unwrap();
    }
    for t in m.transitions() {
        writeln!(out, "  q{} -> q{} [label={}];", t.from, t.to, quote(&t.label.to_string())).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn configurations_dot(g: &ConfigGraph) -> String {
    let mut out = String::from("digraph configurations {\n");
    for (i, c) in g.nodes.iter().enumerate() {
        let mut attrs = vec![format!("label={}", quote(&c.to_string()))];
        if g.accepting[i] {
            attrs.push("shape=doublecircle".into());
        }
        if g.deadlock[i] {
            attrs.push("color=red".into());
        }
        if i == 0 {
            attrs.push("style=bold".into());
        }
        writeln!(out, "  c{i} [{}];", attrs.join(", ")).unwrap();
    }
    for (s, l, t) in &g.edges {
        writeln!(out, "  c{s} -> c{t} [label={}];", quote(&l.to_string())).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn render(object: &GraphObject<'_>, format: GraphFormat) -> String {
    match (object, format) {
        (GraphObject::Pomset(r), GraphFormat::Dot) => pomset_dot(r, "pomset"),
        (GraphObject::Cfsm(m), GraphFormat::Dot) => cfsm_dot(m),
        (GraphObject::Configurations(g), GraphFormat::Dot) => configurations_dot(g),
    }
}

/// Writes `object` to `path`; `format` is a format name such as `dot`.
pub fn export_graph(object: &GraphObject<'_>, format: &str, path: impl AsRef<Path>) -> Result<(), ExportError> {
    let text = render(object, format.parse()?);
    let path = path.as_ref();
    fs::write(path, text).map_err(|source| ExportError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pomreal::cfsm::synthesize_cfsm;
    use pomreal::language::Language;

    fn count(text: &str, pat: &str) -> usize {
        text.lines().filter(|l| l.contains(pat)).count()
    }

    #[test]
    fn empty_pomset_has_header_only() {
        let text = render(&GraphObject::Pomset(&Pomset::empty()), GraphFormat::Dot);
        assert_eq!(text, "digraph \"pomset\" {\n}\n");
    }

    #[test]
    fn two_state_machine() {
        let l: Language = ["AB!x·AB?x".parse().unwrap()].into();
        let m = synthesize_cfsm(&l, &"A".into());
        let text = render(&GraphObject::Cfsm(&m), GraphFormat::Dot);
        assert_eq!(count(&text, "shape="), 2);
        assert_eq!(count(&text, "->"), 1);
        assert_eq!(count(&text, "doublecircle"), 1);
    }

    #[test]
    fn unknown_format() {
        assert!(matches!(
            "svg".parse::<GraphFormat>(),
            Err(ExportError::UnsupportedFormat(_))
        ));
    }
}
