//! Plain-text quiver format, DOT export and JSON certificates.
//!
//! ```text
//! # comments and blank lines are ignored
//! vertex w
//! arrow a : v1 -> v2
//! arrow b: v2->v3
//! ```
//!
//! Arrow endpoints declare their vertices implicitly; `vertex` lines are only
//! needed for isolated vertices.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::quiver::{Quiver, QuiverError};
use crate::rational::format_all;
use crate::soliton::SolitonCertificate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("line {line}: {reason}")]
    SyntaxError { line: usize, reason: String },
    #[error("line {line}: duplicate arrow name")]
    DuplicateArrowName { line: usize },
    #[error("line {line}: duplicate vertex declaration")]
    DuplicateVertexDeclaration { line: usize },
}

impl DslError {
    pub fn line(&self) -> usize {
        match self {
            DslError::SyntaxError { line, .. }
            | DslError::DuplicateArrowName { line }
            | DslError::DuplicateVertexDeclaration { line } => *line,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declaration {
    Vertex(String),
    Arrow { name: String, source: String, target: String },
}

/// A parsed file: its statements with 1-based source line numbers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuiverDocument {
    pub name: Option<String>,
    pub declarations: Vec<(usize, Declaration)>,
}

impl QuiverDocument {
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Vertices are numbered in order of first mention.
    pub fn to_quiver(&self) -> Quiver {
        let mut vertices: Vec<&str> = Vec::new();
        let mut arrows = Vec::new();
        fn mention<'a>(v: &'a str, vertices: &mut Vec<&'a str>) {
            if !vertices.contains(&v) {
                vertices.push(v);
            }
        }
        for (_, decl) in &self.declarations {
            match decl {
                Declaration::Vertex(v) => mention(v, &mut vertices),
                Declaration::Arrow { name, source, target } => {
                    mention(source, &mut vertices);
                    mention(target, &mut vertices);
                    arrows.push((name.as_str(), source.as_str(), target.as_str()));
                }
            }
        }
        Quiver::new(vertices, arrows).expect("documents are deduplicated during parsing")
    }
}

pub fn is_identifier(token: &str) -> bool {
    let mut chars = token.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn identifier(token: &str, what: &str, line: usize) -> Result<String, DslError> {
    let token = token.trim();
    if is_identifier(token) {
        Ok(token.to_string())
    } else if token.is_empty() {
        Err(DslError::SyntaxError { line, reason: format!("missing {what}") })
    } else {
        Err(DslError::SyntaxError { line, reason: format!("invalid {what} `{token}`") })
    }
}

fn parse_arrow(rest: &str, line: usize) -> Result<Declaration, DslError> {
    let (name, endpoints) = rest
        .split_once(':')
        .ok_or_else(|| DslError::SyntaxError { line, reason: "expected `:` after arrow name".into() })?;
    let (source, target) = endpoints
        .split_once("->")
        .ok_or_else(|| DslError::SyntaxError { line, reason: "expected `->` between endpoints".into() })?;
    Ok(Declaration::Arrow {
        name: identifier(name, "arrow name", line)?,
        source: identifier(source, "source vertex", line)?,
        target: identifier(target, "target vertex", line)?,
    })
}

pub fn parse_document(text: &str) -> Result<QuiverDocument, DslError> {
    let mut doc = QuiverDocument::default();
    let mut arrow_names = HashSet::new();
    let mut declared_vertices = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (keyword, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
        let decl = match keyword {
            "vertex" => {
                let v = identifier(rest, "vertex name", line)?;
                if !declared_vertices.insert(v.clone()) {
                    return Err(DslError::DuplicateVertexDeclaration { line });
                }
                Declaration::Vertex(v)
            }
            "arrow" => {
                let decl = parse_arrow(rest, line)?;
                if let Declaration::Arrow { name, .. } = &decl {
                    if !arrow_names.insert(name.clone()) {
                        return Err(DslError::DuplicateArrowName { line });
                    }
                }
                decl
            }
            other => {
                return Err(DslError::SyntaxError { line, reason: format!("unknown statement `{other}`") });
            }
        };
        doc.declarations.push((line, decl));
    }
    Ok(doc)
}

pub fn parse(text: &str) -> Result<Quiver, DslError> {
    parse_document(text).map(|doc| doc.to_quiver())
}

/// Canonical text: isolated vertices first, then arrows in declaration order.
pub fn serialize(q: &Quiver) -> String {
    let mut out = String::new();
    for (v, name) in q.vertices().iter().enumerate() {
        if q.is_isolated(v) {
            writeln!(out, "vertex {name}").unwrap();
        }
    }
    for a in q.arrows() {
        writeln!(out, "arrow {}: {} -> {}", a.name, q.vertex_name(a.source), q.vertex_name(a.target)).unwrap();
    }
    out
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn export_dot(q: &Quiver) -> String {
    let mut out = String::from("digraph Q {\n");
    for v in q.vertices() {
        writeln!(out, "  {};", dot_quote(v)).unwrap();
    }
    for a in q.arrows() {
        writeln!(
            out,
            "  {} -> {} [label={}];",
            dot_quote(q.vertex_name(a.source)),
            dot_quote(q.vertex_name(a.target)),
            dot_quote(&a.name)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Serialize)]
struct CertificateJson<'a> {
    paths: &'a [String],
    norms_squared: Vec<String>,
    ricci_eigenvalues: Vec<String>,
    c: String,
    derivation_diagonal: Vec<String>,
    checks: ChecksJson,
}

#[derive(Debug, Serialize)]
struct ChecksJson {
    derivation: bool,
    diagonal: bool,
    aut_invariant: bool,
    residual_zero: bool,
    decomposition: Option<bool>,
}

pub fn certificate_to_json(cert: &SolitonCertificate) -> String {
    serde_json::to_string_pretty(&certificate_value(cert)).expect("certificate serializes")
}

pub fn certificate_value(cert: &SolitonCertificate) -> serde_json::Value {
    let json = CertificateJson {
        paths: &cert.paths,
        norms_squared: format_all(cert.metric.norms_squared()),
        ricci_eigenvalues: format_all(&cert.ricci),
        c: cert.c.to_string(),
        derivation_diagonal: format_all(cert.derivation.entries()),
        checks: ChecksJson {
            derivation: cert.checks.d_is_derivation,
            diagonal: cert.checks.operator_diagonal,
            aut_invariant: cert.checks.aut_invariant,
            residual_zero: cert.checks.ric_equals_minus_id_plus_d,
            decomposition: cert.checks.decomposition,
        },
    };
    serde_json::to_value(&json).expect("certificate serializes")
}

/// Parses and checks acyclicity in one step.
pub fn parse_acyclic(text: &str) -> Result<Quiver, ParseAcyclicError> {
    let q = parse(text)?;
    q.validate()?;
    Ok(q)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseAcyclicError {
    #[error(transparent)]
    Syntax(#[from] DslError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}
