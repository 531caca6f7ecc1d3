//! Quivers with monomial relations: parsing, serialization, validation.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type ArrowId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub label: String,
    pub source: VertexId,
    pub target: VertexId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    vertex_index: HashMap<String, VertexId>,
    arrow_index: HashMap<String, ArrowId>,
    outgoing: Vec<Vec<ArrowId>>,
    incoming: Vec<Vec<ArrowId>>,
}

impl Quiver {
    fn new(vertices: Vec<String>, arrows: Vec<Arrow>) -> Self {
        let vertex_index = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let arrow_index = arrows.iter().enumerate().map(|(i, a)| (a.label.clone(), i)).collect();
        let mut outgoing = vec![Vec::new(); vertices.len()];
        let mut incoming = vec![Vec::new(); vertices.len()];
        for (i, a) in arrows.iter().enumerate() {
            outgoing[a.source].push(i);
            incoming[a.target].push(i);
        }
        Quiver { vertices, arrows, vertex_index, arrow_index, outgoing, incoming }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v]
    }

    pub fn arrow(&self, a: ArrowId) -> &Arrow {
        &self.arrows[a]
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId> {
        self.vertex_index.get(name).copied().ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn arrow_id(&self, label: &str) -> Result<ArrowId> {
        self.arrow_index.get(label).copied().ok_or_else(|| Error::UnknownArrow(label.to_string()))
    }

    /// Arrows starting at `v`, in declaration order.
    pub fn outgoing(&self, v: VertexId) -> &[ArrowId] {
        &self.outgoing[v]
    }

    /// Arrows ending at `v`, in declaration order.
    pub fn incoming(&self, v: VertexId) -> &[ArrowId] {
        &self.incoming[v]
    }
}

/// A path in diagram order, first-traversed arrow first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<ArrowId>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub condition: String,
    pub passed: bool,
    pub offenders: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub conditions: Vec<ConditionResult>,
    pub is_string_algebra: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PathCount {
    Finite(u64),
    Infinite,
}

#[derive(Debug)]
pub struct AlgebraPresentation {
    name: String,
    quiver: Quiver,
    relations: Vec<Monomial>,
    relation_set: HashSet<Vec<ArrowId>>,
    max_relation_len: usize,
    report: OnceLock<ValidationReport>,
}

impl Clone for AlgebraPresentation {
    fn clone(&self) -> Self {
        AlgebraPresentation {
            name: self.name.clone(),
            quiver: self.quiver.clone(),
            relations: self.relations.clone(),
            relation_set: self.relation_set.clone(),
            max_relation_len: self.max_relation_len,
            report: OnceLock::new(),
        }
    }
}

impl PartialEq for AlgebraPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.quiver == other.quiver && self.relations == other.relations
    }
}

impl Eq for AlgebraPresentation {}

impl AlgebraPresentation {
    fn from_parts(name: String, quiver: Quiver, relations: Vec<Monomial>) -> Self {
        let mut unique: Vec<Monomial> = Vec::new();
        for r in relations {
            if !unique.contains(&r) {
                unique.push(r);
            }
        }
        let normalized: Vec<Monomial> = unique
            .iter()
            .filter(|r| !unique.iter().any(|s| s != *r && is_factor(&s.0, &r.0)))
            .cloned()
            .collect();
        let relation_set = normalized.iter().map(|r| r.0.clone()).collect();
        let max_relation_len = normalized.iter().map(|r| r.0.len()).max().unwrap_or(0);
        AlgebraPresentation { name, quiver, relations: normalized, relation_set, max_relation_len, report: OnceLock::new() }
    }

    pub fn builder(name: &str) -> PresentationBuilder {
        PresentationBuilder { name: name.to_string(), vertices: Vec::new(), arrows: Vec::new(), relations: Vec::new() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn relations(&self) -> &[Monomial] {
        &self.relations
    }

    pub fn max_relation_len(&self) -> usize {
        self.max_relation_len
    }

    pub fn is_relation(&self, path: &[ArrowId]) -> bool {
        self.relation_set.contains(path)
    }

    /// True if `path` has a relation as a contiguous factor.
    pub fn contains_relation(&self, path: &[ArrowId]) -> bool {
        (0..path.len()).any(|i| self.has_relation_suffix(&path[..=i]))
    }

    /// True if some suffix of `path` is a relation.
    pub fn has_relation_suffix(&self, path: &[ArrowId]) -> bool {
        let n = path.len();
        (2..=self.max_relation_len.min(n)).any(|k| self.relation_set.contains(&path[n - k..]))
    }

    pub fn relation_text(&self, r: &Monomial) -> String {
        r.0.iter().map(|&a| self.quiver.arrow(a).label.as_str()).collect::<Vec<_>>().join(" ")
    }

    /// Nonzero paths from `v` (including the trivial path), breadth first.
    /// Panics if infinitely many; check [`nonzero_path_count`] first.
    pub fn paths_from(&self, v: VertexId) -> Vec<Vec<ArrowId>> {
        let mut out = vec![Vec::new()];
        let mut frontier = vec![Vec::new()];
        let limit = self.path_length_limit();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in &frontier {
                let end = p.last().map(|&a| self.quiver.arrow(a).target).unwrap_or(v);
                for &a in self.quiver.outgoing(end) {
                    let mut q = p.clone();
                    q.push(a);
                    if !self.has_relation_suffix(&q) {
                        assert!(q.len() <= limit, "infinitely many nonzero paths");
                        next.push(q);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// Nonzero paths ending at `v` (including the trivial path).
    pub fn paths_to(&self, v: VertexId) -> Vec<Vec<ArrowId>> {
        let mut out = Vec::new();
        for u in 0..self.quiver.vertex_count() {
            for p in self.paths_from(u) {
                let end = p.last().map(|&a| self.quiver.arrow(a).target).unwrap_or(u);
                if end == v {
                    out.push(p);
                }
            }
        }
        out
    }

    fn path_length_limit(&self) -> usize {
        let w = self.max_relation_len.saturating_sub(1).max(1);
        (self.quiver.arrow_count().max(1)).pow(w as u32) * w + w + 1
    }

    pub fn validate_string_algebra(&self) -> &ValidationReport {
        self.report.get_or_init(|| validate(self))
    }

    pub fn is_string_algebra(&self) -> bool {
        self.validate_string_algebra().is_string_algebra
    }

    pub fn nonzero_path_count(&self) -> PathCount {
        let q = &self.quiver;
        let w = self.max_relation_len.saturating_sub(1).max(1);
        let mut count = q.vertex_count() as u64;
        let mut frontier: Vec<Vec<ArrowId>> = Vec::new();
        for a in 0..q.arrow_count() {
            frontier.push(vec![a]);
        }
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in frontier {
                count += 1;
                let n = p.len();
                if n > w {
                    let last = &p[n - w..];
                    if (0..n - w).any(|i| &p[i..i + w] == last) {
                        return PathCount::Infinite;
                    }
                }
                let end = q.arrow(p[n - 1]).target;
                for &a in q.outgoing(end) {
                    let mut ext = p.clone();
                    ext.push(a);
                    if !self.has_relation_suffix(&ext) {
                        next.push(ext);
                    }
                }
            }
            frontier = next;
        }
        PathCount::Finite(count)
    }

    /// Source text in the presentation grammar.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        if !self.name.is_empty() {
            let _ = writeln!(s, "algebra {}", self.name);
        }
        let _ = writeln!(s, "vertices {}", self.quiver.vertices.join(" "));
        for a in &self.quiver.arrows {
            let _ = writeln!(s, "arrow {} {} -> {}", a.label, self.quiver.vertices[a.source], self.quiver.vertices[a.target]);
        }
        for r in &self.relations {
            let _ = writeln!(s, "relation {}", self.relation_text(r));
        }
        s
    }
}

fn is_factor(small: &[ArrowId], big: &[ArrowId]) -> bool {
    small.len() <= big.len() && big.windows(small.len()).any(|w| w == small)
}

fn validate(p: &AlgebraPresentation) -> ValidationReport {
    let q = &p.quiver;
    let vname = |v: VertexId| q.vertices[v].clone();
    let aname = |a: ArrowId| q.arrows[a].label.clone();

    let out_fail: Vec<String> = (0..q.vertex_count()).filter(|&v| q.outgoing(v).len() > 2).map(vname).collect();
    let in_fail: Vec<String> = (0..q.vertex_count()).filter(|&v| q.incoming(v).len() > 2).map(vname).collect();

    let mut pred_fail = Vec::new();
    let mut succ_fail = Vec::new();
    for b in 0..q.arrow_count() {
        let preds: Vec<ArrowId> =
            q.incoming(q.arrows[b].source).iter().copied().filter(|&g| !p.is_relation(&[g, b])).collect();
        if preds.len() > 1 {
            let names: Vec<String> = preds.iter().map(|&g| aname(g)).collect();
            pred_fail.push(format!("{} (predecessors {})", aname(b), names.join(", ")));
        }
        let succs: Vec<ArrowId> =
            q.outgoing(q.arrows[b].target).iter().copied().filter(|&g| !p.is_relation(&[b, g])).collect();
        if succs.len() > 1 {
            let names: Vec<String> = succs.iter().map(|&g| aname(g)).collect();
            succ_fail.push(format!("{} (successors {})", aname(b), names.join(", ")));
        }
    }

    let mk = |c: &str, offenders: Vec<String>| ConditionResult { condition: c.to_string(), passed: offenders.is_empty(), offenders };
    let conditions = vec![
        mk("1", out_fail),
        mk("1'", in_fail),
        mk("2", pred_fail),
        mk("2'", succ_fail),
        // Monomial ideal: guaranteed by the grammar.
        mk("3", Vec::new()),
    ];
    let is_string_algebra = conditions.iter().all(|c| c.passed);
    ValidationReport { conditions, is_string_algebra }
}

/// Programmatic construction with the same checks as the parser.
#[derive(Clone, Debug)]
pub struct PresentationBuilder {
    name: String,
    vertices: Vec<String>,
    arrows: Vec<(String, String, String)>,
    relations: Vec<Vec<String>>,
}

impl PresentationBuilder {
    pub fn vertex(mut self, id: &str) -> Self {
        self.vertices.push(id.to_string());
        self
    }

    pub fn arrow(mut self, label: &str, source: &str, target: &str) -> Self {
        self.arrows.push((label.to_string(), source.to_string(), target.to_string()));
        self
    }

    pub fn relation(mut self, labels: &[&str]) -> Self {
        self.relations.push(labels.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn build(self) -> Result<AlgebraPresentation> {
        let mut text = String::new();
        if !self.name.is_empty() {
            let _ = writeln!(text, "algebra {}", self.name);
        }
        let _ = writeln!(text, "vertices {}", self.vertices.join(" "));
        for (l, s, t) in &self.arrows {
            let _ = writeln!(text, "arrow {l} {s} -> {t}");
        }
        for r in &self.relations {
            let _ = writeln!(text, "relation {}", r.join(" "));
        }
        parse_presentation(&text)
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut col_of = Vec::new();
    for (col, (i, _)) in line.char_indices().enumerate() {
        col_of.push((i, col + 1));
    }
    let column = |byte: usize| col_of.iter().find(|(b, _)| *b == byte).map(|(_, c)| *c).unwrap_or(1);
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: column(s) });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: column(s) });
    }
    out
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, column, message: message.into() }
}

fn check_identifier(tok: &Token<'_>, line: usize, what: &str) -> Result<()> {
    if tok.text == "->" || tok.text.contains(['^', '(', ')', '#', '+']) {
        return Err(syntax(line, tok.column, format!("invalid {what} `{}`", tok.text)));
    }
    Ok(())
}

pub fn parse_presentation(text: &str) -> Result<AlgebraPresentation> {
    struct ArrowDecl<'a> {
        line: usize,
        label: Token<'a>,
        source: Token<'a>,
        target: Token<'a>,
    }
    let mut name = String::new();
    let mut vertices: Vec<String> = Vec::new();
    let mut arrows: Vec<ArrowDecl<'_>> = Vec::new();
    let mut relations: Vec<(usize, Vec<Token<'_>>)> = Vec::new();
    let mut seen_name = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let mut toks = tokenize(line);
        if toks.is_empty() {
            continue;
        }
        let head = toks.remove(0);
        match head.text {
            "algebra" => {
                if seen_name {
                    return Err(syntax(line_no, head.column, "duplicate algebra name"));
                }
                if toks.len() != 1 {
                    return Err(syntax(line_no, head.column, "expected `algebra <name>`"));
                }
                seen_name = true;
                name = toks[0].text.to_string();
            }
            "vertices" | "vertices:" => {
                for t in &toks {
                    check_identifier(t, line_no, "vertex id")?;
                    if vertices.iter().any(|v| v == t.text) {
                        return Err(syntax(line_no, t.column, format!("duplicate vertex `{}`", t.text)));
                    }
                    vertices.push(t.text.to_string());
                }
            }
            "arrow" => {
                if toks.len() != 4 || toks[2].text != "->" {
                    return Err(syntax(line_no, head.column, "expected `arrow <label> <src> -> <dst>`"));
                }
                let mut it = toks.into_iter();
                let label = it.next().unwrap();
                let source = it.next().unwrap();
                it.next();
                let target = it.next().unwrap();
                check_identifier(&label, line_no, "arrow label")?;
                if arrows.iter().any(|a| a.label.text == label.text) {
                    return Err(syntax(line_no, label.column, format!("duplicate arrow `{}`", label.text)));
                }
                arrows.push(ArrowDecl { line: line_no, label, source, target });
            }
            "relation" => {
                if let Some(t) = toks.iter().find(|t| t.text == "+" || t.text == "-" || t.text.contains('+')) {
                    return Err(syntax(line_no, t.column, "relations must be monomial"));
                }
                if toks.len() < 2 {
                    let col = toks.first().map(|t| t.column).unwrap_or(head.column);
                    return Err(syntax(line_no, col, "relations must have length at least 2"));
                }
                relations.push((line_no, toks));
            }
            other => {
                return Err(syntax(line_no, head.column, format!("unknown keyword `{other}`")));
            }
        }
    }

    let vertex_index: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut resolved = Vec::new();
    for a in &arrows {
        let s = *vertex_index.get(a.source.text).ok_or_else(|| Error::UnknownVertex(a.source.text.to_string()))?;
        let t = *vertex_index.get(a.target.text).ok_or_else(|| Error::UnknownVertex(a.target.text.to_string()))?;
        let _ = a.line;
        resolved.push(Arrow { label: a.label.text.to_string(), source: s, target: t });
    }
    let quiver = Quiver::new(vertices, resolved);
    let mut monomials = Vec::new();
    for (_line, toks) in &relations {
        let ids: Vec<ArrowId> = toks.iter().map(|t| quiver.arrow_id(t.text)).collect::<Result<_>>()?;
        for w in ids.windows(2) {
            if quiver.arrow(w[0]).target != quiver.arrow(w[1]).source {
                let text = toks.iter().map(|t| t.text).collect::<Vec<_>>().join(" ");
                return Err(Error::NonComposable(text));
            }
        }
        monomials.push(Monomial(ids));
    }
    Ok(AlgebraPresentation::from_parts(name, quiver, monomials))
}

#[cfg(test)]
mod tests {
    use super::*;

    const W3: &str = "algebra W3\nvertices 1 2 3 4\narrow a 1 -> 1\narrow b1 1 -> 2\narrow b2 2 -> 3\narrow b3 3 -> 4\nrelation a a\nrelation b1 b2\n";

    #[test]
    fn parses_w3() {
        let p = parse_presentation(W3).unwrap();
        assert_eq!(p.quiver().vertex_count(), 4);
        assert_eq!(p.quiver().arrow_count(), 4);
        assert_eq!(p.relations().len(), 2);
        assert_eq!(p.name(), "W3");
    }

    #[test]
    fn round_trip_is_byte_stable() {
        let p = parse_presentation(W3).unwrap();
        assert_eq!(p.serialize(), W3);
        assert_eq!(parse_presentation(&p.serialize()).unwrap(), p);
    }

    #[test]
    fn vertices_only() {
        let p = parse_presentation("vertices: 1\n").unwrap();
        assert_eq!(p.quiver().vertex_count(), 1);
        assert_eq!(p.quiver().arrow_count(), 0);
    }

    #[test]
    fn non_composable_relation_rejected() {
        let src = W3.replace("relation b1 b2", "relation b2 b1");
        assert!(matches!(parse_presentation(&src), Err(Error::NonComposable(_))));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_presentation("vertices 1 2\narrow a 1 2\n") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 1)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_presentation("vertices 1\narrow a 1 -> 1\nrelation a\n") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 10)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_presentation("vertices 1\narrow a 1 -> 1\nrelation a a + a\n"),
            Err(Error::Syntax { line: 3, column: 14, .. })
        ));
        assert!(matches!(parse_presentation("vertices 1\narrow a 1 -> 9\n"), Err(Error::UnknownVertex(_))));
        assert!(matches!(parse_presentation("vertices 1\nrelation a a\n"), Err(Error::UnknownArrow(_))));
    }

    #[test]
    fn comments_are_ignored() {
        let p = parse_presentation("# header\nvertices 1 2 # two\narrow a 1 -> 2 # one arrow\n").unwrap();
        assert_eq!(p.quiver().arrow_count(), 1);
    }

    #[test]
    fn normalization_drops_redundant_relations() {
        let p = parse_presentation("vertices 1\narrow a 1 -> 1\nrelation a a a\nrelation a a\nrelation a a\n").unwrap();
        assert_eq!(p.relations().len(), 1);
        assert_eq!(p.relations()[0].0.len(), 2);
    }

    #[test]
    fn w3_is_a_string_algebra() {
        let p = parse_presentation(W3).unwrap();
        let r = p.validate_string_algebra();
        assert!(r.is_string_algebra);
        assert_eq!(r.conditions.len(), 5);
        assert_eq!(p.validate_string_algebra(), r);
    }

    #[test]
    fn three_outgoing_arrows_fail_condition_one() {
        let p = parse_presentation("vertices 1 2 3 4\narrow a 1 -> 2\narrow b 1 -> 3\narrow c 1 -> 4\n").unwrap();
        let r = p.validate_string_algebra();
        assert!(!r.is_string_algebra);
        assert!(!r.conditions[0].passed);
        assert_eq!(r.conditions[0].offenders, vec!["1".to_string()]);
    }

    #[test]
    fn two_predecessors_fail_condition_two() {
        let p = parse_presentation("vertices 1 2 3 4\narrow g 1 -> 2\narrow d 3 -> 2\narrow b 2 -> 4\n").unwrap();
        let r = p.validate_string_algebra();
        assert!(!r.conditions[2].passed);
        assert!(r.conditions[2].offenders[0].starts_with("b "));
        assert!(r.conditions[3].passed);
    }

    #[test]
    fn path_counts() {
        let w3 = parse_presentation(W3).unwrap();
        let total: usize = (0..4).map(|v| w3.paths_from(v).len()).sum();
        assert_eq!(w3.nonzero_path_count(), PathCount::Finite(total as u64));
        let loop_free = parse_presentation("vertices 1\narrow a 1 -> 1\n").unwrap();
        assert_eq!(loop_free.nonzero_path_count(), PathCount::Infinite);
        let point = parse_presentation("vertices 1\n").unwrap();
        assert_eq!(point.nonzero_path_count(), PathCount::Finite(1));
    }

    #[test]
    fn long_relation_cycle_is_finite() {
        let p = parse_presentation("vertices 1 2\narrow a 1 -> 2\narrow b 2 -> 1\nrelation a b a\n").unwrap();
        // e1 e2 a b ab ba bab
        assert_eq!(p.nonzero_path_count(), PathCount::Finite(7));
    }
}
