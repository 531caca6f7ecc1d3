//! Letters, walks, strings and bands.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::presentation::{AlgebraPresentation, ArrowId, Quiver, VertexId};

/// An arrow or its formal inverse. Ordered by arrow declaration order,
/// direct before inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub arrow: ArrowId,
    pub inverse: bool,
}

impl Letter {
    pub fn direct(arrow: ArrowId) -> Self {
        Letter { arrow, inverse: false }
    }

    pub fn inverse_of(arrow: ArrowId) -> Self {
        Letter { arrow, inverse: true }
    }

    pub fn inv(self) -> Self {
        Letter { arrow: self.arrow, inverse: !self.inverse }
    }

    pub fn start(self, q: &Quiver) -> VertexId {
        let a = q.arrow(self.arrow);
        if self.inverse { a.target } else { a.source }
    }

    pub fn end(self, q: &Quiver) -> VertexId {
        let a = q.arrow(self.arrow);
        if self.inverse { a.source } else { a.target }
    }

    pub fn format(self, q: &Quiver) -> String {
        let label = &q.arrow(self.arrow).label;
        if self.inverse { format!("{label}^-") } else { label.clone() }
    }
}

/// A walk; trivial walks carry their vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Walk {
    letters: Vec<Letter>,
    base: VertexId,
}

impl Ord for Walk {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
            .then_with(|| self.base.cmp(&other.base))
    }
}

impl PartialOrd for Walk {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Walk {
    pub fn trivial(v: VertexId) -> Self {
        Walk { letters: Vec::new(), base: v }
    }

    /// A composable walk; `start` is only used when `letters` is empty.
    pub fn new(q: &Quiver, start: VertexId, letters: Vec<Letter>) -> Result<Self> {
        for l in &letters {
            if l.arrow >= q.arrow_count() {
                return Err(Error::UnknownArrow(format!("#{}", l.arrow)));
            }
        }
        for (i, w) in letters.windows(2).enumerate() {
            if w[0].end(q) != w[1].start(q) {
                return Err(Error::InvalidString(format!("letters {} and {} do not compose", i, i + 1)));
            }
        }
        let base = letters.first().map(|l| l.start(q)).unwrap_or(start);
        Ok(Walk { letters, base })
    }

    pub fn from_letters(q: &Quiver, letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidString("empty walk needs a basepoint".into()));
        }
        Self::new(q, 0, letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn start(&self) -> VertexId {
        self.base
    }

    pub fn end(&self, q: &Quiver) -> VertexId {
        self.letters.last().map(|l| l.end(q)).unwrap_or(self.base)
    }

    /// Vertex under position `i` (0..=len).
    pub fn vertex_at(&self, q: &Quiver, i: usize) -> VertexId {
        if i == 0 { self.base } else { self.letters[i - 1].end(q) }
    }

    pub fn inverse(&self, q: &Quiver) -> Walk {
        Walk { letters: self.letters.iter().rev().map(|l| l.inv()).collect(), base: self.end(q) }
    }

    pub fn push(&mut self, q: &Quiver, l: Letter) {
        debug_assert_eq!(l.start(q), self.end(q));
        self.letters.push(l);
    }

    /// Letters `from..to` as a walk starting at position `from`.
    pub fn sub(&self, q: &Quiver, from: usize, to: usize) -> Walk {
        Walk { letters: self.letters[from..to].to_vec(), base: self.vertex_at(q, from) }
    }

    pub fn is_direct(&self) -> bool {
        self.letters.iter().all(|l| !l.inverse)
    }

    pub fn is_inverse(&self) -> bool {
        self.letters.iter().all(|l| l.inverse)
    }

    /// Text form: `b1 b2^- a`, or `e(v)` for a trivial walk.
    pub fn format(&self, q: &Quiver) -> String {
        if self.letters.is_empty() {
            return format!("e({})", q.vertex_name(self.base));
        }
        self.letters.iter().map(|l| l.format(q)).collect::<Vec<_>>().join(" ")
    }

    pub fn parse(q: &Quiver, text: &str) -> Result<Walk> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() == 1 {
            if let Some(inner) = toks[0].strip_prefix("e(").and_then(|s| s.strip_suffix(')')) {
                return Ok(Walk::trivial(q.vertex(inner)?));
            }
        }
        if toks.is_empty() {
            return Err(Error::InvalidString("empty walk".into()));
        }
        let mut letters = Vec::new();
        for t in toks {
            let (label, inverse) = match t.strip_suffix("^-") {
                Some(l) => (l, true),
                None => (t, false),
            };
            letters.push(Letter { arrow: q.arrow_id(label)?, inverse });
        }
        Walk::from_letters(q, letters)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StringFailureKind {
    NotReduced,
    ContainsRelation,
    ContainsInverseRelation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StringFailure {
    /// Index of the letter completing the first violation.
    pub index: usize,
    pub kind: StringFailureKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StringCheck {
    pub valid: bool,
    pub failure: Option<StringFailure>,
}

/// Whether `l` may be appended to the letters `prefix` without creating a
/// backtrack or a relation factor. Composability is not checked.
fn append_violation(p: &AlgebraPresentation, prefix: &[Letter], l: Letter) -> Option<StringFailureKind> {
    if let Some(&last) = prefix.last() {
        if last == l.inv() {
            return Some(StringFailureKind::NotReduced);
        }
    }
    let r = p.max_relation_len();
    if r < 2 {
        return None;
    }
    let run: Vec<ArrowId> = prefix
        .iter()
        .rev()
        .take(r - 1)
        .take_while(|x| x.inverse == l.inverse)
        .map(|x| x.arrow)
        .collect();
    if run.is_empty() {
        return None;
    }
    if !l.inverse {
        let mut path: Vec<ArrowId> = run.iter().rev().copied().collect();
        path.push(l.arrow);
        if p.has_relation_suffix(&path) {
            return Some(StringFailureKind::ContainsRelation);
        }
    } else {
        // The inverse of the run followed by l is l.arrow, then the run reversed.
        let mut path = vec![l.arrow];
        path.extend(run.iter().copied());
        for k in 2..=path.len() {
            if p.is_relation(&path[..k]) {
                return Some(StringFailureKind::ContainsInverseRelation);
            }
        }
    }
    None
}

pub fn is_string(p: &AlgebraPresentation, w: &Walk) -> Result<StringCheck> {
    let q = p.quiver();
    for l in w.letters() {
        if l.arrow >= q.arrow_count() {
            return Err(Error::UnknownArrow(format!("#{}", l.arrow)));
        }
    }
    for i in 0..w.len() {
        if i > 0 && w.letters[i - 1].end(q) != w.letters[i].start(q) {
            return Err(Error::InvalidString(format!("letters {} and {} do not compose", i - 1, i)));
        }
        if let Some(kind) = append_violation(p, &w.letters[..i], w.letters[i]) {
            return Ok(StringCheck { valid: false, failure: Some(StringFailure { index: i, kind }) });
        }
    }
    Ok(StringCheck { valid: true, failure: None })
}

/// `w·l` is a string, assuming `w` is one.
pub fn can_append(p: &AlgebraPresentation, w: &Walk, l: Letter) -> bool {
    l.start(p.quiver()) == w.end(p.quiver()) && append_violation(p, &w.letters, l).is_none()
}

/// `l·w` is a string, assuming `w` is one.
pub fn can_prepend(p: &AlgebraPresentation, w: &Walk, l: Letter) -> bool {
    can_append(p, &w.inverse(p.quiver()), l.inv())
}

/// All letters starting at `v`, in letter order.
pub fn letters_from(q: &Quiver, v: VertexId) -> Vec<Letter> {
    let mut out = Vec::new();
    for a in 0..q.arrow_count() {
        for l in [Letter::direct(a), Letter::inverse_of(a)] {
            if l.start(q) == v {
                out.push(l);
            }
        }
    }
    out
}

/// Letters `l` with `w·l` a string.
pub fn extensions(p: &AlgebraPresentation, w: &Walk) -> Vec<Letter> {
    letters_from(p.quiver(), w.end(p.quiver())).into_iter().filter(|&l| can_append(p, w, l)).collect()
}

/// A validated string.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StringWord {
    walk: Walk,
}

impl StringWord {
    pub fn new(p: &AlgebraPresentation, walk: Walk) -> Result<Self> {
        let check = is_string(p, &walk)?;
        if let Some(f) = check.failure {
            return Err(Error::InvalidString(format!("{} ({:?} at letter {})", walk.format(p.quiver()), f.kind, f.index)));
        }
        Ok(StringWord { walk })
    }

    pub fn parse(p: &AlgebraPresentation, text: &str) -> Result<Self> {
        Self::new(p, Walk::parse(p.quiver(), text)?)
    }

    pub(crate) fn from_walk_unchecked(walk: Walk) -> Self {
        StringWord { walk }
    }

    pub fn walk(&self) -> &Walk {
        &self.walk
    }

    pub fn len(&self) -> usize {
        self.walk.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walk.is_empty()
    }

    pub fn inverse(&self, q: &Quiver) -> StringWord {
        StringWord { walk: self.walk.inverse(q) }
    }

    pub fn is_canonical(&self, q: &Quiver) -> bool {
        self.walk.is_trivial() || self.walk.letters <= self.walk.inverse(q).letters
    }

    pub fn format(&self, q: &Quiver) -> String {
        self.walk.format(q)
    }
}

pub fn canonicalize(q: &Quiver, w: &StringWord) -> StringWord {
    if w.is_canonical(q) { w.clone() } else { w.inverse(q) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StringFlags {
    pub starts_in_deep: bool,
    pub starts_on_peak: bool,
    pub ends_in_deep: bool,
    pub ends_on_peak: bool,
    pub is_direct: bool,
    pub is_inverse: bool,
}

pub fn string_flags(p: &AlgebraPresentation, w: &StringWord) -> StringFlags {
    let q = p.quiver();
    let walk = w.walk();
    let arrows = 0..q.arrow_count();
    let prepend = |l: Letter| l.end(q) == walk.start() && can_prepend(p, walk, l);
    let append = |l: Letter| l.start(q) == walk.end(q) && can_append(p, walk, l);
    StringFlags {
        starts_in_deep: !arrows.clone().any(|a| prepend(Letter::inverse_of(a))),
        starts_on_peak: !arrows.clone().any(|a| prepend(Letter::direct(a))),
        ends_in_deep: !arrows.clone().any(|a| append(Letter::direct(a))),
        ends_on_peak: !arrows.clone().any(|a| append(Letter::inverse_of(a))),
        is_direct: walk.is_direct(),
        is_inverse: walk.is_inverse(),
    }
}

/// Letter-window length after which a repeat forces a band.
fn state_window(p: &AlgebraPresentation) -> usize {
    p.max_relation_len().saturating_sub(1).max(1)
}

/// The primitive root of a cyclic word.
fn primitive_root(letters: &[Letter]) -> &[Letter] {
    let n = letters.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (0..n).all(|i| letters[i] == letters[i % d]) {
            return &letters[..d];
        }
    }
    letters
}

/// Canonical representative of a cyclic word under rotation and inversion.
fn canonical_band(q: &Quiver, cycle: &Walk) -> Walk {
    let n = cycle.len();
    let inv = cycle.inverse(q);
    let mut best: Option<Vec<Letter>> = None;
    for word in [cycle.letters(), inv.letters()] {
        for s in 0..n {
            let rot: Vec<Letter> = word[s..].iter().chain(&word[..s]).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    Walk::from_letters(q, best.expect("nonempty cycle")).expect("rotation of a closed walk composes")
}

/// Whether all powers of the closed walk are strings.
fn is_band_cycle(p: &AlgebraPresentation, cycle: &Walk) -> bool {
    let q = p.quiver();
    if cycle.is_trivial() || cycle.start() != cycle.end(q) {
        return false;
    }
    let n = cycle.len();
    let k = 2 + (state_window(p) + 1).div_ceil(n);
    let letters: Vec<Letter> = cycle.letters().iter().copied().cycle().take(k * n).collect();
    match Walk::from_letters(q, letters) {
        Ok(w) => is_string(p, &w).map(|c| c.valid).unwrap_or(false),
        Err(_) => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BandWord(pub Walk);

impl BandWord {
    pub fn format(&self, q: &Quiver) -> String {
        self.0.format(q)
    }
}

fn band_from_repeat(p: &AlgebraPresentation, w: &Walk) -> Option<BandWord> {
    let s = state_window(p);
    let n = w.len();
    if n <= s {
        return None;
    }
    let letters = w.letters();
    let last = &letters[n - s..];
    let i = (0..n - s).find(|&i| &letters[i..i + s] == last)?;
    let period = primitive_root(&letters[i..n - s]).to_vec();
    let cycle = Walk::from_letters(p.quiver(), period).ok()?;
    Some(BandWord(canonical_band(p.quiver(), &cycle)))
}

/// Oriented strings of each length up to `max_len`, level by level.
fn oriented_levels(p: &AlgebraPresentation, max_len: Option<usize>, detect_bands: bool) -> Result<Vec<Vec<Walk>>> {
    let q = p.quiver();
    let mut levels = vec![(0..q.vertex_count()).map(Walk::trivial).collect::<Vec<_>>()];
    loop {
        let len = levels.len();
        if max_len.is_some_and(|m| len > m) {
            break;
        }
        let mut next = Vec::new();
        for w in levels.last().unwrap() {
            for l in extensions(p, w) {
                let mut e = w.clone();
                e.push(q, l);
                if detect_bands {
                    if let Some(b) = band_from_repeat(p, &e) {
                        return Err(Error::BandFound(b.format(q)));
                    }
                }
                next.push(e);
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    Ok(levels)
}

/// All canonical strings, sorted by (length, letters).
pub fn enumerate_strings(p: &AlgebraPresentation, max_len: Option<usize>) -> Result<Vec<StringWord>> {
    let q = p.quiver();
    let levels = oriented_levels(p, max_len, max_len.is_none())?;
    let mut set = BTreeSet::new();
    for level in levels {
        for w in level {
            set.insert(canonicalize(q, &StringWord::from_walk_unchecked(w)));
        }
    }
    Ok(set.into_iter().collect())
}

/// Canonical bands of length at most `max_len`.
pub fn find_bands(p: &AlgebraPresentation, max_len: usize) -> Vec<BandWord> {
    let q = p.quiver();
    let levels = oriented_levels(p, Some(max_len), false).expect("bounded enumeration");
    let mut set = BTreeSet::new();
    for level in levels.iter().skip(1) {
        for w in level {
            if primitive_root(w.letters()).len() == w.len() && is_band_cycle(p, w) {
                set.insert(BandWord(canonical_band(q, w)));
            }
        }
    }
    set.into_iter().collect()
}

/// Sign functions sigma, epsilon on arrows, extended to inverse letters by
/// sigma(b^-) = epsilon(b) and epsilon(b^-) = sigma(b).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signs {
    sigma: Vec<i8>,
    eps: Vec<i8>,
}

impl Signs {
    pub fn compute(p: &AlgebraPresentation) -> Result<Signs> {
        let q = p.quiver();
        let n = q.arrow_count();
        // Node 2a is sigma(a), node 2a+1 is epsilon(a); every edge forces opposite signs.
        let mut adj = vec![Vec::new(); 2 * n];
        let mut link = |x: usize, y: usize| {
            adj[x].push(y);
            adj[y].push(x);
        };
        for v in 0..q.vertex_count() {
            let out = q.outgoing(v);
            for i in 0..out.len() {
                for j in i + 1..out.len() {
                    link(2 * out[i], 2 * out[j]);
                }
            }
            let inc = q.incoming(v);
            for i in 0..inc.len() {
                for j in i + 1..inc.len() {
                    link(2 * inc[i] + 1, 2 * inc[j] + 1);
                }
            }
            for &b in inc {
                for &g in out {
                    if !p.is_relation(&[b, g]) {
                        link(2 * g, 2 * b + 1);
                    }
                }
            }
        }
        let mut colour = vec![0i8; 2 * n];
        for start in 0..2 * n {
            if colour[start] != 0 {
                continue;
            }
            colour[start] = 1;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if colour[y] == 0 {
                        colour[y] = -colour[x];
                        queue.push_back(y);
                    } else if colour[y] == colour[x] {
                        return Err(Error::NotStringAlgebra("no consistent sign functions".into()));
                    }
                }
            }
        }
        Ok(Signs {
            sigma: (0..n).map(|a| colour[2 * a]).collect(),
            eps: (0..n).map(|a| colour[2 * a + 1]).collect(),
        })
    }

    pub fn sigma(&self, l: Letter) -> i8 {
        if l.inverse { self.eps[l.arrow] } else { self.sigma[l.arrow] }
    }

    pub fn eps(&self, l: Letter) -> i8 {
        if l.inverse { self.sigma[l.arrow] } else { self.eps[l.arrow] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    pub(crate) const W3: &str = "algebra W3\nvertices 1 2 3 4\narrow a 1 -> 1\narrow b1 1 -> 2\narrow b2 2 -> 3\narrow b3 3 -> 4\nrelation a a\nrelation b1 b2\n";
    const EX3: &str = "vertices 1 2 3 4\narrow g1 1 -> 2\narrow g2 2 -> 3\narrow al 1 -> 3\narrow be 3 -> 4\nrelation al be\n";

    fn w3() -> AlgebraPresentation {
        parse_presentation(W3).unwrap()
    }

    fn walk(p: &AlgebraPresentation, s: &str) -> Walk {
        Walk::parse(p.quiver(), s).unwrap()
    }

    #[test]
    fn is_string_examples() {
        let p = w3();
        let c = is_string(&p, &walk(&p, "b1 b1^-")).unwrap();
        assert_eq!(c.failure.unwrap().kind, StringFailureKind::NotReduced);
        assert!(is_string(&p, &walk(&p, "a b1")).unwrap().valid);
        let c = is_string(&p, &walk(&p, "b1 b2")).unwrap();
        assert_eq!(c.failure.unwrap(), StringFailure { index: 1, kind: StringFailureKind::ContainsRelation });
        let c = is_string(&p, &walk(&p, "b2^- b1^-")).unwrap();
        assert_eq!(c.failure.unwrap().kind, StringFailureKind::ContainsInverseRelation);
    }

    #[test]
    fn walk_parse_and_format_round_trip() {
        let p = w3();
        for s in ["b1^- a b1", "e(3)", "b2 b3"] {
            assert_eq!(walk(&p, s).format(p.quiver()), s);
        }
        assert!(Walk::parse(p.quiver(), "b1 b3").is_err());
        assert!(Walk::parse(p.quiver(), "zz").is_err());
    }

    #[test]
    fn canonical_forms() {
        let p = w3();
        let q = p.quiver();
        let e = StringWord::parse(&p, "e(2)").unwrap();
        assert_eq!(canonicalize(q, &e), e);
        let x = StringWord::parse(&p, "b2 b3").unwrap();
        let y = StringWord::parse(&p, "b3^- b2^-").unwrap();
        assert_eq!(canonicalize(q, &x), canonicalize(q, &y));
    }

    #[test]
    fn w3_has_twelve_strings() {
        let p = w3();
        let all = enumerate_strings(&p, None).unwrap();
        let names: Vec<String> = all.iter().map(|s| s.format(p.quiver())).collect();
        assert_eq!(
            names,
            vec!["e(1)", "e(2)", "e(3)", "e(4)", "a", "b1", "b2", "b3", "a b1", "a^- b1", "b2 b3", "b1^- a b1"]
        );
    }

    #[test]
    fn max_len_zero_gives_trivial_walks() {
        let p = w3();
        let all = enumerate_strings(&p, Some(0)).unwrap();
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|s| s.is_empty()));
    }

    #[test]
    fn banded_algebra_detected() {
        let p = parse_presentation(EX3).unwrap();
        match enumerate_strings(&p, None) {
            Err(Error::BandFound(b)) => assert_eq!(b, "g1 g2 al^-"),
            other => panic!("unexpected {other:?}"),
        }
        let bands = find_bands(&p, 6);
        assert_eq!(bands.len(), 1);
        assert_eq!(bands[0].format(p.quiver()), "g1 g2 al^-");
    }

    #[test]
    fn w3_has_no_bands() {
        assert!(find_bands(&w3(), 10).is_empty());
    }

    #[test]
    fn flags_of_projective_and_injective_words() {
        let p = w3();
        // P(1) and I(4)
        let p1 = string_flags(&p, &StringWord::parse(&p, "b1^- a b1").unwrap());
        assert!(p1.starts_in_deep && p1.ends_in_deep);
        let i4 = string_flags(&p, &StringWord::parse(&p, "b2 b3").unwrap());
        assert!(i4.starts_on_peak && i4.ends_on_peak);
        let i4r = string_flags(&p, &StringWord::parse(&p, "b3^- b2^-").unwrap());
        assert!(i4r.starts_on_peak && i4r.ends_on_peak);
        let lone = parse_presentation("vertices 1\n").unwrap();
        let f = string_flags(&lone, &StringWord::parse(&lone, "e(1)").unwrap());
        assert!(f.starts_in_deep && f.starts_on_peak && f.ends_in_deep && f.ends_on_peak && f.is_direct && f.is_inverse);
    }

    #[test]
    fn signs_satisfy_constraints() {
        for src in [W3, EX3] {
            let p = parse_presentation(src).unwrap();
            let s = Signs::compute(&p).unwrap();
            let q = p.quiver();
            for b in 0..q.arrow_count() {
                for g in 0..q.arrow_count() {
                    if q.arrow(b).target == q.arrow(g).source && !p.is_relation(&[b, g]) {
                        assert_eq!(s.sigma(Letter::direct(g)), -s.eps(Letter::direct(b)));
                    }
                }
            }
        }
    }
}
