//! Local quiver patterns, arrows M -> τM, 3-cycles, path classes and audits.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::artheory::{ar_sequence_in, knit, tau_orbit, ArContext, ArQuiver, Side};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::modules::{compose_chain, realize, Morphism, StandardKind};
use crate::presentation::{AlgebraPresentation, ArrowId, VertexId};
use crate::radical::{Depth, Radical};
use crate::strings::{enumerate_strings, StringWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PatternId {
    Q1,
    Q2,
    Q3,
    Q4,
    /// Loop with an arrow going out.
    LoopOut,
    /// Loop with an arrow coming in.
    LoopIn,
}

impl PatternId {
    pub fn name(self) -> &'static str {
        match self {
            PatternId::Q1 => "Q1",
            PatternId::Q2 => "Q2",
            PatternId::Q3 => "Q3",
            PatternId::Q4 => "Q4",
            PatternId::LoopOut => "i",
            PatternId::LoopIn => "ii",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatternMatch {
    pub pattern: PatternId,
    /// Pattern vertex or arrow name and what it is bound to.
    pub binding: Vec<(String, String)>,
    pub conditions: Vec<(String, bool)>,
    /// Length of the γ path for Q3 and Q4.
    pub m: Option<usize>,
}

impl PatternMatch {
    pub fn bound(&self, role: &str) -> Option<&str> {
        self.binding.iter().find(|(r, _)| r == role).map(|(_, v)| v.as_str())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pattern": self.pattern.name(),
            "binding": self.binding.iter().map(|(r, v)| json!([r, v])).collect::<Vec<_>>(),
            "conditions": self.conditions.iter().map(|(c, ok)| json!({ "condition": c, "passed": ok })).collect::<Vec<_>>(),
            "m": self.m,
        })
    }
}

/// Whether the path is zero in the algebra.
fn in_ideal(p: &AlgebraPresentation, path: &[ArrowId]) -> bool {
    p.relations().iter().any(|r| path.windows(r.0.len()).any(|w| w == r.0.as_slice()))
}

fn loop_nilpotent(p: &AlgebraPresentation, a: ArrowId) -> bool {
    in_ideal(p, &vec![a; p.max_relation_len().max(2)])
}

struct Builder<'a> {
    p: &'a AlgebraPresentation,
    binding: Vec<(String, String)>,
    conditions: Vec<(String, bool)>,
}

impl<'a> Builder<'a> {
    fn new(p: &'a AlgebraPresentation) -> Self {
        Builder { p, binding: Vec::new(), conditions: Vec::new() }
    }

    fn vertex(&mut self, role: &str, v: VertexId) {
        self.binding.push((role.to_string(), self.p.quiver().vertex_name(v).to_string()));
    }

    fn arrow(&mut self, role: &str, a: ArrowId) {
        self.binding.push((role.to_string(), self.p.quiver().arrow(a).label.clone()));
    }

    fn check(&mut self, text: impl Into<String>, ok: bool) {
        self.conditions.push((text.into(), ok));
    }

    fn path_text(&self, path: &[ArrowId]) -> String {
        path.iter().map(|&a| self.p.quiver().arrow(a).label.as_str()).collect::<Vec<_>>().join(" ")
    }

    fn zero(&mut self, path: &[ArrowId]) {
        let t = format!("{} in I", self.path_text(path));
        let ok = in_ideal(self.p, path);
        self.check(t, ok);
    }

    fn nonzero(&mut self, path: &[ArrowId]) {
        let t = format!("{} not in I", self.path_text(path));
        let ok = !in_ideal(self.p, path);
        self.check(t, ok);
    }

    /// Arrows touching `vs` other than `allowed`.
    fn isolated(&mut self, text: &str, vs: &[VertexId], allowed: &[ArrowId]) {
        let q = self.p.quiver();
        let extra = (0..q.arrow_count())
            .filter(|a| !allowed.contains(a))
            .any(|a| vs.contains(&q.arrow(a).source) || vs.contains(&q.arrow(a).target));
        self.check(text, !extra);
    }

    fn finish(self, pattern: PatternId, m: Option<usize>) -> Option<PatternMatch> {
        if self.conditions.iter().all(|c| c.1) {
            Some(PatternMatch { pattern, binding: self.binding, conditions: self.conditions, m })
        } else {
            None
        }
    }
}

fn loops(p: &AlgebraPresentation) -> Vec<ArrowId> {
    let q = p.quiver();
    (0..q.arrow_count()).filter(|&a| q.arrow(a).source == q.arrow(a).target).collect()
}

/// Full subquiver check: the arrows among `vs` are exactly `arrows`.
fn full(p: &AlgebraPresentation, vs: &[VertexId], arrows: &[ArrowId]) -> bool {
    let q = p.quiver();
    (0..q.arrow_count()).all(|a| {
        let inside = vs.contains(&q.arrow(a).source) && vs.contains(&q.arrow(a).target);
        inside == arrows.contains(&a)
    })
}

fn detect_q1_q2(p: &AlgebraPresentation, out: &mut Vec<PatternMatch>) {
    let q = p.quiver();
    for al in loops(p) {
        let a = q.arrow(al).source;
        // Q1: a -β-> x.
        for &be in q.outgoing(a) {
            let x = q.arrow(be).target;
            if be == al || x == a {
                continue;
            }
            let mut b = Builder::new(p);
            b.vertex("a", a);
            b.vertex("x", x);
            b.arrow("alpha", al);
            b.arrow("beta", be);
            b.check("alpha^n in I", loop_nilpotent(p, al));
            b.zero(&[al, be]);
            let deltas: Vec<ArrowId> = q.outgoing(x).to_vec();
            for &d in &deltas {
                b.zero(&[be, d]);
            }
            let mut allowed = vec![al, be];
            allowed.extend(&deltas);
            b.isolated("no other arrows at a or x", &[a, x], &allowed);
            out.extend(b.finish(PatternId::Q1, None));
        }
        // Q2: x -β-> a.
        for &be in q.incoming(a) {
            let x = q.arrow(be).source;
            if be == al || x == a {
                continue;
            }
            let mut b = Builder::new(p);
            b.vertex("x", x);
            b.vertex("a", a);
            b.arrow("beta", be);
            b.arrow("alpha", al);
            b.check("alpha^n in I", loop_nilpotent(p, al));
            b.zero(&[be, al]);
            let deltas: Vec<ArrowId> = q.incoming(x).to_vec();
            for &d in &deltas {
                b.zero(&[d, be]);
            }
            let mut allowed = vec![al, be];
            allowed.extend(&deltas);
            b.isolated("no other arrows at x or a", &[x, a], &allowed);
            out.extend(b.finish(PatternId::Q2, None));
        }
    }
}

/// Nonzero paths from `from` to `to` through new vertices, first arrow not `skip`.
fn simple_paths(p: &AlgebraPresentation, from: VertexId, to: VertexId, skip: ArrowId, avoid: &[VertexId]) -> Vec<Vec<ArrowId>> {
    let q = p.quiver();
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<ArrowId>, Vec<VertexId>)> = vec![(Vec::new(), vec![from])];
    while let Some((path, seen)) = stack.pop() {
        let v = *seen.last().unwrap();
        for &g in q.outgoing(v) {
            if path.is_empty() && g == skip {
                continue;
            }
            let mut np = path.clone();
            np.push(g);
            if in_ideal(p, &np) {
                continue;
            }
            let t = q.arrow(g).target;
            if t == to {
                out.push(np);
            } else if !seen.contains(&t) && !avoid.contains(&t) {
                let mut ns = seen.clone();
                ns.push(t);
                stack.push((np, ns));
            }
        }
    }
    out.sort();
    out
}

fn path_vertices(p: &AlgebraPresentation, start: VertexId, path: &[ArrowId]) -> Vec<VertexId> {
    let q = p.quiver();
    let mut vs = vec![start];
    vs.extend(path.iter().map(|&a| q.arrow(a).target));
    vs
}

fn detect_q3(p: &AlgebraPresentation, out: &mut Vec<PatternMatch>) {
    let q = p.quiver();
    for be in 0..q.arrow_count() {
        let (bullet, a) = (q.arrow(be).source, q.arrow(be).target);
        if bullet == a {
            continue;
        }
        for &al in q.incoming(bullet) {
            let one = q.arrow(al).source;
            if one == bullet || one == a {
                continue;
            }
            for gamma in simple_paths(p, one, bullet, al, &[a]) {
                let vs = {
                    let mut v = path_vertices(p, one, &gamma);
                    v.push(a);
                    v
                };
                let mut arrows = gamma.clone();
                arrows.extend([al, be]);
                if !full(p, &vs, &arrows) {
                    continue;
                }
                let mut b = Builder::new(p);
                b.vertex("1", one);
                b.vertex("a", a);
                b.arrow("alpha", al);
                b.arrow("beta", be);
                for (i, &g) in gamma.iter().enumerate() {
                    b.arrow(&format!("gamma{}", i + 1), g);
                }
                b.zero(&[al, be]);
                let mut gb = gamma.clone();
                gb.push(be);
                b.nonzero(&gb);
                for &d in q.outgoing(a) {
                    let mut gbd = gb.clone();
                    gbd.push(d);
                    b.zero(&gbd);
                }
                for &l in q.incoming(one) {
                    let mut lg = vec![l];
                    lg.extend(&gamma);
                    b.zero(&lg);
                }
                b.check("a is the end of beta only", q.incoming(a) == [be]);
                out.extend(b.finish(PatternId::Q3, Some(gamma.len())));
            }
        }
    }
}

fn detect_q4(p: &AlgebraPresentation, out: &mut Vec<PatternMatch>) {
    let q = p.quiver();
    for be in 0..q.arrow_count() {
        let (a, bullet) = (q.arrow(be).source, q.arrow(be).target);
        if bullet == a {
            continue;
        }
        for &al in q.outgoing(bullet) {
            let one = q.arrow(al).target;
            if one == bullet || one == a {
                continue;
            }
            for gamma in simple_paths(p, bullet, one, al, &[a]) {
                let mut vs = path_vertices(p, bullet, &gamma);
                vs.push(a);
                let mut arrows = gamma.clone();
                arrows.extend([al, be]);
                if !full(p, &vs, &arrows) {
                    continue;
                }
                let mut b = Builder::new(p);
                b.vertex("a", a);
                b.vertex("1", one);
                b.arrow("beta", be);
                b.arrow("alpha", al);
                for (i, &g) in gamma.iter().enumerate() {
                    b.arrow(&format!("gamma{}", i + 1), g);
                }
                b.zero(&[be, al]);
                let mut bg = vec![be];
                bg.extend(&gamma);
                b.nonzero(&bg);
                for &d in q.incoming(a) {
                    let mut dbg = vec![d];
                    dbg.extend(&bg);
                    b.zero(&dbg);
                }
                for &l in q.outgoing(one) {
                    let mut gl = gamma.clone();
                    gl.push(l);
                    b.zero(&gl);
                }
                b.check("a is the start of beta only", q.outgoing(a) == [be]);
                out.extend(b.finish(PatternId::Q4, Some(gamma.len())));
            }
        }
    }
}

fn detect_loop_patterns(p: &AlgebraPresentation, out: &mut Vec<PatternMatch>) {
    let q = p.quiver();
    for al in loops(p) {
        let one = q.arrow(al).source;
        for &be in q.outgoing(one) {
            let two = q.arrow(be).target;
            if be == al || two == one {
                continue;
            }
            let mut b = Builder::new(p);
            b.vertex("1", one);
            b.vertex("2", two);
            b.arrow("alpha", al);
            b.arrow("beta", be);
            b.zero(&[al, al]);
            b.nonzero(&[al, be]);
            b.check("no other arrows come into 1", q.incoming(one) == [al]);
            for &l in q.outgoing(two) {
                b.zero(&[be, l]);
            }
            b.check("2 is the end of beta only", q.incoming(two) == [be]);
            out.extend(b.finish(PatternId::LoopOut, None));
        }
        for &be in q.incoming(one) {
            let two = q.arrow(be).source;
            if be == al || two == one {
                continue;
            }
            let mut b = Builder::new(p);
            b.vertex("1", one);
            b.vertex("2", two);
            b.arrow("alpha", al);
            b.arrow("beta", be);
            b.zero(&[al, al]);
            b.nonzero(&[be, al]);
            b.check("no other arrows go out of 1", q.outgoing(one) == [al]);
            for &l in q.incoming(two) {
                b.zero(&[l, be]);
            }
            b.check("2 is the start of beta only", q.outgoing(two) == [be]);
            out.extend(b.finish(PatternId::LoopIn, None));
        }
    }
}

pub fn detect_local_patterns(p: &AlgebraPresentation) -> Vec<PatternMatch> {
    let mut out = Vec::new();
    detect_q1_q2(p, &mut out);
    detect_q3(p, &mut out);
    detect_q4(p, &mut out);
    detect_loop_patterns(p, &mut out);
    out.sort_by(|a, b| (a.pattern, &a.binding).cmp(&(b.pattern, &b.binding)));
    out
}

/// Pairs (M, τM) of nodes joined by an arrow M -> τM.
pub fn find_tau_arrows<F: Field>(gamma: &ArQuiver<F>) -> Vec<(usize, usize)> {
    (0..gamma.nodes().len())
        .filter_map(|m| gamma.tau(m).map(|t| (m, t)))
        .filter(|&(m, t)| !gamma.arrows_between(m, t).is_empty())
        .collect()
}

/// Checks candidates locally: M is a middle term of the sequence ending at τM.
pub fn find_tau_arrows_among<F: Field>(p: &AlgebraPresentation, candidates: &[StringWord]) -> Result<Vec<(StringWord, StringWord)>> {
    let ctx = ArContext::new(p)?;
    let q = p.quiver();
    let mut out = Vec::new();
    for m in candidates {
        let m = crate::strings::canonicalize(q, m);
        if ctx.is_projective(&m) {
            continue;
        }
        let t = ctx.tau_word(&m)?;
        if ctx.is_projective(&t) {
            continue;
        }
        let seq = ar_sequence_in::<F>(&ctx, &t, Side::EndingAt)?;
        if seq.middle.iter().any(|x| *x.word() == m) {
            out.push((m, t));
        }
    }
    Ok(out)
}

/// Candidate modules from pattern matches, following the corollary to the pattern proposition.
pub fn pattern_candidates(p: &AlgebraPresentation, matches: &[PatternMatch]) -> Result<Vec<StringWord>> {
    let ctx = ArContext::new(p)?;
    let q = p.quiver();
    let mut out = Vec::new();
    let vertex = |m: &PatternMatch, role: &str| -> Result<VertexId> { q.vertex(m.bound(role).expect("bound role")) };
    for m in matches {
        let (inj, proj) = match m.pattern {
            PatternId::Q1 => (Some(vertex(m, "x")?), Some(vertex(m, "a")?)),
            PatternId::Q2 => (Some(vertex(m, "a")?), Some(vertex(m, "x")?)),
            PatternId::Q3 => (Some(vertex(m, "a")?), None),
            PatternId::Q4 => (None, Some(vertex(m, "a")?)),
            PatternId::LoopOut | PatternId::LoopIn => (None, None),
        };
        if let Some(v) = inj {
            out.push(ctx.injective_word(v).clone());
        }
        if let Some(v) = proj {
            let pw = ctx.projective_word(v);
            if !ctx.is_injective(pw) {
                out.push(ctx.tau_inverse_word(pw)?);
            }
        }
    }
    Ok(out)
}

/// Directed 3-cycles of Γ, each rotated to start at its smallest node.
pub fn find_three_cycles<F: Field>(gamma: &ArQuiver<F>) -> Vec<[usize; 3]> {
    let mut set = BTreeSet::new();
    for a in gamma.arrows() {
        for b in gamma.arrows().iter().filter(|b| b.source == a.target) {
            for c in gamma.arrows().iter().filter(|c| c.source == b.target && c.target == a.source) {
                let cyc = [a.source, b.source, c.source];
                let k = (0..3).min_by_key(|&i| cyc[i]).unwrap();
                set.insert([cyc[k], cyc[(k + 1) % 3], cyc[(k + 2) % 3]]);
            }
        }
    }
    set.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathClass {
    pub sectional: bool,
    pub presectional: bool,
    pub left_almost_presectional: bool,
    pub right_almost_presectional: bool,
}

fn presectional<F: Field>(gamma: &ArQuiver<F>, path: &[usize]) -> bool {
    (1..path.len().saturating_sub(1)).all(|i| {
        gamma.tau(path[i + 1]) != Some(path[i - 1]) || gamma.arrows_between(path[i - 1], path[i]).len() >= 2
    })
}

pub fn path_class<F: Field>(gamma: &ArQuiver<F>, path: &[usize]) -> Result<PathClass> {
    for w in path.windows(2) {
        if gamma.arrows_between(w[0], w[1]).is_empty() {
            return Err(Error::NotAPath(format!("no arrow {} -> {}", gamma.label(w[0]), gamma.label(w[1]))));
        }
    }
    let n = path.len();
    let sectional = (2..n).all(|j| gamma.tau(path[j]) != Some(path[j - 2]));
    let left = n >= 3 && presectional(gamma, &path[..n - 1]) && gamma.tau(path[n - 1]) == Some(path[n - 3]);
    let right = n >= 3 && presectional(gamma, &path[1..]) && gamma.tau(path[2]) == Some(path[0]);
    Ok(PathClass {
        sectional,
        presectional: presectional(gamma, path),
        left_almost_presectional: left,
        right_almost_presectional: right,
    })
}

/// Sum of random multiples of a basis of ℜ^2(X, Y).
fn perturbation<F: Field>(rad: &Radical<'_, F>, x: usize, y: usize, rng: &mut ChaCha8Rng) -> Morphism<F> {
    let g = rad.gamma();
    let (sx, sy) = (g.node(x).module.rep().dims(), g.node(y).module.rep().dims());
    let mut out = Morphism::zero(sx, sy);
    for v in rad.layer(x, y, 2).basis() {
        let c: i64 = rng.gen_range(-3..=3);
        if c != 0 {
            let m = Morphism::unflatten(sx, sy, v).scale(&F::from_i64(c));
            out = out.add(&m).expect("same shape");
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct TripleSample {
    pub composite: Depth,
    pub first_pair: Depth,
    pub second_pair: Depth,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TripleReport {
    pub path: [usize; 4],
    pub samples: Vec<TripleSample>,
}

impl TripleReport {
    /// Composite exactly 6 while both pairs stay at most 2.
    pub fn counterexamples(&self) -> Vec<usize> {
        (0..self.samples.len())
            .filter(|&i| {
                let s = &self.samples[i];
                s.composite.is_exactly(6) && !s.first_pair.at_least(3) && !s.second_pair.at_least(3)
            })
            .collect()
    }

    /// Composite depth 4 or 5.
    pub fn corollary_violations(&self) -> Vec<usize> {
        (0..self.samples.len())
            .filter(|&i| {
                let c = self.samples[i].composite;
                c.at_least(4) && !c.at_least(6)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditResult {
    pub name: String,
    pub passed: bool,
    pub details: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub algebra: String,
    pub samples: usize,
    pub seed: u64,
    pub audits: Vec<AuditResult>,
    pub triples: Vec<TripleReport>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.audits.iter().all(|a| a.passed)
    }

    pub fn audit(&self, name: &str) -> Option<&AuditResult> {
        self.audits.iter().find(|a| a.name == name)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "algebra": self.algebra,
            "samples": self.samples,
            "seed": self.seed,
            "triples": self.triples.len(),
            "passed": self.passed(),
            "audits": self.audits.iter().map(|a| json!({ "name": a.name, "passed": a.passed, "details": a.details })).collect::<Vec<_>>(),
        })
    }
}

/// Samples irreducible morphisms along every length-3 path of Γ.
pub fn sample_triples<F: Field>(rad: &Radical<'_, F>, samples: usize, seed: u64) -> Result<Vec<TripleReport>> {
    let gamma = rad.gamma();
    let arrows = gamma.arrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for a in arrows {
        for b in arrows.iter().filter(|b| b.source == a.target) {
            for c in arrows.iter().filter(|c| c.source == b.target) {
                let nodes = [a.source, a.target, b.target, c.target];
                let mut report = TripleReport { path: nodes, samples: Vec::with_capacity(samples) };
                for s in 0..samples {
                    let mut h = [a.map.clone(), b.map.clone(), c.map.clone()];
                    if s > 0 {
                        for (i, hi) in h.iter_mut().enumerate() {
                            *hi = hi.add(&perturbation(rad, nodes[i], nodes[i + 1], &mut rng))?;
                        }
                    }
                    let h21 = h[1].after(&h[0])?;
                    let h32 = h[2].after(&h[1])?;
                    let h321 = h[2].after(&h21)?;
                    report.samples.push(TripleSample {
                        composite: rad.depth(nodes[0], nodes[3], &h321)?,
                        first_pair: rad.depth(nodes[0], nodes[2], &h21)?,
                        second_pair: rad.depth(nodes[1], nodes[3], &h32)?,
                    });
                }
                out.push(report);
            }
        }
    }
    Ok(out)
}

/// Paths X_1 -> ... -> X_{n+1} of Γ that are left almost presectional with
/// f_{n-1} ... f_1 outside ℜ^n, for n in `lengths`.
pub fn composn_configurations<F: Field>(rad: &Radical<'_, F>, lengths: std::ops::RangeInclusive<usize>) -> Result<Vec<Vec<usize>>> {
    let gamma = rad.gamma();
    let mut out = Vec::new();
    let mut paths: Vec<Vec<usize>> = (0..gamma.nodes().len()).map(|x| vec![x]).collect();
    for n in 1..=*lengths.end() {
        let mut next = Vec::new();
        for p in &paths {
            let mut succ = gamma.successors(*p.last().unwrap());
            succ.sort();
            succ.dedup();
            for y in succ {
                let mut e = p.clone();
                e.push(y);
                next.push(e);
            }
        }
        paths = next;
        if !lengths.contains(&n) {
            continue;
        }
        for p in &paths {
            if !path_class(gamma, p)?.left_almost_presectional {
                continue;
            }
            let f = compose_chain(&chain_maps(gamma, &p[..n]))?;
            if !rad.depth(p[0], p[n - 1], &f)?.at_least(n) {
                out.push(p.clone());
            }
        }
    }
    Ok(out)
}

fn chain_maps<F: Field>(gamma: &ArQuiver<F>, nodes: &[usize]) -> Vec<Morphism<F>> {
    nodes.windows(2).map(|w| gamma.arrows()[gamma.arrows_between(w[0], w[1])[0]].map.clone()).collect()
}

/// Sampled chains h_i = f_i + ℜ^2 along a configuration; returns the depths of h_n ... h_1.
fn sample_chain<F: Field>(rad: &Radical<'_, F>, nodes: &[usize], samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Depth>> {
    let base = chain_maps(rad.gamma(), nodes);
    let mut out = Vec::with_capacity(samples);
    for s in 0..samples {
        let mut h = base.clone();
        if s > 0 {
            for (i, hi) in h.iter_mut().enumerate() {
                *hi = hi.add(&perturbation(rad, nodes[i], nodes[i + 1], rng))?;
            }
        }
        out.push(rad.depth(nodes[0], *nodes.last().unwrap(), &compose_chain(&h)?)?);
    }
    Ok(out)
}

fn path_json<F: Field>(gamma: &ArQuiver<F>, nodes: &[usize]) -> Value {
    json!(nodes.iter().map(|&n| gamma.label(n)).collect::<Vec<_>>())
}

/// The τ-orbit of M returns to M, stopping at projectives.
fn tau_period<F: Field>(gamma: &ArQuiver<F>, m: usize) -> Option<usize> {
    let mut cur = m;
    for k in 1..=gamma.nodes().len() {
        cur = gamma.tau(cur)?;
        if cur == m {
            return Some(k);
        }
    }
    None
}

pub fn audit_theorems<F: Field>(p: &AlgebraPresentation, samples: usize, seed: u64) -> Result<AuditReport> {
    enumerate_strings(p, None)?;
    let gamma = knit::<F>(p)?;
    let rad = Radical::new(&gamma);
    let triples = sample_triples(&rad, samples, seed)?;
    let mut audits = Vec::new();

    let counter: Vec<Value> = triples
        .iter()
        .flat_map(|t| t.counterexamples().into_iter().map(move |i| (t, i)))
        .map(|(t, i)| json!({ "path": path_json(&gamma, &t.path), "sample": i }))
        .collect();
    audits.push(AuditResult {
        name: "A".into(),
        passed: counter.is_empty(),
        details: json!({ "triples": triples.len(), "counterexamples": counter }),
    });

    let violations: Vec<Value> = triples
        .iter()
        .flat_map(|t| t.corollary_violations().into_iter().map(move |i| (t, i)))
        .map(|(t, i)| {
            let s = &t.samples[i];
            json!({
                "path": path_json(&gamma, &t.path),
                "sample": i,
                "composite": s.composite.to_json(),
                "pairs": [s.first_pair.to_json(), s.second_pair.to_json()],
            })
        })
        .collect();
    audits.push(AuditResult { name: "B".into(), passed: violations.is_empty(), details: json!({ "violations": violations }) });

    let cycles = find_three_cycles(&gamma);
    let mut bad = Vec::new();
    for cyc in &cycles {
        let maps: Vec<&Morphism<F>> = (0..3)
            .map(|i| &gamma.arrows()[gamma.arrows_between(cyc[i], cyc[(i + 1) % 3])[0]].map)
            .collect();
        if !(maps.iter().any(|m| m.is_mono()) && maps.iter().any(|m| m.is_epi())) {
            bad.push(path_json(&gamma, cyc));
        }
    }
    audits.push(AuditResult {
        name: "C".into(),
        passed: bad.is_empty(),
        details: json!({ "cycles": cycles.iter().map(|c| path_json(&gamma, c)).collect::<Vec<_>>(), "failures": bad }),
    });

    let tau_arrows = find_tau_arrows(&gamma);
    audits.push(AuditResult {
        name: "D".into(),
        passed: cycles.is_empty() == tau_arrows.is_empty(),
        details: json!({
            "cycles": cycles.len(),
            "tauArrows": tau_arrows.iter().map(|&(m, t)| json!([gamma.label(m), gamma.label(t)])).collect::<Vec<_>>(),
        }),
    });

    let configs = composn_configurations(&rad, 3..=4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut composn_bad = Vec::new();
    let mut premises = 0;
    for c in &configs {
        let n = c.len() - 1;
        for (i, d) in sample_chain(&rad, c, samples, &mut rng)?.into_iter().enumerate() {
            let premise = d != Depth::Zero && d.at_least(n + 1);
            premises += usize::from(premise);
            if premise && !d.at_least(n + 3) {
                composn_bad.push(json!({ "path": path_json(&gamma, c), "sample": i, "depth": d.to_json() }));
            }
        }
    }
    audits.push(AuditResult {
        name: "E".into(),
        passed: composn_bad.is_empty(),
        details: json!({ "configurations": configs.iter().map(|c| path_json(&gamma, c)).collect::<Vec<_>>(), "premises": premises, "violations": composn_bad }),
    });

    let mut periods = Vec::new();
    let mut period_ok = true;
    for &(m, _) in &tau_arrows {
        if tau_period(&gamma, m).is_none() {
            continue;
        }
        let orbit = tau_orbit(p, &gamma.node(m).module, 3)?;
        let back = orbit.modules.len() == 4 && orbit.modules[3].word() == gamma.node(m).word();
        period_ok &= back;
        periods.push(json!({ "module": gamma.label(m), "returnsInThree": back }));
    }
    audits.push(AuditResult { name: "tau-period".into(), passed: period_ok, details: json!({ "stable": periods }) });

    Ok(AuditReport { algebra: p.name().to_string(), samples, seed, audits, triples })
}

/// The standard module of a kind at a vertex, as a node of Γ.
pub fn standard_node<F: Field>(gamma: &ArQuiver<F>, v: VertexId, kind: StandardKind) -> Result<usize> {
    let p = gamma.presentation();
    let w = crate::modules::standard_word(p, v, kind)?;
    gamma.find(&w).ok_or_else(|| Error::NodeNotFound(w.format(p.quiver())))
}

/// A realized module for a word, checked against the presentation.
pub fn module_of<F: Field>(p: &AlgebraPresentation, text: &str) -> Result<crate::modules::StringModule<F>> {
    realize(p, &StringWord::parse(p, text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;
    use crate::presentation::parse_presentation;

    const W3: &str = "vertices 1 2 3 4\narrow a 1 -> 1\narrow b1 1 -> 2\narrow b2 2 -> 3\narrow b3 3 -> 4\nrelation a a\nrelation b1 b2\n";
    const EX3: &str = "vertices 1 2 3 4\narrow g1 1 -> 2\narrow g2 2 -> 3\narrow al 1 -> 3\narrow be 3 -> 4\nrelation al be\n";
    const LOOP_IN: &str = "vertices 1 2\narrow al 1 -> 1\narrow be 2 -> 1\nrelation al al\n";

    #[test]
    fn example_algebra_has_q3() {
        let p = parse_presentation(EX3).unwrap();
        let found = detect_local_patterns(&p);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].pattern, PatternId::Q3);
        assert_eq!(found[0].m, Some(2));
        assert_eq!(found[0].bound("a"), Some("4"));
    }

    #[test]
    fn loop_patterns() {
        let p = parse_presentation("vertices a x\narrow al a -> a\narrow be a -> x\nrelation al al\nrelation al be\n").unwrap();
        let found: Vec<PatternId> = detect_local_patterns(&p).iter().map(|m| m.pattern).collect();
        assert_eq!(found, vec![PatternId::Q1]);
        let p = parse_presentation(LOOP_IN).unwrap();
        let found: Vec<PatternId> = detect_local_patterns(&p).iter().map(|m| m.pattern).collect();
        assert_eq!(found, vec![PatternId::LoopIn]);
        let p = parse_presentation("vertices 1 2 3\narrow a 1 -> 2\narrow b 2 -> 3\n").unwrap();
        assert!(detect_local_patterns(&p).is_empty());
    }

    #[test]
    fn w3_cycles_and_tau_arrows() {
        let p = parse_presentation(W3).unwrap();
        let g = knit::<Rational>(&p).unwrap();
        let (p1, m, tm) = (g.find_text("b1^- a b1").unwrap(), g.find_text("a^- b1").unwrap(), g.find_text("b1").unwrap());
        assert!(find_tau_arrows(&g).contains(&(m, tm)));
        let cycles = find_three_cycles(&g);
        let mut want = [p1, m, tm];
        let k = (0..3).min_by_key(|&i| want[i]).unwrap();
        want.rotate_left(k);
        assert!(cycles.contains(&want));
        let path = [g.find_text("e(4)").unwrap(), g.find_text("b3").unwrap(), g.find_text("b2 b3").unwrap()];
        assert!(path_class(&g, &path).unwrap().sectional);
        let back = [g.find_text("e(4)").unwrap(), g.find_text("b3").unwrap(), g.find_text("e(3)").unwrap()];
        let c = path_class(&g, &back).unwrap();
        assert!(!c.sectional);
        assert!(path_class(&g, &[path[0], path[2]]).is_err());
    }

    #[test]
    fn example_algebra_tau_arrow() {
        let p = parse_presentation(EX3).unwrap();
        let cands = pattern_candidates(&p, &detect_local_patterns(&p)).unwrap();
        let pairs = find_tau_arrows_among::<Rational>(&p, &cands).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].0.format(p.quiver()), "g1 g2 be");
    }

    #[test]
    fn hereditary_has_no_tau_arrows() {
        let p = parse_presentation("vertices 1 2\narrow a 1 -> 2\n").unwrap();
        let g = knit::<Rational>(&p).unwrap();
        assert!(find_tau_arrows(&g).is_empty());
        assert!(find_three_cycles(&g).is_empty());
    }

    #[test]
    fn w3_audits_pass() {
        let p = parse_presentation(W3).unwrap();
        let r = audit_theorems::<Rational>(&p, 4, 7).unwrap();
        for a in &r.audits {
            assert!(a.passed, "{} {}", a.name, a.details);
        }
        let again = audit_theorems::<Rational>(&p, 4, 7).unwrap();
        assert_eq!(r.to_json().to_string(), again.to_json().to_string());
    }

    #[test]
    fn loop_in_period_three() {
        let p = parse_presentation(LOOP_IN).unwrap();
        let m = module_of::<Rational>(&p, "be").unwrap();
        let orbit = tau_orbit(&p, &m, 3).unwrap();
        assert_eq!(orbit.modules.len(), 4);
        assert_eq!(orbit.modules[3].word(), m.word());
        assert_ne!(orbit.modules[1].word(), m.word());
    }
}
