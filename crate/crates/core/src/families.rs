//! The W, U and V families and their witness chains.

use std::fmt;

use serde_json::{json, Value};

use crate::artheory::{knit, ArQuiver};
use crate::configurations::{path_class, standard_node};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::modules::{compose_chain, standard_word, Morphism, StandardKind};
use crate::presentation::{parse_presentation, AlgebraPresentation};
use crate::radical::{Depth, Radical};
use crate::strings::StringWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    W,
    U,
    V,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::W => "W",
            Family::U => "U",
            Family::V => "V",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "W" | "w" => Ok(Family::W),
            "U" | "u" => Ok(Family::U),
            "V" | "v" => Ok(Family::V),
            _ => Err(Error::OutOfRange(format!("unknown family `{s}`"))),
        }
    }
}

/// A member of a family. For U the parameters (m, n) give U(m, n-1); for V
/// they give V(m, n) literally.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub m: usize,
    pub n: usize,
    pub presentation: AlgebraPresentation,
}

impl FamilySpec {
    /// Number of morphisms in the witness chain.
    pub fn chain_len(&self) -> usize {
        match self.family {
            Family::W | Family::U => self.n,
            Family::V => self.n + 2,
        }
    }

    pub fn expected_depth(&self) -> usize {
        let n = self.chain_len();
        match self.family {
            Family::W => n + 3,
            Family::U => n + 2 * self.m,
            Family::V => n + 2 * self.m + 1,
        }
    }

    pub fn source(&self) -> String {
        self.presentation.serialize()
    }
}

fn line_arrows(text: &mut String, prefix: &str, first: &str, inner: &[String], last: &str) {
    let mut vs = vec![first.to_string()];
    vs.extend(inner.iter().cloned());
    vs.push(last.to_string());
    for i in 0..vs.len() - 1 {
        text.push_str(&format!("arrow {prefix}{} {} -> {}\n", i + 1, vs[i], vs[i + 1]));
    }
}

pub fn make_family(family: Family, m: usize, n: usize) -> Result<FamilySpec> {
    let text = match family {
        Family::W => {
            if n < 2 {
                return Err(Error::OutOfRange(format!("W(n) needs n >= 2, got {n}")));
            }
            let mut t = format!("algebra W({n})\nvertices");
            for v in 1..=n + 1 {
                t.push_str(&format!(" {v}"));
            }
            t.push_str("\narrow a 1 -> 1\n");
            for i in 1..=n {
                t.push_str(&format!("arrow b{i} {i} -> {}\n", i + 1));
            }
            t.push_str("relation a a\nrelation b1 b2\n");
            t
        }
        Family::U | Family::V => {
            let lower = match family {
                Family::U => {
                    if m < 2 || n < 2 {
                        return Err(Error::OutOfRange(format!("U needs m, n >= 2, got ({m}, {n})")));
                    }
                    n - 1
                }
                _ => {
                    if m < 2 || n < 1 {
                        return Err(Error::OutOfRange(format!("V needs m >= 2 and n >= 1, got ({m}, {n})")));
                    }
                    n
                }
            };
            let upper: Vec<String> = (2..=m).map(|j| format!("a{j}")).collect();
            let below: Vec<String> = (2..=lower).map(|i| format!("b{i}")).collect();
            let name = match family {
                Family::U => format!("U({m},{lower})"),
                _ => format!("V({m},{lower})"),
            };
            let mut t = format!("algebra {name}\nvertices 1");
            for v in upper.iter().chain(std::iter::once(&"x".to_string())).chain(below.iter()) {
                t.push_str(&format!(" {v}"));
            }
            if family == Family::V {
                t.push_str(" w");
            }
            t.push('\n');
            line_arrows(&mut t, "g", "1", &upper, "x");
            line_arrows(&mut t, "b", "1", &below, "x");
            if family == Family::V {
                t.push_str(&format!("arrow a a{m} -> w\n"));
            }
            t.push_str(&format!("relation g{} g{m}\n", m - 1));
            t
        }
    };
    let presentation = parse_presentation(&text)?;
    if !presentation.is_string_algebra() {
        return Err(Error::Inconsistency(format!("{} is not a string algebra", presentation.name())));
    }
    Ok(FamilySpec { family, m, n, presentation })
}

/// A verified chain h_1, ..., h_n of irreducible morphisms.
#[derive(Clone, Debug)]
pub struct FamilyWitness<F> {
    pub spec: FamilySpec,
    pub gamma: ArQuiver<F>,
    /// X_1, ..., X_{n+1}.
    pub nodes: Vec<usize>,
    pub chain: Vec<Morphism<F>>,
    pub paths: Vec<(String, Vec<usize>)>,
    pub modules: Vec<(String, usize)>,
    pub checks: Vec<(String, bool)>,
    pub expected_depth: usize,
    pub composite_depth: Depth,
    pub prefix_depth: Depth,
    pub suffix_depth: Depth,
}

impl<F: Field> FamilyWitness<F> {
    pub fn path(&self, name: &str) -> Option<&[usize]> {
        self.paths.iter().find(|(n, _)| n == name).map(|(_, p)| p.as_slice())
    }

    pub fn module(&self, name: &str) -> Option<usize> {
        self.modules.iter().find(|(n, _)| n == name).map(|&(_, k)| k)
    }

    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|(n, _)| n == name).map(|&(_, ok)| ok)
    }

    pub fn verified(&self) -> bool {
        self.composite_depth == Depth::Layer(self.expected_depth) && self.checks.iter().all(|c| c.1)
    }

    pub fn to_json(&self) -> Value {
        let g = &self.gamma;
        let labels = |ns: &[usize]| ns.iter().map(|&k| g.label(k)).collect::<Vec<_>>();
        json!({
            "algebra": self.spec.presentation.name(),
            "expectedDepth": self.expected_depth,
            "verified": self.verified(),
            "compositeDepth": self.composite_depth.to_json(),
            "prefixDepth": self.prefix_depth.to_json(),
            "suffixDepth": self.suffix_depth.to_json(),
            "modules": labels(&self.nodes),
            "chain": self.chain.iter().map(|h| h.to_json(&self.spec.presentation)).collect::<Vec<_>>(),
            "paths": self.paths.iter().map(|(n, p)| json!({ "name": n, "nodes": labels(p), "length": p.len().saturating_sub(1) })).collect::<Vec<_>>(),
            "distinguished": self.modules.iter().map(|(n, k)| json!({ "name": n, "word": g.label(*k) })).collect::<Vec<_>>(),
            "checks": self.checks.iter().map(|(n, ok)| json!({ "check": n, "passed": ok })).collect::<Vec<_>>(),
        })
    }
}

fn arrow_map<F: Field>(g: &ArQuiver<F>, x: usize, y: usize) -> Result<Morphism<F>> {
    let k = *g
        .arrows_between(x, y)
        .first()
        .ok_or_else(|| Error::NotAPath(format!("no arrow {} -> {}", g.label(x), g.label(y))))?;
    Ok(g.arrows()[k].map.clone())
}

fn path_map<F: Field>(g: &ArQuiver<F>, nodes: &[usize]) -> Result<Morphism<F>> {
    let maps = nodes.windows(2).map(|w| arrow_map(g, w[0], w[1])).collect::<Result<Vec<_>>>()?;
    compose_chain(&maps)
}

fn is_sectional<F: Field>(g: &ArQuiver<F>, nodes: &[usize]) -> bool {
    let n = nodes.len();
    n < 3 || g.tau(nodes[n - 1]) != Some(nodes[n - 3])
}

/// Extensions of `prefix` by exactly `len` arrows ending at `to`, keeping the
/// whole path sectional, in node order.
fn sectional_extensions<F: Field>(g: &ArQuiver<F>, prefix: &[usize], to: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut path = prefix.to_vec();
    fn go<F: Field>(g: &ArQuiver<F>, path: &mut Vec<usize>, to: usize, left: usize, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            if *path.last().unwrap() == to {
                out.push(path.clone());
            }
            return;
        }
        let mut next = g.successors(*path.last().unwrap());
        next.sort();
        next.dedup();
        for y in next {
            path.push(y);
            if is_sectional(g, path) {
                go(g, path, to, left - 1, out);
            }
            path.pop();
        }
    }
    go(g, &mut path, to, len, &mut out);
    out
}

/// Closed arrow paths of length `len` at `x`.
fn cycles_at<F: Field>(g: &ArQuiver<F>, x: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![vec![x]];
    while let Some(path) = stack.pop() {
        if path.len() == len + 1 {
            if *path.last().unwrap() == x {
                out.push(path);
            }
            continue;
        }
        let mut next = g.successors(*path.last().unwrap());
        next.sort();
        next.dedup();
        for y in next.into_iter().rev() {
            let mut p = path.clone();
            p.push(y);
            stack.push(p);
        }
    }
    out
}

fn node<F: Field>(g: &ArQuiver<F>, text: &str) -> Result<usize> {
    g.find_text(text)
}

fn join(parts: &[String]) -> String {
    parts.join(" ")
}

struct Chain<F> {
    nodes: Vec<usize>,
    chain: Vec<Morphism<F>>,
}

struct Depths {
    composite: Depth,
    prefix: Depth,
    suffix: Depth,
    irreducible: bool,
}

fn measure<F: Field>(rad: &Radical<'_, F>, c: &Chain<F>) -> Result<Depths> {
    let n = c.chain.len();
    let x = &c.nodes;
    let composite = rad.depth(x[0], x[n], &compose_chain(&c.chain)?)?;
    let prefix = rad.depth(x[0], x[n - 1], &compose_chain(&c.chain[..n - 1])?)?;
    let suffix = rad.depth(x[1], x[n], &compose_chain(&c.chain[1..])?)?;
    let mut irreducible = true;
    for (i, h) in c.chain.iter().enumerate() {
        irreducible &= rad.depth(x[i], x[i + 1], h)? == Depth::Layer(1);
    }
    Ok(Depths { composite, prefix, suffix, irreducible })
}

/// Builds and verifies the witness chain of a family member.
pub fn witness<F: Field>(spec: &FamilySpec) -> Result<FamilyWitness<F>> {
    let gamma = knit::<F>(&spec.presentation)?;
    let mut paths = Vec::new();
    let mut modules = Vec::new();
    let mut checks = Vec::new();
    let (c, d) = {
        let rad = Radical::new(&gamma);
        let c = match spec.family {
            Family::W => w_chain(spec, &gamma, &rad, &mut paths, &mut modules)?,
            Family::U => u_chain(spec, &gamma, &mut paths, &mut modules, &mut checks)?,
            Family::V => v_chain(spec, &gamma, &rad, &mut paths)?,
        };
        let d = measure(&rad, &c)?;
        (c, d)
    };
    let n = spec.chain_len();
    checks.push(("irreducible".to_string(), d.irreducible));
    if spec.family != Family::W {
        checks.push(("prefix below n".to_string(), !d.prefix.at_least(n)));
        checks.push(("suffix below n".to_string(), !d.suffix.at_least(n)));
    }
    let w = FamilyWitness {
        spec: spec.clone(),
        gamma,
        nodes: c.nodes,
        chain: c.chain,
        paths,
        modules,
        checks,
        expected_depth: spec.expected_depth(),
        composite_depth: d.composite,
        prefix_depth: d.prefix,
        suffix_depth: d.suffix,
    };
    if !w.verified() {
        let failed: Vec<&str> = w.checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
        return Err(Error::VerificationFailed(format!(
            "{}: composite depth {} (expected {}), failed checks [{}]",
            spec.presentation.name(),
            w.composite_depth,
            w.expected_depth,
            failed.join(", ")
        )));
    }
    Ok(w)
}

/// X_1 ~> S(2) -> P(1) -> I(2) with the S(2) -> P(1) map perturbed by the 3-cycle at P(1).
fn w_chain<F: Field>(
    spec: &FamilySpec,
    g: &ArQuiver<F>,
    rad: &Radical<'_, F>,
    paths: &mut Vec<(String, Vec<usize>)>,
    modules: &mut Vec<(String, usize)>,
) -> Result<Chain<F>> {
    let n = spec.n;
    let p = &spec.presentation;
    let v = |name: &str| p.quiver().vertex(name);
    let s2 = standard_node(g, v("2")?, StandardKind::Simple)?;
    let p1 = standard_node(g, v("1")?, StandardKind::Projective)?;
    let i2 = standard_node(g, v("2")?, StandardKind::Injective)?;
    let f = arrow_map(g, s2, p1)?;
    let f_last = arrow_map(g, p1, i2)?;
    for cycle in cycles_at(g, p1, 3) {
        let h = f.add(&path_map(g, &cycle)?.after(&f)?)?;
        let mut starts: Vec<usize> = (0..g.nodes().len()).collect();
        starts.sort();
        for x1 in starts {
            for prefix in sectional_extensions(g, &[x1], s2, n - 2) {
                let mut chain = Vec::new();
                for w in prefix.windows(2) {
                    chain.push(arrow_map(g, w[0], w[1])?);
                }
                chain.push(h.clone());
                chain.push(f_last.clone());
                let mut nodes = prefix.clone();
                nodes.extend([p1, i2]);
                let c = Chain { nodes, chain };
                if measure(rad, &c)?.composite == Depth::Layer(spec.expected_depth()) {
                    paths.push(("prefix".into(), prefix));
                    paths.push(("cycle".into(), cycle));
                    modules.extend([("S2".to_string(), s2), ("P1".to_string(), p1), ("I2".to_string(), i2)]);
                    return Ok(c);
                }
            }
        }
    }
    Err(Error::VerificationFailed(format!("no witness chain found in {}", p.name())))
}

/// P ~> L, then f: L -> N, with h_{n-1} = f_{n-1} + ρ f_{n-1} for the cycle ρ: L ~> S ~> L.
fn u_chain<F: Field>(
    spec: &FamilySpec,
    g: &ArQuiver<F>,
    paths: &mut Vec<(String, Vec<usize>)>,
    modules: &mut Vec<(String, usize)>,
    checks: &mut Vec<(String, bool)>,
) -> Result<Chain<F>> {
    let (m, n) = (spec.m, spec.n);
    let p = &spec.presentation;
    let q = p.quiver();
    let am = q.vertex(&format!("a{m}"))?;
    let x = q.vertex("x")?;
    let gbar1: Vec<String> = (1..m).map(|j| format!("g{j}")).collect();
    let binv = |k: usize| -> Vec<String> { (1..=k).rev().map(|i| format!("b{i}^-")).collect() };
    let mut l_text = vec![format!("g{m}")];
    l_text.extend(binv(n - 1));
    l_text.extend(gbar1.iter().cloned());
    let mut n_text = binv(n - 2);
    n_text.extend(gbar1.iter().cloned());
    let mut d1_text = vec![format!("g{m}")];
    d1_text.extend(binv(n - 1));

    let pm = standard_node(g, am, StandardKind::Projective)?;
    let sm = standard_node(g, am, StandardKind::Simple)?;
    let im = standard_node(g, am, StandardKind::Injective)?;
    let l = node(g, &join(&l_text))?;
    let nn = node(g, &join(&n_text))?;
    let d1 = StringWord::parse(p, &join(&d1_text))?;
    let ix = standard_word(p, x, StandardKind::Injective)?;
    checks.push(("M(D1) = I(x)".into(), crate::strings::canonicalize(q, &d1) == ix));

    let mut full = None;
    'search: for phi in sectional_extensions(g, &[pm], l, n - 1) {
        for r1 in sectional_extensions(g, &phi, sm, m) {
            for r2 in sectional_extensions(g, &r1, l, m) {
                for to_n in sectional_extensions(g, &r2, nn, 1) {
                    for len in 0..=g.nodes().len() {
                        if let Some(path) = sectional_extensions(g, &to_n, im, len).into_iter().next() {
                            full = Some((phi.clone(), path));
                            break 'search;
                        }
                    }
                }
            }
        }
    }
    let (phi, full) = full.ok_or_else(|| Error::VerificationFailed("no sectional path P ~> L ~> S ~> L -> N ~> I".into()))?;
    let rho = full[n - 1..n + 2 * m].to_vec();
    checks.push(("sectional".into(), path_class(g, &full)?.sectional));
    checks.push(("rho has length 2m".into(), rho.len() - 1 == 2 * m));
    checks.push(("phi has length n-1".into(), phi.len() - 1 == n - 1));

    let mut chain = Vec::new();
    for (i, w) in phi.windows(2).enumerate() {
        let f = arrow_map(g, w[0], w[1])?;
        if i + 2 == phi.len() {
            chain.push(f.add(&path_map(g, &rho)?.after(&f)?)?);
        } else {
            chain.push(f);
        }
    }
    chain.push(arrow_map(g, l, nn)?);
    let mut nodes = phi.clone();
    nodes.push(nn);
    paths.push(("phi".into(), phi.clone()));
    paths.push(("delta".into(), phi));
    paths.push(("rho".into(), rho));
    paths.push(("sectional".into(), full));
    modules.extend([
        ("P".to_string(), pm),
        ("S".to_string(), sm),
        ("I".to_string(), im),
        ("L".to_string(), l),
        ("N".to_string(), nn),
    ]);
    Ok(Chain { nodes, chain })
}

/// Searches chains along arrow paths of Γ with one morphism perturbed by a cycle.
fn v_chain<F: Field>(spec: &FamilySpec, g: &ArQuiver<F>, rad: &Radical<'_, F>, paths: &mut Vec<(String, Vec<usize>)>) -> Result<Chain<F>> {
    let n = spec.chain_len();
    let want = Depth::Layer(spec.expected_depth());
    let mut arrow_paths: Vec<Vec<usize>> = (0..g.nodes().len()).map(|x| vec![x]).collect();
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &arrow_paths {
            let mut succ = g.successors(*p.last().unwrap());
            succ.sort();
            succ.dedup();
            for y in succ {
                let mut e = p.clone();
                e.push(y);
                next.push(e);
            }
        }
        arrow_paths = next;
    }
    let max_cycle = 2 * spec.m + 2;
    for nodes in &arrow_paths {
        let base: Vec<Morphism<F>> = nodes.windows(2).map(|w| arrow_map(g, w[0], w[1])).collect::<Result<_>>()?;
        for j in 0..n {
            for len in 1..=max_cycle {
                for cycle in cycles_at(g, nodes[j + 1], len) {
                    let mut chain = base.clone();
                    chain[j] = chain[j].add(&path_map(g, &cycle)?.after(&chain[j])?)?;
                    let c = Chain { nodes: nodes.clone(), chain };
                    let d = measure(rad, &c)?;
                    if d.composite == want && d.irreducible && !d.prefix.at_least(n) && !d.suffix.at_least(n) {
                        paths.push(("path".into(), nodes.clone()));
                        paths.push(("cycle".into(), cycle));
                        return Ok(c);
                    }
                }
            }
        }
    }
    Err(Error::VerificationFailed(format!(
        "no chain of {n} irreducible morphisms with composite depth {} found in {}",
        spec.expected_depth(),
        spec.presentation.name()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;

    #[test]
    fn family_shapes() {
        let w = make_family(Family::W, 0, 3).unwrap();
        assert_eq!(w.presentation.quiver().vertex_count(), 4);
        assert_eq!(w.presentation.relations().len(), 2);
        let u = make_family(Family::U, 2, 2).unwrap();
        let q = u.presentation.quiver();
        assert_eq!(q.vertex_count(), 3);
        assert!(q.vertex("a2").is_ok() && q.vertex("x").is_ok());
        assert_eq!(q.arrow_count(), 3);
        assert_eq!(u.presentation.relation_text(&u.presentation.relations()[0]), "g1 g2");
        let v = make_family(Family::V, 2, 3).unwrap();
        assert_eq!(v.presentation.quiver().vertex_count(), 6);
        assert!(v.presentation.quiver().vertex("w").is_ok());
        assert!(make_family(Family::W, 0, 1).is_err());
        assert!(make_family(Family::U, 1, 3).is_err());
    }

    #[test]
    fn w3_witness() {
        let w = witness::<Rational>(&make_family(Family::W, 0, 3).unwrap()).unwrap();
        assert_eq!(w.chain.len(), 3);
        assert_eq!(w.composite_depth, Depth::Layer(6));
        assert!(w.suffix_depth.at_least(3));
    }

    #[test]
    fn u21_witness() {
        let w = witness::<Rational>(&make_family(Family::U, 2, 2).unwrap()).unwrap();
        assert_eq!(w.chain.len(), 2);
        assert_eq!(w.composite_depth, Depth::Layer(6));
        assert!(w.verified());
    }
}
