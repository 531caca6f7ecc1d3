//! Radical powers of the module category, depths and degrees.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use serde_json::{json, Value};

use crate::artheory::ArQuiver;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Matrix, Subspace};
use crate::modules::{end_radical_of, flat_len, hom_basis, Morphism};
use crate::presentation::{AlgebraPresentation, VertexId};
use crate::strings::{canonicalize, enumerate_strings, Letter, StringWord, Walk};

/// Position of a morphism in the radical filtration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Depth {
    /// The zero morphism lies in every layer.
    Zero,
    Layer(usize),
}

impl Depth {
    pub fn at_least(self, n: usize) -> bool {
        match self {
            Depth::Zero => true,
            Depth::Layer(d) => d >= n,
        }
    }

    pub fn is_exactly(self, n: usize) -> bool {
        self == Depth::Layer(n)
    }

    pub fn to_json(self) -> Value {
        match self {
            Depth::Zero => json!("zero"),
            Depth::Layer(d) => json!(d),
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Zero => write!(f, "zero"),
            Depth::Layer(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// ℜ^{n+1}(X,Y) = Σ_Z ℜ(Z,Y)∘ℜ^n(X,Z).
    Recursion,
    /// Spans of composites of irreducible arrow maps along paths.
    PathSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadicalProfile<F> {
    pub source: usize,
    pub target: usize,
    /// ℜ^0 ⊇ ℜ^1 ⊇ ... ending with the zero layer.
    pub layers: Vec<Subspace<F>>,
}

impl<F: Field> RadicalProfile<F> {
    pub fn dims(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.dim()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeSide {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DegreeValue {
    Finite(usize),
    Infinite,
    /// No witness up to the bound, which is below the nilpotency index.
    Undetermined(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Degree<F> {
    pub value: DegreeValue,
    /// Node Z and morphism g (Z -> X on the left, Y -> Z on the right).
    pub witness: Option<(usize, Morphism<F>)>,
}

type Layers<F> = Vec<Vec<Subspace<F>>>;

/// Radical filtration over a knitted quiver, computed per source on demand.
pub struct Radical<'g, F> {
    gamma: &'g ArQuiver<F>,
    method: Method,
    layers: Vec<OnceLock<Layers<F>>>,
    one: Vec<OnceLock<Vec<Vec<Morphism<F>>>>>,
}

fn basis_morphisms<F: Field>(s: &Subspace<F>, src: &[usize], tgt: &[usize]) -> Vec<Morphism<F>> {
    s.basis().iter().map(|v| Morphism::unflatten(src, tgt, v)).collect()
}

fn suffix_sums<F: Field>(levels: &[Vec<Subspace<F>>]) -> Layers<F> {
    let mut out: Layers<F> = vec![Vec::new(); levels.len()];
    for k in (0..levels.len()).rev() {
        out[k] = if k + 1 < levels.len() {
            levels[k].iter().zip(&out[k + 1]).map(|(a, b)| a.sum(b)).collect()
        } else {
            levels[k].clone()
        };
    }
    out
}

impl<'g, F: Field> Radical<'g, F> {
    pub fn new(gamma: &'g ArQuiver<F>) -> Self {
        Self::with_method(gamma, Method::Recursion)
    }

    pub fn with_method(gamma: &'g ArQuiver<F>, method: Method) -> Self {
        let n = gamma.nodes().len();
        Radical {
            gamma,
            method,
            layers: (0..n).map(|_| OnceLock::new()).collect(),
            one: (0..n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn gamma(&self) -> &ArQuiver<F> {
        self.gamma
    }

    fn p(&self) -> &AlgebraPresentation {
        self.gamma.presentation()
    }

    fn dims(&self, x: usize) -> &[usize] {
        self.gamma.node(x).module.rep().dims()
    }

    fn ambient(&self, x: usize, y: usize) -> usize {
        flat_len(self.dims(x), self.dims(y))
    }

    fn check_node(&self, x: usize) -> Result<()> {
        if x < self.gamma.nodes().len() {
            Ok(())
        } else {
            Err(Error::NodeNotFound(format!("node {x}")))
        }
    }

    /// Basis of ℜ(Z, Y) for every Z, with Y fixed.
    fn rad_into(&self, y: usize) -> &Vec<Vec<Morphism<F>>> {
        self.one[y].get_or_init(|| {
            let p = self.p();
            let ry = self.gamma.node(y).module.rep();
            (0..self.gamma.nodes().len())
                .map(|z| {
                    let rz = self.gamma.node(z).module.rep();
                    let hom = hom_basis(p, rz, ry);
                    if z == y {
                        let rad = end_radical_of(&hom).expect("string modules have local endomorphism rings");
                        basis_morphisms(&rad, rz.dims(), ry.dims())
                    } else {
                        hom.basis().to_vec()
                    }
                })
                .collect()
        })
    }

    fn compute(&self, x: usize) -> Layers<F> {
        match self.method {
            Method::Recursion => self.recursion_layers(x),
            Method::PathSpan => self.path_span_layers(x),
        }
    }

    /// ℜ^n(X, ·) for n = 0.. up to and including the first zero layer.
    pub fn source_layers(&self, x: usize) -> &Layers<F> {
        self.layers[x].get_or_init(|| self.compute(x))
    }

    fn recursion_layers(&self, x: usize) -> Layers<F> {
        let p = self.p();
        let n = self.gamma.nodes().len();
        let rx = self.gamma.node(x).module.rep();
        let mut out: Layers<F> = Vec::new();
        let first: Vec<Subspace<F>> = (0..n).map(|y| hom_basis(p, rx, self.gamma.node(y).module.rep()).span().clone()).collect();
        out.push(first);
        let second: Vec<Subspace<F>> = (0..n)
            .map(|y| {
                let basis = &self.rad_into(y)[x];
                Subspace::span(self.ambient(x, y), basis.iter().map(|m| m.flatten()))
            })
            .collect();
        out.push(second);
        while out.last().unwrap().iter().any(|s| !s.is_zero()) {
            let prev = out.last().unwrap();
            let next: Vec<Subspace<F>> = (0..n)
                .map(|y| {
                    let rad = self.rad_into(y);
                    let mut vectors = Vec::new();
                    for z in 0..n {
                        if prev[z].is_zero() || rad[z].is_empty() {
                            continue;
                        }
                        for h in basis_morphisms(&prev[z], self.dims(x), self.dims(z)) {
                            for g in &rad[z] {
                                vectors.push(g.after(&h).expect("composable").flatten());
                            }
                        }
                    }
                    Subspace::span(self.ambient(x, y), vectors)
                })
                .collect();
            out.push(next);
            assert!(out.len() <= 4 * n * n + 4, "radical is not nilpotent on a knitted quiver");
        }
        out
    }

    fn path_span_layers(&self, x: usize) -> Layers<F> {
        let n = self.gamma.nodes().len();
        let mut levels: Vec<Vec<Subspace<F>>> = Vec::new();
        let mut current: Vec<Vec<Morphism<F>>> = vec![Vec::new(); n];
        current[x] = vec![Morphism::identity(self.dims(x))];
        loop {
            let spans: Vec<Subspace<F>> =
                (0..n).map(|y| Subspace::span(self.ambient(x, y), current[y].iter().map(|m| m.flatten()))).collect();
            let done = spans.iter().all(|s| s.is_zero());
            levels.push(spans);
            if done {
                break;
            }
            let mut next: Vec<Vec<Vec<F>>> = vec![Vec::new(); n];
            for a in self.gamma.arrows() {
                for h in &current[a.source] {
                    next[a.target].push(a.map.after(h).expect("composable").flatten());
                }
            }
            current = (0..n)
                .map(|y| basis_morphisms(&Subspace::span(self.ambient(x, y), next[y].clone()), self.dims(x), self.dims(y)))
                .collect();
            assert!(levels.len() <= 4 * n * n + 4, "radical is not nilpotent on a knitted quiver");
        }
        suffix_sums(&levels)
    }

    /// ℜ^n(X, Y).
    pub fn layer(&self, x: usize, y: usize, n: usize) -> Subspace<F> {
        let layers = self.source_layers(x);
        match layers.get(n) {
            Some(l) => l[y].clone(),
            None => Subspace::zero(self.ambient(x, y)),
        }
    }

    pub fn profile(&self, x: usize, y: usize) -> Result<RadicalProfile<F>> {
        self.check_node(x)?;
        self.check_node(y)?;
        let layers = self.source_layers(x);
        let mut out: Vec<Subspace<F>> = Vec::new();
        for l in layers {
            out.push(l[y].clone());
            if l[y].is_zero() {
                break;
            }
        }
        Ok(RadicalProfile { source: x, target: y, layers: out })
    }

    /// Least N with ℜ^N = 0 on all pairs.
    pub fn nilpotency_index(&self) -> usize {
        (0..self.gamma.nodes().len()).map(|x| self.source_layers(x).len() - 1).max().unwrap_or(0)
    }

    pub fn depth(&self, x: usize, y: usize, f: &Morphism<F>) -> Result<Depth> {
        self.check_node(x)?;
        self.check_node(y)?;
        let (mx, my) = (self.gamma.node(x).module.rep(), self.gamma.node(y).module.rep());
        if f.source_dims() != mx.dims() || f.target_dims() != my.dims() {
            return Err(Error::ShapeMismatch("morphism does not match its nodes".into()));
        }
        f.check_intertwining(self.p(), mx, my)?;
        if f.is_zero() {
            return Ok(Depth::Zero);
        }
        let v = f.flatten();
        let layers = self.source_layers(x);
        let mut d = 0;
        while d + 1 < layers.len() && layers[d + 1][y].contains(&v) {
            d += 1;
        }
        Ok(Depth::Layer(d))
    }

    pub fn is_irreducible(&self, x: usize, y: usize, f: &Morphism<F>) -> Result<bool> {
        Ok(self.depth(x, y, f)? == Depth::Layer(1))
    }

    /// Left or right degree of an irreducible morphism f: X -> Y.
    pub fn degree(&self, x: usize, y: usize, f: &Morphism<F>, side: DegreeSide, bound: Option<usize>) -> Result<Degree<F>> {
        if !self.is_irreducible(x, y, f)? {
            return Err(Error::NotIrreducible(format!("{} -> {}", self.gamma.label(x), self.gamma.label(y))));
        }
        let n = self.gamma.nodes().len();
        let nil = self.nilpotency_index();
        let bound = bound.unwrap_or(nil);
        for m in 1..=bound {
            let mut nonzero = false;
            for z in 0..n {
                let (src, a_m, a_next, amb_target) = match side {
                    DegreeSide::Left => (self.layer(z, x, m), (z, x), (z, x), (z, y)),
                    DegreeSide::Right => (self.layer(y, z, m), (y, z), (y, z), (x, z)),
                };
                if src.is_zero() {
                    continue;
                }
                nonzero = true;
                let g_basis = basis_morphisms(&src, self.dims(a_m.0), self.dims(a_m.1));
                let target_layer = self.layer(amb_target.0, amb_target.1, m + 2);
                let cols: Vec<Vec<F>> = g_basis
                    .iter()
                    .map(|g| {
                        let c = match side {
                            DegreeSide::Left => f.after(g),
                            DegreeSide::Right => g.after(f),
                        }
                        .expect("composable");
                        target_layer.reduce(&c.flatten())
                    })
                    .collect();
                let rows = self.ambient(amb_target.0, amb_target.1);
                let kernel = Matrix::from_columns(rows, &cols).kernel();
                let deeper = self.layer(a_next.0, a_next.1, m + 1);
                for c in kernel {
                    let mut g = Morphism::zero(self.dims(a_m.0), self.dims(a_m.1));
                    for (ci, gi) in c.iter().zip(&g_basis) {
                        if !ci.is_zero() {
                            g = g.add(&gi.scale(ci))?;
                        }
                    }
                    if !deeper.contains(&g.flatten()) {
                        return Ok(Degree { value: DegreeValue::Finite(m), witness: Some((z, g)) });
                    }
                }
            }
            if !nonzero {
                return Ok(Degree { value: DegreeValue::Infinite, witness: None });
            }
        }
        let value = if bound >= nil { DegreeValue::Infinite } else { DegreeValue::Undetermined(bound) };
        Ok(Degree { value, witness: None })
    }

    /// Compares the recursion and path-span layers from every source.
    pub fn cross_check(&self) -> Result<()> {
        let n = self.gamma.nodes().len();
        for x in 0..n {
            let a = self.recursion_layers(x);
            let b = self.path_span_layers(x);
            let len = a.len().max(b.len());
            for k in 0..len {
                for y in 0..n {
                    let zero = Subspace::zero(self.ambient(x, y));
                    let sa = a.get(k).map(|l| &l[y]).unwrap_or(&zero);
                    let sb = b.get(k).map(|l| &l[y]).unwrap_or(&zero);
                    if sa != sb {
                        return Err(Error::Inconsistency(format!(
                            "layer {k} of ({}, {}) differs: {} vs {}",
                            self.gamma.label(x),
                            self.gamma.label(y),
                            sa.dim(),
                            sb.dim()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn profile_json(&self, x: usize, y: usize) -> Result<Value> {
        let prof = self.profile(x, y)?;
        Ok(json!({
            "source": self.gamma.label(x),
            "target": self.gamma.label(y),
            "layers": prof.dims(),
        }))
    }
}

/// Arrow of Γ ending at P(u) from a summand of its radical, when unique.
pub fn iota<F: Field>(gamma: &ArQuiver<F>, u: VertexId) -> Result<usize> {
    let pu = node_of_standard(gamma, u, true)?;
    unique_arrow(gamma, (0..gamma.arrows().len()).filter(|&k| gamma.arrows()[k].target == pu).collect(), "radical of the projective")
}

/// Arrow of Γ from I(u) to I(u)/soc, when the quotient is indecomposable.
pub fn theta<F: Field>(gamma: &ArQuiver<F>, u: VertexId) -> Result<usize> {
    let iu = node_of_standard(gamma, u, false)?;
    unique_arrow(gamma, (0..gamma.arrows().len()).filter(|&k| gamma.arrows()[k].source == iu).collect(), "socle quotient of the injective")
}

fn node_of_standard<F: Field>(gamma: &ArQuiver<F>, u: VertexId, projective: bool) -> Result<usize> {
    gamma
        .nodes()
        .iter()
        .position(|n| if projective { n.projective == Some(u) } else { n.injective == Some(u) })
        .ok_or_else(|| Error::NodeNotFound(gamma.presentation().quiver().vertex_name(u).to_string()))
}

fn unique_arrow<F: Field>(gamma: &ArQuiver<F>, arrows: Vec<usize>, what: &str) -> Result<usize> {
    match arrows.as_slice() {
        [k] => Ok(*k),
        _ => Err(Error::NotIrreducible(format!(
            "{what} is not indecomposable ({} arrows at {})",
            arrows.len(),
            arrows.first().map(|&k| gamma.label(gamma.arrows()[k].source)).unwrap_or_default()
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgSide {
    Ending,
    Starting,
}

/// The counting quivers Q_u^e and Q_u^s.
#[derive(Clone, Debug, PartialEq)]
pub struct CountingQuiver {
    pub side: CgSide,
    pub vertex: VertexId,
    pub strings: Vec<Walk>,
    pub arrows: Vec<(usize, usize)>,
}

impl CountingQuiver {
    pub fn card(&self) -> usize {
        self.strings.len()
    }

    /// card - 1, the degree of θ_u (ending) or ι_u (starting).
    pub fn degree(&self) -> usize {
        self.card() - 1
    }

    pub fn to_json(&self, p: &AlgebraPresentation) -> Value {
        let q = p.quiver();
        json!({
            "side": match self.side { CgSide::Ending => "ending", CgSide::Starting => "starting" },
            "vertex": q.vertex_name(self.vertex),
            "strings": self.strings.iter().map(|w| w.format(q)).collect::<Vec<_>>(),
            "arrows": self.arrows.iter().map(|&(a, b)| json!([self.strings[a].format(q), self.strings[b].format(q)])).collect::<Vec<_>>(),
            "card": self.card(),
            "degree": self.degree(),
        })
    }
}

fn reduced_prepend(q: &crate::presentation::Quiver, c: &Walk, l: Letter) -> Option<Walk> {
    if let Some(&first) = c.letters().first() {
        if first == l.inv() {
            return Some(c.sub(q, 1, c.len()));
        }
    }
    if l.end(q) != c.start() {
        return None;
    }
    let mut letters = vec![l];
    letters.extend_from_slice(c.letters());
    Walk::new(q, l.start(q), letters).ok()
}

pub fn cg_quiver(p: &AlgebraPresentation, u: VertexId, side: CgSide) -> Result<CountingQuiver> {
    let q = p.quiver();
    if u >= q.vertex_count() {
        return Err(Error::UnknownVertex(format!("{u}")));
    }
    let mut set: BTreeSet<Walk> = BTreeSet::new();
    for w in enumerate_strings(p, None)? {
        for walk in [w.walk().clone(), w.walk().inverse(q)] {
            if walk.is_trivial() {
                continue;
            }
            let keep = match side {
                CgSide::Ending => walk.end(q) == u && !walk.letters().last().unwrap().inverse,
                CgSide::Starting => walk.start() == u && !walk.letters()[0].inverse,
            };
            if keep {
                set.insert(walk);
            }
        }
    }
    set.insert(Walk::trivial(u));
    let strings: Vec<Walk> = set.into_iter().collect();
    let mut arrows = Vec::new();
    for (i, c) in strings.iter().enumerate() {
        for a in 0..q.arrow_count() {
            let next = match side {
                CgSide::Ending => reduced_prepend(q, c, Letter::inverse_of(a)),
                // C -> red(C β), computed on inverses.
                CgSide::Starting => reduced_prepend(q, &c.inverse(q), Letter::inverse_of(a)).map(|w| w.inverse(q)),
            };
            if let Some(w) = next {
                if let Some(j) = strings.iter().position(|s| *s == w) {
                    arrows.push((i, j));
                }
            }
        }
    }
    Ok(CountingQuiver { side, vertex: u, strings, arrows })
}

/// Canonical word of a counting-quiver vertex.
pub fn cg_word(p: &AlgebraPresentation, w: &Walk) -> StringWord {
    canonicalize(p.quiver(), &StringWord::from_walk_unchecked(w.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::artheory::knit;
    use crate::field::Rational;
    use crate::presentation::parse_presentation;

    const W3: &str = "vertices 1 2 3 4\narrow a 1 -> 1\narrow b1 1 -> 2\narrow b2 2 -> 3\narrow b3 3 -> 4\nrelation a a\nrelation b1 b2\n";
    const U22: &str = "vertices 1 a2 x\narrow g1 1 -> a2\narrow g2 a2 -> x\narrow b1 1 -> x\nrelation g1 g2\n";

    fn arrow_map(g: &ArQuiver<Rational>, from: &str, to: &str) -> (usize, usize, Morphism<Rational>) {
        let (x, y) = (g.find_text(from).unwrap(), g.find_text(to).unwrap());
        let k = g.arrows_between(x, y)[0];
        (x, y, g.arrows()[k].map.clone())
    }

    #[test]
    fn irreducible_maps_have_depth_one() {
        let p = parse_presentation(W3).unwrap();
        let g = knit::<Rational>(&p).unwrap();
        let r = Radical::new(&g);
        for a in g.arrows() {
            assert_eq!(r.depth(a.source, a.target, &a.map).unwrap(), Depth::Layer(1));
        }
        let x = g.find_text("e(4)").unwrap();
        let zero = Morphism::zero(g.node(x).module.rep().dims(), g.node(x).module.rep().dims());
        assert_eq!(r.depth(x, x, &zero).unwrap(), Depth::Zero);
        let id = Morphism::identity(g.node(x).module.rep().dims());
        assert_eq!(r.depth(x, x, &id).unwrap(), Depth::Layer(0));
    }

    #[test]
    fn sectional_composite_depth() {
        let p = parse_presentation(W3).unwrap();
        let g = knit::<Rational>(&p).unwrap();
        let r = Radical::new(&g);
        let (x, _, f1) = arrow_map(&g, "e(4)", "b3");
        let (_, y, f2) = arrow_map(&g, "b3", "b2 b3");
        assert_eq!(r.depth(x, y, &f2.after(&f1).unwrap()).unwrap(), Depth::Layer(2));
    }

    #[test]
    fn w3_example_chain() {
        let p = parse_presentation(W3).unwrap();
        let g = knit::<Rational>(&p).unwrap();
        let r = Radical::new(&g);
        let (i3, s2, f1) = arrow_map(&g, "b2", "e(2)");
        let (_, p1, f2) = arrow_map(&g, "e(2)", "b1^- a b1");
        let (_, _, g1) = arrow_map(&g, "b1^- a b1", "a^- b1");
        let (_, _, g2) = arrow_map(&g, "a^- b1", "b1");
        let (_, _, g3) = arrow_map(&g, "b1", "b1^- a b1");
        let (_, i2, f3) = arrow_map(&g, "b1^- a b1", "a b1");
        let cycle = g3.after(&g2.after(&g1.after(&f2).unwrap()).unwrap()).unwrap();
        let h2 = f2.add(&cycle).unwrap();
        assert_eq!(r.depth(s2, p1, &h2).unwrap(), Depth::Layer(1));
        let c = f3.after(&h2.after(&f1).unwrap()).unwrap();
        assert_eq!(r.depth(i3, i2, &c).unwrap(), Depth::Layer(6));
        assert!(r.depth(s2, i2, &f3.after(&h2).unwrap()).unwrap().at_least(3));
        assert_eq!(r.depth(i3, p1, &h2.after(&f1).unwrap()).unwrap(), Depth::Layer(2));
    }

    #[test]
    fn methods_agree_on_w3() {
        let p = parse_presentation(W3).unwrap();
        let g = knit::<Rational>(&p).unwrap();
        Radical::new(&g).cross_check().unwrap();
    }

    #[test]
    fn degrees_in_u22() {
        let p = parse_presentation(U22).unwrap();
        let g = knit::<Rational>(&p).unwrap();
        let r = Radical::new(&g);
        let a2 = p.quiver().vertex("a2").unwrap();
        for (k, side) in [(iota(&g, a2).unwrap(), DegreeSide::Right), (theta(&g, a2).unwrap(), DegreeSide::Left)] {
            let a = &g.arrows()[k];
            let d = r.degree(a.source, a.target, &a.map, side, None).unwrap();
            assert_eq!(d.value, DegreeValue::Finite(3));
            let (z, w) = d.witness.unwrap();
            let (m, c, src, tgt) = match side {
                DegreeSide::Left => (r.depth(z, a.source, &w).unwrap(), a.map.after(&w).unwrap(), z, a.target),
                DegreeSide::Right => (r.depth(a.target, z, &w).unwrap(), w.after(&a.map).unwrap(), a.source, z),
            };
            assert_eq!(m, Depth::Layer(3));
            assert!(r.depth(src, tgt, &c).unwrap().at_least(5));
        }
        let cg = cg_quiver(&p, a2, CgSide::Ending).unwrap();
        assert_eq!(cg.card(), 4);
        assert_eq!(cg_quiver(&p, a2, CgSide::Starting).unwrap().card(), 4);
    }

    #[test]
    fn isolated_vertex_counting_quiver() {
        let p = parse_presentation("vertices 1\n").unwrap();
        let cg = cg_quiver(&p, 0, CgSide::Ending).unwrap();
        assert_eq!(cg.card(), 1);
        assert!(cg.arrows.is_empty());
    }
}
