//! Translates, almost split sequences and knitted Auslander-Reiten quivers.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Matrix, Subspace};
use crate::modules::{
    end_radical_of, graph_map, hom_basis, injective_rep, projective_rep, realize, standard_word, Morphism,
    Representation, StandardKind, StringModule,
};
use crate::presentation::{AlgebraPresentation, ArrowId, PathCount, VertexId};
use crate::strings::{can_append, canonicalize, enumerate_strings, letters_from, Letter, Signs, StringWord, Walk};

const MAX_WORD: usize = 10_000;

/// A string together with a side sign, which only matters for trivial strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedString {
    walk: Walk,
    sign: i8,
}

impl SignedString {
    pub fn new(walk: Walk) -> Self {
        SignedString { walk, sign: 1 }
    }

    pub fn walk(&self) -> &Walk {
        &self.walk
    }

    fn inverse(&self, ctx: &ArContext<'_>) -> SignedString {
        SignedString { walk: self.walk.inverse(ctx.p.quiver()), sign: -self.sign }
    }
}

/// Result of a string move: the new string and the position pairs of the
/// canonical graph map (old position, new position).
type Move = (SignedString, Vec<(usize, usize)>);

/// Per-presentation data for the string moves.
pub struct ArContext<'a> {
    p: &'a AlgebraPresentation,
    signs: Signs,
    projective: Vec<StringWord>,
    injective: Vec<StringWord>,
}

impl<'a> ArContext<'a> {
    pub fn new(p: &'a AlgebraPresentation) -> Result<Self> {
        let report = p.validate_string_algebra();
        if !report.is_string_algebra {
            let failed: Vec<&str> = report.conditions.iter().filter(|c| !c.passed).map(|c| c.condition.as_str()).collect();
            return Err(Error::NotStringAlgebra(format!("conditions {} fail", failed.join(", "))));
        }
        let signs = Signs::compute(p)?;
        let n = p.quiver().vertex_count();
        let projective = (0..n).map(|v| standard_word(p, v, StandardKind::Projective)).collect::<Result<_>>()?;
        let injective = (0..n).map(|v| standard_word(p, v, StandardKind::Injective)).collect::<Result<_>>()?;
        Ok(ArContext { p, signs, projective, injective })
    }

    pub fn presentation(&self) -> &AlgebraPresentation {
        self.p
    }

    /// Vertex whose projective has this (canonical) word.
    pub fn projective_vertex(&self, w: &StringWord) -> Option<VertexId> {
        let c = canonicalize(self.p.quiver(), w);
        self.projective.iter().position(|x| *x == c)
    }

    pub fn injective_vertex(&self, w: &StringWord) -> Option<VertexId> {
        let c = canonicalize(self.p.quiver(), w);
        self.injective.iter().position(|x| *x == c)
    }

    pub fn is_projective(&self, w: &StringWord) -> bool {
        self.projective_vertex(w).is_some()
    }

    pub fn is_injective(&self, w: &StringWord) -> bool {
        self.injective_vertex(w).is_some()
    }

    pub fn projective_word(&self, v: VertexId) -> &StringWord {
        &self.projective[v]
    }

    pub fn injective_word(&self, v: VertexId) -> &StringWord {
        &self.injective[v]
    }

    /// Letters of one direction that may be appended at the end.
    fn extensions(&self, s: &SignedString, inverse: bool) -> Vec<Letter> {
        let q = self.p.quiver();
        letters_from(q, s.walk.end(q))
            .into_iter()
            .filter(|l| l.inverse == inverse)
            .filter(|&l| {
                if s.walk.is_trivial() {
                    self.signs.sigma(l) == -s.sign
                } else {
                    can_append(self.p, &s.walk, l)
                }
            })
            .collect()
    }

    fn append(&self, s: &SignedString, l: Letter) -> SignedString {
        let mut walk = s.walk.clone();
        walk.push(self.p.quiver(), l);
        SignedString { walk, sign: 0 }
    }

    fn extend_maximally(&self, mut s: SignedString, inverse: bool) -> Result<SignedString> {
        while let Some(&l) = self.extensions(&s, inverse).first() {
            s = self.append(&s, l);
            if s.walk.len() > MAX_WORD {
                return Err(Error::NotRepresentationFinite(MAX_WORD));
            }
        }
        Ok(s)
    }

    pub fn ends_on_peak(&self, s: &SignedString) -> bool {
        self.extensions(s, true).is_empty()
    }

    pub fn ends_in_deep(&self, s: &SignedString) -> bool {
        self.extensions(s, false).is_empty()
    }

    /// C -> C b^- a_1 ... a_r (inclusion).
    fn add_hook_end(&self, s: &SignedString) -> Result<Option<Move>> {
        let Some(&l) = self.extensions(s, true).first() else { return Ok(None) };
        let out = self.extend_maximally(self.append(s, l), false)?;
        Ok(Some((out, (0..=s.walk.len()).map(|i| (i, i)).collect())))
    }

    /// C -> C b y_1^- ... y_r^-; no map is needed for this move.
    fn add_cohook_end(&self, s: &SignedString) -> Result<Option<SignedString>> {
        let Some(&l) = self.extensions(s, false).first() else { return Ok(None) };
        Ok(Some(self.extend_maximally(self.append(s, l), true)?))
    }

    /// C = D l D' with D' maximal of the direction opposite to `l`.
    fn delete_end(&self, s: &SignedString, last_inverse: bool) -> Option<Move> {
        let letters = s.walk.letters();
        let k = letters.iter().rposition(|l| l.inverse == last_inverse)?;
        let q = self.p.quiver();
        let walk = s.walk.sub(q, 0, k);
        let sign = if walk.is_trivial() { -self.signs.sigma(letters[k]) } else { 0 };
        Some((SignedString { walk, sign }, (0..=k).map(|i| (i, i)).collect()))
    }

    /// C = D b D' with D' inverse; C -> D (projection).
    fn delete_cohook_end(&self, s: &SignedString) -> Option<Move> {
        self.delete_end(s, false)
    }

    /// C = D b^- D' with D' direct.
    fn delete_hook_end(&self, s: &SignedString) -> Option<SignedString> {
        self.delete_end(s, true).map(|m| m.0)
    }

    fn at_start(&self, s: &SignedString, op: impl Fn(&SignedString) -> Result<Option<Move>>) -> Result<Option<Move>> {
        let n = s.walk.len();
        let Some((r, pairs)) = op(&s.inverse(self))? else { return Ok(None) };
        let m = r.walk.len();
        let pairs = pairs.into_iter().map(|(i, j)| (n - i, m - j)).collect();
        Ok(Some((r.inverse(self), pairs)))
    }

    /// The move at the end of the string used by the sequence starting at it.
    pub fn right_move(&self, s: &SignedString) -> Result<Option<Move>> {
        if self.ends_on_peak(s) {
            Ok(self.delete_cohook_end(s))
        } else {
            self.add_hook_end(s)
        }
    }

    pub fn left_move(&self, s: &SignedString) -> Result<Option<Move>> {
        self.at_start(s, |x| self.right_move(x))
    }

    /// Inverse of `right_move`.
    pub fn right_unmove(&self, s: &SignedString) -> Result<Option<SignedString>> {
        if self.ends_in_deep(s) {
            Ok(self.delete_hook_end(s))
        } else {
            self.add_cohook_end(s)
        }
    }

    pub fn left_unmove(&self, s: &SignedString) -> Result<Option<SignedString>> {
        let r = self.right_unmove(&s.inverse(self))?;
        Ok(r.map(|x| x.inverse(self)))
    }

    fn canonical(&self, s: &SignedString) -> StringWord {
        canonicalize(self.p.quiver(), &StringWord::from_walk_unchecked(s.walk.clone()))
    }

    fn same(&self, a: &SignedString, b: &SignedString) -> bool {
        self.canonical(a) == self.canonical(b)
    }

    /// tau of a non-projective string.
    pub fn tau_word(&self, w: &StringWord) -> Result<StringWord> {
        if self.is_projective(w) {
            return Err(Error::IsProjective(w.format(self.p.quiver())));
        }
        let s = SignedString::new(w.walk().clone());
        let a = match self.right_unmove(&s)? {
            Some(r) => self.left_unmove(&r)?,
            None => None,
        };
        let b = match self.left_unmove(&s)? {
            Some(l) => self.right_unmove(&l)?,
            None => None,
        };
        self.pick(a, b, w)
    }

    /// tau^-1 of a non-injective string.
    pub fn tau_inverse_word(&self, w: &StringWord) -> Result<StringWord> {
        if self.is_injective(w) {
            return Err(Error::IsInjective(w.format(self.p.quiver())));
        }
        let s = SignedString::new(w.walk().clone());
        let a = match self.right_move(&s)? {
            Some((r, _)) => self.left_move(&r)?.map(|m| m.0),
            None => None,
        };
        let b = match self.left_move(&s)? {
            Some((l, _)) => self.right_move(&l)?.map(|m| m.0),
            None => None,
        };
        self.pick(a, b, w)
    }

    fn pick(&self, a: Option<SignedString>, b: Option<SignedString>, w: &StringWord) -> Result<StringWord> {
        match (a, b) {
            (Some(x), Some(y)) if !self.same(&x, &y) => Err(Error::Inconsistency(format!(
                "string moves disagree at {}",
                w.format(self.p.quiver())
            ))),
            (Some(x), _) | (None, Some(x)) => Ok(self.canonical(&x)),
            (None, None) => Err(Error::Inconsistency(format!("no translate for {}", w.format(self.p.quiver())))),
        }
    }
}

/// A string realized in canonical orientation, remembering whether the
/// computing walk was inverted.
struct Placed<F> {
    module: StringModule<F>,
    flipped: bool,
}

impl<F: Field> Placed<F> {
    fn new(ctx: &ArContext<'_>, s: &SignedString) -> Result<Self> {
        let w = StringWord::from_walk_unchecked(s.walk.clone());
        let c = canonicalize(ctx.p.quiver(), &w);
        let flipped = c != w;
        Ok(Placed { module: realize(ctx.p, &c)?, flipped })
    }

    fn pos(&self, i: usize) -> usize {
        if self.flipped { self.module.word().len() - i } else { i }
    }
}

fn placed_map<F: Field>(src: &Placed<F>, tgt: &Placed<F>, pairs: &[(usize, usize)]) -> Morphism<F> {
    let pairs: Vec<(usize, usize)> = pairs.iter().map(|&(i, j)| (src.pos(i), tgt.pos(j))).collect();
    graph_map(&src.module, &tgt.module, &pairs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlmostSplitSequence<F> {
    pub left: StringModule<F>,
    pub middle: Vec<StringModule<F>>,
    pub right: StringModule<F>,
    pub left_maps: Vec<Morphism<F>>,
    pub right_maps: Vec<Morphism<F>>,
}

impl<F: Field> AlmostSplitSequence<F> {
    /// Exactness, non-splitness and intertwining.
    pub fn verify(&self, p: &AlgebraPresentation) -> Result<()> {
        let fail = |m: &str| Error::Inconsistency(format!("sequence {} -> {}: {m}", self.left.word().format(p.quiver()), self.right.word().format(p.quiver())));
        if self.middle.is_empty() || self.middle.len() > 2 {
            return Err(fail("middle term count"));
        }
        let x = self.left.rep();
        let z = self.right.rep();
        for (k, y) in self.middle.iter().enumerate() {
            self.left_maps[k].check_intertwining(p, x, y.rep())?;
            self.right_maps[k].check_intertwining(p, y.rep(), z)?;
        }
        let mut total = Morphism::zero(x.dims(), z.dims());
        for k in 0..self.middle.len() {
            total = total.add(&self.right_maps[k].after(&self.left_maps[k])?)?;
        }
        if !total.is_zero() {
            return Err(fail("composite is not zero"));
        }
        let dim_mid: usize = self.middle.iter().map(|m| m.rep().total_dim()).sum();
        if dim_mid != x.total_dim() + z.total_dim() {
            return Err(fail("dimensions do not add up"));
        }
        let nv = x.dims().len();
        for v in 0..nv {
            let mut left_rank_rows = Vec::new();
            for f in &self.left_maps {
                let b = f.block(v);
                for i in 0..b.rows() {
                    left_rank_rows.push(b.row(i).to_vec());
                }
            }
            let rank = Subspace::span(x.dim(v), left_rank_rows).dim();
            if rank != x.dim(v) {
                return Err(fail("left map not injective"));
            }
            let mut cols = Vec::new();
            for g in &self.right_maps {
                let b = g.block(v);
                for j in 0..b.cols() {
                    cols.push(b.column(j));
                }
            }
            if Subspace::span(z.dim(v), cols).dim() != z.dim(v) {
                return Err(fail("right map not surjective"));
            }
        }
        // Non-split: id_X is not r∘ι for any r.
        let ambient = crate::modules::flat_len(x.dims(), x.dims());
        let mut vectors = Vec::new();
        for (k, y) in self.middle.iter().enumerate() {
            for r in hom_basis(p, y.rep(), x).basis() {
                vectors.push(r.after(&self.left_maps[k])?.flatten());
            }
        }
        let span = Subspace::span(ambient, vectors);
        if span.contains(&Morphism::identity(x.dims()).flatten()) {
            return Err(fail("sequence splits"));
        }
        Ok(())
    }
}

/// Sequence starting at a non-injective string, in computing orientation.
fn raw_sequence_from<F: Field>(ctx: &ArContext<'_>, x: &SignedString) -> Result<(AlmostSplitSequence<F>, StringWord)> {
    let q = ctx.p.quiver();
    let xw = StringWord::from_walk_unchecked(x.walk.clone());
    if ctx.is_injective(&xw) {
        return Err(Error::IsInjective(xw.format(q)));
    }
    let r = ctx.right_move(x)?;
    let l = ctx.left_move(x)?;
    let mut middles: Vec<(Move, Move)> = Vec::new();
    if let Some((rs, rp)) = r {
        let Some(z) = ctx.left_move(&rs)? else {
            return Err(Error::Inconsistency(format!("no right term after {}", rs.walk.format(q))));
        };
        middles.push(((rs, rp), z));
    }
    if let Some((ls, lp)) = l {
        let Some(z) = ctx.right_move(&ls)? else {
            return Err(Error::Inconsistency(format!("no right term after {}", ls.walk.format(q))));
        };
        middles.push(((ls, lp), z));
    }
    if middles.is_empty() {
        return Err(Error::Inconsistency(format!("no middle term at {}", xw.format(q))));
    }
    let z0 = middles[0].1 .0.clone();
    if middles.iter().any(|(_, z)| !ctx.same(&z.0, &z0)) {
        return Err(Error::Inconsistency(format!("right terms disagree at {}", xw.format(q))));
    }
    let px = Placed::<F>::new(ctx, x)?;
    let pz = Placed::<F>::new(ctx, &z0)?;
    let mut middle = Vec::new();
    let mut left_maps = Vec::new();
    let mut right_maps = Vec::new();
    for ((ys, ypairs), (zs, zpairs)) in &middles {
        let py = Placed::<F>::new(ctx, ys)?;
        let pzk = Placed::<F>::new(ctx, zs)?;
        left_maps.push(placed_map(&px, &py, ypairs));
        if pzk.flipped != pz.flipped {
            return Err(Error::Inconsistency("right terms in different orientations".into()));
        }
        right_maps.push(placed_map(&py, &pzk, zpairs));
        middle.push(py.module);
    }
    if middle.len() == 2 {
        let t0 = right_maps[0].after(&left_maps[0])?;
        let t1 = right_maps[1].after(&left_maps[1])?;
        if t0 == t1 {
            right_maps[1] = right_maps[1].neg();
        } else if t0 != t1.neg() {
            return Err(Error::Inconsistency(format!("mesh at {} does not commute", xw.format(q))));
        }
    }
    let zw = pz.module.word().clone();
    let seq = AlmostSplitSequence { left: px.module, middle, right: pz.module, left_maps, right_maps };
    Ok((seq, zw))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    StartingAt,
    EndingAt,
}

pub fn ar_sequence<F: Field>(p: &AlgebraPresentation, m: &StringWord, side: Side) -> Result<AlmostSplitSequence<F>> {
    let ctx = ArContext::new(p)?;
    ar_sequence_in(&ctx, m, side)
}

pub fn ar_sequence_in<F: Field>(ctx: &ArContext<'_>, m: &StringWord, side: Side) -> Result<AlmostSplitSequence<F>> {
    let q = ctx.p.quiver();
    let m = StringWord::new(ctx.p, m.walk().clone())?;
    let start = match side {
        Side::StartingAt => canonicalize(q, &m),
        Side::EndingAt => ctx.tau_word(&m)?,
    };
    let (seq, z) = raw_sequence_from::<F>(ctx, &SignedString::new(start.walk().clone()))?;
    if side == Side::EndingAt && z != canonicalize(q, &m) {
        return Err(Error::Inconsistency(format!("tau^-1 tau {} = {}", m.format(q), z.format(q))));
    }
    seq.verify(ctx.p)?;
    Ok(seq)
}

pub fn tau<F: Field>(p: &AlgebraPresentation, m: &StringModule<F>) -> Result<StringModule<F>> {
    let ctx = ArContext::new(p)?;
    realize(p, &ctx.tau_word(m.word())?)
}

pub fn tau_inverse<F: Field>(p: &AlgebraPresentation, m: &StringModule<F>) -> Result<StringModule<F>> {
    let ctx = ArContext::new(p)?;
    realize(p, &ctx.tau_inverse_word(m.word())?)
}

/// Direct sum of path-basis projectives or injectives.
struct PathSum<F> {
    rep: Representation<F>,
    tops: Vec<VertexId>,
    paths: Vec<Vec<Vec<ArrowId>>>,
    /// (summand, path index) -> coordinate at its vertex.
    coord: HashMap<(usize, usize), usize>,
}

impl<F: Field> PathSum<F> {
    fn new(p: &AlgebraPresentation, tops: &[VertexId], injective: bool) -> Self {
        let q = p.quiver();
        let nv = q.vertex_count();
        let mut dims = vec![0usize; nv];
        let mut parts = Vec::new();
        let mut paths = Vec::new();
        let mut coord = HashMap::new();
        for (j, &v) in tops.iter().enumerate() {
            let (rep, ps) = if injective { injective_rep::<F>(p, v) } else { projective_rep::<F>(p, v) };
            let offset = dims.clone();
            let mut local = vec![0usize; nv];
            for (k, path) in ps.iter().enumerate() {
                let u = if injective {
                    path.first().map(|&a| q.arrow(a).source).unwrap_or(v)
                } else {
                    path.last().map(|&a| q.arrow(a).target).unwrap_or(v)
                };
                coord.insert((j, k), offset[u] + local[u]);
                local[u] += 1;
            }
            for u in 0..nv {
                dims[u] += rep.dim(u);
            }
            parts.push((offset, rep));
            paths.push(ps);
        }
        let mut maps: Vec<Matrix<F>> = (0..q.arrow_count()).map(|a| Matrix::zeros(dims[q.arrow(a).target], dims[q.arrow(a).source])).collect();
        for (offset, rep) in &parts {
            for a in 0..q.arrow_count() {
                let (s, t) = (q.arrow(a).source, q.arrow(a).target);
                let m = rep.map(a);
                for i in 0..m.rows() {
                    for k in 0..m.cols() {
                        if !m.get(i, k).is_zero() {
                            maps[a].set(offset[t] + i, offset[s] + k, m.get(i, k).clone());
                        }
                    }
                }
            }
        }
        let rep = Representation::new(p, dims, maps).expect("sum of path modules");
        PathSum { rep, tops: tops.to_vec(), paths, coord }
    }
}

/// Basis (as columns) of a complement of the radical at each vertex.
fn top_generators<F: Field>(p: &AlgebraPresentation, m: &Representation<F>) -> Vec<(VertexId, Vec<F>)> {
    let q = p.quiver();
    let mut gens = Vec::new();
    for v in 0..q.vertex_count() {
        let d = m.dim(v);
        let mut images = Vec::new();
        for &a in q.incoming(v) {
            let map = m.map(a);
            for j in 0..map.cols() {
                images.push(map.column(j));
            }
        }
        let mut span = Subspace::span(d, images);
        for i in 0..d {
            let mut e = vec![F::zero(); d];
            e[i] = F::one();
            if !span.contains(&e) {
                span = span.sum(&Subspace::span(d, vec![e.clone()]));
                gens.push((v, e));
            }
        }
    }
    gens
}

/// Kernel of a morphism as a representation, with the inclusion columns.
fn kernel_rep<F: Field>(p: &AlgebraPresentation, f: &Morphism<F>, source: &Representation<F>) -> (Representation<F>, Vec<Matrix<F>>) {
    let q = p.quiver();
    let nv = q.vertex_count();
    let mut incl = Vec::with_capacity(nv);
    for v in 0..nv {
        let k = f.block(v).kernel();
        incl.push(Matrix::from_columns(source.dim(v), &k));
    }
    let dims: Vec<usize> = incl.iter().map(|m| m.cols()).collect();
    let mut maps = Vec::with_capacity(q.arrow_count());
    for a in 0..q.arrow_count() {
        let (s, t) = (q.arrow(a).source, q.arrow(a).target);
        let mut m = Matrix::zeros(dims[t], dims[s]);
        for j in 0..dims[s] {
            let image = source.map(a).apply(&incl[s].column(j));
            let x = incl[t].solve(&image).expect("kernel is a subrepresentation");
            for (i, xi) in x.into_iter().enumerate() {
                m.set(i, j, xi);
            }
        }
        maps.push(m);
    }
    (Representation::new(p, dims, maps).expect("kernel representation"), incl)
}

/// Independent DTr: minimal projective presentation, Nakayama functor, kernel.
pub fn tau_oracle<F: Field>(p: &AlgebraPresentation, m: &Representation<F>) -> Result<Representation<F>> {
    if let PathCount::Infinite = p.nonzero_path_count() {
        return Err(Error::NotRepresentationFinite(0));
    }
    let q = p.quiver();
    let nv = q.vertex_count();
    for v in 0..nv {
        let (proj, _) = projective_rep::<F>(p, v);
        let end = hom_basis(p, &proj, &proj);
        let rad = end_radical_of(&end)?;
        let to_m = hom_basis(p, &proj, m);
        let from_m = hom_basis(p, m, &proj);
        let split = to_m
            .basis()
            .iter()
            .any(|f| from_m.basis().iter().any(|g| !rad.contains(&g.after(f).expect("composable").flatten())));
        if split {
            return Err(Error::ProjectiveSummand(q.vertex_name(v).to_string()));
        }
    }
    // P0 -> M
    let gens = top_generators(p, m);
    let tops0: Vec<VertexId> = gens.iter().map(|g| g.0).collect();
    let p0 = PathSum::<F>::new(p, &tops0, false);
    let mut blocks: Vec<Matrix<F>> = (0..nv).map(|u| Matrix::zeros(m.dim(u), p0.rep.dim(u))).collect();
    for (j, (v, g)) in gens.iter().enumerate() {
        for (k, path) in p0.paths[j].iter().enumerate() {
            let image = if path.is_empty() { g.clone() } else { m.path_map(path).apply(g) };
            let u = path.last().map(|&a| q.arrow(a).target).unwrap_or(*v);
            let c = p0.coord[&(j, k)];
            for (i, x) in image.into_iter().enumerate() {
                blocks[u].set(i, c, x);
            }
        }
    }
    let pi0 = Morphism::from_blocks(blocks);
    let (k, incl) = kernel_rep(p, &pi0, &p0.rep);
    // P1 -> P0 through the top of the kernel.
    let kgens = top_generators(p, &k);
    let tops1: Vec<VertexId> = kgens.iter().map(|g| g.0).collect();
    let i1 = PathSum::<F>::new(p, &tops1, true);
    let i0 = PathSum::<F>::new(p, &p0.tops, true);
    let mut nu: Vec<Matrix<F>> = (0..nv).map(|u| Matrix::zeros(i0.rep.dim(u), i1.rep.dim(u))).collect();
    for (i, (w, kv)) in kgens.iter().enumerate() {
        let element = incl[*w].apply(kv);
        for (j, _) in p0.tops.iter().enumerate() {
            for (qi, qpath) in p0.paths[j].iter().enumerate() {
                let qend = qpath.last().map(|&a| q.arrow(a).target).unwrap_or(p0.tops[j]);
                if qend != *w {
                    continue;
                }
                let c = element[p0.coord[&(j, qi)]].clone();
                if c.is_zero() {
                    continue;
                }
                // p* -> c s* whenever p = s q.
                for (pi, ppath) in i1.paths[i].iter().enumerate() {
                    if ppath.len() < qpath.len() || &ppath[ppath.len() - qpath.len()..] != qpath.as_slice() {
                        continue;
                    }
                    let s = &ppath[..ppath.len() - qpath.len()];
                    let Some(si) = i0.paths[j].iter().position(|x| x.as_slice() == s) else { continue };
                    let u = ppath.first().map(|&a| q.arrow(a).source).unwrap_or(*w);
                    let (row, col) = (i0.coord[&(j, si)], i1.coord[&(i, pi)]);
                    let cur = nu[u].get(row, col).clone();
                    nu[u].set(row, col, cur + c.clone());
                }
            }
        }
    }
    let nu = Morphism::from_blocks(nu);
    nu.check_intertwining(p, &i1.rep, &i0.rep)?;
    Ok(kernel_rep(p, &nu, &i1.rep).0)
}

/// Whether `rep` is isomorphic to the indecomposable string module `m`.
pub fn matches_string_module<F: Field>(p: &AlgebraPresentation, rep: &Representation<F>, m: &StringModule<F>) -> bool {
    crate::modules::is_isomorphic(p, rep, m.rep())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TauOrbit<F> {
    pub modules: Vec<StringModule<F>>,
    /// The last module is projective, so the orbit cannot continue.
    pub reached_projective: bool,
}

pub fn tau_orbit<F: Field>(p: &AlgebraPresentation, m: &StringModule<F>, steps: usize) -> Result<TauOrbit<F>> {
    let ctx = ArContext::new(p)?;
    let q = p.quiver();
    let mut modules = vec![realize::<F>(p, &canonicalize(q, m.word()))?];
    for _ in 0..steps {
        let cur = modules.last().unwrap();
        if ctx.is_projective(cur.word()) {
            break;
        }
        let next = realize::<F>(p, &ctx.tau_word(cur.word())?)?;
        let oracle = tau_oracle(p, cur.rep())?;
        if !matches_string_module(p, &oracle, &next) {
            return Err(Error::Inconsistency(format!("tau of {} disagrees with the oracle", cur.word().format(q))));
        }
        modules.push(next);
    }
    let reached_projective = ctx.is_projective(modules.last().unwrap().word());
    Ok(TauOrbit { modules, reached_projective })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArNode<F> {
    pub module: StringModule<F>,
    pub projective: Option<VertexId>,
    pub injective: Option<VertexId>,
}

impl<F: Field> ArNode<F> {
    pub fn word(&self) -> &StringWord {
        self.module.word()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArArrow<F> {
    pub source: usize,
    pub target: usize,
    pub map: Morphism<F>,
}

/// A knitted Auslander-Reiten quiver.
#[derive(Clone, Debug)]
pub struct ArQuiver<F> {
    presentation: AlgebraPresentation,
    nodes: Vec<ArNode<F>>,
    arrows: Vec<ArArrow<F>>,
    tau: Vec<Option<usize>>,
    tau_inv: Vec<Option<usize>>,
    meshes: Vec<AlmostSplitSequence<F>>,
    index: HashMap<StringWord, usize>,
}

impl<F: Field> ArQuiver<F> {
    pub fn presentation(&self) -> &AlgebraPresentation {
        &self.presentation
    }

    pub fn nodes(&self) -> &[ArNode<F>] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &ArNode<F> {
        &self.nodes[i]
    }

    pub fn arrows(&self) -> &[ArArrow<F>] {
        &self.arrows
    }

    pub fn meshes(&self) -> &[AlmostSplitSequence<F>] {
        &self.meshes
    }

    pub fn tau(&self, i: usize) -> Option<usize> {
        self.tau[i]
    }

    pub fn tau_inverse(&self, i: usize) -> Option<usize> {
        self.tau_inv[i]
    }

    /// Node of a string in either orientation.
    pub fn find(&self, w: &StringWord) -> Option<usize> {
        self.index.get(&canonicalize(self.presentation.quiver(), w)).copied()
    }

    pub fn find_text(&self, walk: &str) -> Result<usize> {
        let w = StringWord::parse(&self.presentation, walk)?;
        self.find(&w).ok_or_else(|| Error::NodeNotFound(walk.to_string()))
    }

    pub fn label(&self, i: usize) -> String {
        self.nodes[i].word().format(self.presentation.quiver())
    }

    pub fn arrows_between(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&k| self.arrows[k].source == x && self.arrows[k].target == y).collect()
    }

    pub fn successors(&self, x: usize) -> Vec<usize> {
        self.arrows.iter().filter(|a| a.source == x).map(|a| a.target).collect()
    }

    pub fn to_json(&self) -> Value {
        let q = self.presentation.quiver();
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                json!({
                    "index": i,
                    "word": n.word().format(q),
                    "dims": n.module.rep().dims(),
                    "projective": n.projective.map(|v| q.vertex_name(v).to_string()),
                    "injective": n.injective.map(|v| q.vertex_name(v).to_string()),
                })
            })
            .collect();
        let arrows: Vec<Value> = self
            .arrows
            .iter()
            .map(|a| json!({ "source": a.source, "target": a.target, "mono": a.map.is_mono(), "epi": a.map.is_epi() }))
            .collect();
        let tau: Vec<Value> = (0..self.nodes.len())
            .filter_map(|i| self.tau[i].map(|t| json!({ "node": i, "tau": t })))
            .collect();
        json!({ "nodes": nodes, "arrows": arrows, "tauPairs": tau })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph AR {\n  rankdir=LR;\n  node [shape=plaintext];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let mut label = self.label(i);
            if n.projective.is_some() {
                label = format!("|{label}");
            }
            if n.injective.is_some() {
                label = format!("{label}|");
            }
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", label.replace('"', "\\\""));
        }
        for a in &self.arrows {
            let _ = writeln!(s, "  n{} -> n{};", a.source, a.target);
        }
        for (i, t) in self.tau.iter().enumerate() {
            if let Some(t) = t {
                let _ = writeln!(s, "  n{t} -> n{i} [style=dotted, arrowhead=none, constraint=false];");
            }
        }
        s.push_str("}\n");
        s
    }
}

pub fn knit<F: Field>(p: &AlgebraPresentation) -> Result<ArQuiver<F>> {
    let ctx = ArContext::new(p)?;
    if p.nonzero_path_count() == PathCount::Infinite {
        return Err(Error::NotRepresentationFinite(0));
    }
    let q = p.quiver();
    let words = enumerate_strings(p, None)?;
    let mut nodes = Vec::with_capacity(words.len());
    let mut index = HashMap::new();
    for (i, w) in words.iter().enumerate() {
        index.insert(w.clone(), i);
        nodes.push(ArNode { module: realize::<F>(p, w)?, projective: ctx.projective_vertex(w), injective: ctx.injective_vertex(w) });
    }
    let locate = |s: &SignedString| -> Result<(usize, bool)> {
        let w = StringWord::from_walk_unchecked(s.walk.clone());
        let c = canonicalize(q, &w);
        let i = *index.get(&c).ok_or_else(|| Error::Inconsistency(format!("{} not enumerated", c.format(q))))?;
        Ok((i, c != w))
    };
    let n = nodes.len();
    let mut arrows: Vec<ArArrow<F>> = Vec::new();
    let mut tau = vec![None; n];
    let mut tau_inv = vec![None; n];
    let mut meshes = Vec::new();
    for y in 0..n {
        if let Some(u) = nodes[y].projective {
            // Radical summands of P(u) = M(p1^- p2), top at position |p1|.
            let (word, split) = standard_projective_walk(&ctx, u)?;
            let len = word.len();
            let (yi, yflip) = locate(&SignedString::new(word.clone()))?;
            debug_assert_eq!(yi, y);
            let ypos = |j: usize| if yflip { len - j } else { j };
            let mut parts = Vec::new();
            if split >= 1 {
                parts.push((word.sub(q, 0, split - 1), 0usize));
            }
            if len > split {
                parts.push((word.sub(q, split + 1, len), split + 1));
            }
            for (sub, offset) in parts {
                let (xi, xflip) = locate(&SignedString::new(sub.clone()))?;
                let m = sub.len();
                let pairs: Vec<(usize, usize)> =
                    (0..=m).map(|i| (if xflip { m - i } else { i }, ypos(offset + i))).collect();
                let map = graph_map(&nodes[xi].module, &nodes[y].module, &pairs);
                map.check_intertwining(p, nodes[xi].module.rep(), nodes[y].module.rep())?;
                arrows.push(ArArrow { source: xi, target: y, map });
            }
        } else {
            let seq = ar_sequence_in::<F>(&ctx, nodes[y].word(), Side::EndingAt)?;
            let t = *index.get(seq.left.word()).ok_or_else(|| Error::Inconsistency("tau not enumerated".into()))?;
            tau[y] = Some(t);
            if tau_inv[t].replace(y).is_some() {
                return Err(Error::Inconsistency(format!("tau is not injective at {}", nodes[t].word().format(q))));
            }
            for (k, mid) in seq.middle.iter().enumerate() {
                let xi = *index.get(mid.word()).ok_or_else(|| Error::Inconsistency("middle term not enumerated".into()))?;
                arrows.push(ArArrow { source: xi, target: y, map: seq.right_maps[k].clone() });
            }
            meshes.push(seq);
        }
    }
    arrows.sort_by_key(|a| (a.source, a.target));
    let gamma = ArQuiver { presentation: p.clone(), nodes, arrows, tau, tau_inv, meshes, index };
    gamma.check_invariants(&ctx)?;
    Ok(gamma)
}

fn standard_projective_walk(ctx: &ArContext<'_>, u: VertexId) -> Result<(Walk, usize)> {
    let p = ctx.p;
    let q = p.quiver();
    let mut arms = Vec::new();
    for &a in q.outgoing(u) {
        let mut path = vec![a];
        loop {
            let end = q.arrow(*path.last().unwrap()).target;
            let next = q.outgoing(end).iter().copied().find(|&b| {
                let mut e = path.clone();
                e.push(b);
                !p.has_relation_suffix(&e)
            });
            match next {
                Some(b) => path.push(b),
                None => break,
            }
        }
        arms.push(path);
    }
    let mut letters = Vec::new();
    let split = if arms.len() == 2 { arms[0].len() } else { 0 };
    if arms.len() == 2 {
        letters.extend(arms[0].iter().rev().map(|&a| Letter::inverse_of(a)));
    }
    if let Some(last) = arms.last() {
        letters.extend(last.iter().map(|&a| Letter::direct(a)));
    }
    Ok((Walk::new(q, u, letters)?, split))
}

impl<F: Field> ArQuiver<F> {
    fn check_invariants(&self, ctx: &ArContext<'_>) -> Result<()> {
        let n = self.nodes.len();
        // tau: non-projectives onto non-injectives.
        for i in 0..n {
            if self.nodes[i].projective.is_none() != self.tau[i].is_some() {
                return Err(Error::Inconsistency("tau not defined exactly on non-projectives".into()));
            }
            if self.nodes[i].injective.is_none() != self.tau_inv[i].is_some() {
                return Err(Error::Inconsistency(format!("tau misses non-injective {}", self.label(i))));
            }
        }
        // Arrows out of X are the middle terms of the sequence starting at X.
        for x in 0..n {
            if self.nodes[x].injective.is_some() {
                continue;
            }
            let seq = ar_sequence_in::<F>(ctx, self.nodes[x].word(), Side::StartingAt)?;
            let mut expected: Vec<usize> = seq.middle.iter().map(|m| self.index[m.word()]).collect();
            expected.sort();
            let mut actual = self.successors(x);
            actual.sort();
            if expected != actual {
                return Err(Error::Inconsistency(format!("arrows out of {} disagree with its mesh", self.label(x))));
            }
        }
        // Mesh symmetry.
        for y in 0..n {
            if let Some(t) = self.tau[y] {
                for m in 0..n {
                    if self.arrows_between(m, y).len() != self.arrows_between(t, m).len() {
                        return Err(Error::Inconsistency(format!("mesh symmetry fails at {}", self.label(y))));
                    }
                }
            }
        }
        for a in &self.arrows {
            a.map.check_intertwining(&self.presentation, self.nodes[a.source].module.rep(), self.nodes[a.target].module.rep())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;
    use crate::presentation::parse_presentation;

    const W3: &str = "vertices 1 2 3 4\narrow a 1 -> 1\narrow b1 1 -> 2\narrow b2 2 -> 3\narrow b3 3 -> 4\nrelation a a\nrelation b1 b2\n";

    fn w3() -> AlgebraPresentation {
        parse_presentation(W3).unwrap()
    }

    fn word(p: &AlgebraPresentation, s: &str) -> StringWord {
        StringWord::parse(p, s).unwrap()
    }

    #[test]
    fn w3_translates() {
        let p = w3();
        let ctx = ArContext::new(&p).unwrap();
        let q = p.quiver();
        let t = |s: &str| ctx.tau_word(&word(&p, s)).unwrap().format(q);
        assert_eq!(t("e(3)"), "e(4)");
        assert_eq!(t("e(2)"), "e(3)");
        assert_eq!(t("a b1"), "e(2)");
    }

    #[test]
    fn tau_of_projective_is_an_error() {
        let p = w3();
        let ctx = ArContext::new(&p).unwrap();
        assert!(matches!(ctx.tau_word(&word(&p, "b1^- a b1")), Err(Error::IsProjective(_))));
    }

    #[test]
    fn oracle_agrees_on_w3() {
        let p = w3();
        let ctx = ArContext::new(&p).unwrap();
        for w in enumerate_strings(&p, None).unwrap() {
            let m = realize::<Rational>(&p, &w).unwrap();
            if ctx.is_projective(&w) {
                assert!(matches!(tau_oracle(&p, m.rep()), Err(Error::ProjectiveSummand(_))));
                continue;
            }
            let t = realize::<Rational>(&p, &ctx.tau_word(&w).unwrap()).unwrap();
            let o = tau_oracle(&p, m.rep()).unwrap();
            assert!(matches_string_module(&p, &o, &t), "{}", w.format(p.quiver()));
        }
    }

    #[test]
    fn sequences_in_w3() {
        let p = w3();
        let s = ar_sequence::<Rational>(&p, &word(&p, "e(3)"), Side::EndingAt).unwrap();
        assert_eq!(s.middle.len(), 1);
        assert_eq!(s.middle[0].word().format(p.quiver()), "b3");
        let s = ar_sequence::<Rational>(&p, &word(&p, "b1^- a b1"), Side::StartingAt).unwrap();
        let mids: Vec<String> = s.middle.iter().map(|m| m.word().format(p.quiver())).collect();
        assert!(mids.contains(&"a^- b1".to_string()));
        assert!(ar_sequence::<Rational>(&p, &word(&p, "e(4)"), Side::EndingAt).is_err());
    }

    #[test]
    fn knit_w3() {
        let p = w3();
        let g = knit::<Rational>(&p).unwrap();
        assert_eq!(g.nodes().len(), 12);
        assert_eq!(g.arrows().len(), 16);
    }

    #[test]
    fn w3_census() {
        let p = w3();
        let g = knit::<Rational>(&p).unwrap();
        let n = |s: &str| g.find_text(s).unwrap();
        let (p4, p3, p2, s3, i3, s2) = (n("e(4)"), n("b3"), n("b2 b3"), n("e(3)"), n("b2"), n("e(2)"));
        let (p1, i2, m, i1, tm, s1) = (n("b1^- a b1"), n("a b1"), n("a^- b1"), n("a"), n("b1"), n("e(1)"));
        let mut expected = vec![
            (p4, p3), (p3, p2), (p3, s3), (p2, i3), (s3, i3), (i3, s2), (s2, p1), (p1, i2),
            (p1, m), (i2, i1), (m, i1), (m, tm), (tm, p1), (tm, s1), (i1, s1), (s1, m),
        ];
        expected.sort();
        let mut actual: Vec<(usize, usize)> = g.arrows().iter().map(|a| (a.source, a.target)).collect();
        actual.sort();
        assert_eq!(actual, expected);
        let pairs = [(i3, p3), (s3, p4), (s2, s3), (i2, s2), (i1, p1), (m, tm), (s1, m), (tm, s1)];
        for (x, t) in pairs {
            assert_eq!(g.tau(x), Some(t), "{}", g.label(x));
        }
        assert_eq!((0..12).filter(|&i| g.tau(i).is_some()).count(), 8);
    }

    #[test]
    fn knit_semisimple() {
        let p = parse_presentation("vertices 1 2\n").unwrap();
        let g = knit::<Rational>(&p).unwrap();
        assert_eq!(g.nodes().len(), 2);
        assert!(g.arrows().is_empty());
        assert!((0..2).all(|i| g.tau(i).is_none()));
    }

    #[test]
    fn orbit_stops_at_projective() {
        let p = w3();
        let s2 = realize::<Rational>(&p, &word(&p, "e(2)")).unwrap();
        let o = tau_orbit(&p, &s2, 2).unwrap();
        let names: Vec<String> = o.modules.iter().map(|m| m.word().format(p.quiver())).collect();
        assert_eq!(names, vec!["e(2)", "e(3)", "e(4)"]);
        assert!(o.reached_projective);
    }
}
