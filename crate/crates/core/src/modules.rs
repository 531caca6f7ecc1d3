//! Representations, string modules, morphisms and Hom spaces.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Matrix, Subspace};
use crate::presentation::{AlgebraPresentation, ArrowId, VertexId};
use crate::strings::{canonicalize, Letter, StringWord, Walk};

/// A representation of the bound quiver.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation<F> {
    dims: Vec<usize>,
    maps: Vec<Matrix<F>>,
}

impl<F: Field> Representation<F> {
    /// Checks matrix shapes and that every relation acts as zero.
    pub fn new(p: &AlgebraPresentation, dims: Vec<usize>, maps: Vec<Matrix<F>>) -> Result<Self> {
        let q = p.quiver();
        if dims.len() != q.vertex_count() || maps.len() != q.arrow_count() {
            return Err(Error::ShapeMismatch("dimension vector or map count".into()));
        }
        for (a, m) in maps.iter().enumerate() {
            let arrow = q.arrow(a);
            if m.rows() != dims[arrow.target] || m.cols() != dims[arrow.source] {
                return Err(Error::ShapeMismatch(format!("map of arrow {}", arrow.label)));
            }
        }
        let rep = Representation { dims, maps };
        for r in p.relations() {
            if !rep.path_map(&r.0).is_zero() {
                return Err(Error::InvalidString(format!("relation {} does not vanish", p.relation_text(r))));
            }
        }
        Ok(rep)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, v: VertexId) -> usize {
        self.dims[v]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn map(&self, a: ArrowId) -> &Matrix<F> {
        &self.maps[a]
    }

    /// Composite action of a nonempty path in diagram order.
    pub fn path_map(&self, path: &[ArrowId]) -> Matrix<F> {
        let mut acc = self.maps[path[0]].clone();
        for &a in &path[1..] {
            acc = self.maps[a].mul(&acc).expect("composable path");
        }
        acc
    }

    pub fn to_json(&self, p: &AlgebraPresentation) -> Value {
        let q = p.quiver();
        let dims: BTreeMap<String, usize> = (0..q.vertex_count()).map(|v| (q.vertex_name(v).to_string(), self.dims[v])).collect();
        let maps: BTreeMap<String, Value> =
            (0..q.arrow_count()).map(|a| (q.arrow(a).label.clone(), matrix_json(&self.maps[a]))).collect();
        json!({ "dims": dims, "maps": maps })
    }
}

pub fn matrix_json<F: Field>(m: &Matrix<F>) -> Value {
    Value::Array(
        (0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(|x| Value::String(x.to_string())).collect())).collect(),
    )
}

/// The module M(C) of a string C with basis z_0..z_n along the walk.
#[derive(Clone, Debug, PartialEq)]
pub struct StringModule<F> {
    word: StringWord,
    rep: Representation<F>,
    /// Position i lives at `basis[i] = (vertex, coordinate)`.
    basis: Vec<(VertexId, usize)>,
}

impl<F: Field> StringModule<F> {
    pub fn word(&self) -> &StringWord {
        &self.word
    }

    pub fn rep(&self) -> &Representation<F> {
        &self.rep
    }

    pub fn basis(&self) -> &[(VertexId, usize)] {
        &self.basis
    }

    pub fn into_rep(self) -> Representation<F> {
        self.rep
    }
}

/// Realize a string; a direct letter between positions i-1 and i sends
/// z_{i-1} to z_i, an inverse one sends z_i to z_{i-1}.
pub fn realize<F: Field>(p: &AlgebraPresentation, w: &StringWord) -> Result<StringModule<F>> {
    let w = StringWord::new(p, w.walk().clone())?;
    let q = p.quiver();
    let walk = w.walk();
    let mut dims = vec![0usize; q.vertex_count()];
    let mut basis = Vec::with_capacity(walk.len() + 1);
    for i in 0..=walk.len() {
        let v = walk.vertex_at(q, i);
        basis.push((v, dims[v]));
        dims[v] += 1;
    }
    let mut maps: Vec<Matrix<F>> =
        (0..q.arrow_count()).map(|a| Matrix::zeros(dims[q.arrow(a).target], dims[q.arrow(a).source])).collect();
    for (i, l) in walk.letters().iter().enumerate() {
        let (from, to) = if l.inverse { (i + 1, i) } else { (i, i + 1) };
        maps[l.arrow].set(basis[to].1, basis[from].1, F::one());
    }
    let rep = Representation::new(p, dims, maps)?;
    Ok(StringModule { word: w, rep, basis })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum StandardKind {
    Projective,
    Injective,
    Simple,
}

/// Maximal nonzero path starting with `first`.
fn maximal_path_from(p: &AlgebraPresentation, first: ArrowId) -> Result<Vec<ArrowId>> {
    let q = p.quiver();
    let mut path = vec![first];
    loop {
        let end = q.arrow(*path.last().unwrap()).target;
        let next: Vec<ArrowId> = q
            .outgoing(end)
            .iter()
            .copied()
            .filter(|&a| {
                let mut ext = path.clone();
                ext.push(a);
                !p.has_relation_suffix(&ext)
            })
            .collect();
        match next.len() {
            0 => return Ok(path),
            1 => path.push(next[0]),
            _ => return Err(Error::NotStringAlgebra(format!("two continuations after {}", q.arrow(path[path.len() - 1]).label))),
        }
        if path.len() > p.quiver().arrow_count() * p.max_relation_len().max(1) + 1 {
            return Err(Error::NotRepresentationFinite(path.len()));
        }
    }
}

/// Maximal nonzero path ending with `last`.
fn maximal_path_to(p: &AlgebraPresentation, last: ArrowId) -> Result<Vec<ArrowId>> {
    let q = p.quiver();
    let mut path = vec![last];
    loop {
        let start = q.arrow(path[0]).source;
        let prev: Vec<ArrowId> = q
            .incoming(start)
            .iter()
            .copied()
            .filter(|&a| {
                let mut ext = vec![a];
                ext.extend(path.iter().copied());
                !p.contains_relation(&ext[..ext.len().min(p.max_relation_len().max(2))])
            })
            .collect();
        match prev.len() {
            0 => return Ok(path),
            1 => path.insert(0, prev[0]),
            _ => return Err(Error::NotStringAlgebra(format!("two predecessors before {}", q.arrow(path[0]).label))),
        }
        if path.len() > p.quiver().arrow_count() * p.max_relation_len().max(1) + 1 {
            return Err(Error::NotRepresentationFinite(path.len()));
        }
    }
}

/// Canonical word of P(v), I(v) or S(v).
pub fn standard_word(p: &AlgebraPresentation, v: VertexId, kind: StandardKind) -> Result<StringWord> {
    let q = p.quiver();
    if v >= q.vertex_count() {
        return Err(Error::UnknownVertex(format!("#{v}")));
    }
    let letters: Vec<Letter> = match kind {
        StandardKind::Simple => Vec::new(),
        StandardKind::Projective => {
            let arms: Vec<Vec<ArrowId>> = q.outgoing(v).iter().map(|&a| maximal_path_from(p, a)).collect::<Result<_>>()?;
            let mut letters = Vec::new();
            if arms.len() == 2 {
                letters.extend(arms[0].iter().rev().map(|&a| Letter::inverse_of(a)));
            }
            if let Some(last) = arms.last() {
                letters.extend(last.iter().map(|&a| Letter::direct(a)));
            }
            letters
        }
        StandardKind::Injective => {
            let arms: Vec<Vec<ArrowId>> = q.incoming(v).iter().map(|&a| maximal_path_to(p, a)).collect::<Result<_>>()?;
            let mut letters = Vec::new();
            if let Some(first) = arms.first() {
                letters.extend(first.iter().map(|&a| Letter::direct(a)));
            }
            if arms.len() == 2 {
                letters.extend(arms[1].iter().rev().map(|&a| Letter::inverse_of(a)));
            }
            letters
        }
    };
    let walk = Walk::new(q, v, letters)?;
    let word = StringWord::new(p, walk)?;
    Ok(canonicalize(q, &word))
}

pub fn standard_module<F: Field>(p: &AlgebraPresentation, v: VertexId, kind: StandardKind) -> Result<StringModule<F>> {
    realize(p, &standard_word(p, v, kind)?)
}

/// P(v) on the basis of nonzero paths from v.
pub fn projective_rep<F: Field>(p: &AlgebraPresentation, v: VertexId) -> (Representation<F>, Vec<Vec<ArrowId>>) {
    let q = p.quiver();
    let paths = p.paths_from(v);
    let end = |path: &Vec<ArrowId>| path.last().map(|&a| q.arrow(a).target).unwrap_or(v);
    let mut dims = vec![0; q.vertex_count()];
    let mut coord = Vec::with_capacity(paths.len());
    for path in &paths {
        let u = end(path);
        coord.push(dims[u]);
        dims[u] += 1;
    }
    let mut maps: Vec<Matrix<F>> =
        (0..q.arrow_count()).map(|a| Matrix::zeros(dims[q.arrow(a).target], dims[q.arrow(a).source])).collect();
    for (i, path) in paths.iter().enumerate() {
        for &a in q.outgoing(end(path)) {
            let mut ext = path.clone();
            ext.push(a);
            if let Some(j) = paths.iter().position(|x| *x == ext) {
                maps[a].set(coord[j], coord[i], F::one());
            }
        }
    }
    (Representation { dims, maps }, paths)
}

/// I(v) on the basis dual to nonzero paths ending at v.
pub fn injective_rep<F: Field>(p: &AlgebraPresentation, v: VertexId) -> (Representation<F>, Vec<Vec<ArrowId>>) {
    let q = p.quiver();
    let paths = p.paths_to(v);
    let start = |path: &Vec<ArrowId>| path.first().map(|&a| q.arrow(a).source).unwrap_or(v);
    let mut dims = vec![0; q.vertex_count()];
    let mut coord = Vec::with_capacity(paths.len());
    for path in &paths {
        let u = start(path);
        coord.push(dims[u]);
        dims[u] += 1;
    }
    let mut maps: Vec<Matrix<F>> =
        (0..q.arrow_count()).map(|a| Matrix::zeros(dims[q.arrow(a).target], dims[q.arrow(a).source])).collect();
    for (i, path) in paths.iter().enumerate() {
        if let Some((&a, rest)) = path.split_first() {
            let j = paths.iter().position(|x| x.as_slice() == rest).expect("suffix of a nonzero path is nonzero");
            maps[a].set(coord[j], coord[i], F::one());
        }
    }
    (Representation { dims, maps }, paths)
}

/// A morphism given by one block per vertex (target dim x source dim).
#[derive(Clone, Debug, PartialEq)]
pub struct Morphism<F> {
    blocks: Vec<Matrix<F>>,
}

impl<F: Field> Morphism<F> {
    pub fn from_blocks(blocks: Vec<Matrix<F>>) -> Self {
        Morphism { blocks }
    }

    pub fn zero(source: &[usize], target: &[usize]) -> Self {
        Morphism { blocks: source.iter().zip(target).map(|(&s, &t)| Matrix::zeros(t, s)).collect() }
    }

    pub fn identity(dims: &[usize]) -> Self {
        Morphism { blocks: dims.iter().map(|&d| Matrix::identity(d)).collect() }
    }

    pub fn blocks(&self) -> &[Matrix<F>] {
        &self.blocks
    }

    pub fn block(&self, v: VertexId) -> &Matrix<F> {
        &self.blocks[v]
    }

    pub fn source_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.cols()).collect()
    }

    pub fn target_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.rows()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &Morphism<F>) -> Result<Morphism<F>> {
        if self.blocks.len() != f.blocks.len() {
            return Err(Error::ShapeMismatch("different vertex counts".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&f.blocks)
            .enumerate()
            .map(|(v, (g, f))| g.mul(f).ok_or_else(|| Error::ShapeMismatch(format!("blocks at vertex {v}"))))
            .collect::<Result<_>>()?;
        Ok(Morphism { blocks })
    }

    pub fn add(&self, other: &Morphism<F>) -> Result<Morphism<F>> {
        if self.source_dims() != other.source_dims() || self.target_dims() != other.target_dims() {
            return Err(Error::ShapeMismatch("sum of morphisms with different shapes".into()));
        }
        Ok(Morphism { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.add(b)).collect() })
    }

    pub fn scale(&self, s: &F) -> Morphism<F> {
        Morphism { blocks: self.blocks.iter().map(|b| b.scale(s)).collect() }
    }

    pub fn neg(&self) -> Morphism<F> {
        self.scale(&(-F::one()))
    }

    /// Row-major blocks concatenated in vertex order.
    pub fn flatten(&self) -> Vec<F> {
        self.blocks.iter().flat_map(|b| b.data().iter().cloned()).collect()
    }

    pub fn unflatten(source: &[usize], target: &[usize], v: &[F]) -> Morphism<F> {
        let mut at = 0;
        let mut blocks = Vec::with_capacity(source.len());
        for (&s, &t) in source.iter().zip(target) {
            blocks.push(Matrix::from_rows(t, s, v[at..at + s * t].to_vec()));
            at += s * t;
        }
        assert_eq!(at, v.len(), "flattened length");
        Morphism { blocks }
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.rank()).sum()
    }

    pub fn is_mono(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.cols())
    }

    pub fn is_epi(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.rows())
    }

    pub fn check_intertwining(&self, p: &AlgebraPresentation, source: &Representation<F>, target: &Representation<F>) -> Result<()> {
        let q = p.quiver();
        if self.source_dims() != source.dims() || self.target_dims() != target.dims() {
            return Err(Error::ShapeMismatch("morphism blocks do not match the representations".into()));
        }
        for a in 0..q.arrow_count() {
            let arrow = q.arrow(a);
            let lhs = self.blocks[arrow.target].mul(source.map(a)).expect("shape");
            let rhs = target.map(a).mul(&self.blocks[arrow.source]).expect("shape");
            if lhs != rhs {
                return Err(Error::IntertwiningViolation(arrow.label.clone()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self, p: &AlgebraPresentation) -> Value {
        let q = p.quiver();
        let blocks: BTreeMap<String, Value> =
            (0..q.vertex_count()).map(|v| (q.vertex_name(v).to_string(), matrix_json(&self.blocks[v]))).collect();
        json!({ "blocks": blocks })
    }
}

/// Sends position i of `source` to position j of `target` for each pair.
pub fn graph_map<F: Field>(source: &StringModule<F>, target: &StringModule<F>, pairs: &[(usize, usize)]) -> Morphism<F> {
    let mut m = Morphism::zero(source.rep.dims(), target.rep.dims());
    for &(i, j) in pairs {
        let (v, si) = source.basis[i];
        let (w, tj) = target.basis[j];
        assert_eq!(v, w, "graph map must respect vertices");
        m.blocks[v].set(tj, si, F::one());
    }
    m
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomBasis<F> {
    source_dims: Vec<usize>,
    target_dims: Vec<usize>,
    basis: Vec<Morphism<F>>,
    span: Subspace<F>,
}

impl<F: Field> HomBasis<F> {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Morphism<F>] {
        &self.basis
    }

    /// The Hom space inside the flattened coordinate space.
    pub fn span(&self) -> &Subspace<F> {
        &self.span
    }

    pub fn source_dims(&self) -> &[usize] {
        &self.source_dims
    }

    pub fn target_dims(&self) -> &[usize] {
        &self.target_dims
    }
}

/// Ambient size of flattened Hom coordinates.
pub fn flat_len(source: &[usize], target: &[usize]) -> usize {
    source.iter().zip(target).map(|(s, t)| s * t).sum()
}

pub fn hom_basis<F: Field>(p: &AlgebraPresentation, m: &Representation<F>, n: &Representation<F>) -> HomBasis<F> {
    let q = p.quiver();
    let sd = m.dims().to_vec();
    let td = n.dims().to_vec();
    let mut offset = Vec::with_capacity(sd.len());
    let mut total = 0;
    for v in 0..sd.len() {
        offset.push(total);
        total += sd[v] * td[v];
    }
    let var = |v: usize, i: usize, j: usize| offset[v] + i * sd[v] + j;
    let mut rows: Vec<Vec<F>> = Vec::new();
    for a in 0..q.arrow_count() {
        let (u, w) = (q.arrow(a).source, q.arrow(a).target);
        let ma = m.map(a);
        let na = n.map(a);
        for i in 0..td[w] {
            for j in 0..sd[u] {
                let mut row = vec![F::zero(); total];
                for k in 0..sd[w] {
                    let c = ma.get(k, j);
                    if !c.is_zero() {
                        row[var(w, i, k)] = row[var(w, i, k)].clone() + c.clone();
                    }
                }
                for k in 0..td[u] {
                    let c = na.get(i, k);
                    if !c.is_zero() {
                        row[var(u, k, j)] = row[var(u, k, j)].clone() - c.clone();
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let kernel = if rows.is_empty() {
        Subspace::full(total)
    } else {
        let nrows = rows.len();
        let system = Matrix::from_rows(nrows, total, rows.into_iter().flatten().collect());
        Subspace::span(total, system.kernel())
    };
    let basis = kernel.basis().iter().map(|v| Morphism::unflatten(&sd, &td, v)).collect();
    HomBasis { source_dims: sd, target_dims: td, basis, span: kernel }
}

/// `fs[k-1] ∘ … ∘ fs[0]`.
pub fn compose_chain<F: Field>(fs: &[Morphism<F>]) -> Result<Morphism<F>> {
    let (first, rest) = fs.split_first().ok_or_else(|| Error::ShapeMismatch("empty chain".into()))?;
    let mut acc = first.clone();
    for f in rest {
        if f.source_dims() != acc.target_dims() {
            return Err(Error::ShapeMismatch("consecutive morphisms do not compose".into()));
        }
        acc = f.after(&acc)?;
    }
    Ok(acc)
}

/// Matrices of left multiplication on End(M) in its Hom basis.
fn left_multiplications<F: Field>(end: &HomBasis<F>) -> Vec<Matrix<F>> {
    let r = end.dimension();
    end.basis()
        .iter()
        .map(|x| {
            let cols: Vec<Vec<F>> = end
                .basis()
                .iter()
                .map(|b| end.span().coordinates(&x.after(b).expect("endomorphisms compose").flatten()).expect("End is closed"))
                .collect();
            Matrix::from_columns(r, &cols)
        })
        .collect()
}

fn is_nilpotent<F: Field>(m: &Matrix<F>) -> bool {
    let mut acc = m.clone();
    for _ in 0..m.rows() {
        acc = acc.mul(m).expect("square");
    }
    acc.is_zero()
}

/// Jacobson radical of End(M) in flattened coordinates.
pub fn end_radical<F: Field>(p: &AlgebraPresentation, m: &Representation<F>) -> Result<Subspace<F>> {
    let end = hom_basis(p, m, m);
    end_radical_of(&end)
}

pub(crate) fn end_radical_of<F: Field>(end: &HomBasis<F>) -> Result<Subspace<F>> {
    let r = end.dimension();
    let ambient = end.span().ambient();
    if r == 0 {
        return Ok(Subspace::zero(ambient));
    }
    let lm = left_multiplications(end);
    let combine = |coeffs: &[F]| -> Vec<F> {
        let mut v = vec![F::zero(); ambient];
        for (c, b) in coeffs.iter().zip(end.basis()) {
            if c.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(b.flatten()) {
                *x = x.clone() + c.clone() * y;
            }
        }
        v
    };
    let p = F::CHARACTERISTIC;
    if p == 0 || p > r as u64 {
        // rad = left kernel of (x, y) -> tr(L_x L_y).
        let mut gram = Matrix::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                gram.set(i, j, lm[i].mul(&lm[j]).expect("square").trace());
            }
        }
        let vectors: Vec<Vec<F>> = gram.transpose().kernel().iter().map(|c| combine(c)).collect();
        return Ok(Subspace::span(ambient, vectors));
    }
    // Small characteristic: only local endomorphism rings are handled.
    let elements = F::elements().ok_or_else(|| Error::CharacteristicTooSmall(p, "field too large to enumerate".into()))?;
    let mut chi = Vec::with_capacity(r);
    for l in &lm {
        let lambda = elements
            .iter()
            .find(|x| is_nilpotent(&l.add(&Matrix::identity(r).scale(&(-(*x).clone())))))
            .ok_or_else(|| Error::CharacteristicTooSmall(p, "endomorphism ring is not local".into()))?;
        chi.push(lambda.clone());
    }
    let functional = Matrix::from_rows(1, r, chi);
    let kernel = functional.kernel();
    for c in &kernel {
        let mut l = Matrix::zeros(r, r);
        for (ci, li) in c.iter().zip(&lm) {
            l = l.add(&li.scale(ci));
        }
        if !is_nilpotent(&l) {
            return Err(Error::CharacteristicTooSmall(p, "endomorphism ring is not local".into()));
        }
    }
    Ok(Subspace::span(ambient, kernel.iter().map(|c| combine(c))))
}

/// Whether the indecomposable `n` (with local End) is a direct summand of `m`.
fn has_local_summand<F: Field>(p: &AlgebraPresentation, m: &Representation<F>, n: &Representation<F>, rad_n: &Subspace<F>) -> bool {
    let to_m = hom_basis(p, n, m);
    let from_m = hom_basis(p, m, n);
    to_m.basis()
        .iter()
        .any(|f| from_m.basis().iter().any(|g| !rad_n.contains(&g.after(f).expect("composable").flatten())))
}

fn is_invertible<F: Field>(f: &Morphism<F>) -> bool {
    f.blocks().iter().all(|b| b.rows() == b.cols() && b.rank() == b.rows())
}

pub fn is_isomorphic<F: Field>(p: &AlgebraPresentation, m: &Representation<F>, n: &Representation<F>) -> bool {
    if m.dims() != n.dims() {
        return false;
    }
    for (a, b) in [(m, n), (n, m)] {
        let end = hom_basis(p, b, b);
        if let Ok(rad) = end_radical_of(&end) {
            if end.dimension() == rad.dim() + 1 {
                return has_local_summand(p, a, b, &rad);
            }
        }
    }
    // Neither side is known to be indecomposable.
    let hom = hom_basis(p, m, n);
    if hom.basis().iter().any(is_invertible) {
        return true;
    }
    let mut acc = Morphism::zero(m.dims(), n.dims());
    for (k, b) in hom.basis().iter().enumerate() {
        acc = acc.add(&b.scale(&F::from_i64(k as i64 + 1))).expect("same shape");
        if is_invertible(&acc) {
            return true;
        }
    }
    false
}
