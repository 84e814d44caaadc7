//! The graph-product Fock space truncated at a word-length depth D, the
//! leg-shuffle unitaries between tensor factorizations, the left regular
//! representation λ with its creation/diagonal/annihilation decomposition,
//! and the vacuum state.
//!
//! All operators are compressions of the untruncated ones; identity tests
//! declare a margin m and only quantify over vectors supported on words of
//! length ≤ D − m, where truncation artifacts provably cannot occur.

use crate::coxeter::*;
use crate::linalg::*;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("basis size {0} exceeds the configured cap {1}")]
    TooLarge(usize, usize),
    #[error("vertex dimension must be at least 1")]
    BadVertexDim,
    #[error("vertex count mismatch between graph and vertex data")]
    VertexCountMismatch,
    #[error("word error: {0}")]
    Word(#[from] CoxeterError),
    #[error("pure tensor leg {0} is not centered (⟨aξ,ξ⟩ = {1:.3e})")]
    NotCentered(usize, f64),
    #[error("leg count or dimension does not match the word")]
    LegMismatch,
    #[error("word {0} exceeds the truncation depth")]
    BeyondDepth(Word),
    #[error("side condition violated: {0}")]
    SideCondition(String),
}

/// Truncated Fock space ⊕_{|w| ≤ D} ℋ̊_w. Each vertex Hilbert space ℋ_v
/// has an orthonormal basis whose index-0 vector is the distinguished unit
/// vector ξ_v; ℋ̊_v is spanned by the remaining vdims[v] − 1 vectors.
/// Word blocks are ordered ShortLex; multi-indices lexicographically.
#[derive(Debug, Clone)]
pub struct FockSpace {
    pub graph: SimpleGraph,
    pub vdims: Vec<usize>,
    pub depth: usize,
    pub words: Vec<Word>,
    word_index: HashMap<Word, usize>,
    offsets: Vec<usize>,
    dim: usize,
}

pub const DEFAULT_BASIS_CAP: usize = 20_000;

impl FockSpace {
    pub fn build(
        graph: SimpleGraph,
        vdims: Vec<usize>,
        depth: usize,
        cap: usize,
    ) -> Result<FockSpace, FockError> {
        if vdims.len() != graph.vertex_count() {
            return Err(FockError::VertexCountMismatch);
        }
        if vdims.iter().any(|&h| h < 1) {
            return Err(FockError::BadVertexDim);
        }
        let words = graph.enumerate_words(depth);
        let mut offsets = Vec::with_capacity(words.len());
        let mut word_index = HashMap::new();
        let mut dim = 0usize;
        for (i, w) in words.iter().enumerate() {
            offsets.push(dim);
            word_index.insert(w.clone(), i);
            let sz: usize = w.letters().iter().map(|&v| vdims[v] - 1).product();
            dim += sz;
            if dim > cap {
                return Err(FockError::TooLarge(dim, cap));
            }
        }
        Ok(FockSpace {
            graph,
            vdims,
            depth,
            words,
            word_index,
            offsets,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Centered dimension of a vertex.
    pub fn cdim(&self, v: Letter) -> usize {
        self.vdims[v] - 1
    }

    pub fn block_size(&self, w: &Word) -> usize {
        w.letters().iter().map(|&v| self.cdim(v)).product()
    }

    /// (offset, size) of a word block, if the word is within depth.
    pub fn block(&self, w: &Word) -> Option<(usize, usize)> {
        self.word_index
            .get(w)
            .map(|&i| (self.offsets[i], self.block_size(w)))
    }

    pub fn vacuum(&self) -> CVec {
        let mut v = CVec::zeros(self.dim);
        v[0] = cr(1.0);
        v
    }

    /// Word owning a basis index.
    pub fn word_at(&self, idx: usize) -> &Word {
        let i = match self.offsets.binary_search(&idx) {
            Ok(mut i) => {
                // Skip over empty blocks sharing the same offset.
                while i + 1 < self.offsets.len() && self.offsets[i + 1] == idx {
                    i += 1;
                }
                i
            }
            Err(i) => i - 1,
        };
        &self.words[i]
    }

    /// Decode the centered multi-index (entries 1-based into each ℋ_v) of
    /// a position inside a word block.
    pub fn decode_multi_index(&self, w: &Word, pos: usize) -> Vec<usize> {
        let mut digits = vec![0usize; w.len()];
        let mut rem = pos;
        for k in (0..w.len()).rev() {
            let r = self.cdim(w.letters()[k]);
            digits[k] = rem % r + 1;
            rem /= r;
        }
        digits
    }

    /// Inverse of `decode_multi_index`.
    pub fn encode_multi_index(&self, w: &Word, midx: &[usize]) -> usize {
        let mut pos = 0usize;
        for (k, &i) in midx.iter().enumerate() {
            let r = self.cdim(w.letters()[k]);
            debug_assert!(i >= 1 && i <= r);
            pos = pos * r + (i - 1);
        }
        pos
    }

    pub fn basis_index(&self, w: &Word, midx: &[usize]) -> Option<usize> {
        self.block(w)
            .map(|(off, _)| off + self.encode_multi_index(w, midx))
    }

    /// Pure tensor with given per-letter centered coefficient vectors,
    /// embedded into the word block (block coordinates).
    pub fn pure_block_vector(&self, w: &Word, legs: &[CVec]) -> Result<CVec, FockError> {
        if legs.len() != w.len() {
            return Err(FockError::LegMismatch);
        }
        for (k, leg) in legs.iter().enumerate() {
            if leg.len() != self.cdim(w.letters()[k]) {
                return Err(FockError::LegMismatch);
            }
        }
        let sz = self.block_size(w);
        let mut out = CVec::zeros(sz);
        for pos in 0..sz {
            let midx = self.decode_multi_index(w, pos);
            let mut coef = cr(1.0);
            for (k, &i) in midx.iter().enumerate() {
                coef *= legs[k][i - 1];
            }
            out[pos] = coef;
        }
        Ok(out)
    }

    /// Embed a block vector into the full space.
    pub fn embed_block(&self, w: &Word, vec: &CVec) -> Result<CVec, FockError> {
        let (off, sz) = self
            .block(w)
            .ok_or_else(|| FockError::BeyondDepth(w.clone()))?;
        assert_eq!(vec.len(), sz);
        let mut out = CVec::zeros(self.dim);
        for i in 0..sz {
            out[off + i] = vec[i];
        }
        Ok(out)
    }

    /// The shuffle unitary on pure tensors: given block vectors for words
    /// whose product is reduced, permutes the tensor legs into the
    /// representative order of the product (stable for equal letters).
    /// Returns the product word and its block vector.
    pub fn shuffle(&self, parts: &[(Word, CVec)]) -> Result<(Word, CVec), FockError> {
        let ws: Vec<&Word> = parts.iter().map(|(w, _)| w).collect();
        let (prod, perm) = shuffle_perm(&self.graph, &ws)?;
        let out_sz = self.block_size(&prod);
        let mut out = CVec::zeros(out_sz);
        // Cartesian product over the source block positions.
        let sizes: Vec<usize> = parts.iter().map(|(w, _)| self.block_size(w)).collect();
        let total: usize = sizes.iter().product();
        for flat in 0..total {
            let mut rem = flat;
            let mut coef = cr(1.0);
            let mut concat: Vec<usize> = Vec::new();
            for ((w, vec), &sz) in parts.iter().zip(&sizes) {
                let pos = rem % sz;
                rem /= sz;
                coef *= vec[pos];
                concat.extend(self.decode_multi_index(w, pos));
            }
            if coef.norm() == 0.0 {
                continue;
            }
            let mut dest = vec![0usize; prod.len()];
            for (src, &i) in concat.iter().enumerate() {
                dest[perm[src]] = i;
            }
            out[self.encode_multi_index(&prod, &dest)] += coef;
        }
        Ok((prod, out))
    }

    /// Diagonal projection onto the word blocks satisfying a predicate.
    pub fn proj_words(&self, pred: impl Fn(&Word) -> bool) -> CMat {
        let mut m = zeros(self.dim, self.dim);
        for (i, w) in self.words.iter().enumerate() {
            if pred(w) {
                let off = self.offsets[i];
                for k in 0..self.block_size(w) {
                    m[(off + k, off + k)] = cr(1.0);
                }
            }
        }
        m
    }

    /// Projection onto words of length ≤ depth − margin (the subspace on
    /// which compressed identities are asserted).
    pub fn safe_proj(&self, margin: usize) -> CMat {
        let cut = self.depth.saturating_sub(margin);
        self.proj_words(|w| w.len() <= cut)
    }

    /// Projection onto the complement of ℋ^L(v): the words starting with v.
    pub fn p_v(&self, v: Letter) -> CMat {
        let vw = self.graph.single(v);
        self.proj_words(|w| self.graph.starts_with(w, &vw))
    }

    /// λ_v(a) for an arbitrary operator a on ℋ_v (h×h matrix in the
    /// [ξ, centered] basis): identifies ℱ with ℋ_v ⊗ ℋ^L(v) leg-wise and
    /// acts by a on the ℋ_v leg, compressed to the truncated space.
    pub fn lambda_v(&self, v: Letter, a: &CMat) -> CMat {
        let h = self.vdims[v];
        assert_eq!(a.nrows(), h);
        assert_eq!(a.ncols(), h);
        let vw = self.graph.single(v);
        let mut m = zeros(self.dim, self.dim);
        for (wi, w) in self.words.iter().enumerate() {
            if !self.graph.in_wl(&vw, w) {
                continue;
            }
            let off_w = self.offsets[wi];
            let sz_w = self.block_size(w);
            let prod = self.graph.multiply(&vw, w);
            match self.block(&prod) {
                None => {
                    // |vw'| > D: only the ξ_v ⊗ ℋ̊_{w'} corner survives the
                    // compression.
                    for k in 0..sz_w {
                        m[(off_w + k, off_w + k)] += a[(0, 0)];
                    }
                }
                Some((off_p, _)) => {
                    let (p, perm) = shuffle_perm(&self.graph, &[&vw, w]).unwrap();
                    debug_assert_eq!(p, prod);
                    for pos in 0..sz_w {
                        let midx = self.decode_multi_index(w, pos);
                        let dest_of = |j: usize| {
                            let mut d = vec![0usize; prod.len()];
                            d[perm[0]] = j;
                            for (k, &i) in midx.iter().enumerate() {
                                d[perm[1 + k]] = i;
                            }
                            off_p + self.encode_multi_index(&prod, &d)
                        };
                        let src0 = off_w + pos;
                        m[(src0, src0)] += a[(0, 0)];
                        for jp in 1..h {
                            m[(dest_of(jp), src0)] += a[(jp, 0)];
                        }
                        for j in 1..h {
                            let srcj = dest_of(j);
                            m[(src0, srcj)] += a[(0, j)];
                            for jp in 1..h {
                                m[(dest_of(jp), srcj)] += a[(jp, j)];
                            }
                        }
                    }
                }
            }
        }
        m
    }

    /// λ of a formal algebraic element.
    pub fn lambda(&self, x: &AlgebraicElement) -> CMat {
        let mut m = identity(self.dim) * x.scalar;
        for (coef, pt) in &x.terms {
            m += self.lambda_pure(pt) * *coef;
        }
        m
    }

    pub fn lambda_pure(&self, pt: &PureTensor) -> CMat {
        let mut m = identity(self.dim);
        for (k, &v) in pt.word.letters().iter().enumerate() {
            m = m * self.lambda_v(v, &pt.legs[k]);
        }
        m
    }

    fn lambda_sandwiched(&self, pt: &PureTensor, kind: Part) -> CMat {
        let mut m = identity(self.dim);
        for (k, &v) in pt.word.letters().iter().enumerate() {
            let p = self.p_v(v);
            let q = identity(self.dim) - &p;
            let lam = self.lambda_v(v, &pt.legs[k]);
            let factor = match kind {
                Part::Ann => &q * &lam * &p,
                Part::Dia => &p * &lam * &p,
                Part::Cre => &p * &lam * &q,
            };
            m = m * factor;
        }
        m
    }

    /// (annihilation, diagonal, creation) parts of λ on a pure tensor.
    pub fn lambda_parts(&self, pt: &PureTensor) -> (CMat, CMat, CMat) {
        (
            self.lambda_sandwiched(pt, Part::Ann),
            self.lambda_sandwiched(pt, Part::Dia),
            self.lambda_sandwiched(pt, Part::Cre),
        )
    }

    /// λ_ω for a triple splitting ω = (w1, w2, w3): splits the tensor legs
    /// of the element along the shuffle permutation and composes
    /// creation(w1)·diagonal(w2)·annihilation(w3). Zero when the element's
    /// word does not match w1·w2·w3.
    pub fn lambda_triple(&self, omega: &TripleSplit, pt: &PureTensor) -> Result<CMat, FockError> {
        let parts: Vec<&Word> = vec![&omega.w1, &omega.w2, &omega.w3];
        let (prod, perm) = shuffle_perm(&self.graph, &parts)?;
        if prod != pt.word {
            return Ok(zeros(self.dim, self.dim));
        }
        // Concat position k (within the (w1,w2,w3) ordering) carries the
        // element's leg at position perm[k] of the representative.
        let mut groups: Vec<PureTensor> = Vec::new();
        let mut start = 0usize;
        for w in &[&omega.w1, &omega.w2, &omega.w3] {
            let legs: Vec<CMat> = (0..w.len())
                .map(|k| pt.legs[perm[start + k]].clone())
                .collect();
            start += w.len();
            groups.push(PureTensor {
                word: (*w).clone(),
                legs,
            });
        }
        let cre = self.lambda_sandwiched(&groups[0], Part::Cre);
        let dia = self.lambda_sandwiched(&groups[1], Part::Dia);
        let ann = self.lambda_sandwiched(&groups[2], Part::Ann);
        Ok(cre * dia * ann)
    }

    /// Vacuum state ⟨XΩ, Ω⟩.
    pub fn vacuum_state(&self, x: &CMat) -> C64 {
        x[(0, 0)]
    }

    // ---- distinguished subspaces ----------------------------------------

    /// ℋ^L(u): words w with u·w reduced.
    pub fn proj_h_l(&self, u: &Word) -> CMat {
        self.proj_words(|w| self.graph.in_wl(u, w))
    }

    /// ℋ^L(u, u_L) = ⊕_{w ∈ 𝒲^L(u)} ℋ̊_{u_L w}; requires u to end with u_L.
    pub fn proj_h_l2(&self, u: &Word, u_l: &Word) -> Result<CMat, FockError> {
        if !self.graph.ends_with(u, u_l) {
            return Err(FockError::SideCondition(format!("{u} does not end with {u_l}")));
        }
        let inv = self.graph.inverse(u_l);
        Ok(self.proj_words(|x| {
            if !self.graph.starts_with(x, u_l) {
                return false;
            }
            let w = self.graph.multiply(&inv, x);
            self.graph.in_wl(u, &w)
        }))
    }

    /// ℋ^R(u, u_R) = ⊕_{w ∈ 𝒲^R(u)} ℋ̊_{w u_R}; requires u to start with u_R.
    pub fn proj_h_r2(&self, u: &Word, u_r: &Word) -> Result<CMat, FockError> {
        if !self.graph.starts_with(u, u_r) {
            return Err(FockError::SideCondition(format!("{u} does not start with {u_r}")));
        }
        let inv = self.graph.inverse(u_r);
        Ok(self.proj_words(|x| {
            if !self.graph.ends_with(x, u_r) {
                return false;
            }
            let w = self.graph.multiply(x, &inv);
            self.graph.in_wr(u, &w)
        }))
    }

    /// ℱ_n^L(u, u_L) = ⊕_{w ∈ W̃_n^L(u)} ℋ̊_{u_L w}.
    pub fn proj_f_l_n(&self, u: &Word, u_l: &Word, n: usize) -> Result<CMat, FockError> {
        if !self.graph.ends_with(u, u_l) {
            return Err(FockError::SideCondition(format!("{u} does not end with {u_l}")));
        }
        let inv = self.graph.inverse(u_l);
        Ok(self.proj_words(|x| {
            if !self.graph.starts_with(x, u_l) {
                return false;
            }
            let w = self.graph.multiply(&inv, x);
            w.len() == n && self.graph.in_wtl(u, &w)
        }))
    }

    /// ℱ_n^R(u, u_R) = ⊕_{w ∈ W̃_n^R(u)} ℋ̊_{w u_R}.
    pub fn proj_f_r_n(&self, u: &Word, u_r: &Word, n: usize) -> Result<CMat, FockError> {
        if !self.graph.starts_with(u, u_r) {
            return Err(FockError::SideCondition(format!("{u} does not start with {u_r}")));
        }
        let inv = self.graph.inverse(u_r);
        Ok(self.proj_words(|x| {
            if !self.graph.ends_with(x, u_r) {
                return false;
            }
            let w = self.graph.multiply(x, &inv);
            self.graph.in_wtr_n(u, &w, n)
        }))
    }

    /// ℱ_n^M(u) = ⊕ ℋ̊_{w1 u w2}, w1 ∈ W̃_n^R(u), w2 ∈ 𝒲^L(u).
    pub fn proj_f_m(&self, u: &Word, n: usize) -> CMat {
        self.proj_words(|x| self.split_middle(u, n, x).is_some())
    }

    /// Decompose x = w1·u·w2 with w1 ∈ W̃_n^R(u), w2 ∈ 𝒲^L(u), if possible.
    /// The decomposition is unique when it exists.
    pub fn split_middle(&self, u: &Word, n: usize, x: &Word) -> Option<(Word, Word)> {
        if x.len() < n + u.len() {
            return None;
        }
        let mut found = None;
        for w1 in self.graph.left_divisors(x) {
            if w1.len() != n || !self.graph.in_wtr(u, &w1) {
                continue;
            }
            let w1u = self.graph.multiply(&w1, &u.clone());
            if !self.graph.starts_with(x, &w1u) {
                continue;
            }
            let w2 = self
                .graph
                .multiply(&self.graph.inverse(&w1u), x);
            if w2.len() == x.len() - n - u.len() && self.graph.in_wl(u, &w2) {
                debug_assert!(found.is_none(), "middle decomposition not unique");
                found = Some((w1, w2));
            }
        }
        found
    }

    /// Embedding of the full clique Hilbert space ℋ_t = ⊗_{v ∈ t} ℋ_v onto
    /// ⊕_{r ⊆ t} ℋ̊_r ⊆ ℱ: a basis tuple goes to the word spelled by its
    /// non-ξ legs. Columns are indexed by tuples over the full vertex bases,
    /// big-endian in the letter order of t.
    pub fn clique_embed(&self, t: &Word) -> Result<CMat, FockError> {
        if !self.graph.is_clique_word(t) {
            return Err(FockError::Word(CoxeterError::NotCliqueWord(t.to_string())));
        }
        if t.len() > self.depth {
            return Err(FockError::BeyondDepth(t.clone()));
        }
        let hs: Vec<usize> = t.letters().iter().map(|&v| self.vdims[v]).collect();
        let cols: usize = hs.iter().product();
        let mut m = zeros(self.dim, cols);
        for col in 0..cols {
            let mut rem = col;
            let mut digits = vec![0usize; t.len()];
            for k in (0..t.len()).rev() {
                digits[k] = rem % hs[k];
                rem /= hs[k];
            }
            // Sub-word of letters with non-ξ leg; a subset of a clique word
            // is already in normal form.
            let letters: Vec<Letter> = t
                .letters()
                .iter()
                .zip(&digits)
                .filter(|(_, &d)| d > 0)
                .map(|(&v, _)| v)
                .collect();
            let midx: Vec<usize> = digits.iter().copied().filter(|&d| d > 0).collect();
            let r = self.graph.word_from_letters(&letters).unwrap();
            let row = self.basis_index(&r, &midx).unwrap();
            m[(row, col)] = cr(1.0);
        }
        Ok(m)
    }
}

#[derive(Clone, Copy)]
enum Part {
    Ann,
    Dia,
    Cre,
}

/// Pure tensor a_1 ⊗ … ⊗ a_l over the letters of a reduced word; each leg
/// is an operator on its vertex space with vanishing vacuum expectation.
#[derive(Debug, Clone)]
pub struct PureTensor {
    pub word: Word,
    pub legs: Vec<CMat>,
}

impl PureTensor {
    pub fn new(fock: &FockSpace, word: Word, legs: Vec<CMat>) -> Result<PureTensor, FockError> {
        if legs.len() != word.len() {
            return Err(FockError::LegMismatch);
        }
        for (k, (leg, &v)) in legs.iter().zip(word.letters()).enumerate() {
            let h = fock.vdims[v];
            if leg.nrows() != h || leg.ncols() != h {
                return Err(FockError::LegMismatch);
            }
            let exp = leg[(0, 0)].norm();
            if exp > 1e-10 {
                return Err(FockError::NotCentered(k, exp));
            }
        }
        Ok(PureTensor { word, legs })
    }
}

/// Formal sum of pure tensors plus a scalar multiple of the identity.
#[derive(Debug, Clone)]
pub struct AlgebraicElement {
    pub scalar: C64,
    pub terms: Vec<(C64, PureTensor)>,
}

impl AlgebraicElement {
    pub fn scalar(z: C64) -> Self {
        AlgebraicElement {
            scalar: z,
            terms: Vec::new(),
        }
    }

    pub fn from_pure(pt: PureTensor) -> Self {
        AlgebraicElement {
            scalar: cr(0.0),
            terms: vec![(cr(1.0), pt)],
        }
    }
}

/// Random centered operator on a vertex space of dimension h (vacuum
/// expectation zero).
pub fn random_centered_op(rng: &mut rand_chacha::ChaCha8Rng, h: usize) -> CMat {
    let mut a = random_cmat(rng, h, h);
    a[(0, 0)] = cr(0.0);
    a
}

/// Random centered vector in ℋ̊_v coordinates.
pub fn random_centered_vec(rng: &mut rand_chacha::ChaCha8Rng, cdim: usize) -> CVec {
    random_cmat(rng, cdim, 1).column(0).into_owned()
}
