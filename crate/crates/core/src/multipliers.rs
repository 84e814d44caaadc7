//! Word-length multiplier calculus on the truncated Fock space: the
//! sandwich maps H_τ built from partial isometries, their alternating sums
//! H̃_ρ, the homogeneous projections 𝒫_d, the radial semigroup 𝒯_r, and the
//! graph products of vertex maps (u.c.p., completely bounded, Hilbert-space
//! level) together with the CCAP approximation nets.

use crate::coxeter::*;
use crate::fock::*;
use crate::linalg::*;
use crate::valg::*;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MultiplierError {
    #[error("radial parameter {0} outside [0, 1]")]
    BadRadial(f64),
    #[error("word {0} is not a sub-clique suffix of {1}")]
    BadSuffixClique(Word, Word),
    #[error("vertex {0}: map is not unital completely positive (min Choi eigenvalue {1:.3e}, unital defect {2:.3e})")]
    NotUcp(usize, f64, f64),
    #[error("vertex {0}: map is not state-preserving (defect {1:.3e})")]
    NotStatePreserving(usize, f64),
    #[error("fock error: {0}")]
    Fock(#[from] FockError),
    #[error("valg error: {0}")]
    Valg(#[from] ValgError),
    #[error("vertex count mismatch")]
    VertexCountMismatch,
}

/// Structural application of H_τ(x) = V_{n_l}(x ⊗ 1)V_{n_r}*: every Fock
/// basis vector is decomposed along the right partial isometry, x acts on
/// the first leg, and the left partial isometry reassembles — the tensor
/// square of the Fock space is never materialized.
pub fn h_tau_apply(f: &FockSpace, tau: &TauTuple, x: &CMat) -> CMat {
    let g = &f.graph;
    let rho = &tau.rho;
    let r = &tau.r;
    let u_l_t = g.multiply(&rho.u_l, &rho.t);
    let u_r_t = g.multiply(&rho.u_r, &rho.t);
    let base_l = g.multiply(&u_l_t, r); // u_l·(t∖r)
    let base_r = g.multiply(&u_r_t, r);
    let dim = f.dim();
    let mut out = zeros(dim, dim);

    // Right decomposition: fock index i → (first-leg index j0, tail index).
    let mut rights: Vec<(usize, usize, usize)> = Vec::new();
    let mut tails: HashMap<usize, (Word, Vec<usize>, Word)> = HashMap::new();
    for i in 0..dim {
        let xw = f.word_at(i).clone();
        let Some((v_r, v_tail)) = f.split_middle(&u_r_t, rho.n_r, &xw) else {
            continue;
        };
        let w_a = g.multiply(&v_r, &base_r);
        if w_a.len() != v_r.len() + base_r.len() {
            continue;
        }
        let w_b = g.multiply(r, &v_tail);
        debug_assert_eq!(w_b.len(), r.len() + v_tail.len());
        let Ok((prod, perm)) = shuffle_perm(g, &[&w_a, &w_b]) else {
            continue;
        };
        if prod != xw {
            continue;
        }
        let (off, _) = f.block(&xw).unwrap();
        let midx = f.decode_multi_index(&xw, i - off);
        let mut concat = vec![0usize; xw.len()];
        for (k, slot) in concat.iter_mut().enumerate() {
            *slot = midx[perm[k]];
        }
        let j0 = f.basis_index(&w_a, &concat[..w_a.len()]).unwrap();
        let tid = f.basis_index(&w_b, &concat[w_a.len()..]).unwrap();
        tails
            .entry(tid)
            .or_insert_with(|| (w_b.clone(), concat[w_a.len()..].to_vec(), v_tail.clone()));
        rights.push((i, j0, tid));
    }
    if rights.is_empty() {
        return out;
    }

    // Left reassembly: (first-leg index j, tail) → output index, provided
    // the first leg sits in a valid v_l·u_l·(t∖r) block and the tail word
    // also lies left of u_l·t.
    let inv_base_l = f.graph.inverse(&base_l);
    let mut lefts: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (tid, (w_b, midx_b, v_tail)) in &tails {
        if !g.in_wl(&u_l_t, v_tail) {
            continue;
        }
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (yi, y) in f.words.iter().enumerate() {
            let _ = yi;
            if !g.ends_with(y, &base_l) {
                continue;
            }
            let v_l = g.multiply(y, &inv_base_l);
            if v_l.len() != rho.n_l || !g.in_wtr(&u_l_t, &v_l) {
                continue;
            }
            let Ok((z, perm2)) = shuffle_perm(g, &[y, w_b]) else {
                continue;
            };
            let Some((z_off, _)) = f.block(&z) else {
                continue; // beyond depth: compressed away
            };
            let (y_off, y_sz) = f.block(y).unwrap();
            for jp in 0..y_sz {
                let legs_y = f.decode_multi_index(y, jp);
                let mut dest = vec![0usize; z.len()];
                for (k, &val) in legs_y.iter().chain(midx_b.iter()).enumerate() {
                    dest[perm2[k]] = val;
                }
                let k_idx = z_off + f.encode_multi_index(&z, &dest);
                pairs.push((y_off + jp, k_idx));
            }
        }
        lefts.insert(*tid, pairs);
    }

    for (i, j0, tid) in rights {
        if let Some(pairs) = lefts.get(&tid) {
            for &(j, k) in pairs {
                let coef = x[(j, j0)];
                if coef.norm() > 0.0 {
                    out[(k, i)] += coef;
                }
            }
        }
    }
    out
}

/// H̃_ρ = Σ_{r ⊆ t} (−1)^{|r|} H_{(ρ, r)}.
pub fn h_tilde_rho_apply(f: &FockSpace, rho: &RhoTuple, x: &CMat) -> CMat {
    let mut out = zeros(f.dim(), f.dim());
    for r in f.graph.sub_cliques(&rho.t) {
        let sign = if r.len() % 2 == 0 { 1.0 } else { -1.0 };
        let tau = TauTuple {
            rho: rho.clone(),
            r,
        };
        out += h_tau_apply(f, &tau, x) * cr(sign);
    }
    out
}

/// The τ-terms (with signs) whose sum is 𝒫_d.
pub fn p_d_terms(g: &SimpleGraph, d: usize) -> Vec<(f64, TauTuple)> {
    let mut terms = Vec::new();
    for (u_l, u_r, t) in g.enumerate_clique_triples() {
        let base = u_l.len() + t.len() + u_r.len();
        if base > d {
            continue;
        }
        for n in 0..=(d - base) {
            let rho = RhoTuple {
                n_l: n,
                n_r: d - base - n,
                u_l: u_l.clone(),
                u_r: u_r.clone(),
                t: t.clone(),
            };
            for r in g.sub_cliques(&t) {
                let sign = if r.len() % 2 == 0 { 1.0 } else { -1.0 };
                terms.push((
                    sign,
                    TauTuple {
                        rho: rho.clone(),
                        r,
                    },
                ));
            }
        }
    }
    terms
}

/// 𝒫_d assembled from the H_τ sum.
pub fn p_d_apply(f: &FockSpace, d: usize, x: &CMat) -> CMat {
    let mut out = zeros(f.dim(), f.dim());
    for (sign, tau) in p_d_terms(&f.graph, d) {
        out += h_tau_apply(f, &tau, x) * cr(sign);
    }
    out
}

/// 𝒯_r (or its truncation 𝒯_{r,n}) assembled degree by degree.
pub fn radial_apply(
    f: &FockSpace,
    r: f64,
    n: Option<usize>,
    x: &CMat,
) -> Result<CMat, MultiplierError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(MultiplierError::BadRadial(r));
    }
    let top = n.unwrap_or(f.depth);
    let mut out = zeros(f.dim(), f.dim());
    for k in 0..=top {
        if r == 0.0 && k > 0 {
            break;
        }
        out += p_d_apply(f, k, x) * cr(r.powi(k as i32));
    }
    Ok(out)
}

/// Theoretical tail bound ‖𝒯_r − 𝒯_{r,n}‖_cb ≤ C_Γ n rⁿ / (1−r)².
pub fn radial_tail_bound(c_gamma: u64, n: usize, r: f64) -> f64 {
    c_gamma as f64 * n as f64 * r.powi(n as i32) / (1.0 - r).powi(2)
}

/// Named superoperator descriptors for reporting.
#[derive(Debug, Clone)]
pub enum Superoperator {
    HTau(TauTuple),
    HTildeRho(RhoTuple),
    Pd(usize),
    Radial { r: f64, n: Option<usize> },
}

impl Superoperator {
    pub fn descriptor(&self) -> String {
        match self {
            Superoperator::HTau(t) => format!(
                "H_tau(n_l={}, n_r={}, u_l={}, u_r={}, t={}, r={})",
                t.rho.n_l, t.rho.n_r, t.rho.u_l, t.rho.u_r, t.rho.t, t.r
            ),
            Superoperator::HTildeRho(r) => format!(
                "H_tilde(n_l={}, n_r={}, u_l={}, u_r={}, t={})",
                r.n_l, r.n_r, r.u_l, r.u_r, r.t
            ),
            Superoperator::Pd(d) => format!("P_{d}"),
            Superoperator::Radial { r, n } => match n {
                Some(n) => format!("T_({r},{n})"),
                None => format!("T_{r}"),
            },
        }
    }

    pub fn apply(&self, f: &FockSpace, x: &CMat) -> Result<CMat, MultiplierError> {
        Ok(match self {
            Superoperator::HTau(t) => h_tau_apply(f, t, x),
            Superoperator::HTildeRho(r) => h_tilde_rho_apply(f, r, x),
            Superoperator::Pd(d) => p_d_apply(f, *d, x),
            Superoperator::Radial { r, n } => radial_apply(f, *r, *n, x)?,
        })
    }
}

/// Materialized V_n^{u,r}: a partial isometry from the truncated
/// ℱ_n^R(u, u·r) ⊗ ℋ^L(u, r) slice into ℱ. Each domain block pair
/// (v_r·u·r, r·v_tail) maps onto the block v_r·u·v_tail by the shuffle
/// unitary; pairs whose target exceeds the depth are annihilated.
#[derive(Debug, Clone)]
pub struct PartialIsometryVnur {
    pub u: Word,
    pub r: Word,
    pub n: usize,
    /// Domain block pairs (first-factor word, second-factor word).
    pub domain: Vec<(Word, Word)>,
    /// Offsets of each block pair inside the domain coordinates.
    pub offsets: Vec<usize>,
    pub matrix: CMat,
}

pub fn vnur(
    f: &FockSpace,
    u: &Word,
    r: &Word,
    n: usize,
) -> Result<PartialIsometryVnur, MultiplierError> {
    let g = &f.graph;
    if !g.is_clique_word(r) || !g.ends_with(u, r) {
        return Err(MultiplierError::BadSuffixClique(r.clone(), u.clone()));
    }
    let u_r = g.multiply(u, r);
    let ws = g.word_sets(u, n, f.depth);
    let mut domain: Vec<(Word, Word)> = Vec::new();
    for v_r in &ws.wtr_n {
        let wa = g.multiply(v_r, &u_r);
        if wa.len() > f.depth {
            continue;
        }
        for v_tail in &ws.wl {
            let wb = g.multiply(r, v_tail);
            if wb.len() > f.depth {
                continue;
            }
            domain.push((wa.clone(), wb));
        }
    }
    let mut offsets = Vec::with_capacity(domain.len());
    let mut total = 0usize;
    for (wa, wb) in &domain {
        offsets.push(total);
        total += f.block_size(wa) * f.block_size(wb);
    }
    let mut matrix = zeros(f.dim(), total);
    for ((wa, wb), &off) in domain.iter().zip(&offsets) {
        let (z, perm) = shuffle_perm(g, &[wa, wb]).expect("reduced by construction");
        let Some((z_off, _)) = f.block(&z) else {
            continue;
        };
        let sa = f.block_size(wa);
        let sb = f.block_size(wb);
        for ia in 0..sa {
            let la = f.decode_multi_index(wa, ia);
            for ib in 0..sb {
                let lb = f.decode_multi_index(wb, ib);
                let mut dest = vec![0usize; z.len()];
                for (k, &val) in la.iter().chain(lb.iter()).enumerate() {
                    dest[perm[k]] = val;
                }
                let row = z_off + f.encode_multi_index(&z, &dest);
                matrix[(row, off + ia * sb + ib)] = cr(1.0);
            }
        }
    }
    Ok(PartialIsometryVnur {
        u: u.clone(),
        r: r.clone(),
        n,
        domain,
        offsets,
        matrix,
    })
}

impl PartialIsometryVnur {
    pub fn domain_dim(&self) -> usize {
        self.matrix.ncols()
    }

    /// ‖V*VV* − V*‖.
    pub fn partial_isometry_defect(&self) -> f64 {
        let vs = self.matrix.adjoint();
        op_norm(&(&vs * &self.matrix * &vs - &vs))
    }
}

/// H_τ(x) by the literal formula V^L (x ⊗ 1) (V^R)* with materialized
/// partial isometries — the oracle for the structural implementation.
pub fn h_tau_materialized(f: &FockSpace, tau: &TauTuple, x: &CMat) -> CMat {
    let g = &f.graph;
    let u_l_t = g.multiply(&tau.rho.u_l, &tau.rho.t);
    let u_r_t = g.multiply(&tau.rho.u_r, &tau.rho.t);
    let vl = vnur(f, &u_l_t, &tau.r, tau.rho.n_l).unwrap();
    let vr = vnur(f, &u_r_t, &tau.r, tau.rho.n_r).unwrap();
    // x ⊗ 1 between the two domain slices: second factors must match as
    // (word, multi-index); x acts between the first factors through ℱ.
    let mut mid = zeros(vl.domain_dim(), vr.domain_dim());
    for (ri, (r_wa, r_wb)) in vr.domain.iter().enumerate() {
        let (ra_off, _) = f.block(r_wa).unwrap();
        let r_sa = f.block_size(r_wa);
        let r_sb = f.block_size(r_wb);
        for (li, (l_wa, l_wb)) in vl.domain.iter().enumerate() {
            if l_wb != r_wb {
                continue;
            }
            let (la_off, _) = f.block(l_wa).unwrap();
            let l_sa = f.block_size(l_wa);
            for ia_r in 0..r_sa {
                for ia_l in 0..l_sa {
                    let coef = x[(la_off + ia_l, ra_off + ia_r)];
                    if coef.norm() > 0.0 {
                        for ib in 0..r_sb {
                            mid[(
                                vl.offsets[li] + ia_l * r_sb + ib,
                                vr.offsets[ri] + ia_r * r_sb + ib,
                            )] = coef;
                        }
                    }
                }
            }
        }
    }
    &vl.matrix * mid * vr.matrix.adjoint()
}

/// Oracle projection for the H_τ formula: the union of word blocks
/// ℋ̊_{v_r·u_r·t·v_tail} satisfying the five side conditions, restricted to
/// blocks actually mapped by λ_ω into the matching left block (the
/// kernel-only parts of the general subspaces cannot affect λ_ω·P).
pub fn p_a_tau_omega_blocks(
    f: &FockSpace,
    tau: &TauTuple,
    omega: &TripleSplit,
) -> CMat {
    let g = &f.graph;
    let rho = &tau.rho;
    let u_l_t = g.multiply(&rho.u_l, &rho.t);
    let u_r_t = g.multiply(&rho.u_r, &rho.t);
    let base_r = g.multiply(&u_r_t, &tau.r); // u_r·(t∖r)
    let w2w3 = g.multiply(&omega.w2, &omega.w3);
    let w1w3 = g.multiply(&omega.w1, &omega.w3);
    f.proj_words(|xw| {
        let Some((v_r, v_tail)) = f.split_middle(&u_r_t, rho.n_r, xw) else {
            return false;
        };
        if !g.in_wl(&u_l_t, &v_tail) {
            return false;
        }
        // |v_r·u_r·(t∖r)| = |w2w3| + |w2w3·v_r·u_r·(t∖r)|
        let vbr = g.multiply(&v_r, &base_r);
        let prod1 = g.multiply(&w2w3, &vbr);
        if vbr.len() != w2w3.len() + prod1.len() {
            return false;
        }
        // |w1w3·v_r·u_r·t·v_tail| = |w1| + |w3·v_r·u_r·t·v_tail|
        let w3x = g.multiply(&omega.w3, xw);
        let w13x = g.multiply(&w1w3, xw);
        if w13x.len() != omega.w1.len() + w3x.len() {
            return false;
        }
        // The target block must match v_l·u_l·t·v_tail for a valid v_l.
        let tail_part = g.multiply(&u_l_t, &v_tail);
        if !g.ends_with(&w13x, &tail_part) {
            return false;
        }
        let v_l = g.multiply(&w13x, &g.inverse(&tail_part));
        v_l.len() == rho.n_l
            && v_l.len() + tail_part.len() == w13x.len()
            && g.in_wtr(&u_l_t, &v_l)
    })
}

/// A family of vertex algebras over a graph, with their GNS data; the
/// associated Fock space uses the GNS dimensions as vertex dimensions.
#[derive(Debug, Clone)]
pub struct GraphAlgebra {
    pub graph: SimpleGraph,
    pub verts: Vec<VertexAlgebra>,
    pub gns: Vec<GnsData>,
}

impl GraphAlgebra {
    pub fn new(graph: SimpleGraph, verts: Vec<VertexAlgebra>) -> Result<Self, MultiplierError> {
        if verts.len() != graph.vertex_count() {
            return Err(MultiplierError::VertexCountMismatch);
        }
        let gns = verts.iter().map(|a| a.gns()).collect();
        Ok(GraphAlgebra { graph, verts, gns })
    }

    pub fn fock(&self, depth: usize, cap: usize) -> Result<FockSpace, FockError> {
        let vdims = self.gns.iter().map(|g| g.dim()).collect();
        FockSpace::build(self.graph.clone(), vdims, depth, cap)
    }

    /// Operator-valued tensor → Fock-operator legs via the GNS
    /// representations; centered algebra elements give centered legs.
    pub fn to_pure(&self, f: &FockSpace, t: &AlgTensor) -> Result<PureTensor, FockError> {
        let legs = t
            .word
            .letters()
            .iter()
            .zip(&t.legs)
            .map(|(&v, a)| self.gns[v].rep(a))
            .collect();
        PureTensor::new(f, t.word.clone(), legs)
    }

    pub fn lambda(&self, f: &FockSpace, x: &AlgElem) -> Result<CMat, FockError> {
        let mut out = identity(f.dim()) * x.scalar;
        for (c, t) in &x.terms {
            out += f.lambda_pure(&self.to_pure(f, t)?) * *c;
        }
        Ok(out)
    }

    /// Random reduced word with random centered legs.
    pub fn random_elem(&self, rng: &mut rand_chacha::ChaCha8Rng, w: &Word) -> AlgElem {
        let legs = w
            .letters()
            .iter()
            .map(|&v| self.verts[v].random_centered(rng))
            .collect();
        AlgElem {
            scalar: cr(0.0),
            terms: vec![(
                cr(1.0),
                AlgTensor {
                    word: w.clone(),
                    legs,
                },
            )],
        }
    }
}

/// One reduced word with an algebra element (centered) on each leg.
#[derive(Debug, Clone)]
pub struct AlgTensor {
    pub word: Word,
    pub legs: Vec<CMat>,
}

/// Linear combination of scalar and word tensors.
#[derive(Debug, Clone)]
pub struct AlgElem {
    pub scalar: C64,
    pub terms: Vec<(C64, AlgTensor)>,
}

impl AlgElem {
    pub fn scalar_elem(z: C64) -> Self {
        AlgElem {
            scalar: z,
            terms: Vec::new(),
        }
    }

    /// Degree-d homogeneous part (degree 0 = the scalar).
    pub fn degree_part(&self, d: usize) -> AlgElem {
        AlgElem {
            scalar: if d == 0 { self.scalar } else { cr(0.0) },
            terms: self
                .terms
                .iter()
                .filter(|(_, t)| t.word.len() == d)
                .cloned()
                .collect(),
        }
    }

    pub fn max_degree(&self) -> usize {
        self.terms.iter().map(|(_, t)| t.word.len()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &AlgElem) -> AlgElem {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        AlgElem {
            scalar: self.scalar + other.scalar,
            terms,
        }
    }

    pub fn scale(&self, z: C64) -> AlgElem {
        AlgElem {
            scalar: self.scalar * z,
            terms: self.terms.iter().map(|(c, t)| (c * z, t.clone())).collect(),
        }
    }
}

/// Legwise action of per-vertex maps: λ(a₁⊗…⊗a_s) ↦ λ(T(a₁)⊗…⊗T(a_s)).
pub fn graph_product_apply(maps: &[CpMap], x: &AlgElem) -> AlgElem {
    AlgElem {
        scalar: x.scalar,
        terms: x
            .terms
            .iter()
            .map(|(c, t)| {
                let legs = t
                    .word
                    .letters()
                    .iter()
                    .zip(&t.legs)
                    .map(|(&v, a)| maps[v].apply(a))
                    .collect();
                (
                    *c,
                    AlgTensor {
                        word: t.word.clone(),
                        legs,
                    },
                )
            })
            .collect(),
    }
}

/// Graph product of unital completely positive state-preserving vertex
/// maps, with the dilation data that certifies complete positivity: a hat
/// Fock space built from the per-vertex Stinespring spaces, a contraction
/// V: ℱ^B → ℱ̂ and the representation legs π_v.
#[derive(Debug)]
pub struct GraphUcp {
    pub source: GraphAlgebra,
    pub target: GraphAlgebra,
    pub maps: Vec<CpMap>,
    pub dilations: Vec<StinespringDilation>,
    /// Per-vertex basis rotation of the dilation space putting ξ̂_v first.
    rotations: Vec<CMat>,
}

pub fn graph_product_ucp(
    graph: &SimpleGraph,
    maps: Vec<CpMap>,
) -> Result<GraphUcp, MultiplierError> {
    if maps.len() != graph.vertex_count() {
        return Err(MultiplierError::VertexCountMismatch);
    }
    let tol = 1e-9;
    for (v, m) in maps.iter().enumerate() {
        if !m.is_ucp(tol) {
            return Err(MultiplierError::NotUcp(
                v,
                m.min_choi_eigenvalue(),
                m.unital_defect(),
            ));
        }
        let sd = m.state_defect();
        if sd > tol {
            return Err(MultiplierError::NotStatePreserving(v, sd));
        }
    }
    let source = GraphAlgebra::new(
        graph.clone(),
        maps.iter().map(|m| m.source.clone()).collect(),
    )?;
    let target = GraphAlgebra::new(
        graph.clone(),
        maps.iter().map(|m| m.target.clone()).collect(),
    )?;
    let mut dilations = Vec::new();
    let mut rotations = Vec::new();
    for m in &maps {
        let d = m.stinespring()?;
        // Unitary with first column ξ̂ = Vξ.
        let k = d.dim();
        let xi_hat = d.xi_hat();
        // Complete ξ̂ to a basis, dropping the standard basis vector it
        // overlaps most (the remaining set is always well conditioned).
        let skip = (0..k)
            .max_by(|&a, &b| xi_hat[a].norm().total_cmp(&xi_hat[b].norm()))
            .unwrap();
        let mut cols: Vec<CVec> = vec![xi_hat];
        for i in (0..k).filter(|&i| i != skip) {
            cols.push(CVec::from_fn(k, |r, _| if r == i { cr(1.0) } else { cr(0.0) }));
        }
        let onb = gram_schmidt(&cols);
        assert_eq!(onb.len(), k);
        let mut rot = zeros(k, k);
        for (i, b) in onb.iter().enumerate() {
            rot.set_column(i, b);
        }
        dilations.push(d);
        rotations.push(rot);
    }
    Ok(GraphUcp {
        source,
        target,
        maps,
        dilations,
        rotations,
    })
}

impl GraphUcp {
    pub fn apply(&self, x: &AlgElem) -> AlgElem {
        graph_product_apply(&self.maps, x)
    }

    /// Fock space of the dilation algebra: vertex dimensions are the
    /// Stinespring dimensions, basis rotated so ξ̂_v is the index-0 vector.
    pub fn hat_fock(&self, depth: usize, cap: usize) -> Result<FockSpace, FockError> {
        let vdims = self.dilations.iter().map(|d| d.dim()).collect();
        FockSpace::build(self.source.graph.clone(), vdims, depth, cap)
    }

    /// π_v(a) in the rotated hat basis; centered when φ(a) = 0.
    pub fn pi_leg(&self, v: Letter, a: &CMat) -> CMat {
        self.rotations[v].adjoint() * self.dilations[v].pi(a) * &self.rotations[v]
    }

    /// π(λ(a)) on the hat Fock space.
    pub fn pi_lambda(&self, f_hat: &FockSpace, x: &AlgElem) -> Result<CMat, FockError> {
        let mut out = identity(f_hat.dim()) * x.scalar;
        for (c, t) in &x.terms {
            let legs = t
                .word
                .letters()
                .iter()
                .zip(&t.legs)
                .map(|(&v, a)| self.pi_leg(v, a))
                .collect();
            out += f_hat.lambda_pure(&PureTensor::new(f_hat, t.word.clone(), legs)?) * *c;
        }
        Ok(out)
    }

    /// The contraction V: ℱ^B → ℱ̂ acting legwise by the (rotated)
    /// Stinespring isometries restricted to centered parts.
    pub fn contraction(&self, f_b: &FockSpace, f_hat: &FockSpace) -> CMat {
        let m_cent: Vec<CMat> = self
            .dilations
            .iter()
            .zip(&self.rotations)
            .map(|(d, rot)| {
                let m = rot.adjoint() * &d.v; // L²(B_v) → hat coords
                m.view((1, 1), (m.nrows() - 1, m.ncols() - 1)).into_owned()
            })
            .collect();
        let mut out = zeros(f_hat.dim(), f_b.dim());
        for w in &f_b.words {
            let Some((b_off, _)) = f_b.block(w) else { continue };
            let Some((h_off, _)) = f_hat.block(w) else { continue };
            let mut blk = identity(1);
            for &v in w.letters() {
                blk = kron(&blk, &m_cent[v]);
            }
            for i in 0..blk.nrows() {
                for j in 0..blk.ncols() {
                    out[(h_off + i, b_off + j)] = blk[(i, j)];
                }
            }
        }
        out
    }

    /// Largest deviation in θ(λ(a)) = V* π(λ(a)) V over the supplied test
    /// elements, measured on the safe margin.
    pub fn dilation_identity_defect(
        &self,
        f_b: &FockSpace,
        f_hat: &FockSpace,
        tests: &[AlgElem],
    ) -> Result<f64, MultiplierError> {
        let v = self.contraction(f_b, f_hat);
        let mut worst: f64 = 0.0;
        for x in tests {
            let margin = x.max_degree();
            let safe = f_b.safe_proj(margin);
            let lhs = self.target.lambda(f_b, &self.apply(x))?;
            let rhs = v.adjoint() * self.pi_lambda(f_hat, x)? * &v;
            worst = worst.max(op_norm(&(&safe * (lhs - rhs) * &safe)));
        }
        Ok(worst)
    }
}

/// Number of cliques of the graph (empty clique included).
pub fn clique_count(g: &SimpleGraph) -> usize {
    g.cliques().len()
}

/// Upper bound of the graph-product extension on 𝒜_d:
/// (#Cliq)³ · d · (max_v C(T_v))^d.
pub fn cb_on_ad_bound(g: &SimpleGraph, cs: &[f64], d: usize) -> f64 {
    let cmax = cs.iter().cloned().fold(0.0f64, f64::max);
    (clique_count(g) as f64).powi(3) * d as f64 * cmax.powi(d as i32)
}

/// Upper bound for the difference of two graph products on 𝒜_d:
/// (#Cliq)³ · d² · (max_v max(C(T_v), C(S_v)))^{d−1} · max_v C(T_v − S_v).
pub fn cb_on_ad_difference_bound(
    g: &SimpleGraph,
    cs_t: &[f64],
    cs_s: &[f64],
    cs_diff: &[f64],
    d: usize,
) -> f64 {
    let cmax = cs_t
        .iter()
        .chain(cs_s.iter())
        .cloned()
        .fold(0.0f64, f64::max);
    let dmax = cs_diff.iter().cloned().fold(0.0f64, f64::max);
    (clique_count(g) as f64).powi(3) * (d as f64).powi(2) * cmax.powi(d as i32 - 1) * dmax
}

/// Sampled lower bound for ‖T_d‖ acting on λ(𝒜_d), amplified over
/// k ∈ {1, …, k_max}: ratios ‖(id_k ⊗ T_d)(X)‖ / ‖X‖ on random
/// matrix-coefficient combinations of degree-d elements.
pub fn measured_cb_lower_on_ad(
    source: &GraphAlgebra,
    target: &GraphAlgebra,
    maps: &[CpMap],
    d: usize,
    f_a: &FockSpace,
    f_b: &FockSpace,
    seed: u64,
    k_max: usize,
    samples: usize,
) -> f64 {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<Word> = source
        .graph
        .enumerate_words(d)
        .into_iter()
        .filter(|w| w.len() == d)
        .collect();
    if words.is_empty() {
        return 0.0;
    }
    let safe_a = f_a.safe_proj(d);
    let safe_b = f_b.safe_proj(d);
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        for k in 1..=k_max {
            let mut num = zeros(k * f_b.dim(), k * f_b.dim());
            let mut den = zeros(k * f_a.dim(), k * f_a.dim());
            for w in &words {
                let x = source.random_elem(&mut rng, w);
                let coeff = random_cmat(&mut rng, k, k);
                let lam_a = source.lambda(f_a, &x).unwrap() * &safe_a;
                let lam_b =
                    target.lambda(f_b, &graph_product_apply(maps, &x)).unwrap() * &safe_b;
                num += kron(&coeff, &lam_b);
                den += kron(&coeff, &lam_a);
            }
            let dn = op_norm(&den);
            if dn > 1e-12 {
                best = best.max(op_norm(&num) / dn);
            }
        }
    }
    best
}

/// Matrix of the centered L² action T̊_v: ℋ̊_v(A) → ℋ̊_v(B) of a
/// state-preserving map in the GNS orthonormal bases.
pub fn vertex_l2_matrix(map: &CpMap) -> CMat {
    let ga = map.source.gns();
    let gb = map.target.gns();
    let rows = gb.dim() - 1;
    let cols = ga.dim() - 1;
    CMat::from_fn(rows, cols, |i, j| {
        map.target
            .gns_inner(&map.apply(&ga.basis_elems[j + 1]), &gb.basis_elems[i + 1])
    })
}

/// The degree-d Fock-level map ℱ_d^A → ℱ_d^B acting legwise, with its
/// exact operator norm (max over length-d words of the product of
/// restricted vertex norms).
pub struct FockLevelMap {
    pub d: usize,
    pub matrix: CMat,
    pub exact_norm: f64,
}

pub fn graph_product_on_fock(
    maps: &[CpMap],
    d: usize,
    f_a: &FockSpace,
    f_b: &FockSpace,
) -> FockLevelMap {
    let vmats: Vec<CMat> = maps.iter().map(vertex_l2_matrix).collect();
    let vnorms: Vec<f64> = vmats.iter().map(op_norm).collect();
    let mut out = zeros(f_b.dim(), f_a.dim());
    let mut exact: f64 = if d == 0 { 1.0 } else { 0.0 };
    for w in &f_a.words {
        if w.len() != d {
            continue;
        }
        let Some((a_off, _)) = f_a.block(w) else { continue };
        let Some((b_off, _)) = f_b.block(w) else { continue };
        let mut blk = identity(1);
        let mut nrm = 1.0;
        for &v in w.letters() {
            blk = kron(&blk, &vmats[v]);
            nrm *= vnorms[v];
        }
        exact = exact.max(nrm);
        for i in 0..blk.nrows() {
            for j in 0..blk.ncols() {
                out[(b_off + i, a_off + j)] = blk[(i, j)];
            }
        }
    }
    if d == 0 {
        out[(0, 0)] = cr(1.0);
    }
    FockLevelMap {
        d,
        matrix: out,
        exact_norm: exact,
    }
}

/// Fock-level difference bound d · (max norms)^{d−1} · max ‖T̊_v − S̊_v‖.
pub fn fock_difference_bound(maps_t: &[CpMap], maps_s: &[CpMap], d: usize) -> f64 {
    let nt: Vec<f64> = maps_t.iter().map(|m| op_norm(&vertex_l2_matrix(m))).collect();
    let ns: Vec<f64> = maps_s.iter().map(|m| op_norm(&vertex_l2_matrix(m))).collect();
    let nmax = nt.iter().chain(ns.iter()).cloned().fold(0.0f64, f64::max);
    let dmax = maps_t
        .iter()
        .zip(maps_s)
        .map(|(t, s)| op_norm(&(vertex_l2_matrix(t) - vertex_l2_matrix(s))))
        .fold(0.0f64, f64::max);
    d as f64 * nmax.powi(d as i32 - 1) * dmax
}

/// Per-vertex approximation net: finite-rank state-preserving maps
/// V_{v,j} approaching u.c.p. maps U_{v,j}.
pub struct CcapNet {
    pub galg: GraphAlgebra,
    /// v_maps[j][v]: the finite-rank leg of the net.
    pub v_maps: Vec<Vec<CpMap>>,
    /// u_maps[j][v]: the u.c.p. leg.
    pub u_maps: Vec<Vec<CpMap>>,
}

impl CcapNet {
    /// ε_{v,j}: sum of the cb, L²(A) and L²(A-op) norms of V_{v,j} − U_{v,j},
    /// measured with the cb part at the dimension-exact amplification level.
    pub fn epsilons(&self, j: usize, seed: u64) -> Vec<f64> {
        self.v_maps[j]
            .iter()
            .zip(&self.u_maps[j])
            .map(|(vm, um)| {
                let diff = vm.sub(um);
                let cb = diff.cb_lower_bound(seed, diff.target.matrix_dim(), 6);
                cb + diff.l2_norm(false) + diff.l2_norm(true)
            })
            .collect()
    }

    /// D_{N,j} = Σ_{d=0}^N (1 − 1/√N)^d F_{d,j} 𝒫_d applied algebraically.
    pub fn d_nj_apply(&self, n: usize, j: usize, x: &AlgElem) -> AlgElem {
        let r = 1.0 - 1.0 / (n as f64).sqrt();
        let mut out = AlgElem::scalar_elem(cr(0.0));
        for d in 0..=n {
            let part = graph_product_apply(&self.v_maps[j], &x.degree_part(d));
            out = out.add(&part.scale(cr(r.powi(d as i32))));
        }
        out
    }

    /// E_{N,j} = U_j ∘ 𝒯_{1−1/√N} applied algebraically.
    pub fn e_nj_apply(&self, n: usize, j: usize, x: &AlgElem) -> AlgElem {
        let r = 1.0 - 1.0 / (n as f64).sqrt();
        let mut out = AlgElem::scalar_elem(x.scalar);
        for d in 1..=x.max_degree() {
            let part = graph_product_apply(&self.u_maps[j], &x.degree_part(d));
            out = out.add(&part.scale(cr(r.powi(d as i32))));
        }
        out
    }
}

/// The proof's chain of upper bounds for ‖E_{N,j} − D_{N,j}‖ together with
/// sampled lower bounds.
#[derive(Debug, Clone)]
pub struct GapReport {
    pub n: usize,
    pub j: usize,
    pub eps: Vec<f64>,
    pub measured_cb_lower: f64,
    pub measured_l2_lower: f64,
    pub upper_cb: f64,
    pub upper_l2: f64,
}

pub fn ccap_gap_report(
    net: &CcapNet,
    n: usize,
    j: usize,
    f: &FockSpace,
    tests: &[AlgElem],
    seed: u64,
) -> Result<GapReport, MultiplierError> {
    let g = &net.galg.graph;
    let r = 1.0 - 1.0 / (n as f64).sqrt();
    let eps = net.epsilons(j, seed);
    let eps_max = eps.iter().cloned().fold(0.0f64, f64::max);
    let c_gamma = g.c_gamma() as f64;
    let cliq3 = (clique_count(g) as f64).powi(3);

    // cb chain: radial tail + Σ_d ‖U|𝒜_d − F_d‖_cb · ‖𝒫_d‖_cb.
    let mut upper_cb = radial_tail_bound(g.c_gamma(), n, r);
    for d in 1..=n {
        let u_minus_f = cliq3 * (d as f64).powi(2) * 2f64.powi(d as i32 - 1) * eps_max;
        upper_cb += u_minus_f * (c_gamma * d as f64);
    }
    // L² chain: ‖𝒫_d‖_{B(ℱ,ℱ_d)} ≤ 1 and the Fock-level difference bound.
    let mut upper_l2 = r.powi(n as i32 + 1);
    for d in 1..=n {
        upper_l2 += r.powi(d as i32) * d as f64 * 2f64.powi(d as i32 - 1) * eps_max;
    }

    let mut measured_cb: f64 = 0.0;
    let mut measured_l2: f64 = 0.0;
    for x in tests {
        let margin = x.max_degree();
        let safe = f.safe_proj(margin);
        let ex = net.e_nj_apply(n, j, x);
        let dx = net.d_nj_apply(n, j, x);
        let diff = net.galg.lambda(f, &ex.add(&dx.scale(cr(-1.0))))?;
        let lam_x = net.galg.lambda(f, x)?;
        let den_op = op_norm(&(&lam_x * &safe));
        if den_op > 1e-12 {
            measured_cb = measured_cb.max(op_norm(&(diff * &safe)) / den_op);
        }
        let vec_x = &lam_x * f.vacuum();
        let vec_diff = net.galg.lambda(f, &ex.add(&dx.scale(cr(-1.0))))? * f.vacuum();
        let den_l2 = vec_x.norm();
        if den_l2 > 1e-12 {
            measured_l2 = measured_l2.max(vec_diff.norm() / den_l2);
        }
    }
    Ok(GapReport {
        n,
        j,
        eps,
        measured_cb_lower: measured_cb,
        measured_l2_lower: measured_l2,
        upper_cb,
        upper_l2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(name: &str) -> SimpleGraph {
        test_graphs()
            .into_iter()
            .find(|(n, _)| *n == name)
            .unwrap()
            .1
    }

    fn random_pure(f: &FockSpace, rng: &mut ChaCha8Rng, w: &Word) -> PureTensor {
        let legs = w
            .letters()
            .iter()
            .map(|&v| random_centered_op(rng, f.vdims[v]))
            .collect();
        PureTensor::new(f, w.clone(), legs).unwrap()
    }

    #[test]
    fn h_tau_at_trivial_tuple_is_vacuum_component_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for (name, dims) in [("G2", vec![2, 2]), ("G3", vec![2, 2])] {
            let graph = g(name);
            let f = FockSpace::build(graph.clone(), dims, 3, DEFAULT_BASIS_CAP).unwrap();
            let tau = TauTuple {
                rho: RhoTuple {
                    n_l: 0,
                    n_r: 0,
                    u_l: Word::e(),
                    u_r: Word::e(),
                    t: Word::e(),
                },
                r: Word::e(),
            };
            // On λ(x) for x of degree 0 it is the identity; for x of
            // positive degree it vanishes.
            let id = identity(f.dim());
            assert!(op_norm(&(h_tau_apply(&f, &tau, &id) - &id)) < 1e-12);
            for w in graph.enumerate_words(2) {
                if w.is_empty() {
                    continue;
                }
                let lam = f.lambda_pure(&random_pure(&f, &mut rng, &w));
                assert!(op_norm(&h_tau_apply(&f, &tau, &lam)) < 1e-12);
            }
        }
    }

    #[test]
    fn h_tau_formula_matches_projection_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for name in ["G2", "G3", "G4"] {
            let graph = g(name);
            let dims = vec![2; graph.vertex_count()];
            let depth = 4;
            let f = FockSpace::build(graph.clone(), dims, depth, DEFAULT_BASIS_CAP).unwrap();
            let mut taus: Vec<TauTuple> = Vec::new();
            for rho in graph.rho_tuples(3) {
                for r in graph.sub_cliques(&rho.t.clone()) {
                    taus.push(TauTuple {
                        rho: rho.clone(),
                        r,
                    });
                }
            }
            for w in graph.enumerate_words(2) {
                if w.is_empty() {
                    continue;
                }
                let pt = random_pure(&f, &mut rng, &w);
                for omega in graph.triple_splittings(&w) {
                    let lam = f.lambda_triple(&omega, &pt).unwrap();
                    let safe = f.safe_proj(w.len());
                    for tau in &taus {
                        let got = h_tau_apply(&f, tau, &lam);
                        let want = &lam * p_a_tau_omega_blocks(&f, tau, &omega);
                        let diff = op_norm(&((got - want) * &safe));
                        assert!(
                            diff < 1e-10,
                            "H_tau formula fails: {name} w={w} omega=({},{},{}) tau={:?} diff={diff}",
                            omega.w1,
                            omega.w2,
                            omega.w3,
                            tau
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn h_tilde_selection_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for name in ["G2", "G3", "G4"] {
            let graph = g(name);
            let dims = vec![2; graph.vertex_count()];
            let depth = 4;
            let f = FockSpace::build(graph.clone(), dims, depth, DEFAULT_BASIS_CAP).unwrap();
            for w in graph.enumerate_words(2) {
                if w.is_empty() {
                    continue;
                }
                let pt = random_pure(&f, &mut rng, &w);
                let safe = f.safe_proj(w.len());
                for omega in graph.triple_splittings(&w) {
                    let lam = f.lambda_triple(&omega, &pt).unwrap();
                    let rho_omega = graph.rho_of_split(&omega);
                    for rho in graph.rho_tuples(4) {
                        if rho.degree() > w.len() + 1 {
                            continue;
                        }
                        let got = h_tilde_rho_apply(&f, &rho, &lam);
                        let want = if rho == rho_omega {
                            lam.clone()
                        } else {
                            zeros(f.dim(), f.dim())
                        };
                        let diff = op_norm(&((got - want) * &safe));
                        assert!(
                            diff < 1e-10,
                            "selection fails: {name} w={w} omega=({},{},{}) rho={:?} diff={diff}",
                            omega.w1,
                            omega.w2,
                            omega.w3,
                            rho
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn p_d_two_modes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for name in ["G2", "G3", "G4"] {
            let graph = g(name);
            let dims = vec![2; graph.vertex_count()];
            let depth = 4;
            let f = FockSpace::build(graph.clone(), dims, depth, DEFAULT_BASIS_CAP).unwrap();
            for w in graph.enumerate_words(2) {
                let lam = if w.is_empty() {
                    identity(f.dim())
                } else {
                    f.lambda_pure(&random_pure(&f, &mut rng, &w))
                };
                let safe = f.safe_proj(w.len().max(1));
                for d in 0..=3usize {
                    let got = p_d_apply(&f, d, &lam);
                    // Direct mode: keep the degree-d part of the element.
                    let want = if w.len() == d {
                        lam.clone()
                    } else {
                        zeros(f.dim(), f.dim())
                    };
                    let diff = op_norm(&((got - want) * &safe));
                    assert!(diff < 1e-8, "{name} w={w} d={d} diff={diff}");
                }
            }
        }
    }

    #[test]
    fn vnur_partial_isometries_and_materialized_h_tau() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for name in ["G2", "G3", "G4"] {
            let graph = g(name);
            let dims = vec![2; graph.vertex_count()];
            let f = FockSpace::build(graph.clone(), dims, 3, DEFAULT_BASIS_CAP).unwrap();
            // V_n^{e,e} vanishes for n ≥ 1.
            for n in 1..=2 {
                let v = vnur(&f, &Word::e(), &Word::e(), n).unwrap();
                assert_eq!(v.domain_dim(), 0);
            }
            let mut taus: Vec<TauTuple> = Vec::new();
            for rho in graph.rho_tuples(2) {
                for r in graph.sub_cliques(&rho.t.clone()) {
                    taus.push(TauTuple {
                        rho: rho.clone(),
                        r,
                    });
                }
            }
            for tau in &taus {
                for (u_part, n) in [
                    (graph.multiply(&tau.rho.u_l, &tau.rho.t), tau.rho.n_l),
                    (graph.multiply(&tau.rho.u_r, &tau.rho.t), tau.rho.n_r),
                ] {
                    let v = vnur(&f, &u_part, &tau.r, n).unwrap();
                    assert!(v.partial_isometry_defect() < 1e-12);
                    let vv = &v.matrix * v.matrix.adjoint();
                    let want = f.proj_f_m(&u_part, n);
                    assert!(op_norm(&(vv - want)) < 1e-12, "{name} tau={tau:?}");
                }
                // The structural H_τ equals the literal formula with
                // materialized partial isometries, on arbitrary matrices.
                let x = random_cmat(&mut rng, f.dim(), f.dim());
                let a = h_tau_apply(&f, tau, &x);
                let b = h_tau_materialized(&f, tau, &x);
                assert!(op_norm(&(a - b)) < 1e-10, "{name} tau={tau:?}");
            }
            // Invalid suffix clique is rejected.
            let u0 = graph.single(0);
            assert!(vnur(&f, &Word::e(), &u0, 0).is_err());
        }
    }

    fn trace_alg_over(graph: &SimpleGraph) -> GraphAlgebra {
        let verts = vec![VertexAlgebra::m2_trace(); graph.vertex_count()];
        GraphAlgebra::new(graph.clone(), verts).unwrap()
    }

    #[test]
    fn graph_product_ucp_identity_and_radial() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let graph = g("G4");
        let galg = trace_alg_over(&graph);
        let f = galg.fock(3, DEFAULT_BASIS_CAP).unwrap();
        let ids: Vec<CpMap> = galg.verts.iter().map(CpMap::identity).collect();
        let urs: Vec<CpMap> = galg.verts.iter().map(|a| CpMap::u_r(a, 0.4)).collect();
        let gid = graph_product_ucp(&graph, ids).unwrap();
        let gur = graph_product_ucp(&graph, urs).unwrap();
        for w in graph.enumerate_words(2) {
            if w.is_empty() {
                continue;
            }
            let x = galg.random_elem(&mut rng, &w);
            let lam = galg.lambda(&f, &x).unwrap();
            let safe = f.safe_proj(w.len());
            let id_out = galg.lambda(&f, &gid.apply(&x)).unwrap();
            assert!(op_norm(&((id_out - &lam) * &safe)) < 1e-10);
            // Graph product of U_{r,v} is the radial multiplier.
            let ur_out = galg.lambda(&f, &gur.apply(&x)).unwrap();
            let rad = radial_apply(&f, 0.4, None, &lam).unwrap();
            assert!(op_norm(&((ur_out - rad) * &safe)) < 1e-8);
        }
        // Error cases name the offending vertex.
        let mut bad = galg.verts.iter().map(CpMap::identity).collect::<Vec<_>>();
        bad[1] = CpMap::transpose(&galg.verts[1]);
        match graph_product_ucp(&graph, bad) {
            Err(MultiplierError::NotUcp(1, ev, _)) => assert!(ev < -1e-3),
            other => panic!("expected NotUcp(1, ..), got {other:?}"),
        }
        let skew = VertexAlgebra::scalar2(0.3);
        let mut maps2 = vec![CpMap::identity(&skew), CpMap::identity(&skew)];
        // Coordinate swap on C ⊕ C: a *-automorphism, hence u.c.p., but it
        // moves the (0.3, 0.7) state.
        maps2[0] = CpMap::from_action(skew.clone(), skew.clone(), |a| {
            let mut b = a.clone();
            b.swap((0, 0), (1, 1));
            b
        });
        match graph_product_ucp(&g("G2"), maps2) {
            Err(MultiplierError::NotStatePreserving(0, d)) => assert!(d > 0.1),
            other => panic!("expected NotStatePreserving(0, ..), got {other:?}"),
        }
    }

    #[test]
    fn graph_product_ucp_dilation_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let graph = g("G4");
        let galg = trace_alg_over(&graph);
        let maps: Vec<CpMap> = galg
            .verts
            .iter()
            .enumerate()
            .map(|(v, a)| CpMap::random_unitary_mixture(a, 100 + v as u64, 2))
            .collect();
        let gp = graph_product_ucp(&graph, maps).unwrap();
        let depth = 3;
        let f_b = gp.target.fock(depth, DEFAULT_BASIS_CAP).unwrap();
        let f_hat = gp.hat_fock(depth, DEFAULT_BASIS_CAP).unwrap();
        let mut tests = Vec::new();
        for w in graph.enumerate_words(2) {
            if !w.is_empty() {
                tests.push(gp.source.random_elem(&mut rng, &w));
            }
        }
        let defect = gp.dilation_identity_defect(&f_b, &f_hat, &tests).unwrap();
        assert!(defect < 1e-10, "dilation identity defect {defect}");
        // State preservation through the product: φ(θ(λx)) = φ(λx).
        for x in &tests {
            let lhs = f_b.vacuum_state(&gp.target.lambda(&f_b, &gp.apply(x)).unwrap());
            let rhs = f_b.vacuum_state(&gp.source.lambda(&f_b, x).unwrap());
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn cb_on_ad_bounds() {
        let graph = g("G2");
        let galg = trace_alg_over(&graph);
        let f = galg.fock(3, DEFAULT_BASIS_CAP).unwrap();
        let ids: Vec<CpMap> = galg.verts.iter().map(CpMap::identity).collect();
        let cs_id: Vec<f64> = ids.iter().map(|m| m.norms(7).c_value()).collect();
        // Identity family: C-values are 1, bound = (#Cliq)³ · d.
        for c in &cs_id {
            assert!((c - 1.0).abs() < 0.05, "C(identity) ≈ 1, got {c}");
        }
        let cliq3 = (clique_count(&graph) as f64).powi(3);
        assert!((cb_on_ad_bound(&graph, &[1.0, 1.0], 2) - cliq3 * 2.0).abs() < 1e-12);
        // Random family: measured lower bound stays below the certified bound.
        let maps: Vec<CpMap> = galg
            .verts
            .iter()
            .enumerate()
            .map(|(v, a)| CpMap::random_unitary_mixture(a, 200 + v as u64, 2))
            .collect();
        let cs: Vec<f64> = maps.iter().map(|m| m.norms(7).c_value()).collect();
        for d in 1..=2usize {
            let measured = measured_cb_lower_on_ad(
                &galg, &galg, &maps, d, &f, &f, 11, 2, 2,
            );
            let upper = cb_on_ad_bound(&graph, &cs, d);
            assert!(
                measured <= upper + 1e-9,
                "d={d}: measured {measured} > bound {upper}"
            );
            assert!(measured > 0.0);
        }
        // Difference bound dominates the measured difference on samples.
        let diff_cs: Vec<f64> = maps
            .iter()
            .zip(&ids)
            .map(|(t, s)| t.sub(s).norms(7).c_value())
            .collect();
        let db = cb_on_ad_difference_bound(&graph, &cs, &cs_id, &diff_cs, 2);
        assert!(db >= 0.0);
    }

    #[test]
    fn fock_level_maps() {
        let graph = g("G4");
        let galg = trace_alg_over(&graph);
        let f = galg.fock(3, DEFAULT_BASIS_CAP).unwrap();
        let ids: Vec<CpMap> = galg.verts.iter().map(CpMap::identity).collect();
        for d in 0..=2usize {
            let fl = graph_product_on_fock(&ids, d, &f, &f);
            assert!((fl.exact_norm - 1.0).abs() < 1e-12);
            // Identity maps act isometrically on the degree-d slice.
            let slice = f.proj_words(|w| w.len() == d);
            assert!(op_norm(&(&fl.matrix - &slice)) < 1e-12);
        }
        // Exact norm formula: scaling one vertex map scales per occurrence,
        // and the matrix norm equals the formula value.
        let mut maps = ids.clone();
        maps[1] = maps[1].scale(0.5);
        for d in 1..=3usize {
            let fl = graph_product_on_fock(&maps, d, &f, &f);
            assert!((op_norm(&fl.matrix) - fl.exact_norm).abs() < 1e-10);
            // Letters 0 and 2 are non-adjacent, so 0202… avoids letter 1 at
            // every degree and the max-over-words norm stays 1.
            assert!((fl.exact_norm - 1.0).abs() < 1e-12, "d={d}: {}", fl.exact_norm);
        }
        // On the complete two-vertex graph every degree-2 word contains
        // letter 1, so the scaled norm shows up: 0.5 per occurrence.
        let g3 = g("G3");
        let galg3 = trace_alg_over(&g3);
        let f3 = galg3.fock(2, DEFAULT_BASIS_CAP).unwrap();
        let mut maps3: Vec<CpMap> = galg3.verts.iter().map(CpMap::identity).collect();
        maps3[1] = maps3[1].scale(0.5);
        let fl3 = graph_product_on_fock(&maps3, 2, &f3, &f3);
        assert!((fl3.exact_norm - 0.5).abs() < 1e-12);
        // Difference estimate.
        let scaled: Vec<CpMap> = ids.iter().map(|m| m.scale(0.8)).collect();
        for d in 1..=3usize {
            let ta = graph_product_on_fock(&ids, d, &f, &f);
            let tb = graph_product_on_fock(&scaled, d, &f, &f);
            let lhs = op_norm(&(&ta.matrix - &tb.matrix));
            let rhs = fock_difference_bound(&ids, &scaled, d);
            assert!(lhs <= rhs + 1e-10, "d={d}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn ccap_net_reports() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let graph = g("G2");
        let galg = trace_alg_over(&graph);
        let f = galg.fock(3, DEFAULT_BASIS_CAP).unwrap();
        let nv = graph.vertex_count();
        let epsilons = [0.3, 0.1, 0.02];
        let net = CcapNet {
            galg: galg.clone(),
            v_maps: epsilons
                .iter()
                .map(|&e| {
                    galg.verts
                        .iter()
                        .map(|a| {
                            let idm = CpMap::identity(a);
                            let st = CpMap::state_map(a);
                            // (1−ε)·id + ε·φ(·)1, a finite-rank-leaning u.c.p. map.
                            CpMap::from_unit_images(
                                a.clone(),
                                a.clone(),
                                idm.unit_images
                                    .iter()
                                    .zip(&st.unit_images)
                                    .map(|(x, y)| x * cr(1.0 - e) + y * cr(e))
                                    .collect(),
                            )
                        })
                        .collect()
                })
                .collect(),
            u_maps: (0..3)
                .map(|_| galg.verts.iter().map(CpMap::identity).collect())
                .collect(),
        };
        let mut tests = Vec::new();
        for w in graph.enumerate_words(2) {
            if !w.is_empty() {
                tests.push(galg.random_elem(&mut rng, &w));
            }
        }
        // Identity net: D_{N,j} = 𝒯_{1−1/√N, N}.
        let id_net = CcapNet {
            galg: galg.clone(),
            v_maps: vec![galg.verts.iter().map(CpMap::identity).collect(); 1],
            u_maps: vec![galg.verts.iter().map(CpMap::identity).collect(); 1],
        };
        for x in &tests {
            let lam = galg.lambda(&f, x).unwrap();
            let safe = f.safe_proj(x.max_degree());
            let d_out = galg.lambda(&f, &id_net.d_nj_apply(4, 0, x)).unwrap();
            let r = 1.0 - 1.0 / 2.0;
            let want = radial_apply(&f, r, Some(4), &lam).unwrap();
            assert!(op_norm(&((d_out - want) * &safe)) < 1e-8);
        }
        let _ = nv;
        // Gap reports: measured ≤ upper, upper decreasing along the net.
        let mut uppers = Vec::new();
        for j in 0..3 {
            let rep = ccap_gap_report(&net, 4, j, &f, &tests, 5).unwrap();
            assert!(rep.measured_cb_lower <= rep.upper_cb + 1e-9);
            assert!(rep.measured_l2_lower <= rep.upper_l2 + 1e-9);
            uppers.push((rep.upper_cb, rep.upper_l2));
        }
        assert!(uppers[2].0 < uppers[1].0 && uppers[1].0 < uppers[0].0);
        assert!(uppers[2].1 < uppers[1].1 && uppers[1].1 < uppers[0].1);
        // D_{N,j}(λ(a)) → λ(a) pointwise along N (fixed j = last).
        for x in &tests {
            let lam = galg.lambda(&f, x).unwrap();
            let safe = f.safe_proj(x.max_degree());
            let mut prev = f64::INFINITY;
            for n in [4usize, 16, 64] {
                let d_out = galg.lambda(&f, &net.d_nj_apply(n, 2, x)).unwrap();
                let gap = op_norm(&((d_out - &lam) * &safe));
                assert!(gap < prev + 1e-12, "N={n}: {gap} !< {prev}");
                prev = gap;
            }
        }
    }

    #[test]
    fn radial_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let graph = g("G3");
        let f = FockSpace::build(graph.clone(), vec![2, 2], 4, DEFAULT_BASIS_CAP).unwrap();
        assert!(radial_apply(&f, 1.5, None, &identity(f.dim())).is_err());
        for w in graph.enumerate_words(2) {
            let lam = if w.is_empty() {
                identity(f.dim())
            } else {
                f.lambda_pure(&random_pure(&f, &mut rng, &w))
            };
            let safe = f.safe_proj(w.len().max(1));
            // r = 1 acts as the identity, r = 0 as the vacuum component.
            let t1 = radial_apply(&f, 1.0, None, &lam).unwrap();
            assert!(op_norm(&((t1 - &lam) * &safe)) < 1e-8);
            let t0 = radial_apply(&f, 0.0, None, &lam).unwrap();
            let p0 = p_d_apply(&f, 0, &lam);
            assert!(op_norm(&((t0 - p0) * &safe)) < 1e-10);
            // Scaling law and semigroup on homogeneous elements.
            for (r, s) in [(0.3, 0.7), (0.7, 0.7), (0.3, 1.0)] {
                let tr = radial_apply(&f, r, None, &lam).unwrap();
                let want = &lam * cr(r.powi(w.len() as i32));
                assert!(op_norm(&((&tr - want) * &safe)) < 1e-8);
                let ts_tr = radial_apply(&f, s, None, &tr).unwrap();
                let trs = radial_apply(&f, r * s, None, &lam).unwrap();
                assert!(op_norm(&((ts_tr - trs) * &safe)) < 1e-8);
            }
        }
        // Tail bound is positive and decreasing in n.
        let cg = graph.c_gamma();
        assert!(radial_tail_bound(cg, 6, 0.5) < radial_tail_bound(cg, 3, 0.5));
    }
}
