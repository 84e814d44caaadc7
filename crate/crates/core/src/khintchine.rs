//! Free-product creation/annihilation spaces and the operator-matrix
//! realization of the component maps: θ_1/ρ_1, Diag_w, the X̃_d/X_d
//! components Θ̃_d and j_d, the J_ρ partial isometries and the dilation
//! identity that certifies complete contractivity of Θ̃_d.
//!
//! Column/row Hilbert-space factors are realized concretely: a component
//! over the tuple ρ is the rectangular matrix col ⊗ middle ⊗ row, whose
//! operator norm is the Haagerup-tensor norm on elementary tensors.

use crate::coxeter::*;
use crate::fock::*;
use crate::linalg::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KhinError {
    #[error("input vertex element is not centered (state value {0:.3e})")]
    NotCentered(f64),
    #[error("word {0} is not equivalent to a clique word in the graph product")]
    NotCliqueEquivalent(Word),
    #[error("element is not homogeneous of degree {0}")]
    Inhomogeneous(usize),
    #[error("element lies outside the computed range (residual {0:.3e})")]
    OutsideRange(f64),
    #[error("depth {have} insufficient, need at least {required}")]
    InsufficientDepth { required: usize, have: usize },
    #[error("fock error: {0}")]
    Fock(#[from] FockError),
    #[error("word error: {0}")]
    Word(#[from] CoxeterError),
}

/// The graph with the same vertices and no edges; its reduced graph
/// product is the free product.
pub fn free_graph(g: &SimpleGraph) -> SimpleGraph {
    SimpleGraph::new(g.vertex_count(), &[]).expect("edgeless graph")
}

/// Free Fock space over Γ^f with the conventional extra depth allowance.
pub fn free_fock(g: &SimpleGraph, vdims: Vec<usize>, depth: usize) -> Result<FockSpace, FockError> {
    FockSpace::build(free_graph(g), vdims, depth, DEFAULT_BASIS_CAP)
}

/// θ_1 and ρ_1 of a centered vertex element on the free Fock space:
/// creation-only and annihilation-only compressions of λ_v.
pub fn theta1_rho1(ff: &FockSpace, v: Letter, a: &CMat) -> Result<(CMat, CMat), KhinError> {
    let st = a[(0, 0)].norm();
    if st > 1e-10 {
        return Err(KhinError::NotCentered(st));
    }
    let lam = ff.lambda_v(v, a);
    let p = ff.p_v(v);
    let pperp = identity(ff.dim()) - &p;
    Ok((&p * &lam * &pperp, &pperp * &lam * &p))
}

/// Diag_w(a) on the free Fock space: on words starting with w the first
/// |w| legs are compressed through the centered blocks of the a-legs, the
/// tail is untouched; zero elsewhere. `gamma` supplies the clique check.
pub fn diag_w(
    ff: &FockSpace,
    gamma: &SimpleGraph,
    w: &Word,
    legs: &[CMat],
) -> Result<CMat, KhinError> {
    let gp = gamma.word_from_letters(w.letters())?;
    if !gamma.is_clique_word(&gp) {
        return Err(KhinError::NotCliqueEquivalent(w.clone()));
    }
    assert_eq!(legs.len(), w.len());
    let cent: Vec<CMat> = legs
        .iter()
        .map(|a| a.view((1, 1), (a.nrows() - 1, a.ncols() - 1)).into_owned())
        .collect();
    let mut out = zeros(ff.dim(), ff.dim());
    for v in &ff.words {
        if !ff.graph.starts_with(v, w) {
            continue;
        }
        let (off, _) = ff.block(v).unwrap();
        let mut blk = identity(1);
        for (k, &letter) in v.letters().iter().enumerate() {
            if k < w.len() {
                blk = kron(&blk, &cent[k]);
            } else {
                blk = kron(&blk, &identity(ff.cdim(letter)));
            }
        }
        for i in 0..blk.nrows() {
            for j in 0..blk.ncols() {
                out[(off + i, off + j)] = blk[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Per-ρ components of X̃_d/X_d elements as concrete rectangular matrices:
/// rows indexed by (column-factor basis) × ℋ_t, columns by ℋ_t ×
/// (row-factor basis); for X_d the middle index runs over the free Fock
/// space instead of ℋ_t.
#[derive(Debug, Clone)]
pub struct XdElement {
    pub d: usize,
    pub components: Vec<(RhoTuple, CMat)>,
}

impl XdElement {
    /// Sup-norm over the components.
    pub fn norm(&self) -> f64 {
        self.components
            .iter()
            .map(|(_, m)| op_norm(m))
            .fold(0.0, f64::max)
    }

    pub fn component(&self, rho: &RhoTuple) -> Option<&CMat> {
        self.components.iter().find(|(r, _)| r == rho).map(|(_, m)| m)
    }
}

/// Total centered dimension Σ_v (h_v − 1) of ⊕ℋ̊_v, with per-vertex offsets.
fn centered_offsets(f: &FockSpace) -> (usize, Vec<usize>) {
    let mut offs = Vec::with_capacity(f.graph.vertex_count());
    let mut s = 0;
    for v in 0..f.graph.vertex_count() {
        offs.push(s);
        s += f.cdim(v);
    }
    (s, offs)
}

/// Column vector of θ_1(λ(å)) in ⊕ℋ̊_v: the centered column of the leg.
fn theta_column(f: &FockSpace, s: usize, offs: &[usize], v: Letter, a: &CMat) -> CMat {
    let mut col = zeros(s, 1);
    for r in 0..f.cdim(v) {
        col[(offs[v] + r, 0)] = a[(1 + r, 0)];
    }
    col
}

/// Row vector of ρ_1(λ(å)) in ⊕ℋ̊_v^op: the centered row of the leg.
fn rho_row(f: &FockSpace, s: usize, offs: &[usize], v: Letter, a: &CMat) -> CMat {
    let mut row = zeros(1, s);
    for c in 0..f.cdim(v) {
        row[(0, offs[v] + c)] = a[(0, 1 + c)];
    }
    row
}

/// Splits a pure tensor along ρ: returns the leg groups (a₁, a₂, a₃) in
/// the representative orders of v_l·u_l, t and u_r⁻¹·v_r⁻¹, or None when
/// the word does not factor through ρ.
fn split_legs_for_rho(
    g: &SimpleGraph,
    pt: &PureTensor,
    rho: &RhoTuple,
) -> Option<(Vec<(Letter, CMat)>, Vec<(Letter, CMat)>, Vec<(Letter, CMat)>)> {
    let sps = g.splittings_for_rho(&pt.word, rho);
    let om = sps.first()?;
    let (prod, perm) = shuffle_perm(g, &[&om.w1, &om.w2, &om.w3]).ok()?;
    debug_assert_eq!(prod, pt.word);
    let concat: Vec<Letter> = om
        .w1
        .letters()
        .iter()
        .chain(om.w2.letters())
        .chain(om.w3.letters())
        .copied()
        .collect();
    let picked: Vec<(Letter, CMat)> = concat
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, pt.legs[perm[k]].clone()))
        .collect();
    let n1 = om.w1.len();
    let n2 = om.w2.len();
    Some((
        picked[..n1].to_vec(),
        picked[n1..n1 + n2].to_vec(),
        picked[n1 + n2..].to_vec(),
    ))
}

fn kron_cols(parts: &[CMat]) -> CMat {
    let mut out = identity(1);
    for p in parts {
        out = kron(&out, p);
    }
    out
}

/// Component shapes: (rows, cols) of the ρ-component given the middle
/// dimension (dim ℋ_t for X̃_d, free Fock dim for X_d).
fn component_shape(f: &FockSpace, rho: &RhoTuple, mid_dim: usize) -> (usize, usize) {
    let (s, _) = centered_offsets(f);
    let nl = rho.n_l + rho.u_l.len();
    let nr = rho.n_r + rho.u_r.len();
    (s.pow(nl as u32) * mid_dim, mid_dim * s.pow(nr as u32))
}

fn h_t_dim(f: &FockSpace, t: &Word) -> usize {
    t.letters().iter().map(|&v| f.vdims[v]).product()
}

/// The ρ-component of Θ̃_d(λ(a)) for a pure tensor: col ⊗ a₂ ⊗ row, with
/// a₂ acting on ℋ_t (full vertex spaces).
pub fn theta_tilde_component(f: &FockSpace, pt: &PureTensor, rho: &RhoTuple) -> CMat {
    let (s, offs) = centered_offsets(f);
    let kt = h_t_dim(f, &rho.t);
    let (rows, cols) = component_shape(f, rho, kt);
    let Some((a1, a2, a3)) = split_legs_for_rho(&f.graph, pt, rho) else {
        return zeros(rows, cols);
    };
    let col = kron_cols(
        &a1.iter()
            .map(|(v, a)| theta_column(f, s, &offs, *v, a))
            .collect::<Vec<_>>(),
    );
    let mid = kron_cols(&a2.iter().map(|(_, a)| a.clone()).collect::<Vec<_>>());
    let row = kron_cols(
        &a3.iter()
            .map(|(v, a)| rho_row(f, s, &offs, *v, a))
            .collect::<Vec<_>>(),
    );
    kron(&kron(&col, &mid), &row)
}

/// The ρ-component of j_d(a): like Θ̃_d but with Diag_{t'}(a₂) on the free
/// Fock space in the middle slot.
pub fn j_component(
    f: &FockSpace,
    ff: &FockSpace,
    pt: &PureTensor,
    rho: &RhoTuple,
) -> Result<CMat, KhinError> {
    let (s, offs) = centered_offsets(f);
    let (rows, cols) = component_shape(f, rho, ff.dim());
    let Some((a1, a2, a3)) = split_legs_for_rho(&f.graph, pt, rho) else {
        return Ok(zeros(rows, cols));
    };
    let col = kron_cols(
        &a1.iter()
            .map(|(v, a)| theta_column(f, s, &offs, *v, a))
            .collect::<Vec<_>>(),
    );
    let t_free = free_word(&ff.graph, &rho.t);
    let mid = diag_w(
        ff,
        &f.graph,
        &t_free,
        &a2.iter().map(|(_, a)| a.clone()).collect::<Vec<_>>(),
    )?;
    let row = kron_cols(
        &a3.iter()
            .map(|(v, a)| rho_row(f, s, &offs, *v, a))
            .collect::<Vec<_>>(),
    );
    Ok(kron(&kron(&col, &mid), &row))
}

/// A Γ-word with its letter sequence reinterpreted over the free graph.
pub fn free_word(gf: &SimpleGraph, w: &Word) -> Word {
    gf.word_from_letters(w.letters()).expect("free word")
}

fn check_homogeneous(x: &AlgebraicElement, d: usize) -> Result<(), KhinError> {
    if d == 0 {
        if !x.terms.is_empty() {
            return Err(KhinError::Inhomogeneous(0));
        }
    } else if x.scalar.norm() > 0.0 || x.terms.iter().any(|(_, t)| t.word.len() != d) {
        return Err(KhinError::Inhomogeneous(d));
    }
    Ok(())
}

fn trivial_rho() -> RhoTuple {
    RhoTuple {
        n_l: 0,
        n_r: 0,
        u_l: Word::e(),
        u_r: Word::e(),
        t: Word::e(),
    }
}

/// Θ̃_d of a homogeneous degree-d element: the full tuple of ρ-components.
pub fn theta_tilde_d(f: &FockSpace, x: &AlgebraicElement, d: usize) -> Result<XdElement, KhinError> {
    check_homogeneous(x, d)?;
    if d == 0 {
        let m = CMat::from_element(1, 1, x.scalar);
        return Ok(XdElement {
            d,
            components: vec![(trivial_rho(), m)],
        });
    }
    let mut components = Vec::new();
    for rho in f.graph.rho_tuples(d) {
        let kt = h_t_dim(f, &rho.t);
        let (rows, cols) = component_shape(f, &rho, kt);
        let mut m = zeros(rows, cols);
        for (c, pt) in &x.terms {
            m += theta_tilde_component(f, pt, &rho) * *c;
        }
        components.push((rho, m));
    }
    Ok(XdElement { d, components })
}

/// j_d of a homogeneous degree-d element (components in X_d).
pub fn j_d(
    f: &FockSpace,
    ff: &FockSpace,
    x: &AlgebraicElement,
    d: usize,
) -> Result<XdElement, KhinError> {
    check_homogeneous(x, d)?;
    if d == 0 {
        let m = CMat::from_element(1, 1, x.scalar);
        return Ok(XdElement {
            d,
            components: vec![(trivial_rho(), m)],
        });
    }
    let mut components = Vec::new();
    for rho in f.graph.rho_tuples(d) {
        let (rows, cols) = component_shape(f, &rho, ff.dim());
        let mut m = zeros(rows, cols);
        for (c, pt) in &x.terms {
            m += j_component(f, ff, pt, &rho)? * *c;
        }
        components.push((rho, m));
    }
    Ok(XdElement { d, components })
}

/// Basis of the homogeneous degree-d part: all length-d words with matrix
/// units (excluding the corner fixed by the vacuum) on every leg.
pub fn degree_basis(f: &FockSpace, d: usize) -> Vec<PureTensor> {
    let mut out = Vec::new();
    for w in f.graph.enumerate_words(d) {
        if w.len() != d {
            continue;
        }
        let per_leg: Vec<Vec<CMat>> = w
            .letters()
            .iter()
            .map(|&v| {
                let h = f.vdims[v];
                let mut units = Vec::new();
                for p in 0..h {
                    for q in 0..h {
                        if (p, q) != (0, 0) {
                            units.push(matrix_unit(h, p, q));
                        }
                    }
                }
                units
            })
            .collect();
        let mut combos: Vec<Vec<CMat>> = vec![Vec::new()];
        for units in &per_leg {
            let mut next = Vec::new();
            for c in &combos {
                for u in units {
                    let mut c2 = c.clone();
                    c2.push(u.clone());
                    next.push(c2);
                }
            }
            combos = next;
        }
        for legs in combos {
            out.push(PureTensor::new(f, w.clone(), legs).unwrap());
        }
    }
    out
}

fn vectorize_xd(y: &XdElement) -> CVec {
    let total: usize = y.components.iter().map(|(_, m)| m.len()).sum();
    let mut v = CVec::zeros(total);
    let mut off = 0;
    for (_, m) in &y.components {
        for val in m.iter() {
            v[off] = *val;
            off += 1;
        }
    }
    v
}

/// Linear inverse of j_d on its range: least-squares in the degree-d
/// basis, with a residual check certifying membership of the range.
pub fn e_d_reconstruct(
    f: &FockSpace,
    ff: &FockSpace,
    y: &XdElement,
    d: usize,
) -> Result<AlgebraicElement, KhinError> {
    if d == 0 {
        let z = y
            .component(&trivial_rho())
            .map(|m| m[(0, 0)])
            .unwrap_or_else(|| cr(0.0));
        return Ok(AlgebraicElement::scalar(z));
    }
    let basis = degree_basis(f, d);
    let cols: Vec<CVec> = basis
        .iter()
        .map(|pt| {
            let x = AlgebraicElement::from_pure(pt.clone());
            Ok(vectorize_xd(&j_d(f, ff, &x, d)?))
        })
        .collect::<Result<_, KhinError>>()?;
    let rows = cols.first().map(|c| c.len()).unwrap_or(0);
    let mut a = zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        a.set_column(j, c);
    }
    let b = vectorize_xd(y);
    let svd = a.clone().svd(true, true);
    let coef = svd.solve(&b, 1e-12).expect("least squares");
    let coef = CVec::from_iterator(cols.len(), coef.iter().copied());
    let resid = (&a * &coef - &b).norm();
    if resid > 1e-8 * (1.0 + b.norm()) {
        return Err(KhinError::OutsideRange(resid));
    }
    let mut terms = Vec::new();
    for (j, pt) in basis.into_iter().enumerate() {
        if coef[j].norm() > 1e-13 {
            terms.push((coef[j], pt));
        }
    }
    let mut out = AlgebraicElement::scalar(cr(0.0));
    out.terms = terms;
    Ok(out)
}

/// Decomposition of an ℋ_t basis index into a sub-clique word and a
/// multi-index of its centered block (digit 0 on a leg means ξ).
fn split_h_t_index(f: &FockSpace, t: &Word, k: usize) -> (Word, Vec<usize>) {
    let mut digits = vec![0usize; t.len()];
    let mut rem = k;
    for i in (0..t.len()).rev() {
        let h = f.vdims[t.letters()[i]];
        digits[i] = rem % h;
        rem /= h;
    }
    let letters: Vec<Letter> = t
        .letters()
        .iter()
        .zip(&digits)
        .filter(|(_, &dg)| dg >= 1)
        .map(|(&l, _)| l)
        .collect();
    let r = f.graph.word_from_letters(&letters).expect("sub-clique");
    let midx: Vec<usize> = digits.iter().copied().filter(|&dg| dg >= 1).collect();
    (r, midx)
}

/// Flat index in ⊕ℋ̊_v → (vertex, centered digit).
fn split_centered_index(f: &FockSpace, offs: &[usize], s_idx: usize) -> (Letter, usize) {
    let mut v = f.graph.vertex_count() - 1;
    for (vv, &o) in offs.iter().enumerate() {
        if s_idx < o {
            v = vv - 1;
            break;
        }
        v = vv;
    }
    (v, s_idx - offs[v] + 1)
}

/// Structural evaluation of the right-hand side of the dilation identity
/// for Θ̃_d on the grid realizing the component matrix: single-letter
/// column/row factors, ℋ_t in the middle. Returns the residual against
/// the directly computed component. Never materializes the tensor power.
pub fn verify_dilation(f: &FockSpace, pt: &PureTensor, rho: &RhoTuple) -> Result<f64, KhinError> {
    let d = pt.word.len();
    if f.depth < 2 * d.max(rho.degree()) {
        return Err(KhinError::InsufficientDepth {
            required: 2 * d.max(rho.degree()),
            have: f.depth,
        });
    }
    let g = &f.graph;
    let (s, offs) = centered_offsets(f);
    let nl = rho.n_l + rho.u_l.len();
    let nr = rho.n_r + rho.u_r.len();
    let kt = h_t_dim(f, &rho.t);
    let u_l_t = g.multiply(&rho.u_l, &rho.t);
    let u_r_t = g.multiply(&rho.u_r, &rho.t);
    let lhs = theta_tilde_component(f, pt, rho);
    let lam = f.lambda_pure(pt);

    // Row data: J^L images for every (s'-tuple, k') grid point.
    let m_l = s.pow(nl as u32);
    let m_r = s.pow(nr as u32);
    let mut row_vecs: Vec<Option<CVec>> = Vec::with_capacity(m_l * kt);
    for sp in 0..m_l {
        // Decompose the column-factor index into per-copy (vertex, digit).
        let mut parts_vd = Vec::with_capacity(nl);
        let mut rem = sp;
        for _ in 0..nl {
            let idx = rem % s;
            rem /= s;
            parts_vd.push(split_centered_index(f, &offs, idx));
        }
        parts_vd.reverse(); // big-endian kron order
        let firsts: Vec<Letter> = parts_vd.iter().map(|(v, _)| *v).collect();
        let pword = g.word_from_letters(&firsts)?;
        let canonical = pword.letters() == &firsts[..] && pword.len() == nl;
        let valid = canonical && g.ends_with(&pword, &rho.u_l) && {
            let v_l = g.multiply(&pword, &g.inverse(&rho.u_l));
            v_l.len() == rho.n_l
                && v_l.len() + rho.u_l.len() == pword.len()
                && g.in_wtr(&u_l_t, &v_l)
        };
        for kp in 0..kt {
            if !valid {
                row_vecs.push(None);
                continue;
            }
            let (r_l, midx) = split_h_t_index(f, &rho.t, kp);
            let mut parts: Vec<(Word, CVec)> = Vec::new();
            for &(v, dg) in &parts_vd {
                let mut unit = CVec::zeros(f.cdim(v));
                unit[dg - 1] = cr(1.0);
                parts.push((g.single(v), unit));
            }
            let rsz = f.block_size(&r_l);
            let mut rvec = CVec::zeros(rsz);
            rvec[f.encode_multi_index(&r_l, &midx)] = cr(1.0);
            parts.push((r_l, rvec));
            match f.shuffle(&parts) {
                Ok((zw, zv)) => {
                    if f.block(&zw).is_some() {
                        row_vecs.push(Some(f.embed_block(&zw, &zv)?));
                    } else {
                        row_vecs.push(None);
                    }
                }
                Err(_) => row_vecs.push(None),
            }
        }
    }

    // Columns: J^R then λ(a), then pair against the row data.
    let mut rhs = zeros(m_l * kt, kt * m_r);
    for k in 0..kt {
        let (r_r, midx) = split_h_t_index(f, &rho.t, k);
        for srow in 0..m_r {
            let mut parts_vd = Vec::with_capacity(nr);
            let mut rem = srow;
            for _ in 0..nr {
                let idx = rem % s;
                rem /= s;
                parts_vd.push(split_centered_index(f, &offs, idx));
            }
            parts_vd.reverse();
            let firsts: Vec<Letter> = parts_vd.iter().map(|(v, _)| *v).collect();
            let qword = g.word_from_letters(&firsts)?;
            let canonical = qword.letters() == &firsts[..] && qword.len() == nr;
            let valid = canonical && {
                let v_r_inv = g.multiply(&rho.u_r, &qword);
                let v_r = g.inverse(&v_r_inv);
                v_r.len() == rho.n_r
                    && rho.u_r.len() + qword.len() == rho.u_r.len() + nr
                    && g.in_wtr(&u_r_t, &v_r)
            };
            if !valid {
                continue;
            }
            // ζ₁ = 𝒬_{(v_n̄,…,v_1, r_r)}(η'_n̄ ⊗ … ⊗ η'_1 ⊗ η₀').
            let mut parts: Vec<(Word, CVec)> = Vec::new();
            for &(v, dg) in parts_vd.iter().rev() {
                let mut unit = CVec::zeros(f.cdim(v));
                unit[dg - 1] = cr(1.0);
                parts.push((g.single(v), unit));
            }
            let rsz = f.block_size(&r_r);
            let mut rvec = CVec::zeros(rsz);
            rvec[f.encode_multi_index(&r_r, &midx)] = cr(1.0);
            parts.push((r_r.clone(), rvec));
            let Ok((zw, zv)) = f.shuffle(&parts) else { continue };
            if f.block(&zw).is_none() {
                continue;
            }
            let zeta2 = &lam * f.embed_block(&zw, &zv)?;
            for (ri, rv) in row_vecs.iter().enumerate() {
                if let Some(rv) = rv {
                    rhs[(ri, k * m_r + srow)] = rv.dotc(&zeta2);
                }
            }
        }
    }
    Ok(op_norm(&(lhs - rhs)))
}

/// Materialized J_ρ^L and J_ρ^R on truncated tensor domains: each free
/// Fock leg truncated at `leg_depth`, the Γ-Fock target at its own depth.
#[derive(Debug)]
pub struct JRhoIsometries {
    pub rho: RhoTuple,
    pub j_l: CMat,
    pub j_r: CMat,
}

impl JRhoIsometries {
    pub fn defects(&self) -> (f64, f64) {
        let d = |v: &CMat| {
            let vs = v.adjoint();
            op_norm(&(&vs * v * &vs - &vs))
        };
        (d(&self.j_l), d(&self.j_r))
    }
}

fn tensor_pow_dim(base: usize, n: usize) -> usize {
    base.pow(n as u32)
}

pub fn j_rho_isometries(
    f: &FockSpace,
    ff: &FockSpace,
    rho: &RhoTuple,
) -> Result<JRhoIsometries, KhinError> {
    let g = &f.graph;
    let nl = rho.n_l + rho.u_l.len();
    let nr = rho.n_r + rho.u_r.len();
    let kt = h_t_dim(f, &rho.t);
    let fdim = ff.dim();
    let u_l_t = g.multiply(&rho.u_l, &rho.t);
    let u_r_t = g.multiply(&rho.u_r, &rho.t);

    // J^L: (ℱ^f)^{⊗nl} ⊗ ℋ_t → (ℱ^f)^{⊗nl} ⊗ ℱ.
    let dom_l = tensor_pow_dim(fdim, nl) * kt;
    let mut j_l = zeros(tensor_pow_dim(fdim, nl) * f.dim(), dom_l);
    for dom in 0..dom_l {
        let k = dom % kt;
        let mut rem = dom / kt;
        let mut legs = vec![0usize; nl];
        for i in (0..nl).rev() {
            legs[i] = rem % fdim;
            rem /= fdim;
        }
        // Split each leg into first letter + tail.
        let mut firsts: Vec<(Letter, usize)> = Vec::new();
        let mut tails: Vec<usize> = Vec::new();
        let mut ok = true;
        for &li in &legs {
            let w = ff.word_at(li).clone();
            if w.is_empty() {
                ok = false;
                break;
            }
            let (off, _) = ff.block(&w).unwrap();
            let midx = ff.decode_multi_index(&w, li - off);
            let v = w.letters()[0];
            let tail_w = ff
                .graph
                .word_from_letters(&w.letters()[1..])
                .expect("free tail");
            let tail_idx = ff.basis_index(&tail_w, &midx[1..]).expect("tail in depth");
            firsts.push((v, midx[0]));
            tails.push(tail_idx);
        }
        if !ok {
            continue;
        }
        let letters: Vec<Letter> = firsts.iter().map(|(v, _)| *v).collect();
        let pword = g.word_from_letters(&letters)?;
        if pword.letters() != &letters[..] || pword.len() != nl || !g.ends_with(&pword, &rho.u_l) {
            continue;
        }
        let v_l = g.multiply(&pword, &g.inverse(&rho.u_l));
        if v_l.len() != rho.n_l || !g.in_wtr(&u_l_t, &v_l) {
            continue;
        }
        let (r_l, midx_t) = split_h_t_index(f, &rho.t, k);
        let mut parts: Vec<(Word, CVec)> = Vec::new();
        for &(v, dg) in &firsts {
            let mut unit = CVec::zeros(f.cdim(v));
            unit[dg - 1] = cr(1.0);
            parts.push((g.single(v), unit));
        }
        let mut rvec = CVec::zeros(f.block_size(&r_l));
        rvec[f.encode_multi_index(&r_l, &midx_t)] = cr(1.0);
        parts.push((r_l, rvec));
        let Ok((zw, zv)) = f.shuffle(&parts) else { continue };
        let Some((z_off, z_sz)) = f.block(&zw) else { continue };
        let mut tail_flat = 0usize;
        for &t in &tails {
            tail_flat = tail_flat * fdim + t;
        }
        for p in 0..z_sz {
            if zv[p].norm() > 0.0 {
                j_l[(tail_flat * f.dim() + z_off + p, dom)] = zv[p];
            }
        }
    }

    // J^R: ℋ_t ⊗ (ℱ^f)^{⊗nr} → ℱ ⊗ (ℱ^f)^{⊗nr}.
    let dom_r = kt * tensor_pow_dim(fdim, nr);
    let mut j_r = zeros(f.dim() * tensor_pow_dim(fdim, nr), dom_r);
    for dom in 0..dom_r {
        let mut rem = dom;
        let mut legs = vec![0usize; nr];
        for i in (0..nr).rev() {
            legs[i] = rem % fdim;
            rem /= fdim;
        }
        let k = rem;
        let mut firsts: Vec<(Letter, usize)> = Vec::new();
        let mut tails: Vec<usize> = Vec::new();
        let mut ok = true;
        for &li in &legs {
            let w = ff.word_at(li).clone();
            if w.is_empty() {
                ok = false;
                break;
            }
            let (off, _) = ff.block(&w).unwrap();
            let midx = ff.decode_multi_index(&w, li - off);
            let v = w.letters()[0];
            let tail_w = ff
                .graph
                .word_from_letters(&w.letters()[1..])
                .expect("free tail");
            let tail_idx = ff.basis_index(&tail_w, &midx[1..]).expect("tail in depth");
            firsts.push((v, midx[0]));
            tails.push(tail_idx);
        }
        if !ok {
            continue;
        }
        let letters: Vec<Letter> = firsts.iter().map(|(v, _)| *v).collect();
        let qword = g.word_from_letters(&letters)?;
        if qword.letters() != &letters[..] || qword.len() != nr {
            continue;
        }
        let v_r = g.inverse(&g.multiply(&rho.u_r, &qword));
        if v_r.len() != rho.n_r || !g.in_wtr(&u_r_t, &v_r) {
            continue;
        }
        let (r_r, midx_t) = split_h_t_index(f, &rho.t, k);
        let mut parts: Vec<(Word, CVec)> = Vec::new();
        for &(v, dg) in firsts.iter().rev() {
            let mut unit = CVec::zeros(f.cdim(v));
            unit[dg - 1] = cr(1.0);
            parts.push((g.single(v), unit));
        }
        let mut rvec = CVec::zeros(f.block_size(&r_r));
        rvec[f.encode_multi_index(&r_r, &midx_t)] = cr(1.0);
        parts.push((r_r, rvec));
        let Ok((zw, zv)) = f.shuffle(&parts) else { continue };
        let Some((z_off, z_sz)) = f.block(&zw) else { continue };
        let mut tail_flat = 0usize;
        for &t in &tails {
            tail_flat = tail_flat * fdim + t;
        }
        let stride = tensor_pow_dim(fdim, nr);
        for p in 0..z_sz {
            if zv[p].norm() > 0.0 {
                j_r[((z_off + p) * stride + tail_flat, dom)] = zv[p];
            }
        }
    }
    Ok(JRhoIsometries {
        rho: rho.clone(),
        j_l,
        j_r,
    })
}
