//! Hecke algebras of small finite Coxeter groups (A₁, A₁×A₁, I₂(m) for
//! m ≤ 6) realized as concrete block vertex algebras, plus the
//! graph-product relation checks for multi-parameter Hecke algebras.
//!
//! Generator convention (pinned here, since only relation-consistency is
//! observable): T_s δ_w = δ_{sw} when |sw| > |w|, and q_s δ_{sw} +
//! (q_s − 1) δ_w otherwise, acting on the q-weighted ℓ²(W) in whose
//! orthonormal basis T_s is self-adjoint. The vertex state is the δ_e
//! vector state.

use crate::coxeter::{Letter, SimpleGraph};
use crate::fock::{FockSpace, FockError, DEFAULT_BASIS_CAP};
use crate::linalg::*;
use crate::valg::{GnsData, ValgError, VertexAlgebra};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HeckeError {
    #[error("unsupported Coxeter datum: {0}")]
    Unsupported(String),
    #[error("Hecke parameter q[{0}] = {1} must be positive")]
    BadParameter(usize, f64),
    #[error("generators {0} and {1} are conjugate (odd bond) but q differs: {2} vs {3}")]
    ConjugacyMismatch(usize, usize, f64, f64),
    #[error("relation `{name}` failed: residual {residual:.3e} > {tol:.1e}")]
    RelationFailed {
        name: String,
        residual: f64,
        tol: f64,
    },
    #[error("numerical decomposition failed: {0}")]
    Decomposition(String),
    #[error("vertex algebra rejected: {0}")]
    Valg(#[from] ValgError),
    #[error("fock error: {0}")]
    Fock(#[from] FockError),
}

/// A finite Coxeter system given by its Coxeter matrix. Supported:
/// one generator (A₁) and two generators with bond m ∈ {2,…,6}
/// (A₁×A₁ = I₂(2) and the dihedral types I₂(m)).
#[derive(Debug, Clone)]
pub struct FiniteCoxeter {
    pub m: Vec<Vec<usize>>,
}

impl FiniteCoxeter {
    pub fn new(m: Vec<Vec<usize>>) -> Result<Self, HeckeError> {
        let n = m.len();
        if m.iter().any(|row| row.len() != n) {
            return Err(HeckeError::Unsupported("Coxeter matrix not square".into()));
        }
        for i in 0..n {
            if m[i][i] != 1 {
                return Err(HeckeError::Unsupported("diagonal must be 1".into()));
            }
            for j in 0..n {
                if m[i][j] != m[j][i] {
                    return Err(HeckeError::Unsupported("matrix not symmetric".into()));
                }
            }
        }
        match n {
            1 => {}
            2 => {
                let b = m[0][1];
                if !(2..=6).contains(&b) {
                    return Err(HeckeError::Unsupported(format!(
                        "bond m = {b} outside the supported range 2..=6"
                    )));
                }
            }
            _ => {
                return Err(HeckeError::Unsupported(format!(
                    "{n} generators (only 1 or 2 supported)"
                )))
            }
        }
        Ok(FiniteCoxeter { m })
    }

    pub fn a1() -> Self {
        FiniteCoxeter { m: vec![vec![1]] }
    }

    pub fn i2(bond: usize) -> Result<Self, HeckeError> {
        FiniteCoxeter::new(vec![vec![1, bond], vec![bond, 1]])
    }

    pub fn a1_x_a1() -> Self {
        FiniteCoxeter::i2(2).unwrap()
    }

    pub fn generator_count(&self) -> usize {
        self.m.len()
    }

    /// Generators joined by an odd bond are conjugate in W.
    pub fn conjugate_generators(&self, s: usize, t: usize) -> bool {
        s == t || self.m[s][t] % 2 == 1
    }

    /// Enumerates W through the geometric (reflection) representation:
    /// BFS over the generator action, lengths = BFS depth.
    pub fn enumerate(&self) -> CoxeterElements {
        let n = self.generator_count();
        // σ(s) α_t = α_t + 2 cos(π/m(s,t)) α_s  (and σ(s) α_s = −α_s).
        let mut sigma: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n);
        for s in 0..n {
            let mut mat = vec![vec![0.0; n]; n];
            for t in 0..n {
                mat[t][t] = 1.0;
                if t == s {
                    mat[s][s] = -1.0;
                } else {
                    mat[s][t] = 2.0 * (std::f64::consts::PI / self.m[s][t] as f64).cos();
                }
            }
            sigma.push(mat);
        }
        let mul = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            let mut c = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        c[i][j] += a[i][k] * b[k][j];
                    }
                }
            }
            c
        };
        let key = |a: &Vec<Vec<f64>>| -> Vec<i64> {
            a.iter()
                .flatten()
                .map(|x| (x * 1e6).round() as i64)
                .collect()
        };
        let ident = {
            let mut c = vec![vec![0.0; n]; n];
            for i in 0..n {
                c[i][i] = 1.0;
            }
            c
        };
        let mut mats = vec![ident.clone()];
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        let mut seen = std::collections::HashMap::new();
        seen.insert(key(&ident), 0usize);
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &wi in &frontier {
                for s in 0..n {
                    let m2 = mul(&sigma[s], &mats[wi]);
                    let k = key(&m2);
                    if !seen.contains_key(&k) {
                        let idx = mats.len();
                        seen.insert(k, idx);
                        let mut w = vec![s];
                        w.extend(&words[wi]);
                        mats.push(m2);
                        words.push(w);
                        next.push(idx);
                    }
                }
            }
            frontier = next;
        }
        let order = mats.len();
        let mut left = vec![vec![0usize; order]; n];
        for s in 0..n {
            for wi in 0..order {
                let k = key(&mul(&sigma[s], &mats[wi]));
                left[s][wi] = seen[&k];
            }
        }
        CoxeterElements { words, left }
    }
}

/// The enumerated group: reduced words (index 0 = identity) and the left
/// multiplication action of each generator on element indices.
#[derive(Debug, Clone)]
pub struct CoxeterElements {
    pub words: Vec<Vec<usize>>,
    pub left: Vec<Vec<usize>>,
}

impl CoxeterElements {
    pub fn order(&self) -> usize {
        self.words.len()
    }

    pub fn length(&self, idx: usize) -> usize {
        self.words[idx].len()
    }

    /// Index of the product g·h from a reduced word for g.
    pub fn mult(&self, g: &[usize], h: usize) -> usize {
        let mut idx = h;
        for &s in g.iter().rev() {
            idx = self.left[s][idx];
        }
        idx
    }
}

/// The Hecke algebra of a finite Coxeter system with positive parameters,
/// realized on the q-weighted ℓ²(W) where the generators are self-adjoint.
#[derive(Debug, Clone)]
pub struct HeckeAlgebra {
    pub cox: FiniteCoxeter,
    pub q: Vec<f64>,
    pub elements: CoxeterElements,
    pub t_gens: Vec<CMat>,
}

impl HeckeAlgebra {
    pub fn new(cox: FiniteCoxeter, q: Vec<f64>) -> Result<Self, HeckeError> {
        let n = cox.generator_count();
        assert_eq!(q.len(), n);
        for (s, &qs) in q.iter().enumerate() {
            if qs <= 0.0 {
                return Err(HeckeError::BadParameter(s, qs));
            }
        }
        for s in 0..n {
            for t in s + 1..n {
                if cox.conjugate_generators(s, t) && (q[s] - q[t]).abs() > 1e-12 {
                    return Err(HeckeError::ConjugacyMismatch(s, t, q[s], q[t]));
                }
            }
        }
        let elements = cox.enumerate();
        let order = elements.order();
        // q_w = Π q_{s_i} over a reduced word; well-defined under the
        // conjugacy constraint.
        let qw: Vec<f64> = (0..order)
            .map(|i| elements.words[i].iter().map(|&s| q[s]).product())
            .collect();
        let mut t_gens = Vec::with_capacity(n);
        for s in 0..n {
            let mut t = zeros(order, order);
            for w in 0..order {
                let sw = elements.left[s][w];
                let scale = |v: usize| (qw[v] / qw[w]).sqrt();
                if elements.length(sw) > elements.length(w) {
                    t[(sw, w)] = cr(scale(sw));
                } else {
                    t[(sw, w)] = cr(q[s] * scale(sw));
                    t[(w, w)] = cr(q[s] - 1.0);
                }
            }
            t_gens.push(t);
        }
        Ok(HeckeAlgebra {
            cox,
            q,
            elements,
            t_gens,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.order()
    }

    /// Product T_{s₁}⋯T_{s_k} for a letter sequence.
    pub fn t_word(&self, word: &[usize]) -> CMat {
        let mut m = identity(self.order());
        for &s in word {
            m = m * &self.t_gens[s];
        }
        m
    }

    /// The δ_e vector state.
    pub fn state(&self, a: &CMat) -> C64 {
        a[(0, 0)]
    }

    pub fn quadratic_residual(&self, s: usize) -> f64 {
        let t = &self.t_gens[s];
        let n = self.order();
        op_norm(&((t - identity(n) * cr(self.q[s])) * (t + identity(n))))
    }

    /// Residual of T_sT_tT_s… = T_tT_sT_t… (m(s,t) factors each).
    pub fn braid_residual(&self, s: usize, t: usize) -> f64 {
        let bond = self.cox.m[s][t];
        let word_a: Vec<usize> = (0..bond).map(|k| if k % 2 == 0 { s } else { t }).collect();
        let word_b: Vec<usize> = (0..bond).map(|k| if k % 2 == 0 { t } else { s }).collect();
        op_norm(&(self.t_word(&word_a) - self.t_word(&word_b)))
    }
}

/// Hilbert–Schmidt-orthonormal basis of the unital algebra generated by
/// self-adjoint matrices, built by closing under right multiplication.
fn algebra_basis(gens: &[CMat]) -> Vec<CMat> {
    let n = gens[0].nrows();
    let hs = |a: &CMat, b: &CMat| (b.adjoint() * a).trace();
    let mut basis: Vec<CMat> = Vec::new();
    let push = |basis: &mut Vec<CMat>, cand: &CMat| -> bool {
        let mut w = cand.clone();
        for b in basis.iter() {
            let coef = hs(&w, b);
            w -= b * coef;
        }
        let norm = hs(&w, &w).re.max(0.0).sqrt();
        if norm > 1e-9 {
            basis.push(w * cr(1.0 / norm));
            true
        } else {
            false
        }
    };
    push(&mut basis, &identity(n));
    loop {
        let mut grew = false;
        let snapshot = basis.clone();
        for b in &snapshot {
            for g in gens {
                if push(&mut basis, &(b * g)) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    basis
}

/// Orthonormal basis of the center: solutions of [x, g] = 0 over the
/// algebra basis, via an SVD nullspace.
fn center_basis(basis: &[CMat], gens: &[CMat]) -> Vec<CMat> {
    let n = basis[0].nrows();
    let k = basis.len();
    let rows = gens.len() * n * n;
    let mut a = zeros(rows, k);
    for (j, b) in basis.iter().enumerate() {
        for (gi, g) in gens.iter().enumerate() {
            let comm = b * g - g * b;
            for (e, val) in comm.iter().enumerate() {
                a[(gi * n * n + e, j)] = *val;
            }
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.unwrap();
    let mut out = Vec::new();
    for i in 0..k {
        let sv = if i < svd.singular_values.len() {
            svd.singular_values[i]
        } else {
            0.0
        };
        if sv < 1e-8 {
            let mut c = zeros(n, n);
            for j in 0..k {
                c += &basis[j] * vt[(i, j)].conj();
            }
            out.push(c);
        }
    }
    out
}

fn cluster_projections(evals: &[f64], evecs: &CMat, tol: f64) -> Vec<(f64, CMat)> {
    let n = evecs.nrows();
    let mut out: Vec<(f64, CMat)> = Vec::new();
    let mut i = 0;
    let mut order: Vec<usize> = (0..evals.len()).collect();
    order.sort_by(|&a, &b| evals[a].partial_cmp(&evals[b]).unwrap());
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && (evals[order[j + 1]] - evals[order[j]]).abs() < tol {
            j += 1;
        }
        let mut p = zeros(n, n);
        for &idx in &order[i..=j] {
            let v = evecs.column(idx).into_owned();
            p += &v * v.adjoint();
        }
        out.push((evals[order[i]], p));
        i = j + 1;
    }
    out
}

/// A Hecke algebra packaged as a block vertex algebra, together with the
/// *-isomorphism onto the blocks (one irrep basis per block).
#[derive(Debug, Clone)]
pub struct HeckeVertex {
    pub hecke: HeckeAlgebra,
    pub algebra: VertexAlgebra,
    irrep_bases: Vec<CMat>,
}

impl HeckeVertex {
    /// Image of an element of the regular realization in the block algebra.
    pub fn embed(&self, a: &CMat) -> CMat {
        let p = self.algebra.matrix_dim();
        let mut out = zeros(p, p);
        let mut off = 0;
        for b in &self.irrep_bases {
            let blk = b.adjoint() * a * b;
            let nb = blk.nrows();
            out.view_mut((off, off), (nb, nb)).copy_from(&blk);
            off += nb;
        }
        out
    }

    pub fn generator(&self, s: usize) -> CMat {
        self.embed(&self.hecke.t_gens[s])
    }

    pub fn gns(&self) -> GnsData {
        self.algebra.gns()
    }
}

/// Wedderburn decomposition of the (semisimple) Hecke algebra and
/// reassembly as a `VertexAlgebra` whose state is the δ_e vector state.
/// The GNS dimension equals |W|.
pub fn hecke_vertex(cox: &FiniteCoxeter, q: &[f64]) -> Result<HeckeVertex, HeckeError> {
    let hk = HeckeAlgebra::new(cox.clone(), q.to_vec())?;
    let n = hk.order();
    let basis = algebra_basis(&hk.t_gens);
    if basis.len() != n {
        return Err(HeckeError::Decomposition(format!(
            "algebra dimension {} ≠ group order {n}",
            basis.len()
        )));
    }
    let centers = center_basis(&basis, &hk.t_gens);
    let mut rng = ChaCha8Rng::seed_from_u64(0x4845434b);
    // Random self-adjoint central element; its eigenvalue clusters are the
    // central projections.
    let mut z = zeros(n, n);
    for c in &centers {
        let r = cr(rng.gen_range(0.25..1.0f64));
        z += (c + adjoint(c)) * (r * cr(0.5));
    }
    let (evals, evecs) = herm_eigen(&z);
    let clusters = cluster_projections(&evals, &evecs, 1e-6);
    let hs = |a: &CMat, b: &CMat| (b.adjoint() * a).trace();
    let mut blocks = Vec::new();
    let mut densities = Vec::new();
    let mut irrep_bases = Vec::new();
    for (_, p) in &clusters {
        // Verify the projection is in the algebra.
        let mut resid = p.clone();
        for b in &basis {
            let coef = hs(&resid, b);
            resid -= b * coef;
        }
        if op_norm(&resid) > 1e-7 {
            return Err(decomp_err("central projection escaped the algebra"));
        }
        // Block sub-basis and its linear dimension n_i².
        let sub: Vec<CMat> = {
            let raw: Vec<CMat> = basis.iter().map(|b| p * b * p).collect();
            let mut ortho: Vec<CMat> = Vec::new();
            for r in raw {
                let mut w = r;
                for b in &ortho {
                    let coef = hs(&w, b);
                    w -= b * coef;
                }
                let nn = hs(&w, &w).re.max(0.0).sqrt();
                if nn > 1e-7 {
                    ortho.push(w * cr(1.0 / nn));
                }
            }
            ortho
        };
        let ni = (sub.len() as f64).sqrt().round() as usize;
        if ni * ni != sub.len() {
            return Err(decomp_err("block dimension is not a square"));
        }
        // A vector in the range of a minimal projection: eigenvector of a
        // generic self-adjoint element of the block.
        let mut y = zeros(n, n);
        for b in &sub {
            let r = cr(rng.gen_range(0.25..1.0f64));
            y += (b + adjoint(b)) * (r * cr(0.5));
        }
        let (yev, yvec) = herm_eigen(&y);
        let mut xi = None;
        for k in 0..n {
            if yev[k].abs() > 1e-6 {
                let v = yvec.column(k).into_owned();
                if (p * &v - &v).norm() < 1e-8 {
                    xi = Some(v);
                    break;
                }
            }
        }
        let xi =
            xi.ok_or_else(|| decomp_err("no eigenvector inside the central block"))?;
        // Cyclic space A_i ξ: one irrep copy, dimension n_i.
        let cyc: Vec<CVec> = sub.iter().map(|b| b * &xi).collect();
        let onb = gram_schmidt(&cyc);
        if onb.len() != ni {
            return Err(decomp_err("cyclic space dimension mismatch"));
        }
        let mut bmat = zeros(n, ni);
        for (j, v) in onb.iter().enumerate() {
            bmat.set_column(j, v);
        }
        // Density: solve tr(ρ π(x)) = φ(x) over the block basis.
        let mut a = zeros(sub.len(), ni * ni);
        let mut rhs = CVec::zeros(sub.len());
        for (k, x) in sub.iter().enumerate() {
            let pix = bmat.adjoint() * x * &bmat;
            for pp in 0..ni {
                for qq in 0..ni {
                    a[(k, pp * ni + qq)] = pix[(qq, pp)];
                }
            }
            rhs[k] = hk.state(x);
        }
        let svd = a.svd(true, true);
        let sol = svd
            .solve(&rhs, 1e-12)
            .map_err(|_| decomp_err("density solve failed"))?;
        let mut rho = zeros(ni, ni);
        for pp in 0..ni {
            for qq in 0..ni {
                rho[(pp, qq)] = sol[pp * ni + qq];
            }
        }
        let rho = (&rho + adjoint(&rho)) * cr(0.5);
        blocks.push(ni);
        densities.push(rho);
        irrep_bases.push(bmat);
    }
    let algebra = VertexAlgebra::new(blocks, densities)?;
    let hv = HeckeVertex {
        hecke: hk,
        algebra,
        irrep_bases,
    };
    // Certify the isomorphism: multiplicative on generators, state match,
    // GNS dimension = |W|.
    for s in 0..hv.hecke.t_gens.len() {
        for t in 0..hv.hecke.t_gens.len() {
            let lhs = hv.generator(s) * hv.generator(t);
            let rhs = hv.embed(&(&hv.hecke.t_gens[s] * &hv.hecke.t_gens[t]));
            if op_norm(&(lhs - rhs)) > 1e-8 {
                return Err(decomp_err("embedding is not multiplicative"));
            }
        }
    }
    if hv.algebra.algebra_dim() != n {
        return Err(decomp_err("GNS dimension differs from group order"));
    }
    Ok(hv)
}

fn decomp_err(msg: &str) -> HeckeError {
    HeckeError::Decomposition(msg.into())
}

/// One named relation check inside a product report.
#[derive(Debug, Clone)]
pub struct RelationCheck {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
}

impl RelationCheck {
    pub fn passed(&self) -> bool {
        self.residual <= self.tol
    }
}

#[derive(Debug, Clone)]
pub struct HeckeProductReport {
    pub checks: Vec<RelationCheck>,
}

impl HeckeProductReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(RelationCheck::passed)
    }

    pub fn worst(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    }

    pub fn into_result(self) -> Result<HeckeProductReport, HeckeError> {
        if let Some(c) = self.checks.iter().find(|c| !c.passed()) {
            return Err(HeckeError::RelationFailed {
                name: c.name.clone(),
                residual: c.residual,
                tol: c.tol,
            });
        }
        Ok(self)
    }
}

/// Builds the graph product of Hecke vertex algebras on the truncated Fock
/// space and certifies, on a safe margin: quadratic relations, adjacency
/// commutation, in-vertex braid relations, and the vertex-state match of
/// the vacuum state.
pub fn verify_hecke_graph_product(
    g: &SimpleGraph,
    vertices: &[(FiniteCoxeter, Vec<f64>)],
    depth: usize,
) -> Result<HeckeProductReport, HeckeError> {
    assert_eq!(vertices.len(), g.vertex_count());
    let tol = 1e-12;
    let hvs: Vec<HeckeVertex> = vertices
        .iter()
        .map(|(cox, q)| hecke_vertex(cox, q))
        .collect::<Result<_, _>>()?;
    let gns: Vec<GnsData> = hvs.iter().map(HeckeVertex::gns).collect();
    let vdims: Vec<usize> = gns.iter().map(GnsData::dim).collect();
    let f = FockSpace::build(g.clone(), vdims, depth, DEFAULT_BASIS_CAP)?;
    let margin = vertices
        .iter()
        .map(|(cox, _)| cox.m.iter().flatten().copied().max().unwrap_or(2))
        .max()
        .unwrap()
        .max(2);
    let safe = f.safe_proj(margin.min(depth));
    let mut checks = Vec::new();
    // λ images of the generators per vertex.
    let lam: Vec<Vec<CMat>> = (0..g.vertex_count())
        .map(|v| {
            (0..hvs[v].hecke.t_gens.len())
                .map(|s| f.lambda_v(v as Letter, &gns[v].rep(&hvs[v].generator(s))))
                .collect()
        })
        .collect();
    for v in 0..g.vertex_count() {
        let hv = &hvs[v];
        for s in 0..hv.hecke.t_gens.len() {
            let q = hv.hecke.q[s];
            let quad =
                (&lam[v][s] - identity(f.dim()) * cr(q)) * (&lam[v][s] + identity(f.dim()));
            checks.push(RelationCheck {
                name: format!("quadratic[v{v} s{s}]"),
                residual: op_norm(&(&safe * quad * &safe)),
                tol,
            });
        }
        for s in 0..hv.hecke.t_gens.len() {
            for t in s + 1..hv.hecke.t_gens.len() {
                let bond = hv.hecke.cox.m[s][t];
                let mut pa = identity(f.dim());
                let mut pb = identity(f.dim());
                for k in 0..bond {
                    pa = pa * &lam[v][if k % 2 == 0 { s } else { t }];
                    pb = pb * &lam[v][if k % 2 == 0 { t } else { s }];
                }
                checks.push(RelationCheck {
                    name: format!("braid[v{v} s{s} t{t} m{bond}]"),
                    residual: op_norm(&(&safe * (pa - pb) * &safe)),
                    tol,
                });
            }
        }
    }
    for v in 0..g.vertex_count() {
        for w in v + 1..g.vertex_count() {
            if !g.adjacent(v as Letter, w as Letter) {
                continue;
            }
            for s in 0..hvs[v].hecke.t_gens.len() {
                for t in 0..hvs[w].hecke.t_gens.len() {
                    let comm = &lam[v][s] * &lam[w][t] - &lam[w][t] * &lam[v][s];
                    checks.push(RelationCheck {
                        name: format!("commute[v{v} s{s} | v{w} s{t}]"),
                        residual: op_norm(&(&safe * comm * &safe)),
                        tol,
                    });
                }
            }
        }
    }
    // Vacuum state restricted to each vertex = vertex state (exact on the
    // algebra basis units).
    for v in 0..g.vertex_count() {
        let alg = &hvs[v].algebra;
        let mut worst: f64 = 0.0;
        for u in alg.basis_units() {
            let lam_u = f.lambda_v(v as Letter, &gns[v].rep(&u));
            let got = (f.vacuum().adjoint() * lam_u * f.vacuum())[(0, 0)];
            worst = worst.max((got - alg.state(&u)).norm());
        }
        checks.push(RelationCheck {
            name: format!("vertex-state[v{v}]"),
            residual: worst,
            tol,
        });
    }
    Ok(HeckeProductReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::test_graphs;

    fn graph(name: &str) -> SimpleGraph {
        test_graphs()
            .into_iter()
            .find(|(n, _)| *n == name)
            .unwrap()
            .1
    }

    #[test]
    fn a1_structure() {
        for q in [0.5, 1.0, 2.0] {
            let hv = hecke_vertex(&FiniteCoxeter::a1(), &[q]).unwrap();
            assert_eq!(hv.hecke.order(), 2);
            // Dimension-2 abelian algebra: two 1×1 blocks.
            let mut blocks = hv.algebra.blocks.clone();
            blocks.sort();
            assert_eq!(blocks, vec![1, 1]);
            assert!(hv.hecke.quadratic_residual(0) < 1e-12);
            // State weights 1/(1+q) on the q-eigenspace, q/(1+q) on −1.
            let mut weights: Vec<f64> = hv
                .algebra
                .densities
                .iter()
                .map(|d| d[(0, 0)].re)
                .collect();
            weights.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut want = [1.0 / (1.0 + q), q / (1.0 + q)];
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!((weights[0] - want[0]).abs() < 1e-10);
            assert!((weights[1] - want[1]).abs() < 1e-10);
        }
        // q = 1: group algebra, T_s a unitary involution.
        let hk = HeckeAlgebra::new(FiniteCoxeter::a1(), vec![1.0]).unwrap();
        let t = &hk.t_gens[0];
        assert!(op_norm(&(t * t - identity(2))) < 1e-12);
        assert!(op_norm(&(adjoint(t) * t - identity(2))) < 1e-12);
    }

    #[test]
    fn dihedral_orders_and_group_case() {
        for bond in 2..=6 {
            let cox = FiniteCoxeter::i2(bond).unwrap();
            let els = cox.enumerate();
            assert_eq!(els.order(), 2 * bond, "I2({bond})");
            // q = 1: T-basis multiplication matches word multiplication.
            let hk = HeckeAlgebra::new(cox, vec![1.0, 1.0]).unwrap();
            for gi in 0..els.order() {
                for hi in 0..els.order() {
                    let prod = els.mult(&els.words[gi], hi);
                    let tm = hk.t_word(&els.words[gi]) * hk.t_word(&els.words[hi]);
                    let want = hk.t_word(&els.words[prod]);
                    assert!(op_norm(&(tm - want)) < 1e-10);
                }
            }
        }
        // A₁×A₁ is abelian.
        let hk = HeckeAlgebra::new(FiniteCoxeter::a1_x_a1(), vec![0.5, 2.0]).unwrap();
        let c = &hk.t_gens[0] * &hk.t_gens[1] - &hk.t_gens[1] * &hk.t_gens[0];
        assert!(op_norm(&c) < 1e-12);
    }

    #[test]
    fn hecke_relations_hold() {
        for bond in [3usize, 4, 5, 6] {
            for q in [0.5, 1.0, 2.0] {
                let cox = FiniteCoxeter::i2(bond).unwrap();
                let hk = HeckeAlgebra::new(cox, vec![q, q]).unwrap();
                assert!(hk.quadratic_residual(0) < 1e-12, "I2({bond}) q={q}");
                assert!(hk.quadratic_residual(1) < 1e-12);
                assert!(hk.braid_residual(0, 1) < 1e-11, "I2({bond}) q={q}");
                // Generators are self-adjoint in the weighted realization.
                for t in &hk.t_gens {
                    assert!(op_norm(&(adjoint(t) - t)) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn wedderburn_blocks() {
        // I₂(3) = S₃: 1 + 1 + 4 = 6.
        let hv = hecke_vertex(&FiniteCoxeter::i2(3).unwrap(), &[0.5, 0.5]).unwrap();
        let mut blocks = hv.algebra.blocks.clone();
        blocks.sort();
        assert_eq!(blocks, vec![1, 1, 2]);
        // I₂(4): 1 + 1 + 1 + 1 + 4 = 8, multi-parameter allowed (even bond).
        let hv4 = hecke_vertex(&FiniteCoxeter::i2(4).unwrap(), &[0.5, 2.0]).unwrap();
        let mut blocks = hv4.algebra.blocks.clone();
        blocks.sort();
        assert_eq!(blocks, vec![1, 1, 1, 1, 2]);
        // State through the embedding equals the δ_e state.
        for hvx in [&hv, &hv4] {
            let a = hvx.hecke.t_word(&[0, 1]);
            let got = hvx.algebra.state(&hvx.embed(&a));
            assert!((got - hvx.hecke.state(&a)).norm() < 1e-9);
            // GNS dimension = |W|.
            assert_eq!(hvx.gns().dim(), hvx.hecke.order());
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(
            HeckeAlgebra::new(FiniteCoxeter::a1(), vec![-1.0]),
            Err(HeckeError::BadParameter(0, _))
        ));
        assert!(matches!(
            HeckeAlgebra::new(FiniteCoxeter::i2(3).unwrap(), vec![0.5, 0.7]),
            Err(HeckeError::ConjugacyMismatch(0, 1, _, _))
        ));
        assert!(FiniteCoxeter::i2(7).is_err());
        assert!(FiniteCoxeter::new(vec![vec![2]]).is_err());
    }

    #[test]
    fn graph_product_right_angled() {
        // G3 with all A₁ vertices: the relations of the Hecke algebra of
        // (ℤ/2)² hold at every q.
        let g3 = graph("G3");
        for q in [0.5, 1.0, 2.0] {
            let verts = vec![
                (FiniteCoxeter::a1(), vec![q]),
                (FiniteCoxeter::a1(), vec![q]),
            ];
            let rep = verify_hecke_graph_product(&g3, &verts, 4).unwrap();
            assert!(rep.pass(), "q={q}: worst {}", rep.worst());
            // q = 1: λ(T_s) unitary on the safe margin — covered by the
            // quadratic + self-adjointness checks.
        }
    }

    #[test]
    fn graph_product_mixed_vertices() {
        let g4 = graph("G4");
        let verts = vec![
            (FiniteCoxeter::a1(), vec![0.5]),
            (FiniteCoxeter::i2(3).unwrap(), vec![2.0, 2.0]),
            (FiniteCoxeter::a1(), vec![0.5]),
        ];
        let rep = verify_hecke_graph_product(&g4, &verts, 3).unwrap();
        assert!(rep.pass(), "worst residual {}", rep.worst());
        assert!(rep.clone().into_result().is_ok());
        // A failing check is reported with the relation name.
        let mut bad = rep;
        bad.checks[0].residual = 1.0;
        match bad.into_result() {
            Err(HeckeError::RelationFailed { name, .. }) => {
                assert!(name.starts_with("quadratic"));
            }
            other => panic!("expected relation failure, got {other:?}"),
        }
    }
}
