//! Finite-dimensional vertex C*-algebras (direct sums of matrix blocks)
//! with faithful states, their GNS data, and the completely-positive-map
//! toolkit: Choi matrices, Stinespring dilations and norm estimation.

use crate::linalg::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ValgError {
    #[error("state density on block {0} is not positive definite (min eigenvalue {1:.3e})")]
    StateNotFaithful(usize, f64),
    #[error("state weights do not sum to one (total trace {0})")]
    StateNotNormalized(f64),
    #[error("block/density shape mismatch")]
    ShapeMismatch,
    #[error("map is not completely positive: most negative Choi eigenvalue {0:.3e}")]
    NotCompletelyPositive(f64),
    #[error("map is not unital: ‖T(1)−1‖ = {0:.3e}")]
    NotUnital(f64),
}

/// Direct sum of matrix blocks ⊕_i M_{n_i} with a faithful state given by
/// positive-definite per-block densities D_i, Σ_i tr D_i = 1. Elements are
/// block-diagonal matrices on ℂ^p, p = Σ n_i.
#[derive(Debug, Clone)]
pub struct VertexAlgebra {
    pub blocks: Vec<usize>,
    pub densities: Vec<CMat>,
}

impl VertexAlgebra {
    pub fn new(blocks: Vec<usize>, densities: Vec<CMat>) -> Result<Self, ValgError> {
        if blocks.len() != densities.len() || blocks.is_empty() {
            return Err(ValgError::ShapeMismatch);
        }
        let mut total = 0.0;
        for (b, (n, d)) in blocks.iter().zip(densities.iter()).enumerate() {
            if d.nrows() != *n || d.ncols() != *n {
                return Err(ValgError::ShapeMismatch);
            }
            let evs = herm_eigenvalues(d);
            let min = evs.first().copied().unwrap_or(0.0);
            if min <= 1e-12 {
                return Err(ValgError::StateNotFaithful(b, min));
            }
            total += d.trace().re;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(ValgError::StateNotNormalized(total));
        }
        Ok(VertexAlgebra { blocks, densities })
    }

    /// ℂ² = ℂ ⊕ ℂ with state (p, 1−p).
    pub fn scalar2(p: f64) -> Self {
        VertexAlgebra::new(
            vec![1, 1],
            vec![
                CMat::from_element(1, 1, cr(p)),
                CMat::from_element(1, 1, cr(1.0 - p)),
            ],
        )
        .unwrap()
    }

    /// M₂ with the normalized trace.
    pub fn m2_trace() -> Self {
        VertexAlgebra::new(vec![2], vec![identity(2) * cr(0.5)]).unwrap()
    }

    /// Full matrix dimension p = Σ n_i.
    pub fn matrix_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Linear dimension of the algebra Σ n_i².
    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    pub fn identity_elem(&self) -> CMat {
        identity(self.matrix_dim())
    }

    /// Block-diagonal density matrix.
    pub fn density(&self) -> CMat {
        let p = self.matrix_dim();
        let mut d = zeros(p, p);
        let mut off = 0;
        for (n, db) in self.blocks.iter().zip(&self.densities) {
            d.view_mut((off, off), (*n, *n)).copy_from(db);
            off += n;
        }
        d
    }

    pub fn state(&self, a: &CMat) -> C64 {
        (self.density() * a).trace()
    }

    pub fn center(&self, a: &CMat) -> CMat {
        a - self.identity_elem() * self.state(a)
    }

    /// Matrix units of all blocks, in block order then row-major.
    pub fn basis_units(&self) -> Vec<CMat> {
        let p = self.matrix_dim();
        let mut out = Vec::new();
        let mut off = 0;
        for n in &self.blocks {
            for i in 0..*n {
                for j in 0..*n {
                    let mut m = zeros(p, p);
                    m[(off + i, off + j)] = cr(1.0);
                    out.push(m);
                }
            }
            off += n;
        }
        out
    }

    /// Orthogonal projection of an arbitrary p×p matrix onto the
    /// block-diagonal algebra.
    pub fn project_into(&self, m: &CMat) -> CMat {
        let p = self.matrix_dim();
        let mut out = zeros(p, p);
        let mut off = 0;
        for n in &self.blocks {
            out.view_mut((off, off), (*n, *n))
                .copy_from(&m.view((off, off), (*n, *n)).into_owned());
            off += n;
        }
        out
    }

    /// GNS inner product ⟨â, b̂⟩ = φ(b* a).
    pub fn gns_inner(&self, a: &CMat, b: &CMat) -> C64 {
        self.state(&(b.adjoint() * a))
    }

    /// Opposite-side inner product φ(a b*).
    pub fn gns_inner_op(&self, a: &CMat, b: &CMat) -> C64 {
        self.state(&(a * b.adjoint()))
    }

    pub fn gns(&self) -> GnsData {
        let mut elems = vec![self.identity_elem()];
        elems.extend(self.basis_units());
        // Gram-Schmidt in the φ(b*a) inner product; the identity seeds the
        // cyclic vector, faithfulness keeps the full algebra dimension.
        let mut basis: Vec<CMat> = Vec::new();
        for v in elems {
            let mut w = v;
            for b in &basis {
                let coef = self.gns_inner(&w, b);
                w -= b * coef;
            }
            let n = self.gns_inner(&w, &w).re.sqrt();
            if n > 1e-10 {
                basis.push(w * cr(1.0 / n));
            }
        }
        assert_eq!(basis.len(), self.algebra_dim());
        GnsData {
            alg: self.clone(),
            basis_elems: basis,
        }
    }

    /// Random Hermitian element (block diagonal).
    pub fn random_hermitian_elem(&self, rng: &mut ChaCha8Rng) -> CMat {
        let p = self.matrix_dim();
        self.project_into(&random_hermitian(rng, p))
    }

    /// Random centered element.
    pub fn random_centered(&self, rng: &mut ChaCha8Rng) -> CMat {
        let p = self.matrix_dim();
        let g = self.project_into(&random_cmat(rng, p, p));
        self.center(&g)
    }
}

/// GNS representation data: the Hilbert space is the algebra itself with
/// ⟨â, b̂⟩ = φ(b*a); `basis_elems` is an orthonormal basis whose first
/// element is the identity (so basis vector 0 is the cyclic vector ξ).
#[derive(Debug, Clone)]
pub struct GnsData {
    pub alg: VertexAlgebra,
    pub basis_elems: Vec<CMat>,
}

impl GnsData {
    pub fn dim(&self) -> usize {
        self.basis_elems.len()
    }

    /// Coordinates of â in the orthonormal basis.
    pub fn hat(&self, a: &CMat) -> CVec {
        CVec::from_fn(self.dim(), |k, _| self.alg.gns_inner(a, &self.basis_elems[k]))
    }

    /// Matrix of the left action of a on the GNS space.
    pub fn rep(&self, a: &CMat) -> CMat {
        let d = self.dim();
        let mut m = zeros(d, d);
        for l in 0..d {
            let col = self.hat(&(a * &self.basis_elems[l]));
            m.set_column(l, &col);
        }
        m
    }

    /// ‖a‖_{L²(A)} = φ(a*a)^{1/2}.
    pub fn l2_norm(&self, a: &CMat) -> f64 {
        self.alg.gns_inner(a, a).re.max(0.0).sqrt()
    }
}

/// Linear map between vertex algebras, stored by its images of the matrix
/// units. Positivity/unitality are verified on demand, never assumed.
#[derive(Debug, Clone)]
pub struct CpMap {
    pub source: VertexAlgebra,
    pub target: VertexAlgebra,
    pub unit_images: Vec<CMat>,
}

impl CpMap {
    pub fn from_unit_images(
        source: VertexAlgebra,
        target: VertexAlgebra,
        unit_images: Vec<CMat>,
    ) -> Self {
        assert_eq!(unit_images.len(), source.algebra_dim());
        CpMap {
            source,
            target,
            unit_images,
        }
    }

    pub fn from_action(
        source: VertexAlgebra,
        target: VertexAlgebra,
        f: impl Fn(&CMat) -> CMat,
    ) -> Self {
        let imgs = source.basis_units().iter().map(|u| f(u)).collect();
        CpMap::from_unit_images(source, target, imgs)
    }

    pub fn identity(alg: &VertexAlgebra) -> Self {
        CpMap::from_action(alg.clone(), alg.clone(), |a| a.clone())
    }

    /// a ↦ φ(a)·1.
    pub fn state_map(alg: &VertexAlgebra) -> Self {
        let a2 = alg.clone();
        CpMap::from_action(alg.clone(), alg.clone(), move |a| {
            a2.identity_elem() * a2.state(a)
        })
    }

    /// a ↦ r·a + (1−r)·φ(a)·1.
    pub fn u_r(alg: &VertexAlgebra, r: f64) -> Self {
        let a2 = alg.clone();
        CpMap::from_action(alg.clone(), alg.clone(), move |a| {
            a * cr(r) + a2.identity_elem() * (a2.state(a) * cr(1.0 - r))
        })
    }

    /// Transpose on a single-block algebra (a classic non-cp positive map).
    pub fn transpose(alg: &VertexAlgebra) -> Self {
        CpMap::from_action(alg.clone(), alg.clone(), |a| a.transpose())
    }

    /// Random mixture of unitary conjugations (u.c.p. and state-preserving
    /// for the normalized trace on a single block).
    pub fn random_unitary_mixture(alg: &VertexAlgebra, seed: u64, terms: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = alg.matrix_dim();
        let mut us = Vec::new();
        let mut ws = Vec::new();
        let mut total = 0.0;
        for _ in 0..terms {
            let g = alg.project_into(&random_cmat(&mut rng, p, p));
            // QR-orthonormalize per block to get a block unitary.
            let q = qr_unitary(&g, alg);
            us.push(q);
            let w: f64 = rng.gen_range(0.1..1.0);
            ws.push(w);
            total += w;
        }
        for w in ws.iter_mut() {
            *w /= total;
        }
        let alg2 = alg.clone();
        CpMap::from_action(alg.clone(), alg.clone(), move |a| {
            let mut out = zeros(alg2.matrix_dim(), alg2.matrix_dim());
            for (u, w) in us.iter().zip(&ws) {
                out += u * a * u.adjoint() * cr(*w);
            }
            out
        })
    }

    /// Coefficients of a in the matrix-unit basis are its entries, so the
    /// action is a direct linear combination of the unit images.
    pub fn apply(&self, a: &CMat) -> CMat {
        let units = self.source.basis_units();
        let pt = self.target.matrix_dim();
        let mut out = zeros(pt, pt);
        let mut idx = 0;
        let mut off = 0;
        for n in &self.source.blocks {
            for i in 0..*n {
                for j in 0..*n {
                    let coef = a[(off + i, off + j)];
                    if coef.norm() > 0.0 {
                        out += &self.unit_images[idx] * coef;
                    }
                    idx += 1;
                }
            }
            off += n;
        }
        debug_assert_eq!(idx, units.len());
        out
    }

    pub fn sub(&self, other: &CpMap) -> CpMap {
        let imgs = self
            .unit_images
            .iter()
            .zip(&other.unit_images)
            .map(|(a, b)| a - b)
            .collect();
        CpMap::from_unit_images(self.source.clone(), self.target.clone(), imgs)
    }

    pub fn scale(&self, s: f64) -> CpMap {
        let imgs = self.unit_images.iter().map(|a| a * cr(s)).collect();
        CpMap::from_unit_images(self.source.clone(), self.target.clone(), imgs)
    }

    pub fn unital_defect(&self) -> f64 {
        op_norm(&(self.apply(&self.source.identity_elem()) - self.target.identity_elem()))
    }

    pub fn state_defect(&self) -> f64 {
        self.source
            .basis_units()
            .iter()
            .map(|u| (self.target.state(&self.apply(u)) - self.source.state(u)).norm())
            .fold(0.0, f64::max)
    }

    /// Per-source-block Choi matrices Σ_ij E_ij ⊗ T(E_ij).
    pub fn choi_blocks(&self) -> Vec<CMat> {
        let pt = self.target.matrix_dim();
        let mut out = Vec::new();
        let mut idx = 0;
        for n in &self.source.blocks {
            let mut choi = zeros(n * pt, n * pt);
            for i in 0..*n {
                for j in 0..*n {
                    let img = &self.unit_images[idx];
                    idx += 1;
                    for r in 0..pt {
                        for c_ in 0..pt {
                            choi[(i * pt + r, j * pt + c_)] += img[(r, c_)];
                        }
                    }
                }
            }
            out.push(choi);
        }
        out
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        self.choi_blocks()
            .iter()
            .map(|c_| herm_eigenvalues(c_).first().copied().unwrap_or(0.0))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_ucp(&self, tol: f64) -> bool {
        self.min_choi_eigenvalue() >= -tol && self.unital_defect() <= tol
    }

    /// Stinespring dilation of the map composed with the GNS representation
    /// of the target: T(a) acts on L²(target) as V* π(a) V with π a unital
    /// *-representation of the source and V an isometry.
    pub fn stinespring(&self) -> Result<StinespringDilation, ValgError> {
        let min_eig = self.min_choi_eigenvalue();
        if min_eig < -1e-9 {
            return Err(ValgError::NotCompletelyPositive(min_eig));
        }
        let ud = self.unital_defect();
        if ud > 1e-9 {
            return Err(ValgError::NotUnital(ud));
        }
        let gns_t = self.target.gns();
        let h = gns_t.dim();
        // Kraus operators per source block from the Choi eigendecomposition
        // of rep_target ∘ T.
        let mut kraus: Vec<Vec<CMat>> = Vec::new();
        let mut idx = 0;
        for n in &self.source.blocks {
            let mut choi = zeros(n * h, n * h);
            for i in 0..*n {
                for j in 0..*n {
                    let img = gns_t.rep(&self.unit_images[idx]);
                    idx += 1;
                    for r in 0..h {
                        for c_ in 0..h {
                            choi[(i * h + r, j * h + c_)] += img[(r, c_)];
                        }
                    }
                }
            }
            let (evs, evecs) = herm_eigen(&choi);
            let mut ops = Vec::new();
            for (k, ev) in evs.iter().enumerate() {
                if *ev > 1e-12 {
                    let z = evecs.column(k);
                    // z indexed by (i, α): A[α, i] = sqrt(ev) * z[i*h + α].
                    let mut a = zeros(h, *n);
                    for i in 0..*n {
                        for al in 0..h {
                            a[(al, i)] = z[i * h + al] * cr(ev.sqrt());
                        }
                    }
                    ops.push(a);
                }
            }
            if ops.is_empty() {
                // A block annihilated by T still needs one leg so that π
                // stays unital; a zero Kraus slot suffices for V but we must
                // keep the block in the dilation space.
                ops.push(zeros(h, *n));
            }
            kraus.push(ops);
        }
        // Dilation space ⊕_b ℂ^{n_b} ⊗ ℂ^{m_b}; π(a) = ⊕_b a_b ⊗ 1.
        let dims: Vec<usize> = self
            .source
            .blocks
            .iter()
            .zip(&kraus)
            .map(|(n, ops)| n * ops.len())
            .collect();
        let total: usize = dims.iter().sum();
        let mut v = zeros(total, h);
        let mut off = 0;
        for (bi, (n, ops)) in self.source.blocks.iter().zip(&kraus).enumerate() {
            let _ = bi;
            for (k, a) in ops.iter().enumerate() {
                // Rows off + i*m + k ← (A_k† x)_i
                let adag = a.adjoint(); // n × h
                for i in 0..*n {
                    for c_ in 0..h {
                        v[(off + i * ops.len() + k, c_)] = adag[(i, c_)];
                    }
                }
            }
            off += n * ops.len();
        }
        Ok(StinespringDilation {
            source: self.source.clone(),
            gns_target: gns_t,
            block_multiplicities: kraus.iter().map(|ops| ops.len()).collect(),
            v,
        })
    }

    /// (certified cb lower bound, exact L²(A) norm, exact L²(A^op) norm).
    pub fn norms(&self, seed: u64) -> NormReport {
        NormReport {
            cb_lower: self.cb_lower_bound(seed, self.target.matrix_dim().max(2), 60),
            l2_a: self.l2_norm(false),
            l2_aop: self.l2_norm(true),
        }
    }

    /// Exact largest singular value of the action on L²(A) (or on the
    /// opposite-algebra L² when `op` is set).
    pub fn l2_norm(&self, op: bool) -> f64 {
        let units_s = self.source.basis_units();
        let units_t = self.target.basis_units();
        let ip_s = |a: &CMat, b: &CMat| {
            if op {
                self.source.gns_inner_op(a, b)
            } else {
                self.source.gns_inner(a, b)
            }
        };
        let ip_t = |a: &CMat, b: &CMat| {
            if op {
                self.target.gns_inner_op(a, b)
            } else {
                self.target.gns_inner(a, b)
            }
        };
        let on_s = orthonormalize(&units_s, ip_s);
        let on_t = orthonormalize(&units_t, ip_t);
        let mut m = zeros(on_t.len(), on_s.len());
        for (j, a) in on_s.iter().enumerate() {
            let ta = self.apply(a);
            for (i, b) in on_t.iter().enumerate() {
                m[(i, j)] = ip_t(&ta, b);
            }
        }
        op_norm(&m)
    }

    /// Lower bound for the completely bounded norm by seeded sampling plus
    /// adjoint-polish at amplification levels 1..=k_max. The reported value
    /// is always a true lower bound; at k_max = target matrix dimension it
    /// is exact in the limit of perfect optimization.
    pub fn cb_lower_bound(&self, seed: u64, k_max: usize, samples: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ps = self.source.matrix_dim();
        let mut best: f64 = 0.0;
        for k in 1..=k_max {
            let mut cands: Vec<CMat> = Vec::new();
            // Deterministic candidates: 1 ⊗ units, and the identity.
            cands.push(kron(&identity(k), &self.source.identity_elem()));
            for u in self.source.basis_units() {
                cands.push(kron(&identity(k), &u));
            }
            for _ in 0..samples {
                let g = random_cmat(&mut rng, k * ps, k * ps);
                cands.push(self.project_amplified(&g, k));
            }
            for x0 in cands {
                let mut x = x0;
                for _ in 0..4 {
                    let nx = op_norm(&x);
                    if nx < 1e-12 {
                        break;
                    }
                    let tx = self.apply_amplified(&x, k);
                    let ratio = op_norm(&tx) / nx;
                    if ratio > best {
                        best = ratio;
                    }
                    // Polish: push x toward the adjoint image of the top
                    // singular dyad of T(x).
                    let svd = tx.svd(true, true);
                    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
                    let dyad = u.column(0) * vt.row(0);
                    let back = self.apply_amplified_adjoint(&dyad, k);
                    let nb = op_norm(&back);
                    if nb < 1e-12 {
                        break;
                    }
                    x = back * cr(1.0 / nb);
                }
            }
        }
        best
    }

    fn project_amplified(&self, x: &CMat, k: usize) -> CMat {
        let ps = self.source.matrix_dim();
        let mut out = zeros(k * ps, k * ps);
        for bi in 0..k {
            for bj in 0..k {
                let blk = x.view((bi * ps, bj * ps), (ps, ps)).into_owned();
                out.view_mut((bi * ps, bj * ps), (ps, ps))
                    .copy_from(&self.source.project_into(&blk));
            }
        }
        out
    }

    pub fn apply_amplified(&self, x: &CMat, k: usize) -> CMat {
        let ps = self.source.matrix_dim();
        let pt = self.target.matrix_dim();
        let mut out = zeros(k * pt, k * pt);
        for bi in 0..k {
            for bj in 0..k {
                let blk = x.view((bi * ps, bj * ps), (ps, ps)).into_owned();
                out.view_mut((bi * pt, bj * pt), (pt, pt))
                    .copy_from(&self.apply(&blk));
            }
        }
        out
    }

    /// Frobenius adjoint of id_k ⊗ T, then projection back into M_k ⊗ A.
    fn apply_amplified_adjoint(&self, y: &CMat, k: usize) -> CMat {
        let ps = self.source.matrix_dim();
        let pt = self.target.matrix_dim();
        let units = self.source.basis_units();
        let mut out = zeros(k * ps, k * ps);
        for bi in 0..k {
            for bj in 0..k {
                let yblk = y.view((bi * pt, bj * pt), (pt, pt)).into_owned();
                let mut xblk = zeros(ps, ps);
                for (u, img) in units.iter().zip(&self.unit_images) {
                    // ⟨T*(y), u⟩_F = ⟨y, T(u)⟩_F
                    let coef = (img.adjoint() * &yblk).trace();
                    xblk += u * coef;
                }
                out.view_mut((bi * ps, bj * ps), (ps, ps)).copy_from(&xblk);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NormReport {
    pub cb_lower: f64,
    pub l2_a: f64,
    pub l2_aop: f64,
}

impl NormReport {
    /// C(T) = max of the three norms.
    pub fn c_value(&self) -> f64 {
        self.cb_lower.max(self.l2_a).max(self.l2_aop)
    }
}

/// Stinespring data for a map T: the dilation space carries a unital
/// *-representation π of the source and V: L²(target) → dilation space is
/// an isometry with rep(T(a)) = V* π(a) V.
#[derive(Debug, Clone)]
pub struct StinespringDilation {
    pub source: VertexAlgebra,
    pub gns_target: GnsData,
    pub block_multiplicities: Vec<usize>,
    pub v: CMat,
}

impl StinespringDilation {
    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    /// π(a) = ⊕_b a_b ⊗ 1_{m_b}.
    pub fn pi(&self, a: &CMat) -> CMat {
        let total = self.dim();
        let mut out = zeros(total, total);
        let mut off = 0;
        let mut moff = 0;
        for (n, m) in self.source.blocks.iter().zip(&self.block_multiplicities) {
            for i in 0..*n {
                for j in 0..*n {
                    let coef = a[(off + i, off + j)];
                    if coef.norm() > 0.0 {
                        for k in 0..*m {
                            out[(moff + i * m + k, moff + j * m + k)] += coef;
                        }
                    }
                }
            }
            off += n;
            moff += n * m;
        }
        out
    }

    pub fn isometry_defect(&self) -> f64 {
        let h = self.v.ncols();
        op_norm(&(self.v.adjoint() * &self.v - identity(h)))
    }

    pub fn reconstruction_error(&self, map: &CpMap) -> f64 {
        let mut worst: f64 = 0.0;
        for u in map.source.basis_units() {
            let lhs = self.v.adjoint() * self.pi(&u) * &self.v;
            let rhs = self.gns_target.rep(&map.apply(&u));
            worst = worst.max(op_norm(&(lhs - rhs)));
        }
        worst
    }

    /// The dilated cyclic vector ξ̂ = Vξ (coordinates in the dilation space).
    pub fn xi_hat(&self) -> CVec {
        // ξ is GNS basis vector 0.
        self.v.column(0).into_owned()
    }
}

fn orthonormalize(
    elems: &[CMat],
    ip: impl Fn(&CMat, &CMat) -> C64,
) -> Vec<CMat> {
    let mut basis: Vec<CMat> = Vec::new();
    for v in elems {
        let mut w = v.clone();
        for b in &basis {
            let coef = ip(&w, b);
            w -= b * coef;
        }
        let n = ip(&w, &w).re;
        if n > 1e-20 {
            basis.push(w * cr(1.0 / n.sqrt()));
        }
    }
    basis
}

/// Per-block QR unitary factor of a block-diagonal matrix.
fn qr_unitary(m: &CMat, alg: &VertexAlgebra) -> CMat {
    let p = alg.matrix_dim();
    let mut out = zeros(p, p);
    let mut off = 0;
    for n in &alg.blocks {
        let blk = m.view((off, off), (*n, *n)).into_owned();
        let cols: Vec<CVec> = (0..*n).map(|j| blk.column(j).into_owned()).collect();
        let mut on = gram_schmidt(&cols);
        // Pad with standard basis vectors if rank-deficient (measure zero).
        let mut k = 0;
        while on.len() < *n {
            let mut e = CVec::zeros(*n);
            e[k] = cr(1.0);
            k += 1;
            let cand = {
                let mut w = e;
                for b in &on {
                    let coef = b.dotc(&w);
                    w -= b * coef;
                }
                w
            };
            if cand.norm() > 1e-8 {
                let nn = cand.norm();
                on.push(cand * cr(1.0 / nn));
            }
        }
        for (j, col) in on.iter().enumerate() {
            for i in 0..*n {
                out[(off + i, off + j)] = col[i];
            }
        }
        off += n;
    }
    out
}

pub fn is_psd(m: &CMat, tol: f64) -> bool {
    herm_eigenvalues(m).first().copied().unwrap_or(0.0) >= -tol
}
