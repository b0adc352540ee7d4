//! Sheaves of modules and of algebras on a ringed poset, given as fibers on
//! points plus restriction maps on Hasse edges; sections over arbitrary
//! opens are always derived, never stored.

use super::{RingedPoset, SpaceMorphism};
use crate::algebra::{
    module_base_change, product_algebra, tensor_over, Algebra, AlgebraMap,
};
use crate::linalg::{unit_vec, Mat, Subspace};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// A finite-dimensional module over a stalk: a vector space with one action
/// matrix per stalk basis element.
#[derive(Clone, PartialEq, Debug)]
pub struct ModuleFiber {
    pub dim: usize,
    pub action: Vec<Mat>,
}

impl ModuleFiber {
    /// Matrix of the action of a stalk element.
    pub fn act(&self, p: u64, v: &[u64]) -> Mat {
        let mut out = Mat::zeros(p, self.dim, self.dim);
        for (k, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let val = (out.get(i, j) + c * self.action[k].get(i, j)) % p;
                    out.set(i, j, val);
                }
            }
        }
        out
    }

    pub fn free(stalk: &Algebra) -> Self {
        let action = (0..stalk.dim())
            .map(|k| stalk.mul_matrix(&unit_vec(stalk.dim(), k)))
            .collect();
        ModuleFiber { dim: stalk.dim(), action }
    }

    pub fn zero(stalk: &Algebra) -> Self {
        let p = stalk.p();
        ModuleFiber { dim: 0, action: vec![Mat::zeros(p, 0, 0); stalk.dim()] }
    }
}

/// A sheaf of modules: a module fiber per point, restriction matrices on
/// Hasse edges, semilinear over the ring restrictions.
#[derive(Clone, PartialEq, Debug)]
pub struct ModuleSheaf {
    base: RingedPoset,
    fibers: Vec<ModuleFiber>,
    res_full: BTreeMap<(usize, usize), Mat>,
}

impl ModuleSheaf {
    pub fn new(
        base: RingedPoset,
        fibers: Vec<ModuleFiber>,
        res: BTreeMap<(usize, usize), Mat>,
    ) -> Result<Self> {
        let p = base.p();
        if fibers.len() != base.len() {
            return Err(Error::BadShape("one fiber per point required".into()));
        }
        for (x, f) in fibers.iter().enumerate() {
            let stalk = base.stalk(x);
            if f.action.len() != stalk.dim() {
                return Err(Error::BadShape(format!(
                    "fiber at {} needs one action matrix per stalk basis element",
                    base.poset().name(x)
                )));
            }
            if f.action.iter().any(|m| m.rows() != f.dim || m.cols() != f.dim) {
                return Err(Error::BadShape("action matrix of wrong shape".into()));
            }
            // unit acts as identity, action is multiplicative
            if f.act(p, stalk.one()) != Mat::identity(p, f.dim) {
                return Err(Error::BadUnit(format!(
                    "unit does not act as identity at {}",
                    base.poset().name(x)
                )));
            }
            for i in 0..stalk.dim() {
                for j in 0..stalk.dim() {
                    let lhs = f.action[i].matmul(&f.action[j]);
                    let rhs = f.act(p, stalk.mul_coeffs(i, j));
                    if lhs != rhs {
                        return Err(Error::NotMultiplicative(i, j));
                    }
                }
            }
        }
        for &(a, b) in base.poset().hasse() {
            let Some(m) = res.get(&(a, b)) else {
                return Err(Error::BadShape("missing module restriction on a Hasse edge".into()));
            };
            if m.rows() != fibers[b].dim || m.cols() != fibers[a].dim {
                return Err(Error::BadShape("module restriction of wrong shape".into()));
            }
            // semilinearity: res . act_a(e_k) == act_b(r(e_k)) . res
            let r = base.res(a, b);
            for k in 0..base.stalk(a).dim() {
                let lhs = m.matmul(&fibers[a].action[k]);
                let rhs = fibers[b].act(p, &r.apply(&unit_vec(base.stalk(a).dim(), k))).matmul(m);
                if lhs != rhs {
                    return Err(Error::InvalidInput(format!(
                        "module restriction on {} < {} is not semilinear",
                        base.poset().name(a),
                        base.poset().name(b)
                    )));
                }
            }
        }
        let res_full = compose_module_restrictions(&base, &fibers, &res)?;
        Ok(ModuleSheaf { base, fibers, res_full })
    }

    pub fn structure(base: &RingedPoset) -> Self {
        let fibers = base.stalks().iter().map(ModuleFiber::free).collect();
        let mut res = BTreeMap::new();
        for (e, m) in base.hasse_res() {
            res.insert(e, m.matrix().clone());
        }
        ModuleSheaf::new(base.clone(), fibers, res).expect("structure sheaf is valid")
    }

    pub fn zero(base: &RingedPoset) -> Self {
        let p = base.p();
        let fibers = base.stalks().iter().map(ModuleFiber::zero).collect();
        let mut res = BTreeMap::new();
        for &e in base.poset().hasse() {
            res.insert(e, Mat::zeros(p, 0, 0));
        }
        ModuleSheaf::new(base.clone(), fibers, res).expect("zero sheaf is valid")
    }

    pub fn base(&self) -> &RingedPoset {
        &self.base
    }
    pub fn fiber(&self, x: usize) -> &ModuleFiber {
        &self.fibers[x]
    }
    pub fn res(&self, x: usize, y: usize) -> &Mat {
        self.res_full.get(&(x, y)).expect("comparable pair")
    }
}

fn compose_module_restrictions(
    base: &RingedPoset,
    fibers: &[ModuleFiber],
    res: &BTreeMap<(usize, usize), Mat>,
) -> Result<BTreeMap<(usize, usize), Mat>> {
    let poset = base.poset();
    let n = poset.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| poset.closure(i).len());
    let mut full: BTreeMap<(usize, usize), Mat> = BTreeMap::new();
    for x in 0..n {
        full.insert((x, x), Mat::identity(base.p(), fibers[x].dim));
        for &y in &order {
            if !poset.lt(x, y) {
                continue;
            }
            let mut composed: Option<Mat> = None;
            for &(z, y2) in poset.hasse() {
                if y2 != y || !poset.leq(x, z) {
                    continue;
                }
                let cand = res[&(z, y)].matmul(&full[&(x, z)]);
                match &composed {
                    None => composed = Some(cand),
                    Some(prev) => {
                        if prev != &cand {
                            return Err(Error::InvalidInput(format!(
                                "module restrictions are path dependent between {} and {}",
                                poset.name(x),
                                poset.name(y)
                            )));
                        }
                    }
                }
            }
            full.insert((x, y), composed.expect("path exists"));
        }
    }
    Ok(full)
}

/// Quasi-coherence: the canonical map M_x (x)_{O_x} O_y -> M_y is an
/// isomorphism on every Hasse edge.
pub fn is_quasi_coherent(m: &ModuleSheaf) -> bool {
    qcoh_canonical_maps(m).into_iter().all(|(bc_dim, target_dim, rank)| {
        bc_dim == target_dim && rank == target_dim
    })
}

/// Finite type: fibers finitely generated (automatic here) and the canonical
/// map surjective on every Hasse edge.
pub fn is_finite_type(m: &ModuleSheaf) -> bool {
    qcoh_canonical_maps(m).into_iter().all(|(_, target_dim, rank)| rank == target_dim)
}

fn qcoh_canonical_maps(m: &ModuleSheaf) -> Vec<(usize, usize, usize)> {
    let base = m.base();
    let mut out = Vec::new();
    for &(a, b) in base.poset().hasse() {
        let bc = module_base_change(m.fiber(a).dim, &m.fiber(a).action, base.res(a, b));
        let cmap = bc.induced_to(m.res(a, b), &m.fiber(b).action, m.fiber(b).dim);
        out.push((bc.dim, m.fiber(b).dim, cmap.rank()));
    }
    out
}

/// Sections of a module sheaf over an open set: compatible tuples.
pub struct SectionSpace {
    /// Parent indices of the points of U, sorted.
    pub points: Vec<usize>,
    /// Offset of each point's block inside a tuple vector.
    pub offsets: Vec<usize>,
    /// Basis of the section space, as vectors in the product.
    pub basis: Vec<Vec<u64>>,
    pub total_dim: usize,
}

pub fn sections(m: &ModuleSheaf, u: &[usize]) -> Result<SectionSpace> {
    let base = m.base();
    if !base.poset().is_open(u) {
        return Err(Error::NotOpen(format!("{u:?}")));
    }
    let mut points = u.to_vec();
    points.sort_unstable();
    points.dedup();
    let mut offsets = Vec::with_capacity(points.len());
    let mut total = 0usize;
    for &x in &points {
        offsets.push(total);
        total += m.fiber(x).dim;
    }
    let pos_of: BTreeMap<usize, usize> =
        points.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let p = base.p();
    let mut rows = Vec::new();
    for &(a, b) in base.poset().hasse() {
        let (Some(&ka), Some(&kb)) = (pos_of.get(&a), pos_of.get(&b)) else { continue };
        let r = m.res(a, b);
        let (da, db) = (m.fiber(a).dim, m.fiber(b).dim);
        for i in 0..db {
            let mut row = vec![0u64; total];
            for j in 0..da {
                row[offsets[ka] + j] = r.get(i, j);
            }
            row[offsets[kb] + i] = crate::linalg::fp_sub(p, row[offsets[kb] + i], 1);
            rows.push(row);
        }
    }
    let basis = if rows.is_empty() {
        (0..total).map(|i| unit_vec(total, i)).collect()
    } else {
        Mat::from_rows(p, rows).kernel_basis()
    };
    let space = Subspace::from_spanning(p, total, basis);
    Ok(SectionSpace {
        points,
        offsets,
        basis: space.basis().to_vec(),
        total_dim: total,
    })
}

/// A sheaf of algebras quasi-coherent data: an algebra per point, an
/// O_X-algebra structure map per point, restriction algebra maps on Hasse
/// edges commuting with everything.
#[derive(Clone, PartialEq, Debug)]
pub struct QcohAlgebra {
    base: RingedPoset,
    fibers: Vec<Algebra>,
    structure: Vec<AlgebraMap>,
    res_full: BTreeMap<(usize, usize), AlgebraMap>,
}

impl QcohAlgebra {
    pub fn new(
        base: RingedPoset,
        fibers: Vec<Algebra>,
        structure: Vec<AlgebraMap>,
        res: BTreeMap<(usize, usize), AlgebraMap>,
    ) -> Result<Self> {
        if fibers.len() != base.len() || structure.len() != base.len() {
            return Err(Error::BadShape("one fiber and structure map per point".into()));
        }
        for (x, (f, s)) in fibers.iter().zip(&structure).enumerate() {
            if f.p() != base.p() {
                return Err(Error::MixedCharacteristic(format!(
                    "fiber at {}",
                    base.poset().name(x)
                )));
            }
            if s.src() != base.stalk(x) || s.dst() != f {
                return Err(Error::BadShape(format!(
                    "structure map at {} does not match",
                    base.poset().name(x)
                )));
            }
        }
        for &(a, b) in base.poset().hasse() {
            let Some(m) = res.get(&(a, b)) else {
                return Err(Error::BadShape("missing algebra restriction on a Hasse edge".into()));
            };
            if m.src() != &fibers[a] || m.dst() != &fibers[b] {
                return Err(Error::BadShape("algebra restriction of wrong shape".into()));
            }
            // compatibility with the structure maps
            let lhs = m.compose(&structure[a]);
            let rhs = structure[b].compose(base.res(a, b));
            if lhs != rhs {
                return Err(Error::InvalidInput(format!(
                    "structure maps do not commute with restrictions on {} < {}",
                    base.poset().name(a),
                    base.poset().name(b)
                )));
            }
        }
        // path independence via the module composition (same matrices)
        let mut mat_res = BTreeMap::new();
        for (&e, m) in &res {
            mat_res.insert(e, m.matrix().clone());
        }
        let mod_fibers: Vec<ModuleFiber> = fibers
            .iter()
            .zip(&structure)
            .map(|(f, s)| algebra_fiber_as_module(f, s))
            .collect();
        compose_module_restrictions(&base, &mod_fibers, &mat_res)?;
        let mut res_full = BTreeMap::new();
        for x in 0..base.len() {
            res_full.insert((x, x), AlgebraMap::identity(&fibers[x]));
        }
        // build all composites from the Hasse data
        let poset = base.poset();
        let mut order: Vec<usize> = (0..base.len()).collect();
        order.sort_by_key(|&i| poset.closure(i).len());
        for x in 0..base.len() {
            for &y in &order {
                if !poset.lt(x, y) {
                    continue;
                }
                for &(z, y2) in poset.hasse() {
                    if y2 == y && poset.leq(x, z) {
                        let cand = res[&(z, y)].compose(&res_full[&(x, z)]);
                        res_full.insert((x, y), cand);
                        break;
                    }
                }
            }
        }
        Ok(QcohAlgebra { base, fibers, structure, res_full })
    }

    /// The structure sheaf O_X seen as an algebra sheaf over itself.
    pub fn structure_sheaf(base: &RingedPoset) -> Self {
        let fibers: Vec<Algebra> = base.stalks().to_vec();
        let structure = base.stalks().iter().map(AlgebraMap::identity).collect();
        let mut res = BTreeMap::new();
        for (e, m) in base.hasse_res() {
            res.insert(e, m.clone());
        }
        QcohAlgebra::new(base.clone(), fibers, structure, res).expect("O_X is valid")
    }

    /// The free cover O_X^n.
    pub fn free(base: &RingedPoset, n: usize) -> Self {
        let p = base.p();
        let mut fibers = Vec::new();
        let mut structure = Vec::new();
        for x in 0..base.len() {
            let stalk = base.stalk(x);
            let prod = product_algebra(p, &vec![stalk.clone(); n]);
            // diagonal structure map
            let cols = (0..stalk.dim())
                .map(|i| {
                    let mut v = Vec::with_capacity(n * stalk.dim());
                    for _ in 0..n {
                        v.extend_from_slice(&unit_vec(stalk.dim(), i));
                    }
                    v
                })
                .collect();
            let s = AlgebraMap::new_unchecked(
                stalk.clone(),
                prod.algebra.clone(),
                Mat::from_cols(p, n * stalk.dim(), cols),
            );
            fibers.push(prod.algebra);
            structure.push(s);
        }
        let mut res = BTreeMap::new();
        for (e, m) in base.hasse_res() {
            let (a, b) = e;
            let (da, db) = (base.stalk(a).dim(), base.stalk(b).dim());
            let mut mat = Mat::zeros(p, n * db, n * da);
            for blk in 0..n {
                for i in 0..db {
                    for j in 0..da {
                        mat.set(blk * db + i, blk * da + j, m.matrix().get(i, j));
                    }
                }
            }
            res.insert(e, AlgebraMap::new_unchecked(fibers[a].clone(), fibers[b].clone(), mat));
        }
        QcohAlgebra::new(base.clone(), fibers, structure, res).expect("free cover is valid")
    }

    pub fn base(&self) -> &RingedPoset {
        &self.base
    }
    pub fn fiber(&self, x: usize) -> &Algebra {
        &self.fibers[x]
    }
    pub fn fibers(&self) -> &[Algebra] {
        &self.fibers
    }
    pub fn structure_map(&self, x: usize) -> &AlgebraMap {
        &self.structure[x]
    }
    pub fn res(&self, x: usize, y: usize) -> &AlgebraMap {
        self.res_full.get(&(x, y)).expect("comparable pair")
    }

    /// Forget down to a module sheaf over the base.
    pub fn as_module(&self) -> ModuleSheaf {
        let fibers: Vec<ModuleFiber> = self
            .fibers
            .iter()
            .zip(&self.structure)
            .map(|(f, s)| algebra_fiber_as_module(f, s))
            .collect();
        let mut res = BTreeMap::new();
        for &e in self.base.poset().hasse() {
            res.insert(e, self.res_full[&e].matrix().clone());
        }
        ModuleSheaf::new(self.base.clone(), fibers, res).expect("valid module sheaf")
    }

    pub fn is_quasi_coherent(&self) -> bool {
        is_quasi_coherent(&self.as_module())
    }

    /// The relative spectrum (X, A) as a ringed poset.
    pub fn total_space(&self) -> RingedPoset {
        let mut res = BTreeMap::new();
        for &e in self.base.poset().hasse() {
            res.insert(e, self.res_full[&e].clone());
        }
        RingedPoset::new(self.base.poset().clone(), self.fibers.clone(), res)
            .expect("algebra sheaf data forms a ringed poset")
    }
}

fn algebra_fiber_as_module(f: &Algebra, s: &AlgebraMap) -> ModuleFiber {
    let action = (0..s.src().dim())
        .map(|k| f.mul_matrix(&s.apply(&unit_vec(s.src().dim(), k))))
        .collect();
    ModuleFiber { dim: f.dim(), action }
}

/// Sections of an algebra sheaf over an open set, with the induced
/// multiplication, plus evaluation maps to every point of the open set.
pub struct SectionAlgebra {
    pub points: Vec<usize>,
    pub offsets: Vec<usize>,
    pub algebra: Algebra,
    /// Representatives of the algebra basis inside the product of fibers.
    pub reps: Vec<Vec<u64>>,
    space: Subspace,
    fiber_dims: Vec<usize>,
}

impl SectionAlgebra {
    /// Evaluation map: sections -> fiber at the k-th point of U.
    pub fn eval(&self, k: usize, fiber: &Algebra) -> AlgebraMap {
        let p = self.algebra.p();
        let cols = self
            .reps
            .iter()
            .map(|r| r[self.offsets[k]..self.offsets[k] + self.fiber_dims[k]].to_vec())
            .collect();
        AlgebraMap::new_unchecked(
            self.algebra.clone(),
            fiber.clone(),
            Mat::from_cols(p, fiber.dim(), cols),
        )
    }

    /// Coordinates of a compatible tuple in the section basis.
    pub fn coords(&self, tuple: &[u64]) -> Option<Vec<u64>> {
        self.space.coords_of(tuple)
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }
}

fn section_algebra_impl(
    p: u64,
    poset: &crate::poset::Poset,
    u: &[usize],
    fiber_of: &dyn Fn(usize) -> Algebra,
    res_of: &dyn Fn(usize, usize) -> AlgebraMap,
) -> Result<SectionAlgebra> {
    if !poset.is_open(u) {
        return Err(Error::NotOpen(format!("{u:?}")));
    }
    let mut points = u.to_vec();
    points.sort_unstable();
    points.dedup();
    let fibers: Vec<Algebra> = points.iter().map(|&x| fiber_of(x)).collect();
    let fiber_dims: Vec<usize> = fibers.iter().map(|f| f.dim()).collect();
    let mut offsets = Vec::with_capacity(points.len());
    let mut total = 0;
    for &d in &fiber_dims {
        offsets.push(total);
        total += d;
    }
    let pos_of: BTreeMap<usize, usize> =
        points.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let mut rows = Vec::new();
    for &(a, b) in poset.hasse() {
        let (Some(&ka), Some(&kb)) = (pos_of.get(&a), pos_of.get(&b)) else { continue };
        let r = res_of(a, b);
        for i in 0..fiber_dims[kb] {
            let mut row = vec![0u64; total];
            for j in 0..fiber_dims[ka] {
                row[offsets[ka] + j] = r.matrix().get(i, j);
            }
            row[offsets[kb] + i] = crate::linalg::fp_sub(p, row[offsets[kb] + i], 1);
            rows.push(row);
        }
    }
    let kernel = if rows.is_empty() {
        (0..total).map(|i| unit_vec(total, i)).collect()
    } else {
        Mat::from_rows(p, rows).kernel_basis()
    };
    let space = Subspace::from_spanning(p, total, kernel);
    let reps: Vec<Vec<u64>> = space.basis().to_vec();
    let dim = reps.len();
    // componentwise multiplication of representatives
    let mul_tuple = |a: &[u64], b: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; total];
        for (k, f) in fibers.iter().enumerate() {
            let ra = &a[offsets[k]..offsets[k] + f.dim()];
            let rb = &b[offsets[k]..offsets[k] + f.dim()];
            let prod = f.mul_vec(ra, rb);
            out[offsets[k]..offsets[k] + f.dim()].copy_from_slice(&prod);
        }
        out
    };
    let mut mul = vec![0u64; dim * dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let prod = mul_tuple(&reps[i], &reps[j]);
            let coords = space
                .coords_of(&prod)
                .expect("sections are closed under multiplication");
            for (k, &c) in coords.iter().enumerate() {
                mul[(i * dim + j) * dim + k] = c;
            }
        }
    }
    let mut one_tuple = vec![0u64; total];
    for (k, f) in fibers.iter().enumerate() {
        one_tuple[offsets[k]..offsets[k] + f.dim()].copy_from_slice(f.one());
    }
    let one = space.coords_of(&one_tuple).expect("the unit tuple is a section");
    let algebra = Algebra::new_unchecked(p, dim, mul, one);
    Ok(SectionAlgebra { points, offsets, algebra, reps, space, fiber_dims })
}

/// Sections of the structure sheaf over an open set.
pub fn section_algebra(space: &RingedPoset, u: &[usize]) -> Result<SectionAlgebra> {
    section_algebra_impl(
        space.p(),
        space.poset(),
        u,
        &|x| space.stalk(x).clone(),
        &|a, b| space.res(a, b).clone(),
    )
}

/// Sections of an algebra sheaf over an open set.
pub fn section_algebra_of(a: &QcohAlgebra, u: &[usize]) -> Result<SectionAlgebra> {
    section_algebra_impl(
        a.base().p(),
        a.base().poset(),
        u,
        &|x| a.fiber(x).clone(),
        &|x, y| a.res(x, y).clone(),
    )
}

/// Pushforward of an algebra sheaf along a morphism: the fiber at y is the
/// section algebra of A over f^{-1}(U_y).
pub fn pushforward_algebra(f: &SpaceMorphism, a: &QcohAlgebra) -> Result<QcohAlgebra> {
    assert_eq!(a.base(), f.src(), "sheaf must live on the source");
    let y_space = f.dst();
    let p = y_space.p();
    let mut fibers = Vec::new();
    let mut structure = Vec::new();
    let mut secs = Vec::new();
    for y in 0..y_space.len() {
        let u = f.preimage_min_open(y);
        let sec = section_algebra_of(a, &u)?;
        // structure map O_{Y,y} -> sections: a |-> (sigma_x(comorph_x(res_Y(y, f(x)) a)))_x
        let stalk = y_space.stalk(y);
        let cols = (0..stalk.dim())
            .map(|i| {
                let v = unit_vec(stalk.dim(), i);
                let tuple = section_tuple(&sec, |x| {
                    let via = y_space.res(y, f.apply(x)).apply(&v);
                    a.structure_map(x).apply(&f.comorphism(x).apply(&via))
                });
                sec.coords(&tuple).expect("structure tuple is a section")
            })
            .collect();
        let s = AlgebraMap::new_unchecked(
            stalk.clone(),
            sec.algebra.clone(),
            Mat::from_cols(p, sec.algebra.dim(), cols),
        );
        fibers.push(sec.algebra.clone());
        structure.push(s);
        secs.push(sec);
    }
    let mut res = BTreeMap::new();
    for &(y, y2) in y_space.poset().hasse() {
        res.insert((y, y2), restrict_sections(&secs[y], &secs[y2]));
    }
    QcohAlgebra::new(y_space.clone(), fibers, structure, res)
}

/// Tuple of fiber values indexed like a SectionAlgebra's points.
fn section_tuple(sec: &SectionAlgebra, value_at: impl Fn(usize) -> Vec<u64>) -> Vec<u64> {
    let total = sec.offsets.last().map_or(0, |&o| o) + sec.fiber_dims.last().copied().unwrap_or(0);
    let mut out = vec![0u64; total];
    for (k, &x) in sec.points.iter().enumerate() {
        let v = value_at(x);
        out[sec.offsets[k]..sec.offsets[k] + sec.fiber_dims[k]].copy_from_slice(&v);
    }
    out
}

/// The restriction map between section algebras of nested opens
/// (larger -> smaller): drop components and re-coordinate.
fn restrict_sections(larger: &SectionAlgebra, smaller: &SectionAlgebra) -> AlgebraMap {
    let p = larger.algebra.p();
    let cols = larger
        .reps
        .iter()
        .map(|rep| {
            let tuple = section_tuple(smaller, |x| {
                let k = larger
                    .points
                    .iter()
                    .position(|&px| px == x)
                    .expect("smaller open contained in larger");
                rep[larger.offsets[k]..larger.offsets[k] + larger.fiber_dims[k]].to_vec()
            });
            smaller.coords(&tuple).expect("restricted section is a section")
        })
        .collect();
    AlgebraMap::new_unchecked(
        larger.algebra.clone(),
        smaller.algebra.clone(),
        Mat::from_cols(p, smaller.algebra.dim(), cols),
    )
}

/// The inclusion of an open subspace as a morphism.
pub fn inclusion_morphism(parent: &RingedPoset, sub_idx: &[usize]) -> Result<SpaceMorphism> {
    let (sub, idx) = parent.open_subspace(sub_idx)?;
    let comorph = idx.iter().map(|&i| AlgebraMap::identity(parent.stalk(i))).collect();
    SpaceMorphism::new(sub, parent.clone(), idx, comorph)
}

/// j_* for algebra sheaves: extend a sheaf on an open subspace to the whole
/// space by taking sections over U intersect U_x.
pub fn open_pushforward_algebra(
    parent: &RingedPoset,
    sub_idx: &[usize],
    a: &QcohAlgebra,
) -> Result<QcohAlgebra> {
    let j = inclusion_morphism(parent, sub_idx)?;
    pushforward_algebra(&j, a)
}

/// j_* for module sheaves.
pub fn open_pushforward(
    parent: &RingedPoset,
    sub_idx: &[usize],
    m: &ModuleSheaf,
) -> Result<ModuleSheaf> {
    let j = inclusion_morphism(parent, sub_idx)?;
    pushforward_module(&j, m)
}

/// Pushforward of a module sheaf along a morphism.
pub fn pushforward_module(f: &SpaceMorphism, m: &ModuleSheaf) -> Result<ModuleSheaf> {
    assert_eq!(m.base(), f.src());
    let y_space = f.dst();
    let p = y_space.p();
    let mut secs = Vec::new();
    for y in 0..y_space.len() {
        let u = f.preimage_min_open(y);
        secs.push(sections(m, &u)?);
    }
    let mut fibers = Vec::new();
    for (y, sec) in secs.iter().enumerate() {
        let stalk = y_space.stalk(y);
        let space = Subspace::from_spanning(p, sec.total_dim, sec.basis.clone());
        let mut action = Vec::with_capacity(stalk.dim());
        for i in 0..stalk.dim() {
            let v = unit_vec(stalk.dim(), i);
            let cols = sec
                .basis
                .iter()
                .map(|b| {
                    let mut out = vec![0u64; sec.total_dim];
                    for (k, &x) in sec.points.iter().enumerate() {
                        let via = f
                            .comorphism(x)
                            .apply(&y_space.res(y, f.apply(x)).apply(&v));
                        let act = m.fiber(x).act(p, &via);
                        let d = m.fiber(x).dim;
                        let part = act.apply(&b[sec.offsets[k]..sec.offsets[k] + d]);
                        out[sec.offsets[k]..sec.offsets[k] + d].copy_from_slice(&part);
                    }
                    space.coords_of(&out).expect("action preserves sections")
                })
                .collect();
            action.push(Mat::from_cols(p, sec.basis.len(), cols));
        }
        fibers.push(ModuleFiber { dim: sec.basis.len(), action });
    }
    let mut res = BTreeMap::new();
    for &(y, y2) in y_space.poset().hasse() {
        let larger = &secs[y];
        let smaller = &secs[y2];
        let small_space = Subspace::from_spanning(p, smaller.total_dim, smaller.basis.clone());
        let cols = larger
            .basis
            .iter()
            .map(|rep| {
                let mut tuple = vec![0u64; smaller.total_dim];
                for (k2, &x) in smaller.points.iter().enumerate() {
                    let k = larger.points.iter().position(|&px| px == x).unwrap();
                    let d = m.fiber(x).dim;
                    tuple[smaller.offsets[k2]..smaller.offsets[k2] + d]
                        .copy_from_slice(&rep[larger.offsets[k]..larger.offsets[k] + d]);
                }
                small_space.coords_of(&tuple).expect("restriction of a section")
            })
            .collect();
        res.insert((y, y2), Mat::from_cols(p, smaller.basis.len(), cols));
    }
    ModuleSheaf::new(y_space.clone(), fibers, res)
}

/// Pullback of an algebra sheaf along a morphism: stalkwise base change.
pub fn pullback_algebra(f: &SpaceMorphism, b: &QcohAlgebra) -> Result<QcohAlgebra> {
    assert_eq!(b.base(), f.dst(), "sheaf must live on the target");
    let x_space = f.src();
    let mut tensors = Vec::new();
    for x in 0..x_space.len() {
        let y = f.apply(x);
        tensors.push(tensor_over(b.structure_map(y), f.comorphism(x)));
    }
    let fibers: Vec<Algebra> = tensors.iter().map(|t| t.algebra.clone()).collect();
    let structure: Vec<AlgebraMap> = tensors.iter().map(|t| t.right.clone()).collect();
    let mut res = BTreeMap::new();
    for &(a, c) in x_space.poset().hasse() {
        let m = tensors[a].induced_map(
            &tensors[c],
            b.res(f.apply(a), f.apply(c)),
            x_space.res(a, c),
        );
        res.insert((a, c), m);
    }
    QcohAlgebra::new(x_space.clone(), fibers, structure, res)
}

/// A (x)_{O_X} B of two algebra sheaves on the same base.
pub fn tensor_covers(a: &QcohAlgebra, b: &QcohAlgebra) -> Result<QcohAlgebra> {
    assert_eq!(a.base(), b.base());
    let base = a.base().clone();
    let tensors: Vec<_> = (0..base.len())
        .map(|x| tensor_over(a.structure_map(x), b.structure_map(x)))
        .collect();
    let fibers: Vec<Algebra> = tensors.iter().map(|t| t.algebra.clone()).collect();
    let structure: Vec<AlgebraMap> = (0..base.len())
        .map(|x| tensors[x].left.compose(a.structure_map(x)))
        .collect();
    let mut res = BTreeMap::new();
    for &(x, y) in base.poset().hasse() {
        let m = tensors[x].induced_map(&tensors[y], a.res(x, y), b.res(x, y));
        res.insert((x, y), m);
    }
    QcohAlgebra::new(base, fibers, structure, res)
}

/// A x B of two algebra sheaves on the same base.
pub fn product_covers(a: &QcohAlgebra, b: &QcohAlgebra) -> Result<QcohAlgebra> {
    assert_eq!(a.base(), b.base());
    let base = a.base().clone();
    let p = base.p();
    let mut fibers = Vec::new();
    let mut structure = Vec::new();
    let mut prods = Vec::new();
    for x in 0..base.len() {
        let prod = product_algebra(p, &[a.fiber(x).clone(), b.fiber(x).clone()]);
        let stalk = base.stalk(x);
        let cols = (0..stalk.dim())
            .map(|i| {
                let v = unit_vec(stalk.dim(), i);
                let mut out = a.structure_map(x).apply(&v);
                out.extend(b.structure_map(x).apply(&v));
                out
            })
            .collect();
        let s = AlgebraMap::new_unchecked(
            stalk.clone(),
            prod.algebra.clone(),
            Mat::from_cols(p, prod.algebra.dim(), cols),
        );
        fibers.push(prod.algebra.clone());
        structure.push(s);
        prods.push(prod);
    }
    let mut res = BTreeMap::new();
    for &(x, y) in base.poset().hasse() {
        let (da, db) = (a.fiber(x).dim(), b.fiber(x).dim());
        let (da2, db2) = (a.fiber(y).dim(), b.fiber(y).dim());
        let mut mat = Mat::zeros(p, da2 + db2, da + db);
        for i in 0..da2 {
            for j in 0..da {
                mat.set(i, j, a.res(x, y).matrix().get(i, j));
            }
        }
        for i in 0..db2 {
            for j in 0..db {
                mat.set(da2 + i, da + j, b.res(x, y).matrix().get(i, j));
            }
        }
        res.insert(
            (x, y),
            AlgebraMap::new_unchecked(fibers[x].clone(), fibers[y].clone(), mat),
        );
    }
    QcohAlgebra::new(base, fibers, structure, res)
}
