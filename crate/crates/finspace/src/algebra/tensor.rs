//! Quotients, idempotent factors, direct products, tensor products over a
//! common base, and base change of modules along an algebra map.
//!
//! Tensor quotients never materialize the full ambient multiplication table;
//! class representatives are always pure basis tensors, so products reduce to
//! outer products of small vectors followed by reduction mod the relation
//! subspace.

use super::{Algebra, AlgebraMap, Ideal};
use crate::linalg::{fp_sub, unit_vec, Mat, Subspace};

/// A / I with its projection map. I = A yields the zero ring.
pub fn quotient_algebra(a: &Algebra, ideal: &Ideal) -> (Algebra, AlgebraMap) {
    assert_eq!(ideal.parent_dim(), a.dim());
    let p = a.p();
    let space = ideal.space();
    let reps = space.complement_indices();
    let qdim = reps.len();
    let mut mul = vec![0u64; qdim * qdim * qdim];
    for (k, &ik) in reps.iter().enumerate() {
        for (l, &il) in reps.iter().enumerate() {
            let prod = a.mul_vec(&unit_vec(a.dim(), ik), &unit_vec(a.dim(), il));
            let q = space.quotient_coords(&prod);
            for (t, &c) in q.iter().enumerate() {
                mul[(k * qdim + l) * qdim + t] = c;
            }
        }
    }
    let one = space.quotient_coords(a.one());
    let quot = Algebra::new_unchecked(p, qdim, mul, one);
    let cols = (0..a.dim())
        .map(|i| space.quotient_coords(&unit_vec(a.dim(), i)))
        .collect();
    let proj = AlgebraMap::new_unchecked(a.clone(), quot.clone(), Mat::from_cols(p, qdim, cols));
    (quot, proj)
}

/// The factor e*A cut out by an idempotent e, with the projection a -> e*a
/// and the (non-unital) linear inclusion back into A.
pub struct IdempotentFactor {
    pub factor: Algebra,
    pub projection: AlgebraMap,
    /// dim(A) x dim(factor); column k is the k-th factor basis vector in A.
    pub inclusion: Mat,
}

pub fn idempotent_factor(a: &Algebra, e: &[u64]) -> IdempotentFactor {
    assert!(a.is_idempotent(e), "idempotent_factor needs an idempotent");
    let p = a.p();
    let spanning = (0..a.dim()).map(|i| a.mul_vec(e, &unit_vec(a.dim(), i))).collect();
    let space = Subspace::from_spanning(p, a.dim(), spanning);
    let fdim = space.dim();
    let basis: Vec<Vec<u64>> = space.basis().to_vec();
    let mut mul = vec![0u64; fdim * fdim * fdim];
    for k in 0..fdim {
        for l in 0..fdim {
            let prod = a.mul_vec(&basis[k], &basis[l]);
            let coords = space.coords_of(&prod).expect("factor closed under multiplication");
            for (t, &c) in coords.iter().enumerate() {
                mul[(k * fdim + l) * fdim + t] = c;
            }
        }
    }
    let one = space.coords_of(e).expect("e lies in its own factor");
    let factor = Algebra::new_unchecked(p, fdim, mul, one);
    let cols = (0..a.dim())
        .map(|i| {
            let img = a.mul_vec(e, &unit_vec(a.dim(), i));
            space.coords_of(&img).expect("e*a lies in the factor")
        })
        .collect();
    let projection =
        AlgebraMap::new_unchecked(a.clone(), factor.clone(), Mat::from_cols(p, fdim, cols));
    let inclusion = Mat::from_cols(p, a.dim(), basis);
    IdempotentFactor { factor, projection, inclusion }
}

/// Direct product of algebras with projections and (non-unital) inclusions.
pub struct ProductAlgebra {
    pub algebra: Algebra,
    pub projections: Vec<AlgebraMap>,
    /// Column k of inclusions[i] is the k-th basis vector of factor i inside
    /// the product.
    pub inclusions: Vec<Mat>,
}

pub fn product_algebra(p: u64, factors: &[Algebra]) -> ProductAlgebra {
    let total: usize = factors.iter().map(|f| f.dim()).sum();
    let mut mul = vec![0u64; total * total * total];
    let mut one = vec![0u64; total];
    let mut offset = 0usize;
    let mut offsets = Vec::new();
    for f in factors {
        assert_eq!(f.p(), p);
        offsets.push(offset);
        for i in 0..f.dim() {
            one[offset + i] = f.one()[i];
            for j in 0..f.dim() {
                let row = f.mul_coeffs(i, j);
                for (k, &c) in row.iter().enumerate() {
                    mul[((offset + i) * total + offset + j) * total + offset + k] = c;
                }
            }
        }
        offset += f.dim();
    }
    let algebra = Algebra::new_unchecked(p, total, mul, one);
    let mut projections = Vec::new();
    let mut inclusions = Vec::new();
    for (f, &off) in factors.iter().zip(&offsets) {
        let mut pm = Mat::zeros(p, f.dim(), total);
        let mut im = Mat::zeros(p, total, f.dim());
        for k in 0..f.dim() {
            pm.set(k, off + k, 1);
            im.set(off + k, k, 1);
        }
        projections.push(AlgebraMap::new_unchecked(algebra.clone(), f.clone(), pm));
        inclusions.push(im);
    }
    ProductAlgebra { algebra, projections, inclusions }
}

/// T = A (x)_R B for maps f: R -> A and g: R -> B, with both canonical maps.
pub struct TensorProduct {
    pub algebra: Algebra,
    /// A -> T, a |-> a (x) 1.
    pub left: AlgebraMap,
    /// B -> T, b |-> 1 (x) b.
    pub right: AlgebraMap,
    rel: Subspace,
    adim: usize,
    bdim: usize,
}

fn outer(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut v = vec![0u64; a.len() * b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            v[i * b.len() + j] = x * y % p;
        }
    }
    v
}

pub fn tensor_over(f: &AlgebraMap, g: &AlgebraMap) -> TensorProduct {
    assert_eq!(f.src(), g.src(), "tensor_over needs a common base");
    let a = f.dst().clone();
    let b = g.dst().clone();
    let p = a.p();
    let (m, n) = (a.dim(), b.dim());
    let ambient = m * n;
    let mut gens = Vec::new();
    for r in 0..f.src().dim() {
        let fa = f.apply(&unit_vec(f.src().dim(), r));
        let gb = g.apply(&unit_vec(g.src().dim(), r));
        for i in 0..m {
            let fai = a.mul_vec(&fa, &unit_vec(m, i));
            for j in 0..n {
                let gbj = b.mul_vec(&gb, &unit_vec(n, j));
                let lhs = outer(p, &fai, &unit_vec(n, j));
                let rhs = outer(p, &unit_vec(m, i), &gbj);
                let mut v = vec![0u64; ambient];
                for t in 0..ambient {
                    v[t] = fp_sub(p, lhs[t], rhs[t]);
                }
                gens.push(v);
            }
        }
    }
    let rel = Subspace::from_spanning(p, ambient, gens);
    let reps = rel.complement_indices();
    let qdim = reps.len();
    let mut mul = vec![0u64; qdim * qdim * qdim];
    for (k, &ik) in reps.iter().enumerate() {
        let (ia, ja) = (ik / n, ik % n);
        for (l, &il) in reps.iter().enumerate() {
            let (ib, jb) = (il / n, il % n);
            let pa = a.mul_coeffs(ia, ib).to_vec();
            let pb = b.mul_coeffs(ja, jb).to_vec();
            let prod = outer(p, &pa, &pb);
            let q = rel.quotient_coords(&prod);
            for (t, &c) in q.iter().enumerate() {
                mul[(k * qdim + l) * qdim + t] = c;
            }
        }
    }
    let one = rel.quotient_coords(&outer(p, a.one(), b.one()));
    let algebra = Algebra::new_unchecked(p, qdim, mul, one);
    let left_cols = (0..m)
        .map(|i| rel.quotient_coords(&outer(p, &unit_vec(m, i), b.one())))
        .collect();
    let right_cols = (0..n)
        .map(|j| rel.quotient_coords(&outer(p, a.one(), &unit_vec(n, j))))
        .collect();
    let left =
        AlgebraMap::new_unchecked(a, algebra.clone(), Mat::from_cols(p, qdim, left_cols));
    let right =
        AlgebraMap::new_unchecked(b, algebra.clone(), Mat::from_cols(p, qdim, right_cols));
    TensorProduct { algebra, left, right, rel, adim: m, bdim: n }
}

impl TensorProduct {
    /// Class of the pure tensor a (x) b.
    pub fn pure(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.algebra.p();
        self.rel.quotient_coords(&outer(p, a, b))
    }

    /// Basis class representatives as (left index, right index) pairs of
    /// pure basis tensors.
    pub fn rep_pairs(&self) -> Vec<(usize, usize)> {
        self.rel
            .complement_indices()
            .iter()
            .map(|&ix| (ix / self.bdim, ix % self.bdim))
            .collect()
    }

    /// Induced map T -> T' from a pair of maps on the tensor legs. The caller
    /// guarantees compatibility over the bases; debug builds re-validate.
    pub fn induced_map(
        &self,
        target: &TensorProduct,
        on_left: &AlgebraMap,
        on_right: &AlgebraMap,
    ) -> AlgebraMap {
        let p = self.algebra.p();
        let n = self.bdim;
        let cols = self
            .rel
            .complement_indices()
            .iter()
            .map(|&ik| {
                let (i, j) = (ik / n, ik % n);
                target.pure(
                    &on_left.apply(&unit_vec(self.adim, i)),
                    &on_right.apply(&unit_vec(n, j)),
                )
            })
            .collect();
        AlgebraMap::new_unchecked(
            self.algebra.clone(),
            target.algebra.clone(),
            Mat::from_cols(p, target.algebra.dim(), cols),
        )
    }
}

/// M (x)_A B for a module M over A (given by action matrices per A-basis
/// element) and an algebra map r: A -> B. The result is a B-module.
pub struct BaseChange {
    pub p: u64,
    pub dim: usize,
    /// Action matrices per B-basis element.
    pub action: Vec<Mat>,
    rel: Subspace,
    mdim: usize,
    bdim: usize,
}

pub fn module_base_change(mdim: usize, actions: &[Mat], r: &AlgebraMap) -> BaseChange {
    let a = r.src();
    let b = r.dst();
    let p = a.p();
    assert_eq!(actions.len(), a.dim());
    let n = b.dim();
    let ambient = mdim * n;
    let mut gens = Vec::new();
    for (ai, act) in actions.iter().enumerate() {
        let ra = r.apply(&unit_vec(a.dim(), ai));
        for mi in 0..mdim {
            let am = act.apply(&unit_vec(mdim, mi));
            for bj in 0..n {
                let rab = b.mul_vec(&ra, &unit_vec(n, bj));
                let lhs = outer(p, &am, &unit_vec(n, bj));
                let rhs = outer(p, &unit_vec(mdim, mi), &rab);
                let mut v = vec![0u64; ambient];
                for t in 0..ambient {
                    v[t] = fp_sub(p, lhs[t], rhs[t]);
                }
                gens.push(v);
            }
        }
    }
    let rel = Subspace::from_spanning(p, ambient, gens);
    let reps = rel.complement_indices();
    let dim = reps.len();
    let mut action_out = Vec::with_capacity(n);
    for bk in 0..n {
        let cols = reps
            .iter()
            .map(|&ix| {
                let (mi, bj) = (ix / n, ix % n);
                let prod = b.mul_vec(&unit_vec(n, bj), &unit_vec(n, bk));
                rel.quotient_coords(&outer(p, &unit_vec(mdim, mi), &prod))
            })
            .collect();
        action_out.push(Mat::from_cols(p, dim, cols));
    }
    BaseChange { p, dim, action: action_out, rel, mdim, bdim: n }
}

impl BaseChange {
    /// Class of the pure tensor m (x) b.
    pub fn pure(&self, m: &[u64], b: &[u64]) -> Vec<u64> {
        self.rel.quotient_coords(&outer(self.p, m, b))
    }

    /// Basis class representatives as (module index, algebra index) pairs.
    pub fn rep_pairs(&self) -> Vec<(usize, usize)> {
        self.rel
            .complement_indices()
            .iter()
            .map(|&ix| (ix / self.bdim, ix % self.bdim))
            .collect()
    }

    /// The canonical map M (x)_A B -> N induced by an additive semilinear
    /// map phi: M -> N (phi(a.m) = r(a).phi(m)), where N is a B-module with
    /// the given action matrices: m (x) b |-> b . phi(m).
    pub fn induced_to(&self, phi: &Mat, n_actions: &[Mat], n_dim: usize) -> Mat {
        let cols: Vec<Vec<u64>> = self
            .rel
            .complement_indices()
            .iter()
            .map(|&ix| {
                let (mi, bj) = (ix / self.bdim, ix % self.bdim);
                let ph = phi.apply(&unit_vec(self.mdim, mi));
                n_actions[bj].apply(&ph)
            })
            .collect();
        Mat::from_cols(self.p, n_dim, cols)
    }

    /// Transport a linear map d: M -> M' to d (x) id: M (x) B -> M' (x) B.
    pub fn map_tensor_id(&self, target: &BaseChange, d: &Mat) -> Mat {
        let cols: Vec<Vec<u64>> = self
            .rel
            .complement_indices()
            .iter()
            .map(|&ix| {
                let (mi, bj) = (ix / self.bdim, ix % self.bdim);
                let dm = d.apply(&unit_vec(self.mdim, mi));
                target.pure(&dm, &unit_vec(self.bdim, bj))
            })
            .collect();
        Mat::from_cols(self.p, target.dim, cols)
    }
}
