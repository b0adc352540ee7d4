//! Finite-dimensional commutative unital algebras over F_p, given by
//! structure constants, together with the exact kernel built on them:
//! tensor products, idempotents and local decomposition, nilradicals,
//! spectra, residue fields, flatness / epimorphism / etaleness tests and
//! embeddings into a truncated algebraic-closure tower.

mod cache;
mod idempotent;
pub mod oracle;
mod predicates;
mod tensor;
mod tower;

pub use idempotent::{idempotents, local_decomposition, LocalDecomposition};
pub use predicates::{
    etale_decompose, is_epimorphism, is_etale_map, is_faithfully_flat, is_flat, min_poly,
    nilradical, residue_field, spec_primes,
};
pub use tensor::{
    idempotent_factor, module_base_change, product_algebra, quotient_algebra, tensor_over,
    BaseChange, TensorProduct,
};
pub use tower::{embeddings_into_omega, fp_field_embeddings, Embedding, FiniteFieldRep, OmegaTower};

use crate::linalg::{unit_vec, Mat, Subspace};
use crate::poly::Poly;
use crate::{Error, Result};

/// Largest p^dim for which exhaustive element enumeration is attempted.
pub const ENUMERATION_BOUND: u128 = 1 << 12;

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A finite-dimensional commutative unital F_p-algebra.
///
/// `mul[(i*dim+j)*dim+k]` is the coefficient of `e_k` in `e_i * e_j`.
/// `dim == 0` encodes the zero ring (the ring with one element).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Algebra {
    p: u64,
    dim: usize,
    mul: Vec<u64>,
    one: Vec<u64>,
}

impl Algebra {
    /// Validated construction from structure constants.
    pub fn new(p: u64, dim: usize, mul: Vec<u64>, one: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if mul.len() != dim * dim * dim || one.len() != dim {
            return Err(Error::BadShape(format!(
                "expected mul of size {} and one of size {dim}",
                dim * dim * dim
            )));
        }
        if mul.iter().chain(one.iter()).any(|&c| c >= p) {
            return Err(Error::BadShape(format!("scalar out of range 0..{p}")));
        }
        let a = Algebra { p, dim, mul, one };
        a.validate()?;
        Ok(a)
    }

    /// Construction for internally-built tables that are valid by
    /// construction. Fully re-validated in debug builds at small sizes.
    pub(crate) fn new_unchecked(p: u64, dim: usize, mul: Vec<u64>, one: Vec<u64>) -> Self {
        debug_assert_eq!(mul.len(), dim * dim * dim);
        debug_assert_eq!(one.len(), dim);
        let a = Algebra { p, dim, mul, one };
        // full debug re-validation is O(dim^6); keep it for small tables
        #[cfg(debug_assertions)]
        if dim <= 5 {
            a.validate().expect("internally constructed algebra must be valid");
        }
        a
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..i {
                if self.mul_coeffs(i, j) != self.mul_coeffs(j, i) {
                    return Err(Error::NotCommutative(j, i));
                }
            }
        }
        for i in 0..n {
            let ei = self.mul_vec(&self.one, &unit_vec(n, i));
            if ei != unit_vec(n, i) {
                return Err(Error::BadUnit(format!("one * e_{i} != e_{i}")));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = self.mul_coeffs(i, j).to_vec();
                for k in 0..n {
                    let left = self.mul_vec(&ij, &unit_vec(n, k));
                    let right = self.mul_vec(&unit_vec(n, i), self.mul_coeffs(j, k));
                    if left != right {
                        return Err(Error::NotAssociative(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    /// The zero ring.
    pub fn zero_ring(p: u64) -> Self {
        Algebra { p, dim: 0, mul: Vec::new(), one: Vec::new() }
    }

    /// F_p itself.
    pub fn prime_field(p: u64) -> Self {
        Algebra { p, dim: 1, mul: vec![1], one: vec![1] }
    }

    /// F_p[x]/(f) with power basis 1, x, ..., x^(deg f - 1).
    pub fn poly_quotient(f: &Poly) -> Self {
        let p = f.p();
        let d = f.degree().expect("nonzero modulus");
        assert!(d >= 1);
        let mut mul = vec![0u64; d * d * d];
        for i in 0..d {
            for j in 0..d {
                let prod = Poly::monomial(p, i).mul(&Poly::monomial(p, j)).rem(f);
                for (k, &c) in prod.coeffs().iter().enumerate() {
                    mul[(i * d + j) * d + k] = c;
                }
            }
        }
        let mut one = vec![0u64; d];
        one[0] = 1;
        Algebra::new_unchecked(p, d, mul, one)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn one(&self) -> &[u64] {
        &self.one
    }
    pub fn is_zero_ring(&self) -> bool {
        self.dim == 0
    }

    /// Coefficient row of e_i * e_j.
    pub fn mul_coeffs(&self, i: usize, j: usize) -> &[u64] {
        &self.mul[(i * self.dim + j) * self.dim..(i * self.dim + j + 1) * self.dim]
    }

    pub fn mul_vec(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        assert_eq!(a.len(), self.dim);
        assert_eq!(b.len(), self.dim);
        let p = self.p;
        let mut out = vec![0u64; self.dim];
        for i in 0..self.dim {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.dim {
                if b[j] == 0 {
                    continue;
                }
                let c = a[i] * b[j] % p;
                let row = self.mul_coeffs(i, j);
                for k in 0..self.dim {
                    out[k] = (out[k] + c * row[k]) % p;
                }
            }
        }
        out
    }

    /// Matrix of multiplication by a (columns are a * e_j).
    pub fn mul_matrix(&self, a: &[u64]) -> Mat {
        let cols = (0..self.dim).map(|j| self.mul_vec(a, &unit_vec(self.dim, j))).collect();
        Mat::from_cols(self.p, self.dim, cols)
    }

    pub fn pow_vec(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = self.one.clone();
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_vec(&acc, &base);
            }
            base = self.mul_vec(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// c * 1 for a scalar c.
    pub fn scalar(&self, c: u64) -> Vec<u64> {
        self.one.iter().map(|&x| x * (c % self.p) % self.p).collect()
    }

    /// Matrix of the F_p-linear Frobenius x -> x^p.
    pub fn frobenius_matrix(&self) -> Mat {
        let cols =
            (0..self.dim).map(|j| self.pow_vec(&unit_vec(self.dim, j), self.p)).collect();
        Mat::from_cols(self.p, self.dim, cols)
    }

    /// Number of elements, as u128 (guarding enumeration bounds).
    pub fn cardinality(&self) -> Option<u128> {
        (self.p as u128).checked_pow(self.dim as u32)
    }

    /// All elements in counter order. Caller must respect ENUMERATION_BOUND.
    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> {
        crate::linalg::all_vectors(self.p, self.dim)
    }

    pub fn is_idempotent(&self, v: &[u64]) -> bool {
        self.mul_vec(v, v) == v
    }
}

/// A unital algebra homomorphism, stored as a dst.dim x src.dim matrix whose
/// column i is the image of the i-th source basis vector.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraMap {
    src: Algebra,
    dst: Algebra,
    mat: Mat,
}

impl AlgebraMap {
    pub fn new(src: Algebra, dst: Algebra, mat: Mat) -> Result<Self> {
        if mat.rows() != dst.dim() || mat.cols() != src.dim() {
            return Err(Error::BadShape(format!(
                "map matrix must be {} x {}, got {} x {}",
                dst.dim(),
                src.dim(),
                mat.rows(),
                mat.cols()
            )));
        }
        if src.p() != dst.p() {
            return Err(Error::BadShape("mixed characteristics".into()));
        }
        let m = AlgebraMap { src, dst, mat };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(src: Algebra, dst: Algebra, mat: Mat) -> Self {
        debug_assert_eq!(mat.rows(), dst.dim());
        debug_assert_eq!(mat.cols(), src.dim());
        let m = AlgebraMap { src, dst, mat };
        #[cfg(debug_assertions)]
        if m.src.dim() <= 5 && m.dst.dim() <= 5 {
            m.validate().expect("internally constructed map must be a homomorphism");
        }
        m
    }

    /// For hot paths assembling maps that are homomorphisms by construction
    /// (blockwise sums of ring maps through orthogonal idempotents): skips
    /// even the debug re-validation.
    pub(crate) fn trusted(src: Algebra, dst: Algebra, mat: Mat) -> Self {
        debug_assert_eq!(mat.rows(), dst.dim());
        debug_assert_eq!(mat.cols(), src.dim());
        AlgebraMap { src, dst, mat }
    }

    fn validate(&self) -> Result<()> {
        if self.apply(self.src.one()) != self.dst.one().to_vec() {
            return Err(Error::NotUnital);
        }
        let n = self.src.dim();
        for i in 0..n {
            for j in i..n {
                let lhs = self.apply(self.src.mul_coeffs(i, j));
                let rhs = self
                    .dst
                    .mul_vec(&self.apply(&unit_vec(n, i)), &self.apply(&unit_vec(n, j)));
                if lhs != rhs {
                    return Err(Error::NotMultiplicative(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn identity(a: &Algebra) -> Self {
        AlgebraMap {
            src: a.clone(),
            dst: a.clone(),
            mat: Mat::identity(a.p(), a.dim()),
        }
    }

    pub fn src(&self) -> &Algebra {
        &self.src
    }
    pub fn dst(&self) -> &Algebra {
        &self.dst
    }
    pub fn matrix(&self) -> &Mat {
        &self.mat
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        self.mat.apply(v)
    }

    /// self o first.
    pub fn compose(&self, first: &AlgebraMap) -> AlgebraMap {
        assert_eq!(first.dst, self.src, "non-composable algebra maps");
        AlgebraMap {
            src: first.src.clone(),
            dst: self.dst.clone(),
            mat: self.mat.matmul(&first.mat),
        }
    }

    pub fn is_injective(&self) -> bool {
        self.mat.rank() == self.src.dim()
    }

    pub fn is_surjective(&self) -> bool {
        self.mat.rank() == self.dst.dim()
    }

    pub fn is_bijective(&self) -> bool {
        self.src.dim() == self.dst.dim() && self.mat.is_invertible()
    }

    pub fn inverse(&self) -> Option<AlgebraMap> {
        let inv = self.mat.inverse()?;
        Some(AlgebraMap { src: self.dst.clone(), dst: self.src.clone(), mat: inv })
    }

    /// Kernel as an ideal of the source.
    pub fn kernel(&self) -> Ideal {
        let vectors = self.mat.kernel_basis();
        Ideal::new_unchecked(&self.src, vectors)
    }
}

/// An ideal of an algebra, held as a reduced-echelon basis of a subspace
/// closed under multiplication by every basis element.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ideal {
    parent_dim: usize,
    space: Subspace,
}

impl Ideal {
    pub fn new(parent: &Algebra, spanning: Vec<Vec<u64>>) -> Result<Self> {
        let space = Subspace::from_spanning(parent.p(), parent.dim(), spanning);
        for b in space.basis() {
            for i in 0..parent.dim() {
                let prod = parent.mul_vec(b, &unit_vec(parent.dim(), i));
                if !space.contains(&prod) {
                    return Err(Error::InvalidInput(
                        "subspace is not closed under multiplication".into(),
                    ));
                }
            }
        }
        Ok(Ideal { parent_dim: parent.dim(), space })
    }

    pub(crate) fn new_unchecked(parent: &Algebra, spanning: Vec<Vec<u64>>) -> Self {
        let space = Subspace::from_spanning(parent.p(), parent.dim(), spanning);
        #[cfg(debug_assertions)]
        {
            for b in space.basis() {
                for i in 0..parent.dim() {
                    let prod = parent.mul_vec(b, &unit_vec(parent.dim(), i));
                    debug_assert!(space.contains(&prod), "not an ideal");
                }
            }
        }
        Ideal { parent_dim: parent.dim(), space }
    }

    pub fn zero(parent: &Algebra) -> Self {
        Ideal { parent_dim: parent.dim(), space: Subspace::zero(parent.p(), parent.dim()) }
    }

    pub fn parent_dim(&self) -> usize {
        self.parent_dim
    }
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
    pub fn space(&self) -> &Subspace {
        &self.space
    }
    pub fn basis(&self) -> &[Vec<u64>] {
        self.space.basis()
    }
    pub fn contains(&self, v: &[u64]) -> bool {
        self.space.contains(v)
    }
    pub fn is_zero(&self) -> bool {
        self.space.dim() == 0
    }

    /// Whole-algebra ideal test (contains the unit).
    pub fn is_unit_ideal(&self, parent: &Algebra) -> bool {
        self.space.contains(parent.one())
    }
}
