//! Dense exact linear algebra over the prime field F_p.
//!
//! Everything downstream (algebras, sheaves, cohomology) reduces to row
//! reduction over F_p, so this module is deliberately small and boring:
//! matrices are dense `Vec<u64>` with entries kept in `0..p`.

/// Addition mod p.
#[inline]
pub fn fp_add(p: u64, a: u64, b: u64) -> u64 {
    (a + b) % p
}

/// Subtraction mod p.
#[inline]
pub fn fp_sub(p: u64, a: u64, b: u64) -> u64 {
    (a + p - b % p) % p
}

/// Multiplication mod p.
#[inline]
pub fn fp_mul(p: u64, a: u64, b: u64) -> u64 {
    a * b % p
}

/// a^e mod p.
pub fn fp_pow(p: u64, mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}

/// Multiplicative inverse mod a prime p. Panics on 0.
pub fn fp_inv(p: u64, a: u64) -> u64 {
    assert!(a % p != 0, "division by zero mod {p}");
    fp_pow(p, a, p - 2)
}

/// Dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Mat {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        Mat { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Mat::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(p: u64, rows: Vec<Vec<u64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.into_iter().map(|x| x % p));
        }
        Mat { p, rows: r, cols: c, data }
    }

    /// Matrix with given columns (handy for maps stored column-wise).
    pub fn from_cols(p: u64, ambient_rows: usize, cols: Vec<Vec<u64>>) -> Self {
        let c = cols.len();
        let mut m = Mat::zeros(p, ambient_rows, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), ambient_rows);
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> Vec<u64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Apply to a column vector: self * v.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in apply");
        let mut out = vec![0u64; self.rows];
        for i in 0..self.rows {
            let mut acc = 0u64;
            for j in 0..self.cols {
                acc = (acc + self.get(i, j) * (v[j] % self.p)) % self.p;
            }
            out[i] = acc;
        }
        out
    }

    /// self * other.
    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        assert_eq!(self.p, other.p);
        let mut out = Mat::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = (out.get(i, j) + a * other.get(k, j)) % self.p;
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    let (a, b) = (self.get(r, j), self.get(pr, j));
                    self.set(r, j, b);
                    self.set(pr, j, a);
                }
            }
            let inv = fp_inv(p, self.get(r, c));
            for j in 0..self.cols {
                let v = self.get(r, j) * inv % p;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && self.get(i, c) != 0 {
                    let f = self.get(i, c);
                    for j in 0..self.cols {
                        let v = fp_sub(p, self.get(i, j), f * self.get(r, j) % p);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of {v : self * v = 0}, returned as rows.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &c in &pivots {
                s[c] = true;
            }
            s
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = fp_sub(p, 0, m.get(r, free));
            }
            basis.push(v);
        }
        basis
    }

    /// One solution x of self * x = b, if any.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.rows);
        let p = self.p;
        let mut aug = Mat::zeros(p, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![0u64; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        Some(x)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let p = self.p;
        let mut aug = Mat::zeros(p, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let mut inv = Mat::zeros(p, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j));
            }
        }
        Some(inv)
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut out = Mat::zeros(self.p, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j));
            }
        }
        out
    }
}

/// A linear subspace of F_p^n held as a reduced-echelon row basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    p: u64,
    ambient: usize,
    basis: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn from_spanning(p: u64, ambient: usize, vectors: Vec<Vec<u64>>) -> Self {
        if vectors.is_empty() {
            return Subspace { p, ambient, basis: Vec::new(), pivots: Vec::new() };
        }
        let mut m = Mat::from_rows(p, vectors);
        assert_eq!(m.cols(), ambient);
        let pivots = m.rref();
        let basis = (0..pivots.len()).map(|i| m.row(i)).collect();
        Subspace { p, ambient, basis, pivots }
    }

    pub fn zero(p: u64, ambient: usize) -> Self {
        Subspace { p, ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(p: u64, ambient: usize) -> Self {
        Subspace::from_spanning(p, ambient, (0..ambient).map(|i| unit_vec(ambient, i)).collect())
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of v after reduction by the echelon basis. Zero iff v lies
    /// in the subspace; otherwise the pivot coordinates are zeroed out.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.ambient);
        let p = self.p;
        let mut w: Vec<u64> = v.iter().map(|&x| x % p).collect();
        for (b, &c) in self.basis.iter().zip(&self.pivots) {
            if w[c] != 0 {
                let f = w[c];
                for j in 0..self.ambient {
                    w[j] = fp_sub(p, w[j], f * b[j] % p);
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Ambient coordinates not used as pivots; they index a basis of the
    /// quotient F_p^n / self.
    pub fn complement_indices(&self) -> Vec<usize> {
        let mut taken = vec![false; self.ambient];
        for &c in &self.pivots {
            taken[c] = true;
        }
        (0..self.ambient).filter(|&i| !taken[i]).collect()
    }

    /// Coordinates of the class of v in the quotient, w.r.t. the
    /// complement-index basis.
    pub fn quotient_coords(&self, v: &[u64]) -> Vec<u64> {
        let w = self.reduce(v);
        self.complement_indices().iter().map(|&i| w[i]).collect()
    }

    /// Coordinates of v in terms of this basis; None if v is outside.
    pub fn coords_of(&self, v: &[u64]) -> Option<Vec<u64>> {
        if !self.contains(v) {
            return None;
        }
        // Echelon basis: coefficient of basis vector k is v[pivot_k] after
        // eliminating earlier pivots; reduce() already does the bookkeeping.
        let p = self.p;
        let mut w: Vec<u64> = v.iter().map(|&x| x % p).collect();
        let mut coords = vec![0u64; self.dim()];
        for (k, (b, &c)) in self.basis.iter().zip(&self.pivots).enumerate() {
            let f = w[c];
            coords[k] = f;
            if f != 0 {
                for j in 0..self.ambient {
                    w[j] = fp_sub(p, w[j], f * b[j] % p);
                }
            }
        }
        Some(coords)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::from_spanning(self.p, self.ambient, vs)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }
}

pub fn unit_vec(n: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0u64; n];
    v[i] = 1;
    v
}

pub fn vec_add(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| fp_add(p, x, y)).collect()
}

pub fn vec_sub(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| fp_sub(p, x, y)).collect()
}

pub fn vec_scale(p: u64, c: u64, a: &[u64]) -> Vec<u64> {
    a.iter().map(|&x| fp_mul(p, c, x)).collect()
}

/// Enumerate all of F_p^n in base-p counter order (deterministic).
pub fn all_vectors(p: u64, n: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = (p as u128).checked_pow(n as u32).expect("enumeration overflow");
    (0..total).map(move |mut k| {
        let mut v = vec![0u64; n];
        for slot in v.iter_mut() {
            *slot = (k % p as u128) as u64;
            k /= p as u128;
        }
        v
    })
}
