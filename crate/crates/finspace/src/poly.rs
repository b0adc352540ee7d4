//! Univariate polynomials over F_p: just enough arithmetic for minimal
//! polynomials, irreducibility tests and the finite-field tower.
//!
//! Coefficients are stored low-to-high with no trailing zeros.

use crate::linalg::{fp_inv, fp_mul, fp_sub};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    p: u64,
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { p, coeffs }
    }

    pub fn zero(p: u64) -> Self {
        Poly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        Poly::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        Poly::new(p, vec![0, 1])
    }

    pub fn monomial(p: u64, deg: usize) -> Self {
        let mut c = vec![0; deg + 1];
        c[deg] = 1;
        Poly::new(p, c)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports None.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u64 {
        *self.coeffs.last().unwrap_or(&0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut c = vec![0u64; n];
        for (i, slot) in c.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *slot = (a + b) % self.p;
        }
        Poly::new(self.p, c)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut c = vec![0u64; n];
        for (i, slot) in c.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *slot = fp_sub(self.p, a, b);
        }
        Poly::new(self.p, c)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.p);
        }
        let mut c = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] = (c[i + j] + a * b) % self.p;
            }
        }
        Poly::new(self.p, c)
    }

    pub fn scale(&self, k: u64) -> Poly {
        Poly::new(self.p, self.coeffs.iter().map(|&c| fp_mul(self.p, c, k)).collect())
    }

    pub fn divrem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let p = self.p;
        let dd = divisor.degree().unwrap();
        let lead_inv = fp_inv(p, divisor.leading());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let f = fp_mul(p, *rem.last().unwrap(), lead_inv);
            if f != 0 {
                quot[k] = f;
                for (i, &c) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] = fp_sub(p, rem[k + i], fp_mul(p, f, c));
                }
            }
            rem.pop();
        }
        (Poly::new(p, quot), Poly::new(p, rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.divrem(divisor).1
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(fp_inv(self.p, self.leading()))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns (d, u, v) with u*self + v*other = d, d monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut u0, mut u1) = (Poly::one(p), Poly::zero(p));
        let (mut v0, mut v1) = (Poly::zero(p), Poly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let u = u0.sub(&q.mul(&u1));
            let v = v0.sub(&q.mul(&v1));
            r0 = r1;
            r1 = r;
            u0 = u1;
            u1 = u;
            v0 = v1;
            v1 = v;
        }
        if r0.is_zero() {
            return (r0, u0, v0);
        }
        let lead_inv = fp_inv(p, r0.leading());
        (r0.scale(lead_inv), u0.scale(lead_inv), v0.scale(lead_inv))
    }

    /// Evaluate at an element of an F_p-algebra, given its multiplication.
    pub fn eval_in<F>(&self, one: &[u64], mul: F, x: &[u64]) -> Vec<u64>
    where
        F: Fn(&[u64], &[u64]) -> Vec<u64>,
    {
        let p = self.p;
        let n = x.len();
        let mut acc = vec![0u64; n];
        for &c in self.coeffs.iter().rev() {
            acc = mul(&acc, x);
            for (a, &o) in acc.iter_mut().zip(one.iter()) {
                *a = (*a + c * o) % p;
            }
        }
        acc
    }

    /// self^e mod m.
    pub fn pow_mod(&self, mut e: u128, m: &Poly) -> Poly {
        let mut base = self.rem(m);
        let mut acc = Poly::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = (acc * x + c) % self.p;
        }
        acc
    }

    /// Monic irreducibility over F_p (Rabin's test).
    pub fn is_irreducible(&self) -> bool {
        let p = self.p;
        let Some(d) = self.degree() else { return false };
        if d == 0 {
            return false;
        }
        let f = self.monic();
        let x = Poly::x(p);
        // x^(p^d) == x mod f
        let xq = x.pow_mod((p as u128).pow(d as u32), &f);
        if xq != x.rem(&f) {
            return false;
        }
        for q in prime_divisors(d as u64) {
            let e = (p as u128).pow((d as u64 / q) as u32);
            let xe = x.pow_mod(e, &f);
            let g = xe.sub(&x).gcd(&f);
            if g.degree() != Some(0) {
                return false;
            }
        }
        true
    }

    /// Full factorization into monic irreducibles with multiplicity, by
    /// deterministic trial division in counter order. Fine at the degrees
    /// this crate sees (<= ~16).
    pub fn factor(&self) -> Vec<(Poly, usize)> {
        assert!(!self.is_zero());
        let p = self.p;
        let mut rest = self.monic();
        let mut out: Vec<(Poly, usize)> = Vec::new();
        let mut d = 1usize;
        while rest.degree().unwrap_or(0) > 0 {
            if 2 * d > rest.degree().unwrap() {
                out.push((rest.clone(), 1));
                break;
            }
            let mut found = false;
            for cand in monic_polys(p, d) {
                if rest.degree().map_or(true, |rd| 2 * d > rd) {
                    break;
                }
                if !cand.is_irreducible() {
                    continue;
                }
                let mut mult = 0usize;
                loop {
                    let (q, r) = rest.divrem(&cand);
                    if r.is_zero() {
                        mult += 1;
                        rest = q;
                    } else {
                        break;
                    }
                }
                if mult > 0 {
                    out.push((cand, mult));
                    found = true;
                }
            }
            let _ = found;
            d += 1;
        }
        out
    }

    /// Roots in F_p with multiplicity ignored.
    pub fn roots_in_fp(&self) -> Vec<u64> {
        (0..self.p).filter(|&x| self.eval(x) == 0).collect()
    }
}

/// All monic polynomials of exact degree d over F_p, counter order.
pub fn monic_polys(p: u64, d: usize) -> impl Iterator<Item = Poly> {
    let total = (p as u128).pow(d as u32);
    (0..total).map(move |mut k| {
        let mut c = vec![0u64; d + 1];
        for slot in c.iter_mut().take(d) {
            *slot = (k % p as u128) as u64;
            k /= p as u128;
        }
        c[d] = 1;
        Poly::new(p, c)
    })
}

/// The first monic irreducible of degree d in counter order; this is the
/// canonical defining polynomial used by the finite-field tower.
pub fn first_irreducible(p: u64, d: usize) -> Poly {
    monic_polys(p, d)
        .find(|f| f.is_irreducible())
        .expect("an irreducible polynomial of every degree exists over F_p")
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_exact() {
        let p = 2;
        let f = Poly::new(p, vec![1, 1, 1]); // x^2+x+1
        let g = Poly::new(p, vec![1, 1]); // x+1
        let prod = f.mul(&g);
        let (q, r) = prod.divrem(&g);
        assert!(r.is_zero());
        assert_eq!(q, f);
    }

    #[test]
    fn irreducibility_small() {
        assert!(Poly::new(2, vec![1, 1, 1]).is_irreducible()); // x^2+x+1
        assert!(!Poly::new(2, vec![1, 0, 1]).is_irreducible()); // x^2+1=(x+1)^2
        assert!(Poly::new(2, vec![1, 1, 0, 1]).is_irreducible()); // x^3+x+1
        assert!(Poly::new(3, vec![1, 0, 1]).is_irreducible()); // x^2+1 over F_3
    }

    #[test]
    fn factor_recovers_product() {
        let p = 3;
        let f = Poly::new(p, vec![1, 1]); // x+1
        let g = Poly::new(p, vec![1, 0, 1]); // x^2+1
        let h = f.mul(&f).mul(&g);
        let fac = h.factor();
        assert_eq!(fac.len(), 2);
        assert!(fac.contains(&(f.monic(), 2)));
        assert!(fac.contains(&(g.monic(), 1)));
    }

    #[test]
    fn canonical_irreducibles() {
        // counter order: for p=2, degree 2, the only irreducible is x^2+x+1
        assert_eq!(first_irreducible(2, 2), Poly::new(2, vec![1, 1, 1]));
        assert_eq!(first_irreducible(2, 1), Poly::new(2, vec![0, 1]));
    }
}
