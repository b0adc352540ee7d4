//! Sheaf cohomology on an open set via the standard resolution: the i-th
//! term is the product over strictly decreasing chains t_i > ... > t_0 in U
//! of the fiber at the top point, with the alternating-sum differential.

use super::sheaf::ModuleSheaf;
use crate::algebra::{module_base_change, AlgebraMap, BaseChange};
use crate::linalg::{fp_sub, unit_vec, Mat, Subspace};
use crate::Result;
use std::collections::BTreeMap;

/// A finite cochain complex of F_p-spaces. `chains[i]` records the block
/// structure of term i (one block per chain, top point first); terms beyond
/// the stored range are zero.
pub struct Complex {
    pub p: u64,
    pub chains: Vec<Vec<Vec<usize>>>,
    pub block_offsets: Vec<Vec<usize>>,
    pub dims: Vec<usize>,
    /// diff[i]: term i -> term i+1 (one fewer entry than terms).
    pub diff: Vec<Mat>,
}

impl Complex {
    pub fn term_dim(&self, i: usize) -> usize {
        self.dims.get(i).copied().unwrap_or(0)
    }

    pub fn differential(&self, i: usize) -> Option<&Mat> {
        self.diff.get(i)
    }

    /// dim H^i.
    pub fn homology_dim(&self, i: usize) -> usize {
        let ker = match self.diff.get(i) {
            Some(d) => d.cols() - d.rank(),
            None => self.term_dim(i),
        };
        let im = if i == 0 {
            0
        } else {
            self.diff.get(i - 1).map_or(0, |d| d.rank())
        };
        ker - im
    }

    pub fn max_degree(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }
}

/// The standard complex of a module sheaf on an open subset U.
pub fn standard_complex(m: &ModuleSheaf, u: &[usize]) -> Result<Complex> {
    let base = m.base();
    let poset = base.poset();
    let p = base.p();
    let mut sorted_u = u.to_vec();
    sorted_u.sort_unstable();
    sorted_u.dedup();
    let top = poset.longest_chain_in(&sorted_u);
    let mut chains = Vec::new();
    let mut block_offsets = Vec::new();
    let mut dims = Vec::new();
    for i in 0..=top {
        let cs = poset.chains(&sorted_u, i)?;
        let mut offs = Vec::with_capacity(cs.len());
        let mut total = 0usize;
        for c in &cs {
            offs.push(total);
            total += m.fiber(c[0]).dim;
        }
        chains.push(cs);
        block_offsets.push(offs);
        dims.push(total);
    }
    if chains.is_empty() {
        return Ok(Complex { p, chains, block_offsets, dims, diff: Vec::new() });
    }
    let mut index: Vec<BTreeMap<&[usize], usize>> = Vec::new();
    for cs in &chains {
        let mut map = BTreeMap::new();
        for (k, c) in cs.iter().enumerate() {
            map.insert(c.as_slice(), k);
        }
        index.push(map);
    }
    let mut diff = Vec::new();
    for i in 0..chains.len().saturating_sub(1) {
        let mut d = Mat::zeros(p, dims[i + 1], dims[i]);
        for (tk, tchain) in chains[i + 1].iter().enumerate() {
            let t_off = block_offsets[i + 1][tk];
            let t_dim = m.fiber(tchain[0]).dim;
            for drop in 0..tchain.len() {
                let mut sub = tchain.clone();
                sub.remove(drop);
                let sk = index[i][sub.as_slice()];
                let s_off = block_offsets[i][sk];
                let sign_neg = drop % 2 == 1;
                if drop == 0 {
                    // top point dropped: restrict the fiber upward
                    let r = m.res(sub[0], tchain[0]);
                    for row in 0..t_dim {
                        for col in 0..m.fiber(sub[0]).dim {
                            let v = r.get(row, col);
                            if v == 0 {
                                continue;
                            }
                            let cur = d.get(t_off + row, s_off + col);
                            let val = if sign_neg { fp_sub(p, cur, v) } else { (cur + v) % p };
                            d.set(t_off + row, s_off + col, val);
                        }
                    }
                } else {
                    for row in 0..t_dim {
                        let cur = d.get(t_off + row, s_off + row);
                        let val =
                            if sign_neg { fp_sub(p, cur, 1) } else { (cur + 1) % p };
                        d.set(t_off + row, s_off + row, val);
                    }
                }
            }
        }
        diff.push(d);
    }
    #[cfg(debug_assertions)]
    for i in 0..diff.len().saturating_sub(1) {
        debug_assert!(diff[i + 1].matmul(&diff[i]).is_zero(), "d o d = 0");
    }
    Ok(Complex { p, chains, block_offsets, dims, diff })
}

/// Cohomology dimensions of a module sheaf over an open set, degrees
/// 0..=longest chain.
pub fn cohomology_dims(m: &ModuleSheaf, u: &[usize]) -> Result<Vec<usize>> {
    let cx = standard_complex(m, u)?;
    if cx.dims.is_empty() {
        return Ok(vec![0]);
    }
    Ok((0..=cx.max_degree()).map(|i| cx.homology_dim(i)).collect())
}

/// Action matrices of an acting algebra on each term of the complex, going
/// through a per-point algebra map into the stalk at the top of each chain.
pub fn complex_action(
    cx: &Complex,
    m: &ModuleSheaf,
    acting_dim: usize,
    into_stalk: &dyn Fn(usize) -> AlgebraMap,
) -> Vec<Vec<Mat>> {
    let p = cx.p;
    let mut out = Vec::new();
    for (i, cs) in cx.chains.iter().enumerate() {
        let mut per_basis = Vec::with_capacity(acting_dim);
        for k in 0..acting_dim {
            let mut mat = Mat::zeros(p, cx.dims[i], cx.dims[i]);
            for (ck, chain) in cs.iter().enumerate() {
                let t = chain[0];
                let via = into_stalk(t).apply(&unit_vec(acting_dim, k));
                let act = m.fiber(t).act(p, &via);
                let off = cx.block_offsets[i][ck];
                for r in 0..m.fiber(t).dim {
                    for c in 0..m.fiber(t).dim {
                        mat.set(off + r, off + c, act.get(r, c));
                    }
                }
            }
            per_basis.push(mat);
        }
        out.push(per_basis);
    }
    out
}

/// The complex C(U1) (x)_B B' together with the canonical chain map to
/// C(U2), for U2 inside U1, where B acts on U1-fibers and B' on U2-fibers
/// through the given per-point maps and r: B -> B' is the base change.
pub struct TensoredComparison {
    pub source: Complex,
    pub target: Complex,
    pub chain_maps: Vec<Mat>,
}

pub fn tensored_comparison(
    m: &ModuleSheaf,
    u1: &[usize],
    u2: &[usize],
    r: &AlgebraMap,
    into_stalk_src: &dyn Fn(usize) -> AlgebraMap,
    into_stalk_tgt: &dyn Fn(usize) -> AlgebraMap,
) -> Result<TensoredComparison> {
    let c1 = standard_complex(m, u1)?;
    let c2 = standard_complex(m, u2)?;
    let actions1 = complex_action(&c1, m, r.src().dim(), into_stalk_src);
    let actions2 = complex_action(&c2, m, r.dst().dim(), into_stalk_tgt);
    let degrees = c1.dims.len().max(c2.dims.len());
    // base change each term of C1 along r
    let mut bcs: Vec<Option<BaseChange>> = Vec::new();
    for i in 0..degrees {
        if i < c1.dims.len() {
            bcs.push(Some(module_base_change(c1.dims[i], &actions1[i], r)));
        } else {
            bcs.push(None);
        }
    }
    let p = c1.p;
    let mut dims = Vec::new();
    for bc in &bcs {
        dims.push(bc.as_ref().map_or(0, |b| b.dim));
    }
    let mut diff = Vec::new();
    for i in 0..degrees.saturating_sub(1) {
        let d = match (&bcs[i], &bcs[i + 1]) {
            (Some(src), Some(tgt)) => {
                let orig = c1.differential(i).expect("within range");
                src.map_tensor_id(tgt, orig)
            }
            (Some(_), None) => Mat::zeros(p, 0, dims[i]),
            (None, _) => Mat::zeros(p, dims[i + 1], 0),
        };
        diff.push(d);
    }
    let source = Complex {
        p,
        chains: Vec::new(),
        block_offsets: Vec::new(),
        dims,
        diff,
    };
    // chain map: sigma (x) b |-> b . (sigma restricted to U2)
    let mut chain_maps = Vec::new();
    for i in 0..degrees {
        let target_dim = c2.term_dim(i);
        let map = match &bcs[i] {
            None => Mat::zeros(p, target_dim, 0),
            Some(bc) => {
                // restriction C1_i -> C2_i: identity on chains lying in U2
                let mut rho = Mat::zeros(p, target_dim, c1.dims[i]);
                if i < c2.chains.len() {
                    for (tk, chain) in c2.chains[i].iter().enumerate() {
                        if let Some(sk) =
                            c1.chains[i].iter().position(|c| c == chain)
                        {
                            let so = c1.block_offsets[i][sk];
                            let to = c2.block_offsets[i][tk];
                            for rix in 0..m.fiber(chain[0]).dim {
                                rho.set(to + rix, so + rix, 1);
                            }
                        }
                    }
                }
                let empty = Vec::new();
                let acts = if i < actions2.len() { &actions2[i] } else { &empty };
                if target_dim == 0 {
                    Mat::zeros(p, 0, bc.dim)
                } else {
                    bc.induced_to(&rho, acts, target_dim)
                }
            }
        };
        chain_maps.push(map);
    }
    #[cfg(debug_assertions)]
    for i in 0..degrees.saturating_sub(1) {
        let lhs = match source.differential(i) {
            Some(d) => chain_maps[i + 1].matmul(d),
            None => Mat::zeros(p, chain_maps[i + 1].rows(), source.term_dim(i)),
        };
        let rhs = match c2.differential(i) {
            Some(d) => d.matmul(&chain_maps[i]),
            None => Mat::zeros(p, c2.term_dim(i + 1), chain_maps[i].cols()),
        };
        debug_assert_eq!(lhs, rhs, "comparison is a chain map in degree {i}");
    }
    Ok(TensoredComparison { source, target: c2, chain_maps })
}

/// Does a chain map induce an isomorphism on H^i?
pub fn homology_map_is_iso(cmp: &TensoredComparison, i: usize) -> bool {
    let p = cmp.source.p;
    let src_dim = cmp.source.term_dim(i);
    let tgt_dim = cmp.target.term_dim(i);
    let ker_src: Vec<Vec<u64>> = match cmp.source.differential(i) {
        Some(d) => d.kernel_basis(),
        None => (0..src_dim).map(|k| unit_vec(src_dim, k)).collect(),
    };
    let ker_tgt: Vec<Vec<u64>> = match cmp.target.differential(i) {
        Some(d) => d.kernel_basis(),
        None => (0..tgt_dim).map(|k| unit_vec(tgt_dim, k)).collect(),
    };
    let im_src: Vec<Vec<u64>> = if i == 0 {
        Vec::new()
    } else {
        match cmp.source.differential(i - 1) {
            Some(d) => (0..d.cols()).map(|j| d.col(j)).collect(),
            None => Vec::new(),
        }
    };
    let im_tgt: Vec<Vec<u64>> = if i == 0 {
        Vec::new()
    } else {
        match cmp.target.differential(i - 1) {
            Some(d) => (0..d.cols()).map(|j| d.col(j)).collect(),
            None => Vec::new(),
        }
    };
    let ker_src_dim = Subspace::from_spanning(p, src_dim, ker_src.clone()).dim();
    let im_src_dim = Subspace::from_spanning(p, src_dim, im_src).dim();
    let ker_tgt_space = Subspace::from_spanning(p, tgt_dim, ker_tgt);
    let im_tgt_space = Subspace::from_spanning(p, tgt_dim, im_tgt.clone());
    let h_src = ker_src_dim - im_src_dim;
    let h_tgt = ker_tgt_space.dim() - im_tgt_space.dim();
    if h_src != h_tgt {
        return false;
    }
    if h_tgt == 0 {
        return true;
    }
    // surjectivity of the induced map: phi(ker) + im = ker on the target
    let phi = &cmp.chain_maps[i];
    let mut span = im_tgt;
    for v in &ker_src {
        let w = phi.apply(v);
        debug_assert!(ker_tgt_space.contains(&w), "chain map preserves cocycles");
        span.push(w);
    }
    Subspace::from_spanning(p, tgt_dim, span).dim() == ker_tgt_space.dim()
}

/// Invariant check: H^0 of the standard complex equals the section space.
pub fn h0_dim_equals_sections(m: &ModuleSheaf, u: &[usize]) -> Result<bool> {
    let dims = cohomology_dims(m, u)?;
    let sec = super::sheaf::sections(m, u)?;
    Ok(dims[0] == sec.basis.len())
}
