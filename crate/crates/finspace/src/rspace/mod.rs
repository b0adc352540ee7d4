//! Ringed finite spaces: a finite poset with an algebra at every point and a
//! homomorphism along every Hasse edge, plus morphisms between them. The
//! structural predicates (finite, schematic, affine, qc-isomorphism) live in
//! [`checks`], sheaves in [`sheaf`], cohomology in [`cohomology`] and the
//! geometric constructions in [`constructions`].

pub mod checks;
pub mod cohomology;
pub mod constructions;
pub mod sheaf;

pub use checks::{
    is_affine, is_affine_morphism, is_finite_space, is_qc_isomorphism, is_schematic_morphism,
    is_schematic_space, SchematicCheck, Witness,
};
pub use cohomology::{cohomology_dims, Complex};
pub use constructions::{
    cylinder, fiber_product, is_flat_immersion, relspec, stein_factorization, FiberProductSpace,
    SteinFactorization,
};
pub use sheaf::{
    inclusion_morphism, is_finite_type, is_quasi_coherent, open_pushforward,
    open_pushforward_algebra, product_covers, pullback_algebra, pushforward_algebra,
    pushforward_module, section_algebra, section_algebra_of, sections, tensor_covers,
    ModuleFiber, ModuleSheaf, QcohAlgebra, SectionAlgebra, SectionSpace,
};

use crate::algebra::{Algebra, AlgebraMap};
use crate::poset::{MonotoneMap, Poset};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// A finite poset with a stalk algebra per point and a restriction map per
/// Hasse edge. Construction validates everything, including path
/// independence of composed restrictions, and caches the full system of
/// restriction maps for all comparable pairs.
#[derive(Clone, PartialEq, Debug)]
pub struct RingedPoset {
    poset: Poset,
    stalks: Vec<Algebra>,
    res_full: BTreeMap<(usize, usize), AlgebraMap>,
}

impl RingedPoset {
    pub fn new(
        poset: Poset,
        stalks: Vec<Algebra>,
        res: BTreeMap<(usize, usize), AlgebraMap>,
    ) -> Result<Self> {
        if stalks.len() != poset.len() {
            return Err(Error::BadShape("one stalk per point required".into()));
        }
        if let Some(first) = stalks.first() {
            let p = first.p();
            for (i, s) in stalks.iter().enumerate() {
                if s.p() != p {
                    return Err(Error::MixedCharacteristic(format!(
                        "stalk at {} has p = {}, expected {}",
                        poset.name(i),
                        s.p(),
                        p
                    )));
                }
            }
        }
        for &(a, b) in poset.hasse() {
            let Some(m) = res.get(&(a, b)) else {
                return Err(Error::BadShape(format!(
                    "missing restriction for edge {} < {}",
                    poset.name(a),
                    poset.name(b)
                )));
            };
            if m.src() != &stalks[a] || m.dst() != &stalks[b] {
                return Err(Error::BadShape(format!(
                    "restriction on {} < {} does not match the stalks",
                    poset.name(a),
                    poset.name(b)
                )));
            }
        }
        for key in res.keys() {
            if !poset.hasse().contains(key) {
                return Err(Error::BadShape("restriction on a non-Hasse pair".into()));
            }
        }
        let res_full = compose_restrictions(&poset, &stalks, &res)?;
        Ok(RingedPoset { poset, stalks, res_full })
    }

    /// One-point space.
    pub fn point(stalk: Algebra) -> Self {
        let poset = Poset::new(vec!["*".into()], vec![]).unwrap();
        RingedPoset::new(poset, vec![stalk], BTreeMap::new()).unwrap()
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }
    pub fn len(&self) -> usize {
        self.poset.len()
    }
    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }
    pub fn stalk(&self, x: usize) -> &Algebra {
        &self.stalks[x]
    }
    pub fn stalks(&self) -> &[Algebra] {
        &self.stalks
    }

    pub fn p(&self) -> u64 {
        self.stalks.first().map_or(2, |s| s.p())
    }

    /// Restriction map for any comparable pair x <= y.
    pub fn res(&self, x: usize, y: usize) -> &AlgebraMap {
        self.res_full.get(&(x, y)).expect("restriction exists for comparable pairs")
    }

    pub fn hasse_res(&self) -> impl Iterator<Item = ((usize, usize), &AlgebraMap)> {
        self.poset.hasse().iter().map(move |&e| (e, self.res(e.0, e.1)))
    }

    /// The open subspace on an up-closed set of points. Returns the subspace
    /// and the list mapping subspace indices to parent indices.
    pub fn open_subspace(&self, points: &[usize]) -> Result<(RingedPoset, Vec<usize>)> {
        if !self.poset.is_open(points) {
            return Err(Error::NotOpen(format!("{points:?}")));
        }
        let mut idx = points.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let names = idx.iter().map(|&i| self.poset.name(i).to_string()).collect();
        let back: BTreeMap<usize, usize> =
            idx.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut rel = Vec::new();
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                if a != b && self.poset.leq(ia, ib) {
                    rel.push((a, b));
                }
            }
        }
        let _ = back;
        let poset = Poset::from_relation(names, &rel)?;
        let stalks = idx.iter().map(|&i| self.stalks[i].clone()).collect();
        let mut res = BTreeMap::new();
        for &(a, b) in poset.hasse() {
            res.insert((a, b), self.res(idx[a], idx[b]).clone());
        }
        Ok((RingedPoset::new(poset, stalks, res)?, idx))
    }
}

fn compose_restrictions(
    poset: &Poset,
    stalks: &[Algebra],
    res: &BTreeMap<(usize, usize), AlgebraMap>,
) -> Result<BTreeMap<(usize, usize), AlgebraMap>> {
    let n = poset.len();
    // linear extension: sort by closure size
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| poset.closure(i).len());
    let mut full: BTreeMap<(usize, usize), AlgebraMap> = BTreeMap::new();
    for x in 0..n {
        full.insert((x, x), AlgebraMap::identity(&stalks[x]));
        for &y in &order {
            if !poset.lt(x, y) {
                continue;
            }
            let mut composed: Option<AlgebraMap> = None;
            for &(z, y2) in poset.hasse() {
                if y2 != y || !poset.leq(x, z) {
                    continue;
                }
                let below = full.get(&(x, z)).expect("processed in order").clone();
                let step = res.get(&(z, y)).expect("validated Hasse edge");
                let cand = step.compose(&below);
                match &composed {
                    None => composed = Some(cand),
                    Some(prev) => {
                        if prev != &cand {
                            return Err(Error::InvalidInput(format!(
                                "restrictions are path dependent between {} and {}",
                                poset.name(x),
                                poset.name(y)
                            )));
                        }
                    }
                }
            }
            let m = composed.expect("a Hasse path exists for any comparable pair");
            full.insert((x, y), m);
        }
    }
    Ok(full)
}

/// A morphism of ringed finite spaces: a monotone point map together with a
/// comorphism O_{Y, f(x)} -> O_{X, x} at every source point, commuting with
/// restrictions on both sides.
#[derive(Clone, PartialEq, Debug)]
pub struct SpaceMorphism {
    src: RingedPoset,
    dst: RingedPoset,
    map: Vec<usize>,
    comorph: Vec<AlgebraMap>,
}

impl SpaceMorphism {
    pub fn new(
        src: RingedPoset,
        dst: RingedPoset,
        map: Vec<usize>,
        comorph: Vec<AlgebraMap>,
    ) -> Result<Self> {
        MonotoneMap::new(src.poset().clone(), dst.poset().clone(), map.clone())?;
        if comorph.len() != src.len() {
            return Err(Error::BadShape("one comorphism per source point".into()));
        }
        for (x, cm) in comorph.iter().enumerate() {
            if cm.src() != dst.stalk(map[x]) || cm.dst() != src.stalk(x) {
                return Err(Error::BadShape(format!(
                    "comorphism at {} does not match the stalks",
                    src.poset().name(x)
                )));
            }
        }
        for &(a, b) in src.poset().hasse() {
            let lhs = comorph[b].compose(dst.res(map[a], map[b]));
            let rhs = src.res(a, b).compose(&comorph[a]);
            if lhs != rhs {
                return Err(Error::InvalidInput(format!(
                    "comorphisms do not commute with restrictions on {} < {}",
                    src.poset().name(a),
                    src.poset().name(b)
                )));
            }
        }
        Ok(SpaceMorphism { src, dst, map, comorph })
    }

    pub fn identity(space: &RingedPoset) -> Self {
        SpaceMorphism {
            src: space.clone(),
            dst: space.clone(),
            map: (0..space.len()).collect(),
            comorph: (0..space.len())
                .map(|x| AlgebraMap::identity(space.stalk(x)))
                .collect(),
        }
    }

    pub fn src(&self) -> &RingedPoset {
        &self.src
    }
    pub fn dst(&self) -> &RingedPoset {
        &self.dst
    }
    pub fn point_map(&self) -> &[usize] {
        &self.map
    }
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }
    pub fn comorphism(&self, x: usize) -> &AlgebraMap {
        &self.comorph[x]
    }

    /// self o first.
    pub fn compose(&self, first: &SpaceMorphism) -> SpaceMorphism {
        assert_eq!(first.dst, self.src, "non-composable morphisms");
        let map = first.map.iter().map(|&x| self.map[x]).collect();
        let comorph = (0..first.src.len())
            .map(|x| first.comorph[x].compose(&self.comorph[first.map[x]]))
            .collect();
        SpaceMorphism { src: first.src.clone(), dst: self.dst.clone(), map, comorph }
    }

    pub fn monotone(&self) -> MonotoneMap {
        MonotoneMap::new(self.src.poset().clone(), self.dst.poset().clone(), self.map.clone())
            .expect("validated at construction")
    }

    /// Preimage of the minimal open of y, as parent indices in the source.
    pub fn preimage_min_open(&self, y: usize) -> Vec<usize> {
        (0..self.src.len())
            .filter(|&x| self.dst.poset().leq(y, self.map[x]))
            .collect()
    }
}

/// Human-readable validation: first violation or OK.
pub fn validate_space(
    poset: Poset,
    stalks: Vec<Algebra>,
    res: BTreeMap<(usize, usize), AlgebraMap>,
) -> std::result::Result<RingedPoset, String> {
    RingedPoset::new(poset, stalks, res).map_err(|e| e.to_string())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::algebra::product_algebra;
    use crate::poly::Poly;

    pub fn f2() -> Algebra {
        Algebra::prime_field(2)
    }

    pub fn f4() -> Algebra {
        Algebra::poly_quotient(&Poly::new(2, vec![1, 1, 1]))
    }

    pub fn f2xf2() -> (Algebra, Vec<AlgebraMap>) {
        let prod = product_algebra(2, &[f2(), f2()]);
        (prod.algebra, prod.projections)
    }

    /// Xv: a < b1, a < b2 with stalks F_2 x F_2, F_2, F_2 and the two
    /// projections as restrictions.
    pub fn xv() -> RingedPoset {
        let (a, projs) = f2xf2();
        let poset = Poset::new(
            vec!["a".into(), "b1".into(), "b2".into()],
            vec![(0, 1), (0, 2)],
        )
        .unwrap();
        let mut res = BTreeMap::new();
        res.insert((0, 1), projs[0].clone());
        res.insert((0, 2), projs[1].clone());
        RingedPoset::new(poset, vec![a, f2(), f2()], res).unwrap()
    }

    /// Chain a < b with stalk F_2 x F_2 at a, F_2 at b, restriction pr1.
    pub fn chain_pr1() -> RingedPoset {
        let (a, projs) = f2xf2();
        let poset = Poset::new(vec!["a".into(), "b".into()], vec![(0, 1)]).unwrap();
        let mut res = BTreeMap::new();
        res.insert((0, 1), projs[0].clone());
        RingedPoset::new(poset, vec![a, f2()], res).unwrap()
    }

    /// The pseudocircle: x1, x2 < y1, y2 with constant stalk F_2.
    pub fn pseudocircle() -> RingedPoset {
        let poset = Poset::new(
            vec!["x1".into(), "x2".into(), "y1".into(), "y2".into()],
            vec![(0, 2), (0, 3), (1, 2), (1, 3)],
        )
        .unwrap();
        let id = AlgebraMap::identity(&f2());
        let mut res = BTreeMap::new();
        for e in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            res.insert(e, id.clone());
        }
        RingedPoset::new(poset, vec![f2(), f2(), f2(), f2()], res).unwrap()
    }

    /// The collapse of chain_pr1 onto the one-point space with F_2 x F_2.
    pub fn collapse() -> SpaceMorphism {
        let chain = chain_pr1();
        let (a, projs) = f2xf2();
        let point = RingedPoset::point(a.clone());
        SpaceMorphism::new(
            chain,
            point,
            vec![0, 0],
            vec![AlgebraMap::identity(&a), projs[0].clone()],
        )
        .unwrap()
    }
}
