//! Etale cover sheaves: quasi-coherent algebra sheaves that are finite, flat
//! and stalkwise etale, with their degree, morphisms, fiber functor,
//! quotients, factorizations, trivializations and the executable
//! Galois-category axiom suite.

pub mod fiber;
pub mod galois;
pub mod homs;
pub mod trivialize;

pub use fiber::{fib, fib_map, FiberSet};
pub use galois::{galois_axioms_report, galois_group, is_galois, AxiomReport};
pub use homs::{
    algebra_homs_over, aut_group, hom_set, image_factorization, quotient_by_group, AutGroup,
    Factorization,
};
pub use trivialize::{
    split_diagonal, trivialize, verify_certificate, SplitDiagonal, TrivializationCertificate,
};

use crate::algebra::{is_etale_map, is_flat, AlgebraMap};
use crate::pwconn::connectivity_profile;
use crate::rspace::{QcohAlgebra, RingedPoset};
use crate::{Error, Result};

/// Outcome of the etale-cover certification, naming the first failing point
/// and condition when it fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverCheck {
    pub holds: bool,
    pub diagnosis: String,
}

/// Finite + flat + stalkwise etale, checked at every point. The input must
/// be quasi-coherent.
pub fn is_etale_cover(x_space: &RingedPoset, a: &QcohAlgebra) -> Result<CoverCheck> {
    assert_eq!(a.base(), x_space);
    if !a.is_quasi_coherent() {
        return Err(Error::NotQcoh("etale covers must be quasi-coherent".into()));
    }
    for x in 0..x_space.len() {
        let s = a.structure_map(x);
        if !is_flat(s) {
            return Ok(CoverCheck {
                holds: false,
                diagnosis: format!("stalk at {} is not flat", x_space.poset().name(x)),
            });
        }
        if !is_etale_map(s) {
            return Ok(CoverCheck {
                holds: false,
                diagnosis: format!(
                    "fiber at {} is not reduced (not etale)",
                    x_space.poset().name(x)
                ),
            });
        }
    }
    Ok(CoverCheck { holds: true, diagnosis: "finite, flat and stalkwise etale".into() })
}

/// A certified etale cover sheaf.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaleCover {
    sheaf: QcohAlgebra,
}

impl EtaleCover {
    pub fn certify(x_space: &RingedPoset, sheaf: QcohAlgebra) -> Result<Self> {
        let check = is_etale_cover(x_space, &sheaf)?;
        if !check.holds {
            return Err(Error::NotEtale);
        }
        Ok(EtaleCover { sheaf })
    }

    pub fn sheaf(&self) -> &QcohAlgebra {
        &self.sheaf
    }
}

/// The degree (rank) of a finite locally free algebra sheaf at every point.
/// Requires a pw-connected base so that ranks are well defined; constant on
/// topological components.
pub fn degree(x_space: &RingedPoset, a: &QcohAlgebra) -> Result<Vec<usize>> {
    assert_eq!(a.base(), x_space);
    let profile = connectivity_profile(x_space)?;
    if !profile.pw_connected {
        return Err(Error::NotPwConnected);
    }
    let mut ranks = Vec::with_capacity(x_space.len());
    for x in 0..x_space.len() {
        let s = a.structure_map(x);
        if !is_flat(s) {
            return Err(Error::InvalidInput(format!(
                "sheaf is not locally free at {}",
                x_space.poset().name(x)
            )));
        }
        let (od, ad) = (x_space.stalk(x).dim(), a.fiber(x).dim());
        if ad % od != 0 {
            return Err(Error::InvalidInput("rank is not integral".into()));
        }
        ranks.push(ad / od);
    }
    for comp in x_space.poset().components() {
        let r0 = ranks[comp[0]];
        if comp.iter().any(|&x| ranks[x] != r0) {
            return Err(Error::InvalidInput(
                "degree is not locally constant; sheaf is not locally free".into(),
            ));
        }
    }
    Ok(ranks)
}

/// Degree as a single integer on a connected base.
pub fn constant_degree(x_space: &RingedPoset, a: &QcohAlgebra) -> Result<usize> {
    let ranks = degree(x_space, a)?;
    let first = *ranks.first().ok_or(Error::InvalidInput("empty space".into()))?;
    if ranks.iter().any(|&r| r != first) {
        return Err(Error::NotConnected);
    }
    Ok(first)
}

/// A morphism of algebra sheaves over the same base: per-point O_x-algebra
/// maps commuting with restrictions.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverMorphism {
    src: QcohAlgebra,
    dst: QcohAlgebra,
    maps: Vec<AlgebraMap>,
}

impl CoverMorphism {
    pub fn new(src: QcohAlgebra, dst: QcohAlgebra, maps: Vec<AlgebraMap>) -> Result<Self> {
        if src.base() != dst.base() {
            return Err(Error::BadShape("cover morphisms need a common base".into()));
        }
        if maps.len() != src.base().len() {
            return Err(Error::BadShape("one map per point".into()));
        }
        for (x, m) in maps.iter().enumerate() {
            if m.src() != src.fiber(x) || m.dst() != dst.fiber(x) {
                return Err(Error::BadShape(format!(
                    "map at {} does not match the fibers",
                    src.base().poset().name(x)
                )));
            }
            // O_X-algebra map: commutes with the structure maps
            if m.compose(src.structure_map(x)) != *dst.structure_map(x) {
                return Err(Error::InvalidInput(format!(
                    "map at {} is not O_X-linear",
                    src.base().poset().name(x)
                )));
            }
        }
        for &(a, b) in src.base().poset().hasse() {
            let lhs = maps[b].compose(src.res(a, b));
            let rhs = dst.res(a, b).compose(&maps[a]);
            if lhs != rhs {
                return Err(Error::InvalidInput(format!(
                    "maps do not commute with restrictions on edge {} < {}",
                    src.base().poset().name(a),
                    src.base().poset().name(b)
                )));
            }
        }
        Ok(CoverMorphism { src, dst, maps })
    }

    pub fn identity(a: &QcohAlgebra) -> Self {
        CoverMorphism {
            src: a.clone(),
            dst: a.clone(),
            maps: a.fibers().iter().map(AlgebraMap::identity).collect(),
        }
    }

    pub fn src(&self) -> &QcohAlgebra {
        &self.src
    }
    pub fn dst(&self) -> &QcohAlgebra {
        &self.dst
    }
    pub fn map_at(&self, x: usize) -> &AlgebraMap {
        &self.maps[x]
    }

    /// self o first.
    pub fn compose(&self, first: &CoverMorphism) -> CoverMorphism {
        assert_eq!(first.dst, self.src);
        CoverMorphism {
            src: first.src.clone(),
            dst: self.dst.clone(),
            maps: (0..self.maps.len())
                .map(|x| self.maps[x].compose(&first.maps[x]))
                .collect(),
        }
    }

    /// Monomorphisms of covers are exactly the injective morphisms.
    pub fn is_mono(&self) -> bool {
        self.maps.iter().all(|m| m.is_injective())
    }

    /// Epimorphisms of covers are exactly the surjective morphisms.
    pub fn is_epi(&self) -> bool {
        self.maps.iter().all(|m| m.is_surjective())
    }

    pub fn is_isomorphism(&self) -> bool {
        self.maps.iter().all(|m| m.is_bijective())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rspace::fixtures::*;

    pub(crate) fn f4_cover_on_point() -> (RingedPoset, QcohAlgebra) {
        use crate::linalg::Mat;
        let pt = RingedPoset::point(f2());
        let f4 = f4();
        let s = AlgebraMap::new(f2(), f4.clone(), Mat::from_cols(2, 2, vec![vec![1, 0]]))
            .unwrap();
        let a = QcohAlgebra::new(
            pt.clone(),
            vec![f4],
            vec![s],
            std::collections::BTreeMap::new(),
        )
        .unwrap();
        (pt, a)
    }

    #[test]
    fn f4_is_an_etale_cover() {
        let (pt, a) = f4_cover_on_point();
        assert!(is_etale_cover(&pt, &a).unwrap().holds);
        assert_eq!(constant_degree(&pt, &a).unwrap(), 2);
    }

    #[test]
    fn dual_numbers_are_not_etale() {
        use crate::linalg::Mat;
        let pt = RingedPoset::point(f2());
        let dn = crate::algebra::Algebra::poly_quotient(&crate::poly::Poly::new(
            2,
            vec![0, 0, 1],
        ));
        let s = AlgebraMap::new(f2(), dn.clone(), Mat::from_cols(2, 2, vec![vec![1, 0]]))
            .unwrap();
        let a = QcohAlgebra::new(
            pt.clone(),
            vec![dn],
            vec![s],
            std::collections::BTreeMap::new(),
        )
        .unwrap();
        let check = is_etale_cover(&pt, &a).unwrap();
        assert!(!check.holds);
        assert!(check.diagnosis.contains("not reduced"));
    }

    #[test]
    fn degree_edge_cases() {
        let pt = RingedPoset::point(f2());
        // degree 0 exactly for the zero cover
        let zero = QcohAlgebra::free(&pt, 0);
        assert_eq!(constant_degree(&pt, &zero).unwrap(), 0);
        assert!(zero.fiber(0).is_zero_ring());
        // degree 1 forces the structure map to be an isomorphism
        let one = QcohAlgebra::free(&pt, 1);
        assert_eq!(constant_degree(&pt, &one).unwrap(), 1);
        assert!(one.structure_map(0).is_bijective());
        let (pt4, a4) = tests::f4_cover_on_point();
        assert_eq!(constant_degree(&pt4, &a4).unwrap(), 2);
        assert!(!a4.structure_map(0).is_bijective());
    }

    #[test]
    fn free_cover_is_etale_of_its_rank() {
        let xv = xv();
        let a = QcohAlgebra::free(&xv, 3);
        assert!(is_etale_cover(&xv, &a).unwrap().holds);
        // Xv is not pw-connected, so degree needs the pw space
        assert!(matches!(degree(&xv, &a), Err(Error::NotPwConnected)));
        let pt = RingedPoset::point(f2());
        let b = QcohAlgebra::free(&pt, 3);
        assert_eq!(constant_degree(&pt, &b).unwrap(), 3);
    }
}
