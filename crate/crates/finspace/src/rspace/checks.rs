//! The structural predicates: finite space, schematic space / morphism,
//! affine space / morphism, qc-isomorphism.
//!
//! Schematicity is tested on Hasse edges in the moving slot only; the
//! comparison maps are built at complex level and tensored termwise, which is
//! justified because the restrictions of a finite space are flat.

use super::cohomology::{homology_map_is_iso, standard_complex, tensored_comparison};
use super::sheaf::{section_algebra, ModuleSheaf};
use super::{RingedPoset, SpaceMorphism};
use crate::algebra::{
    is_epimorphism, is_faithfully_flat, is_flat, product_algebra, AlgebraMap,
};
use crate::linalg::Mat;
use crate::{Error, Result};

/// Every Hasse restriction flat (composites are then flat automatically).
pub fn is_finite_space(x: &RingedPoset) -> bool {
    x.hasse_res().all(|(_, m)| is_flat(m))
}

/// Location of the first failing comparison, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Name of the point in the fixed slot.
    pub fixed: String,
    /// Names of the Hasse edge in the moving slot.
    pub edge: (String, String),
    /// Cohomological degree at which the comparison fails.
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchematicCheck {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl SchematicCheck {
    fn ok() -> Self {
        SchematicCheck { holds: true, witness: None }
    }
    fn fail(w: Witness) -> Self {
        SchematicCheck { holds: false, witness: Some(w) }
    }
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.contains(x)).collect()
}

/// Is the identity schematic: for every point x and Hasse edge y < y', the
/// canonical map H^i(U_x /\ U_y) (x)_{O_y} O_{y'} -> H^i(U_x /\ U_{y'}) is
/// an isomorphism in every degree.
pub fn is_schematic_space(x_space: &RingedPoset) -> Result<SchematicCheck> {
    if !is_finite_space(x_space) {
        let bad = x_space
            .hasse_res()
            .find(|(_, m)| !is_flat(m))
            .map(|((a, b), _)| format!("{} < {}", x_space.poset().name(a), x_space.poset().name(b)))
            .unwrap_or_default();
        return Err(Error::NotFiniteSpace(bad));
    }
    // fast necessary condition: restrictions must be flat epimorphisms
    for ((a, b), m) in x_space.hasse_res() {
        if !is_epimorphism(m) {
            return Ok(SchematicCheck::fail(Witness {
                fixed: x_space.poset().name(a).to_string(),
                edge: (
                    x_space.poset().name(a).to_string(),
                    x_space.poset().name(b).to_string(),
                ),
                degree: 0,
            }));
        }
    }
    let m = ModuleSheaf::structure(x_space);
    let poset = x_space.poset();
    for x in 0..x_space.len() {
        let ux = poset.min_open(x);
        for &(y, y2) in poset.hasse() {
            let u1 = intersect(&ux, &poset.min_open(y));
            let u2 = intersect(&ux, &poset.min_open(y2));
            let cmp = tensored_comparison(
                &m,
                &u1,
                &u2,
                x_space.res(y, y2),
                &|t| x_space.res(y, t).clone(),
                &|t| x_space.res(y2, t).clone(),
            )?;
            let top = cmp.source.dims.len().max(cmp.target.dims.len());
            for i in 0..top {
                if !homology_map_is_iso(&cmp, i) {
                    return Ok(SchematicCheck::fail(Witness {
                        fixed: poset.name(x).to_string(),
                        edge: (poset.name(y).to_string(), poset.name(y2).to_string()),
                        degree: i,
                    }));
                }
            }
        }
    }
    Ok(SchematicCheck::ok())
}

/// Schematic morphism test: both comparison families, with the Hasse edge in
/// the moving slot.
pub fn is_schematic_morphism(f: &SpaceMorphism) -> Result<SchematicCheck> {
    let x_space = f.src();
    let y_space = f.dst();
    if !is_finite_space(x_space) || !is_finite_space(y_space) {
        return Err(Error::NotFiniteSpace("source or target".into()));
    }
    let m = ModuleSheaf::structure(x_space);
    let xposet = x_space.poset();
    let yposet = y_space.poset();
    // family A: x-slot moves along Hasse edges of X, y fixed
    for y in 0..y_space.len() {
        let fy = f.preimage_min_open(y);
        for &(a, b) in xposet.hasse() {
            let u1 = intersect(&xposet.min_open(a), &fy);
            let u2 = intersect(&xposet.min_open(b), &fy);
            let cmp = tensored_comparison(
                &m,
                &u1,
                &u2,
                x_space.res(a, b),
                &|t| x_space.res(a, t).clone(),
                &|t| x_space.res(b, t).clone(),
            )?;
            let top = cmp.source.dims.len().max(cmp.target.dims.len());
            for i in 0..top {
                if !homology_map_is_iso(&cmp, i) {
                    return Ok(SchematicCheck::fail(Witness {
                        fixed: yposet.name(y).to_string(),
                        edge: (xposet.name(a).to_string(), xposet.name(b).to_string()),
                        degree: i,
                    }));
                }
            }
        }
    }
    // family B: y-slot moves along Hasse edges of Y, x fixed
    for x in 0..x_space.len() {
        let ux = xposet.min_open(x);
        for &(y, y2) in yposet.hasse() {
            let u1 = intersect(&ux, &f.preimage_min_open(y));
            let u2 = intersect(&ux, &f.preimage_min_open(y2));
            let into_src = |t: usize| -> AlgebraMap {
                f.comorphism(t).compose(y_space.res(y, f.apply(t)))
            };
            let into_tgt = |t: usize| -> AlgebraMap {
                f.comorphism(t).compose(y_space.res(y2, f.apply(t)))
            };
            let cmp = tensored_comparison(
                &m,
                &u1,
                &u2,
                y_space.res(y, y2),
                &into_src,
                &into_tgt,
            )?;
            let top = cmp.source.dims.len().max(cmp.target.dims.len());
            for i in 0..top {
                if !homology_map_is_iso(&cmp, i) {
                    return Ok(SchematicCheck::fail(Witness {
                        fixed: xposet.name(x).to_string(),
                        edge: (yposet.name(y).to_string(), yposet.name(y2).to_string()),
                        degree: i,
                    }));
                }
            }
        }
    }
    Ok(SchematicCheck::ok())
}

/// Why a space was or wasn't affine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineCheck {
    pub holds: bool,
    pub reason: String,
}

/// Affineness: acyclic structure sheaf plus faithfully flat global-to-stalks
/// map. Sufficiency of this pair is established for opens inside a minimal
/// open; the checker reports which half refuted.
pub fn is_affine(x_space: &RingedPoset) -> Result<AffineCheck> {
    let check = is_schematic_space(x_space)?;
    if !check.holds {
        return Err(Error::NotSchematic(format!("{:?}", check.witness)));
    }
    affine_given_schematic(x_space)
}

fn affine_given_schematic(x_space: &RingedPoset) -> Result<AffineCheck> {
    let all: Vec<usize> = (0..x_space.len()).collect();
    let m = ModuleSheaf::structure(x_space);
    let cx = standard_complex(&m, &all)?;
    for i in 1..=cx.max_degree() {
        if cx.homology_dim(i) != 0 {
            return Ok(AffineCheck {
                holds: false,
                reason: format!("H^{i}(X, O) has dimension {}", cx.homology_dim(i)),
            });
        }
    }
    let sec = section_algebra(x_space, &all)?;
    let prod = product_algebra(x_space.p(), x_space.stalks());
    let cols = sec.reps.clone();
    let global_to_stalks = AlgebraMap::new(
        sec.algebra.clone(),
        prod.algebra.clone(),
        Mat::from_cols(x_space.p(), prod.algebra.dim(), cols),
    )?;
    if !is_faithfully_flat(&global_to_stalks) {
        return Ok(AffineCheck {
            holds: false,
            reason: "global sections to product of stalks is not faithfully flat".into(),
        });
    }
    Ok(AffineCheck { holds: true, reason: "acyclic and faithfully flat over stalks".into() })
}

/// Affine morphism: schematic and every preimage of a minimal open affine.
pub fn is_affine_morphism(f: &SpaceMorphism) -> Result<AffineCheck> {
    let check = is_schematic_morphism(f)?;
    if !check.holds {
        return Err(Error::NotSchematicMorphism(format!("{:?}", check.witness)));
    }
    for y in 0..f.dst().len() {
        let u = f.preimage_min_open(y);
        let (sub, _) = f.src().open_subspace(&u)?;
        let sub_check = is_affine(&sub)?;
        if !sub_check.holds {
            return Ok(AffineCheck {
                holds: false,
                reason: format!(
                    "preimage of U_{} is not affine: {}",
                    f.dst().poset().name(y),
                    sub_check.reason
                ),
            });
        }
    }
    Ok(AffineCheck { holds: true, reason: "all preimages of minimal opens affine".into() })
}

/// The canonical map O_{Y,y} -> O_X(f^{-1}(U_y)) through the comorphisms.
pub fn global_comparison_map(
    f: &SpaceMorphism,
    y: usize,
) -> Result<(AlgebraMap, super::sheaf::SectionAlgebra)> {
    let u = f.preimage_min_open(y);
    let sec = section_algebra(f.src(), &u)?;
    let stalk = f.dst().stalk(y);
    let p = f.dst().p();
    let cols = (0..stalk.dim())
        .map(|i| {
            let v = crate::linalg::unit_vec(stalk.dim(), i);
            let mut tuple = vec![0u64; sec.reps.first().map_or(0, |r| r.len())];
            for (k, &x) in sec.points.iter().enumerate() {
                let w = f.comorphism(x).apply(&f.dst().res(y, f.apply(x)).apply(&v));
                let d = f.src().stalk(x).dim();
                tuple[sec.offsets[k]..sec.offsets[k] + d].copy_from_slice(&w);
            }
            sec.coords(&tuple).expect("comorphism image is a compatible tuple")
        })
        .collect();
    let map = AlgebraMap::new(
        stalk.clone(),
        sec.algebra.clone(),
        Mat::from_cols(p, sec.algebra.dim(), cols),
    )?;
    Ok((map, sec))
}

/// qc-isomorphism: affine and the comorphism-induced map
/// O_{Y,y} -> O_X(f^{-1}(U_y)) an isomorphism for every y.
pub fn is_qc_isomorphism(f: &SpaceMorphism) -> Result<bool> {
    let affine = is_affine_morphism(f)?;
    if !affine.holds {
        return Ok(false);
    }
    for y in 0..f.dst().len() {
        let (map, _) = global_comparison_map(f, y)?;
        if !map.is_bijective() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::sheaf::QcohAlgebra;
    use super::*;
    use crate::rspace::cohomology::cohomology_dims;

    #[test]
    fn xv_is_finite_and_schematic_and_affine() {
        let xv = xv();
        assert!(is_finite_space(&xv));
        assert!(is_schematic_space(&xv).unwrap().holds);
        let aff = is_affine(&xv).unwrap();
        assert!(aff.holds, "{}", aff.reason);
    }

    #[test]
    fn chain_with_quotient_restriction_is_not_finite() {
        // F_2[e]/(e^2) -> F_2 is not flat
        use crate::algebra::{quotient_algebra, spec_primes, Algebra};
        use crate::poset::Poset;
        use std::collections::BTreeMap;
        let dn = Algebra::poly_quotient(&crate::poly::Poly::new(2, vec![0, 0, 1]));
        let prime = spec_primes(&dn).pop().unwrap();
        let (_q, qmap) = quotient_algebra(&dn, &prime);
        let poset = Poset::new(vec!["a".into(), "b".into()], vec![(0, 1)]).unwrap();
        let mut res = BTreeMap::new();
        res.insert((0, 1), qmap.clone());
        let space =
            RingedPoset::new(poset, vec![dn, qmap.dst().clone()], res).unwrap();
        assert!(!is_finite_space(&space));
        assert!(matches!(is_schematic_space(&space), Err(Error::NotFiniteSpace(_))));
    }

    #[test]
    fn pseudocircle_is_not_schematic_and_has_h1() {
        let pc = pseudocircle();
        assert!(is_finite_space(&pc));
        let check = is_schematic_space(&pc).unwrap();
        assert!(!check.holds);
        let m = ModuleSheaf::structure(&pc);
        let dims = cohomology_dims(&m, &[0, 1, 2, 3]).unwrap();
        assert_eq!(dims, vec![1, 1]);
    }

    #[test]
    fn diagonal_chain_is_not_schematic() {
        // a < b with O_a = F_2, O_b = F_2 x F_2 via the diagonal: not epi
        use crate::poset::Poset;
        use std::collections::BTreeMap;
        let (prod, _) = f2xf2();
        let diag = crate::algebra::AlgebraMap::new(
            f2(),
            prod.clone(),
            Mat::from_cols(2, 2, vec![vec![1, 1]]),
        )
        .unwrap();
        let poset = Poset::new(vec!["a".into(), "b".into()], vec![(0, 1)]).unwrap();
        let mut res = BTreeMap::new();
        res.insert((0, 1), diag);
        let space = RingedPoset::new(poset, vec![f2(), prod], res).unwrap();
        let check = is_schematic_space(&space).unwrap();
        assert!(!check.holds);
    }

    #[test]
    fn collapse_is_qc_isomorphism() {
        let c = collapse();
        assert!(is_schematic_morphism(&c).unwrap().holds);
        assert!(is_affine_morphism(&c).unwrap().holds);
        assert!(is_qc_isomorphism(&c).unwrap());
    }

    #[test]
    fn identity_is_qc_isomorphism() {
        let xv = xv();
        let id = SpaceMorphism::identity(&xv);
        assert!(is_qc_isomorphism(&id).unwrap());
    }

    #[test]
    fn doubled_structure_map_is_affine_not_qciso() {
        // (X, O^2) -> X
        let xv = xv();
        let a = QcohAlgebra::free(&xv, 2);
        let (total, morphism) = super::super::constructions::relspec(&xv, &a).unwrap();
        let _ = total;
        assert!(is_affine_morphism(&morphism).unwrap().holds);
        assert!(!is_qc_isomorphism(&morphism).unwrap());
    }

    #[test]
    fn minimal_opens_are_affine() {
        let xv = xv();
        for x in 0..xv.len() {
            let u = xv.poset().min_open(x);
            let (sub, _) = xv.open_subspace(&u).unwrap();
            assert!(is_affine(&sub).unwrap().holds);
        }
    }
}
