//! Geometric constructions on ringed posets: fibered products, Stein
//! factorization, relative spectrum, cylinders and flat immersions.

use super::checks::{is_schematic_morphism, is_schematic_space};
use super::sheaf::{section_algebra, QcohAlgebra, SectionAlgebra};
use super::{RingedPoset, SpaceMorphism};
use crate::algebra::{tensor_over, Algebra, AlgebraMap, TensorProduct};
use crate::linalg::Mat;
use crate::poset::{cylinder_poset, poset_fiber_product, MonotoneMap};
use crate::{Error, Result};
use std::collections::BTreeMap;

pub struct FiberProductSpace {
    pub space: RingedPoset,
    pub to_left: SpaceMorphism,
    pub to_right: SpaceMorphism,
    /// (x, y) parent indices per product point.
    pub pairs: Vec<(usize, usize)>,
}

/// X x_Z Y with stalks O_x (x)_{O_z} O_y and the two projections.
pub fn fiber_product(f: &SpaceMorphism, g: &SpaceMorphism) -> Result<FiberProductSpace> {
    if f.dst() != g.dst() {
        return Err(Error::BadShape("fiber product needs a common target".into()));
    }
    let (poset, pairs) = poset_fiber_product(&f.monotone(), &g.monotone())?;
    let mut tensors: Vec<TensorProduct> = Vec::with_capacity(pairs.len());
    for &(x, y) in &pairs {
        debug_assert_eq!(f.apply(x), g.apply(y));
        tensors.push(tensor_over(f.comorphism(x), g.comorphism(y)));
    }
    let stalks: Vec<Algebra> = tensors.iter().map(|t| t.algebra.clone()).collect();
    let mut res = BTreeMap::new();
    for &(a, b) in poset.hasse() {
        let (x1, y1) = pairs[a];
        let (x2, y2) = pairs[b];
        let m = tensors[a].induced_map(
            &tensors[b],
            f.src().res(x1, x2),
            g.src().res(y1, y2),
        );
        res.insert((a, b), m);
    }
    let space = RingedPoset::new(poset, stalks, res)?;
    let to_left = SpaceMorphism::new(
        space.clone(),
        f.src().clone(),
        pairs.iter().map(|&(x, _)| x).collect(),
        (0..pairs.len()).map(|k| tensors[k].left.clone()).collect(),
    )?;
    let to_right = SpaceMorphism::new(
        space.clone(),
        g.src().clone(),
        pairs.iter().map(|&(_, y)| y).collect(),
        (0..pairs.len()).map(|k| tensors[k].right.clone()).collect(),
    )?;
    Ok(FiberProductSpace { space, to_left, to_right, pairs })
}

pub struct SteinFactorization {
    /// Y' = (Y, f_* O_X).
    pub mid: RingedPoset,
    /// f': X -> Y' with f'_* O_X = O_{Y'}.
    pub to_mid: SpaceMorphism,
    /// rho: Y' -> Y, the topological identity, an affine morphism.
    pub from_mid: SpaceMorphism,
}

/// Stein factorization f = rho o f'.
pub fn stein_factorization(f: &SpaceMorphism) -> Result<SteinFactorization> {
    let check = is_schematic_morphism(f)?;
    if !check.holds {
        return Err(Error::NotSchematicMorphism(format!("{:?}", check.witness)));
    }
    let y_space = f.dst();
    let p = y_space.p();
    let mut secs: Vec<SectionAlgebra> = Vec::with_capacity(y_space.len());
    for y in 0..y_space.len() {
        secs.push(section_algebra(f.src(), &f.preimage_min_open(y))?);
    }
    let stalks: Vec<Algebra> = secs.iter().map(|s| s.algebra.clone()).collect();
    let mut res = BTreeMap::new();
    for &(y, y2) in y_space.poset().hasse() {
        res.insert((y, y2), restrict_section_algebras(&secs[y], &secs[y2], f.src()));
    }
    let mid = RingedPoset::new(y_space.poset().clone(), stalks, res)?;
    // f': same point map; comorphism at x is evaluation at x
    let to_mid_comorph: Vec<AlgebraMap> = (0..f.src().len())
        .map(|x| {
            let sec = &secs[f.apply(x)];
            let k = sec.points.iter().position(|&t| t == x).expect("x lies in its own preimage");
            sec.eval(k, f.src().stalk(x))
        })
        .collect();
    let to_mid = SpaceMorphism::new(
        f.src().clone(),
        mid.clone(),
        f.point_map().to_vec(),
        to_mid_comorph,
    )?;
    // rho: identity on points; comorphism O_{Y,y} -> sections
    let from_mid_comorph: Vec<AlgebraMap> = (0..y_space.len())
        .map(|y| {
            let sec = &secs[y];
            let stalk = y_space.stalk(y);
            let cols = (0..stalk.dim())
                .map(|i| {
                    let v = crate::linalg::unit_vec(stalk.dim(), i);
                    let total = sec.reps.first().map_or(0, |r| r.len());
                    let mut tuple = vec![0u64; total];
                    for (k, &x) in sec.points.iter().enumerate() {
                        let w = f
                            .comorphism(x)
                            .apply(&y_space.res(y, f.apply(x)).apply(&v));
                        let d = f.src().stalk(x).dim();
                        tuple[sec.offsets[k]..sec.offsets[k] + d].copy_from_slice(&w);
                    }
                    sec.coords(&tuple).expect("comorphism tuple is a section")
                })
                .collect();
            AlgebraMap::new_unchecked(
                stalk.clone(),
                sec.algebra.clone(),
                Mat::from_cols(p, sec.algebra.dim(), cols),
            )
        })
        .collect();
    let from_mid = SpaceMorphism::new(
        mid.clone(),
        y_space.clone(),
        (0..y_space.len()).collect(),
        from_mid_comorph,
    )?;
    Ok(SteinFactorization { mid, to_mid, from_mid })
}

fn restrict_section_algebras(
    larger: &SectionAlgebra,
    smaller: &SectionAlgebra,
    src_space: &RingedPoset,
) -> AlgebraMap {
    let p = larger.algebra.p();
    let cols = larger
        .reps
        .iter()
        .map(|rep| {
            let total = smaller.reps.first().map_or(0, |r| r.len());
            let mut tuple = vec![0u64; total];
            for (k2, &x) in smaller.points.iter().enumerate() {
                let k = larger
                    .points
                    .iter()
                    .position(|&t| t == x)
                    .expect("smaller preimage contained in larger");
                let d = src_space.stalk(x).dim();
                tuple[smaller.offsets[k2]..smaller.offsets[k2] + d]
                    .copy_from_slice(&rep[larger.offsets[k]..larger.offsets[k] + d]);
            }
            smaller.coords(&tuple).expect("restricted section is a section")
        })
        .collect();
    AlgebraMap::new_unchecked(
        larger.algebra.clone(),
        smaller.algebra.clone(),
        Mat::from_cols(p, smaller.algebra.dim(), cols),
    )
}

/// The relative spectrum: (X, A) with the structure morphism to X.
pub fn relspec(
    x_space: &RingedPoset,
    a: &QcohAlgebra,
) -> Result<(RingedPoset, SpaceMorphism)> {
    assert_eq!(a.base(), x_space);
    if !a.is_quasi_coherent() {
        return Err(Error::NotQcoh("relative spectrum needs a quasi-coherent algebra".into()));
    }
    let total = a.total_space();
    let morphism = SpaceMorphism::new(
        total.clone(),
        x_space.clone(),
        (0..x_space.len()).collect(),
        (0..x_space.len()).map(|x| a.structure_map(x).clone()).collect(),
    )?;
    Ok((total, morphism))
}

/// The cylinder of a morphism: X above Y, glued along the comorphisms.
pub fn cylinder(f: &SpaceMorphism) -> RingedPoset {
    let m = MonotoneMap::new(
        f.src().poset().clone(),
        f.dst().poset().clone(),
        f.point_map().to_vec(),
    )
    .expect("validated morphism");
    let poset = cylinder_poset(&m);
    let nx = f.src().len();
    let mut stalks = Vec::with_capacity(poset.len());
    for i in 0..poset.len() {
        if i < nx {
            stalks.push(f.src().stalk(i).clone());
        } else {
            stalks.push(f.dst().stalk(i - nx).clone());
        }
    }
    let mut res = BTreeMap::new();
    for &(a, b) in poset.hasse() {
        let map = match (a < nx, b < nx) {
            (true, true) => f.src().res(a, b).clone(),
            (false, false) => f.dst().res(a - nx, b - nx).clone(),
            (false, true) => {
                // y <= x across the cylinder: comorphism after restriction
                let y = a - nx;
                let x = b;
                f.comorphism(x).compose(f.dst().res(y, f.apply(x)))
            }
            (true, false) => unreachable!("X-points never lie below Y-points"),
        };
        res.insert((a, b), map);
    }
    RingedPoset::new(poset, stalks, res).expect("cylinder data is valid")
}

/// Flat immersion test: the cylinder is schematic. (Reported as what the
/// cylinder check says; preconditions: f schematic.)
pub fn is_flat_immersion(f: &SpaceMorphism) -> Result<bool> {
    let check = is_schematic_morphism(f)?;
    if !check.holds {
        return Err(Error::NotSchematicMorphism(format!("{:?}", check.witness)));
    }
    let cyl = cylinder(f);
    Ok(is_schematic_space(&cyl)?.holds)
}

#[cfg(test)]
mod tests {
    use super::super::checks::{is_affine, is_qc_isomorphism, is_schematic_space};
    use super::super::fixtures::*;
    use super::super::sheaf::section_algebra;
    use super::*;

    #[test]
    fn point_fiber_product_is_tensor() {
        let f4 = f4();
        let f2 = f2();
        let x = RingedPoset::point(f4.clone());
        let z = RingedPoset::point(f2.clone());
        let inc = AlgebraMap::new(
            f2.clone(),
            f4.clone(),
            Mat::from_cols(2, 2, vec![vec![1, 0]]),
        )
        .unwrap();
        let f = SpaceMorphism::new(x.clone(), z.clone(), vec![0], vec![inc.clone()]).unwrap();
        let fp = fiber_product(&f, &f).unwrap();
        assert_eq!(fp.space.len(), 1);
        assert_eq!(fp.space.stalk(0).dim(), 4);
    }

    #[test]
    fn fiber_product_with_identity_is_source() {
        let xv = xv();
        let id = SpaceMorphism::identity(&xv);
        let fp = fiber_product(&id, &id).unwrap();
        // X x_X X = diagonal-ish: pairs with equal image = all pairs (x,x)
        // plus mixed comparable images; points with f(x)=g(y) means x = y here.
        assert_eq!(fp.pairs.iter().filter(|(a, b)| a == b).count(), xv.len());
    }

    #[test]
    fn collapse_fiber_product_is_affine_with_expected_sections() {
        // chain x_point(F_2xF_2) chain along the pr1 collapse: the pairs
        // (a,a), (a,b), (b,a), (b,b) with tensor stalks
        let c = collapse();
        let fp = fiber_product(&c, &c).unwrap();
        assert_eq!(fp.space.len(), 4);
        assert!(is_schematic_space(&fp.space).unwrap().holds);
        let aff = is_affine(&fp.space).unwrap();
        assert!(aff.holds, "{}", aff.reason);
        let all: Vec<usize> = (0..fp.space.len()).collect();
        let sec = section_algebra(&fp.space, &all).unwrap();
        assert_eq!(sec.algebra.dim(), 2);
    }

    #[test]
    fn stein_of_point_extension() {
        let f4 = f4();
        let f2 = f2();
        let x = RingedPoset::point(f4.clone());
        let z = RingedPoset::point(f2.clone());
        let inc = AlgebraMap::new(
            f2.clone(),
            f4.clone(),
            Mat::from_cols(2, 2, vec![vec![1, 0]]),
        )
        .unwrap();
        let f = SpaceMorphism::new(x, z, vec![0], vec![inc]).unwrap();
        let st = stein_factorization(&f).unwrap();
        assert_eq!(st.mid.stalk(0), &f4);
        assert!(is_qc_isomorphism(&st.to_mid).unwrap());
        // f = rho o f'
        let composed = st.from_mid.compose(&st.to_mid);
        assert_eq!(&composed, &f);
    }

    #[test]
    fn stein_of_qciso_is_identity_like() {
        let c = collapse();
        let st = stein_factorization(&c).unwrap();
        // rho: Y' -> Y must be an isomorphism since f_* O_X = O_Y
        for y in 0..st.from_mid.src().len() {
            assert!(st.from_mid.comorphism(y).is_bijective());
        }
    }

    #[test]
    fn relspec_of_free_cover_is_schematic() {
        let xv = xv();
        let a = QcohAlgebra::free(&xv, 2);
        let (total, morphism) = relspec(&xv, &a).unwrap();
        assert!(is_schematic_space(&total).unwrap().holds);
        assert!(is_schematic_morphism(&morphism).unwrap().holds);
    }

    #[test]
    fn cylinder_examples() {
        // id on (*, F_2): chain with identity restriction; flat immersion
        let pt = RingedPoset::point(f2());
        let id = SpaceMorphism::identity(&pt);
        assert!(is_flat_immersion(&id).unwrap());

        // (*, F_2) -> (*, F_2 x F_2) via pr1: cylinder is the chain; immersion
        let (prod, projs) = f2xf2();
        let big = RingedPoset::point(prod.clone());
        let small = RingedPoset::point(f2());
        let f =
            SpaceMorphism::new(small.clone(), big.clone(), vec![0], vec![projs[0].clone()])
                .unwrap();
        assert!(is_flat_immersion(&f).unwrap());

        // (*, F_4) -> (*, F_2): inclusion is not an epimorphism, not immersion
        let f4 = f4();
        let x = RingedPoset::point(f4.clone());
        let z = RingedPoset::point(f2());
        let inc = AlgebraMap::new(
            f2(),
            f4.clone(),
            Mat::from_cols(2, 2, vec![vec![1, 0]]),
        )
        .unwrap();
        let g = SpaceMorphism::new(x, z, vec![0], vec![inc]).unwrap();
        assert!(!is_flat_immersion(&g).unwrap());
    }
}
