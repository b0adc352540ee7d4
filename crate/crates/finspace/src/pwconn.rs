//! pw-connectification: split every stalk into its local factors, so that
//! all stalks have connected spectrum, together with the connectivity
//! taxonomy and well-connected component decompositions.

use crate::algebra::{local_decomposition, product_algebra, AlgebraMap, LocalDecomposition};
use crate::linalg::Mat;
use crate::poset::Poset;
use crate::rspace::{
    pushforward_algebra, relspec, section_algebra_of, QcohAlgebra, RingedPoset, SpaceMorphism,
};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// The pw-connectification of a space: one point per local factor of each
/// stalk, with the projection back down and the factor bookkeeping.
pub struct PwSpace {
    pub space: RingedPoset,
    pub projection: SpaceMorphism,
    /// Per pw-point: (parent point, primitive idempotent cutting the factor).
    pub index: Vec<(usize, Vec<u64>)>,
}

pub fn pw_space(x_space: &RingedPoset) -> Result<PwSpace> {
    let decs: Vec<Option<LocalDecomposition>> = x_space
        .stalks()
        .iter()
        .map(|s| {
            if s.is_zero_ring() {
                Ok(None)
            } else {
                local_decomposition(s).map(Some)
            }
        })
        .collect::<Result<_>>()?;
    let mut points = Vec::new(); // (parent, factor index)
    let mut names = Vec::new();
    for (x, dec) in decs.iter().enumerate() {
        if let Some(d) = dec {
            for k in 0..d.len() {
                points.push((x, k));
                names.push(format!("{}#{k}", x_space.poset().name(x)));
            }
        }
    }
    // order: (x,k) <= (x',k') iff x <= x' and the factor k' of O_{x'} pulls
    // the factor idempotent e_k back to its unit: pi_{k'}(r(e_k)) = 1.
    let mut rel = Vec::new();
    for (i, &(x, k)) in points.iter().enumerate() {
        for (j, &(x2, k2)) in points.iter().enumerate() {
            if i == j || !x_space.poset().leq(x, x2) {
                continue;
            }
            let d = decs[x].as_ref().unwrap();
            let d2 = decs[x2].as_ref().unwrap();
            let image =
                d2.projections[k2].apply(&x_space.res(x, x2).apply(&d.idempotents[k]));
            if image == d2.factors[k2].one().to_vec() {
                rel.push((i, j));
            }
        }
    }
    let poset = Poset::from_relation(names, &rel)?;
    let stalks: Vec<_> = points
        .iter()
        .map(|&(x, k)| decs[x].as_ref().unwrap().factors[k].clone())
        .collect();
    let mut res = BTreeMap::new();
    for &(i, j) in poset.hasse() {
        let (x, k) = points[i];
        let (x2, k2) = points[j];
        let d = decs[x].as_ref().unwrap();
        let d2 = decs[x2].as_ref().unwrap();
        // factor k of O_x -> factor k2 of O_{x2}: include, restrict, project
        let inc = factor_inclusion(x_space, x, d, k);
        let m = d2.projections[k2]
            .matrix()
            .matmul(x_space.res(x, x2).matrix())
            .matmul(&inc);
        res.insert(
            (i, j),
            AlgebraMap::new(d.factors[k].clone(), d2.factors[k2].clone(), m)?,
        );
    }
    let space = RingedPoset::new(poset, stalks, res)?;
    let projection = SpaceMorphism::new(
        space.clone(),
        x_space.clone(),
        points.iter().map(|&(x, _)| x).collect(),
        points
            .iter()
            .map(|&(x, k)| decs[x].as_ref().unwrap().projections[k].clone())
            .collect(),
    )?;
    let index = points
        .iter()
        .map(|&(x, k)| (x, decs[x].as_ref().unwrap().idempotents[k].clone()))
        .collect();
    Ok(PwSpace { space, projection, index })
}

fn factor_inclusion(
    x_space: &RingedPoset,
    x: usize,
    dec: &LocalDecomposition,
    k: usize,
) -> Mat {
    let f = crate::algebra::idempotent_factor(x_space.stalk(x), &dec.idempotents[k]);
    f.inclusion
}

/// The functorial map pw(f): pw(X) -> pw(Y).
pub fn pw_morphism(
    f: &SpaceMorphism,
    pw_src: &PwSpace,
    pw_dst: &PwSpace,
) -> Result<SpaceMorphism> {
    let mut map = Vec::with_capacity(pw_src.index.len());
    let mut comorph = Vec::with_capacity(pw_src.index.len());
    for (i, (x, _)) in pw_src.index.iter().enumerate() {
        let y = f.apply(*x);
        // the factor of O_{Y,y} whose idempotent survives into this factor
        let mut target = None;
        for (j, (y2, ey)) in pw_dst.index.iter().enumerate() {
            if *y2 != y {
                continue;
            }
            let through = f.comorphism(*x).apply(ey);
            let in_factor = pw_src.projection.comorphism(i).apply(&through);
            if in_factor == pw_src.space.stalk(i).one().to_vec() {
                target = Some(j);
                break;
            }
        }
        let j = target.ok_or_else(|| {
            Error::InvalidInput("no target factor found for pw morphism".into())
        })?;
        map.push(j);
        // comorphism: B_j -> A_i: include into O_{Y,y}, pull back, project
        let y_inc = {
            let (y2, ey) = &pw_dst.index[j];
            crate::algebra::idempotent_factor(f.dst().stalk(*y2), ey).inclusion
        };
        let m = pw_src
            .projection
            .comorphism(i)
            .matrix()
            .matmul(f.comorphism(*x).matrix())
            .matmul(&y_inc);
        comorph.push(AlgebraMap::new(
            pw_dst.space.stalk(j).clone(),
            pw_src.space.stalk(i).clone(),
            m,
        )?);
    }
    SpaceMorphism::new(pw_src.space.clone(), pw_dst.space.clone(), map, comorph)
}

/// The four connectivity notions of a space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectivityProfile {
    pub top_connected: bool,
    pub connected: bool,
    pub pw_connected: bool,
    pub well_connected: bool,
}

pub fn connectivity_profile(x_space: &RingedPoset) -> Result<ConnectivityProfile> {
    let top_connected = x_space.poset().is_connected();
    let all: Vec<usize> = (0..x_space.len()).collect();
    let connected = if x_space.is_empty() {
        false
    } else {
        let sec = crate::rspace::section_algebra(x_space, &all)?;
        !sec.algebra.is_zero_ring() && local_decomposition(&sec.algebra)?.len() == 1
    };
    let mut pw_connected = !x_space.is_empty();
    for s in x_space.stalks() {
        if s.is_zero_ring() || local_decomposition(s)?.len() != 1 {
            pw_connected = false;
            break;
        }
    }
    Ok(ConnectivityProfile {
        top_connected,
        connected,
        pw_connected,
        well_connected: connected && pw_connected,
    })
}

/// Well-connected components: the topological components of pw(X), each with
/// its inclusion-then-project morphism into X.
pub fn wc_components(x_space: &RingedPoset) -> Result<Vec<(RingedPoset, SpaceMorphism)>> {
    let pw = pw_space(x_space)?;
    let mut out = Vec::new();
    for comp in pw.space.poset().components() {
        let (sub, idx) = pw.space.open_subspace(&comp)?;
        let map = idx.iter().map(|&i| pw.index[i].0).collect();
        let comorph = idx.iter().map(|&i| pw.projection.comorphism(i).clone()).collect();
        let inclusion = SpaceMorphism::new(sub.clone(), x_space.clone(), map, comorph)?;
        out.push((sub, inclusion));
    }
    Ok(out)
}

/// Decomposition of a quasi-coherent algebra on a well-connected space into
/// its well-connected components, with the explicit product isomorphism at
/// every point.
pub struct AlgebraComponents {
    pub components: Vec<QcohAlgebra>,
    /// Per point x: the isomorphism A_x -> prod_j (A_j)_x.
    pub iso: Vec<AlgebraMap>,
}

pub fn wc_components_algebra(
    x_space: &RingedPoset,
    a: &QcohAlgebra,
) -> Result<AlgebraComponents> {
    let profile = connectivity_profile(x_space)?;
    if !profile.well_connected {
        return Err(Error::NotWellConnected);
    }
    if !a.is_quasi_coherent() {
        return Err(Error::NotQcoh("component decomposition needs quasi-coherence".into()));
    }
    let (total, structure_morphism) = relspec(x_space, a)?;
    let pw = pw_space(&total)?;
    let mut components = Vec::new();
    let mut comp_data = Vec::new();
    for comp in pw.space.poset().components() {
        let (sub, idx) = pw.space.open_subspace(&comp)?;
        let map: Vec<usize> = idx.iter().map(|&i| pw.index[i].0).collect();
        let comorph: Vec<AlgebraMap> =
            idx.iter().map(|&i| pw.projection.comorphism(i).clone()).collect();
        let to_total = SpaceMorphism::new(sub.clone(), total.clone(), map, comorph)?;
        let g_j = structure_morphism.compose(&to_total);
        let oj = QcohAlgebra::structure_sheaf(&sub);
        let pushed = pushforward_algebra(&g_j, &oj)?;
        components.push(pushed);
        comp_data.push((sub, g_j, to_total, oj));
    }
    // explicit product isomorphism at every point
    let p = x_space.p();
    let mut iso = Vec::new();
    for x in 0..x_space.len() {
        let factor_algebras: Vec<_> = components.iter().map(|c| c.fiber(x).clone()).collect();
        let prod = product_algebra(p, &factor_algebras);
        let cols = (0..a.fiber(x).dim())
            .map(|i| {
                let v = crate::linalg::unit_vec(a.fiber(x).dim(), i);
                let mut out = Vec::new();
                for (j, (sub, g_j, to_total, oj)) in comp_data.iter().enumerate() {
                    let u = g_j.preimage_min_open(x);
                    let sec = section_algebra_of(oj, &u)?;
                    debug_assert_eq!(sec.algebra, *components[j].fiber(x));
                    let total_len = sec.reps.first().map_or(0, |r| r.len());
                    let mut tuple = vec![0u64; total_len];
                    for (k, &t) in sec.points.iter().enumerate() {
                        // A_x -> A_{g(t)} -> local factor at t
                        let w = to_total
                            .comorphism(t)
                            .apply(&a.res(x, to_total.apply(t)).apply(&v));
                        let d = sub.stalk(t).dim();
                        tuple[sec.offsets[k]..sec.offsets[k] + d].copy_from_slice(&w);
                    }
                    out.extend(
                        sec.coords(&tuple)
                            .ok_or_else(|| Error::InvalidInput("not a section".into()))?,
                    );
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        let m = AlgebraMap::new(
            a.fiber(x).clone(),
            prod.algebra.clone(),
            Mat::from_cols(p, prod.algebra.dim(), cols),
        )?;
        if !m.is_bijective() {
            return Err(Error::InvalidInput(
                "component decomposition map is not an isomorphism".into(),
            ));
        }
        iso.push(m);
    }
    Ok(AlgebraComponents { components, iso })
}
