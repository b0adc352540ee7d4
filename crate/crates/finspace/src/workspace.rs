//! The named-object workspace and its JSON schema.
//!
//! Top level: {"p", "algebras", "maps", "spaces", "module_sheaves",
//! "algebra_sheaves", "morphisms", "omega": {"max_degree"}}. An algebra is
//! {"dim", "one": [ints], "mul": [[[ints]]]} with mul[i][j] the coordinates
//! of e_i * e_j; a map is {"src", "dst", "mat"} with dst.dim rows and
//! src.dim columns (column i = image of the i-th source basis vector); a
//! space is {"points", "hasse": [[lo, hi]], "stalk": {id: algebra},
//! "res": {"lo<hi": map}}; sheaves add "fiber" and "res" keyed the same way
//! (algebra sheaves also carry "structure", module sheaves carry inline
//! fiber dims/actions and raw restriction matrices); morphisms carry "map"
//! and "comorphism" per source point. All scalars are integers in 0..p-1.
//! Serialization is canonical: keys sorted, no timestamps.

use crate::algebra::{Algebra, AlgebraMap};
use crate::linalg::Mat;
use crate::poset::Poset;
use crate::rspace::{ModuleFiber, ModuleSheaf, QcohAlgebra, RingedPoset, SpaceMorphism};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const DEFAULT_OMEGA_DEGREE: usize = 12;

#[derive(Serialize, Deserialize, Clone, Debug, Default)]
pub struct RawOmega {
    pub max_degree: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RawAlgebra {
    pub dim: usize,
    pub one: Vec<u64>,
    pub mul: Vec<Vec<Vec<u64>>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RawMap {
    pub src: String,
    pub dst: String,
    pub mat: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RawSpace {
    pub points: Vec<String>,
    pub hasse: Vec<(String, String)>,
    pub stalk: BTreeMap<String, String>,
    pub res: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RawModuleFiber {
    pub dim: usize,
    pub action: Vec<Vec<Vec<u64>>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RawModuleSheaf {
    pub space: String,
    pub fiber: BTreeMap<String, RawModuleFiber>,
    pub res: BTreeMap<String, Vec<Vec<u64>>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RawAlgebraSheaf {
    pub space: String,
    pub fiber: BTreeMap<String, String>,
    pub res: BTreeMap<String, String>,
    pub structure: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RawMorphism {
    pub src: String,
    pub dst: String,
    pub map: BTreeMap<String, String>,
    pub comorphism: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default)]
pub struct RawWorkspace {
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<RawOmega>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub algebras: BTreeMap<String, RawAlgebra>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, RawMap>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub spaces: BTreeMap<String, RawSpace>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub module_sheaves: BTreeMap<String, RawModuleSheaf>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub algebra_sheaves: BTreeMap<String, RawAlgebraSheaf>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, RawMorphism>,
}

/// Resolved workspace: every named object validated and built.
pub struct Workspace {
    pub raw: RawWorkspace,
    pub p: u64,
    pub omega_max_degree: usize,
    pub algebras: BTreeMap<String, Algebra>,
    pub maps: BTreeMap<String, AlgebraMap>,
    pub spaces: BTreeMap<String, RingedPoset>,
    pub module_sheaves: BTreeMap<String, ModuleSheaf>,
    pub algebra_sheaves: BTreeMap<String, QcohAlgebra>,
    pub morphisms: BTreeMap<String, SpaceMorphism>,
}

/// Parse/resolution error with a location label (for exit code 2).
#[derive(Debug)]
pub struct ResolveError {
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for ResolveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for ResolveError {}

type RResult<T> = std::result::Result<T, ResolveError>;

fn err<T>(location: impl Into<String>, message: impl std::fmt::Display) -> RResult<T> {
    Err(ResolveError { location: location.into(), message: message.to_string() })
}

impl Workspace {
    pub fn parse(text: &str) -> RResult<Workspace> {
        let raw: RawWorkspace = match serde_json::from_str(text) {
            Ok(r) => r,
            Err(e) => return err("json", e),
        };
        Workspace::resolve(raw)
    }

    pub fn resolve(raw: RawWorkspace) -> RResult<Workspace> {
        let p = raw.p;
        let omega_max_degree =
            raw.omega.as_ref().map_or(DEFAULT_OMEGA_DEGREE, |o| o.max_degree);
        let mut algebras = BTreeMap::new();
        for (name, ra) in &raw.algebras {
            let loc = format!("algebras.{name}");
            if ra.one.len() != ra.dim || ra.mul.len() != ra.dim {
                return err(loc, "one/mul shapes must match dim");
            }
            let mut flat = Vec::with_capacity(ra.dim * ra.dim * ra.dim);
            for row in &ra.mul {
                if row.len() != ra.dim {
                    return err(loc, "mul must be dim x dim x dim");
                }
                for cell in row {
                    if cell.len() != ra.dim {
                        return err(loc, "mul must be dim x dim x dim");
                    }
                    flat.extend_from_slice(cell);
                }
            }
            match Algebra::new(p, ra.dim, flat, ra.one.clone()) {
                Ok(a) => {
                    algebras.insert(name.clone(), a);
                }
                Err(e) => return err(loc, e),
            }
        }
        let mut maps = BTreeMap::new();
        for (name, rm) in &raw.maps {
            let loc = format!("maps.{name}");
            let Some(src) = algebras.get(&rm.src) else {
                return err(loc, format!("unknown algebra '{}'", rm.src));
            };
            let Some(dst) = algebras.get(&rm.dst) else {
                return err(loc, format!("unknown algebra '{}'", rm.dst));
            };
            if rm.mat.len() != dst.dim() {
                return err(loc, "mat must have dst.dim rows");
            }
            let mat = Mat::from_rows(p, rm.mat.clone());
            if mat.cols() != src.dim() && dst.dim() != 0 {
                return err(loc, "mat must have src.dim columns");
            }
            let mat = if dst.dim() == 0 { Mat::zeros(p, 0, src.dim()) } else { mat };
            match AlgebraMap::new(src.clone(), dst.clone(), mat) {
                Ok(m) => {
                    maps.insert(name.clone(), m);
                }
                Err(e) => return err(loc, e),
            }
        }
        let mut spaces = BTreeMap::new();
        for (name, rs) in &raw.spaces {
            let loc = format!("spaces.{name}");
            let space = resolve_space(&loc, rs, &algebras, &maps)?;
            spaces.insert(name.clone(), space);
        }
        let mut module_sheaves = BTreeMap::new();
        for (name, rm) in &raw.module_sheaves {
            let loc = format!("module_sheaves.{name}");
            let Some(base) = spaces.get(&rm.space) else {
                return err(loc, format!("unknown space '{}'", rm.space));
            };
            let mut fibers = Vec::with_capacity(base.len());
            for x in 0..base.len() {
                let pname = base.poset().name(x);
                let Some(rf) = rm.fiber.get(pname) else {
                    return err(&loc, format!("missing fiber at point '{pname}'"));
                };
                if rf.action.len() != base.stalk(x).dim() {
                    return err(&loc, format!("fiber at '{pname}' needs one action matrix per stalk basis element"));
                }
                let action = rf
                    .action
                    .iter()
                    .map(|m| Mat::from_rows(p, pad_rows(m.clone(), rf.dim)))
                    .collect();
                fibers.push(ModuleFiber { dim: rf.dim, action });
            }
            let mut res = BTreeMap::new();
            for &(a, b) in base.poset().hasse() {
                let key = format!("{}<{}", base.poset().name(a), base.poset().name(b));
                let Some(rmat) = rm.res.get(&key) else {
                    return err(&loc, format!("missing restriction '{key}'"));
                };
                res.insert((a, b), Mat::from_rows(p, pad_rows(rmat.clone(), fibers[b].dim)));
            }
            match ModuleSheaf::new(base.clone(), fibers, res) {
                Ok(m) => {
                    module_sheaves.insert(name.clone(), m);
                }
                Err(e) => return err(loc, e),
            }
        }
        let mut algebra_sheaves = BTreeMap::new();
        for (name, ra) in &raw.algebra_sheaves {
            let loc = format!("algebra_sheaves.{name}");
            let Some(base) = spaces.get(&ra.space) else {
                return err(loc, format!("unknown space '{}'", ra.space));
            };
            let mut fibers = Vec::with_capacity(base.len());
            let mut structure = Vec::with_capacity(base.len());
            for x in 0..base.len() {
                let pname = base.poset().name(x);
                let Some(aname) = ra.fiber.get(pname) else {
                    return err(&loc, format!("missing fiber at point '{pname}'"));
                };
                let Some(alg) = algebras.get(aname) else {
                    return err(&loc, format!("unknown algebra '{aname}'"));
                };
                let Some(sname) = ra.structure.get(pname) else {
                    return err(&loc, format!("missing structure map at point '{pname}'"));
                };
                let Some(smap) = maps.get(sname) else {
                    return err(&loc, format!("unknown map '{sname}'"));
                };
                fibers.push(alg.clone());
                structure.push(smap.clone());
            }
            let mut res = BTreeMap::new();
            for &(a, b) in base.poset().hasse() {
                let key = format!("{}<{}", base.poset().name(a), base.poset().name(b));
                let Some(mname) = ra.res.get(&key) else {
                    return err(&loc, format!("missing restriction '{key}'"));
                };
                let Some(m) = maps.get(mname) else {
                    return err(&loc, format!("unknown map '{mname}'"));
                };
                res.insert((a, b), m.clone());
            }
            match QcohAlgebra::new(base.clone(), fibers, structure, res) {
                Ok(a) => {
                    algebra_sheaves.insert(name.clone(), a);
                }
                Err(e) => return err(loc, e),
            }
        }
        let mut morphisms = BTreeMap::new();
        for (name, rm) in &raw.morphisms {
            let loc = format!("morphisms.{name}");
            let Some(src) = spaces.get(&rm.src) else {
                return err(loc, format!("unknown space '{}'", rm.src));
            };
            let Some(dst) = spaces.get(&rm.dst) else {
                return err(loc, format!("unknown space '{}'", rm.dst));
            };
            let mut map = Vec::with_capacity(src.len());
            let mut comorph = Vec::with_capacity(src.len());
            for x in 0..src.len() {
                let pname = src.poset().name(x);
                let Some(target) = rm.map.get(pname) else {
                    return err(&loc, format!("missing image of point '{pname}'"));
                };
                let y = match dst.poset().index_of_checked(target) {
                    Ok(y) => y,
                    Err(e) => return err(&loc, e),
                };
                map.push(y);
                let Some(cname) = rm.comorphism.get(pname) else {
                    return err(&loc, format!("missing comorphism at point '{pname}'"));
                };
                let Some(cm) = maps.get(cname) else {
                    return err(&loc, format!("unknown map '{cname}'"));
                };
                comorph.push(cm.clone());
            }
            match SpaceMorphism::new(src.clone(), dst.clone(), map, comorph) {
                Ok(m) => {
                    morphisms.insert(name.clone(), m);
                }
                Err(e) => return err(loc, e),
            }
        }
        Ok(Workspace {
            raw,
            p,
            omega_max_degree,
            algebras,
            maps,
            spaces,
            module_sheaves,
            algebra_sheaves,
            morphisms,
        })
    }

    /// Canonical serialization: sorted keys, two-space indentation.
    pub fn serialize(&self) -> String {
        to_canonical_json(&self.raw)
    }
}

fn pad_rows(rows: Vec<Vec<u64>>, expected_rows: usize) -> Vec<Vec<u64>> {
    // zero-dimensional fibers serialize as empty matrices
    if rows.is_empty() && expected_rows == 0 {
        return Vec::new();
    }
    rows
}

fn resolve_space(
    loc: &str,
    rs: &RawSpace,
    algebras: &BTreeMap<String, Algebra>,
    maps: &BTreeMap<String, AlgebraMap>,
) -> RResult<RingedPoset> {
    let mut hasse = Vec::new();
    for (lo, hi) in &rs.hasse {
        let Some(a) = rs.points.iter().position(|q| q == lo) else {
            return err(loc, format!("unknown point '{lo}' in hasse"));
        };
        let Some(b) = rs.points.iter().position(|q| q == hi) else {
            return err(loc, format!("unknown point '{hi}' in hasse"));
        };
        hasse.push((a, b));
    }
    let poset = match Poset::new(rs.points.clone(), hasse) {
        Ok(po) => po,
        Err(e) => return err(loc, e),
    };
    let mut stalks = Vec::with_capacity(poset.len());
    for x in 0..poset.len() {
        let pname = poset.name(x);
        let Some(aname) = rs.stalk.get(pname) else {
            return err(loc, format!("missing stalk at point '{pname}'"));
        };
        let Some(alg) = algebras.get(aname) else {
            return err(loc, format!("unknown algebra '{aname}' (dangling stalk)"));
        };
        stalks.push(alg.clone());
    }
    let mut res = BTreeMap::new();
    for &(a, b) in poset.hasse() {
        let key = format!("{}<{}", poset.name(a), poset.name(b));
        let Some(mname) = rs.res.get(&key) else {
            return err(loc, format!("missing restriction '{key}'"));
        };
        let Some(m) = maps.get(mname) else {
            return err(loc, format!("unknown map '{mname}'"));
        };
        res.insert((a, b), m.clone());
    }
    match RingedPoset::new(poset, stalks, res) {
        Ok(s) => Ok(s),
        Err(e) => err(loc, e),
    }
}

/// Canonical JSON: serde_json with sorted keys (BTreeMap-backed) and stable
/// pretty-printing.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable");
    out.push('\n');
    out
}

// ---------------------------------------------------------------------------
// Builders: turn computed objects back into raw form with deterministic names.
// ---------------------------------------------------------------------------

/// Collects algebras and maps under deterministic names while emitting
/// constructed spaces, sheaves and morphisms.
#[derive(Default)]
pub struct RawBuilder {
    pub raw: RawWorkspace,
    algebra_names: Vec<(Algebra, String)>,
    map_names: Vec<(AlgebraMap, String)>,
}

impl RawBuilder {
    pub fn new(p: u64, omega_max_degree: usize) -> Self {
        RawBuilder {
            raw: RawWorkspace {
                p,
                omega: Some(RawOmega { max_degree: omega_max_degree }),
                algebras: BTreeMap::new(),
                maps: BTreeMap::new(),
                spaces: BTreeMap::new(),
                module_sheaves: BTreeMap::new(),
                algebra_sheaves: BTreeMap::new(),
                morphisms: BTreeMap::new(),
            },
            algebra_names: Vec::new(),
            map_names: Vec::new(),
        }
    }

    pub fn algebra_name(&mut self, a: &Algebra) -> String {
        if let Some((_, n)) = self.algebra_names.iter().find(|(alg, _)| alg == a) {
            return n.clone();
        }
        let name = format!("alg{}", self.algebra_names.len());
        self.raw.algebras.insert(name.clone(), raw_algebra(a));
        self.algebra_names.push((a.clone(), name.clone()));
        name
    }

    pub fn map_name(&mut self, m: &AlgebraMap) -> String {
        if let Some((_, n)) = self.map_names.iter().find(|(mm, _)| mm == m) {
            return n.clone();
        }
        let src = self.algebra_name(m.src());
        let dst = self.algebra_name(m.dst());
        let name = format!("map{}", self.map_names.len());
        self.raw.maps.insert(
            name.clone(),
            RawMap { src, dst, mat: raw_matrix(m.matrix()) },
        );
        self.map_names.push((m.clone(), name.clone()));
        name
    }

    pub fn add_space(&mut self, name: &str, space: &RingedPoset) {
        let poset = space.poset();
        let mut stalk = BTreeMap::new();
        for x in 0..space.len() {
            let alg = self.algebra_name(space.stalk(x));
            stalk.insert(poset.name(x).to_string(), alg);
        }
        let mut res = BTreeMap::new();
        for (e, m) in space.hasse_res() {
            let key = format!("{}<{}", poset.name(e.0), poset.name(e.1));
            let mn = self.map_name(m);
            res.insert(key, mn);
        }
        self.raw.spaces.insert(
            name.to_string(),
            RawSpace {
                points: poset.names().to_vec(),
                hasse: poset
                    .hasse()
                    .iter()
                    .map(|&(a, b)| (poset.name(a).to_string(), poset.name(b).to_string()))
                    .collect(),
                stalk,
                res,
            },
        );
    }

    pub fn add_algebra_sheaf(&mut self, name: &str, space_name: &str, a: &QcohAlgebra) {
        let poset = a.base().poset();
        let mut fiber = BTreeMap::new();
        let mut structure = BTreeMap::new();
        for x in 0..a.base().len() {
            fiber.insert(poset.name(x).to_string(), self.algebra_name(a.fiber(x)));
            structure.insert(poset.name(x).to_string(), self.map_name(a.structure_map(x)));
        }
        let mut res = BTreeMap::new();
        for &(e0, e1) in poset.hasse() {
            let key = format!("{}<{}", poset.name(e0), poset.name(e1));
            res.insert(key, self.map_name(a.res(e0, e1)));
        }
        self.raw.algebra_sheaves.insert(
            name.to_string(),
            RawAlgebraSheaf { space: space_name.to_string(), fiber, res, structure },
        );
    }

    /// The source and target spaces must already have been added under the
    /// given names.
    pub fn add_morphism(&mut self, name: &str, m: &SpaceMorphism, src: &str, dst: &str) {
        let sposet = m.src().poset();
        let dposet = m.dst().poset();
        let mut map = BTreeMap::new();
        let mut comorphism = BTreeMap::new();
        for x in 0..m.src().len() {
            map.insert(
                sposet.name(x).to_string(),
                dposet.name(m.apply(x)).to_string(),
            );
            comorphism.insert(sposet.name(x).to_string(), self.map_name(m.comorphism(x)));
        }
        debug_assert!(self.raw.spaces.contains_key(src));
        debug_assert!(self.raw.spaces.contains_key(dst));
        self.raw.morphisms.insert(
            name.to_string(),
            RawMorphism { src: src.to_string(), dst: dst.to_string(), map, comorphism },
        );
    }
}

pub fn raw_algebra(a: &Algebra) -> RawAlgebra {
    let mut mul = Vec::with_capacity(a.dim());
    for i in 0..a.dim() {
        let mut row = Vec::with_capacity(a.dim());
        for j in 0..a.dim() {
            row.push(a.mul_coeffs(i, j).to_vec());
        }
        mul.push(row);
    }
    RawAlgebra { dim: a.dim(), one: a.one().to_vec(), mul }
}

pub fn raw_matrix(m: &Mat) -> Vec<Vec<u64>> {
    (0..m.rows()).map(|i| m.row(i)).collect()
}
