//! Deterministic command-line surface: parse a workspace JSON document, run
//! checks and constructions, emit human and machine reports.
//!
//! Exit codes: 0 when the property holds / the suite passes, 1 when refuted
//! (with a witness), 2 on input or precondition errors.

use clap::{Parser, Subcommand, ValueEnum};
use finspace::algebra::OmegaTower;
use finspace::etale::{galois_axioms_report, is_etale_cover, trivialize, verify_certificate};
use finspace::points::{geometric_points, schematic_points};
use finspace::pwconn::{pw_space, wc_components};
use finspace::rspace::{
    cylinder, fiber_product, is_affine, is_affine_morphism, is_finite_space, is_flat_immersion,
    is_qc_isomorphism, is_quasi_coherent, is_schematic_morphism, is_schematic_space, relspec,
    stein_factorization,
};
use finspace::workspace::{
    raw_matrix, to_canonical_json, RawBuilder, Workspace, DEFAULT_OMEGA_DEGREE,
};
use serde_json::json;
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "finspace", version, about = "Exact checks and constructions for schematic finite spaces over F_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a structural property of a named object; exit 0/1/2.
    Check {
        /// Workspace JSON file, or "-" for stdin
        file: String,
        /// Name of the space / sheaf / morphism to check
        object: String,
        property: Property,
        /// Force the exhaustive enumeration oracles where they exist
        #[arg(long)]
        oracle: bool,
        /// Machine-readable JSON output
        #[arg(long)]
        json: bool,
    },
    /// Run a construction and print the result as canonical JSON.
    Construct {
        /// Workspace JSON file, or "-" for stdin
        file: String,
        verb: Verb,
        /// Object names the verb applies to
        args: Vec<String>,
        /// Maximal degree of the truncated algebraic-closure tower
        #[arg(long)]
        omega_degree: Option<usize>,
    },
    /// Verify the Galois-category axioms for covers of a connected space.
    Galois {
        /// Workspace JSON file, or "-" for stdin
        file: String,
        /// Name of the base space
        space: String,
        /// Comma-separated algebra-sheaf names used as generators
        #[arg(long, value_delimiter = ',')]
        generators: Vec<String>,
        /// Index of the geometric point the fiber functor is taken at
        #[arg(long, default_value = "0")]
        point: usize,
        /// Total-degree bound for the family closure
        #[arg(long, default_value = "8")]
        max_degree: usize,
        /// Maximal degree of the truncated algebraic-closure tower
        #[arg(long)]
        omega_degree: Option<usize>,
        /// Machine-readable JSON output
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Finite,
    Qcoh,
    Schematic,
    Affine,
    Qciso,
    EtaleCover,
    FlatImmersion,
}

#[derive(Clone, Copy, ValueEnum)]
enum Verb {
    Pw,
    Components,
    Points,
    GeometricPoints,
    FiberProduct,
    Stein,
    Relspec,
    Cylinder,
    Trivialize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_workspace(file: &str) -> Result<Workspace, String> {
    let text = if file == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|e| e.to_string())?;
        buf
    } else {
        std::fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?
    };
    Workspace::parse(&text).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Check { file, object, property, oracle, json } => {
            let ws = read_workspace(&file)?;
            check(&ws, &object, property, oracle, json)
        }
        Command::Construct { file, verb, args, omega_degree } => {
            let ws = read_workspace(&file)?;
            let omega = omega_degree.unwrap_or(ws.omega_max_degree);
            construct(&ws, verb, &args, omega)
        }
        Command::Galois { file, space, generators, point, max_degree, omega_degree, json } => {
            let ws = read_workspace(&file)?;
            let omega = omega_degree.unwrap_or(ws.omega_max_degree.max(DEFAULT_OMEGA_DEGREE));
            galois(&ws, &space, &generators, point, max_degree, omega, json)
        }
    }
}

fn verdict(json: bool, object: &str, property: &str, holds: bool, detail: &str) -> ExitCode {
    if json {
        let doc = json!({
            "object": object,
            "property": property,
            "holds": holds,
            "detail": detail,
        });
        print!("{}", to_canonical_json(&doc));
    } else if holds {
        println!("{property} holds for {object}");
    } else {
        println!("{property} refuted for {object}: {detail}");
    }
    if holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn check(
    ws: &Workspace,
    object: &str,
    property: Property,
    oracle: bool,
    json: bool,
) -> Result<ExitCode, String> {
    match property {
        Property::Finite => {
            let space = ws.spaces.get(object).ok_or(format!("unknown space '{object}'"))?;
            let holds = if oracle {
                let mut ok = true;
                for (_, m) in space.hasse_res() {
                    ok &= finspace::algebra::oracle::is_flat_by_ideals(m)
                        .map_err(|e| e.to_string())?;
                }
                ok
            } else {
                is_finite_space(space)
            };
            Ok(verdict(json, object, "finite", holds, "a restriction is not flat"))
        }
        Property::Qcoh => {
            if let Some(m) = ws.module_sheaves.get(object) {
                let holds = is_quasi_coherent(m);
                return Ok(verdict(json, object, "qcoh", holds, "canonical map not bijective"));
            }
            let a = ws
                .algebra_sheaves
                .get(object)
                .ok_or(format!("unknown sheaf '{object}'"))?;
            let holds = a.is_quasi_coherent();
            Ok(verdict(json, object, "qcoh", holds, "canonical map not bijective"))
        }
        Property::Schematic => {
            if let Some(space) = ws.spaces.get(object) {
                if oracle {
                    oracle_cross_checks(space)?;
                }
                let check = is_schematic_space(space).map_err(|e| e.to_string())?;
                let detail = check
                    .witness
                    .as_ref()
                    .map(|w| {
                        format!(
                            "witness (x={}, edge {}<{}, i={})",
                            w.fixed, w.edge.0, w.edge.1, w.degree
                        )
                    })
                    .unwrap_or_default();
                return Ok(verdict(json, object, "schematic", check.holds, &detail));
            }
            let f = ws.morphisms.get(object).ok_or(format!("unknown object '{object}'"))?;
            let check = is_schematic_morphism(f).map_err(|e| e.to_string())?;
            let detail = check
                .witness
                .as_ref()
                .map(|w| {
                    format!(
                        "witness (fixed={}, edge {}<{}, i={})",
                        w.fixed, w.edge.0, w.edge.1, w.degree
                    )
                })
                .unwrap_or_default();
            Ok(verdict(json, object, "schematic", check.holds, &detail))
        }
        Property::Affine => {
            if let Some(space) = ws.spaces.get(object) {
                let check = is_affine(space).map_err(|e| e.to_string())?;
                return Ok(verdict(json, object, "affine", check.holds, &check.reason));
            }
            let f = ws.morphisms.get(object).ok_or(format!("unknown object '{object}'"))?;
            let check = is_affine_morphism(f).map_err(|e| e.to_string())?;
            Ok(verdict(json, object, "affine", check.holds, &check.reason))
        }
        Property::Qciso => {
            let f = ws.morphisms.get(object).ok_or(format!("unknown morphism '{object}'"))?;
            let holds = is_qc_isomorphism(f).map_err(|e| e.to_string())?;
            Ok(verdict(json, object, "qciso", holds, "not affine or sections differ"))
        }
        Property::EtaleCover => {
            let a = ws
                .algebra_sheaves
                .get(object)
                .ok_or(format!("unknown algebra sheaf '{object}'"))?;
            let check = is_etale_cover(a.base(), a).map_err(|e| e.to_string())?;
            Ok(verdict(json, object, "etale-cover", check.holds, &check.diagnosis))
        }
        Property::FlatImmersion => {
            let f = ws.morphisms.get(object).ok_or(format!("unknown morphism '{object}'"))?;
            let holds = is_flat_immersion(f).map_err(|e| e.to_string())?;
            Ok(verdict(
                json,
                object,
                "flat-immersion",
                holds,
                "cylinder is not schematic (criterion reported as experimental)",
            ))
        }
    }
}

/// --oracle: cross-check the splitting idempotents and the Frobenius-kernel
/// nilradical against exhaustive enumeration on every stalk.
fn oracle_cross_checks(space: &finspace::rspace::RingedPoset) -> Result<(), String> {
    use finspace::algebra::oracle;
    for x in 0..space.len() {
        let s = space.stalk(x);
        if s.is_zero_ring() {
            continue;
        }
        let fast = finspace::algebra::idempotents(s).map_err(|e| e.to_string())?;
        let slow = oracle::idempotents_by_enumeration(s).map_err(|e| e.to_string())?;
        if fast != slow {
            return Err(format!("idempotent oracle disagrees at {}", space.poset().name(x)));
        }
        let nil = finspace::algebra::nilradical(s);
        let nil_slow = oracle::nilradical_by_enumeration(s).map_err(|e| e.to_string())?;
        if nil != nil_slow {
            return Err(format!("nilradical oracle disagrees at {}", space.poset().name(x)));
        }
    }
    Ok(())
}

fn construct(ws: &Workspace, verb: Verb, args: &[String], omega: usize) -> Result<ExitCode, String> {
    let need = |n: usize| -> Result<(), String> {
        if args.len() != n {
            return Err(format!("verb expects {n} argument(s)"));
        }
        Ok(())
    };
    match verb {
        Verb::Pw => {
            need(1)?;
            let space = ws.spaces.get(&args[0]).ok_or(format!("unknown space '{}'", args[0]))?;
            let pw = pw_space(space).map_err(|e| e.to_string())?;
            let mut b = RawBuilder::new(ws.p, omega);
            b.add_space(&args[0], space);
            b.add_space(&format!("pw({})", args[0]), &pw.space);
            b.add_morphism("pi", &pw.projection, &format!("pw({})", args[0]), &args[0]);
            print!("{}", to_canonical_json(&b.raw));
            Ok(ExitCode::SUCCESS)
        }
        Verb::Components => {
            need(1)?;
            let space = ws.spaces.get(&args[0]).ok_or(format!("unknown space '{}'", args[0]))?;
            let comps = wc_components(space).map_err(|e| e.to_string())?;
            let mut b = RawBuilder::new(ws.p, omega);
            b.add_space(&args[0], space);
            for (i, (comp, inc)) in comps.iter().enumerate() {
                b.add_space(&format!("comp{i}"), comp);
                b.add_morphism(&format!("inc{i}"), inc, &format!("comp{i}"), &args[0]);
            }
            print!("{}", to_canonical_json(&b.raw));
            Ok(ExitCode::SUCCESS)
        }
        Verb::Points => {
            need(1)?;
            let space = ws.spaces.get(&args[0]).ok_or(format!("unknown space '{}'", args[0]))?;
            let set = schematic_points(space).map_err(|e| e.to_string())?;
            let mut points = Vec::new();
            for (i, c) in set.classes.iter().enumerate() {
                let (x, pi) = c.max_rep;
                let (rep, _) = finspace::points::residue_field_of_point(space, &set, i)
                    .map_err(|e| e.to_string())?;
                points.push(json!({
                    "max_rep": {
                        "point": space.poset().name(x),
                        "prime": set.primes[x][pi].basis(),
                    },
                    "members": c.members.iter().map(|&(y, qi)| {
                        json!({"point": space.poset().name(y), "prime_index": qi})
                    }).collect::<Vec<_>>(),
                    "residue_degree": rep.degree(),
                }));
            }
            let doc = json!({"space": args[0], "schematic_points": points});
            print!("{}", to_canonical_json(&doc));
            Ok(ExitCode::SUCCESS)
        }
        Verb::GeometricPoints => {
            need(1)?;
            let space = ws.spaces.get(&args[0]).ok_or(format!("unknown space '{}'", args[0]))?;
            let set = schematic_points(space).map_err(|e| e.to_string())?;
            let tower = OmegaTower::new(ws.p, omega);
            let gps = geometric_points(space, &set, &tower).map_err(|e| e.to_string())?;
            let list: Vec<_> = gps
                .iter()
                .map(|gp| {
                    let (x, pi) = set.classes[gp.class].max_rep;
                    json!({
                        "schematic_point": gp.class,
                        "max_rep": {
                            "point": space.poset().name(x),
                            "prime": set.primes[x][pi].basis(),
                        },
                        "residue_degree": gp.residue.degree(),
                        "embedding": raw_matrix(&gp.embedding.matrix),
                    })
                })
                .collect();
            let doc = json!({"space": args[0], "geometric_points": list});
            print!("{}", to_canonical_json(&doc));
            Ok(ExitCode::SUCCESS)
        }
        Verb::FiberProduct => {
            need(2)?;
            let f = ws.morphisms.get(&args[0]).ok_or(format!("unknown morphism '{}'", args[0]))?;
            let g = ws.morphisms.get(&args[1]).ok_or(format!("unknown morphism '{}'", args[1]))?;
            let fp = fiber_product(f, g).map_err(|e| e.to_string())?;
            let mut b = RawBuilder::new(ws.p, omega);
            b.add_space("fiber_product", &fp.space);
            b.add_space("left", f.src());
            b.add_space("right", g.src());
            b.add_morphism("pr1", &fp.to_left, "fiber_product", "left");
            b.add_morphism("pr2", &fp.to_right, "fiber_product", "right");
            print!("{}", to_canonical_json(&b.raw));
            Ok(ExitCode::SUCCESS)
        }
        Verb::Stein => {
            need(1)?;
            let f = ws.morphisms.get(&args[0]).ok_or(format!("unknown morphism '{}'", args[0]))?;
            let st = stein_factorization(f).map_err(|e| e.to_string())?;
            let mut b = RawBuilder::new(ws.p, omega);
            b.add_space("source", f.src());
            b.add_space("target", f.dst());
            b.add_space("stein_mid", &st.mid);
            b.add_morphism("f_prime", &st.to_mid, "source", "stein_mid");
            b.add_morphism("rho", &st.from_mid, "stein_mid", "target");
            print!("{}", to_canonical_json(&b.raw));
            Ok(ExitCode::SUCCESS)
        }
        Verb::Relspec => {
            need(1)?;
            let a = ws
                .algebra_sheaves
                .get(&args[0])
                .ok_or(format!("unknown algebra sheaf '{}'", args[0]))?;
            let (total, morphism) = relspec(a.base(), a).map_err(|e| e.to_string())?;
            let mut b = RawBuilder::new(ws.p, omega);
            b.add_space("base", a.base());
            b.add_space(&format!("relspec({})", args[0]), &total);
            b.add_morphism("structure_morphism", &morphism, &format!("relspec({})", args[0]), "base");
            print!("{}", to_canonical_json(&b.raw));
            Ok(ExitCode::SUCCESS)
        }
        Verb::Cylinder => {
            need(1)?;
            let f = ws.morphisms.get(&args[0]).ok_or(format!("unknown morphism '{}'", args[0]))?;
            let cyl = cylinder(f);
            let mut b = RawBuilder::new(ws.p, omega);
            b.add_space(&format!("cyl({})", args[0]), &cyl);
            print!("{}", to_canonical_json(&b.raw));
            Ok(ExitCode::SUCCESS)
        }
        Verb::Trivialize => {
            need(1)?;
            let a = ws
                .algebra_sheaves
                .get(&args[0])
                .ok_or(format!("unknown algebra sheaf '{}'", args[0]))?;
            let cert = trivialize(a.base(), a).map_err(|e| e.to_string())?;
            let verified =
                verify_certificate(a.base(), a, &cert).map_err(|e| e.to_string())?;
            let mut b = RawBuilder::new(ws.p, omega);
            b.add_space("base", a.base());
            b.add_algebra_sheaf("trivializer", "base", &cert.cover);
            let mut projections = serde_json::Map::new();
            for x in 0..a.base().len() {
                let mats: Vec<_> = cert.projections[x]
                    .iter()
                    .map(|m| json!(raw_matrix(m.matrix())))
                    .collect();
                projections.insert(a.base().poset().name(x).to_string(), json!(mats));
            }
            let doc = json!({
                "certificate": {
                    "degree": cert.degree,
                    "projections": projections,
                    "verified": verified,
                },
                "workspace": serde_json::to_value(&b.raw).map_err(|e| e.to_string())?,
            });
            print!("{}", to_canonical_json(&doc));
            if verified {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn galois(
    ws: &Workspace,
    space_name: &str,
    generator_names: &[String],
    point: usize,
    max_degree: usize,
    omega: usize,
    json_out: bool,
) -> Result<ExitCode, String> {
    let space = ws
        .spaces
        .get(space_name)
        .ok_or(format!("unknown space '{space_name}'"))?;
    let mut generators = Vec::new();
    for name in generator_names {
        let a = ws
            .algebra_sheaves
            .get(name)
            .ok_or(format!("unknown algebra sheaf '{name}'"))?;
        generators.push((name.clone(), a.clone()));
    }
    let tower = OmegaTower::new(ws.p, omega);
    let report = galois_axioms_report(space, &generators, point, max_degree, &tower)
        .map_err(|e| format!("space not usable: {e}"))?;
    let counts = report.counts_by_axiom();
    if json_out {
        let doc = json!({
            "space": space_name,
            "passed": report.passed(),
            "omega_degree": report.omega_degree,
            "family": report.family.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
            "instance_counts": counts,
            "instances": report.instances.iter().map(|i| json!({
                "axiom": i.axiom, "description": i.description, "pass": i.pass,
            })).collect::<Vec<_>>(),
            "skipped": report.skipped,
            "fib": report.fib_summary.iter().map(|f| json!({
                "name": f.name, "size": f.size,
                "frobenius": f.frobenius, "cycles": f.cycle_lengths,
            })).collect::<Vec<_>>(),
            "aut_orders": report.aut_orders,
        });
        print!("{}", to_canonical_json(&doc));
    } else {
        println!(
            "galois suite on {space_name}: family of {} covers, fibers in degree {}",
            report.family.len(),
            report.omega_degree
        );
        for (axiom, count) in counts.iter().enumerate() {
            let failing = report
                .instances
                .iter()
                .filter(|i| i.axiom == axiom as u8 + 1 && !i.pass)
                .count();
            println!(
                "axiom {}: {count} instances, {}",
                axiom + 1,
                if failing == 0 { "all pass".to_string() } else { format!("{failing} FAIL") }
            );
        }
        println!("fiber / monodromy table:");
        for f in &report.fib_summary {
            println!("  {}: {} elements, frobenius cycles {:?}", f.name, f.size, f.cycle_lengths);
        }
        println!("automorphism group orders:");
        for (name, order) in &report.aut_orders {
            println!("  {name}: {order}");
        }
        if !report.skipped.is_empty() {
            println!("skipped ({} notes)", report.skipped.len());
        }
        println!("{}", if report.passed() { "PASS" } else { "FAIL" });
    }
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
