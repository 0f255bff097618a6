//! Command-line front end for the divided-power pre-Lie engine.

mod eval;
mod parser;
mod schema;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser as ClapParser, Subcommand};
use serde_json::json;

use gpl_core::braced::{verify_all_identities, BracedAlgebra};
use gpl_core::builtins::{associative_operad, dualize, primitive_cooperad};
use gpl_core::conv::ConvAlgebra;
use gpl_core::artin::ArtinAlgebra;
use gpl_core::gamma::{AlgebraSpec, AlgebraSpecFile, GammaAlgebra, GammaSampler};
use gpl_core::gauge;
use gpl_core::ring::Ring;

#[derive(ClapParser)]
#[command(name = "gpl", about = "exact deformation theory in divided-power pre-Lie algebras", version)]
struct Cli {
    /// Output format: text or json.
    #[arg(long, global = true, default_value = "text")]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the weighted-brace identity suite on randomized instances.
    VerifyIdentities {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 50)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate an expression over the algebra of a spec file.
    Eval {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        expr: String,
    },
    /// Invert a gauge element two ways and cross-check.
    GaugeInverse {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        expr: String,
    },
    /// Act on a Maurer-Cartan element by a gauge element.
    GaugeAct {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        gauge: String,
        #[arg(long)]
        mc: String,
    },
    /// Enumerate the Maurer-Cartan set over a finite field.
    McEnumerate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        artinian: Option<String>,
        #[arg(long, default_value_t = 1 << 20)]
        budget: u128,
    },
    /// Enumerate the Deligne groupoid over truncated local coefficients;
    /// with a morphism table, also report the induced functor.
    Deligne {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        artinian: String,
        #[arg(long, default_value_t = 1 << 20)]
        budget: u128,
        /// Generator-image table (JSON) into the target spec.
        #[arg(long, requires = "target_spec")]
        morphism: Option<PathBuf>,
        #[arg(long)]
        target_spec: Option<PathBuf>,
    },
    /// Convolution-algebra coherence checks (built-in or file data).
    ConvCheck {
        #[arg(long)]
        operad: Option<PathBuf>,
        #[arg(long)]
        cooperad: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        cap: usize,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 20)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Orbits of the Maurer-Cartan set of a convolution algebra.
    Pi0 {
        #[arg(long)]
        operad: Option<PathBuf>,
        #[arg(long)]
        cooperad: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        cap: usize,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1 << 20)]
        budget: u128,
        /// Record that the cooperad is asserted to be cofibrant as a
        /// symmetric sequence (a hypothesis the engine cannot verify).
        #[arg(long, default_value_t = false)]
        sigma_cofibrant_asserted: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, ok)) => {
            let out = if cli.format == "json" {
                serde_json::to_string_pretty(&report).unwrap() + "\n"
            } else {
                let mut s = String::new();
                print_text(&report, 0, &mut s);
                s
            };
            // write directly and ignore broken pipes from truncated readers
            use std::io::Write;
            let _ = std::io::stdout().write_all(out.as_bytes());
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn print_text(v: &serde_json::Value, indent: usize, out: &mut String) {
    use std::fmt::Write;
    let pad = "  ".repeat(indent);
    match v {
        serde_json::Value::Object(map) => {
            for (k, val) in map {
                match val {
                    serde_json::Value::Object(_) | serde_json::Value::Array(_) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        print_text(val, indent + 1, out);
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}{k}: {val}");
                    }
                }
            }
        }
        serde_json::Value::Array(items) => {
            for item in items {
                match item {
                    serde_json::Value::Object(_) | serde_json::Value::Array(_) => {
                        let _ = writeln!(out, "{pad}-");
                        print_text(item, indent + 1, out);
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}- {item}");
                    }
                }
            }
        }
        _ => {
            let _ = writeln!(out, "{pad}{v}");
        }
    }
}

fn load_spec(path: &PathBuf) -> anyhow::Result<GammaAlgebra> {
    let text = std::fs::read_to_string(path)?;
    let file: AlgebraSpecFile = serde_json::from_str(&text)?;
    Ok(GammaAlgebra::new(AlgebraSpec::from_file(&file)?))
}

fn run(cli: &Cli) -> anyhow::Result<(serde_json::Value, bool)> {
    match &cli.command {
        Command::VerifyIdentities { spec, trials, seed } => {
            let alg = load_spec(spec)?;
            let sampler = GammaSampler::default();
            let outcomes = verify_all_identities(&alg, &sampler, *trials, *seed)?;
            let ok = outcomes.iter().all(|o| o.passed());
            let report = json!({
                "command": "verify-identities",
                "spec": spec.to_string_lossy(),
                "trials": trials,
                "seed": seed,
                "identities": outcomes.iter().map(|o| json!({
                    "identity": o.identity,
                    "passed": o.passed(),
                    "counterexamples": o.failures,
                })).collect::<Vec<_>>(),
                "ok": ok,
            });
            Ok((report, ok))
        }
        Command::Eval { spec, expr } => {
            let alg = load_spec(spec)?;
            let parsed = parser::Parser::parse(expr)?;
            let value = eval::evaluate(&alg, &parsed)?;
            let text = eval::render_value(&alg, &value);
            let report = json!({
                "command": "eval",
                "expr": expr,
                "parsed": parser::print_expr(&parsed),
                "value": text,
                "ok": true,
            });
            Ok((report, true))
        }
        Command::GaugeInverse { spec, expr } => {
            let alg = load_spec(spec)?;
            let parsed = parser::Parser::parse(expr)?;
            let value = eval::evaluate(&alg, &parsed)?;
            let g = if value.unit.is_one() {
                gauge::gauge(&alg, value.body.clone())?
            } else if value.unit.is_zero() {
                gauge::gauge(&alg, value.body.clone())?
            } else {
                anyhow::bail!("gauge elements have unit coefficient one");
            };
            let tree_sum = gauge::gauge_inverse(&alg, &g)?;
            let solver = gauge::gauge_inverse_solver(&alg, &g)?;
            let agree = tree_sum.mu == solver.mu;
            let left = gauge::gauge_compose(&alg, &tree_sum, &g)?;
            let right = gauge::gauge_compose(&alg, &g, &tree_sum)?;
            let two_sided = alg.is_zero(&left.mu) && alg.is_zero(&right.mu);
            let report = json!({
                "command": "gauge-inverse",
                "expr": expr,
                "inverse": format!("1 + {}", alg.render(&tree_sum.mu)),
                "tree_sum_matches_solver": agree,
                "two_sided": two_sided,
                "ok": agree && two_sided,
            });
            Ok((report, agree && two_sided))
        }
        Command::GaugeAct { spec, gauge: gexpr, mc } => {
            let alg = load_spec(spec)?;
            let gv = eval::evaluate(&alg, &parser::Parser::parse(gexpr)?)?;
            if !gv.unit.is_one() {
                anyhow::bail!("the gauge expression must have unit coefficient one");
            }
            let g = gauge::gauge(&alg, gv.body)?;
            let av = eval::evaluate(&alg, &parser::Parser::parse(mc)?)?;
            if !av.unit.is_zero() {
                anyhow::bail!("the Maurer-Cartan expression must have no unit part");
            }
            let moved = gauge::gauge_act(&alg, &g, &av.body)?;
            let still_mc = gauge::is_mc(&alg, &moved)?;
            let report = json!({
                "command": "gauge-act",
                "gauge": gexpr,
                "mc": mc,
                "result": alg.render(&moved),
                "result_is_maurer_cartan": still_mc,
                "ok": still_mc,
            });
            Ok((report, still_mc))
        }
        Command::McEnumerate { spec, artinian, budget } => {
            let alg = load_spec(spec)?;
            let (mc, total): (Vec<String>, usize) = match artinian {
                None => {
                    let candidates = gauge::enumerate_component(&alg, 1, *budget)?;
                    let total = candidates.len();
                    let mut keep = Vec::new();
                    for c in candidates {
                        if gauge::is_mc(&alg, &c)? {
                            keep.push(alg.render(&c));
                        }
                    }
                    (keep, total)
                }
                Some(a) => {
                    let (base, n) = schema::parse_artinian(a)?;
                    if *alg.ring() != base {
                        anyhow::bail!(
                            "artinian base {base} must match the spec ring {}",
                            alg.ring()
                        );
                    }
                    let art = ArtinAlgebra::new(&alg, n)?;
                    let candidates = gauge::enumerate_component(&art, 1, *budget)?;
                    let total = candidates.len();
                    let mut keep = Vec::new();
                    for c in candidates {
                        if gauge::is_mc(&art, &c)? {
                            keep.push(art.render(&c));
                        }
                    }
                    (keep, total)
                }
            };
            let report = json!({
                "command": "mc-enumerate",
                "artinian": artinian,
                "candidates": total,
                "mc_count": mc.len(),
                "mc": mc,
                "ok": true,
            });
            Ok((report, true))
        }
        Command::Deligne { spec, artinian, budget, morphism, target_spec } => {
            let alg = load_spec(spec)?;
            let (base, n) = schema::parse_artinian(artinian)?;
            if *alg.ring() != base {
                anyhow::bail!("artinian base {base} must match the spec ring {}", alg.ring());
            }
            let art = ArtinAlgebra::new(&alg, n)?;
            let report_data = gauge::deligne_enumerate(&art, *budget)?;
            let json_report = report_data.to_json();
            let mut report = json!({
                "command": "deligne",
                "artinian": artinian,
                "mc_count": json_report.mc_count,
                "orbit_count": json_report.orbit_count,
                "orbits": json_report.orbits,
                "gauge_order": report_data.gauge_order,
                "ok": true,
            });
            if let (Some(mfile), Some(tfile)) = (morphism, target_spec) {
                let target = load_spec(tfile)?;
                let table: schema::MorphismFile =
                    serde_json::from_str(&std::fs::read_to_string(mfile)?)?;
                let images: Vec<(String, gpl_core::gamma::AlgebraElement)> = table
                    .images
                    .iter()
                    .map(|(name, text)| Ok((name.clone(), target.parse_element(text)?)))
                    .collect::<gpl_core::error::Result<Vec<_>>>()?;
                let borrowed: Vec<(&str, gpl_core::gamma::AlgebraElement)> =
                    images.iter().map(|(n, e)| (n.as_str(), e.clone())).collect();
                let phi = gpl_core::gamma::Morphism::new(&alg, &target, &borrowed)?;
                let target_art = ArtinAlgebra::new(&target, n)?;
                let target_report = gauge::deligne_enumerate(&target_art, *budget)?;
                // push each source orbit representative along phi (x) id
                let target_keys: std::collections::HashMap<String, usize> = target_report
                    .mc
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (target_art.render(e), i))
                    .collect();
                let mut orbit_map = Vec::new();
                let mut hit_orbits = std::collections::BTreeSet::new();
                for (i, m) in report_data.mc.iter().enumerate() {
                    let mapped = gpl_core::artin::ArtinElement {
                        coords: m
                            .coords
                            .iter()
                            .map(|c| phi.apply(&alg, &target, c))
                            .collect::<gpl_core::error::Result<Vec<_>>>()?,
                    };
                    let key = target_art.render(&mapped);
                    let target_idx = *target_keys
                        .get(&key)
                        .ok_or_else(|| anyhow::anyhow!("morphism image is not Maurer-Cartan"))?;
                    let target_orbit = target_report.orbit_of[target_idx];
                    hit_orbits.insert(target_orbit);
                    orbit_map.push(json!({
                        "source": i,
                        "source_orbit": report_data.orbit_of[i],
                        "target_orbit": target_orbit,
                    }));
                }
                // equivalence certificate: pi_0 bijection plus matching
                // automorphism orders along the functor
                let mut pi0_injective = true;
                let mut seen: std::collections::HashMap<usize, usize> =
                    std::collections::HashMap::new();
                let mut aut_match = true;
                for entry in &orbit_map {
                    let s = entry["source_orbit"].as_u64().unwrap() as usize;
                    let t = entry["target_orbit"].as_u64().unwrap() as usize;
                    match seen.entry(s) {
                        std::collections::hash_map::Entry::Vacant(v) => {
                            v.insert(t);
                            if report_data.orbits[s].aut_order != target_report.orbits[t].aut_order
                            {
                                aut_match = false;
                            }
                        }
                        std::collections::hash_map::Entry::Occupied(o) => {
                            if *o.get() != t {
                                pi0_injective = false;
                            }
                        }
                    }
                }
                let distinct: std::collections::BTreeSet<usize> =
                    seen.values().copied().collect();
                let pi0_bijective = pi0_injective
                    && distinct.len() == seen.len()
                    && hit_orbits.len() == target_report.orbits.len();
                let equivalent = pi0_bijective && aut_match;
                report["functor"] = json!({
                    "target_mc_count": target_report.mc.len(),
                    "target_orbit_count": target_report.orbits.len(),
                    "pi0_bijective": pi0_bijective,
                    "aut_orders_match": aut_match,
                    "equivalence_certified": equivalent,
                });
            }
            Ok((report, true))
        }
        Command::ConvCheck { operad, cooperad, cap, p, trials, seed } => {
            let ring = Ring::prime_field(*p);
            let op = match operad {
                Some(path) => {
                    let file: schema::OperadFile =
                        serde_json::from_str(&std::fs::read_to_string(path)?)?;
                    schema::operad_from_file(&file)?
                }
                None => associative_operad(&ring, *cap)?,
            };
            let coop = match cooperad {
                Some(path) => {
                    let file: schema::CooperadFile =
                        serde_json::from_str(&std::fs::read_to_string(path)?)?;
                    schema::cooperad_from_file(&file)?
                }
                None => dualize(&op)?,
            };
            let alg = ConvAlgebra::new(coop, op)?;
            let checks = conv_checks(&alg, *trials, *seed)?;
            let ok = checks["ok"].as_bool().unwrap_or(false);
            Ok((checks, ok))
        }
        Command::Pi0 { operad, cooperad, cap, p, budget, sigma_cofibrant_asserted } => {
            let ring = Ring::prime_field(*p);
            let op = match operad {
                Some(path) => {
                    let file: schema::OperadFile =
                        serde_json::from_str(&std::fs::read_to_string(path)?)?;
                    schema::operad_from_file(&file)?
                }
                None => associative_operad(&ring, *cap)?,
            };
            let coop = match cooperad {
                Some(path) => {
                    let file: schema::CooperadFile =
                        serde_json::from_str(&std::fs::read_to_string(path)?)?;
                    schema::cooperad_from_file(&file)?
                }
                None => primitive_cooperad(&ring, *cap, &[(2, &[("c2", -1)])], &[])?,
            };
            let alg = ConvAlgebra::new(coop, op)?;
            let report_data = gauge::deligne_enumerate(&alg, *budget)?;
            let json_report = report_data.to_json();
            let report = json!({
                "command": "pi0",
                "mc_count": json_report.mc_count,
                "orbit_count": json_report.orbit_count,
                "orbits": json_report.orbits,
                "gauge_order": report_data.gauge_order,
                "sigma_cofibrant_asserted": sigma_cofibrant_asserted,
                "grading_convention": "cohomological",
                "ok": true,
            });
            Ok((report, true))
        }
    }
}

fn conv_checks(alg: &ConvAlgebra, trials: u32, seed: u64) -> anyhow::Result<serde_json::Value> {
    use gpl_core::ring::Scalar;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let basis0 = alg.component_basis(0).unwrap_or_default();
    let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
        let mut out = alg.zero();
        if basis0.is_empty() {
            return out;
        }
        for _ in 0..2 {
            let b = &basis0[rng.gen_range(0..basis0.len())];
            let c = Scalar::from_int(alg.ring(), rng.gen_range(-2i64..=2));
            out = alg.add(&out, &alg.scale(&c, b).unwrap()).unwrap();
        }
        out
    };
    let mut one_input_agree = true;
    let mut circ_agree = true;
    for _ in 0..trials {
        let f = sample(&mut rng);
        let g = sample(&mut rng);
        for k in 0..=4u32 {
            let formula = alg.brace(&f, &[(g.clone(), k)])?;
            let composite = alg.brace_one_input(&f, &g, k)?;
            if alg.render(&formula) != alg.render(&composite) {
                one_input_agree = false;
            }
        }
        let gauge_g = gauge::gauge(alg, g.clone())?;
        let series = alg.add(&gauge::circ_body(alg, &f, &gauge_g)?, &g)?;
        let direct = alg.circ_full(&f, &g)?;
        if alg.render(&series) != alg.render(&direct) {
            circ_agree = false;
        }
    }
    let ok = one_input_agree && circ_agree;
    Ok(json!({
        "command": "conv-check",
        "trials": trials,
        "seed": seed,
        "one_input_composite_agrees": one_input_agree,
        "circular_product_agrees": circ_agree,
        "grading_convention": "cohomological",
        "ok": ok,
    }))
}
