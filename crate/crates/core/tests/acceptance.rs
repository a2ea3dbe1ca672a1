//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use omt_core::blocks::{BlockBuilder, SetOptions};
use omt_core::classify::classify_model;
use omt_core::io::lp::{parse_lp, write_lp};
use omt_core::io::owl::{normalize_whitespace, write_owl, OntologyDescriptor};
use omt_core::model::{VarRef, Variable};
use omt_core::omt::registry::schema;
use omt_core::omt::session::read_script;
use omt_core::omt::tree::CITED_NODES;
use omt_core::omt::{OmtTree, Session};
use omt_core::oracle::{brute_force_optimum, count_binary_solutions, EnumerationDomain};
use omt_core::rational::int;
use omt_core::suite::{run_suite, SuiteConfig};
use omt_core::TagName;
use rand::rngs::StdRng;
use rand::SeedableRng;

type Outcome = Result<String, String>;

fn encoding_suite() -> Outcome {
    let start = Instant::now();
    let report = run_suite(&SuiteConfig { instances: 5, ..SuiteConfig::default() });
    let elapsed = start.elapsed();
    let detail = format!("{}/{} instances equivalent in {:.1}s", report.passed(), report.cases.len(), elapsed.as_secs_f64());
    if !report.all_equivalent() {
        let first = report.cases.iter().find(|c| !c.passed()).unwrap();
        return Err(format!("{detail}; first failure {} n={}: {:?}", first.builder, first.binaries, first.counterexamples.first()));
    }
    if elapsed >= Duration::from_secs(30) {
        return Err(format!("{detail}; over the 30s budget"));
    }
    Ok(detail)
}

fn set_counts() -> Outcome {
    for n in 1..=10usize {
        let vars: Vec<VarRef> = (1..=n).map(|i| VarRef::indexed("x", &[i as u64])).collect();
        let b = BlockBuilder::with_variables(vars.iter().map(|v| Variable::binary(&v.flat())));
        let got = (
            count_binary_solutions(&vars, &b.set_covering("c", &vars, SetOptions::default()).unwrap().constraints).unwrap(),
            count_binary_solutions(&vars, &b.set_partitioning("p", &vars, SetOptions::default()).unwrap().constraints).unwrap(),
            count_binary_solutions(&vars, &b.set_packing("k", &vars).unwrap().constraints).unwrap(),
        );
        let want = ((1u64 << n) - 1, n as u64, n as u64 + 1);
        if got != want {
            return Err(format!("n={n}: got {got:?}, want {want:?}"));
        }
    }
    Ok("n = 1..10 exact".into())
}

fn corpus() -> Outcome {
    let cases: [(&str, &[u32]); 4] = [
        ("chemical.lp", &[11, 3, 9, 14, 7]),
        ("supply_chain.lp", &[12, 13, 2, 8, 3, 9]),
        ("timetabling.lp", &[17, 11, 24]),
        ("vrp.lp", &[17, 19, 2, 11]),
    ];
    for (file, want) in cases {
        let m = parse_lp(&common::fixture(file)).map_err(|e| format!("{file}: {e}"))?;
        let got = classify_model(&m).map_err(|e| format!("{file}: {e}"))?.node_ids();
        let want: BTreeSet<u32> = want.iter().copied().collect();
        if got != want {
            return Err(format!("{file}: got {got:?}, want {want:?}"));
        }
    }
    Ok("4 models match".into())
}

fn lp_round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    for i in 0..100 {
        let m = common::random_model(&mut rng, &format!("m{i}"));
        let text = write_lp(&m);
        let back = parse_lp(&text).map_err(|e| format!("model {i}: {e}"))?;
        if !back.structurally_eq(&m) {
            return Err(format!("model {i}: structure differs"));
        }
        if write_lp(&back) != text {
            return Err(format!("model {i}: text differs"));
        }
    }
    Ok("100 models".into())
}

fn owl() -> Outcome {
    let doc = normalize_whitespace(&write_owl(&OntologyDescriptor::default()).map_err(|e| e.to_string())?);
    let fragments = [
        r##"<SubClassOf><Class IRI="#SetCovering"/><Class IRI="#Constraint"/></SubClassOf>"##,
        r##"<SubClassOf><Class IRI="#Sense"/><ObjectSomeValuesFrom><ObjectProperty IRI="#part_of"/><Class IRI="#Constraint"/></ObjectSomeValuesFrom></SubClassOf>"##,
    ];
    for f in fragments {
        if !doc.contains(f) {
            return Err(format!("missing {f}"));
        }
    }
    Ok("both fragments present".into())
}

fn tree_audit() -> Outcome {
    let t = OmtTree::embedded();
    for (id, tag, keyword) in CITED_NODES {
        let n = t.node(id).ok_or(format!("node {id} missing"))?;
        if n.tag != Some(tag) || !n.label.to_lowercase().contains(keyword) {
            return Err(format!("node {id} is not {tag}"));
        }
    }
    for &tag in TagName::ALL {
        let count = t.nodes().filter(|n| n.is_leaf() && n.tag == Some(tag)).count();
        if count != 1 {
            return Err(format!("{tag} has {count} leaves"));
        }
    }
    for n in t.nodes().filter(|n| n.is_leaf()) {
        let b = n.builder_ref.as_ref().ok_or(format!("leaf {} has no builder", n.id))?;
        if schema(&b.name, b.preset.as_deref()).as_ref() != Some(&b.params) {
            return Err(format!("leaf {}: builder {} not registered", n.id, b.name));
        }
    }
    let script = read_script(&common::fixture("chemical_script.json")).map_err(|e| e.to_string())?;
    let s = Session::replay(Arc::new(t), &script).map_err(|e| e.to_string())?;
    let m = s.emit_model().map_err(|e| e.to_string())?;
    let got = classify_model(&m).map_err(|e| e.to_string())?.node_ids();
    if got != BTreeSet::from([11, 3, 9, 14, 7]) {
        return Err(format!("chemical replay classified to {got:?}"));
    }
    Ok("12 cited nodes, 29 tags, all builders, chemical replay".into())
}

fn knapsack() -> Outcome {
    let m = parse_lp(&common::fixture("knapsack.lp")).map_err(|e| e.to_string())?;
    let best = brute_force_optimum(&m, None).map_err(|e| e.to_string())?.ok_or("infeasible")?;
    if best.value != int(7) {
        return Err(format!("optimum {}", best.value));
    }
    let points = EnumerationDomain::for_model(&m, None).map_err(|e| e.to_string())?.size();
    Ok(format!("optimum 7 at {} over {points} assignments", best.assignment))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("encoding equivalence", encoding_suite),
        ("set cardinalities", set_counts),
        ("corpus node ids", corpus),
        ("LP round-trip", lp_round_trip),
        ("OWL fragments", owl),
        ("tree audit", tree_audit),
        ("knapsack oracle", knapsack),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({detail})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
