//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serde_json::Value;
use stringar::artheory::{knit, matches_string_module, tau_oracle, tau_orbit, ArContext};
use stringar::configurations::{audit_theorems, detect_local_patterns, find_tau_arrows_among, module_of, PatternId};
use stringar::families::{make_family, witness, Family, FamilySpec};
use stringar::modules::{is_isomorphic, realize, standard_word, StandardKind};
use stringar::radical::{cg_quiver, iota, theta, CgSide, DegreeSide, DegreeValue, Depth, Radical};
use stringar::strings::enumerate_strings;
use stringar::{parse_presentation, AlgebraPresentation, Error, Rational};

const EX3: &str = include_str!("data/ex3.alg");
const LOOP_IN: &str = include_str!("data/loop_in.alg");

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn fam(f: Family, m: usize, n: usize) -> Result<FamilySpec, String> {
    make_family(f, m, n).map_err(|e| e.to_string())
}

fn test_algebras() -> Result<Vec<AlgebraPresentation>, String> {
    let mut out = Vec::new();
    for (f, m, n) in [(Family::W, 0, 3), (Family::U, 2, 2), (Family::U, 2, 3), (Family::U, 3, 2), (Family::V, 2, 1)] {
        out.push(fam(f, m, n)?.presentation);
    }
    out.push(parse_presentation(LOOP_IN).map_err(|e| e.to_string())?);
    Ok(out)
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    ensure(start.elapsed() < limit, || format!("{what} took {:?}, limit {:?}", start.elapsed(), limit))
}

fn c1_w3_witness() -> Outcome {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_stringar"))
        .args(["witness", "--family", "W", "--n", "3", "--json"])
        .output()
        .map_err(|e| e.to_string())?;
    within(t, Duration::from_secs(10), "witness")?;
    ensure(out.status.success(), || format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)))?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(v["chain"].as_array().map(Vec::len) == Some(3), || "chain is not three morphisms".into())?;
    ensure(v["compositeDepth"] == 6, || format!("composite depth {}", v["compositeDepth"]))?;
    let suffix = v["suffixDepth"].as_u64().unwrap_or(0);
    ensure(suffix >= 3, || format!("depth(h3 h2) = {suffix}"))?;
    let modules = &v["modules"];
    Ok(format!("h3h2h1 in R^6 \\ R^7 ({} -> {}), depth(h3h2) = {suffix}", modules[0], modules[3]))
}

fn audited() -> Result<Vec<stringar::configurations::AuditReport>, String> {
    let mut out = Vec::new();
    for (m, n) in [(0, 3), (2, 2), (2, 3), (3, 2)] {
        let spec = fam(if m == 0 { Family::W } else { Family::U }, m, n)?;
        out.push(audit_theorems::<Rational>(&spec.presentation, 32, 7).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn c2_main_theorem(reports: &[stringar::configurations::AuditReport]) -> Outcome {
    let mut triples = 0;
    for r in reports {
        let a = r.audit("A").ok_or("audit A missing")?;
        ensure(a.passed, || format!("{}: {}", r.algebra, a.details["counterexamples"]))?;
        triples += r.triples.len();
    }
    Ok(format!("{triples} triples x 32 samples, no counterexample"))
}

fn c3_corollary(reports: &[stringar::configurations::AuditReport]) -> Outcome {
    let mut deep = 0;
    for r in reports {
        let b = r.audit("B").ok_or("audit B missing")?;
        ensure(b.passed, || format!("{}: {}", r.algebra, b.details["violations"]))?;
        deep += r.triples.iter().flat_map(|t| &t.samples).filter(|s| s.composite.at_least(4)).count();
    }
    Ok(format!("{deep} sampled composites of depth >= 4, all of depth >= 6"))
}

fn c4_degree_formula() -> Outcome {
    let mut seen = Vec::new();
    for (m, n) in [(2, 2), (2, 3), (3, 2)] {
        let t = Instant::now();
        let p = fam(Family::U, m, n)?.presentation;
        let g = knit::<Rational>(&p).map_err(|e| e.to_string())?;
        let rad = Radical::new(&g);
        let am = p.quiver().vertex(&format!("a{m}")).map_err(|e| e.to_string())?;
        let want = m + n - 1;
        for (arrow, side, cg_side) in [
            (iota(&g, am), DegreeSide::Right, CgSide::Starting),
            (theta(&g, am), DegreeSide::Left, CgSide::Ending),
        ] {
            let a = &g.arrows()[arrow.map_err(|e| e.to_string())?];
            let d = rad.degree(a.source, a.target, &a.map, side, None).map_err(|e| e.to_string())?;
            let cg = cg_quiver(&p, am, cg_side).map_err(|e| e.to_string())?;
            ensure(d.value == DegreeValue::Finite(want), || format!("({m},{n}) {side:?}: radical search gives {:?}", d.value))?;
            ensure(cg.degree() == want, || format!("({m},{n}) {cg_side:?}: card - 1 = {}", cg.degree()))?;
        }
        within(t, Duration::from_secs(60), "degree")?;
        seen.push(format!("({m},{n})={want}"));
    }
    Ok(format!("d_r = d_l = card - 1 at {}", seen.join(" ")))
}

fn c5_kpar() -> Outcome {
    let mut seen = Vec::new();
    for (m, n, want) in [(2, 2, 6), (2, 3, 7), (3, 2, 8)] {
        let w = witness::<Rational>(&fam(Family::U, m, n)?).map_err(|e| e.to_string())?;
        ensure(w.composite_depth == Depth::Layer(want), || format!("U({m},{}) composite depth {}", n - 1, w.composite_depth))?;
        ensure(w.chain.len() == n, || format!("U({m},{}) has {} morphisms", n - 1, w.chain.len()))?;
        if n == 3 {
            let (a, b) = (w.prefix_depth, w.suffix_depth);
            ensure(!a.at_least(3) && !b.at_least(3), || format!("U(2,2) pair depths {a}, {b}"))?;
        }
        seen.push(format!("{}:{want}", w.spec.presentation.name()));
    }
    Ok(seen.join(" "))
}

fn c6_kimpar() -> Outcome {
    let w = witness::<Rational>(&fam(Family::V, 2, 1)?).map_err(|e| format!("V(2,1) witness not verified: {e}"))?;
    ensure(w.composite_depth == Depth::Layer(8), || format!("composite depth {}", w.composite_depth))?;
    ensure(w.verified(), || "side conditions failed".into())?;
    Ok(format!("V(2,1): depth 8, pair depths {} and {}", w.prefix_depth, w.suffix_depth))
}

fn c7_sectional() -> Outcome {
    let w = witness::<Rational>(&fam(Family::U, 2, 3)?).map_err(|e| e.to_string())?;
    for check in ["sectional", "rho has length 2m", "phi has length n-1", "M(D1) = I(x)"] {
        ensure(w.check(check) == Some(true), || format!("check `{check}` failed"))?;
    }
    let full = w.path("sectional").ok_or("no sectional path")?;
    let labels: Vec<String> = ["P", "L", "S", "N", "I"].iter().map(|r| format!("{r}={}", w.gamma.label(w.module(r).unwrap()))).collect();
    ensure(full.first() == w.module("P").as_ref() && full.last() == w.module("I").as_ref(), || "path endpoints".into())?;
    Ok(format!("path of length {}, rho of length 4, {}", full.len() - 1, labels.join(", ")))
}

fn c8_tau_oracle() -> Outcome {
    let mut checked = 0;
    for p in test_algebras()? {
        let ctx = ArContext::new(&p).map_err(|e| e.to_string())?;
        for w in enumerate_strings(&p, Some(8)).map_err(|e| e.to_string())? {
            if ctx.is_projective(&w) {
                continue;
            }
            let m = realize::<Rational>(&p, &w).map_err(|e| e.to_string())?;
            let image = realize::<Rational>(&p, &ctx.tau_word(&w).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let dtr = tau_oracle(&p, m.rep()).map_err(|e| e.to_string())?;
            ensure(matches_string_module(&p, &dtr, &image), || format!("{}: tau({}) disagrees", p.name(), w.format(p.quiver())))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} non-projective strings agree with DTr"))
}

fn c9_radical_cross_check() -> Outcome {
    let mut pairs = 0;
    for (f, m, n) in [(Family::W, 0, 3), (Family::U, 2, 2)] {
        let g = knit::<Rational>(&fam(f, m, n)?.presentation).map_err(|e| e.to_string())?;
        Radical::new(&g).cross_check().map_err(|e| e.to_string())?;
        pairs += g.nodes().len() * g.nodes().len();
    }
    Ok(format!("{pairs} node pairs, all layers equal"))
}

fn c10_structure() -> Outcome {
    let mut cycles = 0;
    for p in test_algebras()? {
        let r = audit_theorems::<Rational>(&p, 1, 0).map_err(|e| e.to_string())?;
        for name in ["C", "D"] {
            let a = r.audit(name).ok_or("missing audit")?;
            ensure(a.passed, || format!("{} audit {name}: {}", p.name(), a.details))?;
        }
        cycles += r.audit("C").unwrap().details["cycles"].as_array().map(Vec::len).unwrap_or(0);
    }
    let p = parse_presentation(LOOP_IN).map_err(|e| e.to_string())?;
    let m = module_of::<Rational>(&p, "be").map_err(|e| e.to_string())?;
    let orbit = tau_orbit(&p, &m, 3).map_err(|e| e.to_string())?;
    ensure(orbit.modules.len() == 4, || "orbit stopped early".into())?;
    let iso = |i: usize| is_isomorphic(&p, orbit.modules[i].rep(), m.rep());
    ensure(!iso(1) && !iso(2) && iso(3), || "tau-period of M(be) is not three".into())?;
    Ok(format!("{cycles} three-cycles mixed mono/epi, cycles iff M -> tau M, M(be) has tau-period 3"))
}

fn c11_infinite() -> Outcome {
    let p = parse_presentation(EX3).map_err(|e| e.to_string())?;
    match enumerate_strings(&p, None) {
        Err(Error::BandFound(b)) => {
            let v4 = p.quiver().vertex("4").map_err(|e| e.to_string())?;
            let i4 = standard_word(&p, v4, StandardKind::Injective).map_err(|e| e.to_string())?;
            let m = realize::<Rational>(&p, &i4).map_err(|e| e.to_string())?;
            let orbit = tau_orbit(&p, &m, 6).map_err(|e| e.to_string())?;
            ensure(orbit.modules.len() == 7, || format!("tau orbit of I4 stops after {} steps", orbit.modules.len() - 1))?;
            let arrows = find_tau_arrows_among::<Rational>(&p, std::slice::from_ref(&i4)).map_err(|e| e.to_string())?;
            ensure(!arrows.is_empty(), || "no irreducible I4 -> tau I4".into())?;
            let q3 = detect_local_patterns(&p).into_iter().find(|m| m.pattern == PatternId::Q3 && m.m == Some(2));
            ensure(q3.is_some(), || "no Q3 match with m = 2".into())?;
            Ok(format!("band {b}, tau^6(I4) defined, I4 -> tau I4 irreducible, Q3 with m=2"))
        }
        Err(e) => Err(format!("unexpected error {e}")),
        Ok(ws) => Err(format!("enumeration finished with {} strings", ws.len())),
    }
}

fn c12_census() -> Outcome {
    let p = fam(Family::W, 0, 3)?.presentation;
    let strings = enumerate_strings(&p, None).map_err(|e| e.to_string())?;
    ensure(strings.len() == 12, || format!("{} strings", strings.len()))?;
    let g = knit::<Rational>(&p).map_err(|e| e.to_string())?;
    let pairs = (0..g.nodes().len()).filter(|&i| g.tau(i).is_some()).count();
    ensure(g.nodes().len() == 12 && g.arrows().len() == 16 && pairs == 8, || {
        format!("{} nodes, {} arrows, {pairs} tau-pairs", g.nodes().len(), g.arrows().len())
    })?;
    Ok("12 strings, 12 nodes, 16 arrows, 8 tau-pairs".into())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let reports = audited();
    let criteria: Vec<(&str, Check)> = vec![
        ("W(3) witness", Box::new(c1_w3_witness)),
        ("main theorem audit", Box::new(|| c2_main_theorem(reports.as_ref().map_err(Clone::clone)?))),
        ("corollary audit", Box::new(|| c3_corollary(reports.as_ref().map_err(Clone::clone)?))),
        ("degree formula", Box::new(c4_degree_formula)),
        ("U witnesses", Box::new(c5_kpar)),
        ("V witness", Box::new(c6_kimpar)),
        ("sectional structure", Box::new(c7_sectional)),
        ("tau oracle agreement", Box::new(c8_tau_oracle)),
        ("radical cross-check", Box::new(c9_radical_cross_check)),
        ("structure audits", Box::new(c10_structure)),
        ("representation-infinite checks", Box::new(c11_infinite)),
        ("census", Box::new(c12_census)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail} [{:.2?}]", i + 1, t.elapsed());
    }
    let audit_limit = Duration::from_secs(300);
    if start.elapsed() > audit_limit {
        println!("FAIL    total time {:.2?} exceeds {:?}", start.elapsed(), audit_limit);
        failed += 1;
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
