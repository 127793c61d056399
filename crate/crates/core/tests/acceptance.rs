//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines are always printed.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{fixture, FIXTURES};
use coxrep_core::dihedral::{
    classify_block, common_fixed_dimension, rho_matrices, verify_dihedral_relations, IrrepKind,
};
use coxrep_core::graph::Label;
use coxrep_core::pipeline::{self, analyze, BuildOptions, SuiteReport};
use coxrep_core::rep::{BasisIndex, Family, SparseVector, Structure};
use coxrep_core::scalar::{Scalar, ScalarContext};
use coxrep_core::verify::{cyclic_closure, fixed_space, Status, SuiteConfig, VerificationReport};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite(name: &str, opts: &BuildOptions) -> Result<SuiteReport, String> {
    pipeline::verify(name, &fixture(name), opts, &SuiteConfig::default()).map_err(|e| e.to_string())
}

fn require(
    report: &SuiteReport,
    check: &str,
    status: Status,
) -> Result<VerificationReport, String> {
    let c = report
        .check(check)
        .ok_or_else(|| format!("{}: no check {check}", report.graph))?
        .clone();
    ensure(c.status == status, || {
        format!(
            "{}: {check} is {:?}: {:?}",
            report.graph, c.status, c.counterexample
        )
    })?;
    Ok(c)
}

fn relation_checks_pass(report: &SuiteReport) -> Result<usize, String> {
    let mut n = 0;
    for c in report
        .checks
        .iter()
        .filter(|c| c.name == "involutions" || c.name.starts_with("braid("))
    {
        ensure(c.status != Status::Fail, || {
            format!(
                "{}: {} failed: {:?}",
                report.graph, c.name, c.counterexample
            )
        })?;
        n += usize::from(c.status == Status::Pass);
    }
    Ok(n)
}

fn pi1() -> BuildOptions {
    let mut o = BuildOptions::new(Family::Pi1);
    o.window = Some(6);
    o
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let ga = suite("two_triangles", &pi1())?;
    let elapsed = start.elapsed();
    let shared = ga.construction["edge1"][1] == "c" && ga.construction["edge2"][1] == "c";
    ensure(shared, || {
        format!("special edges do not share c: {}", ga.construction)
    })?;
    let n_a = relation_checks_pass(&ga)?;
    ensure(n_a == 7, || {
        format!("expected 7 passing sweeps on G_A, got {n_a}")
    })?;
    ensure(elapsed < Duration::from_secs(60), || {
        format!("G_A took {elapsed:?}")
    })?;

    let bridged = suite("bridged_triangles", &pi1())?;
    let e1: Vec<&str> = (0..2)
        .map(|i| bridged.construction["edge1"][i].as_str().unwrap())
        .collect();
    let e2: Vec<&str> = (0..2)
        .map(|i| bridged.construction["edge2"][i].as_str().unwrap())
        .collect();
    ensure(e1.iter().all(|v| !e2.contains(v)), || {
        format!("edges {e1:?} and {e2:?} meet")
    })?;
    let n_b = relation_checks_pass(&bridged)?;
    ensure(n_b == 16, || {
        format!("expected 16 passing sweeps, got {n_b}")
    })?;
    Ok(format!(
        "G_A {n_a} sweeps in {:.2}s (B = {}), disjoint-edge fixture {n_b} sweeps",
        elapsed.as_secs_f64(),
        ga.window.buffer
    ))
}

fn criterion_2() -> Outcome {
    let built = pipeline::build(&fixture("two_triangles"), &pi1(), 0).map_err(|e| e.to_string())?;
    let rep = &built.rep;
    let Structure::Pi1(p) = rep.structure() else {
        unreachable!()
    };
    let ctx = rep.context();
    let at = |n| BasisIndex::Pi1 { vertex: p.base, n };
    let x1 = rep.monodromy(&p.generators[0]).map_err(|e| e.to_string())?;
    let x2 = rep.monodromy(&p.generators[1]).map_err(|e| e.to_string())?;
    for n in -3..=3 {
        ensure(x1[&n] == rep.unit(at(n + 1)), || {
            format!("X1 at n = {n}: {}", rep.render_vector(&x1[&n]))
        })?;
        let want = rep.unit(at(n + 1)).scaled(&ctx.pow2(n));
        ensure(x2[&n] == want, || {
            format!("X2 at n = {n}: {}", rep.render_vector(&x2[&n]))
        })?;
    }
    let seed = rep.unit(at(0));
    let run = |a: &[usize], b: &[usize]| -> Result<SparseVector, String> {
        let v = rep.transport(a, &seed).map_err(|e| e.to_string())?;
        rep.transport(b, &v).map_err(|e| e.to_string())
    };
    let (c1, c2) = (&p.generators[0].path, &p.generators[1].path);
    let x1x2 = run(c2, c1)?;
    let x2x1 = run(c1, c2)?;
    let coeff = |v: &SparseVector| v.get(&at(2)).cloned();
    ensure(x1x2 == rep.unit(at(2)), || {
        format!("X1X2 = {}", rep.render_vector(&x1x2))
    })?;
    ensure(x2x1 == rep.unit(at(2)).scaled(&ctx.integer(2)), || {
        format!("X2X1 = {}", rep.render_vector(&x2x1))
    })?;

    let three = suite("three_triangles", &pi1())?;
    require(&three, "monodromy_x3", Status::Pass)?;
    Ok(format!(
        "X1, X2 closed forms for |n| <= 3; X3 = id; witness {} vs {}",
        coeff(&x1x2).unwrap(),
        coeff(&x2x1).unwrap()
    ))
}

fn cover_opts(depth: usize) -> BuildOptions {
    let mut o = BuildOptions::new(Family::Cover);
    o.depth = Some(depth);
    o
}

fn criterion_3() -> Outcome {
    let gb = suite("triangle_533", &cover_opts(8))?;
    let gc = suite("triangle_433", &cover_opts(8))?;
    let n_b = relation_checks_pass(&gb)?;
    let n_c = relation_checks_pass(&gc)?;
    ensure(n_b == 4 && n_c == 4, || {
        format!("sweeps passed: {n_b}, {n_c}")
    })?;

    let blocks_b = require(&gb, "dihedral_blocks", Status::Pass)?;
    ensure(blocks_b.details["rho_2"] == 1, || {
        format!("rho_2 count {}", blocks_b.details["rho_2"])
    })?;
    let blocks_c = require(&gc, "dihedral_blocks", Status::Pass)?;
    ensure(blocks_c.details["eps_s1"] == 1, || {
        format!("eps_s1 count {}", blocks_c.details["eps_s1"])
    })?;

    let v1_c = require(&gc, "v1_invariance", Status::Pass)?;
    ensure(v1_c.details["invariant"] == true, || {
        "V1 not invariant on G_C".into()
    })?;
    let v1_b = require(&gb, "v1_invariance", Status::Pass)?;
    ensure(v1_b.details["invariant"] == false, || {
        "no escape on G_B".into()
    })?;
    Ok(format!(
        "G_B: rho_2 x1, escape {}; G_C: eps_s1 x1, V1 invariant",
        v1_b.details["witness"]["image"].as_str().unwrap_or("?")
    ))
}

fn criterion_4() -> Outcome {
    let g = fixture("seven_vertex");
    let built = pipeline::build(&g, &cover_opts(10), 0).map_err(|e| e.to_string())?;
    let rep = &built.rep;
    let Structure::Cover(c) = rep.structure() else {
        unreachable!()
    };
    let ensure_root = c.cover.root_vertex() == g.vertex("s1").unwrap();
    ensure(ensure_root, || "cover not rooted at s1".into())?;
    let lift = |names: &[&str]| -> Result<BasisIndex, String> {
        let id = c
            .cover
            .find_named(names)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("{names:?} missing"))?;
        Ok(BasisIndex::Cov(id))
    };
    let ctx = rep.context();
    let v = SparseVector::from_terms([
        (lift(&["s1", "s0", "s4", "s3"])?, ctx.one()),
        (lift(&["s1", "s0", "s4"])?, ctx.one()),
        (lift(&["s1", "s0", "s5"])?, ctx.integer(-1)),
        (lift(&["s1", "s0", "s5", "s6"])?, ctx.integer(-1)),
    ]);
    for s in 0..rep.generator_count() {
        let img = rep.apply(s, &v).map_err(|e| e.to_string())?;
        ensure(img == v, || {
            format!(
                "moved by {}: {}",
                rep.generator_name(s),
                rep.render_vector(&img)
            )
        })?;
    }
    let all: Vec<usize> = (0..rep.generator_count()).collect();
    let basis = fixed_space(rep, &all).map_err(|e| e.to_string())?;
    let mut span = coxrep_core::linalg::Echelon::new();
    for b in &basis {
        span.insert(b.as_row());
    }
    ensure(span.contains(v.as_row()), || {
        "vector not in computed fixed space".into()
    })?;
    Ok(format!(
        "{} lies in V0 (dim {} at D = 10)",
        rep.render_vector(&v),
        basis.len()
    ))
}

fn criterion_5() -> Outcome {
    let report = suite("pgl", &BuildOptions::new(Family::Pgl))?;
    require(&report, "involutions", Status::Pass)?;
    require(&report, "braid(s1,s2)", Status::Pass)?;
    require(&report, "braid(s1,s3)", Status::Pass)?;
    require(&report, "braid(s2,s3)", Status::Skipped)?;
    require(&report, "closure_from_u0", Status::Evidence)?;
    require(&report, "sign_eigenspace_disjoint", Status::Pass)?;

    let built = pipeline::build(&fixture("pgl"), &BuildOptions::new(Family::Pgl), 0)
        .map_err(|e| e.to_string())?;
    let rep = &built.rep;
    let closure =
        cyclic_closure(rep, &rep.unit(BasisIndex::PglU(0)), 8).map_err(|e| e.to_string())?;
    for i in 0..=3u32 {
        ensure(closure.covered.contains(&BasisIndex::PglU(i)), || {
            format!("u[{i}] not reached")
        })?;
        if i > 0 {
            ensure(closure.covered.contains(&BasisIndex::PglV(i)), || {
                format!("v[{i}] not reached")
            })?;
        }
    }
    let basis = fixed_space(rep, &[0, 1, 2]).map_err(|e| e.to_string())?;
    let on_v = basis
        .iter()
        .any(|b| b.support().all(|i| matches!(i, BasisIndex::PglV(_))));
    ensure(!on_v, || "fixed vector supported on v lines".into())?;
    let s1_fixed = fixed_space(rep, &[0]).map_err(|e| e.to_string())?;
    let mut e = coxrep_core::linalg::Echelon::new();
    for b in &s1_fixed {
        e.insert(b.as_row());
    }
    let v_hits = (1..=rep.core() as u32)
        .filter(|i| e.contains(rep.unit(BasisIndex::PglV(*i)).as_row()))
        .count();
    ensure(v_hits == 0, || format!("{v_hits} v lines fixed by s1"))?;
    Ok(format!(
        "relations exact, closure dim {} from u0 with L = 8, V0 dim {}",
        closure.dimension(),
        basis.len()
    ))
}

fn criterion_6() -> Outcome {
    let mut checked = 0;
    for m in 3..=12u32 {
        let ctx = ScalarContext::for_modulus(m);
        for k in (1..).take_while(|k| 2 * k < m) {
            ensure(verify_dihedral_relations(m, k, &ctx).unwrap(), || {
                format!("relations fail m={m} k={k}")
            })?;
            let fixed = common_fixed_dimension(m, k, &ctx).unwrap();
            ensure(fixed == 0, || {
                format!("common fixed dimension {fixed} at m={m} k={k}")
            })?;
            checked += 1;
        }
        if m % 2 == 0 {
            let (r, t) = rho_matrices(m, m / 2, &ctx).unwrap();
            let kinds = classify_block(&r, &t, m, &ctx).unwrap();
            ensure(kinds == [IrrepKind::EpsR, IrrepKind::EpsT], || {
                format!("rho_m/2 at m={m}: {kinds:?}")
            })?;
        }
    }
    Ok(format!(
        "{checked} (m, k) pairs; rho_(m/2) splits for even m"
    ))
}

fn random_scalar(rng: &mut ChaCha8Rng, ctx: &std::sync::Arc<ScalarContext>) -> Scalar {
    let theta = ctx.theta();
    let mut acc = ctx.zero();
    for _ in 0..=ctx.degree() {
        acc = &(&acc * &theta) + &ctx.ratio(rng.gen_range(-12..=12), rng.gen_range(1..=5));
    }
    acc
}

fn criterion_7() -> Outcome {
    for n in [3, 4, 6, 12, 30] {
        let ctx = ScalarContext::for_modulus(n);
        let theta = ctx.theta();
        let mut acc = ctx.zero();
        for c in ctx.minimal_polynomial().iter().rev() {
            acc = &(&acc * &theta) + &ctx.rational(num::BigRational::from_integer(c.clone()));
        }
        ensure(acc.is_zero(), || format!("psi_{n}(theta) = {acc}"))?;
    }
    let mut worst = 0f64;
    let mut pairs = 0;
    for n in 3..=30u32 {
        let ctx = ScalarContext::for_modulus(n);
        for m in (3..=n).filter(|m| n % m == 0) {
            for k in 1..=2 * m {
                let err = (ctx.two_cos(k, Label::Finite(m)).unwrap().to_f64()
                    - 2.0 * (k as f64 * std::f64::consts::PI / m as f64).cos())
                .abs();
                worst = worst.max(err);
                pairs += 1;
            }
        }
    }
    ensure(worst < 1e-9, || format!("float deviation {worst:e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..200 {
        let ctx = ScalarContext::for_modulus([3, 4, 5, 6, 12, 30][i % 6]);
        let (a, b, c) = (
            random_scalar(&mut rng, &ctx),
            random_scalar(&mut rng, &ctx),
            random_scalar(&mut rng, &ctx),
        );
        let ok = &(&a * &b) * &c == &a * &(&b * &c)
            && &(&a + &b) + &c == &a + &(&b + &c)
            && &a * &(&b + &c) == &(&a * &b) + &(&a * &c)
            && (a.is_zero() || (&a * &a.inv().unwrap()).is_one());
        ensure(ok, || format!("field axiom failure on triple {i}"))?;
    }
    Ok(format!(
        "psi vanishes; {pairs} cosines within {worst:.1e}; 200 triples exact"
    ))
}

fn criterion_8() -> Outcome {
    let mut runs = 0;
    for name in FIXTURES {
        let g = fixture(name);
        let mut families: Vec<Family> = analyze(&g).unwrap().recommended.into_iter().collect();
        if name == "path" || name == "single_edge" {
            families.push(Family::Cover);
        }
        for family in families {
            let opts = BuildOptions::new(family);
            let a = suite(name, &opts)?.to_json();
            let b = suite(name, &opts)?.to_json();
            ensure(a == b, || format!("{name} {family}: reports differ"))?;
            runs += 1;
        }
    }
    ensure(runs >= 8, || format!("only {runs} fixtures exercised"))?;
    Ok(format!(
        "{runs} fixture/family pairs byte-identical across runs"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("relation suite, fundamental-group family", criterion_1),
        ("monodromy formulas", criterion_2),
        ("relation suite, covering family", criterion_3),
        ("fixed vector on the seven-vertex graph", criterion_4),
        ("PGL(2,Z) family", criterion_5),
        ("dihedral layer", criterion_6),
        ("scalar layer", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("[PASS] {} {title}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {} {title}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
