//! Acceptance suite: one line per criterion, `PASS` or `FAIL` with details.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use polproj_core::forms::{FormSpec, Kind};
use polproj_core::gf::Field;
use polproj_core::permgrp::{catalog_order, Family, Perm, PermGroup};
use polproj_core::polar::PolarSpace;
use polproj_core::proj::{evaluate_chain, extract_homology_factor, homology_quadruple, standard_homology_axes};
use polproj_core::verify::{
    self, check_conic_elation, check_engine_oracle, check_gamma, check_maxsubspace, check_oddeven,
    check_reflections, check_triangles, check_upanddown, generate, ModeChoice, Outcome, Report, ResidueSel,
    RunConfig,
};
use polproj_core::{Error, Result};

fn space(kind: Kind, r: usize, q: u64, c: usize) -> Result<PolarSpace> {
    PolarSpace::build(FormSpec::from_params(kind, r, q, c)?)
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn witness_u64(rep: &Report, key: &str) -> u64 {
    rep.witnesses.get(key).and_then(|v| v.as_u64()).unwrap_or(0)
}

fn brief(rep: &Report) -> String {
    format!(
        "{} {}: {} (Π {}, Π⁺ {})",
        rep.check,
        rep.spec,
        rep.outcome,
        rep.order_pi.as_deref().unwrap_or("-"),
        rep.order_pi_plus.as_deref().unwrap_or("-")
    )
}

type Verdict = Result<(bool, String)>;
type Criterion = (u32, &'static str, fn() -> Verdict, u64);

fn c1() -> Verdict {
    let sp = space(Kind::Symplectic, 3, 2, 0)?;
    let cfg = RunConfig { mode: ModeChoice::Exhaustive, ..RunConfig::default() };
    let g = generate(&sp, ResidueSel::point(), &cfg)?;
    let np = g.base.points().len();
    let gens: Vec<Perm> = g
        .kept_point_action()
        .ok_or_else(|| Error::ConditionNotMet("point action undefined".into()))?;
    let pg = PermGroup::from_generators(np, &gens)?;
    let ok = g.full.order() == big(720) && g.even.order() == big(720) && np == 15 && pg.is_transitive();
    Ok((ok, format!("|Π| = {}, |Π⁺| = {}, {} lines through p, transitive = {}", g.full.order(), g.even.order(), np, pg.is_transitive())))
}

fn c2() -> Verdict {
    let sp = space(Kind::Symplectic, 3, 3, 0)?;
    let cfg = RunConfig { mode: ModeChoice::Sampled, stable_batches: 5, ..RunConfig::default() };
    let g = generate(&sp, ResidueSel::point(), &cfg)?;
    let want = catalog_order(&Family::Psp { n: 4, q: 3 })?;
    let ok = g.full.order() == want && g.even.order() == want && want == big(25920);
    Ok((ok, format!("sampled, |Π| = {}, |Π⁺| = {}, |PSp(4,3)| = {want}", g.full.order(), g.even.order())))
}

fn c3() -> Verdict {
    let sp = space(Kind::Symplectic, 3, 2, 0)?;
    let cfg = RunConfig { mode: ModeChoice::Exhaustive, ..RunConfig::default() };
    let g = generate(&sp, ResidueSel::lower(3), &cfg)?;
    let rev = g.odd_iff_reversing();
    let ok = g.even.order() == big(168) && g.full.order() == big(336) && rev == Some(true);
    Ok((ok, format!("|Π⁺| = {}, |Π| = {}, odd iff type-reversing = {:?}", g.even.order(), g.full.order(), rev)))
}

fn c4() -> Verdict {
    let sp = space(Kind::Quadratic, 3, 2, 2)?;
    let rep = check_reflections(&sp, "O(n=3,q=2,corank=2) point:upper", &RunConfig::default())?;
    let fixed = witness_u64(&rep, "length3_hyperplane_fixed");
    let bad = witness_u64(&rep, "length3_hyperplane_violations");
    let ok = rep.index.as_deref() == Some("2") && fixed > 0 && bad == 0;
    Ok((ok, format!("index {}, length-3 loops fixing a hyperplane {fixed}, violations {bad}", rep.index.as_deref().unwrap_or("-"))))
}

fn c5() -> Verdict {
    let sp = space(Kind::Quadratic, 3, 3, 1)?;
    let rep = check_reflections(&sp, "O(n=3,q=3,corank=1) point:upper", &RunConfig::default())?;
    let refl = rep.witnesses.get("order_reflection_group").and_then(|v| v.as_str()).unwrap_or("-").to_string();
    let ok = rep.index.as_deref() == Some("1") && rep.order_pi.as_deref() == Some(refl.as_str()) && rep.outcome == Outcome::Pass;
    Ok((ok, format!("index {}, |<reflections>| = {refl}, {}", rep.index.as_deref().unwrap_or("-"), brief(&rep))))
}

fn c6() -> Verdict {
    let cfg = RunConfig::default();
    let mut lines = Vec::new();
    let mut ok = true;
    for (label, sp) in [
        ("Sp(n=3,q=3) point:upper", space(Kind::Symplectic, 3, 3, 0)?),
        ("O(n=3,q=3,corank=1) point:upper", space(Kind::Quadratic, 3, 3, 1)?),
    ] {
        let t = check_triangles(&sp, ResidueSel::point(), label, &cfg)?;
        let u = check_upanddown(&sp, ResidueSel::point(), label, &cfg)?;
        ok &= t.outcome == Outcome::Pass && u.outcome == Outcome::Pass;
        lines.push(format!("{}; {}", brief(&t), brief(&u)));
    }
    Ok((ok, lines.join("; ")))
}

fn c7() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    let w33 = space(Kind::Symplectic, 2, 3, 0)?;
    let rep = check_gamma(&w33, 1, "Sp(n=2,q=3) point", &RunConfig::default())?;
    ok &= rep.outcome == Outcome::Pass && rep.mode == verify::Mode::Exhaustive;
    parts.push(format!("W(3,3) points: {} of {} pairs connected", witness_u64(&rep, "connected"), witness_u64(&rep, "pairs")));
    let w53 = space(Kind::Symplectic, 3, 3, 0)?;
    let cfg = RunConfig { samples: 50, ..RunConfig::default() };
    for level in 1..=3 {
        let rep = check_gamma(&w53, level, "Sp(n=3,q=3)", &cfg)?;
        let pairs = witness_u64(&rep, "pairs");
        ok &= rep.outcome == Outcome::Pass && pairs >= 50;
        parts.push(format!("W(5,3) s={}: {} of {pairs} connected", level - 1, witness_u64(&rep, "connected")));
    }
    Ok((ok, parts.join(", ")))
}

fn c8() -> Verdict {
    let sp = space(Kind::Quadratic, 3, 3, 1)?;
    let cfg = RunConfig { samples: 100, ..RunConfig::default() };
    let rep = check_oddeven(&sp, 1, "O(n=3,q=3,corank=1) subspace(d=1)", &cfg)?;
    let n = witness_u64(&rep, "configurations");
    let eq = witness_u64(&rep, "images_equal_w1");
    Ok((rep.outcome == Outcome::Pass && n >= 100 && eq == n, format!("{eq} of {n} images equal W1")))
}

fn normset_oracle(kind: Kind, r: usize, q: u64, c: usize) -> Result<(bool, String)> {
    let sp = space(kind, r, q, c)?;
    let spec = sp.spec();
    let f = sp.field();
    let m = spec.standard_subspace(r);
    let base = sp.residue(&m, polproj_core::polar::Side::Lower)?;
    let (axis, centre) = standard_homology_axes(spec);
    let mut total = 0;
    let mut agree = 0;
    let mut factors = BTreeSet::new();
    let v0s = spec.v0_vectors();
    for v0 in &v0s {
        for w0 in &v0s {
            for t in f.elements() {
                for u in f.elements() {
                    let chain = match homology_quadruple(&sp, v0, w0, t, u) {
                        Err(Error::DegenerateD) => continue,
                        other => other?,
                    };
                    let cp = evaluate_chain(&sp, &base, &chain)?;
                    let x = extract_homology_factor(&sp, &base, &cp, &axis, &centre)?;
                    total += 1;
                    if x == spec.d_value(v0, w0, t, u)? {
                        agree += 1;
                    }
                    factors.insert(x);
                }
            }
        }
    }
    let ns: BTreeSet<_> = verify::norm_set(spec)?.into_iter().collect();
    let mut ok = total > 0 && agree == total && factors == ns;
    if kind == Kind::Quadratic {
        let sq: BTreeSet<_> = f.nonzero().map(|x| f.mul(x, x)).collect();
        ok &= ns == sq;
    }
    Ok((ok, format!("{}: {agree}/{total} factors equal D, factor set {:?}, norm set {:?}", spec.classical_name(), factors, ns)))
}

fn c9() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, r, q, c) in [(Kind::Quadratic, 3, 3, 1), (Kind::Hermitian, 2, 3, 0), (Kind::Hermitian, 2, 3, 1)] {
        let (o, s) = normset_oracle(k, r, q, c)?;
        ok &= o;
        parts.push(s);
    }
    Ok((ok, parts.join("; ")))
}

fn c10() -> Verdict {
    let sp = space(Kind::Hermitian, 3, 2, 0)?;
    let cfg = RunConfig { mode: ModeChoice::Sampled, ..RunConfig::default() };
    let rep = check_maxsubspace(&sp, "U(n=3,q=2,corank=0) max:lower", &cfg)?;
    let ns = verify::norm_set(sp.spec())?;
    let ok = rep.outcome == Outcome::Pass && rep.order_pi_plus.as_deref() == Some("20160") && ns == vec![1];
    Ok((ok, format!("{}, norm set {:?}, outcome {}", brief(&rep), ns, rep.outcome)))
}

fn c11() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, k) in [(2, 1), (2, 2)] {
        let f = Field::new(p, k)?;
        let rep = check_conic_elation(&f, &format!("q={}", f.q()), &RunConfig::default())?;
        ok &= rep.outcome == Outcome::Pass;
        parts.push(format!("q={}: {} of {} admissible verified", f.q(), witness_u64(&rep, "verified"), witness_u64(&rep, "admissible")));
    }
    Ok((ok, parts.join(", ")))
}

fn c12() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    let cfg = RunConfig::default();
    for (r, sel) in [(2, ResidueSel::point()), (2, ResidueSel::lower(2)), (3, ResidueSel::point()), (3, ResidueSel::lower(3))] {
        let sp = space(Kind::Symplectic, r, 2, 0)?;
        let rep = check_engine_oracle(&sp, sel, 6, &sp.spec().classical_name(), &cfg)?;
        ok &= rep.outcome == Outcome::Pass;
        parts.push(format!(
            "{} level {} {:?}: tree {} / closure {}",
            sp.spec().classical_name(),
            sel.level,
            sel.side,
            rep.order_pi.as_deref().unwrap_or("-"),
            rep.witnesses.get("closure_all").and_then(|v| v.as_str()).unwrap_or("-")
        ));
    }
    Ok((ok, parts.join(", ")))
}

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "W(5,2) point residue is Sym(6)", c1, 120),
        (2, "W(5,3) point residue is PSp(4,3)", c2, 900),
        (3, "W(5,2) maximal plane", c3, 120),
        (4, "Q-(7,2) point residue", c4, 600),
        (5, "Q(6,3) point residue", c5, 1800),
        (6, "reduction to short loops", c6, 2700),
        (7, "space-graph connectivity", c7, 900),
        (8, "odd/even lemma on Q(6,3)", c8, 600),
        (9, "homology factors against D", c9, 1200),
        (10, "H(5,4) maximal plane", c10, 3600),
        (11, "char-2 conic elations", c11, 60),
        (12, "engine oracle", c12, 600),
    ];
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (id, name, run, limit) in criteria {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let t0 = Instant::now();
        let res = run();
        let el = t0.elapsed();
        let within = el <= Duration::from_secs(limit);
        let (ok, detail) = match res {
            Ok((ok, d)) => (ok && within, d),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {id:>2}: {} - {name}: {detail} [{:.1}s, limit {limit}s]",
            if ok { "PASS" } else { "FAIL" },
            el.as_secs_f64()
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
