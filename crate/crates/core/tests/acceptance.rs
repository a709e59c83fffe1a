//! Acceptance suite: each criterion runs in sequence, prints one PASS/FAIL
//! line with its runtime, and the process fails if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;

use retract_core::case_studies::{self, DhPoint, HullOptions};
use retract_core::geometry::{finite_difference_hessian, real_hessian, DefiningFunction, ProbeOptions};
use retract_core::lp::{self, LinearProjection, LinearSubspace};
use retract_core::parse::{parse_poly, parse_vector};
use retract_core::region::Region;
use retract_core::retraction::{self, verify_idempotent, verify_self_map, CxDeltaClass};
use retract_core::sampling::{self, norm2};
use retract_core::straighten::{random_round_trip, straighten};
use retract_core::verdict::Decision;
use retract_core::{BalancedDomain, ExactComplex, MultiPoly, PolyMap, RetractError};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn dh_constants() -> Outcome {
    let e = case_studies::eps0();
    let s17 = 17f64.sqrt();
    let q0 = case_studies::dh_q(0.0);
    ensure((q0 - s17).abs() <= 1e-12, format!("Q(0) = {q0}"))?;
    let r1 = case_studies::dh_r2(0.0).map_err(|x| x.to_string())?;
    ensure((r1 - (1.0 + s17) / 2.0).abs() <= 1e-12, format!("r₁² = {r1}"))?;
    let h = case_studies::dh_h(e, e, case_studies::dh_r2(e).unwrap()).map_err(|x| x.to_string())?;
    ensure((h - 16.0).abs() <= 1e-10, format!("h(ε₀; ε₀) = {h}"))?;
    let mut maxes = Vec::new();
    for t0 in [0.0, PI] {
        let m = case_studies::dh_max_objective(&DhPoint::on_rib(t0, 0.4, true).unwrap()).unwrap();
        ensure(m.evaluations >= 2 * case_studies::DH_GRID, "grid smaller than 4096")?;
        ensure((m.max - 17.0).abs() <= 1e-6, format!("max at θ₀ = {t0}: {}", m.max))?;
        maxes.push(m.max);
    }
    let gate = case_studies::integer_gate();
    ensure(gate.holds && gate.lhs == "3932160" && gate.rhs == "3690241", "integer gate")?;
    Ok(format!(
        "Q(0)={q0:.12} r₁²={r1:.12} h(ε₀)={h:.10} max={:.9}/{:.9} 8⁶·15>1921²",
        maxes[0], maxes[1]
    ))
}

fn dh_directions() -> Outcome {
    let pts = case_studies::dh_boundary_samples(10_000, 2024);
    let d = BalancedDomain::dh();
    let results: Vec<Result<(Decision, bool, bool), String>> = pts
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let v = case_studies::dh_direction_test(p, 10_000, i as u64).map_err(|e| e.to_string())?;
            let open = d.classify_boundary(p, case_studies::DIRECTION_TOL).map_err(|e| e.to_string())?.active.len() == 1;
            let (r1, r2) = (p[0].norm(), p[1].norm());
            let t = (p[1].arg() - p[0].arg()).rem_euclid(2.0 * PI);
            let conds = (r1 * r2 - 2.0).abs() <= 1e-8
                && ((r1 * r1 - r2 * r2).abs() - 1.0).abs() <= 1e-8
                && [0.0, PI, 2.0 * PI].iter().any(|a| (t - a).abs() <= 1e-8);
            let self_map_ok = v.verdict.evidence["self_map"]["decision"] == "yes";
            Ok((v.admits_linear_retract, open, conds && self_map_ok))
        })
        .collect();
    let mut yes = 0;
    let mut open_no = 0;
    let mut rib_no = 0;
    let mut rib_inconclusive = 0;
    for r in results {
        let (dec, open, yes_ok) = r?;
        match (dec, open) {
            (Decision::Yes, true) => return Err("open-face point classified yes".into()),
            (Decision::Yes, false) => {
                ensure(yes_ok, "yes verdict without rib conditions or self-map confirmation")?;
                yes += 1;
            }
            (Decision::No, true) => open_no += 1,
            (Decision::Inconclusive, true) => return Err("open-face point not classified no".into()),
            (Decision::No, false) => rib_no += 1,
            (Decision::Inconclusive, false) => rib_inconclusive += 1,
        }
    }
    ensure(yes > 0, "no yes verdicts sampled")?;
    Ok(format!("{yes} yes, {open_no} open-face no, {rib_no} rib no, {rib_inconclusive} rib inconclusive"))
}

fn lp_round_trip() -> Outcome {
    let l = LinearSubspace::kernel_of(&[parse_vector("(2,1,-1)").unwrap()], 3).unwrap();
    ensure(lp::disjoint_basis_search(&l).is_none(), "ker(2,1,-1) accepted")?;
    let g = lp::projection_grid_search(&l, 3.0, 10_000, 1.0 + 1e-6, 1);
    ensure(g.norm_one_candidates == 0 && g.projections_tested >= 10_000, "ker(2,1,-1) grid found a norm-one projection")?;
    let half = ExactComplex::rational(1, 2);
    let (o, z) = (ExactComplex::one(), ExactComplex::zero());
    let t = LinearProjection::new(vec![
        vec![o.clone(), z.clone(), z.clone()],
        vec![z.clone(), o.clone(), z.clone()],
        vec![half.clone(), half, z],
    ]);
    let tn = lp::sampled_operator_norm(&t, f64::INFINITY, 5000, 2);
    ensure(t.is_idempotent() && (tn - 1.0).abs() <= 1e-10, format!("‖T‖∞ = {tn}"))?;

    let mut cases = Vec::new();
    for (pi, p) in [1.0, 3.0, 4.0].into_iter().enumerate() {
        let mut r = sampling::rng(100 + pi as u64);
        for i in 0..200 {
            let n = 3 + (i % 2);
            let k = r.random_range(1..n);
            let disjoint = r.random_bool(0.5);
            cases.push((p, lp::random_subspace(&mut r, n, k, disjoint), i as u64));
        }
    }
    let outcomes: Vec<Result<bool, String>> = cases
        .par_iter()
        .map(|(p, l, seed)| match lp::disjoint_basis_search(l) {
            Some(b) => {
                let pr = lp::lp_norm_one_projection(*p, &b).map_err(|e| e.to_string())?;
                let norm = lp::sampled_operator_norm(&pr, *p, 2000, *seed);
                ensure(pr.is_idempotent(), "constructed projection not idempotent")?;
                ensure(norm <= 1.0 + 1e-9, format!("p={p}: constructed norm {norm}"))?;
                Ok(true)
            }
            None => {
                let g = lp::projection_grid_search(l, *p, 10_000, 1.0 + 1e-6, *seed);
                ensure(g.projections_tested >= 10_000, "grid too small")?;
                ensure(g.norm_one_candidates == 0, format!("p={p}: grid found {} norm-one projections", g.norm_one_candidates))?;
                Ok(false)
            }
        })
        .collect();
    let mut acc = 0;
    let mut rej = 0;
    for o in outcomes {
        if o? {
            acc += 1
        } else {
            rej += 1
        }
    }
    Ok(format!("{acc} accepted, {rej} rejected with empty grids; ker(2,1,-1) rejected; ‖T‖∞={tn:.12}"))
}

fn transformed(l: &LinearSubspace, perm: &[usize], phases: &[ExactComplex]) -> LinearSubspace {
    let p = l.permuted(perm);
    let basis = p
        .basis()
        .iter()
        .map(|v| v.iter().zip(phases).map(|(x, u)| x * u).collect())
        .collect();
    LinearSubspace::new(l.ambient(), basis).unwrap()
}

fn polydisc() -> Outcome {
    let l = LinearSubspace::new(
        4,
        vec![parse_vector("(1,1/2,1/4,0)").unwrap(), parse_vector("(0,1/2,3/4,1)").unwrap()],
    )
    .unwrap();
    let t = lp::polydisc_retract_test(&l).map_err(|e| e.to_string())?;
    let a = t.accepted.ok_or("Δ⁴ example rejected")?;
    let expected = PolyMap::parse("z1; 1/2*z1 + 1/2*z4; 1/4*z1 + 3/4*z4; z4", 4).unwrap();
    ensure(a.retraction == expected, format!("retraction {}", a.retraction))?;
    ensure(verify_idempotent(&a.retraction), "retraction not idempotent")?;
    let v = verify_self_map(&a.retraction, &Region::from(BalancedDomain::polydisc(4)), 10_000, 5);
    ensure(v.passed(), v.summary)?;

    let units = [
        ExactComplex::one(),
        ExactComplex::i(),
        ExactComplex::from_int(-1),
        ExactComplex::new(BigRational::new(3.into(), 5.into()), BigRational::new(4.into(), 5.into())),
        ExactComplex::new(BigRational::new(5.into(), 13.into()), BigRational::new((-12).into(), 13.into())),
    ];
    let mut r = sampling::rng(77);
    let bases = [
        l.clone(),
        LinearSubspace::from_ints(&[&[1, 1, 1, 0]]).unwrap(),
        LinearSubspace::kernel_of(&[parse_vector("(1,1,1,0)").unwrap()], 4).unwrap(),
        lp::random_subspace(&mut r, 4, 2, false),
    ];
    let base_accept: Vec<bool> = bases
        .iter()
        .map(|b| lp::polydisc_retract_test(b).map(|t| t.accepted.is_some()))
        .collect::<Result<_, RetractError>>()
        .map_err(|e| e.to_string())?;
    for i in 0..100 {
        let which = i % bases.len();
        let mut perm: Vec<usize> = (0..4).collect();
        for j in (1..4).rev() {
            perm.swap(j, r.random_range(0..=j));
        }
        let phases: Vec<ExactComplex> = (0..4).map(|_| units[r.random_range(0..units.len())].clone()).collect();
        let moved = transformed(&bases[which], &perm, &phases);
        let acc = lp::polydisc_retract_test(&moved).map_err(|e| e.to_string())?.accepted.is_some();
        ensure(acc == base_accept[which], format!("acceptance changed under transform {i}"))?;
    }
    Ok(format!("retraction {expected}; self-map sup {}; 100 transforms invariant", v.evidence["sup_level"]))
}

fn straightening() -> Outcome {
    let mut rng = sampling::rng(4242);
    let mut slowest = Duration::ZERO;
    for i in 0..100 {
        let case = random_round_trip(&mut rng, 4, 3, i % 2 == 1);
        let start = Instant::now();
        let res = straighten(&case.map);
        let dt = start.elapsed();
        slowest = slowest.max(dt);
        let res = match res {
            Err(RetractError::InternalContradiction(m)) => return Err(format!("instance {i}: internal contradiction: {m}")),
            Err(e) => return Err(format!("instance {i}: {e}")),
            Ok(r) => r,
        };
        let c = &res.certificate;
        ensure(c.all_hold(), format!("instance {i}: certificate {c:?}"))?;
        ensure(res.normal_form.component(1).is_zero(), format!("instance {i}: image not the first axis"))?;
        ensure(res.chain.inverse_is_exact(), format!("instance {i}: chain inverse"))?;
        ensure(dt < Duration::from_secs(1), format!("instance {i} took {dt:?}"))?;
    }
    Ok(format!("100 certified, slowest {slowest:?}"))
}

fn egg_non_retracts() -> Outcome {
    let egg = BalancedDomain::egg(vec![0.5, 0.5]).unwrap();
    let opts = HullOptions::default();
    for rows in [vec![vec![1, 0]], vec![vec![0, 1]], vec![vec![1, 0], vec![0, 1]]] {
        let rr: Vec<&[i64]> = rows.iter().map(|v| v.as_slice()).collect();
        let h = case_studies::hull_obstruction_test(&egg, &LinearSubspace::from_ints(&rr).unwrap(), &opts)
            .map_err(|e| e.to_string())?;
        ensure(h.verdict.decision == Decision::Yes, format!("coordinate pattern {rows:?} rejected"))?;
        ensure(
            h.verdict.evidence["certificate"].as_str().is_some_and(|s| s.contains("nondecreasing")),
            "missing monotonicity certificate",
        )?;
    }
    let mut r = sampling::rng(31);
    let mut lines = Vec::new();
    while lines.len() < 50 {
        let l = lp::random_subspace(&mut r, 2, 1, false);
        if case_studies::coordinate_support(&l).is_none() {
            lines.push(l);
        }
    }
    let mut tested = 0;
    for (i, l) in lines.iter().enumerate() {
        let h = case_studies::hull_obstruction_test(&egg, l, &HullOptions { seed: i as u64, ..opts })
            .map_err(|e| e.to_string())?;
        ensure(h.verdict.decision == Decision::No, format!("line {i} not rejected: {}", h.verdict.summary))?;
        ensure(h.projections_falsified == h.projections_tested, format!("line {i} not fully falsified"))?;
        ensure(!h.verdict.evidence["hardest"]["witness"].is_null(), "missing witness")?;
        tested += h.projections_tested;
    }
    let probe = ProbeOptions { samples: 64, ..Default::default() };
    let m = case_studies::open_piece_measure(&egg, 10_000, 9, &probe).map_err(|e| e.to_string())?;
    ensure(m.fraction == 0.0 && m.directions == 10_000, format!("open piece fraction {}", m.fraction))?;
    Ok(format!("3 coordinate patterns accepted; 50 lines falsified over {tested} projections; open piece 0.0"))
}

fn hessian_dichotomy() -> Outcome {
    let mut r = sampling::rng(8);
    let mut worst_rel: f64 = 0.0;
    for q in [0.3, 0.5, 0.8] {
        let rf = DefiningFunction::Egg(vec![q, q]);
        for _ in 0..1000 {
            // positive boundary point: x^q + y^q = 1
            let s: f64 = r.random_range(0.05..0.95);
            let (x, y) = (s.powf(1.0 / q), (1.0 - s).powf(1.0 / q));
            let p = [Complex64::new(x, 0.0), Complex64::new(y, 0.0)];
            // real tangent: q x^{q−1} v₁ + q y^{q−1} v₂ = 0
            let v = [Complex64::new(y.powf(q - 1.0), 0.0), Complex64::new(-x.powf(q - 1.0), 0.0)];
            let nv = norm2(&v);
            let v: Vec<Complex64> = v.iter().map(|c| c / nv).collect();
            let iv: Vec<Complex64> = v.iter().map(|c| c * Complex64::i()).collect();
            let hr = real_hessian(&rf, &p, &v).map_err(|e| e.to_string())?;
            let hi = real_hessian(&rf, &p, &iv).map_err(|e| e.to_string())?;
            ensure(hr < 0.0 && hi > 0.0, format!("q={q}: signs {hr}, {hi}"))?;
            for (h, dir) in [(hr, &v), (hi, &iv)] {
                // the step must stay small against each coordinate it moves
                let step = 1e-3
                    * p.iter()
                        .zip(dir.iter())
                        .filter(|(_, d)| d.norm() > 0.0)
                        .map(|(z, d)| z.norm() / d.norm())
                        .fold(f64::INFINITY, f64::min);
                let fd = finite_difference_hessian(&rf, &p, dir, step).map_err(|e| e.to_string())?;
                let rel = (h - fd).abs() / h.abs();
                worst_rel = worst_rel.max(rel);
                ensure(rel <= 1e-5, format!("q={q}: hessian {h} vs difference {fd}"))?;
            }
        }
    }
    Ok(format!("3000 points; worst relative gap to finite differences {worst_rel:.2e}"))
}

fn minkowski_suite() -> Outcome {
    let families = vec![
        BalancedDomain::lp(1.0, 3).unwrap(),
        BalancedDomain::lp(3.0, 3).unwrap(),
        BalancedDomain::lp(0.5, 2).unwrap(),
        BalancedDomain::polydisc(3),
        BalancedDomain::ball(4),
        BalancedDomain::egg(vec![0.5, 0.5]).unwrap(),
        BalancedDomain::egg(vec![1.0 / 3.0, 2.0 / 3.0, 1.5]).unwrap(),
        BalancedDomain::dh(),
        BalancedDomain::product(vec![BalancedDomain::ball(2), BalancedDomain::polydisc(1)]).unwrap(),
        BalancedDomain::intersection(vec![BalancedDomain::ball(2), BalancedDomain::lp(1.0, 2).unwrap()]).unwrap(),
    ];
    let mut worst_h: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    for (k, d) in families.iter().enumerate() {
        let mut r = sampling::rng(500 + k as u64);
        for i in 0..10_000 {
            let z = sampling::gaussian_vec(&mut r, d.dim());
            let lam = sampling::gaussian_c(&mut r) * 3.0;
            let hz = d.gauge(&z);
            let hl = d.gauge(&z.iter().map(|x| x * lam).collect::<Vec<_>>());
            let gap = (hl - lam.norm() * hz).abs();
            worst_h = worst_h.max(gap / (1.0 + lam.norm() * hz));
            ensure(gap <= 1e-10 * (1.0 + lam.norm() * hz), format!("{d}: homogeneity gap {gap}"))?;
            if i % 10 == 0 {
                let b = d.minkowski_bisection(&z).map_err(|e| e.to_string())?.value;
                let gap = (b - hz).abs();
                worst_b = worst_b.max(gap / hz.max(1.0));
                ensure(gap <= 1e-8 * hz.max(1.0), format!("{d}: closed form {hz} vs bisection {b}"))?;
            }
        }
    }
    let dh = BalancedDomain::dh();
    let mut r = sampling::rng(3);
    let pts = dh.sample_interior(&mut r, 100_000);
    ensure(pts.len() == 100_000, "interior sampling short")?;
    let far = pts.iter().map(|p| norm2(p)).fold(0.0, f64::max);
    ensure(far < 3.0, format!("D_h sample at distance {far}"))?;
    Ok(format!(
        "{} families; homogeneity rel gap {worst_h:.1e}; bisection rel gap {worst_b:.1e}; D_h max |z| {far:.4} < 3",
        families.len()
    ))
}

fn normal_forms() -> Outcome {
    let pm = |s: &str| PolyMap::parse(s, 2).unwrap();
    let settings = [
        (ExactComplex::rational(1, 2), 0.0, MultiPoly::zero(2)),
        (ExactComplex::rational(1, 2), 0.0, MultiPoly::constant(2, ExactComplex::rational(1, 8))),
        (ExactComplex::rational(1, 3), PI / 2.0, parse_poly("z/20 - w/20", 2).unwrap()),
    ];
    let mut worst_res: f64 = 0.0;
    for (t, theta, f) in &settings {
        let u = retraction::unimodular_exact(*theta);
        let hs = retraction::heath_suffridge(t, &u, f, 2000, 1).map_err(|e| e.to_string())?;
        ensure(hs.candidate.is_idempotent(), "Heath–Suffridge map not idempotent")?;
        let want = Complex64::from_polar(1.0, -theta);
        let got = Complex64::new(hs.fitted_direction[1][0], hs.fitted_direction[1][1]);
        ensure((got - want).norm() <= 1e-9, format!("direction {got} vs {want}"))?;
        ensure(hs.line_residual <= 1e-9, format!("line residual {}", hs.line_residual))?;
        worst_res = worst_res.max(hs.line_residual);
    }
    let bidisc = BalancedDomain::polydisc(2);
    let w = parse_poly("w", 2).unwrap();
    let ext = retraction::extend_from_complement(&pm("z; z/4 + 1/2"), &bidisc, &w, 10_000, 2)
        .map_err(|e| e.to_string())?;
    ensure(verify_idempotent(&ext.candidate.map) && ext.verdict.passed(), "extension does not re-verify")?;
    // exact bound: |z/4 + 1/2| ≤ 1/4 + 1/2 < 1 on the closed disc
    let l1: BigRational = ext.candidate.map.component(1).terms().values().map(|c| abs_real(c)).sum();
    ensure(l1 < BigRational::from_integer(1.into()), "coefficient bound fails")?;
    let a = retraction::cxdelta_normal_form_check(&pm("z + z*w; 0")).map_err(|e| e.to_string())?;
    ensure(matches!(a, CxDeltaClass::FormA { .. }), format!("(z+zw, 0) classified {a:?}"))?;
    let b = retraction::cxdelta_normal_form_check(&pm("w^3; w")).map_err(|e| e.to_string())?;
    ensure(matches!(b, CxDeltaClass::FormB { .. }), format!("(w³, w) classified {b:?}"))?;
    Ok(format!(
        "3 Heath–Suffridge settings, residual ≤ {worst_res:.1e}; extension bound Σ|c| = {l1}; C×Δ forms A and B"
    ))
}

fn abs_real(c: &ExactComplex) -> BigRational {
    assert!(c.im == BigRational::from_integer(0.into()), "real coefficients expected");
    if c.re < BigRational::from_integer(0.into()) {
        -c.re.clone()
    } else {
        c.re.clone()
    }
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("D_h closed-form constants and optimizer", Duration::from_secs(10), dh_constants),
        ("D_h direction classification", Duration::from_secs(30), dh_directions),
        ("ℓ^p characterization round trip", Duration::from_secs(120), lp_round_trip),
        ("polydisc row-sum test", Duration::from_secs(60), polydisc),
        ("straightening round trips", Duration::from_secs(100), straightening),
        ("egg non-retracts", Duration::from_secs(120), egg_non_retracts),
        ("Hessian sign dichotomy", Duration::from_secs(60), hessian_dichotomy),
        ("Minkowski property suite", Duration::from_secs(120), minkowski_suite),
        ("normal-form classifiers", Duration::from_secs(60), normal_forms),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let dt = start.elapsed();
        let out = match out {
            Ok(m) if dt > budget => Err(format!("{m}; over budget {budget:?}")),
            o => o,
        };
        match out {
            Ok(m) => println!("PASS  {name} [{:.2}s]: {m}", dt.as_secs_f64()),
            Err(m) => {
                failed += 1;
                println!("FAIL  {name} [{:.2}s]: {m}", dt.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
