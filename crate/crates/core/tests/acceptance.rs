//! The nine acceptance criteria. Each prints one PASS/FAIL line; the
//! process fails if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use eikonal_core::catalog::{
    algebra_dimension, case_f, case_operators, kernel, verify_case_with, Case7Params, CaseParams, Dimension,
    VerifyConfig, CASE_COUNT,
};
use eikonal_core::classify::{classify, rational_fit};
use eikonal_core::determining::determining_residuals;
use eikonal_core::equiv::{coefficient_map, discriminant, jacobian, reduction_catalog, transform_f, QuadraticForm};
use eikonal_core::expr::eval::eval;
use eikonal_core::expr::rational::{q, qr};
use eikonal_core::expr::zero::is_zero;
use eikonal_core::expr::{diff, symbolic_zero, Env, OpaqueTable, Poly, Session, Var};
use eikonal_core::jet::{is_symmetry, lie_bracket, structure_constants, VectorField};
use eikonal_core::syntax::{parse_declarations, parse_poly, parse_vector_field, print_poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Numeric residual bound for the table check.
const TABLE_TOL: f64 = 1e-8;
const TABLE_BUDGET: Duration = Duration::from_secs(60);
/// Tolerance of the reduction-map spot check.
const MAP_TOL: f64 = 1e-8;
/// Relative agreement of symbolic and central-difference derivatives.
const FD_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-5;

type Check = Result<String, String>;

fn session() -> Session {
    let mut s = Session::new();
    parse_declarations("opaque h(ut)\nopaque f(u, ut)\nparam m positive", &mut s).unwrap();
    s
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn zero(p: &Poly) -> bool {
    p.is_zero() || symbolic_zero(p) || is_zero(p).is_zero()
}

fn field_is_zero(v: &VectorField) -> bool {
    v.components().into_iter().all(zero)
}

fn table_reproduction() -> Check {
    let start = Instant::now();
    let vc = VerifyConfig {
        samples: 100,
        seed: 0,
        tol: TABLE_TOL,
    };
    let mut runs = 0;
    let mut worst: f64 = 0.0;
    let mut check = |id: usize, n: usize, p: &CaseParams| -> Result<(), String> {
        let r = verify_case_with(id, n, p, &vc).map_err(|e| format!("row {id} n = {n}: {e}"))?;
        runs += 1;
        for op in &r.operators {
            worst = worst.max(op.max_residual);
            if op.verdict != "Zero" {
                return Err(format!("row {id} n = {n}: {} is {}", op.field, op.verdict));
            }
        }
        if !r.pass {
            return Err(format!("row {id} n = {n} failed: {:?}", r.notes));
        }
        Ok(())
    };
    for id in 0..CASE_COUNT {
        check(id, 3, &CaseParams::default())?;
        if id != 7 {
            check(id, 2, &CaseParams::default())?;
        }
    }
    let linear = CaseParams {
        case7: Case7Params::linear_c0(),
        ..CaseParams::default()
    };
    check(7, 3, &linear)?;
    let elapsed = start.elapsed();
    if elapsed > TABLE_BUDGET {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{runs} row checks, max residual {worst:.1e} < {TABLE_TOL:.0e}, {:.2}s", elapsed.as_secs_f64()))
}

fn kernel_property() -> Check {
    let mut r = rng(2);
    let ker = kernel(3);
    for i in 0..20 {
        let f = common::random_rhs_part(&mut r, 3).add(&Poly::var(Var::Ut).powi(2));
        for q in &ker {
            let v = is_symmetry(q, &f, 3).map_err(|e| format!("F{i}: {e}"))?;
            if !v.is_zero() {
                return Err(format!("{q} on {f}: {}", v.label()));
            }
        }
    }
    Ok(format!("20 right-hand sides x {} kernel operators all Zero", ker.len()))
}

fn negatives(s: &Session) -> Vec<(VectorField, Poly)> {
    let pairs = [
        ("t*@t", "ut^2"),
        ("t*@t", "exp(ut)"),
        ("@u", "u^2 + ut"),
        ("@u", "exp(u)*h(ut)"),
        ("@t", "t*ut^2"),
        ("u*@u", "ut^3 + 1"),
        ("x1*@u", "ut^2 - 1"),
        ("u*@u", "exp(ut)"),
        ("t*@u", "ut^2 + 1"),
        ("x1*@x1", "ut^2"),
    ];
    pairs
        .iter()
        .map(|(q, f)| (parse_vector_field(q, 3, s).unwrap(), parse_poly(f, s).unwrap()))
        .collect()
}

fn dual_derivation() -> Check {
    let s = session();
    let mut r = rng(3);
    let mut pairs: Vec<(VectorField, Poly, Option<bool>)> = Vec::new();
    for id in [1, 2, 3, 4, 5, 6, 8, 9, 10, 12] {
        let p = CaseParams::default();
        let ops = case_operators(id, 3, &p).unwrap();
        pairs.push((ops.last().unwrap().clone(), case_f(id, &p).unwrap(), Some(true)));
    }
    for (q, f) in negatives(&s) {
        pairs.push((q, f, Some(false)));
    }
    let pool = ["@t", "@u", "t*@t + x1*@x1 + x2*@x2 + x3*@x3", "u*@u", "x1*@x2 - x2*@x1", "t*@u"];
    for _ in 0..10 {
        let q = parse_vector_field(pool[r.gen_range(0..pool.len())], 3, &s).unwrap();
        let f = common::random_rhs_part(&mut r, 2).add(&Poly::var(Var::Ut).powi(2));
        pairs.push((q, f, None));
    }
    for (q, f, expect) in &pairs {
        let jet = is_symmetry(q, f, 3).map_err(|e| e.to_string())?;
        let det = determining_residuals(q, f, 3).map_err(|e| e.to_string())?;
        let agree = (jet.is_zero() && det.all_zero()) || (jet.is_nonzero() && det.any_nonzero());
        if !agree {
            return Err(format!("{q} on {f}: jet {} vs determining {}", jet.label(), det.verdict().label()));
        }
        if let Some(want) = expect {
            if jet.is_zero() != *want {
                return Err(format!("{q} on {f}: expected symmetry = {want}"));
            }
        }
    }
    let t_dt = pairs.iter().find(|(q, f, _)| q.to_string() == "t*@t" && f.to_string() == "ut^2").unwrap();
    let det = determining_residuals(&t_dt.0, &t_dt.1, 3).unwrap();
    let rhs = det.get("rhs").map(|e| e.residual.clone()).unwrap_or_else(Poly::zero);
    let want = Poly::var(Var::Ut).powi(2).scale(&q(2));
    if !zero(&rhs.sub(&want)) && !zero(&rhs.add(&want)) {
        return Err(format!("t*@t on ut^2: residual {rhs}, expected 2*ut^2"));
    }
    Ok(format!("{} pairs agree, including 10 positives and 10 negatives", pairs.len()))
}

fn small_poly(r: &mut impl Rng) -> Poly {
    let t = Poly::var(Var::T);
    let u = Poly::var(Var::U);
    let mut p = Poly::zero();
    for (i, j) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
        let c = r.gen_range(-2..=2);
        if c != 0 {
            p = p.add(&t.powi(i).mul(&u.powi(j)).scale(&q(c)));
        }
    }
    p
}

fn discriminant_covariance() -> Check {
    let mut r = rng(4);
    let mut done = 0;
    while done < 20 {
        let (zeta, phi) = (small_poly(&mut r), small_poly(&mut r));
        let delta = Poly::int([1, -1, 2, 3][r.gen_range(0..4)]);
        let jac = jacobian(&zeta, &phi);
        if zero(&jac) {
            continue;
        }
        let Ok(qf) = QuadraticForm::new(small_poly(&mut r), small_poly(&mut r), small_poly(&mut r)) else {
            continue;
        };
        let nq = coefficient_map(&qf, &zeta, &phi, &delta).map_err(|e| e.to_string())?;
        let lhs = delta.powi(4).mul(&discriminant(&nq));
        let rhs = jac.powi(2).mul(&discriminant(&qf));
        if !lhs.sub(&rhs).is_zero() {
            return Err(format!("zeta = {zeta}, phi = {phi}, delta = {delta}"));
        }
        done += 1;
    }
    let t = Poly::var(Var::T);
    let u = Poly::var(Var::U);
    let (zeta, phi) = (t.add(&u), t.sub(&u));
    let nq = coefficient_map(&QuadraticForm::from_ints(0, 1, 0).unwrap(), &zeta, &phi, &Poly::one()).unwrap();
    if (nq.a.clone(), nq.b.clone(), nq.c.clone()) != (Poly::int(-1), Poly::zero(), Poly::int(1)) {
        return Err(format!("(0,1,0) mapped to ({}, {}, {})", nq.a, nq.b, nq.c));
    }
    if jacobian(&zeta, &phi).powi(2) != Poly::int(4) {
        return Err("Jacobian squared is not 4".into());
    }
    Ok("20 random transforms exact; (0,1,0) -> (-1,0,1) with Jacobian^2 = 4".into())
}

fn classifier_round_trip() -> Check {
    let names = ["x-scale", "t-translate", "u-translate", "t-scale", "u-scale"];
    let values = [qr(1, 2), qr(2, 1), qr(3, 2), qr(-1, 3), qr(1, 3)];
    let mut r = rng(5);
    for id in 1..=12 {
        let base = classify(&case_f(id, &CaseParams::default()).unwrap()).map_err(|e| format!("row {id}: {e}"))?;
        for _ in 0..3 {
            let name = names[r.gen_range(0..names.len())];
            let v = values[r.gen_range(0..values.len())].clone();
            let slot = if name == "x-scale" { "delta" } else { "k" };
            let tr = reduction_catalog(name, &[(slot.to_string(), Poly::constant(v.clone()))].into()).unwrap();
            let g = transform_f(&case_f(id, &CaseParams::default()).unwrap(), &tr).unwrap();
            let c = classify(&g).map_err(|e| format!("row {id} after {name}({v}): {e}"))?;
            if c.case_id != id {
                return Err(format!("row {id} after {name}({v}) classified as {}", c.case_id));
            }
            if id >= 10 && ["eps0", "eps1", "eps2", "pm"].iter().any(|k| c.param(k) != base.param(k)) {
                return Err(format!("row {id} after {name}({v}) changed its sign class"));
            }
        }
    }
    let s = session();
    let named = [
        ("ut^2", 7),
        ("ut^2 - 1", 8),
        ("2*m*ut", 8),
        ("exp(ut)", 5),
        ("ut^3", 6),
        ("exp(u)*h(ut)", 2),
        ("cosh(u)^(-2)*ut^2 + 1", 12),
    ];
    for (f, id) in named {
        let c = classify(&parse_poly(f, &s).unwrap()).map_err(|e| format!("{f}: {e}"))?;
        if c.case_id != id {
            return Err(format!("{f} classified as {}, expected {id}", c.case_id));
        }
    }
    Ok("36 transformed rows and 7 named cases classified correctly".into())
}

fn reduction_fidelity() -> Check {
    let s = session();
    let exp_inv = reduction_catalog("exp-ut", &[("alpha".to_string(), Poly::one())].into()).unwrap();
    let g = transform_f(&parse_poly("ut^2*exp(1/ut)", &s).unwrap(), &exp_inv).map_err(|e| e.to_string())?;
    let want = Poly::var(Var::Ut).exp();
    if !zero(&g.sub(&want)) {
        return Err(format!("exp-ut map gave {g}"));
    }
    let tr = reduction_catalog("sinh-cosh", &[("mu".to_string(), Poly::zero())].into()).unwrap();
    let f = parse_poly("-u^(-2)*ut^2 + 1", &s).unwrap();
    let g = transform_f(&f, &tr).map_err(|e| e.to_string())?;
    let (gu, gt, g3) = (diff(&g, Var::U), diff(&g, Var::T), diff(&diff(&diff(&g, Var::Ut), Var::Ut), Var::Ut));
    let ops = OpaqueTable::new();
    let mut r = rng(6);
    let mut worst: f64 = 0.0;
    let mut points = 0;
    while points < 25 {
        let t = r.gen_range(tr.domain.t.0..tr.domain.t.1);
        let u = r.gen_range(tr.domain.u.0..tr.domain.u.1);
        let old = Env::new().with(Var::T, t).with(Var::U, u);
        let nt = eval(&tr.zeta, &old, &ops).map_err(|e| e.to_string())?;
        let nu = eval(&tr.phi, &old, &ops).map_err(|e| e.to_string())?;
        let env = Env::new().with(Var::T, nt).with(Var::U, nu).with(Var::Ut, r.gen_range(-2.0..2.0));
        let scale = eval(&g, &env, &ops).map_err(|e| e.to_string())?.abs().max(1.0);
        for p in [&gu, &gt, &g3] {
            let v = eval(p, &env, &ops).map_err(|e| e.to_string())?;
            worst = worst.max(v.abs() / scale);
        }
        points += 1;
    }
    if worst > MAP_TOL {
        return Err(format!("sinh-cosh image has residual {worst:e}"));
    }
    Ok(format!("exp-ut map exact; sinh-cosh image has constant coefficients at 25 points ({worst:.1e})"))
}

fn rational_fit_soundness() -> Check {
    let ut = Poly::var(Var::Ut);
    let fixtures = [
        ("exp(ut)", ut.exp(), Some([0, 0, 1, 1])),
        ("ut^3", ut.powi(3), Some([0, 1, 0, 3])),
        ("ut^(5/2)", ut.pow_q(&qr(5, 2)), None),
        ("ut^(-1/3)", ut.pow_q(&qr(-1, 3)), None),
        ("ut^2*exp(1/ut)", ut.powi(2).mul(&ut.powi(-1).exp()), Some([1, 0, 0, -1])),
    ];
    for (name, f, want) in fixtures {
        let fit = rational_fit(&f).map_err(|e| format!("{name}: {e}"))?;
        if !zero(&fit.residual(&f)) {
            return Err(format!("{name}: residual does not vanish"));
        }
        if let Some(w) = want {
            let got = [&fit.a, &fit.b, &fit.c, &fit.d];
            if got.iter().zip(w).any(|(g, w)| **g != Poly::int(w)) {
                return Err(format!("{name}: fit ({}, {}, {}, {})", fit.a, fit.b, fit.c, fit.d));
            }
        }
    }
    Ok("fits for exp(ut), ut^beta (beta = 3, 5/2, -1/3) and ut^2*exp(1/ut) have Zero residual".into())
}

fn algebra_structure() -> Check {
    let p = CaseParams::default();
    for id in [4, 5, 6, 8] {
        let basis = case_operators(id, 3, &p).unwrap();
        let sc = structure_constants(&basis).map_err(|e| format!("row {id}: {e}"))?;
        if Dimension::Finite(sc.dim()) != algebra_dimension(id, 3) {
            return Err(format!("row {id}: dimension {}", sc.dim()));
        }
    }
    let basis = case_operators(8, 3, &p).unwrap();
    if basis.len() != 21 {
        return Err(format!("row 8 basis has {} operators", basis.len()));
    }
    let mut r = rng(8);
    for _ in 0..50 {
        let (i, j, k) = (r.gen_range(0..21), r.gen_range(0..21), r.gen_range(0..21));
        let (a, b, c) = (&basis[i], &basis[j], &basis[k]);
        let br = |x: &VectorField, y: &VectorField| lie_bracket(x, y).unwrap();
        let sum = br(a, &br(b, c)).add(&br(b, &br(c, a))).add(&br(c, &br(a, b)));
        if !field_is_zero(&sum) {
            return Err(format!("Jacobi fails on ({i}, {j}, {k})"));
        }
    }
    Ok("rows 4, 5, 6, 8 close; row 8 has dimension 21; Jacobi holds on 50 triples".into())
}

fn oracle_layer() -> Check {
    let s = session();
    let ops = OpaqueTable::new();
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 200 {
        let p = common::random_expr(&mut r, 4);
        let v = common::VARS[r.gen_range(0..3)];
        let env = common::random_point(&mut r);
        let x = env.vars[&v];
        let (mut hi, mut lo) = (env.clone(), env.clone());
        hi.set(v, x + FD_STEP);
        lo.set(v, x - FD_STEP);
        let (Ok(d), Ok(a), Ok(b)) = (eval(&diff(&p, v), &env, &ops), eval(&p, &hi, &ops), eval(&p, &lo, &ops)) else {
            continue;
        };
        let fd = (a - b) / (2.0 * FD_STEP);
        let rel = (d - fd).abs() / d.abs().max(1.0);
        if rel > FD_TOL {
            return Err(format!("d/d{} of {p}: {d} vs {fd}", v.name()));
        }
        worst = worst.max(rel);
        done += 1;
    }
    for i in 0..200 {
        let p = common::random_expr(&mut r, 4);
        let text = print_poly(&p);
        match parse_poly(&text, &s) {
            Ok(back) if back == p => {}
            Ok(back) => return Err(format!("round trip {i}: {text} -> {back}")),
            Err(e) => return Err(format!("round trip {i}: {text}: {e}")),
        }
    }
    Ok(format!("200 derivatives within {FD_TOL:.0e} (worst {worst:.1e}); 200 parser round trips exact"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("table reproduction", table_reproduction),
        ("kernel property", kernel_property),
        ("dual derivation", dual_derivation),
        ("discriminant covariance", discriminant_covariance),
        ("classifier round trip", classifier_round_trip),
        ("reduction fidelity", reduction_fidelity),
        ("rational fit soundness", rational_fit_soundness),
        ("algebra structure", algebra_structure),
        ("oracle layer", oracle_layer),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why}", i + 1)
            }
        }
    }
    println!("acceptance: {} of 9 passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
