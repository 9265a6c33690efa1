//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use modinv::calibration::{self, calibration_suite};
use modinv::invariants::{linear_quotient, subsets};
use modinv::milnor::enumerate_indices;
use modinv::steenrod::{bockstein, pk, st};
use modinv::theorems::{self, Engines, Report};
use modinv::{st_from_power_map, BracketSpec, Element, FieldConfig, GeneratorTable, Invariants, MilnorIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

const LIMIT_DICKSON: Duration = Duration::from_secs(10);
const LIMIT_AXIOMS: Duration = Duration::from_secs(30);
const LIMIT_ENGINES: Duration = Duration::from_secs(120);
const LIMIT_T11: Duration = Duration::from_secs(300);
const LIMIT_P12: Duration = Duration::from_secs(60);
const LIMIT_T13: Duration = Duration::from_secs(180);
const LIMIT_L23: Duration = Duration::from_secs(60);
const LIMIT_P4X: Duration = Duration::from_secs(180);
const LIMIT_SL: Duration = Duration::from_secs(60);
const LIMIT_P22: Duration = Duration::from_secs(60);

const CARTAN_SEED: u64 = 0x5eed_cafe;
const CARTAN_PAIRS: usize = 200;
const CARTAN_MAX_K: u64 = 6;
const CATALOG_MAX_DEGREE: u64 = 30;
const ENGINE_DEGREE: u64 = 20;
const T11_BUDGET: u64 = 20;

fn f(p: u32) -> FieldConfig {
    FieldConfig::new(p).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn summarize(report: &Report) -> Check {
    if let Some(bad) = report.mismatches().next() {
        return Err(format!(
            "{} mismatches; first: {} {} on {}",
            report.count(theorems::CaseVerdict::Mismatch),
            bad.theorem,
            bad.operation,
            bad.input
        ));
    }
    ensure(!report.records.is_empty(), || "empty grid".into())?;
    Ok(format!(
        "{} cases, {} explained, {} with oracle",
        report.records.len(),
        report.count(theorems::CaseVerdict::Explained),
        report.oracle_cases()
    ))
}

fn dickson() -> Check {
    let mut cases = 0;
    for p in [3, 5] {
        for n in 1..=3 {
            let inv = Invariants::new(f(p), n).map_err(|e| e.to_string())?;
            let l = inv.l_top(n);
            for s in 0..=n {
                let q = inv.q(n, s).map_err(|e| e.to_string())?;
                let ls = inv.l(n, s).map_err(|e| e.to_string())?;
                ensure(&q * &l == ls, || format!("Q({n},{s}) L_{n} != L_{{{n},{s}}} at p = {p}"))?;
                cases += 1;
            }
        }
    }
    let inv = Invariants::new(f(3), 2).unwrap();
    let table = GeneratorTable::cohomology(f(3), 2).unwrap();
    let literal = Element::parse(&table, "y1^6 + y1^4*y2^2 + y1^2*y2^4 + y2^6").unwrap();
    let solved = linear_quotient(&inv.l(2, 1).unwrap(), &inv.l_top(2))
        .map_err(|e| e.to_string())?
        .ok_or("L_{2,1} / L_2 has no polynomial quotient")?;
    ensure(solved == literal, || format!("linear solve gives {solved}"))?;
    ensure(inv.q(2, 1).unwrap() == literal, || "Q(2,1) differs from the literal".into())?;
    Ok(format!("{cases} products, Q(2,1) matches the linear solve"))
}

/// Monomials `x^ε y^a` of rank `n` with `a_i ≤ 3`, as elements with degrees.
fn monomial_pool(inv: &Invariants) -> Vec<(u64, Element)> {
    let n = inv.rank();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let mut exps = vec![0u64; n];
        loop {
            let mut u = Element::one(inv.table());
            for i in 0..n {
                if mask & (1 << i) != 0 {
                    u = &u * &inv.x(i + 1);
                }
                u = &u * &inv.y(i + 1).pow(exps[i]);
            }
            out.push((u.degree().unwrap(), u));
            let mut i = 0;
            while i < n && exps[i] == 3 {
                exps[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
            exps[i] += 1;
        }
    }
    out
}

fn random_homogeneous(rng: &mut ChaCha8Rng, pool: &[(u64, Element)]) -> Element {
    let (d, first) = &pool[rng.gen_range(0..pool.len())];
    let same: Vec<&Element> = pool.iter().filter(|(e, _)| e == d).map(|(_, u)| u).collect();
    let mut u = first.scale(rng.gen_range(1..3));
    for _ in 0..rng.gen_range(0..3) {
        let v = same[rng.gen_range(0..same.len())];
        u.add_scaled(v, rng.gen_range(1..3));
    }
    u
}

/// Catalog invariants of degree at most `CATALOG_MAX_DEGREE` at `p = 3`.
fn catalog(n: usize) -> Vec<(String, Element)> {
    let field = f(3);
    let inv = Invariants::new(field, n).unwrap();
    let mut out = Vec::new();
    for k in 0..=n {
        let mut e = vec![0u32; n - k];
        loop {
            let spec = BracketSpec::new(n, k, e.clone()).unwrap();
            out.push((format!("[{k};{e:?}]"), inv.bracket(&spec).unwrap()));
            let mut i = 0;
            while i < e.len() && e[i] == 2 {
                e[i] = 0;
                i += 1;
            }
            if i == e.len() {
                break;
            }
            e[i] += 1;
        }
    }
    for s in 0..n {
        out.push((format!("Q({n},{s})"), inv.q(n, s).unwrap()));
    }
    for s in theorems::mui_indices(n) {
        out.push((format!("M_{n}{s:?}"), inv.mui(&s).unwrap()));
    }
    out.push((format!("V_{n}"), inv.v(n).unwrap()));
    out.retain(|(_, u)| !u.is_zero() && u.degree().is_some_and(|d| d <= CATALOG_MAX_DEGREE));
    out
}

fn axioms() -> Check {
    let field = f(3);
    let mut rng = ChaCha8Rng::seed_from_u64(CARTAN_SEED);
    let pools: Vec<Vec<(u64, Element)>> = (1..=3)
        .map(|n| {
            let inv = Invariants::new(field, n).unwrap();
            monomial_pool(&inv)
                .into_iter()
                .filter(|(d, _)| *d <= 12)
                .collect()
        })
        .collect();
    let mut checks = 0;
    for _ in 0..CARTAN_PAIRS {
        let pool = &pools[rng.gen_range(0..3)];
        let u = random_homogeneous(&mut rng, pool);
        let v = random_homogeneous(&mut rng, pool);
        let uv = &u * &v;
        for k in 0..=CARTAN_MAX_K {
            let lhs = pk(k, &uv).map_err(|e| e.to_string())?;
            let mut rhs = Element::zero(u.table());
            for i in 0..=k {
                rhs.add_assign_ref(&(&pk(i, &u).unwrap() * &pk(k - i, &v).unwrap()));
            }
            ensure(lhs == rhs, || format!("Cartan fails for P^{k} on ({u}) * ({v})"))?;
            let via_coaction = st(&MilnorIndex::p_power(k as u32), &uv).map_err(|e| e.to_string())?;
            ensure(lhs == via_coaction, || format!("P^{k} ({uv}) differs between engines"))?;
            checks += 1;
        }
        for w in [&u, &v, &uv] {
            let bb = bockstein(&bockstein(w).unwrap()).unwrap();
            ensure(bb.is_zero(), || format!("beta^2 ({w}) = {bb}"))?;
        }
    }
    let mut unstable = 0;
    for n in [2, 3] {
        for (label, u) in catalog(n) {
            let d = u.degree().unwrap();
            for k in d / 2 + 1..=d / 2 + 3 {
                let v = pk(k, &u).map_err(|e| e.to_string())?;
                ensure(v.is_zero(), || format!("P^{k} {label} = {v}, expected 0"))?;
                unstable += 1;
            }
            if d % 2 == 0 {
                let v = pk(d / 2, &u).unwrap();
                ensure(v == u.pow(3), || format!("P^{} {label} is not the cube", d / 2))?;
                unstable += 1;
            }
            let bb = bockstein(&bockstein(&u).unwrap()).unwrap();
            ensure(bb.is_zero(), || format!("beta^2 {label} != 0"))?;
        }
    }
    Ok(format!("{checks} Cartan checks, {unstable} instability checks"))
}

fn engines_agree() -> Check {
    let field = f(3);
    let cal = calibration::global().map_err(|e| e.to_string())?;
    let mut compared = 0;
    let mut unstable_zero = 0;
    for (label, u) in calibration_suite(field).map_err(|e| e.to_string())? {
        let q = u.degree().unwrap();
        for m in [1, 2] {
            for idx in enumerate_indices(&field, None, Some(ENGINE_DEGREE), Some(m)).unwrap() {
                let coaction = st(&idx, &u).map_err(|e| e.to_string())?;
                if idx.r0(q).is_none() {
                    ensure(coaction.is_zero(), || format!("{idx} {label} = {coaction} with r_0 < 0"))?;
                    unstable_zero += 1;
                    continue;
                }
                let oracle = st_from_power_map(&idx, &u, m).map_err(|e| e.to_string())?;
                ensure(coaction == oracle, || {
                    format!("{idx} on {label}, m = {m}: coaction {coaction}, power map {oracle}")
                })?;
                compared += 1;
            }
        }
    }
    Ok(format!(
        "{compared} comparisons, {unstable_zero} unstable zeros, {} calibration observations",
        cal.observations().len()
    ))
}

fn theorem11() -> Check {
    let engines = Engines::new(f(3), true);
    let mut report = theorems::verify_theorem11_grid(&engines, 2, &[0, 1, 2], &[0, 1, 2], &[1, 2], T11_BUDGET)
        .map_err(|e| e.to_string())?;
    report.extend(
        theorems::verify_theorem11_grid(&engines, 3, &[0, 1, 3], &[0, 1, 2], &[1, 2], T11_BUDGET)
            .map_err(|e| e.to_string())?,
    );
    summarize(&report)
}

fn prop12() -> Check {
    let mut report = Report::default();
    for n in [2, 3] {
        report.extend(theorems::verify_prop12_grid(f(3), n, &[0, 1]).map_err(|e| e.to_string())?);
    }
    summarize(&report)
}

fn theorem13() -> Check {
    let e3 = Engines::new(f(3), true);
    let mut report = Report::default();
    for n in [2, 3] {
        report.extend(theorems::verify_theorem13(&e3, n, None).map_err(|e| e.to_string())?);
    }
    let e5 = Engines::new(f(5), true);
    report.extend(theorems::verify_theorem13(&e5, 2, Some(10)).map_err(|e| e.to_string())?);
    let inv = Invariants::new(f(3), 2).unwrap();
    let m21 = inv.mui(&[1]).unwrap();
    let m20 = inv.mui(&[0]).unwrap();
    ensure(pk(1, &m21).unwrap() == m20, || "P^1 M_{2,1} != M_{2,0}".into())?;
    ensure(pk(1, &m20).unwrap().is_zero(), || "P^1 M_{2,0} != 0".into())?;
    let p3 = &(&m20 * &inv.q(2, 1).unwrap()) - &(&m21 * &inv.q(2, 0).unwrap());
    ensure(pk(3, &m20).unwrap() == p3, || "P^3 M_{2,0} anchor fails".into())?;
    summarize(&report).map(|s| format!("{s}, 3 anchors"))
}

fn lemma23() -> Check {
    let mut report = theorems::verify_lemma23_grid(f(3), 1, &[vec![0], vec![1]], &[1, 2])
        .map_err(|e| e.to_string())?;
    report.extend(
        theorems::verify_lemma23_grid(f(3), 2, &[vec![0, 1], vec![0, 2]], &[1, 2])
            .map_err(|e| e.to_string())?,
    );
    summarize(&report)
}

fn props4x() -> Check {
    let engines = Engines::new(f(3), true);
    let mut report = Report::default();
    for n in [2, 3] {
        report.extend(theorems::verify_prop43(&engines, n).map_err(|e| e.to_string())?);
        report.extend(theorems::verify_prop44(&engines, n).map_err(|e| e.to_string())?);
        report.extend(theorems::verify_prop45(&engines, n).map_err(|e| e.to_string())?);
    }
    let readings: Vec<&String> = report.notes.iter().filter(|n| n.contains("drop-s0")).collect();
    summarize(&report).map(|s| match readings.first() {
        Some(r) => format!("{s}; {r}"),
        None => s,
    })
}

fn sl_invariance() -> Check {
    let mut checked = 0;
    for n in [2, 3] {
        let inv = Invariants::new(f(3), n).unwrap();
        let mut items: Vec<(String, Element)> = Vec::new();
        for k in 0..=n {
            for e in (0..(3usize.pow((n - k) as u32))).map(|c| {
                (0..n - k).map(|i| (c / 3usize.pow(i as u32) % 3) as u32).collect::<Vec<u32>>()
            }) {
                let spec = BracketSpec::new(n, k, e.clone()).unwrap();
                items.push((format!("[{k};{e:?}]"), inv.bracket(&spec).unwrap()));
            }
        }
        for s in 0..n {
            items.push((format!("Q({n},{s})"), inv.q(n, s).unwrap()));
        }
        for size in 1..=n {
            for s in subsets(n, size) {
                let s: Vec<u32> = s.into_iter().map(|v| v as u32).collect();
                items.push((format!("M_{n}{s:?}"), inv.mui(&s).unwrap()));
            }
        }
        for (label, u) in items {
            let v = inv.sl_orbit_check(&u).map_err(|e| e.to_string())?;
            ensure(v.is_verified(), || format!("{label}: {v}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} invariants fixed"))
}

fn prop22() -> Check {
    let mut report = Report::default();
    for n in [2, 3] {
        report.extend(theorems::verify_prop22iii(f(3), n, &[1]).map_err(|e| e.to_string())?);
    }
    summarize(&report)
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Check); 10] = [
        ("dickson certification", LIMIT_DICKSON, dickson),
        ("steenrod axioms", LIMIT_AXIOMS, axioms),
        ("cross-engine agreement", LIMIT_ENGINES, engines_agree),
        ("bracket action grid", LIMIT_T11, theorem11),
        ("exponent shift relation", LIMIT_P12, prop12),
        ("reduced powers on mui invariants", LIMIT_T13, theorem13),
        ("power map on brackets", LIMIT_L23, lemma23),
        ("delta operations on mui invariants", LIMIT_P4X, props4x),
        ("SL invariance", LIMIT_SL, sl_invariance),
        ("power map on x1...xn", LIMIT_P22, prop22),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let outcome = match result {
            Ok(detail) if elapsed <= limit => Ok(detail),
            Ok(detail) => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            Err(e) => Err(e),
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({elapsed:.2?}): {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of 10 criteria failed");
        ExitCode::FAILURE
    }
}
