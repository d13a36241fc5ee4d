//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

use num_traits::{Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use ringext::ideal::{all_ideals, Side, DEFAULT_MAX_IDEALS};
use ringext::oracle::{build_counterexample, is_extendable, null_vector_integer, oracle_extension_property, OracleConfig, DEFAULT_EXTENSION_BUDGET};
use ringext::orthogonality::{equal_up_to_sign, MatrixKind, OrthogonalityContext};
use ringext::rational::{self, Rational};
use ringext::ring::{build_ring, FiniteRing, OrbitKind, RingConfig};
use ringext::weight::{builtin_weight, make_weight, BuiltinWeight, Weight};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

type Check = Result<String, String>;

fn ring(spec: &str) -> Arc<FiniteRing> {
    ring_with_cap(spec, ringext::ring::DEFAULT_MAX_ORDER)
}

fn ring_with_cap(spec: &str, cap: usize) -> Arc<FiniteRing> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let cfg = RingConfig { max_order: cap, base_dir: Some(fixtures) };
    build_ring(spec, &cfg).unwrap_or_else(|e| panic!("{spec}: {e}"))
}

fn ctx(r: &Arc<FiniteRing>) -> OrthogonalityContext {
    OrthogonalityContext::new(r).unwrap_or_else(|e| panic!("{}: {e}", r.spec()))
}

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn ints(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().map(|&x| rational::int(x)).collect()).collect()
}

fn random_rational(rng: &mut StdRng, span: i64) -> Rational {
    q(rng.gen_range(-span..=span), rng.gen_range(1..=5))
}

/// Random value per double orbit, `w(0) = 0`.
fn random_weight(r: &Arc<FiniteRing>, rng: &mut StdRng, span: i64) -> Weight {
    let n = r.orbits(OrbitKind::Double).len();
    let values = (0..n).map(|_| random_rational(rng, span)).collect();
    Weight::from_orbit_values(r, values, Rational::zero())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ac1() -> Check {
    let r = ring("Z(4)");
    let c = ctx(&r);
    let lee = builtin_weight(&r, &BuiltinWeight::Lee).unwrap();
    let ham = builtin_weight(&r, &BuiltinWeight::Hamming).unwrap();
    let wl = c.build_matrix(&lee, MatrixKind::W0).unwrap();
    let wh = c.build_matrix(&ham, MatrixKind::W0).unwrap();
    ensure(wl.cols == ["2R", "R"], || format!("column order {:?}", wl.cols))?;
    ensure(wl.entries == ints(&[&[0, 2], &[2, 1]]), || format!("Lee W0 = {:?}", wl.entries))?;
    ensure(wh.entries == ints(&[&[0, 1], &[1, 1]]), || format!("Hamming W0 = {:?}", wh.entries))?;
    Ok("Lee [[0,2],[2,1]], Hamming [[0,1],[1,1]] under 2R < R".into())
}

fn ac2() -> Check {
    let r = ring("Z(4)");
    let c = ctx(&r);
    let mut rng = StdRng::seed_from_u64(2);
    let cfg = OracleConfig::default();
    let mut failing = 0;
    for i in 0..100 {
        let mut t = BTreeMap::new();
        // small numerators so that w(2) = 0 occurs
        t.insert("1".to_string(), random_rational(&mut rng, 3));
        t.insert("2".to_string(), random_rational(&mut rng, 3));
        let w = make_weight(&r, &t).unwrap();
        let expected = !w.value(2).is_zero();
        let v = c.criterion(&w, true).unwrap();
        let det_nonzero = !c.det_w0(&w).unwrap().is_zero();
        let oracle = oracle_extension_property(&r, &w, &cfg).unwrap().extension_property;
        ensure(v.passes == Some(expected) && det_nonzero == expected && oracle == expected, || {
            format!("sample {i} {:?}: criterion {:?}, det {det_nonzero}, oracle {oracle}", w.to_table(), v.passes)
        })?;
        failing += usize::from(!expected);
    }
    Ok(format!("100 weights agree ({failing} with w(2) = 0)"))
}

fn ac3() -> Check {
    let mut rng = StdRng::seed_from_u64(3);
    let mut summary = Vec::new();
    for (spec, qq, n) in [("Mat(2,GF(2))", 2i64, 2usize), ("Mat(2,GF(3))", 3, 2), ("Mat(3,GF(2))", 2, 3)] {
        let r = ring(spec);
        let c = ctx(&r);
        let mut failing = 0;
        for i in 0..100 {
            let mut w: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng, 4)).collect();
            // push a third of the samples onto the boundary of each condition
            match i % 6 {
                0 => w[0] = Rational::zero(),
                1 => w[1] = rational::int(qq + 1) * &w[0] / rational::int(qq),
                2 if n == 3 => w[2] = (rational::int(14) * &w[1] - rational::int(7) * &w[0]) / rational::int(8),
                _ => {}
            }
            let mut expected = !w[0].is_zero() && rational::int(qq) * &w[1] != rational::int(qq + 1) * &w[0];
            if n == 3 {
                expected &= rational::int(8) * &w[2] + rational::int(7) * &w[0] != rational::int(14) * &w[1];
            }
            let weight = builtin_weight(&r, &BuiltinWeight::Rank(Some(w.clone()))).unwrap();
            let v = c.criterion(&weight, true).unwrap();
            ensure(v.passes == Some(expected), || format!("{spec} ranks {w:?}: criterion {:?}, expected {expected}", v.passes))?;
            failing += usize::from(!expected);
        }
        summary.push(format!("{spec} ({failing} failing)"));
    }
    Ok(format!("100 rank weights each on {}", summary.join(", ")))
}

fn ac4() -> Check {
    let mut done = Vec::new();
    for n in [2usize, 3] {
        for qq in [2u64, 3, 4] {
            let spec = format!("Mat({n},GF({qq}))");
            let r = ring_with_cap(&spec, 1 << 18);
            let c = ctx(&r);
            let w = builtin_weight(&r, &BuiltinWeight::Rank(None)).unwrap();
            let v = c.criterion(&w, true).unwrap();
            ensure(v.passes == Some(true), || format!("{spec}: rank metric fails at {:?}", v.failing))?;
            done.push(spec);
        }
    }
    Ok(format!("rank metric passes on {}", done.join(", ")))
}

fn pir_suite() -> Vec<String> {
    let mut specs: Vec<String> = (2..=16).map(|m| format!("Z({m})")).collect();
    specs.extend([2, 3, 4, 5, 7, 8, 9].iter().map(|q| format!("GF({q})")));
    specs.extend(
        ["ZChain(2,2)", "ZChain(2,3)", "PChain(2,2)", "Mat(2,GF(2))", "Mat(2,GF(3))", "Mat(2,ZChain(2,2))", "Prod(Z(4),GF(2))", "Prod(Mat(2,GF(2)),Z(9))"]
            .iter()
            .map(|s| s.to_string()),
    );
    specs
}

fn ac5() -> Check {
    let mut rng = StdRng::seed_from_u64(5);
    let suite = pir_suite();
    for spec in &suite {
        let r = ring(spec);
        let c = ctx(&r);
        ensure(c.classification().is_pir, || format!("{spec} not classified as PIR"))?;
        ensure(c.tq_is_identity(), || format!("{spec}: TQ != I"))?;
        for i in 0..10 {
            let w = random_weight(&r, &mut rng, 9).with_w0(random_rational(&mut rng, 4));
            let t = c.triangularity(&w).unwrap();
            ensure(t.lower_triangular, || format!("{spec} sample {i}: WQ not lower triangular at {:?}", t.violations))?;
            ensure(t.diagonal_matches, || format!("{spec} sample {i}: diagonal {:?} vs {:?}", t.diagonal, t.expected))?;
            let det_w = c.build_matrix(&w, MatrixKind::W).unwrap().det().unwrap();
            let prod: Rational = t.diagonal.iter().cloned().product();
            ensure(det_w.abs() == prod.abs(), || format!("{spec} sample {i}: |det W| {det_w} vs |prod| {prod}"))?;
            let p = c.det_poly_in_w0(&w).unwrap();
            ensure(p.divisible_by_w0 && p.quotient_matches_det_w0, || format!("{spec} sample {i}: det W in w0 {:?}", p))?;
        }
    }
    Ok(format!("{} rings x 10 weights: TQ = I, WQ lower triangular, diagonal, |det W|, det W0 from det W", suite.len()))
}

fn ac6() -> Check {
    let suite = pir_suite();
    for spec in &suite {
        let r = ring(spec);
        let c = ctx(&r);
        let h = builtin_weight(&r, &BuiltinWeight::Hamming).unwrap();
        for f in c.diagonal_factors(&h).unwrap().iter().skip(1) {
            ensure(f.nonzero == rational::int(-1), || format!("{spec}: factor at {} is {}", f.right_ideal, f.nonzero))?;
        }
        ensure(c.criterion(&h, false).unwrap().passes == Some(true), || format!("{spec}: Hamming fails"))?;
    }
    Ok(format!("all nonzero factors -1 and Hamming passes on {} Frobenius rings", suite.len()))
}

fn mobius_nt(mut n: u64) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

fn ac7() -> Check {
    let mut rng = StdRng::seed_from_u64(7);
    let mut checked = 0;
    for m in [12u64, 24, 36] {
        let r = ring(&format!("Z({m})"));
        let c = ctx(&r);
        let mut weights = vec![
            builtin_weight(&r, &BuiltinWeight::Hamming).unwrap(),
            builtin_weight(&r, &BuiltinWeight::Homogeneous(rational::one())).unwrap(),
        ];
        weights.extend((0..20).map(|_| random_weight(&r, &mut rng, 6)));
        for w in &weights {
            // w on Z(m) depends only on gcd(x, m)
            let wv = |x: u64| w.value((x % m) as u32).clone();
            let mut expected: BTreeMap<String, Rational> = BTreeMap::new();
            for a in divisors(m).into_iter().filter(|&a| a < m && mobius_nt(m / a) != 0) {
                let k = m / a;
                let first: Rational = divisors(k).iter().map(|&s| wv(s * a) * rational::int(mobius_nt(k / s))).sum();
                let second: Rational = divisors(k).iter().map(|&s| wv(s * a) * rational::int(mobius_nt(s))).sum();
                let sign = rational::int(mobius_nt(k));
                if first != sign * &second {
                    return Err(format!("Z({m}) a={a}: the two number-theoretic forms differ"));
                }
                let label = if a == 1 { "R".to_string() } else { format!("{a}R") };
                expected.insert(label, first);
            }
            let v = c.criterion(w, true).unwrap();
            let got: BTreeMap<String, Rational> = v.factors.iter().filter(|(l, _)| v.decisive.contains(l)).cloned().collect();
            ensure(got == expected, || format!("Z({m}) {:?}: factors {got:?} vs {expected:?}", w.to_table()))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} weights on Z(12), Z(24), Z(36): socle factors equal the number-theoretic sums"))
}

fn ac8() -> Check {
    let r = ring("Table(fq_xy.json)");
    let c = ctx(&r);
    ensure(!c.classification().is_pir && c.classification().is_frobenius, || "classification".into())?;
    let qm = c.structure_matrix(MatrixKind::Q);
    ensure(qm.det().unwrap().is_zero(), || "Q is invertible".into())?;
    let xy = r.parse_element("xy").unwrap();
    let mut rng = StdRng::seed_from_u64(8);
    let mut constant: Option<Rational> = None;
    let mut zero_samples = 0;
    for i in 0..20 {
        let mut w = random_weight(&r, &mut rng, 6);
        if i % 5 == 0 {
            let mut vals = w.orbit_values().to_vec();
            vals[r.orbits(OrbitKind::Double).class_of(xy)] = Rational::zero();
            w = Weight::from_orbit_values(&r, vals, Rational::zero());
        }
        let d = c.det_w0(&w).unwrap();
        let wxy = w.value(xy).clone();
        ensure(d.is_zero() == wxy.is_zero(), || format!("sample {i}: det W0 = {d}, w(xy) = {wxy}"))?;
        if wxy.is_zero() {
            zero_samples += 1;
            continue;
        }
        let ratio = d / num_traits::pow(wxy, 5);
        match &constant {
            None => constant = Some(ratio),
            Some(k) => ensure(k == &ratio, || format!("sample {i}: det W0 / w(xy)^5 = {ratio}, earlier {k}"))?,
        }
        let v = c.criterion(&w, true).unwrap();
        ensure(v.refused.is_some() && v.passes.is_none(), || "criterion not refused".into())?;
    }
    let k = constant.ok_or("no sample with w(xy) != 0")?;
    ensure(equal_up_to_sign(&k, &rational::int(2)), || format!("constant {k}"))?;
    Ok(format!("Q singular; det W0 = {k} w(xy)^5 on 20 weights ({zero_samples} with w(xy) = 0)"))
}

fn ac9() -> Check {
    let z4 = ring("Z(4)");
    let t: BTreeMap<String, Rational> = [("1", 1), ("2", 0), ("3", 1)].iter().map(|&(k, v)| (k.to_string(), rational::int(v))).collect();
    let w4 = make_weight(&z4, &t).unwrap();
    let m2 = ring("Mat(2,GF(2))");
    let wm = builtin_weight(&m2, &BuiltinWeight::Rank(Some(vec![rational::int(2), rational::int(3)]))).unwrap();
    let mut out = Vec::new();
    for (r, w) in [(z4, w4), (m2, wm)] {
        let c = ctx(&r);
        let v = null_vector_integer(&c.build_matrix(&w, MatrixKind::W0).unwrap()).ok_or("W0 invertible")?;
        let pair = build_counterexample(&c, &w, &v).map_err(|e| e.to_string())?;
        ensure(pair.defect_zero && pair.orbit_multisets_differ, || format!("{}: pair checks", r.spec()))?;
        let phi = pair.map(&r);
        ensure(phi.is_isometry(&w).unwrap(), || "not an isometry".into())?;
        let ext = is_extendable(&phi, &w, DEFAULT_EXTENSION_BUDGET).map_err(|e| e.to_string())?;
        ensure(!ext.extendable, || format!("{}: extension found {:?}", r.spec(), ext.witness))?;
        out.push(format!(
            "{} v={:?} g+=({}) g-=({}) {} maps searched",
            r.spec(),
            v,
            pair.g_plus.join(","),
            pair.g_minus.join(","),
            ext.maps_searched
        ));
    }
    Ok(out.join("; "))
}

/// Built-ins, random weights, and weights vanishing on a minimal right ideal or the whole socle.
fn battery(r: &Arc<FiniteRing>, rng: &mut StdRng) -> Vec<(String, Weight)> {
    let mut out: Vec<(String, Weight)> = Vec::new();
    for kind in [
        BuiltinWeight::Hamming,
        BuiltinWeight::Homogeneous(rational::one()),
        BuiltinWeight::Homogeneous(q(5, 2)),
        BuiltinWeight::Lee,
        BuiltinWeight::Rank(None),
    ] {
        if let Ok(w) = builtin_weight(r, &kind) {
            out.push((kind.name().to_string(), w));
        }
    }
    let right = all_ideals(r, Side::Right, DEFAULT_MAX_IDEALS).unwrap();
    let socle = right.ideal(right.socle_id().unwrap()).clone();
    let atoms: Vec<usize> = right.covers().into_iter().filter(|&(lo, _)| lo == 0).map(|(_, hi)| hi).collect();
    let double = r.orbits(OrbitKind::Double);
    let zero_on = |w: &Weight, elems: &[u32]| {
        let mut vals = w.orbit_values().to_vec();
        for &x in elems {
            vals[double.class_of(x)] = Rational::zero();
        }
        Weight::from_orbit_values(r, vals, Rational::zero())
    };
    let mut i = 0;
    while out.len() < 24 {
        let base = random_weight(r, rng, 40);
        match i % 3 {
            0 => out.push((format!("random {i}"), base)),
            1 => {
                let atom = right.ideal(atoms[(i / 3) % atoms.len()]);
                out.push((format!("zero on {}", atom.label()), zero_on(&base, atom.elements())));
            }
            _ => out.push(("zero on socle".to_string(), zero_on(&base, socle.elements()))),
        }
        i += 1;
    }
    out
}

fn ac10() -> Check {
    let mut rng = StdRng::seed_from_u64(10);
    let cfg = OracleConfig::default();
    let mut rings = 0;
    let mut total = 0;
    let mut failing = 0;
    for spec in pir_suite() {
        let r = ring(&spec);
        if r.order() > 16 {
            continue;
        }
        let c = ctx(&r);
        rings += 1;
        for (name, w) in battery(&r, &mut rng) {
            let verdict = c.criterion(&w, true).unwrap().passes.unwrap();
            let report = oracle_extension_property(&r, &w, &cfg).map_err(|e| format!("{spec} {name}: {e}"))?;
            ensure(report.extension_property == verdict, || {
                format!("{spec} {name} {:?}: criterion {verdict}, oracle {}", w.to_table(), report.extension_property)
            })?;
            total += 1;
            failing += usize::from(!verdict);
        }
    }
    Ok(format!("{total} ring/weight pairs on {rings} rings agree ({failing} without the Extension Property)"))
}

fn main() {
    let criteria: [(&str, &str, fn() -> Check, u64); 10] = [
        ("AC1", "Z4 orthogonality matrices", ac1, 1),
        ("AC2", "Z4 criterion vs w(2), det W0, oracle", ac2, 120),
        ("AC3", "matrix-ring conditions", ac3, 120),
        ("AC4", "rank metric on Mat(n,GF(q))", ac4, 60),
        ("AC5", "structure theorems on PIR suite", ac5, 600),
        ("AC6", "Hamming factors", ac6, 600),
        ("AC7", "Z(m) number-theoretic form", ac7, 60),
        ("AC8", "singular Q on F2[x,y]/(x^2,y^2)", ac8, 60),
        ("AC9", "counterexample pipeline", ac9, 120),
        ("AC10", "oracle/criterion agreement", ac10, 1800),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with("AC")).collect();
    let mut failed = 0;
    for (id, title, check, limit) in criteria {
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > Duration::from_secs(limit) => Err(format!("took {elapsed:.2?}, limit {limit}s")),
            other => other,
        };
        match result {
            Ok(detail) => println!("[PASS] {id} {title} ({elapsed:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {id} {title} ({elapsed:.2?}): {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
