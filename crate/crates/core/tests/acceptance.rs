//! End-to-end acceptance checks. Prints one `ACCEPT <n> PASS|FAIL` line per
//! criterion and exits nonzero if any fails.

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use g2hash::baseline::{bench, BenchConfig, BenchMode};
use g2hash::field::is_probable_prime;
use g2hash::graph::{
    x5_minus_x_check, build_graph, curve_normal_form, good_walk_ball, small_prime_counts, verify_connectivity,
    verify_counts, verify_edges, x5_minus_x, GraphSnapshot, Model, Report, Vertex,
};
use g2hash::hash::{c0_start, integer_digits};
use g2hash::richelot::{
    classify_extension, richelot_step, ExtensionClass, Kernel, QuadraticSplitting, StepOutcome, SPLIT_TABLE,
};
use g2hash::{kat, FactorList, FieldContext, FieldHandle, Genus2Curve, HashContext, Outcome, Poly};

type Check = Result<String, String>;

fn primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&p| is_probable_prime(&BigUint::from(p))).collect()
}

fn graphs() -> Vec<GraphSnapshot> {
    primes(7, 199).into_iter().map(|p| build_graph(p).expect("graph builds")).collect()
}

fn sweep(gs: &[GraphSnapshot], f: fn(&GraphSnapshot) -> Result<Report, g2hash::graph::GraphError>) -> (Report, usize) {
    let mut all = Report::default();
    for g in gs {
        all.extend(f(g).expect("report"));
    }
    let n = all.0.len();
    (all, n)
}

fn failures(r: &Report) -> String {
    r.failures().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn g13_shape() -> Check {
    let t0 = Instant::now();
    let g = build_graph(13).map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed();
    if g.vertices().len() != 4 || g.jacobian_count() != 3 {
        return Err(format!("{} vertices, {} jacobians", g.vertices().len(), g.jacobian_count()));
    }
    let f = g.field().clone();
    let j1 = Model::Jacobian(x5_minus_x(&f).unwrap()).vertex().unwrap();
    let idx = |v: &Vertex| g.index_of(v).unwrap();
    let m = g.multiplicities();
    let mult = |a: usize, b: usize| m.get(&(a, b)).copied().unwrap_or(0);
    let (a, e) = (idx(&j1), g.vertices().iter().position(|v| !v.is_jacobian()).unwrap());
    let others: Vec<usize> = (0..4).filter(|&i| i != a && i != e).collect();
    let (b, c) = if mult(a, others[0]) == 4 { (others[0], others[1]) } else { (others[1], others[0]) };
    let want = [
        [(a, 5), (b, 4), (c, 0), (e, 6)],
        [(a, 1), (b, 5), (c, 6), (e, 3)],
        [(a, 0), (b, 4), (c, 9), (e, 2)],
        [(a, 1), (b, 2), (c, 2), (e, 10)],
    ];
    for (row, from) in want.iter().zip([a, b, c, e]) {
        for &(to, k) in row {
            if mult(from, to) != k {
                return Err(format!("edge {} -> {} has multiplicity {}, expected {k}", from, to, mult(from, to)));
            }
        }
    }
    if elapsed > Duration::from_secs(10) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("4 vertices, all 16 multiplicities match, {elapsed:.2?}"))
}

fn vertex_counts(gs: &[GraphSnapshot]) -> Check {
    let (r, n) = sweep(gs, verify_counts);
    if !r.all_pass() {
        return Err(failures(&r));
    }
    let p5 = small_prime_counts(5).map_err(|e| e.to_string())?;
    if p5 != (1, 1) {
        return Err(format!("p=5 gives {p5:?}"));
    }
    Ok(format!("{} primes, {n} checks, p=5 gives #J=1 #E=1", gs.len()))
}

fn edge_bounds(gs: &[GraphSnapshot]) -> Check {
    let (mut r, _) = sweep(gs, verify_edges);
    for p in [5, 13, 29, 37] {
        r.extend(x5_minus_x_check(p).map_err(|e| e.to_string())?);
    }
    if !r.all_pass() {
        return Err(failures(&r));
    }
    let zeros = |p: u64| r.0.iter().find(|l| l.p == p && l.name == "x5-x-singular-splittings").map(|l| l.details.clone());
    Ok(format!("edge bounds hold for {} primes; p=5 {}; p=13 {}", gs.len(), zeros(5).unwrap(), zeros(13).unwrap()))
}

fn connectivity(gs: &[GraphSnapshot]) -> Check {
    let (r, n) = sweep(gs, verify_connectivity);
    if !r.all_pass() {
        return Err(failures(&r));
    }
    Ok(format!("{n} checks over {} primes", gs.len()))
}

fn all_digit_strings(len: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..8u64.pow(len as u32)).map(move |mut k| {
        (0..len)
            .map(|_| {
                let d = (k % 8) as u8;
                k /= 8;
                d
            })
            .collect()
    })
}

fn oracle_equivalence() -> Check {
    let f13 = FieldContext::new(13u64).unwrap();
    let i = f13.from_i64(-1).sqrt().unwrap();
    // pairs x^2 - 1, x^2 + 1, x
    let start13 = FactorList::from_roots([
        Some(f13.one()),
        Some(-f13.one()),
        Some(i.clone()),
        Some(-i),
        Some(f13.zero()),
        None,
    ])
    .unwrap();
    let cases = [
        (11u64, HashContext::with_prime(11u64).unwrap()),
        (13, HashContext::with_start(f13.clone(), start13)),
    ];
    let mut summary = Vec::new();
    for (p, ctx) in cases {
        let ball = good_walk_ball(ctx.start(), 5).map_err(|e| e.to_string())?;
        for (len, level) in ball.iter().enumerate() {
            let mut got = BTreeMap::new();
            let mut bottom = 0u64;
            for digits in all_digit_strings(len) {
                match ctx.hash_digits(&digits).map_err(|e| e.to_string())? {
                    Outcome::Value(t) => *got.entry(t).or_insert(0u64) += 1,
                    Outcome::Bottom { .. } => bottom += 1,
                }
            }
            if got != level.triples || bottom != level.bottom {
                return Err(format!("p={p} length {len}: hash gives {} classes/{bottom} bottom, ball {} classes/{} bottom",
                    got.len(), level.triples.len(), level.bottom));
            }
        }
        let last = &ball[5];
        summary.push(format!("p={p}: {} classes, {} bottom at length 5", last.triples.len(), last.bottom));
    }
    Ok(summary.join("; "))
}

fn monic(p: &Poly<u64>) -> Poly<u64> {
    p.monic().expect("nonzero")
}

fn good_extensions() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut steps = 0usize;
    let mut restarts = 0usize;
    for (p, n) in [(11u64, 3334usize), (23, 3333), (10007, 3333)] {
        let ctx = HashContext::with_prime(p).unwrap();
        let mut l = ctx.start().clone();
        let mut done = 0;
        while done < n {
            let d: u8 = rng.gen_range(0..8);
            let incoming = l.incoming_splitting();
            let chosen = QuadraticSplitting::from_pattern(&l, &SPLIT_TABLE[d as usize]);
            let class = classify_extension(&Kernel::Jacobian(incoming.partition()), &Kernel::Jacobian(chosen.partition()))
                .map_err(|e| e.to_string())?;
            if class != ExtensionClass::Good {
                return Err(format!("p={p} digit {d} classified {class:?}"));
            }
            let h: Vec<_> = incoming.g().iter().map(monic).collect();
            if chosen.g().iter().any(|g| h.contains(&monic(g))) {
                return Err(format!("p={p} digit {d} reuses a quadratic of the previous step"));
            }
            done += 1;
            match richelot_step(&l, d).map_err(|e| e.to_string())? {
                StepOutcome::Jacobian(next) => l = next,
                StepOutcome::Split => {
                    restarts += 1;
                    l = ctx.start().clone();
                }
            }
        }
        steps += done;
    }
    Ok(format!("{steps} steps, all good, {restarts} restarts after a product"))
}

fn kat_suite() -> Check {
    let vectors = kat::parse(kat::EMBEDDED).map_err(|e| e.to_string())?;
    let mut per_prime: BTreeMap<String, usize> = BTreeMap::new();
    for v in &vectors {
        *per_prime.entry(v.name.split('-').next().unwrap().to_string()).or_insert(0) += 1;
    }
    if vectors.len() < 20 {
        return Err(format!("only {} vectors", vectors.len()));
    }
    let seq = kat::run(&vectors, false).map_err(|e| e.to_string())?;
    let par = kat::run(&vectors, true).map_err(|e| e.to_string())?;
    let bad: Vec<_> = seq.iter().filter(|r| !r.passed).map(|r| r.name.clone()).collect();
    if !bad.is_empty() {
        return Err(format!("failed: {}", bad.join(", ")));
    }
    if seq.iter().zip(&par).any(|(a, b)| a.got != b.got) {
        return Err("parallel mode differs".into());
    }
    Ok(format!("{} vectors {per_prime:?}, parallel identical", vectors.len()))
}

fn invariant_completeness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f13 = FieldContext::new(13u64).unwrap();
    let g13 = build_graph(13).map_err(|e| e.to_string())?;
    let mut curves: Vec<FactorList<u64>> = g13
        .models()
        .iter()
        .filter_map(|m| match m {
            Model::Jacobian(l) => Some(l.clone()),
            Model::Product(..) => None,
        })
        .collect();
    let reps = curves.len();
    curves.push(c0_start(&FieldContext::new(1019u64).unwrap()).unwrap());
    curves.push(x5_minus_x(&f13).unwrap());
    let f = FieldContext::new(10007u64).unwrap();
    curves.push(FactorList::from_roots([3, 17, 400, 5001, 9999, 1234].map(|r| Some(f.from_u64(r)))).unwrap());
    for l in &curves {
        let field = l.field().clone();
        let c = Genus2Curve::from_factors(l.factors(), &field).map_err(|e| e.to_string())?;
        let want = c.cardona_quer().map_err(|e| e.to_string())?;
        let p = *field.p();
        let mut rand_el = |nonzero: bool| loop {
            let x = field.element(rng.gen_range(0..p), rng.gen_range(0..p)).unwrap();
            if !nonzero || !x.is_zero() {
                return x;
            }
        };
        for _ in 0..1000 {
            let (a, b, cc, d) = (rand_el(false), rand_el(false), rand_el(false), rand_el(false));
            if (&(&a * &d) - &(&b * &cc)).is_zero() {
                continue;
            }
            let u = rand_el(true);
            let t = c.transform([&a, &b, &cc, &d], &u).map_err(|e| e.to_string())?;
            if t.cardona_quer().map_err(|e| e.to_string())? != want {
                return Err(format!("p={p}: re-model changes the invariants"));
            }
        }
    }
    let triples: std::collections::BTreeSet<_> = g13.vertices().iter().filter(|v| v.is_jacobian()).collect();
    let forms: std::collections::BTreeSet<_> = curves[..reps].iter().map(curve_normal_form).collect();
    if reps != 3 || triples.len() != 3 || forms.len() != 3 {
        return Err(format!("p=13: {reps} classes, {} triples, {} normal forms", triples.len(), forms.len()));
    }
    Ok(format!("{} curves x 1000 re-models; p=13 has 3 classes with 3 distinct triples", curves.len()))
}

fn benchmark() -> Check {
    let levels = [128, 192, 256, 384];
    let cfg = |lambda| BenchConfig { lambda, message_bits: 100, samples: 10, seed: 9 };
    bench(&cfg(128), BenchMode::Genus2Sequential).map_err(|e| e.to_string())?;
    // rounds interleave the levels so that machine drift hits all of them
    let mut best = [f64::INFINITY; 4];
    for _ in 0..5 {
        for (k, &lambda) in levels.iter().enumerate() {
            let r = bench(&cfg(lambda), BenchMode::Genus2Sequential).map_err(|e| e.to_string())?;
            if r.sqrt_calls != 3 * r.steps {
                return Err(format!("lambda={lambda}: {} square roots over {} steps", r.sqrt_calls, r.steps));
            }
            best[k] = best[k].min(r.ms_per_bit);
        }
    }
    for &lambda in &levels {
        let e = bench(&cfg(lambda), BenchMode::Cgl).map_err(|e| e.to_string())?;
        if e.sqrt_calls != e.steps {
            return Err(format!("lambda={lambda}: elliptic walk took {} roots over {} bits", e.sqrt_calls, e.steps));
        }
    }
    let shown: Vec<String> = levels.iter().zip(best).map(|(l, t)| format!("{l}:{t:.4}")).collect();
    if best.windows(2).any(|w| w[1] < w[0]) {
        return Err(format!("ms/bit not monotone: {}", shown.join(" ")));
    }
    Ok(format!("ms/bit {}; 3 roots per 3-bit step, 1 per bit for the elliptic walk", shown.join(" ")))
}

fn bottom_rate() -> Check {
    let mut p = (1u64 << 20) + 1;
    while p % 6 != 5 || !is_probable_prime(&BigUint::from(p)) {
        p += 1;
    }
    let ctx = HashContext::with_prime(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut bottoms = 0;
    let n = 10_000;
    for _ in 0..n {
        let mut bytes = [0u8; 13];
        rng.fill(&mut bytes);
        bytes[0] &= 0x0f;
        let m = BigUint::from_bytes_be(&bytes);
        if ctx.hash_digits(&integer_digits(&m)).map_err(|e| e.to_string())?.is_bottom() {
            bottoms += 1;
        }
    }
    let rate = bottoms as f64 / n as f64;
    if rate > 0.005 {
        return Err(format!("p={p}: {bottoms} of {n} hashes hit a product"));
    }
    Ok(format!("p={p}: {bottoms} of {n} hashes hit a product ({:.3}%)", 100.0 * rate))
}

fn main() -> ExitCode {
    // ACCEPT_ONLY=2,9 runs a subset
    let only: Option<Vec<u32>> =
        std::env::var("ACCEPT_ONLY").ok().map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let cache: OnceCell<Vec<GraphSnapshot>> = OnceCell::new();
    let gs = || {
        cache.get_or_init(|| {
            let t0 = Instant::now();
            let gs = graphs();
            eprintln!("built {} graphs in {:.1?}", gs.len(), t0.elapsed());
            gs
        })
    };
    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Check + '_>)> = vec![
        (1, "g13-reproduction", Box::new(g13_shape)),
        (2, "vertex-counts", Box::new(|| vertex_counts(gs()))),
        (3, "edge-bounds", Box::new(|| edge_bounds(gs()))),
        (4, "connectivity", Box::new(|| connectivity(gs()))),
        (5, "hash-graph-equivalence", Box::new(oracle_equivalence)),
        (6, "good-extensions", Box::new(good_extensions)),
        (7, "known-answers", Box::new(kat_suite)),
        (8, "invariant-completeness", Box::new(invariant_completeness)),
        (9, "benchmark", Box::new(benchmark)),
        (10, "bottom-rate", Box::new(bottom_rate)),
    ];
    let (mut passed, mut failed) = (0, 0);
    for (n, name, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let t = Instant::now();
        match run() {
            Ok(msg) => {
                passed += 1;
                println!("ACCEPT {n} {name} PASS {msg} [{:.1?}]", t.elapsed());
            }
            Err(msg) => {
                failed += 1;
                println!("ACCEPT {n} {name} FAIL {msg} [{:.1?}]", t.elapsed());
            }
        }
    }
    println!("acceptance: {passed} passed, {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
