use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use markoff_core::counting::{
    all_subgroups, count_nonsplit_curve, count_ph, count_split_curve, middlegame_solution_check,
    middlegame_transform, phi_nondegeneracy, TraceEquationCounter,
};
use markoff_core::cyclo::{order_lower_bound_check, smoothness_check, smoothness_scan};
use markoff_core::ff::{divisors, subgroup, Ambient, Fp, PrimeContext, QuadExt};
use markoff_core::incidence::{incidence_report, Diameter};
use markoff_core::orbits::{cage, components, components_bfs, expected_count, SolutionSet, MAX_ENUM_PRIME};
use markoff_core::stepanov::{
    build_aux_poly, count_involution_fibers, count_unit_intersection, count_y, select_params, Mobius, RationalFunctionSpec,
};
use markoff_core::surface::OrderTable;

use crate::config::Suite;
use crate::record::Violation;

/// Largest prime for which the BFS cross-check of the orbit partition runs.
pub const BFS_LIMIT: u64 = 300;
/// Largest prime for which the smoothness classifier is checked by scanning.
pub const SCAN_LIMIT: u64 = 2000;
/// The subgroup counts keep a `p^2` table per `H2`.
pub const COUNTING_LIMIT: u64 = 3000;

/// Whether `suite` has an implementation at `p`.
pub fn supported(suite: Suite, p: u64) -> bool {
    let enumerates = matches!(suite, Suite::Enumerate | Suite::Components | Suite::Cage | Suite::Opening);
    if enumerates && p > MAX_ENUM_PRIME {
        return false;
    }
    match suite {
        Suite::Enumerate | Suite::Components => p >= 3,
        Suite::Counting => (5..=COUNTING_LIMIT).contains(&p),
        _ => p >= 5,
    }
}

pub struct SuiteOutput {
    pub data: Value,
    pub violations: Vec<Violation>,
}

impl SuiteOutput {
    fn new(data: Value, violations: Vec<Violation>) -> Self {
        Self { data, violations }
    }
}

pub fn run_suite(
    suite: Suite,
    p: u64,
    ctx: Option<&PrimeContext>,
    rng: &mut ChaCha8Rng,
) -> markoff_core::Result<Option<SuiteOutput>> {
    if !supported(suite, p) {
        return Ok(None);
    }
    let out = match (suite, ctx) {
        (Suite::Enumerate, _) => enumerate(p)?,
        (Suite::Components, _) => components_suite(p)?,
        (_, None) => return Ok(None),
        (Suite::Incidence, Some(c)) => incidence(c),
        (Suite::Cage, Some(c)) => cage_suite(c)?,
        (Suite::Counting, Some(c)) => counting(c, rng)?,
        (Suite::Stepanov, Some(c)) => stepanov(c, rng)?,
        (Suite::Opening, Some(c)) => opening(c)?,
        (Suite::Smoothness, Some(c)) => smoothness(c)?,
    };
    Ok(Some(out))
}

fn enumerate(p: u64) -> markoff_core::Result<SuiteOutput> {
    let s = SolutionSet::enumerate(p)?;
    let expected = expected_count(p);
    let mut v = Vec::new();
    if s.len() as u64 != expected {
        v.push(Violation::new("count", format!("{} points, closed form gives {expected}", s.len())));
    }
    Ok(SuiteOutput::new(json!({ "count": s.len(), "expected": expected }), v))
}

fn components_suite(p: u64) -> markoff_core::Result<SuiteOutput> {
    let s = SolutionSet::enumerate(p)?;
    let part = components(&s);
    let bfs = (p <= BFS_LIMIT).then(|| components_bfs(&s) == part);
    let mut v = Vec::new();
    if p >= 5 && part.n_components() != 1 {
        v.push(Violation::new("single_orbit", format!("{} components", part.n_components())));
    }
    if bfs == Some(false) {
        v.push(Violation::new("bfs_agrees", "union-find and BFS partitions differ"));
    }
    let data = json!({
        "count": s.len(),
        "n_components": part.n_components(),
        "component_sizes": part.sorted_sizes(),
        "bfs_checked": bfs.is_some(),
    });
    Ok(SuiteOutput::new(data, v))
}

fn diameter_value(d: &Diameter) -> Value {
    match d {
        Diameter::Finite(n) => json!(n),
        Diameter::Disconnected { from, to } => json!({ "infinite": [from, to] }),
    }
}

fn incidence(ctx: &PrimeContext) -> SuiteOutput {
    let r = incidence_report(ctx);
    let mut v = Vec::new();
    if ctx.p() >= 11 && r.diameter != Diameter::Finite(2) {
        v.push(Violation::new("diameter", format!("{:?}", r.diameter)));
    }
    if r.meeting_violations > 0 {
        v.push(Violation::new("meeting_degree", format!("{} vertices", r.meeting_violations)));
    }
    let data = json!({
        "vertices": r.vertices,
        "diameter": diameter_value(&r.diameter),
        "diameter_non_parabolic": diameter_value(&r.diameter_non_parabolic),
        "diameter_merged": diameter_value(&r.diameter_merged),
        "meeting_violations": r.meeting_violations,
        "meeting_half_p_minus_one_violations": r.meeting_half_p_minus_one_violations,
    });
    SuiteOutput::new(data, v)
}

fn cage_suite(ctx: &PrimeContext) -> markoff_core::Result<SuiteOutput> {
    let s = SolutionSet::enumerate(ctx.p())?;
    let part = components(&s);
    let table = OrderTable::new(ctx);
    let r = cage(&s, &part, &table);
    let mut v = Vec::new();
    if !r.connected() {
        v.push(Violation::new("cage_connected", format!("cage meets {} components", r.cage_components)));
    }
    Ok(SuiteOutput::new(serde_json::to_value(&r).expect("serializable"), v))
}

fn sample_pairs(ctx: &PrimeContext, n: usize, rng: &mut ChaCha8Rng) -> Vec<(Fp, Fp)> {
    let p = ctx.p();
    (0..n)
        .map(|_| loop {
            let a = Fp(rng.gen_range(1..p));
            let b = Fp(rng.gen_range(1..p));
            if ctx.mul(a, b) != Fp::ONE {
                break (a, b);
            }
        })
        .collect()
}

fn random_unit(ctx: &PrimeContext, rng: &mut ChaCha8Rng) -> QuadExt {
    let p = ctx.p();
    loop {
        let z = QuadExt::new(Fp(rng.gen_range(0..p)), Fp(rng.gen_range(0..p)));
        if !z.is_zero() {
            return z;
        }
    }
}

fn counting(ctx: &PrimeContext, rng: &mut ChaCha8Rng) -> markoff_core::Result<SuiteOutput> {
    let p = ctx.p();
    let mut v = Vec::new();
    let ds = divisors(ctx.fact_pm1());
    let pairs = sample_pairs(ctx, 5, rng);

    let mut ph_checks = 0;
    let mut ph_dev_max: f64 = 0.0;
    for &(a, b) in &pairs {
        for &m in &ds {
            let h = subgroup(Ambient::Split, m, ctx)?;
            let r = count_ph(a, b, &h, ctx)?;
            ph_checks += 1;
            ph_dev_max = ph_dev_max.max(r.deviation.abs());
            if r.direct as i64 != r.mobius {
                v.push(Violation::new("ph_mobius", format!("|H|={m} a={a} b={b}: {} vs {}", r.direct, r.mobius)));
            }
        }
    }

    let mut weil_max: f64 = 0.0;
    let mut curve_checks = 0;
    for &(a, b) in &pairs {
        for &e in &ds {
            for &d in &ds {
                let c = count_split_curve(a, b, e, d, ctx)?;
                curve_checks += 1;
                weil_max = weil_max.max(c.deviation);
                if !c.consistent() {
                    v.push(Violation::new("split_curve", format!("e={e} d={d} a={a} b={b}: N={} f={}", c.n, c.f)));
                }
            }
        }
    }
    for d1 in divisors(ctx.fact_pp1()) {
        for &d2 in &ds {
            let c = count_nonsplit_curve(d1, d2, ctx)?;
            curve_checks += 1;
            if !c.consistent() {
                v.push(Violation::new("nonsplit_curve", format!("d1={d1} d2={d2}: M={} f={}", c.m, c.f)));
            }
        }
    }

    let groups = all_subgroups(ctx)?;
    let mut sigmas = Vec::new();
    while sigmas.len() < 10.min(p as usize - 1) {
        let s = rng.gen_range(0..p);
        if s != 1 && !sigmas.contains(&s) {
            sigmas.push(s);
        }
    }
    let mut trace_rows = Vec::new();
    let mut trace_counts = 0;
    for h2 in &groups {
        let counter = TraceEquationCounter::new(h2, ctx);
        for h1 in &groups {
            let mut worst: Option<markoff_core::counting::TraceEquationRecord> = None;
            for &s in &sigmas {
                let r = counter.count(Fp(s), h1)?;
                trace_counts += 1;
                if !r.within_bounds() {
                    v.push(Violation::new(
                        "trace_equation_bounds",
                        format!("|H1|={} |H2|={} σ={s}: T={}", h1.order, h2.order, r.t),
                    ));
                }
                if worst.as_ref().is_none_or(|w| r.t > w.t) {
                    worst = Some(r);
                }
            }
            if let Some(w) = worst {
                trace_rows.push(json!({
                    "h1": w.h1_order,
                    "h1_ambient": w.h1_ambient,
                    "h2": w.h2_order,
                    "sigma": w.sigma,
                    "t": w.t,
                    "cz_bound": w.cz_bound,
                    "trivial_bound": w.trivial_bound,
                }));
            }
        }
    }

    let mut mid_bad = 0;
    for _ in 0..1000 {
        let (f1, f2, t) = (random_unit(ctx, rng), random_unit(ctx, rng), random_unit(ctx, rng));
        let sigma = Fp(rng.gen_range(0..p));
        if !middlegame_transform(f1, f2, t, sigma, ctx)?.identities_hold(ctx) {
            mid_bad += 1;
        }
    }
    if mid_bad > 0 {
        v.push(Violation::new("middlegame_identities", format!("{mid_bad} of 1000 draws")));
    }
    let full_split = subgroup(Ambient::Split, p - 1, ctx)?;
    let full_norm = subgroup(Ambient::NormOne, p + 1, ctx)?;
    let mut mobius_pairs = 0;
    for (h1, h2) in [(&full_split, &full_split), (&full_split, &full_norm), (&full_norm, &full_norm)] {
        let r = middlegame_solution_check(Fp(2), h1, h2, ctx)?;
        mobius_pairs += r.pairs;
        if r.failures > 0 {
            v.push(Violation::new("middlegame_mobius", format!("{} of {} pairs", r.failures, r.pairs)));
        }
    }

    let mut phi_checked = 0;
    for _ in 0..5 {
        let s = Fp(rng.gen_range(2..p));
        let r = phi_nondegeneracy(s, 100, rng, ctx)?;
        phi_checked += 1;
        if r.det_failures + r.adjugate_failures > 0 {
            v.push(Violation::new("phi_det", format!("σ={s}: {} det, {} adjugate", r.det_failures, r.adjugate_failures)));
        }
        if r.witness.is_none() {
            v.push(Violation::new("phi_commutator", format!("σ={s}: no witness found")));
        }
    }

    let data = json!({
        "ph_checks": ph_checks,
        "ph_deviation_max": ph_dev_max,
        "curve_checks": curve_checks,
        "weil_deviation_max": weil_max,
        "trace_counts": trace_counts,
        "trace_worst": trace_rows,
        "middlegame_draws": 1000,
        "mobius_pairs": mobius_pairs,
        "phi_sigmas": phi_checked,
    });
    Ok(SuiteOutput::new(data, v))
}

fn stepanov(ctx: &PrimeContext, rng: &mut ChaCha8Rng) -> markoff_core::Result<SuiteOutput> {
    let p = ctx.p();
    let mut v = Vec::new();
    let limit = (p as f64).powf(0.75);
    let ts: Vec<u64> = divisors(ctx.fact_pm1()).into_iter().filter(|&t| t as f64 <= limit).collect();
    let mut sigmas = vec![Mobius::new(0, 1, 1, 0, p), Mobius::new(1, 1, 0, 1, p)];
    while sigmas.len() < 20 {
        let m = Mobius::new(rng.gen_range(0..p), rng.gen_range(0..p), rng.gen_range(0..p), rng.gen_range(0..p), p);
        let det = (m.a * m.d % p + p - m.b * m.c % p) % p;
        if det != 0 && !(m.b == 0 && m.c == 0 && m.a == m.d) {
            sigmas.push(m);
        }
    }
    let mut scan_checks = 0;
    let mut fiber_checks = 0;
    for &t in &ts {
        for m in &sigmas {
            let r = count_unit_intersection(m, t, ctx)?;
            scan_checks += 1;
            if r.scan != r.oracle {
                v.push(Violation::new("unit_intersection", format!("t={t} σ={m:?}: {} vs {}", r.scan, r.oracle)));
            }
        }
        if p > 3 {
            let b = 2 + rng.gen_range(0..p - 2);
            let r = count_involution_fibers(b, t, ctx)?;
            fiber_checks += 1;
            if !r.consistent() {
                v.push(Violation::new("involution_fibers", format!("t={t} b={b}: {r:?}")));
            }
        }
    }

    let spec = RationalFunctionSpec::unit_line(p);
    let e = spec.e() as u64;
    let mut aux = Vec::new();
    for t in divisors(ctx.fact_pm1()) {
        let Some(params) = select_params(e, t, t, p) else { continue };
        let y = count_y(&spec, t, t, ctx)?;
        let a = build_aux_poly(&spec, &params, ctx)?;
        if !a.vanishing_ok || !a.bound_ok {
            v.push(Violation::new("aux_poly", format!("t={t}: vanishing {} bound {}", a.vanishing_ok, a.bound_ok)));
        }
        aux.push(json!({
            "t": t,
            "y": y,
            "params": params,
            "bound": params.degree_bound(e) as f64 / params.m as f64,
            "shape": t as f64 * (t as f64).powf(-1.0 / (4.0 * e as f64)),
            "psi_degree": a.psi_degree,
        }));
    }
    let data = json!({
        "unit_intersection_checks": scan_checks,
        "fiber_checks": fiber_checks,
        "aux_polys": aux,
    });
    Ok(SuiteOutput::new(data, v))
}

fn opening(ctx: &PrimeContext) -> markoff_core::Result<SuiteOutput> {
    let p = ctx.p();
    let s = SolutionSet::enumerate(p)?;
    let r = order_lower_bound_check(&s, &OrderTable::new(ctx));
    let sm = smoothness_check(p)?;
    let mut v = Vec::new();
    if !r.holds {
        v.push(Violation::new("order_bound", format!("min max order {} below {:.4}", r.min_max_order, r.bound)));
    }
    let data = json!({
        "p": p,
        "smooth_verdict": sm.verdict,
        "first_fail_y": sm.first_fail_y,
        "min_max_order": r.min_max_order,
        "bound": r.bound,
    });
    Ok(SuiteOutput::new(data, v))
}

fn smoothness(ctx: &PrimeContext) -> markoff_core::Result<SuiteOutput> {
    let p = ctx.p();
    let r = smoothness_check(p)?;
    let mut v = Vec::new();
    let scanned = p <= SCAN_LIMIT;
    if scanned {
        let scan = smoothness_scan(p);
        if scan != r.first_fail_y {
            v.push(Violation::new("scan_agrees", format!("classifier {:?}, scan {scan:?}", r.first_fail_y)));
        }
    }
    let data = json!({
        "threshold": r.threshold,
        "divisors": r.divisors.len(),
        "first_fail_y": r.first_fail_y,
        "fail_sum": r.fail_sum,
        "verdict": r.verdict,
        "scan_checked": scanned,
    });
    Ok(SuiteOutput::new(data, v))
}
