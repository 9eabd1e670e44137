//! Roots of unity in characteristic zero, the order lower bound, and the
//! smoothness classifier.
//!
//! For `t_j = exp(2πi k_j / l_j)` put `a_j = t_j + 1/t_j` and
//! `η = a² + b² + c² - abc`. With `|a|, |b|, |c| <= 2`, AM-GM gives
//! `|abc| <= (2/3)(a² + b² + c²)`, hence `η >= (a² + b² + c²)/3`. So `η = 0`
//! exactly when `a = b = c = 0`, i.e. every `l_j = 4`, and otherwise an
//! interval enclosure with positive lower bound certifies `η != 0`.
//!
//! The smoothness sum `Σ_{L <= d <= y, d | p²-1} d^(2/3)` is a step function
//! of `y` that only increases at divisors, while `y` itself increases, so a
//! failure at some `y` implies a failure at the largest divisor `<= y`. It
//! suffices to test `y` at the divisors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{divisors, factorize, Factorization};
use crate::orbits::SolutionSet;
use crate::surface::OrderTable;

/// Closed interval, rounded outward whenever an operation is inexact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn around(v: f64, radius: f64) -> Self {
        Self { lo: (v - radius).next_down(), hi: (v + radius).next_up() }
    }

    pub fn add(self, o: Self) -> Self {
        Self { lo: down(self.lo + o.lo, sum_err(self.lo, o.lo)), hi: up(self.hi + o.hi, sum_err(self.hi, o.hi)) }
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(Self { lo: -o.hi, hi: -o.lo })
    }

    pub fn mul(self, o: Self) -> Self {
        let pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)];
        let lo = pairs.iter().map(|&(a, b)| down(a * b, a.mul_add(b, -(a * b)))).fold(f64::INFINITY, f64::min);
        let hi = pairs.iter().map(|&(a, b)| up(a * b, a.mul_add(b, -(a * b)))).fold(f64::NEG_INFINITY, f64::max);
        Self { lo, hi }
    }

    pub fn sqr(self) -> Self {
        if self.contains(0.0) {
            let m = self.lo.abs().max(self.hi.abs());
            let hi = Self::point(m).mul(Self::point(m)).hi;
            Self { lo: 0.0, hi }
        } else {
            let m = self.abs();
            m.mul(m)
        }
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            Self { lo: -self.hi, hi: -self.lo }
        } else {
            Self { lo: 0.0, hi: self.hi.max(-self.lo) }
        }
    }

    pub fn contains(self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }
}

/// Rounding error of `a + b`, exact by two-sum.
fn sum_err(a: f64, b: f64) -> f64 {
    let s = a + b;
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

/// Nudge a rounded result down unless it was exact.
fn down(v: f64, err: f64) -> f64 {
    if err < 0.0 { v.next_down() } else { v }
}

fn up(v: f64, err: f64) -> f64 {
    if err > 0.0 { v.next_up() } else { v }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Three roots of unity `exp(2πi k_j / l_j)` with `gcd(k_j, l_j) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootTriple {
    pub l: [u64; 3],
    pub k: [u64; 3],
}

/// `2 cos(2π k / l)`, exact for `l ∈ {1, 2, 3, 4, 6}`.
pub fn trace_interval(k: u64, l: u64) -> Interval {
    let k = k % l;
    match l {
        1 => Interval::point(2.0),
        2 => Interval::point(-2.0),
        3 => Interval::point(-1.0),
        4 => Interval::point(0.0),
        6 => Interval::point(1.0),
        _ => {
            let v = 2.0 * (std::f64::consts::TAU * k as f64 / l as f64).cos();
            Interval::around(v, 1e-14)
        }
    }
}

impl RootTriple {
    pub fn new(l: [u64; 3], k: [u64; 3]) -> Result<Self> {
        for j in 0..3 {
            if l[j] == 0 || k[j] >= l[j] || gcd(k[j], l[j]) != 1 {
                return Err(Error::InvalidParams(format!("k = {} is not a unit mod l = {}", k[j], l[j])));
            }
        }
        Ok(Self { l, k })
    }

    pub fn conductor(&self) -> u64 {
        self.l.iter().copied().fold(1, lcm)
    }

    /// Every `t_j = ±i`.
    pub fn is_pm_i(&self) -> bool {
        self.l == [4, 4, 4]
    }

    pub fn traces(&self) -> [Interval; 3] {
        [0, 1, 2].map(|j| trace_interval(self.k[j], self.l[j]))
    }

    /// `t_j -> t_j^c` for `c` a unit mod the conductor.
    pub fn conjugate(&self, c: u64) -> Self {
        Self { l: self.l, k: [0, 1, 2].map(|j| (self.k[j] * c) % self.l[j]) }
    }
}

/// `a² + b² + c²`.
fn square_sum(t: &[Interval; 3]) -> Interval {
    t[0].sqr().add(t[1].sqr()).add(t[2].sqr())
}

pub fn eta(rt: &RootTriple) -> Interval {
    let t = rt.traces();
    square_sum(&t).sub(t[0].mul(t[1]).mul(t[2]))
}

/// Exact zero test.
pub fn eta_is_zero(rt: &RootTriple) -> bool {
    rt.traces().iter().all(|a| *a == Interval::point(0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub l_max: u64,
    pub tuples: u64,
    pub zeros: Vec<RootTriple>,
    /// Every zero is a `±i` tuple and every `±i` tuple is a zero.
    pub zeros_are_pm_i: bool,
    /// Nonzero tuples whose enclosure did not exclude 0.
    pub uncertified: u64,
    /// Largest enclosure width divided by the `(a²+b²+c²)/3` lower bound.
    pub max_width_ratio: f64,
    pub max_abs_eta: f64,
    pub bound_ok: bool,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.zeros_are_pm_i && self.uncertified == 0 && self.bound_ok
    }
}

fn roots_of_order(l_max: u64) -> Vec<(u64, u64, Interval)> {
    (1..=l_max)
        .flat_map(|l| (0..l).filter(move |&k| gcd(k, l) == 1).map(move |k| (l, k, trace_interval(k, l))))
        .collect()
}

pub fn no_finite_orbit_sweep(l_max: u64) -> Result<SweepReport> {
    if l_max < 2 {
        return Err(Error::InvalidParams("l_max must be at least 2".into()));
    }
    let roots = roots_of_order(l_max);
    let mut report = SweepReport {
        l_max,
        tuples: 0,
        zeros: Vec::new(),
        zeros_are_pm_i: true,
        uncertified: 0,
        max_width_ratio: 0.0,
        max_abs_eta: 0.0,
        bound_ok: true,
    };
    for &(l0, k0, a) in &roots {
        for &(l1, k1, b) in &roots {
            let ab = a.mul(b);
            let s2 = a.sqr().add(b.sqr());
            for &(l2, k2, c) in &roots {
                report.tuples += 1;
                let rt = RootTriple { l: [l0, l1, l2], k: [k0, k1, k2] };
                let s = s2.add(c.sqr());
                let e = s.sub(ab.mul(c));
                report.max_abs_eta = report.max_abs_eta.max(e.abs().hi);
                report.bound_ok &= e.abs().hi <= 20.0;
                if eta_is_zero(&rt) {
                    report.zeros_are_pm_i &= rt.is_pm_i();
                    report.zeros.push(rt);
                    continue;
                }
                report.zeros_are_pm_i &= !rt.is_pm_i();
                if e.lo <= 0.0 {
                    report.uncertified += 1;
                }
                let sep = s.lo / 3.0;
                if sep > 0.0 {
                    report.max_width_ratio = report.max_width_ratio.max(e.width() / sep);
                } else {
                    report.max_width_ratio = f64::INFINITY;
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub n: u64,
    pub phi: u64,
    pub norm: Interval,
    /// `20^φ(n)`.
    pub bound: f64,
    pub holds: bool,
}

/// Product of `|η|` over the conjugates `t_j -> t_j^c`, `c ∈ (Z/n)^*`.
pub fn eta_norm_check(rt: &RootTriple) -> Result<NormReport> {
    let n = rt.conductor();
    if n > 30 {
        return Err(Error::ConductorTooLarge(n));
    }
    let units: Vec<u64> = (1..=n).filter(|&c| gcd(c, n) == 1).collect();
    let norm = units
        .iter()
        .fold(Interval::point(1.0), |acc, &c| acc.mul(eta(&rt.conjugate(c)).abs()));
    let phi = units.len() as u64;
    let bound = 20f64.powi(phi as i32);
    Ok(NormReport { n, phi, norm, bound, holds: norm.hi <= bound })
}

/// All root triples of conductor at most `n_max`.
pub fn triples_with_conductor(n_max: u64) -> Vec<RootTriple> {
    let roots = roots_of_order(n_max);
    let mut out = Vec::new();
    for &(l0, k0, _) in &roots {
        for &(l1, k1, _) in &roots {
            for &(l2, k2, _) in &roots {
                let rt = RootTriple { l: [l0, l1, l2], k: [k0, k1, k2] };
                if rt.conductor() <= n_max {
                    out.push(rt);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderBoundReport {
    pub p: u64,
    pub min_max_order: u64,
    /// `(log_20 p)^(1/3)`.
    pub bound: f64,
    pub holds: bool,
}

/// `m >= (ln p / ln 20)^(1/3)`, compared after cubing.
pub fn order_bound_holds(m: u64, p: u64) -> bool {
    (m as f64).powi(3) * 20f64.ln() >= (p as f64).ln()
}

pub fn order_lower_bound_check(s: &SolutionSet, table: &OrderTable) -> OrderBoundReport {
    let p = s.p();
    let min_max_order = s.iter().map(|t| table.max_order(&t)).min().unwrap_or(0);
    let holds = s.iter().all(|t| order_bound_holds(table.max_order(&t), p));
    OrderBoundReport { p, min_max_order, bound: ((p as f64).ln() / 20f64.ln()).cbrt(), holds }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub p: u64,
    /// `(ln p)^(1/3)`.
    pub threshold: f64,
    /// Divisors of `p² - 1` at or above the threshold, ascending.
    pub divisors: Vec<u64>,
    pub first_fail_y: Option<u64>,
    /// The prefix sum at the first failure.
    pub fail_sum: Option<f64>,
    pub verdict: bool,
}

fn p2_minus_1(p: u64) -> Factorization {
    let mut f = factorize(p - 1);
    for (q, e) in factorize(p + 1) {
        match f.iter_mut().find(|(r, _)| *r == q) {
            Some(slot) => slot.1 += e,
            None => f.push((q, e)),
        }
    }
    f.sort_unstable();
    f
}

pub fn smoothness_check(p: u64) -> Result<SmoothnessReport> {
    if !crate::ff::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let threshold = (p as f64).ln().cbrt();
    let mut ds: Vec<u64> = divisors(&p2_minus_1(p)).into_iter().filter(|&d| d as f64 >= threshold).collect();
    ds.sort_unstable();
    let mut sum = 0.0;
    let mut first = None;
    for &d in &ds {
        sum += (d as f64).powf(2.0 / 3.0);
        if sum >= d as f64 {
            first = Some((d, sum));
            break;
        }
    }
    Ok(SmoothnessReport {
        p,
        threshold,
        divisors: ds,
        first_fail_y: first.map(|f| f.0),
        fail_sum: first.map(|f| f.1),
        verdict: first.is_none(),
    })
}

/// First integer `y` at which the prefix-sum condition fails, scanning
/// `y = 1, 2, ..., p² - 1` and testing divisibility directly.
pub fn smoothness_scan(p: u64) -> Option<u64> {
    let n = p * p - 1;
    let threshold = (p as f64).ln().cbrt();
    let mut sum = 0.0;
    for y in 1..=n {
        if n.is_multiple_of(y) && y as f64 >= threshold {
            sum += (y as f64).powf(2.0 / 3.0);
        }
        if y as f64 >= threshold && sum >= y as f64 {
            return Some(y);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeContext;
    use proptest::prelude::*;

    #[test]
    fn eta_examples() {
        let pm_i = RootTriple::new([4, 4, 4], [1, 3, 1]).unwrap();
        assert!(eta_is_zero(&pm_i));
        assert!(eta(&pm_i).contains(0.0));
        let ones = RootTriple::new([1, 1, 1], [0, 0, 0]).unwrap();
        assert_eq!(eta(&ones), Interval::point(4.0));
        let minus = RootTriple::new([2, 2, 2], [1, 1, 1]).unwrap();
        // 4 + 4 + 4 + 8
        assert_eq!(eta(&minus), Interval::point(20.0));
    }

    #[test]
    fn rejects_non_units() {
        assert!(RootTriple::new([4, 4, 4], [2, 1, 1]).is_err());
        assert!(RootTriple::new([0, 4, 4], [0, 1, 1]).is_err());
    }

    #[test]
    fn sweep_small() {
        let r = no_finite_orbit_sweep(4).unwrap();
        assert_eq!(r.zeros.len(), 8);
        assert!(r.zeros.iter().all(|z| z.l == [4, 4, 4] && z.k.iter().all(|k| k % 2 == 1)));
        assert!(r.passed());
        assert!(r.max_width_ratio < 1.0);
    }

    #[test]
    fn degenerate_orders_nonzero() {
        for l in [[1, 1, 2], [2, 2, 2], [1, 2, 4], [4, 4, 1], [4, 4, 2]] {
            let k = l.map(|x| if x == 1 { 0 } else { 1 });
            let rt = RootTriple::new(l, k).unwrap();
            assert!(!eta_is_zero(&rt));
            assert!(eta(&rt).lo > 0.0);
        }
    }

    #[test]
    fn norm_examples() {
        let ones = RootTriple::new([1, 1, 1], [0, 0, 0]).unwrap();
        let r = eta_norm_check(&ones).unwrap();
        assert_eq!((r.n, r.phi), (1, 1));
        assert!(r.norm.contains(4.0) && r.holds);
        let pm_i = RootTriple::new([4, 4, 4], [1, 1, 3]).unwrap();
        let r = eta_norm_check(&pm_i).unwrap();
        assert!(r.norm.contains(0.0) && r.holds);
        let six = RootTriple::new([6, 3, 2], [1, 2, 1]).unwrap();
        assert!(eta_norm_check(&six).unwrap().holds);
        let big = RootTriple::new([7, 5, 1], [1, 1, 0]).unwrap();
        assert_eq!(eta_norm_check(&big), Err(Error::ConductorTooLarge(35)));
    }

    #[test]
    fn norms_are_integers() {
        for rt in triples_with_conductor(8) {
            let r = eta_norm_check(&rt).unwrap();
            let mid = (r.norm.lo + r.norm.hi) / 2.0;
            assert!(r.norm.contains(mid.round()), "{rt:?} {:?}", r.norm);
            assert!(r.norm.width() < 1e-6);
        }
    }

    #[test]
    fn smoothness_p5() {
        let r = smoothness_check(5).unwrap();
        assert_eq!(r.divisors, vec![2, 3, 4, 6, 8, 12, 24]);
        assert_eq!(r.first_fail_y, Some(3));
        assert!((r.fail_sum.unwrap() - 3.667).abs() < 1e-3);
        assert!(!r.verdict);
        assert_eq!(smoothness_scan(5), Some(3));
    }

    #[test]
    fn smoothness_matches_scan() {
        for p in (5..400).filter(|&p| crate::ff::is_prime(p)) {
            assert_eq!(smoothness_check(p).unwrap().first_fail_y, smoothness_scan(p), "p = {p}");
        }
    }

    #[test]
    fn order_bound_small_primes() {
        for p in [5u64, 7, 11, 13, 29] {
            let ctx = PrimeContext::new(p).unwrap();
            let s = SolutionSet::enumerate(p).unwrap();
            let r = order_lower_bound_check(&s, &OrderTable::new(&ctx));
            assert!(r.holds, "{r:?}");
        }
        let b = ((5f64).ln() / 20f64.ln()).cbrt();
        assert!((b - 0.813).abs() < 0.001);
        assert!(!order_bound_holds(1, 10_000));
    }

    proptest! {
        #[test]
        fn eta_symmetries(
            l in prop::array::uniform3(1u64..25),
            seed in prop::array::uniform3(0u64..1000),
            perm in 0usize..6,
        ) {
            let k = [0, 1, 2].map(|j| {
                (0..l[j]).cycle().skip(seed[j] as usize % l[j] as usize).find(|&k| gcd(k, l[j]) == 1).unwrap()
            });
            let rt = RootTriple::new(l, k).unwrap();
            let inv = RootTriple { l, k: [0, 1, 2].map(|j| (l[j] - k[j]) % l[j]) };
            let order = crate::surface::PERMUTATIONS[perm];
            let perm_rt = RootTriple { l: order.map(|i| l[i]), k: order.map(|i| k[i]) };
            for other in [inv, perm_rt] {
                let (a, b) = (eta(&rt), eta(&other));
                prop_assert!(a.lo <= b.hi && b.lo <= a.hi);
            }
            let e = eta(&rt);
            prop_assert!(e.hi <= 20.0 + 1e-9);
            let s = square_sum(&rt.traces());
            prop_assert!(e.hi >= s.lo / 3.0);
        }
    }
}
