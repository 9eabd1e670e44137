//! Solution counts for the subgroup equations that drive the connectivity
//! argument, and the matrix identities behind the middle-game bound.
//!
//! * `f_H(K)`: pairs `(t, y) ∈ H × K` with `a t + b/t = y + 1/y`, and `P(H)`,
//!   the same count with `y` a primitive root.
//! * The split curve `α1 η^e + α2 η^-e = ξ^d + ξ^-d` and the nonsplit system
//!   `ξ^2 - D η^2 = 1, g_{d1}(ξ, η) = μ^{d2} + μ^-d2`.
//! * `T(σ)`: pairs `(h1, h2) ∈ H1 × H2` with `h1 + σ/h1 = h2 + 1/h2`.
//! * The matrices `Φ(t)`, `g_t` and the pair `g_±` over `F_{p^2}`.
//!
//! Every count here is of ordered pairs, so a trace value reached from two
//! group elements is counted twice.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{subgroup, Ambient, Fp, PrimeContext, QuadExt, SubgroupSpec};

fn require_split(s: &SubgroupSpec) -> Result<()> {
    if s.ambient != Ambient::Split {
        return Err(Error::InvalidParams("subgroup must lie in F_p^*".into()));
    }
    Ok(())
}

/// `#{x ∈ group : x + 1/x = v}` indexed by `v`.
fn trace_table(elems: &[Fp], ctx: &PrimeContext) -> Vec<u32> {
    let mut table = vec![0u32; ctx.p() as usize];
    for &y in elems {
        let v = ctx.add(y, ctx.inv(y).expect("group elements are units"));
        table[v.0 as usize] += 1;
    }
    table
}

/// `#{x ∈ F_p^* : x^k + x^-k = v}` indexed by `v`.
fn power_trace_table(k: u64, ctx: &PrimeContext) -> Vec<u32> {
    let mut table = vec![0u32; ctx.p() as usize];
    for x in 1..ctx.p() {
        let y = ctx.pow(Fp(x), k);
        let v = ctx.add(y, ctx.inv(y).expect("nonzero"));
        table[v.0 as usize] += 1;
    }
    table
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FHKRecord {
    pub a: Fp,
    pub b: Fp,
    pub h_order: u64,
    pub k_order: u64,
    pub e_h: u64,
    pub d_k: u64,
    pub count: u64,
}

impl FHKRecord {
    pub fn within_trivial_bound(&self) -> bool {
        self.count <= 2 * self.h_order.min(self.k_order)
    }
}

/// `f_H(K)` by evaluating both sides over `H` and `K`.
pub fn count_fhk(a: Fp, b: Fp, h: &SubgroupSpec, k: &SubgroupSpec, ctx: &PrimeContext) -> Result<FHKRecord> {
    require_split(h)?;
    require_split(k)?;
    if a.is_zero() || b.is_zero() {
        return Err(Error::Zero);
    }
    let table = trace_table(&k.split_elements(ctx), ctx);
    let mut count = 0u64;
    for t in h.split_elements(ctx) {
        let v = ctx.add(ctx.mul(a, t), ctx.div(b, t)?);
        count += table[v.0 as usize] as u64;
    }
    Ok(FHKRecord {
        a,
        b,
        h_order: h.order,
        k_order: k.order,
        e_h: h.index(ctx),
        d_k: k.index(ctx),
        count,
    })
}

/// Squarefree divisors of `n` with their Möbius sign, from `n`'s primes.
pub fn squarefree_divisors(primes: &[u64]) -> Vec<(u64, i64)> {
    let mut out = vec![(1u64, 1i64)];
    for &q in primes {
        let extra: Vec<_> = out.iter().map(|&(d, mu)| (d * q, -mu)).collect();
        out.extend(extra);
    }
    out.sort_unstable();
    out
}

/// `P(H)` by listing primitive roots `y` and counting `t ∈ H`.
pub fn count_ph_direct(a: Fp, b: Fp, h: &SubgroupSpec, ctx: &PrimeContext) -> Result<u64> {
    require_split(h)?;
    let mut table = vec![0u32; ctx.p() as usize];
    for t in h.split_elements(ctx) {
        let v = ctx.add(ctx.mul(a, t), ctx.div(b, t)?);
        table[v.0 as usize] += 1;
    }
    let mut total = 0u64;
    for y in 1..ctx.p() {
        let y = Fp(y);
        if ctx.mult_order(y)? == ctx.p() - 1 {
            let w = ctx.add(y, ctx.inv(y)?);
            total += table[w.0 as usize] as u64;
        }
    }
    Ok(total)
}

/// `P(H) = Σ_{d | p-1} μ(d) f_H(K_d)` with `K_d` the subgroup of index `d`.
pub fn count_ph_mobius(a: Fp, b: Fp, h: &SubgroupSpec, ctx: &PrimeContext) -> Result<i64> {
    let primes: Vec<u64> = ctx.fact_pm1().iter().map(|&(q, _)| q).collect();
    let mut total = 0i64;
    for (d, mu) in squarefree_divisors(&primes) {
        let k = subgroup(Ambient::Split, (ctx.p() - 1) / d, ctx)?;
        total += mu * count_fhk(a, b, h, &k, ctx)?.count as i64;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PHRecord {
    pub h_order: u64,
    pub a: Fp,
    pub b: Fp,
    pub direct: u64,
    pub mobius: i64,
    /// `|H| φ(p-1) / (p-1)`.
    pub main_term: f64,
    /// `(P(H) - main_term) / sqrt(p)`.
    pub deviation: f64,
}

pub fn count_ph(a: Fp, b: Fp, h: &SubgroupSpec, ctx: &PrimeContext) -> Result<PHRecord> {
    let direct = count_ph_direct(a, b, h, ctx)?;
    let mobius = count_ph_mobius(a, b, h, ctx)?;
    let phi = crate::ff::euler_phi(ctx.fact_pm1()) as f64;
    let main_term = h.order as f64 * phi / (ctx.p() - 1) as f64;
    Ok(PHRecord {
        h_order: h.order,
        a,
        b,
        direct,
        mobius,
        main_term,
        deviation: (direct as f64 - main_term) / (ctx.p() as f64).sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveCount {
    pub e_h: u64,
    pub d_k: u64,
    pub alpha1: Fp,
    pub alpha2: Fp,
    /// Points `(ξ, η) ∈ (F_p^*)^2` on the curve.
    pub n: u64,
    /// `f_H(K)` for `|H| = (p-1)/e_H`, `|K| = (p-1)/d_K`, counted on the groups.
    pub f: u64,
    /// `|N - p| / (sqrt(p) e_H d_K)`.
    pub deviation: f64,
}

impl CurveCount {
    pub fn consistent(&self) -> bool {
        self.n == self.f * self.e_h * self.d_k
    }
}

/// Points of `α1 η^e + α2 η^-e = ξ^d + ξ^-d` on the torus, together with the
/// group count `f_H(K)` it covers `e d`-to-one.
pub fn count_split_curve(alpha1: Fp, alpha2: Fp, e_h: u64, d_k: u64, ctx: &PrimeContext) -> Result<CurveCount> {
    let p = ctx.p();
    for m in [e_h, d_k] {
        if m == 0 || !(p - 1).is_multiple_of(m) {
            return Err(Error::NotADivisor { m, n: p - 1 });
        }
    }
    if alpha1.is_zero() || alpha2.is_zero() {
        return Err(Error::Zero);
    }
    if ctx.mul(alpha1, alpha2) == Fp::ONE {
        return Err(Error::DegenerateCurve);
    }
    let xi_table = power_trace_table(d_k, ctx);
    let mut n = 0u64;
    for eta in 1..p {
        let y = ctx.pow(Fp(eta), e_h);
        let lhs = ctx.add(ctx.mul(alpha1, y), ctx.div(alpha2, y)?);
        n += xi_table[lhs.0 as usize] as u64;
    }
    let h = subgroup(Ambient::Split, (p - 1) / e_h, ctx)?;
    let k = subgroup(Ambient::Split, (p - 1) / d_k, ctx)?;
    let f = count_fhk(alpha1, alpha2, &h, &k, ctx)?.count;
    let deviation = (n as f64 - p as f64).abs() / ((p as f64).sqrt() * (e_h * d_k) as f64);
    Ok(CurveCount { e_h, d_k, alpha1, alpha2, n, f, deviation })
}

/// `(ξ + sqrt(D) η)^n = g_n(ξ, η) + h_n(ξ, η) sqrt(D)`. Entry `k` of each
/// vector is the coefficient of `ξ^(n-k) η^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GHPoly {
    pub n: u64,
    pub g: Vec<Fp>,
    pub h: Vec<Fp>,
}

impl GHPoly {
    pub fn eval(&self, xi: Fp, eta: Fp, ctx: &PrimeContext) -> (Fp, Fp) {
        let n = self.n as usize;
        let mut xi_pows = vec![Fp::ONE; n + 1];
        let mut eta_pows = vec![Fp::ONE; n + 1];
        for i in 1..=n {
            xi_pows[i] = ctx.mul(xi_pows[i - 1], xi);
            eta_pows[i] = ctx.mul(eta_pows[i - 1], eta);
        }
        let ev = |c: &[Fp]| {
            c.iter()
                .enumerate()
                .fold(Fp::ZERO, |acc, (k, &a)| ctx.add(acc, ctx.mul(a, ctx.mul(xi_pows[n - k], eta_pows[k]))))
        };
        (ev(&self.g), ev(&self.h))
    }
}

/// Built by `(g, h) -> (ξ g + D η h, η g + ξ h)`.
pub fn gh_poly(n: u64, ctx: &PrimeContext) -> GHPoly {
    let mut g = vec![Fp::ONE];
    let mut h = vec![Fp::ZERO];
    let d = ctx.non_residue();
    for step in 0..n as usize {
        let mut ng = vec![Fp::ZERO; step + 2];
        let mut nh = vec![Fp::ZERO; step + 2];
        for k in 0..=step {
            ng[k] = ctx.add(ng[k], g[k]);
            ng[k + 1] = ctx.add(ng[k + 1], ctx.mul(d, h[k]));
            nh[k + 1] = ctx.add(nh[k + 1], g[k]);
            nh[k] = ctx.add(nh[k], h[k]);
        }
        g = ng;
        h = nh;
    }
    GHPoly { n, g, h }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonsplitCount {
    pub d1: u64,
    pub d2: u64,
    /// Points `(ξ, η, μ)` with `ξ^2 - D η^2 = 1`, `μ != 0`.
    pub m: u64,
    /// `#{(h, y) ∈ H1 × K : Re(h) = y + 1/y}`.
    pub f: u64,
}

impl NonsplitCount {
    pub fn consistent(&self) -> bool {
        self.m == self.d1 * self.d2 * self.f
    }
}

pub fn count_nonsplit_curve(d1: u64, d2: u64, ctx: &PrimeContext) -> Result<NonsplitCount> {
    let p = ctx.p();
    if d1 == 0 || !(p + 1).is_multiple_of(d1) {
        return Err(Error::NotADivisor { m: d1, n: p + 1 });
    }
    if d2 == 0 || !(p - 1).is_multiple_of(d2) {
        return Err(Error::NotADivisor { m: d2, n: p - 1 });
    }
    let gh = gh_poly(d1, ctx);
    let mu_table = power_trace_table(d2, ctx);
    let mut m = 0u64;
    let gen = ctx.norm_one_generator();
    let mut z = QuadExt::ONE;
    for _ in 0..=p {
        let (g, _) = gh.eval(z.re, z.im, ctx);
        m += mu_table[g.0 as usize] as u64;
        z = ctx.qmul(z, gen);
    }
    let h1 = subgroup(Ambient::NormOne, (p + 1) / d1, ctx)?;
    let k = subgroup(Ambient::Split, (p - 1) / d2, ctx)?;
    let k_table = trace_table(&k.split_elements(ctx), ctx);
    let f = h1.elements(ctx).iter().map(|h| k_table[h.re.0 as usize] as u64).sum();
    Ok(NonsplitCount { d1, d2, m, f })
}

/// `20 max{(|H1| |H2|)^(1/3), |H1| |H2| / p}`.
pub fn cz_bound(h1: u64, h2: u64, p: u64) -> f64 {
    let prod = (h1 * h2) as f64;
    20.0 * prod.cbrt().max(prod / p as f64)
}

/// Counts `h1 + σ/h1 = h2 + 1/h2` for a fixed `H2` and varying `σ`, `H1`.
pub struct TraceEquationCounter<'a> {
    ctx: &'a PrimeContext,
    h2_order: u64,
    table: Vec<u32>,
}

impl<'a> TraceEquationCounter<'a> {
    pub fn new(h2: &SubgroupSpec, ctx: &'a PrimeContext) -> Self {
        let p = ctx.p() as usize;
        let mut table = vec![0u32; p * p];
        for z in h2.elements(ctx) {
            let v = ctx.qadd(z, ctx.qinv(z).expect("unit"));
            table[v.key(ctx.p())] += 1;
        }
        Self { ctx, h2_order: h2.order, table }
    }

    pub fn count(&self, sigma: Fp, h1: &SubgroupSpec) -> Result<TraceEquationRecord> {
        if sigma == Fp::ONE {
            return Err(Error::SigmaIsOne);
        }
        let ctx = self.ctx;
        let s = QuadExt::from_fp(sigma);
        let t = h1
            .elements(ctx)
            .iter()
            .map(|&z| {
                let v = ctx.qadd(z, ctx.qdiv(s, z));
                self.table[v.key(ctx.p())] as u64
            })
            .sum();
        Ok(TraceEquationRecord {
            sigma,
            h1_order: h1.order,
            h1_ambient: h1.ambient,
            h2_order: self.h2_order,
            t,
            cz_bound: cz_bound(h1.order, self.h2_order, ctx.p()),
            trivial_bound: 2 * h1.order.min(self.h2_order),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEquationRecord {
    pub sigma: Fp,
    pub h1_order: u64,
    pub h1_ambient: Ambient,
    pub h2_order: u64,
    pub t: u64,
    pub cz_bound: f64,
    pub trivial_bound: u64,
}

impl TraceEquationRecord {
    pub fn within_bounds(&self) -> bool {
        self.t <= self.trivial_bound && (self.t as f64) <= self.cz_bound
    }
}

pub fn count_trace_equation(sigma: Fp, h1: &SubgroupSpec, h2: &SubgroupSpec, ctx: &PrimeContext) -> Result<TraceEquationRecord> {
    TraceEquationCounter::new(h2, ctx).count(sigma, h1)
}

/// Solutions `(h1, h2)` of `h1 + σ/h1 = h2 + 1/h2`.
pub fn trace_equation_solutions(sigma: Fp, h1: &SubgroupSpec, h2: &SubgroupSpec, ctx: &PrimeContext) -> Result<Vec<(QuadExt, QuadExt)>> {
    if sigma == Fp::ONE {
        return Err(Error::SigmaIsOne);
    }
    let s = QuadExt::from_fp(sigma);
    let mut by_value: HashMap<QuadExt, Vec<QuadExt>> = HashMap::new();
    for z in h2.elements(ctx) {
        by_value.entry(ctx.qadd(z, ctx.qinv(z)?)).or_default().push(z);
    }
    let mut out = Vec::new();
    for z in h1.elements(ctx) {
        let v = ctx.qadd(z, ctx.qdiv(s, z));
        if let Some(ws) = by_value.get(&v) {
            out.extend(ws.iter().map(|&w| (z, w)));
        }
    }
    Ok(out)
}

/// The quantities of the middle-game change of variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiddlegameRecord {
    pub t: QuadExt,
    pub sigma: Fp,
    pub u: QuadExt,
    pub v: QuadExt,
    pub x: QuadExt,
    pub y: QuadExt,
    pub t_tilde: QuadExt,
    pub alpha: QuadExt,
    pub beta: QuadExt,
}

pub fn middlegame_transform(f1: QuadExt, f2: QuadExt, t: QuadExt, sigma: Fp, ctx: &PrimeContext) -> Result<MiddlegameRecord> {
    let tilde = |z: QuadExt| -> Result<QuadExt> { Ok(ctx.qadd(z, ctx.qinv(z)?)) };
    let u = tilde(f1)?;
    let v = tilde(f2)?;
    let x = tilde(ctx.qmul(f1, f2))?;
    let y = tilde(ctx.qdiv(f1, f2))?;
    let t_tilde = tilde(t)?;
    let s = QuadExt::from_fp(sigma);
    let four = QuadExt::from_fp(ctx.elem(4));
    let beta = ctx.qadd(
        ctx.qmul(s, ctx.qmul(t_tilde, t_tilde)),
        ctx.qmul(four, QuadExt::from_fp(ctx.sub(Fp::ONE, sigma))),
    );
    Ok(MiddlegameRecord { t, sigma, u, v, x, y, t_tilde, alpha: t_tilde, beta })
}

impl MiddlegameRecord {
    /// `uv = x + y` and `u^2 + v^2 = xy + 4`.
    pub fn identities_hold(&self, ctx: &PrimeContext) -> bool {
        let four = QuadExt::from_fp(ctx.elem(4));
        let lhs2 = ctx.qadd(ctx.qmul(self.u, self.u), ctx.qmul(self.v, self.v));
        ctx.qmul(self.u, self.v) == ctx.qadd(self.x, self.y)
            && lhs2 == ctx.qadd(ctx.qmul(self.x, self.y), four)
    }

    /// `u^2 + v^2 - t~ uv + σ (t - 1/t)^2`.
    pub fn quadratic_residual(&self, ctx: &PrimeContext) -> QuadExt {
        let d = ctx.qsub(self.t, ctx.qdiv(QuadExt::ONE, self.t));
        let s = QuadExt::from_fp(self.sigma);
        let a = ctx.qadd(ctx.qmul(self.u, self.u), ctx.qmul(self.v, self.v));
        let b = ctx.qmul(self.t_tilde, ctx.qmul(self.u, self.v));
        ctx.qadd(ctx.qsub(a, b), ctx.qmul(s, ctx.qmul(d, d)))
    }

    /// `xy - t~ (x + y) + σ t~^2 + 4 (1 - σ)`.
    pub fn product_residual(&self, ctx: &PrimeContext) -> QuadExt {
        let xy = ctx.qmul(self.x, self.y);
        let mid = ctx.qmul(self.t_tilde, ctx.qadd(self.x, self.y));
        ctx.qadd(ctx.qsub(xy, mid), self.beta)
    }

    /// `(α x - β) / (x - α)`, or `None` at the pole `x = α`.
    pub fn mobius_y(&self, ctx: &PrimeContext) -> Option<QuadExt> {
        let den = ctx.qsub(self.x, self.alpha);
        if den.is_zero() {
            return None;
        }
        Some(ctx.qdiv(ctx.qsub(ctx.qmul(self.alpha, self.x), self.beta), den))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiddlegameCheck {
    pub solutions: usize,
    pub pairs: usize,
    pub failures: usize,
    pub poles: usize,
}

/// Every ordered pair of solutions `(h1, h2), (h1', h2')` of the subgroup
/// equation gives `t = h1'/h1`, `f1 = h2`, `f2 = h2'` satisfying the
/// transformed equations; count those that do not.
pub fn middlegame_solution_check(sigma: Fp, h1: &SubgroupSpec, h2: &SubgroupSpec, ctx: &PrimeContext) -> Result<MiddlegameCheck> {
    let sols = trace_equation_solutions(sigma, h1, h2, ctx)?;
    let mut out = MiddlegameCheck { solutions: sols.len(), ..Default::default() };
    for &(a, f1) in &sols {
        for &(b, f2) in &sols {
            let t = ctx.qdiv(b, a);
            let rec = middlegame_transform(f1, f2, t, sigma, ctx)?;
            out.pairs += 1;
            let mut ok = rec.identities_hold(ctx)
                && rec.quadratic_residual(ctx).is_zero()
                && rec.product_residual(ctx).is_zero();
            match rec.mobius_y(ctx) {
                Some(y) => ok &= y == rec.y,
                None => out.poles += 1,
            }
            if !ok {
                out.failures += 1;
            }
        }
    }
    Ok(out)
}

/// `[[a, b], [c, d]]` over `F_{p^2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2(pub [QuadExt; 4]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([QuadExt::ONE, QuadExt::ZERO, QuadExt::ZERO, QuadExt::ONE]);

    pub fn from_fp(m: [Fp; 4]) -> Self {
        Mat2(m.map(QuadExt::from_fp))
    }

    pub fn mul(&self, o: &Mat2, ctx: &PrimeContext) -> Mat2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        let dot = |x, y, z, w| ctx.qadd(ctx.qmul(x, y), ctx.qmul(z, w));
        Mat2([dot(a, e, b, g), dot(a, f, b, h), dot(c, e, d, g), dot(c, f, d, h)])
    }

    pub fn det(&self, ctx: &PrimeContext) -> QuadExt {
        let [a, b, c, d] = self.0;
        ctx.qsub(ctx.qmul(a, d), ctx.qmul(b, c))
    }

    /// Adjugate, `det · M^-1`.
    pub fn adj(&self, ctx: &PrimeContext) -> Mat2 {
        let [a, b, c, d] = self.0;
        Mat2([d, ctx.qneg(b), ctx.qneg(c), a])
    }

    pub fn inv(&self, ctx: &PrimeContext) -> Result<Mat2> {
        let det = self.det(ctx);
        let di = ctx.qinv(det).map_err(|_| Error::Singular)?;
        Ok(self.adj(ctx).scale(di, ctx))
    }

    pub fn scale(&self, s: QuadExt, ctx: &PrimeContext) -> Mat2 {
        Mat2(self.0.map(|x| ctx.qmul(x, s)))
    }

    pub fn is_scalar(&self) -> bool {
        let [a, b, c, d] = self.0;
        b.is_zero() && c.is_zero() && a == d
    }

    pub fn is_rational(&self) -> bool {
        self.0.iter().all(|x| x.is_rational())
    }
}

/// `Φ(t) = [[t, -σ t^2 - 4(1 - σ)], [1, -t]]`.
pub fn phi_matrix(t: QuadExt, sigma: Fp, ctx: &PrimeContext) -> Mat2 {
    let s = QuadExt::from_fp(sigma);
    let c = QuadExt::from_fp(ctx.mul(ctx.elem(4), ctx.sub(Fp::ONE, sigma)));
    let b = ctx.qneg(ctx.qadd(ctx.qmul(s, ctx.qmul(t, t)), c));
    Mat2([t, b, QuadExt::ONE, ctx.qneg(t)])
}

/// `g_t = [[σ(1+σ) t + 4σ(1-σ)/t, -σ^2 t^2 + 4(1-σ)^2], [1, 0]]`, the matrix
/// with `adj Φ(s) Φ(t) = (1-σ)(4/t - t) g_t` at `s = σ t + 4(1-σ)/t`.
pub fn g_matrix(t: QuadExt, sigma: Fp, ctx: &PrimeContext) -> Result<Mat2> {
    let ti = ctx.qinv(t)?;
    let s = QuadExt::from_fp(sigma);
    let one_minus = ctx.sub(Fp::ONE, sigma);
    let a = ctx.qadd(
        ctx.qscale(t, ctx.mul(sigma, ctx.add(Fp::ONE, sigma))),
        ctx.qscale(ti, ctx.mul(ctx.elem(4), ctx.mul(sigma, one_minus))),
    );
    let st = ctx.qmul(s, t);
    let b = ctx.qsub(
        QuadExt::from_fp(ctx.mul(ctx.elem(4), ctx.mul(one_minus, one_minus))),
        ctx.qmul(st, st),
    );
    Ok(Mat2([a, b, QuadExt::ONE, QuadExt::ZERO]))
}

fn commutator(a: &Mat2, b: &Mat2, ctx: &PrimeContext) -> Result<Mat2> {
    Ok(a.mul(b, ctx).mul(&a.inv(ctx)?, ctx).mul(&b.inv(ctx)?, ctx))
}

/// `[g1, g2][g3, g4][g2, g1][g4, g3]` for `g_i = g_{t_i}`.
pub fn commutator_word(ts: [QuadExt; 4], sigma: Fp, ctx: &PrimeContext) -> Result<Mat2> {
    let g: Vec<Mat2> = ts.iter().map(|&t| g_matrix(t, sigma, ctx)).collect::<Result<_>>()?;
    let c12 = commutator(&g[0], &g[1], ctx)?;
    let c34 = commutator(&g[2], &g[3], ctx)?;
    let c21 = commutator(&g[1], &g[0], ctx)?;
    let c43 = commutator(&g[3], &g[2], ctx)?;
    Ok(c12.mul(&c34, ctx).mul(&c21, ctx).mul(&c43, ctx))
}

/// The pair `g_± = [[±η, ε], [1, 0]]` for a given `σ` and `ε = ±1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorPair {
    pub sigma: Fp,
    pub epsilon: i8,
    /// `κ^2 = (4(1-σ)^2 - ε) / σ^2`.
    pub kappa_sq: Fp,
    pub kappa: QuadExt,
    pub eta: QuadExt,
    pub g_plus: Mat2,
    pub g_minus: Mat2,
}

/// `None` when `ε` violates `(1+σ)(4(1-σ)^2 - ε) + 4σ^2(1-σ) != 0` or makes
/// `κ = 0`.
pub fn generator_pair(sigma: Fp, epsilon: i8, ctx: &PrimeContext) -> Result<Option<GeneratorPair>> {
    if sigma == Fp::ONE {
        return Err(Error::SigmaIsOne);
    }
    if sigma.is_zero() {
        return Err(Error::InvalidParams("σ = 0".into()));
    }
    let eps = ctx.elem_i64(epsilon as i64);
    let om = ctx.sub(Fp::ONE, sigma);
    let base = ctx.sub(ctx.mul(ctx.elem(4), ctx.mul(om, om)), eps);
    let cond = ctx.add(
        ctx.mul(ctx.add(Fp::ONE, sigma), base),
        ctx.mul(ctx.elem(4), ctx.mul(ctx.mul(sigma, sigma), om)),
    );
    let kappa_sq = ctx.div(base, ctx.mul(sigma, sigma))?;
    if cond.is_zero() || kappa_sq.is_zero() {
        return Ok(None);
    }
    let kappa = ctx.sqrt_in_ext(kappa_sq);
    // g_κ has (1,2) entry ε and (1,1) entry (σ/κ)[(1+σ)κ^2 + 4(1-σ)].
    let g = g_matrix(kappa, sigma, ctx)?;
    debug_assert_eq!(g.0[1], QuadExt::from_fp(eps));
    let eta = g.0[0];
    let e = QuadExt::from_fp(eps);
    Ok(Some(GeneratorPair {
        sigma,
        epsilon,
        kappa_sq,
        kappa,
        eta,
        g_plus: Mat2([eta, e, QuadExt::ONE, QuadExt::ZERO]),
        g_minus: Mat2([ctx.qneg(eta), e, QuadExt::ONE, QuadExt::ZERO]),
    }))
}

/// Group generated by `gens`, by breadth-first closure. Fails once more than
/// `limit` elements have been found.
pub fn closure(gens: &[Mat2], limit: usize, ctx: &PrimeContext) -> Result<Vec<Mat2>> {
    let mut seen: HashSet<Mat2> = HashSet::from([Mat2::IDENTITY]);
    let mut order = vec![Mat2::IDENTITY];
    let mut frontier = vec![Mat2::IDENTITY];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for g in gens {
                let y = x.mul(g, ctx);
                if seen.insert(y) {
                    if seen.len() > limit {
                        return Err(Error::InvalidParams(format!("group exceeds {limit} elements")));
                    }
                    order.push(y);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    Ok(order)
}

/// Derived subgroup of the group `elems = <gens>`: the normal closure of the
/// commutators of the generators.
pub fn derived_subgroup(elems: &[Mat2], gens: &[Mat2], ctx: &PrimeContext) -> Result<Vec<Mat2>> {
    let mut normal_gens: HashSet<Mat2> = HashSet::new();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            let c = commutator(a, b, ctx)?;
            for x in elems {
                normal_gens.insert(x.mul(&c, ctx).mul(&x.inv(ctx)?, ctx));
            }
        }
    }
    let mut g: Vec<Mat2> = normal_gens.into_iter().collect();
    g.sort_by_key(|m| m.0.map(|z| (z.re.0, z.im.0)));
    closure(&g, elems.len(), ctx)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub sigma: Fp,
    pub epsilon: i8,
    pub eta_rational: bool,
    pub order: usize,
    pub det_one: usize,
    pub scalars: usize,
    pub derived_order: usize,
    /// The closure consists of determinant-one matrices over `F_p` and has
    /// `p(p^2 - 1)` elements.
    pub equals_sl2: bool,
}

pub fn sl2_order(p: u64) -> usize {
    (p * (p * p - 1)) as usize
}

pub fn generator_closure(pair: &GeneratorPair, ctx: &PrimeContext) -> Result<ClosureReport> {
    let gens = [pair.g_plus, pair.g_minus];
    let limit = 4 * (ctx.p() as usize + 1) * sl2_order(ctx.p());
    let elems = closure(&gens, limit, ctx)?;
    let derived = derived_subgroup(&elems, &gens, ctx)?;
    let det_one = elems.iter().filter(|m| m.det(ctx) == QuadExt::ONE).count();
    let rational_sl2 = elems.iter().all(|m| m.is_rational() && m.det(ctx) == QuadExt::ONE);
    Ok(ClosureReport {
        sigma: pair.sigma,
        epsilon: pair.epsilon,
        eta_rational: pair.eta.is_rational(),
        order: elems.len(),
        det_one,
        scalars: elems.iter().filter(|m| m.is_scalar()).count(),
        derived_order: derived.len(),
        equals_sl2: rational_sl2 && elems.len() == sl2_order(ctx.p()),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiReport {
    pub sigma: Fp,
    pub det_samples: usize,
    pub det_failures: usize,
    pub adjugate_failures: usize,
    pub witness: Option<[QuadExt; 4]>,
    pub witness_in_extension: bool,
}

/// Checks `det Φ(t) = (1-σ)(4-t^2)` and the factorization of
/// `adj Φ(s) Φ(t)` at random `t`, and searches for `t_1..t_4` at which the
/// double commutator word is not the identity.
pub fn phi_nondegeneracy<R: Rng>(sigma: Fp, samples: usize, rng: &mut R, ctx: &PrimeContext) -> Result<PhiReport> {
    if sigma == Fp::ONE {
        return Err(Error::SigmaIsOne);
    }
    if sigma.is_zero() {
        // g_t is then constant and every commutator is trivial.
        return Err(Error::InvalidParams("σ = 0".into()));
    }
    let p = ctx.p();
    let om = ctx.sub(Fp::ONE, sigma);
    let mut det_failures = 0;
    let mut adjugate_failures = 0;
    for _ in 0..samples {
        let t = Fp(rng.gen_range(1..p));
        let tq = QuadExt::from_fp(t);
        let expect = ctx.mul(om, ctx.sub(ctx.elem(4), ctx.mul(t, t)));
        if phi_matrix(tq, sigma, ctx).det(ctx) != QuadExt::from_fp(expect) {
            det_failures += 1;
        }
        let s = ctx.add(ctx.mul(sigma, t), ctx.div(ctx.mul(ctx.elem(4), om), t)?);
        let lhs = phi_matrix(QuadExt::from_fp(s), sigma, ctx)
            .adj(ctx)
            .mul(&phi_matrix(tq, sigma, ctx), ctx);
        let factor = ctx.mul(om, ctx.sub(ctx.div(ctx.elem(4), t)?, t));
        let rhs = g_matrix(tq, sigma, ctx)?.scale(QuadExt::from_fp(factor), ctx);
        if lhs != rhs {
            adjugate_failures += 1;
        }
    }
    let invertible = |t: QuadExt| g_matrix(t, sigma, ctx).map(|g| !g.det(ctx).is_zero()).unwrap_or(false);
    let word_witness = |ts: [QuadExt; 4]| -> Result<bool> {
        if !ts.iter().all(|&t| invertible(t)) {
            return Ok(false);
        }
        Ok(commutator_word(ts, sigma, ctx)? != Mat2::IDENTITY)
    };
    let mut witness = None;
    let mut in_ext = false;
    for _ in 0..200 {
        let ts = [(); 4].map(|_| QuadExt::from_fp(Fp(rng.gen_range(1..p))));
        if word_witness(ts)? {
            witness = Some(ts);
            break;
        }
    }
    if witness.is_none() && p <= 31 {
        'scan: for a in 1..p {
            for b in 1..p {
                for c in 1..p {
                    for d in 1..p {
                        let ts = [a, b, c, d].map(|v| QuadExt::from_fp(Fp(v)));
                        if word_witness(ts)? {
                            witness = Some(ts);
                            break 'scan;
                        }
                    }
                }
            }
        }
    }
    if witness.is_none() {
        for _ in 0..2000 {
            let ts = [(); 4].map(|_| QuadExt::new(Fp(rng.gen_range(0..p)), Fp(rng.gen_range(1..p))));
            if word_witness(ts)? {
                witness = Some(ts);
                in_ext = true;
                break;
            }
        }
    }
    Ok(PhiReport {
        sigma,
        det_samples: samples,
        det_failures,
        adjugate_failures,
        witness,
        witness_in_extension: in_ext,
    })
}

/// Orders of all subgroups of `F_p^*` and of the norm-one group.
pub fn all_subgroups(ctx: &PrimeContext) -> Result<Vec<SubgroupSpec>> {
    let mut out = Vec::new();
    for d in crate::ff::divisors(ctx.fact_pm1()) {
        out.push(subgroup(Ambient::Split, d, ctx)?);
    }
    for d in crate::ff::divisors(ctx.fact_pp1()) {
        out.push(subgroup(Ambient::NormOne, d, ctx)?);
    }
    Ok(out)
}
