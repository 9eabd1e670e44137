//! Auxiliary polynomials for the set
//! `Y = {y : S(y)^t1 = T(y)^t2 = 1}` with `S`, `T` split rational functions.
//!
//! Write `W = Π (x - ρ)` over all `e` roots and poles of `S` and `T`, and
//! `F_b = S^(t1 b1) T^(t2 b2)`. Then `W^m F_b^(m) = F_b P_{m,b}` where
//! `P_0 = 1` and
//!
//! ```text
//! P_{m+1} = L_b P_m + W P_m' - m W' P_m,    L_b = W F_b' / F_b,
//! ```
//!
//! so `deg P_{m,b} <= (e - 1) m`. With the factor `x^a` included,
//! `W^m (x^a F_b)^(m) = F_b Q_{m,a,b}` where
//! `Q_{m,a,b} = Σ_j C(m,j) (a)_j x^(a-j) W^j P_{m-j,b}`. Since `F_b = 1` on
//! `Y`, making `Σ λ_{a,b} Q_{m,a,b}` vanish identically for `m < M` forces
//! `φ = Σ λ x^a F_b` to vanish to order at least `M` on `Y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{mul_mod, pow_mod, Fp, PrimeContext};
use crate::linalg::kernel_vector;
use crate::poly::Poly;

/// `S` and `T` by their roots, poles and leading constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalFunctionSpec {
    pub s_roots: Vec<u64>,
    pub s_poles: Vec<u64>,
    pub t_roots: Vec<u64>,
    pub t_poles: Vec<u64>,
    #[serde(default = "one")]
    pub s_lead: u64,
    #[serde(default = "one")]
    pub t_lead: u64,
}

fn one() -> u64 {
    1
}

impl RationalFunctionSpec {
    pub fn new(s_roots: Vec<u64>, s_poles: Vec<u64>, t_roots: Vec<u64>, t_poles: Vec<u64>) -> Self {
        Self { s_roots, s_poles, t_roots, t_poles, s_lead: 1, t_lead: 1 }
    }

    /// `S(x) = x`, `T(x) = 1 - x`.
    pub fn unit_line(p: u64) -> Self {
        Self { t_lead: p - 1, ..Self::new(vec![0], vec![], vec![1], vec![]) }
    }

    pub fn d1(&self) -> usize {
        self.s_roots.len() + self.s_poles.len()
    }

    pub fn d2(&self) -> usize {
        self.t_roots.len() + self.t_poles.len()
    }

    pub fn e(&self) -> usize {
        self.d1() + self.d2()
    }

    fn all_points(&self) -> impl Iterator<Item = u64> + '_ {
        self.s_roots
            .iter()
            .chain(&self.s_poles)
            .chain(&self.t_roots)
            .chain(&self.t_poles)
            .copied()
    }

    pub fn validate(&self, p: u64) -> Result<()> {
        let mut pts: Vec<u64> = self.all_points().collect();
        if pts.iter().any(|&x| x >= p) {
            return Err(Error::InvalidParams("roots and poles must lie in [0, p)".into()));
        }
        pts.sort_unstable();
        let n = pts.len();
        pts.dedup();
        if pts.len() != n {
            return Err(Error::InvalidParams("roots and poles must be distinct".into()));
        }
        if self.d1() == 0 || self.d2() == 0 {
            return Err(Error::InvalidParams("S and T must be nonconstant".into()));
        }
        if self.s_lead.is_multiple_of(p) || self.t_lead.is_multiple_of(p) {
            return Err(Error::InvalidParams("leading constants must be nonzero".into()));
        }
        Ok(())
    }

    fn eval_part(lead: u64, roots: &[u64], poles: &[u64], y: u64, p: u64) -> Option<u64> {
        let num = roots.iter().fold(lead % p, |acc, &r| mul_mod(acc, (y + p - r) % p, p));
        let den = poles.iter().fold(1, |acc, &r| mul_mod(acc, (y + p - r) % p, p));
        if den == 0 {
            return None;
        }
        Some(mul_mod(num, pow_mod(den, p - 2, p), p))
    }

    /// `(S(y), T(y))`, or `None` at a pole.
    pub fn eval(&self, y: u64, p: u64) -> Option<(u64, u64)> {
        Some((
            Self::eval_part(self.s_lead, &self.s_roots, &self.s_poles, y, p)?,
            Self::eval_part(self.t_lead, &self.t_roots, &self.t_poles, y, p)?,
        ))
    }
}

/// `Y` by scanning `F_p`.
pub fn y_set(spec: &RationalFunctionSpec, t1: u64, t2: u64, ctx: &PrimeContext) -> Result<Vec<u64>> {
    let p = ctx.p();
    spec.validate(p)?;
    for t in [t1, t2] {
        if t == 0 || !(p - 1).is_multiple_of(t) {
            return Err(Error::NotADivisor { m: t, n: p - 1 });
        }
    }
    if t1 < t2 {
        return Err(Error::InvalidParams("t1 must be at least t2".into()));
    }
    Ok((0..p)
        .filter(|&y| match spec.eval(y, p) {
            Some((s, t)) => pow_mod(s, t1, p) == 1 && pow_mod(t, t2, p) == 1,
            None => false,
        })
        .collect())
}

pub fn count_y(spec: &RationalFunctionSpec, t1: u64, t2: u64, ctx: &PrimeContext) -> Result<usize> {
    Ok(y_set(spec, t1, t2, ctx)?.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxPolyParams {
    pub j: u64,
    pub b: u64,
    pub m: u64,
    pub t1: u64,
    pub t2: u64,
}

impl AuxPolyParams {
    /// `(J + eM) M < B^2 J`.
    pub fn dimension_condition(&self, e: u64) -> bool {
        (self.j + e * self.m) * self.m < self.b * self.b * self.j
    }

    /// `p >= (2eB + 2) t1` and `2 t2 >= e B^(2e) + 2 J B^e`.
    pub fn independence_condition(&self, e: u64, p: u64) -> bool {
        let be = (self.b as u128).pow(e as u32);
        (p as u128) >= (2 * e as u128 * self.b as u128 + 2) * self.t1 as u128
            && 2 * self.t2 as u128 >= e as u128 * be * be + 2 * self.j as u128 * be
    }

    pub fn valid(&self, e: u64, p: u64) -> bool {
        self.j >= 1
            && self.b >= 1
            && self.t1 >= self.t2
            && (p - 1).is_multiple_of(self.t1)
            && (p - 1).is_multiple_of(self.t2)
            && self.dimension_condition(e)
            && self.independence_condition(e, p)
    }

    /// `J + e B t1`.
    pub fn degree_bound(&self, e: u64) -> u64 {
        self.j + e * self.b * self.t1
    }
}

/// Parameters with `B` starting at `ceil(t1^(1/(2e)))` and decreasing until
/// the constraints can be met; among those, the smallest `(J + eBt1) / M`.
pub fn select_params(e: u64, t1: u64, t2: u64, p: u64) -> Option<AuxPolyParams> {
    let b0 = ((t1 as f64).powf(1.0 / (2.0 * e as f64)).ceil() as u64).max(2);
    for b in (2..=b0).rev() {
        let mut best: Option<(f64, AuxPolyParams)> = None;
        let be = (b as u128).checked_pow(e as u32)?;
        let base = e as u128 * be * be;
        if 2 * (t2 as u128) < base {
            continue;
        }
        let j_max = ((2 * t2 as u128 - base) / (2 * be)).min(4096) as u64;
        for j in 1..=j_max {
            for m in 1..=(b * b * j) {
                let cand = AuxPolyParams { j, b, m, t1, t2 };
                if !cand.dimension_condition(e) {
                    break;
                }
                if cand.valid(e, p) {
                    let score = cand.degree_bound(e) as f64 / m as f64;
                    if best.is_none_or(|(s, _)| score < s) {
                        best = Some((score, cand));
                    }
                }
            }
        }
        if let Some((_, c)) = best {
            return Some(c);
        }
    }
    None
}

/// Instance file contents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepanovInstance {
    pub p: u64,
    #[serde(rename = "S_roots")]
    pub s_roots: Vec<u64>,
    #[serde(rename = "S_poles")]
    pub s_poles: Vec<u64>,
    #[serde(rename = "T_roots")]
    pub t_roots: Vec<u64>,
    #[serde(rename = "T_poles")]
    pub t_poles: Vec<u64>,
    #[serde(rename = "S_lead", default = "one")]
    pub s_lead: u64,
    #[serde(rename = "T_lead", default = "one")]
    pub t_lead: u64,
    pub t1: u64,
    pub t2: u64,
    #[serde(rename = "J")]
    pub j: u64,
    #[serde(rename = "B")]
    pub b: u64,
    #[serde(rename = "M")]
    pub m: u64,
}

impl StepanovInstance {
    pub fn spec(&self) -> RationalFunctionSpec {
        RationalFunctionSpec {
            s_roots: self.s_roots.clone(),
            s_poles: self.s_poles.clone(),
            t_roots: self.t_roots.clone(),
            t_poles: self.t_poles.clone(),
            s_lead: self.s_lead,
            t_lead: self.t_lead,
        }
    }

    pub fn params(&self) -> AuxPolyParams {
        AuxPolyParams { j: self.j, b: self.b, m: self.m, t1: self.t1, t2: self.t2 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxPoly {
    pub params: AuxPolyParams,
    pub e: u64,
    /// `λ_{a,b1,b2}` at index `(a (B+1) + b1) (B+1) + b2`.
    pub lambdas: Vec<u64>,
    pub unknowns: usize,
    pub equations: usize,
    /// Degree of `Ψ = Π(x-β)^(B t1) Π(x-δ)^(B t2) φ`.
    pub psi_degree: usize,
    pub y_size: usize,
    /// Every `y ∈ Y` is a root of `Ψ` of multiplicity at least `M`.
    pub vanishing_ok: bool,
    /// `M |Y| <= deg Ψ <= J + e B t1`.
    pub bound_ok: bool,
}

fn falling(a: u64, j: u64, p: u64) -> u64 {
    (0..j).fold(1, |acc, i| mul_mod(acc, (a + p - i % p) % p, p))
}

fn binom_mod(n: u64, k: u64, p: u64) -> u64 {
    let num = falling(n, k, p);
    let den = (1..=k).fold(1, |acc, i| mul_mod(acc, i % p, p));
    mul_mod(num, pow_mod(den, p - 2, p), p)
}

/// The polynomials `P_{m,b}` for `m = 0..count`.
fn p_sequence(nu: &[(u64, i64)], w: &Poly, count: usize, p: u64) -> Vec<Poly> {
    let w_prime = w.derivative(p);
    let mut l = Poly::zero();
    for &(root, mult) in nu {
        let (q, r) = w.div_rem(&Poly::linear_root(root, p), p);
        debug_assert!(r.is_zero());
        let c = mult.rem_euclid(p as i64) as u64;
        l = l.add(&q.scale(c, p), p);
    }
    let mut out = vec![Poly::one()];
    for m in 0..count.saturating_sub(1) {
        let pm = &out[m];
        let next = l
            .mul(pm, p)
            .add(&w.mul(&pm.derivative(p), p), p)
            .sub(&w_prime.mul(pm, p).scale(m as u64 % p, p), p);
        out.push(next);
    }
    out
}

/// Solve for `λ`, build `Ψ`, and check its vanishing on `Y`.
pub fn build_aux_poly(spec: &RationalFunctionSpec, params: &AuxPolyParams, ctx: &PrimeContext) -> Result<AuxPoly> {
    let p = ctx.p();
    spec.validate(p)?;
    let e = spec.e() as u64;
    let valid = params.valid(e, p) || (params.m == 0 && params.j >= 1 && params.b >= 1);
    if !valid {
        return Err(Error::InvalidParams(format!("{params:?} violates the parameter constraints for e = {e}")));
    }
    if params.m >= p {
        return Err(Error::InvalidParams("M must be below p".into()));
    }
    let y = y_set(spec, params.t1, params.t2, ctx)?;
    let (jj, bb, mm) = (params.j as usize, params.b as usize, params.m as usize);
    let nb = bb + 1;
    let unknowns = (jj + 1) * nb * nb;
    let col = |a: usize, b1: usize, b2: usize| (a * nb + b1) * nb + b2;

    let w = Poly::from_roots(&spec.all_points().collect::<Vec<_>>(), p);
    let mut w_pows = vec![Poly::one()];
    for _ in 1..mm.max(1) {
        let next = w_pows.last().unwrap().mul(&w, p);
        w_pows.push(next);
    }
    let k = spec.e();
    let row_len = |m: usize| jj + (k - 1) * m + 1;
    let row_base: Vec<usize> = (0..mm).scan(0, |acc, m| {
        let b = *acc;
        *acc += row_len(m);
        Some(b)
    }).collect();
    let equations = (0..mm).map(row_len).sum();
    let mut rows = vec![vec![0u64; unknowns]; equations];

    for b1 in 0..nb {
        for b2 in 0..nb {
            let (s1, s2) = (params.t1 as i64 * b1 as i64, params.t2 as i64 * b2 as i64);
            let nu: Vec<(u64, i64)> = spec
                .s_roots
                .iter()
                .map(|&r| (r, s1))
                .chain(spec.s_poles.iter().map(|&r| (r, -s1)))
                .chain(spec.t_roots.iter().map(|&r| (r, s2)))
                .chain(spec.t_poles.iter().map(|&r| (r, -s2)))
                .collect();
            let ps = p_sequence(&nu, &w, mm, p);
            for m in 0..mm {
                for a in 0..=jj {
                    let mut q = Poly::zero();
                    for j in 0..=m.min(a) {
                        let c = mul_mod(binom_mod(m as u64, j as u64, p), falling(a as u64, j as u64, p), p);
                        if c == 0 {
                            continue;
                        }
                        let term = w_pows[j].mul(&ps[m - j], p).shift(a - j).scale(c, p);
                        q = q.add(&term, p);
                    }
                    debug_assert!(q.coeffs().len() <= row_len(m));
                    for (d, &coef) in q.coeffs().iter().enumerate() {
                        rows[row_base[m] + d][col(a, b1, b2)] = coef;
                    }
                }
            }
        }
    }
    let lambdas = kernel_vector(rows, unknowns, p)?;

    // Ψ = Σ λ x^a [A^(t1 b1) Π(x-α)^(t1 b1) Π(x-β)^((B-b1) t1)] [same for T].
    let part = |lead: u64, roots: &[u64], poles: &[u64], t: u64, bi: u64| {
        let r = Poly::from_roots(roots, p).pow(t * bi, p);
        let s = Poly::from_roots(poles, p).pow(t * (params.b - bi), p);
        r.mul(&s, p).scale(pow_mod(lead, t * bi, p), p)
    };
    let s_parts: Vec<Poly> = (0..nb as u64)
        .map(|b1| part(spec.s_lead, &spec.s_roots, &spec.s_poles, params.t1, b1))
        .collect();
    let t_parts: Vec<Poly> = (0..nb as u64)
        .map(|b2| part(spec.t_lead, &spec.t_roots, &spec.t_poles, params.t2, b2))
        .collect();
    let mut psi = Poly::zero();
    for b1 in 0..nb {
        for b2 in 0..nb {
            let mut inner = Poly::zero();
            for a in 0..=jj {
                let lam = lambdas[col(a, b1, b2)];
                if lam != 0 {
                    inner = inner.add(&Poly::monomial(lam, a, p), p);
                }
            }
            if !inner.is_zero() {
                psi = psi.add(&inner.mul(&s_parts[b1], p).mul(&t_parts[b2], p), p);
            }
        }
    }
    if psi.is_zero() {
        return Err(Error::InvalidParams("auxiliary polynomial vanishes identically".into()));
    }
    let psi_degree = psi.degree().expect("nonzero");
    let vanishing_ok = y.iter().all(|&yy| psi.taylor_at(yy, mm, p).iter().all(|&c| c == 0));
    let bound_ok = (mm * y.len()) as u64 <= psi_degree as u64
        && psi_degree as u64 <= params.degree_bound(e);
    Ok(AuxPoly {
        params: *params,
        e,
        lambdas,
        unknowns,
        equations,
        psi_degree,
        y_size: y.len(),
        vanishing_ok,
        bound_ok,
    })
}

/// `x -> (a x + b) / (c x + d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Mobius {
    pub fn new(a: u64, b: u64, c: u64, d: u64, p: u64) -> Self {
        Self { a: a % p, b: b % p, c: c % p, d: d % p }
    }

    fn validate(&self, p: u64) -> Result<()> {
        let det = (mul_mod(self.a, self.d, p) + p - mul_mod(self.b, self.c, p)) % p;
        if det == 0 {
            return Err(Error::Singular);
        }
        if self.b == 0 && self.c == 0 && self.a == self.d {
            return Err(Error::IdentityTransform);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitIntersection {
    pub t: u64,
    pub scan: u64,
    /// `deg gcd(x^t - 1, (ax + b)^t - (cx + d)^t)`.
    pub oracle: u64,
}

/// `|σ(U_t) ∩ U_t|` by scanning `U_t`, alongside the gcd degree.
pub fn count_unit_intersection(sigma: &Mobius, t: u64, ctx: &PrimeContext) -> Result<UnitIntersection> {
    let p = ctx.p();
    if t == 0 || !(p - 1).is_multiple_of(t) {
        return Err(Error::NotADivisor { m: t, n: p - 1 });
    }
    sigma.validate(p)?;
    let g = ctx.pow(ctx.primitive_root(), (p - 1) / t).0;
    let mut scan = 0;
    let mut x = 1u64;
    for _ in 0..t {
        let num = (mul_mod(sigma.a, x, p) + sigma.b) % p;
        let den = (mul_mod(sigma.c, x, p) + sigma.d) % p;
        if den != 0 {
            let v = mul_mod(num, pow_mod(den, p - 2, p), p);
            scan += u64::from(v != 0 && pow_mod(v, t, p) == 1);
        }
        x = mul_mod(x, g, p);
    }
    let modulus = Poly::monomial(1, t as usize, p).sub(&Poly::one(), p);
    let lin = |u: u64, v: u64| Poly::from_coeffs(vec![v, u]);
    let f = lin(sigma.a, sigma.b)
        .pow_mod(t, &modulus, p)
        .sub(&lin(sigma.c, sigma.d).pow_mod(t, &modulus, p), p);
    let oracle = modulus.gcd(&f, p).degree().unwrap_or(0) as u64;
    Ok(UnitIntersection { t, scan, oracle })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberRecord {
    pub b: u64,
    pub t: u64,
    /// Pairs `(w, ρ) ∈ U_t^2` with `w + 1/w = ρ + b/ρ`.
    pub count: u64,
    /// Distinct images `(ξ, η) = (ρ w, w / ρ)`.
    pub images: u64,
    pub max_fiber: u64,
    /// Every image satisfies `ξ (η - 1) = b η - 1`.
    pub relation_ok: bool,
    /// `|σ_b(U_t) ∩ U_t|` for `σ_b = [[b, -1], [1, -1]]`.
    pub scan_count: u64,
}

impl FiberRecord {
    pub fn consistent(&self) -> bool {
        self.relation_ok && self.max_fiber <= 2 && self.images <= self.scan_count && self.count <= 2 * self.scan_count
    }
}

pub fn count_involution_fibers(b: u64, t: u64, ctx: &PrimeContext) -> Result<FiberRecord> {
    let p = ctx.p();
    let b = b % p;
    if b == 1 {
        return Err(Error::BIsOne);
    }
    if t == 0 || !(p - 1).is_multiple_of(t) {
        return Err(Error::NotADivisor { m: t, n: p - 1 });
    }
    let g = ctx.pow(ctx.primitive_root(), (p - 1) / t);
    let mut units = Vec::with_capacity(t as usize);
    let mut x = Fp::ONE;
    for _ in 0..t {
        units.push(x);
        x = ctx.mul(x, g);
    }
    let bf = Fp(b);
    let mut fibers: std::collections::HashMap<(Fp, Fp), u64> = std::collections::HashMap::new();
    let mut count = 0;
    for &w in &units {
        let lhs = ctx.add(w, ctx.inv(w)?);
        for &rho in &units {
            if lhs == ctx.add(rho, ctx.div(bf, rho)?) {
                count += 1;
                let key = (ctx.mul(rho, w), ctx.div(w, rho)?);
                *fibers.entry(key).or_default() += 1;
            }
        }
    }
    let relation_ok = fibers.keys().all(|&(xi, eta)| {
        ctx.mul(xi, ctx.sub(eta, Fp::ONE)) == ctx.sub(ctx.mul(bf, eta), Fp::ONE)
    });
    let sigma_b = Mobius::new(b, p - 1, 1, p - 1, p);
    let scan_count = count_unit_intersection(&sigma_b, t, ctx)?.scan;
    Ok(FiberRecord {
        b,
        t,
        count,
        images: fibers.len() as u64,
        max_fiber: fibers.values().copied().max().unwrap_or(0),
        relation_ok,
        scan_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn unit_line_y_examples() {
        let c = ctx(61);
        let spec = RationalFunctionSpec::unit_line(61);
        let y = y_set(&spec, 12, 12, &c).unwrap();
        let direct: Vec<u64> = (0..61)
            .filter(|&v| pow_mod(v, 12, 61) == 1 && pow_mod((61 + 1 - v) % 61, 12, 61) == 1)
            .collect();
        assert_eq!(y, direct);
        assert!(y.len() <= 12);
    }

    #[test]
    fn t2_one_bounds_y_by_roots() {
        let c = ctx(61);
        let spec = RationalFunctionSpec::unit_line(61);
        // T(y) = 1 forces y = 0, which is a root of S.
        assert_eq!(count_y(&spec, 12, 1, &c).unwrap(), 0);
    }

    #[test]
    fn spec_validation() {
        let p = 61;
        assert!(RationalFunctionSpec::new(vec![1], vec![], vec![1], vec![]).validate(p).is_err());
        assert!(RationalFunctionSpec::new(vec![1], vec![], vec![], vec![]).validate(p).is_err());
        assert!(RationalFunctionSpec::new(vec![1], vec![2], vec![3], vec![70]).validate(p).is_err());
        assert!(RationalFunctionSpec::new(vec![1], vec![2], vec![3], vec![4]).validate(p).is_ok());
    }

    #[test]
    fn eval_with_lead() {
        let spec = RationalFunctionSpec::unit_line(61);
        assert_eq!(spec.eval(5, 61), Some((5, 57)));
        let spec = RationalFunctionSpec::new(vec![2], vec![3], vec![5], vec![]);
        assert_eq!(spec.eval(3, 61), None);
    }

    #[test]
    fn p_sequence_matches_derivatives() {
        // F = x^3 (x - 1)^-2 with W = x (x - 1); check W^m F^(m) = F P_m by
        // comparing numerators after clearing denominators.
        let p = 101;
        let w = Poly::from_roots(&[0, 1], p);
        let ps = p_sequence(&[(0, 3), (1, -2)], &w, 4, p);
        // Numerator form: F = N / D with N = x^3, D = (x-1)^2.
        // F^(m) = N_m / D^(m+1)... use the quotient rule step by step.
        let n0 = Poly::monomial(1, 3, p);
        let d0 = Poly::from_roots(&[1, 1], p);
        let (mut num, mut den) = (n0.clone(), d0.clone());
        for (m, pm) in ps.iter().enumerate() {
            // W^m num / den == (n0 / d0) pm  <=>  W^m num d0 == n0 pm den.
            let lhs = w.pow(m as u64, p).mul(&num, p).mul(&d0, p);
            let rhs = n0.mul(pm, p).mul(&den, p);
            assert_eq!(lhs, rhs, "m = {m}");
            assert!(pm.degree().is_none_or(|d| d <= m));
            let new_num = num.derivative(p).mul(&den, p).sub(&num.mul(&den.derivative(p), p), p);
            den = den.mul(&den, p);
            num = new_num;
        }
    }

    #[test]
    fn parameter_conditions() {
        let ok = AuxPolyParams { j: 1, b: 2, m: 1, t1: 24, t2: 24 };
        assert!(ok.valid(2, 241));
        assert!(!AuxPolyParams { t2: 12, t1: 12, ..ok }.valid(2, 241));
        assert!(!AuxPolyParams { m: 2, ..ok }.dimension_condition(2));
        assert!(!ok.valid(2, 229));
    }

    #[test]
    fn select_params_returns_valid() {
        let got = select_params(2, 24, 24, 241).unwrap();
        assert!(got.valid(2, 241));
        assert_eq!(select_params(2, 12, 12, 61), None);
    }

    #[test]
    fn aux_poly_small_instance() {
        let c = ctx(241);
        let spec = RationalFunctionSpec::unit_line(241);
        let params = AuxPolyParams { j: 1, b: 2, m: 1, t1: 24, t2: 24 };
        let aux = build_aux_poly(&spec, &params, &c).unwrap();
        assert!(aux.lambdas.iter().any(|&l| l != 0));
        assert!(aux.vanishing_ok);
        assert!(aux.bound_ok);
        assert_eq!(aux.unknowns, 18);
    }

    #[test]
    fn aux_poly_order_two() {
        let c = ctx(401);
        let spec = RationalFunctionSpec::unit_line(401);
        let params = AuxPolyParams { j: 5, b: 2, m: 2, t1: 40, t2: 40 };
        assert!(params.valid(2, 401));
        let aux = build_aux_poly(&spec, &params, &c).unwrap();
        assert!(aux.vanishing_ok && aux.bound_ok);
    }

    #[test]
    fn aux_poly_degenerate_m_zero() {
        let c = ctx(61);
        let spec = RationalFunctionSpec::unit_line(61);
        let params = AuxPolyParams { j: 1, b: 1, m: 0, t1: 12, t2: 12 };
        let aux = build_aux_poly(&spec, &params, &c).unwrap();
        assert_eq!(aux.equations, 0);
        assert!(aux.vanishing_ok && aux.bound_ok);
    }

    #[test]
    fn aux_poly_rejects_invalid_params() {
        let c = ctx(61);
        let spec = RationalFunctionSpec::unit_line(61);
        let params = AuxPolyParams { j: 1, b: 2, m: 3, t1: 12, t2: 12 };
        assert!(matches!(build_aux_poly(&spec, &params, &c), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn unit_intersection_examples() {
        let c = ctx(61);
        let inv = Mobius::new(0, 1, 1, 0, 61);
        let r = count_unit_intersection(&inv, 12, &c).unwrap();
        assert_eq!((r.scan, r.oracle), (12, 12));
        let shift = Mobius::new(1, 1, 0, 1, 61);
        let r = count_unit_intersection(&shift, 12, &c).unwrap();
        assert_eq!(r.scan, r.oracle);
        assert_eq!(
            count_unit_intersection(&Mobius::new(3, 0, 0, 3, 61), 12, &c),
            Err(Error::IdentityTransform)
        );
        assert_eq!(count_unit_intersection(&Mobius::new(1, 2, 2, 4, 61), 12, &c), Err(Error::Singular));
    }

    #[test]
    fn unit_intersection_scan_matches_gcd() {
        let c = ctx(61);
        for t in [1u64, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60] {
            for (a, b, cc, d) in [(1, 1, 0, 1), (2, 3, 5, 7), (0, 1, 1, 0), (1, 0, 1, 1), (4, 60, 1, 9)] {
                let r = count_unit_intersection(&Mobius::new(a, b, cc, d, 61), t, &c).unwrap();
                assert_eq!(r.scan, r.oracle, "t={t} σ=({a},{b},{cc},{d})");
            }
        }
    }

    #[test]
    fn involution_fiber_examples() {
        let c = ctx(61);
        let r = count_involution_fibers(3, 1, &c).unwrap();
        assert_eq!(r.count, 0);
        let r = count_involution_fibers(3, 12, &c).unwrap();
        assert!(r.consistent(), "{r:?}");
        assert_eq!(count_involution_fibers(1, 12, &c), Err(Error::BIsOne));
    }

    #[test]
    fn instance_json_round_trip() {
        let inst = StepanovInstance {
            p: 241,
            s_roots: vec![0],
            s_poles: vec![],
            t_roots: vec![1],
            t_poles: vec![],
            s_lead: 1,
            t_lead: 240,
            t1: 24,
            t2: 24,
            j: 1,
            b: 2,
            m: 1,
        };
        let s = serde_json::to_string(&inst).unwrap();
        assert!(s.contains("\"S_roots\":[0]"));
        let back: StepanovInstance = serde_json::from_str(&s).unwrap();
        assert_eq!(back, inst);
        let minimal = r#"{"p":241,"S_roots":[0],"S_poles":[],"T_roots":[1],"T_poles":[],"t1":24,"t2":24,"J":1,"B":2,"M":1}"#;
        let parsed: StepanovInstance = serde_json::from_str(minimal).unwrap();
        assert_eq!(parsed.t_lead, 1);
    }
}
