//! Arithmetic in `F_p` and `F_{p^2} = F_p[sqrt(D)]`.
//!
//! Elements are plain newtypes over `u64`; every operation goes through a
//! [`PrimeContext`], which owns the modulus together with the data that is
//! reused everywhere (a fixed non-residue, a primitive root and the
//! factorizations of `p - 1` and `p + 1`).

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus.
pub const MAX_PRIME: u64 = (1 << 61) - 1;

/// Prime factorization as `(prime, exponent)` pairs in increasing prime order.
pub type Factorization = Vec<(u64, u32)>;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's variant of Pollard rho. `n` must be odd and composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut BTreeMap<u64, u32>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Trial division by small primes followed by Pollard rho on the cofactor.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut map = BTreeMap::new();
    let mut n = n;
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n.is_multiple_of(q) {
            *map.entry(q).or_insert(0) += 1;
            n /= q;
        }
    }
    factor_into(n, &mut map);
    map.into_iter().collect()
}

/// All positive divisors, sorted.
pub fn divisors(f: &[(u64, u32)]) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(q, e) in f {
        let len = out.len();
        let mut pw = 1;
        for _ in 0..e {
            pw *= q;
            for i in 0..len {
                out.push(out[i] * pw);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn euler_phi(f: &[(u64, u32)]) -> u64 {
    f.iter()
        .map(|&(q, e)| (q - 1) * q.pow(e - 1))
        .product()
}

/// On-disk factorization cache, one `n=p1^e1*p2^e2` record per line.
#[derive(Debug, Default, Clone)]
pub struct FactorCache {
    entries: BTreeMap<u64, Factorization>,
    dirty: bool,
}

impl FactorCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(Self::default());
        }
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (n, f) = parse_record(line)?;
            entries.insert(n, f);
        }
        Ok(Self { entries, dirty: false })
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for (n, f) in &self.entries {
            writeln!(w, "{}", format_record(*n, f))?;
        }
        Ok(())
    }

    pub fn save(&mut self, path: &Path) -> Result<()> {
        if !self.dirty && path.exists() {
            return Ok(());
        }
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))?;
        self.dirty = false;
        Ok(())
    }

    pub fn get_or_compute(&mut self, n: u64) -> Factorization {
        if let Some(f) = self.entries.get(&n) {
            return f.clone();
        }
        let f = factorize(n);
        self.entries.insert(n, f.clone());
        self.dirty = true;
        f
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn format_record(n: u64, f: &[(u64, u32)]) -> String {
    let body: Vec<String> = f.iter().map(|(q, e)| format!("{q}^{e}")).collect();
    format!("{n}={}", body.join("*"))
}

pub fn parse_record(line: &str) -> Result<(u64, Factorization)> {
    let bad = || Error::Parse(format!("bad factorization record {line:?}"));
    let (n, rest) = line.split_once('=').ok_or_else(bad)?;
    let n: u64 = n.trim().parse().map_err(|_| bad())?;
    let mut f: Factorization = Vec::new();
    if !rest.trim().is_empty() {
        for term in rest.split('*') {
            let (q, e) = term.split_once('^').ok_or_else(bad)?;
            f.push((
                q.trim().parse().map_err(|_| bad())?,
                e.trim().parse().map_err(|_| bad())?,
            ));
        }
    }
    let product = f
        .iter()
        .try_fold(1u64, |acc, &(q, e)| acc.checked_mul(q.checked_pow(e)?))
        .ok_or_else(bad)?;
    if product != n {
        return Err(bad());
    }
    Ok((n, f))
}

/// Residue class mod `p`, always reduced to `[0, p)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fp(pub u64);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `re + im * sqrt(D)` in `F_{p^2}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuadExt {
    pub re: Fp,
    pub im: Fp,
}

impl QuadExt {
    pub const ZERO: QuadExt = QuadExt { re: Fp::ZERO, im: Fp::ZERO };
    pub const ONE: QuadExt = QuadExt { re: Fp::ONE, im: Fp::ZERO };

    pub fn new(re: Fp, im: Fp) -> Self {
        Self { re, im }
    }

    pub fn from_fp(x: Fp) -> Self {
        Self { re: x, im: Fp::ZERO }
    }

    pub fn is_zero(self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// True when the element lies in the prime subfield.
    pub fn is_rational(self) -> bool {
        self.im.is_zero()
    }

    /// Dense key in `[0, p^2)`.
    pub fn key(self, p: u64) -> usize {
        (self.re.0 * p + self.im.0) as usize
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}+{}√D", self.re, self.im)
        }
    }
}

/// The prime together with its cached arithmetic data. Immutable after
/// construction.
#[derive(Clone, Debug)]
pub struct PrimeContext {
    p: u64,
    non_residue: Fp,
    primitive_root: Fp,
    fact_pm1: Factorization,
    fact_pp1: Factorization,
    norm_one_generator: QuadExt,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        Self::validate(p)?;
        Self::build(p, factorize(p - 1), factorize(p + 1))
    }

    pub fn with_cache(p: u64, cache: &mut FactorCache) -> Result<Self> {
        Self::validate(p)?;
        let fm = cache.get_or_compute(p - 1);
        let fp = cache.get_or_compute(p + 1);
        Self::build(p, fm, fp)
    }

    fn validate(p: u64) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p < 5 {
            return Err(Error::PrimeTooSmall(p));
        }
        if p > MAX_PRIME {
            return Err(Error::PrimeTooLarge(p));
        }
        Ok(())
    }

    fn build(p: u64, fact_pm1: Factorization, fact_pp1: Factorization) -> Result<Self> {
        let mut ctx = PrimeContext {
            p,
            non_residue: Fp(0),
            primitive_root: Fp(0),
            fact_pm1,
            fact_pp1,
            norm_one_generator: QuadExt::ONE,
        };
        ctx.non_residue = Fp((2..p)
            .find(|&d| ctx.legendre(Fp(d)) == -1)
            .expect("every odd prime has a non-residue"));
        ctx.primitive_root = Fp((2..p)
            .find(|&g| ctx.order_from_factors(Fp(g)) == p - 1)
            .expect("a primitive root exists"));
        ctx.norm_one_generator = ctx.find_norm_one_generator();
        Ok(ctx)
    }

    fn find_norm_one_generator(&self) -> QuadExt {
        // conj(w) / w ranges over the whole norm-one group as w ranges over F_{p^2}*.
        for b in 1..self.p {
            for a in 0..self.p {
                let w = QuadExt::new(Fp(a), Fp(b));
                let z = self.qdiv(self.frobenius(w), w);
                if self.norm_one_order(z) == self.p + 1 {
                    return z;
                }
            }
        }
        unreachable!("norm-one group is cyclic of order p + 1")
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn non_residue(&self) -> Fp {
        self.non_residue
    }

    pub fn primitive_root(&self) -> Fp {
        self.primitive_root
    }

    pub fn fact_pm1(&self) -> &Factorization {
        &self.fact_pm1
    }

    pub fn fact_pp1(&self) -> &Factorization {
        &self.fact_pp1
    }

    /// Generator of the cyclic group `{z : N(z) = 1}` of order `p + 1`.
    pub fn norm_one_generator(&self) -> QuadExt {
        self.norm_one_generator
    }

    #[inline]
    pub fn elem(&self, v: u64) -> Fp {
        Fp(v % self.p)
    }

    pub fn elem_i64(&self, v: i64) -> Fp {
        Fp(v.rem_euclid(self.p as i64) as u64)
    }

    /// Signed representative in `(-p/2, p/2]`.
    pub fn signed(&self, x: Fp) -> i64 {
        if x.0 > self.p / 2 {
            x.0 as i64 - self.p as i64
        } else {
            x.0 as i64
        }
    }

    #[inline]
    pub fn add(&self, a: Fp, b: Fp) -> Fp {
        let s = a.0 + b.0;
        Fp(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    pub fn sub(&self, a: Fp, b: Fp) -> Fp {
        Fp(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    #[inline]
    pub fn neg(&self, a: Fp) -> Fp {
        Fp(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    #[inline]
    pub fn mul(&self, a: Fp, b: Fp) -> Fp {
        Fp(mul_mod(a.0, b.0, self.p))
    }

    pub fn pow(&self, a: Fp, e: u64) -> Fp {
        Fp(pow_mod(a.0, e, self.p))
    }

    /// `a^e` for signed `e`; panics on `0^negative`.
    pub fn pow_signed(&self, a: Fp, e: i64) -> Fp {
        if e >= 0 {
            self.pow(a, e as u64)
        } else {
            self.pow(self.inv(a).expect("negative power of zero"), e.unsigned_abs())
        }
    }

    pub fn inv(&self, a: Fp) -> Result<Fp> {
        if a.is_zero() {
            return Err(Error::Zero);
        }
        Ok(self.pow(a, self.p - 2))
    }

    pub fn div(&self, a: Fp, b: Fp) -> Result<Fp> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Legendre symbol `(a / p)`.
    pub fn legendre(&self, a: Fp) -> i8 {
        if a.is_zero() {
            return 0;
        }
        if pow_mod(a.0, (self.p - 1) / 2, self.p) == 1 {
            1
        } else {
            -1
        }
    }

    /// Tonelli-Shanks. Returns `None` for non-residues.
    pub fn sqrt(&self, a: Fp) -> Option<Fp> {
        match self.legendre(a) {
            0 => return Some(Fp::ZERO),
            -1 => return None,
            _ => {}
        }
        let p = self.p;
        if p % 4 == 3 {
            return Some(self.pow(a, (p + 1) / 4));
        }
        let mut q = p - 1;
        let mut s = 0u32;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let mut c = self.pow(self.non_residue, q);
        let mut r = self.pow(a, q.div_ceil(2));
        let mut t = self.pow(a, q);
        let mut m = s;
        while t != Fp::ONE {
            let mut i = 0;
            let mut t2 = t;
            while t2 != Fp::ONE {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let b = self.pow(c, 1 << (m - i - 1));
            r = self.mul(r, b);
            c = self.mul(b, b);
            t = self.mul(t, c);
            m = i;
        }
        Some(r)
    }

    fn order_from_factors(&self, x: Fp) -> u64 {
        let mut order = self.p - 1;
        for &(q, _) in &self.fact_pm1 {
            while order.is_multiple_of(q) && self.pow(x, order / q) == Fp::ONE {
                order /= q;
            }
        }
        order
    }

    /// Exact multiplicative order of a nonzero element of `F_p`.
    pub fn mult_order(&self, x: Fp) -> Result<u64> {
        if x.is_zero() {
            return Err(Error::Zero);
        }
        Ok(self.order_from_factors(x))
    }

    fn norm_one_order(&self, z: QuadExt) -> u64 {
        let mut order = self.p + 1;
        for &(q, _) in &self.fact_pp1 {
            while order.is_multiple_of(q) && self.qpow(z, order / q) == QuadExt::ONE {
                order /= q;
            }
        }
        order
    }

    /// Order of a norm-one element of `F_{p^2}`; rational inputs are
    /// delegated to [`Self::mult_order`].
    pub fn quad_order(&self, z: QuadExt) -> Result<u64> {
        if z.is_zero() {
            return Err(Error::Zero);
        }
        if z.is_rational() {
            return self.mult_order(z.re);
        }
        if self.norm(z) != Fp::ONE {
            return Err(Error::NotNormOne);
        }
        Ok(self.norm_one_order(z))
    }

    // ---- F_{p^2} ----

    pub fn qadd(&self, a: QuadExt, b: QuadExt) -> QuadExt {
        QuadExt::new(self.add(a.re, b.re), self.add(a.im, b.im))
    }

    pub fn qsub(&self, a: QuadExt, b: QuadExt) -> QuadExt {
        QuadExt::new(self.sub(a.re, b.re), self.sub(a.im, b.im))
    }

    pub fn qneg(&self, a: QuadExt) -> QuadExt {
        QuadExt::new(self.neg(a.re), self.neg(a.im))
    }

    pub fn qmul(&self, a: QuadExt, b: QuadExt) -> QuadExt {
        let re = self.add(
            self.mul(a.re, b.re),
            self.mul(self.non_residue, self.mul(a.im, b.im)),
        );
        let im = self.add(self.mul(a.re, b.im), self.mul(a.im, b.re));
        QuadExt::new(re, im)
    }

    pub fn qscale(&self, a: QuadExt, s: Fp) -> QuadExt {
        QuadExt::new(self.mul(a.re, s), self.mul(a.im, s))
    }

    pub fn norm(&self, a: QuadExt) -> Fp {
        self.sub(
            self.mul(a.re, a.re),
            self.mul(self.non_residue, self.mul(a.im, a.im)),
        )
    }

    /// `a^p`, i.e. `re - im sqrt(D)`.
    pub fn frobenius(&self, a: QuadExt) -> QuadExt {
        QuadExt::new(a.re, self.neg(a.im))
    }

    /// Trace `a + a^p = 2 re`.
    pub fn trace(&self, a: QuadExt) -> Fp {
        self.add(a.re, a.re)
    }

    pub fn qinv(&self, a: QuadExt) -> Result<QuadExt> {
        let n = self.norm(a);
        let ni = self.inv(n)?;
        Ok(self.qscale(self.frobenius(a), ni))
    }

    pub fn qdiv(&self, a: QuadExt, b: QuadExt) -> QuadExt {
        self.qmul(a, self.qinv(b).expect("division by zero in F_p^2"))
    }

    pub fn qpow(&self, mut base: QuadExt, mut e: u64) -> QuadExt {
        let mut acc = QuadExt::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.qmul(acc, base);
            }
            base = self.qmul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Square root in `F_{p^2}` of an element of `F_p`.
    pub fn sqrt_in_ext(&self, a: Fp) -> QuadExt {
        match self.sqrt(a) {
            Some(r) => QuadExt::from_fp(r),
            None => {
                let s = self
                    .sqrt(self.div(a, self.non_residue).expect("D is nonzero"))
                    .expect("a / D is a residue when a is not");
                QuadExt::new(Fp::ZERO, s)
            }
        }
    }
}

/// Which cyclic group a subgroup lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ambient {
    /// `F_p^*`, order `p - 1`.
    Split,
    /// Norm-one elements of `F_{p^2}^*`, order `p + 1`.
    NormOne,
}

/// Cyclic subgroup of `F_p^*` or of the norm-one group, fixed by its order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupSpec {
    pub ambient: Ambient,
    pub order: u64,
    pub generator: QuadExt,
}

impl SubgroupSpec {
    /// Index in the ambient group (`d_K` or `e_H` in the split case).
    pub fn index(&self, ctx: &PrimeContext) -> u64 {
        self.ambient_order(ctx) / self.order
    }

    pub fn ambient_order(&self, ctx: &PrimeContext) -> u64 {
        match self.ambient {
            Ambient::Split => ctx.p() - 1,
            Ambient::NormOne => ctx.p() + 1,
        }
    }

    /// The `order` distinct members, starting at 1 and walking powers of the
    /// generator.
    pub fn elements(&self, ctx: &PrimeContext) -> Vec<QuadExt> {
        let mut out = Vec::with_capacity(self.order as usize);
        let mut z = QuadExt::ONE;
        for _ in 0..self.order {
            out.push(z);
            z = ctx.qmul(z, self.generator);
        }
        out
    }

    /// Members of a split subgroup as elements of `F_p`.
    pub fn split_elements(&self, ctx: &PrimeContext) -> Vec<Fp> {
        assert_eq!(self.ambient, Ambient::Split, "subgroup is not in F_p^*");
        let g = self.generator.re;
        let mut out = Vec::with_capacity(self.order as usize);
        let mut z = Fp::ONE;
        for _ in 0..self.order {
            out.push(z);
            z = ctx.mul(z, g);
        }
        out
    }
}

/// The unique subgroup of order `m` in the chosen ambient group.
pub fn subgroup(ambient: Ambient, m: u64, ctx: &PrimeContext) -> Result<SubgroupSpec> {
    let n = match ambient {
        Ambient::Split => ctx.p() - 1,
        Ambient::NormOne => ctx.p() + 1,
    };
    if m == 0 || n % m != 0 {
        return Err(Error::NotADivisor { m, n });
    }
    let generator = match ambient {
        Ambient::Split => QuadExt::from_fp(ctx.pow(ctx.primitive_root(), n / m)),
        Ambient::NormOne => ctx.qpow(ctx.norm_one_generator(), n / m),
    };
    Ok(SubgroupSpec { ambient, order: m, generator })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn legendre_examples() {
        let c = ctx(7);
        assert_eq!(c.legendre(Fp(0)), 0);
        assert_eq!(c.legendre(Fp(2)), 1);
        assert_eq!(c.legendre(Fp(3)), -1);
    }

    #[test]
    fn sqrt_examples() {
        let c = ctx(7);
        let r = c.sqrt(Fp(4)).unwrap();
        assert!(r == Fp(2) || r == Fp(5));
        assert_eq!(c.sqrt(Fp(0)), Some(Fp(0)));
        assert_eq!(c.sqrt(Fp(3)), None);
    }

    #[test]
    fn sqrt_exhaustive_small_primes() {
        for p in [5u64, 13, 17, 41, 97, 193, 257, 65537] {
            let c = ctx(p);
            for a in 0..p.min(2000) {
                match c.sqrt(Fp(a)) {
                    Some(r) => assert_eq!(c.mul(r, r), Fp(a)),
                    None => assert_eq!(c.legendre(Fp(a)), -1),
                }
            }
        }
    }

    #[test]
    fn order_examples() {
        let c = ctx(7);
        assert_eq!(c.mult_order(Fp(1)).unwrap(), 1);
        assert_eq!(c.mult_order(Fp(2)).unwrap(), 3);
        assert_eq!(c.mult_order(c.primitive_root()).unwrap(), 6);
        assert_eq!(c.mult_order(Fp(0)), Err(Error::Zero));
        let big = ctx(1_000_000_007);
        assert_eq!(big.mult_order(big.primitive_root()).unwrap(), 1_000_000_006);
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(24), vec![(2, 3), (3, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(13 * 13 - 1), vec![(2, 3), (3, 1), (7, 1)]);
        let n = 999_999_000_001u64 * 3;
        let f = factorize(n);
        assert_eq!(f.iter().map(|&(q, e)| q.pow(e)).product::<u64>(), n);
        assert!(f.iter().all(|&(q, _)| is_prime(q)));
    }

    #[test]
    fn context_invariants() {
        for p in [5u64, 7, 11, 13, 101, 997] {
            let c = ctx(p);
            assert_eq!(c.legendre(c.non_residue()), -1);
            assert_eq!(c.mult_order(c.primitive_root()).unwrap(), p - 1);
            let prod = |f: &Factorization| f.iter().map(|&(q, e)| q.pow(e)).product::<u64>();
            assert_eq!(prod(c.fact_pm1()), p - 1);
            assert_eq!(prod(c.fact_pp1()), p + 1);
            let g = c.norm_one_generator();
            assert_eq!(c.norm(g), Fp::ONE);
            assert_eq!(c.quad_order(g).unwrap(), p + 1);
        }
    }

    #[test]
    fn rejects_bad_primes() {
        assert_eq!(PrimeContext::new(9).unwrap_err(), Error::NotPrime(9));
        assert_eq!(PrimeContext::new(3).unwrap_err(), Error::PrimeTooSmall(3));
    }

    #[test]
    fn smallest_non_residue_is_used() {
        assert_eq!(ctx(7).non_residue(), Fp(3));
        assert_eq!(ctx(17).non_residue(), Fp(3));
        assert_eq!(ctx(5).non_residue(), Fp(2));
    }

    #[test]
    fn subgroup_examples() {
        let c = ctx(7);
        assert_eq!(subgroup(Ambient::Split, 1, &c).unwrap().elements(&c), vec![QuadExt::ONE]);
        let all = subgroup(Ambient::Split, 6, &c).unwrap().split_elements(&c);
        let mut sorted: Vec<u64> = all.iter().map(|x| x.0).collect();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2, 3, 4, 5, 6]);

        // Brute-force the circle a^2 - D b^2 = 1.
        let mut circle = Vec::new();
        for a in 0..7 {
            for b in 0..7 {
                let z = QuadExt::new(Fp(a), Fp(b));
                if c.norm(z) == Fp::ONE {
                    circle.push(z);
                }
            }
        }
        assert_eq!(circle.len(), 8);
        let mut els = subgroup(Ambient::NormOne, 8, &c).unwrap().elements(&c);
        els.sort();
        circle.sort();
        assert_eq!(els, circle);

        assert_eq!(
            subgroup(Ambient::Split, 4, &c).unwrap_err(),
            Error::NotADivisor { m: 4, n: 6 }
        );
    }

    #[test]
    fn subgroup_is_kernel_of_power_map() {
        for p in [13u64, 31, 61] {
            let c = ctx(p);
            for amb in [Ambient::Split, Ambient::NormOne] {
                let n = match amb {
                    Ambient::Split => p - 1,
                    Ambient::NormOne => p + 1,
                };
                for m in divisors(&factorize(n)) {
                    let h = subgroup(amb, m, &c).unwrap();
                    let els = h.elements(&c);
                    let set: std::collections::HashSet<_> = els.iter().copied().collect();
                    assert_eq!(set.len() as u64, m);
                    for &z in &els {
                        assert_eq!(c.qpow(z, m), QuadExt::ONE);
                        assert!(set.contains(&c.qmul(z, h.generator)));
                    }
                }
            }
        }
    }

    #[test]
    fn cache_roundtrip_and_validation() {
        let mut cache = FactorCache::new();
        cache.get_or_compute(168);
        cache.get_or_compute(1);
        let mut buf = Vec::new();
        cache.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "1=\n168=2^3*3^1*7^1\n");
        let back = FactorCache::read_from(&buf[..]).unwrap();
        assert_eq!(back.len(), 2);
        assert!(parse_record("12=2^2*5^1").is_err());
        assert!(parse_record("nonsense").is_err());
    }

    #[test]
    fn euler_phi_and_divisors() {
        let f = factorize(36);
        assert_eq!(divisors(&f), vec![1, 2, 3, 4, 6, 9, 12, 18, 36]);
        assert_eq!(euler_phi(&f), 12);
    }

    #[test]
    fn quad_ext_field_axioms_spot() {
        let c = ctx(11);
        for a in 0..11 {
            for b in 0..11 {
                let z = QuadExt::new(Fp(a), Fp(b));
                if z.is_zero() {
                    continue;
                }
                assert_eq!(c.qmul(z, c.qinv(z).unwrap()), QuadExt::ONE);
                assert_eq!(c.qpow(z, 11), c.frobenius(z));
            }
        }
    }
}
