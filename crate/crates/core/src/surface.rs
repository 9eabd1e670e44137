//! The Markoff surface `x1^2 + x2^2 + x3^2 = 3 x1 x2 x3` over `F_p`, the moves
//! generating `Γ`, and the conic slices `C_j(ξ) = {x_j = ξ}`.
//!
//! Rotation about axis `j` fixes `x_j` and acts on the remaining pair
//! `(x_k, x_l)` (cyclic order) by the matrix `[[0, 1], [-1, 3 x_j]]`. Its
//! eigenvalue `λ` satisfies `λ + 1/λ = 3 x_j`, so the slice is a hyperbola,
//! an ellipse or a pair of lines according to `((3ξ)^2 - 4 / p)`.
//!
//! [`RowParam`] is expressed in trace coordinates `X = 3x`, in which the
//! slice reads `X_k^2 + X_l^2 - X_j X_k X_l = -X_j^2` and `σ = ab` equals
//! `κ(X_j) = X_j^2 / (X_j^2 - 4)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{subgroup, Ambient, Fp, PrimeContext, QuadExt};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Self::ALL[i]
    }

    /// The other two axes in cyclic order `(k, l)`.
    #[inline]
    pub fn others(self) -> (usize, usize) {
        match self {
            Axis::X1 => (1, 2),
            Axis::X2 => (2, 0),
            Axis::X3 => (0, 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MarkoffTriple(pub [Fp; 3]);

impl MarkoffTriple {
    pub fn new(x1: Fp, x2: Fp, x3: Fp) -> Self {
        Self([x1, x2, x3])
    }

    pub fn from_u64(p: u64, x: [u64; 3]) -> Self {
        Self([Fp(x[0] % p), Fp(x[1] % p), Fp(x[2] % p)])
    }

    #[inline]
    pub fn coord(&self, axis: Axis) -> Fp {
        self.0[axis.index()]
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    /// `(x1 p + x2) p + x3`, a bijection onto `[0, p^3)`.
    pub fn canonical_index(&self, p: u64) -> u64 {
        (self.0[0].0 * p + self.0[1].0) * p + self.0[2].0
    }
}

/// Markoff form `x1^2 + x2^2 + x3^2 - 3 x1 x2 x3`.
pub fn markoff_form(x: &[Fp; 3], ctx: &PrimeContext) -> Fp {
    let sq = ctx.add(
        ctx.add(ctx.mul(x[0], x[0]), ctx.mul(x[1], x[1])),
        ctx.mul(x[2], x[2]),
    );
    let prod = ctx.mul(ctx.elem(3), ctx.mul(x[0], ctx.mul(x[1], x[2])));
    ctx.sub(sq, prod)
}

pub fn is_on_surface(x: &[Fp; 3], ctx: &PrimeContext) -> bool {
    markoff_form(x, ctx).is_zero()
}

/// Vieta involution `R_j`: `x_j -> 3 x_k x_l - x_j`.
pub fn vieta(axis: Axis, t: &MarkoffTriple, ctx: &PrimeContext) -> MarkoffTriple {
    let (k, l) = axis.others();
    let j = axis.index();
    let mut x = t.0;
    x[j] = ctx.sub(ctx.mul(ctx.elem(3), ctx.mul(x[k], x[l])), x[j]);
    MarkoffTriple(x)
}

/// Rotation about `axis`: `(x_k, x_l) -> (x_l, 3 x_j x_l - x_k)`.
pub fn rotate(axis: Axis, t: &MarkoffTriple, ctx: &PrimeContext) -> MarkoffTriple {
    let (k, l) = axis.others();
    let j = axis.index();
    let mut x = t.0;
    let trace = ctx.mul(ctx.elem(3), x[j]);
    x[k] = t.0[l];
    x[l] = ctx.sub(ctx.mul(trace, t.0[l]), t.0[k]);
    MarkoffTriple(x)
}

pub fn rotate_inv(axis: Axis, t: &MarkoffTriple, ctx: &PrimeContext) -> MarkoffTriple {
    let (k, l) = axis.others();
    let j = axis.index();
    let mut x = t.0;
    let trace = ctx.mul(ctx.elem(3), x[j]);
    x[k] = ctx.sub(ctx.mul(trace, t.0[k]), t.0[l]);
    x[l] = t.0[k];
    MarkoffTriple(x)
}

/// `result[i] = t[perm[i]]`.
pub fn permute(perm: [usize; 3], t: &MarkoffTriple) -> MarkoffTriple {
    MarkoffTriple([t.0[perm[0]], t.0[perm[1]], t.0[perm[2]]])
}

/// The six coordinate permutations.
pub const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConicClass {
    Parabolic,
    Hyperbolic,
    Elliptic,
}

/// Classification data of the slice at value `ξ` (independent of the axis).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConicSection {
    pub value: Fp,
    pub class: ConicClass,
    /// `x = 3ξ`.
    pub trace: Fp,
    /// Root of `λ^2 - xλ + 1`; rational when hyperbolic, norm one when elliptic.
    pub eigenvalue: Option<QuadExt>,
    /// `x^2 / (x^2 - 4)`.
    pub kappa: Option<Fp>,
    pub rot_order: u64,
}

impl ConicSection {
    /// Number of points of `C_j(ξ)` predicted by the class (for `ξ != 0`).
    pub fn expected_points(&self, ctx: &PrimeContext) -> u64 {
        let p = ctx.p();
        match self.class {
            ConicClass::Hyperbolic => p - 1,
            ConicClass::Elliptic => p + 1,
            ConicClass::Parabolic if p % 4 == 1 => 2 * p,
            ConicClass::Parabolic => 0,
        }
    }

    pub fn is_maximal(&self, ctx: &PrimeContext) -> bool {
        match self.class {
            ConicClass::Hyperbolic => self.rot_order == ctx.p() - 1,
            ConicClass::Elliptic => self.rot_order == ctx.p() + 1,
            ConicClass::Parabolic => false,
        }
    }
}

/// Classify the slice at value `ξ`.
///
/// Parabolic slices get rotation order `p` (trace 2, a translation along each
/// line) or `2p` (trace -2, which also swaps the two lines).
pub fn classify(xi: Fp, ctx: &PrimeContext) -> ConicSection {
    let x = ctx.mul(ctx.elem(3), xi);
    let disc = ctx.sub(ctx.mul(x, x), ctx.elem(4));
    let half = ctx.inv(ctx.elem(2)).expect("p is odd");
    match ctx.legendre(disc) {
        0 => {
            let rot_order = if x == ctx.elem(2) { ctx.p() } else { 2 * ctx.p() };
            ConicSection {
                value: xi,
                class: ConicClass::Parabolic,
                trace: x,
                eigenvalue: None,
                kappa: None,
                rot_order,
            }
        }
        s => {
            let root = ctx.sqrt_in_ext(disc);
            let lambda = ctx.qscale(ctx.qadd(QuadExt::from_fp(x), root), half);
            let kappa = ctx.div(ctx.mul(x, x), disc).expect("disc is nonzero");
            let rot_order = ctx.quad_order(lambda).expect("eigenvalue is a unit");
            ConicSection {
                value: xi,
                class: if s == 1 { ConicClass::Hyperbolic } else { ConicClass::Elliptic },
                trace: x,
                eigenvalue: Some(lambda),
                kappa: Some(kappa),
                rot_order,
            }
        }
    }
}

fn place(axis: Axis, xi: Fp, y: Fp, z: Fp) -> MarkoffTriple {
    let (k, l) = axis.others();
    let mut x = [Fp::ZERO; 3];
    x[axis.index()] = xi;
    x[k] = y;
    x[l] = z;
    MarkoffTriple(x)
}

/// All points of `C_j(ξ)` from the explicit parametrization of its class.
///
/// Writing `(x_k, x_l) = (u + v, uλ + v/λ)` turns the slice into
/// `uv = c` with `c = ξ^2 / (x^2 - 4) = κ / 9`.
pub fn conic_points(axis: Axis, xi: Fp, ctx: &PrimeContext) -> Result<Vec<MarkoffTriple>> {
    if xi.is_zero() {
        return Err(Error::ZeroSlice);
    }
    let sec = classify(xi, ctx);
    let p = ctx.p();
    let mut out = Vec::new();
    match sec.class {
        ConicClass::Parabolic => {
            let Some(i) = ctx.sqrt(ctx.neg(Fp::ONE)) else {
                return Ok(out);
            };
            let shift = ctx.mul(i, xi);
            let plus = sec.trace == ctx.elem(2);
            for y in 0..p {
                let y = Fp(y);
                // trace 2: (y - z)^2 = -ξ^2; trace -2: (y + z)^2 = -ξ^2.
                let base = if plus { y } else { ctx.neg(y) };
                for s in [shift, ctx.neg(shift)] {
                    out.push(place(axis, xi, y, ctx.add(base, s)));
                }
            }
        }
        ConicClass::Hyperbolic => {
            let lambda = sec.eigenvalue.expect("hyperbolic has eigenvalue").re;
            let c = ctx.div(ctx.mul(xi, xi), ctx.sub(ctx.mul(sec.trace, sec.trace), ctx.elem(4)))?;
            for t in 1..p {
                let t = Fp(t);
                let tl = ctx.mul(t, lambda);
                let y = ctx.add(t, ctx.div(c, t)?);
                let z = ctx.add(tl, ctx.div(c, tl)?);
                out.push(place(axis, xi, y, z));
            }
        }
        ConicClass::Elliptic => {
            let lambda = sec.eigenvalue.expect("elliptic has eigenvalue");
            let c = ctx.div(ctx.mul(xi, xi), ctx.sub(ctx.mul(sec.trace, sec.trace), ctx.elem(4)))?;
            let u0 = norm_preimage(c, ctx);
            let circle = subgroup(Ambient::NormOne, p + 1, ctx)?;
            for h in circle.elements(ctx) {
                let u = ctx.qmul(u0, h);
                let y = ctx.trace(u);
                let z = ctx.trace(ctx.qmul(u, lambda));
                out.push(place(axis, xi, y, z));
            }
        }
    }
    Ok(out)
}

/// Some `u` in `F_{p^2}` with `N(u) = c` (`c != 0`).
fn norm_preimage(c: Fp, ctx: &PrimeContext) -> QuadExt {
    for b in 0..ctx.p() {
        let b = Fp(b);
        let a2 = ctx.add(c, ctx.mul(ctx.non_residue(), ctx.mul(b, b)));
        if let Some(a) = ctx.sqrt(a2) {
            return QuadExt::new(a, b);
        }
    }
    unreachable!("the norm map onto F_p^* is surjective")
}

/// `|C_j(ξ) ∩ C_k(η)|` for `j != k`: the number of roots `z` of
/// `z^2 - 3ξη z + ξ^2 + η^2`.
pub fn intersection_count(xi: Fp, eta: Fp, ctx: &PrimeContext) -> u8 {
    let nine = ctx.elem(9);
    let four = ctx.elem(4);
    let xx = ctx.mul(xi, xi);
    let yy = ctx.mul(eta, eta);
    let disc = ctx.sub(ctx.mul(nine, ctx.mul(xx, yy)), ctx.mul(four, ctx.add(xx, yy)));
    (1 + ctx.legendre(disc)) as u8
}

/// Row parameters of the rotation orbit through a point, in trace coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowParam {
    pub axis: Axis,
    pub lambda: QuadExt,
    pub a: QuadExt,
    pub b: QuadExt,
    pub sigma: Fp,
}

impl RowParam {
    /// `a h + b / h`, the `X_k` coordinate after `ℓ` rotations when `h = λ^ℓ`.
    pub fn projection(&self, h: QuadExt, ctx: &PrimeContext) -> QuadExt {
        ctx.qadd(ctx.qmul(self.a, h), ctx.qdiv(self.b, h))
    }
}

pub fn row_params(t: &MarkoffTriple, axis: Axis, ctx: &PrimeContext) -> Result<RowParam> {
    let sec = classify(t.coord(axis), ctx);
    let lambda = sec.eigenvalue.ok_or(Error::ParabolicCoordinate)?;
    let (k, l) = axis.others();
    let three = ctx.elem(3);
    let xk = QuadExt::from_fp(ctx.mul(three, t.0[k]));
    let xl = QuadExt::from_fp(ctx.mul(three, t.0[l]));
    let lambda_inv = ctx.qinv(lambda)?;
    let delta = ctx.qsub(lambda, lambda_inv);
    let delta_inv = ctx.qinv(delta)?;
    let a = ctx.qmul(delta_inv, ctx.qsub(xl, ctx.qmul(xk, lambda_inv)));
    let b = ctx.qmul(delta_inv, ctx.qsub(ctx.qmul(lambda, xk), xl));
    let ab = ctx.qmul(a, b);
    let closed = {
        let r = ctx.qmul(QuadExt::from_fp(sec.trace), delta_inv);
        ctx.qmul(r, r)
    };
    assert_eq!(ab, closed, "ab must equal (x / (λ - 1/λ))^2");
    assert!(ab.is_rational(), "σ lies in F_p");
    assert_ne!(ab.re, Fp::ONE, "σ = 1 is impossible for a non-parabolic trace");
    Ok(RowParam { axis, lambda, a, b, sigma: ab.re })
}

/// `rot_order` of every residue, indexed by value.
#[derive(Clone, Debug)]
pub struct OrderTable {
    orders: Vec<u64>,
    maximal: Vec<bool>,
    hyperbolic_maximal: Vec<bool>,
}

impl OrderTable {
    pub fn new(ctx: &PrimeContext) -> Self {
        let p = ctx.p();
        let mut orders = Vec::with_capacity(p as usize);
        let mut maximal = Vec::with_capacity(p as usize);
        let mut hyp = Vec::with_capacity(p as usize);
        for v in 0..p {
            let sec = classify(Fp(v), ctx);
            orders.push(sec.rot_order);
            maximal.push(sec.is_maximal(ctx));
            hyp.push(sec.class == ConicClass::Hyperbolic && sec.is_maximal(ctx));
        }
        Self { orders, maximal, hyperbolic_maximal: hyp }
    }

    #[inline]
    pub fn order(&self, v: Fp) -> u64 {
        self.orders[v.0 as usize]
    }

    #[inline]
    pub fn is_maximal(&self, v: Fp) -> bool {
        self.maximal[v.0 as usize]
    }

    #[inline]
    pub fn is_hyperbolic_maximal(&self, v: Fp) -> bool {
        self.hyperbolic_maximal[v.0 as usize]
    }

    /// `max_j rot_order(x_j)`.
    pub fn max_order(&self, t: &MarkoffTriple) -> u64 {
        t.0.iter().map(|&x| self.order(x)).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    fn t(p: u64, x: [u64; 3]) -> MarkoffTriple {
        MarkoffTriple::from_u64(p, x)
    }

    /// Points of the slice by scanning all pairs.
    fn slice_by_scan(axis: Axis, xi: Fp, c: &PrimeContext) -> Vec<MarkoffTriple> {
        let mut out = Vec::new();
        for y in 0..c.p() {
            for z in 0..c.p() {
                let pt = place(axis, xi, Fp(y), Fp(z));
                if !pt.is_origin() && is_on_surface(&pt.0, c) {
                    out.push(pt);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn surface_membership_examples() {
        let c = ctx(5);
        assert!(is_on_surface(&t(5, [1, 1, 1]).0, &c));
        assert!(is_on_surface(&t(5, [0, 0, 0]).0, &c));
        assert!(!is_on_surface(&t(5, [1, 2, 3]).0, &c));
    }

    #[test]
    fn vieta_examples() {
        let c = ctx(5);
        assert_eq!(vieta(Axis::X3, &t(5, [1, 1, 1]), &c), t(5, [1, 1, 2]));
        let x = t(5, [1, 1, 2]);
        assert_eq!(vieta(Axis::X3, &vieta(Axis::X3, &x, &c), &c), x);
        assert_eq!(vieta(Axis::X3, &t(5, [0, 0, 0]), &c), t(5, [0, 0, 0]));
    }

    #[test]
    fn rotate_examples() {
        let c = ctx(5);
        assert_eq!(rotate(Axis::X1, &t(5, [1, 1, 1]), &c), t(5, [1, 1, 2]));
        let x = t(5, [1, 1, 2]);
        for axis in Axis::ALL {
            assert_eq!(rotate_inv(axis, &rotate(axis, &x, &c), &c), x);
            assert_eq!(rotate(axis, &rotate_inv(axis, &x, &c), &c), x);
        }
    }

    #[test]
    fn rotation_is_transposition_after_vieta() {
        // rot about X1 = τ_{23} ∘ R_2.
        let c = ctx(13);
        let x = conic_points(Axis::X1, Fp(4), &c).unwrap()[3];
        let via = permute([0, 2, 1], &vieta(Axis::X2, &x, &c));
        assert_eq!(rotate(Axis::X1, &x, &c), via);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(Fp(1), &ctx(5)).class, ConicClass::Parabolic);
        assert_eq!(classify(Fp(2), &ctx(7)).class, ConicClass::Hyperbolic);
        assert_eq!(classify(Fp(1), &ctx(7)).class, ConicClass::Elliptic);
    }

    #[test]
    fn parabolic_order_convention() {
        let c = ctx(13);
        let two_thirds = c.div(c.elem(2), c.elem(3)).unwrap();
        assert_eq!(classify(two_thirds, &c).rot_order, 13);
        assert_eq!(classify(c.neg(two_thirds), &c).rot_order, 26);
    }

    #[test]
    fn eigenvalue_relations() {
        for p in [7u64, 11, 13, 29] {
            let c = ctx(p);
            for v in 0..p {
                let sec = classify(Fp(v), &c);
                if let Some(l) = sec.eigenvalue {
                    let s = c.qadd(l, c.qinv(l).unwrap());
                    assert_eq!(s, QuadExt::from_fp(sec.trace));
                    assert_eq!(c.qpow(l, sec.rot_order), QuadExt::ONE);
                    let x2 = c.mul(sec.trace, sec.trace);
                    assert_eq!(sec.kappa, Some(c.div(x2, c.sub(x2, c.elem(4))).unwrap()));
                    match sec.class {
                        ConicClass::Hyperbolic => assert_eq!((p - 1) % sec.rot_order, 0),
                        ConicClass::Elliptic => assert_eq!((p + 1) % sec.rot_order, 0),
                        ConicClass::Parabolic => unreachable!(),
                    }
                }
            }
        }
    }

    #[test]
    fn conic_point_examples() {
        let c = ctx(7);
        assert_eq!(conic_points(Axis::X1, Fp(2), &c).unwrap().len(), 6);
        assert_eq!(conic_points(Axis::X1, Fp(1), &c).unwrap().len(), 8);
        let par = c.div(c.elem(2), c.elem(3)).unwrap();
        assert!(conic_points(Axis::X1, par, &c).unwrap().is_empty());
        assert_eq!(conic_points(Axis::X2, Fp(0), &c), Err(Error::ZeroSlice));
    }

    #[test]
    fn conic_points_match_scan() {
        for p in [5u64, 7, 11, 13, 17, 19] {
            let c = ctx(p);
            for axis in Axis::ALL {
                for v in 1..p {
                    let mut pts = conic_points(axis, Fp(v), &c).unwrap();
                    pts.sort();
                    let before = pts.len();
                    pts.dedup();
                    assert_eq!(pts.len(), before, "parametrization is injective");
                    assert_eq!(pts, slice_by_scan(axis, Fp(v), &c), "p={p} ξ={v}");
                    assert_eq!(pts.len() as u64, classify(Fp(v), &c).expected_points(&c));
                }
            }
        }
    }

    #[test]
    fn rotation_orbits_on_slices_have_rot_order_length() {
        for p in [7u64, 13, 17, 23] {
            let c = ctx(p);
            for v in 1..p {
                let sec = classify(Fp(v), &c);
                for pt in conic_points(Axis::X1, Fp(v), &c).unwrap() {
                    let mut cur = rotate(Axis::X1, &pt, &c);
                    let mut len = 1;
                    while cur != pt {
                        cur = rotate(Axis::X1, &cur, &c);
                        len += 1;
                    }
                    assert_eq!(len, sec.rot_order, "p={p} ξ={v}");
                }
            }
        }
    }

    #[test]
    fn intersection_examples() {
        let c = ctx(7);
        assert_eq!(intersection_count(Fp(1), Fp(1), &c), 2);
        assert_eq!(intersection_count(Fp(1), Fp(3), &c), 0);
        // 9ξ^2η^2 = 4(ξ^2 + η^2) at ξ = η with 9ξ^2 = 8.
        let c = ctx(17);
        let xi = c.sqrt(c.div(c.elem(8), c.elem(9)).unwrap()).unwrap();
        assert_eq!(intersection_count(xi, xi, &c), 1);
    }

    #[test]
    fn intersection_matches_brute_force() {
        for p in [5u64, 7, 11, 13, 23, 29] {
            let c = ctx(p);
            for xi in 0..p {
                for eta in 0..p {
                    let (x, y) = (Fp(xi), Fp(eta));
                    let brute = (0..p)
                        .filter(|&z| is_on_surface(&[x, y, Fp(z)], &c))
                        .count();
                    assert_eq!(intersection_count(x, y, &c) as usize, brute);
                }
            }
        }
    }

    #[test]
    fn meeting_count_formula() {
        // Over all η the count is (p+1)/2; over η != 0 it is (p - (-1/p)) / 2.
        for p in [7u64, 11, 13, 17, 19, 29, 31, 37, 43] {
            let c = ctx(p);
            let chi = c.legendre(c.neg(Fp::ONE)) as i64;
            for xi in 1..p {
                let sec = classify(Fp(xi), &c);
                if sec.class == ConicClass::Parabolic {
                    continue;
                }
                let all = (0..p)
                    .filter(|&e| intersection_count(Fp(xi), Fp(e), &c) >= 1)
                    .count() as i64;
                let nonzero = (1..p)
                    .filter(|&e| intersection_count(Fp(xi), Fp(e), &c) >= 1)
                    .count() as i64;
                assert_eq!(all, (p as i64 + 1) / 2);
                assert_eq!(nonzero, (p as i64 - chi) / 2);
            }
        }
    }

    #[test]
    fn row_params_projection_follows_rotation() {
        for p in [7u64, 11, 13, 19] {
            let c = ctx(p);
            let three = c.elem(3);
            for v in 1..p {
                let sec = classify(Fp(v), &c);
                if sec.class == ConicClass::Parabolic {
                    continue;
                }
                for pt in conic_points(Axis::X2, Fp(v), &c).unwrap().into_iter().take(3) {
                    let rp = row_params(&pt, Axis::X2, &c).unwrap();
                    assert_eq!(Some(rp.sigma), sec.kappa);
                    assert_ne!(rp.sigma, Fp::ONE);
                    let (k, _) = Axis::X2.others();
                    let mut cur = pt;
                    let mut h = QuadExt::ONE;
                    for _ in 0..sec.rot_order {
                        let expected = QuadExt::from_fp(c.mul(three, cur.0[k]));
                        assert_eq!(rp.projection(h, &c), expected);
                        cur = rotate(Axis::X2, &cur, &c);
                        h = c.qmul(h, rp.lambda);
                    }
                }
            }
        }
    }

    #[test]
    fn row_params_rejects_parabolic() {
        let c = ctx(13);
        let par = c.div(c.elem(2), c.elem(3)).unwrap();
        let pt = conic_points(Axis::X1, par, &c).unwrap()[0];
        assert_eq!(row_params(&pt, Axis::X1, &c), Err(Error::ParabolicCoordinate));
    }

    #[test]
    fn random_moves_stay_on_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [5u64, 13, 101, 997] {
            let c = ctx(p);
            let mut x = t(p, [1, 1, 1]);
            for _ in 0..10_000 {
                let axis = Axis::from_index(rng.gen_range(0..3));
                x = match rng.gen_range(0..4) {
                    0 => vieta(axis, &x, &c),
                    1 => rotate(axis, &x, &c),
                    2 => rotate_inv(axis, &x, &c),
                    _ => permute(PERMUTATIONS[rng.gen_range(0..6)], &x),
                };
                assert!(is_on_surface(&x.0, &c));
                assert!(!x.is_origin());
            }
        }
    }

    #[test]
    fn max_order_convention_for_one_one_one() {
        // 3 ≡ -2 mod 5, so every coordinate is parabolic with trace -2.
        let c = ctx(5);
        let table = OrderTable::new(&c);
        assert_eq!(table.max_order(&t(5, [1, 1, 1])), 10);
    }

    #[test]
    fn max_order_classification() {
        for p in [7u64, 11, 13, 17] {
            let c = ctx(p);
            let table = OrderTable::new(&c);
            for v in 0..p {
                let o = table.order(Fp(v));
                assert!(
                    (p - 1) % o == 0 || (p + 1) % o == 0 || o == p || o == 2 * p,
                    "p={p} order={o}"
                );
            }
        }
    }
}
