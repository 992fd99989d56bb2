//! Explicit approximations of a target ratio by values of a polynomial.
//!
//! Near two roots `z_1, z_2` of multiplicities `mu_1, mu_2`, put
//! `x_i = y_i p^(k_i) + z_i`. Then `f(x_1)/f(x_2)` is
//! `y_1^mu_1 / y_2^mu_2 * p^(k_1 mu_1 - k_2 mu_2) * g_1(x_1)/g_2(x_2)`,
//! and choosing the exponents and the `y_i` well makes it any nonzero
//! `r` up to a small error. Every pair returned here has been checked by
//! exact evaluation after truncation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::denseness::special_threshold;
use crate::error::{Error, Result};
use crate::padic::{vp_rational_raw, vp_raw, PAdicContext, Rational, Valuation};
use crate::poly::{DensePoly, FactoredPoly};
use crate::primes::{checked_pow, vp_u64};
use crate::roots::{lift_to_integer, HenselSeed};
use crate::waring::theta;

/// Least `(k_1, k_2)` with `k_1 mu_1 - k_2 mu_2 = target` and both at least `min_k`.
///
/// All solutions are `(k_1 + t mu_2, k_2 + t mu_1)`; the smallest admissible
/// `t` is returned.
pub fn bezout_exponents(mu1: u32, mu2: u32, target: i64, min_k: i64) -> Result<(i64, i64)> {
    if mu1 == 0 || mu2 == 0 {
        return Err(Error::invalid("multiplicities must be positive"));
    }
    let (m1, m2) = (mu1 as i128, mu2 as i128);
    let eg = m1.extended_gcd(&m2);
    if eg.gcd != 1 {
        return Err(Error::invalid(format!(
            "multiplicities {mu1} and {mu2} are not coprime (gcd {})",
            eg.gcd
        )));
    }
    // x mu1 + y mu2 = 1, so (x target) mu1 - (-y target) mu2 = target
    let (k1, k2) = (eg.x * target as i128, -eg.y * target as i128);
    let lo = min_k as i128;
    let t = Integer::div_ceil(&(lo - k1), &m2).max(Integer::div_ceil(&(lo - k2), &m1));
    let (k1, k2) = (k1 + t * m2, k2 + t * m1);
    match (i64::try_from(k1), i64::try_from(k2)) {
        (Ok(a), Ok(b)) => Ok((a, b)),
        _ => Err(Error::invalid("exponents overflow i64")),
    }
}

/// Intermediate values of the construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub k1: i64,
    pub k2: i64,
    pub h1: i64,
    pub h2: i64,
    pub mu1: u32,
    pub mu2: u32,
    /// Number of shifts `(k_1, k_2) += (mu_2, mu_1)` applied to the least pair.
    pub shift: i64,
    /// `p^(-nu_p(r)) r G` modulo `p^N`.
    #[serde(serialize_with = "crate::serde_util::big")]
    pub s: BigInt,
    /// `g_2(z_2) / g_1(z_1)` modulo `p^N`.
    #[serde(rename = "G", serialize_with = "crate::serde_util::big")]
    pub g_ratio: BigInt,
    /// The factor indices were exchanged so that `nu_p(g_1(z_1)) <= nu_p(g_2(z_2))`.
    pub swapped: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessPair {
    #[serde(serialize_with = "crate::serde_util::big")]
    pub x1: BigInt,
    #[serde(serialize_with = "crate::serde_util::big")]
    pub x2: BigInt,
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    pub u: i64,
    /// `nu_p(f(x1)/f(x2) - r)`, always greater than `u`.
    pub exponent: Valuation,
    pub trace: Trace,
}

/// One root of the construction: `f = (X - z)^mu g`, with `g(z)` known.
struct Branch {
    z: BigInt,
    mu: u32,
    g_at_z: BigInt,
}

/// `nu_p(f(x1)/f(x2) - r)` by exact integer arithmetic; `None` when `f(x2) = 0`.
pub fn quotient_exponent(
    f: &DensePoly,
    x1: &BigInt,
    x2: &BigInt,
    r: &Rational,
    p: u64,
) -> Option<Valuation> {
    let (a, b) = (f.eval(x1), f.eval(x2));
    if b.is_zero() {
        return None;
    }
    quotient_exponent_values(&a, &b, r, p)
}

fn quotient_exponent_values(a: &BigInt, b: &BigInt, r: &Rational, p: u64) -> Option<Valuation> {
    if b.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    // a/b - r = (a den - b num) / (b den)
    let num = a * r.denom() - b * r.numer();
    match (vp_raw(&num, &pb), vp_raw(&(b * r.denom()), &pb)) {
        (Valuation::Infinite, _) => Some(Valuation::Infinite),
        (Valuation::Finite(x), Valuation::Finite(y)) => Some(Valuation::Finite(x - y)),
        (Valuation::Finite(_), Valuation::Infinite) => None,
    }
}

fn as_p_integer(q: &Rational, ctx: &PAdicContext) -> Result<BigInt> {
    ctx.to_integer(&ctx.from_rational(q))
}

/// Positive representative of `x mod p^N`.
fn positive_residue(x: &BigInt, modulus: &BigInt) -> BigInt {
    let r = x.mod_floor(modulus);
    if r.is_zero() {
        modulus.clone()
    } else {
        r
    }
}

/// Runs the construction and returns the first pair that verifies against `f`.
fn construct(
    f: &DensePoly,
    b1: Branch,
    b2: Branch,
    r: &Rational,
    u: i64,
    ctx: &PAdicContext,
) -> Result<WitnessPair> {
    if r.is_zero() {
        return Err(Error::invalid("target ratio must be nonzero"));
    }
    let p = ctx.prime();
    let pb = ctx.prime_big();
    let (b1, b2, swapped) = if vp_raw(&b1.g_at_z, pb) > vp_raw(&b2.g_at_z, pb) {
        (b2, b1, true)
    } else {
        (b1, b2, false)
    };
    let g_ratio = Rational::new(b2.g_at_z.clone(), b1.g_at_z.clone());
    let vr = vp_rational_raw(r, pb).finite().expect("r is nonzero");
    let (h1, h2) = bezout_exponents(b1.mu, b2.mu, 1, 0)?;
    let p_to_minus_vr = if vr >= 0 {
        Rational::new(BigInt::from(1), pb.pow(vr as u32))
    } else {
        Rational::from_integer(pb.pow((-vr) as u32))
    };
    let s_exact = p_to_minus_vr * r * &g_ratio;
    let s = as_p_integer(&s_exact, ctx)?;
    let g_int = as_p_integer(&g_ratio, ctx)?;
    let modulus = ctx.modulus();
    let y1 = s.modpow(&BigInt::from(h1), modulus);
    let y2 = s.modpow(&BigInt::from(h2), modulus);
    let vy = |y: &BigInt| vp_raw(y, pb).finite().unwrap_or(ctx.precision() as i64);
    let (vy1, vy2) = (vy(&y1), vy(&y2));
    let slack = (u - vr).max(0) + vy(&b1.g_at_z) + vy(&b2.g_at_z) + 2;

    let (base1, base2) = bezout_exponents(b1.mu, b2.mu, vr, 1)?;
    let n = ctx.precision() as i64;
    // largest shift leaving `slack` digits below p^N after p^(k_i) y_i
    let room = n - slack;
    let last_fit = Integer::div_floor(&(room - base1 - vy1), &(b2.mu as i64))
        .min(Integer::div_floor(&(room - base2 - vy2), &(b1.mu as i64)));
    let mut shift = 0i64;
    let mut tried = -1i64;
    loop {
        if shift > last_fit {
            if last_fit > tried {
                shift = last_fit;
            } else {
                let next = tried + 1;
                let depth =
                    (base1 + next * b2.mu as i64 + vy1).max(base2 + next * b1.mu as i64 + vy2);
                return Err(Error::PrecisionExhausted {
                    context: format!("no witness with exponent above {u} at precision {n}"),
                    needed: (depth + slack).max(n + 1) as u32,
                });
            }
        }
        let k1 = base1 + shift * b2.mu as i64;
        let k2 = base2 + shift * b1.mu as i64;
        tried = shift;
        let x1 = positive_residue(&(&y1 * pb.pow(k1 as u32) + &b1.z), modulus);
        let x2 = positive_residue(&(&y2 * pb.pow(k2 as u32) + &b2.z), modulus);
        if let Some(exponent) = quotient_exponent(f, &x1, &x2, r, p) {
            if exponent > Valuation::Finite(u) {
                return Ok(WitnessPair {
                    x1,
                    x2,
                    p,
                    precision: ctx.precision(),
                    u,
                    exponent,
                    trace: Trace {
                        k1,
                        k2,
                        h1,
                        h2,
                        mu1: b1.mu,
                        mu2: b2.mu,
                        shift,
                        s,
                        g_ratio: g_int,
                        swapped,
                    },
                });
            }
        }
        shift = if shift == 0 { 1 } else { shift * 2 };
    }
}

/// Pair `x_1, x_2` with `nu_p(f(x_1)/f(x_2) - r) > u`, built from the roots
/// at factor indices `i` and `j`, whose multiplicities must be coprime.
/// The same index may be used twice for a simple root.
pub fn approximation_witness(
    f: &FactoredPoly,
    i: usize,
    j: usize,
    r: &Rational,
    u: i64,
    ctx: &PAdicContext,
) -> Result<WitnessPair> {
    let branch = |idx: usize| -> Result<Branch> {
        let (_, g_at_z) = f.cofactor_at_root(idx)?;
        let fac = &f.factors()[idx];
        Ok(Branch {
            z: fac.root.clone(),
            mu: fac.multiplicity,
            g_at_z,
        })
    };
    let (b1, b2) = (branch(i)?, branch(j)?);
    if i == j && b1.mu != 1 {
        return Err(Error::invalid(format!(
            "a single root needs multiplicity 1, got {}",
            b1.mu
        )));
    }
    construct(&f.expand(), b1, b2, r, u, ctx)
}

/// Two tuples of `m` nonnegative integers whose nth-power sums have
/// quotient within `p^(-u)` of `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerSumWitness {
    pub m: u64,
    pub n: u64,
    pub p: u64,
    #[serde(serialize_with = "crate::serde_util::big_vec")]
    pub a: Vec<BigInt>,
    #[serde(serialize_with = "crate::serde_util::big_vec")]
    pub b: Vec<BigInt>,
    /// The residue tuple that seeded the root.
    pub seed_bases: Vec<u64>,
    /// Lifted root of `X^n + x_2^n + ... + x_m^n`, modulo `p^N`.
    #[serde(serialize_with = "crate::serde_util::big")]
    pub root: BigInt,
    pub pair: WitnessPair,
}

/// Sum of nth powers.
pub fn power_sum(xs: &[BigInt], n: u64) -> BigInt {
    xs.iter()
        .map(|x| num_traits::pow(x.clone(), n as usize))
        .sum()
}

/// Witness for density of `R(S_m^n)` along the theta route.
///
/// Requires `m >= theta(n, p^(2k+1))`. At `p = 2` with `n` in {2, 4, 8, 16}
/// density can hold below that bound; those cases are reported as unsupported.
pub fn power_sum_witness(
    m: u64,
    n: u64,
    p: u64,
    r: &Rational,
    u: i64,
    ctx: &PAdicContext,
) -> Result<PowerSumWitness> {
    if ctx.prime() != p {
        return Err(Error::invalid(format!(
            "context prime {} differs from p = {p}",
            ctx.prime()
        )));
    }
    if m < 2 || n < 2 {
        return Err(Error::invalid(format!(
            "need m >= 2 and n >= 2, got m = {m}, n = {n}"
        )));
    }
    let k = vp_u64(n, p);
    let modulus = checked_pow(p, 2 * k + 1).ok_or(Error::BudgetExceeded {
        what: "theta modulus",
        needed: u128::MAX,
        budget: u64::MAX as u128,
    })?;
    let t = theta(n, modulus, modulus)?;
    let th = t.value.expect("theta exists below the modulus");
    if m < th {
        return Err(match (p, special_threshold(n)) {
            (2, Some(thr)) if m >= thr => Error::Unsupported(format!(
                "R(S_{m}^{n}) is dense in Q_2 but {m} < theta = {th}; no residue tuple seeds a root"
            )),
            _ => Error::invalid(format!(
                "m = {m} is below theta({n}, {modulus}) = {th}; R(S_{m}^{n}) is not dense in Q_{p}"
            )),
        });
    }
    let bases = t
        .certificate
        .expect("theta certificate accompanies its value");
    let mut tail: Vec<BigInt> = bases[1..].iter().map(|&x| BigInt::from(x)).collect();
    tail.resize(m as usize - 1, BigInt::zero());
    let n_us = n as usize;
    let f = DensePoly::monomial_plus(n_us, power_sum(&tail, n));

    let x1 = BigInt::from(bases[0]);
    let pb = BigInt::from(p);
    let seed = HenselSeed {
        f_valuation: vp_raw(&f.eval(&x1), &pb),
        derivative_valuation: k as i64,
        residue: x1,
        level: 2 * k + 1,
    };
    // lift past the verification depth so the residual f(z) stays negligible
    let z = lift_to_integer(&f, &seed, ctx)?;
    let (g, _) = f.divide_by_linear(&z);
    let g_at_z = g.eval(&z);
    let branch = || Branch {
        z: z.clone(),
        mu: 1,
        g_at_z: g_at_z.clone(),
    };
    let pair = construct(&f, branch(), branch(), r, u, ctx)?;
    let with_head = |head: &BigInt| {
        let mut v = vec![head.clone()];
        v.extend(tail.iter().cloned());
        v
    };
    Ok(PowerSumWitness {
        m,
        n,
        p,
        a: with_head(&pair.x1),
        b: with_head(&pair.x2),
        seed_bases: bases,
        root: z,
        pair,
    })
}

impl PowerSumWitness {
    /// Recomputes `nu_p(sum a_i^n / sum b_i^n - r)` from the tuples alone.
    pub fn exponent_of(&self, r: &Rational) -> Option<Valuation> {
        let (sa, sb) = (power_sum(&self.a, self.n), power_sum(&self.b, self.n));
        quotient_exponent_values(&sa, &sb, r, self.p)
    }

    pub fn entries_nonnegative(&self) -> bool {
        self.a.iter().chain(&self.b).all(|x| !x.is_negative())
    }
}

/// Valuation of the exact quotient `f(x1)/f(x2)`.
pub fn quotient_valuation(f: &DensePoly, x1: &BigInt, x2: &BigInt, p: u64) -> Option<i64> {
    let pb = BigInt::from(p);
    let (a, b) = (
        vp_raw(&f.eval(x1), &pb).finite()?,
        vp_raw(&f.eval(x2), &pb).finite()?,
    );
    Some(a - b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::parse_rational;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn bezout_examples() {
        assert_eq!(bezout_exponents(1, 1, 3, 1).unwrap(), (4, 1));
        assert_eq!(bezout_exponents(2, 3, 1, 5).unwrap(), (8, 5));
        assert!(bezout_exponents(6, 10, 1, 0).is_err());
        assert_eq!(bezout_exponents(2, 3, 2, 1).unwrap(), (4, 2));
        assert_eq!(bezout_exponents(3, 2, -4, 0).unwrap(), (0, 2));
    }

    #[test]
    fn bezout_minimal_by_scan() {
        for (mu1, mu2) in [(2u32, 3u32), (5, 3), (1, 4), (7, 10)] {
            for target in -6..=6 {
                for min_k in 0..4 {
                    let (k1, k2) = bezout_exponents(mu1, mu2, target, min_k).unwrap();
                    let scan = (min_k..200)
                        .find_map(|a| {
                            let rest = a * mu1 as i64 - target;
                            (rest % mu2 as i64 == 0 && rest / mu2 as i64 >= min_k)
                                .then(|| (a, rest / mu2 as i64))
                        })
                        .unwrap();
                    assert_eq!((k1, k2), scan);
                }
            }
        }
    }

    fn check_pair(f: &FactoredPoly, w: &WitnessPair, r: &Rational, u: i64) {
        let d = f.expand();
        assert!(w.x1.is_positive() && w.x2.is_positive());
        let e = quotient_exponent(&d, &w.x1, &w.x2, r, w.p).unwrap();
        assert_eq!(e, w.exponent);
        assert!(e > Valuation::Finite(u));
        let t = &w.trace;
        let vr = vp_rational_raw(r, &BigInt::from(w.p)).finite().unwrap();
        assert_eq!(t.k1 * t.mu1 as i64 - t.k2 * t.mu2 as i64, vr);
        assert_eq!(t.h1 * t.mu1 as i64 - t.h2 * t.mu2 as i64, 1);
        assert_eq!(quotient_valuation(&d, &w.x1, &w.x2, w.p), Some(vr));
    }

    #[test]
    fn linear_pair_examples() {
        let f = FactoredPoly::from_roots(&[(0, 1), (1, 1)]).unwrap();
        let ctx = PAdicContext::new(5, 64).unwrap();
        let w = approximation_witness(&f, 0, 1, &q("5"), 10, &ctx).unwrap();
        check_pair(&f, &w, &q("5"), 10);

        for p in [2, 3, 7] {
            let ctx = PAdicContext::new(p, 64).unwrap();
            let w = approximation_witness(&f, 0, 1, &q("1"), 20, &ctx).unwrap();
            assert_eq!(w.trace.k1, w.trace.k2);
            check_pair(&f, &w, &q("1"), 20);
        }
    }

    #[test]
    fn mixed_multiplicity_example() {
        let f = FactoredPoly::from_roots(&[(1, 2), (-1, 3)]).unwrap();
        let ctx = PAdicContext::new(7, 64).unwrap();
        let w = approximation_witness(&f, 0, 1, &q("49"), 8, &ctx).unwrap();
        check_pair(&f, &w, &q("49"), 8);
        assert_eq!((w.trace.mu1, w.trace.mu2), (2, 3));
        assert_eq!(2 * w.trace.k1 - 3 * w.trace.k2, 2);
    }

    #[test]
    fn last_shift_is_clamped_to_precision() {
        // k2 = 6 k1, so doubling the shift jumps past p^N before k1 exceeds u
        let f = FactoredPoly::from_roots(&[(30, 6), (31, 1), (34, 2)]).unwrap();
        let r = q("34/33");
        let w =
            approximation_witness(&f, 0, 1, &r, 19, &PAdicContext::new(7, 192).unwrap()).unwrap();
        assert_eq!((w.trace.shift, w.trace.k1, w.trace.k2), (27, 28, 168));
        check_pair(&f, &w, &r, 19);
        match approximation_witness(&f, 0, 1, &r, 19, &PAdicContext::new(7, 128).unwrap()) {
            Err(Error::PrecisionExhausted { needed, .. }) => assert_eq!(needed, 129),
            other => panic!("expected precision error, got {other:?}"),
        }
    }

    #[test]
    fn witness_errors() {
        let f = FactoredPoly::from_roots(&[(1, 2), (3, 4)]).unwrap();
        let ctx = PAdicContext::new(3, 64).unwrap();
        assert!(approximation_witness(&f, 0, 1, &q("1"), 3, &ctx).is_err());
        let g = FactoredPoly::from_roots(&[(0, 1), (1, 1)]).unwrap();
        assert!(approximation_witness(&g, 0, 1, &q("0"), 3, &ctx).is_err());
        assert!(approximation_witness(&g, 0, 5, &q("1"), 3, &ctx).is_err());
        let tiny = PAdicContext::new(3, 6).unwrap();
        let e = approximation_witness(&g, 0, 1, &q("2/7"), 30, &tiny).unwrap_err();
        assert!(matches!(e, Error::PrecisionExhausted { needed, .. } if needed > 6));
    }

    #[test]
    fn swap_when_first_cofactor_is_more_divisible() {
        // cofactor values: -9 at root 0, 4 at root 1
        let f = FactoredPoly::from_roots(&[(0, 1), (3, 2), (1, 1)]).unwrap();
        let ctx = PAdicContext::new(3, 80).unwrap();
        let w = approximation_witness(&f, 0, 2, &q("5/2"), 6, &ctx).unwrap();
        assert!(w.trace.swapped);
        check_pair(&f, &w, &q("5/2"), 6);
    }

    #[test]
    fn power_sum_examples() {
        let ctx = PAdicContext::new(3, 64).unwrap();
        let w = power_sum_witness(2, 3, 3, &q("3"), 5, &ctx).unwrap();
        assert!(w.entries_nonnegative());
        assert!(w.exponent_of(&q("3")).unwrap() > Valuation::Finite(5));

        let ctx = PAdicContext::new(5, 64).unwrap();
        let w = power_sum_witness(2, 2, 5, &q("1"), 6, &ctx).unwrap();
        assert!(w.exponent_of(&q("1")).unwrap() > Valuation::Finite(6));

        let ctx = PAdicContext::new(11, 64).unwrap();
        let w = power_sum_witness(3, 6, 11, &q("11"), 4, &ctx).unwrap();
        assert_eq!(w.a.len(), 3);
        assert!(w.exponent_of(&q("11")).unwrap() > Valuation::Finite(4));
        assert_eq!(w.seed_bases.len(), 3);
    }

    #[test]
    fn power_sum_refusals() {
        let ctx = PAdicContext::new(2, 64).unwrap();
        assert!(matches!(
            power_sum_witness(8, 4, 2, &q("3"), 4, &ctx),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            power_sum_witness(7, 4, 2, &q("3"), 4, &ctx),
            Err(Error::InvalidArgument(_))
        ));
        let ctx5 = PAdicContext::new(5, 64).unwrap();
        assert!(power_sum_witness(2, 4, 5, &q("3"), 4, &ctx5).is_err());
        assert!(power_sum_witness(2, 4, 2, &q("3"), 4, &ctx5).is_err());
        // 2^9 | 5^16 + 63, so sixty-four sixteenth powers seed a root
        let w =
            power_sum_witness(64, 16, 2, &q("3"), 4, &PAdicContext::new(2, 96).unwrap()).unwrap();
        assert!(w.exponent_of(&q("3")).unwrap() > Valuation::Finite(4));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn random_linear_pairs(
            z1 in -20i64..20, dz in 1i64..20, mu1 in 1u32..5, mu2 in 1u32..5,
            num in -50i64..50, den in 1i64..50, u in -5i64..20, pi in 0usize..4,
        ) {
            prop_assume!(num != 0 && mu1.gcd(&mu2) == 1);
            let p = [2u64, 3, 5, 7][pi];
            let f = FactoredPoly::from_roots(&[(z1, mu1), (z1 + dz, mu2)]).unwrap();
            let r = Rational::new(BigInt::from(num), BigInt::from(den));
            let ctx = PAdicContext::new(p, 160).unwrap();
            let w = approximation_witness(&f, 0, 1, &r, u, &ctx).unwrap();
            check_pair(&f, &w, &r, u);
        }
    }
}
