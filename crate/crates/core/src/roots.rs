//! Zeros of integer polynomials in Z_p: exhaustive residue checks, Hensel
//! seeds, Newton lifting, and the exact simple-zero test in degrees 1 and 2.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{split_p, vp_raw, PAdicContext, PAdicNumber, Valuation};
use crate::poly::DensePoly;
use crate::primes::{checked_pow, is_prime, pow_mod};

/// Default cap on the number of residues an exhaustive scan may visit.
pub const DEFAULT_SCAN_BUDGET: u64 = 10_000_000;

/// A residue `a0` with `nu_p(f(a0)) > 2 nu_p(f'(a0))`, found among `[0, p^level)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HenselSeed {
    #[serde(serialize_with = "crate::serde_util::big")]
    pub residue: BigInt,
    pub level: u32,
    pub f_valuation: Valuation,
    pub derivative_valuation: i64,
}

impl HenselSeed {
    /// Recomputes both valuations on the integer residue.
    pub fn verify(&self, f: &DensePoly, p: u64) -> bool {
        let pb = BigInt::from(p);
        let fv = vp_raw(&f.eval(&self.residue), &pb);
        match vp_raw(&f.derivative().eval(&self.residue), &pb) {
            Valuation::Finite(d) => {
                d == self.derivative_valuation
                    && fv == self.f_valuation
                    && fv > Valuation::Finite(2 * d)
            }
            Valuation::Infinite => false,
        }
    }
}

/// Three-valued outcome of a residue search for zeros in Z_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZeroEvidence {
    /// No root modulo `p^level`, hence no zero in Z_p.
    NoZero { level: u32 },
    /// A Hensel seed, hence a simple zero in Z_p.
    SimpleRoot(HenselSeed),
    /// Roots exist modulo `p^level` but none meets the Hensel gap.
    Inconclusive { level: u32 },
}

fn scan_size(p: u64, level: u32, budget: u64) -> Result<u64> {
    match checked_pow(p, level) {
        Some(n) if n <= budget => Ok(n),
        other => Err(Error::BudgetExceeded {
            what: "residue scan",
            needed: other.map_or(u128::MAX, u128::from),
            budget: budget as u128,
        }),
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Coefficients reduced into `[0, m)`.
fn reduce_coeffs(f: &DensePoly, m: u64) -> Vec<u64> {
    let mb = BigInt::from(m);
    f.coeffs()
        .iter()
        .map(|c| c.mod_floor(&mb).to_u64().expect("reduced below modulus"))
        .collect()
}

fn eval_mod(coeffs: &[u64], x: u64, m: u64) -> u64 {
    coeffs.iter().rev().fold(0u64, |acc, &c| {
        (((acc as u128 * x as u128) % m as u128 + c as u128) % m as u128) as u64
    })
}

/// Whether `f` has a root modulo `p^level`.
///
/// Roots are found level by level: a root mod `p^(j+1)` reduces to a root
/// mod `p^j`, so only lifts of known roots are examined. The answer is the
/// same as a scan over all `p^level` residues.
pub fn has_zero_mod(f: &DensePoly, p: u64, level: u32, budget: u64) -> Result<bool> {
    check_prime(p)?;
    if level == 0 {
        return Err(Error::invalid("level must be at least 1"));
    }
    let modulus = scan_size(p, level, budget)?;
    if f.is_zero() {
        return Ok(true);
    }
    let coeffs = reduce_coeffs(f, modulus);
    let mut roots: Vec<u64> = (0..p).filter(|&r| eval_mod(&coeffs, r, p) == 0).collect();
    let mut pj = p;
    for _ in 1..level {
        let next = pj * p;
        roots = roots
            .iter()
            .flat_map(|&r| (0..p).map(move |t| r + t * pj))
            .filter(|&x| eval_mod(&coeffs, x, next) == 0)
            .collect();
        if roots.is_empty() {
            return Ok(false);
        }
        pj = next;
    }
    Ok(!roots.is_empty())
}

/// Lowest residue in `[0, p^level)` meeting the Hensel gap on the integer itself.
pub fn find_hensel_seed(
    f: &DensePoly,
    p: u64,
    level: u32,
    budget: u64,
) -> Result<Option<HenselSeed>> {
    check_prime(p)?;
    let count = scan_size(p, level, budget)?;
    if f.degree().unwrap_or(0) == 0 {
        return Ok(None);
    }
    let df = f.derivative();
    let pb = BigInt::from(p);
    let coeffs_mod_p = reduce_coeffs(f, p);
    for a in 0..count {
        // every seed is a root mod p, since nu_p(f(a)) > 2 nu_p(f'(a)) >= 0
        if eval_mod(&coeffs_mod_p, a % p, p) != 0 {
            continue;
        }
        let x = BigInt::from(a);
        let Valuation::Finite(d) = vp_raw(&df.eval(&x), &pb) else {
            continue;
        };
        let fv = vp_raw(&f.eval(&x), &pb);
        if fv > Valuation::Finite(2 * d) {
            return Ok(Some(HenselSeed {
                residue: x,
                level,
                f_valuation: fv,
                derivative_valuation: d,
            }));
        }
    }
    Ok(None)
}

/// Hensel seed if one exists at `level`, otherwise the contrapositive zero check.
pub fn classify_zero(f: &DensePoly, p: u64, level: u32, budget: u64) -> Result<ZeroEvidence> {
    if let Some(seed) = find_hensel_seed(f, p, level, budget)? {
        return Ok(ZeroEvidence::SimpleRoot(seed));
    }
    if has_zero_mod(f, p, level, budget)? {
        Ok(ZeroEvidence::Inconclusive { level })
    } else {
        Ok(ZeroEvidence::NoZero { level })
    }
}

/// Newton iteration from a seed to a root known modulo `p^N`.
///
/// The returned `x` satisfies `nu_p(f(x)) >= N` for its canonical integer
/// representative and agrees with the seed modulo
/// `p^(nu_p(f(a0)) - nu_p(f'(a0)))`.
pub fn hensel_lift(f: &DensePoly, seed: &HenselSeed, ctx: &PAdicContext) -> Result<PAdicNumber> {
    lift_to_integer(f, seed, ctx).map(|x| ctx.from_integer(&x))
}

/// Same as [`hensel_lift`], returning the representative in `[0, p^N)`.
pub fn lift_to_integer(f: &DensePoly, seed: &HenselSeed, ctx: &PAdicContext) -> Result<BigInt> {
    let pb = ctx.prime_big();
    let df = f.derivative();
    let d = match vp_raw(&df.eval(&seed.residue), pb) {
        Valuation::Finite(d) => d,
        Valuation::Infinite => {
            return Err(Error::invalid("derivative vanishes at the seed"));
        }
    };
    if vp_raw(&f.eval(&seed.residue), pb) <= Valuation::Finite(2 * d) {
        return Err(Error::invalid(format!(
            "seed {} does not satisfy the Hensel gap",
            seed.residue
        )));
    }
    let n = ctx.precision();
    let d = d as u32;
    let work = ctx.with_precision(n + 2 * d + 2)?;
    let target = Valuation::Finite((n + d) as i64);
    let cap = (n as f64).log2().ceil() as u32 + 4;
    let mut x = seed.residue.clone();
    let mut done = false;
    for _ in 0..=cap {
        let fx = f.eval(&x);
        if vp_raw(&fx, pb) >= target {
            done = true;
            break;
        }
        let step = work.div(&work.from_integer(&fx), &work.from_integer(&df.eval(&x)))?;
        x = (x - work.to_integer(&step)?).mod_floor(work.modulus());
    }
    if !done {
        return Err(Error::PrecisionExhausted {
            context: format!("Newton iteration did not converge in {cap} steps"),
            needed: n,
        });
    }
    let x = x.mod_floor(ctx.modulus());
    debug_assert!(vp_raw(&f.eval(&x), pb) >= Valuation::Finite(n as i64));
    Ok(x)
}

/// Outcome of the exact simple-zero test for degree 1 and 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "answer", rename_all = "kebab-case")]
pub enum SimpleZero {
    /// A simple zero in Z_p; `root_valuation` is the largest root valuation.
    Yes { root_valuation: Valuation },
    /// `f = a (X - z)^2`.
    DoubleRoot,
    /// No zero in Z_p at all.
    NoZero,
}

/// Square test in Q_p for nonzero `d`.
pub fn is_padic_square(d: &BigInt, p: u64) -> bool {
    assert!(!d.is_zero());
    let pb = BigInt::from(p);
    let (t, u) = split_p(d, &pb);
    if t % 2 == 1 {
        return false;
    }
    if p == 2 {
        u.mod_floor(&BigInt::from(8)) == BigInt::from(1)
    } else {
        let r = u.mod_floor(&pb).to_u64().expect("residue below p");
        pow_mod(r, (p - 1) / 2, p) == 1
    }
}

pub fn simple_zero_deg_le2(f: &DensePoly, p: u64) -> Result<SimpleZero> {
    check_prime(p)?;
    let pb = BigInt::from(p);
    let v = |x: &BigInt| vp_raw(x, &pb);
    match f.degree() {
        Some(1) => {
            let (b, a) = (&f.coeffs()[0], &f.coeffs()[1]);
            if v(b) >= v(a) {
                let rv = match (v(b), v(a)) {
                    (Valuation::Finite(x), Valuation::Finite(y)) => Valuation::Finite(x - y),
                    _ => Valuation::Infinite,
                };
                Ok(SimpleZero::Yes { root_valuation: rv })
            } else {
                Ok(SimpleZero::NoZero)
            }
        }
        Some(2) => {
            let (c, b, a) = (&f.coeffs()[0], &f.coeffs()[1], &f.coeffs()[2]);
            let disc = b * b - BigInt::from(4) * a * c;
            if disc.is_zero() {
                return Ok(SimpleZero::DoubleRoot);
            }
            if c.is_zero() {
                // roots 0 and -b/a
                return Ok(SimpleZero::Yes {
                    root_valuation: Valuation::Infinite,
                });
            }
            if !is_padic_square(&disc, p) {
                return Ok(SimpleZero::NoZero);
            }
            let va = v(a).finite().expect("leading coefficient nonzero");
            let pi = v(c).finite().expect("c nonzero") - va;
            // Valuations of the two roots: unequal exactly when 2 nu(b/a) < nu(c/a).
            let max_root = match v(b) {
                Valuation::Finite(vb) if 2 * (vb - va) < pi => pi - (vb - va),
                _ => pi / 2,
            };
            if max_root >= 0 {
                Ok(SimpleZero::Yes {
                    root_valuation: Valuation::Finite(max_root),
                })
            } else {
                Ok(SimpleZero::NoZero)
            }
        }
        other => Err(Error::invalid(format!(
            "simple-zero test needs degree 1 or 2, got {}",
            other.map_or("zero polynomial".to_string(), |d| d.to_string())
        ))),
    }
}

/// Valuation `nu_p(f'(z))` at a simple root: `nu_p(a)` in degree 1, `nu_p(D)/2` in degree 2.
pub(crate) fn simple_root_derivative_valuation(f: &DensePoly, p: u64) -> Option<i64> {
    let pb = BigInt::from(p);
    match f.degree()? {
        1 => vp_raw(&f.coeffs()[1], &pb).finite(),
        2 => {
            let (c, b, a) = (&f.coeffs()[0], &f.coeffs()[1], &f.coeffs()[2]);
            let disc = b * b - BigInt::from(4) * a * c;
            vp_raw(&disc, &pb).finite().map(|t| t / 2)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> DensePoly {
        DensePoly::from_i64s(c)
    }

    /// Residue scan over every class mod p^level.
    fn brute_has_root(f: &DensePoly, p: u64, level: u32) -> bool {
        let m = BigInt::from(p.pow(level));
        (0..p.pow(level)).any(|r| f.eval(&BigInt::from(r)).mod_floor(&m).is_zero())
    }

    #[test]
    fn has_zero_mod_examples() {
        assert!(!has_zero_mod(&poly(&[1, 0, 1]), 3, 1, DEFAULT_SCAN_BUDGET).unwrap());
        assert!(has_zero_mod(&poly(&[1, 0, 1]), 5, 2, DEFAULT_SCAN_BUDGET).unwrap());
        // 7^2 + 1 = 50
        assert!(poly(&[1, 0, 1]).eval_i64(7) == BigInt::from(50));
        assert!(!has_zero_mod(&poly(&[2, 0, 0, 1]), 3, 2, DEFAULT_SCAN_BUDGET).unwrap());
        assert!(!brute_has_root(&poly(&[2, 0, 0, 1]), 3, 2));
    }

    #[test]
    fn budget_is_enforced() {
        let err = has_zero_mod(&poly(&[1, 0, 1]), 7, 20, DEFAULT_SCAN_BUDGET).unwrap_err();
        assert!(err.is_exhaustion());
        assert!(find_hensel_seed(&poly(&[1, 1]), 11, 9, 1000)
            .unwrap_err()
            .is_exhaustion());
        assert_eq!(
            has_zero_mod(&poly(&[1, 1]), 6, 1, 100),
            Err(Error::NotPrime(6))
        );
    }

    #[test]
    fn seed_examples() {
        let s = find_hensel_seed(&poly(&[1, 0, 1]), 5, 1, DEFAULT_SCAN_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!(s.residue, BigInt::from(2));
        assert!(
            find_hensel_seed(&poly(&[1, 0, 1]), 7, 1, DEFAULT_SCAN_BUDGET)
                .unwrap()
                .is_none()
        );
        let cubes = DensePoly::monomial_plus(3, BigInt::from(512));
        let s = find_hensel_seed(&cubes, 3, 3, DEFAULT_SCAN_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!(s.residue, BigInt::from(1));
        assert_eq!(s.f_valuation, Valuation::Finite(3));
        assert_eq!(s.derivative_valuation, 1);
        assert!(s.verify(&cubes, 3));
    }

    #[test]
    fn lift_examples() {
        let ctx = PAdicContext::new(5, 30).unwrap();
        let f = poly(&[1, 0, 1]);
        let seed = find_hensel_seed(&f, 5, 1, DEFAULT_SCAN_BUDGET)
            .unwrap()
            .unwrap();
        let x = lift_to_integer(&f, &seed, &ctx).unwrap();
        assert!(f.eval(&x).mod_floor(ctx.modulus()).is_zero());
        // 2 + 1*5 + 2*5^2 + ...
        assert_eq!(x.mod_floor(&BigInt::from(125)), BigInt::from(57));
        let root = hensel_lift(&f, &seed, &ctx).unwrap();
        assert!(f.eval_padic(&root, &ctx).unwrap().is_zero());

        let lin = poly(&[-7, 1]);
        let seed = find_hensel_seed(&lin, 13, 1, DEFAULT_SCAN_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!(
            lift_to_integer(&lin, &seed, &PAdicContext::new(13, 8).unwrap()).unwrap(),
            BigInt::from(7)
        );

        let quartic = DensePoly::monomial_plus(4, BigInt::from(33));
        let ctx = PAdicContext::new(17, 40).unwrap();
        let seed = find_hensel_seed(&quartic, 17, 1, DEFAULT_SCAN_BUDGET)
            .unwrap()
            .unwrap();
        let x = lift_to_integer(&quartic, &seed, &ctx).unwrap();
        assert!(quartic.eval(&x).mod_floor(ctx.modulus()).is_zero());
    }

    #[test]
    fn lift_with_nonunit_derivative() {
        // X^3 + 512 at p = 3 from a0 = 1: nu(f') = 1
        let f = DensePoly::monomial_plus(3, BigInt::from(512));
        let seed = find_hensel_seed(&f, 3, 3, DEFAULT_SCAN_BUDGET)
            .unwrap()
            .unwrap();
        let ctx = PAdicContext::new(3, 50).unwrap();
        let x = lift_to_integer(&f, &seed, &ctx).unwrap();
        assert!(vp_raw(&f.eval(&x), &BigInt::from(3)) >= Valuation::Finite(50));
        // agrees with the seed mod 3^(3 - 1)
        assert_eq!(x.mod_floor(&BigInt::from(9)), BigInt::from(1));
    }

    #[test]
    fn lift_rejects_bad_seed() {
        let f = poly(&[1, 0, 1]);
        let bad = HenselSeed {
            residue: BigInt::from(1),
            level: 1,
            f_valuation: Valuation::Finite(0),
            derivative_valuation: 0,
        };
        let ctx = PAdicContext::new(5, 10).unwrap();
        assert!(matches!(
            hensel_lift(&f, &bad, &ctx),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn simple_zero_examples() {
        assert_eq!(
            simple_zero_deg_le2(&poly(&[9, -6, 1]), 3).unwrap(),
            SimpleZero::DoubleRoot
        );
        assert!(matches!(
            simple_zero_deg_le2(&poly(&[1, 0, 1]), 5).unwrap(),
            SimpleZero::Yes { .. }
        ));
        assert_eq!(
            simple_zero_deg_le2(&poly(&[1, 2]), 2).unwrap(),
            SimpleZero::NoZero
        );
        assert_eq!(
            simple_zero_deg_le2(&poly(&[1, 0, 1]), 7).unwrap(),
            SimpleZero::NoZero
        );
        // 4X^2 - 1 at p = 2: roots +-1/2
        assert_eq!(
            simple_zero_deg_le2(&poly(&[-1, 0, 4]), 2).unwrap(),
            SimpleZero::NoZero
        );
        // X^2 - 17 at p = 2: 17 = 1 mod 8
        assert!(matches!(
            simple_zero_deg_le2(&poly(&[-17, 0, 1]), 2).unwrap(),
            SimpleZero::Yes { .. }
        ));
        assert!(simple_zero_deg_le2(&poly(&[1, 0, 0, 1]), 2).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_zero(&poly(&[1, 0, 1]), 3, 2, DEFAULT_SCAN_BUDGET).unwrap(),
            ZeroEvidence::NoZero { level: 2 }
        );
        // X^2 has only the double root 0
        assert_eq!(
            classify_zero(&poly(&[0, 0, 1]), 3, 4, DEFAULT_SCAN_BUDGET).unwrap(),
            ZeroEvidence::Inconclusive { level: 4 }
        );
        assert!(matches!(
            classify_zero(&poly(&[1, 0, 1]), 13, 1, DEFAULT_SCAN_BUDGET).unwrap(),
            ZeroEvidence::SimpleRoot(_)
        ));
    }

    /// Brute-force oracle: a residue mod p^6 meeting the Hensel gap with a
    /// derivative valuation small enough for the gap to be decided at that level.
    fn brute_simple_zero(f: &DensePoly, p: u64) -> bool {
        let level = 6;
        let pb = BigInt::from(p);
        let df = f.derivative();
        (0..p.pow(level)).any(|r| {
            let x = BigInt::from(r);
            match vp_raw(&df.eval(&x), &pb) {
                Valuation::Finite(d) if 2 * d < level as i64 => {
                    vp_raw(&f.eval(&x), &pb) > Valuation::Finite(2 * d)
                }
                _ => false,
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn quadratic_decision_matches_residue_search(
            c in -50i64..=50, b in -50i64..=50, a in prop::sample::select(vec![-50i64, -12, -4, -3, -1, 1, 2, 3, 5, 8, 9, 27, 50]),
            p in prop::sample::select(vec![2u64, 3, 5, 7]),
        ) {
            let f = poly(&[c, b, a]);
            let disc = BigInt::from(b * b - 4 * a * c);
            // keep the discriminant valuation small enough for level 6 to decide
            prop_assume!(disc.is_zero() || vp_raw(&disc, &BigInt::from(p)) < Valuation::Finite(4));
            let verdict = simple_zero_deg_le2(&f, p).unwrap();
            let yes = matches!(verdict, SimpleZero::Yes { .. });
            prop_assert_eq!(yes, brute_simple_zero(&f, p), "f = {}, p = {}", f, p);
        }

        #[test]
        fn no_root_mod_pe_implies_no_simple_zero(
            c in -50i64..=50, b in -50i64..=50, a in 1i64..=50,
            p in prop::sample::select(vec![2u64, 3, 5, 7, 11]),
        ) {
            let f = poly(&[c, b, a]);
            let level = if p <= 3 { 8 } else { 4 };
            if !has_zero_mod(&f, p, level, DEFAULT_SCAN_BUDGET).unwrap() {
                prop_assert!(find_hensel_seed(&f, p, 1, DEFAULT_SCAN_BUDGET).unwrap().is_none());
                let yes = matches!(simple_zero_deg_le2(&f, p).unwrap(), SimpleZero::Yes { .. });
                prop_assert!(!yes);
            }
        }

        #[test]
        fn lifted_roots_vanish(c in 1i64..200, p in prop::sample::select(vec![3u64, 5, 7, 13, 17])) {
            let f = poly(&[-c, 0, 1]);
            if let Some(seed) = find_hensel_seed(&f, p, 1, DEFAULT_SCAN_BUDGET).unwrap() {
                let ctx = PAdicContext::new(p, 24).unwrap();
                let x = hensel_lift(&f, &seed, &ctx).unwrap();
                prop_assert!(f.eval_padic(&x, &ctx).unwrap().is_zero());
                prop_assert!(!ctx.to_integer(&x).unwrap().is_negative());
            }
        }
    }
}
