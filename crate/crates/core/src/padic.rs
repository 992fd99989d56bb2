//! Truncated p-adic arithmetic.
//!
//! A nonzero element of Q_p is held as `p^v * u` where `u` is a unit known
//! modulo `p^d` for some `d <= N` (the context precision). Products and
//! quotients are exact on valuations and lose no relative precision beyond
//! the weaker operand. Sums can cancel leading digits; the lost digits are
//! tracked, and a sum that cancels every known digit becomes a *vanished*
//! value: congruent to zero modulo a known power of `p`, flagged as
//! precision-exhausted.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::primes::is_prime;

/// Exact rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// A p-adic valuation; `Infinite` is the valuation of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Exponent of `p` in `x`, with no primality check. `p` must be at least 2.
pub(crate) fn vp_raw(x: &BigInt, p: &BigInt) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let mut v = 0i64;
    let mut cur = x.clone();
    loop {
        let (q, r) = cur.div_rem(p);
        if !r.is_zero() {
            return Valuation::Finite(v);
        }
        cur = q;
        v += 1;
    }
}

/// Strips every factor `p` from a nonzero `x`, returning `(exponent, rest)`.
pub(crate) fn split_p(x: &BigInt, p: &BigInt) -> (u64, BigInt) {
    debug_assert!(!x.is_zero());
    let mut v = 0;
    let mut cur = x.clone();
    loop {
        let (q, r) = cur.div_rem(p);
        if !r.is_zero() {
            return (v, cur);
        }
        cur = q;
        v += 1;
    }
}

/// p-adic valuation of an integer; `+inf` for zero.
pub fn vp_int(x: &BigInt, p: u64) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(vp_raw(x, &BigInt::from(p)))
}

/// p-adic valuation of a rational; `+inf` for zero.
pub fn vp_rational(r: &Rational, p: u64) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(vp_rational_raw(r, &BigInt::from(p)))
}

pub(crate) fn vp_rational_raw(r: &Rational, p: &BigInt) -> Valuation {
    match (vp_raw(r.numer(), p), vp_raw(r.denom(), p)) {
        (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a - b),
        _ => Valuation::Infinite,
    }
}

/// Representative of `a` modulo `m` in the half-open interval `(-m/2, m/2]`.
pub fn centered_mod(a: &BigInt, m: &BigInt) -> BigInt {
    assert!(m.is_positive(), "centered_mod needs a positive modulus");
    let r = a.mod_floor(m);
    if &(&r * 2u32) > m {
        r - m
    } else {
        r
    }
}

pub fn centered_mod_i64(a: i64, m: i64) -> i64 {
    assert!(m > 0, "centered_mod needs a positive modulus");
    let r = a.rem_euclid(m);
    if 2 * r > m {
        r - m
    } else {
        r
    }
}

/// Parses `NUM`, `NUM/DEN`, with optional sign.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad integer `{t}` in rational `{s}`")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(parse_int(n)?, den))
        }
    }
}

/// Prime `p` and working precision `N` (base-p digits).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicContext {
    p: u64,
    precision: u32,
    p_big: BigInt,
    modulus: BigInt,
}

impl PAdicContext {
    pub const DEFAULT_PRECISION: u32 = 64;

    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if precision == 0 {
            return Err(Error::invalid("p-adic precision must be at least 1"));
        }
        let p_big = BigInt::from(p);
        let modulus = p_big.pow(precision);
        Ok(PAdicContext {
            p,
            precision,
            p_big,
            modulus,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn prime_big(&self) -> &BigInt {
        &self.p_big
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^N`.
    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        PAdicContext::new(self.p, precision)
    }

    pub fn p_pow(&self, e: u32) -> BigInt {
        self.p_big.pow(e)
    }

    pub fn unit_inverse(&self, u: &BigInt) -> Result<BigInt> {
        self.inverse_mod_pow(u, self.precision)
    }

    fn inverse_mod_pow(&self, u: &BigInt, digits: u32) -> Result<BigInt> {
        if u.mod_floor(&self.p_big).is_zero() {
            return Err(Error::invalid(format!(
                "{u} is divisible by {} and has no inverse",
                self.p
            )));
        }
        let m = self.p_pow(digits);
        let inv = u
            .mod_floor(&m)
            .modinv(&m)
            .expect("a unit is invertible modulo a prime power");
        Ok(inv)
    }

    pub fn from_integer(&self, x: &BigInt) -> PAdicNumber {
        if x.is_zero() {
            return PAdicNumber::zero();
        }
        let (v, rest) = split_p(x, &self.p_big);
        PAdicNumber(Repr::Unit {
            valuation: v as i64,
            unit: rest.mod_floor(&self.modulus),
            digits: self.precision,
        })
    }

    pub fn from_rational(&self, r: &Rational) -> PAdicNumber {
        if r.is_zero() {
            return PAdicNumber::zero();
        }
        let (a, num) = split_p(r.numer(), &self.p_big);
        let (b, den) = split_p(r.denom(), &self.p_big);
        let inv = self
            .inverse_mod_pow(&den, self.precision)
            .expect("denominator stripped of p is a unit");
        PAdicNumber(Repr::Unit {
            valuation: a as i64 - b as i64,
            unit: (num * inv).mod_floor(&self.modulus),
            digits: self.precision,
        })
    }

    /// Builds the value `p^valuation * s`, known modulo `p^abs_precision`.
    fn normalize(&self, valuation: i64, s: &BigInt, abs_precision: i64) -> PAdicNumber {
        let rel = abs_precision - valuation;
        if rel <= 0 {
            return PAdicNumber(Repr::Vanished {
                above: abs_precision,
            });
        }
        let s = s.mod_floor(&self.p_pow(rel as u32));
        if s.is_zero() {
            return PAdicNumber(Repr::Vanished {
                above: abs_precision,
            });
        }
        let (c, rest) = split_p(&s, &self.p_big);
        let digits = ((rel - c as i64) as u32).min(self.precision);
        PAdicNumber(Repr::Unit {
            valuation: valuation + c as i64,
            unit: rest.mod_floor(&self.p_pow(digits)),
            digits,
        })
    }

    pub fn mul(&self, a: &PAdicNumber, b: &PAdicNumber) -> PAdicNumber {
        use Repr::*;
        match (&a.0, &b.0) {
            (Zero, _) | (_, Zero) => PAdicNumber::zero(),
            (Vanished { above: x }, Vanished { above: y }) => {
                PAdicNumber(Vanished { above: x + y })
            }
            (Vanished { above }, Unit { valuation, .. })
            | (Unit { valuation, .. }, Vanished { above }) => PAdicNumber(Vanished {
                above: above + valuation,
            }),
            (
                Unit {
                    valuation: va,
                    unit: ua,
                    digits: da,
                },
                Unit {
                    valuation: vb,
                    unit: ub,
                    digits: db,
                },
            ) => {
                let digits = (*da).min(*db);
                PAdicNumber(Unit {
                    valuation: va + vb,
                    unit: (ua * ub).mod_floor(&self.p_pow(digits)),
                    digits,
                })
            }
        }
    }

    pub fn div(&self, a: &PAdicNumber, b: &PAdicNumber) -> Result<PAdicNumber> {
        use Repr::*;
        match (&a.0, &b.0) {
            (_, Zero) => Err(Error::DivisionByZero),
            (_, Vanished { above }) => Err(Error::PrecisionExhausted {
                context: format!("divisor is zero modulo p^{above}"),
                needed: self.precision.saturating_add(1),
            }),
            (Zero, _) => Ok(PAdicNumber::zero()),
            (Vanished { above }, Unit { valuation, .. }) => Ok(PAdicNumber(Vanished {
                above: above - valuation,
            })),
            (
                Unit {
                    valuation: va,
                    unit: ua,
                    digits: da,
                },
                Unit {
                    valuation: vb,
                    unit: ub,
                    digits: db,
                },
            ) => {
                let digits = (*da).min(*db);
                let inv = self.inverse_mod_pow(ub, digits)?;
                Ok(PAdicNumber(Unit {
                    valuation: va - vb,
                    unit: (ua * inv).mod_floor(&self.p_pow(digits)),
                    digits,
                }))
            }
        }
    }

    pub fn add(&self, a: &PAdicNumber, b: &PAdicNumber) -> PAdicNumber {
        use Repr::*;
        match (&a.0, &b.0) {
            (Zero, _) => b.clone(),
            (_, Zero) => a.clone(),
            (Vanished { above: x }, Vanished { above: y }) => {
                PAdicNumber(Vanished { above: *x.min(y) })
            }
            (
                Vanished { above },
                Unit {
                    valuation,
                    unit,
                    digits,
                },
            )
            | (
                Unit {
                    valuation,
                    unit,
                    digits,
                },
                Vanished { above },
            ) => {
                let abs = (*above).min(valuation + *digits as i64);
                self.normalize(*valuation, unit, abs)
            }
            (
                Unit {
                    valuation: va,
                    unit: ua,
                    digits: da,
                },
                Unit {
                    valuation: vb,
                    unit: ub,
                    digits: db,
                },
            ) => {
                let w = (*va).min(*vb);
                let s = ua * self.p_pow((va - w) as u32) + ub * self.p_pow((vb - w) as u32);
                let abs = (va + *da as i64).min(vb + *db as i64);
                self.normalize(w, &s, abs)
            }
        }
    }

    pub fn neg(&self, a: &PAdicNumber) -> PAdicNumber {
        match &a.0 {
            Repr::Unit {
                valuation,
                unit,
                digits,
            } => {
                let m = self.p_pow(*digits);
                PAdicNumber(Repr::Unit {
                    valuation: *valuation,
                    unit: (&m - unit).mod_floor(&m),
                    digits: *digits,
                })
            }
            _ => a.clone(),
        }
    }

    pub fn sub(&self, a: &PAdicNumber, b: &PAdicNumber) -> PAdicNumber {
        self.add(a, &self.neg(b))
    }

    pub fn pow(&self, a: &PAdicNumber, mut e: u64) -> PAdicNumber {
        let mut base = a.clone();
        let mut acc = self.from_integer(&BigInt::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Canonical representative in `[0, p^N)` of an element of Z_p.
    pub fn to_integer(&self, a: &PAdicNumber) -> Result<BigInt> {
        match &a.0 {
            Repr::Zero | Repr::Vanished { .. } => Ok(BigInt::zero()),
            Repr::Unit {
                valuation, unit, ..
            } => {
                if *valuation < 0 {
                    return Err(Error::invalid(format!(
                        "element of valuation {valuation} is not a p-adic integer"
                    )));
                }
                if *valuation >= self.precision as i64 {
                    return Ok(BigInt::zero());
                }
                Ok((self.p_pow(*valuation as u32) * unit).mod_floor(&self.modulus))
            }
        }
    }

    /// The rational `p^v * u` carried by a nonzero element; zero otherwise.
    pub fn to_rational(&self, a: &PAdicNumber) -> Rational {
        match &a.0 {
            Repr::Unit {
                valuation, unit, ..
            } => {
                let scale = self.p_pow(valuation.unsigned_abs() as u32);
                if *valuation >= 0 {
                    Rational::from_integer(unit * scale)
                } else {
                    Rational::new(unit.clone(), scale)
                }
            }
            _ => Rational::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Zero,
    Unit {
        valuation: i64,
        unit: BigInt,
        digits: u32,
    },
    Vanished {
        above: i64,
    },
}

/// Element of Q_p to finite precision. Construct through a [`PAdicContext`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicNumber(Repr);

impl PAdicNumber {
    pub fn zero() -> Self {
        PAdicNumber(Repr::Zero)
    }

    /// True for exact zero and for values that vanished to precision.
    pub fn is_zero(&self) -> bool {
        !matches!(self.0, Repr::Unit { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.0, Repr::Zero)
    }

    /// Set when cancellation consumed every known digit.
    pub fn is_exhausted(&self) -> bool {
        matches!(self.0, Repr::Vanished { .. })
    }

    pub fn valuation(&self) -> Valuation {
        match &self.0 {
            Repr::Unit { valuation, .. } => Valuation::Finite(*valuation),
            _ => Valuation::Infinite,
        }
    }

    /// Certified lower bound on the true valuation.
    pub fn valuation_lower_bound(&self) -> Valuation {
        match &self.0 {
            Repr::Zero => Valuation::Infinite,
            Repr::Unit { valuation, .. } => Valuation::Finite(*valuation),
            Repr::Vanished { above } => Valuation::Finite(*above),
        }
    }

    pub fn unit(&self) -> Option<&BigInt> {
        match &self.0 {
            Repr::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// Number of known unit digits; zero unless the value is a unit multiple.
    pub fn digits(&self) -> u32 {
        match &self.0 {
            Repr::Unit { digits, .. } => *digits,
            _ => 0,
        }
    }

    /// The value is known modulo `p^absolute_precision`.
    pub fn absolute_precision(&self) -> Valuation {
        match &self.0 {
            Repr::Zero => Valuation::Infinite,
            Repr::Unit {
                valuation, digits, ..
            } => Valuation::Finite(valuation + *digits as i64),
            Repr::Vanished { above } => Valuation::Finite(*above),
        }
    }

    pub fn cmp_valuation(&self, other: &PAdicNumber) -> Ordering {
        self.valuation().cmp(&other.valuation())
    }
}
