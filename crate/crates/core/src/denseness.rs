//! Density verdicts for quotient sets in Q_p.
//!
//! Covers sums of `m` nth powers, polynomials of degree at most two,
//! polynomials that split over the integers, and the closure of sums of
//! `n`th powers in Q_2 for `n` in {4, 8, 16}. Every verdict carries a
//! certificate that [`Verdict::recheck`] can confirm from the inputs alone.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{split_p, vp_raw, PAdicNumber, Rational, Valuation};
use crate::poly::{parse_poly, DensePoly, FactoredPoly, PolyInput};
use crate::primes::{checked_pow, is_prime, vp_u64};
use crate::roots::{
    find_hensel_seed, has_zero_mod, simple_root_derivative_valuation, simple_zero_deg_le2,
    HenselSeed, SimpleZero,
};
use crate::waring::{is_neg1_nth_power, theta, verify_theta_tuple};

/// Residue scans for seeds and roots stop at this many residues.
pub const DEFAULT_POLY_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Dense,
    NotDense,
    Unknown,
}

/// Which argument produced the verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Reason {
    ThetaThreshold {
        theta: u64,
        modulus: u64,
        m: u64,
    },
    #[serde(rename = "special-2adic-threshold")]
    SpecialTwoAdicThreshold {
        threshold: u64,
        m: u64,
    },
    SimpleZero,
    GcdMultiplicity {
        gcd: u32,
    },
    MissingValuationClass {
        theta: u64,
        modulus: u64,
        k: u32,
    },
    #[serde(rename = "no-zero-in-Zp")]
    NoZeroInZp,
    OutOfTheoremScope {
        hypothesis: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// `sum x_i^n = 0 mod modulus` with `x_1` a unit.
    ResidueTuple {
        bases: Vec<u64>,
        modulus: u64,
    },
    /// Least `m` that works at `p = 2` for this `n`.
    Threshold {
        m_min: u64,
    },
    /// Divides every root multiplicity.
    Divisor {
        n: u32,
    },
    /// Two factors with coprime multiplicities.
    CoprimePair {
        i: usize,
        j: usize,
        mu_i: u32,
        mu_j: u32,
    },
    /// Valuations of nonzero quotients lie in `allowed` mod `n`; `missing` never occur.
    MissingResidueClasses {
        n: u64,
        allowed: Vec<i64>,
        missing: Vec<i64>,
    },
    HenselSeed(HenselSeed),
    /// Degree two: the discriminant is a nonzero square in Q_p and a root lies in Z_p.
    SquareDiscriminant {
        #[serde(serialize_with = "crate::serde_util::big")]
        discriminant: BigInt,
        root_valuation: Valuation,
    },
    /// `f` has no root modulo `p^level`.
    NoRootModulo {
        level: u32,
    },
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "problem", rename_all = "kebab-case")]
pub enum Inputs {
    PowerSum {
        m: u64,
        n: u64,
        p: u64,
    },
    TwoSummands {
        n: u64,
        p: u64,
    },
    Polynomial {
        poly: String,
        p: u64,
    },
    SplitProfile {
        multiplicities: Vec<u32>,
        p: u64,
        constant_valuation_cofactor: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub reason: Reason,
    pub certificate: Certificate,
    pub inputs: Inputs,
    /// Short label of the argument behind the verdict.
    pub theorem: &'static str,
}

impl Verdict {
    pub fn is_dense(&self) -> bool {
        self.status == Status::Dense
    }

    /// Re-derives the certificate's claim from the recorded inputs.
    ///
    /// Unknown verdicts and table lookups recheck trivially.
    pub fn recheck(&self) -> bool {
        match (&self.certificate, &self.inputs) {
            (Certificate::ResidueTuple { bases, modulus }, Inputs::PowerSum { m, n, p }) => {
                bases.len() as u64 <= *m && residue_tuple_ok(*n, *p, bases, *modulus)
            }
            (Certificate::ResidueTuple { bases, modulus }, Inputs::TwoSummands { n, p }) => {
                bases.len() == 2 && residue_tuple_ok(*n, *p, bases, *modulus)
            }
            (
                Certificate::MissingResidueClasses {
                    n,
                    allowed,
                    missing,
                },
                _,
            ) => {
                let Reason::MissingValuationClass { theta, k, .. } = self.reason else {
                    return false;
                };
                let m = match self.inputs {
                    Inputs::PowerSum { m, .. } => m,
                    Inputs::TwoSummands { .. } => 2,
                    _ => return false,
                };
                m < theta
                    && !missing.is_empty()
                    && *allowed == (-2 * k as i64..=2 * k as i64).collect::<Vec<_>>()
                    && missing
                        .iter()
                        .all(|r| r.unsigned_abs() > 2 * k as u64 && r.unsigned_abs() <= n / 2)
            }
            (
                Certificate::Divisor { n },
                Inputs::SplitProfile {
                    multiplicities,
                    constant_valuation_cofactor,
                    ..
                },
            ) => {
                *n > 1
                    && *constant_valuation_cofactor
                    && multiplicities.iter().all(|mu| mu % n == 0)
            }
            (Certificate::Divisor { n }, Inputs::Polynomial { poly, p }) => {
                *n == 2
                    && matches!(
                        parsed_dense(poly).map(|f| simple_zero_deg_le2(&f, *p)),
                        Some(Ok(SimpleZero::DoubleRoot))
                    )
            }
            (
                Certificate::CoprimePair { i, j, mu_i, mu_j },
                Inputs::SplitProfile { multiplicities, .. },
            ) => {
                multiplicities.get(*i) == Some(mu_i)
                    && multiplicities.get(*j) == Some(mu_j)
                    && (i != j || *mu_i == 1)
                    && mu_i.gcd(mu_j) == 1
            }
            (Certificate::HenselSeed(seed), Inputs::Polynomial { poly, p }) => {
                parsed_dense(poly).is_some_and(|f| seed.verify(&f, *p))
            }
            (
                Certificate::SquareDiscriminant { discriminant, .. },
                Inputs::Polynomial { poly, p },
            ) => parsed_dense(poly).is_some_and(|f| {
                f.degree() == Some(2)
                    && discriminant == &discriminant_of(&f)
                    && matches!(simple_zero_deg_le2(&f, *p), Ok(SimpleZero::Yes { .. }))
            }),
            (Certificate::NoRootModulo { level }, Inputs::Polynomial { poly, p }) => {
                parsed_dense(poly)
                    .is_some_and(|f| matches!(has_zero_mod(&f, *p, *level, u64::MAX), Ok(false)))
            }
            (Certificate::Threshold { m_min }, Inputs::PowerSum { m, n, p }) => {
                *p == 2
                    && special_threshold(*n) == Some(*m_min)
                    && (*m >= *m_min) == self.is_dense()
            }
            (Certificate::Threshold { m_min }, Inputs::TwoSummands { n, p }) => {
                *p == 2 && special_threshold(*n) == Some(*m_min) && !self.is_dense()
            }
            (Certificate::None, _) => self.status == Status::Unknown,
            _ => false,
        }
    }
}

fn residue_tuple_ok(n: u64, p: u64, bases: &[u64], modulus: u64) -> bool {
    let k = vp_u64(n, p);
    checked_pow(p, 2 * k + 1) == Some(modulus) && verify_theta_tuple(n, modulus, bases)
}

fn parsed_dense(poly: &str) -> Option<DensePoly> {
    parse_poly(poly).ok().map(|f| f.to_dense())
}

fn discriminant_of(f: &DensePoly) -> BigInt {
    let (c, b, a) = (&f.coeffs()[0], &f.coeffs()[1], &f.coeffs()[2]);
    b * b - BigInt::from(4) * a * c
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Least `m` with `R(S_m^n)` dense in Q_2, for the exponents where the
/// general theta criterion does not decide.
pub fn special_threshold(n: u64) -> Option<u64> {
    match n {
        2 => Some(3),
        4 => Some(8),
        8 => Some(16),
        16 => Some(64),
        _ => None,
    }
}

/// Centered residues mod `n` outside `[-2k, 2k]`.
fn missing_classes(n: u64, k: u32) -> Vec<i64> {
    let n = n as i64;
    let lo = -((n - 1) / 2);
    (lo..=n / 2).filter(|r| r.abs() > 2 * k as i64).collect()
}

/// Density of `R(S_m^n)` in Q_p.
pub fn decide_power_sum(m: u64, n: u64, p: u64) -> Result<Verdict> {
    decide_power_sum_capped(m, n, p, None)
}

/// As [`decide_power_sum`], stopping the theta search at `cap` summands.
/// The default cap is the modulus itself, where the search always succeeds.
pub fn decide_power_sum_capped(m: u64, n: u64, p: u64, cap: Option<u64>) -> Result<Verdict> {
    if m < 2 || n < 2 {
        return Err(Error::invalid(format!(
            "need m >= 2 and n >= 2, got m = {m}, n = {n}"
        )));
    }
    check_prime(p)?;
    let inputs = Inputs::PowerSum { m, n, p };
    if p == 2 {
        if let Some(threshold) = special_threshold(n) {
            let status = if m >= threshold {
                Status::Dense
            } else {
                Status::NotDense
            };
            return Ok(Verdict {
                status,
                reason: Reason::SpecialTwoAdicThreshold { threshold, m },
                certificate: Certificate::Threshold { m_min: threshold },
                inputs,
                theorem: "power-sum-dyadic-table",
            });
        }
    }
    let k = vp_u64(n, p);
    let modulus = checked_pow(p, 2 * k + 1).ok_or(Error::BudgetExceeded {
        what: "theta modulus",
        needed: u128::MAX,
        budget: u64::MAX as u128,
    })?;
    let t = theta(n, modulus, cap.unwrap_or(modulus))?;
    let Some(th) = t.value else {
        return Ok(unknown(
            inputs,
            format!("theta({n}, {modulus}) exceeds the search cap {}", t.cap),
        ));
    };
    if m >= th {
        let bases = t
            .certificate
            .expect("theta certificate accompanies its value");
        return Ok(Verdict {
            status: Status::Dense,
            reason: Reason::ThetaThreshold {
                theta: th,
                modulus,
                m,
            },
            certificate: Certificate::ResidueTuple { bases, modulus },
            inputs,
            theorem: "power-sum-theta-threshold",
        });
    }
    let missing = missing_classes(n, k);
    if missing.is_empty() {
        return Ok(unknown(
            inputs,
            format!("4k + 1 >= n with k = {k}, so no valuation class is excluded"),
        ));
    }
    Ok(Verdict {
        status: Status::NotDense,
        reason: Reason::MissingValuationClass {
            theta: th,
            modulus,
            k,
        },
        certificate: Certificate::MissingResidueClasses {
            n,
            allowed: (-2 * k as i64..=2 * k as i64).collect(),
            missing,
        },
        inputs,
        theorem: "power-sum-valuation-obstruction",
    })
}

fn unknown(inputs: Inputs, hypothesis: String) -> Verdict {
    Verdict {
        status: Status::Unknown,
        reason: Reason::OutOfTheoremScope { hypothesis },
        certificate: Certificate::None,
        inputs,
        theorem: "out-of-scope",
    }
}

/// Density of `R(S_2^n)`: dense exactly when `-1` is an nth power mod `p^(2k+1)`.
///
/// The answer is cross-checked against [`decide_power_sum`] with `m = 2`;
/// disagreement is reported as [`Error::Inconsistent`].
pub fn decide_s2(n: u64, p: u64) -> Result<Verdict> {
    let test = is_neg1_nth_power(n, p)?;
    let general = decide_power_sum(2, n, p)?;
    let inputs = Inputs::TwoSummands { n, p };
    let verdict = match test.witness {
        Some(w) => Verdict {
            status: Status::Dense,
            reason: Reason::ThetaThreshold {
                theta: 2,
                modulus: test.modulus,
                m: 2,
            },
            certificate: Certificate::ResidueTuple {
                bases: vec![1, w],
                modulus: test.modulus,
            },
            inputs,
            theorem: "two-summands-neg-one-power",
        },
        None => Verdict {
            status: Status::NotDense,
            inputs,
            theorem: "two-summands-neg-one-power",
            ..general.clone()
        },
    };
    if verdict.status != general.status {
        return Err(Error::Inconsistent(format!(
            "n = {n}, p = {p}: -1 test says {:?}, theta route says {:?}",
            verdict.status, general.status
        )));
    }
    Ok(verdict)
}

/// Density of `R_f = {f(a)/f(b)}` for `1 <= deg f <= 2`: dense exactly when
/// `f` has a simple zero in Z_p.
pub fn decide_poly_deg_le2(f: &DensePoly, p: u64) -> Result<Verdict> {
    check_prime(p)?;
    let deg = f.degree().unwrap_or(0);
    if !(1..=2).contains(&deg) {
        return Err(Error::invalid(format!("expected degree 1 or 2, got {deg}")));
    }
    let inputs = Inputs::Polynomial {
        poly: f.to_string(),
        p,
    };
    let (status, reason, certificate, theorem) = match simple_zero_deg_le2(f, p)? {
        SimpleZero::Yes { root_valuation } => {
            let certificate = quadratic_seed(f, p).map_or_else(
                || Certificate::SquareDiscriminant {
                    discriminant: discriminant_of(f),
                    root_valuation,
                },
                Certificate::HenselSeed,
            );
            (
                Status::Dense,
                Reason::SimpleZero,
                certificate,
                "quadratic-simple-zero",
            )
        }
        SimpleZero::DoubleRoot => (
            Status::NotDense,
            Reason::GcdMultiplicity { gcd: 2 },
            Certificate::Divisor { n: 2 },
            "quadratic-double-root",
        ),
        SimpleZero::NoZero => {
            let certificate = no_root_level(f, p, DEFAULT_POLY_BUDGET)?
                .map_or(Certificate::None, |level| Certificate::NoRootModulo {
                    level,
                });
            (
                Status::NotDense,
                Reason::NoZeroInZp,
                certificate,
                "quadratic-simple-zero",
            )
        }
    };
    Ok(Verdict {
        status,
        reason,
        certificate,
        inputs,
        theorem,
    })
}

/// Seed for the simple root: residues agreeing with it modulo `p^(d+1)`,
/// `d = nu_p(f'(root))`, already meet the Hensel gap.
fn quadratic_seed(f: &DensePoly, p: u64) -> Option<HenselSeed> {
    let d = simple_root_derivative_valuation(f, p)?;
    find_hensel_seed(f, p, d as u32 + 1, DEFAULT_POLY_BUDGET)
        .ok()
        .flatten()
}

/// Least level whose residue scan shows `f` has no root mod `p^level`.
fn no_root_level(f: &DensePoly, p: u64, budget: u64) -> Result<Option<u32>> {
    let mut level = 1;
    while checked_pow(p, level).is_some_and(|q| q <= budget) {
        if !has_zero_mod(f, p, level, budget)? {
            return Ok(Some(level));
        }
        level += 1;
    }
    Ok(None)
}

/// Density of `R_f` for a dense integer polynomial of any positive degree.
///
/// Degrees 1 and 2 are decided exactly. Above that, a Hensel seed proves
/// density and the absence of roots mod `p^level` proves the opposite;
/// anything else is Unknown.
pub fn decide_dense_poly(f: &DensePoly, p: u64, budget: u64) -> Result<Verdict> {
    check_prime(p)?;
    match f.degree() {
        None | Some(0) => return Err(Error::invalid("polynomial must have positive degree")),
        Some(1) | Some(2) => return decide_poly_deg_le2(f, p),
        _ => {}
    }
    let inputs = Inputs::Polynomial {
        poly: f.to_string(),
        p,
    };
    let mut level = 1;
    while checked_pow(p, level).is_some_and(|q| q <= budget) {
        if !has_zero_mod(f, p, level, budget)? {
            return Ok(Verdict {
                status: Status::NotDense,
                reason: Reason::NoZeroInZp,
                certificate: Certificate::NoRootModulo { level },
                inputs,
                theorem: "no-zero-bounded-valuation",
            });
        }
        if let Some(seed) = find_hensel_seed(f, p, level, budget)? {
            return Ok(Verdict {
                status: Status::Dense,
                reason: Reason::SimpleZero,
                certificate: Certificate::HenselSeed(seed),
                inputs,
                theorem: "simple-zero-density",
            });
        }
        level += 1;
    }
    Ok(unknown(
        inputs,
        format!(
            "no Hensel seed and roots persist modulo p^{} (scan budget {budget})",
            level - 1
        ),
    ))
}

/// Splitting polynomials from their multiplicity profile.
///
/// A coprime pair of multiplicities gives density at any degree. A common
/// divisor `n > 1` rules it out when the cofactor has constant valuation.
/// Below degree 31 one of the two always applies; from degree 31 on, a
/// profile with gcd 1 but no coprime pair is Unknown.
pub fn decide_split_poly(
    profile: &[u32],
    p: u64,
    constant_valuation_cofactor: bool,
) -> Result<Verdict> {
    check_prime(p)?;
    if profile.is_empty() {
        return Err(Error::invalid("multiplicity profile is empty"));
    }
    if profile.contains(&0) {
        return Err(Error::invalid("multiplicities must be positive"));
    }
    let inputs = Inputs::SplitProfile {
        multiplicities: profile.to_vec(),
        p,
        constant_valuation_cofactor,
    };
    for i in 0..profile.len() {
        for j in i..profile.len() {
            // a simple root pairs with itself
            if (i != j || profile[i] == 1) && profile[i].gcd(&profile[j]) == 1 {
                return Ok(Verdict {
                    status: Status::Dense,
                    reason: Reason::GcdMultiplicity { gcd: 1 },
                    certificate: Certificate::CoprimePair {
                        i,
                        j,
                        mu_i: profile[i],
                        mu_j: profile[j],
                    },
                    inputs,
                    theorem: "split-coprime-pair",
                });
            }
        }
    }
    let g = profile.iter().fold(0u32, |acc, &mu| acc.gcd(&mu));
    if g > 1 {
        if !constant_valuation_cofactor {
            return Ok(unknown(
                inputs,
                "cofactor valuation is not constant on Z_p".to_string(),
            ));
        }
        return Ok(Verdict {
            status: Status::NotDense,
            reason: Reason::GcdMultiplicity { gcd: g },
            certificate: Certificate::Divisor { n: g },
            inputs,
            theorem: "split-multiplicity-gcd",
        });
    }
    let degree: u32 = profile.iter().sum();
    Ok(unknown(
        inputs,
        format!("multiplicities have gcd 1 but no coprime pair (degree {degree} >= 31)"),
    ))
}

/// Whether `nu_p(h(x))` is the same for every `x` in Z_p.
pub fn cofactor_has_constant_valuation(h: &DensePoly, p: u64) -> Result<bool> {
    check_prime(p)?;
    if h.degree().unwrap_or(0) == 0 {
        return Ok(!h.is_zero());
    }
    let pb = BigInt::from(p);
    let content = h.coeffs().iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let (c, _) = split_p(&content, &pb);
    let scale = pb.pow(c as u32);
    let reduced = DensePoly::new(h.coeffs().iter().map(|x| x / &scale).collect());
    // a root-free reduction mod p makes every value a unit times p^c
    Ok(!has_zero_mod(&reduced, p, 1, u64::MAX)?)
}

/// [`decide_split_poly`] for a factored polynomial.
pub fn decide_factored(f: &FactoredPoly, p: u64) -> Result<Verdict> {
    let constant = cofactor_has_constant_valuation(f.cofactor(), p)?;
    decide_split_poly(&f.multiplicities(), p, constant)
}

/// Verdict for any parsed polynomial.
pub fn decide_poly(f: &PolyInput, p: u64, budget: u64) -> Result<Verdict> {
    match f {
        PolyInput::Factored(fp) => decide_factored(fp, p),
        PolyInput::Dense(d) => decide_dense_poly(d, p, budget),
    }
}

/// Valuations of `f(1..=x_max)` and which differences of them occur.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValuationSpectrum {
    pub p: u64,
    pub x_max: u64,
    /// Valuation -> number of `x` attaining it.
    pub counts: BTreeMap<i64, u64>,
    /// Arguments with `f(x) = 0`.
    pub zeros: Vec<u64>,
    /// All `nu_p(f(a)) - nu_p(f(b))` over nonzero values.
    pub differences: BTreeSet<i64>,
    pub modulus: u64,
    /// Residues mod `modulus` hit by some difference.
    pub classes_hit: Vec<u64>,
    pub classes_missed: Vec<u64>,
}

impl ValuationSpectrum {
    pub fn has_difference(&self, d: i64) -> bool {
        self.differences.contains(&d)
    }
}

/// Spectrum of `nu_p(f(x))` for `x = 1..=x_max`, computed factor by factor.
pub fn valuation_spectrum(
    f: &FactoredPoly,
    p: u64,
    x_max: u64,
    modulus: u64,
    budget: u64,
) -> Result<ValuationSpectrum> {
    check_prime(p)?;
    if modulus == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    if x_max > budget {
        return Err(Error::BudgetExceeded {
            what: "valuation spectrum",
            needed: x_max as u128,
            budget: budget as u128,
        });
    }
    let pb = BigInt::from(p);
    let base = vp_raw(f.leading(), &pb)
        .finite()
        .expect("leading coefficient nonzero");
    let constant_cofactor = f.cofactor().degree() == Some(0);
    let base = base
        + if constant_cofactor {
            vp_raw(&f.cofactor().coeffs()[0], &pb)
                .finite()
                .expect("cofactor nonzero")
        } else {
            0
        };
    let mut counts = BTreeMap::new();
    let mut zeros = Vec::new();
    'x: for x in 1..=x_max {
        let xb = BigInt::from(x);
        let mut v = base;
        for fac in f.factors() {
            match vp_raw(&(&xb - &fac.root), &pb) {
                Valuation::Finite(e) => v += e * fac.multiplicity as i64,
                Valuation::Infinite => {
                    zeros.push(x);
                    continue 'x;
                }
            }
        }
        if !constant_cofactor {
            match vp_raw(&f.cofactor().eval(&xb), &pb) {
                Valuation::Finite(e) => v += e,
                Valuation::Infinite => {
                    zeros.push(x);
                    continue 'x;
                }
            }
        }
        *counts.entry(v).or_insert(0) += 1;
    }
    let differences: BTreeSet<i64> = counts
        .keys()
        .flat_map(|a| counts.keys().map(move |b| a - b))
        .collect();
    let hit: BTreeSet<u64> = differences
        .iter()
        .map(|d| d.rem_euclid(modulus as i64) as u64)
        .collect();
    Ok(ValuationSpectrum {
        p,
        x_max,
        counts,
        zeros,
        differences,
        modulus,
        classes_hit: hit.iter().copied().collect(),
        classes_missed: (0..modulus).filter(|r| !hit.contains(r)).collect(),
    })
}

/// The cylinder `2^(n v) (j + 4n Z_2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwoAdicCylinder {
    pub v: u64,
    pub j: u64,
    pub modulus: u64,
}

fn check_closure_exponent(n: u64) -> Result<u32> {
    match n {
        4 | 8 | 16 => Ok(n.trailing_zeros() + 2),
        _ => Err(Error::invalid(format!(
            "closure exponent must be 4, 8 or 16, got {n}"
        ))),
    }
}

/// Cylinder of `T_m^n` containing every 2-adic number of valuation `s` and
/// unit part `unit` mod `2^level`, if any. `level = nu_2(4n) <= n`, so only
/// the offsets `s mod n` and `s mod n + n` can give distinct residues.
fn cylinder_for(s: u64, unit: u64, m: u64, n: u64, level: u32) -> Option<TwoAdicCylinder> {
    let modulus = 1u64 << level;
    let t0 = s % n;
    let candidates = [Some(t0), (s >= t0 + n).then_some(t0 + n)];
    candidates.into_iter().flatten().find_map(|t| {
        let residue = if t >= level as u64 {
            0
        } else {
            (unit << t) % modulus
        };
        let j = if residue == 0 { modulus } else { residue };
        (j <= m).then_some(TwoAdicCylinder {
            v: (s - t) / n,
            j,
            modulus,
        })
    })
}

/// Whether a 2-adic integer lies in `T_m^n`, with the cylinder when it does.
///
/// Exact zero is a member without a cylinder. A value known only to be
/// zero modulo some power of two, or with fewer than `nu_2(4n)` known unit
/// digits, cannot be decided.
pub fn t_closure_membership(
    value: &PAdicNumber,
    m: u64,
    n: u64,
) -> Result<(bool, Option<TwoAdicCylinder>)> {
    let level = check_closure_exponent(n)?;
    if value.is_exact_zero() {
        return Ok((true, None));
    }
    if value.is_exhausted() || value.digits() < level {
        return Err(Error::PrecisionExhausted {
            context: format!("closure membership needs {level} known 2-adic digits"),
            needed: level,
        });
    }
    let s = match value.valuation() {
        Valuation::Finite(s) if s >= 0 => s as u64,
        _ => return Ok((false, None)),
    };
    let unit = value
        .unit()
        .expect("finite valuation has a unit")
        .mod_floor(&BigInt::from(1u64 << level))
        .to_u64()
        .expect("below 2^level");
    let cyl = cylinder_for(s, unit, m, n, level);
    Ok((cyl.is_some(), cyl))
}

/// Witness for `q = a / b` with `a, b` in `T_m^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioMembership {
    pub member: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numerator: Option<TwoAdicCylinder>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub denominator: Option<TwoAdicCylinder>,
}

/// `(nu_2(q), unit part of q mod 2^level)` for nonzero rational `q`.
fn two_adic_class(q: &Rational, level: u32) -> (i64, u64) {
    let two = BigInt::from(2);
    let (a, num) = split_p(q.numer(), &two);
    let (b, den) = split_p(q.denom(), &two);
    let modulus = BigInt::from(1u64 << level);
    let inv = den.extended_gcd(&modulus).x.mod_floor(&modulus);
    let unit = (num * inv)
        .mod_floor(&modulus)
        .to_u64()
        .expect("below 2^level");
    (a as i64 - b as i64, unit)
}

/// Whether `q` is a quotient of two nonzero elements of `T_m^n`.
///
/// Membership in `T_m^n` depends only on the valuation and the unit part
/// modulo `4n`, and is periodic in the valuation with period `n` once it
/// reaches `n`. Scanning denominators over `3n` consecutive valuations and
/// all odd units mod `4n` is therefore exhaustive.
pub fn t_ratio_membership(q: &Rational, m: u64, n: u64) -> Result<RatioMembership> {
    let level = check_closure_exponent(n)?;
    if q.is_zero() {
        return Err(Error::invalid("ratio must be nonzero"));
    }
    let (w, u) = two_adic_class(q, level);
    Ok(ratio_class_member(w, u, m, n, level))
}

fn ratio_class_member(w: i64, u: u64, m: u64, n: u64, level: u32) -> RatioMembership {
    let modulus = 1u64 << level;
    let start = (-w).max(0) as u64;
    for s2 in start..start + 3 * n {
        let s1 = (s2 as i64 + w) as u64;
        for u2 in (1..modulus).step_by(2) {
            let Some(den) = cylinder_for(s2, u2, m, n, level) else {
                continue;
            };
            if let Some(num) = cylinder_for(s1, u * u2 % modulus, m, n, level) {
                return RatioMembership {
                    member: true,
                    numerator: Some(num),
                    denominator: Some(den),
                };
            }
        }
    }
    RatioMembership {
        member: false,
        numerator: None,
        denominator: None,
    }
}

/// Whether every nonzero 2-adic number is a quotient of elements of `T_m^n`.
///
/// Quotient membership depends on the valuation only through its residue
/// mod `n` once it exceeds `2n` in absolute value, so valuations in
/// `[-3n, 3n]` cover every class.
pub fn t_ratios_cover_q2(m: u64, n: u64) -> Result<bool> {
    let level = check_closure_exponent(n)?;
    let n_i = n as i64;
    Ok((-3 * n_i..=3 * n_i).all(|w| {
        (1..1u64 << level)
            .step_by(2)
            .all(|u| ratio_class_member(w, u, m, n, level).member)
    }))
}

/// Least `m` for which quotients of `T_m^n` fill Q_2.
pub fn t_closure_threshold(n: u64) -> Result<u64> {
    check_closure_exponent(n)?;
    let mut m = 1;
    while !t_ratios_cover_q2(m, n)? {
        m += 1;
    }
    Ok(m)
}

/// `nu_2` of an integer, for callers checking closure examples.
pub fn two_adic_valuation(x: &BigInt) -> Valuation {
    vp_raw(x, &BigInt::from(2))
}
