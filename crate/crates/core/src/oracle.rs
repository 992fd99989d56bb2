//! Brute-force ground truth used to cross-check the decision procedures.
//!
//! Nothing here calls into the modules it checks: powers, valuations and
//! modular arithmetic are recomputed with separate, deliberately naive code.
//! Every scan has a budget; running out is an error, never a negative answer.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::Rational;

/// Default cap on enumerated set sizes and visited tuples.
pub const DEFAULT_ORACLE_BUDGET: u64 = 50_000_000;

fn over_budget(what: &'static str, needed: u128, budget: u64) -> Error {
    Error::BudgetExceeded {
        what,
        needed,
        budget: budget as u128,
    }
}

fn naive_pow_mod(x: u64, n: u64, b: u64) -> u64 {
    let mut acc = 1 % b as u128;
    for _ in 0..n {
        acc = acc * x as u128 % b as u128;
    }
    acc as u64
}

fn naive_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exponent of `p` in a nonzero integer.
fn big_valuation(x: &BigInt, p: u64) -> i64 {
    debug_assert!(!x.is_zero());
    let mut v = 0;
    let mut cur = x.magnitude().clone();
    let pb = BigUint::from(p);
    while (&cur % &pb).is_zero() {
        cur /= &pb;
        v += 1;
    }
    v
}

fn small_valuation(mut x: u64, p: u64) -> u64 {
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Sorted, deduplicated `{x_1^n + ... + x_m^n : 0 <= x_i <= x_bound}`.
///
/// Built by `m` rounds of a k-way sorted merge of shifted copies.
pub fn enumerate_power_sums(m: u32, n: u32, x_bound: u64, budget: u64) -> Result<Vec<BigUint>> {
    if m == 0 {
        return Ok(vec![BigUint::zero()]);
    }
    let powers: Vec<BigUint> = (0..=x_bound).map(|x| BigUint::from(x).pow(n)).collect();
    let mut current = vec![BigUint::zero()];
    for _ in 0..m {
        let candidates = current.len() as u128 * powers.len() as u128;
        if candidates > budget as u128 {
            return Err(over_budget("power-sum enumeration", candidates, budget));
        }
        let mut heap: BinaryHeap<Reverse<(BigUint, usize, usize)>> = powers
            .iter()
            .enumerate()
            .map(|(i, pw)| Reverse((&current[0] + pw, i, 0)))
            .collect();
        let mut next: Vec<BigUint> = Vec::new();
        while let Some(Reverse((value, i, j))) = heap.pop() {
            if next.last() != Some(&value) {
                next.push(value);
            }
            if j + 1 < current.len() {
                heap.push(Reverse((&current[j + 1] + &powers[i], i, j + 1)));
            }
        }
        current = next;
    }
    Ok(current)
}

/// Sorted `{s in S_m^n : s <= limit}` over machine integers.
pub fn power_sums_up_to(m: u32, n: u32, limit: u64, budget: u64) -> Result<Vec<u64>> {
    let mut powers = Vec::new();
    for x in 0u64.. {
        match x.checked_pow(n) {
            Some(v) if v <= limit => powers.push(v),
            _ => break,
        }
    }
    let mut reach = vec![false; limit as usize + 1];
    reach[0] = true;
    let mut visited: u128 = 0;
    for _ in 0..m {
        let current: Vec<u64> = (0..=limit).filter(|&s| reach[s as usize]).collect();
        visited += current.len() as u128 * powers.len() as u128;
        if visited > budget as u128 {
            return Err(over_budget(
                "bounded power-sum enumeration",
                visited,
                budget,
            ));
        }
        let mut next = vec![false; limit as usize + 1];
        for &s in &current {
            for &pw in &powers {
                if s + pw > limit {
                    break;
                }
                next[(s + pw) as usize] = true;
            }
        }
        reach = next;
    }
    Ok((0..=limit).filter(|&s| reach[s as usize]).collect())
}

/// Every valuation `nu_p(a/b)` with `a, b` nonzero elements of `values`.
pub fn quotient_valuations(values: &[u64], p: u64) -> BTreeSet<i64> {
    let vals: BTreeSet<i64> = values
        .iter()
        .filter(|&&v| v != 0)
        .map(|&v| small_valuation(v, p) as i64)
        .collect();
    vals.iter()
        .flat_map(|a| vals.iter().map(move |b| a - b))
        .collect()
}

/// First pair `(a, b)` in scan order with `nu_p(a/b - r) > u`, `b != 0`.
pub fn ratio_ball_hit(
    values: &[BigUint],
    r: &Rational,
    p: u64,
    u: i64,
) -> Option<(BigUint, BigUint)> {
    let (rn, rd) = (r.numer(), r.denom());
    for a in values {
        let a_int = BigInt::from_biguint(Sign::Plus, a.clone());
        for b in values.iter().filter(|b| !b.is_zero()) {
            let b_int = BigInt::from_biguint(Sign::Plus, b.clone());
            // a/b - r = (a rd - b rn) / (b rd)
            let num = &a_int * rd - &b_int * rn;
            if num.is_zero() {
                return Some((a.clone(), b.clone()));
            }
            let v = big_valuation(&num, p) - big_valuation(&(&b_int * rd), p);
            if v > u {
                return Some((a.clone(), b.clone()));
            }
        }
    }
    None
}

/// Result of the exhaustive theta search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BruteTheta {
    pub n: u64,
    pub modulus: u64,
    pub g_max: u64,
    pub value: Option<u64>,
    /// Bases with the unit base first.
    pub bases: Option<Vec<u64>>,
    pub tuples_visited: u64,
}

/// `theta(n, b)` by exhaustive search over multisets of power residues.
pub fn brute_force_theta(n: u64, b: u64, g_max: u64, budget: u64) -> Result<BruteTheta> {
    if b < 2 {
        return Err(Error::invalid(format!(
            "modulus must be at least 2, got {b}"
        )));
    }
    if b > 1 << 24 {
        return Err(over_budget("oracle modulus", b as u128, 1 << 24));
    }
    // smallest base for each residue, and smallest unit base for each unit residue
    let mut base_of: Vec<Option<u64>> = vec![None; b as usize];
    let mut unit_base_of: Vec<Option<u64>> = vec![None; b as usize];
    for x in 0..b {
        let r = naive_pow_mod(x, n, b) as usize;
        base_of[r].get_or_insert(x);
        if naive_gcd(x, b) == 1 {
            unit_base_of[r].get_or_insert(x);
        }
    }
    let residues: Vec<u64> = (0..b).filter(|&r| base_of[r as usize].is_some()).collect();

    let mut visited = 0u64;
    for g in 1..=g_max {
        let mut chosen = Vec::with_capacity(g as usize - 1);
        let found = search_multisets(
            &residues,
            g as usize - 1,
            0,
            0,
            b,
            &mut chosen,
            &mut visited,
            budget,
            &|s| unit_base_of[((b - s) % b) as usize].is_some(),
        )?;
        if found {
            let sum = chosen.iter().fold(0, |acc, &r| (acc + r) % b);
            let mut bases = vec![unit_base_of[((b - sum) % b) as usize].expect("checked at leaf")];
            bases.extend(
                chosen
                    .iter()
                    .map(|&r| base_of[r as usize].expect("residue has a base")),
            );
            return Ok(BruteTheta {
                n,
                modulus: b,
                g_max,
                value: Some(g),
                bases: Some(bases),
                tuples_visited: visited,
            });
        }
    }
    Ok(BruteTheta {
        n,
        modulus: b,
        g_max,
        value: None,
        bases: None,
        tuples_visited: visited,
    })
}

/// Depth-first search over nondecreasing residue tuples of length `remaining`.
#[allow(clippy::too_many_arguments)]
fn search_multisets(
    residues: &[u64],
    remaining: usize,
    start: usize,
    sum: u64,
    b: u64,
    chosen: &mut Vec<u64>,
    visited: &mut u64,
    budget: u64,
    accept: &dyn Fn(u64) -> bool,
) -> Result<bool> {
    if remaining == 0 {
        *visited += 1;
        if *visited > budget {
            return Err(over_budget("theta tuple search", *visited as u128, budget));
        }
        return Ok(accept(sum));
    }
    for i in start..residues.len() {
        chosen.push(residues[i]);
        if search_multisets(
            residues,
            remaining - 1,
            i,
            (sum + residues[i]) % b,
            b,
            chosen,
            visited,
            budget,
            accept,
        )? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// `u64` view of a sorted big-integer sample, when every entry fits.
pub fn to_u64s(values: &[BigUint]) -> Option<Vec<u64>> {
    values.iter().map(ToPrimitive::to_u64).collect()
}
