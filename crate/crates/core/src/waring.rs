//! Waring numbers modulo `b`: `gamma(n, b)` (every residue is a sum of `g`
//! nth powers) and `theta(n, b)` (zero is a sum of `g` nth powers with a
//! base coprime to `b`), computed by breadth-first sumset layering over
//! bitsets of length `b`.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::{checked_pow, is_prime, pow_mod, vp_u64};

/// Largest modulus accepted by the layered search.
pub const MAX_MODULUS: u64 = 10_000_000;

/// Cap on the bytes held by stored sumset layers.
const LAYER_MEMORY_BUDGET: u128 = 1 << 30;

fn check_modulus(b: u64) -> Result<()> {
    if b < 2 {
        return Err(Error::invalid(format!(
            "modulus must be at least 2, got {b}"
        )));
    }
    if b > MAX_MODULUS {
        return Err(Error::BudgetExceeded {
            what: "sumset modulus",
            needed: b as u128,
            budget: MAX_MODULUS as u128,
        });
    }
    Ok(())
}

/// Fixed-length bitset with cyclic shift-or.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_full(&self) -> bool {
        self.count() == self.len
    }

    #[cfg(test)]
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }

    /// Bits `pos..pos+64` of the set, zero past the end.
    fn read64(&self, pos: usize) -> u64 {
        let (w, s) = (pos / 64, pos % 64);
        let lo = self.words.get(w).copied().unwrap_or(0) >> s;
        if s == 0 {
            return lo;
        }
        let hi = self.words.get(w + 1).copied().unwrap_or(0) << (64 - s);
        lo | hi
    }

    /// ORs the low `nbits` of `val` into bits starting at `pos`.
    fn or64(&mut self, pos: usize, val: u64, nbits: usize) {
        let val = if nbits < 64 {
            val & ((1u64 << nbits) - 1)
        } else {
            val
        };
        let (w, s) = (pos / 64, pos % 64);
        self.words[w] |= val << s;
        if s != 0 && s + nbits > 64 {
            self.words[w + 1] |= val >> (64 - s);
        }
    }

    /// ORs `src[src_pos..src_pos+count]` into `self[dst_pos..]`.
    fn or_range(&mut self, dst_pos: usize, src: &BitSet, src_pos: usize, count: usize) {
        let mut done = 0;
        while done < count {
            let nbits = (count - done).min(64);
            let v = src.read64(src_pos + done);
            self.or64(dst_pos + done, v, nbits);
            done += nbits;
        }
    }

    /// `self |= { (i + shift) mod len : i in src }`.
    fn or_rotated(&mut self, src: &BitSet, shift: usize) {
        let shift = shift % self.len;
        self.or_range(shift, src, 0, self.len - shift);
        self.or_range(0, src, self.len - shift, shift);
    }
}

/// `{x^n mod b : x in Z/b}`, sorted.
pub fn nth_power_residues(n: u64, b: u64) -> Vec<u64> {
    residues_where(n, b, |_| true)
}

/// `{x^n mod b : gcd(x, b) = 1}`, sorted.
pub fn unit_nth_power_residues(n: u64, b: u64) -> Vec<u64> {
    residues_where(n, b, |x| x.gcd(&b) == 1)
}

fn residues_where(n: u64, b: u64, keep: impl Fn(u64) -> bool) -> Vec<u64> {
    let mut seen = vec![false; b as usize];
    for x in (0..b).filter(|&x| keep(x)) {
        seen[pow_mod(x, n, b) as usize] = true;
    }
    seen.iter()
        .enumerate()
        .filter_map(|(r, &s)| s.then_some(r as u64))
        .collect()
}

/// `S_0 = {0}`, `S_{g+1} = S_g + {x^n}` over Z/b.
struct Layers {
    n: u64,
    b: u64,
    powers: Vec<u64>,
    layers: Vec<BitSet>,
}

impl Layers {
    fn new(n: u64, b: u64) -> Self {
        let mut zero = BitSet::new(b as usize);
        zero.insert(0);
        Layers {
            n,
            b,
            powers: nth_power_residues(n, b),
            layers: vec![zero],
        }
    }

    fn last(&self) -> &BitSet {
        self.layers.last().expect("S_0 always present")
    }

    fn push_next(&mut self) -> Result<()> {
        let stored = (self.layers.len() as u128 + 1) * (self.b as u128) / 8;
        if stored > LAYER_MEMORY_BUDGET {
            return Err(Error::BudgetExceeded {
                what: "sumset layer memory (bytes)",
                needed: stored,
                budget: LAYER_MEMORY_BUDGET,
            });
        }
        let prev = self.last();
        let mut next = BitSet::new(self.b as usize);
        for &r in &self.powers {
            next.or_rotated(prev, r as usize);
        }
        self.layers.push(next);
        Ok(())
    }

    fn ensure(&mut self, g: usize) -> Result<()> {
        while self.layers.len() <= g {
            self.push_next()?;
        }
        Ok(())
    }

    /// Lexicographically smallest bases `(x_1..x_g)` with `sum x_i^n = target`,
    /// the first base restricted by `first`.
    fn representation(
        &self,
        target: u64,
        g: usize,
        first: impl Fn(u64) -> bool,
    ) -> Option<Vec<u64>> {
        let (n, b) = (self.n, self.b);
        let mut out = Vec::with_capacity(g);
        let mut t = target % b;
        for pos in 0..g {
            let rest = &self.layers[g - pos - 1];
            let x = (0..b)
                .filter(|&x| pos > 0 || first(x))
                .find(|&x| rest.contains(((t + b - pow_mod(x, n, b)) % b) as usize))?;
            t = (t + b - pow_mod(x, n, b)) % b;
            out.push(x);
        }
        debug_assert_eq!(t, 0);
        Some(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Theta,
    Gamma,
}

/// Outcome of a `theta` or `gamma` search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WaringResult {
    pub quantity: Quantity,
    pub n: u64,
    pub modulus: u64,
    pub cap: u64,
    /// `None` when the search reached `cap` without success.
    pub value: Option<u64>,
    /// For theta: bases `(x_1..x_g)` with `sum x_i^n = 0 mod b` and `gcd(x_1, b) = 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<u64>>,
    /// For gamma not found within cap: residues still unreachable.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub unreached: Vec<u64>,
}

impl WaringResult {
    pub fn found(&self) -> bool {
        self.value.is_some()
    }

    /// Re-checks a theta certificate by direct modular evaluation.
    pub fn certificate_holds(&self) -> bool {
        match (&self.certificate, self.value) {
            (Some(xs), Some(g)) => {
                verify_theta_tuple(self.n, self.modulus, xs) && xs.len() as u64 == g
            }
            (None, _) => self.quantity == Quantity::Gamma,
            _ => false,
        }
    }
}

/// `sum x_i^n = 0 mod b` and the first base is a unit mod `b`.
pub fn verify_theta_tuple(n: u64, b: u64, xs: &[u64]) -> bool {
    let Some(&first) = xs.first() else {
        return false;
    };
    let sum = xs.iter().fold(0u64, |acc, &x| (acc + pow_mod(x, n, b)) % b);
    sum == 0 && first.gcd(&b) == 1
}

fn check_cap(cap: u64) -> Result<()> {
    if cap == 0 {
        Err(Error::invalid("cap must be at least 1"))
    } else {
        Ok(())
    }
}

/// Least `g <= cap` such that every residue mod `b` is a sum of `g` nth powers.
pub fn gamma(n: u64, b: u64, cap: u64) -> Result<WaringResult> {
    check_modulus(b)?;
    check_cap(cap)?;
    let mut layers = Layers::new(n, b);
    let mut value = None;
    for g in 1..=cap {
        layers.push_next()?;
        // layers are monotone, so only the newest needs storing for gamma
        if layers.layers.len() > 2 {
            layers.layers.remove(1);
        }
        if layers.last().is_full() {
            value = Some(g);
            break;
        }
    }
    let unreached = match value {
        Some(_) => Vec::new(),
        None => (0..b)
            .filter(|&r| !layers.last().contains(r as usize))
            .collect(),
    };
    Ok(WaringResult {
        quantity: Quantity::Gamma,
        n,
        modulus: b,
        cap,
        value,
        certificate: None,
        unreached,
    })
}

/// Lexicographically smallest bases `(x_1..x_g)` with `sum x_i^n = a mod b`.
pub fn waring_representation(n: u64, b: u64, a: u64, g: u64) -> Result<Option<Vec<u64>>> {
    check_modulus(b)?;
    let mut layers = Layers::new(n, b);
    layers.ensure(g as usize)?;
    if !layers.layers[g as usize].contains((a % b) as usize) {
        return Ok(None);
    }
    Ok(layers.representation(a, g as usize, |_| true))
}

/// Least `g <= cap` such that zero is a sum of `g` nth powers mod `b` with
/// at least one base coprime to `b`; the certificate puts that base first.
pub fn theta(n: u64, b: u64, cap: u64) -> Result<WaringResult> {
    check_modulus(b)?;
    check_cap(cap)?;
    let units = unit_nth_power_residues(n, b);
    let mut layers = Layers::new(n, b);
    let mut value = None;
    for g in 1..=cap {
        // U_g = units + S_{g-1}; zero in U_g iff -u in S_{g-1} for a unit power u
        let prev = layers.last();
        if units.iter().any(|&u| prev.contains(((b - u) % b) as usize)) {
            value = Some(g);
            break;
        }
        if g < cap {
            layers.push_next()?;
        }
    }
    let certificate = value.and_then(|g| layers.representation(0, g as usize, |x| x.gcd(&b) == 1));
    Ok(WaringResult {
        quantity: Quantity::Theta,
        n,
        modulus: b,
        cap,
        value,
        certificate,
        unreached: Vec::new(),
    })
}

/// Whether `-1` is an nth power modulo `p^(2k+1)`, `k = nu_p(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NegOneTest {
    pub n: u64,
    pub p: u64,
    pub k: u32,
    pub modulus: u64,
    /// Smallest `x` with `x^n = -1 mod p^(2k+1)`.
    pub witness: Option<u64>,
}

impl NegOneTest {
    pub fn holds(&self) -> bool {
        self.witness.is_some()
    }
}

pub fn is_neg1_nth_power(n: u64, p: u64) -> Result<NegOneTest> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n < 2 {
        return Err(Error::invalid(format!(
            "exponent must be at least 2, got {n}"
        )));
    }
    let k = vp_u64(n, p);
    let modulus = checked_pow(p, 2 * k + 1)
        .filter(|&q| q <= MAX_MODULUS)
        .ok_or(Error::BudgetExceeded {
            what: "nth power residue scan",
            needed: (p as u128).saturating_pow(2 * k + 1),
            budget: MAX_MODULUS as u128,
        })?;
    let witness = (1..modulus)
        .filter(|x| x % p != 0)
        .find(|&x| pow_mod(x, n, modulus) == modulus - 1);
    Ok(NegOneTest {
        n,
        p,
        k,
        modulus,
        witness,
    })
}
