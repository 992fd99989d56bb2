//! Integer polynomials in coefficient form and in factored form
//! `a * prod (X - z_i)^mu_i * h(X)`, plus the text grammar used by the CLI.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::{PAdicContext, PAdicNumber, Valuation};

/// Coefficient-form polynomial, constant term first. The zero polynomial has
/// no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DensePoly {
    coeffs: Vec<BigInt>,
}

impl DensePoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        DensePoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        DensePoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        DensePoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        DensePoly::new(vec![c])
    }

    /// `X - z`.
    pub fn linear_root(z: &BigInt) -> Self {
        DensePoly::new(vec![-z, BigInt::one()])
    }

    /// `X^n + c`.
    pub fn monomial_plus(n: usize, c: BigInt) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[0] += c;
        coeffs[n] += BigInt::one();
        DensePoly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval(&BigInt::from(x))
    }

    /// Horner evaluation in truncated arithmetic at a p-adic integer.
    pub fn eval_padic(&self, x: &PAdicNumber, ctx: &PAdicContext) -> Result<PAdicNumber> {
        if let Valuation::Finite(v) = x.valuation() {
            if v < 0 {
                return Err(Error::invalid(format!(
                    "evaluation point has negative valuation {v}"
                )));
            }
        }
        let mut acc = PAdicNumber::zero();
        for c in self.coeffs.iter().rev() {
            acc = ctx.add(&ctx.mul(&acc, x), &ctx.from_integer(c));
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> DensePoly {
        DensePoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn mul(&self, other: &DensePoly) -> DensePoly {
        if self.is_zero() || other.is_zero() {
            return DensePoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        DensePoly::new(out)
    }

    pub fn scale(&self, k: &BigInt) -> DensePoly {
        DensePoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, e: u32) -> DensePoly {
        (0..e).fold(DensePoly::constant(BigInt::one()), |acc, _| acc.mul(self))
    }

    /// Synthetic division by `X - z`: returns `(q, f(z))` with
    /// `f = (X - z) q + f(z)`.
    pub fn divide_by_linear(&self, z: &BigInt) -> (DensePoly, BigInt) {
        if self.coeffs.is_empty() {
            return (DensePoly::zero(), BigInt::zero());
        }
        let n = self.coeffs.len();
        let mut q = vec![BigInt::zero(); n - 1];
        let mut carry = BigInt::zero();
        for i in (0..n).rev() {
            carry = carry * z + &self.coeffs[i];
            if i > 0 {
                q[i - 1] = carry.clone();
            }
        }
        (DensePoly::new(q), carry)
    }
}

impl fmt::Display for DensePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        if self.coeffs.is_empty() {
            f.write_str("0")?;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

/// `leading * prod (X - root)^multiplicity * cofactor` with integer roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredPoly {
    leading: BigInt,
    factors: Vec<RootFactor>,
    cofactor: DensePoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootFactor {
    pub root: BigInt,
    pub multiplicity: u32,
}

impl FactoredPoly {
    pub fn new(leading: BigInt, factors: Vec<(BigInt, u32)>, cofactor: DensePoly) -> Result<Self> {
        if leading.is_zero() {
            return Err(Error::invalid("leading coefficient must be nonzero"));
        }
        if cofactor.is_zero() {
            return Err(Error::invalid("cofactor must be nonzero"));
        }
        let mut out: Vec<RootFactor> = Vec::with_capacity(factors.len());
        for (root, multiplicity) in factors {
            if multiplicity == 0 {
                return Err(Error::invalid(format!("root {root} has multiplicity 0")));
            }
            if out.iter().any(|f| f.root == root) {
                return Err(Error::invalid(format!("root {root} listed twice")));
            }
            if cofactor.eval(&root).is_zero() {
                return Err(Error::invalid(format!(
                    "cofactor vanishes at listed root {root}"
                )));
            }
            out.push(RootFactor { root, multiplicity });
        }
        Ok(FactoredPoly {
            leading,
            factors: out,
            cofactor,
        })
    }

    /// Monic product of linear factors, from `(root, multiplicity)` pairs.
    pub fn from_roots(roots: &[(i64, u32)]) -> Result<Self> {
        FactoredPoly::new(
            BigInt::one(),
            roots.iter().map(|&(z, m)| (BigInt::from(z), m)).collect(),
            DensePoly::constant(BigInt::one()),
        )
    }

    pub fn leading(&self) -> &BigInt {
        &self.leading
    }

    pub fn factors(&self) -> &[RootFactor] {
        &self.factors
    }

    pub fn cofactor(&self) -> &DensePoly {
        &self.cofactor
    }

    pub fn multiplicities(&self) -> Vec<u32> {
        self.factors.iter().map(|f| f.multiplicity).collect()
    }

    /// Whether the cofactor `h` is constant, so that `nu_p(h)` is constant.
    pub fn has_constant_cofactor(&self) -> bool {
        self.cofactor.degree() == Some(0)
    }

    pub fn degree(&self) -> usize {
        self.factors
            .iter()
            .map(|f| f.multiplicity as usize)
            .sum::<usize>()
            + self.cofactor.degree().unwrap_or(0)
    }

    pub fn expand(&self) -> DensePoly {
        self.expand_except(None)
    }

    fn expand_except(&self, skip: Option<usize>) -> DensePoly {
        let mut acc = self.cofactor.scale(&self.leading);
        for (i, f) in self.factors.iter().enumerate() {
            if Some(i) == skip {
                continue;
            }
            acc = acc.mul(&DensePoly::linear_root(&f.root).pow(f.multiplicity));
        }
        acc
    }

    /// Exact value through the factored form.
    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.factors
            .iter()
            .fold(&self.leading * self.cofactor.eval(x), |acc, f| {
                acc * num_traits::pow(x - &f.root, f.multiplicity as usize)
            })
    }

    /// `g_i = f / (X - z_i)^{mu_i}` and its value at `z_i`, which is nonzero.
    pub fn cofactor_at_root(&self, i: usize) -> Result<(DensePoly, BigInt)> {
        let root = &self
            .factors
            .get(i)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "factor index {i} out of range ({} factors)",
                    self.factors.len()
                ))
            })?
            .root;
        let g = self.expand_except(Some(i));
        let value = g.eval(root);
        debug_assert!(!value.is_zero());
        Ok((g, value))
    }
}

impl fmt::Display for FactoredPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.leading.is_one() {
            write!(f, "{}*", self.leading)?;
        }
        for fac in &self.factors {
            if fac.root.is_zero() {
                f.write_str("(X)")?;
            } else if fac.root.is_positive() {
                write!(f, "(X-{})", fac.root)?;
            } else {
                write!(f, "(X+{})", -&fac.root)?;
            }
            if fac.multiplicity != 1 {
                write!(f, "^{}", fac.multiplicity)?;
            }
        }
        if self.cofactor.degree() != Some(0) || !self.cofactor.coeffs()[0].is_one() {
            write!(f, "*{}", self.cofactor)?;
        }
        Ok(())
    }
}

/// A polynomial as written on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyInput {
    Dense(DensePoly),
    Factored(FactoredPoly),
}

impl PolyInput {
    pub fn to_dense(&self) -> DensePoly {
        match self {
            PolyInput::Dense(d) => d.clone(),
            PolyInput::Factored(f) => f.expand(),
        }
    }
}

/// Parses either `[c0,c1,...]` or `[a*](X+c)^e(X-d)...`.
pub fn parse_poly(input: &str) -> Result<PolyInput> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.starts_with('[') {
        parse_dense(&s).map(PolyInput::Dense)
    } else {
        parse_factored(&s).map(PolyInput::Factored)
    }
}

fn parse_dense(s: &str) -> Result<DensePoly> {
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected `[c0,c1,...]`, got `{s}`")))?;
    let coeffs = inner
        .split(',')
        .map(|t| {
            t.parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad coefficient `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensePoly::new(coeffs))
}

fn parse_factored(s: &str) -> Result<FactoredPoly> {
    let bytes = s.as_bytes();
    let mut pos = 0;
    let mut leading = BigInt::one();
    if let Some(star) = s.find('*') {
        leading = s[..star]
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad leading coefficient `{}`", &s[..star])))?;
        pos = star + 1;
    }
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let unsigned = |pos: &mut usize| -> Result<&str> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            return Err(Error::Parse(format!(
                "expected digits at offset {start} in `{s}`"
            )));
        }
        Ok(&s[start..*pos])
    };
    while pos < bytes.len() {
        if bytes[pos] != b'(' {
            return Err(Error::Parse(format!(
                "expected `(` at offset {pos} in `{s}`"
            )));
        }
        pos += 1;
        if pos >= bytes.len() || !matches!(bytes[pos], b'X' | b'x') {
            return Err(Error::Parse(format!(
                "expected `X` at offset {pos} in `{s}`"
            )));
        }
        pos += 1;
        let mut root = BigInt::zero();
        if pos < bytes.len() && matches!(bytes[pos], b'+' | b'-') {
            let sign = bytes[pos];
            pos += 1;
            let c: BigInt = unsigned(&mut pos)?.parse().expect("digits parse");
            root = if sign == b'+' { -c } else { c };
        }
        if pos >= bytes.len() || bytes[pos] != b')' {
            return Err(Error::Parse(format!(
                "expected `)` at offset {pos} in `{s}`"
            )));
        }
        pos += 1;
        let mut mult = 1u32;
        if pos < bytes.len() && bytes[pos] == b'^' {
            pos += 1;
            mult = unsigned(&mut pos)?
                .parse()
                .map_err(|_| Error::Parse("exponent out of range".into()))?;
        }
        match factors.iter_mut().find(|(z, _)| *z == root) {
            Some((_, m)) => *m += mult,
            None => factors.push((root, mult)),
        }
    }
    if factors.is_empty() {
        return Err(Error::Parse(format!("no linear factors in `{s}`")));
    }
    FactoredPoly::new(leading, factors, DensePoly::constant(BigInt::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn expand_examples() {
        let x = FactoredPoly::from_roots(&[(0, 1)]).unwrap();
        assert_eq!(x.expand(), DensePoly::from_i64s(&[0, 1]));
        let q = FactoredPoly::from_roots(&[(1, 1), (2, 1)]).unwrap();
        assert_eq!(q.expand(), DensePoly::from_i64s(&[2, -3, 1]));
        let f = FactoredPoly::from_roots(&[(-1, 6), (-2, 10), (-3, 15)]).unwrap();
        let d = f.expand();
        assert_eq!(d.degree(), Some(31));
        assert_eq!(d.leading(), Some(&int(1)));
        // constant term 1^6 * 2^10 * 3^15
        assert_eq!(d.coeffs()[0], int(1024) * int(14_348_907));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(DensePoly::from_i64s(&[0, -1, 1]).eval_i64(3), int(6));
        let cubes = DensePoly::monomial_plus(3, int(512));
        assert_eq!(cubes.eval_i64(1), int(513));
        let ninth = DensePoly::monomial_plus(9, num_traits::pow(int(26), 9));
        let v = crate::padic::vp_int(&ninth.eval_i64(1), 3).unwrap();
        assert!(v >= Valuation::Finite(5));
    }

    #[test]
    fn eval_padic_matches_integer_eval() {
        let ctx = PAdicContext::new(3, 12).unwrap();
        let f = DensePoly::from_i64s(&[5, 0, -7, 2]);
        for x in 0..40 {
            let exact = ctx.from_integer(&f.eval_i64(x));
            let trunc = f.eval_padic(&ctx.from_integer(&int(x)), &ctx).unwrap();
            assert_eq!(trunc.valuation(), exact.valuation(), "x = {x}");
        }
        let neg = ctx.from_rational(&crate::padic::Rational::new(int(1), int(3)));
        assert!(f.eval_padic(&neg, &ctx).is_err());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            DensePoly::monomial_plus(5, int(9)).derivative(),
            DensePoly::from_i64s(&[0, 0, 0, 0, 5])
        );
        assert!(DensePoly::from_i64s(&[7]).derivative().is_zero());
        assert_eq!(
            DensePoly::from_i64s(&[2, -3, 1]).derivative(),
            DensePoly::from_i64s(&[-3, 2])
        );
    }

    #[test]
    fn cofactor_examples() {
        let f = FactoredPoly::from_roots(&[(0, 1), (1, 1)]).unwrap();
        let (g, v) = f.cofactor_at_root(0).unwrap();
        assert_eq!(g, DensePoly::from_i64s(&[-1, 1]));
        assert_eq!(v, int(-1));

        let f = FactoredPoly::from_roots(&[(-1, 6), (-2, 10), (-3, 15)]).unwrap();
        let (_, v) = f.cofactor_at_root(0).unwrap();
        assert_eq!(v, int(32768));

        let f = FactoredPoly::new(int(3), vec![(int(2), 2)], DensePoly::from_i64s(&[1])).unwrap();
        let (g, v) = f.cofactor_at_root(0).unwrap();
        assert_eq!(g, DensePoly::from_i64s(&[3]));
        assert_eq!(v, int(3));
        assert!(f.cofactor_at_root(1).is_err());
    }

    #[test]
    fn factored_rejects_bad_input() {
        assert!(FactoredPoly::new(int(0), vec![(int(1), 1)], DensePoly::from_i64s(&[1])).is_err());
        assert!(FactoredPoly::new(int(1), vec![(int(1), 0)], DensePoly::from_i64s(&[1])).is_err());
        assert!(FactoredPoly::new(
            int(1),
            vec![(int(1), 1), (int(1), 2)],
            DensePoly::from_i64s(&[1])
        )
        .is_err());
        // cofactor X - 1 vanishes at the listed root 1
        assert!(
            FactoredPoly::new(int(1), vec![(int(1), 1)], DensePoly::from_i64s(&[-1, 1])).is_err()
        );
    }

    #[test]
    fn parse_grammar() {
        let f = match parse_poly("(X+1)^6(X+2)^10(X+3)^15").unwrap() {
            PolyInput::Factored(f) => f,
            other => panic!("expected factored, got {other:?}"),
        };
        assert_eq!(f.multiplicities(), vec![6, 10, 15]);
        assert_eq!(f.factors()[1].root, int(-2));
        assert_eq!(f.to_string(), "(X+1)^6(X+2)^10(X+3)^15");

        assert_eq!(
            parse_poly("[2,-3,1]").unwrap(),
            PolyInput::Dense(DensePoly::from_i64s(&[2, -3, 1]))
        );
        let g = match parse_poly("-3*(X)(X-4)^2(X)").unwrap() {
            PolyInput::Factored(f) => f,
            _ => unreachable!(),
        };
        assert_eq!(g.leading(), &int(-3));
        assert_eq!(g.multiplicities(), vec![2, 2]);
        assert_eq!(g.factors()[1].root, int(4));

        for bad in ["", "(Y+1)", "(X+)", "(X+1", "[1,,2]", "2*", "(X+1)^"] {
            assert!(parse_poly(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn synthetic_division() {
        let f = DensePoly::from_i64s(&[5, 0, -7, 2]);
        let z = int(4);
        let (q, r) = f.divide_by_linear(&z);
        assert_eq!(r, f.eval(&z));
        let back = q.mul(&DensePoly::linear_root(&z));
        let mut c = back.coeffs().to_vec();
        c[0] += &r;
        assert_eq!(DensePoly::new(c), f);
    }

    fn factored_strategy() -> impl Strategy<Value = (FactoredPoly, i64)> {
        (
            prop::collection::btree_map(-6i64..6, 1u32..4, 1..4),
            prop::sample::select(vec![-3i64, -1, 1, 2, 5]),
            -10i64..10,
        )
            .prop_map(|(roots, a, x)| {
                let roots: Vec<_> = roots.into_iter().map(|(z, m)| (int(z), m)).collect();
                (
                    FactoredPoly::new(int(a), roots, DensePoly::from_i64s(&[1])).unwrap(),
                    x,
                )
            })
    }

    proptest! {
        #[test]
        fn expand_agrees_with_factored_eval((f, x) in factored_strategy()) {
            prop_assert_eq!(f.expand().eval_i64(x), f.eval(&int(x)));
        }

        #[test]
        fn cofactor_times_power_is_f((f, _) in factored_strategy()) {
            for (i, fac) in f.factors().iter().enumerate() {
                let (g, v) = f.cofactor_at_root(i).unwrap();
                prop_assert!(!v.is_zero());
                prop_assert_eq!(g.mul(&DensePoly::linear_root(&fac.root).pow(fac.multiplicity)), f.expand());
            }
        }

        #[test]
        fn derivative_matches_leading_term(coeffs in prop::collection::vec(-20i64..20, 1..8)) {
            let f = DensePoly::from_i64s(&coeffs);
            let d = f.derivative();
            match f.degree() {
                None | Some(0) => prop_assert!(d.is_zero()),
                Some(n) => {
                    prop_assert_eq!(d.degree(), Some(n - 1));
                    prop_assert_eq!(d.leading().unwrap(), &(f.leading().unwrap() * BigInt::from(n)));
                }
            }
            // f(x+1) - f(x) equals the integral of f' over [x, x+1] for degree <= 2
            if f.degree().unwrap_or(0) <= 2 {
                for x in -5i64..5 {
                    let diff = f.eval_i64(x + 1) - f.eval_i64(x);
                    let two_diff = d.eval_i64(x) + d.eval_i64(x + 1);
                    prop_assert_eq!(diff * 2, two_diff);
                }
            }
        }
    }
}
