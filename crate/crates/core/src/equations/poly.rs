//! Dense univariate polynomials over an exact coefficient ring.
//!
//! Nesting gives multivariate polynomials: `Poly<Poly<Q>>` is a polynomial
//! in an outer variable whose coefficients are polynomials in an inner one.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

/// Largest constant or leading coefficient whose divisors are enumerated
/// when looking for rational roots.
const ROOT_SEARCH_LIMIT: u64 = 1 << 40;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Commutative ring with unit and an embedding of the rationals.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_q(c: &Q) -> Self;

    fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

impl Ring for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_q(c: &Q) -> Self {
        c.clone()
    }
}

/// Coefficients low to high, without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly<C> {
    coeffs: Vec<C>,
}

impl<C: Ring> Poly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(Ring::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: C) -> Self {
        Poly::new(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: C, k: usize) -> Self {
        let mut coeffs = vec![C::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    pub fn var() -> Self {
        Poly::monomial(C::one(), 1)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn leading(&self) -> C {
        self.coeffs.last().cloned().unwrap_or_else(C::zero)
    }

    pub fn scale(&self, c: &C) -> Self {
        Poly::new(self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut coeffs = vec![C::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Remainder modulo `x^n`.
    pub fn truncate(&self, n: usize) -> Self {
        Poly::new(self.coeffs.iter().take(n).cloned().collect())
    }

    pub fn map<D: Ring>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.mul(&C::from_q(&q(k as i64))))
                .collect(),
        )
    }

    /// Evaluates at `x` in a ring `R` that the coefficients embed into.
    pub fn eval_in<R: Ring>(&self, x: &R, embed: impl Fn(&C) -> R) -> R {
        self.coeffs
            .iter()
            .rev()
            .fold(R::zero(), |acc, c| acc.mul(x).add(&embed(c)))
    }

    pub fn eval(&self, x: &C) -> C {
        self.eval_in(x, C::clone)
    }

    /// Product truncated modulo `x^n`.
    pub fn mul_trunc(&self, other: &Self, n: usize) -> Self {
        let len = (self.coeffs.len() + other.coeffs.len()).saturating_sub(1).min(n);
        let mut out = vec![C::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out)
    }
}

impl<C: Ring> Ring for Poly<C> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    fn one() -> Self {
        Poly::constant(C::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k).add(&other.coeff(k))).collect())
    }
    fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k).sub(&other.coeff(k))).collect())
    }
    fn mul(&self, other: &Self) -> Self {
        self.mul_trunc(other, usize::MAX)
    }
    fn neg(&self) -> Self {
        Poly::new(self.coeffs.iter().map(Ring::neg).collect())
    }
    fn from_q(c: &Q) -> Self {
        Poly::constant(C::from_q(c))
    }
}

/// Polynomial in one variable over the rationals.
pub type Poly1 = Poly<Q>;
/// Polynomial in `(z, u)`: outer variable `z`, coefficients in `u`.
pub type Poly2 = Poly<Poly1>;

/// Rational roots of a polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalRoots {
    /// Distinct rational roots in increasing order.
    pub roots: Vec<Q>,
    /// Whether the polynomial splits into rational linear factors.
    pub split: bool,
}

impl Poly1 {
    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn monic(&self) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let inv = self.leading().recip();
        self.scale(&inv)
    }

    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!Ring::is_zero(divisor), "division by the zero polynomial");
        let dd = divisor.degree().expect("nonzero");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![<Q as Zero>::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let c = &rem[top] / &lead;
            let shift = top - dd;
            for (k, dc) in divisor.coeffs.iter().enumerate() {
                rem[shift + k] = &rem[shift + k] - &c * dc;
            }
            quot[shift] = c;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic greatest common divisor; zero only when both inputs are zero.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !Ring::is_zero(&b) {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.degree().is_some_and(|d| d == 0 || self.gcd(&self.derivative()).degree() == Some(0))
    }

    /// Composition `self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        self.eval_in(other, |c| Poly::constant(c.clone()))
    }

    /// Rational roots via the rational root test. `None` when a coefficient
    /// is too large to enumerate its divisors.
    pub fn rational_roots(&self) -> Option<RationalRoots> {
        let deg = self.degree()?;
        // integer primitive form
        let den = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * Q::from_integer(den.clone())).to_integer()).collect();
        let low = ints.iter().position(|c| !c.is_zero()).expect("nonzero");
        let a0 = ints[low].abs();
        let an = ints[deg].abs();
        let mut found = BTreeSet::new();
        if low > 0 {
            found.insert(<Q as Zero>::zero());
        }
        for p in small_divisors(&a0)? {
            for qd in small_divisors(&an)? {
                for sign in [1i64, -1] {
                    let cand = Q::new(BigInt::from(p) * sign, BigInt::from(qd));
                    if Zero::is_zero(&self.eval(&cand)) {
                        found.insert(cand);
                    }
                }
            }
        }
        let mut rest = self.clone();
        for r in &found {
            let lin = Poly::new(vec![-r.clone(), <Q as One>::one()]);
            loop {
                let (qt, rm) = rest.div_rem(&lin);
                if !Ring::is_zero(&rm) {
                    break;
                }
                rest = qt;
            }
        }
        Some(RationalRoots {
            roots: found.into_iter().collect(),
            split: rest.degree() == Some(0),
        })
    }

    /// Renders with the given variable name, highest degree first.
    pub fn render(&self, var: &str) -> String {
        let terms: Vec<(Q, String)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !Zero::is_zero(*c))
            .map(|(k, c)| (c.clone(), monomial_name(&[(var, k)])))
            .collect();
        render_terms(&terms)
    }
}

impl Poly2 {
    /// `g(z, u)` from its `z`-coefficients.
    pub fn from_u_coeffs(b: Vec<Poly1>) -> Self {
        Poly::new(b)
    }

    pub fn render(&self) -> String {
        let mut terms = Vec::new();
        for (i, bi) in self.coeffs.iter().enumerate() {
            for (j, c) in bi.coeffs.iter().enumerate() {
                if !Zero::is_zero(c) {
                    terms.push((i + j, j, c.clone()));
                }
            }
        }
        // total degree first, then powers of u
        terms.sort_by(|a, b| (b.0, b.1).cmp(&(a.0, a.1)));
        let terms: Vec<(Q, String)> = terms
            .into_iter()
            .map(|(t, j, c)| (c, monomial_name(&[("u", j), ("z", t - j)])))
            .collect();
        render_terms(&terms)
    }

    /// Whether no coefficient depends on `u`.
    pub fn is_u_free(&self) -> bool {
        self.coeffs.iter().all(|c| c.degree().unwrap_or(0) == 0)
    }

    /// The `u`-free part as a polynomial in `z`.
    pub fn u_free_part(&self) -> Poly1 {
        Poly::new(self.coeffs.iter().map(|c| c.coeff(0)).collect())
    }
}

fn small_divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.to_u64().filter(|&n| n <= ROOT_SEARCH_LIMIT)?;
    let mut out = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            out.push(i);
            if i * i != n {
                out.push(n / i);
            }
        }
        i += 1;
    }
    out.sort_unstable();
    Some(out)
}

fn monomial_name(vars: &[(&str, usize)]) -> String {
    vars.iter()
        .filter(|(_, k)| *k > 0)
        .map(|(v, k)| if *k == 1 { v.to_string() } else { format!("{v}^{k}") })
        .collect::<Vec<_>>()
        .join("*")
}

fn render_terms(terms: &[(Q, String)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (c, mono)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        match (mono.is_empty(), a.is_one()) {
            (true, _) => out.push_str(&a.to_string()),
            (false, true) => out.push_str(mono),
            (false, false) => {
                out.push_str(&a.to_string());
                out.push('*');
                out.push_str(mono);
            }
        }
    }
    out
}

impl<C: Ring> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coeffs).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_normalization() {
        let a = Poly1::from_ints(&[-1, 0, 1]);
        let b = Poly1::from_ints(&[1, 1]);
        assert_eq!(a.mul(&a.sub(&a)), Poly1::zero());
        assert_eq!(Poly1::from_ints(&[1, 0, 0]).degree(), Some(0));
        let (qt, r) = a.div_rem(&b);
        assert_eq!(qt, Poly1::from_ints(&[-1, 1]));
        assert!(Ring::is_zero(&r));
        assert_eq!(a.gcd(&Poly1::from_ints(&[1, 2, 1])), b);
        assert_eq!(a.derivative(), Poly1::from_ints(&[0, 2]));
        assert_eq!(a.compose(&b), Poly1::from_ints(&[0, 2, 1]));
        assert_eq!(a.mul_trunc(&a, 3), Poly1::from_ints(&[1, 0, -2]));
    }

    #[test]
    fn squarefree_check() {
        assert!(Poly1::from_ints(&[-1, 0, 1]).is_squarefree());
        assert!(!Poly1::from_ints(&[0, 0, 1]).is_squarefree());
        assert!(Poly1::from_ints(&[1, 0, 1]).is_squarefree());
    }

    #[test]
    fn rational_roots() {
        let r = Poly1::from_ints(&[-1, 0, 1]).rational_roots().unwrap();
        assert_eq!(r.roots, vec![q(-1), q(1)]);
        assert!(r.split);
        let r = Poly1::from_ints(&[1, 0, 1]).rational_roots().unwrap();
        assert!(r.roots.is_empty() && !r.split);
        // (2x - 1)(x + 3) x^2
        let p = Poly1::from_ints(&[-1, 2]).mul(&Poly1::from_ints(&[3, 1])).shift(2);
        let r = p.rational_roots().unwrap();
        assert_eq!(r.roots, vec![q(-3), q(0), q_frac(1, 2)]);
        assert!(r.split);
        let r = Poly1::from_ints(&[-2, 0, 1]).mul(&Poly1::from_ints(&[-1, 1])).rational_roots().unwrap();
        assert_eq!(r.roots, vec![q(1)]);
        assert!(!r.split);
    }

    #[test]
    fn rendering() {
        assert_eq!(Poly1::from_ints(&[1, 0, -1]).render("u"), "-u^2 + 1");
        let g = Poly2::from_u_coeffs(vec![Poly1::from_ints(&[0, -1, 0, 1]), Poly1::from_ints(&[0, 1])]);
        assert_eq!(g.render(), "u^3 + u*z - u");
        assert_eq!(Poly2::zero().render(), "0");
    }
}
