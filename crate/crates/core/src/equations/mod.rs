//! Danielewski-form equations `z^m t - g(z, u) = 0`, their trees, and
//! normal-form classification over the rationals.

pub mod parse;
pub mod poly;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::Serialize;
use serde_json::{json, Value};

use crate::divisors::GraphDivisor;
use crate::error::{Error, Result};
use crate::trees::gamma;
use poly::{q, Poly, Poly1, Poly2, Ring, Q};

/// `z^m t - (b_0(u) + b_1(u) z + ... + b_{m-1}(u) z^{m-1}) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DanielewskiForm {
    d: usize,
    m: usize,
    b: Vec<Poly1>,
}

impl DanielewskiForm {
    /// Missing `b_i` are zero.
    pub fn new(m: usize, mut b: Vec<Poly1>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidForm("m must be at least 1".into()));
        }
        if b.len() > m {
            return Err(Error::InvalidForm(format!("{} coefficients given for m = {m}", b.len())));
        }
        b.resize(m, Poly1::zero());
        let b0 = &b[0];
        let d = match b0.degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(Error::InvalidB0("b_0 must have positive degree".into())),
        };
        if !b0.is_monic() {
            return Err(Error::InvalidB0(format!("{} is not monic", b0.render("u"))));
        }
        if !b0.is_squarefree() {
            return Err(Error::InvalidB0(format!("{} is not squarefree", b0.render("u"))));
        }
        for (i, bi) in b.iter().enumerate().skip(1) {
            if bi.degree().is_some_and(|k| k >= d) {
                return Err(Error::InvalidForm(format!("deg b_{i} must be below {d}")));
            }
        }
        Ok(DanielewskiForm { d, m, b })
    }

    /// Reads `g` modulo `z^m`.
    pub fn from_poly2(m: usize, g: &Poly2) -> Result<Self> {
        DanielewskiForm::new(m, g.truncate(m).coeffs().to_vec())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn b(&self) -> &[Poly1] {
        &self.b
    }

    pub fn g(&self) -> Poly2 {
        Poly2::from_u_coeffs(self.b.clone())
    }

    pub fn equation(&self) -> Equation {
        Equation { m: self.m, g: self.g() }
    }

    /// Reads an equation literal or the JSON form `{"d","m","b"}`.
    pub fn parse(src: &str) -> Result<Self> {
        if src.trim_start().starts_with('{') {
            let value: Value = serde_json::from_str(src).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
            return DanielewskiForm::from_value(&value);
        }
        let (m, g) = parse::split_equation(&parse::parse_polynomial(src)?)?;
        DanielewskiForm::from_poly2(m, &g)
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let (d, m, g) = read_json_form(value)?;
        let form = DanielewskiForm::from_poly2(m, &g)?;
        if d.is_some_and(|d| d != form.d) {
            return Err(Error::InvalidForm(format!("declared d = {} but deg b_0 = {}", d.unwrap_or(0), form.d)));
        }
        Ok(form)
    }

    pub fn to_value(&self) -> Value {
        json!({
            "d": self.d,
            "m": self.m,
            "b": self.b.iter().map(poly_to_value).collect::<Vec<_>>(),
        })
    }
}

fn poly_to_value(p: &Poly1) -> Value {
    Value::Array(
        p.coeffs()
            .iter()
            .map(|c| match c.is_integer() {
                true => serde_json::from_str(&c.to_integer().to_string()).unwrap_or_else(|_| Value::String(c.to_string())),
                false => Value::String(c.to_string()),
            })
            .collect(),
    )
}

fn read_coefficient(v: &Value) -> Result<Q> {
    let bad = || Error::InvalidForm(format!("coefficient {v} is not an integer or a `p/q` string"));
    match v {
        Value::Number(n) => {
            let s = n.to_string();
            s.parse::<BigInt>().map(Q::from_integer).map_err(|_| bad())
        }
        Value::String(s) => {
            let (num, den) = s.split_once('/').unwrap_or((s, "1"));
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if num_traits::Zero::is_zero(&den) {
                return Err(bad());
            }
            Ok(Q::new(num, den))
        }
        _ => Err(bad()),
    }
}

fn read_json_form(value: &Value) -> Result<(Option<usize>, usize, Poly2)> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::InvalidForm("expected a JSON object".into()))?;
    let m = obj
        .get("m")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::InvalidForm("missing or invalid `m`".into()))? as usize;
    let d = match obj.get("d") {
        None => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| Error::InvalidForm("invalid `d`".into()))? as usize),
    };
    let rows = obj
        .get("b")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidForm("missing `b` array".into()))?;
    let mut b = Vec::new();
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| Error::InvalidForm("each b_i must be a coefficient array".into()))?;
        b.push(Poly::new(row.iter().map(read_coefficient).collect::<Result<Vec<_>>>()?));
    }
    Ok((d, m, Poly2::from_u_coeffs(b)))
}

/// The equation `z^m t - g(z, u) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub m: usize,
    pub g: Poly2,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lead = if self.m == 1 { "z*t".to_string() } else { format!("z^{}*t", self.m) };
        let rest = self.g.neg().render();
        match rest.strip_prefix('-') {
            _ if self.g.is_zero() => write!(f, "{lead} = 0"),
            Some(r) => write!(f, "{lead} - {r} = 0"),
            None => write!(f, "{lead} + {rest} = 0"),
        }
    }
}

/// One step `t_l = g_l / z^l` of the recursion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursionStep {
    pub level: usize,
    pub g: Poly2,
}

impl fmt::Display for RecursionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = if self.level == 1 { "z".to_string() } else { format!("z^{}", self.level) };
        write!(f, "t_{} = ({}) / {den}", self.level, self.g.render())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recursion {
    pub form: DanielewskiForm,
    pub steps: Vec<RecursionStep>,
    /// The eliminated chain equals the single equation of the form.
    pub collapsed: bool,
}

/// Runs `z t_1 = b_0`, `z t_{l+1} = b_l + t_l` and eliminates the
/// intermediate variables.
pub fn build_recursion(centers: &[Poly1]) -> Result<Recursion> {
    let form = DanielewskiForm::new(centers.len(), centers.to_vec())?;
    let mut steps = Vec::with_capacity(form.m);
    // z^l t_l = g_l, so z^{l+1} t_{l+1} = z^l b_l + g_l
    let mut g = Poly2::zero();
    for (l, bl) in form.b.iter().enumerate() {
        g = g.add(&Poly2::monomial(bl.clone(), l));
        steps.push(RecursionStep { level: l + 1, g: g.clone() });
    }
    let collapsed = g == form.g();
    Ok(Recursion { form, steps, collapsed })
}

/// One special point `0` carrying the bush `Γ_{d,m}`.
pub fn tree_of_equation(f: &DanielewskiForm) -> GraphDivisor {
    GraphDivisor::over_line(vec![("0".into(), gamma(f.d, f.m))])
}

/// `α^d h(z, u) = g(λz, αu + β(z)) - γ(z)` modulo `z^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormWitness {
    pub alpha: Q,
    pub lambda: Q,
    /// Polynomial in `z`.
    pub beta: Poly1,
    /// Polynomial in `z`.
    pub gamma: Poly1,
}

impl NormalFormWitness {
    pub fn to_value(&self) -> Value {
        json!({
            "alpha": self.alpha.to_string(),
            "lambda": self.lambda.to_string(),
            "beta": self.beta.render("z"),
            "gamma": self.gamma.render("z"),
        })
    }
}

impl Serialize for NormalFormWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

impl fmt::Display for NormalFormWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha = {}, lambda = {}, beta(z) = {}, gamma(z) = {}",
            self.alpha,
            self.lambda,
            self.beta.render("z"),
            self.gamma.render("z")
        )
    }
}

/// `g(λz, αu + β(z))` modulo `z^m` over a ring containing the parameters.
/// The result has `z` outside and `u` inside.
pub fn substitute<K: Ring>(g: &Poly2, lambda: &K, alpha: &K, beta: &[K], m: usize) -> Poly<Poly<K>> {
    let mut x: Vec<Poly<K>> = beta.iter().map(|b| Poly::constant(b.clone())).collect();
    if x.is_empty() {
        x.push(Poly::zero());
    }
    x[0] = x[0].add(&Poly::monomial(alpha.clone(), 1));
    let x = Poly::new(x);
    let mut out = Poly::zero();
    let mut lam = K::one();
    for (i, bi) in g.coeffs().iter().enumerate().take(m) {
        let mut acc: Poly<Poly<K>> = Poly::zero();
        for c in bi.coeffs().iter().rev() {
            acc = acc.mul_trunc(&x, m - i).add(&Poly::constant(Poly::constant(K::from_q(c))));
        }
        out = out.add(&acc.shift(i).scale(&Poly::constant(lam.clone())));
        lam = lam.mul(lambda);
    }
    out.truncate(m)
}

fn embed2<K: Ring>(g: &Poly2) -> Poly<Poly<K>> {
    g.map(|bi| bi.map(K::from_q))
}

/// Exact check of the witness identity modulo `z^m`.
pub fn verify_witness(g: &DanielewskiForm, h: &DanielewskiForm, w: &NormalFormWitness) -> bool {
    if g.d != h.d || g.m != h.m || w.alpha.is_zero() || w.lambda.is_zero() {
        return false;
    }
    if w.beta.degree().is_some_and(|k| k >= g.m) {
        return false;
    }
    let m = g.m;
    let beta: Vec<Q> = (0..m).map(|l| w.beta.coeff(l)).collect();
    let lhs = substitute(&g.g(), &w.lambda, &w.alpha, &beta, m);
    let ad = Ring::pow(&w.alpha, g.d);
    let gamma = w.gamma.map(|c| Poly::constant(c.clone()));
    let residual = lhs.sub(&embed2::<Q>(&h.g()).scale(&Poly::constant(ad))).sub(&gamma);
    residual.truncate(m).is_zero()
}

/// A witness for `h -> g` from one for `g -> h`.
pub fn invert_witness(w: &NormalFormWitness, d: usize) -> NormalFormWitness {
    let inv_l = w.lambda.recip();
    let inv_a = w.alpha.recip();
    // p(z / λ)
    let rescale = |p: &Poly1| Poly::new(p.coeffs().iter().enumerate().map(|(k, c)| c * Ring::pow(&inv_l, k)).collect());
    NormalFormWitness {
        alpha: inv_a.clone(),
        lambda: inv_l.clone(),
        beta: rescale(&w.beta).scale(&-inv_a.clone()),
        gamma: rescale(&w.gamma).scale(&-Ring::pow(&inv_a, d)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Isomorphic(NormalFormWitness),
    NotIsomorphic(String),
    Unknown(String),
}

/// Candidates for α from affine maps sending two rational roots of `from`
/// onto rational roots of `to`.
fn root_pair_alphas(from: &[Q], to: &[Q]) -> Vec<Q> {
    let mut out = Vec::new();
    if from.len() < 2 {
        return out;
    }
    let (r0, r1) = (&from[0], &from[1]);
    for (j, sj) in to.iter().enumerate() {
        for (l, sl) in to.iter().enumerate() {
            if j != l {
                out.push((sj - sl) / (r0 - r1));
            }
        }
    }
    out
}

fn push_unique(out: &mut Vec<Q>, items: impl IntoIterator<Item = Q>) {
    for x in items {
        if !x.is_zero() && !out.contains(&x) {
            out.push(x);
        }
    }
}

/// Monic gcd of the nonzero polynomials, `None` when all vanish.
fn gcd_all(polys: &[Poly1]) -> Option<Poly1> {
    polys
        .iter()
        .filter(|p| !p.is_zero())
        .fold(None, |acc: Option<Poly1>, p| Some(acc.map_or_else(|| p.monic(), |a| a.gcd(p))))
}

/// Level-0 constraints on α: coefficients of `u^1..u^{d-2}` in
/// `b_0(αu + β_0(α)) - α^d c_0` with `β_0` fixed by the `u^{d-1}` term.
fn alpha_constraints(b0: &Poly1, c0: &Poly1, d: usize) -> Vec<Poly1> {
    let p = b0.coeff(d - 1);
    let r = c0.coeff(d - 1);
    let dq = q(d as i64);
    let beta0 = Poly1::new(vec![-(&p / &dq), &r / &dq]);
    let x: Poly<Poly1> = Poly::new(vec![beta0, Poly1::var()]);
    let lhs = b0.eval_in(&x, |c| Poly::constant(Poly1::constant(c.clone())));
    let rhs: Poly<Poly1> = c0.map(|c| Poly1::monomial(c.clone(), d));
    let diff = lhs.sub(&rhs);
    (1..d.saturating_sub(1)).map(|j| diff.coeff(j)).collect()
}

struct Search<'a> {
    g: &'a DanielewskiForm,
    h: &'a DanielewskiForm,
    complete: bool,
}

impl Search<'_> {
    /// All witnesses with the given α.
    fn with_alpha(&mut self, alpha: &Q) -> Vec<NormalFormWitness> {
        let (g, h, d, m) = (self.g, self.h, self.g.d, self.g.m);
        let dq = q(d as i64);
        let ad = Ring::pow(alpha, d);
        let b0 = &g.b[0];
        let beta0 = (alpha * h.b[0].coeff(d - 1) - b0.coeff(d - 1)) / &dq;
        let lvl0 = substitute(&Poly2::constant(b0.clone()), &q(1), alpha, &[beta0.clone()], 1).coeff(0);
        let lvl0 = lvl0.sub(&h.b[0].scale(&ad));
        if lvl0.degree().unwrap_or(0) > 0 {
            return Vec::new();
        }
        // λ stays symbolic; β_l and the constraints are polynomials in λ
        let lam = Poly1::var();
        let alpha_k = Poly1::constant(alpha.clone());
        let deriv = substitute(&Poly2::constant(b0.derivative()), &q(1), alpha, &[beta0.clone()], 1).coeff(0);
        let lead = (&dq * Ring::pow(alpha, d - 1)).recip();
        let mut betas = vec![Poly1::constant(beta0)];
        let mut constraints = Vec::new();
        for l in 1..m {
            betas.push(Poly1::zero());
            let gl = substitute(&g.g(), &lam, &alpha_k, &betas, l + 1).coeff(l);
            let target = h.b[l].scale(&ad);
            let top = Poly1::constant(target.coeff(d - 1)).sub(&gl.coeff(d - 1));
            let bl = top.scale(&lead);
            for j in 1..d.saturating_sub(1) {
                let cj = gl
                    .coeff(j)
                    .add(&bl.scale(&deriv.coeff(j)))
                    .sub(&Poly1::constant(target.coeff(j)));
                constraints.push(cj);
            }
            betas[l] = bl;
        }
        let lambdas = match gcd_all(&constraints) {
            None => vec![q(1)],
            Some(c) => match c.rational_roots() {
                None => {
                    self.complete = false;
                    return Vec::new();
                }
                Some(r) => {
                    if !r.split {
                        self.complete = false;
                    }
                    r.roots.into_iter().filter(|x| !x.is_zero()).collect()
                }
            },
        };
        let mut out = Vec::new();
        for lambda in lambdas {
            let beta: Vec<Q> = betas.iter().map(|b| b.eval(&lambda)).collect();
            let full = substitute(&g.g(), &lambda, alpha, &beta, m);
            let residual = full.sub(&embed2::<Q>(&h.g()).scale(&Poly::constant(ad.clone())));
            let w = NormalFormWitness {
                alpha: alpha.clone(),
                lambda,
                beta: Poly::new(beta),
                gamma: residual.map(|c| c.coeff(0)),
            };
            if verify_witness(g, h, &w) {
                out.push(w);
            }
        }
        out
    }
}

/// Searches for a normal-form witness between two forms.
pub fn classify(g: &DanielewskiForm, h: &DanielewskiForm) -> Classification {
    if g.d != h.d {
        return Classification::NotIsomorphic(format!("d = {} and d' = {} differ", g.d, h.d));
    }
    let (d, m) = (g.d, g.m);
    if m != h.m {
        if d == 1 {
            return Classification::Unknown("for d = 1 both surfaces are affine planes; no normal-form witness".into());
        }
        return Classification::NotIsomorphic(format!("m = {} and m' = {} differ", m, h.m));
    }
    let (b0, c0) = (&g.b[0], &h.b[0]);
    let (Some(rb), Some(rc)) = (b0.rational_roots(), c0.rational_roots()) else {
        return Classification::Unknown("coefficients too large for the rational root search".into());
    };
    let mut search = Search {
        g,
        h,
        complete: d >= 2 && m >= 2 && rb.split && rc.split,
    };
    let mut alphas = Vec::new();
    if d == 1 {
        alphas.push(q(1));
    } else {
        // roots of h onto roots of g keeps γ(0) = 0; the reverse direction may not
        push_unique(&mut alphas, root_pair_alphas(&rc.roots, &rb.roots));
        push_unique(&mut alphas, root_pair_alphas(&rb.roots, &rc.roots));
        match gcd_all(&alpha_constraints(b0, c0, d)) {
            // α is unconstrained at level 0 and only root maps were tried
            None => search.complete = false,
            Some(a) => match a.rational_roots() {
                Some(r) => {
                    search.complete &= r.split;
                    push_unique(&mut alphas, r.roots);
                }
                None => search.complete = false,
            },
        }
    }
    let mut first = None;
    for alpha in &alphas {
        for w in search.with_alpha(alpha) {
            if w.gamma.is_zero() {
                return Classification::Isomorphic(w);
            }
            first.get_or_insert(w);
        }
    }
    match first {
        Some(w) => Classification::Isomorphic(w),
        None if search.complete => Classification::NotIsomorphic("no rational (α, λ, β) satisfies the normal-form identity and all candidate roots are rational".into()),
        None => Classification::Unknown("search over the rationals is incomplete".into()),
    }
}

/// `z^m t - g(z, u) - 1 = 0` with `g = u^d + a_2 u^{d-2} z^2 + ... + a_d z^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmForm {
    d: usize,
    m: usize,
    g: Poly2,
}

impl MmForm {
    pub fn new(m: usize, g: Poly2) -> Result<Self> {
        let bad = |s: String| Err(Error::MalformedMMForm(s));
        let d = g.coeff(0).degree().unwrap_or(0);
        for (i, bi) in g.coeffs().iter().enumerate() {
            for (j, c) in bi.coeffs().iter().enumerate() {
                if !c.is_zero() && i + j != d {
                    return bad(format!("u^{j} z^{i} term breaks homogeneity of degree {d}"));
                }
            }
        }
        if g.coeff(0).coeff(d) != q(1) {
            return bad("u^d must have coefficient 1".into());
        }
        if !g.coeff(1).is_zero() {
            return bad("the u^(d-1) z term must vanish".into());
        }
        if !(m >= 2 && d > m) {
            return bad(format!("need d > m >= 2, got d = {d}, m = {m}"));
        }
        Ok(MmForm { d, m, g })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn g(&self) -> &Poly2 {
        &self.g
    }

    /// `a_j`, the coefficient of `u^{d-j} z^j`.
    pub fn a(&self, j: usize) -> Q {
        self.g.coeff(j).coeff(self.d - j)
    }

    pub fn parse(src: &str) -> Result<Self> {
        if src.trim_start().starts_with('{') {
            let value: Value = serde_json::from_str(src).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
            let (_, m, g) = read_json_form(&value).map_err(|e| Error::MalformedMMForm(e.to_string()))?;
            return MmForm::new(m, g);
        }
        let (m, g) = parse::split_equation(&parse::parse_polynomial(src)?)?;
        // z^m t = g + 1
        if g.coeff(0).coeff(0) != q(1) {
            return Err(Error::MalformedMMForm("expected the constant term of z^m t - g - 1".into()));
        }
        MmForm::new(m, g.sub(&Poly2::one()))
    }

    /// `g(λz, u)`.
    pub fn rescaled(&self, lambda: &Q) -> MmForm {
        let g = Poly::new(
            self.g
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, bi)| bi.scale(&Ring::pow(lambda, i)))
                .collect(),
        );
        MmForm { d: self.d, m: self.m, g }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MmOutcome {
    Isomorphic { lambda: Q },
    NotIsomorphic,
    /// Isomorphic only over an extension of the rationals.
    Unknown(String),
}

fn q_pow(x: &Q, k: i64) -> Q {
    let p = Ring::pow(x, k.unsigned_abs() as usize);
    if k < 0 {
        p.recip()
    } else {
        p
    }
}

/// Rational `e`-th roots of `x`, both signs for even `e`.
fn rational_roots_of(x: &Q, e: usize) -> Vec<Q> {
    let mut coeffs = vec![-x.clone()];
    coeffs.resize(e, q(0));
    coeffs.push(q(1));
    Poly1::new(coeffs).rational_roots().map(|r| r.roots).unwrap_or_default()
}

/// Decides `h(z, u) = g(λz, u)` for some nonzero `λ`.
pub fn mm_classify(g: &MmForm, h: &MmForm) -> MmOutcome {
    if g.m != h.m || g.d != h.d {
        return MmOutcome::NotIsomorphic;
    }
    let d = g.d;
    // c_j = a_j λ^j for every j; zero patterns must agree
    let mut support = Vec::new();
    for j in 2..=d {
        let (a, c) = (g.a(j), h.a(j));
        if a.is_zero() != c.is_zero() {
            return MmOutcome::NotIsomorphic;
        }
        if !a.is_zero() {
            support.push((j, c / a));
        }
    }
    let Some(&(j0, ref r0)) = support.first() else {
        return MmOutcome::Isomorphic { lambda: q(1) };
    };
    // λ^e with e the gcd of the support, via a Bezout combination
    let (mut e, mut rho) = (j0 as i64, r0.clone());
    for (j, r) in &support[1..] {
        let ext = e.extended_gcd(&(*j as i64));
        rho = q_pow(&rho, ext.x) * q_pow(r, ext.y);
        e = ext.gcd;
    }
    for (j, r) in &support {
        if q_pow(&rho, *j as i64 / e) != *r {
            return MmOutcome::NotIsomorphic;
        }
    }
    let roots = rational_roots_of(&rho, e as usize);
    let best = roots.iter().find(|x| x.is_positive()).or(roots.first());
    match best {
        Some(lambda) => MmOutcome::Isomorphic { lambda: lambda.clone() },
        None => MmOutcome::Unknown(format!("λ^{e} = {rho} has no rational solution")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{picard_number, vertex_count};
    use poly::q_frac;

    fn form(m: usize, b: &[&[i64]]) -> DanielewskiForm {
        DanielewskiForm::new(m, b.iter().map(|c| Poly1::from_ints(c)).collect()).unwrap()
    }

    fn witness(a: Q, l: Q, beta: &[i64], gamma: &[i64]) -> NormalFormWitness {
        NormalFormWitness {
            alpha: a,
            lambda: l,
            beta: Poly1::from_ints(beta),
            gamma: Poly1::from_ints(gamma),
        }
    }

    #[test]
    fn recursion_collapses() {
        for m in 1..7 {
            let mut b = vec![Poly1::from_ints(&[-1, 0, 1])];
            b.resize(m, Poly1::zero());
            let r = build_recursion(&b).unwrap();
            assert!(r.collapsed);
            assert_eq!(r.steps.len(), m);
            let z = if m == 1 { "z".to_string() } else { format!("z^{m}") };
            assert_eq!(r.form.equation().to_string(), format!("{z}*t - u^2 + 1 = 0"));
        }
        let r = build_recursion(&[Poly1::from_ints(&[0, -1, 0, 1])]).unwrap();
        assert_eq!(r.form.equation().to_string(), "z*t - u^3 + u = 0");
        assert_eq!(r.steps[0].to_string(), "t_1 = (u^3 - u) / z");
        assert!(matches!(build_recursion(&[Poly1::from_ints(&[0, 0, 1])]), Err(Error::InvalidB0(_))));
        assert!(matches!(build_recursion(&[Poly1::from_ints(&[-1, 0, 2])]), Err(Error::InvalidB0(_))));
    }

    #[test]
    fn form_validation_and_io() {
        assert!(matches!(
            DanielewskiForm::new(2, vec![Poly1::from_ints(&[-1, 0, 1]), Poly1::from_ints(&[0, 0, 1])]),
            Err(Error::InvalidForm(_))
        ));
        let f = DanielewskiForm::parse("z^2*t - (u^3 - u) - (u)*z").unwrap();
        assert_eq!((f.d(), f.m()), (3, 2));
        let j = DanielewskiForm::parse(r#"{"d":3,"m":2,"b":[[0,-1,0,1],[0,"1"]]}"#).unwrap();
        assert_eq!(f, j);
        assert_eq!(DanielewskiForm::from_value(&f.to_value()).unwrap(), f);
        // g is read modulo z^m
        let f = DanielewskiForm::parse("z*t = u^2 - 1 + z*u^5").unwrap();
        assert_eq!(f.g(), Poly2::constant(Poly1::from_ints(&[-1, 0, 1])));
        assert!(matches!(
            DanielewskiForm::parse(r#"{"d":2,"m":1,"b":[[0,-1,0,1]]}"#),
            Err(Error::InvalidForm(_))
        ));
        let half = DanielewskiForm::parse(r#"{"m":1,"b":[["-1/2",0,1]]}"#).unwrap();
        assert_eq!(half.b()[0].coeff(0), q_frac(-1, 2));
    }

    #[test]
    fn trees_of_equations() {
        for d in 2..6 {
            for m in 1..6 {
                let mut b = vec![Poly1::from_ints(&[-1, 0, 1])];
                b[0] = (1..=d as i64).fold(Poly1::one(), |acc, r| acc.mul(&Poly1::from_ints(&[-r, 1])));
                b.resize(m, Poly1::zero());
                let div = tree_of_equation(&build_recursion(&b).unwrap().form);
                assert_eq!(vertex_count(&div).unwrap(), d * m + 3);
                assert_eq!(picard_number(&div).unwrap(), d - 1);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let g = form(1, &[&[-1, 0, 1]]);
        assert_eq!(classify(&g, &g), Classification::Isomorphic(witness(q(1), q(1), &[], &[])));
        let h = form(1, &[&[-4, 0, 1]]);
        let Classification::Isomorphic(w) = classify(&g, &h) else { panic!() };
        assert!(verify_witness(&g, &h, &w));
        assert!(verify_witness(&g, &h, &witness(q(2), q(1), &[], &[15])));
        assert!(!verify_witness(&g, &h, &witness(q(2), q(1), &[], &[16])));
        let irr = form(1, &[&[1, 0, 1]]);
        assert!(matches!(classify(&g, &irr), Classification::Unknown(_)));
        assert!(matches!(classify(&g, &form(2, &[&[-1, 0, 1]])), Classification::NotIsomorphic(_)));
        assert!(matches!(classify(&g, &form(1, &[&[0, -1, 0, 1]])), Classification::NotIsomorphic(_)));
    }

    #[test]
    fn classify_certifies_non_isomorphism() {
        // b_0 = u^3 - u fixes α = ±1, β_0 = 0; b_1 = 1 and b_1 = u are not related
        let g = form(2, &[&[0, -1, 0, 1], &[1]]);
        let h = form(2, &[&[0, -1, 0, 1], &[0, 1]]);
        assert!(matches!(classify(&g, &h), Classification::NotIsomorphic(_)));
        // λ = 2 relates b_1 = u and b_1 = 2u
        let h2 = form(2, &[&[0, -1, 0, 1], &[0, 2]]);
        let Classification::Isomorphic(w) = classify(&h, &h2) else { panic!() };
        assert!(verify_witness(&h, &h2, &w));
        assert_eq!(w.lambda.abs(), q(2));
    }

    #[test]
    fn witnesses_invert() {
        let g = form(3, &[&[0, -1, 0, 1], &[0, 1], &[1, 0, 1]]);
        let w = witness(q(-2), q_frac(1, 3), &[1, 2, -1], &[]);
        let beta: Vec<Q> = (0..3).map(|l| w.beta.coeff(l)).collect();
        let image = substitute(&g.g(), &w.lambda, &w.alpha, &beta, 3);
        let ad = Ring::pow(&w.alpha, 3).recip();
        let h = DanielewskiForm::from_poly2(3, &image.map(|c| c.scale(&ad))).unwrap();
        assert!(verify_witness(&g, &h, &w));
        assert!(verify_witness(&h, &g, &invert_witness(&w, 3)));
        let Classification::Isomorphic(found) = classify(&g, &h) else { panic!() };
        assert!(verify_witness(&g, &h, &found));
    }

    #[test]
    fn mm_examples() {
        let g = MmForm::parse("z^2*t - (u^3 + 2u z^2 + z^3) - 1").unwrap();
        let h = MmForm::parse("z^2*t = u^3 + 8u z^2 + 8z^3 + 1").unwrap();
        assert_eq!(g.a(2), q(2));
        assert_eq!(mm_classify(&g, &h), MmOutcome::Isomorphic { lambda: q(2) });
        assert_eq!(mm_classify(&g, &g), MmOutcome::Isomorphic { lambda: q(1) });
        let g3 = MmForm::parse("z^3*t - u^4 - u^2 z^2 - 1").unwrap();
        let h2 = MmForm::parse("z^2*t - u^4 - u^2 z^2 - 1").unwrap();
        assert_eq!(mm_classify(&g3, &h2), MmOutcome::NotIsomorphic);
        // λ^2 = 2
        let h = MmForm::parse("z^2*t - u^4 - 2u^2 z^2 - 1").unwrap();
        assert!(matches!(mm_classify(&h2, &h), MmOutcome::Unknown(_)));
        // λ^2 = 4 and λ^3 = -8 force λ = -2
        let a = MmForm::parse("z^2*t - u^3 - u z^2 - z^3 - 1").unwrap();
        assert_eq!(mm_classify(&a, &a.rescaled(&q(-2))), MmOutcome::Isomorphic { lambda: q(-2) });
        let b = MmForm::parse("z^2*t - u^3 - 4u z^2 - 9z^3 - 1").unwrap();
        assert_eq!(mm_classify(&a, &b), MmOutcome::NotIsomorphic);
        assert!(matches!(MmForm::parse("z^2*t - u^3 - u^2 z - 1"), Err(Error::MalformedMMForm(_))));
        assert!(matches!(MmForm::parse("z^3*t - u^3 - 1"), Err(Error::MalformedMMForm(_))));
        assert!(matches!(MmForm::parse("z^2*t - u^3 - u z - 1"), Err(Error::MalformedMMForm(_))));
    }
}
