//! Recursive-descent parser for polynomial equations in `z`, `u`, `t`.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::poly::{Poly, Poly1, Poly2, Ring, Q};
use crate::error::{Error, Result};

/// Sparse polynomial in `(z, u, t)`, keyed by exponents.
pub type Sparse = BTreeMap<[u32; 3], Q>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
}

fn lex(src: &str) -> Result<Lexer> {
    let mut toks = Vec::new();
    let (mut line, mut col) = (1, 1);
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            toks.push((Tok::Num(text.parse().expect("digits")), l0, c0));
            continue;
        }
        let tok = match c {
            'z' => Tok::Var(0),
            'u' => Tok::Var(1),
            't' => Tok::Var(2),
            '+' | '-' | '*' | '/' | '^' | '(' | ')' | '=' => Tok::Op(c),
            _ => return Err(Error::parse(l0, c0, format!("unexpected character `{c}`"))),
        };
        toks.push((tok, l0, c0));
        i += 1;
        col += 1;
    }
    toks.push((Tok::End, line, col));
    Ok(Lexer { toks })
}

struct Parser {
    lexer: Lexer,
    pos: usize,
}

fn add(a: &Sparse, b: &Sparse, sign: i64) -> Sparse {
    let mut out = a.clone();
    for (k, v) in b {
        let e = out.entry(*k).or_insert_with(Q::zero);
        *e = &*e + v * Q::from_integer(BigInt::from(sign));
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn mul(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (ka, va) in a {
        for (kb, vb) in b {
            let k = [ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]];
            let e = out.entry(k).or_insert_with(Q::zero);
            *e = &*e + va * vb;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn constant(c: Q) -> Sparse {
    let mut s = Sparse::new();
    if !c.is_zero() {
        s.insert([0, 0, 0], c);
    }
    s
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.lexer.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = &self.lexer.toks[self.pos];
        (*l, *c)
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.here();
        Error::parse(l, c, msg)
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek().clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Sparse> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc = add(&acc, &self.term()?, 1);
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = add(&acc, &self.term()?, -1);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Sparse> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = mul(&acc, &self.unary()?);
                }
                Tok::Op('/') => {
                    self.bump();
                    let Tok::Num(n) = self.bump() else {
                        self.pos -= 1;
                        return Err(self.error("only division by an integer is supported"));
                    };
                    if num_traits::Zero::is_zero(&n) {
                        self.pos -= 1;
                        return Err(self.error("division by zero"));
                    }
                    acc = mul(&acc, &constant(Q::new(BigInt::from(1), n)));
                }
                // implicit product such as `2u` or `(u+1)(u-1)`
                Tok::Num(_) | Tok::Var(_) | Tok::Op('(') => acc = mul(&acc, &self.power()?),
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Sparse> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(add(&Sparse::new(), &self.unary()?, -1))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Sparse> {
        let base = self.atom()?;
        if self.peek() != &Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let Tok::Num(n) = self.peek().clone() else {
            return Err(self.error("expected a non-negative integer exponent"));
        };
        let k: u32 = n
            .try_into()
            .ok()
            .filter(|&k| k <= 64)
            .ok_or_else(|| self.error("exponent too large"))?;
        self.bump();
        let mut acc = constant(Q::one());
        for _ in 0..k {
            acc = mul(&acc, &base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Sparse> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(constant(Q::from_integer(n)))
            }
            Tok::Var(v) => {
                self.bump();
                let mut k = [0; 3];
                k[v] = 1;
                Ok(Sparse::from([(k, Q::one())]))
            }
            Tok::Op('(') => {
                self.bump();
                let e = self.expr()?;
                if self.peek() != &Tok::Op(')') {
                    return Err(self.error("expected `)`"));
                }
                self.bump();
                Ok(e)
            }
            Tok::End => Err(self.error("unexpected end of input")),
            Tok::Op(c) => Err(self.error(format!("unexpected `{c}`"))),
        }
    }
}

/// Parses `lhs` or `lhs = rhs` into `lhs - rhs`.
pub fn parse_polynomial(src: &str) -> Result<Sparse> {
    let mut p = Parser { lexer: lex(src)?, pos: 0 };
    let lhs = p.expr()?;
    let out = if p.peek() == &Tok::Op('=') {
        p.bump();
        let rhs = p.expr()?;
        add(&lhs, &rhs, -1)
    } else {
        lhs
    };
    if p.peek() != &Tok::End {
        return Err(p.error("trailing input"));
    }
    Ok(out)
}

/// Splits `c * z^m * t - rest` into `m` and `g = rest / c`, so that the
/// equation reads `z^m t - g(z, u) = 0`.
pub fn split_equation(poly: &Sparse) -> Result<(usize, Poly2)> {
    let t_terms: Vec<(&[u32; 3], &Q)> = poly.iter().filter(|(k, _)| k[2] > 0).collect();
    let [(k, c)] = t_terms.as_slice() else {
        return Err(Error::InvalidForm("t must occur in exactly one term".into()));
    };
    if k[2] != 1 || k[1] != 0 {
        return Err(Error::InvalidForm("the t-term must be z^m*t".into()));
    }
    let m = k[0] as usize;
    let inv = c.recip();
    let mut rows: BTreeMap<u32, BTreeMap<u32, Q>> = BTreeMap::new();
    for (k, v) in poly.iter().filter(|(k, _)| k[2] == 0) {
        // g = -(rest) / c
        rows.entry(k[0]).or_default().insert(k[1], -(v * &inv));
    }
    let zdeg = rows.keys().max().map_or(0, |&z| z as usize);
    let mut b = vec![Poly1::zero(); zdeg + 1];
    for (z, row) in rows {
        let udeg = row.keys().max().map_or(0, |&u| u as usize);
        let mut coeffs = vec![Q::zero(); udeg + 1];
        for (u, v) in row {
            coeffs[u as usize] = v;
        }
        b[z as usize] = Poly::new(coeffs);
    }
    Ok((m, Poly::new(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::poly::q;

    #[test]
    fn parses_danielewski_equation() {
        let p = parse_polynomial("z^2*t - (u^3 - u) - (u)*z").unwrap();
        let (m, g) = split_equation(&p).unwrap();
        assert_eq!(m, 2);
        assert_eq!(g.coeff(0), Poly1::from_ints(&[0, -1, 0, 1]));
        assert_eq!(g.coeff(1), Poly1::from_ints(&[0, 1]));
    }

    #[test]
    fn implicit_products_and_equals() {
        let p = parse_polynomial("2z t = (u+1)(u-1) + 1/2").unwrap();
        let (m, g) = split_equation(&p).unwrap();
        assert_eq!(m, 1);
        assert_eq!(g.coeff(0).coeff(0), Q::new((-1).into(), 4.into()));
        assert_eq!(g.coeff(0).coeff(2), Q::new(1.into(), 2.into()));
        assert_eq!(g.coeff(0).coeff(1), q(0));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_polynomial("z*t -\n  (u^2 ! 1)") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 8)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_polynomial("(u"), Err(Error::Parse { .. })));
        assert!(matches!(
            split_equation(&parse_polynomial("z*t^2 - u").unwrap()),
            Err(Error::InvalidForm(_))
        ));
        assert!(matches!(
            split_equation(&parse_polynomial("z*t + u*t - u").unwrap()),
            Err(Error::InvalidForm(_))
        ));
    }
}
