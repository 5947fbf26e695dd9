//! Parser for series literals like `(1+T)^3-1` and element literals like
//! `-2`, `1,0,4` or `teich:1,1`.
//!
//! Grammar for series:
//!   expr   := ['-'] term (('+'|'-') term)*
//!   term   := factor ('*' factor)*
//!   factor := atom ['^' uint]
//!   atom   := integer | 'T' | '(' expr ')'
//!
//! Every constant is reduced into the ring; arithmetic is truncated series
//! arithmetic, so the parse is deterministic at the requested precision.

use num_bigint::BigInt;
use padic_dynamics::series::Series;
use padic_dynamics::zq::{Ring, ZqElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(out, "at byte {}: {}", self.position, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(BigInt),
    Var,
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let mut out = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            ' ' | '\t' => {
                i += 1;
                continue;
            }
            '+' => Token::Plus,
            '-' | '\u{2212}' => Token::Minus,
            '*' => Token::Star,
            '^' => Token::Caret,
            '(' => Token::Open,
            ')' => Token::Close,
            'T' | 't' => Token::Var,
            '0'..='9' => {
                let start = i;
                let mut digits = String::new();
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    digits.push(bytes[i]);
                    i += 1;
                }
                out.push((start, Token::Int(digits.parse().expect("digits parse"))));
                continue;
            }
            other => {
                return Err(ParseError {
                    position: i,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'t> {
    tokens: &'t [(usize, Token)],
    pos: usize,
    ring: Ring,
    prec_t: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.end)
    }

    fn advance(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t);
        self.pos += 1;
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.position(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Series, ParseError> {
        let mut acc = if matches!(self.peek(), Some(Token::Minus)) {
            self.advance();
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.advance();
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.advance();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Series, ParseError> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Token::Star)) {
            self.advance();
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Series, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.advance();
            let exp = match self.advance() {
                Some(Token::Int(n)) => u32::try_from(n.clone())
                    .map_err(|_| ParseError {
                        position: self.position(),
                        message: "exponent out of range".into(),
                    })?,
                _ => return self.fail("expected an integer exponent after '^'"),
            };
            return Ok(series_pow(&base, exp, &self.ring, self.prec_t));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Series, ParseError> {
        match self.advance().cloned() {
            Some(Token::Int(n)) => {
                let c = reduce_bigint(&self.ring, &n);
                Ok(Series::monomial(&c, 0, self.prec_t))
            }
            Some(Token::Var) => Ok(Series::identity(&self.ring, self.prec_t)),
            Some(Token::Open) => {
                let inner = self.expr()?;
                match self.advance() {
                    Some(Token::Close) => Ok(inner),
                    _ => self.fail("expected ')'"),
                }
            }
            _ => self.fail("expected an integer, 'T' or '('"),
        }
    }
}

fn series_pow(base: &Series, exp: u32, ring: &Ring, prec_t: usize) -> Series {
    let mut acc = Series::monomial(&ring.one(), 0, prec_t);
    let mut sq = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&sq);
        }
        e >>= 1;
        if e > 0 {
            sq = sq.mul(&sq);
        }
    }
    acc
}

fn reduce_bigint(ring: &Ring, n: &BigInt) -> ZqElement {
    use num_bigint::Sign;
    let p_pow = BigInt::from_biguint(Sign::Plus, ring.p_pow().clone());
    let mut reduced = n % &p_pow;
    if reduced.sign() == Sign::Minus {
        reduced += &p_pow;
    }
    ring.element_from_biguints(&[reduced.to_biguint().expect("nonnegative")])
}

/// Parse a series literal at the given truncation.
pub fn parse_series(text: &str, ring: &Ring, prec_t: usize) -> Result<Series, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        ring: ring.clone(),
        prec_t,
        end: text.len(),
    };
    let series = parser.expr()?;
    if parser.pos < tokens.len() {
        return parser.fail("trailing input after a complete expression");
    }
    Ok(series)
}

/// Parse an element literal: a signed integer, a comma-separated coefficient
/// list, or `teich:<residue>` for the Teichmuller lift of a residue.
pub fn parse_element(text: &str, ring: &Ring) -> Result<ZqElement, ParseError> {
    let trimmed = text.trim();
    if let Some(rest) = trimmed.strip_prefix("teich:") {
        let seed = parse_element(rest, ring)?;
        return Ok(ring.teichmuller(&seed));
    }
    let mut coeffs = Vec::new();
    for (i, part) in trimmed.split(',').enumerate() {
        let cleaned = part.trim().replace('\u{2212}', "-");
        let n: BigInt = cleaned.parse().map_err(|_| ParseError {
            position: i,
            message: format!("bad integer \"{part}\""),
        })?;
        coeffs.push(n);
    }
    if coeffs.len() > ring.degree() {
        return Err(ParseError {
            position: 0,
            message: format!(
                "{} coefficients for a degree-{} ring",
                coeffs.len(),
                ring.degree()
            ),
        });
    }
    let mut acc = ring.zero();
    let mut basis = ring.one();
    let gen = ring.generator();
    for (i, c) in coeffs.iter().enumerate() {
        let elt = reduce_bigint(ring, c);
        acc = acc + elt * basis.clone();
        if i + 1 < coeffs.len() {
            basis = basis * gen.clone();
        }
    }
    Ok(acc)
}
