//! Textual element format.
//!
//! ```text
//! element  := [sign] term ( ('+' | '-') term )*
//! term     := coeff [ '*' product ] | product
//! product  := factor ( '.' factor )*
//! factor   := 'I' | gen | gen "'"
//! gen      := 'S[' index ( ',' index )* ']'
//! coeff    := number [ 'r' | 'i' ]      -- r = sqrt(n), i = imaginary unit
//! number   := ['-'] digits [ '/' digits ] | ['-'] decimal
//! ```
//!
//! Decimal or imaginary coefficients put the whole element on the numeric
//! backend; otherwise it is exact.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use super::{Element, Monomial, MultiIndex};
use crate::error::{CuntzError, Result};
use crate::scalar::{format_rational, Backend, QuadRational, Rational, Scalar};

#[derive(Clone, Debug)]
enum Coeff {
    Exact(QuadRational),
    Numeric(Complex64),
}

impl Coeff {
    fn negate(self) -> Coeff {
        match self {
            Coeff::Exact(q) => Coeff::Exact(-&q),
            Coeff::Numeric(c) => Coeff::Numeric(-c),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    n: u32,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, n: u32) -> Self {
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            n,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn error<T>(&self, offset: usize, message: impl Into<String>) -> Result<T> {
        Err(CuntzError::Parse {
            offset,
            message: message.into(),
        })
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        match self.peek() {
            Some(b) if b == byte => {
                self.pos += 1;
                Ok(())
            }
            Some(b) => self.error(self.pos, format!("expected '{}', found '{}'", byte as char, b as char)),
            None => self.error(self.pos, format!("expected '{}', found end of input", byte as char)),
        }
    }

    fn element(&mut self) -> Result<Vec<(Coeff, Monomial)>> {
        let mut terms = Vec::new();
        let mut negate = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            let (coeff, mono) = self.term()?;
            let coeff = if negate { coeff.negate() } else { coeff };
            if let Some(m) = mono {
                terms.push((coeff, m));
            }
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    negate = false;
                }
                Some(b'-') => {
                    self.pos += 1;
                    negate = true;
                }
                None => return Ok(terms),
                Some(b) => {
                    return self.error(self.pos, format!("unexpected '{}'", b as char));
                }
            }
        }
    }

    /// A term; `None` for the monomial means the product vanished.
    fn term(&mut self) -> Result<(Coeff, Option<Monomial>)> {
        match self.peek() {
            Some(b) if b.is_ascii_digit() || b == b'-' || b == b'.' => {
                let coeff = self.coeff()?;
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    Ok((coeff, self.product()?))
                } else {
                    Ok((coeff, Some(Monomial::identity())))
                }
            }
            Some(_) => Ok((Coeff::Exact(QuadRational::one()), self.product()?)),
            None => self.error(self.pos, "expected a term, found end of input"),
        }
    }

    fn product(&mut self) -> Result<Option<Monomial>> {
        let mut acc = Some(self.factor()?);
        while self.peek() == Some(b'.') {
            self.pos += 1;
            let next = self.factor()?;
            acc = acc.and_then(|m| m.product(&next));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Monomial> {
        let start = self.pos;
        match self.peek() {
            Some(b'I') => {
                self.pos += 1;
                Ok(Monomial::identity())
            }
            Some(b'S') => {
                self.pos += 1;
                self.expect(b'[')?;
                let mut letters = vec![self.index()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    letters.push(self.index()?);
                }
                self.expect(b']')?;
                let word = MultiIndex::new(letters);
                if self.peek() == Some(b'\'') {
                    self.pos += 1;
                    Ok(Monomial::new(MultiIndex::empty(), word))
                } else {
                    Ok(Monomial::new(word, MultiIndex::empty()))
                }
            }
            Some(b) => self.error(start.max(self.pos), format!("expected 'I' or 'S[', found '{}'", b as char)),
            None => self.error(self.pos, "expected a factor, found end of input"),
        }
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn index(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        let text = self.digits();
        if text.is_empty() {
            return self.error(start, "expected an index");
        }
        let value: u64 = text.parse().unwrap_or(u64::MAX);
        if value == 0 || value > self.n as u64 {
            return Err(CuntzError::IndexOutOfRange {
                index: value,
                n: self.n,
                offset: start,
            });
        }
        Ok(value as u32)
    }

    fn coeff(&mut self) -> Result<Coeff> {
        self.skip_ws();
        let start = self.pos;
        let negative = if self.bytes.get(self.pos) == Some(&b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let int_part = self.digits();
        let mut is_decimal = false;
        if self.bytes.get(self.pos) == Some(&b'.') {
            // a '.' directly followed by a digit is a decimal point, not a product
            if self.bytes.get(self.pos + 1).is_some_and(u8::is_ascii_digit) {
                is_decimal = true;
                self.pos += 1;
                self.digits();
            }
        }
        if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
            is_decimal = true;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits().is_empty() {
                return self.error(self.pos, "malformed exponent");
            }
        }
        if int_part.is_empty() && !is_decimal {
            return self.error(start, "expected a number");
        }

        let value = if is_decimal {
            let text = &self.src[start..self.pos];
            let v: f64 = text
                .parse()
                .map_err(|_| CuntzError::Parse {
                    offset: start,
                    message: format!("malformed decimal {text:?}"),
                })?;
            Coeff::Numeric(Complex64::new(v, 0.0))
        } else {
            let num: BigInt = int_part.parse().expect("digits");
            let mut q = Rational::from_integer(if negative { -num } else { num });
            if self.bytes.get(self.pos) == Some(&b'/') {
                self.pos += 1;
                let den_start = self.pos;
                let den_text = self.digits();
                if den_text.is_empty() {
                    return self.error(den_start, "malformed rational: missing denominator");
                }
                let den: BigInt = den_text.parse().expect("digits");
                if den.is_zero() {
                    return self.error(den_start, "malformed rational: zero denominator");
                }
                q /= Rational::from_integer(den);
            }
            Coeff::Exact(QuadRational::rational(q))
        };

        match self.bytes.get(self.pos) {
            Some(b'r') => {
                self.pos += 1;
                Ok(match value {
                    Coeff::Exact(q) => Coeff::Exact(QuadRational::new(
                        Rational::zero(),
                        q.rational_part().clone(),
                        self.n,
                    )),
                    Coeff::Numeric(c) => Coeff::Numeric(c * (self.n as f64).sqrt()),
                })
            }
            Some(b'i') => {
                self.pos += 1;
                let c = match value {
                    Coeff::Exact(q) => Complex64::new(q.to_f64(), 0.0),
                    Coeff::Numeric(c) => c,
                };
                Ok(Coeff::Numeric(c * Complex64::i()))
            }
            _ => Ok(value),
        }
    }
}

/// Parses an element of `O_n` from its textual form.
pub fn parse(text: &str, n: u32) -> Result<Element> {
    if n < 2 {
        return Err(CuntzError::Usage(format!("n must be at least 2, got {n}")));
    }
    let mut parser = Parser::new(text, n);
    let terms = parser.element()?;
    let numeric = terms.iter().any(|(c, _)| matches!(c, Coeff::Numeric(_)));
    let backend = if numeric { Backend::Numeric } else { Backend::Exact };
    let mut out = Element::zero_with(n, backend);
    for (c, m) in terms {
        let c = match (c, numeric) {
            (Coeff::Exact(q), false) => Scalar::Exact(q),
            (Coeff::Exact(q), true) => Scalar::complex(q.to_f64(), 0.0),
            (Coeff::Numeric(c), _) => Scalar::Numeric(c),
        };
        out.insert(m, c);
    }
    Ok(out)
}

fn render_monomial(m: &Monomial) -> String {
    let gen = |w: &MultiIndex| format!("S[{w}]");
    match (m.mu.is_empty(), m.nu.is_empty()) {
        (true, true) => "I".to_string(),
        (false, true) => gen(&m.mu),
        (true, false) => format!("{}'", gen(&m.nu)),
        (false, false) => format!("{}.{}'", gen(&m.mu), gen(&m.nu)),
    }
}

/// One printed piece: sign, magnitude text (empty for a unit coefficient) and monomial.
fn pieces(c: &Scalar) -> Vec<(bool, String)> {
    let rational_piece = |q: &Rational, suffix: &str| -> (bool, String) {
        let mag = format_rational(&q.abs());
        let text = if suffix.is_empty() && mag == "1" {
            String::new()
        } else {
            format!("{mag}{suffix}")
        };
        (q.is_negative(), text)
    };
    let float_piece = |v: f64, suffix: &str| -> (bool, String) { (v < 0.0, format!("{:?}{suffix}", v.abs())) };
    match c {
        Scalar::Exact(q) => {
            let mut out = Vec::new();
            if !q.rational_part().is_zero() {
                out.push(rational_piece(q.rational_part(), ""));
            }
            if !q.sqrt_part().is_zero() {
                out.push(rational_piece(q.sqrt_part(), "r"));
            }
            out
        }
        Scalar::Numeric(z) => {
            let mut out = Vec::new();
            if z.re != 0.0 || z.im == 0.0 {
                out.push(float_piece(z.re, ""));
            }
            if z.im != 0.0 {
                out.push(float_piece(z.im, "i"));
            }
            out
        }
    }
}

impl Element {
    /// Deterministic text in the parse grammar; terms in monomial order.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return match self.backend {
                Backend::Exact => "0".to_string(),
                Backend::Numeric => "0.0".to_string(),
            };
        }
        let mut out = String::new();
        for (m, c) in &self.terms {
            let mono = render_monomial(m);
            for (negative, mag) in pieces(c) {
                if out.is_empty() {
                    if negative {
                        out.push('-');
                    }
                } else {
                    out.push_str(if negative { " - " } else { " + " });
                }
                if mag.is_empty() {
                    out.push_str(&mono);
                } else {
                    out.push_str(&mag);
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }
}
