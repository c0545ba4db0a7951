//! Expressions for `hallq product`.
//!
//! ```text
//! expr    := ['-'] term (('+' | '-') term)*
//! term    := factor+                       juxtaposition is the product
//! factor  := coeff | 'E[' key ']' | 'F[' key ']' | 'K(' class ')' | 'Kd(' class ')' | '(' expr ')'
//! coeff   := rational | 'v' ['^' (int | '(' rational ')')]
//! class   := int (',' int)*               projective coordinates
//!          | summand (('+' | '-') summand)* with summand := [int] ('S:' | 'P:') vertex
//! ```
//!
//! An optional `*` between factors is ignored, and the empty expression is `1`.

use std::iter::Peekable;
use std::str::CharIndices;

use hallq::dh::{DhElement, DoubleHall};
use hallq::scalar::{Exponent, Scalar};
use hallq::{HallError, KVector, Result};
use num_rational::BigRational;

pub fn evaluate(dh: &DoubleHall, text: &str) -> Result<DhElement> {
    if text.trim().is_empty() {
        return Ok(dh.one());
    }
    let mut p = Parser { dh, text, chars: text.char_indices().peekable() };
    let out = p.expr()?;
    p.skip_ws();
    if let Some(&(i, c)) = p.chars.peek() {
        return Err(p.error(i, &format!("unexpected `{c}`")));
    }
    Ok(out.normalize(dh.category().q()))
}

struct Parser<'a> {
    dh: &'a DoubleHall,
    text: &'a str,
    chars: Peekable<CharIndices<'a>>,
}

impl Parser<'_> {
    fn error(&self, at: usize, msg: &str) -> HallError {
        HallError::Parse { line: 1, msg: format!("column {}: {msg}", at + 1) }
    }

    fn pos(&mut self) -> usize {
        self.chars.peek().map_or(self.text.len(), |&(i, _)| i)
    }

    fn skip_ws(&mut self) {
        while self.chars.next_if(|(_, c)| c.is_whitespace()).is_some() {}
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        self.chars.next_if(|&(_, x)| x == c).is_some()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let at = self.pos();
            Err(self.error(at, &format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<DhElement> {
        let mut out = if self.eat('-') { self.term()?.scale(&Scalar::from_int(-1)) } else { self.term()? };
        loop {
            if self.eat('+') {
                out = out.add(&self.term()?);
            } else if self.eat('-') {
                out = out.sub(&self.term()?);
            } else {
                return Ok(out);
            }
        }
    }

    fn term(&mut self) -> Result<DhElement> {
        let mut factors = Vec::new();
        loop {
            self.skip_ws();
            match self.chars.peek().map(|&(_, c)| c) {
                Some('*') => {
                    self.chars.next();
                }
                Some('E' | 'F' | 'K' | 'v' | '(' | '0'..='9') => factors.push(self.factor()?),
                _ => break,
            }
        }
        if factors.is_empty() {
            let at = self.pos();
            return Err(self.error(at, "expected a factor"));
        }
        self.dh.product_all(&factors)
    }

    fn factor(&mut self) -> Result<DhElement> {
        let at = self.pos();
        let (_, c) = self.chars.next().expect("peeked");
        match c {
            'E' | 'F' => {
                self.expect('[')?;
                let key = self.until(']')?;
                let cat = self.dh.category();
                let id = cat.class_by_key(key.trim()).map_err(|e| self.error(at, &e.to_string()))?;
                Ok(if c == 'E' { self.dh.e(id) } else { self.dh.f(id) })
            }
            'K' => {
                let dagger = self.chars.next_if(|&(_, x)| x == 'd').is_some();
                self.expect('(')?;
                let body = self.until(')')?;
                let alpha = self.class(at, &body)?;
                Ok(if dagger { self.dh.kd(alpha) } else { self.dh.k(alpha) })
            }
            'v' => {
                let e = if self.eat('^') { self.exponent()? } else { Exponent::from_integer(1) };
                Ok(self.dh.scalar(Scalar::v_pow(e)))
            }
            '(' => {
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            _ => {
                let mut s = c.to_string();
                while let Some((_, d)) = self.chars.next_if(|(_, d)| d.is_ascii_digit() || *d == '/') {
                    s.push(d);
                }
                let r: BigRational = s.parse().map_err(|_| self.error(at, &format!("bad number `{s}`")))?;
                Ok(self.dh.scalar(Scalar::from_rational(r)))
            }
        }
    }

    fn until(&mut self, end: char) -> Result<String> {
        let at = self.pos();
        let mut s = String::new();
        for (_, c) in self.chars.by_ref() {
            if c == end {
                return Ok(s);
            }
            s.push(c);
        }
        Err(self.error(at, &format!("missing `{end}`")))
    }

    fn exponent(&mut self) -> Result<Exponent> {
        self.skip_ws();
        let at = self.pos();
        let s = if self.eat('(') {
            self.until(')')?
        } else {
            let mut s = String::new();
            if let Some((_, c)) = self.chars.next_if(|&(_, c)| c == '-') {
                s.push(c);
            }
            while let Some((_, d)) = self.chars.next_if(|(_, d)| d.is_ascii_digit()) {
                s.push(d);
            }
            s
        };
        s.trim().parse().map_err(|_| self.error(at, &format!("bad exponent `{s}`")))
    }

    fn class(&self, at: usize, body: &str) -> Result<KVector> {
        let quiver = self.dh.category().quiver();
        let n = quiver.num_vertices();
        let body = body.trim();
        if body.is_empty() {
            return Ok(KVector::zero(n));
        }
        if !body.contains(':') {
            let coords: Vec<i64> = body
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| self.error(at, &format!("bad coordinate `{x}`"))))
                .collect::<Result<_>>()?;
            if coords.len() != n {
                return Err(self.error(at, &format!("expected {n} coordinates, got {}", coords.len())));
            }
            return Ok(KVector(coords));
        }
        let mut out = KVector::zero(n);
        let spaced = body.replace('-', "+-");
        for part in spaced.split('+').map(str::trim).filter(|s| !s.is_empty()) {
            let (mult, rest) = match part.find(['S', 'P']) {
                Some(i) => (&part[..i], &part[i..]),
                None => return Err(self.error(at, &format!("bad class summand `{part}`"))),
            };
            let k: i64 = match mult.trim() {
                "" => 1,
                "-" => -1,
                m => m.parse().map_err(|_| self.error(at, &format!("bad multiplicity `{m}`")))?,
            };
            let (kind, vertex) = rest.split_once(':').ok_or_else(|| self.error(at, &format!("bad class `{rest}`")))?;
            let i = quiver
                .vertex_index(vertex.trim())
                .ok_or_else(|| self.error(at, &format!("unknown vertex `{vertex}`")))?;
            let base = if kind == "S" { quiver.simple_class(i) } else { quiver.projective_class(i) };
            out += &base.scaled(k);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hallq::quiver::zoo;
    use hallq::RepCategory;
    use std::sync::Arc;

    fn a1(reduced: bool) -> DoubleHall {
        DoubleHall::new(Arc::new(RepCategory::new(zoo::a1(2), 2).unwrap()), reduced)
    }

    #[test]
    fn empty_expression_is_one() {
        let dh = a1(false);
        assert_eq!(evaluate(&dh, "").unwrap(), dh.one());
        assert_eq!(evaluate(&dh, "  ").unwrap(), dh.one());
    }

    #[test]
    fn juxtaposition_multiplies() {
        let dh = a1(false);
        let s = dh.category().simple(0, &[]).unwrap();
        let ef = evaluate(&dh, "E[1] F[1]").unwrap();
        assert_eq!(ef, dh.product(&dh.e(s), &dh.f(s)).unwrap());
        assert_eq!(evaluate(&dh, "E[1]*F[1]").unwrap(), ef);
    }

    #[test]
    fn coefficients_and_sums() {
        let dh = a1(false);
        let s = dh.category().simple(0, &[]).unwrap();
        let x = evaluate(&dh, "1/2 v^(1/2) E[1] - v^-1 E[1]").unwrap();
        let c = &Scalar::v_pow(Exponent::new(1, 2)).scale(&BigRational::new(1.into(), 2.into())) - &Scalar::v_int(-1);
        assert_eq!(x, dh.e(s).scale(&c).normalize(2));
    }

    #[test]
    fn classes_by_name_or_coordinates() {
        let dh = a1(false);
        let q = dh.category().quiver().clone();
        let id = &q.vertices()[0].id;
        let by_name = evaluate(&dh, &format!("K(S:{id})")).unwrap();
        assert_eq!(by_name, dh.k(q.simple_class(0)));
        assert_eq!(evaluate(&dh, "K(1)").unwrap(), dh.k(KVector(vec![1])));
        assert_eq!(evaluate(&dh, &format!("Kd(-2S:{id})")).unwrap(), dh.kd(q.simple_class(0).scaled(-2)));
    }

    #[test]
    fn errors_point_at_the_column() {
        let dh = a1(false);
        for bad in ["E[nope]", "K(1,2)", "E[1", "Q", "v^x", "(E[1]"] {
            assert!(matches!(evaluate(&dh, bad), Err(HallError::Parse { .. })), "{bad}");
        }
    }
}
