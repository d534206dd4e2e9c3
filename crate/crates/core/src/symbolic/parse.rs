//! Element expressions.
//!
//! ```text
//! expr     := term ("*" term)*
//! term     := atom ("^" exponent)?
//! atom     := "g" | "s" | "id" | "a" INT | "z" "[" dyadic "]" | "(" expr ")"
//! exponent := dyadic
//! dyadic   := signed INT | signed INT "%" INT
//! ```
//!
//! `g` is γ, `s` is the root swap σ (only where a portrait is wanted), and
//! `z[5%16]` is `z_k` with `k ≡ 5 mod 2^16`. Whitespace is ignored.

use num_traits::ToPrimitive;

use crate::portrait::{check_depth, Portrait};
use crate::{Dyadic, Error, Result};

use super::{truncate_word, GeneratorSystem, Letter, Word};

#[derive(Clone, Debug, PartialEq)]
enum Atom {
    Gamma,
    Sigma,
    Id,
    A(u32),
    Z(Dyadic),
    Group(Vec<Term>),
}

#[derive(Clone, Debug, PartialEq)]
struct Term {
    atom: Atom,
    exp: Option<Dyadic>,
    // Byte offset, for error messages.
    pos: usize,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn err(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(err(self.pos, format!("expected '{c}'")))
        }
    }

    fn digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest.bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return Err(err(start, "expected digits"));
        }
        self.pos += len;
        Ok(&self.src[start..start + len])
    }

    fn dyadic(&mut self) -> Result<Dyadic> {
        self.skip_ws();
        let start = self.pos;
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let digits = self.digits()?;
        let mut text = String::new();
        if neg {
            text.push('-');
        }
        text.push_str(digits);
        if self.eat('%') {
            let p = self.digits()?;
            text.push('%');
            text.push_str(p);
        }
        text.parse::<Dyadic>().map_err(|e| match e {
            Error::Syntax { message, .. } => err(start, message),
            other => other,
        })
    }

    fn expr(&mut self) -> Result<Vec<Term>> {
        let mut terms = vec![self.term()?];
        while self.eat('*') {
            terms.push(self.term()?);
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        let pos = self.pos;
        let atom = self.atom()?;
        let exp = if self.eat('^') {
            Some(self.dyadic()?)
        } else {
            None
        };
        Ok(Term { atom, exp, pos })
    }

    fn atom(&mut self) -> Result<Atom> {
        self.skip_ws();
        let pos = self.pos;
        let rest = &self.src[pos..];
        if rest.starts_with("id") {
            self.pos += 2;
            return Ok(Atom::Id);
        }
        match rest.chars().next() {
            Some('g') => {
                self.pos += 1;
                Ok(Atom::Gamma)
            }
            Some('s') => {
                self.pos += 1;
                Ok(Atom::Sigma)
            }
            Some('a') => {
                self.pos += 1;
                let d = self.digits()?;
                let i = d
                    .parse::<u32>()
                    .map_err(|_| err(pos, "generator index too large"))?;
                Ok(Atom::A(i))
            }
            Some('z') => {
                self.pos += 1;
                self.expect('[')?;
                let kpos = self.pos;
                let k = self.dyadic()?;
                if !k.is_unit() {
                    return Err(err(kpos, format!("z-index {k} is even; z_k needs a unit")));
                }
                self.expect(']')?;
                Ok(Atom::Z(k))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(Atom::Group(inner))
            }
            Some(c) => Err(err(pos, format!("unexpected '{c}'"))),
            None => Err(err(pos, "unexpected end of input")),
        }
    }
}

fn parse_terms(text: &str) -> Result<Vec<Term>> {
    let mut p = Parser { src: text, pos: 0 };
    let terms = p.expr()?;
    if p.peek().is_some() {
        return Err(err(p.pos, "trailing input"));
    }
    Ok(terms)
}

fn int_exponent(t: &Term) -> Result<i64> {
    match &t.exp {
        None => Ok(1),
        Some(e) => {
            if !e.is_exact() {
                return Err(err(t.pos, format!("exponent {e} must be an integer here")));
            }
            e.value()
                .to_i64()
                .ok_or_else(|| err(t.pos, "exponent out of range"))
        }
    }
}

fn terms_to_word(terms: &[Term], sys: &GeneratorSystem) -> Result<Word> {
    let mut letters = Vec::new();
    for t in terms {
        match &t.atom {
            Atom::Gamma => letters.push(Letter::gamma(t.exp.clone().unwrap_or_else(Dyadic::one))),
            Atom::Id => {
                int_exponent(t)?;
            }
            Atom::Sigma => {
                return Err(err(t.pos, "'s' is only allowed in portrait expressions"));
            }
            Atom::A(i) => {
                if *i == 0 || *i > sys.r() {
                    return Err(err(
                        t.pos,
                        format!("generator a{i} outside a1..a{}", sys.r()),
                    ));
                }
                letters.push(Letter::a(*i, int_exponent(t)?));
            }
            Atom::Z(k) => letters.push(Letter {
                base: super::Base::Z(k.clone()),
                exp: Dyadic::exact(int_exponent(t)?),
            }),
            Atom::Group(inner) => {
                let w = terms_to_word(inner, sys)?;
                letters.extend_from_slice(w.pow(int_exponent(t)?).letters());
            }
        }
    }
    Ok(Word::from_letters(letters))
}

/// Parses a group element; letters keep their written order.
pub fn parse_expression(text: &str, sys: &GeneratorSystem) -> Result<Word> {
    terms_to_word(&parse_terms(text)?, sys)
}

/// A parsed expression that may mention `s`.
#[derive(Clone, Debug)]
pub struct PortraitExpr {
    terms: Vec<Term>,
}

impl PortraitExpr {
    /// The word, if the expression does not use `s`.
    pub fn as_word(&self, sys: &GeneratorSystem) -> Result<Word> {
        terms_to_word(&self.terms, sys)
    }

    pub fn evaluate(&self, n: u32, sys: &GeneratorSystem) -> Result<Portrait> {
        check_depth(n)?;
        eval_terms(&self.terms, n, sys)
    }
}

fn eval_terms(terms: &[Term], n: u32, sys: &GeneratorSystem) -> Result<Portrait> {
    let mut acc = Portrait::identity(n);
    for t in terms {
        let p = match &t.atom {
            Atom::Sigma => {
                let s = if n == 0 {
                    Portrait::identity(0)
                } else {
                    Portrait::sigma(n)?
                };
                s.pow_signed(int_exponent(t)?)
            }
            Atom::Group(inner) => eval_terms(inner, n, sys)?.pow_signed(int_exponent(t)?),
            _ => truncate_word(&terms_to_word(std::slice::from_ref(t), sys)?, n, sys)?,
        };
        acc = acc.then(&p);
    }
    Ok(acc)
}

/// Parses an expression for evaluation as a portrait; `s` is allowed.
pub fn parse_portrait_expression(text: &str) -> Result<PortraitExpr> {
    Ok(PortraitExpr {
        terms: parse_terms(text)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys() -> GeneratorSystem {
        GeneratorSystem::basilica()
    }

    #[test]
    fn examples() {
        let w = parse_expression("a1*z[3]", &sys()).unwrap();
        assert_eq!(w.letters(), &[Letter::a(1, 1), Letter::z(3)]);
        let w = parse_expression("g^-1*z[5%16]", &sys()).unwrap();
        assert_eq!(
            w.letters(),
            &[Letter::gamma(-1), Letter::z(Dyadic::residue(5, 16))]
        );
        assert!(matches!(
            parse_expression("z[4]", &sys()),
            Err(Error::Syntax { position: 2, .. })
        ));
    }

    #[test]
    fn errors_and_groups() {
        assert!(parse_expression("a3", &sys()).is_err());
        assert!(parse_expression("s", &sys()).is_err());
        assert!(parse_expression("a1*", &sys()).is_err());
        assert!(parse_expression("a1 a2", &sys()).is_err());
        let w = parse_expression("(a1*a2)^2", &sys()).unwrap();
        assert_eq!(w.len(), 4);
        let w = parse_expression("id", &sys()).unwrap();
        assert!(w.is_empty());
        let w = parse_expression(" g ^ 5%8 ", &sys()).unwrap();
        assert_eq!(w.letters(), &[Letter::gamma(Dyadic::residue(5, 8))]);
        assert!(parse_expression("a1^3%8", &sys()).is_err());
    }

    #[test]
    fn portrait_context() {
        let e = parse_portrait_expression("s*g").unwrap();
        assert!(e.as_word(&sys()).is_err());
        let p = e.evaluate(3, &sys()).unwrap();
        let expect = Portrait::sigma(3).unwrap().then(&Portrait::gamma(3));
        assert_eq!(p, expect);
    }
}
