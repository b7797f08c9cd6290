//! The element expression language.
//!
//! ```text
//! element := term (('+'|'-') term)*
//! term    := scalar '*'? gen | gen
//! gen     := word '.' '{' atoms '}' ('|' word)?
//! word    := 'e' | letters (segmented against the alphabet)
//! scalar  := rational | '(' rational (('+'|'-') rational 'i')? ')'
//! ```
//!
//! `a.{v}` is the isometry of the word `a` over `{v}`; `a.{v}|aa`
//! carries the adjoint word `aa`; `e.{v}` is the projection of `{v}`.
//! Group elements for the CLI are written `word`, `e`, or
//! `word1/word2` for word1 · word2^{-1}.

use num::{BigInt, BigRational};

use crate::dynamics::{Gbds, Word};
use crate::error::Error;
use crate::genalg::{AlgElement, GenTriple};
use crate::groupoid::GroupElem;
use crate::lattice::AtomSet;
use crate::paths::Cylinder;
use crate::scalar::Scalar;

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text: text.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect(&mut self, c: u8) -> Result<(), Error> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += 1;
                Ok(())
            }
            Some(got) => {
                Err(self.err(format!("expected `{}`, found `{}`", c as char, got as char)))
            }
            None => Err(self.err(format!("expected `{}`, found end of input", c as char))),
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn take_while(&mut self, pred: impl Fn(u8) -> bool) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && pred(self.text[self.pos]) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.text[start..self.pos]).unwrap()
    }

    fn digits(&mut self) -> Result<BigInt, Error> {
        let s = self.take_while(|c| c.is_ascii_digit());
        if s.is_empty() {
            return Err(self.err("expected digits"));
        }
        Ok(s.parse().unwrap())
    }

    /// rational := ['-'] digits ('/' digits)?
    fn rational(&mut self) -> Result<BigRational, Error> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let numer = self.digits()?;
        let denom = if self.peek() == Some(b'/') {
            self.pos += 1;
            let d = self.digits()?;
            if d == BigInt::from(0) {
                return Err(self.err("zero denominator"));
            }
            d
        } else {
            BigInt::from(1)
        };
        let r = BigRational::new(numer, denom);
        Ok(if neg { -r } else { r })
    }

    /// scalar := rational | '(' rational (('+'|'-') rational 'i')? ')'
    fn scalar(&mut self) -> Result<Scalar, Error> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let re = self.rational()?;
            let mut im = BigRational::from_integer(0.into());
            match self.peek() {
                Some(b'+') | Some(b'-') => {
                    let neg = self.bump() == Some(b'-');
                    let mag = self.rational()?;
                    self.expect(b'i')?;
                    im = if neg { -mag } else { mag };
                }
                Some(b'i') => {
                    // pure form like (2i) is not in the grammar;
                    // require an explicit real part
                    return Err(self.err("expected `+` or `-` before the imaginary part"));
                }
                _ => {}
            }
            self.expect(b')')?;
            Ok(Scalar::from_parts(re, im))
        } else {
            Ok(Scalar::from_parts(
                self.rational()?,
                BigRational::from_integer(0.into()),
            ))
        }
    }

    /// A word token: raw name characters, segmented against the
    /// alphabet afterwards.
    fn word_token(&mut self) -> Result<&'a str, Error> {
        let s = self.take_while(|c| c.is_ascii_alphanumeric() || c == b'_');
        if s.is_empty() {
            return Err(self.err("expected a word"));
        }
        Ok(s)
    }

    fn atoms(&mut self, sys: &Gbds) -> Result<AtomSet, Error> {
        self.expect(b'{')?;
        let mut set = sys.algebra().empty();
        loop {
            match self.peek() {
                Some(b'}') => {
                    self.pos += 1;
                    break;
                }
                Some(_) => {
                    let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == b'_');
                    if name.is_empty() {
                        return Err(self.err("expected an atom name"));
                    }
                    match sys.algebra().atom_by_name(name) {
                        Some(a) => set = set.join(&sys.algebra().singleton(a)),
                        None => return Err(self.err(format!("unknown atom `{name}`"))),
                    }
                    if self.peek() == Some(b',') {
                        self.pos += 1;
                    }
                }
                None => return Err(self.err("unterminated atom set")),
            }
        }
        Ok(set)
    }

    /// gen := word '.' '{' atoms '}' ('|' word)?
    fn generator(&mut self, sys: &Gbds) -> Result<GenTriple, Error> {
        let pos = self.pos;
        let word = self.word_token()?;
        let left = segment_word(sys, word).ok_or_else(|| Error::Parse {
            offset: pos,
            msg: format!("cannot read `{word}` over the alphabet"),
        })?;
        self.expect(b'.')?;
        let set = self.atoms(sys)?;
        let right = if self.peek() == Some(b'|') {
            self.pos += 1;
            let pos = self.pos;
            let word = self.word_token()?;
            segment_word(sys, word).ok_or_else(|| Error::Parse {
                offset: pos,
                msg: format!("cannot read `{word}` over the alphabet"),
            })?
        } else {
            Word::empty()
        };
        GenTriple::new(sys, left, set, right)
    }

    fn term(&mut self, sys: &Gbds) -> Result<AlgElement, Error> {
        // a term starts with a scalar exactly when it starts with a
        // digit, a sign, or an opening parenthesis
        let scalar_ahead =
            matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'(' || c == b'-');
        if scalar_ahead {
            let c = self.scalar()?;
            if self.peek() == Some(b'*') {
                self.pos += 1;
            }
            let gen = self.generator(sys)?;
            Ok(AlgElement::from_terms([(gen, c)]))
        } else {
            Ok(AlgElement::from_triple(self.generator(sys)?))
        }
    }

    fn element(&mut self, sys: &Gbds) -> Result<AlgElement, Error> {
        let mut acc = self.term(sys)?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term(sys)?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term(sys)?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }
}

/// Segment a raw token into alphabet letters; `e` is the empty word.
/// Longest letters are tried first, with backtracking, so multi-letter
/// names work as long as the spelling is unambiguous.
pub fn segment_word(sys: &Gbds, token: &str) -> Option<Word> {
    if token == "e" {
        return Some(Word::empty());
    }
    let mut names: Vec<(usize, u8)> = sys
        .letters()
        .map(|l| (sys.letter_name(l).len(), l))
        .collect();
    names.sort_by_key(|&(len, _)| std::cmp::Reverse(len));
    fn go(sys: &Gbds, names: &[(usize, u8)], rest: &str, acc: &mut Vec<u8>) -> bool {
        if rest.is_empty() {
            return true;
        }
        for &(len, l) in names {
            if rest.len() >= len && &rest[..len] == sys.letter_name(l) {
                acc.push(l);
                if go(sys, names, &rest[len..], acc) {
                    return true;
                }
                acc.pop();
            }
        }
        false
    }
    let mut acc = Vec::new();
    if go(sys, &names, token, &mut acc) {
        Some(Word(acc))
    } else {
        None
    }
}

/// Parse an element expression against a loaded system.
pub fn parse_element(sys: &Gbds, text: &str) -> Result<AlgElement, Error> {
    let mut p = Parser::new(text);
    let e = p.element(sys)?;
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Parse a group element: `e`, a word, or `word1/word2` meaning
/// word1 · word2^{-1}.
pub fn parse_group_elem(sys: &Gbds, text: &str) -> Result<GroupElem, Error> {
    let mut p = Parser::new(text);
    let pos = p.pos;
    let first = p.word_token()?;
    let w1 = segment_word(sys, first).ok_or_else(|| Error::Parse {
        offset: pos,
        msg: format!("cannot read `{first}` over the alphabet"),
    })?;
    let w2 = if p.peek() == Some(b'/') {
        p.pos += 1;
        let pos = p.pos;
        let second = p.word_token()?;
        segment_word(sys, second).ok_or_else(|| Error::Parse {
            offset: pos,
            msg: format!("cannot read `{second}` over the alphabet"),
        })?
    } else {
        Word::empty()
    };
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(GroupElem::transfer(&w1, &w2))
}

/// Parse a cylinder `word.{atoms}`.
pub fn parse_cylinder(sys: &Gbds, text: &str) -> Result<Cylinder, Error> {
    let mut p = Parser::new(text);
    let pos = p.pos;
    let token = p.word_token()?;
    let word = segment_word(sys, token).ok_or_else(|| Error::Parse {
        offset: pos,
        msg: format!("cannot read `{token}` over the alphabet"),
    })?;
    p.expect(b'.')?;
    let set = p.atoms(sys)?;
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Cylinder::new(sys, word, set)
}

/// Parse a plain word (`e` for the empty word).
pub fn parse_word(sys: &Gbds, text: &str) -> Result<Word, Error> {
    let mut p = Parser::new(text);
    let pos = p.pos;
    let token = p.word_token()?;
    let word = segment_word(sys, token).ok_or_else(|| Error::Parse {
        offset: pos,
        msg: format!("cannot read `{token}` over the alphabet"),
    })?;
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parse_examples() {
        let f1 = fixtures::f1();
        let x = parse_element(&f1, "a.{v}").unwrap();
        let (t, c) = x.terms().next().unwrap();
        assert_eq!(t.left, Word(vec![0]));
        assert!(t.right.is_empty());
        assert!(c.is_one());

        let two_term = parse_element(&f1, "2*a.{v}|aa + e.{v}").unwrap();
        assert_eq!(two_term.term_count(), 2);

        let complex = parse_element(&f1, "(2+1i)*a.{v}|aa").unwrap();
        let (_, c) = complex.terms().next().unwrap();
        assert_eq!(c.to_string(), "(2+1i)");
    }

    #[test]
    fn unknown_letter_rejected() {
        let f4 = fixtures::f4();
        assert!(parse_element(&f4, "a.{1,2}|b").is_err());
    }

    #[test]
    fn invariant_violation_rejected() {
        // {1} is not in the ideal of `aa` on f4 (gen is {2})
        let f4 = fixtures::f4();
        assert!(parse_element(&f4, "aa.{1}").is_err());
        assert!(parse_element(&f4, "a.{}").is_err());
    }

    #[test]
    fn roundtrip_display_parse() {
        let f2 = fixtures::f2();
        for text in [
            "a.{v}",
            "e.{v}",
            "a.{v}|ab",
            "2*a.{v} + (1-2i)*b.{v}|a",
            "-3/4*ab.{v}",
        ] {
            let x = parse_element(&f2, text).unwrap();
            let printed = x.display(&f2).to_string();
            let y = parse_element(&f2, &printed).unwrap();
            assert_eq!(x, y, "round trip failed for `{text}` -> `{printed}`");
        }
    }

    #[test]
    fn group_elem_parsing() {
        let f2 = fixtures::f2();
        let t = parse_group_elem(&f2, "ab/b").unwrap();
        // ab·b^{-1} reduces to a
        assert_eq!(t, GroupElem::from_word(&Word(vec![0])));
        assert!(parse_group_elem(&f2, "e").unwrap().is_identity());
        let inv = parse_group_elem(&f2, "e/a").unwrap();
        assert_eq!(inv, GroupElem::from_word(&Word(vec![0])).inverse());
    }

    #[test]
    fn position_annotated_errors() {
        let f1 = fixtures::f1();
        match parse_element(&f1, "a.{v} + a.{w}") {
            Err(Error::Parse { offset, .. }) => assert!(offset > 6),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
