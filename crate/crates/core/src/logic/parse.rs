//! Text syntax.
//!
//! The canonical printer parenthesizes every binary connective. The parser
//! also accepts unparenthesized chains, binding `&` tightest, then `|`, then
//! `->` (to the right), then `<->`. Quantifier bodies are unary: a quantifier,
//! a negation, an atom, or a parenthesized formula. `#` starts a comment.

use super::{Formula, IndVar, PredVar};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Equals,
    All,
    Ex,
    Ind(String),
    Pred(PredVar),
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Not => "'~'".into(),
        Tok::And => "'&'".into(),
        Tok::Or => "'|'".into(),
        Tok::Implies => "'->'".into(),
        Tok::Iff => "'<->'".into(),
        Tok::Equals => "'='".into(),
        Tok::All => "'all'".into(),
        Tok::Ex => "'ex'".into(),
        Tok::Ind(s) => format!("variable {s}"),
        Tok::Pred(p) => format!("predicate variable {p}"),
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { pos, msg: msg.into() }
}

fn pred_var(word: &str, pos: usize) -> Result<PredVar> {
    let stem_len = word.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(word.len());
    let (stem, rest) = word.split_at(stem_len);
    let (arity, index) = match rest.split_once('_') {
        Some((a, i)) => (a, Some(i)),
        None => (rest, None),
    };
    let bad = || syntax(pos, format!("malformed predicate variable {word:?}; expected e.g. A1, T2 or B1_3"));
    if arity.is_empty() || !arity.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let arity: usize = arity.parse().map_err(|_| bad())?;
    if arity == 0 {
        return Err(syntax(pos, format!("predicate variable {word} has arity 0")));
    }
    let index = match index {
        Some(i) if !i.is_empty() && i.bytes().all(|b| b.is_ascii_digit()) => Some(i.parse().map_err(|_| bad())?),
        Some(_) => return Err(bad()),
        None => None,
    };
    Ok(PredVar {
        stem: stem.to_string(),
        arity,
        index,
    })
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' => {
                out.push((start, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((start, Tok::RParen));
                i += 1;
            }
            b'~' => {
                out.push((start, Tok::Not));
                i += 1;
            }
            b'&' => {
                out.push((start, Tok::And));
                i += 1;
            }
            b'|' => {
                out.push((start, Tok::Or));
                i += 1;
            }
            b'=' => {
                out.push((start, Tok::Equals));
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((start, Tok::Implies));
                i += 2;
            }
            b'<' if bytes[i..].starts_with(b"<->") => {
                out.push((start, Tok::Iff));
                i += 3;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "all" => Tok::All,
                    "ex" => Tok::Ex,
                    w if c.is_ascii_uppercase() => Tok::Pred(pred_var(w, start)?),
                    w => Tok::Ind(w.to_string()),
                };
                out.push((start, tok));
            }
            _ => {
                let ch = text[start..].chars().next().expect("non-empty remainder");
                return Err(syntax(start, format!("unexpected character {ch:?}")));
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let at = self.offset();
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(syntax(at, format!("expected {}, found {}", describe(&want), describe(&t)))),
            None => Err(syntax(at, format!("expected {}, found end of input", describe(&want)))),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut left = self.implication()?;
        while self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            let right = self.implication()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula> {
        let left = self.disjunction()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut left = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            left = Formula::or(left, self.conjunction()?);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            left = Formula::and(left, self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula> {
        let at = self.offset();
        match self.next() {
            Some(Tok::Not) => Ok(Formula::not(self.unary()?)),
            Some(Tok::LParen) => {
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(q @ (Tok::All | Tok::Ex)) => {
                let var_at = self.offset();
                let universal = q == Tok::All;
                match self.next() {
                    Some(Tok::Ind(v)) => {
                        let v = IndVar(v);
                        let body = self.unary()?;
                        Ok(if universal { Formula::forall(&v, body) } else { Formula::exists(&v, body) })
                    }
                    Some(Tok::Pred(p)) => {
                        let body = self.unary()?;
                        Ok(if universal { Formula::forall_pred(&p, body) } else { Formula::exists_pred(&p, body) })
                    }
                    Some(t) => Err(syntax(var_at, format!("expected a variable after quantifier, found {}", describe(&t)))),
                    None => Err(syntax(var_at, "expected a variable after quantifier, found end of input")),
                }
            }
            Some(Tok::Pred(p)) => {
                let mut args = Vec::new();
                while let Some(Tok::Ind(v)) = self.peek() {
                    args.push(IndVar(v.clone()));
                    self.pos += 1;
                }
                if args.len() != p.arity {
                    return Err(Error::PredicateArity {
                        var: p.to_string(),
                        expected: p.arity,
                        found: args.len(),
                    });
                }
                Ok(Formula::Pred(p, args))
            }
            Some(Tok::Ind(a)) => {
                self.expect(Tok::Equals)?;
                let rhs_at = self.offset();
                match self.next() {
                    Some(Tok::Ind(b)) => Ok(Formula::Eq(IndVar(a), IndVar(b))),
                    Some(t) => Err(syntax(rhs_at, format!("expected a variable after '=', found {}", describe(&t)))),
                    None => Err(syntax(rhs_at, "expected a variable after '=', found end of input")),
                }
            }
            Some(t) => Err(syntax(at, format!("unexpected {}", describe(&t)))),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        let at = p.offset();
        let t = p.next().expect("token present");
        return Err(syntax(at, format!("trailing input starting with {}", describe(&t))));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn round_trip_examples() {
        let f = parse("all x1 ( A1 x1 -> ex T2 T2 x1 x1 )").unwrap();
        assert_eq!(f.to_string(), "all x1 (A1 x1 -> ex T2 T2 x1 x1)");
        assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn bare_biconditional() {
        let f = parse("D1 y1 <-> S2 x1 y1").unwrap();
        assert!(matches!(f, Formula::Iff(..)));
        assert_eq!(f.to_string(), "(D1 y1 <-> S2 x1 y1)");
    }

    #[test]
    fn arity_error() {
        assert_eq!(
            parse("A1 x1 x2"),
            Err(Error::PredicateArity {
                var: "A1".into(),
                expected: 1,
                found: 2
            })
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse("a = b & c = d | e = f -> g = h -> i = j <-> k = l").unwrap();
        assert_eq!(
            f.to_string(),
            "((((a = b & c = d) | e = f) -> (g = h -> i = j)) <-> k = l)"
        );
        assert_eq!(parse("~x1 = x2 & x1 = x1").unwrap().to_string(), "(~x1 = x2 & x1 = x1)");
        assert_eq!(parse("all x1 x1 = x1 & x2 = x2").unwrap().to_string(), "(all x1 x1 = x1 & x2 = x2)");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert!(matches!(parse("(x1 = x2"), Err(Error::Syntax { pos: 8, .. })));
        assert!(matches!(parse("x1 = "), Err(Error::Syntax { pos: 5, .. })));
        assert!(matches!(parse("x1 = x2 $"), Err(Error::Syntax { pos: 8, .. })));
        assert!(matches!(parse("A0 x1"), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse("all = x1"), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse("x1 = x2 x3"), Err(Error::Syntax { pos: 8, .. })));
    }

    #[test]
    fn indexed_predicates_and_comments() {
        let f = parse("# cell formula\nB1_2 x1 & x1 = x1").unwrap();
        assert_eq!(f.to_string(), "(B1_2 x1 & x1 = x1)");
    }

    fn ind() -> impl Strategy<Value = IndVar> {
        prop::sample::select(vec!["x1", "x2", "y0_1", "z"]).prop_map(IndVar::new)
    }

    fn pred() -> impl Strategy<Value = PredVar> {
        prop::sample::select(vec![
            PredVar::new("A", 1),
            PredVar::new("T", 2),
            PredVar::indexed("B", 1, 2),
            PredVar::new("S", 3),
        ])
    }

    fn formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            (ind(), ind()).prop_map(|(a, b)| Formula::Eq(a, b)),
            (pred(), prop::collection::vec(ind(), 3)).prop_map(|(p, mut args)| {
                args.truncate(p.arity);
                Formula::Pred(p, args)
            }),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
                (ind(), inner.clone()).prop_map(|(v, f)| Formula::forall(&v, f)),
                (ind(), inner.clone()).prop_map(|(v, f)| Formula::exists(&v, f)),
                (pred(), inner.clone()).prop_map(|(p, f)| Formula::forall_pred(&p, f)),
                (pred(), inner).prop_map(|(p, f)| Formula::exists_pred(&p, f)),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_print(f in formula()) {
            prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
        }
    }
}
