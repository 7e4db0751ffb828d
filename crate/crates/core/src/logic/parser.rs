use super::{Coalition, Dialect, Formula, FormulaError, PathFormula};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LAngle,
    RAngle,
    Bound,
    Int(u64),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Bang,
    Amp,
    Pipe,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'<' if text[i..].starts_with("<<") => {
                i += 2;
                Tok::LAngle
            }
            b'>' if text[i..].starts_with(">>") => {
                i += 2;
                Tok::RAngle
            }
            b'^' => {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                if !text[i..].starts_with("<=") {
                    return Err(FormulaError::Syntax {
                        pos: start,
                        msg: "expected `^<=`".into(),
                    });
                }
                i += 2;
                Tok::Bound
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b'!' => {
                i += 1;
                Tok::Bang
            }
            b'&' => {
                i += 1;
                Tok::Amp
            }
            b'|' => {
                i += 1;
                Tok::Pipe
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i].parse().map_err(|_| FormulaError::Syntax {
                    pos: start,
                    msg: "number too large".into(),
                })?;
                Tok::Int(n)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..i].to_string())
            }
            _ => {
                return Err(FormulaError::Syntax {
                    pos: start,
                    msg: format!(
                        "unexpected character `{}`",
                        text[start..].chars().next().unwrap()
                    ),
                })
            }
        };
        out.push((start, tok));
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

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FormulaError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == name)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut left = self.and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            left = Formula::or(left, self.and()?);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut left = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            left = Formula::and(left, self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().cloned() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::LAngle) => self.strategic(),
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.or()?;
                if self.is_ident("U") {
                    return self.err("`U` needs a path quantifier or strategic modality");
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "top" => Ok(Formula::True),
                    "A" => Ok(Formula::all(self.path(None)?)),
                    "E" => Ok(Formula::exists(self.path(None)?)),
                    "AX" | "AF" | "AG" => Ok(Formula::all(self.path(Some(&name[1..]))?)),
                    "EX" | "EF" | "EG" => Ok(Formula::exists(self.path(Some(&name[1..]))?)),
                    "X" | "F" | "G" | "U" => {
                        self.pos -= 1;
                        self.err(format!(
                            "`{name}` needs a path quantifier or strategic modality"
                        ))
                    }
                    _ => Ok(Formula::Atom(name)),
                }
            }
            Some(_) => self.err("expected a formula"),
            None => self.err("unexpected end of formula"),
        }
    }

    fn strategic(&mut self) -> Result<Formula, FormulaError> {
        self.expect(Tok::LAngle, "`<<`")?;
        let mut agents = Vec::new();
        loop {
            let at = self.offset();
            match self.bump() {
                Some(Tok::Int(0)) => {
                    return Err(FormulaError::Syntax {
                        pos: at,
                        msg: "agents are numbered from 1".into(),
                    })
                }
                Some(Tok::Int(n)) => agents.push(n as usize),
                _ => {
                    self.pos -= 1;
                    return self.err("expected an agent number");
                }
            }
            match self.bump() {
                Some(Tok::Comma) => continue,
                Some(Tok::RAngle) => break,
                _ => {
                    self.pos -= 1;
                    return self.err("expected `,` or `>>`");
                }
            }
        }
        let coalition = Coalition::from_one_based(&agents).expect("agent 0 rejected above");
        let bound = if self.peek() == Some(&Tok::Bound) {
            self.pos += 1;
            match self.bump() {
                Some(Tok::Int(0)) => return Err(FormulaError::ZeroBound),
                Some(Tok::Int(k)) => Some(u32::try_from(k).map_err(|_| FormulaError::Syntax {
                    pos: self.offset(),
                    msg: "bound too large".into(),
                })?),
                _ => {
                    self.pos -= 1;
                    return self.err("expected a bound");
                }
            }
        } else {
            None
        };
        let path = Box::new(self.path(None)?);
        Ok(match bound {
            Some(bound) => Formula::Nat {
                coalition,
                bound,
                path,
            },
            None => Formula::Atl { coalition, path },
        })
    }

    fn path(&mut self, glued: Option<&str>) -> Result<PathFormula, FormulaError> {
        let op = match glued {
            Some(op) => op.to_string(),
            None => match self.peek() {
                Some(Tok::Ident(s)) if matches!(s.as_str(), "X" | "F" | "G") => {
                    let s = s.clone();
                    self.pos += 1;
                    s
                }
                Some(Tok::LParen) => {
                    self.pos += 1;
                    let left = self.or()?;
                    if !self.is_ident("U") {
                        return self.err("expected `U`");
                    }
                    self.pos += 1;
                    let right = self.or()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(PathFormula::Until(left, right));
                }
                _ => return self.err("expected X, F, G or `(φ U ψ)`"),
            },
        };
        let operand = self.unary()?;
        Ok(match op.as_str() {
            "X" => PathFormula::Next(operand),
            "F" => PathFormula::eventually(operand),
            _ => PathFormula::Globally(operand),
        })
    }
}

/// Parses without dialect restrictions.
pub(crate) fn parse_any(text: &str) -> Result<Formula, FormulaError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(FormulaError::Syntax {
            pos: 0,
            msg: "empty formula".into(),
        });
    }
    for (pos, t) in &toks {
        if let Tok::Ident(s) = t {
            if s.starts_with(|c: char| c.is_ascii_digit()) {
                return Err(FormulaError::Syntax {
                    pos: *pos,
                    msg: "identifiers cannot start with a digit".into(),
                });
            }
        }
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.or()?;
    if p.pos < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

pub fn parse_formula(text: &str, dialect: Dialect) -> Result<Formula, FormulaError> {
    let f = parse_any(text)?;
    f.check_dialect(dialect)?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, d: Dialect) -> Result<Formula, FormulaError> {
        parse_formula(text, d)
    }

    #[test]
    fn bounded_eventually() {
        let f = p("<<1>>^<=5 F p", Dialect::NatAtl).unwrap();
        assert_eq!(
            f,
            Formula::Nat {
                coalition: Coalition::new(vec![0]),
                bound: 5,
                path: Box::new(PathFormula::Until(Formula::True, Formula::atom("p"))),
            }
        );
    }

    #[test]
    fn ctl_until() {
        let f = p("A(p U q)", Dialect::Ctl).unwrap();
        assert_eq!(
            f,
            Formula::all(PathFormula::Until(Formula::atom("p"), Formula::atom("q")))
        );
        assert_eq!(
            p("AF q", Dialect::Ctl).unwrap(),
            p("A F q", Dialect::Ctl).unwrap()
        );
        assert_eq!(
            p("AF q", Dialect::Ctl).unwrap(),
            p("A(top U q)", Dialect::Ctl).unwrap()
        );
    }

    #[test]
    fn zero_bound_rejected() {
        let e = p("<<1>>^<=0 X p", Dialect::NatAtl).unwrap_err();
        assert_eq!(e, FormulaError::ZeroBound);
        assert_eq!(e.to_string(), "bound must be ≥ 1");
    }

    #[test]
    fn dialects_enforced() {
        assert!(matches!(
            p("<<1>> F p", Dialect::NatAtl),
            Err(FormulaError::Dialect(_))
        ));
        assert!(matches!(
            p("AF p", Dialect::NatAtl),
            Err(FormulaError::Dialect(_))
        ));
        assert!(matches!(
            p("<<1>>^<=2 F p", Dialect::Atl),
            Err(FormulaError::Dialect(_))
        ));
        assert!(matches!(
            p("<<1>> F p", Dialect::Ctl),
            Err(FormulaError::Dialect(_))
        ));
        assert!(p("<<1,2>> (p U q)", Dialect::Atl).is_ok());
    }

    #[test]
    fn syntax_errors_have_positions() {
        match p("p & ", Dialect::Ctl) {
            Err(FormulaError::Syntax { pos: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
        match p("<<0>> X p", Dialect::Atl) {
            Err(FormulaError::Syntax { pos: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(p("", Dialect::Ctl).is_err());
        assert!(p("p U q", Dialect::Ctl).is_err());
        assert!(p("(p U q)", Dialect::Ctl).is_err());
        assert!(p("X p", Dialect::Ctl).is_err());
        assert!(p("p q", Dialect::Ctl).is_err());
    }

    #[test]
    fn precedence() {
        let f = p("!p & q | r", Dialect::Ctl).unwrap();
        assert_eq!(
            f,
            Formula::or(
                Formula::and(Formula::not(Formula::atom("p")), Formula::atom("q")),
                Formula::atom("r")
            )
        );
        let g = p("AX p & q", Dialect::Ctl).unwrap();
        assert!(matches!(g, Formula::And(..)));
    }
}
