use super::{BoolExpr, Condition, NaturalStrategy, Regex, Rule, StrategyError};

fn err(msg: impl Into<String>) -> StrategyError {
    StrategyError::Syntax(msg.into())
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<Tok>, StrategyError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if is_ident_char(c) {
            let mut name = String::new();
            while let Some(&c) = chars.peek().filter(|c| is_ident_char(**c)) {
                name.push(c);
                chars.next();
            }
            out.push(Tok::Ident(name));
        } else if "!&|()[].*".contains(c) {
            out.push(Tok::Sym(c));
            chars.next();
        } else {
            return Err(err(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), StrategyError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(err(format!("expected `{c}`")))
        }
    }

    fn conjunction(&mut self) -> Result<BoolExpr, StrategyError> {
        let mut left = self.unary()?;
        while self.eat('&') {
            let right = self.unary()?;
            left = BoolExpr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<BoolExpr, StrategyError> {
        match self.peek().cloned() {
            Some(Tok::Sym('!')) => {
                self.pos += 1;
                Ok(BoolExpr::Not(Box::new(self.unary()?)))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let inner = self.conjunction()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(if name == "top" {
                    BoolExpr::Top
                } else {
                    BoolExpr::Atom(name)
                })
            }
            Some(Tok::Sym('|')) => Err(err("disjunction is not allowed in boolean conditions")),
            Some(Tok::Sym(c)) => Err(err(format!("unexpected `{c}`"))),
            None => Err(err("unexpected end of condition")),
        }
    }

    fn union(&mut self) -> Result<Regex, StrategyError> {
        let mut left = self.concat()?;
        while self.eat('|') {
            left = Regex::union(left, self.concat()?);
        }
        Ok(left)
    }

    fn concat(&mut self) -> Result<Regex, StrategyError> {
        let mut left = self.postfix()?;
        while self.eat('.') {
            left = Regex::concat(left, self.postfix()?);
        }
        Ok(left)
    }

    fn postfix(&mut self) -> Result<Regex, StrategyError> {
        let mut r = if self.eat('[') {
            let b = self.conjunction()?;
            self.expect(']')?;
            Regex::Letter(b)
        } else if self.eat('(') {
            let r = self.union()?;
            self.expect(')')?;
            r
        } else {
            return Err(err("expected `[` or `(` in regular condition"));
        };
        while self.eat('*') {
            r = Regex::star(r);
        }
        Ok(r)
    }

    fn finish(&self) -> Result<(), StrategyError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(err(format!("trailing input at {t:?}"))),
        }
    }
}

/// Regular if the text contains a `[` letter, boolean otherwise.
pub(super) fn parse_condition(text: &str) -> Result<Condition, StrategyError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let c = if text.contains('[') {
        Condition::Regex(p.union()?)
    } else {
        Condition::Bool(p.conjunction()?)
    };
    p.finish()?;
    Ok(c)
}

/// Splits at `sep` outside brackets.
fn split_top(text: &str, sep: char) -> Vec<&str> {
    let mut depth = 0i32;
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

fn parse_rule(text: &str) -> Result<Rule, StrategyError> {
    let inner = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| err(format!("rule `{text}` must be `(condition, action)`")))?;
    let (cond, action) = inner
        .rsplit_once(',')
        .ok_or_else(|| err(format!("rule `{text}` has no action")))?;
    let action = action.trim();
    if action.is_empty() || !action.chars().all(is_ident_char) {
        return Err(err(format!("bad action name `{action}`")));
    }
    Ok(Rule::new(parse_condition(cond.trim())?, action))
}

/// `agent N: (cond, action); ...` with a 1-based agent index.
pub(super) fn parse_strategy_line(text: &str) -> Result<NaturalStrategy, StrategyError> {
    let rest = text
        .trim()
        .strip_prefix("agent")
        .ok_or_else(|| err("strategy line must start with `agent N:`"))?;
    let (num, body) = rest
        .split_once(':')
        .ok_or_else(|| err("missing `:` after agent index"))?;
    let agent: usize = num
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| err(format!("bad agent index `{}`", num.trim())))?;
    let rules = split_top(body, ';')
        .into_iter()
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(parse_rule)
        .collect::<Result<Vec<_>, _>>()?;
    if rules.is_empty() {
        return Err(err("strategy has no rules"));
    }
    Ok(NaturalStrategy::new(agent - 1, rules))
}
