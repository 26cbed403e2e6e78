use std::collections::BTreeMap;

use num_rational::Rational64;
use thiserror::Error;

use super::ast::*;
use super::exppoly::ExpPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    Semi,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eq,
    Ge,
    Arrow,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex_line(text: &str, line: usize, col0: usize, out: &mut Vec<Token>) -> Result<(), ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        let err = |msg: String| ParseError { line, col, msg };
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, line, col });
            i += 1;
        } else if c == '-' {
            if chars.get(i + 1) == Some(&'>') {
                out.push(Token {
                    tok: Tok::Arrow,
                    line,
                    col,
                });
                i += 2;
            } else {
                out.push(Token {
                    tok: Tok::Minus,
                    line,
                    col,
                });
                i += 1;
            }
        } else if c == '>' {
            if chars.get(i + 1) == Some(&'=') {
                out.push(Token {
                    tok: Tok::Ge,
                    line,
                    col,
                });
                i += 2;
            } else {
                return Err(err("expected '>='".into()));
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s
                .parse::<i64>()
                .map_err(|_| err(format!("integer literal {s} too large")))?;
            out.push(Token {
                tok: Tok::Int(v),
                line,
                col,
            });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line,
                col,
            });
        } else {
            return Err(err(format!("unexpected character '{c}'")));
        }
    }
    Ok(())
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

/// One parsed element of a product, before being merged into a [`Term`].
enum Item {
    Mono(MonoExpr),
    Factor(Factor),
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(ParseError {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> PResult<()> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            t => self.err(format!("expected {what}, found {}", describe(&t))),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.next();
                Ok(())
            }
            t => self.err(format!("expected '{kw}', found {}", describe(t))),
        }
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let neg = if *self.peek() == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        match self.next() {
            Tok::Int(v) => Ok(if neg { -v } else { v }),
            t => {
                self.pos -= 1;
                self.err(format!("expected integer, found {}", describe(&t)))
            }
        }
    }

    fn body(&mut self) -> PResult<RecordBody> {
        if matches!(self.peek(), Tok::Ident(s) if s == "instance") && *self.peek_at(1) == Tok::LParen {
            self.next();
            self.next();
            return Ok(RecordBody::Instance(self.instance()?));
        }
        let lhs = self.expr()?;
        self.expect(Tok::Eq, "'='")?;
        let rhs = self.expr()?;
        Ok(RecordBody::Equation { lhs, rhs })
    }

    fn instance(&mut self) -> PResult<InstanceSpec> {
        let mut spec = InstanceSpec {
            parent: self.record_id()?,
            ..Default::default()
        };
        while *self.peek() == Tok::Semi {
            self.next();
            if *self.peek() == Tok::Ident("q".into()) && *self.peek_at(1) == Tok::Arrow {
                self.next();
                self.next();
                let sign = if *self.peek() == Tok::Minus {
                    self.next();
                    -1
                } else {
                    1
                };
                self.keyword("q")?;
                let power = if *self.peek() == Tok::Caret {
                    self.next();
                    self.signed_int()?
                } else {
                    1
                };
                if power < 1 {
                    return self.err("substitution power must be positive");
                }
                spec.qsub = Some((sign, power));
                continue;
            }
            loop {
                let name = self.ident("parameter name")?;
                if spec.symbols.contains_key(&name) || spec.ints.contains_key(&name) {
                    return self.err(format!("parameter '{name}' bound twice"));
                }
                self.expect(Tok::Eq, "'='")?;
                let is_int = match (self.peek(), self.peek_at(1), self.peek_at(2)) {
                    (Tok::Int(_), t, _) => matches!(t, Tok::Comma | Tok::Semi | Tok::RParen),
                    (Tok::Minus, Tok::Int(_), t) => matches!(t, Tok::Comma | Tok::Semi | Tok::RParen),
                    _ => false,
                };
                if is_int {
                    let v = self.signed_int()?;
                    spec.ints.insert(name, v);
                } else {
                    let m = self.mono_arg()?;
                    spec.symbols.insert(name, m);
                }
                if *self.peek() == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "')'")?;
        Ok(spec)
    }

    /// Record ids may contain '-', which the lexer splits.
    fn record_id(&mut self) -> PResult<String> {
        let mut s = String::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(x) => s.push_str(&x),
                Tok::Int(v) => s.push_str(&v.to_string()),
                Tok::Minus if !s.is_empty() => s.push('-'),
                _ => break,
            }
            self.next();
        }
        if s.is_empty() || s.ends_with('-') {
            return self.err("expected record id");
        }
        Ok(s)
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut terms = Vec::new();
        let mut neg = match self.peek() {
            Tok::Minus => {
                self.next();
                true
            }
            Tok::Plus => {
                self.next();
                false
            }
            _ => false,
        };
        loop {
            let mut t = self.term()?;
            if neg {
                t.mono = t.mono.negate();
            }
            terms.push(t);
            match self.peek() {
                Tok::Plus => neg = false,
                Tok::Minus => neg = true,
                _ => break,
            }
            self.next();
        }
        Ok(Expr { terms })
    }

    fn term(&mut self) -> PResult<Term> {
        let mut term = Term::default();
        let mut divide = false;
        loop {
            if matches!(self.peek(), Tok::Ident(s) if s == "sum") && *self.peek_at(1) == Tok::LParen {
                let s = self.sum()?;
                term.factors.push((Factor::Sum(s), if divide { -1 } else { 1 }));
                return Ok(term);
            }
            let item = self.primary()?;
            let sign: i64 = if divide { -1 } else { 1 };
            match item {
                Item::Mono(m) => {
                    let e = if *self.peek() == Tok::Caret {
                        self.next();
                        self.exponent()?
                    } else {
                        ExpPoly::constant(1)
                    };
                    term.mono = term.mono.mul(&m.pow(&e.scale(Rational64::from_integer(sign))));
                }
                Item::Factor(f) => {
                    let k = if *self.peek() == Tok::Caret {
                        self.next();
                        let e = self.exponent()?;
                        match e.as_integer() {
                            Some(k) if k != 0 => k,
                            _ => {
                                return self
                                    .err("powers of Pochhammer symbols, sums and groups must be nonzero integers")
                            }
                        }
                    } else {
                        1
                    };
                    term.factors.push((f, k * sign));
                }
            }
            match self.peek() {
                Tok::Star => divide = false,
                Tok::Slash => divide = true,
                _ => return Ok(term),
            }
            self.next();
        }
    }

    fn primary(&mut self) -> PResult<Item> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.next();
                match MonoExpr::integer(v) {
                    Some(m) => Ok(Item::Mono(m)),
                    None => {
                        self.pos -= 1;
                        self.err("zero is not allowed as a factor")
                    }
                }
            }
            Tok::Ident(s) if s == "q" => {
                self.next();
                Ok(Item::Mono(MonoExpr::q_pow(ExpPoly::constant(1))))
            }
            Tok::Ident(s) if s == "poch" && *self.peek_at(1) == Tok::LParen => {
                self.next();
                self.next();
                Ok(Item::Factor(Factor::Poch(self.poch()?)))
            }
            Tok::Ident(s) if is_reserved(&s) => self.err(format!("unexpected keyword '{s}'")),
            Tok::Ident(s) => {
                self.next();
                Ok(Item::Mono(MonoExpr::symbol(&s)))
            }
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(simplify_group(e))
            }
            Tok::Minus => {
                // a leading sign inside a product, as in "(-q)^n" written "-q"
                self.next();
                match self.primary()? {
                    Item::Mono(m) => Ok(Item::Mono(m.negate())),
                    Item::Factor(_) => self.err("unary minus is only allowed on monomials here"),
                }
            }
            t => self.err(format!("expected a factor, found {}", describe(&t))),
        }
    }

    fn poch(&mut self) -> PResult<Poch> {
        let mut args = vec![self.mono_arg()?];
        while *self.peek() == Tok::Comma {
            self.next();
            args.push(self.mono_arg()?);
        }
        self.expect(Tok::Semi, "';'")?;
        self.keyword("q")?;
        let base = if *self.peek() == Tok::Caret {
            self.next();
            if *self.peek() == Tok::LParen {
                self.next();
                let b = self.signed_int()?;
                self.expect(Tok::RParen, "')'")?;
                b
            } else {
                self.signed_int()?
            }
        } else {
            1
        };
        if base < 1 {
            return self.err("Pochhammer base must be a positive power of q");
        }
        self.expect(Tok::Semi, "';'")?;
        let length = if matches!(self.peek(), Tok::Ident(s) if s == "inf") {
            self.next();
            Length::Infinite
        } else {
            Length::Finite(self.exp_expr()?)
        };
        self.expect(Tok::RParen, "')'")?;
        Ok(Poch { args, base, length })
    }

    fn mono_arg(&mut self) -> PResult<MonoExpr> {
        let neg = if *self.peek() == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        let start = self.pos;
        let t = self.term()?;
        if !t.is_mono_only() {
            self.pos = start;
            return self.err("expected a monomial");
        }
        Ok(if neg { t.mono.negate() } else { t.mono })
    }

    fn sum(&mut self) -> PResult<SumExpr> {
        self.next();
        self.next();
        let var = self.ident("summation index")?;
        if var == "q" || is_reserved(&var) {
            return self.err(format!("'{var}' cannot be a summation index"));
        }
        let range = match self.peek() {
            Tok::Ge => {
                self.next();
                Range::From(self.signed_int()?)
            }
            Tok::Ident(s) if s == "in" => {
                self.next();
                self.keyword("Z")?;
                Range::Bilateral
            }
            t => return self.err(format!("expected '>=' or 'in Z', found {}", describe(t))),
        };
        self.expect(Tok::RParen, "')'")?;
        let body = self.term()?;
        Ok(SumExpr {
            var,
            range,
            body: Box::new(body),
        })
    }

    fn exponent(&mut self) -> PResult<ExpPoly> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.next();
                Ok(ExpPoly::constant(v))
            }
            Tok::Minus => {
                self.next();
                Ok(self.exponent()?.neg())
            }
            Tok::Ident(s) if !is_reserved(&s) && s != "q" => {
                self.next();
                Ok(ExpPoly::var(&s))
            }
            Tok::LParen => {
                self.next();
                let e = self.exp_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            t => self.err(format!("expected an exponent, found {}", describe(&t))),
        }
    }

    fn exp_expr(&mut self) -> PResult<ExpPoly> {
        let mut acc = self.exp_term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.next();
                    acc = acc.add(&self.exp_term()?);
                }
                Tok::Minus => {
                    self.next();
                    acc = acc.sub(&self.exp_term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn exp_term(&mut self) -> PResult<ExpPoly> {
        let mut acc = self.exp_unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.next();
                    acc = acc.mul(&self.exp_unary()?);
                }
                Tok::Slash => {
                    self.next();
                    let d = self.exp_unary()?;
                    match d.as_constant() {
                        Some(c) if c != Rational64::from_integer(0) => acc = acc.scale(c.recip()),
                        _ => return self.err("exponents may only be divided by nonzero constants"),
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn exp_unary(&mut self) -> PResult<ExpPoly> {
        if *self.peek() == Tok::Minus {
            self.next();
            return Ok(self.exp_unary()?.neg());
        }
        let base = match self.peek().clone() {
            Tok::Int(v) => {
                self.next();
                ExpPoly::constant(v)
            }
            Tok::Ident(s) if !is_reserved(&s) && s != "q" => {
                self.next();
                ExpPoly::var(&s)
            }
            Tok::LParen => {
                self.next();
                let e = self.exp_expr()?;
                self.expect(Tok::RParen, "')'")?;
                e
            }
            t => return self.err(format!("expected an integer expression, found {}", describe(&t))),
        };
        if *self.peek() == Tok::Caret {
            self.next();
            match self.next() {
                Tok::Int(k) if (0..=8).contains(&k) => Ok(base.pow(k as u32)),
                _ => {
                    self.pos -= 1;
                    self.err("exponent powers must be small nonnegative integers")
                }
            }
        } else {
            Ok(base)
        }
    }
}

fn simplify_group(e: Expr) -> Item {
    if e.terms.len() == 1 {
        let t = &e.terms[0];
        if t.factors.is_empty() {
            return Item::Mono(t.mono.clone());
        }
        if t.mono.is_one() && t.factors.len() == 1 && t.factors[0].1 == 1 {
            return Item::Factor(t.factors[0].0.clone());
        }
    }
    Item::Factor(Factor::Group(e))
}

fn is_reserved(s: &str) -> bool {
    matches!(s, "sum" | "poch" | "inf" | "instance")
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Int(v) => format!("'{v}'"),
        Tok::End => "end of input".into(),
        other => format!("{other:?}"),
    }
}

/// Parses a stand-alone expression, such as one side of an identity.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut toks = Vec::new();
    for (i, line) in text.lines().enumerate() {
        lex_line(line, i + 1, 1, &mut toks)?;
    }
    finish(&mut toks, text);
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    validate_expr(&e).map_err(|msg| ParseError { line: 1, col: 1, msg })?;
    Ok(e)
}

/// Parses a stand-alone monomial such as `-q^2` or `a*b/q`.
pub fn parse_mono(text: &str) -> Result<MonoExpr, ParseError> {
    let mut toks = Vec::new();
    lex_line(text, 1, 1, &mut toks)?;
    finish(&mut toks, text);
    let mut p = Parser { toks, pos: 0 };
    let m = p.mono_arg()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    Ok(m)
}

fn finish(toks: &mut Vec<Token>, text: &str) {
    let line = text.lines().count().max(1);
    let col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    toks.push(Token {
        tok: Tok::End,
        line,
        col,
    });
}

/// Parses a whole source file: stanzas separated by blank lines, `#`
/// comments, `@source`/`@tags` metadata lines, then `id: lhs = rhs` or
/// `id: instance(parent; bindings; q -> q^m)`.
pub fn parse_file(text: &str) -> Result<Vec<IdentityRecord>, ParseError> {
    let mut out = Vec::new();
    let mut stanza: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().chain(std::iter::once("")).enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            if !stanza.is_empty() && !raw.trim_start().starts_with('#') {
                out.push(parse_stanza(&stanza)?);
                stanza.clear();
            }
            continue;
        }
        stanza.push((i + 1, line.to_string()));
    }
    let mut seen = BTreeMap::new();
    for r in &out {
        if seen.insert(r.id.clone(), ()).is_some() {
            return Err(ParseError {
                line: 0,
                col: 0,
                msg: format!("duplicate id '{}'", r.id),
            });
        }
    }
    Ok(out)
}

/// Parses a single record.
pub fn parse_record(text: &str) -> Result<IdentityRecord, ParseError> {
    let recs = parse_file(text)?;
    match recs.len() {
        1 => Ok(recs.into_iter().next().expect("one record")),
        n => Err(ParseError {
            line: 1,
            col: 1,
            msg: format!("expected exactly one record, found {n}"),
        }),
    }
}

fn parse_stanza(lines: &[(usize, String)]) -> Result<IdentityRecord, ParseError> {
    let mut source = None;
    let mut tags = Vec::new();
    let mut toks = Vec::new();
    let mut id: Option<String> = None;
    for (ln, text) in lines {
        let trimmed = text.trim_start();
        let indent = text.len() - trimmed.len();
        if id.is_none() {
            if let Some(rest) = trimmed.strip_prefix('@') {
                let (key, val) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                match key {
                    "source" => source = Some(val.trim().to_string()),
                    "tags" => {
                        tags = val
                            .split(',')
                            .map(|s| s.trim().to_string())
                            .filter(|s| !s.is_empty())
                            .collect()
                    }
                    _ => {
                        return Err(ParseError {
                            line: *ln,
                            col: indent + 1,
                            msg: format!("unknown metadata key '@{key}'"),
                        })
                    }
                }
                continue;
            }
            let Some((name, rest)) = trimmed.split_once(':') else {
                return Err(ParseError {
                    line: *ln,
                    col: indent + 1,
                    msg: "expected 'id: definition'".into(),
                });
            };
            let name = name.trim();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return Err(ParseError {
                    line: *ln,
                    col: indent + 1,
                    msg: format!("invalid id '{name}'"),
                });
            }
            id = Some(name.to_string());
            let offset = indent + trimmed.len() - rest.len();
            lex_line(rest, *ln, offset + 1, &mut toks)?;
        } else {
            lex_line(text, *ln, 1, &mut toks)?;
        }
    }
    let Some(id) = id else {
        return Err(ParseError {
            line: lines[0].0,
            col: 1,
            msg: "metadata without a definition".into(),
        });
    };
    let (last_line, last_text) = lines.last().expect("nonempty stanza");
    toks.push(Token {
        tok: Tok::End,
        line: *last_line,
        col: last_text.chars().count() + 1,
    });
    let first = toks[0].clone();
    let mut p = Parser { toks, pos: 0 };
    let body = p.body()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {} after definition", describe(p.peek())));
    }
    if let RecordBody::Equation { lhs, rhs } = &body {
        for e in [lhs, rhs] {
            validate_expr(e).map_err(|msg| ParseError {
                line: first.line,
                col: first.col,
                msg,
            })?;
        }
        let (syms, ints) = (lhs.symbols().union(&rhs.symbols()).cloned().collect::<Vec<_>>(), {
            let mut i = lhs.int_params();
            i.extend(rhs.int_params());
            i
        });
        if let Some(clash) = syms.iter().find(|s| ints.contains(*s)) {
            return Err(ParseError {
                line: first.line,
                col: first.col,
                msg: format!("'{clash}' is used both as a symbol and as an integer"),
            });
        }
        if syms.is_empty() && ints.is_empty() {
            for e in [lhs, rhs] {
                if let Err(super::EvalError::Invalid(super::InvalidReason::Nonterminating)) =
                    super::evaluate(e, &super::Specialization::new(), 8)
                {
                    return Err(ParseError {
                        line: first.line,
                        col: first.col,
                        msg: "a sum does not terminate in the power-series sense".into(),
                    });
                }
            }
        }
    }
    Ok(IdentityRecord { id, source, tags, body })
}

/// Checks exponent integrality and index scoping.
fn validate_expr(e: &Expr) -> Result<(), String> {
    let mut scope = Vec::new();
    for t in &e.terms {
        validate_term(t, &mut scope)?;
    }
    Ok(())
}

fn check_integral(p: &ExpPoly, what: &str) -> Result<(), String> {
    if p.is_integer_valued() {
        Ok(())
    } else {
        Err(format!("{what} {p} is not integer-valued"))
    }
}

fn validate_mono(m: &MonoExpr) -> Result<(), String> {
    check_integral(m.q_exponent(), "exponent")?;
    for (_, e) in m.constants().chain(m.symbols().map(|(_, e)| (&0, e))) {
        check_integral(e, "exponent")?;
    }
    Ok(())
}

fn validate_term(t: &Term, scope: &mut Vec<String>) -> Result<(), String> {
    validate_mono(&t.mono)?;
    if let Some(s) = t.mono.symbols().map(|(s, _)| s).find(|s| scope.contains(s)) {
        return Err(format!("summation index '{s}' used as a symbol"));
    }
    for (f, _) in &t.factors {
        match f {
            Factor::Poch(p) => {
                for a in &p.args {
                    validate_mono(a)?;
                }
                if let Length::Finite(l) = &p.length {
                    check_integral(l, "length")?;
                }
            }
            Factor::Sum(s) => {
                if scope.contains(&s.var) {
                    return Err(format!("summation index '{}' shadows an outer index", s.var));
                }
                scope.push(s.var.clone());
                validate_term(&s.body, scope)?;
                scope.pop();
            }
            Factor::Group(g) => {
                for t in &g.terms {
                    validate_term(t, scope)?;
                }
            }
        }
    }
    Ok(())
}
