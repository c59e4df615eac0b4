//! Tokenizer and recursive-descent parser for the expression language.
//!
//! Precedence from loosest: `@`, `+`, `*`, `^` (right associative).

use num_bigint::BigUint;

use super::CliError;

/// Nesting limit, a guard against stack exhaustion on hostile input.
const MAX_NESTING: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Mul,
    Pow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arg {
    pub key: Option<String>,
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Nat(BigUint),
    Name(String),
    Index(String, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Arg>),
    /// `e @ alpha`: evaluate `e` in the universe `alpha`.
    At(Box<Expr>, Box<Expr>),
    Set(Vec<Expr>),
    List(Vec<Expr>),
    /// `[a, b)`
    Span(Box<Expr>, Box<Expr>),
    Tuple(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Nat(BigUint),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Nat(n) => format!("number {n}"),
        Tok::Ident(s) => format!("name {s}"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of input".into(),
    }
}

fn lex(src: &str, line: usize) -> Result<Vec<Token>, CliError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Nat(digits.parse().expect("ascii digits")), col });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), col });
        } else if "+*^()[]{},;=@".contains(c) {
            out.push(Token { tok: Tok::Sym(c), col });
            i += 1;
        } else {
            return Err(CliError::Syntax { line, col, expected: format!("a token, found '{c}'") });
        }
    }
    out.push(Token { tok: Tok::End, col: chars.len() + 1 });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    line: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, CliError> {
        let t = &self.toks[self.pos];
        let expected = match t.tok {
            Tok::End => expected.to_string(),
            _ => format!("{expected}, found {}", describe(&t.tok)),
        };
        Err(CliError::Syntax { line: self.line, col: t.col, expected })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), CliError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(&format!("'{c}'"))
        }
    }

    fn nested<T>(&mut self, f: impl FnOnce(&mut Parser) -> Result<T, CliError>) -> Result<T, CliError> {
        if self.depth >= MAX_NESTING {
            return self.fail("shallower nesting");
        }
        self.depth += 1;
        let r = f(self);
        self.depth -= 1;
        r
    }

    fn expr(&mut self) -> Result<Expr, CliError> {
        let e = self.sum()?;
        if self.eat('@') {
            let u = self.sum()?;
            return Ok(Expr::At(Box::new(e), Box::new(u)));
        }
        Ok(e)
    }

    fn sum(&mut self) -> Result<Expr, CliError> {
        let mut e = self.product()?;
        while self.eat('+') {
            let r = self.product()?;
            e = Expr::Bin(BinOp::Add, Box::new(e), Box::new(r));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<Expr, CliError> {
        let mut e = self.power()?;
        while self.eat('*') {
            let r = self.power()?;
            e = Expr::Bin(BinOp::Mul, Box::new(e), Box::new(r));
        }
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr, CliError> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.nested(Parser::power)?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    /// Comma-separated items up to one of `closers`; returns the closer.
    fn items(&mut self, closers: &[char]) -> Result<(Vec<Expr>, char), CliError> {
        let mut items = Vec::new();
        loop {
            if let Tok::Sym(c) = *self.peek() {
                if closers.contains(&c) {
                    self.bump();
                    return Ok((items, c));
                }
            }
            if !items.is_empty() {
                if !self.eat(',') {
                    let want: Vec<String> = closers.iter().map(|c| format!("'{c}'")).collect();
                    return self.fail(&format!("',' or {}", want.join(" or ")));
                }
                // a trailing comma is allowed
                if let Tok::Sym(c) = *self.peek() {
                    if closers.contains(&c) {
                        self.bump();
                        return Ok((items, c));
                    }
                }
            }
            items.push(self.nested(Parser::expr)?);
        }
    }

    fn args(&mut self) -> Result<Vec<Arg>, CliError> {
        let mut args = Vec::new();
        if self.eat(')') {
            return Ok(args);
        }
        loop {
            let key = match (self.peek().clone(), self.peek2()) {
                (Tok::Ident(k), Tok::Sym('=')) => {
                    self.bump();
                    self.bump();
                    Some(k)
                }
                _ => None,
            };
            let value = self.nested(Parser::expr)?;
            args.push(Arg { key, value });
            if self.eat(')') {
                return Ok(args);
            }
            if !self.eat(',') && !self.eat(';') {
                return self.fail("',' or ';' or ')'");
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, CliError> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                Ok(Expr::Nat(n))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat('[') {
                    let idx = self.nested(Parser::expr)?;
                    self.expect(']')?;
                    Ok(Expr::Index(name, Box::new(idx)))
                } else if self.eat('(') {
                    let args = self.nested(Parser::args)?;
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Name(name))
                }
            }
            Tok::Sym('(') => {
                self.bump();
                let (mut items, _) = self.nested(|p| p.items(&[')']))?;
                match items.len() {
                    0 => self.fail("an expression"),
                    1 => Ok(items.pop().expect("one item")),
                    _ => Ok(Expr::Tuple(items)),
                }
            }
            Tok::Sym('[') => {
                self.bump();
                let (mut items, close) = self.nested(|p| p.items(&[']', ')']))?;
                if close == ']' {
                    return Ok(Expr::List(items));
                }
                if items.len() != 2 {
                    return self.fail("a half-open span [a, b)");
                }
                let hi = items.pop().expect("two items");
                let lo = items.pop().expect("two items");
                Ok(Expr::Span(Box::new(lo), Box::new(hi)))
            }
            Tok::Sym('{') => {
                self.bump();
                let (items, _) = self.nested(|p| p.items(&['}']))?;
                Ok(Expr::Set(items))
            }
            _ => self.fail("an expression"),
        }
    }
}

/// Parses one expression; `line` only labels errors.
pub fn parse_line(src: &str, line: usize) -> Result<Expr, CliError> {
    let toks = lex(src, line)?;
    let mut p = Parser { toks, pos: 0, line, depth: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("end of input or an operator");
    }
    Ok(e)
}

pub fn parse(src: &str) -> Result<Expr, CliError> {
    parse_line(src, 1)
}
