//! The expression DSL: sums, scalar multiples, weighted braces, the
//! circular product `(.)`, inverses `(...)^(-1)`, the differential `d(...)`
//! and the gauge action `act(g, a)`. Decorated-tree literals like
//! `a[b,b[c]]` are atoms, so canonically printed elements parse back.

use gpl_core::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    One,
    Number(String),
    Tree(String),
    Sum(Vec<(bool, Expr)>),
    ScalarMul(String, Box<Expr>),
    Star(Box<Expr>, Box<Expr>),
    Circ(Box<Expr>, Box<Expr>),
    CircInverse(Box<Expr>),
    Differential(Box<Expr>),
    GaugeAct(Box<Expr>, Box<Expr>),
    Brace(Box<Expr>, Vec<Expr>, Vec<u32>),
}

pub struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str) -> Parser<'a> {
        Parser { src, bytes: src.as_bytes(), pos: 0 }
    }

    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser::new(src);
        let e = p.expr()?;
        p.ws();
        if p.pos != p.bytes.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    fn error(&self, msg: &str) -> Error {
        let line = 1 + self.src[..self.pos].matches('\n').count();
        let col = self.pos - self.src[..self.pos].rfind('\n').map_or(0, |i| i + 1) + 1;
        Error::SyntaxError { line, col, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        let negative = self.eat("-");
        terms.push((negative, self.term()?));
        loop {
            if self.eat("+") {
                terms.push((false, self.term()?));
            } else if self.eat("-") {
                terms.push((true, self.term()?));
            } else {
                break;
            }
        }
        if terms.len() == 1 && !terms[0].0 {
            Ok(terms.pop().unwrap().1)
        } else {
            Ok(Expr::Sum(terms))
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            if self.eat("(.)") {
                let rhs = self.factor()?;
                acc = Expr::Circ(Box::new(acc), Box::new(rhs));
            } else if self.peek() == Some(b'*') && !matches!(acc, Expr::Number(_)) {
                self.pos += 1;
                let rhs = self.factor()?;
                acc = Expr::Star(Box::new(acc), Box::new(rhs));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr> {
        self.ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(")") {
                    return Err(self.error("expected `)`"));
                }
                if self.eat("^(-1)") {
                    return Ok(Expr::CircInverse(Box::new(inner)));
                }
                if self.peek() == Some(b'{') {
                    let (args, weights) = self.brace_suffix()?;
                    return Ok(Expr::Brace(Box::new(inner), args, weights));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.number()?;
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    return Ok(Expr::ScalarMul(num, Box::new(rhs)));
                }
                Ok(Expr::Number(num))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                // `d(` and `act(` are function forms; anything else is a
                // generator or decorated-tree literal.
                if self.src[self.pos..].starts_with("d(") {
                    self.pos += 2;
                    let inner = self.expr()?;
                    if !self.eat(")") {
                        return Err(self.error("expected `)` after d("));
                    }
                    return self.maybe_brace(Expr::Differential(Box::new(inner)));
                }
                if self.src[self.pos..].starts_with("act(") {
                    self.pos += 4;
                    let g = self.expr()?;
                    if !self.eat(",") {
                        return Err(self.error("expected `,` in act(g, a)"));
                    }
                    let a = self.expr()?;
                    if !self.eat(")") {
                        return Err(self.error("expected `)` after act("));
                    }
                    return self.maybe_brace(Expr::GaugeAct(Box::new(g), Box::new(a)));
                }
                let tree = self.tree_literal()?;
                self.maybe_brace(Expr::Tree(tree))
            }
            _ => Err(self.error("expected an expression")),
        }
    }

    fn maybe_brace(&mut self, head: Expr) -> Result<Expr> {
        if self.peek() == Some(b'{') {
            let (args, weights) = self.brace_suffix()?;
            Ok(Expr::Brace(Box::new(head), args, weights))
        } else if matches!(head, Expr::Tree(ref t) if t == "1") {
            Ok(Expr::One)
        } else {
            Ok(head)
        }
    }

    fn brace_suffix(&mut self) -> Result<(Vec<Expr>, Vec<u32>)> {
        if !self.eat("{") {
            return Err(self.error("expected `{`"));
        }
        let mut args = vec![self.expr()?];
        while self.eat(",") {
            args.push(self.expr()?);
        }
        if !self.eat("}") {
            return Err(self.error("expected `}`"));
        }
        if !self.eat("_") {
            return Err(self.error("expected `_` with brace weights"));
        }
        let weights = if self.eat("{") {
            let mut ws = vec![self.integer()?];
            while self.eat(",") {
                ws.push(self.integer()?);
            }
            if !self.eat("}") {
                return Err(self.error("expected `}` after weights"));
            }
            ws
        } else {
            vec![self.integer()?]
        };
        if weights.len() != args.len() {
            return Err(self.error("weights must match the brace arguments"));
        }
        Ok((args, weights))
    }

    fn integer(&mut self) -> Result<u32> {
        self.ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.error("integer out of range"))
    }

    fn number(&mut self) -> Result<String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        // optional /denominator for rational literals
        if self.bytes.get(self.pos) == Some(&b'/')
            && self.bytes.get(self.pos + 1).map_or(false, |c| c.is_ascii_digit())
        {
            self.pos += 1;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        Ok(self.src[start..self.pos].to_string())
    }

    /// A generator name with an optional balanced bracket suffix:
    /// `a`, `a[b,b[c]]`.
    fn tree_literal(&mut self) -> Result<String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an identifier"));
        }
        if self.bytes.get(self.pos) == Some(&b'[') {
            let mut depth = 0usize;
            while self.pos < self.bytes.len() {
                match self.bytes[self.pos] {
                    b'[' => depth += 1,
                    b']' => {
                        depth -= 1;
                        self.pos += 1;
                        if depth == 0 {
                            break;
                        }
                        continue;
                    }
                    _ => {}
                }
                self.pos += 1;
            }
            if depth != 0 {
                return Err(self.error("unbalanced `[` in tree literal"));
            }
        }
        Ok(self.src[start..self.pos].to_string())
    }
}

/// Canonical printer for expressions; `parse . print . parse = parse`.
pub fn print_expr(e: &Expr) -> String {
    match e {
        Expr::One => "1".to_string(),
        Expr::Number(n) => n.clone(),
        Expr::Tree(t) => t.clone(),
        Expr::Sum(terms) => {
            let mut out = String::new();
            for (i, (neg, t)) in terms.iter().enumerate() {
                if i == 0 {
                    if *neg {
                        out.push_str("- ");
                    }
                } else {
                    out.push_str(if *neg { " - " } else { " + " });
                }
                out.push_str(&print_term(t));
            }
            out
        }
        _ => print_term(e),
    }
}

fn print_term(e: &Expr) -> String {
    match e {
        Expr::Star(a, b) => format!("{} * {}", print_factor(a), print_factor(b)),
        Expr::Circ(a, b) => format!("{} (.) {}", print_factor(a), print_factor(b)),
        _ => print_factor(e),
    }
}

fn print_factor(e: &Expr) -> String {
    match e {
        Expr::One => "1".to_string(),
        Expr::Number(n) => n.clone(),
        Expr::Tree(t) => t.clone(),
        Expr::ScalarMul(c, inner) => format!("{}*{}", c, print_factor(inner)),
        Expr::CircInverse(inner) => format!("({})^(-1)", print_expr(inner)),
        Expr::Differential(inner) => format!("d({})", print_expr(inner)),
        Expr::GaugeAct(g, a) => format!("act({}, {})", print_expr(g), print_expr(a)),
        Expr::Brace(head, args, weights) => {
            let head_txt = match **head {
                Expr::Tree(ref t) => t.clone(),
                Expr::One => "1".to_string(),
                Expr::Differential(_) | Expr::GaugeAct(_, _) => print_factor(head),
                _ => format!("({})", print_expr(head)),
            };
            let args_txt: Vec<String> = args.iter().map(print_expr).collect();
            let weights_txt: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
            format!("{}{{{}}}_{{{}}}", head_txt, args_txt.join(","), weights_txt.join(","))
        }
        Expr::Sum(_) | Expr::Star(_, _) | Expr::Circ(_, _) => format!("({})", print_expr(e)),
    }
}
