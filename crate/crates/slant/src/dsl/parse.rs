use super::{BinOp, DslError, DslErrorKind, Expr, Func, Var};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let (l0, c0) = (line, col);
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v: f64 = s.parse().map_err(|_| DslError {
                kind: DslErrorKind::Syntax,
                message: format!("malformed number '{s}'"),
                line: l0,
                col: c0,
            })?;
            col += i - start;
            out.push(Token {
                tok: Tok::Num(v),
                line: l0,
                col: c0,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(s),
                line: l0,
                col: c0,
            });
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => {
                return Err(DslError {
                    kind: DslErrorKind::Syntax,
                    message: format!("unexpected character '{c}'"),
                    line: l0,
                    col: c0,
                })
            }
        };
        i += 1;
        col += 1;
        out.push(Token {
            tok,
            line: l0,
            col: c0,
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

pub(super) struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    params: Option<&'a [String]>,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Op(c) => format!("operator '{c}'"),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Comma => "','".into(),
        Tok::End => "end of input".into(),
    }
}

impl<'a> Parser<'a> {
    pub(super) fn new(text: &str, params: Option<&'a [String]>) -> Result<Self, DslError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            params,
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, t: &Token, kind: DslErrorKind, message: String) -> DslError {
        DslError {
            kind,
            message,
            line: t.line,
            col: t.col,
        }
    }

    pub(super) fn parse_all(&mut self) -> Result<Expr, DslError> {
        let e = self.expr()?;
        let t = self.peek().clone();
        if t.tok != Tok::End {
            return Err(self.err(
                &t,
                DslErrorKind::Syntax,
                format!("unexpected {} after expression", describe(&t.tok)),
            ));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        if self.peek().tok == Tok::Op('-') {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        if self.peek().tok == Tok::Op('+') {
            self.bump();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, DslError> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Op('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, DslError> {
        let t = self.bump();
        match &t.tok {
            Tok::Num(v) => Ok(Expr::Num(*v)),
            Tok::LParen => {
                let e = self.expr()?;
                let close = self.bump();
                if close.tok != Tok::RParen {
                    return Err(self.err(
                        &close,
                        DslErrorKind::Syntax,
                        format!("expected ')' but found {}", describe(&close.tok)),
                    ));
                }
                Ok(e)
            }
            Tok::Ident(name) => self.ident(&t, name),
            other => Err(self.err(
                &t,
                DslErrorKind::Syntax,
                format!("expected a number, name or '(' but found {}", describe(other)),
            )),
        }
    }

    fn ident(&mut self, t: &Token, name: &str) -> Result<Expr, DslError> {
        if let Some(f) = Func::from_name(name) {
            let open = self.bump();
            if open.tok != Tok::LParen {
                return Err(self.err(
                    &open,
                    DslErrorKind::Syntax,
                    format!("expected '(' after function '{name}'"),
                ));
            }
            if self.peek().tok == Tok::RParen {
                self.bump();
                return Err(self.err(
                    t,
                    DslErrorKind::Arity,
                    format!("function '{name}' takes 1 argument, got 0"),
                ));
            }
            let mut args = vec![self.expr()?];
            while self.peek().tok == Tok::Comma {
                self.bump();
                args.push(self.expr()?);
            }
            let close = self.bump();
            if close.tok != Tok::RParen {
                return Err(self.err(
                    &close,
                    DslErrorKind::Syntax,
                    format!("expected ')' but found {}", describe(&close.tok)),
                ));
            }
            if args.len() != 1 {
                return Err(self.err(
                    t,
                    DslErrorKind::Arity,
                    format!("function '{name}' takes 1 argument, got {}", args.len()),
                ));
            }
            return Ok(Expr::Call(f, Box::new(args.pop().expect("one arg"))));
        }
        if let Some(v) = Var::from_name(name) {
            return Ok(Expr::Var(v));
        }
        if name == "pi" {
            return Ok(Expr::Pi);
        }
        match self.params {
            Some(ps) if !ps.iter().any(|p| p == name) => Err(self.err(
                t,
                DslErrorKind::UnknownIdentifier,
                format!("unknown identifier '{name}'"),
            )),
            _ => Ok(Expr::Param(name.to_string())),
        }
    }
}
