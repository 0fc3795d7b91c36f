//! Minimal arithmetic-expression parser for custom radial potentials.
//!
//! Grammar: numeric literals, the variable `r`, binary `+ - * / ^`, unary
//! minus, `exp(...)`, `log(...)`, and parentheses. `^` is right-associative.

#[derive(Debug, Clone)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var => r,
            Expr::Neg(e) => -e.eval(r),
            Expr::Add(a, b) => a.eval(r) + b.eval(r),
            Expr::Sub(a, b) => a.eval(r) - b.eval(r),
            Expr::Mul(a, b) => a.eval(r) * b.eval(r),
            Expr::Div(a, b) => a.eval(r) / b.eval(r),
            Expr::Pow(a, b) => a.eval(r).powf(b.eval(r)),
            Expr::Exp(e) => e.eval(r).exp(),
            Expr::Log(e) => e.eval(r).ln(),
        }
    }
}

pub fn parse(input: &str) -> Result<Expr, String> {
    let mut p = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(format!("unexpected trailing input at byte {}", p.pos));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Expr, String> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    // term := factor (('*' | '/') factor)*
    fn term(&mut self) -> Result<Expr, String> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    // factor := '-' factor | atom ('^' factor)?   (right-associative; unary
    // minus binds weaker than '^', so -r^2 is -(r^2))
    fn factor(&mut self) -> Result<Expr, String> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.factor()?;
            Ok(Expr::Pow(Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, String> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err("missing ')'".into());
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            other => Err(format!("unexpected token {other:?} at byte {}", self.pos)),
        }
    }

    fn number(&mut self) -> Result<Expr, String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E')
                && self.pos > start
                && self
                    .src
                    .get(self.pos + 1)
                    .is_some_and(|&n| n.is_ascii_digit() || n == b'+' || n == b'-')
            {
                self.pos += 2;
            } else {
                break;
            }
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
            .map(Expr::Num)
            .ok_or_else(|| format!("bad numeric literal at byte {start}"))
    }

    fn ident(&mut self) -> Result<Expr, String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "r" => Ok(Expr::Var),
            "exp" | "log" => {
                if !self.eat(b'(') {
                    return Err(format!("{name} needs parentheses"));
                }
                let arg = self.expr()?;
                if !self.eat(b')') {
                    return Err("missing ')'".into());
                }
                Ok(if name == "exp" {
                    Expr::Exp(Box::new(arg))
                } else {
                    Expr::Log(Box::new(arg))
                })
            }
            other => Err(format!("unknown identifier '{other}'")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_evaluates() {
        let e = parse("2*r^2").unwrap();
        assert_eq!(e.eval(3.0), 18.0);
        let e = parse("4*r").unwrap();
        assert_eq!(e.eval(0.5), 2.0);
        let e = parse("exp(-r^2) + log(r) / 2").unwrap();
        let r: f64 = 1.7;
        assert!((e.eval(r) - ((-r * r).exp() + r.ln() / 2.0)).abs() < 1e-15);
        let e = parse("2^3^2").unwrap(); // right-assoc: 2^(3^2)
        assert_eq!(e.eval(0.0), 512.0);
        let e = parse(" -r + 1.5e-1 ").unwrap();
        assert!((e.eval(2.0) - (-2.0 + 0.15)).abs() < 1e-15);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("2**r").is_err());
        assert!(parse("foo(r)").is_err());
        assert!(parse("(r").is_err());
        assert!(parse("r 2").is_err());
    }
}
