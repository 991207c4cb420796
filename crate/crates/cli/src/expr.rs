//! Numeric expressions (`2*pi/3`, `-pi/4`, `1.5e-3`, `2pi`) and grids
//! (`0, pi/4, pi/2` or `linspace(0, pi, 101)`).

use std::f64::consts::PI;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                v += self.term()?;
            } else if self.eat('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut v = self.unary()?;
        loop {
            if self.eat('*') {
                v *= self.unary()?;
            } else if self.eat('/') {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64, String> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<f64, String> {
        self.skip_ws();
        if self.eat('(') {
            let v = self.expr()?;
            if !self.eat(')') {
                return Err(format!("missing `)` in `{}`", self.src));
            }
            return Ok(v);
        }
        if self.src[self.pos..].starts_with("pi") {
            self.pos += 2;
            return Ok(PI);
        }
        let start = self.pos;
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') && self.pos > start {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < bytes.len() && (bytes[self.pos] == b'+' || bytes[self.pos] == b'-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == digits {
                self.pos = mark;
            }
        }
        if self.pos == start {
            return Err(format!("expected a number at `{}`", &self.src[start..]));
        }
        let v: f64 = self.src[start..self.pos]
            .parse()
            .map_err(|_| format!("invalid number `{}`", &self.src[start..self.pos]))?;
        // `2pi`
        if self.src[self.pos..].starts_with("pi") {
            self.pos += 2;
            return Ok(v * PI);
        }
        Ok(v)
    }
}

pub fn eval(src: &str) -> Result<f64, String> {
    let mut p = Parser { src, pos: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(format!("unexpected `{}` in `{src}`", &src[p.pos..]));
    }
    if !v.is_finite() {
        return Err(format!("`{src}` is not finite"));
    }
    Ok(v)
}

/// Comma-separated expressions, or `linspace(a, b, k)` with both ends
/// included.
pub fn grid(src: &str) -> Result<Vec<f64>, String> {
    let s = src.trim();
    if s.is_empty() {
        return Err("grid is empty".into());
    }
    if let Some(args) = s.strip_prefix("linspace(").and_then(|r| r.strip_suffix(')')) {
        let parts: Vec<&str> = args.split(',').collect();
        if parts.len() != 3 {
            return Err(format!("linspace takes 3 arguments, got {}", parts.len()));
        }
        let a = eval(parts[0].trim())?;
        let b = eval(parts[1].trim())?;
        let k: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("linspace count `{}` is not a positive integer", parts[2].trim()))?;
        return match k {
            0 => Err("grid is empty".into()),
            1 => Ok(vec![a]),
            _ => Ok((0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()),
        };
    }
    s.split(',').map(|t| eval(t.trim())).collect()
}

/// Comma-separated list of expressions, allowing an empty list.
pub fn list(src: &str) -> Result<Vec<f64>, String> {
    if src.trim().is_empty() {
        return Ok(Vec::new());
    }
    src.split(',').map(|t| eval(t.trim())).collect()
}
