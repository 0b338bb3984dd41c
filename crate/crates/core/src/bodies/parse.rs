//! Body descriptors:
//!
//! ```text
//! lp(p=<real>,n=<int>)
//! ellipsoid(diag=<real>,<real>,...)
//! scale(<body>,<real>)
//! linimg(<body>,<matrix-file>)
//! ```
//!
//! Matrix files hold one row per line of whitespace-separated reals.

use std::path::Path;

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.pos += c.len_utf8();
                Ok(())
            }
            other => Err(err(format!(
                "expected '{want}' at offset {} in {:?}, found {:?}",
                self.pos, self.src, other
            ))),
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !(c.is_ascii_alphanumeric() || c == '_') {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(err(format!("expected a name at offset {start} in {:?}", self.src)));
        }
        Ok(&self.src[start..self.pos])
    }

    fn token(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == ',' || c == ')' || c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn number<T: Scalar>(&mut self) -> Result<T> {
        let tok = self.token();
        parse_real(tok)
    }

    fn key(&mut self, want: &str) -> Result<()> {
        let k = self.ident()?;
        if k != want {
            return Err(err(format!("expected key '{want}', found '{k}'")));
        }
        self.expect('=')
    }

    fn body<T: Scalar>(&mut self) -> Result<Body<T>> {
        let name = self.ident()?;
        self.expect('(')?;
        let body = match name {
            "lp" => {
                let mut p: Option<T> = None;
                let mut n: Option<usize> = None;
                for i in 0..2 {
                    if i == 1 {
                        self.expect(',')?;
                    }
                    let k = self.ident()?;
                    self.expect('=')?;
                    match k {
                        "p" => p = Some(self.number()?),
                        "n" => {
                            let tok = self.token();
                            n = Some(tok.parse().map_err(|_| err(format!("bad dimension '{tok}'")))?);
                        }
                        other => return Err(err(format!("unknown lp key '{other}'"))),
                    }
                }
                let (p, n) = p.zip(n).ok_or_else(|| err("lp needs both p and n"))?;
                Body::lp_ball(p, n)?
            }
            "ellipsoid" => {
                self.key("diag")?;
                let mut diag = vec![self.number::<T>()?];
                loop {
                    self.skip_ws();
                    if self.peek() != Some(',') {
                        break;
                    }
                    self.pos += 1;
                    diag.push(self.number()?);
                }
                Body::ellipsoid_diag(&diag)?
            }
            "scale" => {
                let inner = self.body::<T>()?;
                self.expect(',')?;
                let t = self.number()?;
                inner.scaled(t)?
            }
            "linimg" => {
                let inner = self.body::<T>()?;
                self.expect(',')?;
                self.skip_ws();
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c == ')' {
                        break;
                    }
                    self.pos += c.len_utf8();
                }
                let path = self.src[start..self.pos].trim();
                let m = read_matrix_file(Path::new(path))?;
                inner.linear_image(m)?.with_label(format!("linimg({},{path})", inner.label()))
            }
            other => return Err(err(format!("unknown body '{other}'"))),
        };
        self.expect(')')?;
        Ok(body)
    }
}

fn parse_real<T: Scalar>(tok: &str) -> Result<T> {
    let v: f64 = tok.trim().parse().map_err(|_| err(format!("bad number '{tok}'")))?;
    if !v.is_finite() {
        return Err(err(format!("non-finite number '{tok}'")));
    }
    Ok(T::lit(v))
}

/// Parses a body descriptor. The label of the result is the descriptor itself.
pub fn parse_body<T: Scalar>(desc: &str) -> Result<Body<T>> {
    let mut p = Parser { src: desc, pos: 0 };
    let body = p.body::<T>()?;
    p.skip_ws();
    if p.pos != desc.len() {
        return Err(err(format!("trailing input after body: {:?}", &desc[p.pos..])));
    }
    Ok(body.with_label(desc.trim()))
}

pub fn read_matrix_file<T: Scalar>(path: &Path) -> Result<Matrix<T>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = 0;
    let mut cols = None;
    let mut data = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<T> = line.split_whitespace().map(parse_real).collect::<Result<_>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(err(format!("ragged matrix file {}: row {rows} has {} entries", path.display(), row.len())))
            }
            _ => {}
        }
        data.extend(row);
        rows += 1;
    }
    let cols = cols.ok_or_else(|| err(format!("empty matrix file {}", path.display())))?;
    Matrix::from_rows(rows, cols, data)
}
