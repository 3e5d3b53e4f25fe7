//! Line-oriented helpers shared by the text formats.

use std::io::BufRead;

use crate::error::{Error, Result};

pub(crate) fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn fmt3(v: [f64; 3]) -> String {
    format!("{} {} {}", fmt(v[0]), fmt(v[1]), fmt(v[2]))
}

/// Yields non-empty, non-comment lines together with their 1-based numbers.
pub(crate) struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    pub fn new(reader: R) -> Self {
        Self { inner: reader.lines(), line: 0 }
    }

    pub fn line(&self) -> usize {
        self.line
    }

    /// Next content line, or `None` at end of input.
    pub fn next_line(&mut self) -> Result<Option<(usize, String)>> {
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l?;
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            return Ok(Some((self.line, t.to_string())));
        }
        Ok(None)
    }

    pub fn expect(&mut self, what: &str) -> Result<(usize, String)> {
        self.next_line()?.ok_or_else(|| Error::Parse {
            line: self.line + 1,
            msg: format!("unexpected end of file, expected {what}"),
        })
    }

    /// A line `key v1 v2 ...`; returns the values.
    pub fn keyed(&mut self, key: &str) -> Result<(usize, Vec<String>)> {
        let (line, text) = self.expect(key)?;
        let mut parts = text.split_whitespace();
        match parts.next() {
            Some(k) if k == key => Ok((line, parts.map(str::to_string).collect())),
            other => Err(Error::Parse { line, msg: format!("expected `{key}`, found `{}`", other.unwrap_or("")) }),
        }
    }

    pub fn keyed_reals(&mut self, key: &str, count: usize) -> Result<Vec<f64>> {
        let (line, vals) = self.keyed(key)?;
        reals(line, &vals, count)
    }
}

pub(crate) fn real(line: usize, s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| Error::Parse { line, msg: format!("`{s}` is not a number") })?;
    if !v.is_finite() {
        return Err(Error::NonFinite(line));
    }
    Ok(v)
}

pub(crate) fn integer(line: usize, s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse { line, msg: format!("`{s}` is not a nonnegative integer") })
}

pub(crate) fn reals<S: AsRef<str>>(line: usize, vals: &[S], count: usize) -> Result<Vec<f64>> {
    if vals.len() != count {
        return Err(Error::Parse { line, msg: format!("expected {count} values, found {}", vals.len()) });
    }
    vals.iter().map(|s| real(line, s.as_ref())).collect()
}
