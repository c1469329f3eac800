//! Plaintext table files.
//!
//! Two sections separated by a line `---`; each row is `j d` as unsigned
//! decimals. Blank lines are ignored.

use std::fmt;
use std::str::FromStr;

use obljoin_core::Record;

pub const SEPARATOR: &str = "---";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TableFile {
    pub left: Vec<Record>,
    pub right: Vec<Record>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    pub msg: String,
}

fn parse_row(line: &str, no: usize) -> Result<Record, ParseError> {
    let err = |msg: String| ParseError { line: no, msg };
    let mut fields = line.split_whitespace();
    let mut next = |what: &str| -> Result<u64, ParseError> {
        let tok = fields
            .next()
            .ok_or_else(|| err(format!("missing {what} value")))?;
        tok.parse()
            .map_err(|_| err(format!("invalid {what} value {tok:?}")))
    };
    let j = next("join")?;
    let d = next("data")?;
    if let Some(extra) = fields.next() {
        return Err(err(format!("unexpected trailing field {extra:?}")));
    }
    Ok(Record::new(j, d))
}

impl FromStr for TableFile {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = TableFile::default();
        let mut seen_separator = false;
        let mut last = 0;
        for (k, raw) in s.lines().enumerate() {
            let no = k + 1;
            last = no;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if line == SEPARATOR {
                if seen_separator {
                    return Err(ParseError { line: no, msg: "second section separator".into() });
                }
                seen_separator = true;
                continue;
            }
            let row = parse_row(line, no)?;
            if seen_separator {
                out.right.push(row);
            } else {
                out.left.push(row);
            }
        }
        if !seen_separator {
            return Err(ParseError {
                line: last + 1,
                msg: format!("missing section separator {SEPARATOR:?}"),
            });
        }
        Ok(out)
    }
}

impl fmt::Display for TableFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.left {
            writeln!(f, "{} {}", r.j, r.d)?;
        }
        writeln!(f, "{SEPARATOR}")?;
        for r in &self.right {
            writeln!(f, "{} {}", r.j, r.d)?;
        }
        Ok(())
    }
}
