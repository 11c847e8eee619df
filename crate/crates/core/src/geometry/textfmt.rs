//! Line-oriented index format.
//!
//! ```text
//! C k1 .. kd
//! S cone j l1 .. l(d-1) k1 .. kd
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use super::index::{IndexSet, ShearIndex};
use crate::error::{Error, Result};

pub fn format_index(idx: &ShearIndex) -> String {
    let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
    match idx {
        ShearIndex::Coarse { k } => format!("C {}", join(k)),
        ShearIndex::Cone { cone, j, shear, k } => {
            format!("S {cone} {j} {} {}", join(shear), join(k))
        }
    }
}

/// Parse the index at the start of `tokens`; returns the index and the
/// number of tokens consumed. `line` is only used for error messages.
pub(crate) fn parse_index_tokens(tokens: &[&str], line: usize, trailing: usize) -> Result<(ShearIndex, usize)> {
    let ints = |ts: &[&str]| -> Result<Vec<i64>> {
        ts.iter()
            .map(|t| t.parse::<i64>().map_err(|e| Error::parse(line, format!("`{t}`: {e}"))))
            .collect()
    };
    let Some((&tag, rest)) = tokens.split_first() else {
        return Err(Error::parse(line, "empty record"));
    };
    let rest = &rest[..rest.len().saturating_sub(trailing)];
    let idx = match tag {
        "C" => {
            if rest.is_empty() {
                return Err(Error::parse(line, "coarse index without translate"));
            }
            ShearIndex::Coarse { k: ints(rest)? }
        }
        "S" => {
            // cone j + (d-1) shear + d translate
            if rest.len() < 5 || (rest.len() - 1) % 2 != 0 {
                return Err(Error::parse(line, format!("cone index has {} fields", rest.len())));
            }
            let d = (rest.len() - 1) / 2;
            let cone: u8 = rest[0]
                .parse()
                .map_err(|e| Error::parse(line, format!("cone `{}`: {e}", rest[0])))?;
            let j: u32 = rest[1]
                .parse()
                .map_err(|e| Error::parse(line, format!("scale `{}`: {e}", rest[1])))?;
            let shear = ints(&rest[2..2 + d - 1])?;
            let k = ints(&rest[2 + d - 1..])?;
            ShearIndex::Cone { cone, j, shear, k }
        }
        other => return Err(Error::parse(line, format!("unknown record tag `{other}`"))),
    };
    idx.validate().map_err(|e| Error::parse(line, e.to_string()))?;
    Ok((idx, 1 + rest.len()))
}

pub fn parse_index(s: &str) -> Result<ShearIndex> {
    let tokens: Vec<&str> = s.split_whitespace().collect();
    parse_index_tokens(&tokens, 1, 0).map(|(idx, _)| idx)
}

pub fn read_index_set(text: &str) -> Result<IndexSet> {
    let mut set = IndexSet::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let (idx, _) = parse_index_tokens(&tokens, n + 1, 0)?;
        set.insert(idx).map_err(|e| Error::parse(n + 1, e.to_string()))?;
    }
    Ok(set)
}

pub fn write_index_set(set: &IndexSet) -> String {
    let mut out = String::new();
    for idx in set {
        out.push_str(&format_index(idx));
        out.push('\n');
    }
    out
}
