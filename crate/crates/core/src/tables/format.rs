//! Line-oriented block format for partial-transversal families.
//!
//! ```text
//! b=9 d=0 mu=4 t=1
//! 7 8 6 2 0 1 4 5 3
//! ...
//! ```
//!
//! Row `r` of a block lists, for each subsquare row `i`, the column used by
//! partial transversal `r`. Blocks are separated by one blank line and the
//! text ends with a newline. A block whose `t` equals `b + d` may give a
//! single row, which stands for that row repeated `mu` times.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::partial::{OmegaInstance, PartialFamily};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedFormBlock {
    pub b: usize,
    pub d: usize,
    pub mu: usize,
    pub t: usize,
    pub rows: Vec<Vec<usize>>,
    /// 1-based line of the header in the source text.
    pub line: usize,
}

impl ReducedFormBlock {
    pub fn size(&self) -> usize {
        self.b + self.d
    }

    pub fn header(&self) -> String {
        format!("b={} d={} mu={} t={}", self.b, self.d, self.mu, self.t)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_header(line: usize, text: &str) -> Result<[usize; 4]> {
    let fields: Vec<&str> = text.split(' ').collect();
    let names = ["b", "d", "mu", "t"];
    if fields.len() != names.len() {
        return Err(parse_err(line, format!("malformed header {text:?}: expected `b=.. d=.. mu=.. t=..`")));
    }
    let mut out = [0; 4];
    for (k, (field, name)) in fields.iter().zip(names).enumerate() {
        let value = field
            .strip_prefix(name)
            .and_then(|v| v.strip_prefix('='))
            .ok_or_else(|| parse_err(line, format!("malformed header field {field:?}: expected `{name}=<int>`")))?;
        out[k] = value
            .parse()
            .map_err(|_| parse_err(line, format!("header field {name} is not a non-negative integer: {value:?}")))?;
    }
    Ok(out)
}

fn parse_row(line: usize, text: &str, size: usize) -> Result<Vec<usize>> {
    let row = text
        .split(' ')
        .map(|tok| {
            let c: usize = tok
                .parse()
                .map_err(|_| parse_err(line, format!("not a column index: {tok:?}")))?;
            if c >= size {
                return Err(parse_err(line, format!("column index {c} out of range [0, {}]", size - 1)));
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    if row.len() != size {
        return Err(parse_err(line, format!("row has {} entries, expected b+d = {size}", row.len())));
    }
    Ok(row)
}

/// Parses every block; the empty string is an empty dataset.
pub fn parse_reduced_form(text: &str) -> Result<Vec<ReducedFormBlock>> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(pos) = text.find('\t') {
        let line = text[..pos].matches('\n').count() + 1;
        return Err(parse_err(line, "tab characters are not allowed"));
    }
    let Some(body) = text.strip_suffix('\n') else {
        return Err(parse_err(text.lines().count(), "missing trailing newline"));
    };
    let lines: Vec<&str> = body.split('\n').collect();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line = i + 1;
        if lines[i].is_empty() {
            return Err(parse_err(line, "unexpected blank line (blocks are separated by exactly one)"));
        }
        let [b, d, mu, t] = parse_header(line, lines[i])?;
        let size = b + d;
        if size == 0 {
            return Err(parse_err(line, "b + d must be positive"));
        }
        i += 1;
        let mut rows = Vec::new();
        while i < lines.len() && !lines[i].is_empty() {
            rows.push(parse_row(i + 1, lines[i], size)?);
            i += 1;
        }
        let single = rows.len() == 1 && t == size;
        if rows.len() != mu && !single {
            return Err(parse_err(line, format!("block has {} rows, expected mu = {mu}", rows.len())));
        }
        blocks.push(ReducedFormBlock { b, d, mu, t, rows, line });
        if i < lines.len() {
            // Skip the separator; a block must follow it.
            i += 1;
            if i == lines.len() {
                return Err(parse_err(i, "blank line at end of input"));
            }
        }
    }
    Ok(blocks)
}

/// Decodes and fully verifies one block.
pub fn decode_block(block: &ReducedFormBlock) -> Result<PartialFamily> {
    let at = |msg: String| Error::Decode(format!("block `{}` at line {}: {msg}", block.header(), block.line));
    let instance = OmegaInstance::new(block.b, block.d, block.mu).map_err(|e| at(e.to_string()))?;
    let partials = if block.rows.len() == 1 && block.mu > 1 {
        vec![block.rows[0].clone(); block.mu]
    } else {
        block.rows.clone()
    };
    let family = PartialFamily::new(instance, partials).map_err(|e| at(e.to_string()))?;
    if family.t() != block.t {
        return Err(at(format!("stable size is {}, header claims {}", family.t(), block.t)));
    }
    Ok(family)
}

/// Block text (header, rows, trailing newline) that parses and decodes back to `family`.
pub fn emit_reduced_form(family: &PartialFamily) -> Result<String> {
    let inst = family.instance();
    let partials = family.partials();
    if partials.is_empty() {
        return Err(Error::InvalidInput("cannot emit an empty family".into()));
    }
    let mut out = format!("b={} d={} mu={} t={}\n", inst.b, inst.dbar, family.mu(), family.t());
    let rows = if family.t() == inst.size() { &partials[..1] } else { partials };
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// Several blocks separated by blank lines.
pub fn emit_blocks(families: &[PartialFamily]) -> Result<String> {
    let parts = families.iter().map(emit_reduced_form).collect::<Result<Vec<_>>>()?;
    Ok(parts.join("\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Cell;

    const NINE_T0: &str = "b=9 d=0 mu=4 t=0\n8 6 7 2 0 1 5 3 4\n7 8 6 1 2 0 4 5 3\n5 3 4 8 6 7 2 0 1\n4 5 3 7 8 6 1 2 0\n";

    #[test]
    fn parses_one_block() {
        let blocks = parse_reduced_form(NINE_T0).unwrap();
        assert_eq!(blocks.len(), 1);
        let b = &blocks[0];
        assert_eq!((b.b, b.d, b.mu, b.t, b.line), (9, 0, 4, 0, 1));
        assert_eq!(b.rows[3], vec![4, 5, 3, 7, 8, 6, 1, 2, 0]);
        assert_eq!(decode_block(b).unwrap().t(), 0);
    }

    #[test]
    fn empty_input() {
        assert!(parse_reduced_form("").unwrap().is_empty());
    }

    #[test]
    fn format_errors_carry_lines() {
        let short = NINE_T0.replace("8 6 7 2 0 1 5 3 4", "8 6 7 2 0 1 5 3");
        assert!(matches!(parse_reduced_form(&short), Err(Error::Parse { line: 2, .. })));
        let range = NINE_T0.replace("8 6 7 2 0 1 5 3 4", "8 6 7 2 0 1 5 3 9");
        assert!(matches!(parse_reduced_form(&range), Err(Error::Parse { line: 2, .. })));
        let header = NINE_T0.replace("mu=4", "m=4");
        assert!(matches!(parse_reduced_form(&header), Err(Error::Parse { line: 1, .. })));
        let rows = NINE_T0.replace("4 5 3 7 8 6 1 2 0\n", "");
        assert!(matches!(parse_reduced_form(&rows), Err(Error::Parse { line: 1, .. })));
        assert!(parse_reduced_form(NINE_T0.trim_end()).is_err());
        assert!(parse_reduced_form(&NINE_T0.replace(' ', "\t")).is_err());
        assert!(parse_reduced_form(&NINE_T0.replace(' ', "  ")).is_err());
        let two_blank = format!("{NINE_T0}\n\n{NINE_T0}");
        assert!(matches!(parse_reduced_form(&two_blank), Err(Error::Parse { line: 7, .. })));
        assert!(parse_reduced_form(&format!("{NINE_T0}\n")).is_err());
        assert_eq!(parse_reduced_form(&format!("{NINE_T0}\n{NINE_T0}")).unwrap()[1].line, 7);
    }

    #[test]
    fn decode_finds_the_shared_cell() {
        let text = "b=9 d=0 mu=4 t=1\n7 8 6 2 0 1 4 5 3\n8 5 3 7 0 6 1 2 4\n6 4 5 8 0 7 3 1 2\n5 7 8 3 0 2 6 4 1\n";
        let fam = decode_block(&parse_reduced_form(text).unwrap()[0]).unwrap();
        assert_eq!(fam.stable_cells(), &[Cell::new(4, 0)]);
        // One corrupted digit breaks the symbol alphabet or the column permutation.
        let bad = text.replace("7 8 6 2 0 1 4 5 3", "7 8 6 2 0 1 4 5 2");
        assert!(matches!(decode_block(&parse_reduced_form(&bad).unwrap()[0]), Err(Error::Decode(_))));
        let wrong_t = text.replace("t=1", "t=2");
        assert!(matches!(decode_block(&parse_reduced_form(&wrong_t).unwrap()[0]), Err(Error::Decode(_))));
    }

    #[test]
    fn emit_round_trips() {
        let fam = decode_block(&parse_reduced_form(NINE_T0).unwrap()[0]).unwrap();
        assert_eq!(emit_reduced_form(&fam).unwrap(), NINE_T0);
        let single = PartialFamily::repeated(OmegaInstance::new(9, 0, 4).unwrap(), vec![8, 6, 7, 2, 0, 1, 5, 3, 4]).unwrap();
        let text = emit_reduced_form(&single).unwrap();
        assert_eq!(text, "b=9 d=0 mu=4 t=9\n8 6 7 2 0 1 5 3 4\n");
        assert_eq!(decode_block(&parse_reduced_form(&text).unwrap()[0]).unwrap(), single);
        let both = emit_blocks(&[fam.clone(), single.clone()]).unwrap();
        let parsed = parse_reduced_form(&both).unwrap();
        assert_eq!(decode_block(&parsed[0]).unwrap(), fam);
        assert_eq!(decode_block(&parsed[1]).unwrap(), single);
    }
}
