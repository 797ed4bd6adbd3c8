//! Token-level syntax table: `token_index  head_token_index  dep_label`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::treeops::{SyntaxLayer, SyntaxToken};

pub fn read_syntax(path: &Path) -> Result<SyntaxLayer> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_syntax(&text)
}

/// Parse the table; blank lines, `#` comments and a header row are skipped.
pub fn parse_syntax(text: &str) -> Result<SyntaxLayer> {
    let mut tokens = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') || (lineno == 0 && line.starts_with("token_index")) {
            continue;
        }
        let loc = || Some(format!("line {}", lineno + 1));
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(Error::parse("syntax", loc(), format!("expected 3 columns, found {}", cols.len())));
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse("syntax", loc(), format!("bad index `{s}`")))
        };
        tokens.push(SyntaxToken {
            index: num(cols[0])?,
            head: num(cols[1])?,
            label: cols[2].to_string(),
        });
    }
    SyntaxLayer::new(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_table() {
        let layer = parse_syntax("token_index\thead_token_index\tdep_label\n1\t2\tnsubj\n2\t0\troot\n").unwrap();
        assert_eq!(layer.len(), 2);
        assert_eq!(layer.token(1).unwrap().label, "nsubj");
        assert!(parse_syntax("1\t5\tx\n").is_err());
        assert!(parse_syntax("1\tx\n").is_err());
    }
}
