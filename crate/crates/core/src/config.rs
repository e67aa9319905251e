//! Tiny key=value config format shared by the base description, platform
//! model, and the benchmark CLI. Lines are `key = value`; `#` starts a
//! comment; blank lines are ignored.

use crate::error::{Error, Result};

/// Parses the text into `((key, value), line_number)` entries in file order.
pub fn parse_kv(text: &str) -> Result<Vec<((String, String), usize)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if stripped.is_empty() {
            continue;
        }
        let (key, value) = stripped.split_once('=').ok_or_else(|| Error::BadConfig {
            line,
            reason: format!("expected key=value, got '{stripped}'"),
        })?;
        out.push(((key.trim().to_string(), value.trim().to_string()), line));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_spacing() {
        let text = "# header\n a = 1 \n\nb=2 # trailing\n";
        let kv = parse_kv(text).unwrap();
        assert_eq!(kv.len(), 2);
        assert_eq!(kv[0].0, ("a".into(), "1".into()));
        assert_eq!(kv[1].0, ("b".into(), "2".into()));
        assert_eq!(kv[1].1, 4);
    }

    #[test]
    fn rejects_bare_words() {
        assert!(matches!(
            parse_kv("not-a-pair"),
            Err(Error::BadConfig { line: 1, .. })
        ));
    }
}
