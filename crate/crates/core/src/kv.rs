//! Plain-text `key=value` blocks used for degree laws, Lévy presets and
//! experiment configurations. Blank lines and `#` comments are ignored.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected key=value, found {line:?}") })?;
            let key = k.trim().to_string();
            if entries.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(Error::Parse { line: i + 1, msg: format!("duplicate key {key}") });
            }
        }
        Ok(Self { entries })
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), (0, value.to_string()));
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Parse { line: *line, msg: format!("bad value {v:?} for {key}") }),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|s| {
                    let s = s.trim();
                    s.parse().map_err(|_| Error::Parse { line: *line, msg: format!("bad list entry {s:?} for {key}") })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    /// Keys starting with `prefix`, with the prefix stripped.
    pub fn with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a str, usize)> + 'a {
        self.entries.iter().filter_map(move |(k, (line, v))| k.strip_prefix(prefix).map(|rest| (rest, v.as_str(), *line)))
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, (_, v))| format!("{k}={v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_lists_and_errors() {
        let kv = KeyValues::parse("# law\nalpha = 1.5\nn=10,20 # sizes\n\natom.1=0.5\n").unwrap();
        assert_eq!(kv.get::<f64>("alpha").unwrap(), Some(1.5));
        assert_eq!(kv.get_list::<usize>("n").unwrap(), Some(vec![10, 20]));
        assert_eq!(kv.with_prefix("atom.").collect::<Vec<_>>(), vec![("1", "0.5", 5)]);
        assert!(matches!(KeyValues::parse("oops"), Err(Error::Parse { line: 1, .. })));
        assert!(KeyValues::parse("a=1\na=2").is_err());
        assert!(kv.get::<usize>("alpha").is_err());
    }
}
