//! Shared pieces of the line-oriented text formats.

use std::fmt::Display;
use std::iter::Peekable;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn join_list<T: Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

pub fn parse_list<T: FromStr>(text: &str) -> std::result::Result<Vec<T>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| format!("bad list element {:?}", s.trim())))
        .collect()
}

/// Leading `key=value` lines of a file.
pub struct Header {
    path: PathBuf,
    entries: Vec<(usize, String, String)>,
    end_line: usize,
}

impl Header {
    /// Consumes lines while they contain `=`.
    pub fn read<'a, I>(lines: &mut Peekable<I>, path: &Path) -> Result<Self>
    where
        I: Iterator<Item = (usize, &'a str)>,
    {
        let mut entries = Vec::new();
        let mut end_line = 1;
        while let Some(&(line, text)) = lines.peek() {
            let Some((key, value)) = text.split_once('=') else { break };
            entries.push((line, key.trim().to_string(), value.trim().to_string()));
            end_line = line + 1;
            lines.next();
        }
        Ok(Header { path: path.to_path_buf(), entries, end_line })
    }

    pub fn raw(&self, key: &str) -> Result<&str> {
        self.entries
            .iter()
            .find(|(_, k, _)| k == key)
            .map(|(_, _, v)| v.as_str())
            .ok_or_else(|| Error::parse(&self.path, self.end_line, format!("missing header key {key}")))
    }

    pub fn value<T: FromStr>(&self, key: &str) -> Result<T> {
        self.raw(key)?.parse().map_err(|_| self.error(key, format!("bad value for {key}")))
    }

    pub fn error(&self, key: &str, message: impl Into<String>) -> Error {
        let line = self.entries.iter().find(|(_, k, _)| k == key).map_or(self.end_line, |(l, _, _)| *l);
        Error::parse(&self.path, line, message)
    }
}
