//! Flat `section.key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are unique; the
//! consumer removes the keys it understands and anything left over is
//! reported as unknown.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    source: PathBuf,
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, source: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: source.to_path_buf(),
                line,
                message,
            };
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| err(format!("expected `section.key = value`, got `{trimmed}`")))?;
            let key = key.trim();
            let value = value.trim();
            match key.split_once('.') {
                Some((section, name)) if !section.is_empty() && !name.is_empty() => {}
                _ => return Err(err(format!("key `{key}` is not of the form section.key"))),
            }
            if value.is_empty() {
                return Err(err(format!("empty value for `{key}`")));
            }
            if entries
                .insert(key.to_string(), (line, value.to_string()))
                .is_some()
            {
                return Err(err(format!("duplicate key `{key}`")));
            }
        }
        Ok(Self {
            source: source.to_path_buf(),
            entries,
        })
    }

    /// Remove and parse `key`, if present.
    pub fn take<T>(&mut self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, value)) => value.parse::<T>().map(Some).map_err(|e| Error::Parse {
                path: self.source.clone(),
                line,
                message: format!("`{key}`: {e}"),
            }),
        }
    }

    /// Remove `key` and parse it as a comma-separated list.
    pub fn take_list<T>(&mut self, key: &str) -> Result<Option<Vec<T>>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, value)) => value
                .split(',')
                .map(|v| v.trim().parse::<T>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|e| Error::Parse {
                    path: self.source.clone(),
                    line,
                    message: format!("`{key}`: {e}"),
                }),
        }
    }

    /// Fail if any key was not consumed.
    pub fn finish(self) -> Result<()> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, (line, _))) => Err(Error::Parse {
                path: self.source,
                line,
                message: format!("unknown key `{key}`"),
            }),
        }
    }
}
