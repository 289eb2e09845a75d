//! Flat `[section]` / `key = value` files. Values may be double-quoted; a `#`
//! or `;` outside quotes starts a comment.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub quoted: bool,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ini {
    pub sections: Vec<Section>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

/// Splits off a trailing comment and unquotes the value.
fn parse_value(raw: &str, line: usize) -> Result<(String, bool)> {
    let raw = raw.trim_start();
    if let Some(rest) = raw.strip_prefix('"') {
        let mut out = String::new();
        let mut chars = rest.chars();
        loop {
            match chars.next() {
                None => return Err(err(line, "unterminated quoted value")),
                Some('"') => break,
                Some('\\') => match chars.next() {
                    Some(c @ ('"' | '\\')) => out.push(c),
                    Some(c) => return Err(err(line, format!("unknown escape \\{c}"))),
                    None => return Err(err(line, "unterminated quoted value")),
                },
                Some(c) => out.push(c),
            }
        }
        let tail = chars.as_str().trim();
        if !(tail.is_empty() || tail.starts_with('#') || tail.starts_with(';')) {
            return Err(err(line, format!("unexpected text after quoted value: {tail}")));
        }
        Ok((out, true))
    } else {
        let end = raw.find(['#', ';']).unwrap_or(raw.len());
        Ok((raw[..end].trim().to_string(), false))
    }
}

impl Ini {
    pub fn parse(src: &str) -> Result<Ini> {
        let mut ini = Ini::default();
        for (idx, text) in src.lines().enumerate() {
            let line = idx + 1;
            let t = text.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with(';') {
                continue;
            }
            if let Some(rest) = t.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return Err(err(line, "section header must end with ']'"));
                };
                let name = name.trim();
                if name.is_empty() {
                    return Err(err(line, "empty section name"));
                }
                if ini.section(name).is_some() {
                    return Err(err(line, format!("duplicate section [{name}]")));
                }
                ini.sections.push(Section {
                    name: name.to_string(),
                    line,
                    entries: Vec::new(),
                });
                continue;
            }
            let Some((key, raw)) = t.split_once('=') else {
                return Err(err(line, format!("expected key = value, got {t:?}")));
            };
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
                return Err(err(line, format!("invalid key {key:?}")));
            }
            let (value, quoted) = parse_value(raw, line)?;
            let Some(section) = ini.sections.last_mut() else {
                return Err(err(line, format!("key {key:?} outside of any section")));
            };
            if section.get(key).is_some() {
                return Err(err(line, format!("duplicate key {key:?} in [{}]", section.name)));
            }
            section.entries.push(Entry {
                key: key.to_string(),
                value,
                quoted,
                line,
            });
        }
        Ok(ini)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }
}
