//! Input loading (schema check, material references, `--set` overrides) and
//! atomic output writing.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::{Failure, Outcome};

pub const SCHEMA_VERSION: u64 = 1;
const MATERIAL_KEYS: [&str; 3] = ["material", "inner_material", "ring_material"];

/// A parsed input document with `schema_version` removed.
pub struct Loaded {
    pub value: Value,
    pub sha256: String,
    pub overrides: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn read_document(path: &Path) -> anyhow::Result<(Value, Vec<u8>)> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut value: Value =
        serde_json::from_slice(&bytes).with_context(|| format!("{} is not valid JSON", path.display()))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| anyhow!("{}: top level must be a JSON object", path.display()))?;
    match obj.remove("schema_version") {
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(v) => bail!("{}: unsupported schema_version {v}, expected {SCHEMA_VERSION}", path.display()),
        None => bail!("{}: missing schema_version", path.display()),
    }
    Ok((value, bytes))
}

/// Replaces `"material": "file.json"` references with the file's material.
fn resolve_materials(value: &mut Value, dir: &Path, depth: usize) -> anyhow::Result<()> {
    match value {
        Value::Object(map) => {
            for (k, v) in map.iter_mut() {
                if let (true, Value::String(file)) = (MATERIAL_KEYS.contains(&k.as_str()), &*v) {
                    let path = dir.join(file);
                    let (mut doc, _) = read_document(&path)?;
                    let material = doc
                        .as_object_mut()
                        .and_then(|o| o.remove("material"))
                        .ok_or_else(|| anyhow!("{}: no material object", path.display()))?;
                    *v = material;
                } else if depth < 16 {
                    resolve_materials(v, dir, depth + 1)?;
                }
            }
        }
        Value::Array(items) => {
            for v in items {
                resolve_materials(v, dir, depth + 1)?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// Applies `a.b.0.c=value`. The value is parsed as JSON when possible and
/// taken as a string otherwise. Missing object keys are created so that
/// schema validation can reject unknown ones.
fn set_path(root: &mut Value, assignment: &str) -> anyhow::Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| anyhow!("override `{assignment}` is not key=value"))?;
    if key.is_empty() {
        bail!("override `{assignment}` has an empty key");
    }
    let new: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), new);
                    return Ok(());
                }
                map.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()))
            }
            Value::Array(items) => {
                let idx: usize = part.parse().with_context(|| format!("`{part}` in `{key}` is not an array index"))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| anyhow!("index {idx} in `{key}` is out of range (length {len})"))?;
                if last {
                    *slot = new;
                    return Ok(());
                }
                slot
            }
            _ => bail!("`{key}`: cannot descend into a scalar at `{part}`"),
        };
    }
    Ok(())
}

pub fn load(path: &Path, sets: &[String]) -> Outcome<Loaded> {
    let (mut value, bytes) = read_document(path).map_err(Failure::config)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    resolve_materials(&mut value, dir, 0).map_err(Failure::config)?;
    for s in sets {
        set_path(&mut value, s).map_err(Failure::config)?;
    }
    Ok(Loaded {
        value,
        sha256: sha256_hex(&bytes),
        overrides: sets.to_vec(),
    })
}

pub fn parse<T: DeserializeOwned>(value: &Value) -> Outcome<T> {
    T::deserialize(value).map_err(|e| Failure::config(anyhow!("invalid input: {e}")))
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u64,
    command: &'a str,
    tool_version: &'a str,
    input_sha256: Option<&'a str>,
    overrides: &'a [String],
    result: T,
}

/// Pretty JSON with provenance; no timestamps, so reruns are byte-identical.
pub fn json_report<T: Serialize>(command: &str, sha256: Option<&str>, overrides: &[String], result: T) -> Outcome<Vec<u8>> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        tool_version: env!("CARGO_PKG_VERSION"),
        input_sha256: sha256,
        overrides,
        result,
    };
    let mut out = serde_json::to_vec_pretty(&env).map_err(|e| Failure::analysis(e.into()))?;
    out.push(b'\n');
    Ok(out)
}

/// Writes to `output` via a temporary file in the same directory and a
/// rename, or to stdout when no output is given. A directory gets
/// `default_name` inside it.
pub fn write_output(output: Option<&Path>, default_name: &str, bytes: &[u8]) -> Outcome<()> {
    let Some(path) = output else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(bytes)
            .and_then(|_| stdout.flush())
            .map_err(|e| Failure::analysis(e.into()));
    };
    let target: PathBuf = if path.is_dir() { path.join(default_name) } else { path.to_path_buf() };
    let dir = match target.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let write = || -> anyhow::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&dir)
            .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
        tmp.write_all(bytes)?;
        tmp.flush()?;
        tmp.persist(&target).with_context(|| format!("cannot write {}", target.display()))?;
        Ok(())
    };
    write().map_err(Failure::config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn set_paths() {
        let mut v = json!({"a": {"b": 1}, "list": [{"x": 1}]});
        set_path(&mut v, "a.b=2.5").unwrap();
        set_path(&mut v, "list.0.x=\"s\"").unwrap();
        set_path(&mut v, "name=plain text").unwrap();
        set_path(&mut v, "a.c.d=true").unwrap();
        assert_eq!(v, json!({"a": {"b": 2.5, "c": {"d": true}}, "list": [{"x": "s"}], "name": "plain text"}));
        assert!(set_path(&mut v, "novalue").is_err());
        assert!(set_path(&mut v, "list.3.x=1").is_err());
        assert!(set_path(&mut v, "a.b.c=1").is_err());
    }

    #[test]
    fn hash_is_hex_sha256() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
