//! Helpers shared by the CLI integration tests.

use std::path::{Path, PathBuf};
use std::process::Command;

use regex::Regex;
use serde_json::Value;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }
}

pub fn prlab(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_prlab"))
        .args(args)
        .output()
        .expect("prlab runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

pub fn load_schema(name: &str) -> Value {
    let path = schema_dir().join(name);
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

/// Validates `value` against a JSON Schema subset: `type`, `required`,
/// `properties`, `items`, `enum`, `const`, `anyOf`, `allOf`, local `$ref`,
/// `pattern`, `minItems`, `maxItems` and `minimum`. Unknown keywords are
/// ignored. Returns the first violation as a path and message.
pub fn validate(schema_root: &Value, value: &Value) -> Result<(), String> {
    check(schema_root, schema_root, value, "$")
}

fn resolve<'a>(root: &'a Value, reference: &str) -> &'a Value {
    let pointer = reference.strip_prefix('#').expect("only local references");
    root.pointer(pointer)
        .unwrap_or_else(|| panic!("dangling reference {reference}"))
}

fn type_matches(name: &str, v: &Value) -> bool {
    match name {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        other => panic!("unsupported type {other}"),
    }
}

fn check(root: &Value, schema: &Value, v: &Value, path: &str) -> Result<(), String> {
    let fail = |msg: String| Err(format!("{path}: {msg}"));
    let Some(s) = schema.as_object() else {
        return Ok(());
    };
    if let Some(r) = s.get("$ref").and_then(Value::as_str) {
        check(root, resolve(root, r), v, path)?;
    }
    if let Some(t) = s.get("type") {
        let ok = match t {
            Value::String(name) => type_matches(name, v),
            Value::Array(names) => names.iter().any(|n| type_matches(n.as_str().unwrap(), v)),
            _ => panic!("bad type keyword"),
        };
        if !ok {
            return fail(format!("expected type {t}, got {v}"));
        }
    }
    if let Some(c) = s.get("const") {
        if c != v {
            return fail(format!("expected {c}, got {v}"));
        }
    }
    if let Some(Value::Array(options)) = s.get("enum") {
        if !options.contains(v) {
            return fail(format!("{v} not in {options:?}"));
        }
    }
    if let (Some(p), Some(text)) = (s.get("pattern").and_then(Value::as_str), v.as_str()) {
        if !Regex::new(p).unwrap().is_match(text) {
            return fail(format!("{text:?} does not match {p}"));
        }
    }
    if let (Some(min), Some(x)) = (s.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            return fail(format!("{x} below minimum {min}"));
        }
    }
    if let Some(obj) = v.as_object() {
        if let Some(Value::Array(req)) = s.get("required") {
            for key in req.iter().filter_map(Value::as_str) {
                if !obj.contains_key(key) {
                    return fail(format!("missing required key {key:?}"));
                }
            }
        }
        if let Some(Value::Object(props)) = s.get("properties") {
            for (key, sub) in props {
                if let Some(child) = obj.get(key) {
                    check(root, sub, child, &format!("{path}.{key}"))?;
                }
            }
        }
    }
    if let Some(items) = v.as_array() {
        let len = items.len() as u64;
        if s.get("minItems")
            .and_then(Value::as_u64)
            .is_some_and(|n| len < n)
        {
            return fail(format!("too few items ({len})"));
        }
        if s.get("maxItems")
            .and_then(Value::as_u64)
            .is_some_and(|n| len > n)
        {
            return fail(format!("too many items ({len})"));
        }
        if let Some(sub) = s.get("items") {
            for (i, item) in items.iter().enumerate() {
                check(root, sub, item, &format!("{path}[{i}]"))?;
            }
        }
    }
    if let Some(Value::Array(all)) = s.get("allOf") {
        for sub in all {
            check(root, sub, v, path)?;
        }
    }
    if let Some(Value::Array(any)) = s.get("anyOf") {
        let errors: Vec<String> = any
            .iter()
            .filter_map(|sub| check(root, sub, v, path).err())
            .collect();
        if errors.len() == any.len() {
            return fail(format!("no alternative matched: {}", errors.join("; ")));
        }
    }
    Ok(())
}
