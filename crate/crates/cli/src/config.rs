//! `--config FILE`: a JSON object whose keys are the long flags of a
//! subcommand. The object is expanded into flags placed right after the
//! subcommand, so flags typed on the command line still win.

use std::ffi::OsString;

use clap::CommandFactory;
use serde_json::Value;

use dglab::Error;

use crate::Cli;

/// Global flags that take a value and may precede the subcommand.
const GLOBAL_WITH_VALUE: [&str; 2] = ["--out-dir", "--config"];

pub fn expand(mut argv: Vec<OsString>) -> Result<Vec<OsString>, Error> {
    let Some(path) = take_config(&mut argv)? else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{path}: {e}")))?;
    let Value::Object(map) = value else {
        return Err(Error::Config(format!("{path}: expected a JSON object")));
    };

    let mut pos = subcommand_position(&argv);
    let from_file = map.get("command").map(|c| c.as_str().map(str::to_owned));
    let name = match (pos, from_file) {
        (_, Some(None)) => return Err(Error::Config("\"command\" must be a string".into())),
        (Some(i), Some(Some(c))) if argv[i].to_str() != Some(c.as_str()) => {
            return Err(Error::Config(format!("config is for {c:?}, command line runs {:?}", argv[i])));
        }
        (Some(i), _) => argv[i].to_string_lossy().into_owned(),
        (None, Some(Some(c))) => {
            argv.push(c.clone().into());
            pos = Some(argv.len() - 1);
            c
        }
        (None, None) => return Err(Error::Config("no subcommand given".into())),
    };
    let root = Cli::command();
    let sub = root.find_subcommand(&name).ok_or_else(|| Error::Config(format!("unknown subcommand {name:?}")))?;
    let known: Vec<String> = sub.get_arguments().filter_map(|a| a.get_long().map(str::to_owned)).collect();

    let mut flags = vec![];
    for (key, v) in &map {
        if key == "command" {
            continue;
        }
        if !known.iter().any(|k| k == key) || key == "config" || key == "out-dir" {
            return Err(Error::Config(format!("unknown key {key:?} for {name}")));
        }
        let scalar = |v: &Value| -> Result<String, Error> {
            match v {
                Value::Number(n) => Ok(n.to_string()),
                Value::String(s) => Ok(s.clone()),
                _ => Err(Error::Config(format!("key {key:?}: unsupported value {v}"))),
            }
        };
        match v {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => flags.push(format!("--{key}")),
            Value::Array(items) => {
                if !items.is_empty() {
                    let parts: Result<Vec<String>, Error> = items.iter().map(scalar).collect();
                    flags.push(format!("--{key}={}", parts?.join(",")));
                }
            }
            other => flags.push(format!("--{key}={}", scalar(other)?)),
        }
    }
    let at = pos.expect("subcommand located") + 1;
    argv.splice(at..at, flags.into_iter().map(OsString::from));
    Ok(argv)
}

fn take_config(argv: &mut Vec<OsString>) -> Result<Option<String>, Error> {
    for i in 1..argv.len() {
        let a = argv[i].to_string_lossy().into_owned();
        if a == "--config" {
            if i + 1 >= argv.len() {
                return Err(Error::Config("--config needs a file".into()));
            }
            let p = argv.remove(i + 1).to_string_lossy().into_owned();
            argv.remove(i);
            return Ok(Some(p));
        }
        if let Some(p) = a.strip_prefix("--config=") {
            argv.remove(i);
            return Ok(Some(p.to_owned()));
        }
    }
    Ok(None)
}

fn subcommand_position(argv: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < argv.len() {
        let a = argv[i].to_string_lossy();
        if GLOBAL_WITH_VALUE.contains(&a.as_ref()) {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}
