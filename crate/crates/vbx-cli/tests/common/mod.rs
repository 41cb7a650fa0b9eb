#![allow(dead_code)]

use serde_json::Value;
use std::process::Command;

pub fn root() -> String {
    format!("{}/../..", env!("CARGO_MANIFEST_DIR"))
}

/// Run `vbx` from the workspace root with VBX_SEED cleared.
pub fn vbx(args: &[&str]) -> (i32, String, String) {
    vbx_env(args, None)
}

pub fn vbx_env(args: &[&str], seed: Option<&str>) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vbx"));
    cmd.current_dir(root()).args(args).env_remove("VBX_SEED");
    if let Some(s) = seed {
        cmd.env("VBX_SEED", s);
    }
    let out = cmd.output().expect("vbx runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

/// Run with `--json` and parse the report; an empty stdout gives `Value::Null`.
pub fn vbx_json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let (code, out, _) = vbx(&a);
    let v = if out.trim().is_empty() {
        Value::Null
    } else {
        serde_json::from_str(&out).expect("JSON report")
    };
    (code, v)
}
