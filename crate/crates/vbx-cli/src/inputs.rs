//! Loading systems and auxiliary JSON files.

use crate::failure::Failure;
use std::path::Path;

/// Systems shipped with the tool, addressable by name.
const BUNDLED: &[(&str, &str)] = &[
    ("cubic", include_str!("../../../systems/cubic.json")),
    ("decoupled", include_str!("../../../systems/decoupled.json")),
    ("euler3", include_str!("../../../systems/euler3.json")),
    ("exp3", include_str!("../../../systems/exp3.json")),
    ("kt", include_str!("../../../systems/kt.json")),
    ("liouville", include_str!("../../../systems/liouville.json")),
    (
        "noninvolutive",
        include_str!("../../../systems/noninvolutive.json"),
    ),
    ("wave", include_str!("../../../systems/wave.json")),
];

pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

/// Text of a system: an existing file, else a bundled system named by the argument's file stem.
pub fn system_text(arg: &str) -> Result<String, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        return read(path);
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    BUNDLED
        .iter()
        .find(|(n, _)| *n == stem)
        .map(|(_, t)| t.to_string())
        .ok_or_else(|| {
            Failure::Input(format!(
                "{arg}: no such file or bundled system (bundled: {})",
                bundled_names().join(", ")
            ))
        })
}

pub fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}
