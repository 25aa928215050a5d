//! Every `Formula:` tag in the workspace sources is documented in docs/MATHMAP.md.

use std::path::{Path, PathBuf};

fn rust_sources(dir: &Path, out: &mut Vec<PathBuf>) {
    for entry in std::fs::read_dir(dir).expect("readable source dir") {
        let path = entry.expect("dir entry").path();
        if path.is_dir() {
            rust_sources(&path, out);
        } else if path.extension().is_some_and(|e| e == "rs") {
            out.push(path);
        }
    }
}

/// Backticked tags on `Formula:` lines and their `//!` continuation lines.
fn tags_in(text: &str) -> Vec<String> {
    let mut tags = Vec::new();
    let mut in_block = false;
    for line in text.lines() {
        let line = line.trim_start();
        if let Some(rest) = line.strip_prefix("//! Formula:") {
            in_block = true;
            tags.extend(rest.split('`').skip(1).step_by(2).map(str::to_string));
        } else if in_block && line.starts_with("//! `") {
            tags.extend(line.split('`').skip(1).step_by(2).map(str::to_string));
        } else {
            in_block = false;
        }
    }
    tags
}

#[test]
fn every_formula_tag_is_mapped() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let map = std::fs::read_to_string(root.join("docs/MATHMAP.md")).expect("math map present");
    let mut files = Vec::new();
    rust_sources(&root.join("crates"), &mut files);
    let mut tags: Vec<String> = files.iter().flat_map(|f| tags_in(&std::fs::read_to_string(f).unwrap())).collect();
    tags.sort();
    tags.dedup();
    assert!(tags.len() > 40, "found only {} tags", tags.len());
    let missing: Vec<&String> = tags.iter().filter(|t| !map.contains(&format!("| `{t}` |"))).collect();
    assert!(missing.is_empty(), "unmapped tags: {missing:?}");
}

#[test]
fn convention_ledger_has_core_entries() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let map = std::fs::read_to_string(root.join("docs/MATHMAP.md")).unwrap();
    for item in ["| Metric |", "| Dirac matrices |", "| Mass shell |", "| Spinor boost |", "| Surface weight |"] {
        assert!(map.contains(item), "missing convention {item}");
    }
}
