//! Runs every `target/release/curio` command shown in the README and docs,
//! with budgets and seed counts shrunk so the whole set takes seconds.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn pages() -> Vec<PathBuf> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let mut acceptance: Vec<PathBuf> =
        fs::read_dir(root.join("docs/acceptance")).unwrap().map(|e| e.unwrap().path()).collect();
    acceptance.sort();
    let mut pages = vec![root.join("README.md")];
    pages.extend(acceptance);
    pages.push(root.join("docs/formats.md"));
    pages
}

/// Shell commands inside fenced blocks that invoke the release binary.
fn commands(page: &Path) -> Vec<String> {
    let text = fs::read_to_string(page).unwrap();
    let mut in_block = false;
    let mut out = Vec::new();
    for line in text.lines() {
        if line.starts_with("```") {
            in_block = !in_block;
        } else if in_block && line.starts_with("target/release/curio ") {
            out.push(line.to_string());
        }
    }
    out
}

fn shrink(args: &mut [String]) {
    for i in 1..args.len() {
        match args[i - 1].as_str() {
            "--budget" => args[i] = "60".into(),
            "--seeds" => args[i] = "3".into(),
            _ => {}
        }
    }
}

#[test]
fn documented_commands_run() {
    let work = tempfile::tempdir().unwrap();
    let mut ran = 0;
    for page in pages() {
        for line in commands(&page) {
            let (cmd, comment) = line.split_once('#').unwrap_or((&line, ""));
            let mut args: Vec<String> = cmd.split_whitespace().skip(1).map(String::from).collect();
            shrink(&mut args);
            let out = Command::new(env!("CARGO_BIN_EXE_curio")).args(&args).current_dir(work.path()).output().unwrap();
            let expected = if comment.contains("exit 1") { 1 } else { 0 };
            assert_eq!(
                out.status.code(),
                Some(expected),
                "{}: `{line}`\n{}",
                page.display(),
                String::from_utf8_lossy(&out.stderr)
            );
            ran += 1;
        }
    }
    assert!(ran >= 15, "only {ran} documented commands found");
}
