pub mod random;
pub mod reference;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn leisheet(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leisheet"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn leisheet")
}

pub fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Minimal CSV split for fixtures that never quote.
pub fn split_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.is_empty());
    let header = lines
        .next()
        .unwrap_or_default()
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    (header, rows)
}

pub fn join_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

/// Parses `row N, Header: CODE: message` lines from convert's stderr.
pub fn cell_issues(stderr: &str) -> Vec<(usize, String, String)> {
    stderr
        .lines()
        .filter_map(|l| {
            let rest = l.strip_prefix("row ")?;
            let (row, rest) = rest.split_once(", ")?;
            let (header, rest) = rest.split_once(": ")?;
            let (code, _) = rest.split_once(": ")?;
            Some((row.parse().ok()?, header.to_owned(), code.to_owned()))
        })
        .collect()
}
