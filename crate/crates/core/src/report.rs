//! Plain-text verification reports.

use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// certificate on success, witness on failure
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub info: Vec<String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn info(&mut self, line: impl Into<String>) {
        self.info.push(line.into());
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn extend(&mut self, other: Report) {
        self.info.extend(other.info);
        self.checks.extend(other.checks);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "== {} ==", self.title);
        for line in &self.info {
            let _ = writeln!(out, "{line}");
        }
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                let _ = writeln!(out, "[{tag}] {}", c.name);
            } else {
                let _ = writeln!(out, "[{tag}] {}: {}", c.name, c.detail);
            }
        }
        let ok = self.checks.iter().filter(|c| c.passed).count();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "result: {verdict} ({ok}/{} checks)", self.checks.len());
        out
    }
}

/// `[a, b, c]` → `x0->a x1->b x2->c` using the given namers.
pub fn render_map(map: &[usize], src: impl Fn(usize) -> String, dst: impl Fn(usize) -> String) -> String {
    map.iter()
        .enumerate()
        .map(|(x, &y)| format!("{}->{}", src(x), dst(y)))
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_counts_checks() {
        let mut r = Report::new("t");
        r.info("hello");
        r.check("a", true, "ok");
        r.check("b", false, "");
        let s = r.render();
        assert!(s.contains("[PASS] a: ok"));
        assert!(s.contains("[FAIL] b\n"));
        assert!(s.ends_with("result: FAIL (1/2 checks)\n"));
        assert!(!r.passed());
    }
}
