use std::fmt::Write;

use serde::Serialize;

use super::stats::Estimate;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub sweep: String,
    pub estimate: f64,
    pub stderr: f64,
    pub replicas: usize,
}

/// Rows of (sweep label, estimate, standard error, replica count). Exact
/// values carry stderr 0 and replicas 0.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StatTable {
    pub rows: Vec<Row>,
}

impl StatTable {
    pub fn push(&mut self, sweep: impl Into<String>, e: Estimate) {
        self.rows.push(Row {
            sweep: sweep.into(),
            estimate: e.mean,
            stderr: e.se,
            replicas: e.n,
        });
    }

    pub fn push_exact(&mut self, sweep: impl Into<String>, value: f64) {
        self.push(sweep, Estimate::exact(value));
    }

    pub fn get(&self, sweep: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.sweep == sweep)
    }

    /// Comma-separated with a header line and `\n` endings. Floats use Rust's
    /// shortest round-trip formatting, which ignores the locale.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("sweep,estimate,stderr,replicas\n");
        for r in &self.rows {
            let label = if r.sweep.contains([',', '"', '\n']) {
                format!("\"{}\"", r.sweep.replace('"', "\"\""))
            } else {
                r.sweep.clone()
            };
            writeln!(s, "{},{},{},{}", label, r.estimate, r.stderr, r.replicas).unwrap();
        }
        s
    }
}

/// One checked statement. `pass == None` marks a report-only line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub pass: Option<bool>,
    pub detail: String,
}

impl Criterion {
    pub fn gate(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Criterion {
            name: name.into(),
            pass: Some(pass),
            detail: detail.into(),
        }
    }

    pub fn note(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Criterion {
            name: name.into(),
            pass: None,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    Report,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Report => "REPORT",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub id: String,
    /// Non-gating experiments always end in REPORT.
    pub gating: bool,
    pub table: StatTable,
    pub criteria: Vec<Criterion>,
}

impl Report {
    pub fn new(id: &str, gating: bool) -> Self {
        Report {
            id: id.to_string(),
            gating,
            table: StatTable::default(),
            criteria: Vec::new(),
        }
    }

    pub fn verdict(&self) -> Verdict {
        if !self.gating {
            Verdict::Report
        } else if self.criteria.iter().all(|c| c.pass != Some(false)) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }

    /// Verdict line followed by one line per criterion.
    pub fn verdict_text(&self) -> String {
        let mut s = format!("{}\n", self.verdict().label());
        for c in &self.criteria {
            let tag = match c.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "NOTE",
            };
            writeln!(s, "{tag} {}: {}", c.name, c.detail).unwrap();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = StatTable::default();
        t.push_exact("a", 0.25);
        t.push(
            "b,c",
            Estimate {
                mean: -1.5,
                se: 0.125,
                n: 4,
            },
        );
        assert_eq!(t.to_csv(), "sweep,estimate,stderr,replicas\na,0.25,0,0\n\"b,c\",-1.5,0.125,4\n");
    }

    #[test]
    fn verdicts() {
        let mut r = Report::new("x", true);
        r.criteria.push(Criterion::gate("one", true, ""));
        r.criteria.push(Criterion::note("two", ""));
        assert_eq!(r.verdict(), Verdict::Pass);
        r.criteria.push(Criterion::gate("three", false, ""));
        assert_eq!(r.verdict(), Verdict::Fail);
        assert!(r.verdict_text().starts_with("FAIL\nPASS one"));
        r.gating = false;
        assert_eq!(r.verdict(), Verdict::Report);
    }
}
