use crate::diffop::DiffOp;
use crate::exactnum::{binomial, fmt_rat, Rat};
use crate::fock::{Series, Truncation};
use crate::model::TargetModel;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Failure {
    pub label: String,
    pub monomial: String,
    pub residue: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub id: String,
    pub params: BTreeMap<String, String>,
    pub examined: u64,
    pub status: Status,
    pub failures: Vec<Failure>,
    pub wall_ms: u64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(
            f,
            "{:<17} {:<4}  examined {:>8}  failures {:>5}  {:>7} ms  {}",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.examined,
            self.failures.len(),
            self.wall_ms,
            params.join(" ")
        )?;
        const SHOWN: usize = 20;
        for x in self.failures.iter().take(SHOWN) {
            writeln!(f, "    {}  [{}]  {}", x.label, x.monomial, x.residue)?;
        }
        if self.failures.len() > SHOWN {
            writeln!(f, "    ... {} more", self.failures.len() - SHOWN)?;
        }
        Ok(())
    }
}

/// Number of monomials a truncation admits for the given target, without hbar.
pub fn window_size(m: &TargetModel, tr: &Truncation) -> u64 {
    let tvars = (tr.max_level as i64 + 1) * m.n as i64;
    let tcount = binomial(tvars + tr.t_deg as i64, tr.t_deg as i64);
    let scount = binomial(tr.s_max_index as i64 + tr.s_deg as i64, tr.s_deg as i64);
    let q = if m.has_novikov() { tr.q_max as u64 + 1 } else { 1 };
    let n = tcount * scount;
    u64::try_from(n).unwrap_or(u64::MAX).saturating_mul(q)
}

/// Accumulates residues of one check.
#[derive(Debug, Default)]
pub(super) struct Tally {
    pub examined: u64,
    pub failures: Vec<Failure>,
}

impl Tally {
    pub fn series(&mut self, label: &str, s: &Series, window: u64) {
        self.examined += window;
        for (m, c) in s.sorted_terms() {
            self.failures.push(Failure { label: label.to_string(), monomial: m.to_string(), residue: fmt_rat(&c) });
        }
    }

    /// `residue` is compared inside the union of the windows of `sides`.
    pub fn op(&mut self, label: &str, residue: &DiffOp, sides: &[&DiffOp]) {
        let mut keys = BTreeSet::new();
        for s in sides {
            for (m, d, _) in s.iter() {
                keys.insert((m.clone(), d.clone()));
            }
        }
        self.examined += keys.len().max(residue.len()) as u64;
        for (m, d, c) in residue.sorted_terms() {
            let ds: Vec<String> = d.iter().map(|v| format!("d/d{v}")).collect();
            let mono = if ds.is_empty() { m.to_string() } else { format!("{m} {}", ds.join(" ")) };
            self.failures.push(Failure { label: label.to_string(), monomial: mono, residue: fmt_rat(&c) });
        }
    }

    pub fn value(&mut self, label: &str, got: &Rat, want: &Rat) {
        self.examined += 1;
        if got != want {
            self.failures.push(Failure {
                label: label.to_string(),
                monomial: "1".into(),
                residue: format!("{} (expected {})", fmt_rat(got), fmt_rat(want)),
            });
        }
    }

    pub fn flag(&mut self, label: &str, ok: bool, detail: &str) {
        self.examined += 1;
        if !ok {
            self.failures.push(Failure { label: label.to_string(), monomial: "-".into(), residue: detail.to_string() });
        }
    }

    pub fn merge(&mut self, o: Tally) {
        self.examined += o.examined;
        self.failures.extend(o.failures);
    }

    pub fn finish(mut self, id: &str, params: BTreeMap<String, String>, wall_ms: u64) -> Report {
        self.failures.sort();
        let status = if self.failures.is_empty() { Status::Pass } else { Status::Fail };
        Report { id: id.to_string(), params, examined: self.examined, status, failures: self.failures, wall_ms }
    }
}
