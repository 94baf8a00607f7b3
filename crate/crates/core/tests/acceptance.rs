//! Runs every acceptance criterion at its pinned parameters and time limit,
//! printing one line per criterion. Exits nonzero if any criterion fails.

use hodge_virasoro::constraints::{run_check, CheckParams};
use std::time::{Duration, Instant};

const CRITERIA: [(&str, u64); 11] = [
    ("oracle", 1),
    ("bracket", 300),
    ("bch_vs_closed", 300),
    ("quantization", 60),
    ("fp", 120),
    ("genus0", 600),
    ("ehx", 120),
    ("genus1_L1", 300),
    ("higher_genus", 300),
    ("identities", 600),
    ("negative_control", 300),
];

fn main() {
    let mut failed = 0;
    for (i, (id, limit)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let res = run_check(id, &CheckParams::default());
        let took = start.elapsed();
        let limit = Duration::from_secs(*limit);
        let (ok, detail) = match &res {
            Ok(r) if !r.passed() => {
                let first = r.failures.first().map(|f| format!(", first failure: {} {} -> {}", f.label, f.monomial, f.residue));
                (false, format!("{} examined, {} failures{}", r.examined, r.failures.len(), first.unwrap_or_default()))
            }
            Ok(_) if took > limit => (false, format!("over time limit {limit:?}")),
            Ok(r) => (true, format!("{} examined", r.examined)),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {} {}: {} ({detail}; {:.2}s)",
            i + 1,
            id,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    println!("acceptance: {}/{} passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
