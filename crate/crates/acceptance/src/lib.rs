//! Runner for the acceptance checks: each check returns a [`Verdict`], panics
//! count as failures, and every outcome is printed as one line.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

pub type Check = fn(&mut Vec<String>) -> Verdict;

/// Runs every check in order, printing notes followed by a
/// `criterion NN name: PASS|FAIL [...]` line. Returns the number of failures.
pub fn run_all(checks: &[(u32, &str, Check)]) -> usize {
    let mut failed = 0;
    for &(id, name, check) in checks {
        let start = Instant::now();
        let mut notes = Vec::new();
        let v = catch_unwind(AssertUnwindSafe(|| check(&mut notes)))
            .unwrap_or_else(|e| Verdict::new(false, format!("panicked: {}", panic_message(&*e))));
        for n in &notes {
            println!("criterion {id:02} note: {n}");
        }
        let secs = start.elapsed().as_secs_f64();
        println!(
            "criterion {id:02} {name}: {} [{}] ({secs:.1}s)",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        if !v.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        checks.len() - failed,
        checks.len()
    );
    failed
}

fn panic_message(e: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = e.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = e.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic".into()
    }
}
