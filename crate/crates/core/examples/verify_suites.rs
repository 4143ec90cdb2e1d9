// Runs the exhaustive inequality suites and summarizes the closest calls.

use bb84z::verify::{run_all, violations, VerifyOptions};

fn main() {
    let rows = run_all(&VerifyOptions::new(1)).unwrap();
    let mut suites: Vec<&str> = rows.iter().map(|r| r.suite).collect();
    suites.dedup();
    for suite in suites {
        let in_suite: Vec<_> = rows.iter().filter(|r| r.suite == suite).collect();
        let tightest = in_suite
            .iter()
            .filter(|r| r.rhs > 0.0)
            .max_by(|a, b| (a.lhs / a.rhs).total_cmp(&(b.lhs / b.rhs)));
        print!("{suite}: {} instances", in_suite.len());
        if let Some(r) = tightest {
            print!(", tightest lhs/rhs = {:.4} at {}", r.lhs / r.rhs, r.instance);
        }
        println!();
    }
    println!("violations: {}", violations(&rows).len());
}
