//! One line per acceptance criterion; exits nonzero if any fails.

use njalg::acceptance::{run, Options, DEFAULT_SEED};

fn main() {
    let seed = std::env::var("NJALG_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED);
    let reports = run(&Options::with_seed(seed));
    for r in &reports {
        println!("{}", r.line());
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed (seed {seed})", reports.len() - failed, reports.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
