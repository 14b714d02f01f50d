//! Print the engine's retained-state growth and measured per-symbol time
//! across stream lengths on adversarial instances, for both candidate
//! finders.
//!
//! Usage: cargo run --release -p wcperiod --example space_curve [k] [max_pow]

use std::time::Instant;

use wcperiod::oracle::gen_hard_instance;
use wcperiod::{find_wildcard_periods, SubroutineKind};

fn main() {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().and_then(|v| v.parse().ok()).unwrap_or(4);
    let max_pow: u32 = args.next().and_then(|v| v.parse().ok()).unwrap_or(16);

    println!(
        "{:>8} | {:>10} | {:>12} | {:>12} | {:>10} | {:>14} | {:>10}",
        "n", "subroutine", "fingerprints", "assignments", "buckets", "finder words", "ns/symbol"
    );
    println!("{}", "-".repeat(95));

    let mut pow = 10;
    while pow <= max_pow {
        let n = 1usize << pow;
        let instance = gen_hard_instance(n, k, k / 2, 1).expect("valid fixture parameters");
        for (label, sub) in [
            ("reference", SubroutineKind::Reference),
            ("sketch", SubroutineKind::Sketch),
        ] {
            let started = Instant::now();
            let report =
                find_wildcard_periods(&instance.stream, k, sub, 1).expect("engine run succeeds");
            let per_symbol = started.elapsed().as_nanos() / (2 * n as u128);
            println!(
                "{:>8} | {:>10} | {:>12} | {:>12} | {:>10} | {:>14} | {:>10}",
                n,
                label,
                report.stats.fingerprints_stored,
                report.stats.assignment_entries,
                report.stats.buckets_nonempty,
                report.stats.kmismatch_space_words,
                per_symbol,
            );
        }
        pow += 2;
    }
}
