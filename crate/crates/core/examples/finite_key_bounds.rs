// Finite-key security and reliability bounds as the block length grows.

use bb84z::bounds::{clamp_for_display, key_rate, reliability_bound, security_exponent_bound, BoundParams};

fn main() {
    println!("{:>8} {:>14} {:>12} {:>10}", "n", "security", "reliability", "rate");
    for n in [1_000usize, 10_000, 100_000, 1_000_000] {
        let p = BoundParams::new(n, n, n, 0.03, 0.03, 0.02, 0.02, 0.2).expect("valid parameters");
        let security = security_exponent_bound(&p);
        println!(
            "{n:>8} {:>14.6e} {:>12.6e} {:>10.6}",
            security,
            reliability_bound(&p),
            key_rate(&p).unwrap()
        );
        if security > 1.0 {
            println!(
                "{:>8} (security bound vacuous; displayed as {})",
                "",
                clamp_for_display(security)
            );
        }
    }
}
