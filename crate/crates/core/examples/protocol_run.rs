// One run of the protocol against a weak collective attack, step by step.

use bb84z::codes::CodePair;
use bb84z::protocol::{run_protocol, trial_rng, ProtocolParams};
use bb84z::quantum::{AttackModel, BasisTag};

fn main() {
    let params = ProtocolParams::new(7, 7, 2.0 / 7.0, 2.0 / 7.0, CodePair::hamming74()).unwrap();
    let attack = AttackModel::from_error_rates(0.05, 0.08).unwrap();
    println!(
        "attack error rates: z {:.3}, x {:.3}",
        attack.error_prob(BasisTag::Z),
        attack.error_prob(BasisTag::X)
    );

    let t = run_protocol(&params, &attack, &mut trial_rng(2024, 0)).unwrap();
    println!("INFO   s = {}", t.partition.s);
    println!("TEST-Z z = {}", t.partition.z);
    println!("TEST-X b = {}", t.partition.b);
    println!("sent     {}", t.i_sent);
    println!("received {}", t.i_received);
    println!(
        "errors: INFO {}, TEST-Z {}, TEST-X {}",
        t.info_errors(),
        t.c_z.weight(),
        t.c_b.weight()
    );
    match (&t.xi, &t.key_alice, &t.key_bob) {
        (Some(xi), Some(ka), Some(kb)) => println!("syndrome {xi}, keys {ka} / {kb}"),
        _ => println!("aborted at the test step"),
    }
    assert!(t.check_invariants(&params));
}
