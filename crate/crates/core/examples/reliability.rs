// Monte Carlo key agreement for the [7,4] Hamming code under a z-basis
// attack, and the joint event behind the security bound.

use bb84z::bounds::{reliability_bound, BoundParams};
use bb84z::codes::CodePair;
use bb84z::protocol::{expected_difference_bound, monte_carlo_joint_event, reliability_trials, ProtocolParams};
use bb84z::quantum::AttackModel;

fn main() {
    let p_az = 1.0 / 7.0;
    let params = ProtocolParams::new(7, 7, p_az, p_az, CodePair::hamming74()).unwrap();
    let attack = AttackModel::conjugate_rotation(0.94f64.acos());

    let stats = reliability_trials(&params, &attack, 10_000, 1).unwrap();
    let bound = reliability_bound(&BoundParams::new(7, 7, 7, p_az, p_az, 0.01, p_az - 0.03, 1.0 / 7.0).unwrap());
    println!(
        "{} runs: {} aborted, {} key mismatches (frequency {:.4}, 95% CI [{:.4}, {:.4}]), bound {:.4}",
        stats.trials,
        stats.aborted,
        stats.mismatches,
        stats.mismatch.frequency,
        stats.mismatch.wilson_low,
        stats.mismatch.wilson_high,
        bound
    );

    let attack = AttackModel::rotation(0.6);
    let joint = monte_carlo_joint_event(&params, &attack, 10_000, 1).unwrap();
    println!(
        "INFO conjugate errors >= {}/2 with tests passing: {:.4} (x error {:.4}); expected-difference bound {:.4}",
        joint.d_rm,
        joint.estimate.frequency,
        joint.conjugate_error,
        expected_difference_bound(&params, &attack)
    );
}
