// Exact sampling-without-replacement probabilities next to the exponential
// bound they must stay under.

use bb84z::protocol::hoeffding_exhaustive;
use bb84z::BitVector;

fn main() {
    let (n, n_x) = (6, 6);
    let eps = 0.2;
    let ratio = n_x as f64 / (n + n_x) as f64;
    let bound = (-2.0 * ratio * ratio * n as f64 * eps * eps).exp();
    println!("n = {n}, n_x = {n_x}, eps = {eps}: bound {bound:.6}");
    for p_ax in [0.0, 1.0 / 6.0, 0.25] {
        let (mut worst, mut at) = (0.0, 0);
        for pool in 0..1u64 << (n + n_x) {
            let p = hoeffding_exhaustive(&BitVector::from_u64(n + n_x, pool), n, n_x, p_ax, eps).unwrap();
            if p > worst {
                (worst, at) = (p, pool);
            }
        }
        println!(
            "p_ax = {p_ax:.4}: worst pool {} with probability {worst:.6}",
            BitVector::from_u64(n + n_x, at)
        );
    }
}
