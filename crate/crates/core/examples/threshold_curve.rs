// Prints the asymptotic secure zone: for each z-basis threshold, the
// largest x-basis threshold with a positive key rate.

use bb84z::bounds::{max_p_az, secret_rate, symmetric_threshold, threshold_curve, uniform_grid};

fn main() {
    let curve = threshold_curve(&uniform_grid(11)).expect("grid lies in [0, 1/2]");
    println!("p_az     p_ax_max");
    for point in &curve {
        println!("{:.4}   {:.6}", point.p_az, point.p_ax_max);
    }

    let p = symmetric_threshold();
    println!("equal thresholds: {:.4}%", 100.0 * p);
    println!("largest p_az with p_ax = 0: {:.6}", max_p_az(0.0).unwrap());

    // Trading one basis for the other: 2% in x leaves room for this much z.
    let p_az = max_p_az(0.02).unwrap();
    let rate = secret_rate(0.9 * p_az, 0.02, 0.0, 0.0, 0.0).unwrap();
    println!("p_ax = 0.02 allows p_az up to {p_az:.4}; at 90% of that the rate is {rate:.4}");
}
