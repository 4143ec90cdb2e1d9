// Eve's probe states for the two values of a parity key, and how far apart
// they are compared with the bound from the conjugate-basis error tail.

use std::f64::consts::PI;

use bb84z::bounds::key_distance_bound;
use bb84z::codes::CodePair;
use bb84z::quantum::{binomial_tail, conjugate_error_prob, rho_hat, trace_distance, AttackModel};
use bb84z::BitVector;

fn main() {
    let code = CodePair::parity_key(3).unwrap();
    let z = BitVector::zeros(3);
    let no_syndrome = BitVector::zeros(0);
    println!("theta/pi  x-error  distance  bound");
    for k in 0..=8 {
        let theta = k as f64 * PI / 16.0;
        let attack = AttackModel::rotation(theta);
        let even = rho_hat(&attack, &code, &z, &no_syndrome, &"0".parse().unwrap()).unwrap();
        let odd = rho_hat(&attack, &code, &z, &no_syndrome, &"1".parse().unwrap()).unwrap();
        let distance = trace_distance(&even, &odd).unwrap();
        let q = conjugate_error_prob(&attack);
        let bound = key_distance_bound(code.m(), binomial_tail(3, q, code.d_rm() as f64 / 2.0));
        println!("{:>8.4} {:>8.4} {:>9.6} {:>6.4}", theta / PI, q, distance, bound);
    }
}
