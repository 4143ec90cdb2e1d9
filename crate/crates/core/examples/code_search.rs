// Random search for a code pair, then an independent check of what it
// promises.

use bb84z::codes::{search_code_pair, CodePair};
use bb84z::gf2::BitVector;
use bb84z::protocol::trial_rng;

fn main() {
    let mut rng = trial_rng(5, 0);
    let code = search_code_pair(7, 3, 1, 0.14, 1, &mut rng, 10_000)
        .unwrap()
        .expect("single-error-correcting codes of length 7 exist");
    print!("{}", code.to_text());
    println!(
        "d_rm = {}, min distance = {}, corrects {}",
        code.d_rm(),
        code.min_distance(),
        code.t_corr()
    );

    // Every codeword with any single flip decodes back.
    let mut checked = 0;
    for value in 0..128u64 {
        let c = BitVector::from_u64(7, value);
        if !code.syndrome(&c).unwrap().is_zero() {
            continue;
        }
        for pos in 0..7 {
            let mut received = c.clone();
            received.flip(pos);
            assert_eq!(code.correct(&received, &BitVector::zeros(3)).unwrap(), c);
            checked += 1;
        }
    }
    println!("{checked} single-error cases corrected");

    let back = CodePair::from_text(&code.to_text()).unwrap();
    assert_eq!(back, code);
}
