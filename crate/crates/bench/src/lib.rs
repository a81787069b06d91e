//! Shared setup for the criterion benchmarks.

use sclifford::clifford::Multivector;
use sclifford::poly::CliffordPolynomial;
use sclifford::scalar::{qi, Q};

pub type P = CliffordPolynomial<Q>;

/// A dense-ish degree-6 homogeneous polynomial with mixed blades.
pub fn sample_degree6(n: usize) -> P {
    let mut p = P::zero(n);
    let mut counter = 1i64;
    for a in 0..=6u8 {
        for b in 0..=(6 - a) {
            let c = 6 - a - b;
            let mut expo = vec![0u8; n + 1];
            expo[0] = a;
            expo[1] = b;
            expo[2] = c;
            let blade = (counter % (1 << n)) as u16;
            let mut mv = Multivector::zero(n);
            mv.add_term(blade, qi(counter % 5 - 2));
            p.add_term(expo, mv);
            counter += 3;
        }
    }
    p
}
