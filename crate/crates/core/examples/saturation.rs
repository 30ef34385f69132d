//! Singlet correlations fill the whole elliptope.
//!
//! For random interior triples and several spins, find measurement directions
//! whose singlet anti-correlations reproduce the triple, and report the worst
//! error. Also checks the closed form <(a.S)(b.S)> = -s(s+1)/3 a.b.
//!
//! Run with `cargo run --release --example saturation`.

use corrgeo::elliptope::{self, CorrelationTriple, Verdict};
use corrgeo::quantum::{self, Direction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut points = Vec::new();
    while points.len() < 50 {
        let c: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        if elliptope::classify(c, elliptope::DEFAULT_TOL) == Verdict::Inside {
            points.push(CorrelationTriple::from_array(c)?);
        }
    }
    for spin2 in [1, 2, 3, 4] {
        let mut worst: f64 = 0.0;
        for t in &points {
            let dirs = quantum::saturate(t, spin2)?;
            let chi = quantum::chi_triple(spin2, &dirs)?;
            for (x, y) in chi.iter().zip(t.as_array()) {
                worst = worst.max((x - y).abs());
            }
        }
        println!("2s = {spin2}: {} points saturated, max error {worst:.2e}", points.len());
    }

    let a = Direction::new([1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0])?;
    let b = Direction::new([0.0, 0.6, -0.8])?;
    for spin2 in 1..=6 {
        let s = spin2 as f64 / 2.0;
        let got = quantum::singlet_correlation(spin2, &a, &b)?;
        let want = -s * (s + 1.0) / 3.0 * a.dot(&b);
        println!("2s = {spin2}: <(a.S)(b.S)> = {got:+.12}, closed form {want:+.12}");
    }
    Ok(())
}
