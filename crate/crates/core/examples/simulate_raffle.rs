//! Monte Carlo estimates of raffle anti-correlations.
//!
//! Samples the LP witness raffle for a spin-1 target and the uniform spin-1/2
//! raffle, compares the estimates with the exact values, and shows that the
//! totals do not depend on how the draws are split across threads.
//!
//! Run with `cargo run --release --example simulate_raffle`.

use corrgeo::raffles::{self, BalancedValueSet, Raffle, RaffleFeasibility};
use corrgeo::rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 1_000_000;
    let vs = BalancedValueSet::new(2);
    let target = [rational::ratio(-1, 2), rational::ratio(-1, 4), rational::ratio(1, 3)];
    let RaffleFeasibility::Feasible(witness) = raffles::feasible(&vs, &target)? else {
        return Err("target should be reachable by spin-1 raffles".into());
    };
    let uniform = Raffle::uniform(BalancedValueSet::new(1), &BalancedValueSet::new(1).tickets())?;

    for (name, r) in [("spin-1 witness", &witness), ("uniform spin-1/2", &uniform)] {
        let exact = raffles::chi_exact(r)?.map(|x| rational::to_f64(&x));
        let one = raffles::simulate(r, n, 2024, 1);
        let four = raffles::simulate(r, n, 2024, 4);
        println!("{name}: {} tickets", r.len());
        println!("  exact     {:+.5?}", exact);
        println!("  simulated {:+.5?}", one.chi);
        let same = one.chi.map(f64::to_bits) == four.chi.map(f64::to_bits) && one.marginals == four.marginals;
        println!("  1 shard and 4 shards bit-identical: {same}");
    }
    Ok(())
}
