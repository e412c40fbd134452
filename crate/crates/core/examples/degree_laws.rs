//! Build the critical power-law family and inspect its moments.
//!
//! ```bash
//! cargo run -p stable-graph --example degree_laws
//! ```

use stable_graph::degree_model::{make_critical_power_law, sample_degrees, size_biased_law, DegreeLaw};
use stable_graph::Stream;

fn main() -> stable_graph::Result<()> {
    for alpha in [1.2, 1.5, 1.8] {
        let law = make_critical_power_law(alpha, 3)?;
        println!(
            "alpha={alpha}: P(D=1)={:.6} c={:.6} mu={:.6} theta={:.12} E[Z]={:.10}",
            law.prob(1),
            law.c(),
            law.mu(),
            law.theta(),
            size_biased_law(&law).mean()
        );
    }
    let law = DegreeLaw::finite(&[(1, 0.75), (3, 0.25)])?;
    let m = law.moments();
    println!("two-atom law: mu={} theta={} beta={}", m.mu, m.theta, m.beta);

    let mut rng = Stream::new(2024);
    let seq = sample_degrees(&make_critical_power_law(1.5, 3)?, 100_000, &mut rng)?;
    let max = seq.degrees().iter().max().unwrap();
    println!("n=100000 sample: total={} max degree={max}", seq.total());
    Ok(())
}
