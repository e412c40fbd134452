//! Explore a critical configuration graph and print its largest components.
//!
//! ```bash
//! cargo run --release -p stable-graph --example explore_graph
//! ```

use stable_graph::config_explorer::{explore, first_invariant_violation, ExploreOptions};
use stable_graph::degree_model::{make_critical_power_law, sample_degrees};
use stable_graph::Stream;

fn main() -> stable_graph::Result<()> {
    let law = make_critical_power_law(1.5, 3)?;
    let n = 100_000;
    let mut rng = Stream::new(7);
    let seq = sample_degrees(&law, n, &mut rng)?;
    let ex = explore(&seq, &mut rng, ExploreOptions { record_edges: true, ..Default::default() });
    println!("steps={} components={} back-edges={}", ex.trace.len(), ex.components.len(), ex.back_edges.len());
    println!("invariants: {:?}", first_invariant_violation(&ex));

    let mut comps: Vec<_> = ex.components.iter().collect();
    comps.sort_by_key(|c| std::cmp::Reverse(c.size));
    let scale = (n as f64).powf(-law.alpha() / (law.alpha() + 1.0));
    for c in comps.iter().take(5) {
        println!(
            "size={:>6} scaled={:.3} surplus={} diameter={}",
            c.size,
            c.size as f64 * scale,
            c.surplus,
            ex.component_diameter(c)?
        );
    }
    Ok(())
}
