//! Sample a limit component of given mass and surplus and print its shape.
//!
//! ```bash
//! cargo run --release -p stable-graph --example limit_component
//! ```

use stable_graph::continuum_graph::{sample_limit_component, ProxyConfig};
use stable_graph::degree_model::make_critical_power_law;
use stable_graph::Stream;

fn main() -> stable_graph::Result<()> {
    let law = make_critical_power_law(1.5, 3)?;
    let mut cfg = ProxyConfig::new(law, 400);
    cfg.batch = 128;
    cfg.max_points = 128;
    let mut rng = Stream::new(23);
    for surplus in 0..3 {
        let c = sample_limit_component(1.0, surplus, &cfg, &mut rng)?;
        println!(
            "surplus={surplus}: points={} mass={:.3} diameter={:.4} area={:.4} identified pairs={} ess={:.1}",
            c.space.len(),
            c.space.total_mass(),
            c.space.diameter(),
            c.excursion.area(),
            c.pairs.len(),
            c.ess
        );
        for m in &c.excursion.marks {
            println!("  mark s={:.4} x={:.4} closes at {:.4}", m.s, m.x, m.t);
        }
    }
    Ok(())
}
