//! GHP distance between a discrete component and a sampled limit component.
//!
//! ```bash
//! cargo run --release -p stable-graph --example ghp_compare
//! ```

use stable_graph::config_explorer::{explore, ExploreOptions};
use stable_graph::continuum_graph::{ghp_estimate, graph_component_to_mms, sample_limit_component, ProxyConfig};
use stable_graph::degree_model::{make_critical_power_law, sample_degrees};
use stable_graph::Stream;

fn main() -> stable_graph::Result<()> {
    let law = make_critical_power_law(1.5, 3)?;
    let n = 20_000;
    let mut rng = Stream::new(17);
    let seq = sample_degrees(&law, n, &mut rng)?;
    let ex = explore(&seq, &mut rng, ExploreOptions { record_edges: true, ..Default::default() });
    let largest = ex.components.iter().max_by_key(|c| c.size).unwrap();
    let edges = ex.component_edges(largest).unwrap();
    let discrete = graph_component_to_mms(ex.component_vertices(largest), edges, n, law.alpha(), Some(64), &mut rng)?;

    let mut cfg = ProxyConfig::new(law.clone(), 300);
    cfg.batch = 64;
    cfg.max_points = 64;
    cfg.ess_floor = 5.0;
    let limit = sample_limit_component(discrete.total_mass(), largest.surplus, &cfg, &mut rng)?;
    let d = ghp_estimate(&discrete, &limit.space, 2_000)?;
    println!(
        "component size={} surplus={} mass={:.3} diameters {:.3} / {:.3}",
        largest.size,
        largest.surplus,
        discrete.total_mass(),
        discrete.diameter(),
        limit.space.diameter()
    );
    println!("GHP estimate={:.4} exact={} evaluations={}", d.value, d.exact, d.evaluations);
    Ok(())
}
