//! Simulate the stable Lévy process, its tilt and the reflected path.
//!
//! ```bash
//! cargo run --release -p stable-graph --example levy_paths
//! ```

use stable_graph::degree_model::make_critical_power_law;
use stable_graph::levy_sim::{inverse_local_time, reflect, rn_weight, simulate_l, simulate_tilted, LevyParams, TiltMethod};
use stable_graph::Stream;

fn main() -> stable_graph::Result<()> {
    let law = make_critical_power_law(1.5, 3)?;
    let p = LevyParams::stable(1.5, law.c(), law.mu())?;
    let dt = 1.0 / 256.0;
    let base = Stream::new(3);

    let paths = 20_000;
    let mean_weight = (0..paths)
        .map(|i| simulate_l(&p, 1.0, dt, &mut base.split(i)).and_then(|l| rn_weight(&l, 1.0, &p)))
        .sum::<stable_graph::Result<f64>>()?
        / paths as f64;
    println!("E[weight at t=1] ~ {mean_weight:.4}");

    let tilted = simulate_tilted(&p, 2.0, dt, &mut base.split(u64::MAX), TiltMethod::Direct { eps_cut: None })?;
    let r = reflect(&tilted);
    let top = r.values.iter().copied().fold(0.0, f64::max);
    println!("tilted end={:.4} drift={:.4} max reflected={top:.4}", tilted.values.last().unwrap(), p.drift(2.0));
    println!("inverse local time at 0.2: {:?}", inverse_local_time(&tilted, 0.2));
    let mut csv = Vec::new();
    tilted.write_csv(&mut csv)?;
    for line in String::from_utf8_lossy(&csv).lines().take(5) {
        println!("{line}");
    }
    Ok(())
}
