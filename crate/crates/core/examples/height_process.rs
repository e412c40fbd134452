//! Heights of a random tree from its Łukasiewicz walk, and the excursions
//! of a lattice walk above its running minimum.
//!
//! ```bash
//! cargo run -p stable-graph --example height_process
//! ```

use rand::Rng;
use stable_graph::coding_paths::{height_from_walk, lattice_excursions, ord_desc};
use stable_graph::Stream;

fn main() -> stable_graph::Result<()> {
    let mut rng = Stream::new(5);
    // Preorder child counts of a critical Galton-Watson tree, kept once it has 30 vertices.
    let children = loop {
        let mut children = Vec::new();
        let mut open = 1i64;
        while open > 0 {
            let k = if rng.random::<bool>() { 0 } else { rng.random_range(1..=3) };
            children.push(k);
            open += k as i64 - 1;
        }
        if children.len() >= 30 {
            break children;
        }
    };
    let mut walk = vec![0i64];
    for &k in &children {
        walk.push(walk.last().unwrap() + k as i64 - 1);
    }
    let heights = height_from_walk(&walk)?;
    println!("vertices={} height={}", heights.len(), heights.iter().max().unwrap());
    println!("walk    {:?}", &walk[..walk.len().min(20)]);
    println!("heights {:?}", &heights[..heights.len().min(20)]);

    let steps: Vec<i64> = (0..200).map(|_| rng.random_range(-1..=1)).collect();
    let mut path = vec![0i64];
    for s in steps {
        path.push(path.last().unwrap() + s);
    }
    let ex = lattice_excursions(&path)?;
    let lengths: Vec<usize> = ex.iter().map(|e| e.len()).collect();
    let top: Vec<usize> = ord_desc(&lengths).into_iter().take(5).map(|i| lengths[i]).collect();
    println!("excursions={} longest={top:?}", ex.len());
    Ok(())
}
