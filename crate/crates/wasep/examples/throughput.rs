//! Events per second of both samplers at a few lattice sizes.

use std::time::Instant;

use wasep::lattice::{replica_rng, Chain, ChannelIndex, GroupedIndex, Model, RateIndex};

fn bench<I: ChannelIndex>(label: &str, n: usize) {
    let m = Model::new(n, 0.5, 1.0, 0.5).unwrap();
    let mut eng = Chain::<I>::stationary(m, replica_rng(1, 0));
    let t = 2e7 / (n as f64 * n as f64 * n as f64 / 2.0);
    let t0 = Instant::now();
    eng.run(t, &[], &mut ()).unwrap();
    let s = t0.elapsed().as_secs_f64();
    println!("{label} n={n}: {:.1} M events/s", eng.events() as f64 / s / 1e6);
}

fn main() {
    for n in [256usize, 1024, 4096] {
        bench::<GroupedIndex>("grouped", n);
        bench::<RateIndex>("tree", n);
    }
}
