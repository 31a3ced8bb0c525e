//! Sliding-window scoring of a sine wave with a flat anomaly.

use cutforest::bench::gen_sine_anomaly;
use cutforest::stream::{StreamConfig, WindowForest};
use cutforest::AlgorithmKind;

fn main() {
    let series = gen_sine_anomaly();
    let config = StreamConfig::new(AlgorithmKind::Wrcf, 4, 256, 40).with_seed(0);
    let mut forest = WindowForest::new(config).unwrap();
    let mut scores = Vec::new();
    for &v in &series {
        scores.extend(forest.push(v).unwrap());
    }
    scores.extend(forest.finish().unwrap());

    scores.sort_by(|a, b| b.codisp.total_cmp(&a.codisp));
    println!("highest scoring shingles (plateau spans t = 235..254):");
    for s in &scores[..5] {
        println!("  t={:<4} codisp={:.2}", s.t, s.codisp);
    }
}
