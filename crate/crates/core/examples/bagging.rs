//! Bagged forests of all four algorithms on a cluster with planted outliers.

use cutforest::bench::{fill_unscored, gen_gaussian_clusters, min_max_normalize, ClusterSpec};
use cutforest::ensemble::{bagged_forest, BaggingConfig};
use cutforest::AlgorithmKind;

fn main() {
    let d = gen_gaussian_clusters(&ClusterSpec::anomaly_clusters(), 7).unwrap();
    for kind in AlgorithmKind::ALL {
        let config = BaggingConfig::new(kind, 32, 100).with_seed(7);
        let forest = bagged_forest(&d.data, &config).unwrap();
        let scores = min_max_normalize(&fill_unscored(&forest.scores().unwrap()));
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        let hits = order[..d.anomalies()].iter().filter(|&&i| d.labels[i]).count();
        println!(
            "{kind:>4}: {} trees, {hits}/{} planted points in the top {}",
            forest.trees.len(),
            d.anomalies(),
            d.anomalies()
        );
    }
}
