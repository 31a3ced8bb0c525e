//! AUC of every algorithm across tree sizes on the two labeled synthetic sets.

use cutforest::bench::{auc_by_tree_size, gen_gaussian_clusters, write_metrics, ClusterSpec};
use cutforest::{AlgorithmKind, DensityParams};

fn main() {
    let mut rows = Vec::new();
    for spec in [ClusterSpec::anomaly_clusters(), ClusterSpec::clusters_with_noise()] {
        let d = gen_gaussian_clusters(&spec, 0).unwrap();
        rows.extend(auc_by_tree_size(&d, &AlgorithmKind::ALL, &[16, 32, 64, 128], 100, DensityParams::default(), 0, 3).unwrap());
    }
    write_metrics(std::io::stdout().lock(), &[], &rows).unwrap();
}
