//! Builds ordinary and density-aware cut trees on four points and tallies
//! the shapes that come out.

use std::collections::BTreeMap;

use cutforest::{AlgorithmKind, Dataset, DensityParams, Tree};

fn main() {
    let x = Dataset::from_scalars(&[0.0, 1.0, 6.0, 7.0]).unwrap();
    let builds = 20_000u64;
    for kind in [AlgorithmKind::Rrcf, AlgorithmKind::Wrcf] {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for seed in 0..builds {
            let t = Tree::build_seeded(&x, vec![0, 1, 2, 3], kind, DensityParams::default(), seed).unwrap();
            let inner: Vec<String> = t
                .node_sets()
                .into_iter()
                .filter(|s| s.len() > 1 && s.len() < 4)
                .map(|s| s.iter().map(|&i| (b'a' + i as u8) as char).collect())
                .collect();
            *counts.entry(inner.join(" ")).or_default() += 1;
        }
        println!("{kind}:");
        for (shape, n) in counts {
            println!("  {{{shape}}}  {:.4}", n as f64 / builds as f64);
        }
    }

    let t = Tree::build_seeded(&x, vec![0, 1, 2, 3], AlgorithmKind::Rrcf, DensityParams::default(), 1).unwrap();
    println!("{}", serde_json::to_string_pretty(&t.to_json()).unwrap());
}
