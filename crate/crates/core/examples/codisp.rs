//! CODISP of every point of one tree, checked against the displacement
//! definition, and path-length scores of an isolation forest.

use cutforest::ensemble::{bagged_forest, BaggingConfig};
use cutforest::score::{codisp, codisp_displacement_oracle};
use cutforest::{AlgorithmKind, Dataset, DensityParams, Tree};

fn main() {
    let x = Dataset::new(&[[0.0, 0.0], [0.5, 0.2], [0.3, 0.9], [1.0, 1.0], [0.7, 0.4], [6.0, 5.0]]).unwrap();
    let tree = Tree::build_seeded(&x, x.ids().collect(), AlgorithmKind::Rrcf, DensityParams::default(), 3).unwrap();
    println!("point  codisp  displacement");
    for p in x.ids() {
        println!("{p:>5}  {:>6.3}  {:>12.3}", codisp(&tree, p).unwrap(), codisp_displacement_oracle(&tree, p).unwrap());
    }

    let forest = bagged_forest(&x, &BaggingConfig::new(AlgorithmKind::If, 6, 500).with_seed(3)).unwrap();
    let scores = forest.avg_anomaly_score().unwrap();
    println!("\nisolation scores: {:?}", scores.iter().map(|s| format!("{:.3}", s.unwrap())).collect::<Vec<_>>());
}
