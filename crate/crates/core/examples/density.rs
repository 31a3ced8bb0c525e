//! Density measure and bad-set size of a few projections.

use cutforest::density::{bad_set_measure, count_profile, mu0, radius};

fn main() {
    let samples: [(&str, Vec<f64>); 4] = [
        ("two triples", vec![0.0, 1.0, 2.0, 10.0, 11.0, 12.0]),
        ("grid", (0..10).map(f64::from).collect()),
        ("cluster", vec![0.0, 0.0, 0.0, 0.1, 0.2, 5.0]),
        ("identical", vec![3.0; 4]),
    ];
    for (name, y) in &samples {
        let eps = radius(y).unwrap();
        print!("{name:>10}: eps={eps:.3} mu0={:.3}", mu0(y).unwrap());
        match bad_set_measure(y, 2) {
            Ok(m) => println!(" bad set (alpha=2) {m:.3}"),
            Err(e) => println!(" ({e})"),
        }
    }

    let y = &samples[0].1;
    println!("\nwindow counts for {:?}:", y);
    for piece in count_profile(y, radius(y).unwrap()) {
        println!("  [{:6.2}, {:6.2})  {}", piece.start, piece.end, piece.count);
    }
}
