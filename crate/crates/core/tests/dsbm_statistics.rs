use sigmanet::dsbm::{generate_dsbm, DsbmConfig};

fn within_three_sigma(hits: usize, trials: usize, p: f64) -> bool {
    let freq = hits as f64 / trials as f64;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    (freq - p).abs() <= 3.0 * sigma
}

#[test]
fn edge_and_direction_frequencies_match_parameters() {
    let cfg = DsbmConfig::uniform(2500, 5, 0.1, 0.05, 0.2, 2, 1000, 17);
    let (g, labels) = generate_dsbm(&cfg).unwrap();
    let l = labels.labels();
    let size = 500;
    let intra_pairs = 5 * size * (size - 1) / 2;
    let inter_pairs = 2500 * 2499 / 2 - intra_pairs;

    let intra = g.edges().iter().filter(|e| l[e.src] == l[e.dst]).count();
    let inter: Vec<_> = g.edges().iter().filter(|e| l[e.src] != l[e.dst]).collect();
    let upward = inter.iter().filter(|e| l[e.src] < l[e.dst]).count();

    assert!(within_three_sigma(intra, intra_pairs, 0.1), "intra {intra}");
    assert!(
        within_three_sigma(inter.len(), inter_pairs, 0.05),
        "inter {}",
        inter.len()
    );
    // β applies from the lower-index community to the higher one
    assert!(
        within_three_sigma(upward, inter.len(), 0.2),
        "upward {upward} of {}",
        inter.len()
    );
    assert!(!g.has_digon());
    assert!(g
        .edges()
        .iter()
        .all(|e| e.weight.fract() == 0.0 && (2.0..=1000.0).contains(&e.weight)));
}

#[test]
fn seeds_change_the_graph() {
    let a = generate_dsbm(&DsbmConfig::uniform(100, 5, 0.1, 0.1, 0.2, 2, 10, 1)).unwrap();
    let b = generate_dsbm(&DsbmConfig::uniform(100, 5, 0.1, 0.1, 0.2, 2, 10, 1)).unwrap();
    let c = generate_dsbm(&DsbmConfig::uniform(100, 5, 0.1, 0.1, 0.2, 2, 10, 2)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.0, c.0);
}
