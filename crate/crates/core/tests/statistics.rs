use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;

use hamming_duality::ensembles::{
    estimate_fraction, exact_fraction, render_csv, sample_code_uniform, sample_rng, sweep,
    EnsembleSpec, Family, Mode, Predicate,
};
use hamming_duality::linear::sample_linear_uniform;
use hamming_duality::GoodnessRule;

// Upper 0.1% points of the chi-square distribution.
const CHI2_999_DF6: f64 = 22.457_744_484_825_323;
const CHI2_999_DF55: f64 = 93.167_532_772_228_54;

fn chi_square<K>(counts: &HashMap<K, u64>, cells: usize, draws: u64) -> f64 {
    let expected = draws as f64 / cells as f64;
    let observed: f64 = counts
        .values()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    observed + (cells - counts.len()) as f64 * expected
}

#[test]
fn linear_sampler_is_uniform() {
    let draws = 7_000;
    let mut counts = HashMap::new();
    for i in 0..draws {
        let l = sample_linear_uniform(3, 1, &mut sample_rng(99, i)).unwrap();
        *counts.entry(l).or_insert(0u64) += 1;
    }
    assert_eq!(counts.len(), 7);
    let stat = chi_square(&counts, 7, draws);
    assert!(stat < CHI2_999_DF6, "chi-square {stat}");
}

#[test]
fn subset_sampler_is_uniform() {
    let draws = 11_200;
    let mut counts = HashMap::new();
    for i in 0..draws {
        let c = sample_code_uniform(3, 3, &mut sample_rng(7, i)).unwrap();
        *counts.entry(c).or_insert(0u64) += 1;
    }
    assert_eq!(counts.len(), 56);
    let stat = chi_square(&counts, 56, draws);
    assert!(stat < CHI2_999_DF55, "chi-square {stat}");
}

#[test]
fn monte_carlo_brackets_exact_fractions() {
    let mut grid = Vec::new();
    for f in ["const:1", "lin:1/2"] {
        let f: GoodnessRule = f.parse().unwrap();
        for m in 4..=8 {
            for pred in [
                Predicate::GoodPacking(f.clone()),
                Predicate::GoodCovering(f.clone()),
            ] {
                grid.push(EnsembleSpec::new(Family::Nonlinear { n: 4, m }, pred).unwrap());
            }
        }
        for k in 1..=4 {
            grid.push(
                EnsembleSpec::new(
                    Family::Linear { n: 5, k },
                    Predicate::GoodPacking(f.clone()),
                )
                .unwrap(),
            );
        }
    }
    assert!(grid.len() >= 20);
    let misses: Vec<String> = grid
        .iter()
        .enumerate()
        .filter_map(|(i, spec)| {
            let exact = exact_fraction(spec, 1_000_000).unwrap().point_f64();
            let mc = estimate_fraction(spec, 2_000, 500 + i as u64).unwrap();
            (exact < mc.ci_low || exact > mc.ci_high).then(|| {
                format!(
                    "{} {}: exact {exact}, interval [{}, {}]",
                    spec.family,
                    spec.predicate.name(),
                    mc.ci_low,
                    mc.ci_high
                )
            })
        })
        .collect();
    assert!(misses.len() <= 3, "{misses:#?}");
}

#[test]
fn linear_packing_snapshot() {
    let spec = EnsembleSpec::new(
        Family::Linear { n: 8, k: 4 },
        Predicate::GoodPacking("const:1".parse().unwrap()),
    )
    .unwrap();
    let rows = sweep(
        std::slice::from_ref(&spec),
        Mode::MonteCarlo,
        10_000,
        2024,
        0,
    )
    .unwrap();
    let exact = exact_fraction(&spec, 1_000_000).unwrap().point_f64();
    let sigma = (exact * (1.0 - exact) / 10_000.0).sqrt();
    assert!(
        (rows[0].point - exact).abs() <= 4.0 * sigma,
        "exact {exact}, estimate {}",
        rows[0].point
    );
    let csv = render_csv(&rows);
    let path =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/linear_8_4_packing.csv");
    match fs::read_to_string(&path) {
        Ok(pinned) => assert_eq!(csv, pinned),
        Err(_) => fs::write(&path, csv).unwrap(),
    }
}
