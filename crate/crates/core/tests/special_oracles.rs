//! `erf` and `Ai` against 50-digit reference tables (see
//! `tests/data/generate_oracles.py`).

use fourier_extension::special::{airy_ai, erf};

fn table(name: &str) -> Vec<(f64, f64)> {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let (x, v) = l.split_once(',').unwrap();
            (x.parse().unwrap(), v.parse().unwrap())
        })
        .collect()
}

#[test]
fn erf_matches_reference_table() {
    let rows = table("erf.csv");
    assert_eq!(rows.len(), 1000);
    let worst = rows
        .iter()
        .map(|&(x, v)| (erf(x) - v).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-14, "worst abs error {worst:e}");
}

/// Relative error where `Ai` is monotone; on the oscillatory side, error
/// relative to the envelope `|x|^{-1/4}/√π`, since the relative error is
/// unbounded near the zeros.
#[test]
fn airy_matches_reference_table() {
    let rows = table("airy_ai.csv");
    assert_eq!(rows.len(), 1000);
    let mut worst = 0.0f64;
    for (x, v) in rows {
        let got = airy_ai(x).unwrap();
        let err = if x >= 0.0 {
            (got - v).abs() / v.abs().max(1e-280)
        } else {
            let env = x.abs().max(1.0).powf(-0.25) / std::f64::consts::PI.sqrt();
            (got - v).abs() / env.max(v.abs())
        };
        assert!(err <= 1e-12, "Ai({x}) = {got:e}, want {v:e} (scaled error {err:e})");
        worst = worst.max(err);
    }
    println!("worst scaled Airy error {worst:e}");
}
