#![allow(dead_code)]

use helios_core::ingest::{extract_peaks, PeakDataset};
use helios_core::synth::{generate, SynthConfig, SynthData};

pub fn synth(cfg: &SynthConfig) -> (SynthData, PeakDataset) {
    let data = generate(cfg).expect("synth config is valid");
    let ds = extract_peaks(&data.energy, &data.observed, &data.forecast).expect("peaks");
    (data, ds)
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman correlation of `y` against its position 1..=n.
pub fn spearman_trend(y: &[f64]) -> f64 {
    let rx = ranks(&(0..y.len()).map(|i| i as f64).collect::<Vec<_>>());
    let ry = ranks(y);
    let n = y.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mean) * (b - mean);
        sxx += (a - mean) * (a - mean);
        syy += (b - mean) * (b - mean);
    }
    sxy / (sxx * syy).sqrt()
}
