//! Brute-force references written straight from the definitions, sharing no
//! code with the library beyond the dissimilarity curve they are handed.

#![allow(dead_code)]

use std::collections::BTreeMap;

/// Strict local maxima by an O(n^2) scan, with prominence found by searching
/// each side for the nearest strictly higher sample.
pub fn brute_peaks(xs: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let n = xs.len();
    let mut idx = Vec::new();
    let mut prom = Vec::new();
    for i in 0..n {
        if i == 0 || i == n - 1 || !(xs[i - 1] < xs[i] && xs[i] > xs[i + 1]) {
            continue;
        }
        let mut left_stop = 0;
        let mut found = false;
        for j in (0..i).rev() {
            if xs[j] > xs[i] {
                left_stop = j + 1;
                found = true;
                break;
            }
        }
        if !found {
            left_stop = 0;
        }
        let mut right_stop = n - 1;
        for (j, &v) in xs.iter().enumerate().skip(i + 1) {
            if v > xs[i] {
                right_stop = j - 1;
                break;
            }
        }
        let mut left_base = f64::INFINITY;
        for &v in &xs[left_stop..=i] {
            if v < left_base {
                left_base = v;
            }
        }
        let mut right_base = f64::INFINITY;
        for &v in &xs[i..=right_stop] {
            if v < right_base {
                right_base = v;
            }
        }
        idx.push(i);
        prom.push(xs[i] - left_base.max(right_base));
    }
    (idx, prom)
}

#[derive(Debug)]
pub struct Reference {
    pub z: BTreeMap<usize, f64>,
    /// Windowed prominence CVs, one list per usable scale.
    pub cov: BTreeMap<usize, Vec<f64>>,
    pub cv1: f64,
    pub cv2: f64,
    pub ds: f64,
}

/// The whole DS statistic in one pass over the raw series `x` and its
/// dissimilarity curve `d`.
pub fn reference_ds(x: &[f64], d: &[f64], window_len: usize, scales: &[usize]) -> Reference {
    // unit-range input
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in x {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let xs: Vec<f64> = x.iter().map(|v| (v - lo) / (hi - lo)).collect();
    let xa = &xs[window_len - 1..window_len - 1 + d.len()];

    let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let cv = |v: &[f64]| {
        let m = avg(v);
        let var = v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / v.len() as f64;
        100.0 * var.sqrt() / m
    };
    let dist = |v: &[f64]| -> Option<Vec<f64>> {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !(hi - lo >= 1e-12) {
            return None;
        }
        let eps = 1e-8;
        let s: Vec<f64> = v.iter().map(|a| eps + (1.0 - eps) * (a - lo) / (hi - lo)).collect();
        let total: f64 = s.iter().sum();
        Some(s.iter().map(|a| a / total).collect())
    };

    let mut z = BTreeMap::new();
    for &w in scales {
        if d.len() < w {
            continue;
        }
        let m = (d.len() / w) * w;
        let mut dt = vec![0.0; m];
        for t in (w - 1..m).step_by(w) {
            let b = avg(&xa[t + 1 - w..=t]);
            for j in t + 1 - w..=t {
                dt[j] = d[j] + b;
            }
        }
        let (Some(p), Some(q)) = (dist(&xa[..m]), dist(&dt)) else {
            continue;
        };
        let mut kl = 0.0;
        for i in 0..m {
            kl += p[i] * (p[i] / q[i]).ln();
        }
        z.insert(w, kl);
    }
    let zv: Vec<f64> = z.values().copied().collect();
    let cv1 = cv(&zv);

    let (_, prom) = brute_peaks(&xs);
    let mut cov = BTreeMap::new();
    for &w in scales {
        if w > prom.len() {
            continue;
        }
        let mut vals = Vec::new();
        let mut start = 0;
        while start + w <= prom.len() {
            vals.push(cv(&prom[start..start + w]));
            start += w;
        }
        cov.insert(w, vals);
    }
    let means: Vec<f64> = cov.values().map(|v| avg(v)).collect();
    let cv2 = cv(&means);
    Reference { z, cov, cv1, cv2, ds: cv1 * cv2 / 100.0 }
}
