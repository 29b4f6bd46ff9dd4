use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strict local maxima of a series with their topographic prominences.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PeakList {
    pub indices: Vec<usize>,
    pub prominences: Vec<f64>,
}

impl PeakList {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

fn is_strict_peak(xs: &[f64], i: usize) -> bool {
    i > 0 && i + 1 < xs.len() && xs[i - 1] < xs[i] && xs[i] > xs[i + 1]
}

/// Every index with `xs[i-1] < xs[i] > xs[i+1]`. Plateaus never qualify.
pub fn find_peaks(xs: &[f64]) -> Result<PeakList> {
    if xs.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: xs.len() });
    }
    let mut peaks = PeakList::default();
    for i in 1..xs.len() - 1 {
        if is_strict_peak(xs, i) {
            peaks.indices.push(i);
            peaks.prominences.push(prominence_unchecked(xs, i));
        }
    }
    Ok(peaks)
}

/// Height of the peak above the higher of its two bases. A base is the
/// lowest point between the peak and the nearest strictly higher sample on
/// that side, or the series end when there is none.
pub fn peak_prominence(xs: &[f64], peak_index: usize) -> Result<f64> {
    if !is_strict_peak(xs, peak_index) {
        return Err(Error::NotAPeak { index: peak_index });
    }
    Ok(prominence_unchecked(xs, peak_index))
}

fn prominence_unchecked(xs: &[f64], peak: usize) -> f64 {
    let height = xs[peak];

    let mut left_base = height;
    for &v in xs[..peak].iter().rev() {
        if v > height {
            break;
        }
        left_base = left_base.min(v);
    }

    let mut right_base = height;
    for &v in &xs[peak + 1..] {
        if v > height {
            break;
        }
        right_base = right_base.min(v);
    }

    height - left_base.max(right_base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_has_no_peaks() {
        let xs: Vec<f64> = (0..20).map(f64::from).collect();
        assert!(find_peaks(&xs).unwrap().is_empty());
    }

    #[test]
    fn simple_peaks() {
        let p = find_peaks(&[0.0, 1.0, 0.0, 2.0, 0.0]).unwrap();
        assert_eq!(p.indices, vec![1, 3]);
        assert_eq!(p.prominences, vec![1.0, 2.0]);
    }

    #[test]
    fn plateaus_are_not_peaks() {
        let p = find_peaks(&[0.0, 2.0, 2.0, 0.0]).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn too_short() {
        assert!(matches!(find_peaks(&[1.0, 2.0]), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn prominence_examples() {
        assert_eq!(peak_prominence(&[0.0, 3.0, 0.0], 1).unwrap(), 3.0);
        let xs = [0.0, 5.0, 2.0, 4.0, 0.0];
        assert_eq!(peak_prominence(&xs, 3).unwrap(), 2.0);
        assert_eq!(peak_prominence(&xs, 1).unwrap(), 5.0);
        assert!(matches!(peak_prominence(&xs, 2), Err(Error::NotAPeak { index: 2 })));
        assert!(matches!(peak_prominence(&xs, 0), Err(Error::NotAPeak { .. })));
    }
}
