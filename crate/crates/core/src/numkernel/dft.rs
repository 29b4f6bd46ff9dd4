use std::f64::consts::PI;
use std::ops::Deref;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex DFT bins, one per input sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<Complex64>);

impl Spectrum {
    pub fn new(bins: Vec<Complex64>) -> Self {
        Self(bins)
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.0
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.norm()).collect()
    }

    pub fn into_bins(self) -> Vec<Complex64> {
        self.0
    }
}

impl Deref for Spectrum {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

/// Forward DFT, `X[j] = sum_n x[n] exp(-2 pi i j n / N)`.
///
/// Power-of-two lengths take the radix-2 path; everything else uses the
/// direct quadratic sum.
pub fn dft(window: &[f64]) -> Result<Spectrum> {
    if window.is_empty() {
        return Err(Error::EmptyInput);
    }
    let input: Vec<Complex64> = window.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let bins = if window.len().is_power_of_two() { radix2(input, false) } else { direct(&input, false) };
    Ok(Spectrum(bins))
}

/// The quadratic-time DFT, regardless of length.
pub fn dft_direct(window: &[f64]) -> Result<Spectrum> {
    if window.is_empty() {
        return Err(Error::EmptyInput);
    }
    let input: Vec<Complex64> = window.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Ok(Spectrum(direct(&input, false)))
}

/// Radix-2 Cooley-Tukey transform. Length must be a power of two.
pub fn fft_radix2(window: &[f64]) -> Result<Spectrum> {
    if window.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !window.len().is_power_of_two() {
        return Err(Error::InvalidConfig(format!(
            "radix-2 transform needs a power-of-two length, got {}",
            window.len()
        )));
    }
    let input: Vec<Complex64> = window.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Ok(Spectrum(radix2(input, false)))
}

/// Inverse DFT with the 1/N normalisation.
pub fn idft(spectrum: &[Complex64]) -> Result<Vec<Complex64>> {
    if spectrum.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = spectrum.len();
    let out = if n.is_power_of_two() { radix2(spectrum.to_vec(), true) } else { direct(spectrum, true) };
    let scale = 1.0 / n as f64;
    Ok(out.into_iter().map(|c| c * scale).collect())
}

/// Moduli of the first `crop_len` bins.
pub fn crop_modulus(spectrum: &[Complex64], crop_len: usize) -> Result<Vec<f64>> {
    if crop_len == 0 || crop_len > spectrum.len() {
        return Err(Error::CropOutOfRange { crop_len, len: spectrum.len() });
    }
    Ok(spectrum[..crop_len].iter().map(|c| c.norm()).collect())
}

fn twiddles(n: usize, inverse: bool) -> Vec<Complex64> {
    let sign = if inverse { 1.0 } else { -1.0 };
    (0..n).map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / n as f64)).collect()
}

fn direct(input: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = input.len();
    let table = twiddles(n, inverse);
    (0..n).map(|j| input.iter().enumerate().map(|(m, &x)| x * table[(j * m) % n]).sum()).collect()
}

fn radix2(mut data: Vec<Complex64>, inverse: bool) -> Vec<Complex64> {
    let n = data.len();
    if n == 1 {
        return data;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let table = twiddles(n, inverse);
    let mut len = 2;
    while len <= n {
        let step = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = table[k * step];
                let a = data[start + k];
                let b = data[start + k + len / 2] * w;
                data[start + k] = a + b;
                data[start + k + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
    data
}
