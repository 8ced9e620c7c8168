//! Least-squares line fits used for dimension estimates.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms: f64,
}

pub fn line_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(Error::InsufficientData("a line fit needs at least two points".into()));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| { let r = y - slope * x - intercept; r * r }).sum();
    Ok(LineFit { slope, intercept, rms: libm::sqrt(ss / nf) })
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    line_fit(xs, ys).map(|f| f.slope)
}

/// `n` geometrically spaced points from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> alloc::vec::Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    let r = libm::log(hi / lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo * libm::exp(r * i as f64) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: alloc::vec::Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let f = line_fit(&xs, &ys).unwrap();
        assert!((f.slope - 2.5).abs() < 1e-12 && (f.intercept + 1.0).abs() < 1e-12 && f.rms < 1e-12);
        assert!(line_fit(&[1.0], &[1.0]).is_err());
        assert!(line_fit(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = geometric_grid(1.0, 100.0, 5);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[4], 100.0);
        assert!((g[2] - 10.0).abs() < 1e-12);
    }
}
