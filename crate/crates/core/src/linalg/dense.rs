//! Dense symmetric eigenvalues: Householder tridiagonalization followed by
//! implicit QL sweeps with Wilkinson-type shifts.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// Eigenvalues of the symmetric `n × n` row-major matrix `a` (only the
/// lower triangle is read), sorted ascending.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(invalid("matrix size does not match dimension"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(&mut a, n);
    ql_implicit(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvalues of `A x = λ M x` for diagonal positive `M`, via the
/// congruence `M^{-1/2} A M^{-1/2}`.
pub fn generalized_eigenvalues(mut a: Vec<f64>, mass: &[f64]) -> Result<Vec<f64>> {
    let n = mass.len();
    if mass.iter().any(|m| !(*m > 0.0)) {
        return Err(invalid("mass matrix must be positive"));
    }
    if a.len() != n * n {
        return Err(invalid("matrix size does not match mass"));
    }
    let s: Vec<f64> = mass.iter().map(|m| 1.0 / libm::sqrt(*m)).collect();
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] *= s[i] * s[j];
        }
    }
    symmetric_eigenvalues(a, n)
}

fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let at = |i: usize, j: usize| i * n + j;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[at(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[at(i, l)];
            } else {
                for k in 0..=l {
                    a[at(i, k)] /= scale;
                    h += a[at(i, k)] * a[at(i, k)];
                }
                let f = a[at(i, l)];
                let g = if f >= 0.0 { -libm::sqrt(h) } else { libm::sqrt(h) };
                e[i] = scale * g;
                h -= f * g;
                a[at(i, l)] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[at(j, k)] * a[at(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g += a[at(k, j)] * a[at(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[at(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[at(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[at(j, k)] -= f * e[k] + g * a[at(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[at(i, l)];
        }
        d[i] = h;
    }
    for i in 0..n {
        d[i] = a[at(i, i)];
    }
    // shift off-diagonal so e[i] couples d[i] and d[i + 1]
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    (d, e)
}

fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Unsolvable("QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + libm::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    #[test]
    fn path_laplacian_is_analytic() {
        let n = 40;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 2.0;
            if i + 1 < n {
                a[i * n + i + 1] = -1.0;
                a[(i + 1) * n + i] = -1.0;
            }
        }
        let ev = symmetric_eigenvalues(a, n).unwrap();
        for (k, v) in ev.iter().enumerate() {
            let exact = 4.0 * libm::sin((k + 1) as f64 * PI / (2.0 * (n + 1) as f64)).powi(2);
            assert!((v - exact).abs() < 1e-12, "{k}: {v} vs {exact}");
        }
    }

    #[test]
    fn one_by_one_generalized() {
        let ev = generalized_eigenvalues(vec![3.0 + 2.0 * 0.5], &[2.0]).unwrap();
        assert!((ev[0] - 2.0).abs() < 1e-15);
        assert!(generalized_eigenvalues(vec![1.0], &[0.0]).is_err());
    }

    #[test]
    fn repeated_eigenvalues() {
        // complete graph K_5 Laplacian: 0 once, 5 four times
        let n = 5;
        let mut a = vec![-1.0; n * n];
        for i in 0..n {
            a[i * n + i] = 4.0;
        }
        let ev = symmetric_eigenvalues(a, n).unwrap();
        assert!(ev[0].abs() < 1e-12);
        assert!(ev[1..].iter().all(|v| (v - 5.0).abs() < 1e-12));
    }

    proptest! {
        #[test]
        fn trace_and_frobenius_preserved(entries in proptest::collection::vec(-5.0f64..5.0, 36)) {
            let n = 6;
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    a[i * n + j] = entries[i * n + j];
                    a[j * n + i] = entries[i * n + j];
                }
            }
            let tr: f64 = (0..n).map(|i| a[i * n + i]).sum();
            let fro: f64 = a.iter().map(|x| x * x).sum();
            let ev = symmetric_eigenvalues(a, n).unwrap();
            prop_assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-9);
            prop_assert!((ev.iter().map(|x| x * x).sum::<f64>() - fro).abs() < 1e-8 * fro.max(1.0));
        }
    }
}
