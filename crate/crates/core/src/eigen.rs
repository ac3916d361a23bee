//! Eigenvalues of small dense real matrices.
//!
//! Householder reduction to upper Hessenberg form followed by the Francis
//! double-shift QR iteration (the EISPACK `orthes`/`hqr` pair). Eigenvectors
//! are extracted only for simple real eigenvalues, by inverse iteration.

use crate::error::{Error, Result};
use crate::linalg::{norm2, Lu, SquareMatrix};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    fn dist(&self, other: &Eigenvalue) -> f64 {
        (self.re - other.re).hypot(self.im - other.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Eigenvalue>,
    /// Unit eigenvector for each simple real eigenvalue, `None` otherwise.
    /// Sign fixed so that the largest-magnitude component is positive.
    pub eigenvectors: Vec<Option<Vec<f64>>>,
}

impl Spectrum {
    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.re).collect()
    }
}

/// Eigenvalues (and simple-real eigenvectors) of `m`.
pub fn eigen_spectrum(m: &SquareMatrix) -> Result<Spectrum> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::Numerical("empty matrix".into()));
    }
    if !m.is_finite() {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let mut eigenvalues = eigenvalues(m)?;
    eigenvalues.sort_by(|a, b| match a.re.total_cmp(&b.re) {
        Ordering::Equal => a.im.total_cmp(&b.im),
        o => o,
    });
    let scale = m.max_abs().max(1.0);
    let eigenvectors = eigenvalues
        .iter()
        .enumerate()
        .map(|(k, ev)| {
            let simple = ev.is_real()
                && eigenvalues
                    .iter()
                    .enumerate()
                    .all(|(l, other)| l == k || other.dist(ev) > 1e-6 * scale);
            simple.then(|| inverse_iteration(m, ev.re)).flatten()
        })
        .collect();
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvector for the real eigenvalue `lambda` by shifted inverse iteration.
pub fn inverse_iteration(m: &SquareMatrix, lambda: f64) -> Option<Vec<f64>> {
    let n = m.dim();
    let scale = m.max_abs().max(1.0);
    let mut shift = lambda + 1e-10 * scale;
    let mut lu = None;
    for _ in 0..8 {
        let shifted = SquareMatrix::from_fn(n, |i, j| m[(i, j)] - if i == j { shift } else { 0.0 });
        let f = Lu::factor(&shifted);
        if f.min_pivot() > 0.0 {
            lu = Some(f);
            break;
        }
        shift += 1e-10 * scale;
    }
    let lu = lu?;
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64 / n as f64).collect();
    for _ in 0..6 {
        let y = lu.solve(&v)?;
        let norm = norm2(&y);
        if !(norm.is_finite() && norm > 0.0) {
            return None;
        }
        v = y.iter().map(|c| c / norm).collect();
    }
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    if pivot < 0.0 {
        v.iter_mut().for_each(|c| *c = -*c);
    }
    Some(v)
}

fn eigenvalues(m: &SquareMatrix) -> Result<Vec<Eigenvalue>> {
    let mut h = m.rows();
    hessenberg(&mut h);
    hqr(&mut h)
}

/// In-place Householder reduction to upper Hessenberg form.
#[allow(clippy::needless_range_loop)]
fn hessenberg(h: &mut [Vec<f64>]) {
    let n = h.len();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[i][m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i][m - 1] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let f: f64 = (m..=high).rev().map(|i| ort[i] * h[i][j]).sum::<f64>() / hh;
            for i in m..=high {
                h[i][j] -= f * ort[i];
            }
        }
        for row in h.iter_mut().take(high + 1) {
            let f: f64 = (m..=high).rev().map(|j| ort[j] * row[j]).sum::<f64>() / hh;
            for j in m..=high {
                row[j] -= f * ort[j];
            }
        }
        h[m][m - 1] = scale * g;
        for row in h.iter_mut().skip(m + 1) {
            row[m - 1] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
#[allow(unused_assignments)]
fn hqr(h: &mut [Vec<f64>]) -> Result<Vec<Eigenvalue>> {
    let nn = h.len() as isize;
    let max_iter = 100 * h.len();
    let eps = f64::EPSILON;
    let mut out = vec![Eigenvalue::real(0.0); h.len()];
    let mut norm = 0.0;
    for i in 0..nn {
        for j in (i - 1).max(0)..nn {
            norm += h[i as usize][j as usize].abs();
        }
    }

    let at = |h: &[Vec<f64>], i: isize, j: isize| h[i as usize][j as usize];

    let mut n = nn - 1;
    let low: isize = 0;
    let mut exshift = 0.0;
    let mut iter = 0usize;
    let mut total_iter = 0usize;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut w, mut x, mut y);

    while n >= low {
        // Look for a single small sub-diagonal element.
        let mut l = n;
        while l > low {
            s = at(h, l - 1, l - 1).abs() + at(h, l, l).abs();
            if s == 0.0 {
                s = norm;
            }
            if at(h, l, l - 1).abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            h[n as usize][n as usize] += exshift;
            out[n as usize] = Eigenvalue::real(at(h, n, n));
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            w = at(h, n, n - 1) * at(h, n - 1, n);
            p = (at(h, n - 1, n - 1) - at(h, n, n)) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[n as usize][n as usize] += exshift;
            h[(n - 1) as usize][(n - 1) as usize] += exshift;
            x = at(h, n, n);
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                let first = x + z;
                let second = if z != 0.0 { x - w / z } else { first };
                out[(n - 1) as usize] = Eigenvalue::real(first);
                out[n as usize] = Eigenvalue::real(second);
            } else {
                out[(n - 1) as usize] = Eigenvalue { re: x + p, im: z };
                out[n as usize] = Eigenvalue { re: x + p, im: -z };
            }
            n -= 2;
            iter = 0;
        } else {
            total_iter += 1;
            if total_iter > max_iter {
                return Err(Error::Numerical(format!(
                    "QR iteration did not converge after {max_iter} iterations"
                )));
            }
            x = at(h, n, n);
            y = 0.0;
            w = 0.0;
            if l < n {
                y = at(h, n - 1, n - 1);
                w = at(h, n, n - 1) * at(h, n - 1, n);
            }
            // Exceptional shifts.
            if iter == 10 {
                exshift += x;
                for i in low..=n {
                    h[i as usize][i as usize] -= x;
                }
                s = at(h, n, n - 1).abs() + at(h, n - 1, n - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        h[i as usize][i as usize] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;

            // Look for two consecutive small sub-diagonal elements.
            let mut m = n - 2;
            while m >= l {
                z = at(h, m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / at(h, m + 1, m) + at(h, m, m + 1);
                q = at(h, m + 1, m + 1) - z - r - s;
                r = at(h, m + 2, m + 1);
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if at(h, m, m - 1).abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (at(h, m - 1, m - 1).abs() + z.abs() + at(h, m + 1, m + 1).abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in (m + 2)..=n {
                h[i as usize][(i - 2) as usize] = 0.0;
                if i > m + 2 {
                    h[i as usize][(i - 3) as usize] = 0.0;
                }
            }

            // Double QR step on rows l..=n and columns m..=n.
            let mut k = m;
            while k < n {
                let notlast = k != n - 1;
                if k != m {
                    p = at(h, k, k - 1);
                    q = at(h, k + 1, k - 1);
                    r = if notlast { at(h, k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[k as usize][(k - 1) as usize] = -s * x;
                    } else if l != m {
                        h[k as usize][(k - 1) as usize] = -at(h, k, k - 1);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = at(h, k, j) + q * at(h, k + 1, j);
                        if notlast {
                            p += r * at(h, k + 2, j);
                            h[(k + 2) as usize][j as usize] -= p * z;
                        }
                        h[k as usize][j as usize] -= p * x;
                        h[(k + 1) as usize][j as usize] -= p * y;
                    }
                    for i in 0..=n.min(k + 3) {
                        p = x * at(h, i, k) + y * at(h, i, k + 1);
                        if notlast {
                            p += z * at(h, i, k + 2);
                            h[i as usize][(k + 2) as usize] -= p * r;
                        }
                        h[i as usize][k as usize] -= p;
                        h[i as usize][(k + 1) as usize] -= p * q;
                    }
                }
                k += 1;
            }
        }
    }
    if out.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    Ok(out)
}
