//! Independent oracles. Nothing here calls the crate's eigensolver or determinant code.
#![allow(dead_code)]

use qfid::{CMatrix, C64};

/// `H = A + iB` as the real symmetric `[[A, -B], [B, A]]`.
pub fn embed(h: &CMatrix) -> Vec<Vec<f64>> {
    let n = h.nrows();
    let mut m = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            m[i][j] = z.re;
            m[i + n][j + n] = z.re;
            m[i][j + n] = -z.im;
            m[i + n][j] = z.im;
        }
    }
    m
}

/// Cyclic Jacobi rotations; returns eigenvalues and eigenvectors as columns of `v`.
pub fn jacobi(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-32 * scale || off < 1e-300 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// Ascending eigenvalues of a Hermitian matrix; each appears twice in the embedding.
pub fn eigenvalues(h: &CMatrix) -> Vec<f64> {
    let (mut w, _) = jacobi(embed(h));
    w.sort_by(f64::total_cmp);
    w.into_iter().step_by(2).collect()
}

/// `f(H)` through the real embedding.
pub fn apply(h: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = h.nrows();
    let (w, v) = jacobi(embed(h));
    let m = 2 * n;
    let mut big = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            big[i][j] = (0..m).map(|k| v[i][k] * f(w[k]) * v[j][k]).sum();
        }
    }
    CMatrix::from_fn(n, n, |i, j| C64::new(big[i][j], big[i + n][j]))
}

pub fn sqrt(h: &CMatrix) -> CMatrix {
    apply(h, |x| x.max(0.0).sqrt())
}

pub fn power(h: &CMatrix, p: f64) -> CMatrix {
    apply(h, |x| x.max(0.0).powf(p))
}

/// `(b^½ a b^½)^½` with oracle roots.
pub fn star(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let rb = sqrt(b);
    let inner = &rb * a * &rb;
    sqrt(&((&inner + inner.adjoint()) * C64::new(0.5, 0.0)))
}

/// Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    match n {
        0 => 1.0,
        1 => m[0][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][j] * cofactor_det(&minor)
            })
            .sum(),
    }
}

pub fn tr(m: &CMatrix) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// `tr(a⋆(b⋆c) - (a⋆b)⋆(a⋆c))` expanded into traces of words in
/// `A2 = a^½`, `A4 = a^¼`, `B4 = b^¼`, `C4 = c^¼`.
pub fn wy_t1(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> f64 {
    let (a2, a4, b4, c4) = (sqrt(a), power(a, 0.25), power(b, 0.25), power(c, 0.25));
    let lhs = 0.5 * (tr(&(&a2 * &b4 * &c4)) + tr(&(&a2 * &c4 * &b4)));
    let x = &a4 * &b4 + &b4 * &a4;
    let y = &a4 * &c4 + &c4 * &a4;
    let rhs = 0.25 * tr(&(x * y));
    (lhs - rhs).re
}

/// `¼ tr([a^¼, b^¼][a^¼, c^¼])` by trace expansion of the commutators.
pub fn wy_t2(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> f64 {
    let (a4, b4, c4) = (power(a, 0.25), power(b, 0.25), power(c, 0.25));
    let t = tr(&(&a4 * &b4 * &a4 * &c4)) - tr(&(&a4 * &b4 * &c4 * &a4)) - tr(&(&b4 * &a4 * &a4 * &c4))
        + tr(&(&b4 * &a4 * &c4 * &a4));
    0.25 * t.re
}

pub fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rel(l: &CMatrix, r: &CMatrix) -> f64 {
    frob(&(l - r)) / f64::max(1.0, frob(l) + frob(r))
}

pub fn diag(d: &[f64]) -> CMatrix {
    CMatrix::from_fn(d.len(), d.len(), |i, j| if i == j { C64::new(d[i], 0.0) } else { C64::new(0.0, 0.0) })
}

pub fn real(rows: &[&[f64]]) -> CMatrix {
    CMatrix::from_fn(rows.len(), rows.len(), |i, j| C64::new(rows[i][j], 0.0))
}
