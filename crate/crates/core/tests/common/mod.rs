//! Closed-form oracles shared by the integration tests.
#![allow(dead_code)]

use faer::Mat;
use num_complex::Complex64 as C64;
use qpi::linalg::CMat;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn m3(rows: [[C64; 3]; 3]) -> CMat {
    Mat::from_fn(3, 3, |i, j| rows[i][j])
}

/// `sqrt(25 - 16 w + 4 w^2)`, principal branch.
pub fn alpha(w: C64) -> C64 {
    (c(25.0) - w * 16.0 + w * w * 4.0).sqrt()
}

/// Printed minus factor of the x-direction factorization, at `(z, w)`.
pub fn hx_minus(z: C64, w: C64) -> CMat {
    let a = alpha(w);
    let zi = z.inv();
    m3([
        [c(1.0), c(0.0), c(0.0)],
        [c(0.0), c(1.0), c(0.0)],
        [(c(-1.0) + w * 2.0 + a) / (z * w * 6.0), zi, c(1.0) + (c(-5.0) + w * 2.0 + a) / (z * w * 4.0)],
    ])
}

pub fn hx_plus(z: C64, w: C64) -> CMat {
    let a = alpha(w);
    m3([
        [(c(1.0) + z) * w, c(-0.5) + z, c(0.0)],
        [c(-0.5) + z, (c(1.0) + z * 2.0) / (w * 2.0), c(1.0)],
        [(c(-5.0) - w * 2.0 - a) / 6.0, (c(-5.0) + w * 4.0 - a) / (w * 6.0), c(0.0)],
    ])
}

pub fn hy_minus(z: C64, w: C64) -> CMat {
    m3([
        [c(1.0), c(0.0), c(0.0)],
        [(c(1.0) + z * 2.0) / ((c(-1.0) + z * 2.0) * w), c(1.0), c(0.0)],
        [c(0.0), c(0.0), c(1.0)],
    ])
}

pub fn hy_plus(z: C64, w: C64) -> CMat {
    m3([
        [(c(1.0) + z) * w, c(-0.5) + z, c(0.0)],
        [(c(1.0) + z * 10.0) / (c(2.0) - z * 4.0), c(0.0), c(1.0)],
        [c(0.0), c(1.0), z.inv()],
    ])
}

/// Extension in `z` (`|z| < 1`, `w` on the circle) built from the printed x-factors.
pub fn printed_extension_x(z: C64, w: C64) -> CMat {
    hx_minus(z.conj().inv(), w) * hx_plus(z, w)
}

/// Extension in `w` (`z` on the circle, `|w| < 1`) built from the printed y-factors.
pub fn printed_extension_y(z: C64, w: C64) -> CMat {
    hy_minus(z, w.conj().inv()) * hy_plus(z, w)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    let mut out = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            out = out.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    out
}
