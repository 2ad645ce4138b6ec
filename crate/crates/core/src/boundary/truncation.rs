use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::LaurentMatrix;
use crate::linalg::{BandMatrix, CMat, C64};

/// Corner of the plane: `a` is `x, y >= 0`, `b` is `x <= 0, y >= 0`,
/// `c` is `x, y <= 0` and `d` is `x >= 0, y <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Corner {
    A,
    B,
    C,
    D,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::A, Corner::B, Corner::C, Corner::D];

    /// Which of `(x, y)` the corner reflects.
    pub fn flips(self) -> (bool, bool) {
        match self {
            Corner::A => (false, false),
            Corner::B => (true, false),
            Corner::C => (true, true),
            Corner::D => (false, true),
        }
    }

    /// Symbol whose `a`-corner compression is this corner's compression, up to
    /// relabeling sites.
    pub fn transform(self, h: &LaurentMatrix) -> Result<LaurentMatrix> {
        let (fx, fy) = self.flips();
        let mut m = h.clone();
        if fx {
            m = m.flip_variable(0)?;
        }
        if fy {
            m = m.flip_variable(1)?;
        }
        Ok(m)
    }

    /// Site of this corner inside an `a`-corner box of side `side`.
    pub fn site_in_box(self, side: usize) -> (usize, usize) {
        let (fx, fy) = self.flips();
        let e = side - 1;
        (if fx { e } else { 0 }, if fy { e } else { 0 })
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Corner::A => "a",
            Corner::B => "b",
            Corner::C => "c",
            Corner::D => "d",
        })
    }
}

impl FromStr for Corner {
    type Err = Error;
    fn from_str(s: &str) -> Result<Corner> {
        match s {
            "a" => Ok(Corner::A),
            "b" => Ok(Corner::B),
            "c" => Ok(Corner::C),
            "d" => Ok(Corner::D),
            _ => Err(Error::Schema(format!("unknown corner '{s}'"))),
        }
    }
}

/// Compression of a 2-variable symbol onto an `L x L` box at one corner.
///
/// Site `(x, y)` occupies block row `(y L + x) N`; the physical corner sits
/// at `(0, 0)`.
#[derive(Debug, Clone)]
pub struct QuarterTruncation {
    pub corner: Corner,
    pub side: usize,
    pub block: usize,
    pub matrix: BandMatrix,
}

impl QuarterTruncation {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn site_offset(&self, x: usize, y: usize) -> usize {
        (y * self.side + x) * self.block
    }

    pub fn to_dense(&self) -> CMat {
        self.matrix.to_dense()
    }

    pub fn hermitian_defect(&self) -> f64 {
        let (n, reach) = (self.dim(), self.matrix.half_bandwidth());
        let mut d = 0.0f64;
        for i in 0..n {
            for j in i..(i + reach + 1).min(n) {
                d = d.max((self.matrix.get(i, j) - self.matrix.get(j, i).conj()).norm());
            }
        }
        d
    }
}

/// Assembles `[A_{r - r'}]` over the box sites of corner `corner`.
pub fn truncate(h: &LaurentMatrix, corner: Corner, side: usize) -> Result<QuarterTruncation> {
    if h.nvars() != 2 {
        return Err(Error::DimensionMismatch("quarter-plane truncation needs a 2-variable symbol".into()));
    }
    let range = h.hopping_range();
    if side == 0 || 4 * range as usize >= side {
        return Err(Error::RangeTooLarge { range, side });
    }
    let f = corner.transform(h)?;
    let n = f.size();
    let r = range.max(0) as usize;
    let reach = n * (r * side + r) + n - 1;
    let mut band = BandMatrix::new(n * side * side, reach, reach);
    let terms: Vec<(i64, i64, &CMat)> = f.terms().map(|(k, m)| (k[0] as i64, k[1] as i64, m)).collect();
    let l = side as i64;
    for y in 0..l {
        for x in 0..l {
            let row = ((y * l + x) as usize) * n;
            for &(kx, ky, m) in &terms {
                let (xs, ys) = (x - kx, y - ky);
                if xs < 0 || ys < 0 || xs >= l || ys >= l {
                    continue;
                }
                let col = ((ys * l + xs) as usize) * n;
                for a in 0..n {
                    for b in 0..n {
                        let v: C64 = m[(a, b)];
                        if v != C64::new(0.0, 0.0) {
                            band.add(row + a, col + b, v);
                        }
                    }
                }
            }
        }
    }
    Ok(QuarterTruncation { corner, side, block: n, matrix: band })
}
