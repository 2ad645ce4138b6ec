//! Exact integer ledger for the equivariant K-theory of the 3-torus with
//! inversion: restriction data at the eight fixed points, the indicator on
//! K-classes, and the arithmetic linking it to the hinge invariants.
//!
//! Nothing here uses floating point.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

/// `a + b t` in the representation ring `Z[t]/(t^2 - 1)` of `Z/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct RElement {
    pub a: i64,
    pub b: i64,
}

impl RElement {
    pub const ZERO: RElement = RElement { a: 0, b: 0 };
    pub const ONE: RElement = RElement { a: 1, b: 0 };
    pub const T: RElement = RElement { a: 0, b: 1 };

    pub const fn new(a: i64, b: i64) -> Self {
        RElement { a, b }
    }

    pub fn scale(self, k: i64) -> Self {
        RElement { a: k * self.a, b: k * self.b }
    }
}

impl Add for RElement {
    type Output = RElement;
    fn add(self, o: RElement) -> RElement {
        RElement { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for RElement {
    type Output = RElement;
    fn sub(self, o: RElement) -> RElement {
        RElement { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for RElement {
    type Output = RElement;
    fn neg(self) -> RElement {
        RElement { a: -self.a, b: -self.b }
    }
}

impl Mul for RElement {
    type Output = RElement;
    fn mul(self, o: RElement) -> RElement {
        RElement { a: self.a * o.a + self.b * o.b, b: self.a * o.b + self.b * o.a }
    }
}

impl fmt::Display for RElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t_part = match self.b {
            1 => "t".to_string(),
            -1 => "-t".to_string(),
            b => format!("{b}t"),
        };
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, _) => f.write_str(&t_part),
            (a, b) if b > 0 => write!(f, "{a}+{t_part}"),
            (a, _) => write!(f, "{a}{t_part}"),
        }
    }
}

pub type FixedValues = [RElement; 8];

/// Fixed points of the 3-torus under inversion, in table order.
pub const FIXED_POINTS: [[i8; 3]; 8] = [
    [1, 1, 1],
    [-1, 1, 1],
    [1, -1, 1],
    [-1, -1, 1],
    [1, 1, -1],
    [-1, 1, -1],
    [1, -1, -1],
    [-1, -1, -1],
];

/// Generator names of `K^0_{Z/2}(T^3) ≅ Z^12`, in basis order.
pub const T3_BASIS: [&str; 12] =
    ["C0", "C1", "H12", "H23", "H13", "C1H12", "C1H23", "C1H13", "L1", "L2", "L3", "H12L3"];

/// Underlying non-equivariant bundle of each generator. Carried as a label only.
pub const T3_FORGETFUL: [&str; 12] = ["C", "C", "H12", "H23", "H13", "H12", "H23", "H13", "C", "C", "C", "H12"];

// 0 stands for the trivial representation 1, 1 for the sign representation t.
const F3_TABLE: [[u8; 8]; 12] = [
    [0, 0, 0, 0, 0, 0, 0, 0],
    [1, 1, 1, 1, 1, 1, 1, 1],
    [1, 0, 0, 0, 1, 0, 0, 0],
    [1, 1, 0, 0, 0, 0, 0, 0],
    [1, 0, 1, 0, 0, 0, 0, 0],
    [0, 1, 1, 1, 0, 1, 1, 1],
    [0, 0, 1, 1, 1, 1, 1, 1],
    [0, 1, 0, 1, 1, 1, 1, 1],
    [1, 0, 1, 0, 1, 0, 1, 0],
    [1, 1, 0, 0, 1, 1, 0, 0],
    [1, 1, 1, 1, 0, 0, 0, 0],
    [0, 1, 1, 1, 1, 0, 0, 0],
];

/// A class in `K^0_{Z/2}(T^3)` as integer coordinates in [`T3_BASIS`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct KClassT3(pub [i64; 12]);

impl KClassT3 {
    pub fn zero() -> Self {
        KClassT3([0; 12])
    }

    /// Basis generator by position in [`T3_BASIS`].
    pub fn generator(i: usize) -> Self {
        let mut c = [0; 12];
        c[i] = 1;
        KClassT3(c)
    }

    pub fn unit() -> Self {
        Self::generator(0)
    }

    pub fn scale(self, k: i64) -> Self {
        KClassT3(self.0.map(|x| k * x))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

impl Add for KClassT3 {
    type Output = KClassT3;
    fn add(self, o: KClassT3) -> KClassT3 {
        KClassT3(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for KClassT3 {
    type Output = KClassT3;
    fn sub(self, o: KClassT3) -> KClassT3 {
        KClassT3(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for KClassT3 {
    type Output = KClassT3;
    fn neg(self) -> KClassT3 {
        self.scale(-1)
    }
}

/// A class in `K^0_{Z/2}(X x T)` in the basis `x_1..x_13`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct KClassXT(pub [i64; 13]);

impl KClassXT {
    /// `x_i`, with `i` counted from 1.
    pub fn generator(i: usize) -> Self {
        assert!((1..=13).contains(&i), "generator index {i} outside 1..=13");
        let mut c = [0; 13];
        c[i - 1] = 1;
        KClassXT(c)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct F3Row {
    pub label: &'static str,
    pub forgetful: &'static str,
    pub values: FixedValues,
}

/// Restriction table together with the operations read from it. A ledger can
/// be corrupted on purpose to check that [`Ledger::verify`] notices.
#[derive(Debug, Clone)]
pub struct Ledger {
    rows: Vec<F3Row>,
}

impl Default for Ledger {
    fn default() -> Self {
        Self::standard()
    }
}

/// Named basis element, for readable expansions below.
fn g(name: &str) -> KClassT3 {
    let i = T3_BASIS.iter().position(|&n| n == name).expect("basis name");
    KClassT3::generator(i)
}

impl Ledger {
    pub fn standard() -> Self {
        let rows = (0..12)
            .map(|i| F3Row {
                label: T3_BASIS[i],
                forgetful: T3_FORGETFUL[i],
                values: F3_TABLE[i].map(|e| if e == 0 { RElement::ONE } else { RElement::T }),
            })
            .collect();
        Ledger { rows }
    }

    /// Swaps `1 <-> t` in one table entry.
    pub fn with_flipped_entry(mut self, generator: usize, point: usize) -> Self {
        let v = &mut self.rows[generator].values[point];
        *v = RElement::new(v.b, v.a);
        self
    }

    pub fn rows(&self) -> &[F3Row] {
        &self.rows
    }

    /// Fixed-point restrictions of a class, by linearity from the table.
    pub fn f3(&self, c: &KClassT3) -> FixedValues {
        let mut out = [RElement::ZERO; 8];
        for (row, &k) in self.rows.iter().zip(c.0.iter()) {
            for (o, v) in out.iter_mut().zip(row.values.iter()) {
                *o = *o + v.scale(k);
            }
        }
        out
    }

    /// Indicator of a class: minus the total `t`-multiplicity, mod 4.
    pub fn mu3d(&self, c: &KClassT3) -> u8 {
        mu_of_values(&self.f3(c))
    }

    /// Fixed-point data of a product of classes. Restriction to a point is a
    /// ring map, so this is the pointwise product in `R`.
    pub fn f3_product(&self, factors: &[KClassT3]) -> FixedValues {
        factors.iter().fold([RElement::ONE; 8], |acc, c| {
            let v = self.f3(c);
            std::array::from_fn(|i| acc[i] * v[i])
        })
    }

    pub fn verify(&self) -> LedgerReport {
        let mut checks = Vec::new();

        // Three products (1 - H_ij)(1 - L_k) agree and sit at a single point.
        let one = KClassT3::unit();
        let products = [
            ("(1-H12)(1-L3)", [one - g("H12"), one - g("L3")]),
            ("(1-H13)(1-L2)", [one - g("H13"), one - g("L2")]),
            ("(1-H23)(1-L1)", [one - g("H23"), one - g("L1")]),
        ];
        let mut expected = [RElement::ZERO; 8];
        expected[0] = RElement::new(2, -2);
        let mut detail = Vec::new();
        let mut ok = true;
        for (name, factors) in &products {
            let v = self.f3_product(factors);
            ok &= v == expected;
            detail.push(format!("{name} -> {}", fmt_values(&v)));
        }
        let expanded = self.f3(&psi_phi_image(11));
        ok &= expanded == expected;
        detail.push(format!("1-H12-L3+H12L3 -> {}", fmt_values(&expanded)));
        checks.push(LedgerCheck::new("product-classes", ok, detail.join("; ")));

        // mu takes only the values 0 and 2 on generators.
        let mus: Vec<u8> = (0..12).map(|i| self.mu3d(&KClassT3::generator(i))).collect();
        let ok = mus.iter().all(|&m| m == 0 || m == 2);
        checks.push(LedgerCheck::new(
            "mu-even-on-generators",
            ok,
            T3_BASIS.iter().zip(&mus).map(|(n, m)| format!("{n}:{m}")).collect::<Vec<_>>().join(" "),
        ));

        // mu on the images of x_1..x_13 is 2 exactly at x_11.
        let mus: Vec<u8> = (1..=13).map(|i| self.mu3d(&psi_phi_image(i))).collect();
        let ok = mus.iter().enumerate().all(|(k, &m)| m == if k + 1 == 11 { 2 } else { 0 });
        checks.push(LedgerCheck::new(
            "mu-on-x-images",
            ok,
            mus.iter().enumerate().map(|(k, m)| format!("x{}:{m}", k + 1)).collect::<Vec<_>>().join(" "),
        ));

        // Expanded images agree with the factored products they stand for.
        let mut ok = true;
        for (i, factors) in image_factorizations() {
            ok &= self.f3(&psi_phi_image(i)) == self.f3_product(&factors);
        }
        checks.push(LedgerCheck::new("image-expansions", ok, "x3,x5,x7..x11".into()));

        let (ok, count) = lattice_identity(3);
        checks.push(LedgerCheck::new("w3-lattice", ok, format!("{count} lattice points with a11 + 2 a12 = p + r")));

        let pass = checks.iter().all(|c| c.pass);
        LedgerReport { checks, pass }
    }

    /// CSV in the table layout: class, underlying bundle, eight fixed points.
    pub fn dump_csv(&self) -> String {
        let mut s = String::from("class,K0");
        for p in FIXED_POINTS {
            s.push_str(&format!(",\"({},{},{})\"", p[0], p[1], p[2]));
        }
        s.push('\n');
        for row in &self.rows {
            s.push_str(row.label);
            s.push(',');
            s.push_str(row.forgetful);
            for v in &row.values {
                s.push_str(&format!(",{v}"));
            }
            s.push('\n');
        }
        s
    }
}

fn fmt_values(v: &FixedValues) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

pub fn mu_of_values(v: &FixedValues) -> u8 {
    let t: i64 = v.iter().map(|x| x.b).sum();
    (-t).rem_euclid(4) as u8
}

/// Fixed-point data of a class under the standard table.
pub fn f3(c: &KClassT3) -> FixedValues {
    Ledger::standard().f3(c)
}

pub fn mu3d_ledger(c: &KClassT3) -> u8 {
    Ledger::standard().mu3d(c)
}

/// Image of `x_i` (1-based) in `K^0_{Z/2}(T^3)`, products expanded in the basis.
/// `h_ij = 1 - H_ij`, `l_i = 1 - L_i`, and `t` times a generator is its `C1` twin.
pub fn psi_phi_image(i: usize) -> KClassT3 {
    let one = g("C0");
    match i {
        1 => one,
        2 => g("C1"),
        3 => one - g("L1"),
        5 => one - g("L2"),
        // (1 - t)(1 - H12) = 1 - t - H12 + tH12
        7 => one - g("C1") - g("H12") + g("C1H12"),
        8 => one - g("L3"),
        9 => one - g("C1") - g("H13") + g("C1H13"),
        10 => one - g("C1") - g("H23") + g("C1H23"),
        // (1 - H12)(1 - L3) = 1 - H12 - L3 + H12L3
        11 => one - g("H12") - g("L3") + g("H12L3"),
        4 | 6 | 12 | 13 => KClassT3::zero(),
        _ => panic!("generator index {i} outside 1..=13"),
    }
}

/// The images that are products, as their factors.
fn image_factorizations() -> Vec<(usize, Vec<KClassT3>)> {
    let one = g("C0");
    let one_minus_t = one - g("C1");
    vec![
        (3, vec![one - g("L1")]),
        (5, vec![one - g("L2")]),
        (7, vec![one_minus_t, one - g("H12")]),
        (8, vec![one - g("L3")]),
        (9, vec![one_minus_t, one - g("H13")]),
        (10, vec![one_minus_t, one - g("H23")]),
        (11, vec![one - g("H12"), one - g("L3")]),
    ]
}

/// Image of a class in `K^0_{Z/2}(X x T)` under `ψ_1 ∘ φ_1`, by linearity.
pub fn psi_phi(c: &KClassXT) -> KClassT3 {
    (1..=13).fold(KClassT3::zero(), |acc, i| acc + psi_phi_image(i).scale(c.0[i - 1]))
}

/// `W_3(p, q, r)`: the four sphere coordinates `(a, b, c, d)`.
pub fn w3(p: i64, q: i64, r: i64) -> [i64; 4] {
    [p + q, -q + r, -r, -p]
}

/// `c_2` on `K^0(X x T) ≅ Z^6`; only the last three coordinates enter.
pub fn c2(_alpha: [i64; 3], p: i64, q: i64, r: i64) -> [i64; 4] {
    w3(p, q, r)
}

/// `φ_1` into `K^0(S^2 x T^2) ≅ Z^4`.
pub fn varphi1(alpha: [i64; 3], p: i64, _q: i64, r: i64) -> [i64; 4] {
    [alpha[0], alpha[1], 0, p + r]
}

/// `f_2 ∘ φ_1` into `K^0(S^2 x T^2) ≅ Z^4`.
pub fn f2_phi1(c: &KClassXT) -> [i64; 4] {
    let a = &c.0;
    [a[0] + a[1], a[2] + 2 * a[3], 0, a[10] + 2 * a[11]]
}

/// Solves `W_3(p, q, r) = values` when `values` is in the image; `None` otherwise.
pub fn pqr_from_values(values: [i64; 4]) -> Option<(i64, i64, i64)> {
    let p = -values[3];
    let r = -values[2];
    let q = values[0] - p;
    (w3(p, q, r) == values).then_some((p, q, r))
}

/// Checks over `[-n, n]^5`: zero-sum of `W_3`, agreement of `c_2` with `W_3`,
/// inversion of `W_3`, and `a11 ≡ (p+q) + (-q+r) mod 2` whenever
/// `a11 + 2 a12 = p + r`. Returns the pass flag and the number of constrained points.
pub fn lattice_identity(n: i64) -> (bool, usize) {
    let mut ok = true;
    let mut count = 0;
    for p in -n..=n {
        for q in -n..=n {
            for r in -n..=n {
                let w = w3(p, q, r);
                ok &= w.iter().sum::<i64>() == 0;
                ok &= c2([0, 0, 0], p, q, r) == w;
                ok &= pqr_from_values(w) == Some((p, q, r));
                for a11 in -n..=n {
                    for a12 in -n..=n {
                        if a11 + 2 * a12 != p + r {
                            continue;
                        }
                        count += 1;
                        let mut xt = KClassXT::default();
                        xt.0[10] = a11;
                        xt.0[11] = a12;
                        ok &= f2_phi1(&xt)[3] == varphi1([0, 0, 0], p, q, r)[3];
                        ok &= (a11 - (w[0] + w[1])).rem_euclid(2) == 0;
                    }
                }
            }
        }
    }
    (ok, count)
}

#[derive(Debug, Clone, Serialize)]
pub struct LedgerCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl LedgerCheck {
    fn new(name: &'static str, pass: bool, detail: String) -> Self {
        LedgerCheck { name, pass, detail }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LedgerReport {
    pub checks: Vec<LedgerCheck>,
    pub pass: bool,
}

impl fmt::Display for LedgerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        write!(f, "{}", if self.pass { "ledger: pass" } else { "ledger: FAIL" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_law() {
        let x = RElement::new(2, -3);
        let y = RElement::new(-1, 5);
        assert_eq!(x * y, RElement::new(-2 - 15, 10 + 3));
        assert_eq!(RElement::T * RElement::T, RElement::ONE);
    }

    #[test]
    fn table_rows() {
        assert_eq!(f3(&KClassT3::unit()), [RElement::ONE; 8]);
        let h12 = f3(&g("H12"));
        for (k, v) in h12.iter().enumerate() {
            assert_eq!(*v, if k == 0 || k == 4 { RElement::T } else { RElement::ONE });
        }
    }

    #[test]
    fn indicator_values() {
        assert_eq!(mu3d_ledger(&KClassT3::unit()), 0);
        assert_eq!(mu3d_ledger(&g("C1")), 0);
        assert_eq!(mu3d_ledger(&g("H12")), 2);
        assert_eq!(mu3d_ledger(&psi_phi_image(11)), 2);
        // (1 - t) h12 restricts to 2(1 - t) at two points: mu = 4 = 0
        assert_eq!(mu3d_ledger(&psi_phi_image(7)), 0);
    }

    #[test]
    fn standard_ledger_verifies() {
        let r = Ledger::standard().verify();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn every_single_flip_is_caught() {
        for gen in 0..12 {
            for pt in 0..8 {
                let r = Ledger::standard().with_flipped_entry(gen, pt).verify();
                assert!(!r.pass, "flip at {gen},{pt} went unnoticed");
            }
        }
    }

    #[test]
    fn csv_layout() {
        let csv = Ledger::standard().dump_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 13);
        assert_eq!(lines[12], "H12L3,H12,1,t,t,t,t,1,1,1");
    }

    #[test]
    fn pqr_inverts_w3() {
        assert_eq!(pqr_from_values([1, 0, -1, 0]), Some((0, 1, 1)));
        assert_eq!(pqr_from_values([1, 1, 0, 0]), None);
    }
}
