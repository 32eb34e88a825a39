#![allow(dead_code)]

use num_complex::Complex64;

use faultloc_core::{CaseConfig, NondimensionalSystem};

pub type Mat = [[Complex64; 2]; 2];

pub fn table1() -> (CaseConfig, NondimensionalSystem) {
    let c = CaseConfig::table1();
    let sys = c.system();
    (c, sys)
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn norm1(a: &Mat) -> f64 {
    (0..2)
        .map(|j| a[0][j].norm() + a[1][j].norm())
        .fold(0.0, f64::max)
}

/// exp(A) by scaling to norm <= 1/2, a 30-term Taylor series, and repeated squaring.
pub fn taylor_expm(a: &Mat) -> Mat {
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm1(a) * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a.map(|row| row.map(|v| v * scale));
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut sum = [[one, zero], [zero, one]];
    let mut term = sum;
    for k in 1..=30 {
        term = mul(&term, &x).map(|row| row.map(|v| v / k as f64));
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = mul(&sum, &sum);
    }
    sum
}

/// The generator -Gamma (F + j w E) l, assembled entry by entry.
pub fn generator(omega: f64, sys: &NondimensionalSystem, ell: f64) -> Mat {
    let (e, f) = (sys.e(), sys.f());
    let g = sys.gamma();
    let d = [
        Complex64::new(f[0], omega * e[0]),
        Complex64::new(f[1], omega * e[1]),
    ];
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = -g[i][j] * d[j] * ell;
        }
    }
    m
}

pub fn oracle_propagation(omega: f64, sys: &NondimensionalSystem, ell: f64) -> Mat {
    taylor_expm(&generator(omega, sys, ell))
}

/// Classical ABCD two-port of a uniform line of length `d`, in per-unit.
pub fn two_port(omega: f64, c: &CaseConfig, d: f64) -> Mat {
    let s = Complex64::new(0.0, omega);
    let z = c.line.resistance() + s * c.line.inductance();
    let y = c.line.conductance() + s * c.line.capacitance();
    let (v0, i0) = (c.bases.voltage(), c.bases.current());
    if y.norm() == 0.0 {
        // No shunt path: a pure series impedance.
        let one = Complex64::new(1.0, 0.0);
        return [[one, z * d * i0 / v0], [Complex64::new(0.0, 0.0), one]];
    }
    let gamma = (z * y).sqrt();
    let zc = (z / y).sqrt();
    let gd = gamma * d;
    [
        [gd.cosh(), zc * gd.sinh() * i0 / v0],
        [gd.sinh() / zc * v0 / i0, gd.cosh()],
    ]
}

pub fn rel_err(a: &Mat, b: &Mat) -> f64 {
    let mut diff: f64 = 0.0;
    let mut size: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            diff = diff.max((a[i][j] - b[i][j]).norm());
            size = size.max(b[i][j].norm());
        }
    }
    diff / size
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}
