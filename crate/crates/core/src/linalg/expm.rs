//! Matrix exponential by scaling and squaring with diagonal Padé approximants
//! of degree 3, 5, 7, 9 or 13 (Higham 2005).

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

type M = DMatrix<Complex64>;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `exp(m)` for a square complex matrix.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::domain(format!(
            "expm expects a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(m.clone());
    }
    let a = m.inner();
    let norm = m.norm_1();

    for (theta, coeffs) in [
        (THETA_3, &B3[..]),
        (THETA_5, &B5[..]),
        (THETA_7, &B7[..]),
        (THETA_9, &B9[..]),
    ] {
        if norm <= theta {
            let (u, v) = pade_low(a, coeffs);
            return solve(u, v).map(ComplexMatrix::from_inner);
        }
    }

    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a * re(2f64.powi(-s));
    let (u, v) = pade_13(&scaled);
    let mut x = solve(u, v)?;
    for _ in 0..s {
        x = &x * &x;
    }
    Ok(ComplexMatrix::from_inner(x))
}

/// Odd (`u`) and even (`v`) parts of the Padé numerator for degree ≤ 9.
fn pade_low(a: &M, b: &[f64]) -> (M, M) {
    let n = a.nrows();
    let a2 = a * a;
    let mut u = M::identity(n, n) * re(b[1]);
    let mut v = M::identity(n, n) * re(b[0]);
    let mut power = M::identity(n, n);
    for k in (2..b.len()).step_by(2) {
        power = &power * &a2;
        v += &power * re(b[k]);
        if k + 1 < b.len() {
            u += &power * re(b[k + 1]);
        }
    }
    (a * u, v)
}

fn pade_13(a: &M) -> (M, M) {
    let n = a.nrows();
    let b = &B13;
    let id = M::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let inner_u = &a6 * re(b[13]) + &a4 * re(b[11]) + &a2 * re(b[9]);
    let u = a * (&a6 * inner_u + &a6 * re(b[7]) + &a4 * re(b[5]) + &a2 * re(b[3]) + &id * re(b[1]));
    let inner_v = &a6 * re(b[12]) + &a4 * re(b[10]) + &a2 * re(b[8]);
    let v = &a6 * inner_v + &a6 * re(b[6]) + &a4 * re(b[4]) + &a2 * re(b[2]) + &id * re(b[0]);
    (u, v)
}

/// Solves `(v − u) x = v + u`.
fn solve(u: M, v: M) -> Result<M> {
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| Error::Numerical("singular Padé denominator".into()))
}
