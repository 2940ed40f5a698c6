//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use twofloat::TwoFloat;

/// `M(a, c; z)` summed in double-double arithmetic.
///
/// Good to well below 1e-14 relative wherever the cancellation
/// `e^{|z|}/|M|` stays under about 1e15, i.e. for `z ≥ 0` and for moderate
/// negative `z` when `0 < a < c`.
pub fn kummer_dd(a: f64, c: f64, z: f64) -> f64 {
    series(TwoFloat::from(1.0), a, c, z)
}

/// `dM/dz (a, c; z)` as the term-by-term derivative of the series.
pub fn kummer_derivative_dd(a: f64, c: f64, z: f64) -> f64 {
    // Σ (a)_{n+1}/(c)_{n+1} zⁿ/n!
    series(TwoFloat::from(a) / TwoFloat::from(c), a + 1.0, c + 1.0, z)
}

fn series(first: TwoFloat, a: f64, c: f64, z: f64) -> f64 {
    let (a, c, zz) = (TwoFloat::from(a), TwoFloat::from(c), TwoFloat::from(z));
    let mut term = first;
    let mut sum = first;
    let settle = z.abs() + f64::from(a).abs() + f64::from(c).abs();
    for n in 0..5000 {
        let nf = TwoFloat::from(n as f64);
        term = div(term * (a + nf) * zz, (c + nf) * (nf + 1.0));
        sum += term;
        let (t, s) = (f64::from(term).abs(), f64::from(sum).abs());
        if t == 0.0 || (n as f64 > settle && t < 1e-33 * s) {
            return f64::from(sum);
        }
    }
    panic!("oracle series did not converge for a={a:?}, c={c:?}, z={z}");
}

/// Double-double quotient by long division. The crate's own `/` keeps only
/// the leading word of the quotient.
fn div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::from(q1) + q2 + q3
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if got == want {
        0.0
    } else {
        (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
    }
}
