//! Adaptive quadrature (Gauss–Kronrod 7/15 panels, bisection refinement)
//! and quadrature-defined antiderivative profiles.

use crate::error::{Error, Result};
use crate::jet::Jet4;
use crate::profile::Profile;
use std::collections::BTreeMap;
use std::sync::Mutex;

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
const PANEL_BUDGET: usize = 10_000;

// Kronrod 15 abscissae (positive half) and weights, Gauss-7 weights.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss–Kronrod panel; returns (integral, error estimate).
fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for i in 0..8 {
        let x = half * XGK[i];
        let s = if i == 7 {
            f(mid)?
        } else {
            f(mid - x)? + f(mid + x)?
        };
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            // Kronrod nodes 1,3,5 and the center are the Gauss-7 nodes
            gauss += WG[i / 2] * s;
        }
    }
    kronrod *= half;
    gauss *= half;
    let err = (kronrod - gauss).abs();
    Ok((kronrod, err))
}

/// Adaptive integration of a fallible integrand over [a, b].
pub fn adaptive_quad_fn<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let (a, b, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut stack = vec![(a, b, tol)];
    let mut total = 0.0;
    let mut panels = 0usize;
    while let Some((lo, hi, t)) = stack.pop() {
        panels += 1;
        if panels > PANEL_BUDGET {
            return Err(Error::ToleranceNotMet {
                requested: tol,
                achieved: t,
            });
        }
        let (val, err) = gk15(f, lo, hi)?;
        if err <= t || (hi - lo) < 1e-14 * (b - a).abs().max(1.0) {
            if err > t {
                return Err(Error::ToleranceNotMet {
                    requested: tol,
                    achieved: err,
                });
            }
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * t));
            stack.push((mid, hi, 0.5 * t));
        }
    }
    Ok(sign * total)
}

/// Integrate a profile's values over [a, b] to absolute tolerance `tol`.
///
/// The closed interval must avoid declared singularities; endpoints on the
/// domain boundary are fine because the panel nodes stay interior.
pub fn adaptive_quad(p: &Profile, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    for &s in p.singularities() {
        if s >= lo && s <= hi {
            return Err(Error::SingularPoint { r: s });
        }
    }
    let d = p.domain();
    if lo < d.lo || hi > d.hi {
        return Err(Error::OutOfDomain {
            r: if lo < d.lo { lo } else { hi },
            lo: d.lo,
            hi: d.hi,
        });
    }
    adaptive_quad_fn(&|r| p.value(r), a, b, tol)
}

fn key(r: f64) -> u64 {
    // total-order bit trick so the memo map sorts by coordinate
    let b = r.to_bits() as i64;
    (if b < 0 { i64::MIN - b - 1 } else { b }) as u64 ^ (1 << 63)
}

/// Antiderivative `F` of `p` with `F(basepoint) = 0`, realized by memoized
/// adaptive quadrature. Jet orders >= 1 come from the jet of `p` itself.
pub fn antiderivative(p: &Profile, basepoint: f64) -> Profile {
    antiderivative_tol(p, basepoint, DEFAULT_QUAD_TOL)
}

pub fn antiderivative_tol(p: &Profile, basepoint: f64, tol: f64) -> Profile {
    let memo: Mutex<BTreeMap<u64, f64>> = Mutex::new(BTreeMap::from([(key(basepoint), 0.0)]));
    let q = p.clone();
    let label = format!("int({}) from {basepoint}", p.label());
    Profile::from_raw(
        &label,
        p.domain(),
        p.singularities().to_vec(),
        move |r| {
            // nearest memoized checkpoint with no singularity in between;
            // the two neighbours of r in key order are the only candidates
            let (start_r, start_v) = {
                let m = memo.lock().unwrap();
                let k = key(r);
                let below = m.range(..=k).next_back().map(|(a, v)| (unkey(*a), *v));
                let above = m.range(k..).next().map(|(a, v)| (unkey(*a), *v));
                let blocked = |rr: f64| {
                    q.singularities()
                        .iter()
                        .any(|&s| s > rr.min(r) && s < rr.max(r))
                };
                let mut best = (basepoint, 0.0);
                let mut bd = (basepoint - r).abs();
                for cand in [below, above].into_iter().flatten() {
                    let dist = (cand.0 - r).abs();
                    if dist < bd && !blocked(cand.0) {
                        bd = dist;
                        best = cand;
                    }
                }
                best
            };
            let val = match adaptive_quad_fn(&|x| q.value(x), start_r, r, tol) {
                Ok(v) => start_v + v,
                Err(_) => f64::NAN,
            };
            if val.is_finite() {
                memo.lock().unwrap().insert(key(r), val);
            }
            let pj = match q.eval_excl(r, 0.0) {
                Ok(j) => j,
                Err(_) => Jet4::constant(f64::NAN),
            };
            Jet4 {
                c: [
                    val,
                    pj.c[0],
                    pj.c[1] / 2.0,
                    pj.c[2] / 3.0,
                    pj.c[3] / 4.0,
                ],
            }
        },
    )
}

fn unkey(k: u64) -> f64 {
    let b = (k ^ (1 << 63)) as i64;
    let bits = if b < 0 { i64::MIN - b - 1 } else { b };
    f64::from_bits(bits as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Interval;
    use std::f64::consts::{E, FRAC_PI_2, PI};

    // Frozen by a composite-Simpson oracle (see tests/acceptance.rs).
    pub const INT_LOG1PR2_OVER_R_1_TO_2: f64 = 0.7737363817871263;

    #[test]
    fn polynomial_and_log_integrals() {
        let p = Profile::identity(Interval::of(-1.0, 2.0));
        let v = adaptive_quad(&p, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let inv = Profile::from_fn("1/r", Interval::of(0.1, 10.0), vec![], |r| r.recip());
        let v = adaptive_quad(&inv, 1.0, E, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
    }

    #[test]
    fn dilog_type_integrand() {
        let p = Profile::from_fn("ln(1+r^2)/r", Interval::of(0.01, 10.0), vec![], |r| {
            (1.0 + r * r).ln() / r
        });
        let v = adaptive_quad(&p, 1.0, 2.0, 1e-12).unwrap();
        assert!((v - INT_LOG1PR2_OVER_R_1_TO_2).abs() < 1e-11, "{v}");
    }

    #[test]
    fn singularity_inside_range_rejected() {
        let p = Profile::from_fn("tan", Interval::of(0.0, PI), vec![FRAC_PI_2], |r| r.tan());
        assert!(adaptive_quad(&p, 1.0, 2.0, 1e-8).is_err());
        assert!(adaptive_quad(&p, 0.2, 1.0, 1e-8).is_ok());
    }

    #[test]
    fn antiderivative_of_cos_and_reverse() {
        let c = Profile::from_fn("cos", Interval::of(-4.0, 4.0), vec![], |r| r.cos());
        let f = antiderivative(&c, 0.0);
        let j = f.eval(FRAC_PI_2).unwrap();
        assert!((j.value() - 1.0).abs() < 1e-10);
        assert!((j.d1() - 0.0).abs() < 1e-12);
        assert!((j.d2() + 1.0).abs() < 1e-12);
        // integrate backwards
        assert!((f.value(-FRAC_PI_2).unwrap() + 1.0).abs() < 1e-10);
    }

    #[test]
    fn antiderivative_of_inverse_sine_is_log_tan_half() {
        let p = Profile::from_fn("1/sin", Interval::of(0.0, PI), vec![], |r| r.sin().recip());
        let f = antiderivative(&p, FRAC_PI_2);
        for i in 0..20 {
            let r = 0.3 + (PI - 0.6) * (i as f64) / 19.0;
            let expect = (r / 2.0).tan().ln();
            assert!((f.value(r).unwrap() - expect).abs() < 1e-9, "r={r}");
        }
    }

    #[test]
    fn antiderivative_of_zero() {
        let z = Profile::constant(0.0, Interval::of(0.0, 1.0));
        let f = antiderivative(&z, 0.5);
        assert_eq!(f.value(0.9).unwrap(), 0.0);
    }

    #[test]
    fn memoization_preserves_values() {
        let p = Profile::from_fn("exp", Interval::of(0.0, 3.0), vec![], |r| r.exp());
        let f = antiderivative(&p, 1.0);
        let first = f.value(2.5).unwrap();
        let _ = f.value(1.3).unwrap();
        let _ = f.value(2.0).unwrap();
        let again = f.value(2.5).unwrap();
        assert!((first - again).abs() < 1e-11);
        assert!((first - (2.5f64.exp() - 1.0f64.exp())).abs() < 1e-9);
    }
}
