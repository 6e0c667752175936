//! Warped-product surfaces, rotationally symmetric maps, and the reduced
//! residual formulas for harmonicity, biharmonicity and f-biharmonicity.
//!
//! The radial tension of phi(r, theta) = (rho(r), k theta) between
//! dr^2 + sigma^2 dtheta^2 and drho^2 + lambda^2 dphi^2 is
//!
//! ```text
//! x = rho'' + (sigma'/sigma) rho' - k^2 lambda lambda'(rho) / sigma^2
//! ```
//!
//! and the bitension, f-bitension and conformally-changed bitension are
//! second-order expressions in x. `x` is materialized as a derived profile
//! whose jet is valid to order 2, which is exactly what those expressions
//! need.

use crate::error::{Error, Result};
use crate::jet::Jet4;
use crate::profile::{Interval, Profile, DEFAULT_EXCLUSION};
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct WarpedSurface {
    pub coord: Interval,
    pub warp: Profile,
    pub label: String,
}

impl WarpedSurface {
    pub fn new(coord: Interval, warp: Profile, label: &str) -> WarpedSurface {
        WarpedSurface {
            coord,
            warp,
            label: label.to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RotSymMap {
    pub source: WarpedSurface,
    pub target: WarpedSurface,
    pub rho: Profile,
    pub k: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Positive,
    Negative,
}

/// Conformal factor f with ḡ = f⁻¹ g. Stored as f itself; the square
/// root F = sqrt(f) is only formed inside the conformal bitension on
/// positive charts.
#[derive(Clone, Debug)]
pub struct ConformalFactor {
    pub f: Profile,
    pub sign_chart: Vec<(Interval, Sign)>,
}

impl ConformalFactor {
    pub fn positive(f: Profile) -> ConformalFactor {
        let chart = vec![(f.domain(), Sign::Positive)];
        ConformalFactor {
            f,
            sign_chart: chart,
        }
    }

    pub fn one(domain: Interval) -> ConformalFactor {
        ConformalFactor::positive(Profile::constant(1.0, domain))
    }

    /// Locate sign changes of `f` by bisection on a dense scan and build
    /// the chart. Zeros found this way should coincide with declared
    /// singularities of `f`.
    pub fn with_scanned_chart(f: Profile, working: Interval) -> ConformalFactor {
        let n = 2048;
        let mut zeros = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=n {
            let r = working.lo + working.length() * (i as f64) / (n as f64);
            if let Ok(v) = f.value(r) {
                if let Some((pr, pv)) = prev {
                    if pv.signum() != v.signum() && pv != 0.0 && v != 0.0 {
                        let (mut a, mut b, mut fa) = (pr, r, pv);
                        for _ in 0..60 {
                            let m = 0.5 * (a + b);
                            let fm = f.value(m).unwrap_or(f64::NAN);
                            if !fm.is_finite() {
                                break;
                            }
                            if fa.signum() == fm.signum() {
                                a = m;
                                fa = fm;
                            } else {
                                b = m;
                            }
                        }
                        zeros.push(0.5 * (a + b));
                    }
                }
                prev = Some((r, v));
            }
        }
        let mut chart = Vec::new();
        let mut lo = working.lo;
        for &z in zeros.iter().chain(std::iter::once(&working.hi)) {
            if z - lo > 1e-9 {
                let mid = 0.5 * (lo + z);
                let sign = match f.value(mid) {
                    Ok(v) if v < 0.0 => Sign::Negative,
                    _ => Sign::Positive,
                };
                chart.push((Interval::of(lo, z), sign));
            }
            lo = z;
        }
        ConformalFactor { f, sign_chart: chart }
    }

    pub fn sign_at(&self, r: f64) -> Option<Sign> {
        self.sign_chart
            .iter()
            .find(|(iv, _)| iv.contains(r))
            .map(|(_, s)| *s)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct TensionValue {
    pub radial: f64,
    pub angular: f64,
}

impl TensionValue {
    pub const ZERO: TensionValue = TensionValue {
        radial: 0.0,
        angular: 0.0,
    };
}

/// Jet (valid to order 2) of the radial tension x at r.
pub fn tension_jet(m: &RotSymMap, r: f64, excl: f64) -> Result<Jet4> {
    let rho = m.rho.eval_excl(r, excl)?;
    let sigma = m.source.warp.eval_excl(r, excl)?;
    // lambda lambda'(rho) as a jet in r, via composition with rho
    let lam = m.target.warp.eval_excl(rho.value(), excl)?;
    let llp = lam * lam.deriv();
    let llp_r = Jet4::compose(llp, rho);
    let x = rho.deriv().deriv() + (sigma.deriv() / sigma) * rho.deriv()
        - llp_r * (m.k * m.k) / (sigma * sigma);
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::SingularPoint { r })
    }
}

/// Radial tension x(r); the map is harmonic at r iff this vanishes.
pub fn tension_radial(m: &RotSymMap, r: f64) -> Result<f64> {
    Ok(tension_jet(m, r, DEFAULT_EXCLUSION)?.value())
}

/// The tension as a derived profile (jets valid to order 2).
pub fn tension_profile(m: &RotSymMap) -> Profile {
    let m = m.clone();
    let mut sing = m.source.warp.singularities().to_vec();
    sing.extend_from_slice(m.rho.singularities());
    Profile::from_raw("x", m.source.coord, sing, move |r| {
        tension_jet(&m, r, 0.0).unwrap_or(Jet4::constant(f64::NAN))
    })
}

/// Coefficient q(r) = k^2 (lambda lambda')'(rho(r)) / sigma^2 of the
/// assembled linear system, as a value.
pub fn target_coefficient(m: &RotSymMap, r: f64, excl: f64) -> Result<f64> {
    let rho = m.rho.eval_excl(r, excl)?;
    let sigma = m.source.warp.eval_excl(r, excl)?;
    let lam = m.target.warp.eval_excl(rho.value(), excl)?;
    let llp = lam * lam.deriv();
    // derivative with respect to rho, evaluated at rho(r)
    let llp_prime = llp.d1();
    let q = m.k * m.k * llp_prime / (sigma.value() * sigma.value());
    if q.is_finite() {
        Ok(q)
    } else {
        Err(Error::SingularPoint { r })
    }
}

/// Radial component of the bitension tau_2(phi, g); biharmonic at r iff 0.
pub fn bitension_radial(m: &RotSymMap, r: f64) -> Result<f64> {
    bitension_radial_excl(m, r, DEFAULT_EXCLUSION)
}

pub fn bitension_radial_excl(m: &RotSymMap, r: f64, excl: f64) -> Result<f64> {
    let x = tension_jet(m, r, excl)?;
    let sigma = m.source.warp.eval_excl(r, excl)?;
    let q = target_coefficient(m, r, excl)?;
    let v = x.d2() + sigma.d1() / sigma.value() * x.d1() - q * x.value();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::SingularPoint { r })
    }
}

/// f-bitension f·tau_2 + (Δf)·tau + 2∇_{grad f} tau for radial f.
/// The angular component is structurally zero.
pub fn f_bitension(m: &RotSymMap, cf: &ConformalFactor, r: f64) -> Result<TensionValue> {
    f_bitension_excl(m, cf, r, DEFAULT_EXCLUSION)
}

pub fn f_bitension_excl(
    m: &RotSymMap,
    cf: &ConformalFactor,
    r: f64,
    excl: f64,
) -> Result<TensionValue> {
    let x = tension_jet(m, r, excl)?;
    let sigma = m.source.warp.eval_excl(r, excl)?;
    let f = cf.f.eval_excl(r, excl)?;
    let tau2 = x.d2() + sigma.d1() / sigma.value() * x.d1() - target_coefficient(m, r, excl)? * x.value();
    let lap_f = f.d2() + sigma.d1() / sigma.value() * f.d1();
    let radial = f.value() * tau2 + lap_f * x.value() + 2.0 * f.d1() * x.d1();
    if !radial.is_finite() {
        return Err(Error::SingularPoint { r });
    }
    Ok(TensionValue {
        radial,
        angular: 0.0,
    })
}

/// Bitension of phi with respect to the conformal metric f⁻¹ g.
/// Requires f > 0 at r.
pub fn conformal_bitension(m: &RotSymMap, cf: &ConformalFactor, r: f64) -> Result<TensionValue> {
    conformal_bitension_excl(m, cf, r, DEFAULT_EXCLUSION)
}

pub fn conformal_bitension_excl(
    m: &RotSymMap,
    cf: &ConformalFactor,
    r: f64,
    excl: f64,
) -> Result<TensionValue> {
    let f = cf.f.eval_excl(r, excl)?;
    if f.value() <= 0.0 {
        return Err(Error::NonPositiveFactor {
            r,
            value: f.value(),
        });
    }
    let x = tension_jet(m, r, excl)?;
    let sigma = m.source.warp.eval_excl(r, excl)?;
    let sos = sigma.d1() / sigma.value();
    let lnf1 = f.d1() / f.value();
    let lnf2 = f.d2() / f.value() - lnf1 * lnf1;
    let lap_lnf = lnf2 + sos * lnf1;
    let q = target_coefficient(m, r, excl)?;
    let radial = f.value()
        * f.value()
        * (x.d2() + (sos + 2.0 * lnf1) * x.d1() + (lap_lnf + lnf1 * lnf1 - q) * x.value());
    if !radial.is_finite() {
        return Err(Error::SingularPoint { r });
    }
    Ok(TensionValue {
        radial,
        angular: 0.0,
    })
}

/// Coefficient k lambda'(rho) x / (sigma^2 lambda) multiplying f_theta in
/// the theta-component of the conformal bitension. Nonzero means only a
/// radial f can make the map f-biharmonic.
pub fn theta_obstruction(m: &RotSymMap, r: f64) -> Result<f64> {
    let x = tension_jet(m, r, DEFAULT_EXCLUSION)?;
    let sigma = m.source.warp.eval_excl(r, DEFAULT_EXCLUSION)?;
    let rho = m.rho.eval_excl(r, DEFAULT_EXCLUSION)?;
    let lam = m.target.warp.eval_excl(rho.value(), DEFAULT_EXCLUSION)?;
    let v = m.k * lam.d1() * x.value() / (sigma.value() * sigma.value() * lam.value());
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::SingularPoint { r })
    }
}

/// Gauss curvature of a warped surface: K = -warp'' / warp.
pub fn gauss_curvature(s: &WarpedSurface, r: f64) -> Result<f64> {
    let w = s.warp.eval_excl(r, DEFAULT_EXCLUSION)?;
    let k = -w.d2() / w.value();
    if k.is_finite() {
        Ok(k)
    } else {
        Err(Error::SingularPoint { r })
    }
}

/// Unit 2-sphere presented as a warped surface on (0, pi).
pub fn round_sphere(label: &str) -> WarpedSurface {
    WarpedSurface::new(
        Interval::of(0.0, std::f64::consts::PI),
        Profile::sine(Interval::of(0.0, std::f64::consts::PI)),
        label,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

    pub fn identity_sphere_map() -> RotSymMap {
        let s = round_sphere("S^2");
        RotSymMap {
            source: s.clone(),
            target: s,
            rho: Profile::identity(Interval::of(0.0, PI)),
            k: 1.0,
        }
    }

    pub fn double_wrap_map() -> RotSymMap {
        RotSymMap {
            source: WarpedSurface::new(
                Interval::of(0.0, FRAC_PI_2),
                Profile::sine(Interval::of(0.0, FRAC_PI_2)),
                "S^2 upper",
            ),
            target: round_sphere("S^2"),
            rho: Profile::from_fn("2r", Interval::of(0.0, FRAC_PI_2), vec![], |r| r * 2.0),
            k: 1.0,
        }
    }

    fn cauchy_euler_base_map() -> RotSymMap {
        let dom = Interval::of(0.0, 1e4);
        RotSymMap {
            source: WarpedSurface::new(dom, Profile::identity(dom), "plane"),
            target: WarpedSurface::new(
                Interval::of(0.0, 1e6),
                Profile::from_fn("sqrt(rho)", Interval::of(0.0, 1e6), vec![], |u| u.sqrt()),
                "paraboloid-type",
            ),
            rho: Profile::from_fn("k^2/4 ln^2 r + ln(1+r^2)", dom, vec![], |r| {
                let l = r.ln();
                l * l * 0.25 + (1.0 + r * r).ln()
            }),
            k: 1.0,
        }
    }

    #[test]
    fn identity_is_harmonic() {
        let m = identity_sphere_map();
        for i in 1..40 {
            let r = PI * (i as f64) / 40.0;
            if (r - FRAC_PI_2).abs() < 1e-9 {
                continue;
            }
            assert!(tension_radial(&m, r).unwrap().abs() < 1e-13, "r={r}");
        }
    }

    #[test]
    fn double_wrap_tension_and_bitension() {
        let m = double_wrap_map();
        // x = 2 sin 2r
        let x = tension_radial(&m, FRAC_PI_4).unwrap();
        assert!((x - 2.0).abs() < 1e-12);
        let b = bitension_radial(&m, FRAC_PI_4).unwrap();
        assert!((b + 4.0).abs() < 1e-11, "bitension {b}");
    }

    #[test]
    fn cauchy_euler_base_case_values() {
        let m = cauchy_euler_base_map();
        // x(r) = 4/(1+r^2)^2 so x(1) = 1
        let x = tension_radial(&m, 1.0).unwrap();
        assert!((x - 1.0).abs() < 1e-11, "x(1) = {x}");
        let x2 = tension_radial(&m, 1.7).unwrap();
        let expect = 4.0 / (1.0f64 + 1.7 * 1.7).powi(2);
        assert!((x2 - expect).abs() < 1e-11);
        // bitension at r=1 is 2 ((lambda lambda')' = 0 for lambda^2 = rho)
        let b = bitension_radial(&m, 1.0).unwrap();
        assert!((b - 2.0).abs() < 1e-10, "bitension {b}");
    }

    #[test]
    fn f_bitension_reduces_to_bitension_for_unit_f() {
        let m = double_wrap_map();
        let cf = ConformalFactor::one(Interval::of(0.0, FRAC_PI_2));
        for r in [0.4, 0.8, 1.2] {
            let fb = f_bitension(&m, &cf, r).unwrap();
            let b = bitension_radial(&m, r).unwrap();
            assert!((fb.radial - b).abs() < 1e-12);
            assert_eq!(fb.angular, 0.0);
        }
    }

    #[test]
    fn conformal_identity_with_f() {
        // tau_2(phi, f^{-1} g) = f * tau_{2,f} pointwise where f > 0
        let m = double_wrap_map();
        let f = Profile::from_fn("1.5+0.4 sin(2r+1)", Interval::of(0.0, FRAC_PI_2), vec![], |r| {
            (r * 2.0 + 1.0).sin() * 0.4 + 1.5
        });
        let cf = ConformalFactor::positive(f);
        for i in 1..30 {
            let r = FRAC_PI_2 * (i as f64) / 30.0;
            let a = conformal_bitension(&m, &cf, r);
            let b = f_bitension(&m, &cf, r);
            if let (Ok(a), Ok(b)) = (a, b) {
                let fv = cf.f.value(r).unwrap();
                let expect = fv * b.radial;
                assert!(
                    (a.radial - expect).abs() <= 1e-7 * (1.0 + expect.abs()),
                    "r={r}: {} vs {}",
                    a.radial,
                    expect
                );
            }
        }
    }

    #[test]
    fn constant_factor_scales_bitension() {
        let m = double_wrap_map();
        let c = 2.7;
        let cf = ConformalFactor::positive(Profile::constant(c, Interval::of(0.0, FRAC_PI_2)));
        for r in [0.5, 0.9, 1.3] {
            let a = conformal_bitension(&m, &cf, r).unwrap();
            let b = bitension_radial(&m, r).unwrap();
            assert!((a.radial - c * c * b).abs() < 1e-9);
        }
    }

    #[test]
    fn nonpositive_factor_rejected() {
        let m = double_wrap_map();
        let cf = ConformalFactor::positive(Profile::constant(-1.0, Interval::of(0.0, FRAC_PI_2)));
        assert!(matches!(
            conformal_bitension(&m, &cf, 0.8),
            Err(Error::NonPositiveFactor { .. })
        ));
    }

    #[test]
    fn theta_obstruction_values() {
        let m = double_wrap_map();
        // lambda'(rho) = cos(pi/2) = 0 at r = pi/4
        assert!(theta_obstruction(&m, FRAC_PI_4).unwrap().abs() < 1e-13);
        // at pi/6: sqrt(3) * (1/2) / (1/4 * sqrt(3)/2) = 4
        let v = theta_obstruction(&m, FRAC_PI_6).unwrap();
        assert!((v - 4.0).abs() < 1e-12, "{v}");
        // harmonic map: x = 0 everywhere
        let id = identity_sphere_map();
        assert!(theta_obstruction(&id, 0.9).unwrap().abs() < 1e-13);
    }

    #[test]
    fn gauss_curvature_sphere_flat_and_sqrt() {
        let sphere = round_sphere("S^2");
        assert!((gauss_curvature(&sphere, 1.1).unwrap() - 1.0).abs() < 1e-12);
        let flat = WarpedSurface::new(
            Interval::of(0.0, 10.0),
            Profile::identity(Interval::of(0.0, 10.0)),
            "flat",
        );
        assert!(gauss_curvature(&flat, 2.0).unwrap().abs() < 1e-14);
        // lambda = sqrt(rho): K = -lambda''/lambda = 1/(4 rho^2)
        let sq = WarpedSurface::new(
            Interval::of(0.0, 100.0),
            Profile::from_fn("sqrt", Interval::of(0.0, 100.0), vec![], |u| u.sqrt()),
            "sqrt warp",
        );
        assert!((gauss_curvature(&sq, 1.0).unwrap() - 0.25).abs() < 1e-12);
        assert!((gauss_curvature(&sq, 2.0).unwrap() - 1.0 / 16.0).abs() < 1e-12);
    }
}
