//! First-principles computations of the tension and bitension from the
//! definitions, used to cross-check the reduced formulas in `geometry`.
//!
//! The tension is computed componentwise from Christoffel symbols, and the
//! bitension by tracing the pullback connection over the orthonormal frame
//! {d/dr, (1/sigma) d/dtheta} and using the surface curvature identity
//! R(X,Y)Z = K(<Y,Z>X - <X,Z>Y). None of this shares the derivative-of-x
//! algebra of the reduced formulas beyond the tension itself, so agreement
//! between the two paths catches transcription errors in either.

use crate::error::{Error, Result};
use crate::geometry::{tension_jet, ConformalFactor, RotSymMap, TensionValue, WarpedSurface};
use crate::jet::Jet4;
use crate::profile::{Interval, Profile, DEFAULT_EXCLUSION};
use crate::quad::antiderivative;

/// Christoffel symbols of dr^2 + warp^2 dtheta^2 at a point, in the
/// (r, theta) coordinate basis. All other components vanish.
#[derive(Copy, Clone, Debug)]
pub struct ChristoffelData {
    pub gamma_r_theta_theta: f64,
    pub gamma_theta_r_theta: f64,
}

pub fn christoffel(s: &WarpedSurface, r: f64) -> Result<ChristoffelData> {
    let w = s.warp.eval_excl(r, DEFAULT_EXCLUSION)?;
    Ok(ChristoffelData {
        gamma_r_theta_theta: -w.value() * w.d1(),
        gamma_theta_r_theta: w.d1() / w.value(),
    })
}

/// Tension field Tr_g (nabla d phi) computed from the Christoffel symbols
/// of source and target rather than from the reduced radial formula.
pub fn oracle_tension(m: &RotSymMap, r: f64) -> Result<TensionValue> {
    let rho = m.rho.eval_excl(r, DEFAULT_EXCLUSION)?;
    let sigma = m.source.warp.eval_excl(r, DEFAULT_EXCLUSION)?;
    let target = target_christoffel(&m.target, rho.value())?;
    // Laplacian of the components: phi^rho = rho(r), phi^phi = k theta
    let lap_rho = rho.d2() + sigma.d1() / sigma.value() * rho.d1();
    let lap_phi = 0.0;
    // g^{ij} Gamma^a_{bc}(phi) d_i phi^b d_j phi^c with diagonal g
    let gtt = 1.0 / (sigma.value() * sigma.value());
    let radial = lap_rho + gtt * target.gamma_r_theta_theta * m.k * m.k;
    // the only candidate term Gamma^phi_{rho phi} pairs d_i rho with
    // d_i (k theta), which never share an index
    let angular = lap_phi;
    if !radial.is_finite() {
        return Err(Error::SingularPoint { r });
    }
    Ok(TensionValue { radial, angular })
}

fn target_christoffel(n: &WarpedSurface, rho: f64) -> Result<ChristoffelData> {
    let w = n.warp.eval_excl(rho, DEFAULT_EXCLUSION)?;
    Ok(ChristoffelData {
        gamma_r_theta_theta: -w.value() * w.d1(),
        gamma_theta_r_theta: w.d1() / w.value(),
    })
}

/// Bitension from the definition: rough Laplacian of tau along phi minus
/// the traced target-curvature term.
pub fn oracle_bitension(m: &RotSymMap, r: f64) -> Result<TensionValue> {
    oracle_bitension_excl(m, r, DEFAULT_EXCLUSION)
}

pub fn oracle_bitension_excl(m: &RotSymMap, r: f64, excl: f64) -> Result<TensionValue> {
    let x = tension_jet(m, r, excl)?;
    let rho = m.rho.eval_excl(r, excl)?;
    let sigma = m.source.warp.eval_excl(r, excl)?;
    let lam = m.target.warp.eval_excl(rho.value(), excl)?;
    let k2 = m.k * m.k;
    let s2 = sigma.value() * sigma.value();

    // V = x(r) d/drho pulled back along phi.
    //
    // nabla^phi_{dr} V = x' d/drho (no Gamma term: dr phi^phi = 0)
    // nabla^phi_{dr} nabla^phi_{dr} V = x'' d/drho
    //
    // nabla^phi_{dth} V = x k (lambda'/lambda) d/dphi
    // nabla^phi_{dth} nabla^phi_{dth} V = -x k^2 lambda'^2 d/drho
    //
    // trace over {dr, sigma^{-1} dth} with the frame correction
    // -nabla^phi_{nabla_{dth} dth}/sigma^2 = +(sigma'/sigma) nabla^phi_{dr}
    let rough = x.d2() + sigma.d1() / sigma.value() * x.d1()
        - k2 * lam.d1() * lam.d1() / s2 * x.value();

    // Trace_g R^N(dphi, V) dphi: only the theta leg contributes,
    // dphi(e2) = (k/sigma) d/dphi with |d/dphi|^2 = lambda^2.
    let curv = -gauss_of(&lam) * k2 * lam.value() * lam.value() / s2 * x.value();

    let radial = rough - curv;
    if !radial.is_finite() {
        return Err(Error::SingularPoint { r });
    }
    Ok(TensionValue {
        radial,
        angular: 0.0,
    })
}

fn gauss_of(warp: &Jet4) -> f64 {
    -warp.d2() / warp.value()
}

/// Monotone change of coordinate s(r) with s'(r) = deriv(r) > 0 on the
/// working interval. Forward values come from a memoized antiderivative;
/// the inverse is computed by bisection plus Newton polish, and inverse
/// jets by the recurrence r'(s) = 1/deriv(r(s)).
#[derive(Clone)]
pub struct CoordChange {
    forward_profile: Profile,
    deriv: Profile,
    pub working: Interval,
    pub basepoint: f64,
    pub s_range: Interval,
}

impl CoordChange {
    pub fn new(deriv: Profile, working: Interval, basepoint: f64) -> Result<CoordChange> {
        if !(working.lo <= basepoint && basepoint <= working.hi) {
            return Err(Error::BadInterval {
                lo: working.lo,
                hi: working.hi,
            });
        }
        let nudge = 1e-9 * working.length();
        let working = Interval::of(working.lo + nudge, working.hi - nudge);
        let basepoint = basepoint.clamp(working.lo, working.hi);
        let forward_profile = antiderivative(&deriv, basepoint);
        let s_lo = forward_profile.value(working.lo)?;
        let s_hi = forward_profile.value(working.hi)?;
        if !(s_lo < s_hi) {
            return Err(Error::InversionFailure(format!(
                "coordinate map not increasing on [{}, {}]",
                working.lo, working.hi
            )));
        }
        Ok(CoordChange {
            forward_profile,
            deriv,
            working,
            basepoint,
            s_range: Interval::of(s_lo, s_hi),
        })
    }

    pub fn forward(&self, r: f64) -> Result<f64> {
        self.forward_profile.value(r)
    }

    pub fn inverse(&self, s: f64) -> Result<f64> {
        if !self.s_range.contains(s) && (s - self.s_range.lo).abs() > 1e-12
            && (s - self.s_range.hi).abs() > 1e-12
        {
            return Err(Error::OutOfDomain {
                r: s,
                lo: self.s_range.lo,
                hi: self.s_range.hi,
            });
        }
        let (mut a, mut b) = (self.working.lo, self.working.hi);
        for _ in 0..50 {
            let mid = 0.5 * (a + b);
            if self.forward(mid)? < s {
                a = mid;
            } else {
                b = mid;
            }
        }
        // Newton polish on s(r) - s
        let mut r = 0.5 * (a + b);
        for _ in 0..4 {
            let fr = self.forward(r)? - s;
            let dr = self.deriv.value(r)?;
            let next = r - fr / dr;
            if next.is_finite() && self.working.contains(next) {
                r = next;
            }
        }
        Ok(r)
    }

    /// Order-4 jet of the inverse r(s) at s.
    pub fn inverse_jet(&self, s: f64) -> Result<Jet4> {
        let r0 = self.inverse(s)?;
        let w = self.deriv.eval(r0)?;
        let g = Jet4::constant(1.0) / w; // dr/ds as a jet in r at r0
        let mut rj = Jet4::constant(r0);
        for k in 0..4 {
            let comp = Jet4::compose(g, rj);
            rj.c[k + 1] = comp.c[k] / ((k + 1) as f64);
        }
        if rj.is_finite() {
            Ok(rj)
        } else {
            Err(Error::InversionFailure(format!("inverse jet at s={s}")))
        }
    }
}

/// Present f^{-1}(dr^2 + sigma^2 dtheta^2) in warped form
/// ds^2 + tilde-sigma^2 dtheta^2 with s = int f^{-1/2} dr from the
/// midpoint of the working interval. Requires f > 0 on the interval.
pub fn reparametrize(
    s: &WarpedSurface,
    cf: &ConformalFactor,
    working: Interval,
) -> Result<(WarpedSurface, CoordChange)> {
    let f = cf.f.clone();
    for i in 0..=64 {
        let r = working.lo + working.length() * (i as f64) / 64.0;
        if let Ok(v) = f.value(r) {
            if v <= 0.0 {
                return Err(Error::NonPositiveFactor { r, value: v });
            }
        }
    }
    let fd = f.clone();
    let deriv = Profile::from_raw(
        "f^(-1/2)",
        f.domain(),
        f.singularities().to_vec(),
        move |r| match fd.eval(r) {
            Ok(j) => j.powf(-0.5),
            Err(_) => Jet4::constant(f64::NAN),
        },
    );
    let change = CoordChange::new(deriv, working, working.midpoint())?;
    let sigma = s.warp.clone();
    let ch = change.clone();
    let warp = Profile::from_raw("reparametrized warp", change.s_range, vec![], move |sv| {
        let rj = match ch.inverse_jet(sv) {
            Ok(j) => j,
            Err(_) => return Jet4::constant(f64::NAN),
        };
        let sig = match sigma.eval(rj.value()) {
            Ok(j) => j,
            Err(_) => return Jet4::constant(f64::NAN),
        };
        let fj = match f.eval(rj.value()) {
            Ok(j) => j,
            Err(_) => return Jet4::constant(f64::NAN),
        };
        Jet4::compose(sig, rj) * Jet4::compose(fj.powf(-0.5), rj)
    });
    let surface = WarpedSurface::new(change.s_range, warp, &format!("{} (reparametrized)", s.label));
    Ok((surface, change))
}

/// The whole map transported to the reparametrized source coordinate.
pub fn reparametrized_map(
    m: &RotSymMap,
    cf: &ConformalFactor,
    working: Interval,
) -> Result<(RotSymMap, CoordChange)> {
    let (source, change) = reparametrize(&m.source, cf, working)?;
    let rho = m.rho.clone();
    let ch = change.clone();
    let rho_s = Profile::from_raw("rho(r(s))", change.s_range, vec![], move |sv| {
        let rj = match ch.inverse_jet(sv) {
            Ok(j) => j,
            Err(_) => return Jet4::constant(f64::NAN),
        };
        match rho.eval(rj.value()) {
            Ok(j) => Jet4::compose(j, rj),
            Err(_) => Jet4::constant(f64::NAN),
        }
    });
    Ok((
        RotSymMap {
            source,
            target: m.target.clone(),
            rho: rho_s,
            k: m.k,
        },
        change,
    ))
}

/// Bitension with respect to f^{-1} g, computed by isometric
/// reparametrization followed by the first-principles bitension — the
/// second independent path to `geometry::conformal_bitension`.
pub fn oracle_conformal_bitension(
    m: &RotSymMap,
    cf: &ConformalFactor,
    working: Interval,
    r: f64,
) -> Result<TensionValue> {
    let (mt, change) = reparametrized_map(m, cf, working)?;
    let s = change.forward(r)?;
    oracle_bitension_excl(&mt, s, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{
        bitension_radial, conformal_bitension, tension_radial, gauss_curvature,
    };
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn double_wrap() -> RotSymMap {
        RotSymMap {
            source: WarpedSurface::new(
                Interval::of(0.0, FRAC_PI_2),
                Profile::sine(Interval::of(0.0, FRAC_PI_2)),
                "S^2 upper",
            ),
            target: crate::geometry::round_sphere("S^2"),
            rho: Profile::from_fn("2r", Interval::of(0.0, FRAC_PI_2), vec![], |r| r * 2.0),
            k: 1.0,
        }
    }

    fn random_smooth_map(rng: &mut ChaCha8Rng) -> RotSymMap {
        let a = rng.gen_range(0.3..1.2);
        let b = rng.gen_range(0.1..0.5);
        let c = rng.gen_range(0.2..0.9);
        let k = rng.gen_range(0.5..2.5);
        let dom = Interval::of(0.5, 2.5);
        let tdom = Interval::of(-10.0, 10.0);
        RotSymMap {
            source: WarpedSurface::new(
                dom,
                Profile::from_fn("sigma", dom, vec![], move |r| 1.0 + b * (r * a).sin()),
                "rand source",
            ),
            target: WarpedSurface::new(
                tdom,
                Profile::from_fn("lambda", tdom, vec![], move |u| 1.5 + (u * 0.7).cos() * 0.4),
                "rand target",
            ),
            rho: Profile::from_fn("rho", dom, vec![], move |r| r + c * (r * 1.3).sin() * 0.3),
            k,
        }
    }

    #[test]
    fn christoffel_round_sphere() {
        let s = crate::geometry::round_sphere("S^2");
        let g = christoffel(&s, FRAC_PI_4).unwrap();
        assert!((g.gamma_r_theta_theta + 0.5).abs() < 1e-14); // -sin cos = -1/2
        assert!((g.gamma_theta_r_theta - 1.0).abs() < 1e-14); // cot(pi/4)
    }

    #[test]
    fn oracle_matches_formula_on_random_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            let m = random_smooth_map(&mut rng);
            for _ in 0..100 {
                let r = rng.gen_range(0.55..2.45);
                let ot = oracle_tension(&m, r).unwrap();
                let ft = tension_radial(&m, r).unwrap();
                assert!(
                    (ot.radial - ft).abs() <= 1e-9 * (1.0 + ft.abs()),
                    "tension mismatch at r={r}: {} vs {ft}",
                    ot.radial
                );
                let ob = oracle_bitension(&m, r).unwrap();
                let fb = bitension_radial(&m, r).unwrap();
                assert!(
                    (ob.radial - fb).abs() <= 1e-7 * (1.0 + fb.abs()),
                    "bitension mismatch at r={r}: {} vs {fb}",
                    ob.radial
                );
            }
        }
    }

    #[test]
    fn oracle_double_wrap_values() {
        let m = double_wrap();
        let t = oracle_tension(&m, FRAC_PI_4).unwrap();
        assert!((t.radial - 2.0).abs() < 1e-12);
        assert_eq!(t.angular, 0.0);
        let b = oracle_bitension(&m, FRAC_PI_4).unwrap();
        assert!((b.radial + 4.0).abs() < 1e-10, "{}", b.radial);
    }

    #[test]
    fn reparametrize_plane_disc_to_sphere() {
        // sigma = r with f = (1+r^2)^2/4 is the round sphere:
        // s = 2 arctan r + const, tilde-sigma = sin s
        let dom = Interval::of(1e-6, 50.0);
        let plane = WarpedSurface::new(dom, Profile::identity(dom), "plane");
        let f = Profile::from_fn("(1+r^2)^2/4", dom, vec![], |r| {
            let u = 1.0 + r * r;
            u * u * 0.25
        });
        let cf = ConformalFactor::positive(f);
        let working = Interval::of(0.05, 20.0);
        let (sphere, change) = reparametrize(&plane, &cf, working).unwrap();
        let shift = 2.0 * f64::atan(working.midpoint());
        for r in [0.1, 0.5, 1.0, 2.0, 7.0] {
            let s = change.forward(r).unwrap();
            assert!(
                (s - (2.0 * r.atan() - shift)).abs() < 1e-9,
                "s({r}) = {s}"
            );
            let w = sphere.warp.value(s).unwrap();
            assert!(
                (w - (s + shift).sin()).abs() < 1e-8,
                "warp({s}) = {w}"
            );
            let back = change.inverse(s).unwrap();
            assert!((back - r).abs() < 1e-10);
        }
        // curvature of the reparametrized surface is 1
        for s in [-2.0, -1.0, 0.05] {
            let k = gauss_curvature(&sphere, s).unwrap();
            assert!((k - 1.0).abs() < 1e-7, "K({s}) = {k}");
        }
    }

    #[test]
    fn reparametrize_sphere_log_tan() {
        // sigma = sin r with f = sin^2 r flattens to tilde-sigma = 1,
        // t = ln tan(r/2) up to the basepoint constant
        let dom = Interval::of(0.0, PI);
        let sphere = crate::geometry::round_sphere("S^2");
        let f = Profile::from_fn("sin^2", dom, vec![0.0, PI], |r| r.sin() * r.sin());
        let cf = ConformalFactor::positive(f);
        let working = Interval::of(0.4, PI - 0.4);
        let (flat, change) = reparametrize(&sphere, &cf, working).unwrap();
        for r in [0.6, 1.0, FRAC_PI_2, 2.2] {
            let t = change.forward(r).unwrap();
            let expect = (r / 2.0).tan().ln() - (working.midpoint() / 2.0).tan().ln();
            assert!((t - expect).abs() < 1e-9, "t({r}) = {t} vs {expect}");
            assert!((flat.warp.value(t).unwrap() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn trivial_factor_is_identity_reparametrization() {
        let sphere = crate::geometry::round_sphere("S^2");
        let cf = ConformalFactor::one(Interval::of(0.0, PI));
        let working = Interval::of(0.3, PI - 0.3);
        let (same, change) = reparametrize(&sphere, &cf, working).unwrap();
        for r in [0.5, 1.1, 2.0] {
            let s = change.forward(r).unwrap();
            assert!((s - (r - working.midpoint())).abs() < 1e-11);
            assert!((same.warp.value(s).unwrap() - r.sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn coord_change_preserves_lengths() {
        let dom = Interval::of(0.1, 3.0);
        let deriv = Profile::from_fn("w", dom, vec![], |r| 1.0 / (1.0 + r * r).sqrt());
        let change = CoordChange::new(deriv.clone(), dom, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let r1 = rng.gen_range(0.15..2.0);
            let r2 = rng.gen_range(r1..2.9);
            let len = crate::quad::adaptive_quad(&deriv, r1, r2, 1e-12).unwrap();
            let ds = change.forward(r2).unwrap() - change.forward(r1).unwrap();
            assert!((len - ds).abs() < 1e-10);
        }
    }

    #[test]
    fn inverse_jet_derivatives() {
        // s(r) = r^3/3 on (0.5, 2): r(s) = (3s)^{1/3} against hand jets
        let dom = Interval::of(0.5, 2.0);
        let deriv = Profile::from_fn("r^2", dom, vec![], |r| r * r);
        let change = CoordChange::new(deriv, dom, 0.5).unwrap();
        let r_true: f64 = 1.3;
        let s = change.forward(r_true).unwrap();
        let j = change.inverse_jet(s).unwrap();
        assert!((j.value() - r_true).abs() < 1e-11);
        assert!((j.d1() - 1.0 / (r_true * r_true)).abs() < 1e-9);
        // r'' (s) = -2 r'(s)^2 / r = -2 / r^5
        assert!((j.d2() + 2.0 / r_true.powi(5)).abs() < 1e-8, "{}", j.d2());
    }

    #[test]
    fn conformal_oracle_matches_formula() {
        let m = double_wrap();
        let f = Profile::from_fn("f", Interval::of(0.0, FRAC_PI_2), vec![], |r| {
            1.2 + 0.3 * (2.0 * r).cos()
        });
        let cf = ConformalFactor::positive(f);
        let working = Interval::of(0.3, 1.3);
        let (mt, change) = reparametrized_map(&m, &cf, working).unwrap();
        for r in [0.45, 0.8, 1.1] {
            let s = change.forward(r).unwrap();
            let o = oracle_bitension_excl(&mt, s, 0.0).unwrap();
            let g = conformal_bitension(&m, &cf, r).unwrap();
            assert!(
                (o.radial - g.radial).abs() <= 1e-6 * (1.0 + g.radial.abs()),
                "r={r}: {} vs {}",
                o.radial,
                g.radial
            );
        }
    }
}
