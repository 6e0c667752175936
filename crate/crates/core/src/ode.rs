//! ODE machinery: the linear second-order system satisfied by y = f x,
//! an adaptive Dormand-Prince solver with dense jet output, reduction of
//! order, the first-derivative-free t-form, the Cauchy-Euler and
//! log-tan-polynomial solution families, the Riccati residual, and the
//! two closed-form ansatz solutions.

use crate::error::{Error, Result};
use crate::geometry::{bitension_radial_excl, tension_profile, ConformalFactor, RotSymMap};
use crate::jet::Jet4;
use crate::oracle::CoordChange;
use crate::profile::{Interval, Profile};
use crate::quad::antiderivative;

/// y'' + p(r) y' + q(r) y = 0
#[derive(Clone)]
pub struct LinearODE2 {
    pub p: Profile,
    pub q: Profile,
    pub domain: Interval,
}

impl LinearODE2 {
    pub fn new(p: Profile, q: Profile, domain: Interval) -> LinearODE2 {
        LinearODE2 { p, q, domain }
    }

    pub fn residual(&self, y: &Jet4, r: f64) -> Result<f64> {
        let p = self.p.value(r)?;
        let q = self.q.value(r)?;
        Ok(y.d2() + p * y.d1() + q * y.value())
    }
}

/// The system y'' + (sigma'/sigma) y' - k^2 (lambda lambda')'(rho)/sigma^2 y = 0
/// whose solutions are exactly the products f x of a conformal factor with
/// the tension of the map.
pub fn assemble_system(m: &RotSymMap) -> LinearODE2 {
    let dom = m.source.coord;
    let sig = m.source.warp.clone();
    let mut sing = m.source.warp.singularities().to_vec();
    sing.extend_from_slice(m.rho.singularities());
    let p = Profile::from_raw("sigma'/sigma", dom, sing.clone(), move |r| match sig.eval(r) {
        Ok(s) => s.deriv() / s,
        Err(_) => Jet4::constant(f64::NAN),
    });
    let mq = m.clone();
    let q = Profile::from_raw("-k^2 (lam lam')'(rho)/sigma^2", dom, sing, move |r| {
        let rho = match mq.rho.eval(r) {
            Ok(j) => j,
            Err(_) => return Jet4::constant(f64::NAN),
        };
        let sigma = match mq.source.warp.eval(r) {
            Ok(j) => j,
            Err(_) => return Jet4::constant(f64::NAN),
        };
        let lam = match mq.target.warp.eval(rho.value()) {
            Ok(j) => j,
            Err(_) => return Jet4::constant(f64::NAN),
        };
        let llp = (lam * lam.deriv()).deriv(); // (lambda lambda')' as jet in rho
        let llp_r = Jet4::compose(llp, rho);
        -llp_r * (mq.k * mq.k) / (sigma * sigma)
    });
    LinearODE2::new(p, q, dom)
}

/// Substitute t = int dr/sigma: the system loses its first-derivative term,
/// becoming y_tt + sigma^2 q (r(t)) y = 0. Returns the transformed system
/// together with the coordinate change (basepoint = working midpoint).
pub fn to_t_coordinates(
    sys: &LinearODE2,
    m: &RotSymMap,
    working: Interval,
) -> Result<(LinearODE2, CoordChange)> {
    let sig = m.source.warp.clone();
    let deriv = Profile::from_raw(
        "1/sigma",
        sig.domain(),
        sig.singularities().to_vec(),
        move |r| match sig.eval(r) {
            Ok(s) => Jet4::constant(1.0) / s,
            Err(_) => Jet4::constant(f64::NAN),
        },
    );
    let change = CoordChange::new(deriv, working, working.midpoint())?;
    let q = sys.q.clone();
    let sig2 = m.source.warp.clone();
    let ch = change.clone();
    let qt = Profile::from_raw("sigma^2 q (r(t))", change.s_range, vec![], move |t| {
        let rj = match ch.inverse_jet(t) {
            Ok(j) => j,
            Err(_) => return Jet4::constant(f64::NAN),
        };
        let (qj, sj) = match (q.eval(rj.value()), sig2.eval(rj.value())) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Jet4::constant(f64::NAN),
        };
        Jet4::compose(qj * sj * sj, rj)
    });
    let p0 = Profile::constant(0.0, change.s_range).relabel("0");
    Ok((LinearODE2::new(p0, qt, change.s_range), change))
}

#[derive(Copy, Clone, Debug)]
struct Node {
    r: f64,
    y: f64,
    dy: f64,
}

/// Dense-output solution: accepted solver nodes plus Taylor reconstruction
/// between them using the ODE's own recurrence for higher coefficients.
pub struct OdeSolution {
    sys: LinearODE2,
    nodes: Vec<Node>,
    pub r0: f64,
    pub y0: f64,
    pub dy0: f64,
    covered: Interval,
}

const RTOL: f64 = 1e-12;
const ATOL: f64 = 1e-12;
const H_MAX: f64 = 0.02;

/// Integrate the initial value problem over `target` (which must contain
/// r0) with a Dormand-Prince 5(4) adaptive stepper.
pub fn solve_ivp(
    sys: &LinearODE2,
    r0: f64,
    y0: f64,
    dy0: f64,
    target: Interval,
) -> Result<OdeSolution> {
    if !(target.lo <= r0 && r0 <= target.hi) {
        return Err(Error::OutOfDomain {
            r: r0,
            lo: target.lo,
            hi: target.hi,
        });
    }
    let mut nodes = vec![Node { r: r0, y: y0, dy: dy0 }];
    if r0 < target.hi {
        integrate(sys, r0, y0, dy0, target.hi, &mut nodes)?;
    }
    if r0 > target.lo {
        integrate(sys, r0, y0, dy0, target.lo, &mut nodes)?;
    }
    nodes.sort_by(|a, b| a.r.total_cmp(&b.r));
    nodes.dedup_by(|a, b| a.r == b.r);
    Ok(OdeSolution {
        sys: sys.clone(),
        nodes,
        r0,
        y0,
        dy0,
        covered: target,
    })
}

fn rhs(sys: &LinearODE2, r: f64, y: f64, dy: f64) -> Result<(f64, f64)> {
    let p = sys.p.value(r)?;
    let q = sys.q.value(r)?;
    let a = -(p * dy + q * y);
    if a.is_finite() {
        Ok((dy, a))
    } else {
        Err(Error::StepFailure { r })
    }
}

fn integrate(
    sys: &LinearODE2,
    r0: f64,
    y0: f64,
    dy0: f64,
    end: f64,
    nodes: &mut Vec<Node>,
) -> Result<()> {
    // Dormand-Prince 5(4) tableau
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const E: [f64; 7] = [
        35.0 / 384.0 - 5179.0 / 57600.0,
        0.0,
        500.0 / 1113.0 - 7571.0 / 16695.0,
        125.0 / 192.0 - 393.0 / 640.0,
        -2187.0 / 6784.0 + 92097.0 / 339200.0,
        11.0 / 84.0 - 187.0 / 2100.0,
        -1.0 / 40.0,
    ];

    let dir = (end - r0).signum();
    let mut r = r0;
    let mut y = [y0, dy0];
    let mut h = (H_MAX * 0.5).min((end - r0).abs()) * dir;
    let mut k = [[0.0f64; 2]; 7];
    let f0 = rhs(sys, r, y[0], y[1])?;
    k[0] = [f0.0, f0.1];
    while (end - r) * dir > 1e-14 {
        if (r + h - end) * dir > 0.0 {
            h = end - r;
        }
        if h.abs() < 1e-14 {
            return Err(Error::StepFailure { r });
        }
        for i in 0..6 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i + 1) {
                yi[0] += h * A[i][j] * kj[0];
                yi[1] += h * A[i][j] * kj[1];
            }
            let f = rhs(sys, r + C[i] * h, yi[0], yi[1])?;
            k[i + 1] = [f.0, f.1];
        }
        let ynew = [
            y[0] + h * (0..6).map(|j| A[5][j] * k[j][0]).sum::<f64>(),
            y[1] + h * (0..6).map(|j| A[5][j] * k[j][1]).sum::<f64>(),
        ];
        let mut err: f64 = 0.0;
        for c in 0..2 {
            let e: f64 = h * (0..7).map(|j| E[j] * k[j][c]).sum::<f64>();
            let scale = ATOL + RTOL * y[c].abs().max(ynew[c].abs());
            err = err.max((e / scale).abs());
        }
        if err <= 1.0 {
            r += h;
            y = ynew;
            k[0] = k[6]; // FSAL
            nodes.push(Node { r, y: y[0], dy: y[1] });
        }
        let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        h = (h * fac).clamp(-H_MAX, H_MAX);
    }
    Ok(())
}

impl OdeSolution {
    /// Higher Taylor coefficients of y at `a` from the ODE recurrence
    /// (k+2)(k+1) c_{k+2} = -sum_j [ P_j (k-j+1) c_{k-j+1} + Q_j c_{k-j} ].
    fn taylor_coeffs(&self, a: f64, y: f64, dy: f64, order: usize) -> Result<Vec<f64>> {
        let pj = self.sys.p.eval(a)?;
        let qj = self.sys.q.eval(a)?;
        let mut c = vec![0.0; order + 1];
        c[0] = y;
        c[1] = dy;
        for k in 0..order - 1 {
            let mut s = 0.0;
            for j in 0..=k.min(4) {
                s += pj.c[j] * ((k - j + 1) as f64) * c[k - j + 1] + qj.c[j] * c[k - j];
            }
            c[k + 2] = -s / (((k + 2) * (k + 1)) as f64);
        }
        Ok(c)
    }

    /// Value and first derivative at r by Taylor stepping from the nearest
    /// accepted node.
    pub fn value_pair(&self, r: f64) -> Result<(f64, f64)> {
        if r < self.covered.lo - 1e-12 || r > self.covered.hi + 1e-12 {
            return Err(Error::OutOfDomain {
                r,
                lo: self.covered.lo,
                hi: self.covered.hi,
            });
        }
        let i = match self
            .nodes
            .binary_search_by(|n| n.r.total_cmp(&r))
        {
            Ok(i) => i,
            Err(i) => {
                if i == 0 {
                    0
                } else if i >= self.nodes.len() {
                    self.nodes.len() - 1
                } else if (self.nodes[i].r - r).abs() < (r - self.nodes[i - 1].r).abs() {
                    i
                } else {
                    i - 1
                }
            }
        };
        let n = self.nodes[i];
        let c = self.taylor_coeffs(n.r, n.y, n.dy, 6)?;
        let h = r - n.r;
        let mut y = 0.0;
        let mut dy = 0.0;
        for k in (0..c.len()).rev() {
            if k + 1 < c.len() {
                dy = dy * h + c[k + 1] * ((k + 1) as f64);
            }
            y = y * h + c[k];
        }
        Ok((y, dy))
    }

    /// Order-4 jet of the solution at r.
    pub fn eval(&self, r: f64) -> Result<Jet4> {
        let (y, dy) = self.value_pair(r)?;
        let c = self.taylor_coeffs(r, y, dy, 4)?;
        Ok(Jet4 {
            c: [c[0], c[1], c[2], c[3], c[4]],
        })
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        Ok(self.value_pair(r)?.0)
    }

    pub fn profile(self, label: &str) -> Profile {
        let covered = self.covered;
        Profile::from_raw(label, covered, vec![], move |r| {
            self.eval(r).unwrap_or(Jet4::constant(f64::NAN))
        })
    }
}

/// Zero of a profile located by sign change on a dense scan (None if no
/// sign change and no near-zero value).
pub fn first_zero(p: &Profile, working: Interval, floor: f64) -> Option<f64> {
    let n = 2048;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=n {
        let r = working.lo + working.length() * (i as f64) / (n as f64);
        let v = match p.value(r) {
            Ok(v) if v.is_finite() => v,
            _ => continue,
        };
        if v.abs() < floor {
            return Some(r);
        }
        if let Some((pr, pv)) = prev {
            if pv.signum() != v.signum() {
                let (mut a, mut b, mut fa) = (pr, r, pv);
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    match p.value(m) {
                        Ok(fm) if fm.is_finite() => {
                            if fa.signum() == fm.signum() {
                                a = m;
                                fa = fm;
                            } else {
                                b = m;
                            }
                        }
                        _ => break,
                    }
                }
                return Some(0.5 * (a + b));
            }
        }
        prev = Some((r, v));
    }
    None
}

/// Build f = C1 + C2 int x^{-2} sigma^{-1} dr from a biharmonic map whose
/// tension x does not vanish on the working interval. The resulting f
/// makes the map f-biharmonic (reduction of order applied to y = f x).
pub fn reduction_of_order_factor(
    m: &RotSymMap,
    c1: f64,
    c2: f64,
    working: Interval,
    basepoint: f64,
) -> Result<ConformalFactor> {
    let x = tension_profile(m);
    if let Some(r) = first_zero(&x, working, 1e-8) {
        return Err(Error::XVanishes { r });
    }
    // the construction is only valid on biharmonic inputs
    let mut sup = 0.0f64;
    let mut scale = 1.0f64;
    for i in 0..=64 {
        let r = working.lo + working.length() * (i as f64) / 64.0;
        if let Ok(b) = bitension_radial_excl(m, r, 0.0) {
            sup = sup.max(b.abs());
        }
        if let Ok(v) = x.value(r) {
            scale = scale.max(v.abs());
        }
    }
    if sup > 1e-6 * scale {
        return Err(Error::NonBiharmonicInput { sup });
    }
    let sig = m.source.warp.clone();
    let integrand = Profile::from_raw(
        "x^-2 sigma^-1",
        working,
        x.singularities().to_vec(),
        move |r| {
            let (xj, sj) = match (x.eval(r), sig.eval(r)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => return Jet4::constant(f64::NAN),
            };
            Jet4::constant(1.0) / (xj * xj * sj)
        },
    );
    let anti = antiderivative(&integrand, basepoint);
    let f = Profile::from_raw("C1 + C2 int x^-2 sigma^-1", working, vec![], move |r| {
        match anti.eval(r) {
            Ok(j) => j * c2 + c1,
            Err(_) => Jet4::constant(f64::NAN),
        }
    });
    Ok(ConformalFactor::with_scanned_chart(f, working))
}

/// Solution family of the Cauchy-Euler-reducible system with sigma = r,
/// lambda^2 = rho: rho = C1 + (C2-2C3) ln r + C3 ln(1+r^2)
/// + C4 ln r ln(1+r^2) - 2 C4 int ln(1+r^2)/r dr + (k^2/4) ln^2 r,
/// with the non-elementary integral realized as a quadrature
/// antiderivative based at r = 1.
pub fn cauchy_euler_rho(k: f64, c1: f64, c2: f64, c3: f64, c4: f64) -> Profile {
    let dom = Interval::of(1e-12, 1e9);
    let dilog = if c4 != 0.0 {
        let integrand = Profile::from_fn("ln(1+r^2)/r", dom, vec![], |r| (1.0 + r * r).ln() / r);
        Some(antiderivative(&integrand, 1.0))
    } else {
        None
    };
    Profile::from_raw("cauchy-euler rho", dom, vec![], move |r| {
        let rj = Jet4::variable(r);
        let lnr = rj.ln();
        let lnp = (rj * rj + 1.0).ln();
        let mut rho = lnr * (c2 - 2.0 * c3) + lnp * c3 + lnr * lnr * (k * k / 4.0) + c1;
        if let Some(d) = &dilog {
            let dj = match d.eval(r) {
                Ok(j) => j,
                Err(_) => return Jet4::constant(f64::NAN),
            };
            rho = rho + lnr * lnp * c4 - dj * 2.0 * c4;
        }
        rho
    })
}

/// Solution family on the sphere with lambda^2 = rho: a degree-7
/// polynomial in t = ln tan(r/2).
pub fn prop212_rho(k: f64, c1: f64, c2: f64, c3: f64, c4: f64) -> Profile {
    let dom = Interval::of(0.0, std::f64::consts::PI);
    let coeffs = [
        c4,
        c3,
        c1 / 2.0 + k * k / 4.0,
        c2 / 6.0,
        c1 / 6.0,
        c2 / 10.0,
        c1 / 30.0,
        c2 / 42.0,
    ];
    Profile::from_raw("log-tan polynomial rho", dom, vec![], move |r| {
        let t = (Jet4::variable(r) / 2.0).tan().ln();
        let mut acc = Jet4::constant(0.0);
        for &c in coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    })
}

/// Left-hand side of the Riccati-equivalent equation for beta = (1/2) ln f
/// along the double-wrap sphere map:
/// beta'' + (3 cot r - 2 tan r) beta' + 2 beta'^2 + 1 - 4 sin^2 r.
pub fn riccati_residual(beta: &Profile, r: f64) -> Result<f64> {
    let b = beta.eval(r)?;
    let rj = Jet4::variable(r);
    let coeff = rj.cot() * 3.0 - rj.tan() * 2.0;
    let v = b.d2() + coeff.value() * b.d1() + 2.0 * b.d1() * b.d1() + 1.0
        - 4.0 * r.sin() * r.sin();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::SingularPoint { r })
    }
}

/// Coefficients of the ansatz y(t) = e^{sqrt3 t} (1+e^{2t})^{-2}
/// (a0 + a1 e^{2t} + a2 e^{4t}), normalized with a2 = 1, solving the 3x3
/// homogeneous linear system the substitution produces.
pub fn kzt_ansatz_coeffs() -> (f64, f64, f64) {
    let s3 = 3.0f64.sqrt();
    // rows: 2(2-s3) a0 + (s3+1) a1 = 0
    //       2(2-s3) a0 + 2 a1 + 2(2+s3) a2 = 0
    //       (1-s3) a1 + 2(2+s3) a2 = 0
    // with a2 = 1: back-substitute rows 3 then 1
    let a2 = 1.0;
    let a1 = -2.0 * (2.0 + s3) / (1.0 - s3) * a2;
    let a0 = -(s3 + 1.0) / (2.0 * (2.0 - s3)) * a1;
    (a0, a1, a2)
}

/// Residuals of the three linear equations at (a0, a1, a2).
pub fn kzt_ansatz_residuals(a0: f64, a1: f64, a2: f64) -> [f64; 3] {
    let s3 = 3.0f64.sqrt();
    [
        2.0 * (2.0 - s3) * a0 + (s3 + 1.0) * a1,
        2.0 * (2.0 - s3) * a0 + 2.0 * a1 + 2.0 * (2.0 + s3) * a2,
        (1.0 - s3) * a1 + 2.0 * (2.0 + s3) * a2,
    ]
}

/// The particular solution y(t) built from the ansatz coefficients.
pub fn kzt_particular_y() -> Profile {
    let (a0, a1, a2) = kzt_ansatz_coeffs();
    let s3 = 3.0f64.sqrt();
    Profile::from_raw(
        "kzt particular solution",
        Interval::of(-50.0, 50.0),
        vec![],
        move |t| {
            let tj = Jet4::variable(t);
            let e2 = (tj * 2.0).exp();
            let num = (tj * s3).exp() * (e2 * e2 * a2 + e2 * a1 + a0);
            let den = (e2 + 1.0) * (e2 + 1.0);
            num / den
        },
    )
}

/// Residual of y'' - 3 (e^{4t} - 6 e^{2t} + 1)/(1+e^{2t})^2 y at t.
pub fn kzt_equation_residual(y: &Profile, t: f64) -> Result<f64> {
    let j = y.eval(t)?;
    let e2 = (2.0 * t).exp();
    let coeff = 3.0 * (e2 * e2 - 6.0 * e2 + 1.0) / ((1.0 + e2) * (1.0 + e2));
    Ok(j.d2() - coeff * j.value())
}

/// Amplitude u(t) = sqrt((1+e^{2t})/e^t) and phase v(t) from v' = sqrt3/u^2
/// (quadrature antiderivative based at t = 0) for the half-winding sphere
/// map's oscillatory solution y = u e^{iv}.
pub fn kztt_amplitude_phase() -> (Profile, Profile) {
    let dom = Interval::of(-40.0, 40.0);
    let u = Profile::from_raw("kztt amplitude", dom, vec![], |t| {
        let tj = Jet4::variable(t);
        (((tj * 2.0).exp() + 1.0) / tj.exp()).sqrt()
    });
    let s3 = 3.0f64.sqrt();
    let du = u.clone();
    let vprime = Profile::from_raw("sqrt3/u^2", dom, vec![], move |t| match du.eval(t) {
        Ok(j) => Jet4::constant(s3) / (j * j),
        Err(_) => Jet4::constant(f64::NAN),
    });
    let v = antiderivative(&vprime, 0.0).relabel("kztt phase");
    (u, v)
}
