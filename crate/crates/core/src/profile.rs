//! Intervals and `Profile`, the scalar-function abstraction everything
//! else consumes. A profile evaluates to an order-4 jet at interior
//! points, carries its domain and declared singular points, and is
//! immutable and shareable across threads.

use crate::error::{Error, Result};
use crate::jet::Jet4;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Exclusion radius (coordinate units) around declared singularities.
pub const DEFAULT_EXCLUSION: f64 = 1e-2;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::BadInterval { lo, hi })
        }
    }

    /// Panicking constructor for literals known to be valid.
    pub fn of(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).expect("valid interval literal")
    }

    pub fn contains(&self, r: f64) -> bool {
        r > self.lo && r < self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// Interval shrunk by `m` at both ends.
    pub fn shrink(&self, m: f64) -> Result<Interval> {
        Interval::new(self.lo + m, self.hi - m)
    }
}

type EvalFn = dyn Fn(f64) -> Jet4 + Send + Sync;

struct Inner {
    label: String,
    domain: Interval,
    singularities: Vec<f64>,
    eval: Box<EvalFn>,
}

#[derive(Clone)]
pub struct Profile {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Profile")
            .field("label", &self.inner.label)
            .field("domain", &self.inner.domain)
            .field("singularities", &self.inner.singularities)
            .finish()
    }
}

impl Profile {
    /// Profile defined by jet arithmetic on the coordinate jet.
    pub fn from_fn<F>(label: &str, domain: Interval, singularities: Vec<f64>, f: F) -> Profile
    where
        F: Fn(Jet4) -> Jet4 + Send + Sync + 'static,
    {
        Profile::from_raw(label, domain, singularities, move |r| f(Jet4::variable(r)))
    }

    /// Profile defined by an arbitrary point-to-jet evaluator (used by
    /// quadrature antiderivatives and ODE dense output).
    pub fn from_raw<F>(label: &str, domain: Interval, singularities: Vec<f64>, f: F) -> Profile
    where
        F: Fn(f64) -> Jet4 + Send + Sync + 'static,
    {
        Profile {
            inner: Arc::new(Inner {
                label: label.to_string(),
                domain,
                singularities,
                eval: Box::new(f),
            }),
        }
    }

    pub fn constant(v: f64, domain: Interval) -> Profile {
        Profile::from_raw(&format!("const {v}"), domain, vec![], move |_| {
            Jet4::constant(v)
        })
    }

    pub fn identity(domain: Interval) -> Profile {
        Profile::from_raw("r", domain, vec![], Jet4::variable)
    }

    pub fn sine(domain: Interval) -> Profile {
        Profile::from_fn("sin r", domain, vec![], |r| r.sin())
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn domain(&self) -> Interval {
        self.inner.domain
    }

    pub fn singularities(&self) -> &[f64] {
        &self.inner.singularities
    }

    pub fn relabel(&self, label: &str) -> Profile {
        let src = self.clone();
        Profile::from_raw(
            label,
            self.domain(),
            self.singularities().to_vec(),
            move |r| (src.inner.eval)(r),
        )
    }

    /// Evaluate the jet at `r` with the default exclusion radius.
    pub fn eval(&self, r: f64) -> Result<Jet4> {
        self.eval_excl(r, DEFAULT_EXCLUSION)
    }

    /// Evaluate the jet at `r`, requiring distance > `excl` to every
    /// declared singularity.
    pub fn eval_excl(&self, r: f64, excl: f64) -> Result<Jet4> {
        let d = self.inner.domain;
        if !d.contains(r) {
            return Err(Error::OutOfDomain {
                r,
                lo: d.lo,
                hi: d.hi,
            });
        }
        for &s in &self.inner.singularities {
            if (r - s).abs() <= excl {
                return Err(Error::SingularPoint { r });
            }
        }
        let j = (self.inner.eval)(r);
        if j.is_finite() {
            Ok(j)
        } else {
            Err(Error::SingularPoint { r })
        }
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        Ok(self.eval_excl(r, 0.0)?.value())
    }

    /// Jet of `self(inner)` with respect to `inner`'s variable.
    pub fn compose_jet(&self, inner: Jet4, excl: f64) -> Result<Jet4> {
        let outer = self.eval_excl(inner.value(), excl)?;
        Ok(Jet4::compose(outer, inner))
    }
}

/// Central-difference cross-check of a profile's first derivative,
/// used by the jet/finite-difference consistency tests.
pub fn central_diff(p: &Profile, r: f64, h: f64) -> Result<f64> {
    let a = p.value(r + h)?;
    let b = p.value(r - h)?;
    Ok((a - b) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn interval_rejects_bad_bounds() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn out_of_domain_and_exclusion() {
        let p = Profile::from_fn("tan", Interval::of(0.0, PI), vec![PI / 2.0], |r| r.tan());
        assert!(matches!(p.eval(3.5), Err(Error::OutOfDomain { .. })));
        assert!(matches!(
            p.eval(PI / 2.0 + 0.005),
            Err(Error::SingularPoint { .. })
        ));
        assert!(p.eval(1.0).is_ok());
    }

    #[test]
    fn non_finite_jet_reports_singular() {
        let p = Profile::from_fn("ln", Interval::of(-1.0, 1.0), vec![], |r| r.ln());
        assert!(matches!(p.eval(-0.5), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn finite_difference_consistency() {
        let p = Profile::from_fn("ln tan(r/2)", Interval::of(0.0, PI), vec![], |r| {
            (r / 2.0).tan().ln()
        });
        let r = PI / 2.0;
        let j = p.eval(r).unwrap();
        assert!((j.value()).abs() < 1e-14);
        let fd = central_diff(&p, r, 1e-5).unwrap();
        assert!((j.d1() - fd).abs() <= 1e-5 * (1.0 + j.d1().abs()));
    }
}
