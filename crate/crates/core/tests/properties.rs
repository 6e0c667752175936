//! Property-based invariants for the numeric plumbing.

use proptest::prelude::*;
use rotsym::jet::Jet4;
use rotsym::profile::{Interval, Profile};
use rotsym::quad::antiderivative;
use rotsym::report::Grid;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Antidifferentiation is linear: F[a p + b q] = a F[p] + b F[q].
    #[test]
    fn quadrature_linearity(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        x in 0.6f64..2.4,
    ) {
        let dom = Interval::of(0.5, 2.5);
        let p = Profile::from_fn("p", dom, vec![], |r| r.sin());
        let q = Profile::from_fn("q", dom, vec![], |r| (r * r + 1.0).ln());
        let combo = Profile::from_fn("a p + b q", dom, vec![], move |r| {
            r.sin() * a + (r * r + 1.0).ln() * b
        });
        let base = 1.5;
        let lhs = antiderivative(&combo, base).value(x).unwrap();
        let rhs = a * antiderivative(&p, base).value(x).unwrap()
            + b * antiderivative(&q, base).value(x).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9, "lhs {lhs} rhs {rhs}");
    }

    /// Jet derivatives of sin(a r + b) match the analytic closed form.
    #[test]
    fn jet_chain_rule_matches_closed_form(
        a in 0.2f64..3.0,
        b in -3.0f64..3.0,
        r in -2.0f64..2.0,
    ) {
        let j = (Jet4::variable(r) * a + b).sin();
        let expect = [
            (a * r + b).sin(),
            a * (a * r + b).cos(),
            -a * a * (a * r + b).sin(),
            -a * a * a * (a * r + b).cos(),
        ];
        let got = [j.value(), j.d1(), j.d2(), 6.0 * j.c[3]];
        for (g, e) in got.iter().zip(expect) {
            prop_assert!((g - e).abs() < 1e-10 * (1.0 + e.abs()), "{got:?}");
        }
    }

    /// Chebyshev grids stay strictly interior and sorted for any interval.
    #[test]
    fn chebyshev_grid_interior(lo in -5.0f64..5.0, len in 0.01f64..10.0, n in 2usize..64) {
        let iv = Interval::of(lo, lo + len);
        let g = Grid::chebyshev(&[iv], n);
        prop_assert_eq!(g.points.len(), n);
        prop_assert!(g.points.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(g.points.iter().all(|&p| p > iv.lo && p < iv.hi));
    }
}
