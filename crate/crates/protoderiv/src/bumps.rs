//! The piecewise-linear bump family `f_n` and its active-index window.
//!
//! For each `n >= 1` the function `f_n` vanishes outside `(2^-n-1, 2^-n+2)`,
//! rises with slope 2 on `[2^-n-1, 2^-n]`, holds the plateau value `2^-n` on
//! `[2^-n, 2^-n+1]`, and falls with slope -1/2 on `[2^-n+1, 2^-n+2]`.
//!
//! Every breakpoint is a power of two, and on each ramp the argument lies
//! within a factor of two of the breakpoint being subtracted, so by the
//! Sterbenz lemma each branch formula evaluates with **zero** floating-point
//! rounding. All branch decisions compare against exactly constructed powers
//! of two. That exactness is what the bit-level tests elsewhere in the crate
//! lean on.
//!
//! At a boundary shared by two branches the formulas agree by continuity; the
//! branch for smaller `t` is selected deterministically.

use crate::dyadic::{floor_log2, pow2};
use crate::error::Error;

/// Largest supported bump index. Beyond this the left breakpoint `2^-n-1`
/// leaves the range that `f64` can represent, so evaluations are rejected
/// rather than silently degraded.
pub const MAX_INDEX: u32 = 1070;

/// Which piece of `f_n` governs a given argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchKind {
    /// `t <= 2^-n-1`: identically zero.
    ZeroLeft,
    /// `2^-n-1 < t <= 2^-n`: slope 2.
    RampUp,
    /// `2^-n < t <= 2^-n+1`: constant `2^-n`.
    Plateau,
    /// `2^-n+1 < t < 2^-n+2`: slope -1/2.
    RampDown,
    /// `t >= 2^-n+2`: identically zero.
    ZeroRight,
}

/// One-sided probing direction for [`f_dd`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    /// Toward larger `t`.
    Pos,
    /// Toward smaller `t`.
    Neg,
}

impl Dir {
    /// The direction as a signed unit step.
    pub fn sign(self) -> f64 {
        match self {
            Dir::Pos => 1.0,
            Dir::Neg => -1.0,
        }
    }
}

fn check_index(n: u32) -> Result<(), Error> {
    if n < 1 || n > MAX_INDEX {
        return Err(Error::BumpIndexRange { n, max: MAX_INDEX });
    }
    Ok(())
}

/// The four strictly increasing dyadic breakpoints
/// `[2^-n-1, 2^-n, 2^-n+1, 2^-n+2]` of `f_n`, each exactly representable.
pub fn breakpoints(n: u32) -> Result<[f64; 4], Error> {
    check_index(n)?;
    let e = -(n as i32);
    Ok([pow2(e - 1), pow2(e), pow2(e + 1), pow2(e + 2)])
}

/// Branch of `f_n` at `t`, with the lower branch chosen at shared boundaries.
pub fn branch_at(n: u32, t: f64) -> Result<BranchKind, Error> {
    check_index(n)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::NegativeBumpArgument(t));
    }
    let [a, b, c, d] = breakpoints(n)?;
    Ok(if t <= a {
        BranchKind::ZeroLeft
    } else if t <= b {
        BranchKind::RampUp
    } else if t <= c {
        BranchKind::Plateau
    } else if t < d {
        BranchKind::RampDown
    } else {
        BranchKind::ZeroRight
    })
}

/// Internal branch evaluation; callers have already validated `n` and `t`.
#[inline]
pub(crate) fn value_unchecked(n: u32, t: f64) -> f64 {
    let e = -(n as i32);
    let a = pow2(e - 1);
    let d = pow2(e + 2);
    if t <= a || t >= d {
        return 0.0;
    }
    let b = pow2(e);
    if t <= b {
        // Sterbenz: a <= t <= 2a, so t - a is exact; doubling is exact.
        return 2.0 * (t - a);
    }
    let c = pow2(e + 1);
    if t <= c {
        return b; // plateau value 2^-n
    }
    // Sterbenz: d/2 <= t <= d, so d - t is exact; halving is exact.
    (d - t) * 0.5
}

/// Evaluates `f_n(t)` branch-exactly.
///
/// The result lies in `[0, 2^-n]` and carries no rounding at all: on the
/// ramps the subtraction is exact by the Sterbenz lemma and the slope factors
/// are powers of two.
pub fn f(n: u32, t: f64) -> Result<f64, Error> {
    check_index(n)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::NegativeBumpArgument(t));
    }
    Ok(value_unchecked(n, t))
}

/// One-sided directional derivative of `f_n` at `t`:
/// `lim (f(n, t + tau*dir) - f(n, t)) / tau` as `tau` decreases to 0.
///
/// At a breakpoint the branch on the probed side governs. The result is
/// always one of `{0, 2, -2, 1/2, -1/2}`.
pub fn f_dd(n: u32, t: f64, dir: Dir) -> Result<f64, Error> {
    check_index(n)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::NonPositiveArgument(t));
    }
    let [a, b, c, d] = breakpoints(n)?;
    let slope = match dir {
        // Branch governing [t, t + delta).
        Dir::Pos => {
            if t < a || t >= d {
                0.0
            } else if t < b {
                2.0
            } else if t < c {
                0.0
            } else {
                -0.5
            }
        }
        // Branch governing (t - delta, t].
        Dir::Neg => {
            if t <= a || t > d {
                0.0
            } else if t <= b {
                2.0
            } else if t <= c {
                0.0
            } else {
                -0.5
            }
        }
    };
    Ok(if slope == 0.0 { 0.0 } else { slope * dir.sign() })
}

/// Indices whose bump can be nonzero at `t`: the window
/// `{n >= 1 : 2^-n-1 <= t < 2^-n+2}`, ascending, length <= 3.
///
/// Computed from the binary exponent of `t`, never by scanning: with
/// `e = floor(log2 t)` the window is `{-e-1, -e, -e+1}` clamped to `[1, ..]`.
/// When `t` is an exact power of two the smallest returned index sits at the
/// closed left endpoint of its bump and evaluates to exactly zero there;
/// every other point of the window carries a nonzero value. Rejects `t` so
/// small that the window would leave the supported index range.
pub fn active_indices(t: f64) -> Result<Vec<u32>, Error> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::NonPositiveArgument(t));
    }
    let e = floor_log2(t);
    let lo = -e - 1;
    let hi = -e + 1;
    if hi < 1 {
        return Ok(Vec::new());
    }
    if hi > MAX_INDEX as i32 {
        return Err(Error::ArgumentUnderflow(t));
    }
    Ok((lo.max(1)..=hi).map(|n| n as u32).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::pow2;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn breakpoints_increase_and_values_connect() {
        for n in [1u32, 2, 3, 10, 53, 500, MAX_INDEX] {
            let [a, b, c, d] = breakpoints(n).unwrap();
            assert!(a < b && b < c && c < d, "n = {n}");
            // Continuity at shared breakpoints.
            assert_eq!(2.0 * (b - a), pow2(-(n as i32)), "ramp-up top, n = {n}");
            assert_eq!((d - c) * 0.5, pow2(-(n as i32)), "ramp-down top, n = {n}");
            assert_eq!(f(n, a).unwrap(), 0.0);
            assert_eq!(f(n, b).unwrap(), pow2(-(n as i32)));
            assert_eq!(f(n, c).unwrap(), pow2(-(n as i32)));
            assert_eq!(f(n, d).unwrap(), 0.0);
        }
    }

    #[test]
    fn plateau_example_n1() {
        assert_eq!(f(1, 0.5).unwrap(), 0.5);
    }

    #[test]
    fn zero_at_origin_for_all_n() {
        for n in [1, 2, 3, 17, MAX_INDEX] {
            assert_eq!(f(n, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn plateau_example_n2() {
        assert_eq!(f(2, 0.375).unwrap(), 0.25);
    }

    #[test]
    fn ramp_values_are_branch_exact() {
        // f_1 on its ramp up: 2(t - 1/4).
        assert_eq!(f(1, 0.3125).unwrap(), 0.125);
        assert_eq!(f(1, 0.4375).unwrap(), 0.375);
        // Non-dyadic argument: the branch expression itself is the oracle.
        assert_eq!(f(1, 0.3).unwrap(), 2.0 * (0.3 - 0.25));
        // f_3 on its ramp down at the same argument: (1/2)(1/2 - t).
        assert_eq!(f(3, 0.3).unwrap(), 0.5 * (0.5 - 0.3));
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        assert!(matches!(f(0, 0.5), Err(Error::BumpIndexRange { .. })));
        assert!(matches!(
            f(MAX_INDEX + 1, 0.5),
            Err(Error::BumpIndexRange { .. })
        ));
        assert!(matches!(f(1, -0.1), Err(Error::NegativeBumpArgument(_))));
        assert!(matches!(f(1, f64::NAN), Err(Error::NegativeBumpArgument(_))));
        assert!(matches!(f_dd(1, 0.0, Dir::Pos), Err(Error::NonPositiveArgument(_))));
        assert!(matches!(active_indices(0.0), Err(Error::NonPositiveArgument(_))));
        assert!(matches!(active_indices(-1.0), Err(Error::NonPositiveArgument(_))));
    }

    #[test]
    fn deepest_supported_index_still_evaluates() {
        let [a, b, _, _] = breakpoints(MAX_INDEX).unwrap();
        assert!(a > 0.0);
        assert_eq!(f(MAX_INDEX, b).unwrap(), b);
    }

    #[test]
    fn one_sided_derivative_examples() {
        assert_eq!(f_dd(2, 0.1875, Dir::Pos).unwrap(), 2.0);
        assert_eq!(f_dd(1, 1.5, Dir::Pos).unwrap(), -0.5);
        assert_eq!(f_dd(1, 0.5, Dir::Neg).unwrap(), -2.0);
    }

    #[test]
    fn one_sided_derivative_at_breakpoints() {
        let [a, b, c, d] = breakpoints(2).unwrap();
        assert_eq!(f_dd(2, a, Dir::Pos).unwrap(), 2.0);
        assert_eq!(f_dd(2, a, Dir::Neg).unwrap(), 0.0);
        assert_eq!(f_dd(2, b, Dir::Pos).unwrap(), 0.0);
        assert_eq!(f_dd(2, b, Dir::Neg).unwrap(), -2.0);
        assert_eq!(f_dd(2, c, Dir::Pos).unwrap(), -0.5);
        assert_eq!(f_dd(2, c, Dir::Neg).unwrap(), 0.0);
        assert_eq!(f_dd(2, d, Dir::Pos).unwrap(), 0.0);
        assert_eq!(f_dd(2, d, Dir::Neg).unwrap(), 0.5);
    }

    #[test]
    fn active_window_at_powers_of_two() {
        assert_eq!(active_indices(0.125).unwrap(), vec![2, 3, 4]);
        assert_eq!(active_indices(0.25).unwrap(), vec![1, 2, 3]);
        assert_eq!(active_indices(0.5).unwrap(), vec![1, 2]);
        assert_eq!(active_indices(1.0).unwrap(), vec![1]);
        // The smallest window index sits at its bump's closed left endpoint
        // and evaluates to zero; the others are nonzero.
        assert_eq!(f(2, 0.125).unwrap(), 0.0);
        assert_eq!(f(3, 0.125).unwrap(), 0.125);
        assert_eq!(f(4, 0.125).unwrap(), 0.0625);
    }

    #[test]
    fn active_window_examples() {
        assert_eq!(active_indices(3.0).unwrap(), Vec::<u32>::new());
        assert_eq!(active_indices(2.0).unwrap(), Vec::<u32>::new());
        assert_eq!(active_indices(0.3).unwrap(), vec![1, 2, 3]);
        assert_eq!(active_indices(1.9).unwrap(), vec![1]);
    }

    #[test]
    fn active_window_underflow_is_rejected() {
        assert!(matches!(
            active_indices(pow2(-1070)),
            Err(Error::ArgumentUnderflow(_))
        ));
        // Just inside the supported range.
        let w = active_indices(pow2(-1069)).unwrap();
        assert_eq!(w, vec![1068, 1069, 1070]);
    }

    #[test]
    fn branch_selection_is_lower_at_boundaries() {
        let [a, b, c, d] = breakpoints(3).unwrap();
        assert_eq!(branch_at(3, a).unwrap(), BranchKind::ZeroLeft);
        assert_eq!(branch_at(3, b).unwrap(), BranchKind::RampUp);
        assert_eq!(branch_at(3, c).unwrap(), BranchKind::Plateau);
        assert_eq!(branch_at(3, d).unwrap(), BranchKind::ZeroRight);
        assert_eq!(branch_at(3, (b + c) * 0.5).unwrap(), BranchKind::Plateau);
        assert_eq!(branch_at(3, (c + d) * 0.5).unwrap(), BranchKind::RampDown);
    }

    #[test]
    fn lipschitz_bound_on_random_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..100_000 {
            // Log-uniform arguments across the interesting scales.
            let t = pow2(rng.gen_range(-12..2)) * rng.gen_range(1.0..2.0);
            let s = pow2(rng.gen_range(-12..2)) * rng.gen_range(1.0..2.0);
            let mut window: Vec<u32> = active_indices(t).unwrap();
            window.extend(active_indices(s).unwrap());
            for n in window {
                let df = (f(n, t).unwrap() - f(n, s).unwrap()).abs();
                let dt = (t - s).abs();
                assert!(
                    df <= 2.0 * dt * (1.0 + 1e-14),
                    "trial {trial}: |f({n},{t}) - f({n},{s})| = {df} > 2*{dt}"
                );
            }
        }
    }

    #[test]
    fn envelope_lower_bound_on_unit_interval() {
        let check = |t: f64| {
            let best = active_indices(t)
                .unwrap()
                .into_iter()
                .map(|n| f(n, t).unwrap())
                .fold(0.0f64, f64::max);
            assert!(
                best >= t / 2.0,
                "envelope below t/2 at t = {t}: max bump {best}"
            );
        };
        // Dyadic grid over (0, 1].
        for j in 0..=10 {
            for k in 1..=(1 << 10) >> j {
                check(k as f64 * pow2(-10 + j));
            }
        }
        // Random points.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            check(rng.gen_range(f64::MIN_POSITIVE..=1.0f64.next_down()).max(1e-12));
        }
        check(1.0);
    }

    #[test]
    fn one_sided_quotients_match_f_dd_exactly_below_breakpoint_distance() {
        // Dyadic base points with coarse grain so t + 2^-k is exact.
        let cases = [
            (1u32, 0.3125, Dir::Pos),
            (1, 0.3125, Dir::Neg),
            (2, 0.375, Dir::Pos),
            (2, 0.375, Dir::Neg),
            (2, 0.25, Dir::Pos),
            (2, 0.25, Dir::Neg),
            (1, 1.5, Dir::Pos),
            (1, 1.5, Dir::Neg),
            (3, 0.25, Dir::Pos),
            (3, 0.25, Dir::Neg),
        ];
        for (n, t, dir) in cases {
            let dd = f_dd(n, t, dir).unwrap();
            let dist = breakpoints(n)
                .unwrap()
                .iter()
                .map(|bp| (bp - t).abs())
                .filter(|d| *d > 0.0)
                .fold(f64::INFINITY, f64::min);
            for k in 10..=30 {
                let tau = pow2(-k);
                if tau >= dist {
                    continue;
                }
                let q = (f(n, t + tau * dir.sign()).unwrap() - f(n, t).unwrap()) / tau;
                assert_eq!(q, dd, "n={n} t={t} dir={dir:?} k={k}");
            }
        }
    }

    #[test]
    fn one_sided_quotients_converge_at_generic_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1_000 {
            let n = rng.gen_range(1..=4u32);
            let [a, _, _, d] = breakpoints(n).unwrap();
            let t = rng.gen_range(a * 0.5..d * 1.25);
            if t <= 0.0 {
                continue;
            }
            for dir in [Dir::Pos, Dir::Neg] {
                let dd = f_dd(n, t, dir).unwrap();
                let tau = pow2(-35);
                let q = (f(n, t + tau * dir.sign()).unwrap() - f(n, t).unwrap()) / tau;
                // Breakpoint crossings within tau of t spoil the quotient;
                // skip those slivers.
                let dist = breakpoints(n)
                    .unwrap()
                    .iter()
                    .map(|bp| (bp - t).abs())
                    .fold(f64::INFINITY, f64::min);
                if dist > tau {
                    assert!(
                        (q - dd).abs() <= 1e-6,
                        "n={n} t={t} dir={dir:?}: quotient {q} vs one-sided {dd}"
                    );
                }
            }
        }
    }

    proptest! {
        /// Support characterization away from boundary arguments: inside the
        /// window values are nonzero (except the closed left endpoint at exact
        /// powers of two), outside they vanish.
        #[test]
        fn support_matches_window(e in -10i32..1, frac in 0.0f64..1.0) {
            let t = pow2(e) * (1.0 + frac);
            prop_assume!(t.is_finite() && t > 0.0);
            let window = active_indices(t).unwrap();
            let is_power = t == pow2(floor_log2(t));
            for n in 1..=((-e + 3).max(1) as u32) {
                let v = f(n, t).unwrap();
                let in_window = window.contains(&n);
                if in_window {
                    let at_closed_left = is_power && Some(&n) == window.first();
                    if at_closed_left {
                        prop_assert_eq!(v, 0.0);
                    } else {
                        prop_assert!(v > 0.0, "f({}, {}) = 0 inside window", n, t);
                    }
                } else {
                    prop_assert_eq!(v, 0.0);
                }
            }
        }

        /// The window never holds more than three indices.
        #[test]
        fn window_length_is_at_most_three(e in -900i32..900, frac in 0.0f64..1.0) {
            let t = pow2(e) * (1.0 + frac);
            prop_assume!(t.is_finite() && t > 0.0);
            if let Ok(w) = active_indices(t) {
                prop_assert!(w.len() <= 3);
                prop_assert!(w.windows(2).all(|p| p[0] < p[1]));
            }
        }
    }
}
