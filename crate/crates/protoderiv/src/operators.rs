//! The bump-sum operator, its monotone perturbation family, a catalog of
//! comparison operators, and sampling-based certification of the operator
//! norms.
//!
//! The central map sums the bump family against the canonical basis,
//! `T(x) = sum_n f_n(||x||) e_n`, which touches at most three coordinates for
//! any input. Around it sit:
//!
//! * `B = Id + alpha*T` for `|alpha| <= 2/sqrt(17)`, which stays monotone;
//! * the graph rescalings `B_m(x) = m * B(x/m)`, represented by
//!   [`OperatorSpec::BScaled`] (a difference-quotient family in disguise:
//!   `m = 1/tau` gives the quotient operator at scale `tau`);
//! * simple comparison operators (scalar linear, the absolute-value
//!   subgradient on coordinate 1, the half-line normal cone on coordinate 1)
//!   whose resolvents have closed forms.
//!
//! Everything here is pure and immutable; all randomness is seeded and lives
//! in the certification helpers.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bumps;
use crate::error::Error;
use crate::sampling;
use crate::seqspace::SparseVec;

/// Largest admissible perturbation strength, `2/sqrt(17)`.
pub fn alpha_max() -> f64 {
    2.0 / f64::sqrt(17.0)
}

/// Global Lipschitz constant of the bump-sum operator, `sqrt(17)/2`.
///
/// Attained by radial pairs inside a ramp region: the worst slope vector
/// stacks the ramp-up slope 2 against the ramp-down slope 1/2 across two
/// coordinates, giving `sqrt(2^2 + (1/2)^2)`.
pub fn lipschitz_constant() -> f64 {
    f64::sqrt(17.0) / 2.0
}

/// Catalog entry describing one operator.
///
/// Construct through the validating constructors (or deserialize; the same
/// validation runs). Consumers revalidate on entry, so a hand-built invalid
/// value is rejected at first use rather than silently accepted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", try_from = "RawOperatorSpec")]
pub enum OperatorSpec {
    /// The bump-sum operator itself.
    CounterT,
    /// `Id + alpha * T`.
    BAlpha { alpha: f64 },
    /// `x + alpha * m * T(x/m)`, the graph rescaling of `BAlpha`.
    BScaled { alpha: f64, m: f64 },
    /// `x -> lambda * x`.
    LinearScalar { lambda: f64 },
    /// Subgradient of the absolute value on coordinate 1 (set-valued at 0);
    /// zero on all other coordinates.
    SoftThreshGen,
    /// Normal cone to the half-line `[0, inf)` on coordinate 1 (set-valued
    /// at 0); zero on all other coordinates.
    HalfLineNormalCone,
}

/// Mirror used during deserialization so invalid parameters are rejected at
/// parse time through the same constructors.
#[derive(Deserialize)]
#[serde(tag = "tag")]
enum RawOperatorSpec {
    CounterT,
    BAlpha { alpha: f64 },
    BScaled { alpha: f64, m: f64 },
    LinearScalar { lambda: f64 },
    SoftThreshGen,
    HalfLineNormalCone,
}

impl TryFrom<RawOperatorSpec> for OperatorSpec {
    type Error = Error;

    fn try_from(raw: RawOperatorSpec) -> Result<Self, Error> {
        match raw {
            RawOperatorSpec::CounterT => Ok(OperatorSpec::CounterT),
            RawOperatorSpec::BAlpha { alpha } => OperatorSpec::b_alpha(alpha),
            RawOperatorSpec::BScaled { alpha, m } => OperatorSpec::b_scaled(alpha, m),
            RawOperatorSpec::LinearScalar { lambda } => OperatorSpec::linear_scalar(lambda),
            RawOperatorSpec::SoftThreshGen => Ok(OperatorSpec::SoftThreshGen),
            RawOperatorSpec::HalfLineNormalCone => Ok(OperatorSpec::HalfLineNormalCone),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<(), Error> {
    if !alpha.is_finite() || alpha.abs() > alpha_max() {
        return Err(Error::AlphaOutOfRange(alpha.abs()));
    }
    Ok(())
}

impl OperatorSpec {
    /// `Id + alpha * T`; requires `|alpha| <= 2/sqrt(17)`.
    pub fn b_alpha(alpha: f64) -> Result<Self, Error> {
        check_alpha(alpha)?;
        Ok(OperatorSpec::BAlpha { alpha })
    }

    /// `x + alpha * m * T(x/m)`; requires `|alpha| <= 2/sqrt(17)` and `m > 0`.
    pub fn b_scaled(alpha: f64, m: f64) -> Result<Self, Error> {
        check_alpha(alpha)?;
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::NonPositiveScale(m));
        }
        Ok(OperatorSpec::BScaled { alpha, m })
    }

    /// `x -> lambda * x`; requires `lambda >= 0` (monotonicity).
    pub fn linear_scalar(lambda: f64) -> Result<Self, Error> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::NegativeLambda(lambda));
        }
        Ok(OperatorSpec::LinearScalar { lambda })
    }

    /// Re-checks the parameter invariants.
    pub fn validate(&self) -> Result<(), Error> {
        match *self {
            OperatorSpec::BAlpha { alpha } => check_alpha(alpha),
            OperatorSpec::BScaled { alpha, m } => {
                check_alpha(alpha)?;
                if !(m > 0.0) || !m.is_finite() {
                    return Err(Error::NonPositiveScale(m));
                }
                Ok(())
            }
            OperatorSpec::LinearScalar { lambda } => {
                if !(lambda >= 0.0) || !lambda.is_finite() {
                    return Err(Error::NegativeLambda(lambda));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Whether pointwise evaluation is defined everywhere.
    pub fn is_single_valued(&self) -> bool {
        !matches!(
            self,
            OperatorSpec::SoftThreshGen | OperatorSpec::HalfLineNormalCone
        )
    }

    /// Whether the resolvent has a closed form (as opposed to the contraction
    /// iteration used for the bump families).
    pub fn has_closed_form_resolvent(&self) -> bool {
        matches!(
            self,
            OperatorSpec::LinearScalar { .. }
                | OperatorSpec::SoftThreshGen
                | OperatorSpec::HalfLineNormalCone
        )
    }

    /// Short stable name for error messages and report rows.
    pub fn name(&self) -> &'static str {
        match self {
            OperatorSpec::CounterT => "CounterT",
            OperatorSpec::BAlpha { .. } => "BAlpha",
            OperatorSpec::BScaled { .. } => "BScaled",
            OperatorSpec::LinearScalar { .. } => "LinearScalar",
            OperatorSpec::SoftThreshGen => "SoftThreshGen",
            OperatorSpec::HalfLineNormalCone => "HalfLineNormalCone",
        }
    }
}

/// A point `(x, y)` on an operator graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphPoint {
    pub x: SparseVec,
    pub y: SparseVec,
}

/// Evaluates the bump-sum operator `T(x) = sum_n f_n(||x||) e_n`.
///
/// All dependence on `x` goes through the computed norm; the support of the
/// result lies in the active window of that norm (at most three indices).
/// The zero vector maps to the zero vector.
pub fn eval_t(x: &SparseVec) -> SparseVec {
    let t = x.norm();
    if t == 0.0 {
        return SparseVec::zero();
    }
    // A nonzero computed norm is at least ~2^-538, far above the window
    // underflow threshold, so this cannot fail.
    let window = bumps::active_indices(t).expect("nonzero norm stays within the bump range");
    let entries = window.into_iter().filter_map(|n| {
        let v = bumps::value_unchecked(n, t);
        (v != 0.0).then_some((n, v))
    });
    SparseVec::from_entries(entries).expect("bump values are finite and indices distinct")
}

/// Evaluates a single-valued catalog operator at `x`.
///
/// Set-valued entries are rejected; their graphs are reachable only through
/// the resolvent machinery.
pub fn eval(spec: &OperatorSpec, x: &SparseVec) -> Result<SparseVec, Error> {
    spec.validate()?;
    match *spec {
        OperatorSpec::CounterT => Ok(eval_t(x)),
        OperatorSpec::BAlpha { alpha } => Ok(SparseVec::axpy(alpha, &eval_t(x), x)),
        OperatorSpec::BScaled { alpha, m } => {
            let inner = x.scale(1.0 / m);
            Ok(SparseVec::axpy(alpha * m, &eval_t(&inner), x))
        }
        OperatorSpec::LinearScalar { lambda } => Ok(x.scale(lambda)),
        OperatorSpec::SoftThreshGen => Err(Error::SetValuedEval("SoftThreshGen")),
        OperatorSpec::HalfLineNormalCone => Err(Error::SetValuedEval("HalfLineNormalCone")),
    }
}

/// `||F(x) - F(y)|| / ||x - y||` for a single-valued spec; rejects `x == y`.
pub fn lipschitz_quotient(
    spec: &OperatorSpec,
    x: &SparseVec,
    y: &SparseVec,
) -> Result<f64, Error> {
    if x == y {
        return Err(Error::IdenticalPoints);
    }
    let num = eval(spec, x)?.sub(&eval(spec, y)?).norm();
    Ok(num / x.sub(y).norm())
}

/// `<F(x) - F(y), x - y>` for a single-valued spec.
///
/// For the perturbation family with admissible strength this is bounded below
/// by `(1 - |alpha| sqrt(17)/2) ||x - y||^2 >= 0`.
pub fn monotonicity_gap(
    spec: &OperatorSpec,
    x: &SparseVec,
    y: &SparseVec,
) -> Result<f64, Error> {
    let d = x.sub(y);
    Ok(eval(spec, x)?.sub(&eval(spec, y)?).inner(&d))
}

/// The radial pair `(5/16 e1, 7/16 e1)` that attains the global Lipschitz
/// constant of the bump-sum operator exactly: both norms sit inside
/// `(1/4, 1/2)` where bump 1 ramps up with slope 2 and bump 3 ramps down with
/// slope 1/2, and every quantity involved is dyadic.
pub fn saturating_pair() -> (SparseVec, SparseVec) {
    (
        SparseVec::basis(1, 5.0 / 16.0).expect("valid basis vector"),
        SparseVec::basis(1, 7.0 / 16.0).expect("valid basis vector"),
    )
}

/// Result of the sampled Lipschitz certification of the bump-sum operator.
#[derive(Clone, Debug)]
pub struct LipschitzReport {
    /// Number of sampled pairs.
    pub pairs: usize,
    /// Largest observed difference quotient.
    pub max_quotient: f64,
    /// Quotient of the constructed saturating radial pair.
    pub saturating_quotient: f64,
}

/// Samples `pairs` random sparse pairs (independent, nearby, and radial
/// families) and records the largest Lipschitz quotient of the bump-sum
/// operator, together with the quotient of the exact saturating pair.
pub fn certify_lipschitz(pairs: usize, seed: u64) -> LipschitzReport {
    let mut rng = sampling::rng(seed);
    let mut max_quotient = 0.0f64;
    for i in 0..pairs {
        let (x, y) = lipschitz_probe_pair(&mut rng, i);
        if x == y {
            continue;
        }
        let q = lipschitz_quotient(&OperatorSpec::CounterT, &x, &y)
            .expect("distinct points, single-valued spec");
        max_quotient = max_quotient.max(q);
    }
    let (sx, sy) = saturating_pair();
    let saturating_quotient = lipschitz_quotient(&OperatorSpec::CounterT, &sx, &sy)
        .expect("saturating pair is distinct");
    LipschitzReport {
        pairs,
        max_quotient,
        saturating_quotient,
    }
}

/// Pair sampler cycling through three stress families: independent points,
/// small radial perturbations (probing local slopes), and radial rescalings
/// (probing the ramp stack that saturates the constant).
fn lipschitz_probe_pair(rng: &mut ChaCha8Rng, i: usize) -> (SparseVec, SparseVec) {
    let x = sampling::sparse_in_shell(rng, 8, 32, -12, 2);
    let y = match i % 3 {
        0 => sampling::sparse_in_shell(rng, 8, 32, -12, 2),
        1 => {
            let delta_scale = x.norm() * crate::dyadic::pow2(-rng.gen_range(0..20));
            let delta = sampling::sparse_in_shell(rng, 4, 32, 0, 1).scale(delta_scale);
            x.add(&delta)
        }
        _ => x.scale(rng.gen_range(0.25..4.0)),
    };
    (x, y)
}

/// Result of the sampled lower-bound certification `||T(x)|| >= ||x||/2`.
#[derive(Clone, Debug)]
pub struct LowerBoundReport {
    /// Number of sampled points.
    pub samples: usize,
    /// Smallest observed `||T(x)|| / (||x||/2)` over the unit ball.
    pub min_ratio: f64,
}

/// Samples nonzero points of the closed unit ball and records the smallest
/// ratio `||T(x)|| / (||x||/2)`.
pub fn certify_lower_bound(samples: usize, seed: u64) -> LowerBoundReport {
    let mut rng = sampling::rng(seed.wrapping_add(1));
    let mut min_ratio = f64::INFINITY;
    let mut done = 0;
    while done < samples {
        let x = sampling::sparse_in_shell(&mut rng, 8, 32, -12, 0);
        let t = x.norm();
        if t == 0.0 || t > 1.0 {
            continue;
        }
        let ratio = eval_t(&x).norm() / (t / 2.0);
        min_ratio = min_ratio.min(ratio);
        done += 1;
    }
    LowerBoundReport {
        samples,
        min_ratio,
    }
}

/// Result of the sampled monotonicity certification for one `alpha`.
#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    pub alpha: f64,
    /// Number of sampled pairs.
    pub pairs: usize,
    /// `1 - |alpha| sqrt(17)/2`, the guaranteed gap factor.
    pub bound_factor: f64,
    /// Smallest observed `gap - bound_factor * ||x - y||^2`.
    pub min_slack: f64,
}

/// Samples random pairs and records the worst slack of
/// `<B(x) - B(y), x - y> >= (1 - |alpha| sqrt(17)/2) ||x - y||^2`.
pub fn certify_monotonicity(
    alpha: f64,
    pairs: usize,
    seed: u64,
) -> Result<MonotonicityReport, Error> {
    let spec = if alpha == 0.0 {
        OperatorSpec::b_alpha(0.0)?
    } else {
        OperatorSpec::b_alpha(alpha)?
    };
    let bound_factor = 1.0 - alpha.abs() * f64::sqrt(17.0) / 2.0;
    let mut rng = sampling::rng(seed.wrapping_add(2));
    let mut min_slack = f64::INFINITY;
    for i in 0..pairs {
        let (x, y) = lipschitz_probe_pair(&mut rng, i);
        let gap = monotonicity_gap(&spec, &x, &y)?;
        let d2 = x.sub(&y).norm_sq();
        min_slack = min_slack.min(gap - bound_factor * d2);
    }
    Ok(MonotonicityReport {
        alpha,
        pairs,
        bound_factor,
        min_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{pow2, ulp_distance};

    fn sv(entries: &[(u32, f64)]) -> SparseVec {
        SparseVec::from_entries(entries.iter().copied()).unwrap()
    }

    #[test]
    fn bump_sum_of_zero_is_zero() {
        assert!(eval_t(&SparseVec::zero()).is_zero());
    }

    #[test]
    fn bump_sum_at_quarter_norm_is_exact() {
        // ||x|| = 1/4: bump 2 plateau start, bump 3 plateau end, bump 1
        // vanishes at its ramp start, so the canonical result has 2 entries.
        let x = sv(&[(1, 0.25)]);
        assert_eq!(eval_t(&x), sv(&[(2, 0.25), (3, 0.125)]));
    }

    #[test]
    fn bump_sum_depends_on_argument_only_through_norm() {
        // Branch-expression oracle at t = 0.3 (carried by a far-away
        // coordinate): ramp-up of bump 1, plateau of bump 2, ramp-down of
        // bump 3.
        let x = sv(&[(5, 0.3)]);
        let expected = sv(&[(1, 2.0 * (0.3 - 0.25)), (2, 0.25), (3, 0.5 * (0.5 - 0.3))]);
        assert_eq!(eval_t(&x), expected);
    }

    #[test]
    fn bump_sum_is_identical_under_support_relabeling() {
        // Relabeling indices while keeping the coefficient sequence preserves
        // the computed norm bit for bit, hence the output.
        let a = sv(&[(1, 0.11), (4, -0.07), (9, 0.05)]);
        let b = sv(&[(2, 0.11), (30, -0.07), (500, 0.05)]);
        assert_eq!(a.norm(), b.norm());
        assert_eq!(eval_t(&a), eval_t(&b));
    }

    #[test]
    fn bump_sum_support_is_at_most_three() {
        let mut rng = sampling::rng(3);
        for _ in 0..2_000 {
            let x = sampling::sparse_in_shell(&mut rng, 8, 40, -20, 3);
            assert!(eval_t(&x).support_len() <= 3, "x = {x}");
        }
    }

    #[test]
    fn eval_of_b_at_zero_is_zero() {
        let spec = OperatorSpec::b_alpha(alpha_max()).unwrap();
        assert!(eval(&spec, &SparseVec::zero()).unwrap().is_zero());
    }

    #[test]
    fn eval_b_alpha_quarter_example() {
        let spec = OperatorSpec::b_alpha(0.25).unwrap();
        let x = sv(&[(1, 0.25)]);
        let expected = sv(&[(1, 0.25), (2, 0.0625), (3, 0.03125)]);
        assert_eq!(eval(&spec, &x).unwrap(), expected);
    }

    #[test]
    fn scaled_family_with_unit_scale_matches_base_family() {
        let a = OperatorSpec::b_alpha(0.3).unwrap();
        let s = OperatorSpec::b_scaled(0.3, 1.0).unwrap();
        let mut rng = sampling::rng(5);
        for _ in 0..500 {
            let x = sampling::sparse_in_shell(&mut rng, 6, 20, -8, 2);
            assert_eq!(eval(&a, &x).unwrap(), eval(&s, &x).unwrap());
        }
    }

    #[test]
    fn scaling_identity_is_bitwise_on_power_of_two_scales() {
        let alpha = alpha_max();
        let mut rng = sampling::rng(6);
        for k in [1i32, 2, 3, 5, 10, 20, 30] {
            let m = pow2(k);
            let scaled = OperatorSpec::b_scaled(alpha, m).unwrap();
            let base = OperatorSpec::b_alpha(alpha).unwrap();
            for _ in 0..200 {
                let x = sampling::sparse_in_shell(&mut rng, 6, 20, -6, 4);
                let lhs = eval(&scaled, &x).unwrap();
                let rhs = eval(&base, &x.scale(1.0 / m)).unwrap().scale(m);
                assert_eq!(lhs, rhs, "k = {k}, x = {x}");
            }
        }
    }

    #[test]
    fn scaling_identity_holds_loosely_off_the_dyadic_grid() {
        let alpha = 0.25;
        let mut rng = sampling::rng(7);
        for m in [3.0, 7.5, 11.3] {
            let scaled = OperatorSpec::b_scaled(alpha, m).unwrap();
            let base = OperatorSpec::b_alpha(alpha).unwrap();
            for _ in 0..200 {
                let x = sampling::sparse_in_shell(&mut rng, 6, 20, -4, 3);
                let lhs = eval(&scaled, &x).unwrap();
                let rhs = eval(&base, &x.scale(1.0 / m)).unwrap().scale(m);
                let err = lhs.sub(&rhs).norm();
                assert!(
                    err <= 1e-14 * (1.0 + lhs.norm()),
                    "m = {m}: |lhs - rhs| = {err}"
                );
            }
        }
    }

    #[test]
    fn set_valued_specs_reject_eval() {
        let x = sv(&[(1, 1.0)]);
        assert!(matches!(
            eval(&OperatorSpec::SoftThreshGen, &x),
            Err(Error::SetValuedEval("SoftThreshGen"))
        ));
        assert!(matches!(
            eval(&OperatorSpec::HalfLineNormalCone, &x),
            Err(Error::SetValuedEval("HalfLineNormalCone"))
        ));
    }

    #[test]
    fn alpha_validation_is_strict() {
        assert!(OperatorSpec::b_alpha(alpha_max()).is_ok());
        assert!(OperatorSpec::b_alpha(-alpha_max()).is_ok());
        assert!(matches!(
            OperatorSpec::b_alpha(alpha_max() * (1.0 + 1e-15)),
            Err(Error::AlphaOutOfRange(_))
        ));
        assert!(matches!(
            OperatorSpec::b_alpha(f64::NAN),
            Err(Error::AlphaOutOfRange(_))
        ));
        assert!(matches!(
            OperatorSpec::b_scaled(0.1, 0.0),
            Err(Error::NonPositiveScale(_))
        ));
        assert!(matches!(
            OperatorSpec::linear_scalar(-0.5),
            Err(Error::NegativeLambda(_))
        ));
    }

    #[test]
    fn hand_built_invalid_spec_fails_at_use() {
        let bad = OperatorSpec::BAlpha { alpha: 1.0 };
        assert!(matches!(
            eval(&bad, &SparseVec::zero()),
            Err(Error::AlphaOutOfRange(_))
        ));
    }

    #[test]
    fn spec_json_round_trip() {
        let specs = [
            OperatorSpec::CounterT,
            OperatorSpec::b_alpha(0.25).unwrap(),
            OperatorSpec::b_scaled(-0.1, 8.0).unwrap(),
            OperatorSpec::linear_scalar(3.0).unwrap(),
            OperatorSpec::SoftThreshGen,
            OperatorSpec::HalfLineNormalCone,
        ];
        for spec in specs {
            let s = serde_json::to_string(&spec).unwrap();
            let back: OperatorSpec = serde_json::from_str(&s).unwrap();
            assert_eq!(back, spec, "{s}");
        }
        assert_eq!(
            serde_json::to_string(&OperatorSpec::b_alpha(0.25).unwrap()).unwrap(),
            r#"{"tag":"BAlpha","alpha":0.25}"#
        );
    }

    #[test]
    fn spec_json_rejects_invalid_parameters() {
        assert!(serde_json::from_str::<OperatorSpec>(r#"{"tag":"BAlpha","alpha":0.9}"#).is_err());
        assert!(serde_json::from_str::<OperatorSpec>(r#"{"tag":"BScaled","alpha":0.1,"m":-2.0}"#)
            .is_err());
        assert!(
            serde_json::from_str::<OperatorSpec>(r#"{"tag":"LinearScalar","lambda":-1.0}"#)
                .is_err()
        );
        assert!(serde_json::from_str::<OperatorSpec>(r#"{"tag":"Unknown"}"#).is_err());
    }

    #[test]
    fn saturating_pair_attains_the_constant_bitwise() {
        let (x, y) = saturating_pair();
        let q = lipschitz_quotient(&OperatorSpec::CounterT, &x, &y).unwrap();
        assert!(
            ulp_distance(q, lipschitz_constant()) <= 4,
            "quotient {q} vs constant {}",
            lipschitz_constant()
        );
    }

    #[test]
    fn quotient_vanishes_outside_every_bump() {
        let x = sv(&[(1, 3.0)]);
        let y = sv(&[(1, 4.0)]);
        assert_eq!(
            lipschitz_quotient(&OperatorSpec::CounterT, &x, &y).unwrap(),
            0.0
        );
    }

    #[test]
    fn quotient_of_linear_map_is_lambda() {
        let spec = OperatorSpec::linear_scalar(0.75).unwrap();
        let x = sv(&[(2, 1.5)]);
        let y = sv(&[(2, -0.5)]);
        assert_eq!(lipschitz_quotient(&spec, &x, &y).unwrap(), 0.75);
    }

    #[test]
    fn quotient_rejects_identical_points() {
        let x = sv(&[(1, 1.0)]);
        assert_eq!(
            lipschitz_quotient(&OperatorSpec::CounterT, &x, &x),
            Err(Error::IdenticalPoints)
        );
    }

    #[test]
    fn gap_at_identical_points_is_zero() {
        let x = sv(&[(3, 0.5)]);
        let spec = OperatorSpec::b_alpha(alpha_max()).unwrap();
        assert_eq!(monotonicity_gap(&spec, &x, &x).unwrap(), 0.0);
    }

    #[test]
    fn gap_of_linear_map_is_lambda_distance_squared() {
        let spec = OperatorSpec::linear_scalar(2.0).unwrap();
        let x = sv(&[(1, 1.5), (4, -0.5)]);
        let y = sv(&[(1, 0.5), (4, 0.5)]);
        assert_eq!(monotonicity_gap(&spec, &x, &y).unwrap(), 2.0 * x.sub(&y).norm_sq());
    }

    #[test]
    fn gap_on_saturating_pair_stays_nonnegative_at_extreme_alpha() {
        // Exact decomposition on this pair: gap = 1/64 + alpha/32.
        let (x, y) = saturating_pair();
        for sign in [1.0, -1.0] {
            let alpha = sign * alpha_max();
            let spec = OperatorSpec::b_alpha(alpha).unwrap();
            let gap = monotonicity_gap(&spec, &x, &y).unwrap();
            let expected = 1.0 / 64.0 + alpha / 32.0;
            assert!(gap >= 0.0, "alpha = {alpha}: gap = {gap}");
            assert!(
                (gap - expected).abs() <= 1e-15,
                "alpha = {alpha}: gap = {gap}, expected {expected}"
            );
        }
    }

    #[test]
    fn sampled_certificates_hold_at_reduced_volume() {
        let lip = certify_lipschitz(5_000, 17);
        assert!(
            lip.max_quotient <= lipschitz_constant() + 1e-9,
            "max quotient {}",
            lip.max_quotient
        );
        assert!(ulp_distance(lip.saturating_quotient, lipschitz_constant()) <= 4);

        let low = certify_lower_bound(5_000, 17);
        assert!(low.min_ratio >= 1.0 - 1e-12, "min ratio {}", low.min_ratio);

        for alpha in [0.0, 0.1, -0.1, alpha_max(), -alpha_max()] {
            let rep = certify_monotonicity(alpha, 5_000, 17).unwrap();
            assert!(
                rep.min_slack >= -1e-12,
                "alpha = {alpha}: min slack {}",
                rep.min_slack
            );
        }
    }
}
