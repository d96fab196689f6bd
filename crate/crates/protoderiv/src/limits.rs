//! Diagnostics for the graphical limit of the rescaled family
//! `B_m(x) = x + alpha*m*T(x/m)` as `m` grows, and the finite-step quotient
//! sampler behind the proto-derivative probes.
//!
//! The limit's graph collapses to the single pair `(0, 0)`. A finite sample
//! cannot certify a set limit, so the module measures the two quantitative
//! mechanisms that force the collapse:
//!
//! * residual lower bound: `||B_m(x) - x|| >= |alpha| ||x|| / 2` whenever
//!   `||x|| <= m`, so residuals vanish only along points sliding to zero;
//! * support escape: the support of `T(x/m)` sits above
//!   `floor(log2(m/||x||)) - 2` and marches to infinity with `m`, so the
//!   residual direction leaves every fixed coordinate and distinct scales
//!   produce orthogonal residuals.

use serde::{Deserialize, Serialize};

use crate::bumps;
use crate::error::Error;
use crate::operators::{self, GraphPoint, OperatorSpec};
use crate::sampling;
use crate::seqspace::SparseVec;

/// Largest admissible distance of a relative base point from the graph.
pub const OFF_GRAPH_TOL: f64 = 1e-12;

/// Seeded direction sample shared by the graph samplers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleConfig {
    /// Radii of the sampled spheres; radius 0 contributes the origin pair.
    pub radii: Vec<f64>,
    /// Random unit directions per radius, in addition to the two axis
    /// directions that are always included.
    pub dirs_per_radius: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            radii: vec![1.0, 0.5],
            dirs_per_radius: 8,
            seed: 0,
        }
    }
}

/// Per-point measurements of the two limit mechanisms.
#[derive(Clone, Debug, Serialize)]
pub struct PointDiagnostic {
    pub point: GraphPoint,
    /// `||y - x||`.
    pub residual_norm: f64,
    /// `|alpha| * ||x|| / 2`; a lower bound for the residual when
    /// `||x|| <= m`.
    pub residual_lower_bound: f64,
    /// Smallest index of the active bump window at `||x/m||` (the candidate
    /// support of `T(x/m)`; the bump at the window floor can vanish exactly
    /// at a dyadic boundary). `None` when the image is zero.
    pub min_support_index: Option<u32>,
    /// `floor(log2(m/||x||)) - 2`; `None` for the zero point. Every support
    /// index is at least `max(1, floor)`.
    pub predicted_support_floor: Option<i64>,
}

/// Mechanism measurements for one scale `m`.
#[derive(Clone, Debug, Serialize)]
pub struct LimitDiagnostics {
    pub alpha: f64,
    pub m: f64,
    pub points: Vec<PointDiagnostic>,
}

/// Deterministic sample of `graph(B_m)`: for each radius, the two axis
/// directions followed by seeded random sparse unit directions. Radius 0
/// contributes the single pair `(0, 0)`.
pub fn sample_graph(
    alpha: f64,
    m: f64,
    radii: &[f64],
    dirs_per_radius: usize,
    seed: u64,
) -> Result<Vec<GraphPoint>, Error> {
    let spec = OperatorSpec::b_scaled(alpha, m)?;
    let mut rng = sampling::rng(seed);
    let mut points = Vec::new();
    for &r in radii {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::NonPositiveArgument(r));
        }
        if r == 0.0 {
            points.push(GraphPoint {
                x: SparseVec::zero(),
                y: SparseVec::zero(),
            });
            continue;
        }
        let mut dirs = vec![
            SparseVec::basis(1, 1.0)?,
            SparseVec::basis(2, 1.0)?,
        ];
        for _ in 0..dirs_per_radius {
            dirs.push(sampling::unit_direction(&mut rng, 8, 64));
        }
        for u in dirs {
            let x = u.scale(r);
            let y = operators::eval(&spec, &x)?;
            points.push(GraphPoint { x, y });
        }
    }
    Ok(points)
}

/// Runs the graph sampler across a strictly increasing scale list and
/// measures both limit mechanisms at every sampled point.
pub fn outer_limit_diagnostic(
    alpha: f64,
    m_list: &[f64],
    config: &SampleConfig,
) -> Result<Vec<LimitDiagnostics>, Error> {
    if m_list.is_empty() || m_list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::BadScaleList);
    }
    let mut out = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let points = sample_graph(alpha, m, &config.radii, config.dirs_per_radius, config.seed)?;
        let diags = points
            .into_iter()
            .map(|point| diagnose_point(alpha, m, point))
            .collect();
        out.push(LimitDiagnostics {
            alpha,
            m,
            points: diags,
        });
    }
    Ok(out)
}

fn diagnose_point(alpha: f64, m: f64, point: GraphPoint) -> PointDiagnostic {
    let t = point.x.norm();
    let residual_norm = point.y.sub(&point.x).norm();
    let residual_lower_bound = alpha.abs() * t / 2.0;
    let (min_support_index, predicted_support_floor) = if t == 0.0 {
        (None, None)
    } else {
        let inner = point.x.scale(1.0 / m);
        let image = operators::eval_t(&inner);
        let floor = crate::dyadic::floor_log2(m / t) as i64 - 2;
        let min = if image.is_zero() {
            None
        } else {
            bumps::active_indices(inner.norm())
                .ok()
                .and_then(|w| w.first().copied())
        };
        (min, Some(floor))
    };
    PointDiagnostic {
        point,
        residual_norm,
        residual_lower_bound,
        min_support_index,
        predicted_support_floor,
    }
}

/// `(lhs, rhs)` of the residual orthogonality identity
/// `||r_m - r_m2||^2 = ||r_m||^2 + ||r_m2||^2` for the residuals
/// `r = B_m(x) - x` at two scales. With `m2 >= 8m` the two residual supports
/// are disjoint and the identity holds to a couple of ulps (the two sides
/// only differ in summation grouping).
pub fn residual_orthogonality_sides(
    alpha: f64,
    m: f64,
    m2: f64,
    x: &SparseVec,
) -> Result<(f64, f64), Error> {
    let r1 = operators::eval(&OperatorSpec::b_scaled(alpha, m)?, x)?.sub(x);
    let r2 = operators::eval(&OperatorSpec::b_scaled(alpha, m2)?, x)?.sub(x);
    let lhs = r1.sub(&r2).norm_sq();
    let rhs = r1.norm_sq() + r2.norm_sq();
    Ok((lhs, rhs))
}

/// Finite-step graph quotient `(F(x0 + tau*w) - v0)/tau` of a single-valued
/// operator relative to the graph point `(x0, v0)`.
///
/// For the perturbation family at the origin pair with `tau = 2^-k` this
/// coincides bit for bit with evaluating the rescaled family at `m = 1/tau`.
pub fn proto_quotient(
    spec: &OperatorSpec,
    x0: &SparseVec,
    v0: &SparseVec,
    tau: f64,
    w: &SparseVec,
) -> Result<SparseVec, Error> {
    spec.validate()?;
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::NonPositiveArgument(tau));
    }
    let on_graph = operators::eval(spec, x0)?;
    let dist = on_graph.sub(v0).norm();
    if dist > OFF_GRAPH_TOL {
        return Err(Error::OffGraphBasePoint(dist));
    }
    let shifted = operators::eval(spec, &SparseVec::axpy(tau, w, x0))?;
    Ok(shifted.sub(v0).scale_div(tau))
}

/// The graph of the limiting operator: the single pair `(0, 0)`.
pub fn graphical_limit_graph() -> Vec<GraphPoint> {
    vec![GraphPoint {
        x: SparseVec::zero(),
        y: SparseVec::zero(),
    }]
}

/// Whether `<p.x - q.x, p.y - q.y> >= 0`, the pairwise monotonicity relation.
pub fn monotonically_related(p: &GraphPoint, q: &GraphPoint) -> bool {
    p.x.sub(&q.x).inner(&p.y.sub(&q.y)) >= 0.0
}
