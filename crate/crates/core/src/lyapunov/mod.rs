//! Quadratic-bound Lyapunov certificates: sampled verification, transfer of a
//! smooth certificate to a polynomial one, and exact checking of SOS identities.

mod sos;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use sos::{
    check_sos_certificate, SosCertificate, SosCertificateDocument, SosVerdict, SOS_SCHEMA_VERSION,
};

use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::field::{sample, SampledMax};
use crate::grid::{norm_sq, Grid};
use crate::region::BoxRegion;
use crate::weighted::{approximate_weighted_sobolev, WeightedOptions, ETA};
use crate::ExactPolynomial;

/// Right-hand side `f` of `ẋ = f(x)` with `f(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<Expression>,
}

impl VectorField {
    /// `|f_i(0)|` may not exceed this.
    pub const ORIGIN_TOLERANCE: f64 = 1e-12;

    pub fn new(components: Vec<Expression>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "vector field needs at least one component".into(),
            ));
        }
        if let Some(c) = components.iter().find(|c| c.dimension() != n) {
            return Err(Error::InvalidArgument(format!(
                "component `{c}` has dimension {} but the field has {n} components",
                c.dimension()
            )));
        }
        let origin = vec![0.0f64; n];
        for (i, c) in components.iter().enumerate() {
            let value = c.eval(&origin)?;
            if value.is_nan() || value.abs() > Self::ORIGIN_TOLERANCE {
                return Err(Error::HypothesisFailed(format!(
                    "f_{}(0) = {value}, expected 0",
                    i + 1
                )));
            }
        }
        Ok(VectorField { components })
    }

    pub fn parse<S: AsRef<str>>(texts: &[S]) -> Result<Self> {
        let n = texts.len();
        let components = texts
            .iter()
            .map(|t| Expression::parse(t.as_ref(), n))
            .collect::<std::result::Result<_, _>>()?;
        Self::new(components)
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Expression] {
        &self.components
    }

    /// Exact conversion of every component.
    pub fn to_polynomials(&self) -> Result<Vec<ExactPolynomial>> {
        self.components
            .iter()
            .map(Expression::to_polynomial)
            .collect()
    }

    fn sample(&self, grid: &Grid) -> Result<Vec<Vec<f64>>> {
        self.components
            .par_iter()
            .map(|c| sample(c, grid))
            .collect()
    }
}

/// Sampled `max_x max_i |f_i(x)|` over the endpoint grid. This is a lower
/// estimate of the true supremum.
pub fn sup_norm_field(
    f: &VectorField,
    region: &BoxRegion,
    grid_density: usize,
) -> Result<SampledMax> {
    region.require_dimension(f.dimension())?;
    let grid = Grid::endpoint(region, grid_density)?;
    let samples = f.sample(&grid)?;
    let pointwise: Vec<f64> = (0..grid.len())
        .map(|k| samples.iter().map(|s| s[k].abs()).fold(0.0, f64::max))
        .collect();
    Ok(SampledMax::of(&pointwise, &grid, |_| true))
}

/// `β₀‖x‖² ≤ v ≤ γ₀‖x‖²` and `∇vᵀf ≤ −δ₀‖x‖²` on the centred box `region`.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovHypotheses {
    pub beta0: f64,
    pub gamma0: f64,
    pub delta0: f64,
    pub region: BoxRegion,
}

impl LyapunovHypotheses {
    pub fn new(beta0: f64, gamma0: f64, delta0: f64, region: BoxRegion) -> Result<Self> {
        if !(beta0 > 0.0
            && beta0 <= gamma0
            && gamma0.is_finite()
            && delta0 > 0.0
            && delta0.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "need 0 < beta0 <= gamma0 and delta0 > 0, got ({beta0}, {gamma0}, {delta0})"
            )));
        }
        if region.radius().is_none() {
            return Err(Error::InvalidArgument(
                "the region must be a centred box".into(),
            ));
        }
        Ok(LyapunovHypotheses {
            beta0,
            gamma0,
            delta0,
            region,
        })
    }

    pub fn radius(&self) -> &BigRational {
        self.region.radius().expect("checked at construction")
    }

    fn bounds(&self) -> Bounds {
        Bounds {
            beta: self.beta0,
            gamma: self.gamma0,
            delta: self.delta0,
        }
    }
}

/// Constants `(β, γ, δ)` the polynomial certificate must meet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Targets {
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy)]
struct Bounds {
    beta: f64,
    gamma: f64,
    delta: f64,
}

/// Worst sample of one inequality, in quotient form (both sides divided by `xᵀx`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub point: Vec<f64>,
    /// `v(x)/xᵀx` or `∇v(x)ᵀf(x)/xᵀx`.
    pub quotient: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub passed: bool,
    /// Smallest slack over the grid; negative means violated.
    pub worst_margin: f64,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub passed: bool,
    pub grid_density: usize,
    pub points_checked: usize,
    pub inequalities: Vec<InequalityReport>,
}

impl CertificateReport {
    pub fn inequality(&self, name: &str) -> Option<&InequalityReport> {
        self.inequalities.iter().find(|i| i.name == name)
    }

    fn summary(&self) -> String {
        self.inequalities
            .iter()
            .filter(|i| !i.passed)
            .map(|i| {
                format!(
                    "{} violated at {:?} (quotient {}, bound {})",
                    i.name, i.witness.point, i.witness.quotient, i.witness.bound
                )
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Builds the report from sampled `v` and `∇vᵀf`, skipping the η-ball.
fn assess(
    grid: &Grid,
    density: usize,
    v: &[f64],
    decay: &[f64],
    bounds: Bounds,
) -> CertificateReport {
    struct Worst {
        margin: f64,
        k: usize,
        quotient: f64,
    }
    let mut worst: [Option<Worst>; 3] = [None, None, None];
    let mut checked = 0;
    for k in 0..grid.len() {
        let x = grid.point(k);
        let s = norm_sq(&x);
        if s.sqrt() < ETA {
            continue;
        }
        checked += 1;
        let qv = v[k] / s;
        let qd = decay[k] / s;
        let margins = [
            (qv - bounds.beta, qv),
            (bounds.gamma - qv, qv),
            (-qd - bounds.delta, qd),
        ];
        for (slot, (margin, quotient)) in worst.iter_mut().zip(margins) {
            if slot.as_ref().is_none_or(|w| margin < w.margin) {
                *slot = Some(Worst {
                    margin,
                    k,
                    quotient,
                });
            }
        }
    }
    let names = ["lower", "upper", "decay"];
    let limits = [bounds.beta, bounds.gamma, -bounds.delta];
    let inequalities: Vec<InequalityReport> = worst
        .into_iter()
        .zip(names.iter().zip(limits))
        .filter_map(|(w, (name, bound))| {
            w.map(|w| InequalityReport {
                name: name.to_string(),
                passed: w.margin >= 0.0,
                worst_margin: w.margin,
                witness: Witness {
                    point: grid.point(w.k),
                    quotient: w.quotient,
                    bound,
                },
            })
        })
        .collect();
    CertificateReport {
        passed: inequalities.iter().all(|i| i.passed),
        grid_density: density,
        points_checked: checked,
        inequalities,
    }
}

fn dot(gradient: &[Vec<f64>], field: &[Vec<f64>]) -> Vec<f64> {
    (0..gradient[0].len())
        .map(|k| gradient.iter().zip(field).map(|(g, f)| g[k] * f[k]).sum())
        .collect()
}

fn require_shapes(v_dim: usize, f: &VectorField, region: &BoxRegion) -> Result<()> {
    if v_dim != f.dimension() {
        return Err(Error::InvalidArgument(format!(
            "v has dimension {v_dim} but the vector field has dimension {}",
            f.dimension()
        )));
    }
    region.require_dimension(v_dim)
}

/// Samples the three hypothesis inequalities for a symbolic `v`.
pub fn check_hypotheses(
    v: &Expression,
    f: &VectorField,
    hyp: &LyapunovHypotheses,
    grid_density: usize,
) -> Result<CertificateReport> {
    require_shapes(v.dimension(), f, &hyp.region)?;
    let grid = Grid::endpoint(&hyp.region, grid_density)?;
    let values = sample(v, &grid)?;
    let gradient = (0..v.dimension())
        .into_par_iter()
        .map(|i| sample(&v.diff(i), &grid))
        .collect::<Result<Vec<_>>>()?;
    let decay = dot(&gradient, &f.sample(&grid)?);
    Ok(assess(&grid, grid_density, &values, &decay, hyp.bounds()))
}

/// Samples the target inequalities for a polynomial `p`; `p` and `∇p` are
/// evaluated exactly, `f` pointwise.
pub fn check_polynomial_certificate(
    p: &ExactPolynomial,
    f: &VectorField,
    region: &BoxRegion,
    targets: &Targets,
    grid_density: usize,
) -> Result<CertificateReport> {
    require_shapes(p.dimension(), f, region)?;
    let grid = Grid::endpoint(region, grid_density)?;
    let values = p.eval_on_grid(grid.axes())?;
    let gradient = (0..p.dimension())
        .into_par_iter()
        .map(|i| Ok(p.diff(i)?.eval_on_grid(grid.axes())?))
        .collect::<Result<Vec<_>>>()?;
    let decay = dot(&gradient, &f.sample(&grid)?);
    let bounds = Bounds {
        beta: targets.beta,
        gamma: targets.gamma,
        delta: targets.delta,
    };
    Ok(assess(&grid, grid_density, &values, &decay, bounds))
}

#[derive(Debug, Clone)]
pub struct TransferOptions {
    pub weighted: WeightedOptions,
    /// Points per axis of the verification grids.
    pub grid_density: usize,
    /// Analytic bound on `‖f‖∞` over the box; replaces the sampled estimate.
    pub sup_bound: Option<f64>,
    /// Fraction of the admissible budget actually used.
    pub retention: f64,
}

impl Default for TransferOptions {
    fn default() -> Self {
        TransferOptions {
            weighted: WeightedOptions::default(),
            grid_density: 64,
            sup_bound: None,
            retention: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transfer {
    /// The polynomial certificate on the original box.
    pub polynomial: ExactPolynomial,
    /// Its counterpart on the unit box, `p(x) = p̂(x/r)`.
    pub scaled_polynomial: ExactPolynomial,
    /// `min{β₀−β, γ−γ₀, (δ₀−δ)/(n·b)}`.
    pub budget_limit: f64,
    /// The budget `d` actually used.
    pub budget: f64,
    pub sup_norm: f64,
    /// Weighted tolerance imposed on `p̂`.
    pub weighted_tolerance: f64,
    pub hypotheses: CertificateReport,
    pub report: CertificateReport,
}

/// Largest admissible `d` given the hypothesis constants, targets and `b = ‖f‖∞`.
pub fn budget_limit(hyp: &LyapunovHypotheses, targets: &Targets, n: usize, sup_norm: f64) -> f64 {
    let decay = if sup_norm > 0.0 {
        (hyp.delta0 - targets.delta) / (n as f64 * sup_norm)
    } else {
        f64::INFINITY
    };
    (hyp.beta0 - targets.beta)
        .min(targets.gamma - hyp.gamma0)
        .min(decay)
}

/// Replaces a smooth certificate `v` by a polynomial one meeting `targets`.
///
/// With `d` the retained budget, `p̂` approximates `v̂(x) = v(rx)` on the unit
/// box in the weighted Sobolev norm to `d·min(r², r³)`, so that `p(x) = p̂(x/r)`
/// is within `d·xᵀx` of `v` in value and gradient on the box. A failing final
/// report is returned, not raised.
pub fn transfer_certificate(
    v: &Expression,
    f: &VectorField,
    hyp: &LyapunovHypotheses,
    targets: &Targets,
    options: &TransferOptions,
) -> Result<Transfer> {
    let n = v.dimension();
    require_shapes(n, f, &hyp.region)?;
    if !(targets.beta < hyp.beta0 && targets.gamma > hyp.gamma0 && targets.delta < hyp.delta0) {
        return Err(Error::InvalidArgument(format!(
            "targets must satisfy beta < {}, gamma > {}, delta < {}; got {targets:?}",
            hyp.beta0, hyp.gamma0, hyp.delta0
        )));
    }
    if !(options.retention > 0.0 && options.retention < 1.0) {
        return Err(Error::InvalidArgument(
            "budget retention must lie in (0, 1)".into(),
        ));
    }
    let hypotheses = check_hypotheses(v, f, hyp, options.grid_density)?;
    if !hypotheses.passed {
        return Err(Error::HypothesisFailed(hypotheses.summary()));
    }
    let sup_norm = match options.sup_bound {
        Some(b) => b,
        None => sup_norm_field(f, &hyp.region, options.grid_density)?.value,
    };
    let limit = budget_limit(hyp, targets, n, sup_norm);
    let budget = options.retention * limit;
    debug_assert!(budget > 0.0 && budget < limit);

    let r = hyp.radius().clone();
    let rf = r.to_f64().unwrap_or(f64::INFINITY);
    let weighted_tolerance = budget * (rf * rf).min(rf * rf * rf);
    let scaled_v = v.scale_variables(&r);
    let fitted = approximate_weighted_sobolev(
        &scaled_v,
        weighted_tolerance,
        &BoxRegion::unit(n),
        &options.weighted,
    )?;
    let scaled_polynomial = fitted.polynomial;
    let polynomial = scaled_polynomial.scale_domain(&r)?;
    let report =
        check_polynomial_certificate(&polynomial, f, &hyp.region, targets, options.grid_density)?;
    Ok(Transfer {
        polynomial,
        scaled_polynomial,
        budget_limit: limit,
        budget,
        sup_norm,
        weighted_tolerance,
        hypotheses,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn field(texts: &[&str]) -> VectorField {
        VectorField::parse(texts).unwrap()
    }

    fn parse(text: &str, n: usize) -> Expression {
        Expression::parse(text, n).unwrap()
    }

    #[test]
    fn vector_field_validation() {
        assert!(VectorField::parse(&["-x1 + 1", "-x2"]).is_err());
        assert!(VectorField::parse(&["-x1", "-x3"]).is_err());
        assert!(VectorField::parse::<&str>(&[]).is_err());
        assert_eq!(
            field(&["-x1", "x1 - x2^2"]).to_polynomials().unwrap().len(),
            2
        );
        assert!(matches!(
            field(&["sin(x1)"]).to_polynomials(),
            Err(Error::NotPolynomial(_))
        ));
    }

    #[test]
    fn sup_norms() {
        let b = BoxRegion::unit(2);
        assert_eq!(
            sup_norm_field(&field(&["-x1", "-x2"]), &b, 64)
                .unwrap()
                .value,
            1.0
        );
        let m = sup_norm_field(&field(&["-x1 + x2^2", "-x2"]), &b, 64).unwrap();
        assert_eq!(m.value, 2.0);
        assert_eq!(m.point[0], -1.0);
        assert_eq!(
            sup_norm_field(&field(&["0*x1", "0"]), &b, 8).unwrap().value,
            0.0
        );
    }

    #[test]
    fn hypothesis_reports() {
        let b = BoxRegion::unit(2);
        let v = parse("x1^2 + x2^2", 2);
        let hyp = LyapunovHypotheses::new(1.0, 1.0, 2.0, b.clone()).unwrap();
        let stable = check_hypotheses(&v, &field(&["-x1", "-x2"]), &hyp, 64).unwrap();
        assert!(stable.passed, "{stable:?}");
        assert!(stable.inequalities.iter().all(|i| i.worst_margin == 0.0));
        let unstable = check_hypotheses(&v, &field(&["x1", "x2"]), &hyp, 64).unwrap();
        assert!(!unstable.passed);
        let decay = unstable.inequality("decay").unwrap();
        assert!(!decay.passed && decay.witness.quotient > 0.0 && decay.witness.point.len() == 2);

        let log = parse("ln(1 + x1^2 + x2^2)", 2);
        let hyp = LyapunovHypotheses::new(0.54, 1.0, 0.66, b).unwrap();
        assert!(
            check_hypotheses(&log, &field(&["-x1", "-x2"]), &hyp, 64)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn budget_is_strictly_inside() {
        let hyp = LyapunovHypotheses::new(0.54, 1.0, 0.66, BoxRegion::unit(2)).unwrap();
        let t = Targets {
            beta: 0.45,
            gamma: 1.1,
            delta: 0.5,
        };
        let limit = budget_limit(&hyp, &t, 2, 1.0);
        assert!((limit - 0.08).abs() < 1e-12);
        assert_eq!(budget_limit(&hyp, &t, 2, 0.0), (0.54f64 - 0.45).min(0.1));
    }

    #[test]
    fn transfers_quadratic_certificate() {
        let b = BoxRegion::centered(2, rational(1, 2)).unwrap();
        let v = parse("x1^2 + x2^2", 2);
        let f = field(&["-x1", "-x2"]);
        let hyp = LyapunovHypotheses::new(1.0, 1.0, 2.0, b).unwrap();
        let t = Targets {
            beta: 0.9,
            gamma: 1.1,
            delta: 1.8,
        };
        let out = transfer_certificate(&v, &f, &hyp, &t, &TransferOptions::default()).unwrap();
        assert!(out.report.passed, "{:?}", out.report);
        assert!(out.budget > 0.0 && out.budget < out.budget_limit);
        let x = [rational(1, 3), rational(-2, 7)];
        let scaled = [rational(2, 3), rational(-4, 7)];
        assert_eq!(
            out.polynomial.eval(&x).unwrap(),
            out.scaled_polynomial.eval(&scaled).unwrap()
        );
    }

    #[test]
    fn transfer_preconditions() {
        let hyp = LyapunovHypotheses::new(1.0, 1.0, 2.0, BoxRegion::unit(1)).unwrap();
        let v = parse("x1^2", 1);
        let f = field(&["-x1"]);
        let empty = Targets {
            beta: 1.0,
            gamma: 1.1,
            delta: 1.0,
        };
        assert!(matches!(
            transfer_certificate(&v, &f, &hyp, &empty, &TransferOptions::default()),
            Err(Error::InvalidArgument(_))
        ));
        let unstable = field(&["x1"]);
        let t = Targets {
            beta: 0.5,
            gamma: 1.5,
            delta: 1.0,
        };
        assert!(matches!(
            transfer_certificate(&v, &unstable, &hyp, &t, &TransferOptions::default()),
            Err(Error::HypothesisFailed(_))
        ));
        assert!(LyapunovHypotheses::new(2.0, 1.0, 1.0, BoxRegion::unit(1)).is_err());
    }
}
