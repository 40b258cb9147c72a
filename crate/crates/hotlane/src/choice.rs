//! Lane-choice models `p = G(u, w)`, their inverses, and the value-of-time
//! distribution abstraction.
//!
//! Every model maps the emitted price `u` and the queueing-time difference `w`
//! to the fraction `p` of SOVs that pay for the HOT lanes. In all provided
//! families the inverse relation is affine in `w`:
//! `u = A(zeta) * w + B(zeta)`, which is what makes the model-free pricing law
//! work. The `affine_*` operations expose that decomposition.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Capacities, DemandSample};

/// Step used by the finite-difference fallback for `d/dzeta` at zero, in
/// veh/min. Balances truncation against cancellation at the residual-capacity
/// scale of the reference scenarios.
const DERIVATIVE_STEP: f64 = 1e-4;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ChoiceError {
    /// The implied paying fraction left (0,1); the required price is infinite.
    #[error("implied paying fraction {fraction} is outside (0,1)")]
    FractionOutOfRange { fraction: f64 },
    /// UE prices are only defined against a positive queueing-time advantage.
    #[error("queueing-time difference w={w} is not positive")]
    NonPositiveW { w: f64 },
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid piecewise-linear table: {0}")]
    InvalidTable(String),
}

// ---------------------------------------------------------------------------
// Value-of-time distributions
// ---------------------------------------------------------------------------

/// Distribution of values of time across SOVs, supported on x >= 0 ($/min).
///
/// `quantile` must invert `cdf` on the support; `conditional_mean_below(x)` is
/// `E[pi | pi <= x]` and defaults to Simpson quadrature of `t * pdf(t)`.
pub trait VotDistribution: Send + Sync {
    fn cdf(&self, x: f64) -> f64;
    fn quantile(&self, p: f64) -> f64;
    fn pdf(&self, x: f64) -> f64;

    fn mean(&self) -> f64 {
        let hi = self.quantile(1.0 - 1e-10);
        self.conditional_mean_below(hi)
    }

    fn conditional_mean_below(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if !x.is_finite() {
            return self.mean();
        }
        let mass = self.cdf(x);
        if mass <= 0.0 {
            return 0.0;
        }
        simpson(|t| t * self.pdf(t), 0.0, x, 2000) / mass
    }

    /// Inverse-transform sampling; used by brute-force oracles and available to
    /// callers that want vehicle-level draws.
    fn sample(&self, rng: &mut dyn rand::RngCore) -> f64 {
        use rand::Rng;
        self.quantile(rng.gen::<f64>())
    }
}

/// Exponential VOTs: `F(x) = 1 - exp(-rate * x)`, mean `1/rate`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponential {
    rate: f64,
}

impl Exponential {
    pub fn new(rate: f64) -> Result<Self, ChoiceError> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(ChoiceError::InvalidParameter(format!(
                "exponential rate must be finite and > 0, got {rate}"
            )));
        }
        Ok(Self { rate })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl VotDistribution for Exponential {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.rate * x).exp_m1()
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            0.0
        } else if p >= 1.0 {
            f64::INFINITY
        } else {
            -(-p).ln_1p() / self.rate
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.rate * (-self.rate * x).exp()
        }
    }

    fn mean(&self) -> f64 {
        1.0 / self.rate
    }

    fn conditional_mean_below(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if !x.is_finite() {
            return self.mean();
        }
        // E[pi | pi <= x] = 1/rate - x e^{-rate x} / (1 - e^{-rate x});
        // the closed form cancels badly for tiny x, where the limit is x/2.
        if self.rate * x < 1e-8 {
            return x / 2.0;
        }
        let e = (-self.rate * x).exp();
        1.0 / self.rate - x * e / (1.0 - e)
    }
}

/// Heavy-tailed VOT family: `F(x) = (x/pi_star)^gamma / (1 + (x/pi_star)^gamma)`.
///
/// `pi_star` is the median; `gamma` controls the tail. The mean is finite only
/// for `gamma > 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BurrVariant {
    pi_star: f64,
    gamma: f64,
}

impl BurrVariant {
    pub fn new(pi_star: f64, gamma: f64) -> Result<Self, ChoiceError> {
        if !(pi_star.is_finite() && pi_star > 0.0) {
            return Err(ChoiceError::InvalidParameter(format!(
                "burr pi_star must be finite and > 0, got {pi_star}"
            )));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(ChoiceError::InvalidParameter(format!(
                "burr gamma must be finite and > 0, got {gamma}"
            )));
        }
        Ok(Self { pi_star, gamma })
    }
}

impl VotDistribution for BurrVariant {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let r = (x / self.pi_star).powf(self.gamma);
        r / (1.0 + r)
    }

    fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            0.0
        } else if p >= 1.0 {
            f64::INFINITY
        } else {
            self.pi_star * (p / (1.0 - p)).powf(1.0 / self.gamma)
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let r = (x / self.pi_star).powf(self.gamma);
        let dr = self.gamma / self.pi_star * (x / self.pi_star).powf(self.gamma - 1.0);
        dr / (1.0 + r).powi(2)
    }

    fn mean(&self) -> f64 {
        if self.gamma <= 1.0 {
            return f64::INFINITY;
        }
        // E[X] = pi_star * (pi/gamma) / sin(pi/gamma) for gamma > 1.
        let s = std::f64::consts::PI / self.gamma;
        self.pi_star * s / s.sin()
    }
}

// ---------------------------------------------------------------------------
// Lane-choice model interface
// ---------------------------------------------------------------------------

/// Result of a choice evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChoiceOutcome {
    /// Fraction of SOVs choosing the HOT lanes, in [0,1].
    pub fraction: f64,
    /// Set when the model fell back to its `w <= 0` rule (paying for a lane
    /// that is not faster is never rational, so p = 0 there).
    pub degenerate_w: bool,
}

impl ChoiceOutcome {
    fn plain(fraction: f64) -> Self {
        ChoiceOutcome { fraction, degenerate_w: false }
    }

    fn degenerate() -> Self {
        ChoiceOutcome { fraction: 0.0, degenerate_w: true }
    }
}

/// Price-law coefficients at a fixed residual capacity: `u = slope*w + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineCoefficients {
    /// $/min
    pub slope: f64,
    /// $
    pub intercept: f64,
}

/// A lane-choice model `p = G(u, w)` together with its inverse forms.
///
/// `demand` and `caps` are part of every signature because the general affine
/// family defines `G` only through the residual capacity, which needs both.
/// The logit and UE families ignore them where the paper's closed forms do.
pub trait LaneChoiceModel: Send + Sync {
    /// Fraction of SOVs choosing the HOT lanes at price `u >= 0` and
    /// queueing-time difference `w`.
    fn choice_fraction(
        &self,
        u: f64,
        w: f64,
        demand: &DemandSample,
        caps: &Capacities,
    ) -> ChoiceOutcome;

    /// Price that would hold the residual capacity at `zeta_target`.
    ///
    /// Errors when the implied paying fraction `(c1 - q1 - zeta)/q2` is not
    /// strictly inside (0,1); the price is infinite at the boundary.
    fn inverse_price(
        &self,
        zeta_target: f64,
        w: f64,
        demand: &DemandSample,
        caps: &Capacities,
    ) -> Result<f64, ChoiceError>;

    /// The `(A(zeta), B(zeta))` pair of the affine inverse form.
    fn affine_decomposition(
        &self,
        zeta: f64,
        demand: &DemandSample,
        caps: &Capacities,
    ) -> Result<AffineCoefficients, ChoiceError>;

    /// `(A'(0), B'(0))`. Models with closed forms override this; the default is
    /// a central finite difference of `affine_decomposition`.
    fn affine_derivatives_at_zero(
        &self,
        demand: &DemandSample,
        caps: &Capacities,
    ) -> Result<(f64, f64), ChoiceError> {
        let h = DERIVATIVE_STEP;
        let hi = self.affine_decomposition(h, demand, caps)?;
        let lo = self.affine_decomposition(-h, demand, caps)?;
        Ok(((hi.slope - lo.slope) / (2.0 * h), (hi.intercept - lo.intercept) / (2.0 * h)))
    }

    /// Mean VOT of the SOVs that stay on the GP lanes at the given price point,
    /// used by cost accounting. `None` when the model has no VOT semantics.
    fn gp_mean_vot(&self, u: f64, w: f64) -> Option<f64>;
}

/// Paying fraction implied by a residual-capacity target.
fn implied_fraction(
    zeta: f64,
    demand: &DemandSample,
    caps: &Capacities,
) -> Result<f64, ChoiceError> {
    let fraction = (caps.c1 - demand.q1 - zeta) / demand.q2;
    if fraction > 0.0 && fraction < 1.0 {
        Ok(fraction)
    } else {
        Err(ChoiceError::FractionOutOfRange { fraction })
    }
}

/// Applies a model to one price point: `q3 = p*q2`, `zeta = c1 - q1 - q3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowSplit {
    pub fraction: f64,
    pub q3: f64,
    pub zeta: f64,
    pub degenerate_w: bool,
}

pub fn flow_and_residual(
    model: &dyn LaneChoiceModel,
    u: f64,
    w: f64,
    demand: &DemandSample,
    caps: &Capacities,
) -> FlowSplit {
    let outcome = model.choice_fraction(u, w, demand, caps);
    let q3 = outcome.fraction * demand.q2;
    FlowSplit {
        fraction: outcome.fraction,
        q3,
        zeta: caps.c1 - demand.q1 - q3,
        degenerate_w: outcome.degenerate_w,
    }
}

// ---------------------------------------------------------------------------
// Logit
// ---------------------------------------------------------------------------

/// Binary logit with a shared VOT: `p = 1 / (1 + exp(alpha*(u - pi*w)))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogitModel {
    pi_star: f64,
    alpha_star: f64,
}

impl LogitModel {
    pub fn new(pi_star: f64, alpha_star: f64) -> Result<Self, ChoiceError> {
        if !(pi_star.is_finite() && pi_star > 0.0) {
            return Err(ChoiceError::InvalidParameter(format!(
                "logit pi_star must be finite and > 0, got {pi_star}"
            )));
        }
        if !(alpha_star.is_finite() && alpha_star > 0.0) {
            return Err(ChoiceError::InvalidParameter(format!(
                "logit alpha_star must be finite and > 0, got {alpha_star}"
            )));
        }
        Ok(Self { pi_star, alpha_star })
    }

    pub fn pi_star(&self) -> f64 {
        self.pi_star
    }

    pub fn alpha_star(&self) -> f64 {
        self.alpha_star
    }
}

/// `1 / (1 + exp(x))` evaluated through the negative-magnitude branch so large
/// utility differences saturate instead of overflowing.
fn inverse_logit(x: f64) -> f64 {
    if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

impl LaneChoiceModel for LogitModel {
    fn choice_fraction(
        &self,
        u: f64,
        w: f64,
        _demand: &DemandSample,
        _caps: &Capacities,
    ) -> ChoiceOutcome {
        // The logistic form stays well defined for w <= 0; evaluate as-is.
        ChoiceOutcome::plain(inverse_logit(self.alpha_star * (u - self.pi_star * w)))
    }

    fn inverse_price(
        &self,
        zeta_target: f64,
        w: f64,
        demand: &DemandSample,
        caps: &Capacities,
    ) -> Result<f64, ChoiceError> {
        let fraction = implied_fraction(zeta_target, demand, caps)?;
        Ok(self.pi_star * w + ((1.0 - fraction) / fraction).ln() / self.alpha_star)
    }

    fn affine_decomposition(
        &self,
        zeta: f64,
        demand: &DemandSample,
        caps: &Capacities,
    ) -> Result<AffineCoefficients, ChoiceError> {
        let fraction = implied_fraction(zeta, demand, caps)?;
        Ok(AffineCoefficients {
            slope: self.pi_star,
            intercept: ((1.0 - fraction) / fraction).ln() / self.alpha_star,
        })
    }

    fn affine_derivatives_at_zero(
        &self,
        demand: &DemandSample,
        caps: &Capacities,
    ) -> Result<(f64, f64), ChoiceError> {
        implied_fraction(0.0, demand, caps)?;
        let paying = caps.c1 - demand.q1;
        let staying = demand.q1 + demand.q2 - caps.c1;
        Ok((0.0, (1.0 / staying + 1.0 / paying) / self.alpha_star))
    }

    fn gp_mean_vot(&self, _u: f64, _w: f64) -> Option<f64> {
        Some(self.pi_star)
    }
}

// ---------------------------------------------------------------------------
// Vehicle-based user equilibrium
// ---------------------------------------------------------------------------

/// Vehicle-based user equilibrium with heterogeneous VOTs: each SOV pays iff
/// its own value of time exceeds `u/w`, so `p = 1 - F(u/w)`.
pub struct UeModel {
    dist: Box<dyn VotDistribution>,
}

impl UeModel {
    pub fn new(dist: Box<dyn VotDistribution>) -> Self {
        Self { dist }
    }

    pub fn exponential(rate: f64) -> Result<Self, ChoiceError> {
        Ok(Self::new(Box::new(Exponential::new(rate)?)))
    }

    pub fn burr(pi_star: f64, gamma: f64) -> Result<Self, ChoiceError> {
        Ok(Self::new(Box::new(BurrVariant::new(pi_star, gamma)?)))
    }

    pub fn distribution(&self) -> &dyn VotDistribution {
        self.dist.as_ref()
    }
}

impl LaneChoiceModel for UeModel {
    fn choice_fraction(
        &self,
        u: f64,
        w: f64,
        _demand: &DemandSample,
        _caps: &Capacities,
    ) -> ChoiceOutcome {
        if w <= 0.0 {
            // Paying for a slower-or-equal lane is never rational; ties break
            // toward the free lanes.
            return ChoiceOutcome::degenerate();
        }
        ChoiceOutcome::plain(1.0 - self.dist.cdf(u / w))
    }

    fn inverse_price(
        &self,
        zeta_target: f64,
        w: f64,
        demand: &DemandSample,
        caps: &Capacities,
    ) -> Result<f64, ChoiceError> {
        let fraction = implied_fraction(zeta_target, demand, caps)?;
        if w <= 0.0 {
            return Err(ChoiceError::NonPositiveW { w });
        }
        Ok(self.dist.quantile(1.0 - fraction) * w)
    }

    fn affine_decomposition(
        &self,
        zeta: f64,
        demand: &DemandSample,
        caps: &Capacities,
    ) -> Result<AffineCoefficients, ChoiceError> {
        let fraction = implied_fraction(zeta, demand, caps)?;
        Ok(AffineCoefficients { slope: self.dist.quantile(1.0 - fraction), intercept: 0.0 })
    }

    fn affine_derivatives_at_zero(
        &self,
        demand: &DemandSample,
        caps: &Capacities,
    ) -> Result<(f64, f64), ChoiceError> {
        let fraction = implied_fraction(0.0, demand, caps)?;
        // A(zeta) = quantile(1 - (c1-q1-zeta)/q2), so by the inverse-function
        // rule A'(0) = 1 / (q2 * f(A(0))).
        let density = self.dist.pdf(self.dist.quantile(1.0 - fraction));
        if density > f64::MIN_POSITIVE {
            Ok((1.0 / (demand.q2 * density), 0.0))
        } else {
            let h = DERIVATIVE_STEP;
            let hi = self.affine_decomposition(h, demand, caps)?;
            let lo = self.affine_decomposition(-h, demand, caps)?;
            Ok(((hi.slope - lo.slope) / (2.0 * h), 0.0))
        }
    }

    fn gp_mean_vot(&self, u: f64, w: f64) -> Option<f64> {
        let threshold = if w > 0.0 { u / w } else { f64::INFINITY };
        Some(self.dist.conditional_mean_below(threshold))
    }
}

// ---------------------------------------------------------------------------
// General affine model
// ---------------------------------------------------------------------------

/// Monotone piecewise-linear table `x -> y` with flat extrapolation.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    /// Requires at least two breakpoints, strictly increasing x, finite values.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, ChoiceError> {
        if xs.len() != ys.len() {
            return Err(ChoiceError::InvalidTable(format!(
                "breakpoint and value counts differ ({} vs {})",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(ChoiceError::InvalidTable("need at least two breakpoints".into()));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(ChoiceError::InvalidTable("all entries must be finite".into()));
        }
        if xs.windows(2).any(|p| p[1] <= p[0]) {
            return Err(ChoiceError::InvalidTable("breakpoints must be strictly increasing".into()));
        }
        Ok(Self { xs, ys })
    }

    fn is_nondecreasing(&self) -> bool {
        self.ys.windows(2).all(|p| p[1] >= p[0])
    }

    fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    fn eval(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= *self.xs.last().unwrap() {
            return *self.ys.last().unwrap();
        }
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(i) => i,
        };
        let frac = (x - self.xs[i - 1]) / (self.xs[i] - self.xs[i - 1]);
        self.ys[i - 1] + frac * (self.ys[i] - self.ys[i - 1])
    }
}

/// Lane-choice behavior given directly as `u = A(zeta)*w + B(zeta)` tables.
///
/// Both tables are validated nondecreasing at construction; the choice fraction
/// comes from inverting the monotone map `zeta -> A(zeta)*w + B(zeta)`.
pub struct GeneralAffineModel {
    slope: PiecewiseLinear,
    intercept: PiecewiseLinear,
}

impl GeneralAffineModel {
    pub fn new(slope: PiecewiseLinear, intercept: PiecewiseLinear) -> Result<Self, ChoiceError> {
        if !slope.is_nondecreasing() {
            return Err(ChoiceError::InvalidTable("slope table must be nondecreasing in zeta".into()));
        }
        if !intercept.is_nondecreasing() {
            return Err(ChoiceError::InvalidTable(
                "intercept table must be nondecreasing in zeta".into(),
            ));
        }
        Ok(Self { slope, intercept })
    }

    fn price_at(&self, zeta: f64, w: f64) -> f64 {
        self.slope.eval(zeta) * w + self.intercept.eval(zeta)
    }

    /// Solves `A(zeta)*w + B(zeta) = u` for zeta over the table domain,
    /// clamping to an endpoint when `u` is outside the attainable range.
    fn solve_zeta(&self, u: f64, w: f64) -> f64 {
        let (lo_a, hi_a) = self.slope.domain();
        let (lo_b, hi_b) = self.intercept.domain();
        let mut lo = lo_a.min(lo_b);
        let mut hi = hi_a.max(hi_b);
        if self.price_at(lo, w) >= u {
            return lo;
        }
        if self.price_at(hi, w) <= u {
            return hi;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.price_at(mid, w) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

impl LaneChoiceModel for GeneralAffineModel {
    fn choice_fraction(
        &self,
        u: f64,
        w: f64,
        demand: &DemandSample,
        caps: &Capacities,
    ) -> ChoiceOutcome {
        if w <= 0.0 {
            return ChoiceOutcome::degenerate();
        }
        let zeta = self.solve_zeta(u, w);
        let fraction = ((caps.c1 - demand.q1 - zeta) / demand.q2).clamp(0.0, 1.0);
        ChoiceOutcome::plain(fraction)
    }

    fn inverse_price(
        &self,
        zeta_target: f64,
        w: f64,
        demand: &DemandSample,
        caps: &Capacities,
    ) -> Result<f64, ChoiceError> {
        implied_fraction(zeta_target, demand, caps)?;
        Ok(self.price_at(zeta_target, w))
    }

    fn affine_decomposition(
        &self,
        zeta: f64,
        demand: &DemandSample,
        caps: &Capacities,
    ) -> Result<AffineCoefficients, ChoiceError> {
        implied_fraction(zeta, demand, caps)?;
        Ok(AffineCoefficients {
            slope: self.slope.eval(zeta),
            intercept: self.intercept.eval(zeta),
        })
    }

    fn gp_mean_vot(&self, _u: f64, _w: f64) -> Option<f64> {
        None
    }
}

// ---------------------------------------------------------------------------
// Scenario-facing model specification
// ---------------------------------------------------------------------------

/// Serializable description of a lane-choice model, part of the scenario file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChoiceSpec {
    Logit {
        pi_star: f64,
        alpha_star: f64,
    },
    Ue {
        distribution: DistributionSpec,
    },
    /// Aligned arrays: `slope[i]` and `intercept[i]` belong to `zeta[i]`.
    Affine {
        zeta: Vec<f64>,
        slope: Vec<f64>,
        intercept: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    Exponential { rate: f64 },
    Burr { pi_star: f64, gamma: f64 },
}

impl DistributionSpec {
    pub fn build(&self) -> Result<Box<dyn VotDistribution>, ChoiceError> {
        match *self {
            DistributionSpec::Exponential { rate } => Ok(Box::new(Exponential::new(rate)?)),
            DistributionSpec::Burr { pi_star, gamma } => {
                Ok(Box::new(BurrVariant::new(pi_star, gamma)?))
            }
        }
    }
}

impl ChoiceSpec {
    pub fn build(&self) -> Result<Box<dyn LaneChoiceModel>, ChoiceError> {
        match self {
            ChoiceSpec::Logit { pi_star, alpha_star } => {
                Ok(Box::new(LogitModel::new(*pi_star, *alpha_star)?))
            }
            ChoiceSpec::Ue { distribution } => Ok(Box::new(UeModel::new(distribution.build()?))),
            ChoiceSpec::Affine { zeta, slope, intercept } => {
                let a = PiecewiseLinear::new(zeta.clone(), slope.clone())?;
                let b = PiecewiseLinear::new(zeta.clone(), intercept.clone())?;
                Ok(Box::new(GeneralAffineModel::new(a, b)?))
            }
        }
    }

    pub fn validate(&self) -> Result<(), ChoiceError> {
        self.build().map(drop)
    }
}

/// Composite Simpson rule; `n` is rounded up to the next even panel count.
pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * f(a + i as f64 * h);
    }
    acc * h / 3.0
}
