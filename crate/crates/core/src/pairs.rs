//! Laplace pairs h(z) = ∫₀^∞ g(t) e^{−zt} dt used by the applications.
//!
//! Pairs with a shift s represent h(A) for the target function
//! target(λ) = h(λ − s) (+1 when the identity is added back); the engine
//! carries the shift as the phase e^{itks} and never modifies L.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrate::{geometric_breaks, integrate_breaks, integrate_real, IntegrationOptions};
use crate::special::{bessel_j0, bessel_j1, gamma_fn, hyp0f2};
use crate::tolerances::TAIL_TIME_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "pair", rename_all = "kebab-case")]
pub enum PairKind {
    Inhomogeneous { t_final: f64 },
    InversePower { eta: f64, p: f64 },
    MassWithInverse { t_final: f64, gamma: f64 },
    MassNoInverse { t_final: f64, gamma: f64 },
    SecondOrder { t_final: f64, gamma: f64 },
    SecondOrderMass { t_final: f64, gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PostOp {
    None,
    AddIdentity,
}

/// ‖g‖_{L¹}, flagged as exact or as an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L1Norm {
    pub value: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplacePair {
    pub kind: PairKind,
    pub l1: L1Norm,
    pub shift: f64,
    pub post_op: PostOp,
    pub singular_at_zero: bool,
    #[serde(skip)]
    tail_table: Vec<(f64, f64)>,
}

pub const PAIR_NAMES: [&str; 6] = [
    "inhomogeneous",
    "inverse-power",
    "mass-with-inverse",
    "mass-no-inverse",
    "second-order",
    "second-order-mass",
];

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

pub fn pair_inhomogeneous(t_final: f64) -> Result<LaplacePair> {
    positive("T", t_final)?;
    Ok(LaplacePair {
        kind: PairKind::Inhomogeneous { t_final },
        l1: L1Norm { value: t_final, exact: true },
        shift: 0.0,
        post_op: PostOp::None,
        singular_at_zero: false,
        tail_table: Vec::new(),
    })
}

pub fn pair_inverse_power(eta: f64, p: f64) -> Result<LaplacePair> {
    positive("eta", eta)?;
    positive("p", p)?;
    Ok(LaplacePair {
        kind: PairKind::InversePower { eta, p },
        l1: L1Norm { value: eta.powf(-p), exact: true },
        shift: 0.0,
        post_op: PostOp::None,
        singular_at_zero: p < 1.0,
        tail_table: Vec::new(),
    })
}

pub fn pair_mass_first_with_inverse(t_final: f64, gamma: f64) -> Result<LaplacePair> {
    positive("T", t_final)?;
    positive("gamma", gamma)?;
    Ok(LaplacePair {
        kind: PairKind::MassWithInverse { t_final, gamma },
        l1: L1Norm { value: 1.0 / gamma, exact: false },
        shift: gamma,
        post_op: PostOp::None,
        singular_at_zero: false,
        tail_table: Vec::new(),
    })
}

pub fn pair_mass_first_no_inverse(t_final: f64, gamma: f64) -> Result<LaplacePair> {
    positive("T", t_final)?;
    positive("gamma", gamma)?;
    // ∫ e^{−γt/2} √(T/t) dt = √(2πT/γ), bounding |J₁| by 1
    Ok(LaplacePair {
        kind: PairKind::MassNoInverse { t_final, gamma },
        l1: L1Norm { value: (2.0 * PI * t_final / gamma).sqrt(), exact: false },
        shift: 0.5 * gamma,
        post_op: PostOp::AddIdentity,
        singular_at_zero: false,
        tail_table: Vec::new(),
    })
}

pub fn pair_second_order(t_final: f64, gamma: f64) -> Result<LaplacePair> {
    positive("T", t_final)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("gamma must be nonnegative, got {gamma}")));
    }
    // g ≥ 0, so ‖g‖₁ is the transform of the unshifted kernel at γ.
    Ok(LaplacePair {
        kind: PairKind::SecondOrder { t_final, gamma },
        l1: L1Norm { value: (-t_final * gamma.sqrt()).exp(), exact: true },
        shift: gamma,
        post_op: PostOp::None,
        singular_at_zero: false,
        tail_table: Vec::new(),
    })
}

pub fn pair_second_order_mass(t_final: f64, gamma: f64) -> Result<LaplacePair> {
    positive("T", t_final)?;
    positive("gamma", gamma)?;
    let mut pair = LaplacePair {
        kind: PairKind::SecondOrderMass { t_final, gamma },
        l1: L1Norm { value: 0.0, exact: false },
        shift: gamma,
        post_op: PostOp::AddIdentity,
        singular_at_zero: true,
        tail_table: som_majorant_table(t_final, gamma)?,
    };
    pair.l1.value = pair.numeric_l1()?;
    Ok(pair)
}

/// Build a pair from its CLI name.
pub fn pair_by_name(name: &str, t_final: f64, eta: f64, p: f64, gamma: f64) -> Result<LaplacePair> {
    match name {
        "inhomogeneous" => pair_inhomogeneous(t_final),
        "inverse-power" => pair_inverse_power(eta, p),
        "mass-with-inverse" => pair_mass_first_with_inverse(t_final, gamma),
        "mass-no-inverse" => pair_mass_first_no_inverse(t_final, gamma),
        "second-order" => pair_second_order(t_final, gamma),
        "second-order-mass" => pair_second_order_mass(t_final, gamma),
        other => Err(Error::Contract(format!(
            "unknown pair '{other}' (expected one of {})",
            PAIR_NAMES.join(", ")
        ))),
    }
}

// 2J₁(x)/x without the 0/0 at the origin.
fn two_j1_over_x(x: f64) -> f64 {
    if x < 1e-4 {
        1.0 - x * x / 8.0
    } else {
        2.0 * bessel_j1(x).expect("nonnegative argument") / x
    }
}

impl LaplacePair {
    pub fn name(&self) -> &'static str {
        match self.kind {
            PairKind::Inhomogeneous { .. } => "inhomogeneous",
            PairKind::InversePower { .. } => "inverse-power",
            PairKind::MassWithInverse { .. } => "mass-with-inverse",
            PairKind::MassNoInverse { .. } => "mass-no-inverse",
            PairKind::SecondOrder { .. } => "second-order",
            PairKind::SecondOrderMass { .. } => "second-order-mass",
        }
    }

    /// The pair's γ parameter (0 for pairs without one).
    pub fn gamma(&self) -> f64 {
        match self.kind {
            PairKind::MassWithInverse { gamma, .. }
            | PairKind::MassNoInverse { gamma, .. }
            | PairKind::SecondOrder { gamma, .. }
            | PairKind::SecondOrderMass { gamma, .. } => gamma,
            _ => 0.0,
        }
    }

    /// g(t) for t ≥ 0. Singular pairs return +∞ or −∞ at t = 0.
    pub fn g(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match self.kind {
            PairKind::Inhomogeneous { t_final } => {
                if t <= t_final {
                    1.0
                } else {
                    0.0
                }
            }
            PairKind::InversePower { eta, p } => {
                if t == 0.0 {
                    return if p < 1.0 {
                        f64::INFINITY
                    } else if p == 1.0 {
                        1.0
                    } else {
                        0.0
                    };
                }
                ((p - 1.0) * t.ln() - eta * t - ln_gamma(p)).exp()
            }
            PairKind::MassWithInverse { t_final, gamma } => {
                (-gamma * t).exp() * bessel_j0(2.0 * (t_final * t).sqrt()).expect("nonnegative argument")
            }
            PairKind::MassNoInverse { t_final, gamma } => {
                -(-0.5 * gamma * t).exp() * t_final * two_j1_over_x(2.0 * (t_final * t).sqrt())
            }
            PairKind::SecondOrder { t_final, gamma } => {
                if t == 0.0 {
                    return 0.0;
                }
                let e = -gamma * t - t_final * t_final / (4.0 * t);
                t_final / (2.0 * (PI * t * t * t).sqrt()) * e.exp()
            }
            PairKind::SecondOrderMass { t_final, gamma } => {
                if t == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let x = t_final * t_final * t / 4.0;
                let f1 = hyp0f2(1.5, 2.0, x).expect("0F2 converges for moderate arguments");
                let f2 = hyp0f2(0.5, 1.5, x).expect("0F2 converges for moderate arguments");
                (-gamma * t).exp() * (0.5 * t_final * t_final * f1 - t_final / (PI * t).sqrt() * f2)
            }
        }
    }

    /// h(z): the transform of g, in the engine's shifted variable.
    pub fn h(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self.kind {
            PairKind::Inhomogeneous { t_final } => {
                let w = z * t_final;
                if w.norm() < 1e-5 {
                    // series of (1 − e^{−w})/w
                    t_final * (one - w / 2.0 + w * w / 6.0 - w * w * w / 24.0)
                } else {
                    (one - (-w).exp()) / z
                }
            }
            PairKind::InversePower { eta, p } => (z + eta).powf(-p),
            PairKind::MassWithInverse { t_final, gamma } => {
                let s = z + gamma;
                (-t_final / s).exp() / s
            }
            PairKind::MassNoInverse { t_final, gamma } => (-t_final / (z + 0.5 * gamma)).exp() - one,
            PairKind::SecondOrder { t_final, gamma } => (-t_final * (z + gamma).sqrt()).exp(),
            PairKind::SecondOrderMass { t_final, gamma } => (-t_final / (z + gamma).sqrt()).exp() - one,
        }
    }

    /// Scalar function of A that the engine output represents.
    pub fn target(&self, lambda: Complex64) -> Option<Complex64> {
        let z = lambda - self.shift;
        let pole = match self.kind {
            PairKind::InversePower { eta, .. } => (z + eta).norm() == 0.0,
            PairKind::MassWithInverse { .. } | PairKind::MassNoInverse { .. } | PairKind::SecondOrderMass { .. } => {
                lambda.norm() == 0.0
            }
            _ => false,
        };
        if pole {
            return None;
        }
        let mut v = self.h(z);
        if self.post_op == PostOp::AddIdentity {
            v += 1.0;
        }
        (v.re.is_finite() && v.im.is_finite()).then_some(v)
    }

    /// φ(k, t) = e^{itk·shift}.
    pub fn phase(&self, k: f64, t: f64) -> Complex64 {
        if self.shift == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, t * k * self.shift)
        }
    }

    /// Upper bound on ∫_{T′}^∞ |g|.
    pub fn tail_bound(&self, t_prime: f64) -> f64 {
        let tp = t_prime.max(0.0);
        match self.kind {
            PairKind::Inhomogeneous { t_final } => (t_final - tp).max(0.0),
            PairKind::InversePower { eta, p } => (-eta * tp / 2.0).exp() * (eta / 2.0).powf(-p),
            PairKind::MassWithInverse { gamma, .. } => (-gamma * tp).exp() / gamma,
            PairKind::MassNoInverse { t_final, gamma } => {
                // ∫_{T'} e^{−γt/2}√(T/t) ≤ 2√(πT/γ)·e^{−γT'/4}
                2.0 * (PI * t_final / gamma).sqrt() * (-gamma * tp / 4.0).exp()
            }
            PairKind::SecondOrder { t_final, gamma } => {
                let base = if tp > 0.0 { (t_final / (PI * tp).sqrt()).min(1.0) } else { 1.0 };
                (-gamma * tp).exp() * base
            }
            PairKind::SecondOrderMass { .. } => {
                let i = self.tail_table.partition_point(|&(t, _)| t <= tp);
                match i {
                    0 => f64::INFINITY,
                    _ => 2.0 * self.tail_table[i - 1].1,
                }
            }
        }
    }

    /// Support end for compactly supported g.
    pub fn support_end(&self) -> Option<f64> {
        match self.kind {
            PairKind::Inhomogeneous { t_final } => Some(t_final),
            _ => None,
        }
    }

    pub fn is_smooth(&self) -> bool {
        !self.singular_at_zero && !matches!(self.kind, PairKind::Inhomogeneous { .. })
    }

    /// ∫|g| over [0, T′(1e-10)] plus the tail bound there.
    fn numeric_l1(&self) -> Result<f64> {
        let tp = tail_truncation_time(self, 1e-10)?;
        Ok(self.integrate_abs(0.0, tp)? + self.tail_bound(tp))
    }

    /// ∫_a^b |g| with the t = u² substitution for singular pairs.
    pub fn integrate_abs(&self, a: f64, b: f64) -> Result<f64> {
        let opts = IntegrationOptions { abs_tol: 1e-11, rel_tol: 1e-10, max_intervals: 20_000 };
        if self.singular_at_zero {
            let (ua, ub) = (a.sqrt(), b.sqrt());
            integrate_real(|u| 2.0 * u * self.g(u * u).abs(), &geometric_breaks(ua, ub, 0.25), opts)
        } else {
            let b = self.support_end().map_or(b, |end| end.min(b));
            if b <= a {
                return Ok(0.0);
            }
            let breaks = geometric_breaks(a, b, 0.5);
            integrate_real(|t| self.g(t).abs(), &breaks, opts)
        }
    }
}

fn ln_gamma(p: f64) -> f64 {
    gamma_fn(p).expect("positive").ln()
}

// Cumulative tails ∫_{t_i}^∞ of the positive-term majorant of the 0F2
// pair's g, on a geometric grid. Reading the entry at the largest t_i ≤ T′
// is a valid bound since the majorant is nonnegative.
fn som_majorant_table(t_final: f64, gamma: f64) -> Result<Vec<(f64, f64)>> {
    let m = |t: f64| {
        let x = t_final * t_final * t / 4.0;
        let f1 = hyp0f2(1.5, 2.0, x).unwrap_or(f64::INFINITY);
        let f2 = hyp0f2(0.5, 1.5, x).unwrap_or(f64::INFINITY);
        (-gamma * t).exp() * (0.5 * t_final * t_final * f1 + t_final / (PI * t).sqrt() * f2)
    };
    let opts = IntegrationOptions { abs_tol: 1e-300, rel_tol: 1e-10, max_intervals: 2000 };
    let first = 1e-3_f64.min(0.1 / gamma);
    // t^{-1/2} at the origin: substitute t = u² on the first piece
    let mut pieces = vec![(0.0, integrate_real(|u| 2.0 * u * m(u * u), &[0.0, first.sqrt()], opts)?)];
    let mut a = first;
    let mut total = pieces[0].1;
    loop {
        let b = a * 1.25;
        let piece = integrate_real(m, &[a, b], opts)?;
        if !piece.is_finite() {
            return Err(Error::Convergence("0F2 tail majorant overflowed".into()));
        }
        pieces.push((a, piece));
        total += piece;
        a = b;
        if a > TAIL_TIME_CAP {
            return Err(Error::Convergence("0F2 tail majorant did not decay".into()));
        }
        // past the peak of e^{−γt}·F the pieces shrink geometrically
        if piece <= 1e-18 * total && a * gamma > 1.0 {
            break;
        }
    }
    let mut acc = 0.0;
    let mut table: Vec<(f64, f64)> = pieces
        .iter()
        .rev()
        .map(|&(t, p)| {
            acc += p;
            (t, acc)
        })
        .collect();
    table.reverse();
    Ok(table)
}

/// Smallest T′ with tail_bound(T′) ≤ eps (bisection, relative resolution 1e-9).
pub fn tail_truncation_time(pair: &LaplacePair, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Contract("tail target must be positive".into()));
    }
    if let Some(end) = pair.support_end() {
        return Ok(end);
    }
    if pair.tail_bound(0.0) <= eps {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while pair.tail_bound(hi) > eps {
        lo = hi;
        hi *= 2.0;
        if hi > TAIL_TIME_CAP {
            return Err(Error::Cap(format!(
                "{} pair: tail bound stays above {eps:e} beyond T' = {TAIL_TIME_CAP:e} \
                 (bound there {:.3e}); use the shifted variant",
                pair.name(),
                pair.tail_bound(TAIL_TIME_CAP)
            )));
        }
    }
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if pair.tail_bound(mid) <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationRow {
    pub z: [f64; 2],
    pub numeric: [f64; 2],
    pub reference: [f64; 2],
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub pair: String,
    pub tol: f64,
    pub rows: Vec<ValidationRow>,
    pub max_deviation: f64,
    pub pass: bool,
}

/// The five standard sample points.
pub fn standard_z_samples() -> Vec<Complex64> {
    vec![
        Complex64::new(0.5, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(2.0, -0.5),
    ]
}

/// ∫₀^∞ g(t)e^{−zt}dt by adaptive quadrature, truncated where the tail
/// bound times e^{−Re z·T′} is below tol/100.
pub fn laplace_numeric(pair: &LaplacePair, z: Complex64, tol: f64) -> Result<Complex64> {
    if !(z.re > 0.0) {
        return Err(Error::Contract(format!("sample point {z} needs a positive real part")));
    }
    let target = tol / 100.0;
    let tp = match pair.support_end() {
        Some(end) => end,
        None => {
            let mut lo = 0.0;
            let mut hi = 1.0;
            while pair.tail_bound(hi) * (-z.re * hi).exp() > target {
                lo = hi;
                hi *= 2.0;
                if hi > TAIL_TIME_CAP {
                    return Err(Error::Cap("no truncation time reaches the validation tolerance".into()));
                }
            }
            while hi - lo > 1e-6 * hi {
                let mid = 0.5 * (lo + hi);
                if pair.tail_bound(mid) * (-z.re * mid).exp() <= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    };
    let opts = IntegrationOptions { abs_tol: tol / 100.0, rel_tol: 0.0, max_intervals: 50_000 };
    let r = if pair.singular_at_zero {
        let f = |u: f64| {
            let t = u * u;
            (-z * t).exp() * (2.0 * u * pair.g(t))
        };
        integrate_breaks(f, &geometric_breaks(0.0, tp.sqrt(), 0.25), opts)?
    } else {
        let f = |t: f64| (-z * t).exp() * pair.g(t);
        integrate_breaks(f, &geometric_breaks(0.0, tp, 0.5), opts)?
    };
    Ok(r.value)
}

pub fn pair_validate(pair: &LaplacePair, z_samples: &[Complex64], tol: f64) -> Result<ValidationReport> {
    let mut rows = Vec::with_capacity(z_samples.len());
    for &z in z_samples {
        let numeric = laplace_numeric(pair, z, tol)?;
        let reference = pair.h(z);
        let deviation = (numeric - reference).norm();
        rows.push(ValidationRow {
            z: [z.re, z.im],
            numeric: [numeric.re, numeric.im],
            reference: [reference.re, reference.im],
            deviation,
            pass: deviation <= tol,
        });
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    Ok(ValidationReport { pair: pair.name().to_string(), tol, pass: max_deviation <= tol, rows, max_deviation })
}
