//! Local propagators `M(r+h, r)` of `dM/dr = Q(r) M` and their composition.
//!
//! Every scheme samples `Q` only at fixed abscissae inside the step, so no
//! derivative of the material profile is needed.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_rational::Ratio;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Zero};

use crate::elastodyn::StateOperator;
use crate::numkernel::{mat_exp, mat_inverse, CMat};
use crate::{Error, Result};

/// Exact rationals used for interpolation weights.
pub type Rational = Ratio<i128>;

/// Guard against `exp` overflow: largest accepted `|h Q|_1`, measured after
/// the block balancing of [`balanced_norm_one`].
pub const MAX_STEP_NORM: f64 = 20.0;
/// Entry magnitude beyond which a global matricant is flagged as growing.
pub const GROWTH_WARNING: f64 = 1e12;

/// Local expansion schemes, listed from lowest to highest nominal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// `I + h Q(r)`.
    Ts1,
    /// `I + h Q + h^2 Q^2 / 2` at the midpoint.
    Ts2,
    /// `exp(h Q(r + h/2))`.
    Exp2a,
    /// Two-point Lagrange series, points 1/4, 3/4.
    Lp2,
    /// `exp(h/2 Q_3/4) exp(h/2 Q_1/4)`.
    Exp2b,
    /// Three-point Lagrange series, points 1/6, 1/2, 5/6.
    Lp3,
    /// Four-point Lagrange series, points 1/8, 3/8, 5/8, 7/8.
    Lp4,
    /// Product of four quarter-step exponentials at 1/8, 3/8, 5/8, 7/8.
    Exp2c,
    /// Fourth-order Magnus integrator on the two Gauss points.
    Mg4,
}

impl Scheme {
    pub const ALL: [Scheme; 9] = [
        Scheme::Ts1,
        Scheme::Ts2,
        Scheme::Exp2a,
        Scheme::Lp2,
        Scheme::Exp2b,
        Scheme::Lp3,
        Scheme::Lp4,
        Scheme::Exp2c,
        Scheme::Mg4,
    ];

    pub fn nominal_order(self) -> u32 {
        match self {
            Scheme::Ts1 => 1,
            Scheme::Ts2 | Scheme::Exp2a | Scheme::Lp2 | Scheme::Exp2b | Scheme::Exp2c => 2,
            Scheme::Lp3 => 3,
            Scheme::Lp4 | Scheme::Mg4 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ts1 => "ts1",
            Scheme::Ts2 => "ts2",
            Scheme::Exp2a => "exp2a",
            Scheme::Lp2 => "lp2",
            Scheme::Exp2b => "exp2b",
            Scheme::Lp3 => "lp3",
            Scheme::Lp4 => "lp4",
            Scheme::Exp2c => "exp2c",
            Scheme::Mg4 => "mg4",
        }
    }

    /// Schemes built from exponentials of `Q` samples; exactly T-unitary on
    /// lossless media.
    pub fn is_exponential(self) -> bool {
        matches!(
            self,
            Scheme::Exp2a | Scheme::Exp2b | Scheme::Exp2c | Scheme::Mg4
        )
    }

    /// Interpolation abscissae of the Lagrange schemes.
    pub fn lagrange_points(self) -> Option<Vec<Rational>> {
        let r = |n, d| Rational::new(n, d);
        match self {
            Scheme::Lp2 => Some(alloc::vec![r(1, 4), r(3, 4)]),
            Scheme::Lp3 => Some(alloc::vec![r(1, 6), r(1, 2), r(5, 6)]),
            Scheme::Lp4 => Some(alloc::vec![r(1, 8), r(3, 8), r(5, 8), r(7, 8)]),
            _ => None,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s))
            .ok_or(Error::InvalidSpan("unknown scheme name"))
    }
}

/// `L_j^(k) = k * int_0^1 L_j(x) x^(k-1) dx` for the Lagrange basis on
/// `points`, in exact arithmetic.
pub fn lagrange_weights(points: &[Rational], k: u32) -> Result<Vec<Rational>> {
    if k == 0 {
        return Err(Error::InvalidSpan("weight index k must be at least 1"));
    }
    for (i, a) in points.iter().enumerate() {
        if points[i + 1..].contains(a) {
            return Err(Error::DuplicatePoints);
        }
    }
    let kk = Rational::from_integer(k as i128);
    let mut out = Vec::with_capacity(points.len());
    for (j, &xj) in points.iter().enumerate() {
        // ascending coefficients of L_j
        let mut poly: Vec<Rational> = alloc::vec![Rational::one()];
        for (l, &xl) in points.iter().enumerate() {
            if l == j {
                continue;
            }
            let d = xj - xl;
            let mut next = alloc::vec![Rational::zero(); poly.len() + 1];
            for (i, &c) in poly.iter().enumerate() {
                next[i + 1] += c / d;
                next[i] -= c * xl / d;
            }
            poly = next;
        }
        let w = poly
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (i, &c)| {
                acc + c * kk / Rational::from_integer(i as i128 + k as i128)
            });
        out.push(w);
    }
    Ok(out)
}

fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Propagator over `[r_from, r_to]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matricant {
    pub m: CMat,
    pub r_from: f64,
    pub r_to: f64,
}

impl Matricant {
    pub fn identity(m: usize, r: f64) -> Self {
        Self {
            m: CMat::identity(2 * m),
            r_from: r,
            r_to: r,
        }
    }

    pub fn dim(&self) -> usize {
        self.m.rows() / 2
    }

    /// `M1..M4`.
    pub fn blocks(&self) -> [CMat; 4] {
        self.m.quarters()
    }

    /// `self` after `inner`: `M(r2, r1) M(r1, r0)`.
    pub fn compose(&self, inner: &Matricant) -> Matricant {
        Matricant {
            m: &self.m * &inner.m,
            r_from: inner.r_from,
            r_to: self.r_to,
        }
    }

    /// `|M^-1 - T M^+ T|_F / |M|_F`.
    pub fn t_unitarity_residual(&self) -> f64 {
        t_unitarity_residual(&self.m)
    }
}

pub fn t_unitarity_residual(m: &CMat) -> f64 {
    let t = CMat::block_swap(m.rows() / 2);
    match mat_inverse(m) {
        Ok(inv) => (&inv - &(&(&t * &m.adjoint()) * &t)).norm_fro() / m.norm_fro(),
        Err(_) => f64::INFINITY,
    }
}

/// A scheme with its sample abscissae and weights resolved once.
#[derive(Debug, Clone)]
pub struct Stepper {
    scheme: Scheme,
    /// Sample abscissae as fractions of the step.
    nodes: Vec<f64>,
    /// Lagrange weights, `weights[k-1][j]`.
    weights: Vec<Vec<f64>>,
}

impl Stepper {
    pub fn new(scheme: Scheme) -> Self {
        let s3 = 3f64.sqrt() / 6.0;
        let (nodes, weights) = match scheme.lagrange_points() {
            Some(pts) => {
                let w = (1..=scheme.nominal_order())
                    .map(|k| {
                        lagrange_weights(&pts, k)
                            .expect("built-in abscissae are distinct")
                            .into_iter()
                            .map(to_f64)
                            .collect()
                    })
                    .collect();
                (pts.into_iter().map(to_f64).collect(), w)
            }
            None => {
                let nodes = match scheme {
                    Scheme::Ts1 => alloc::vec![0.0],
                    Scheme::Ts2 | Scheme::Exp2a => alloc::vec![0.5],
                    Scheme::Exp2b => alloc::vec![0.25, 0.75],
                    Scheme::Exp2c => alloc::vec![0.125, 0.375, 0.625, 0.875],
                    _ => alloc::vec![0.5 - s3, 0.5 + s3],
                };
                (nodes, Vec::new())
            }
        };
        Self {
            scheme,
            nodes,
            weights,
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Radii, as fractions of the step, at which `Q` is sampled.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn step<S: StateOperator + ?Sized>(&self, op: &S, r: f64, h: f64) -> Result<Matricant> {
        if !(h > 0.0 && h.is_finite() && r.is_finite()) {
            return Err(Error::InvalidSpan("step must be positive and finite"));
        }
        let (lo, hi) = op.support();
        let slack = 1e-12 * hi.abs().max(1.0);
        if r < lo - slack || r + h > hi + slack {
            return Err(Error::OutOfSupport {
                r: if r < lo - slack { r } else { r + h },
                r_min: lo,
                r_max: hi,
            });
        }
        let mut hq = Vec::with_capacity(self.nodes.len());
        for &x in &self.nodes {
            let q = op.system_matrix(r + x * h)?;
            let norm = balanced_norm_one(&q) * h;
            if norm > MAX_STEP_NORM {
                return Err(Error::StepTooLarge { norm });
            }
            hq.push(q);
        }
        let dim = hq[0].rows();
        let id = CMat::identity(dim);
        let m = match self.scheme {
            Scheme::Ts1 => &id + &hq[0].scale_re(h),
            Scheme::Ts2 => {
                let a = hq[0].scale_re(h);
                let a2 = (&a * &a).scale_re(0.5);
                &(&id + &a) + &a2
            }
            Scheme::Exp2a => mat_exp(&hq[0].scale_re(h))?,
            Scheme::Exp2b => {
                // later radius applied last
                &mat_exp(&hq[1].scale_re(0.5 * h))? * &mat_exp(&hq[0].scale_re(0.5 * h))?
            }
            Scheme::Exp2c => {
                let mut m = id.clone();
                for q in &hq {
                    m = &mat_exp(&q.scale_re(0.25 * h))? * &m;
                }
                m
            }
            Scheme::Mg4 => {
                let (q1, q2) = (&hq[0], &hq[1]);
                let comm = &(q2 * q1) - &(q1 * q2);
                let omega =
                    &(q1 + q2).scale_re(0.5 * h) + &comm.scale_re(3f64.sqrt() * h * h / 12.0);
                mat_exp(&omega)?
            }
            Scheme::Lp2 | Scheme::Lp3 | Scheme::Lp4 => {
                let mut total = id.clone();
                let mut mk = id;
                let mut coef = 1.0;
                for (k, w) in self.weights.iter().enumerate() {
                    let mut avg = CMat::zeros(dim, dim);
                    for (q, &wj) in hq.iter().zip(w) {
                        avg += &q.scale_re(wj);
                    }
                    mk = &avg * &mk;
                    coef *= h / (k + 1) as f64;
                    total += &mk.scale_re(coef);
                }
                total
            }
        };
        if !m.is_finite() {
            return Err(Error::Overflow);
        }
        Ok(Matricant {
            m,
            r_from: r,
            r_to: r + h,
        })
    }
}

/// `|D Q D^-1|_1` with `D = diag(I, s I)` and `s = sqrt(|Q2|_1 / |Q3|_1)`.
///
/// Displacement and traction differ in scale by a stiffness, which inflates
/// the plain norm without affecting the propagator: `exp(D A D^-1) = D
/// exp(A) D^-1`.
pub fn balanced_norm_one(q: &CMat) -> f64 {
    let m = q.rows() / 2;
    if m == 0 || q.rows() != 2 * m || !q.is_square() {
        return q.norm_one();
    }
    let [_, b, c, _] = q.quarters();
    let (nb, nc) = (b.norm_one(), c.norm_one());
    if !(nb > 0.0 && nc > 0.0) || !(nb * nc).is_finite() {
        return q.norm_one();
    }
    let s = (nb / nc).sqrt();
    (0..2 * m)
        .map(|j| {
            (0..2 * m)
                .map(|i| {
                    let f = match (i < m, j < m) {
                        (true, false) => 1.0 / s,
                        (false, true) => s,
                        _ => 1.0,
                    };
                    q[(i, j)].norm() * f
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// One scheme step `M(r+h, r)`.
pub fn matricant_step<S: StateOperator + ?Sized>(
    op: &S,
    r: f64,
    h: f64,
    scheme: Scheme,
) -> Result<Matricant> {
    Stepper::new(scheme).step(op, r, h)
}

/// Global propagator with a growth diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalMatricant {
    pub matricant: Matricant,
    /// Largest entry magnitude seen in any intermediate product.
    pub max_entry: f64,
    /// Set when `max_entry` exceeded [`GROWTH_WARNING`].
    pub growth_warning: bool,
}

/// `M(r1, r0)` as the left-multiplied product of `steps` equal steps.
pub fn matricant_global<S: StateOperator + ?Sized>(
    op: &S,
    r0: f64,
    r1: f64,
    steps: usize,
    scheme: Scheme,
) -> Result<GlobalMatricant> {
    if !(r0 < r1) {
        return Err(Error::InvalidSpan("global matricant needs r0 < r1"));
    }
    if steps == 0 {
        return Err(Error::InvalidSpan("at least one step is required"));
    }
    let stepper = Stepper::new(scheme);
    let h = (r1 - r0) / steps as f64;
    let mut acc = Matricant::identity(op.dim(), r0);
    let mut max_entry = 1.0f64;
    for i in 0..steps {
        let r = r0 + i as f64 * h;
        let local = stepper.step(op, r, h)?;
        acc = local.compose(&acc);
        max_entry = max_entry.max(acc.m.norm_max());
        if !acc.m.is_finite() {
            return Err(Error::Overflow);
        }
    }
    acc.r_to = r1;
    Ok(GlobalMatricant {
        matricant: acc,
        max_entry,
        growth_warning: max_entry > GROWTH_WARNING,
    })
}
