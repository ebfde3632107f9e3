//! Integer-order cylinder functions `J_n`, `Y_n`, `H_n^(1)`, `H_n^(2)` of
//! complex argument, with first derivatives.
//!
//! `J` uses the ascending series for `|x| < 2` and Miller's backward
//! recurrence otherwise, normalized by the Jacobi-Anger sum. `Y_0`, `Y_1`
//! come from the Neumann series over the same `J` values for `|x| < 25` and
//! from the Hankel expansion beyond; higher orders follow by forward
//! recurrence, which is stable for the dominant solutions.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64, I};

/// Largest supported order.
pub const MAX_ORDER: u32 = 60;
/// Largest argument modulus inside the validated range.
pub const MAX_ABS_ARG: f64 = 200.0;

const SERIES_LIMIT: f64 = 2.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Beyond this `|Im x|` the outgoing Hankel function is built first.
const OFF_AXIS: f64 = 0.5;

/// The four cylinder-function kinds, `l = 1..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CylKind {
    J,
    Y,
    H1,
    H2,
}

impl CylKind {
    pub const ALL: [CylKind; 4] = [CylKind::J, CylKind::Y, CylKind::H1, CylKind::H2];

    /// Kind from the index `l = 1..=4`.
    pub fn from_index(l: u8) -> Option<Self> {
        match l {
            1 => Some(CylKind::J),
            2 => Some(CylKind::Y),
            3 => Some(CylKind::H1),
            4 => Some(CylKind::H2),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            CylKind::J => 1,
            CylKind::Y => 2,
            CylKind::H1 => 3,
            CylKind::H2 => 4,
        }
    }

    fn singular_at_origin(self) -> bool {
        !matches!(self, CylKind::J)
    }
}

/// `f_n(x)` for one kind and order.
pub fn cyl_f(kind: CylKind, n: u32, x: C64) -> Result<C64> {
    Ok(cyl_f_seq(kind, n, x)?[n as usize])
}

/// `f_n'(x)` via `(f_{n-1} - f_{n+1}) / 2`, with `f_{-1} = -f_1`.
pub fn cyl_f_prime(kind: CylKind, n: u32, x: C64) -> Result<C64> {
    let seq = cyl_f_seq(kind, n + 1, x)?;
    Ok(derivative(&seq, n as usize))
}

/// Value and derivative together.
pub fn cyl_f_and_prime(kind: CylKind, n: u32, x: C64) -> Result<(C64, C64)> {
    let seq = cyl_f_seq(kind, n + 1, x)?;
    Ok((seq[n as usize], derivative(&seq, n as usize)))
}

/// Derivative of order `n` from a sequence holding orders `0..=n+1`.
pub fn derivative(seq: &[C64], n: usize) -> C64 {
    let lower = if n == 0 { -seq[1] } else { seq[n - 1] };
    (lower - seq[n + 1]) * 0.5
}

/// `f_0(x), ..., f_nmax(x)`.
///
/// Orders up to `MAX_ORDER + 1` are accepted so that derivatives of order
/// `MAX_ORDER` remain available.
pub fn cyl_f_seq(kind: CylKind, nmax: u32, x: C64) -> Result<Vec<C64>> {
    if nmax > MAX_ORDER + 1 {
        return Err(Error::AccuracyLoss("order above the supported cap"));
    }
    if !(x.re.is_finite() && x.im.is_finite()) {
        return Err(Error::AccuracyLoss("non-finite argument"));
    }
    let ax = x.norm();
    if ax > MAX_ABS_ARG {
        return Err(Error::AccuracyLoss(
            "argument modulus above the validated range",
        ));
    }
    if ax == 0.0 {
        if kind.singular_at_origin() {
            return Err(Error::DomainError);
        }
        let mut out = vec![C64::new(0.0, 0.0); nmax as usize + 1];
        out[0] = C64::new(1.0, 0.0);
        return Ok(out);
    }
    let nmax = nmax as usize;
    let out = if x.im.abs() > OFF_AXIS {
        off_axis_seq(kind, nmax, x)?
    } else {
        match kind {
            CylKind::J => bessel_j_seq(nmax, x),
            CylKind::Y => bessel_y_seq(nmax, x),
            CylKind::H1 | CylKind::H2 => {
                let sign = if kind == CylKind::H1 { 1.0 } else { -1.0 };
                if ax >= ASYMPTOTIC_LIMIT {
                    let (h0, h1) = hankel_asymptotic(x, sign);
                    forward_recurrence(h0, h1, nmax, x)
                } else {
                    let j = bessel_j_seq(nmax, x);
                    let y = bessel_y_seq(nmax, x);
                    let mut h = Vec::with_capacity(nmax + 1);
                    for (jn, yn) in j.iter().zip(&y) {
                        let v = jn + I * sign * yn;
                        if v.norm() < 1e-4 * jn.norm().max(yn.norm()) {
                            return Err(Error::AccuracyLoss("cancellation in J + iY"));
                        }
                        h.push(v);
                    }
                    h
                }
            }
        }
    };
    if out.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Overflow);
    }
    Ok(out)
}

/// Off the real axis `Y_n` has a trough near `n ~ |x|` that forward
/// recurrence cannot follow, so the decaying Hankel function (the dominant
/// solution in `n`) is recurred instead and `Y = -i (H1 - J)`. Arguments in
/// the lower half plane are reflected: `f(x) = conj(f(conj x))` for `J`,
/// `Y`, while `H1` and `H2` swap.
/// `H1_0..=H1_nmax` for large arguments, including `|x| > MAX_ABS_ARG`, from
/// the large-argument expansion and forward recurrence. Used for far-field
/// evaluation where only outgoing waves are needed.
pub fn hankel1_seq_far(nmax: u32, x: C64) -> Result<Vec<C64>> {
    let ax = x.norm();
    if !(ax >= ASYMPTOTIC_LIMIT) || !x.re.is_finite() || !x.im.is_finite() || x.re <= 0.0 {
        return Err(Error::AccuracyLoss(
            "far-field Hankel needs a large argument in the right half plane",
        ));
    }
    if nmax as f64 > 0.5 * ax || nmax > MAX_ORDER + 1 {
        return Err(Error::AccuracyLoss(
            "far-field Hankel order too large for the argument",
        ));
    }
    let (h0, h1) = hankel_asymptotic(x, 1.0);
    let out = forward_recurrence(h0, h1, nmax as usize, x);
    if out.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Overflow);
    }
    Ok(out)
}

fn off_axis_seq(kind: CylKind, nmax: usize, x: C64) -> Result<Vec<C64>> {
    if x.im < 0.0 {
        let mirrored = match kind {
            CylKind::H1 => CylKind::H2,
            CylKind::H2 => CylKind::H1,
            k => k,
        };
        return Ok(off_axis_seq(mirrored, nmax, x.conj())?
            .into_iter()
            .map(|v| v.conj())
            .collect());
    }
    let j = bessel_j_seq(nmax, x);
    if kind == CylKind::J {
        return Ok(j);
    }
    let (h0, h1) = if x.norm() >= ASYMPTOTIC_LIMIT {
        hankel_asymptotic(x, 1.0)
    } else if x.norm() >= SERIES_LIMIT {
        hankel1_from_k(x)?
    } else {
        let y = bessel_y_seq(1, x);
        let j01 = bessel_j_seq(1, x);
        (j01[0] + I * y[0], j01[1] + I * y[1])
    };
    let h = forward_recurrence(h0, h1, nmax, x);
    Ok(match kind {
        CylKind::H1 => h,
        CylKind::Y => h.iter().zip(&j).map(|(hn, jn)| -I * (hn - jn)).collect(),
        _ => h.iter().zip(&j).map(|(hn, jn)| jn * 2.0 - hn).collect(),
    })
}

/// `H1_0`, `H1_1` for `Im x > 0` through `H1_n(x) = (2 / (pi i)) i^-n K_n(-i x)`,
/// with `K_0`, `K_1` from Temme's continued fraction.
fn hankel1_from_k(x: C64) -> Result<(C64, C64)> {
    let w = -I * x;
    let (k0, k1) = bessel_k01_cf(w)?;
    let f = C64::new(0.0, -2.0 / PI);
    Ok((f * k0, f * k1 * (-I)))
}

/// Steed/Temme continued fraction for `K_0(w)`, `K_1(w)`, `Re w > 0`,
/// `|w| >= 2`.
fn bessel_k01_cf(w: C64) -> Result<(C64, C64)> {
    let one = C64::new(1.0, 0.0);
    let mut b = (one + w) * 2.0;
    let mut d = b.inv();
    let mut delh = d;
    let mut h = d;
    let mut q1 = C64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = C64::new(0.25, 0.0);
    let mut q = a1;
    let mut cc = a1;
    let mut a = -a1;
    let mut s = one + q * delh;
    let mut converged = false;
    for i in 2..20000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        cc = -a * cc / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += cc * qnew;
        b += 2.0;
        d = (b + a * d).inv();
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1e-17 * s.norm() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::AccuracyLoss(
            "continued fraction for K did not converge",
        ));
    }
    h *= a1;
    let k0 = (C64::new(FRAC_PI_2, 0.0) / w).sqrt() * (-w).exp() / s;
    let k1 = k0 * (w + 0.5 - h) / w;
    Ok((k0, k1))
}

fn forward_recurrence(f0: C64, f1: C64, nmax: usize, x: C64) -> Vec<C64> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(f0);
    if nmax >= 1 {
        out.push(f1);
    }
    let inv = x.inv();
    for k in 1..nmax {
        let next = out[k] * (2.0 * k as f64) * inv - out[k - 1];
        out.push(next);
    }
    out
}

/// Ascending series `(x/2)^n sum_k (-x^2/4)^k / (k! (n+k)!)`.
fn bessel_j_series(n: usize, x: C64) -> C64 {
    let half = x * 0.5;
    let mut lead = C64::new(1.0, 0.0);
    for k in 1..=n {
        lead *= half / k as f64;
    }
    let q = -half * half;
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..60 {
        term *= q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    lead * sum
}

fn miller_start(nmax: usize, ax: f64) -> usize {
    let m = (nmax as f64).max(ax);
    let start = m + 16.0 + (160.0 * m.max(1.0)).sqrt();
    // even start keeps the normalization sum bookkeeping simple
    ((start as usize) / 2 + 1) * 2
}

/// `J_0..J_len-1` by Miller's backward recurrence.
fn miller_j(len: usize, x: C64) -> Vec<C64> {
    let start = miller_start(len, x.norm());
    let inv = x.inv();
    // s picks the Jacobi-Anger normalization e^{-isx} whose size tracks J
    let s = if x.im >= 0.0 { 1.0 } else { -1.0 };
    let phase = C64::new(0.0, -s); // (-is)
    let mut vals = vec![C64::new(0.0, 0.0); start + 2];
    vals[start] = C64::new(1e-30, 0.0);
    for k in (1..=start).rev() {
        vals[k - 1] = vals[k] * (2.0 * k as f64) * inv - vals[k + 1];
        if vals[k - 1].norm() > 1e150 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-150;
            }
        }
    }
    let mut norm = vals[0];
    let mut p = C64::new(1.0, 0.0);
    for v in vals.iter().take(start + 1).skip(1) {
        p *= phase;
        norm += p * v * 2.0;
    }
    let target = (-I * s * x).exp();
    // divide in two stages: |norm|^2 may overflow
    let mag = norm.norm();
    let scale = target * (norm / mag).conj() / mag;
    vals.truncate(len);
    for v in vals.iter_mut() {
        *v *= scale;
    }
    vals
}

fn bessel_j_seq(nmax: usize, x: C64) -> Vec<C64> {
    if x.norm() < SERIES_LIMIT {
        (0..=nmax).map(|n| bessel_j_series(n, x)).collect()
    } else {
        miller_j(nmax + 1, x)
    }
}

fn bessel_y_seq(nmax: usize, x: C64) -> Vec<C64> {
    let (y0, y1) = if x.norm() >= ASYMPTOTIC_LIMIT {
        let (a0, a1) = hankel_asymptotic(x, 1.0);
        let (b0, b1) = hankel_asymptotic(x, -1.0);
        ((a0 - b0) / (2.0 * I), (a1 - b1) / (2.0 * I))
    } else {
        neumann_y01(x)
    };
    forward_recurrence(y0, y1, nmax, x)
}

/// Neumann series for `Y_0`, `Y_1`:
/// `(pi/2) Y_0 = (ln(x/2) + gamma) J_0 - 2 sum_k (-1)^k J_2k / k`,
/// `(pi/2) Y_1 = -J_0/x + (ln(x/2) + gamma - 1) J_1
///               - sum_k (-1)^k (2k+1) J_2k+1 / (k (k+1))`.
fn neumann_y01(x: C64) -> (C64, C64) {
    let len = miller_start(0, x.norm()) + 1;
    let j = if x.norm() < SERIES_LIMIT {
        (0..len).map(|n| bessel_j_series(n, x)).collect()
    } else {
        miller_j(len, x)
    };
    let log_term = (x * 0.5).ln() + EULER_GAMMA;
    let mut s0 = C64::new(0.0, 0.0);
    let mut s1 = C64::new(0.0, 0.0);
    let mut sign = -1.0;
    let mut k = 1;
    while 2 * k + 1 < len {
        let kf = k as f64;
        s0 += j[2 * k] * (sign / kf);
        s1 += j[2 * k + 1] * (sign * (2.0 * kf + 1.0) / (kf * (kf + 1.0)));
        sign = -sign;
        k += 1;
    }
    let y0 = (log_term * j[0] - s0 * 2.0) / FRAC_PI_2;
    let y1 = (-j[0] / x + (log_term - 1.0) * j[1] - s1) / FRAC_PI_2;
    (y0, y1)
}

/// Large-argument Hankel expansion of `H_0` and `H_1` of the first
/// (`sign = 1`) or second (`sign = -1`) kind.
fn hankel_asymptotic(x: C64, sign: f64) -> (C64, C64) {
    let pref = (C64::new(2.0 / PI, 0.0) / x).sqrt();
    let one = |nu: f64| -> C64 {
        let mu = 4.0 * nu * nu;
        let is = I * sign;
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        let mut prev = f64::INFINITY;
        for k in 1..80 {
            let kf = k as f64;
            let odd = 2.0 * kf - 1.0;
            term *= is * (mu - odd * odd) / (kf * 8.0) / x;
            let t = term.norm();
            if t > prev {
                break;
            }
            sum += term;
            prev = t;
            if t <= 1e-17 * sum.norm() {
                break;
            }
        }
        let phase = x - nu * FRAC_PI_2 - FRAC_PI_4;
        pref * (I * sign * phase).exp() * sum
    };
    (one(0.0), one(1.0))
}
