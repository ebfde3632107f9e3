//! Conditional and two-point impedances.
//!
//! With `V = -i z U`, the conditional impedance obeys the Riccati equation
//! `z' = -z Q1 + Q4 z + i z Q2 z + i Q3`. Integrating it directly fails at
//! the poles of `z`; the Möbius scheme instead updates `z` through the
//! fractional-linear action of a local matricant,
//! `z(r+h) = i (M3 - i M4 z) (M1 - i M2 z)^-1`, which passes through poles.

use alloc::vec::Vec;

use crate::elastodyn::StateOperator;
use crate::matricant::{Matricant, Scheme, Stepper};
use crate::numkernel::{mat_inverse, mat_inverse_with_condition, CMat};
use crate::{Error, Result, I};

/// Condition number of `M1 - i M2 z` above which a step is reported as
/// landing on an impedance pole.
pub const POLE_CONDITION: f64 = 1e14;
/// Entry magnitude marking blowup of the naive integrator.
pub const BLOWUP_THRESHOLD: f64 = 1e10;

/// `z(r)` with `V(r) = -i z(r) U(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalImpedance {
    pub z: CMat,
    pub r: f64,
}

impl ConditionalImpedance {
    pub fn new(z: CMat, r: f64) -> Self {
        Self { z, r }
    }

    pub fn dim(&self) -> usize {
        self.z.rows()
    }

    /// Determinant of the upper-left 2x2 block, the scalar diagnostic used
    /// in convergence studies.
    pub fn det2(&self) -> crate::C64 {
        crate::numkernel::det2(&self.z)
    }

    pub fn admittance(&self) -> Result<Admittance> {
        Ok(Admittance {
            a: mat_inverse(&self.z)?,
            r: self.r,
        })
    }
}

/// `a = z^-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Admittance {
    pub a: CMat,
    pub r: f64,
}

/// `Z(r_to, r_from)`, mapping `(U(r_from), U(r_to))` to
/// `(i V(r_from), -i V(r_to))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPointImpedance {
    pub z: CMat,
    pub r_from: f64,
    pub r_to: f64,
}

impl TwoPointImpedance {
    pub fn dim(&self) -> usize {
        self.z.rows() / 2
    }

    /// `Z1..Z4`.
    pub fn blocks(&self) -> [CMat; 4] {
        self.z.quarters()
    }

    pub fn hermitian_residual(&self) -> f64 {
        crate::numkernel::hermitian_residual(&self.z)
    }
}

/// Informational record of a step whose denominator was nearly singular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleCrossing {
    pub r_from: f64,
    pub r_to: f64,
    pub condition: f64,
}

fn split(q: &CMat) -> [CMat; 4] {
    q.quarters()
}

/// `dz/dr = -z Q1 + Q4 z + i z Q2 z + i Q3`.
pub fn riccati_rhs(z: &CMat, q: &CMat) -> CMat {
    let [q1, q2, q3, q4] = split(q);
    let zq2z = &(z * &q2) * z;
    &(&(&(&q4 * z) - &(z * &q1)) + &zq2z.scale(I)) + &q3.scale(I)
}

/// `da/dr = -i a Q3 a - a Q4 + Q1 a - i Q2`.
pub fn admittance_rhs(a: &CMat, q: &CMat) -> CMat {
    let [q1, q2, q3, q4] = split(q);
    let aq3a = &(a * &q3) * a;
    &(&(&(&q1 * a) - &(a * &q4)) - &aq3a.scale(I)) - &q2.scale(I)
}

/// Result of one Möbius update.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusStep {
    pub z: ConditionalImpedance,
    /// Condition number of the denominator `M1 - i M2 z`.
    pub condition: f64,
    pub pole: Option<PoleCrossing>,
}

/// `z' = i (M3 - i M4 z) (M1 - i M2 z)^-1`.
pub fn mobius_step(z: &ConditionalImpedance, m: &Matricant) -> Result<MobiusStep> {
    if m.dim() != z.dim() {
        return Err(Error::Dimension("matricant and impedance sizes differ"));
    }
    let [m1, m2, m3, m4] = m.blocks();
    let den = &m1 - &(&m2 * &z.z).scale(I);
    let num = &m3 - &(&m4 * &z.z).scale(I);
    let (inv, condition) = mat_inverse_with_condition(&den)?;
    let zn = (&num * &inv).scale(I);
    let pole = (condition > POLE_CONDITION).then_some(PoleCrossing {
        r_from: m.r_from,
        r_to: m.r_to,
        condition,
    });
    Ok(MobiusStep {
        z: ConditionalImpedance { z: zn, r: m.r_to },
        condition,
        pole,
    })
}

/// `z(r) = i (M3 - i M4 z0) (M1 - i M2 z0)^-1` with a global matricant.
pub fn impedance_from_matricant(
    m: &Matricant,
    z0: &ConditionalImpedance,
) -> Result<ConditionalImpedance> {
    Ok(mobius_step(z0, m)?.z)
}

/// Final impedance of a march together with the steps that touched a pole.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpedanceMarch {
    pub z: ConditionalImpedance,
    pub poles: Vec<PoleCrossing>,
}

/// March `z0` from `r0` to `r1` in `steps` equal Möbius steps.
pub fn integrate_impedance<S: StateOperator + ?Sized>(
    op: &S,
    z0: &ConditionalImpedance,
    r0: f64,
    r1: f64,
    steps: usize,
    scheme: Scheme,
) -> Result<ImpedanceMarch> {
    integrate_impedance_with(op, z0, r0, r1, steps, scheme, |_| {})
}

/// As [`integrate_impedance`], calling `observe` after every step.
pub fn integrate_impedance_with<S: StateOperator + ?Sized>(
    op: &S,
    z0: &ConditionalImpedance,
    r0: f64,
    r1: f64,
    steps: usize,
    scheme: Scheme,
    mut observe: impl FnMut(&ConditionalImpedance),
) -> Result<ImpedanceMarch> {
    check_span(z0, r0, r1, steps)?;
    if z0.dim() != op.dim() {
        return Err(Error::Dimension(
            "initial impedance does not match the system",
        ));
    }
    let stepper = Stepper::new(scheme);
    let h = (r1 - r0) / steps as f64;
    let mut z = ConditionalImpedance {
        z: z0.z.clone(),
        r: r0,
    };
    let mut poles = Vec::new();
    for i in 0..steps {
        let r = r0 + i as f64 * h;
        let m = stepper.step(op, r, h)?;
        let out = mobius_step(&z, &m)?;
        if let Some(p) = out.pole {
            poles.push(p);
        }
        z = out.z;
        observe(&z);
    }
    z.r = r1;
    Ok(ImpedanceMarch { z, poles })
}

fn check_span(z0: &ConditionalImpedance, r0: f64, r1: f64, steps: usize) -> Result<()> {
    if !(r0 < r1) {
        return Err(Error::InvalidSpan("marching requires r0 < r1"));
    }
    if steps == 0 {
        return Err(Error::InvalidSpan("at least one step is required"));
    }
    if (z0.r - r0).abs() > 1e-12 * r0.abs().max(1.0) {
        return Err(Error::InvalidSpan("initial impedance is not given at r0"));
    }
    Ok(())
}

/// `Z1 = -i M2^-1 M1`, `Z2 = i M2^-1`, `Z3 = i M4 M2^-1 M1 - i M3`,
/// `Z4 = -i M4 M2^-1`.
pub fn twopoint_from_matricant(m: &Matricant) -> Result<TwoPointImpedance> {
    let [m1, m2, m3, m4] = m.blocks();
    let (m2i, cond) = mat_inverse_with_condition(&m2).map_err(|_| Error::DegenerateSpan)?;
    if cond > 1e15 {
        return Err(Error::DegenerateSpan);
    }
    let m4m2i = &m4 * &m2i;
    let z1 = (&m2i * &m1).scale(-I);
    let z2 = m2i.scale(I);
    let z3 = (&(&m4m2i * &m1) - &m3).scale(I);
    let z4 = m4m2i.scale(-I);
    Ok(TwoPointImpedance {
        z: CMat::from_blocks(&z1, &z2, &z3, &z4),
        r_from: m.r_from,
        r_to: m.r_to,
    })
}

/// `M1 = -Z2^-1 Z1`, `M2 = i Z2^-1`, `M3 = i Z3 - i Z4 Z2^-1 Z1`,
/// `M4 = -Z4 Z2^-1`.
pub fn matricant_from_twopoint(zp: &TwoPointImpedance) -> Result<Matricant> {
    let [z1, z2, z3, z4] = zp.blocks();
    let z2i = mat_inverse(&z2)?;
    let z2i_z1 = &z2i * &z1;
    let m1 = -&z2i_z1;
    let m2 = z2i.scale(I);
    let m3 = (&z3 - &(&z4 * &z2i_z1)).scale(I);
    let m4 = -(&z4 * &z2i);
    Ok(Matricant {
        m: CMat::from_blocks(&m1, &m2, &m3, &m4),
        r_from: zp.r_from,
        r_to: zp.r_to,
    })
}

/// `z(r) = Z3 (Z1 - z0)^-1 Z2 - Z4` for `z0` given at `Z.r_from`.
pub fn conditional_from_twopoint(
    zp: &TwoPointImpedance,
    z0: &ConditionalImpedance,
) -> Result<ConditionalImpedance> {
    if z0.dim() != zp.dim() {
        return Err(Error::Dimension("impedance sizes differ"));
    }
    let [z1, z2, z3, z4] = zp.blocks();
    let (inv, cond) =
        mat_inverse_with_condition(&(&z1 - &z0.z)).map_err(|_| Error::ResonantInner)?;
    if cond > 1e15 {
        return Err(Error::ResonantInner);
    }
    Ok(ConditionalImpedance {
        z: &(&(&z3 * &inv) * &z2) - &z4,
        r: zp.r_to,
    })
}

/// Output of the classical fourth-order explicit integration of the Riccati
/// equation.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveTrace {
    /// `(r, z(r))` after every completed step, including the start.
    pub samples: Vec<ConditionalImpedance>,
    /// First radius where an entry of `z` exceeded [`BLOWUP_THRESHOLD`].
    pub blowup_at: Option<f64>,
}

/// Integrates the Riccati equation with the classical four-stage explicit
/// scheme. Stops early once `z` is no longer finite.
pub fn naive_riccati_integrate<S: StateOperator + ?Sized>(
    op: &S,
    z0: &ConditionalImpedance,
    r0: f64,
    r1: f64,
    steps: usize,
) -> Result<NaiveTrace> {
    check_span(z0, r0, r1, steps)?;
    let h = (r1 - r0) / steps as f64;
    let mut z = z0.z.clone();
    let mut samples = alloc::vec![ConditionalImpedance {
        z: z.clone(),
        r: r0
    }];
    let mut blowup_at = None;
    for i in 0..steps {
        let r = r0 + i as f64 * h;
        let qa = op.system_matrix(r)?;
        let qb = op.system_matrix(r + 0.5 * h)?;
        let qc = op.system_matrix(r + h)?;
        let k1 = riccati_rhs(&z, &qa);
        let k2 = riccati_rhs(&(&z + &k1.scale_re(0.5 * h)), &qb);
        let k3 = riccati_rhs(&(&z + &k2.scale_re(0.5 * h)), &qb);
        let k4 = riccati_rhs(&(&z + &k3.scale_re(h)), &qc);
        let incr = &(&k1 + &k2.scale_re(2.0)) + &(&k3.scale_re(2.0) + &k4);
        z = &z + &incr.scale_re(h / 6.0);
        let rn = if i + 1 == steps { r1 } else { r + h };
        if blowup_at.is_none() && !(z.norm_max() <= BLOWUP_THRESHOLD) {
            blowup_at = Some(rn);
        }
        if !z.is_finite() {
            break;
        }
        samples.push(ConditionalImpedance {
            z: z.clone(),
            r: rn,
        });
    }
    Ok(NaiveTrace { samples, blowup_at })
}
