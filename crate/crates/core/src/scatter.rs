//! Acoustic plane-wave scattering from an elastic cylinder in fluid.
//!
//! Incidence is normal to the axis (`kz = 0`), time dependence
//! `exp(-i w t)`, and the incident pressure has unit amplitude up to the
//! factor `K k` carried by the radial stress. Only `n >= 0` is evaluated;
//! `B_{-n} = B_n` and the sums fold into `eps_n cos(n theta)` form.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};

#[allow(unused_imports)]
use num_traits::Float;

use crate::cylfun::{cyl_f_and_prime, cyl_f_seq, hankel1_seq_far, CylKind, MAX_ABS_ARG, MAX_ORDER};
use crate::elastodyn::{ElasticSystem, RadialProfile, WaveContext};
use crate::impedance::{conditional_from_twopoint, integrate_impedance, ConditionalImpedance};
use crate::matricant::Scheme;
use crate::numkernel::{mat_inverse_with_condition, CMat};
use crate::tilayers::{global_twopoint, layers_from_profile, ti_conditional_impedance, TiMaterial};
use crate::{c, Error, Result, C64, I};

/// Magnitude below which partial-wave coefficients count as converged.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Exterior fluid. In normalized units `K = rho_f = 1` and `k = ka`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidHalfSpace {
    pub bulk_modulus: f64,
    pub k: f64,
    pub rho_f: f64,
}

impl FluidHalfSpace {
    pub fn new(bulk_modulus: f64, k: f64, rho_f: f64) -> Result<Self> {
        if !(bulk_modulus > 0.0 && k > 0.0 && rho_f > 0.0)
            || !(bulk_modulus * k * rho_f).is_finite()
        {
            return Err(Error::InvalidScattering(
                "fluid parameters must be positive",
            ));
        }
        Ok(Self {
            bulk_modulus,
            k,
            rho_f,
        })
    }

    /// Reference fluid at frequency `ka` for a cylinder of unit radius.
    pub fn normalized(ka: f64) -> Result<Self> {
        Self::new(1.0, ka, 1.0)
    }

    /// Angular frequency, `w = k sqrt(K / rho_f)`.
    pub fn omega(&self) -> f64 {
        self.k * (self.bulk_modulus / self.rho_f).sqrt()
    }
}

/// Scalar surface impedance `z0 = -a sigma_rr / u_r` under zero tangential
/// traction. For the 2x2 in-plane block this is `p1 - q1 p2 / q2`; the 3x3
/// form eliminates both tangential components by a Schur complement.
pub fn scalar_impedance_z0(z2: &ConditionalImpedance) -> Result<C64> {
    let z = &z2.z;
    let m = z.rows();
    if m < 2 || !z.is_square() {
        return Err(Error::Dimension(
            "surface impedance needs an in-plane block",
        ));
    }
    let tang: Vec<usize> = (1..m).collect();
    let ztt = z.select(&tang);
    let scale = z.norm_max();
    if m == 2 {
        let q2 = ztt[(0, 0)];
        if !(q2.norm() > 1e-14 * scale) {
            return Err(Error::TangentialResonance);
        }
        return Ok(z[(0, 0)] - z[(0, 1)] * z[(1, 0)] / q2);
    }
    let (inv, cond) = mat_inverse_with_condition(&ztt).map_err(|_| Error::TangentialResonance)?;
    if cond > 1e14 {
        return Err(Error::TangentialResonance);
    }
    let mut acc = z[(0, 0)];
    for i in 0..m - 1 {
        for j in 0..m - 1 {
            acc -= z[(0, i + 1)] * inv[(i, j)] * z[(j + 1, 0)];
        }
    }
    Ok(acc)
}

/// Partial-wave coefficient
/// `B_n = -(K ka J_n - z0 J_n') / (K ka H_n - z0 H_n')` at `x = ka`.
///
/// The sign of `z0` follows from `u_r = (rho_f w^2)^-1 dp/dr`; with it a
/// zero impedance gives the pressure-release and an infinite one the rigid
/// cylinder.
pub fn scattering_coefficient(n: u32, ka: f64, bulk_modulus: f64, z0: C64) -> Result<C64> {
    if !(ka > 0.0) {
        return Err(Error::InvalidScattering("ka must be positive"));
    }
    let x = c(ka);
    let (j, jp) = cyl_f_and_prime(CylKind::J, n, x)?;
    let (h, hp) = cyl_f_and_prime(CylKind::H1, n, x)?;
    let kka = bulk_modulus * ka;
    if !(z0.re.is_finite() && z0.im.is_finite()) {
        return Ok(-jp / hp);
    }
    Ok(-(j * kka - z0 * jp) / (h * kka - z0 * hp))
}

fn eps(n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        2.0
    }
}

/// Far-field amplitude with `p_s ~ K k f(theta) exp(ikr) / sqrt(r)`:
/// `f = sqrt(2 / (pi k)) exp(-i pi/4) sum eps_n B_n cos(n theta)`.
pub fn form_function(theta: f64, b: &[C64], ka: f64) -> C64 {
    let sum = b.iter().enumerate().fold(c(0.0), |acc, (n, bn)| {
        acc + *bn * (eps(n) * (n as f64 * theta).cos())
    });
    sum * (2.0 / (PI * ka)).sqrt() * C64::from_polar(1.0, -FRAC_PI_4)
}

/// Total cross section from the forward amplitude (optical theorem),
/// `-(4/k) Re sum eps_n B_n`.
pub fn total_cross_section(b: &[C64], ka: f64) -> f64 {
    let s = b
        .iter()
        .enumerate()
        .fold(0.0, |acc, (n, bn)| acc + eps(n) * bn.re);
    -4.0 * s / ka
}

/// Scattered power per unit incident intensity, `(4/k) sum eps_n |B_n|^2`.
pub fn scattered_power(b: &[C64], ka: f64) -> f64 {
    4.0 / ka
        * b.iter()
            .enumerate()
            .fold(0.0, |acc, (n, bn)| acc + eps(n) * bn.norm_sqr())
}

fn outgoing_seq(nmax: u32, x: f64) -> Result<Vec<C64>> {
    if x <= MAX_ABS_ARG {
        cyl_f_seq(CylKind::H1, nmax, c(x))
    } else {
        hankel1_seq_far(nmax, c(x))
    }
}

/// Scattered pressure `K k sum eps_n i^n B_n H_n(kr) cos(n theta)` at
/// polar points `(r, theta)` with `r >= a`.
pub fn scattered_pressure(
    points: &[(f64, f64)],
    b: &[C64],
    ka: f64,
    bulk_modulus: f64,
) -> Result<Vec<C64>> {
    let nmax = b.len().saturating_sub(1) as u32;
    points
        .iter()
        .map(|&(r, theta)| {
            if !(r >= 1.0 - 1e-12) {
                return Err(Error::InteriorPoint { r });
            }
            let h = outgoing_seq(nmax, ka * r)?;
            let mut acc = c(0.0);
            let mut ipow = c(1.0);
            for (n, bn) in b.iter().enumerate() {
                acc += ipow * *bn * h[n] * (eps(n) * (n as f64 * theta).cos());
                ipow *= I;
            }
            Ok(acc * (bulk_modulus * ka))
        })
        .collect()
}

/// Total pressure `p = -sigma_rr`. The incident part is summed in closed
/// form, `K k exp(i k r cos(theta))`, so the result does not depend on the
/// partial-wave truncation of the incident wave.
pub fn pressure_field(
    points: &[(f64, f64)],
    b: &[C64],
    ka: f64,
    bulk_modulus: f64,
) -> Result<Vec<C64>> {
    let scat = scattered_pressure(points, b, ka, bulk_modulus)?;
    Ok(points
        .iter()
        .zip(scat)
        .map(|(&(r, theta), ps)| (I * (ka * r * theta.cos())).exp() * (bulk_modulus * ka) + ps)
        .collect())
}

/// How the conditional impedance at the surface is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceMethod {
    /// Möbius integration of the Riccati equation through the profile.
    Integrate { scheme: Scheme, steps: usize },
    /// Layer two-point impedances folded outward (piecewise-uniform TI).
    Recursion,
}

/// Impedance imposed at the inner radius `b` of the profile.
#[derive(Clone, Copy)]
pub enum InnerCondition<'a> {
    /// Solid core of the innermost material: `z^1(b)` with regular `J`.
    SolidCore,
    /// Hollow interior, `z(b) = 0`.
    TractionFree,
    /// Caller-supplied `z(b)` per circumferential order, full 3x3 form.
    Supplied(&'a (dyn Fn(u32) -> Result<CMat> + Sync)),
}

impl core::fmt::Debug for InnerCondition<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            InnerCondition::SolidCore => f.write_str("SolidCore"),
            InnerCondition::TractionFree => f.write_str("TractionFree"),
            InnerCondition::Supplied(_) => f.write_str("Supplied(..)"),
        }
    }
}

/// Inputs of one scattering solve.
#[derive(Debug, Clone, Copy)]
pub struct ScatteringConfig<'a> {
    pub profile: &'a RadialProfile,
    pub ka: f64,
    pub fluid: FluidHalfSpace,
    pub method: SurfaceMethod,
    pub inner: InnerCondition<'a>,
    /// Number of form-function samples on `[0, pi]`.
    pub angles: usize,
}

impl<'a> ScatteringConfig<'a> {
    /// Normalized fluid, solid core, given surface method, 181 angles.
    pub fn new(profile: &'a RadialProfile, ka: f64, method: SurfaceMethod) -> Result<Self> {
        Ok(Self {
            profile,
            ka,
            fluid: FluidHalfSpace::normalized(ka)?,
            method,
            inner: InnerCondition::SolidCore,
            angles: 181,
        })
    }
}

/// Partial-wave solution at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringResult {
    /// `B_0 ..= B_{N_max}`.
    pub b: Vec<C64>,
    pub ka: f64,
    pub sigma_tot: f64,
    /// `(theta, f(theta))` on `[0, pi]`.
    pub f_samples: Vec<(f64, C64)>,
}

impl ScatteringResult {
    pub fn n_max(&self) -> usize {
        self.b.len() - 1
    }

    pub fn backscatter(&self) -> C64 {
        form_function(PI, &self.b, self.ka)
    }

    /// Largest deviation of `|1 + 2 B_n|` from one.
    pub fn unitarity_defect(&self) -> f64 {
        self.b.iter().fold(0.0, |m: f64, bn| {
            m.max(((c(1.0) + *bn * 2.0).norm() - 1.0).abs())
        })
    }
}

/// Default truncation order `2 ceil(ka) + 12`.
pub fn default_n_max(ka: f64) -> u32 {
    2 * ka.ceil() as u32 + 12
}

fn in_plane_decouples(profile: &RadialProfile) -> bool {
    match profile {
        RadialProfile::PiecewiseUniform(layers) => layers
            .iter()
            .all(|l| l.material.stiffness.is_z_mirror_symmetric()),
        RadialProfile::Smooth { r_min, r_max, .. } => (0..=32).all(|i| {
            let r = r_min + (r_max - r_min) * i as f64 / 32.0;
            profile
                .material_at(r)
                .map(|m| m.stiffness.is_z_mirror_symmetric())
                .unwrap_or(false)
        }),
    }
}

/// Conditional impedance at the outer surface for order `n`.
pub fn surface_impedance(cfg: &ScatteringConfig<'_>, n: u32) -> Result<ConditionalImpedance> {
    let m = if in_plane_decouples(cfg.profile) {
        2
    } else {
        3
    };
    let ctx = WaveContext::with_dim(cfg.fluid.omega(), n, 0.0, m)?;
    let (r_min, r_max) = cfg.profile.support();
    let reduce = |z: CMat| {
        if m == 3 {
            z
        } else {
            z.select(ctx.displacement_indices())
        }
    };
    let inner_at = |r: f64| -> Result<ConditionalImpedance> {
        match cfg.inner {
            InnerCondition::SolidCore => {
                let mat = TiMaterial::from_material(&cfg.profile.material_at(r)?)?;
                ti_conditional_impedance(CylKind::J, &mat, &ctx, r)
            }
            InnerCondition::TractionFree => Ok(ConditionalImpedance::new(CMat::zeros(m, m), r)),
            InnerCondition::Supplied(f) => Ok(ConditionalImpedance::new(reduce(f(n)?), r)),
        }
    };
    match cfg.method {
        SurfaceMethod::Integrate { scheme, steps } => {
            if !(r_min > 0.0) {
                return Err(Error::InvalidScattering(
                    "integration needs an inner radius > 0",
                ));
            }
            let sys = ElasticSystem::new(cfg.profile, ctx);
            Ok(integrate_impedance(&sys, &inner_at(r_min)?, r_min, r_max, steps, scheme)?.z)
        }
        SurfaceMethod::Recursion => {
            let mut layers = layers_from_profile(cfg.profile)?;
            if layers[0].r_inner == 0.0 {
                let core = layers.remove(0);
                let z1 = ti_conditional_impedance(CylKind::J, &core.material, &ctx, core.r_outer)?;
                if layers.is_empty() {
                    return Ok(z1);
                }
                return conditional_from_twopoint(&global_twopoint(&layers, &ctx)?, &z1);
            }
            conditional_from_twopoint(&global_twopoint(&layers, &ctx)?, &inner_at(r_min)?)
        }
    }
}

/// Solves for `B_0 ..= B_N`, `N >= 2 ceil(ka) + 12`, extending until two
/// consecutive coefficients fall below [`TAIL_TOLERANCE`].
pub fn solve_scattering(cfg: &ScatteringConfig<'_>) -> Result<ScatteringResult> {
    solve_scattering_with(cfg, |cfg, n| {
        let z = surface_impedance(cfg, n)?;
        scalar_impedance_z0(&z)
    })
}

/// As [`solve_scattering`] but with a caller-provided `z0(n)`; lets callers
/// parallelize or cache the per-order surface impedance.
pub fn solve_scattering_with<F>(cfg: &ScatteringConfig<'_>, mut z0: F) -> Result<ScatteringResult>
where
    F: FnMut(&ScatteringConfig<'_>, u32) -> Result<C64>,
{
    let (_, r_max) = cfg.profile.support();
    if (r_max - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidScattering(
            "profile must be normalized to outer radius 1",
        ));
    }
    if (cfg.fluid.k - cfg.ka).abs() > 1e-12 * cfg.ka {
        return Err(Error::InvalidScattering("fluid wavenumber must equal ka"));
    }
    let base = default_n_max(cfg.ka);
    let mut b = Vec::new();
    let mut n = 0u32;
    loop {
        let bn = scattering_coefficient(n, cfg.ka, cfg.fluid.bulk_modulus, z0(cfg, n)?)?;
        b.push(bn);
        let len = b.len();
        if n >= base
            && len >= 2
            && b[len - 1].norm() < TAIL_TOLERANCE
            && b[len - 2].norm() < TAIL_TOLERANCE
        {
            break;
        }
        if n >= MAX_ORDER {
            return Err(Error::AccuracyLoss(
                "partial-wave series did not converge by the order cap",
            ));
        }
        n += 1;
    }
    Ok(finish(b, cfg.ka, cfg.angles))
}

/// Assembles a result from coefficients.
pub fn finish(b: Vec<C64>, ka: f64, angles: usize) -> ScatteringResult {
    let f_samples = (0..angles)
        .map(|i| {
            let theta = if angles > 1 {
                PI * i as f64 / (angles - 1) as f64
            } else {
                0.0
            };
            (theta, form_function(theta, &b, ka))
        })
        .collect();
    ScatteringResult {
        sigma_tot: total_cross_section(&b, ka),
        b,
        ka,
        f_samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_surface_impedance() {
        let z = ConditionalImpedance::new(CMat::from_diag(&[c(3.0), c(5.0)]), 1.0);
        assert_eq!(scalar_impedance_z0(&z).unwrap(), c(3.0));
        let z = ConditionalImpedance::new(CMat::from_real_rows(&[&[3.0, 1.0], &[1.0, 0.0]]), 1.0);
        assert_eq!(scalar_impedance_z0(&z), Err(Error::TangentialResonance));
    }

    #[test]
    fn full_schur_matches_in_plane_when_decoupled() {
        let z2 = CMat::from_rows(&[
            &[c(4.0), C64::new(0.0, 1.5)],
            &[C64::new(0.0, -1.5), c(2.0)],
        ]);
        let mut z3 = CMat::zeros(3, 3);
        z3.set_block(0, 0, &z2);
        z3[(2, 2)] = c(7.0);
        let a = scalar_impedance_z0(&ConditionalImpedance::new(z2, 1.0)).unwrap();
        let b = scalar_impedance_z0(&ConditionalImpedance::new(z3, 1.0)).unwrap();
        assert!((a - b).norm() < 1e-15);
        assert!(a.im.abs() < 1e-15);
    }

    #[test]
    fn limiting_boundaries() {
        let (ka, n) = (2.3, 2);
        let (j, jp) = cyl_f_and_prime(CylKind::J, n, c(ka)).unwrap();
        let (h, hp) = cyl_f_and_prime(CylKind::H1, n, c(ka)).unwrap();
        let soft = scattering_coefficient(n, ka, 1.0, c(0.0)).unwrap();
        assert!((soft + j / h).norm() < 1e-15);
        let hard = scattering_coefficient(n, ka, 1.0, c(1e13)).unwrap();
        assert!((hard + jp / hp).norm() < 1e-11);
    }

    #[test]
    fn trivial_sums() {
        assert_eq!(form_function(1.0, &[c(0.0); 4], 2.0), c(0.0));
        let b = [C64::new(0.3, -0.2)];
        assert!((form_function(0.0, &b, 2.0) - form_function(2.5, &b, 2.0)).norm() < 1e-16);
        assert_eq!(total_cross_section(&[c(0.0); 3], 1.0), 0.0);
    }
}
