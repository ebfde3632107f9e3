//! Closed-form solutions for uniform transversely isotropic layers and the
//! recursive two-point impedance of layered cylinders.
//!
//! Potentials carry the radial wavenumbers `k1`, `k2` (coupled
//! quasi-longitudinal and quasi-shear waves) and `k3` (horizontally
//! polarized shear). At `kz = 0` the coupling numbers degenerate
//! (`kappa1 -> 0`, `kappa2 -> infinity`); that limit is taken analytically
//! rather than evaluated.

use alloc::vec::Vec;

use crate::cylfun::{cyl_f_seq, derivative, CylKind};
use crate::elastodyn::{
    kappa, voigt_blocks, Layer, MaterialPoint, RadialProfile, StiffnessVoigt, WaveContext,
};
use crate::impedance::{ConditionalImpedance, TwoPointImpedance};
use crate::numkernel::{mat_inverse_with_condition, CMat};
use crate::{c, Error, Result, C64, I};

/// Condition number above which a displacement basis is considered
/// degenerate.
pub const BASIS_CONDITION: f64 = 1e13;

/// The five independent moduli of transverse isotropy about `z`, with the
/// density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiMaterial {
    pub rho: f64,
    pub c11: f64,
    pub c12: f64,
    pub c13: f64,
    pub c33: f64,
    pub c44: f64,
}

impl TiMaterial {
    pub fn c66(&self) -> f64 {
        0.5 * (self.c11 - self.c12)
    }

    pub fn isotropic(rho: f64, lambda: f64, mu: f64) -> Self {
        Self {
            rho,
            c11: lambda + 2.0 * mu,
            c12: lambda,
            c13: lambda,
            c33: lambda + 2.0 * mu,
            c44: mu,
        }
    }

    /// Recognizes transverse isotropy about `z` in a general moduli table.
    pub fn from_material(mp: &MaterialPoint) -> Result<Self> {
        let s = &mp.stiffness;
        let g = |i, j| s.get(i, j);
        let scale = s
            .table()
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-12 * scale;
        let t = Self {
            rho: mp.rho,
            c11: g(1, 1),
            c12: g(1, 2),
            c13: g(1, 3),
            c33: g(3, 3),
            c44: g(4, 4),
        };
        let expect = t.stiffness()?;
        let same = (1..=6).all(|i| (1..=6).all(|j| (g(i, j) - expect.get(i, j)).abs() <= tol));
        if !same {
            return Err(Error::InvalidMaterial(
                "moduli are not transversely isotropic about z",
            ));
        }
        Ok(t)
    }

    pub fn stiffness(&self) -> Result<StiffnessVoigt> {
        StiffnessVoigt::transversely_isotropic(self.c11, self.c12, self.c13, self.c33, self.c44)
    }

    pub fn material_point(&self) -> Result<MaterialPoint> {
        MaterialPoint::new(self.rho, self.stiffness()?)
    }
}

/// Uniform TI annulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerTI {
    pub r_inner: f64,
    pub r_outer: f64,
    pub material: TiMaterial,
}

impl LayerTI {
    pub fn new(r_inner: f64, r_outer: f64, material: TiMaterial) -> Result<Self> {
        if !(r_inner >= 0.0 && r_inner < r_outer && r_outer.is_finite()) {
            return Err(Error::InvalidProfile("layer needs 0 <= r_inner < r_outer"));
        }
        material.stiffness()?;
        Ok(Self {
            r_inner,
            r_outer,
            material,
        })
    }

    /// Splits into `parts` equal sublayers.
    pub fn split(&self, parts: usize) -> Vec<LayerTI> {
        let h = (self.r_outer - self.r_inner) / parts as f64;
        (0..parts)
            .map(|i| LayerTI {
                r_inner: self.r_inner + i as f64 * h,
                r_outer: if i + 1 == parts {
                    self.r_outer
                } else {
                    self.r_inner + (i + 1) as f64 * h
                },
                material: self.material,
            })
            .collect()
    }
}

/// TI layers of a piecewise-uniform profile.
pub fn layers_from_profile(profile: &RadialProfile) -> Result<Vec<LayerTI>> {
    match profile {
        RadialProfile::PiecewiseUniform(layers) => layers
            .iter()
            .map(|l: &Layer| {
                Ok(LayerTI {
                    r_inner: l.r_inner,
                    r_outer: l.r_outer,
                    material: TiMaterial::from_material(&l.material)?,
                })
            })
            .collect(),
        RadialProfile::Smooth { .. } => Err(Error::InvalidProfile(
            "closed forms need piecewise-uniform layers",
        )),
    }
}

/// Radial wavenumbers, coupling numbers and the intermediates `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TIWavenumbers {
    pub k1: C64,
    pub k2: C64,
    pub k3: C64,
    pub kappa1: C64,
    pub kappa2: C64,
    pub a_aux: C64,
    pub b_aux: C64,
}

/// Square root on the branch `Im k >= 0`, `Re k > 0` when `Im k = 0`.
pub fn radial_branch(k2: C64) -> C64 {
    let k = k2.sqrt();
    if k.im < 0.0 || (k.im == 0.0 && k.re < 0.0) {
        -k
    } else {
        k
    }
}

/// `(k1^2, k2^2, k3^2, a, b)`. At `kz = 0` the roots are assigned as
/// `k1^2 = rho w^2 / c11`, `k2^2 = rho w^2 / c44` whatever their order.
pub fn radial_wavenumbers_squared(
    mat: &TiMaterial,
    omega: f64,
    kz: f64,
) -> (C64, C64, C64, C64, C64) {
    let rw2 = mat.rho * omega * omega;
    let kz2 = kz * kz;
    let a = (mat.c11 + mat.c44) * rw2
        + (mat.c13 * mat.c13 + 2.0 * mat.c13 * mat.c44 - mat.c11 * mat.c33) * kz2;
    let b = 4.0 * mat.c11 * mat.c44 * (rw2 - mat.c33 * kz2) * (rw2 - mat.c44 * kz2);
    let k3sq = c((rw2 - mat.c44 * kz2) / mat.c66());
    if kz == 0.0 {
        return (c(rw2 / mat.c11), c(rw2 / mat.c44), k3sq, c(a), c(b));
    }
    let disc = c(a * a - b).sqrt();
    let den = 2.0 * mat.c11 * mat.c44;
    ((c(a) - disc) / den, (c(a) + disc) / den, k3sq, c(a), c(b))
}

/// Wavenumbers and coupling numbers `kappa_i = (c66 k3^2 - c11 k_i^2) /
/// ((c13 + c44) kz)`. Undefined at `kz = 0`.
pub fn ti_wavenumbers(mat: &TiMaterial, omega: f64, kz: f64) -> Result<TIWavenumbers> {
    if kz == 0.0 {
        return Err(Error::KzZeroCoupling);
    }
    if mat.c11 * mat.c44 == 0.0 {
        return Err(Error::InvalidMaterial("c11 c44 must be nonzero"));
    }
    let (k1s, k2s, k3s, a, b) = radial_wavenumbers_squared(mat, omega, kz);
    let kap = |ks: C64| (k3s * mat.c66() - ks * mat.c11) / ((mat.c13 + mat.c44) * kz);
    Ok(TIWavenumbers {
        k1: radial_branch(k1s),
        k2: radial_branch(k2s),
        k3: radial_branch(k3s),
        kappa1: kap(k1s),
        kappa2: kap(k2s),
        a_aux: a,
        b_aux: b,
    })
}

/// Wave-field data of one layer evaluated for a context.
#[derive(Debug, Clone, Copy)]
struct Waves {
    k: [C64; 3],
    /// `None` at `kz = 0`.
    kappa: Option<[C64; 2]>,
}

fn waves(mat: &TiMaterial, ctx: &WaveContext) -> Result<Waves> {
    if ctx.kz == 0.0 {
        let (k1s, k2s, k3s, _, _) = radial_wavenumbers_squared(mat, ctx.omega, 0.0);
        Ok(Waves {
            k: [radial_branch(k1s), radial_branch(k2s), radial_branch(k3s)],
            kappa: None,
        })
    } else {
        let w = ti_wavenumbers(mat, ctx.omega, ctx.kz)?;
        Ok(Waves {
            k: [w.k1, w.k2, w.k3],
            kappa: Some([w.kappa1, w.kappa2]),
        })
    }
}

/// `f(kr)`, `f'(kr)`, `f''(kr)` of order `n`.
fn cyl_triplet(kind: CylKind, n: u32, x: C64) -> Result<(C64, C64, C64)> {
    if x.norm() == 0.0 {
        return Err(Error::InvalidContext("radial wavenumber vanishes"));
    }
    let seq = cyl_f_seq(kind, n + 1, x)?;
    let f = seq[n as usize];
    let fp = derivative(&seq, n as usize);
    let nf = n as f64;
    let fpp = -fp / x - f * (1.0 - nf * nf / (x * x));
    Ok((f, fp, fpp))
}

/// Displacement matrix `X^l(r)` and its radial derivative.
fn displacement_and_derivative(kind: CylKind, w: &Waves, n: u32, r: f64) -> Result<(CMat, CMat)> {
    let nn = n as f64;
    let mut x = CMat::zeros(3, 3);
    let mut dx = CMat::zeros(3, 3);
    let in_ = I * nn;
    for j in 0..2 {
        let k = w.k[j];
        let (f, fp, fpp) = cyl_triplet(kind, n, k * r)?;
        match (w.kappa, j) {
            (None, 1) => {
                // column scaled by 1/kappa2 in the kz -> 0 limit
                x[(2, 1)] = I * f / k;
                dx[(2, 1)] = I * fp;
            }
            (None, _) => {
                x[(0, 0)] = fp;
                x[(1, 0)] = in_ * f / (k * r);
                dx[(0, 0)] = k * fpp;
                dx[(1, 0)] = in_ * (fp / r - f / (k * r * r));
            }
            (Some(kap), _) => {
                x[(0, j)] = fp;
                x[(1, j)] = in_ * f / (k * r);
                x[(2, j)] = I * kap[j] * f / k;
                dx[(0, j)] = k * fpp;
                dx[(1, j)] = in_ * (fp / r - f / (k * r * r));
                dx[(2, j)] = I * kap[j] * fp;
            }
        }
    }
    let k3 = w.k[2];
    let (f, fp, fpp) = cyl_triplet(kind, n, k3 * r)?;
    x[(0, 2)] = -in_ * f / (k3 * r);
    x[(1, 2)] = fp;
    dx[(0, 2)] = -in_ * (fp / r - f / (k3 * r * r));
    dx[(1, 2)] = k3 * fpp;
    Ok((x, dx))
}

/// `X^l(r)`: displacement amplitudes of the three potentials.
pub fn ti_displacement_matrix(
    kind: CylKind,
    mat: &TiMaterial,
    ctx: &WaveContext,
    r: f64,
) -> Result<CMat> {
    let w = waves(mat, ctx)?;
    Ok(displacement_and_derivative(kind, &w, ctx.n, r)?.0)
}

/// Radial derivative of `X^l(r)`.
pub fn ti_displacement_derivative(
    kind: CylKind,
    mat: &TiMaterial,
    ctx: &WaveContext,
    r: f64,
) -> Result<CMat> {
    let w = waves(mat, ctx)?;
    Ok(displacement_and_derivative(kind, &w, ctx.n, r)?.1)
}

/// `z^l(r)` of a uniform TI medium, full 3x3 form.
fn conditional_full(kind: CylKind, mat: &TiMaterial, ctx: &WaveContext, r: f64) -> Result<CMat> {
    let w = waves(mat, ctx)?;
    let n = ctx.n;
    let nn = n as f64;
    let mut xi = [C64::new(0.0, 0.0); 3];
    for j in 0..3 {
        let x = w.k[j] * r;
        let (f, fp, _) = cyl_triplet(kind, n, x)?;
        xi[j] = x * fp / f;
    }
    let c66 = mat.c66();
    let c44 = mat.c44;
    let k3r2 = w.k[2] * w.k[2] * r * r;
    let in_ = I * nn;
    let resonant = |den: C64, scale: f64| {
        !(den.norm() > 1e-13 * scale) || !(den.re.is_finite() && den.im.is_finite())
    };
    let [x1, x2, x3] = xi;
    let mut z = CMat::zeros(3, 3);
    match w.kappa {
        None => {
            let den = c(nn * nn) - x1 * x3;
            if resonant(den, nn * nn + (x1 * x3).norm()) {
                return Err(Error::ModeResonance { r });
            }
            let wv = k3r2 * c66 / den;
            z[(0, 0)] = c(2.0 * c66) - x3 * wv;
            z[(0, 1)] = in_ * (c(2.0 * c66) - wv);
            z[(1, 0)] = -z[(0, 1)];
            z[(1, 1)] = c(2.0 * c66) - x1 * wv;
            z[(2, 2)] = -x2 * c44;
        }
        Some([kap1, kap2]) => {
            let (y1, y2) = (kap1 * r, kap2 * r);
            let n2 = c(nn * nn);
            let den = x3 * (x2 * y1 - x1 * y2) - n2 * (y1 - y2);
            let scale = (x3 * x2 * y1).norm() + (x3 * x1 * y2).norm() + (n2 * (y1 - y2)).norm();
            if resonant(den, scale) {
                return Err(Error::ModeResonance { r });
            }
            let zz = c44 * (n2 * (x1 * y1 - x2 * y2) - x1 * x2 * x3 * (y1 - y2)) / den;
            let c0 = c66 * k3r2 / den;
            let ikzr = I * (ctx.kz * r * c44);
            z[(0, 0)] = c(2.0 * c66) + c0 * x3 * (y1 - y2);
            z[(0, 1)] = in_ * 2.0 * c66 + c0 * in_ * (y1 - y2);
            z[(0, 2)] = ikzr + c0 * I * x3 * (x1 - x2);
            z[(1, 0)] = -in_ * 2.0 * c66 - c0 * in_ * (y1 - y2);
            z[(1, 1)] = c(2.0 * c66) + c0 * (x2 * y1 - x1 * y2);
            z[(1, 2)] = c0 * nn * (x1 - x2);
            z[(2, 0)] = -ikzr - c0 * I * x3 * (x1 - x2);
            z[(2, 1)] = c0 * nn * (x1 - x2);
            z[(2, 2)] = zz;
        }
    }
    if !z.is_finite() {
        return Err(Error::ModeResonance { r });
    }
    Ok(z)
}

/// `z^l(r)`, reduced to the block dimension of `ctx`.
pub fn ti_conditional_impedance(
    kind: CylKind,
    mat: &TiMaterial,
    ctx: &WaveContext,
    r: f64,
) -> Result<ConditionalImpedance> {
    let z = conditional_full(kind, mat, ctx, r)?;
    let z = if ctx.m == 3 {
        z
    } else {
        z.select(ctx.displacement_indices())
    };
    Ok(ConditionalImpedance { z, r })
}

/// `Y^l(r) = -i z^l(r) X^l(r)`.
pub fn ti_traction_matrix(
    kind: CylKind,
    mat: &TiMaterial,
    ctx: &WaveContext,
    r: f64,
) -> Result<CMat> {
    let z = conditional_full(kind, mat, ctx, r)?;
    let x = ti_displacement_matrix(kind, mat, ctx, r)?;
    Ok((&z * &x).scale(-I))
}

/// `Y^l(r)` from the constitutive law, `V = i r (Q^ U' + r^-1 R kappa U +
/// i kz P U)`. Equal to [`ti_traction_matrix`] but finite at poles of `z^l`.
pub fn ti_traction_direct(
    kind: CylKind,
    mat: &TiMaterial,
    ctx: &WaveContext,
    r: f64,
) -> Result<CMat> {
    let w = waves(mat, ctx)?;
    let (x, dx) = displacement_and_derivative(kind, &w, ctx.n, r)?;
    traction_from_displacement(mat, ctx, r, &x, &dx)
}

fn traction_from_displacement(
    mat: &TiMaterial,
    ctx: &WaveContext,
    r: f64,
    x: &CMat,
    dx: &CMat,
) -> Result<CMat> {
    let b = voigt_blocks(&mat.stiffness()?);
    let rt = &b.r * &kappa(ctx.n);
    let t = &(&(&b.q_hat * dx) + &(&rt * x).scale_re(1.0 / r)) + &(&b.p * x).scale(I * ctx.kz);
    Ok(t.scale(I * r))
}

/// Two-point impedance of one layer using the basis pair `basis`.
pub fn layer_twopoint_with_basis(
    layer: &LayerTI,
    ctx: &WaveContext,
    basis: (CylKind, CylKind),
) -> Result<TwoPointImpedance> {
    let (r0, r1) = (layer.r_inner, layer.r_outer);
    if !(r0 > 0.0) {
        return Err(Error::InvalidProfile(
            "two-point impedance needs r_inner > 0",
        ));
    }
    let w = waves(&layer.material, ctx)?;
    let mut xb = CMat::zeros(6, 6);
    let mut yb = CMat::zeros(6, 6);
    for (col, kind) in [basis.0, basis.1].into_iter().enumerate() {
        for (row, r) in [r0, r1].into_iter().enumerate() {
            let (x, dx) = displacement_and_derivative(kind, &w, ctx.n, r)?;
            let y = traction_from_displacement(&layer.material, ctx, r, &x, &dx)?;
            xb.set_block(3 * row, 3 * col, &x);
            // rows map to (i V(r0), -i V(r1))
            let s = if row == 0 { I } else { -I };
            yb.set_block(3 * row, 3 * col, &y.scale(s));
        }
    }
    // column scaling cancels in Y X^-1 and removes the J/H magnitude spread
    for j in 0..6 {
        let s = (0..6).fold(0.0f64, |m, i| m.max(xb[(i, j)].norm()));
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::BasisDegenerate);
        }
        for i in 0..6 {
            xb[(i, j)] /= s;
            yb[(i, j)] /= s;
        }
    }
    let (xi, cond) = mat_inverse_with_condition(&xb).map_err(|_| Error::BasisDegenerate)?;
    if !(cond < BASIS_CONDITION) {
        return Err(Error::BasisDegenerate);
    }
    let z = &yb * &xi;
    let z = if ctx.m == 3 {
        z
    } else {
        z.select(ctx.state_indices())
    };
    Ok(TwoPointImpedance {
        z,
        r_from: r0,
        r_to: r1,
    })
}

/// Two-point impedance of one layer, basis `{J, H1}` with `{J, Y}` as the
/// fallback.
pub fn layer_twopoint(layer: &LayerTI, ctx: &WaveContext) -> Result<TwoPointImpedance> {
    match layer_twopoint_with_basis(layer, ctx, (CylKind::J, CylKind::H1)) {
        Err(Error::BasisDegenerate) | Err(Error::AccuracyLoss(_)) => {
            layer_twopoint_with_basis(layer, ctx, (CylKind::J, CylKind::Y)).map_err(|e| match e {
                Error::AccuracyLoss(_) => Error::BasisDegenerate,
                e => e,
            })
        }
        other => other,
    }
}

/// Two-point impedance of two adjacent layers from their own.
pub fn join_twopoint(za: &TwoPointImpedance, zb: &TwoPointImpedance) -> Result<TwoPointImpedance> {
    if za.dim() != zb.dim() {
        return Err(Error::Dimension("two-point impedances differ in size"));
    }
    if (za.r_to - zb.r_from).abs() > 1e-12 * za.r_to.abs().max(1.0) {
        return Err(Error::NonContiguous(
            "outer radius of the first span must equal the inner radius of the second",
        ));
    }
    let [a1, a2, a3, a4] = za.blocks();
    let [b1, b2, b3, b4] = zb.blocks();
    let (s, cond) =
        mat_inverse_with_condition(&(&a4 + &b1)).map_err(|_| Error::InterfaceResonance)?;
    if cond > 1e15 {
        return Err(Error::InterfaceResonance);
    }
    let a2s = &a2 * &s;
    let b3s = &b3 * &s;
    let z1 = &a1 - &(&a2s * &a3);
    let z2 = -(&a2s * &b2);
    let z3 = -(&b3s * &a3);
    let z4 = &b4 - &(&b3s * &b2);
    Ok(TwoPointImpedance {
        z: CMat::from_blocks(&z1, &z2, &z3, &z4),
        r_from: za.r_from,
        r_to: zb.r_to,
    })
}

/// Left fold of [`join_twopoint`] over the layers, ordered outward.
pub fn global_twopoint(layers: &[LayerTI], ctx: &WaveContext) -> Result<TwoPointImpedance> {
    let (first, rest) = layers
        .split_first()
        .ok_or(Error::InvalidProfile("no layers"))?;
    for w in layers.windows(2) {
        if (w[0].r_outer - w[1].r_inner).abs() > 1e-12 * w[0].r_outer {
            return Err(Error::NonContiguous("layers must share interfaces"));
        }
    }
    let mut acc = layer_twopoint(first, ctx)?;
    for layer in rest {
        acc = join_twopoint(&acc, &layer_twopoint(layer, ctx)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TiMaterial {
        TiMaterial {
            rho: 1.7,
            c11: 6.0,
            c12: 2.0,
            c13: 1.5,
            c33: 5.0,
            c44: 1.3,
        }
    }

    #[test]
    fn isotropic_wavenumber_reduction() {
        let (lam, mu, rho, w, kz) = (3.0, 1.2, 2.0, 4.0, 0.7);
        let m = TiMaterial::isotropic(rho, lam, mu);
        let t = ti_wavenumbers(&m, w, kz).unwrap();
        let k1s = w * w * rho / (lam + 2.0 * mu) - kz * kz;
        let k2s = w * w * rho / mu - kz * kz;
        assert!((t.k1 * t.k1 - k1s).norm() < 1e-12 * k1s.abs());
        assert!((t.k2 * t.k2 - k2s).norm() < 1e-12 * k2s.abs());
        assert!((t.k3 * t.k3 - k2s).norm() < 1e-12 * k2s.abs());
        assert!((t.kappa1 - kz).norm() < 1e-12);
        assert!((t.kappa2 + k2s / kz).norm() < 1e-12 * (k2s / kz).abs());
    }

    #[test]
    fn kz_zero_wavenumbers_and_coupling_error() {
        let m = sample();
        let (k1s, k2s, k3s, _, _) = radial_wavenumbers_squared(&m, 2.0, 0.0);
        assert!((k1s.re - m.rho * 4.0 / m.c11).abs() < 1e-15);
        assert!((k2s.re - m.rho * 4.0 / m.c44).abs() < 1e-15);
        assert!((k3s.re - m.rho * 4.0 / m.c66()).abs() < 1e-15);
        assert_eq!(ti_wavenumbers(&m, 2.0, 0.0), Err(Error::KzZeroCoupling));
    }

    #[test]
    fn evanescent_branch_has_positive_imaginary_part() {
        let m = sample();
        let t = ti_wavenumbers(&m, 0.5, 3.0).unwrap();
        for k in [t.k1, t.k2, t.k3] {
            assert!(k.im > 0.0, "{k}");
        }
        assert_eq!(radial_branch(c(4.0)), c(2.0));
    }

    #[test]
    fn displacement_matrix_structure() {
        let m = sample();
        for kz in [0.0, 0.8] {
            let ctx = WaveContext::new(3.0, 0, kz).unwrap();
            let x = ti_displacement_matrix(CylKind::J, &m, &ctx, 0.7).unwrap();
            assert_eq!(x[(2, 2)], c(0.0));
            assert_eq!(x[(1, 0)], c(0.0));
            assert_eq!(x[(1, 1)], c(0.0));
            assert_eq!(x[(0, 2)], c(0.0));
        }
    }

    #[test]
    fn traction_product_identity() {
        let m = sample();
        let ctx = WaveContext::new(3.0, 2, 0.6).unwrap();
        let z = ti_conditional_impedance(CylKind::J, &m, &ctx, 0.8).unwrap();
        let x = ti_displacement_matrix(CylKind::J, &m, &ctx, 0.8).unwrap();
        let y = ti_traction_matrix(CylKind::J, &m, &ctx, 0.8).unwrap();
        assert!((&y + &(&z.z * &x).scale(I)).norm_max() <= 1e-14 * y.norm_max());
    }

    #[test]
    fn closed_form_matches_constitutive_traction() {
        let m = sample();
        for (n, kz) in [(0u32, 0.0), (2, 0.0), (0, 0.9), (1, 0.6), (3, 2.5)] {
            let ctx = WaveContext::new(3.0, n, kz).unwrap();
            for kind in [CylKind::J, CylKind::H1] {
                let r = 0.8;
                let z = ti_conditional_impedance(kind, &m, &ctx, r).unwrap().z;
                let x = ti_displacement_matrix(kind, &m, &ctx, r).unwrap();
                let y = ti_traction_direct(kind, &m, &ctx, r).unwrap();
                let z_direct = (&y * &x.inverse().unwrap()).scale(I);
                let err = (&z - &z_direct).norm_max() / z.norm_max();
                assert!(err < 1e-11, "n={n} kz={kz} {kind:?}: {err}");
            }
        }
    }

    #[test]
    fn non_ti_moduli_rejected() {
        let mut t = *sample().stiffness().unwrap().table();
        t[1][1] += 0.5;
        let mp = MaterialPoint::new(1.0, StiffnessVoigt::new(t).unwrap()).unwrap();
        assert!(TiMaterial::from_material(&mp).is_err());
        assert_eq!(
            TiMaterial::from_material(&sample().material_point().unwrap()).unwrap(),
            sample()
        );
    }
}
