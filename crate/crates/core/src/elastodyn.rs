//! Material description and the state-space system matrix of
//! time-harmonic cylindrical waves, `d/dr (U, V) = Q(r) (U, V)` with
//! `Q = (i/r) G`.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use crate::numkernel::{mat_inverse, CMat};
use crate::{c, Error, Result, I};

/// Symmetric 6x6 table of elastic moduli in Voigt notation, indices
/// `(r, theta, z) = (1, 2, 3)`, shear pairs `4 = (theta z)`, `5 = (r z)`,
/// `6 = (r theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessVoigt {
    c: [[f64; 6]; 6],
}

impl StiffnessVoigt {
    /// Validates symmetry and positive definiteness (leading principal
    /// minors).
    pub fn new(c: [[f64; 6]; 6]) -> Result<Self> {
        for (i, row) in c.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidMaterial("non-finite modulus"));
                }
                let scale = v.abs().max(c[j][i].abs()).max(1.0);
                if (v - c[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidMaterial("moduli table is not symmetric"));
                }
            }
        }
        for k in 1..=6 {
            if leading_minor(&c, k) <= 0.0 {
                return Err(Error::InvalidMaterial("moduli are not positive definite"));
            }
        }
        Ok(Self { c })
    }

    /// Symmetrizes the upper triangle of `c` and validates it.
    pub fn from_upper(c: [[f64; 6]; 6]) -> Result<Self> {
        let mut s = c;
        for i in 0..6 {
            for j in 0..i {
                s[i][j] = c[j][i];
            }
        }
        Self::new(s)
    }

    pub fn isotropic(lambda: f64, mu: f64) -> Result<Self> {
        Self::transversely_isotropic(lambda + 2.0 * mu, lambda, lambda, lambda + 2.0 * mu, mu)
    }

    /// Isotropic moduli from Young's modulus and shear modulus.
    pub fn from_young_shear(e: f64, g: f64) -> Result<Self> {
        if 3.0 * g - e == 0.0 {
            return Err(Error::InvalidMaterial("E = 3G is incompressible"));
        }
        let lambda = g * (e - 2.0 * g) / (3.0 * g - e);
        Self::isotropic(lambda, g)
    }

    /// Transverse isotropy about `z`, with `c66 = (c11 - c12) / 2`.
    pub fn transversely_isotropic(
        c11: f64,
        c12: f64,
        c13: f64,
        c33: f64,
        c44: f64,
    ) -> Result<Self> {
        let c66 = 0.5 * (c11 - c12);
        let mut c = [[0.0; 6]; 6];
        c[0][0] = c11;
        c[1][1] = c11;
        c[2][2] = c33;
        c[0][1] = c12;
        c[1][0] = c12;
        c[0][2] = c13;
        c[2][0] = c13;
        c[1][2] = c13;
        c[2][1] = c13;
        c[3][3] = c44;
        c[4][4] = c44;
        c[5][5] = c66;
        Self::new(c)
    }

    /// `C_IJ` with one-based Voigt indices.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i - 1][j - 1]
    }

    pub fn table(&self) -> &[[f64; 6]; 6] {
        &self.c
    }

    /// True when the moduli are invariant under the mirror `z -> -z`, the
    /// condition for in-plane and antiplane motion to decouple at `kz = 0`.
    pub fn is_z_mirror_symmetric(&self) -> bool {
        const COUPLING: [(usize, usize); 8] = [
            (1, 4),
            (1, 5),
            (2, 4),
            (2, 5),
            (3, 4),
            (3, 5),
            (4, 6),
            (5, 6),
        ];
        let scale = self.c.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        COUPLING
            .iter()
            .all(|&(i, j)| self.get(i, j).abs() <= 1e-14 * scale)
    }
}

fn leading_minor(c: &[[f64; 6]; 6], k: usize) -> f64 {
    // small real Gaussian elimination with partial pivoting
    let mut a = [[0.0f64; 6]; 6];
    for i in 0..k {
        a[i][..k].copy_from_slice(&c[i][..k]);
    }
    let mut det = 1.0;
    for col in 0..k {
        let p = (col..k).fold(col, |b, i| {
            if a[i][col].abs() > a[b][col].abs() {
                i
            } else {
                b
            }
        });
        if a[p][col] == 0.0 {
            return 0.0;
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col];
        for i in col + 1..k {
            let f = a[i][col] / a[col][col];
            for j in col..k {
                a[i][j] -= f * a[col][j];
            }
        }
    }
    det
}

/// The six 3x3 blocks relating tractions to displacement gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct VoigtBlocks {
    pub q_hat: CMat,
    pub t_hat: CMat,
    pub m_hat: CMat,
    pub r: CMat,
    pub p: CMat,
    pub s: CMat,
}

/// Index table of each block in one-based Voigt pairs.
const Q_HAT: [[(usize, usize); 3]; 3] = [
    [(1, 1), (1, 6), (1, 5)],
    [(1, 6), (6, 6), (5, 6)],
    [(1, 5), (5, 6), (5, 5)],
];
const T_HAT: [[(usize, usize); 3]; 3] = [
    [(6, 6), (2, 6), (4, 6)],
    [(2, 6), (2, 2), (2, 4)],
    [(4, 6), (2, 4), (4, 4)],
];
const M_HAT: [[(usize, usize); 3]; 3] = [
    [(5, 5), (4, 5), (3, 5)],
    [(4, 5), (4, 4), (3, 4)],
    [(3, 5), (3, 4), (3, 3)],
];
const R_BLK: [[(usize, usize); 3]; 3] = [
    [(1, 6), (1, 2), (1, 4)],
    [(6, 6), (2, 6), (4, 6)],
    [(5, 6), (2, 5), (4, 5)],
];
const P_BLK: [[(usize, usize); 3]; 3] = [
    [(1, 5), (1, 4), (1, 3)],
    [(5, 6), (4, 6), (3, 6)],
    [(5, 5), (4, 5), (3, 5)],
];
const S_BLK: [[(usize, usize); 3]; 3] = [
    [(5, 6), (4, 6), (3, 6)],
    [(2, 5), (2, 4), (2, 3)],
    [(4, 5), (4, 4), (3, 4)],
];

pub fn voigt_blocks(stiff: &StiffnessVoigt) -> VoigtBlocks {
    let take = |t: &[[(usize, usize); 3]; 3]| {
        CMat::from_fn(3, 3, |i, j| c(stiff.get(t[i][j].0, t[i][j].1)))
    };
    VoigtBlocks {
        q_hat: take(&Q_HAT),
        t_hat: take(&T_HAT),
        m_hat: take(&M_HAT),
        r: take(&R_BLK),
        p: take(&P_BLK),
        s: take(&S_BLK),
    }
}

/// Inverse transcription: reads every modulus back out of the blocks.
/// Fails if two block positions that name the same modulus disagree.
pub fn stiffness_from_blocks(b: &VoigtBlocks) -> Result<StiffnessVoigt> {
    let mut c = [[f64::NAN; 6]; 6];
    let tables: [(&CMat, &[[(usize, usize); 3]; 3]); 6] = [
        (&b.q_hat, &Q_HAT),
        (&b.t_hat, &T_HAT),
        (&b.m_hat, &M_HAT),
        (&b.r, &R_BLK),
        (&b.p, &P_BLK),
        (&b.s, &S_BLK),
    ];
    for (blk, t) in tables {
        for i in 0..3 {
            for j in 0..3 {
                let (p, q) = t[i][j];
                let v = blk[(i, j)].re;
                let old = c[p - 1][q - 1];
                if !old.is_nan() && old != v {
                    return Err(Error::InvalidMaterial(
                        "blocks disagree on a shared modulus",
                    ));
                }
                c[p - 1][q - 1] = v;
                c[q - 1][p - 1] = v;
            }
        }
    }
    if c.iter().flatten().any(|v| v.is_nan()) {
        return Err(Error::InvalidMaterial("blocks do not cover every modulus"));
    }
    StiffnessVoigt::new(c)
}

/// Density and stiffness at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialPoint {
    pub rho: f64,
    pub stiffness: StiffnessVoigt,
}

impl MaterialPoint {
    pub fn new(rho: f64, stiffness: StiffnessVoigt) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidMaterial("density must be positive"));
        }
        Ok(Self { rho, stiffness })
    }
}

/// Reference fluid used for normalization: water, `rho_w = 1000 kg/m^3`,
/// `c_w = 1470 m/s`, so the modulus unit is `rho_w c_w^2 = 2.1609 GPa`.
pub const WATER_MODULUS_PA: f64 = 1000.0 * 1470.0 * 1470.0;

/// Aluminium normalized by water: density ratio 2.7, `E = 70 GPa`,
/// `G = 26 GPa`.
pub fn aluminium() -> MaterialPoint {
    let e = 70e9 / WATER_MODULUS_PA;
    let g = 26e9 / WATER_MODULUS_PA;
    MaterialPoint::new(
        2.7,
        StiffnessVoigt::from_young_shear(e, g).expect("aluminium moduli are valid"),
    )
    .expect("aluminium density is valid")
}

/// Uniform annulus `r_inner <= r <= r_outer`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub r_inner: f64,
    pub r_outer: f64,
    pub material: MaterialPoint,
}

/// Declared regularity of a smooth profile. Only informational: no profile
/// derivative is ever taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Continuous,
    Differentiable,
    Analytic,
}

type MaterialFn = dyn Fn(f64) -> MaterialPoint + Send + Sync;

/// Radial dependence of the material.
pub enum RadialProfile {
    PiecewiseUniform(Vec<Layer>),
    Smooth {
        f: Box<MaterialFn>,
        r_min: f64,
        r_max: f64,
        smoothness: Smoothness,
    },
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialProfile::PiecewiseUniform(layers) => {
                f.debug_tuple("PiecewiseUniform").field(layers).finish()
            }
            RadialProfile::Smooth {
                r_min,
                r_max,
                smoothness,
                ..
            } => f
                .debug_struct("Smooth")
                .field("r_min", r_min)
                .field("r_max", r_max)
                .field("smoothness", smoothness)
                .finish_non_exhaustive(),
        }
    }
}

/// Relative slack allowed when matching radii against the support.
const SUPPORT_SLACK: f64 = 1e-12;

impl RadialProfile {
    /// Contiguous uniform layers ordered outward.
    pub fn layered(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidProfile("no layers"));
        }
        if !(layers[0].r_inner > 0.0) {
            return Err(Error::InvalidProfile("inner radius must be positive"));
        }
        for l in &layers {
            if !(l.r_inner < l.r_outer) || !l.r_outer.is_finite() {
                return Err(Error::InvalidProfile("layer needs r_inner < r_outer"));
            }
        }
        for w in layers.windows(2) {
            if (w[0].r_outer - w[1].r_inner).abs() > SUPPORT_SLACK * w[0].r_outer {
                return Err(Error::InvalidProfile(
                    "layers must be contiguous and non-overlapping",
                ));
            }
        }
        Ok(RadialProfile::PiecewiseUniform(layers))
    }

    pub fn uniform(r_inner: f64, r_outer: f64, material: MaterialPoint) -> Result<Self> {
        Self::layered(alloc::vec![Layer {
            r_inner,
            r_outer,
            material
        }])
    }

    pub fn smooth(
        r_min: f64,
        r_max: f64,
        smoothness: Smoothness,
        f: impl Fn(f64) -> MaterialPoint + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
            return Err(Error::InvalidProfile(
                "smooth profile needs 0 < r_min < r_max",
            ));
        }
        Ok(RadialProfile::Smooth {
            f: Box::new(f),
            r_min,
            r_max,
            smoothness,
        })
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            RadialProfile::PiecewiseUniform(l) => (l[0].r_inner, l[l.len() - 1].r_outer),
            RadialProfile::Smooth { r_min, r_max, .. } => (*r_min, *r_max),
        }
    }

    pub fn check_support(&self, r: f64) -> Result<()> {
        let (lo, hi) = self.support();
        let slack = SUPPORT_SLACK * hi;
        if !(r >= lo - slack && r <= hi + slack) {
            return Err(Error::OutOfSupport {
                r,
                r_min: lo,
                r_max: hi,
            });
        }
        Ok(())
    }

    /// Material at `r`. On an interface the outer layer is used.
    pub fn material_at(&self, r: f64) -> Result<MaterialPoint> {
        self.check_support(r)?;
        match self {
            RadialProfile::PiecewiseUniform(layers) => {
                let idx = layers
                    .iter()
                    .position(|l| r < l.r_outer)
                    .unwrap_or(layers.len() - 1);
                Ok(layers[idx].material)
            }
            RadialProfile::Smooth { f, .. } => Ok(f(r)),
        }
    }

    /// Interface radii strictly inside the support.
    pub fn interfaces(&self) -> Vec<f64> {
        match self {
            RadialProfile::PiecewiseUniform(l) => {
                l.iter().take(l.len() - 1).map(|x| x.r_outer).collect()
            }
            RadialProfile::Smooth { .. } => Vec::new(),
        }
    }
}

/// Frequency, circumferential number, axial wavenumber and block dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveContext {
    pub omega: f64,
    pub n: u32,
    pub kz: f64,
    pub m: usize,
}

impl WaveContext {
    /// Full three-component context.
    pub fn new(omega: f64, n: u32, kz: f64) -> Result<Self> {
        Self::with_dim(omega, n, kz, 3)
    }

    pub fn with_dim(omega: f64, n: u32, kz: f64, m: usize) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidContext("omega must be positive"));
        }
        if !kz.is_finite() {
            return Err(Error::InvalidContext("kz must be finite"));
        }
        if !(1..=3).contains(&m) {
            return Err(Error::InvalidContext("block dimension must be 1, 2 or 3"));
        }
        if m < 3 && kz != 0.0 {
            return Err(Error::NoDecoupling);
        }
        Ok(Self { omega, n, kz, m })
    }

    /// State-vector indices retained for this block dimension.
    pub fn state_indices(&self) -> &'static [usize] {
        match self.m {
            3 => &[0, 1, 2, 3, 4, 5],
            2 => &[0, 1, 3, 4],
            _ => &[2, 5],
        }
    }

    /// Displacement indices retained for this block dimension.
    pub fn displacement_indices(&self) -> &'static [usize] {
        match self.m {
            3 => &[0, 1, 2],
            2 => &[0, 1],
            _ => &[2],
        }
    }
}

/// `Q(r)` together with its radius and block dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrix {
    pub q: CMat,
    pub r: f64,
}

impl SystemMatrix {
    pub fn m(&self) -> usize {
        self.q.rows() / 2
    }

    pub fn blocks(&self) -> [CMat; 4] {
        self.q.quarters()
    }

    /// `|Q^+ + T Q T|_F / |Q|_F`.
    pub fn t_symmetry_residual(&self) -> f64 {
        let t = CMat::block_swap(self.m());
        let d = &self.q.adjoint() + &(&(&t * &self.q) * &t);
        d.norm_fro() / self.q.norm_fro().max(f64::MIN_POSITIVE)
    }
}

/// The circumferential operator `kappa = K + i n I`.
pub fn kappa(n: u32) -> CMat {
    let mut k = CMat::identity(3).scale(I * n as f64);
    k[(0, 1)] = c(-1.0);
    k[(1, 0)] = c(1.0);
    k
}

/// The three blocks `g1`, `g2`, `g3` of `iG = [[g1, i g2], [i g3, -g1^+]]`.
pub fn g_blocks(mp: &MaterialPoint, ctx: &WaveContext, r: f64) -> Result<[CMat; 3]> {
    let p = g_polynomial(mp, ctx)?;
    let g1 = &p.g1[0] + &p.g1[1].scale_re(r);
    let g3 = &(&p.g3[0] + &p.g3[1].scale_re(r)) + &p.g3[2].scale_re(r * r);
    Ok([g1, p.g2, g3])
}

/// Coefficients of the blocks in powers of `r`: `g1 = g1[0] + r g1[1]`,
/// `g3 = g3[0] + r g3[1] + r^2 g3[2]`; `g2` does not depend on `r`.
struct GPolynomial {
    g1: [CMat; 2],
    g2: CMat,
    g3: [CMat; 3],
}

fn g_polynomial(mp: &MaterialPoint, ctx: &WaveContext) -> Result<GPolynomial> {
    let b = voigt_blocks(&mp.stiffness);
    let qi = mat_inverse(&b.q_hat).map_err(|_| Error::MaterialSingular)?;
    let kap = kappa(ctx.n);
    let rt = &b.r * &kap;
    let st = &kap * &b.s;
    let tt = &(&kap.adjoint() * &b.t_hat) * &kap;
    let ikz = I * ctx.kz;
    let qi_rt = &qi * &rt;
    let pt = b.p.transpose();
    let x = &(&pt * &qi_rt) - &st;
    let m_part = (&b.m_hat - &(&(&pt * &qi) * &b.p)).scale_re(ctx.kz * ctx.kz);
    let inertia = CMat::identity(3).scale_re(mp.rho * ctx.omega * ctx.omega);
    Ok(GPolynomial {
        g1: [-&qi_rt, -(&qi * &b.p).scale(ikz)],
        g2: -&qi,
        g3: [&tt - &(&rt.adjoint() * &qi_rt), (&x - &x.adjoint()).scale(ikz), &m_part - &inertia],
    })
}

/// `r Q(r) = A[0] + r A[1] + r^2 A[2]` on the full 6x6 state.
fn rq_coefficients(mp: &MaterialPoint, ctx: &WaveContext) -> Result<[CMat; 3]> {
    let p = g_polynomial(mp, ctx)?;
    let z = CMat::zeros(3, 3);
    Ok([
        CMat::from_blocks(&p.g1[0], &p.g2.scale(I), &p.g3[0].scale(I), &-p.g1[0].adjoint()),
        CMat::from_blocks(&p.g1[1], &z, &p.g3[1].scale(I), &-p.g1[1].adjoint()),
        CMat::from_blocks(&z, &z, &p.g3[2].scale(I), &z),
    ])
}

/// The 6x6 system matrix `G` of `d eta / dr = (i/r) G eta`.
pub fn g_matrix(mp: &MaterialPoint, ctx: &WaveContext, r: f64) -> Result<CMat> {
    if !(r > 0.0) {
        return Err(Error::InvalidContext("radius must be positive"));
    }
    let [a0, a1, a2] = rq_coefficients(mp, ctx)?;
    Ok(eval_rq(&[a0, a1, a2], r).scale(-I))
}

fn eval_rq(a: &[CMat; 3], r: f64) -> CMat {
    &(&a[0] + &a[1].scale_re(r)) + &a[2].scale_re(r * r)
}

/// `r Q(r)` coefficients reduced to the `2m x 2m` subsystem of `ctx.m`.
fn reduced_coefficients(mp: &MaterialPoint, ctx: &WaveContext) -> Result<[CMat; 3]> {
    if ctx.m < 3 && !(ctx.kz == 0.0 && mp.stiffness.is_z_mirror_symmetric()) {
        return Err(Error::NoDecoupling);
    }
    let a = rq_coefficients(mp, ctx)?;
    if ctx.m == 3 {
        return Ok(a);
    }
    let idx = ctx.state_indices();
    Ok(a.map(|x| x.select(idx)))
}

fn q_from_coefficients(a: &[CMat; 3], r: f64) -> Result<CMat> {
    if !(r > 0.0) {
        return Err(Error::InvalidContext("radius must be positive"));
    }
    Ok(eval_rq(a, r).scale_re(1.0 / r))
}

/// `Q(r) = (i/r) G(r)`, reduced to the `2m x 2m` subsystem of `ctx.m`.
pub fn q_matrix(profile: &RadialProfile, ctx: &WaveContext, r: f64) -> Result<SystemMatrix> {
    let mp = profile.material_at(r)?;
    q_matrix_at(&mp, ctx, r)
}

/// `Q(r)` for an explicit material point.
pub fn q_matrix_at(mp: &MaterialPoint, ctx: &WaveContext, r: f64) -> Result<SystemMatrix> {
    let a = reduced_coefficients(mp, ctx)?;
    Ok(SystemMatrix { q: q_from_coefficients(&a, r)?, r })
}

/// Anything that supplies a state-space generator `Q(r)` on an interval.
pub trait StateOperator {
    /// Block dimension `m`; `Q` is `2m x 2m`.
    fn dim(&self) -> usize;
    fn support(&self) -> (f64, f64);
    fn system_matrix(&self, r: f64) -> Result<CMat>;
}

/// The elastic system of a profile under a wave context. Uniform layers
/// keep the coefficients of `r Q(r)`, so sampling `Q` is a few additions.
#[derive(Debug, Clone)]
pub struct ElasticSystem<'a> {
    pub profile: &'a RadialProfile,
    pub ctx: WaveContext,
    layers: Vec<Result<[CMat; 3]>>,
}

impl<'a> ElasticSystem<'a> {
    pub fn new(profile: &'a RadialProfile, ctx: WaveContext) -> Self {
        let layers = match profile {
            RadialProfile::PiecewiseUniform(l) => l.iter().map(|l| reduced_coefficients(&l.material, &ctx)).collect(),
            RadialProfile::Smooth { .. } => Vec::new(),
        };
        Self { profile, ctx, layers }
    }
}

impl StateOperator for ElasticSystem<'_> {
    fn dim(&self) -> usize {
        self.ctx.m
    }

    fn support(&self) -> (f64, f64) {
        self.profile.support()
    }

    fn system_matrix(&self, r: f64) -> Result<CMat> {
        match self.profile {
            RadialProfile::PiecewiseUniform(l) => {
                self.profile.check_support(r)?;
                let idx = l.iter().position(|x| r < x.r_outer).unwrap_or(l.len() - 1);
                q_from_coefficients(self.layers[idx].as_ref().map_err(Clone::clone)?, r)
            }
            RadialProfile::Smooth { .. } => Ok(q_matrix(self.profile, &self.ctx, r)?.q),
        }
    }
}

/// A generator that does not depend on `r`, defined on `[r_min, r_max]`.
#[derive(Debug, Clone)]
pub struct ConstantOperator {
    pub q: CMat,
    pub r_min: f64,
    pub r_max: f64,
}

impl StateOperator for ConstantOperator {
    fn dim(&self) -> usize {
        self.q.rows() / 2
    }

    fn support(&self) -> (f64, f64) {
        (self.r_min, self.r_max)
    }

    fn system_matrix(&self, r: f64) -> Result<CMat> {
        let slack = SUPPORT_SLACK * self.r_max.abs().max(1.0);
        if !(r >= self.r_min - slack && r <= self.r_max + slack) {
            return Err(Error::OutOfSupport {
                r,
                r_min: self.r_min,
                r_max: self.r_max,
            });
        }
        Ok(self.q.clone())
    }
}

/// A generator given by a closure; used for synthetic test systems.
pub struct FnOperator<F> {
    pub m: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub f: F,
}

impl<F> fmt::Debug for FnOperator<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnOperator")
            .field("m", &self.m)
            .field("r_min", &self.r_min)
            .field("r_max", &self.r_max)
            .finish()
    }
}

impl<F: Fn(f64) -> CMat> StateOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.m
    }

    fn support(&self) -> (f64, f64) {
        (self.r_min, self.r_max)
    }

    fn system_matrix(&self, r: f64) -> Result<CMat> {
        let slack = SUPPORT_SLACK * self.r_max.abs().max(1.0);
        if !(r >= self.r_min - slack && r <= self.r_max + slack) {
            return Err(Error::OutOfSupport {
                r,
                r_min: self.r_min,
                r_max: self.r_max,
            });
        }
        Ok((self.f)(r))
    }
}

impl<T: StateOperator + ?Sized> StateOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn support(&self) -> (f64, f64) {
        (**self).support()
    }
    fn system_matrix(&self, r: f64) -> Result<CMat> {
        (**self).system_matrix(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_blocks_are_voigt_lookups() {
        let (lam, mu) = (2.0, 1.5);
        let b = voigt_blocks(&StiffnessVoigt::isotropic(lam, mu).unwrap());
        assert_eq!(b.q_hat, CMat::from_diag(&[c(lam + 2.0 * mu), c(mu), c(mu)]));
        assert_eq!(b.r[(0, 1)], c(lam));
        assert_eq!(b.r[(1, 0)], c(mu));
        assert_eq!(b.r[(0, 0)], c(0.0));
        assert_eq!(b.p[(0, 2)], c(lam));
        assert_eq!(b.p[(2, 0)], c(mu));
        assert_eq!(b.s[(1, 2)], c(lam));
        assert_eq!(b.s[(2, 1)], c(mu));
    }

    #[test]
    fn kappa_at_zero_order_is_k() {
        let k = kappa(0);
        let mut expect = CMat::zeros(3, 3);
        expect[(0, 1)] = c(-1.0);
        expect[(1, 0)] = c(1.0);
        assert_eq!(k, expect);
        let k3 = kappa(3);
        assert!((&k3.adjoint() + &k3).norm_max() == 0.0);
    }

    #[test]
    fn g3_static_axisymmetric_part_is_hermitian() {
        let mp = MaterialPoint::new(
            1.3,
            StiffnessVoigt::transversely_isotropic(5.0, 1.0, 1.5, 4.0, 1.2).unwrap(),
        )
        .unwrap();
        let ctx = WaveContext {
            omega: 1e-300,
            n: 0,
            kz: 0.0,
            m: 3,
        };
        let [_, _, g3] = g_blocks(&mp, &ctx, 0.8).unwrap();
        let b = voigt_blocks(&mp.stiffness);
        let qi = mat_inverse(&b.q_hat).unwrap();
        let rt = &b.r * &kappa(0);
        let expect =
            &(&(&kappa(0).adjoint() * &b.t_hat) * &kappa(0)) - &(&(&rt.adjoint() * &qi) * &rt);
        assert!((&g3 - &expect).norm_max() < 1e-14);
        assert!(crate::numkernel::hermitian_residual(&g3) < 1e-15);
    }

    #[test]
    fn non_positive_definite_moduli_rejected() {
        assert!(StiffnessVoigt::isotropic(1.0, -0.5).is_err());
        let mut t = *StiffnessVoigt::isotropic(1.0, 1.0).unwrap().table();
        t[0][1] = 7.0;
        assert!(StiffnessVoigt::new(t).is_err());
    }

    #[test]
    fn aluminium_normalized_moduli() {
        let al = aluminium();
        let lam = 58.5e9 / WATER_MODULUS_PA;
        let mu = 26e9 / WATER_MODULUS_PA;
        assert!((al.stiffness.get(1, 2) - lam).abs() < 1e-12 * lam);
        assert!((al.stiffness.get(6, 6) - mu).abs() < 1e-12 * mu);
        assert!((al.stiffness.get(1, 1) - (lam + 2.0 * mu)).abs() < 1e-12 * lam);
        assert_eq!(al.rho, 2.7);
    }

    #[test]
    fn reduced_context_requires_decoupling() {
        assert_eq!(
            WaveContext::with_dim(1.0, 0, 0.5, 2),
            Err(Error::NoDecoupling)
        );
        let mut t = *StiffnessVoigt::isotropic(2.0, 1.0).unwrap().table();
        t[0][4] = 0.1;
        t[4][0] = 0.1;
        let mp = MaterialPoint::new(1.0, StiffnessVoigt::new(t).unwrap()).unwrap();
        let ctx = WaveContext::with_dim(1.0, 1, 0.0, 2).unwrap();
        assert_eq!(q_matrix_at(&mp, &ctx, 1.0), Err(Error::NoDecoupling));
    }

    #[test]
    fn profile_support_and_lookup() {
        let al = aluminium();
        let p = RadialProfile::layered(alloc::vec![
            Layer {
                r_inner: 0.5,
                r_outer: 0.7,
                material: al
            },
            Layer {
                r_inner: 0.7,
                r_outer: 1.0,
                material: MaterialPoint { rho: 1.0, ..al }
            },
        ])
        .unwrap();
        assert_eq!(p.support(), (0.5, 1.0));
        assert_eq!(p.material_at(0.6).unwrap().rho, 2.7);
        assert_eq!(p.material_at(0.7).unwrap().rho, 1.0);
        assert_eq!(p.material_at(1.0).unwrap().rho, 1.0);
        assert!(matches!(
            p.material_at(1.2),
            Err(Error::OutOfSupport { .. })
        ));
        let gap = RadialProfile::layered(alloc::vec![
            Layer {
                r_inner: 0.5,
                r_outer: 0.6,
                material: al
            },
            Layer {
                r_inner: 0.65,
                r_outer: 1.0,
                material: al
            },
        ]);
        assert!(gap.is_err());
    }
}
