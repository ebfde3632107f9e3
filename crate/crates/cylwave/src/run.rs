//! The four commands. Each renders CSV text; [`run`] writes it out.

use std::fmt::Write as _;
use std::path::Path;

use cylwave_core::cylfun::CylKind;
use cylwave_core::elastodyn::{ElasticSystem, RadialProfile, WaveContext};
use cylwave_core::impedance::{
    conditional_from_twopoint, integrate_impedance, integrate_impedance_with, naive_riccati_integrate,
    ConditionalImpedance,
};
use cylwave_core::matricant::Scheme;
use cylwave_core::scatter::{
    default_n_max, pressure_field, scalar_impedance_z0, solve_scattering_with, surface_impedance, InnerCondition,
    ScatteringConfig, ScatteringResult, SurfaceMethod,
};
use cylwave_core::tilayers::{global_twopoint, ti_conditional_impedance, LayerTI, TiMaterial};
use cylwave_core::{CMat, C64};
use rayon::prelude::*;

use crate::config::{Command, Inner, RunConfig};
use crate::error::{CliError, CliResult};

/// Rendered CSV documents of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub main: String,
    pub coeffs: Option<String>,
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(cfg: &RunConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    format!("# cylwave {}\n# config {json}\n", env!("CARGO_PKG_VERSION"))
}

fn context(profile: &RadialProfile, omega: f64, n: u32, kz: f64) -> CliResult<WaveContext> {
    let mirror = match profile {
        RadialProfile::PiecewiseUniform(layers) => layers.iter().all(|l| l.material.stiffness.is_z_mirror_symmetric()),
        RadialProfile::Smooth { .. } => false,
    };
    let m = if kz == 0.0 && mirror { 2 } else { 3 };
    Ok(WaveContext::with_dim(omega, n, kz, m)?)
}

fn inner_impedance(profile: &RadialProfile, ctx: &WaveContext, inner: Inner, r0: f64) -> CliResult<ConditionalImpedance> {
    match inner {
        Inner::Solid => {
            let mat = TiMaterial::from_material(&profile.material_at(r0)?)?;
            Ok(ti_conditional_impedance(CylKind::J, &mat, ctx, r0)?)
        }
        Inner::Free => Ok(ConditionalImpedance::new(CMat::zeros(ctx.m, ctx.m), r0)),
    }
}

/// TI layers clipped to `[r0, r1]`, if the profile is piecewise TI there.
fn clipped_layers(profile: &RadialProfile, r0: f64, r1: f64) -> Option<Vec<LayerTI>> {
    let RadialProfile::PiecewiseUniform(layers) = profile else { return None };
    let mut out = Vec::new();
    for l in layers {
        let (a, b) = (l.r_inner.max(r0), l.r_outer.min(r1));
        if b > a {
            out.push(LayerTI::new(a, b, TiMaterial::from_material(&l.material).ok()?).ok()?);
        }
    }
    Some(out)
}

/// Exact `z(r1)` when `[r0, r1]` is one uniform TI layer over a solid core
/// of the same material, else the layer recursion for piecewise TI spans.
fn closed_form(cfg: &RunConfig, profile: &RadialProfile, ctx: &WaveContext) -> Option<(ConditionalImpedance, &'static str)> {
    let layers = clipped_layers(profile, cfg.r0, cfg.r1)?;
    if layers.len() == 1 && cfg.inner == Inner::Solid {
        let z = ti_conditional_impedance(CylKind::J, &layers[0].material, ctx, cfg.r1).ok()?;
        return Some((z, "exact"));
    }
    let z0 = inner_impedance(profile, ctx, cfg.inner, cfg.r0).ok()?;
    let zp = global_twopoint(&layers, ctx).ok()?;
    Some((conditional_from_twopoint(&zp, &z0).ok()?, "recursion"))
}

fn impedance_trace(cfg: &RunConfig, profile: &RadialProfile) -> CliResult<String> {
    let ctx = context(profile, cfg.ka[0], cfg.n, cfg.kz)?;
    let sys = ElasticSystem::new(profile, ctx);
    let scheme = cfg.schemes[0];
    let z0 = inner_impedance(profile, &ctx, cfg.inner, cfg.r0)?;
    let norm = (cfg.n as f64).powi(3) + 1.0;
    let mut mobius = vec![(cfg.r0, z0.det2())];
    integrate_impedance_with(&sys, &z0, cfg.r0, cfg.r1, cfg.steps, scheme, |z| mobius.push((z.r, z.det2())))?;
    let naive = naive_riccati_integrate(&sys, &z0, cfg.r0, cfg.r1, cfg.steps)?;
    let exact_mat = match clipped_layers(profile, cfg.r0, cfg.r1) {
        Some(l) if l.len() == 1 && cfg.inner == Inner::Solid => Some(l[0].material),
        _ => None,
    };
    let nan = C64::new(f64::NAN, f64::NAN);
    let mut out = header(cfg);
    out.push_str("r,mobius_re,mobius_im,naive_re,naive_im,exact_re,exact_im\n");
    for (i, (r, det)) in mobius.iter().enumerate() {
        let nv = naive.samples.get(i).map(|z| z.det2()).unwrap_or(nan);
        let ex = exact_mat
            .and_then(|m| ti_conditional_impedance(CylKind::J, &m, &ctx, *r).ok())
            .map(|z| z.det2())
            .unwrap_or(nan);
        let [a, b, c, d, e, f] = [det.re, det.im, nv.re, nv.im, ex.re, ex.im].map(|v| num(v / norm));
        writeln!(out, "{},{a},{b},{c},{d},{e},{f}", num(*r)).unwrap();
    }
    Ok(out)
}

fn convergence(cfg: &RunConfig, profile: &RadialProfile) -> CliResult<String> {
    let ctx = context(profile, cfg.ka[0], cfg.n, cfg.kz)?;
    let sys = ElasticSystem::new(profile, ctx);
    let z0 = inner_impedance(profile, &ctx, cfg.inner, cfg.r0)?;
    let (reference, kind) = match closed_form(cfg, profile, &ctx) {
        Some((z, kind)) => (z.det2(), kind),
        None => {
            let fine = 8 * cfg.step_counts.iter().max().copied().unwrap_or(1);
            (integrate_impedance(&sys, &z0, cfg.r0, cfg.r1, fine, Scheme::Mg4)?.z.det2(), "mg4-fine")
        }
    };
    let jobs: Vec<(Scheme, usize)> =
        cfg.schemes.iter().flat_map(|&s| cfg.step_counts.iter().map(move |&k| (s, k))).collect();
    let errs = jobs
        .par_iter()
        .map(|&(s, k)| Ok((integrate_impedance(&sys, &z0, cfg.r0, cfg.r1, k, s)?.z.det2() - reference).norm()))
        .collect::<CliResult<Vec<f64>>>()?;
    let mut out = header(cfg);
    writeln!(out, "# reference {kind} det2 {} {}", num(reference.re), num(reference.im)).unwrap();
    out.push_str("scheme,steps,abs_err\n");
    for ((s, k), e) in jobs.iter().zip(errs) {
        writeln!(out, "{},{k},{}", s.name(), num(e)).unwrap();
    }
    Ok(out)
}

/// Scattering solution with the partial waves of the default truncation
/// evaluated in parallel.
pub fn solve_parallel(cfg: &ScatteringConfig<'_>) -> cylwave_core::Result<ScatteringResult> {
    let base = default_n_max(cfg.ka);
    let z0: Vec<cylwave_core::Result<C64>> = (0..=base)
        .into_par_iter()
        .map(|n| surface_impedance(cfg, n).and_then(|z| scalar_impedance_z0(&z)))
        .collect();
    solve_scattering_with(cfg, |cfg, n| match z0.get(n as usize) {
        Some(v) => v.clone(),
        None => scalar_impedance_z0(&surface_impedance(cfg, n)?),
    })
}

fn scattering(cfg: &RunConfig, profile: &RadialProfile, ka: f64) -> CliResult<ScatteringResult> {
    let mut sc =
        ScatteringConfig::new(profile, ka, SurfaceMethod::Integrate { scheme: cfg.schemes[0], steps: cfg.steps })?;
    sc.inner = match cfg.inner {
        Inner::Solid => InnerCondition::SolidCore,
        Inner::Free => InnerCondition::TractionFree,
    };
    sc.angles = 2;
    Ok(solve_parallel(&sc)?)
}

fn scatter(cfg: &RunConfig, profile: &RadialProfile) -> CliResult<Output> {
    let results = cfg.ka.par_iter().map(|&ka| scattering(cfg, profile, ka)).collect::<CliResult<Vec<_>>>()?;
    let mut out = header(cfg);
    out.push_str("ka,sigma_tot,abs_f_pi\n");
    let mut coeffs = header(cfg);
    coeffs.push_str("ka,n,re_b,im_b\n");
    for res in &results {
        writeln!(out, "{},{},{}", num(res.ka), num(res.sigma_tot), num(res.backscatter().norm())).unwrap();
        for (n, b) in res.b.iter().enumerate() {
            writeln!(coeffs, "{},{n},{},{}", num(res.ka), num(b.re), num(b.im)).unwrap();
        }
    }
    Ok(Output { main: out, coeffs: cfg.coeffs.as_ref().map(|_| coeffs) })
}

fn field(cfg: &RunConfig, profile: &RadialProfile) -> CliResult<String> {
    let ka = cfg.ka[0];
    let res = scattering(cfg, profile, ka)?;
    let p = cfg.points;
    let coord = |i: usize| -cfg.extent + 2.0 * cfg.extent * i as f64 / (p - 1) as f64;
    let rows = (0..p)
        .into_par_iter()
        .map(|iy| {
            let y = coord(iy);
            let mut row = String::new();
            for ix in 0..p {
                let x = coord(ix);
                let r = x.hypot(y);
                let v = if r < 1.0 {
                    C64::new(f64::NAN, f64::NAN)
                } else {
                    pressure_field(&[(r, y.atan2(x))], &res.b, ka, 1.0)?[0]
                };
                writeln!(row, "{},{},{},{},{}", num(x), num(y), num(v.re), num(v.im), num(v.norm())).unwrap();
            }
            Ok(row)
        })
        .collect::<CliResult<Vec<String>>>()?;
    let mut out = header(cfg);
    writeln!(out, "# sigma_tot {} n_max {}", num(res.sigma_tot), res.n_max()).unwrap();
    out.push_str("x,y,re_p,im_p,abs_p\n");
    out.extend(rows);
    Ok(out)
}

/// Renders the outputs of `cfg` on a pool of `cfg.threads` workers.
pub fn render(cfg: &RunConfig) -> CliResult<Output> {
    let profile = cfg.profile.build()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::usage(format!("--threads: {e}")))?;
    pool.install(|| match cfg.command {
        Command::ImpedanceTrace => Ok(Output { main: impedance_trace(cfg, &profile)?, coeffs: None }),
        Command::Convergence => Ok(Output { main: convergence(cfg, &profile)?, coeffs: None }),
        Command::Scatter => scatter(cfg, &profile),
        Command::Field => Ok(Output { main: field(cfg, &profile)?, coeffs: None }),
    })
}

fn write(path: Option<&Path>, text: &str) -> CliResult<()> {
    use std::io::Write;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e)),
    }
}

/// Renders and writes all outputs of `cfg`.
pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let out = render(cfg)?;
    write(cfg.out.as_deref(), &out.main)?;
    if let (Some(p), Some(text)) = (cfg.coeffs.as_deref(), out.coeffs.as_deref()) {
        write(Some(p), text)?;
    }
    Ok(())
}
