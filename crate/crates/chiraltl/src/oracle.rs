//! Brute-force wave-optics validation of the coefficient engine: scalar
//! paraxial propagation of incoherent illumination through the three-grating
//! stack on a periodic grid, never sharing the Fourier/Talbot coefficient
//! algebra with the engine (the solved cut-offs and the slit potential are
//! the only shared inputs, by design - the oracle validates the coefficient
//! path, not the interaction model).
//!
//! The spatially incoherent source is decomposed into mutually incoherent
//! plane-wave modes e^{2 pi i m x / W}. Averaging the shear over incidence
//! momenta is what collapses the Wigner transport to the Talbot sums, and on
//! the ring the average over on-grid modes reproduces it without the
//! rational-Talbot resonance artefacts that point-source deltas suffer from
//! (a grid delta at integer L/L_lambda propagates into a discrete Gauss comb
//! correlated with the grating lattice; plane-wave modes stay smooth).

use crate::cutoff::cutoff_for_grating;
use crate::domain::InterferometerConfig;
use crate::error::{config_err, Result};
use crate::talbot::{
    fringe_from_harmonics, EikonalWindow, FringeResult, SignalOptions, X3Grid,
};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::sync::Arc;

/// Transverse grid: window width W = n_periods * d sampled at n_samples.
#[derive(Debug, Clone, Copy)]
pub struct WaveGrid {
    pub n_periods: usize,
    pub n_samples: usize,
}

impl Default for WaveGrid {
    fn default() -> Self {
        Self {
            n_periods: 32,
            n_samples: 1 << 15,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub grid: WaveGrid,
    /// Number of incoherent source modes; 0 picks a Talbot-ratio-dependent
    /// default.
    pub n_modes: usize,
    /// Switch the free-flight phase off to recover the classical moire
    /// (shadow) limit.
    pub propagation_phase: bool,
    /// Near-wall eikonal phase cap, shared with the engine's window model.
    pub phase_cap: f64,
    /// Fringe samples per period on output.
    pub x3_samples: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            grid: WaveGrid::default(),
            n_modes: 0,
            propagation_phase: true,
            phase_cap: 200.0,
            x3_samples: 512,
        }
    }
}

/// Rasterize a centred binary window of half-width w as per-cell coverage
/// fractions of the d-periodic mask.
fn raster_window(n: usize, big_w: f64, d: f64, w: f64) -> Vec<f64> {
    let dx = big_w / n as f64;
    (0..n)
        .map(|i| {
            let left = -0.5 * big_w + i as f64 * dx;
            // position of the cell within its period
            let c = left + 0.5 * dx;
            let local = (c + 0.5 * d).rem_euclid(d) - 0.5 * d;
            let l_loc = local - 0.5 * dx;
            let r_loc = local + 0.5 * dx;
            ((r_loc.min(w) - l_loc.max(-w)).max(0.0) / dx).min(1.0)
        })
        .collect()
}

fn fft_freqs(n: usize, big_w: f64) -> Vec<f64> {
    (0..n)
        .map(|m| {
            let s = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
            s / big_w
        })
        .collect()
}

/// Propagate incoherent illumination through G1 -> L -> G2 -> L and convolve
/// the arriving density with |t3|^2. Output is absolutely normalized: a flat
/// unit input through ideal gratings gives mean S = f1 f2 f3.
pub fn propagate_three_gratings(
    cfg: &InterferometerConfig,
    opts: &OracleOptions,
) -> Result<FringeResult> {
    cfg.validate()?;
    let d = cfg.g1.period_d;
    let grid = opts.grid;
    if grid.n_periods < 32 {
        return config_err(format!(
            "wave grid needs at least 32 periods, got {}",
            grid.n_periods
        ));
    }
    if !grid.n_samples.is_power_of_two() {
        return config_err("wave grid sample count must be a power of two");
    }
    let n = grid.n_samples;
    let big_w = grid.n_periods as f64 * d;
    let dx = big_w / n as f64;
    let lambda = cfg.wavelength()?;
    let lam_l = lambda * cfg.separation_l;
    if opts.propagation_phase && dx > lam_l / (2.0 * big_w) {
        return config_err(format!(
            "Nyquist violation: sample spacing {dx:.3e} m exceeds lambda L / (2 W) = {:.3e} m; \
             raise n_samples or shrink the window",
            lam_l / (2.0 * big_w)
        ));
    }
    if grid.n_samples % (grid.n_periods * opts.x3_samples) != 0 {
        return config_err(format!(
            "n_samples = {} must be divisible by n_periods * x3_samples = {}",
            grid.n_samples,
            grid.n_periods * opts.x3_samples
        ));
    }
    let tau = cfg.talbot_ratio()?;

    // masks from the shared cut-off solutions
    let mol = &cfg.molecule;
    let xc1 = cutoff_for_grating(&cfg.g1, mol, cfg.v_z)?.x_c;
    let xc2 = cutoff_for_grating(&cfg.g2, mol, cfg.v_z)?.x_c;
    let xc3 = cutoff_for_grating(&cfg.g3, mol, cfg.v_z)?.x_c;
    let w1 = cfg.g1.half_open_x_o() - cfg.g1.coating_thickness_a - xc1;
    let w3 = cfg.g3.half_open_x_o() - cfg.g3.coating_thickness_a - xc3;
    if w1 <= 0.0 || w3 <= 0.0 {
        return config_err("cut-off closes G1 or G3");
    }
    let window = EikonalWindow::new(&cfg.g2, mol, cfg.v_z, xc2, opts.phase_cap)?;
    let w2 = window.half_width;

    let t1 = raster_window(n, big_w, d, w1);
    let t3sq = raster_window(n, big_w, d, w3);
    // G2: coverage-weighted complex eikonal factor, rasterized independently
    // of the coefficient quadrature
    let t2: Vec<Complex64> = (0..n)
        .map(|i| {
            let left = -0.5 * big_w + i as f64 * dx;
            let c = left + 0.5 * dx;
            let local = (c + 0.5 * d).rem_euclid(d) - 0.5 * d;
            let lo = (local - 0.5 * dx).max(-w2);
            let hi = (local + 0.5 * dx).min(w2);
            if hi <= lo {
                Complex64::new(0.0, 0.0)
            } else {
                window.g(0.5 * (lo + hi)) * ((hi - lo) / dx)
            }
        })
        .collect();

    let kernel: Vec<Complex64> = if opts.propagation_phase {
        fft_freqs(n, big_w)
            .iter()
            .map(|&f| Complex64::from_polar(1.0, -PI * lam_l * f * f))
            .collect()
    } else {
        vec![Complex64::new(1.0, 0.0); n]
    };

    let n_modes = if opts.n_modes > 0 {
        opts.n_modes
    } else if !opts.propagation_phase {
        1
    } else {
        let target = (200.0 * grid.n_periods as f64 / tau.max(1e-3)).round() as usize;
        target.clamp(4 * grid.n_periods, 40_000)
    };

    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let fwd = Arc::new(fwd);
    let inv = Arc::new(inv);

    // incoherent mode loop; fixed chunking with ordered reduction keeps the
    // f64 sums bit-identical for any worker count
    let chunk = 64usize;
    let n_chunks = n_modes.div_ceil(chunk);
    let partials: Vec<Vec<f64>> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let fwd = Arc::clone(&fwd);
            let inv = Arc::clone(&inv);
            let mut intensity = vec![0.0f64; n];
            let mut psi = vec![Complex64::new(0.0, 0.0); n];
            for m0 in (ci * chunk)..n_modes.min((ci + 1) * chunk) {
                for (i, p) in psi.iter_mut().enumerate() {
                    // plane wave e^{2 pi i m0 x / W} at cell centres
                    let arg = PI * m0 as f64 * (2.0 * (i as f64 + 0.5) / n as f64 - 1.0);
                    *p = Complex64::from_polar(t1[i], arg);
                }
                fwd.process(&mut psi);
                for (p, k) in psi.iter_mut().zip(&kernel) {
                    *p *= k;
                }
                inv.process(&mut psi);
                let scale = 1.0 / n as f64;
                for (p, t) in psi.iter_mut().zip(&t2) {
                    *p = *p * scale * t;
                }
                fwd.process(&mut psi);
                for (p, k) in psi.iter_mut().zip(&kernel) {
                    *p *= k;
                }
                inv.process(&mut psi);
                let scale = 1.0 / n as f64;
                for (acc, p) in intensity.iter_mut().zip(&psi) {
                    let v = *p * scale;
                    *acc += v.norm_sqr();
                }
            }
            intensity
        })
        .collect();
    let mut intensity = vec![0.0f64; n];
    for part in &partials {
        for (acc, v) in intensity.iter_mut().zip(part) {
            *acc += v;
        }
    }
    let inv_modes = 1.0 / n_modes as f64;
    for v in intensity.iter_mut() {
        *v *= inv_modes;
    }

    // S(x3) = (1/N) sum_n I[n] |t3|^2[n - j] via FFT correlation
    let mut a: Vec<Complex64> = intensity.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut b: Vec<Complex64> = t3sq.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y.conj();
    }
    inv.process(&mut a);
    let norm = 1.0 / (n as f64 * n as f64);
    let s_full: Vec<f64> = a.iter().map(|z| z.re * norm).collect();

    // fold onto one period and resample onto the engine's x3 schema
    let per = n / grid.n_periods;
    let mut s_fold = vec![0.0f64; per];
    for q in 0..grid.n_periods {
        for r in 0..per {
            s_fold[r] += s_full[q * per + r];
        }
    }
    let inv_p = 1.0 / grid.n_periods as f64;
    for v in s_fold.iter_mut() {
        *v *= inv_p;
    }

    // harmonics of the folded fringe for the sinusoidal visibility
    let l_harm = 32usize.min(per / 2 - 1);
    let mut harmonics = Vec::with_capacity(l_harm + 1);
    for l in 0..=l_harm {
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, &s) in s_fold.iter().enumerate() {
            acc += s * Complex64::from_polar(1.0, -2.0 * PI * l as f64 * r as f64 / per as f64);
        }
        harmonics.push(acc / per as f64);
    }

    let stride = per / opts.x3_samples;
    let x3: Vec<f64> = (0..opts.x3_samples)
        .map(|i| d * (i * stride) as f64 / per as f64)
        .collect();
    let s: Vec<f64> = (0..opts.x3_samples).map(|i| s_fold[i * stride]).collect();
    let mut fr = fringe_from_harmonics(&harmonics, d, X3Grid::PeriodSamples(2))?;
    fr.x3 = x3;
    fr.s = s;
    Ok(fr)
}

/// Classical shadow signal by direct ray binning: straight trajectories
/// through the three binary masks, fully independent of the wave pipeline.
pub fn ray_shadow_signal(
    half_widths: [f64; 3],
    d: f64,
    n_rays: usize,
    x3: &[f64],
) -> Vec<f64> {
    let inside = |x: f64, w: f64| {
        let local = (x + 0.5 * d).rem_euclid(d) - 0.5 * d;
        local.abs() <= w
    };
    x3.iter()
        .map(|&shift| {
            let mut hits = 0usize;
            for r in 0..n_rays {
                let x = d * (r as f64 + 0.5) / n_rays as f64 - 0.5 * d;
                if inside(x, half_widths[0])
                    && inside(x, half_widths[1])
                    && inside(x - shift, half_widths[2])
                {
                    hits += 1;
                }
            }
            hits as f64 / n_rays as f64
        })
        .collect()
}

/// Total intensity change of one free-flight step; the propagation is a pure
/// phase in momentum space so this must be zero to rounding.
pub fn flight_energy_defect(n: usize, lam_l: f64, big_w: f64) -> f64 {
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    // deterministic pseudo-random field
    let mut psi: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = i as f64 * 0.61803398875;
            Complex64::from_polar(0.5 + (t.fract() - 0.5).abs(), 7.0 * t.sin())
        })
        .collect();
    let before: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    fwd.process(&mut psi);
    for (p, f) in psi.iter_mut().zip(fft_freqs(n, big_w)) {
        *p *= Complex64::from_polar(1.0, -PI * lam_l * f * f);
    }
    inv.process(&mut psi);
    let scale = 1.0 / n as f64;
    let after: f64 = psi.iter().map(|z| (z * scale).norm_sqr()).sum();
    (after - before).abs() / before
}

/// Convergence diagnostic: visibility shift when doubling the incoherent
/// mode count.
pub fn mode_doubling_shift(cfg: &InterferometerConfig, opts: &OracleOptions) -> Result<f64> {
    let base = propagate_three_gratings(cfg, opts)?;
    let mut more = *opts;
    more.n_modes = if opts.n_modes > 0 {
        2 * opts.n_modes
    } else {
        // resolve the auto choice, then double it
        let tau = cfg.talbot_ratio()?;
        2 * ((200.0 * opts.grid.n_periods as f64 / tau.max(1e-3)).round() as usize)
            .clamp(4 * opts.grid.n_periods, 40_000)
    };
    let doubled = propagate_three_gratings(cfg, &more)?;
    Ok((base.visibility - doubled.visibility).abs())
}

/// Engine-vs-oracle comparison record.
#[derive(Debug, Clone)]
pub struct OracleComparison {
    pub engine: FringeResult,
    pub oracle: FringeResult,
    pub visibility_diff: f64,
    /// RMS of the pointwise signal difference in units of the engine dc.
    pub rms_over_dc: f64,
}

/// Run both paths on the same configuration and difference them on the
/// shared x3 grid.
pub fn compare_engine_oracle(
    cfg: &InterferometerConfig,
    engine_opts: &SignalOptions,
    oracle_opts: &OracleOptions,
) -> Result<OracleComparison> {
    let mut eo = *engine_opts;
    eo.x3_grid = X3Grid::PeriodSamples(oracle_opts.x3_samples);
    eo.phase_cap = oracle_opts.phase_cap;
    let engine = crate::talbot::signal(cfg, &eo)?;
    let oracle = propagate_three_gratings(cfg, oracle_opts)?;
    let dc = engine.dc_level;
    let mut sq = 0.0;
    for (a, b) in engine.s.iter().zip(&oracle.s) {
        sq += (a - b) * (a - b);
    }
    let rms = (sq / engine.s.len() as f64).sqrt() / dc;
    Ok(OracleComparison {
        visibility_diff: (engine.visibility - oracle.visibility).abs(),
        rms_over_dc: rms,
        engine,
        oracle,
    })
}
