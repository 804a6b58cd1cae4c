//! Large-N asymptotics of the expected Riesz energy.
//!
//! For supports cut from dilates N^{1/d}·D of a centered body D with
//! |D|·|Λ| = 1, the expected energy expands as
//!
//!   E(t_N) = pole·t_N² - (π^{s-d/2}Γ((d-s)/2)/(Γ(s/2)|Λ|))·I_ν^D(d-s)·t_N^{1+s/d} + o(t_N^{1+s/d}),
//!
//! where I_ν^D(t) = ∫∫_{D×D} |x-y|^{-t} dν dν with ν = |Λ|·Lebesgue. For the
//! ball, I has a Gamma closed form and the second-order constant is the
//! classical A_{s,d}; general bodies are handled by Monte Carlo.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;

use crate::dpp::SpectralSupport;
use crate::energy::{self, MCReport};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::rng::stream_rng;
use crate::specfun;
use crate::zeta;

/// Attempts allowed per rejection-sampled point of a ball or ellipsoid.
const DRAW_BUDGET: usize = 100_000;

/// A centered convex body. Supports of growing trace are cut from its
/// dilates; the second-order energy coefficient integrates over it.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Ball { radius: f64 },
    Box { half_widths: Vec<f64> },
    Ellipsoid { semi_axes: Vec<f64> },
}

fn unit_ball_volume(d: usize) -> f64 {
    let df = d as f64;
    PI.powf(0.5 * df) * specfun::recip_gamma(0.5 * df + 1.0)
}

/// Surface measure of the unit sphere, ω_{d-1} = 2π^{d/2}/Γ(d/2).
pub fn sphere_surface(d: usize) -> f64 {
    let df = d as f64;
    2.0 * PI.powf(0.5 * df) * specfun::recip_gamma(0.5 * df)
}

impl DomainSpec {
    pub fn ball(radius: f64) -> Result<DomainSpec> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain("ball radius must be positive and finite"));
        }
        Ok(DomainSpec::Ball { radius })
    }

    pub fn box_domain(half_widths: Vec<f64>) -> Result<DomainSpec> {
        if half_widths.is_empty() || half_widths.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::Domain("box half-widths must be positive and finite"));
        }
        Ok(DomainSpec::Box { half_widths })
    }

    pub fn ellipsoid(semi_axes: Vec<f64>) -> Result<DomainSpec> {
        if semi_axes.is_empty() || semi_axes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::Domain("ellipsoid semi-axes must be positive and finite"));
        }
        Ok(DomainSpec::Ellipsoid { semi_axes })
    }

    /// Checks the axis count against the ambient dimension; a ball fits any.
    pub fn check_dim(&self, d: usize) -> Result<()> {
        let n = match self {
            DomainSpec::Ball { .. } => return Ok(()),
            DomainSpec::Box { half_widths } => half_widths.len(),
            DomainSpec::Ellipsoid { semi_axes } => semi_axes.len(),
        };
        if n == d {
            Ok(())
        } else {
            Err(Error::Domain("domain axis count must match the dimension"))
        }
    }

    /// Volume in dimension d.
    pub fn volume(&self, d: usize) -> Result<f64> {
        self.check_dim(d)?;
        Ok(match self {
            DomainSpec::Ball { radius } => unit_ball_volume(d) * radius.powi(d as i32),
            DomainSpec::Box { half_widths } => half_widths.iter().map(|h| 2.0 * h).product(),
            DomainSpec::Ellipsoid { semi_axes } => {
                unit_ball_volume(d) * semi_axes.iter().product::<f64>()
            }
        })
    }

    /// Strict-interior test for scale·D with a relative slack of 1e-12, so
    /// lattice points landing exactly on the boundary are excluded on every
    /// platform.
    pub fn contains_scaled(&self, x: &[f64], scale: f64) -> bool {
        const SLACK: f64 = 1.0 - 1e-12;
        match self {
            DomainSpec::Ball { radius } => {
                let r = radius * scale * SLACK;
                x.iter().map(|c| c * c).sum::<f64>() < r * r
            }
            DomainSpec::Box { half_widths } => x
                .iter()
                .zip(half_widths)
                .all(|(c, h)| c.abs() < h * scale * SLACK),
            DomainSpec::Ellipsoid { semi_axes } => {
                let q: f64 = x
                    .iter()
                    .zip(semi_axes)
                    .map(|(c, a)| {
                        let u = c / (a * scale);
                        u * u
                    })
                    .sum();
                q < SLACK * SLACK
            }
        }
    }

    /// Radius of the smallest centered ball containing the body.
    pub fn enclosing_radius(&self) -> f64 {
        match self {
            DomainSpec::Ball { radius } => *radius,
            DomainSpec::Box { half_widths } => {
                half_widths.iter().map(|h| h * h).sum::<f64>().sqrt()
            }
            DomainSpec::Ellipsoid { semi_axes } => semi_axes.iter().fold(0.0, |m, a| m.max(*a)),
        }
    }
}

/// Monte Carlo controls for domains without a closed-form double integral.
#[derive(Debug, Clone, Copy)]
pub struct McSettings {
    pub samples: usize,
    pub seed: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            samples: 1_000_000,
            seed: 0,
        }
    }
}

/// Two-term expansion data: E ≈ leading_coeff·t² + second_coeff·t^{1+s/d}.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub s: f64,
    pub d: usize,
    pub leading_coeff: f64,
    pub second_coeff: f64,
    pub a_sd: f64,
    pub c_upper_bound: f64,
}

/// ∫_0^∞ J_{d/2}(u)² u^{-1-s} du for 0 < s < d, by the Weber-Schafheitlin
/// closed form Γ(1+s)Γ((d-s)/2) / (2^{1+s} Γ(1+s/2)² Γ((d+s)/2+1)).
pub fn bessel_energy_integral(d: usize, s: f64) -> Result<f64> {
    let df = d as f64;
    if d < 1 || !(s > 0.0 && s < df) {
        return Err(Error::Domain("Bessel energy integral requires 0 < s < d"));
    }
    Ok(
        specfun::gamma(1.0 + s)? * specfun::gamma(0.5 * (df - s))? / 2.0f64.powf(1.0 + s)
            * specfun::recip_gamma(1.0 + 0.5 * s).powi(2)
            * specfun::recip_gamma(0.5 * (df + s) + 1.0),
    )
}

/// I_ν^D(t) for the canonical ball (the ball of volume 1/|Λ|), in closed
/// form. By Parseval against the Riesz potential,
///
///   I = covol^{t/d} · π^{t-d/2}Γ((d-t)/2)/Γ(t/2)
///       · d [2π(d/ω_{d-1})^{1/d}]^{d-t} ∫_0^∞ J_{d/2}²(u) u^{-(1+d-t)} du,
///
/// and the Bessel integral has a Gamma closed form. The Riesz prefactor is
/// exactly what the energy bound divides back out, which is why the bound
/// constant of the ball reduces to A_{s,d}.
pub fn riesz_double_integral_ball(d: usize, t: f64, covolume: f64) -> Result<f64> {
    let df = d as f64;
    if d < 1 || !(t > 0.0 && t < df) {
        return Err(Error::Domain("double integral requires exponent in (0, d)"));
    }
    if !(covolume > 0.0 && covolume.is_finite()) {
        return Err(Error::Domain("covolume must be positive"));
    }
    let s = df - t;
    let omega = sphere_surface(d);
    let geometric = (2.0 * PI * (df / omega).powf(1.0 / df)).powf(s);
    let riesz = PI.powf(t - 0.5 * df) * specfun::gamma(0.5 * s)? * specfun::recip_gamma(0.5 * t);
    Ok(covolume.powf(t / df) * riesz * df * geometric * bessel_energy_integral(d, s)?)
}

/// One uniform point of the body, by rejection from the bounding box where
/// the body is curved.
fn draw_in(domain: &DomainSpec, rng: &mut impl Rng, out: &mut [f64]) -> Result<()> {
    let axes: &[f64] = match domain {
        DomainSpec::Box { half_widths } => {
            for (c, h) in out.iter_mut().zip(half_widths) {
                *c = (2.0 * rng.gen::<f64>() - 1.0) * h;
            }
            return Ok(());
        }
        DomainSpec::Ball { .. } => &[],
        DomainSpec::Ellipsoid { semi_axes } => semi_axes,
    };
    for _ in 0..DRAW_BUDGET {
        let mut q = 0.0;
        for c in out.iter_mut() {
            *c = 2.0 * rng.gen::<f64>() - 1.0;
            q += *c * *c;
        }
        if q < 1.0 {
            match domain {
                DomainSpec::Ball { radius } => {
                    for c in out.iter_mut() {
                        *c *= radius;
                    }
                }
                _ => {
                    for (c, a) in out.iter_mut().zip(axes) {
                        *c *= a;
                    }
                }
            }
            return Ok(());
        }
    }
    Err(Error::RejectionBudgetExceeded)
}

/// Monte Carlo I_ν^D(t): independent uniform pairs in D, each contributing
/// (|Λ|·|D|)²·|x-y|^{-t}. Valid for t < d; the variance is finite only for
/// t < d/2, so treat the standard error as indicative near the boundary.
pub fn riesz_double_integral_mc(
    domain: &DomainSpec,
    d: usize,
    t: f64,
    covolume: f64,
    samples: usize,
    seed: u64,
) -> Result<MCReport> {
    let df = d as f64;
    if d < 1 || !(t > 0.0 && t < df) {
        return Err(Error::Domain("double integral requires exponent in (0, d)"));
    }
    if !(covolume > 0.0 && covolume.is_finite()) {
        return Err(Error::Domain("covolume must be positive"));
    }
    if samples < 2 {
        return Err(Error::Domain("Monte Carlo needs at least two samples"));
    }
    domain.check_dim(d)?;
    let weight = {
        let w = covolume * domain.volume(d)?;
        w * w
    };
    let mut rng = stream_rng(seed, 0);
    let mut x = vec![0.0f64; d];
    let mut y = vec![0.0f64; d];
    // Welford accumulation keeps one pass and exact replica order.
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    let mut n = 0.0f64;
    for _ in 0..samples {
        let value = loop {
            draw_in(domain, &mut rng, &mut x)?;
            draw_in(domain, &mut rng, &mut y)?;
            let mut r_sq = 0.0;
            for k in 0..d {
                let diff = x[k] - y[k];
                r_sq += diff * diff;
            }
            // Coinciding draws have probability zero; redraw rather than
            // poison the mean with an infinity.
            if r_sq > 0.0 {
                break weight * r_sq.powf(-0.5 * t);
            }
        };
        n += 1.0;
        let delta = value - mean;
        mean += delta / n;
        m2 += delta * (value - mean);
    }
    let var = m2 / (n - 1.0);
    Ok(MCReport {
        mean,
        stderr: (var / n).sqrt(),
        replicas: samples,
        seed,
    })
}

/// The second-order energy constant of the canonical ball:
///
///   A_{s,d} = -d [2π(d/ω_{d-1})^{1/d}]^s Γ((d-s)/2)Γ(d+1)Γ((s+1)/2)
///             / (2^{d+1} Γ(d/2+1)Γ(s/2+1)Γ((d+s)/2+1)Γ((d+1)/2)).
///
/// A is negative on all of 0 < s < d, tends to -1 as s → 0, and has residue
/// ω_{d-1} at s = d.
pub fn a_constant(s: f64, d: usize) -> Result<f64> {
    let df = d as f64;
    if d < 1 || !(s > 0.0 && s < df) {
        return Err(Error::Domain("a_constant requires 0 < s < d"));
    }
    let omega = sphere_surface(d);
    let scale = (2.0 * PI * (df / omega).powf(1.0 / df)).powf(s);
    let num = specfun::gamma(0.5 * (df - s))?
        * specfun::gamma(df + 1.0)?
        * specfun::gamma(0.5 * (s + 1.0))?;
    let den_inv = specfun::recip_gamma(0.5 * df + 1.0)
        * specfun::recip_gamma(0.5 * s + 1.0)
        * specfun::recip_gamma(0.5 * (df + s) + 1.0)
        * specfun::recip_gamma(0.5 * (df + 1.0));
    Ok(-df * scale * num * den_inv / 2.0f64.powf(df + 1.0))
}

/// I_ν^D(d-s) for the domain: closed form for balls (and for every d = 1
/// body, which is an interval), Monte Carlo otherwise.
fn double_integral(
    lat: &Lattice,
    domain: &DomainSpec,
    t: f64,
    mc: &McSettings,
) -> Result<f64> {
    let d = lat.dim();
    let is_interval = d == 1 || matches!(domain, DomainSpec::Ball { .. });
    if is_interval {
        // In one dimension every centered body is a ball of its own radius;
        // match the volume so the closed form integrates the same interval.
        riesz_double_integral_ball(d, t, lat.covolume())
    } else {
        Ok(riesz_double_integral_mc(domain, d, t, lat.covolume(), mc.samples, mc.seed)?.mean)
    }
}

fn check_canonical_volume(lat: &Lattice, domain: &DomainSpec) -> Result<()> {
    let product = domain.volume(lat.dim())? * lat.covolume();
    if (product - 1.0).abs() > 1e-9 {
        return Err(Error::VolumeMismatch { product });
    }
    Ok(())
}

/// Two-term expansion for supports cut from dilates of D; pre |D|·|Λ| = 1.
///
/// The dilation index n does not enter the coefficients; it is validated so
/// degenerate calls (n = 1) succeed explicitly.
pub fn expected_energy_asymptotic(
    lat: &Lattice,
    domain: &DomainSpec,
    s: f64,
    n: usize,
    mc: &McSettings,
) -> Result<AsymptoticReport> {
    let d = lat.dim();
    let df = d as f64;
    if n == 0 {
        return Err(Error::Domain("dilation index must be positive"));
    }
    if !(s > 0.0 && s < df) {
        return Err(Error::Domain("asymptotic expansion requires 0 < s < d"));
    }
    domain.check_dim(d)?;
    check_canonical_volume(lat, domain)?;
    let i_value = double_integral(lat, domain, df - s, mc)?;
    let prefactor = PI.powf(s - 0.5 * df)
        * specfun::gamma(0.5 * (df - s))?
        * specfun::recip_gamma(0.5 * s)
        / lat.covolume();
    let second_coeff = -prefactor * i_value;
    Ok(AsymptoticReport {
        s,
        d,
        leading_coeff: zeta::pole_term(lat, s)?,
        second_coeff,
        a_sd: a_constant(s, d)?,
        // The covolume-invariant normalization of the same coefficient.
        c_upper_bound: second_coeff * lat.covolume().powf(s / df),
    })
}

/// The covolume-invariant second-order constant of the domain:
/// c = -π^{s-d/2}Γ((d-s)/2)/(Γ(s/2)|Λ|^{1-s/d})·I_ν^D(d-s).
/// Equals A_{s,d} exactly when D is the canonical ball.
pub fn c_upper_bound(
    lat: &Lattice,
    domain: &DomainSpec,
    s: f64,
    mc: &McSettings,
) -> Result<f64> {
    let d = lat.dim();
    let df = d as f64;
    if !(s > 0.0 && s < df) {
        return Err(Error::Domain("upper-bound constant requires 0 < s < d"));
    }
    domain.check_dim(d)?;
    check_canonical_volume(lat, domain)?;
    let i_value = double_integral(lat, domain, df - s, mc)?;
    Ok(-PI.powf(s - 0.5 * df)
        * specfun::gamma(0.5 * (df - s))?
        * specfun::recip_gamma(0.5 * s)
        / lat.covolume().powf(1.0 - s / df)
        * i_value)
}

/// Greedy maximizer of the pair sum over supports of size t_n drawn from
/// Λ* ∩ B(0, candidate_radius).
///
/// Starts from the zero frequency and repeatedly adds the candidate with the
/// largest marginal gain Σ_{w∈S} |c-w|^{s-d}; ties go to the
/// lexicographically smallest coefficients. The result is the better of the
/// greedy set and the centered ball (the t_n norm-smallest candidates), so
/// it never loses to the ball benchmark.
pub fn greedy_support_optimizer(
    lat: &Lattice,
    t_n: usize,
    s: f64,
    candidate_radius: f64,
) -> Result<SpectralSupport> {
    let d = lat.dim();
    let df = d as f64;
    if t_n == 0 {
        return Err(Error::Domain("support size must be positive"));
    }
    if !(s > 0.0 && s < df) {
        return Err(Error::Domain("support optimizer requires 0 < s < d"));
    }
    if !(candidate_radius > 0.0 && candidate_radius.is_finite()) {
        return Err(Error::Domain("candidate radius must be positive"));
    }
    let dual = lat.dual();
    let origin = vec![0.0; d];
    let mut pool = dual.enumerate_ball(&origin, candidate_radius)?;
    if pool.len() < t_n {
        return Err(Error::PoolTooSmall {
            pool: pool.len(),
            needed: t_n,
        });
    }
    // Canonical scan order makes the tie-break deterministic.
    pool.sort_by(|a, b| a.coeffs.cmp(&b.coeffs));
    let exponent = s - df;

    let zero_at = pool
        .iter()
        .position(|v| v.coeffs.iter().all(|&c| c == 0))
        .expect("a positive-radius ball contains the origin");
    let mut chosen = vec![zero_at];
    let mut in_set = vec![false; pool.len()];
    in_set[zero_at] = true;
    while chosen.len() < t_n {
        let mut best: Option<(f64, usize)> = None;
        for (i, v) in pool.iter().enumerate() {
            if in_set[i] {
                continue;
            }
            let mut gain = 0.0;
            for &j in &chosen {
                let w = &pool[j];
                let mut dist_sq = 0.0;
                for k in 0..d {
                    let t = v.cartesian[k] - w.cartesian[k];
                    dist_sq += t * t;
                }
                gain += dist_sq.powf(0.5 * exponent);
            }
            if best.map_or(true, |(g, _)| gain > g) {
                best = Some((gain, i));
            }
        }
        let (_, i) = best.expect("pool larger than the support");
        chosen.push(i);
        in_set[i] = true;
    }
    let greedy_coeffs: Vec<Vec<i64>> = chosen.iter().map(|&i| pool[i].coeffs.clone()).collect();

    let mut by_norm: Vec<usize> = (0..pool.len()).collect();
    by_norm.sort_by(|&a, &b| {
        pool[a]
            .norm_sq
            .total_cmp(&pool[b].norm_sq)
            .then_with(|| pool[a].coeffs.cmp(&pool[b].coeffs))
    });
    let ball_coeffs: Vec<Vec<i64>> = by_norm[..t_n]
        .iter()
        .map(|&i| pool[i].coeffs.clone())
        .collect();

    let greedy_supp = SpectralSupport::new(lat.clone(), &greedy_coeffs)?;
    let ball_supp = SpectralSupport::new(lat.clone(), &ball_coeffs)?;
    if energy::pair_sum(&ball_supp, s) > energy::pair_sum(&greedy_supp, s) {
        Ok(ball_supp)
    } else {
        Ok(greedy_supp)
    }
}
