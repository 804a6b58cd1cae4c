//! Spectral supports and exact sampling of the associated projection
//! determinantal point processes on the torus R^d/Λ.
//!
//! A support is a finite set of distinct dual-lattice frequencies
//! {w_1, ..., w_t} ⊂ Λ*. The kernel K(u,v) = Σ_w e^{2πi⟨u-v,w⟩} projects onto
//! the span of the corresponding characters, and the determinantal process it
//! induces has exactly t points, translation invariant on the torus.
//! Sampling is exact: point k+1 is drawn from the conditional density
//! r_k(x)/(t-k), where r_k(x) is the squared distance of the feature vector
//! φ(x) = (e^{2πi⟨x,w⟩})_w from the span of the features of the points drawn
//! so far, by rejection from the uniform proposal with envelope constant
//! t/(t-k). The telescoping product of conditionals is det(K(x_i,x_j))/t!,
//! symmetric in its arguments, so the drawn order is exchangeable.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

#[allow(unused_imports)]
use num_traits::Float;

use crate::asymptotics::DomainSpec;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeVector, TorusPoint, DEFAULT_ENUM_CAP};
use crate::linalg;
use crate::rng::stream_rng;

/// Proposals allowed per point before sampling gives up.
pub const REJECTION_BUDGET: usize = 1_000_000;

/// A finite set of distinct dual-lattice frequencies defining a projection
/// kernel on the torus R^d/Λ.
#[derive(Debug, Clone)]
pub struct SpectralSupport {
    lattice: Lattice,
    dual: Lattice,
    vectors: Vec<LatticeVector>,
}

impl SpectralSupport {
    /// Builds a support from integer dual coefficients. The coefficient
    /// vectors must be distinct and nonempty; they are stored sorted by norm,
    /// then lexicographically, so equal supports compare equal.
    pub fn new(lattice: Lattice, coeffs: &[Vec<i64>]) -> Result<SpectralSupport> {
        if coeffs.is_empty() {
            return Err(Error::EmptySupport);
        }
        let d = lattice.dim();
        for c in coeffs {
            if c.len() != d {
                return Err(Error::Domain("dual coefficients must match the dimension"));
            }
        }
        let mut check: Vec<&Vec<i64>> = coeffs.iter().collect();
        check.sort();
        if check.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::Domain("duplicate dual vector in support"));
        }
        let dual = lattice.dual();
        let mut vectors: Vec<LatticeVector> = coeffs.iter().map(|c| dual.vector(c)).collect();
        vectors.sort_by(|a, b| {
            a.norm_sq
                .total_cmp(&b.norm_sq)
                .then_with(|| a.coeffs.cmp(&b.coeffs))
        });
        Ok(SpectralSupport {
            lattice,
            dual,
            vectors,
        })
    }

    /// The torus lattice Λ.
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// The dual lattice Λ* the frequencies live on.
    pub fn dual(&self) -> &Lattice {
        &self.dual
    }

    /// The frequencies, sorted by norm then coefficients.
    pub fn vectors(&self) -> &[LatticeVector] {
        &self.vectors
    }

    /// Trace of the kernel: the number of points in every sample.
    pub fn t_n(&self) -> usize {
        self.vectors.len()
    }
}

/// One sampled point configuration; always `t_n` points, every point reduced
/// to the fundamental domain.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusConfiguration {
    pub points: Vec<TorusPoint>,
    pub seed: u64,
}

fn require_zd(lat: &Lattice) -> Result<()> {
    let d = lat.dim();
    for i in 0..d {
        for j in 0..d {
            let want = if i == j { 1.0 } else { 0.0 };
            if (lat.basis()[(i, j)] - want).abs() > 1e-12 {
                return Err(Error::Domain("this support constructor requires Z^d"));
            }
        }
    }
    Ok(())
}

/// Runs `f` over every integer vector of [-m, m]^d in odometer order.
fn for_each_box(d: usize, m: i64, mut f: impl FnMut(&[i64])) {
    let mut cur = vec![-m; d];
    'outer: loop {
        f(&cur);
        let mut i = 0;
        while i < d {
            cur[i] += 1;
            if cur[i] <= m {
                continue 'outer;
            }
            cur[i] = -m;
            i += 1;
        }
        break;
    }
}

/// All frequencies with ‖λ‖_∞ ≤ n on Z^d; the trace is (2n+1)^d.
pub fn support_box(lat: &Lattice, n: usize) -> Result<SpectralSupport> {
    require_zd(lat)?;
    let d = lat.dim();
    let side = 2 * n as u128 + 1;
    if side.pow(d as u32) > DEFAULT_ENUM_CAP as u128 {
        return Err(Error::CapExceeded {
            cap: DEFAULT_ENUM_CAP,
        });
    }
    let mut coeffs = Vec::new();
    for_each_box(d, n as i64, |c| coeffs.push(c.to_vec()));
    SpectralSupport::new(lat.clone(), &coeffs)
}

/// All frequencies with ‖λ‖² = n on Z^d; the trace is the number of
/// representations of n as an ordered sum of d squares.
pub fn support_shell(lat: &Lattice, n: u64) -> Result<SpectralSupport> {
    require_zd(lat)?;
    if n == 0 {
        return Err(Error::Domain("shell norm must be positive"));
    }
    let d = lat.dim();
    let mut m = (n as f64).sqrt() as i64;
    while (m + 1) * (m + 1) <= n as i64 {
        m += 1;
    }
    while m * m > n as i64 {
        m -= 1;
    }
    let side = (2 * m + 1) as u128;
    if side.pow(d as u32) > DEFAULT_ENUM_CAP as u128 {
        return Err(Error::CapExceeded {
            cap: DEFAULT_ENUM_CAP,
        });
    }
    let mut coeffs = Vec::new();
    for_each_box(d, m, |c| {
        if c.iter().map(|&x| x * x).sum::<i64>() == n as i64 {
            coeffs.push(c.to_vec());
        }
    });
    if coeffs.is_empty() {
        return Err(Error::EmptyShell);
    }
    SpectralSupport::new(lat.clone(), &coeffs)
}

/// Frequencies of Λ* strictly inside the dilate N^{1/d}·D of a centered
/// domain. Boundary points are excluded; the trace grows like N·|D|·|Λ|.
pub fn support_scaled_domain(
    lat: &Lattice,
    domain: &DomainSpec,
    n: usize,
) -> Result<SpectralSupport> {
    if n == 0 {
        return Err(Error::Domain("dilation index must be positive"));
    }
    let d = lat.dim();
    domain.check_dim(d)?;
    let scale = (n as f64).powf(1.0 / d as f64);
    let radius = domain.enclosing_radius() * scale;
    let dual = lat.dual();
    let origin = vec![0.0; d];
    let pool = dual.enumerate_ball(&origin, radius + 1e-9)?;
    let mut coeffs = Vec::new();
    for v in &pool {
        if domain.contains_scaled(&v.cartesian, scale) {
            coeffs.push(v.coeffs.clone());
        }
    }
    if coeffs.is_empty() {
        return Err(Error::EmptySupport);
    }
    SpectralSupport::new(lat.clone(), &coeffs)
}

/// The projection kernel K(u,v) = Σ_w e^{2πi⟨u-v,w⟩}.
///
/// K(u,u) = t_N, K(u,v) = conj(K(v,u)), and K depends on u-v only.
pub fn kernel_eval(supp: &SpectralSupport, u: &TorusPoint, v: &TorusPoint) -> Complex64 {
    let delta: Vec<f64> = u
        .cartesian
        .iter()
        .zip(&v.cartesian)
        .map(|(a, b)| a - b)
        .collect();
    let mut k = Complex64::new(0.0, 0.0);
    for w in &supp.vectors {
        let phase = 2.0 * PI * linalg::dot(&delta, &w.cartesian);
        k += Complex64::new(phase.cos(), phase.sin());
    }
    k
}

fn features(supp: &SpectralSupport, x: &TorusPoint, out: &mut Vec<Complex64>) {
    out.clear();
    for w in &supp.vectors {
        let phase = 2.0 * PI * linalg::dot(&x.cartesian, &w.cartesian);
        out.push(Complex64::new(phase.cos(), phase.sin()));
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        s += x * y.conj();
    }
    s
}

fn norm_sq_c(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// One exact draw of the process: `t_n` points, deterministic in `seed`.
pub fn sample(supp: &SpectralSupport, seed: u64) -> Result<TorusConfiguration> {
    sample_stream(supp, seed, 0)
}

/// Exact draw on RNG stream `stream` of `seed`. Monte Carlo replica r uses
/// stream r, so a run's results do not depend on evaluation order.
pub fn sample_stream(supp: &SpectralSupport, seed: u64, stream: u64) -> Result<TorusConfiguration> {
    let lat = &supp.lattice;
    let d = lat.dim();
    let t = supp.t_n();
    let tf = t as f64;
    let mut rng = stream_rng(seed, stream);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(t.saturating_sub(1));
    let mut points: Vec<TorusPoint> = Vec::with_capacity(t);
    let mut phi: Vec<Complex64> = Vec::with_capacity(t);
    let mut coeffs = vec![0.0f64; d];
    for k in 0..t {
        let mut accepted = false;
        for _ in 0..REJECTION_BUDGET {
            for c in coeffs.iter_mut() {
                *c = rng.gen::<f64>();
            }
            let x = lat.point_from_coeffs(&coeffs);
            features(supp, &x, &mut phi);
            for e in &basis {
                let c = inner(&phi, e);
                for (p, q) in phi.iter_mut().zip(e) {
                    *p -= c * q;
                }
            }
            let r = norm_sq_c(&phi);
            // Conditional density of the next point is r/(t-k) against the
            // uniform proposal; the envelope constant t/(t-k) makes the
            // acceptance probability exactly r/t. ‖φ‖² = t, so r ≤ t.
            if rng.gen::<f64>() * tf < r {
                if k + 1 < t {
                    let mut rr = r;
                    if rr.sqrt() < 1e-8 {
                        // A tiny residual means Gram-Schmidt cancellation ate
                        // the accuracy; one re-orthogonalization pass restores
                        // it, and a residual still at zero is unusable.
                        for e in &basis {
                            let c = inner(&phi, e);
                            for (p, q) in phi.iter_mut().zip(e) {
                                *p -= c * q;
                            }
                        }
                        rr = norm_sq_c(&phi);
                        if rr <= 0.0 {
                            continue;
                        }
                    }
                    let inv = 1.0 / rr.sqrt();
                    basis.push(phi.iter().map(|z| z * inv).collect());
                }
                points.push(x);
                accepted = true;
                break;
            }
        }
        if !accepted {
            return Err(Error::RejectionBudgetExceeded);
        }
    }
    Ok(TorusConfiguration { points, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::NamedLattice;
    use crate::quad::{self, QuadSettings};
    use approx::assert_abs_diff_eq;

    fn zd(d: usize) -> Lattice {
        Lattice::named(&NamedLattice::Zd(d), false).unwrap()
    }

    fn hex() -> Lattice {
        Lattice::named(&NamedLattice::Hexagonal, true).unwrap()
    }

    /// sin((2n+1)πδ)/sin(πδ), the kernel of the centered box on Z.
    fn dirichlet(n: usize, delta: f64) -> f64 {
        let m = (2 * n + 1) as f64;
        let s = (PI * delta).sin();
        if s.abs() < 1e-12 {
            m
        } else {
            (m * PI * delta).sin() / s
        }
    }

    #[test]
    fn box_and_shell_cardinalities() {
        assert_eq!(support_box(&zd(1), 1).unwrap().t_n(), 3);
        assert_eq!(support_box(&zd(2), 2).unwrap().t_n(), 25);
        assert_eq!(support_box(&zd(3), 0).unwrap().t_n(), 1);

        let shell = support_shell(&zd(2), 4).unwrap();
        assert_eq!(shell.t_n(), 4);
        let mut got: Vec<Vec<i64>> = shell.vectors().iter().map(|v| v.coeffs.clone()).collect();
        got.sort();
        assert_eq!(
            got,
            vec![
                vec![-2, 0],
                vec![0, -2],
                vec![0, 2],
                vec![2, 0]
            ]
        );
        assert_eq!(support_shell(&zd(2), 1).unwrap().t_n(), 4);
        assert_eq!(support_shell(&zd(2), 3).unwrap_err(), Error::EmptyShell);
    }

    #[test]
    fn support_constructor_rejects_bad_input() {
        let lat = zd(2);
        assert_eq!(
            SpectralSupport::new(lat.clone(), &[]).unwrap_err(),
            Error::EmptySupport
        );
        let dup = [vec![1, 0], vec![1, 0]];
        assert!(matches!(
            SpectralSupport::new(lat.clone(), &dup).unwrap_err(),
            Error::Domain(_)
        ));
        assert!(matches!(
            support_box(&hex(), 1).unwrap_err(),
            Error::Domain(_)
        ));
    }

    #[test]
    fn scaled_domain_boundary_is_excluded_exactly() {
        // N·D = (-5, 5) on Z: the boundary frequencies ±5 stay out.
        let supp = support_scaled_domain(
            &zd(1),
            &DomainSpec::box_domain(vec![0.5]).unwrap(),
            10,
        )
        .unwrap();
        assert_eq!(supp.t_n(), 9);
        let coeffs: Vec<i64> = supp.vectors().iter().map(|v| v.coeffs[0]).collect();
        assert!(coeffs.iter().all(|&c| c.abs() <= 4));

        // A tiny domain keeps only the zero frequency.
        let tiny = support_scaled_domain(&zd(2), &DomainSpec::ball(0.1).unwrap(), 1).unwrap();
        assert_eq!(tiny.t_n(), 1);
        assert_eq!(tiny.vectors()[0].coeffs, vec![0, 0]);
    }

    #[test]
    fn scaled_domain_density_approaches_volume() {
        // #(Λ* ∩ N^{1/d}D) / N → |D|·|Λ| as N grows.
        let unit_ball = DomainSpec::ball((1.0 / PI).sqrt()).unwrap();
        let t100 = support_scaled_domain(&zd(2), &unit_ball, 100).unwrap().t_n();
        assert!((t100 as f64 / 100.0 - 1.0).abs() <= 0.15);
        let t10k = support_scaled_domain(&zd(2), &unit_ball, 10_000)
            .unwrap()
            .t_n();
        assert!((t10k as f64 / 10_000.0 - 1.0).abs() <= 0.02);

        // Area-two ball: the density target is |D||Λ| = 2.
        let big_ball = DomainSpec::ball((2.0 / PI).sqrt()).unwrap();
        let t2 = support_scaled_domain(&zd(2), &big_ball, 10_000).unwrap().t_n();
        assert!((t2 as f64 / 10_000.0 - 2.0).abs() <= 0.04);

        // Non-square lattice: the hexagonal dual still has density |Λ| = 1.
        let th = support_scaled_domain(&hex(), &unit_ball, 2_000).unwrap().t_n();
        assert!((th as f64 / 2_000.0 - 1.0).abs() <= 0.05);

        // Ellipsoid membership: density |D||Λ| = π·0.3·0.6.
        let ell = DomainSpec::ellipsoid(vec![0.3, 0.6]).unwrap();
        let te = support_scaled_domain(&zd(2), &ell, 2_500).unwrap().t_n();
        assert!((te as f64 / 2_500.0 - PI * 0.18).abs() <= 0.05 * PI * 0.18);
    }

    #[test]
    fn box_kernel_is_dirichlet_on_the_line() {
        let lat = zd(1);
        let supp = support_box(&lat, 3).unwrap();
        let mut rng = stream_rng(11, 0);
        for _ in 0..10 {
            let u = lat.point_from_coeffs(&[rng.gen::<f64>()]);
            let v = lat.point_from_coeffs(&[rng.gen::<f64>()]);
            let k = kernel_eval(&supp, &u, &v);
            let want = dirichlet(3, u.cartesian[0] - v.cartesian[0]);
            assert_abs_diff_eq!(k.re, want, epsilon = 1e-10);
            assert_abs_diff_eq!(k.im, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn box_kernel_is_a_product_of_dirichlet_kernels_in_the_plane() {
        let lat = zd(2);
        let supp = support_box(&lat, 2).unwrap();
        let mut rng = stream_rng(12, 0);
        for _ in 0..10 {
            let u = lat.point_from_coeffs(&[rng.gen::<f64>(), rng.gen::<f64>()]);
            let v = lat.point_from_coeffs(&[rng.gen::<f64>(), rng.gen::<f64>()]);
            let k = kernel_eval(&supp, &u, &v);
            let want = dirichlet(2, u.cartesian[0] - v.cartesian[0])
                * dirichlet(2, u.cartesian[1] - v.cartesian[1]);
            assert_abs_diff_eq!(k.re, want, epsilon = 1e-10);
            assert_abs_diff_eq!(k.im, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn kernel_is_hermitian_translation_invariant_with_trace_diagonal() {
        let lat = hex();
        let supp = support_scaled_domain(&lat, &DomainSpec::ball(1.0).unwrap(), 7).unwrap();
        let mut rng = stream_rng(13, 0);
        for _ in 0..5 {
            let u = lat.point_from_coeffs(&[rng.gen::<f64>(), rng.gen::<f64>()]);
            let v = lat.point_from_coeffs(&[rng.gen::<f64>(), rng.gen::<f64>()]);
            let h = lat.point_from_coeffs(&[rng.gen::<f64>(), rng.gen::<f64>()]);

            let diag = kernel_eval(&supp, &u, &u);
            assert_abs_diff_eq!(diag.re, supp.t_n() as f64, epsilon = 1e-12);
            assert_abs_diff_eq!(diag.im, 0.0, epsilon = 1e-12);

            let kuv = kernel_eval(&supp, &u, &v);
            let kvu = kernel_eval(&supp, &v, &u);
            assert_abs_diff_eq!(kuv.re, kvu.re, epsilon = 1e-12);
            assert_abs_diff_eq!(kuv.im, -kvu.im, epsilon = 1e-12);

            let us = lat.reduce(
                &u.cartesian
                    .iter()
                    .zip(&h.cartesian)
                    .map(|(a, b)| a + b)
                    .collect::<Vec<f64>>(),
            );
            let vs = lat.reduce(
                &v.cartesian
                    .iter()
                    .zip(&h.cartesian)
                    .map(|(a, b)| a + b)
                    .collect::<Vec<f64>>(),
            );
            let shifted = kernel_eval(&supp, &us, &vs);
            assert_abs_diff_eq!(shifted.re, kuv.re, epsilon = 1e-10);
            assert_abs_diff_eq!(shifted.im, kuv.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn sampling_is_deterministic_with_exact_cardinality() {
        let supp = support_box(&zd(2), 1).unwrap();
        let a = sample(&supp, 7).unwrap();
        let b = sample(&supp, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points.len(), 9);
        for p in &a.points {
            for &c in &p.coeffs {
                assert!((0.0..1.0).contains(&c));
            }
        }
        let c = sample(&supp, 8).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn single_frequency_samples_are_uniform() {
        // t_N = 1 is the uniform point: check the half-cell frequency.
        let supp = SpectralSupport::new(zd(1), &[vec![0]]).unwrap();
        let replicas = 10_000usize;
        let mut hits = 0usize;
        for r in 0..replicas {
            let cfg = sample_stream(&supp, 40, r as u64).unwrap();
            if cfg.points[0].coeffs[0] < 0.5 {
                hits += 1;
            }
        }
        let freq = hits as f64 / replicas as f64;
        let se = 0.5 / (replicas as f64).sqrt();
        assert!((freq - 0.5).abs() <= 3.0 * se, "freq = {freq}");
    }

    #[test]
    fn pair_gap_histogram_matches_the_two_point_intensity() {
        // For a projection kernel the two-point intensity is
        // ρ₂(u,v) = t² - |K(u,v)|², here a function of the gap g = u-v alone.
        // The expected number of ordered pairs per replica with gap in a bin
        // is the integral of ρ₂ over the bin.
        let lat = zd(1);
        let supp = support_box(&lat, 1).unwrap();
        let t = supp.t_n();
        let nbins = 20usize;
        let replicas = 10_000usize;

        let quad_settings = QuadSettings::default();
        let mut expected = vec![0.0f64; nbins];
        for (b, e) in expected.iter_mut().enumerate() {
            let lo = b as f64 / nbins as f64;
            let hi = (b + 1) as f64 / nbins as f64;
            *e = quad::integrate(
                |g| {
                    let dk = dirichlet(1, g);
                    (t * t) as f64 - dk * dk
                },
                lo,
                hi,
                &quad_settings,
            )
            .unwrap()
            .value;
        }

        let mut sums = vec![0.0f64; nbins];
        let mut sq_sums = vec![0.0f64; nbins];
        let mut counts = vec![0u32; nbins];
        for r in 0..replicas {
            let cfg = sample_stream(&supp, 41, r as u64).unwrap();
            for c in counts.iter_mut() {
                *c = 0;
            }
            for i in 0..t {
                for j in 0..t {
                    if i == j {
                        continue;
                    }
                    let diff = cfg.points[i].cartesian[0] - cfg.points[j].cartesian[0];
                    let gap = lat.reduce(&[diff]).coeffs[0];
                    let b = ((gap * nbins as f64) as usize).min(nbins - 1);
                    counts[b] += 1;
                }
            }
            for b in 0..nbins {
                sums[b] += counts[b] as f64;
                sq_sums[b] += (counts[b] as f64) * (counts[b] as f64);
            }
        }
        let m = replicas as f64;
        for b in 0..nbins {
            let mean = sums[b] / m;
            let var = (sq_sums[b] - m * mean * mean) / (m - 1.0);
            let se = (var / m).sqrt();
            assert!(
                (mean - expected[b]).abs() <= 3.0 * se,
                "bin {b}: mean {mean}, expected {}, se {se}",
                expected[b]
            );
        }
    }

    /// Cholesky of a Hermitian matrix; succeeds iff it is positive definite.
    fn hermitian_cholesky_ok(g: &[Vec<Complex64>]) -> bool {
        let n = g.len();
        let mut l = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = g[i][j];
                for k in 0..j {
                    s -= l[i][k] * l[j][k].conj();
                }
                if i == j {
                    if s.re <= 0.0 {
                        return false;
                    }
                    l[i][i] = Complex64::new(s.re.sqrt(), 0.0);
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        }
        true
    }

    #[test]
    fn sampled_gram_matrices_are_positive_semidefinite() {
        for (supp, seed) in [
            (support_box(&zd(1), 1).unwrap(), 50u64),
            (support_shell(&zd(2), 1).unwrap(), 51u64),
        ] {
            let t = supp.t_n();
            for r in 0..20u64 {
                let cfg = sample_stream(&supp, seed, r).unwrap();
                let mut g = vec![vec![Complex64::new(0.0, 0.0); t]; t];
                for i in 0..t {
                    for j in 0..t {
                        g[i][j] = kernel_eval(&supp, &cfg.points[i], &cfg.points[j]);
                    }
                    // Shift by the PSD tolerance: pass iff λ_min ≥ -1e-8·t_N.
                    g[i][i] += Complex64::new(1e-8 * t as f64, 0.0);
                }
                assert!(hermitian_cholesky_ok(&g), "replica {r}");
            }
        }
    }

    fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (n, m) = (a.len() as f64, b.len() as f64);
        let mut i = 0usize;
        let mut j = 0usize;
        let mut d = 0.0f64;
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            let diff = (i as f64 / n - j as f64 / m).abs();
            if diff > d {
                d = diff;
            }
        }
        d
    }

    #[test]
    fn draw_order_is_exchangeable() {
        // First coordinates of the first and last drawn points are equal in
        // distribution; two-sample Kolmogorov-Smirnov at level 0.01.
        let supp = support_box(&zd(1), 1).unwrap();
        let replicas = 5_000usize;
        let mut first = Vec::with_capacity(replicas);
        let mut last = Vec::with_capacity(replicas);
        for r in 0..replicas {
            let cfg = sample_stream(&supp, 42, r as u64).unwrap();
            first.push(cfg.points[0].coeffs[0]);
            last.push(cfg.points[2].coeffs[0]);
        }
        let d = ks_statistic(first, last);
        let critical = 1.628 * (2.0 / replicas as f64).sqrt();
        assert!(d < critical, "KS statistic {d}, critical {critical}");
    }

    #[test]
    fn subregion_counts_match_the_intensity() {
        // E #(ω ∩ D) = t_N · μ(D) for any sub-box D of the fundamental cell.
        let supp = support_box(&zd(2), 1).unwrap();
        let t = supp.t_n() as f64;
        let mu = 0.5 * 0.3;
        let replicas = 10_000usize;
        let mut sum = 0.0f64;
        let mut sq_sum = 0.0f64;
        for r in 0..replicas {
            let cfg = sample_stream(&supp, 43, r as u64).unwrap();
            let c = cfg
                .points
                .iter()
                .filter(|p| p.coeffs[0] < 0.5 && p.coeffs[1] < 0.3)
                .count() as f64;
            sum += c;
            sq_sum += c * c;
        }
        let m = replicas as f64;
        let mean = sum / m;
        let var = (sq_sum - m * mean * mean) / (m - 1.0);
        let se = (var / m).sqrt();
        assert!(
            (mean - t * mu).abs() <= 3.0 * se,
            "mean {mean}, expected {}",
            t * mu
        );
    }
}
