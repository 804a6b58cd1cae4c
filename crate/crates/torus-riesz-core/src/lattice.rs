//! Lattices in R^d: duals, fundamental-domain reduction, ball enumeration,
//! shortest vectors, and the standard named lattices.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Hard cap on enumerated coefficient boxes; fail loudly instead of hanging.
pub const DEFAULT_ENUM_CAP: usize = 10_000_000;

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 24;

/// A full-rank lattice Λ = A·Z^d, with columns of `basis` as generators.
#[derive(Debug, Clone)]
pub struct Lattice {
    d: usize,
    basis: Mat,
    inv_basis: Mat,
    dual_basis: Mat,
    gram: Mat,
    covolume: f64,
}

/// A lattice point, kept as integer coefficients plus its Cartesian image.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeVector {
    pub coeffs: Vec<i64>,
    pub cartesian: Vec<f64>,
    pub norm_sq: f64,
}

impl LatticeVector {
    pub fn norm(&self) -> f64 {
        self.norm_sq.sqrt()
    }
}

/// A point of the torus R^d/Λ: coefficients in [0,1)^d and Cartesian coords.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    pub coeffs: Vec<f64>,
    pub cartesian: Vec<f64>,
}

/// The standard lattices used throughout; Gram matrices are accepted in place
/// of a basis (any Cholesky factor yields the same zeta values).
#[derive(Debug, Clone, PartialEq)]
pub enum NamedLattice {
    Zd(usize),
    Hexagonal,
    D4,
    E8,
    Gram(Vec<Vec<f64>>),
}

impl Lattice {
    /// Builds a lattice from a basis matrix whose columns are the generators.
    pub fn from_basis(basis: Mat) -> Result<Lattice> {
        let d = basis.n();
        if d < 1 || d > MAX_DIM {
            return Err(Error::DimensionOutOfRange { d, max: MAX_DIM });
        }
        for i in 0..d {
            for j in 0..d {
                if !basis[(i, j)].is_finite() {
                    return Err(Error::Domain("basis entries must be finite"));
                }
            }
        }
        let det = basis.det();
        if !(det.abs() > 1e-12) {
            return Err(Error::SingularBasis);
        }
        let inv_basis = basis.inverse()?;
        let dual_basis = basis.transpose().inverse()?;
        let gram = basis.transpose().matmul(&basis);
        Ok(Lattice {
            d,
            covolume: det.abs(),
            basis,
            inv_basis,
            dual_basis,
            gram,
        })
    }

    /// Builds from generator vectors (`generators[i]` = coordinates of v_i).
    pub fn from_generators(generators: &[Vec<f64>]) -> Result<Lattice> {
        // Rows of the input are generators, so the basis matrix is the transpose.
        Lattice::from_basis(Mat::from_rows(generators)?.transpose())
    }

    /// Builds from a Gram matrix via its Cholesky factor.
    pub fn from_gram(gram: &[Vec<f64>]) -> Result<Lattice> {
        let g = Mat::from_rows(gram).map_err(|_| Error::BadGram)?;
        let l = g.cholesky()?;
        // G = L L^t, so the columns of L^t ... rows of L ... give vectors with
        // the right inner products; use A = L^t so that A^t A = G.
        Lattice::from_basis(l.transpose())
    }

    /// One of the standard lattices, optionally rescaled to covolume 1.
    pub fn named(name: &NamedLattice, normalize_covolume: bool) -> Result<Lattice> {
        let lat = match name {
            NamedLattice::Zd(d) => Lattice::from_basis(Mat::identity(*d))?,
            NamedLattice::Hexagonal => {
                let c = (2.0 / 3.0f64.sqrt()).sqrt();
                Lattice::from_generators(&[
                    vec![c, 0.0],
                    vec![c / 2.0, c * 3.0f64.sqrt() / 2.0],
                ])?
            }
            NamedLattice::D4 => Lattice::from_generators(&[
                vec![1.0, -1.0, 0.0, 0.0],
                vec![0.0, 1.0, -1.0, 0.0],
                vec![0.0, 0.0, 1.0, -1.0],
                vec![0.0, 0.0, 1.0, 1.0],
            ])?,
            NamedLattice::E8 => {
                let mut rows = vec![vec![0.0; 8]; 8];
                rows[0][0] = 2.0;
                for i in 1..7 {
                    rows[i][i - 1] = -1.0;
                    rows[i][i] = 1.0;
                }
                rows[7] = vec![0.5; 8];
                Lattice::from_generators(&rows)?
            }
            NamedLattice::Gram(g) => Lattice::from_gram(g)?,
        };
        if normalize_covolume {
            Ok(lat.normalized_covolume())
        } else {
            Ok(lat)
        }
    }

    /// The same lattice rescaled so that covolume = 1.
    pub fn normalized_covolume(&self) -> Lattice {
        let scale = self.covolume.powf(-1.0 / self.d as f64);
        self.scaled(scale)
    }

    /// The lattice cΛ.
    pub fn scaled(&self, c: f64) -> Lattice {
        let mut b = self.basis.clone();
        for i in 0..self.d {
            for j in 0..self.d {
                b[(i, j)] *= c;
            }
        }
        Lattice::from_basis(b).expect("rescaling keeps the basis nonsingular")
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    /// The dual lattice Λ* with basis (A^t)^{-1}.
    pub fn dual(&self) -> Lattice {
        Lattice::from_basis(self.dual_basis.clone())
            .expect("dual of a valid lattice is valid")
    }

    /// Cartesian image of an integer coefficient vector.
    pub fn vector(&self, coeffs: &[i64]) -> LatticeVector {
        let x: Vec<f64> = coeffs.iter().map(|&c| c as f64).collect();
        let cartesian = self.basis.matvec(&x);
        LatticeVector {
            coeffs: coeffs.to_vec(),
            norm_sq: linalg::norm_sq(&cartesian),
            cartesian,
        }
    }

    /// Reduces x to its fundamental-domain representative (coefficient
    /// fractional parts). Λ-periodic quantities do not depend on this choice.
    pub fn reduce(&self, x: &[f64]) -> TorusPoint {
        let mut coeffs = self.inv_basis.matvec(x);
        for c in coeffs.iter_mut() {
            *c -= c.floor();
            // Guard against rounding pushing a tiny negative up to exactly 1.
            if *c >= 1.0 {
                *c = 0.0;
            }
        }
        let cartesian = self.basis.matvec(&coeffs);
        TorusPoint { coeffs, cartesian }
    }

    /// Torus point with the given fundamental-domain coefficients.
    pub fn point_from_coeffs(&self, coeffs: &[f64]) -> TorusPoint {
        TorusPoint {
            coeffs: coeffs.to_vec(),
            cartesian: self.basis.matvec(coeffs),
        }
    }

    /// All lattice vectors v with |v − center| ≤ radius, with the default cap.
    pub fn enumerate_ball(&self, center: &[f64], radius: f64) -> Result<Vec<LatticeVector>> {
        self.enumerate_ball_capped(center, radius, DEFAULT_ENUM_CAP)
    }

    /// Ball enumeration with an explicit cap on the scanned coefficient box.
    ///
    /// Completeness: v = A·n and |v − center| ≤ r imply
    /// |n_i − (A^{-1}center)_i| ≤ r·‖row_i(A^{-1})‖, so scanning that integer
    /// box and filtering by distance finds every solution.
    pub fn enumerate_ball_capped(
        &self,
        center: &[f64],
        radius: f64,
        cap: usize,
    ) -> Result<Vec<LatticeVector>> {
        let mut out = Vec::new();
        self.enumerate_ball_each(center, radius, cap, &mut |coeffs, cart, _| {
            out.push(LatticeVector {
                coeffs: coeffs.to_vec(),
                cartesian: cart.to_vec(),
                norm_sq: linalg::norm_sq(cart),
            });
        })?;
        Ok(out)
    }

    /// Streaming form of ball enumeration: calls `f(coeffs, cartesian,
    /// dist_sq)` for each point, in deterministic odometer order, without
    /// materializing the point set. Large shell sums use this to keep memory
    /// proportional to the retained data rather than the scanned ball.
    pub(crate) fn enumerate_ball_each(
        &self,
        center: &[f64],
        radius: f64,
        cap: usize,
        f: &mut dyn FnMut(&[i64], &[f64], f64),
    ) -> Result<()> {
        if radius < 0.0 || !radius.is_finite() {
            return Err(Error::Domain("radius must be finite and nonnegative"));
        }
        let c = self.inv_basis.matvec(center);
        let mut lo = vec![0i64; self.d];
        let mut hi = vec![0i64; self.d];
        let mut box_size: u128 = 1;
        for i in 0..self.d {
            let row_norm = linalg::norm(self.inv_basis.row(i));
            lo[i] = (c[i] - radius * row_norm).ceil() as i64;
            hi[i] = (c[i] + radius * row_norm).floor() as i64;
            let width = if hi[i] >= lo[i] { (hi[i] - lo[i] + 1) as u128 } else { 0 };
            box_size = box_size.saturating_mul(width);
        }
        if box_size > cap as u128 {
            return Err(Error::CapExceeded { cap });
        }
        if box_size == 0 {
            return Ok(());
        }
        let r_sq = radius * radius;
        // Allow for roundoff on points exactly on the sphere.
        let r_tol = r_sq * (1.0 + 1e-12) + 1e-300;
        let mut cart = vec![0.0; self.d];
        let mut n = lo.clone();
        'scan: loop {
            let mut dist_sq = 0.0;
            for i in 0..self.d {
                let mut acc = 0.0;
                for j in 0..self.d {
                    acc += self.basis[(i, j)] * n[j] as f64;
                }
                cart[i] = acc;
                let delta = acc - center[i];
                dist_sq += delta * delta;
            }
            if dist_sq <= r_tol {
                f(&n, &cart, dist_sq);
            }
            // Odometer over the coefficient box; deterministic order.
            for i in (0..self.d).rev() {
                if n[i] < hi[i] {
                    n[i] += 1;
                    continue 'scan;
                }
                n[i] = lo[i];
            }
            break;
        }
        Ok(())
    }

    /// Length m(Λ) of the shortest nonzero lattice vector.
    ///
    /// Depth-first sphere enumeration on the Cholesky factor of the Gram
    /// matrix: with G = L·Lᵀ, |v|² = Σ_i y_i² where
    /// y_i = L_ii n_i + Σ_{j>i} L_ji n_j, so coefficients are scanned from
    /// the last coordinate down with the partial sum pruning each level.
    /// The shortest basis column caps the initial search radius, and the
    /// radius shrinks as better vectors appear, which keeps the tree small
    /// even for skewed bases.
    pub fn shortest_vector(&self) -> Result<f64> {
        fn descend(l: &Mat, i: usize, partial: f64, n: &mut [i64], best: &mut f64) {
            let d = n.len();
            let mut c = 0.0;
            for j in (i + 1)..d {
                c += l[(j, i)] * n[j] as f64;
            }
            let budget = *best - partial;
            if budget < 0.0 {
                return;
            }
            let half = budget.sqrt();
            let uii = l[(i, i)];
            let lo = ((-half - c) / uii).ceil() as i64;
            let hi = ((half - c) / uii).floor() as i64;
            for ni in lo..=hi {
                let y = uii * ni as f64 + c;
                let p2 = partial + y * y;
                if p2 > *best {
                    continue;
                }
                n[i] = ni;
                if i == 0 {
                    if n.iter().any(|&v| v != 0) {
                        *best = p2;
                    }
                } else {
                    descend(l, i - 1, p2, n, best);
                }
            }
            n[i] = 0;
        }
        let min_col_sq = (0..self.d)
            .map(|j| linalg::norm_sq(&self.basis.col(j)))
            .fold(f64::INFINITY, f64::min);
        let l = self.gram.cholesky()?;
        let mut best = min_col_sq * (1.0 + 1e-9);
        let mut n = vec![0i64; self.d];
        descend(&l, self.d - 1, 0.0, &mut n, &mut best);
        Ok(best.sqrt())
    }
}
