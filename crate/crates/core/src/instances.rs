//! Test-matrix generators.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::{norm, DenseMatrix};
use crate::rng::RngStream;

fn check_xy(n: usize, x: f64, y: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::Parameter(format!("need n >= 2, got {n}")));
    }
    if !(x.is_finite() && y.is_finite()) || y <= 0.0 || x <= y {
        return Err(Error::Parameter(format!(
            "need x > y > 0, got x = {x}, y = {y}"
        )));
    }
    Ok(())
}

/// `n − 1` light rows `(0, y)` followed by one heavy row `(x, 0)`.
///
/// Uniform sampling almost always misses the heavy row, which carries the
/// best-fit direction while `x² > (n−1)y²`.
pub fn gen_adversarial_uniform(n: usize, x: f64, y: f64) -> Result<DenseMatrix> {
    check_xy(n, x, y)?;
    let mut data = Vec::with_capacity(2 * n);
    for _ in 0..n - 1 {
        data.extend_from_slice(&[0.0, y]);
    }
    data.extend_from_slice(&[x, 0.0]);
    DenseMatrix::new(n, 2, data)
}

/// `n − 1` rows `(x, 0)` followed by one row `(0, y)`: exactly rank 2, yet a
/// small length-squared sample rarely contains the `(0, y)` row.
pub fn gen_rank2_counter(n: usize, x: f64, y: f64) -> Result<DenseMatrix> {
    check_xy(n, x, y)?;
    let mut data = Vec::with_capacity(2 * n);
    for _ in 0..n - 1 {
        data.extend_from_slice(&[x, 0.0]);
    }
    data.extend_from_slice(&[0.0, y]);
    DenseMatrix::new(n, 2, data)
}

fn random_unit(dim: usize, rng: &mut RngStream) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
        let nv = norm(&v);
        if nv > 0.0 {
            return v.into_iter().map(|x| x / nv).collect();
        }
    }
}

/// `spike · u vᵀ + rho · N` with `u`, `v` uniform random unit vectors and `N`
/// standard normal.
///
/// Draws come from stream 0 of `seed` in a fixed order: `n` normals for `u`,
/// `d` for `v`, then `n·d` for `N` row-major. Normals use rand_distr's
/// ziggurat `StandardNormal`, so the bytes are reproducible only with this
/// crate.
pub fn gen_near_rank1(
    n: usize,
    d: usize,
    sigma_spike: f64,
    noise_rho: f64,
    seed: u64,
) -> Result<DenseMatrix> {
    if n < 2 || d < 2 {
        return Err(Error::Parameter(format!("need n, d >= 2, got {n}x{d}")));
    }
    if !(sigma_spike.is_finite() && noise_rho.is_finite()) || noise_rho < 0.0 {
        return Err(Error::Parameter(
            "spike must be finite and noise level finite and non-negative".into(),
        ));
    }
    let mut rng = RngStream::new(seed, 0);
    let u = random_unit(n, &mut rng);
    let v = random_unit(d, &mut rng);
    let mut data = Vec::with_capacity(n * d);
    for &ui in &u {
        for &vj in &v {
            data.push(sigma_spike * ui * vj + noise_rho * rng.normal());
        }
    }
    DenseMatrix::new(n, d, data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Adv,
    R2,
    NearRank1,
    Custom,
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstanceKind::Adv => "adv",
            InstanceKind::R2 => "r2",
            InstanceKind::NearRank1 => "near-rank1",
            InstanceKind::Custom => "custom",
        })
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adv" => Ok(InstanceKind::Adv),
            "r2" => Ok(InstanceKind::R2),
            "near-rank1" | "near_rank1" => Ok(InstanceKind::NearRank1),
            "custom" => Ok(InstanceKind::Custom),
            other => Err(Error::Parameter(format!("unknown instance kind '{other}'"))),
        }
    }
}

/// Parameters of a generated instance. Identical specs generate bitwise
/// identical matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub n: usize,
    pub d: usize,
    pub x: f64,
    pub y: f64,
    pub sigma_spike: f64,
    pub noise_rho: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn adv(n: usize, x: f64, y: f64) -> Self {
        Self {
            kind: InstanceKind::Adv,
            n,
            d: 2,
            x,
            y,
            sigma_spike: 0.0,
            noise_rho: 0.0,
            seed: 0,
        }
    }

    pub fn r2(n: usize, x: f64, y: f64) -> Self {
        Self {
            kind: InstanceKind::R2,
            ..Self::adv(n, x, y)
        }
    }

    pub fn near_rank1(n: usize, d: usize, sigma_spike: f64, noise_rho: f64, seed: u64) -> Self {
        Self {
            kind: InstanceKind::NearRank1,
            n,
            d,
            x: 0.0,
            y: 0.0,
            sigma_spike,
            noise_rho,
            seed,
        }
    }

    pub fn generate(&self) -> Result<DenseMatrix> {
        match self.kind {
            InstanceKind::Adv => gen_adversarial_uniform(self.n, self.x, self.y),
            InstanceKind::R2 => gen_rank2_counter(self.n, self.x, self.y),
            InstanceKind::NearRank1 => {
                gen_near_rank1(self.n, self.d, self.sigma_spike, self.noise_rho, self.seed)
            }
            InstanceKind::Custom => Err(Error::Parameter(
                "custom instances are loaded from files, not generated".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::frobenius_sq;

    #[test]
    fn adv_layout() {
        let a = gen_adversarial_uniform(2, 10.0, 1.0).unwrap();
        assert_eq!(a.as_slice(), &[0.0, 1.0, 10.0, 0.0]);
        let big = gen_adversarial_uniform(1001, 100.0, 1.0).unwrap();
        assert_eq!(frobenius_sq(&big), 11_000.0);
    }

    #[test]
    fn r2_layout() {
        let a = gen_rank2_counter(3, 10.0, 1.0).unwrap();
        assert_eq!(a.as_slice(), &[10.0, 0.0, 10.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn parameter_guards() {
        assert!(gen_adversarial_uniform(1001, 1.0, 1.0).is_err());
        assert!(gen_adversarial_uniform(1, 10.0, 1.0).is_err());
        assert!(gen_rank2_counter(10, 1.0, 2.0).is_err());
        assert!(gen_rank2_counter(10, 2.0, 0.0).is_err());
        assert!(gen_near_rank1(1, 5, 1.0, 0.1, 0).is_err());
        assert!(gen_near_rank1(5, 5, 1.0, -0.1, 0).is_err());
    }

    #[test]
    fn near_rank1_is_deterministic() {
        let a = gen_near_rank1(20, 6, 10.0, 0.1, 42).unwrap();
        let b = gen_near_rank1(20, 6, 10.0, 0.1, 42).unwrap();
        let c = gen_near_rank1(20, 6, 10.0, 0.1, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let spec = InstanceSpec::near_rank1(20, 6, 10.0, 0.1, 42);
        assert_eq!(spec.generate().unwrap(), a);
    }

    #[test]
    fn kind_parse() {
        assert_eq!("near-rank1".parse::<InstanceKind>().unwrap(), InstanceKind::NearRank1);
        assert!("volume".parse::<InstanceKind>().is_err());
    }
}
