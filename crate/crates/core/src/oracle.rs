//! Executable analysis of length-squared sampling for rank-1 approximation.
//!
//! After rotating the top right singular vector `v` to `e₁`, row `i` of `A`
//! reads `(σuᵢ, rᵢ)` with `Σuᵢ² = 1`, `rᵢ ∈ ℝ^{d−1}` and `r² = Σ‖rᵢ‖²`, so
//! `‖A − π₁(A)‖²_F = r²`. A row is *good* when `‖rᵢ‖² < εσ²uᵢ²`. The
//! mapping construction turns `l` sampled rows into a rank-1 matrix `X`
//! whose rows lie in their span: good samples are normalized to first
//! coordinate 1, bad ones are zeroed, and the mean `t` defines `X⁽ⁱ⁾ = σuᵢt`.
//!
//! Every quantity below is an exact finite sum over the sampling
//! distribution. When `r² ≤ ε³σ²` and `l ≥ ⌈2/ε⁴⌉` the chain of bounds ends
//! in `E‖A − X‖²_F ≤ (1 + 15ε)r²`; [`check_lemmas`] evaluates each link.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{
    dot, frobenius_sq, norm, norm_sq, residual_error_sq, top_singular_default, DenseMatrix, Rank1,
};
use crate::rng::RngStream;
use crate::sampling::{build_dist, sample_iid, LsqDist};
use crate::spanfit::mean_se;

/// Slack for bound checks: `lhs ≤ rhs + CHECK_TOL · max(1, |rhs|)`.
pub const CHECK_TOL: f64 = 1e-9;

/// Sample count the bounds assume, `⌈2/ε⁴⌉`.
///
/// Values of `2/ε⁴` within a relative `1e-9` of an integer round to it, so
/// `ε = 0.1` gives 20000 rather than 20001.
pub fn default_l(eps: f64) -> usize {
    let x = 2.0 / eps.powi(4);
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * x {
        nearest as usize
    } else {
        x.ceil() as usize
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("epsilon must lie in (0, 1), got {eps}")))
    }
}

/// `A` in the rotated frame where the top right singular vector is `e₁`.
#[derive(Debug, Clone)]
pub struct Frame {
    pub sigma: f64,
    pub u: Vec<f64>,
    /// Row-major `n x (d−1)` residual block.
    residuals: Vec<f64>,
    pub r_norms: Vec<f64>,
    pub r_sq: f64,
    /// Householder reflection `Q` (symmetric, orthogonal) with `Qv = e₁`;
    /// row `i` of `AQ` is `(σuᵢ, rᵢ)`.
    pub rotation: DenseMatrix,
    pub total_sq: f64,
    /// Length-squared distribution of the original rows.
    pub dist: LsqDist,
    n: usize,
    d: usize,
}

impl Frame {
    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.d
    }

    pub fn residual(&self, i: usize) -> &[f64] {
        let w = self.d - 1;
        &self.residuals[i * w..(i + 1) * w]
    }

    /// Row `i` of `AQ`.
    pub fn rotated_row(&self, i: usize) -> Vec<f64> {
        let mut row = Vec::with_capacity(self.d);
        row.push(self.sigma * self.u[i]);
        row.extend_from_slice(self.residual(i));
        row
    }

    /// `(AQ)Qᵀ`, which should reproduce `A`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let rotated: Vec<Vec<f64>> = (0..self.n).map(|i| self.rotated_row(i)).collect();
        DenseMatrix::from_rows(&rotated)
            .and_then(|m| m.matmul(&self.rotation))
            .expect("frame entries are finite")
    }

    /// `Σ uᵢ rᵢ`.
    pub fn sum_ur(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.d - 1];
        for i in 0..self.n {
            crate::matrix::axpy(self.u[i], self.residual(i), &mut acc);
        }
        acc
    }

    /// Maps a rotated-frame vector back to original coordinates (`Q x`).
    pub fn unrotate(&self, x: &[f64]) -> Vec<f64> {
        self.rotation.mul_vec(x)
    }
}

/// Builds the rotated frame of `a`.
pub fn decompose(a: &DenseMatrix) -> Result<Frame> {
    let total_sq = frobenius_sq(a);
    if total_sq == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let top = top_singular_default(a)?;
    let (n, d) = (a.nrows(), a.ncols());

    let mut w = top.v.clone();
    w[0] = if top.v[0] > 0.0 {
        -norm_sq(&top.v[1..]) / (1.0 + top.v[0])
    } else {
        top.v[0] - 1.0
    };
    let w_sq = norm_sq(&w);
    let mut q = vec![0.0; d * d];
    for j in 0..d {
        q[j * d + j] = 1.0;
    }
    if w_sq > 0.0 {
        for j in 0..d {
            for k in 0..d {
                q[j * d + k] -= 2.0 * w[j] * w[k] / w_sq;
            }
        }
    }
    let rotation = DenseMatrix::new(d, d, q)?;
    let rotated = a.matmul(&rotation)?;

    let mut residuals = Vec::with_capacity(n * (d - 1));
    let mut r_norms = Vec::with_capacity(n);
    for row in rotated.rows() {
        residuals.extend_from_slice(&row[1..]);
        r_norms.push(norm(&row[1..]));
    }
    let r_sq = r_norms.iter().map(|r| r * r).sum();

    Ok(Frame {
        sigma: top.sigma,
        u: top.u,
        residuals,
        r_norms,
        r_sq,
        rotation,
        total_sq,
        dist: build_dist(a)?,
        n,
        d,
    })
}

/// Good/bad split of the rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodSet {
    pub mask: Vec<bool>,
}

impl GoodSet {
    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&i| self.mask[i]).collect()
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&g| g).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn is_good(r_norm: f64, u: f64, sigma: f64, eps: f64) -> bool {
    r_norm * r_norm < eps * (sigma * u) * (sigma * u)
}

/// Row `i` is good iff `‖rᵢ‖² < εσ²uᵢ²` (strict; ties are bad).
pub fn classify_rows(frame: &Frame, eps: f64) -> GoodSet {
    let mask = (0..frame.n)
        .map(|i| is_good(frame.r_norms[i], frame.u[i], frame.sigma, eps))
        .collect();
    GoodSet { mask }
}

/// Probability that one length-squared draw lands on a bad row.
pub fn bad_mass(frame: &Frame, eps: f64, dist: &LsqDist) -> f64 {
    let good = classify_rows(frame, eps);
    dist.p()
        .iter()
        .enumerate()
        .filter(|(i, _)| !good.contains(*i))
        .map(|(_, p)| p)
        .sum()
}

/// Intermediate state of the mapping construction, in rotated coordinates.
#[derive(Debug, Clone)]
pub struct MappingState {
    pub eps: f64,
    pub l: usize,
    pub good: GoodSet,
    pub p_good: f64,
    /// One vector per sample: zero for a bad row, the row divided by `σuᵢ`
    /// for a good one.
    pub t_vectors: Vec<Vec<f64>>,
    pub t: Vec<f64>,
    /// `E[z⁽ʲ⁾] = Σ_{k∈G} p_k r_k / (u_k σ)`.
    pub z_mean: Vec<f64>,
    /// `E‖z⁽ʲ⁾‖² = Σ_{k∈G} p_k ‖r_k‖² / (u_k² σ²)`.
    pub z_sq_mean: f64,
}

struct GoodMoments {
    good: GoodSet,
    p_good: f64,
    z_mean: Vec<f64>,
    z_sq_mean: f64,
}

fn good_moments(frame: &Frame, eps: f64, dist: &LsqDist) -> GoodMoments {
    let good = classify_rows(frame, eps);
    let mut p_good = 0.0;
    let mut z_mean = vec![0.0; frame.d - 1];
    let mut z_sq_mean = 0.0;
    for k in good.indices() {
        let p = dist.p()[k];
        let scale = frame.u[k] * frame.sigma;
        p_good += p;
        crate::matrix::axpy(p / scale, frame.residual(k), &mut z_mean);
        z_sq_mean += p * frame.r_norms[k] * frame.r_norms[k] / (scale * scale);
    }
    GoodMoments {
        good,
        p_good,
        z_mean,
        z_sq_mean,
    }
}

/// Builds the rank-1 matrix `X` from the sampled row indices. The result is
/// returned in original coordinates; `X`'s rows lie in the span of the
/// sampled rows.
pub fn mapping_construct(frame: &Frame, eps: f64, sampled: &[usize]) -> Result<(Rank1, MappingState)> {
    check_eps(eps)?;
    if sampled.is_empty() {
        return Err(Error::Parameter("the mapping needs at least one sample".into()));
    }
    let moments = good_moments(frame, eps, &frame.dist);
    let l = sampled.len();
    let mut t = vec![0.0; frame.d];
    let mut t_vectors = Vec::with_capacity(l);
    for &i in sampled {
        if i >= frame.n {
            return Err(Error::Parameter(format!("sample index {i} out of range")));
        }
        if moments.good.contains(i) {
            let scale = frame.sigma * frame.u[i];
            // ‖rᵢ‖² < εσ²uᵢ² rules out uᵢ = 0 for a good row.
            assert!(scale != 0.0, "good row {i} has u_i = 0");
            let tj: Vec<f64> = frame.rotated_row(i).iter().map(|x| x / scale).collect();
            crate::matrix::axpy(1.0 / l as f64, &tj, &mut t);
            t_vectors.push(tj);
        } else {
            t_vectors.push(vec![0.0; frame.d]);
        }
    }

    let t_norm = norm(&t);
    let x = if t_norm == 0.0 {
        Rank1::zero(frame.n, frame.d)
    } else {
        let mut right = frame.unrotate(&t);
        let rn = norm(&right);
        right.iter_mut().for_each(|v| *v /= rn);
        let left = frame.u.iter().map(|ui| frame.sigma * ui * t_norm).collect();
        Rank1::new(left, right)?
    };

    Ok((
        x,
        MappingState {
            eps,
            l,
            good: moments.good,
            p_good: moments.p_good,
            t_vectors,
            t,
            z_mean: moments.z_mean,
            z_sq_mean: moments.z_sq_mean,
        },
    ))
}

/// Split of `E‖A − X‖²_F` into first-coordinate and remaining terms.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingExpectation {
    /// `σ²[p_G(1 − p_G)/l + (1 − p_G)²]`.
    pub first_coord: f64,
    /// `r² − 2σ⟨Σuᵢrᵢ, E z⟩ + σ²[E‖z¹‖²/l + (1 − 1/l)‖E z¹‖²]`.
    pub remainder: f64,
    pub total: f64,
}

/// Exact `E‖A − X‖²_F` over `l` i.i.d. draws from `dist`, term by term.
pub fn expected_mapping_terms(frame: &Frame, eps: f64, l: usize, dist: &LsqDist) -> MappingExpectation {
    let m = good_moments(frame, eps, dist);
    let s2 = frame.sigma * frame.sigma;
    let lf = l as f64;
    let miss = 1.0 - m.p_good;
    let first_coord = s2 * (m.p_good * miss / lf + miss * miss);
    let ur = frame.sum_ur();
    let ez_sq = m.z_sq_mean / lf + (1.0 - 1.0 / lf) * norm_sq(&m.z_mean);
    let remainder = frame.r_sq - 2.0 * frame.sigma * dot(&ur, &m.z_mean) + s2 * ez_sq;
    MappingExpectation {
        first_coord,
        remainder,
        total: first_coord + remainder,
    }
}

/// Exact `E‖A − X‖²_F` for the mapping construction with `l` samples.
pub fn exact_expected_mapping_error(frame: &Frame, eps: f64, l: usize, dist: &LsqDist) -> f64 {
    expected_mapping_terms(frame, eps, l, dist).total
}

/// Monte Carlo estimate `(mean, standard error)` of `‖A − X‖²_F` over
/// `draws` independent runs of the mapping construction.
pub fn monte_carlo_mapping_error(
    a: &DenseMatrix,
    frame: &Frame,
    eps: f64,
    l: usize,
    draws: usize,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    let mut values = Vec::with_capacity(draws);
    for _ in 0..draws {
        let sample = sample_iid(&frame.dist, l, rng);
        let (x, _) = mapping_construct(frame, eps, &sample)?;
        values.push(residual_error_sq(a, &x)?);
    }
    Ok(mean_se(&values))
}

/// One bound `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// Whether the bound applies in this regime (and is therefore enforced).
    pub asserted: bool,
    pub pass: bool,
}

impl LemmaCheck {
    fn new(name: &'static str, lhs: f64, rhs: f64, asserted: bool) -> Self {
        let pass = lhs <= rhs + CHECK_TOL * rhs.abs().max(1.0);
        Self {
            name,
            lhs,
            rhs,
            asserted,
            pass,
        }
    }

    fn pass_label(&self) -> &'static str {
        match (self.asserted, self.pass) {
            (false, _) => "skipped",
            (true, true) => "true",
            (true, false) => "false",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub eps: f64,
    pub l: usize,
    /// `r² ≤ ε³σ²`.
    pub assumption_holds: bool,
    pub sigma_sq: f64,
    pub r_sq: f64,
    pub checks: Vec<LemmaCheck>,
    /// `δ_k = p_k/u_k − u_k` for good rows, `−u_k` otherwise.
    pub delta: Vec<f64>,
}

/// Header of the machine-readable lemma CSV.
pub const LEMMA_CSV_HEADER: &str = "name,lhs,rhs,pass";

impl LemmaReport {
    pub fn regime(&self) -> &'static str {
        if self.assumption_holds {
            "small-residual regime (r^2 <= eps^3 sigma^2)"
        } else {
            "Lemma 1 regime (r^2 > eps^3 sigma^2): additive bound applies"
        }
    }

    /// `true` when every enforced check passes.
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| !c.asserted || c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(LEMMA_CSV_HEADER);
        out.push('\n');
        for c in &self.checks {
            out.push_str(&format!("{},{},{},{}\n", c.name, c.lhs, c.rhs, c.pass_label()));
        }
        out
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "eps = {}  l = {}  sigma^2 = {}  r^2 = {}", self.eps, self.l, self.sigma_sq, self.r_sq)?;
        writeln!(f, "regime: {}", self.regime())?;
        writeln!(f, "{:<12} {:>24} {:>24}  pass", "check", "lhs", "rhs")?;
        for c in &self.checks {
            writeln!(f, "{:<12} {:>24.12e} {:>24.12e}  {}", c.name, c.lhs, c.rhs, c.pass_label())?;
        }
        Ok(())
    }
}

/// Evaluates every bound of the analysis in closed form.
///
/// Bad-row mass and `‖Σuᵢrᵢ‖ ≤ r` hold unconditionally and are always
/// enforced. The remaining bounds need `r² ≤ ε³σ²`; the first-coordinate,
/// per-sample variance and total bounds additionally need `l ≥ ⌈2/ε⁴⌉`.
/// Bounds outside their regime are still computed and reported but skipped.
pub fn check_lemmas(frame: &Frame, eps: f64, l: usize, dist: &LsqDist) -> Result<LemmaReport> {
    check_eps(eps)?;
    if l == 0 {
        return Err(Error::Parameter("l must be at least 1".into()));
    }
    if dist.len() != frame.n {
        return Err(Error::DimensionMismatch {
            expected: frame.n,
            found: dist.len(),
        });
    }
    let s2 = frame.sigma * frame.sigma;
    let r_sq = frame.r_sq;
    let r = r_sq.sqrt();
    let assumption = r_sq <= eps.powi(3) * s2;
    let enough = l >= default_l(eps);

    let m = good_moments(frame, eps, dist);
    let expectation = expected_mapping_terms(frame, eps, l, dist);
    let ur = frame.sum_ur();
    let ur_norm_sq = norm_sq(&ur);

    let bad = 1.0 - m.p_good;
    let bad_direct: f64 = dist
        .p()
        .iter()
        .enumerate()
        .filter(|(i, _)| !m.good.contains(*i))
        .map(|(_, p)| p)
        .sum();
    debug_assert!((bad - bad_direct).abs() <= 1e-12);

    let mut worst: Option<(f64, f64)> = None;
    for k in m.good.indices() {
        let uk = frame.u[k];
        let gap = (uk - dist.p()[k] / uk).abs();
        let bound = eps * uk.abs();
        if worst.is_none_or(|(g, b)| gap - bound > g - b) {
            worst = Some((gap, bound));
        }
    }
    let worst = worst.unwrap_or((0.0, 0.0));

    let mut mid = m.z_mean.iter().map(|z| frame.sigma * z).collect::<Vec<_>>();
    crate::matrix::axpy(-1.0, &ur, &mut mid);

    let delta = (0..frame.n)
        .map(|k| {
            let uk = frame.u[k];
            if m.good.contains(k) {
                dist.p()[k] / uk - uk
            } else {
                -uk
            }
        })
        .collect();

    let checks = vec![
        LemmaCheck::new("bad_mass", bad_direct, 2.0 * r_sq / (eps * s2), true),
        LemmaCheck::new("good_p", worst.0, worst.1, assumption),
        LemmaCheck::new("fact_sum_ur", ur_norm_sq.sqrt(), r, true),
        LemmaCheck::new(
            "first_coord",
            expectation.first_coord,
            5.0 * eps * r_sq,
            assumption && enough,
        ),
        LemmaCheck::new("mid1", norm(&mid), 2.0 * eps * r, assumption),
        LemmaCheck::new(
            "term2",
            2.0 * ur_norm_sq - 4.0 * eps * r_sq,
            2.0 * frame.sigma * dot(&ur, &m.z_mean),
            assumption,
        ),
        LemmaCheck::new("term31", s2 / l as f64 * m.z_sq_mean, eps * r_sq, assumption && enough),
        LemmaCheck::new(
            "term32",
            s2 * norm_sq(&m.z_mean),
            2.0 * ur_norm_sq + 4.0 * eps * eps * r_sq,
            assumption,
        ),
        LemmaCheck::new(
            "total",
            expectation.total,
            (1.0 + 15.0 * eps) * r_sq,
            assumption && enough,
        ),
    ];

    Ok(LemmaReport {
        eps,
        l,
        assumption_holds: assumption,
        sigma_sq: s2,
        r_sq,
        checks,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen_adversarial_uniform;

    fn adv() -> DenseMatrix {
        gen_adversarial_uniform(1001, 100.0, 1.0).unwrap()
    }

    #[test]
    fn default_l_values() {
        assert_eq!(default_l(0.5), 32);
        assert_eq!(default_l(0.3), 247);
        assert_eq!(default_l(0.1), 20_000);
    }

    #[test]
    fn adv_frame() {
        let f = decompose(&adv()).unwrap();
        assert!((f.sigma - 100.0).abs() < 1e-9);
        assert!((f.u[1000] - 1.0).abs() < 1e-12);
        assert!(f.u[..1000].iter().all(|u| u.abs() < 1e-6));
        assert!(f.r_norms[..1000].iter().all(|r| (r - 1.0).abs() < 1e-9));
        assert!((f.r_sq - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn adv_classification_and_bad_mass() {
        let f = decompose(&adv()).unwrap();
        let good = classify_rows(&f, 0.5);
        assert_eq!(good.indices(), vec![1000]);
        let bm = bad_mass(&f, 0.5, &f.dist);
        assert!((bm - 1.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn strict_boundary_is_bad() {
        // ε σ² u² = 0.25 · 16 · 0.25 = 1 = r².
        assert!(!is_good(1.0, 0.5, 4.0, 0.25));
        assert!(is_good(1.0, 0.5, 4.0, 0.2500001));
        assert!(!is_good(1.0, 0.0, 4.0, 0.9));
        assert!(is_good(0.0, 0.1, 4.0, 0.1));
    }

    #[test]
    fn zero_residual_row_is_good() {
        let a = DenseMatrix::from_rows(&[[3.0, 0.0], [0.0, 0.0]]).unwrap();
        let f = decompose(&a).unwrap();
        let g = classify_rows(&f, 0.1);
        assert!(g.contains(0));
        assert!(!g.contains(1));
    }

    #[test]
    fn adv_expected_error_closed_form() {
        let a = adv();
        let f = decompose(&a).unwrap();
        let e = exact_expected_mapping_error(&f, 0.5, 32, &f.dist);
        let expected = 1e4 * 42.0 / 3872.0 + 1000.0;
        assert!((e - expected).abs() < 1e-8, "{e} vs {expected}");
    }

    #[test]
    fn all_bad_expected_error_is_frobenius() {
        // With v = e₁ and a tiny ε every row is bad.
        let a = DenseMatrix::from_rows(&[[3.0, 1.0], [1.0, 2.0]]).unwrap();
        let f = decompose(&a).unwrap();
        let eps = 1e-6;
        assert!(classify_rows(&f, eps).is_empty());
        let e = exact_expected_mapping_error(&f, eps, 5, &f.dist);
        assert!((e - f.total_sq).abs() < 1e-9 * f.total_sq);
    }

    #[test]
    fn all_bad_sample_maps_to_zero() {
        let a = adv();
        let f = decompose(&a).unwrap();
        let (x, state) = mapping_construct(&f, 0.5, &[0, 1, 2]).unwrap();
        assert!(x.is_zero());
        assert!(state.t_vectors.iter().all(|t| t.iter().all(|&v| v == 0.0)));
        assert_eq!(residual_error_sq(&a, &x).unwrap(), f.total_sq);
    }

    #[test]
    fn heavy_sample_maps_to_optimum() {
        let a = adv();
        let f = decompose(&a).unwrap();
        let (x, state) = mapping_construct(&f, 0.5, &[1000; 32]).unwrap();
        assert!(state.t_vectors.iter().all(|t| t[0] == 1.0));
        assert!((residual_error_sq(&a, &x).unwrap() - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn adv_lemmas_pass() {
        let f = decompose(&adv()).unwrap();
        let report = check_lemmas(&f, 0.5, 32, &f.dist).unwrap();
        assert!(report.assumption_holds);
        assert!(report.all_pass(), "{report}");
        let total = report.check("total").unwrap();
        assert!((total.lhs - 1108.471).abs() < 1e-3);
        assert!((total.rhs - 8500.0).abs() < 1e-9);
        let good_p = report.check("good_p").unwrap();
        assert!((good_p.lhs - 1.0 / 11.0).abs() < 1e-9 && (good_p.rhs - 0.5).abs() < 1e-9);
        assert!(report.checks.iter().all(|c| c.asserted));
    }

    #[test]
    fn adv_eps_03_is_lemma1_regime() {
        let f = decompose(&adv()).unwrap();
        let report = check_lemmas(&f, 0.3, default_l(0.3), &f.dist).unwrap();
        assert!(!report.assumption_holds);
        assert!(report.all_pass());
        let enforced: Vec<_> = report.checks.iter().filter(|c| c.asserted).map(|c| c.name).collect();
        assert_eq!(enforced, vec!["bad_mass", "fact_sum_ur"]);
    }

    #[test]
    fn rank_one_everything_zero() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0, 2.0], [2.0, 4.0, 4.0], [-1.0, -2.0, -2.0]]).unwrap();
        let f = decompose(&a).unwrap();
        assert!(f.r_sq <= 1e-20 * f.total_sq);
        let report = check_lemmas(&f, 0.5, 32, &f.dist).unwrap();
        assert!(report.all_pass(), "{report}");
        assert!(bad_mass(&f, 0.5, &f.dist).abs() < 1e-15);
        let (x, _) = mapping_construct(&f, 0.5, &[0, 1]).unwrap();
        assert!(residual_error_sq(&a, &x).unwrap() <= 1e-20 * f.total_sq);
    }

    #[test]
    fn invalid_inputs() {
        let f = decompose(&adv()).unwrap();
        assert!(check_lemmas(&f, 1.0, 32, &f.dist).is_err());
        assert!(check_lemmas(&f, 0.5, 0, &f.dist).is_err());
        assert!(mapping_construct(&f, 0.5, &[]).is_err());
        assert!(mapping_construct(&f, 0.5, &[5000]).is_err());
        assert!(matches!(decompose(&DenseMatrix::zeros(2, 2).unwrap()), Err(Error::ZeroMatrix)));
    }

    #[test]
    fn lemma_csv_layout() {
        let f = decompose(&adv()).unwrap();
        let csv = check_lemmas(&f, 0.5, 32, &f.dist).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(LEMMA_CSV_HEADER));
        assert_eq!(lines.count(), 9);
    }
}
