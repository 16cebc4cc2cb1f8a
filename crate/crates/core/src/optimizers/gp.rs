//! Gaussian-process surrogate with UCB and closed-form expected improvement.
//!
//! Anisotropic squared-exponential kernel; hyper-parameters (signal std,
//! per-dimension length-scales, noise std) are fitted by multi-start
//! gradient ascent on the log marginal likelihood with analytic gradients.

use super::{maximize_acquisition, Optimizer};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::Dataset;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use statrs::function::erf::erf;

const JITTER_START: f64 = 1e-8;
const JITTER_MAX: f64 = 1e-4;
const N_STARTS: usize = 8;
const FIT_ITERS: usize = 150;
const FIT_STEP: f64 = 0.05;

/// Fitted GP posterior over the normalised objective.
pub struct GpModel {
    x: Vec<Vec<f64>>,
    y_mean: f64,
    y_std: f64,
    /// Kernel signal std.
    pub signal_std: f64,
    /// Per-dimension length-scales.
    pub length_scales: Vec<f64>,
    /// Observation noise std in normalised target units.
    pub noise_std: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
}

fn kernel_value(a: &[f64], b: &[f64], signal_std: f64, ls: &[f64]) -> f64 {
    let sq: f64 = a
        .iter()
        .zip(b)
        .zip(ls)
        .map(|((&ai, &bi), &l)| ((ai - bi) / l).powi(2))
        .sum();
    signal_std * signal_std * (-0.5 * sq).exp()
}

fn kernel_matrix(x: &[Vec<f64>], signal_std: f64, ls: &[f64], noise_std: f64) -> DMatrix<f64> {
    let n = x.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = kernel_value(&x[i], &x[j], signal_std, ls);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
        k[(i, i)] += noise_std * noise_std;
    }
    k
}

fn cholesky_with_jitter(mut k: DMatrix<f64>) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let n = k.nrows();
    let mut jitter = JITTER_START;
    loop {
        let mut kj = k.clone();
        for i in 0..n {
            kj[(i, i)] += jitter;
        }
        if let Some(c) = Cholesky::new(kj) {
            return Ok((c, jitter));
        }
        jitter *= 10.0;
        if jitter > JITTER_MAX {
            // keep `k` untouched for the error message
            let diag_max = (0..n).map(|i| k[(i, i)]).fold(f64::MIN, f64::max);
            k.fill(0.0);
            return Err(Error::FitFailed(format!(
                "kernel matrix not positive definite up to jitter {JITTER_MAX} (max diag {diag_max})"
            )));
        }
    }
}

/// Log marginal likelihood and its gradient with respect to the logs of
/// `(signal_std, length_scales.., noise_std)`.
pub fn log_marginal_likelihood(
    x: &[Vec<f64>],
    y: &DVector<f64>,
    signal_std: f64,
    ls: &[f64],
    noise_std: f64,
) -> Result<(f64, Vec<f64>)> {
    let n = x.len();
    let d = ls.len();
    let k = kernel_matrix(x, signal_std, ls, noise_std);
    let (chol, _) = cholesky_with_jitter(k)?;
    let alpha = chol.solve(y);

    let log_det: f64 = (0..n).map(|i| chol.l_dirty()[(i, i)].ln()).sum();
    let lml = -0.5 * y.dot(&alpha) - log_det - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();

    // G = alpha alpha^T - K^{-1}; d lml / d theta = 0.5 tr(G dK/dtheta)
    let k_inv = chol.inverse();
    let mut grad = vec![0.0; d + 2];
    for i in 0..n {
        for j in 0..n {
            let g = alpha[i] * alpha[j] - k_inv[(i, j)];
            let kf = kernel_value(&x[i], &x[j], signal_std, ls);
            // signal: dK/dlog s = 2 K_f
            grad[0] += 0.5 * g * 2.0 * kf;
            // length-scales: dK/dlog l_d = K_f * ((xi_d - xj_d)/l_d)^2
            for (di, l) in ls.iter().enumerate() {
                let r = (x[i][di] - x[j][di]) / l;
                grad[1 + di] += 0.5 * g * kf * r * r;
            }
            if i == j {
                // noise: dK/dlog sn = 2 sn^2 I
                grad[d + 1] += 0.5 * g * 2.0 * noise_std * noise_std;
            }
        }
    }
    Ok((lml, grad))
}

impl GpModel {
    /// Builds the posterior for fixed hyper-parameters without normalising
    /// the targets.
    pub fn with_hyperparams(
        x: Vec<Vec<f64>>,
        y: &[f64],
        signal_std: f64,
        length_scales: Vec<f64>,
        noise_std: f64,
    ) -> Result<Self> {
        let yv = DVector::from_column_slice(y);
        let k = kernel_matrix(&x, signal_std, &length_scales, noise_std);
        let (chol, _) = cholesky_with_jitter(k)?;
        let alpha = chol.solve(&yv);
        Ok(Self {
            x,
            y_mean: 0.0,
            y_std: 1.0,
            signal_std,
            length_scales,
            noise_std,
            chol,
            alpha,
        })
    }

    /// Posterior mean and (latent, noise-free) std at `x`, in original units.
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        let k_star = DVector::from_iterator(
            self.x.len(),
            self.x
                .iter()
                .map(|xi| kernel_value(xi, x, self.signal_std, &self.length_scales)),
        );
        let mean_n = k_star.dot(&self.alpha);
        let v = self.chol.l_dirty().solve_lower_triangular(&k_star).expect("triangular solve");
        let var_n = (self.signal_std * self.signal_std - v.dot(&v)).max(0.0);
        (self.y_mean + self.y_std * mean_n, self.y_std * var_n.sqrt())
    }
}

/// Fits hyper-parameters by maximum marginal likelihood: `N_STARTS` random
/// restarts of Adam ascent in log space with analytic gradients.
pub fn gp_fit(x: Vec<Vec<f64>>, y: &[f64], stream: RngStream) -> Result<GpModel> {
    if x.len() < 2 {
        return Err(Error::FitFailed("need at least 2 observations".into()));
    }
    let n = x.len() as f64;
    let d = x[0].len();
    let y_mean = y.iter().sum::<f64>() / n;
    let y_std = (y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / n).sqrt().max(1e-12);
    let yn = DVector::from_iterator(y.len(), y.iter().map(|v| (v - y_mean) / y_std));

    let mut rng = stream.rng();
    let mut best: Option<(f64, Vec<f64>)> = None;

    for _ in 0..N_STARTS {
        // log-space start: signal near 1, length-scales in [0.05, 2],
        // noise in [1e-3, 0.5]
        let mut p = Vec::with_capacity(d + 2);
        p.push(rng.random_range(-1.0..1.0));
        for _ in 0..d {
            p.push(rng.random_range((0.05_f64).ln()..(2.0_f64).ln()));
        }
        p.push(rng.random_range((1e-3_f64).ln()..(0.5_f64).ln()));

        let mut m = vec![0.0; p.len()];
        let mut v = vec![0.0; p.len()];
        let mut ok = true;
        let mut last_lml = f64::NEG_INFINITY;
        for t in 1..=FIT_ITERS {
            let signal = p[0].exp();
            let ls: Vec<f64> = p[1..=d].iter().map(|l| l.exp()).collect();
            let noise = p[d + 1].exp();
            let (lml, grad) = match log_marginal_likelihood(&x, &yn, signal, &ls, noise) {
                Ok(r) => r,
                Err(_) => {
                    ok = false;
                    break;
                }
            };
            last_lml = lml;
            let bc1 = 1.0 - 0.9_f64.powi(t as i32);
            let bc2 = 1.0 - 0.999_f64.powi(t as i32);
            for i in 0..p.len() {
                m[i] = 0.9 * m[i] + 0.1 * grad[i];
                v[i] = 0.999 * v[i] + 0.001 * grad[i] * grad[i];
                // ascent
                p[i] += FIT_STEP * (m[i] / bc1) / ((v[i] / bc2).sqrt() + 1e-8);
            }
            // keep hyper-parameters in a sane range
            p[0] = p[0].clamp((1e-3_f64).ln(), (1e3_f64).ln());
            for pi in p[1..=d].iter_mut() {
                *pi = pi.clamp((1e-3_f64).ln(), (1e3_f64).ln());
            }
            p[d + 1] = p[d + 1].clamp((1e-6_f64).ln(), (10.0_f64).ln());
        }
        if ok && last_lml.is_finite() && best.as_ref().is_none_or(|(b, _)| last_lml > *b) {
            best = Some((last_lml, p));
        }
    }

    let (_, p) = best.ok_or_else(|| Error::FitFailed("all restarts failed".into()))?;
    let signal = p[0].exp();
    let ls: Vec<f64> = p[1..=d].iter().map(|l| l.exp()).collect();
    let noise = p[d + 1].exp();
    let k = kernel_matrix(&x, signal, &ls, noise);
    let (chol, _) = cholesky_with_jitter(k)?;
    let alpha = chol.solve(&yn);
    Ok(GpModel {
        x,
        y_mean,
        y_std,
        signal_std: signal,
        length_scales: ls,
        noise_std: noise,
        chol,
        alpha,
    })
}

fn normal_cdf(s: f64) -> f64 {
    0.5 * (1.0 + erf(s / std::f64::consts::SQRT_2))
}

fn normal_pdf(s: f64) -> f64 {
    (-0.5 * s * s).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Upper confidence bound `mu(x) + delta * sigma(x)`.
pub fn gp_ucb(model: &GpModel, x: &[f64], delta: f64) -> f64 {
    let (mu, sigma) = model.predict(x);
    mu + delta * sigma
}

/// Closed-form expected improvement over the incumbent; exactly 0 where the
/// posterior std vanishes, clipped at 0 against floating-point underflow.
pub fn gp_ei(model: &GpModel, x: &[f64], incumbent: f64) -> f64 {
    let (mu, sigma) = model.predict(x);
    ei_closed_form(mu, sigma, incumbent)
}

pub fn ei_closed_form(mu: f64, sigma: f64, incumbent: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let s = (mu - incumbent) / sigma;
    ((mu - incumbent) * normal_cdf(s) + sigma * normal_pdf(s)).max(0.0)
}

/// Acquisition selection for the GP baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GpAcquisition {
    Ucb { delta: f64 },
    Ei,
}

pub struct GpBoOptimizer {
    acquisition: GpAcquisition,
    dim: usize,
    label: &'static str,
}

impl GpBoOptimizer {
    pub fn new(acquisition: GpAcquisition, dim: usize, label: &'static str) -> Self {
        Self { acquisition, dim, label }
    }

    fn uniform(&self, stream: RngStream) -> Vec<f64> {
        let mut rng = stream.rng();
        (0..self.dim).map(|_| rng.random::<f64>()).collect()
    }
}

impl Optimizer for GpBoOptimizer {
    fn name(&self) -> &str {
        self.label
    }

    fn suggest(&mut self, data: &Dataset, stream: RngStream) -> Vec<f64> {
        if data.len() < 2 {
            return self.uniform(stream.child(0));
        }
        let x: Vec<Vec<f64>> = data.records().iter().map(|r| r.x.clone()).collect();
        let y = data.g_values();
        let model = match gp_fit(x.clone(), &y, stream.child(1)) {
            Ok(m) => m,
            Err(e) => {
                log::warn!("{}: GP fit failed ({e}); suggesting uniformly", self.label);
                return self.uniform(stream.child(0));
            }
        };
        let acquisition = self.acquisition;
        let incumbent = data.incumbent().map(|r| r.g).unwrap_or(0.0);
        maximize_acquisition(
            move |p| match acquisition {
                GpAcquisition::Ucb { delta } => gp_ucb(&model, p, delta),
                GpAcquisition::Ei => gp_ei(&model, p, incumbent),
            },
            self.dim,
            &x,
            stream.child(2),
        )
    }

    fn observe(&mut self, _x: &[f64], _g: f64) {}
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::EvalRecord;
    use approx::assert_relative_eq;

    #[test]
    fn noiseless_posterior_interpolates() {
        let x: Vec<Vec<f64>> = (0..7).map(|i| vec![i as f64 / 6.0]).collect();
        let y: Vec<f64> = x.iter().map(|p| (4.0 * p[0]).sin()).collect();
        let model = GpModel::with_hyperparams(x.clone(), &y, 1.0, vec![0.3], 0.0).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            let (mu, sigma) = model.predict(xi);
            assert_relative_eq!(mu, *yi, epsilon = 1e-6);
            assert!(sigma < 1e-3);
        }
    }

    #[test]
    fn lml_gradient_matches_finite_differences() {
        let stream = RngStream::new(5, 0);
        let mut rng = stream.rng();
        let x: Vec<Vec<f64>> = (0..12).map(|_| vec![rng.random(), rng.random()]).collect();
        let y = DVector::from_iterator(12, x.iter().map(|p| p[0] - 0.5 * p[1]));

        let signal = 0.8;
        let ls = vec![0.4, 0.6];
        let noise = 0.1;
        let (_, grad) = log_marginal_likelihood(&x, &y, signal, &ls, noise).unwrap();

        let eval = |log_shift: &[f64]| {
            let s = signal * log_shift[0].exp();
            let l: Vec<f64> = ls.iter().zip(&log_shift[1..3]).map(|(l, d)| l * d.exp()).collect();
            let n = noise * log_shift[3].exp();
            log_marginal_likelihood(&x, &y, s, &l, n).unwrap().0
        };
        let h = 1e-6;
        for i in 0..4 {
            let mut up = [0.0; 4];
            up[i] = h;
            let mut down = [0.0; 4];
            down[i] = -h;
            let numeric = (eval(&up) - eval(&down)) / (2.0 * h);
            let denom = grad[i].abs().max(numeric.abs()).max(1e-8);
            assert!(
                (grad[i] - numeric).abs() / denom <= 1e-4,
                "component {i}: analytic {} vs numeric {numeric}",
                grad[i]
            );
        }
    }

    #[test]
    fn recovers_length_scale_within_factor_two() {
        // sample from a known GP: l = 0.2, signal 1, noise 0.1
        let true_ls = 0.2;
        let n = 100;
        let x: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / (n - 1) as f64]).collect();
        let k = kernel_matrix(&x, 1.0, &[true_ls], 1e-6);
        let (chol, _) = cholesky_with_jitter(k).unwrap();
        let mut rng = RngStream::new(8, 0).rng();
        let z = DVector::from_iterator(n, (0..n).map(|_| {
            rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng)
        }));
        let f = chol.l_dirty().clone().lower_triangle() * z;
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let e: f64 =
                    rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
                f[i] + 0.1 * e
            })
            .collect();

        let model = gp_fit(x, &y, RngStream::new(9, 0)).unwrap();
        let l = model.length_scales[0];
        assert!(l > true_ls / 2.0 && l < true_ls * 2.0, "recovered l = {l}");
    }

    #[test]
    fn ucb_properties() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 / 4.0]).collect();
        let y: Vec<f64> = x.iter().map(|p| p[0] * p[0]).collect();
        let model = GpModel::with_hyperparams(x.clone(), &y, 1.0, vec![0.3], 0.0).unwrap();
        // at a noise-free training point sigma ~ 0, so UCB ~ the target
        assert_relative_eq!(gp_ucb(&model, &x[2], 3.0), y[2], epsilon = 1e-3);
        for i in 0..20 {
            let p = [i as f64 / 19.0];
            let (mu, _) = model.predict(&p);
            assert_relative_eq!(gp_ucb(&model, &p, 0.0), mu, epsilon = 1e-12);
            assert!(gp_ucb(&model, &p, 3.0) >= mu);
        }
    }

    #[test]
    fn ei_zero_at_zero_variance() {
        assert_eq!(ei_closed_form(0.7, 0.0, 0.3), 0.0);
    }

    #[test]
    fn ei_at_incumbent_mean() {
        // mu = y*, sigma = 1: EI = pdf(0) = 1/sqrt(2 pi)
        assert_relative_eq!(
            ei_closed_form(1.0, 1.0, 1.0),
            1.0 / (2.0 * std::f64::consts::PI).sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn ei_matches_monte_carlo() {
        let (mu, sigma, inc) = (1.0, 0.5, 0.0);
        let mut rng = RngStream::new(10, 0).rng();
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let z: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
            let v = (mu + sigma * z - inc).max(0.0);
            sum += v;
            sum_sq += v * v;
        }
        let mc = sum / n as f64;
        let se = ((sum_sq / n as f64 - mc * mc) / n as f64).sqrt();
        let ei = ei_closed_form(mu, sigma, inc);
        assert!((ei - mc).abs() <= 3.0 * se, "ei {ei} vs mc {mc} +- {se}");
    }

    #[test]
    fn bo_suggest_contract() {
        let mut data = Dataset::new();
        let root = RngStream::new(11, 0);
        let mut rng = root.rng();
        for _ in 0..12 {
            let x = vec![rng.random::<f64>(), rng.random::<f64>()];
            let g = -(x[0] - 0.7).powi(2) - (x[1] - 0.3).powi(2);
            data.push(EvalRecord::new(x, vec![g]));
        }
        let mut opt = GpBoOptimizer::new(GpAcquisition::Ucb { delta: 3.0 }, 2, "bo-ucb");
        let a = opt.suggest(&data, root.child(1));
        let b = opt.suggest(&data, root.child(1));
        assert_eq!(a, b);
        assert!(a.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}
