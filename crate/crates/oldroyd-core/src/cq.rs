//! Convolution quadrature weights and discrete convolutions.
//!
//! A convolution operator `K(D_t)` with kernel symbol `K(z) = z^gamma` is
//! approximated at the grid points `t_n = n tau` by the discrete convolution
//!
//! ```text
//! K(D_tau) phi(t_n) = sum_{j=0..n} w_{n-j} phi(t_j),
//! ```
//!
//! where the weights are the power series coefficients of
//! `(delta(xi)/tau)^gamma` and `delta` is the generating polynomial of the
//! multistep method: `1 - xi` for backward Euler, `(1-xi) + (1-xi)^2/2` for
//! the second-order backward difference.
//!
//! Weights are generated by recurrences in O(N) per exponent rather than by
//! series multiplication, and cross-check against the factored form
//! `(3/2)^gamma (1-xi)^gamma (1-xi/3)^gamma` of the SBD series.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Multistep generator behind a weight table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    /// Backward Euler, delta(xi) = 1 - xi.
    BE,
    /// Second-order backward difference, delta(xi) = (3 - 4 xi + xi^2)/2.
    SBD,
}

/// A weight table for one generator, exponent, and step size.
#[derive(Debug, Clone, PartialEq)]
pub struct CqWeights {
    /// Generator the table belongs to.
    pub generator: Generator,
    /// Kernel exponent gamma of z^gamma.
    pub gamma: f64,
    /// Time step.
    pub tau: f64,
    /// Weights w_0 .. w_N.
    pub weights: Vec<f64>,
}

/// Errors from discrete convolutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CqError {
    /// History is longer than the available weight table.
    HistoryTooLong {
        /// History length supplied.
        history: usize,
        /// Weights available.
        weights: usize,
    },
    /// The modified quadrature is only defined from step 1 on.
    EmptyHistory,
}

impl fmt::Display for CqError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CqError::HistoryTooLong { history, weights } => write!(
                f,
                "history of length {history} exceeds weight table of length {weights}"
            ),
            CqError::EmptyHistory => write!(f, "modified quadrature needs at least two entries"),
        }
    }
}

impl core::error::Error for CqError {}

/// Backward Euler weights for K(z) = z^gamma:
/// w_j = tau^(-gamma) c_j with c_j the coefficients of (1-xi)^gamma.
pub fn be_weights(gamma: f64, tau: f64, n: usize) -> CqWeights {
    assert!(tau > 0.0, "tau must be positive");
    let scale = libm::pow(tau, -gamma);
    let mut weights = Vec::with_capacity(n + 1);
    let mut c = 1.0;
    weights.push(scale);
    for j in 1..=n {
        c *= (j as f64 - 1.0 - gamma) / j as f64;
        weights.push(scale * c);
    }
    CqWeights {
        generator: Generator::BE,
        gamma,
        tau,
        weights,
    }
}

/// SBD weights for K(z) = z^gamma: coefficients of (delta(xi)/tau)^gamma
/// with delta(xi) = (3 - 4 xi + xi^2)/2, by the power recurrence for powers
/// of a polynomial.
pub fn sbd_weights(gamma: f64, tau: f64, n: usize) -> CqWeights {
    assert!(tau > 0.0, "tau must be positive");
    let p = [1.5, -2.0, 0.5];
    let mut q = Vec::with_capacity(n + 1);
    q.push(libm::pow(p[0], gamma));
    for m in 1..=n {
        let mut s = 0.0;
        for k in 1..=m.min(2) {
            s += (k as f64 * (gamma + 1.0) - m as f64) * p[k] * q[m - k];
        }
        q.push(s / (m as f64 * p[0]));
    }
    let scale = libm::pow(tau, -gamma);
    CqWeights {
        generator: Generator::SBD,
        gamma,
        tau,
        weights: q.into_iter().map(|v| scale * v).collect(),
    }
}

/// Generates weights for the requested generator.
pub fn weights_for(generator: Generator, gamma: f64, tau: f64, n: usize) -> CqWeights {
    match generator {
        Generator::BE => be_weights(gamma, tau, n),
        Generator::SBD => sbd_weights(gamma, tau, n),
    }
}

impl CqWeights {
    /// Cumulative sums S_n = w_0 + ... + w_n.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.weights.len());
        let mut s = 0.0;
        for &w in &self.weights {
            s += w;
            out.push(s);
        }
        out
    }
}

/// Evaluates `sum_{j=0..n} w_{n-j} phi_j` where `history` is phi_0 .. phi_n
/// of equal-length vectors.
pub fn discrete_convolution(w: &CqWeights, history: &[Vec<f64>]) -> Result<Vec<f64>, CqError> {
    let n1 = history.len();
    if n1 == 0 {
        return Err(CqError::EmptyHistory);
    }
    if n1 > w.weights.len() {
        return Err(CqError::HistoryTooLong {
            history: n1,
            weights: w.weights.len(),
        });
    }
    let dim = history[0].len();
    let mut out = vec![0.0; dim];
    for (j, phi) in history.iter().enumerate() {
        let wj = w.weights[n1 - 1 - j];
        for (o, &v) in out.iter_mut().zip(phi.iter()) {
            *o += wj * v;
        }
    }
    Ok(out)
}

/// Scalar version of [`discrete_convolution`].
pub fn discrete_convolution_scalar(w: &CqWeights, history: &[f64]) -> Result<f64, CqError> {
    let n1 = history.len();
    if n1 == 0 {
        return Err(CqError::EmptyHistory);
    }
    if n1 > w.weights.len() {
        return Err(CqError::HistoryTooLong {
            history: n1,
            weights: w.weights.len(),
        });
    }
    Ok(history
        .iter()
        .enumerate()
        .map(|(j, &v)| w.weights[n1 - 1 - j] * v)
        .sum())
}

/// The modified quadrature of the corrected SBD scheme:
/// `sum_{j=1..n} w_{n-j} phi_j + (1/2) w_{n-1} phi_0`.
///
/// Differs from the plain convolution only in halving the phi_0 weight.
pub fn modified_conv_beta(w: &CqWeights, history: &[Vec<f64>]) -> Result<Vec<f64>, CqError> {
    let n1 = history.len();
    if n1 < 2 {
        return Err(CqError::EmptyHistory);
    }
    if n1 > w.weights.len() {
        return Err(CqError::HistoryTooLong {
            history: n1,
            weights: w.weights.len(),
        });
    }
    let dim = history[0].len();
    let mut out = vec![0.0; dim];
    for (j, phi) in history.iter().enumerate().skip(1) {
        let wj = w.weights[n1 - 1 - j];
        for (o, &v) in out.iter_mut().zip(phi.iter()) {
            *o += wj * v;
        }
    }
    let w0 = 0.5 * w.weights[n1 - 2];
    for (o, &v) in out.iter_mut().zip(history[0].iter()) {
        *o += w0 * v;
    }
    Ok(out)
}

/// The startup sequence 1_tau = (0, 3/2, 1, 1, ...) of length n+1, equal to
/// the SBD derivative of the running integral of 1 at the grid points.
pub fn correction_sequence(n: usize) -> Vec<f64> {
    assert!(n >= 1);
    let mut seq = vec![1.0; n + 1];
    seq[0] = 0.0;
    seq[1] = 1.5;
    seq
}
