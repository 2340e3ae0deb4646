//! Pfaffian format calculus.
//!
//! A Pfaffian function carries a format `(alpha, beta, ell)`: the degree
//! bound of the chain polynomials, the degree of the function as a polynomial
//! over the chain, and the chain length. This module knows the formats of the
//! catalog activations, derives the format of the MSE/BCE empirical risk of a
//! feedforward network from them, reproduces the published uniform-width
//! tuples bit-for-bit, and applies the l2 / skip-connection transforms.
//!
//! Everything here is exact integer arithmetic; compositions use 128-bit
//! intermediates and fail loudly on overflow instead of wrapping.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Real;

/// The format triple `(alpha, beta, ell)` of a Pfaffian function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PfaffianFormat {
    /// Degree bound of the chain polynomials.
    pub alpha: u64,
    /// Degree of the function as a polynomial over the chain.
    pub beta: u64,
    /// Chain length.
    pub ell: u64,
}

impl PfaffianFormat {
    /// Build a format, rejecting `beta = 0` on a nonempty chain (only the
    /// constant function has degree 0).
    ///
    /// `alpha = 0` is accepted: the published uniform-width MSE tuple with a
    /// linear last layer degenerates to chain degree 0 at depth 2 and must
    /// stay representable.
    pub fn new(alpha: u64, beta: u64, ell: u64) -> Result<Self> {
        if ell >= 1 && beta < 1 {
            return Err(Error::InvalidFormat(format!(
                "beta must be >= 1 when ell >= 1, got ({alpha}, {beta}, {ell})"
            )));
        }
        Ok(Self { alpha, beta, ell })
    }

    pub fn as_tuple(&self) -> (u64, u64, u64) {
        (self.alpha, self.beta, self.ell)
    }
}

impl fmt::Display for PfaffianFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.alpha, self.beta, self.ell)
    }
}

/// Whether the chain polynomials of an activation reference the raw input
/// directly (`Case2`) or only through the chain functions (`Case1`).
///
/// tanh is the canonical `Case1` example (its chain polynomial is
/// `1 - f1^2`); arctan is `Case2` (its chain polynomial `x * f1^2` mentions
/// `x` itself).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DependenceCase {
    Case1,
    Case2,
}

/// Catalog of supported activation functions.
///
/// Each entry carries its Pfaffian format, its dependence case, and exact
/// evaluators for the function and its derivative. Entries are addressable
/// by name: `"tanh"`, `"logsig"`, `"arctan"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    LogSig,
    ArcTan,
}

impl Activation {
    pub const ALL: [Activation; 3] = [Activation::Tanh, Activation::LogSig, Activation::ArcTan];

    pub fn name(&self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::LogSig => "logsig",
            Activation::ArcTan => "arctan",
        }
    }

    /// Format of the activation as a Pfaffian function of one variable.
    ///
    /// tanh and logsig are single-chain with quadratic chain polynomials,
    /// format `(2, 1, 1)`. arctan needs the auxiliary chain function
    /// `1/(1+x^2)` whose derivative polynomial has degree 3 and mentions `x`,
    /// so its format is `(3, 1, 2)`.
    pub fn format(&self) -> PfaffianFormat {
        match self {
            Activation::Tanh | Activation::LogSig => PfaffianFormat {
                alpha: 2,
                beta: 1,
                ell: 1,
            },
            Activation::ArcTan => PfaffianFormat {
                alpha: 3,
                beta: 1,
                ell: 2,
            },
        }
    }

    pub fn dependence_case(&self) -> DependenceCase {
        match self {
            Activation::Tanh | Activation::LogSig => DependenceCase::Case1,
            Activation::ArcTan => DependenceCase::Case2,
        }
    }

    pub fn eval<F: Real>(&self, x: F) -> F {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::LogSig => F::one() / (F::one() + (-x).exp()),
            Activation::ArcTan => x.atan(),
        }
    }

    pub fn deriv<F: Real>(&self, x: F) -> F {
        match self {
            Activation::Tanh => {
                let t = x.tanh();
                F::one() - t * t
            }
            Activation::LogSig => {
                let s = self.eval(x);
                s * (F::one() - s)
            }
            Activation::ArcTan => F::one() / (F::one() + x * x),
        }
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "logsig" => Ok(Activation::LogSig),
            "arctan" => Ok(Activation::ArcTan),
            other => Err(Error::InvalidInput(format!(
                "unknown activation {other:?}; catalog: tanh, logsig, arctan"
            ))),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Output layer of the network: a plain affine map, or an activation applied
/// on top of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LastLayer {
    Linear,
    Activated(Activation),
}

impl LastLayer {
    pub fn activation(&self) -> Option<Activation> {
        match self {
            LastLayer::Linear => None,
            LastLayer::Activated(g) => Some(*g),
        }
    }
}

impl fmt::Display for LastLayer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LastLayer::Linear => f.write_str("linear"),
            LastLayer::Activated(g) => f.write_str(g.name()),
        }
    }
}

/// Shape of a feedforward network with a single output neuron.
///
/// Layer widths are `n0, n1, ..., n_{L-1}, 1` where `n1..n_{L-1}` are the
/// hidden widths; the depth is `L = hidden_widths.len() + 1 >= 2`. Biases are
/// folded into augmented weight matrices `W^l = [b^l | W~^l]`, so layer `l`
/// has `n_l * (n_{l-1} + 1)` parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    n0: usize,
    hidden_widths: Vec<usize>,
    last_layer: LastLayer,
    skip_connections: bool,
}

impl Architecture {
    pub fn new(
        n0: usize,
        hidden_widths: Vec<usize>,
        last_layer: LastLayer,
        skip_connections: bool,
    ) -> Result<Self> {
        if n0 == 0 {
            return Err(Error::InvalidArchitecture("input width n0 must be >= 1".into()));
        }
        if hidden_widths.is_empty() {
            return Err(Error::InvalidArchitecture(
                "at least one hidden layer is required (L >= 2)".into(),
            ));
        }
        if hidden_widths.contains(&0) {
            return Err(Error::InvalidArchitecture("hidden widths must be >= 1".into()));
        }
        if skip_connections {
            for (l, pair) in hidden_widths.windows(2).enumerate() {
                if pair[0] != pair[1] {
                    return Err(Error::InvalidArchitecture(format!(
                        "skip connection between hidden layers {} and {} needs equal \
                         widths, got {} and {}",
                        l + 1,
                        l + 2,
                        pair[0],
                        pair[1]
                    )));
                }
            }
        }
        Ok(Self {
            n0,
            hidden_widths,
            last_layer,
            skip_connections,
        })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn hidden_widths(&self) -> &[usize] {
        &self.hidden_widths
    }

    /// Layer count `L` (hidden layers plus the output layer).
    pub fn depth(&self) -> usize {
        self.hidden_widths.len() + 1
    }

    pub fn last_layer(&self) -> &LastLayer {
        &self.last_layer
    }

    pub fn skip_connections(&self) -> bool {
        self.skip_connections
    }

    /// Same architecture with the skip flag cleared.
    pub fn without_skips(&self) -> Architecture {
        Architecture {
            skip_connections: false,
            ..self.clone()
        }
    }

    /// All layer widths `n0, n1, ..., n_L` (the output width is fixed to 1).
    pub fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.hidden_widths.len() + 2);
        w.push(self.n0);
        w.extend_from_slice(&self.hidden_widths);
        w.push(1);
        w
    }

    /// The shared hidden width, if all hidden layers agree.
    pub fn uniform_hidden_width(&self) -> Option<usize> {
        let h = self.hidden_widths[0];
        self.hidden_widths.iter().all(|&w| w == h).then_some(h)
    }

    pub fn sum_hidden_widths(&self) -> u64 {
        self.hidden_widths.iter().map(|&w| w as u64).sum()
    }
}

/// Total trainable parameter count `sum_l n_l (n_{l-1} + 1)`.
///
/// For uniform hidden width `h` this equals `h^2 (L-2) + h (n0 + L) + 1`.
pub fn total_params(arch: &Architecture) -> u64 {
    let widths = arch.widths();
    widths
        .windows(2)
        .map(|w| w[1] as u64 * (w[0] as u64 + 1))
        .sum()
}

/// Which empirical risk is being analyzed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    /// Mean square error, averaged over the dataset: `(1/m) sum (y - f)^2`.
    Mse,
    /// Binary cross-entropy, summed over the dataset (targets in {0, 1}).
    Bce,
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossKind::Mse => f.write_str("mse"),
            LossKind::Bce => f.write_str("bce"),
        }
    }
}

/// Loss choice plus the l2 regularization coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossSpec {
    pub kind: LossKind,
    #[serde(default)]
    pub l2_lambda: f64,
}

impl LossSpec {
    pub fn new(kind: LossKind, l2_lambda: f64) -> Result<Self> {
        let spec = LossSpec { kind, l2_lambda };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "l2_lambda must be finite and >= 0, got {}",
                self.l2_lambda
            )));
        }
        Ok(())
    }
}

fn to_u64(v: u128, what: &'static str) -> Result<u64> {
    u64::try_from(v).map_err(|_| Error::FormatOverflow(what))
}

/// Degree of the derivative of a Pfaffian function as a polynomial over its
/// chain: `beta + alpha - 1` when the chain polynomials do not mention the
/// raw input (`Case1`), plus an extra `alpha (beta + 1)` when they do
/// (`Case2`).
pub fn derivative_degree(format: PfaffianFormat, case: DependenceCase) -> Result<u64> {
    if format.ell == 0 {
        return Err(Error::InvalidFormat(
            "derivative degree needs a nonempty chain (ell >= 1)".into(),
        ));
    }
    if format.alpha < 1 || format.beta < 1 {
        return Err(Error::InvalidFormat(format!(
            "derivative degree needs alpha >= 1 and beta >= 1, got {format}"
        )));
    }
    let (a, b) = (format.alpha as u128, format.beta as u128);
    let d = match case {
        DependenceCase::Case1 => b + a - 1,
        DependenceCase::Case2 => b + a - 1 + a * (b + 1),
    };
    to_u64(d, "derivative_degree")
}

/// Format of the MSE empirical risk over `samples` training pairs.
///
/// With hidden activation `sigma` of format `(a, b, l)` and derivative degree
/// `d`, a linear last layer gives
/// `((d+1)(L-2) + d, 2(b+1), m * l * sum(n_k))`; an activated last layer `g`
/// with derivative degree `dg` gives
/// `((d+1)(L-2) + d + dg + 1, 2 beta_g, m (l * sum(n_k) + l_g))`.
pub fn loss_format_mse(
    arch: &Architecture,
    sigma: Activation,
    samples: u64,
) -> Result<PfaffianFormat> {
    require_samples(samples)?;
    let d = derivative_degree(sigma.format(), sigma.dependence_case())? as u128;
    let depth = arch.depth() as u128;
    let sf = sigma.format();
    let chain_units = sf.ell as u128 * arch.sum_hidden_widths() as u128;
    let m = samples as u128;

    let (alpha, beta, ell) = match arch.last_layer() {
        LastLayer::Linear => (
            (d + 1) * (depth - 2) + d,
            2 * (sf.beta as u128 + 1),
            m * chain_units,
        ),
        LastLayer::Activated(g) => {
            let gf = g.format();
            let dg = derivative_degree(gf, g.dependence_case())? as u128;
            (
                (d + 1) * (depth - 2) + d + dg + 1,
                2 * gf.beta as u128,
                m * (chain_units + gf.ell as u128),
            )
        }
    };
    PfaffianFormat::new(
        to_u64(alpha, "loss_format_mse alpha")?,
        to_u64(beta, "loss_format_mse beta")?,
        to_u64(ell, "loss_format_mse ell")?,
    )
}

/// Format of the BCE empirical risk over `samples` training pairs.
///
/// BCE needs an activated last layer. A sigmoid last layer admits the shorter
/// chain `((L-2)(d+1) + d + 3, 1, m (l * sum(n_k) + 1) + 1)`; any other
/// activation `g` pays for the log terms:
/// `((L-2)(d+1) + d + dg + 3, 1, m (l * sum(n_k) + l_g + 4))`.
pub fn loss_format_bce(
    arch: &Architecture,
    sigma: Activation,
    samples: u64,
) -> Result<PfaffianFormat> {
    require_samples(samples)?;
    let g = match arch.last_layer() {
        LastLayer::Linear => {
            return Err(Error::Unsupported(
                "BCE requires an activated last layer".into(),
            ))
        }
        LastLayer::Activated(g) => *g,
    };
    let d = derivative_degree(sigma.format(), sigma.dependence_case())? as u128;
    let depth = arch.depth() as u128;
    let sf = sigma.format();
    let chain_units = sf.ell as u128 * arch.sum_hidden_widths() as u128;
    let m = samples as u128;

    let (alpha, ell) = if g == Activation::LogSig {
        ((depth - 2) * (d + 1) + d + 3, m * (chain_units + 1) + 1)
    } else {
        let gf = g.format();
        let dg = derivative_degree(gf, g.dependence_case())? as u128;
        (
            (depth - 2) * (d + 1) + d + dg + 3,
            m * (chain_units + gf.ell as u128 + 4),
        )
    };
    PfaffianFormat::new(
        to_u64(alpha, "loss_format_bce alpha")?,
        1,
        to_u64(ell, "loss_format_bce ell")?,
    )
}

/// The published uniform-width format tuples, exactly as printed.
///
/// These cover tanh/logsig hidden activations with all hidden layers of width
/// `width`. The MSE/linear tuple is `(3(L-2), 4, m(L-1)h)`; note that
/// substituting the tanh format into the general theorem instead yields chain
/// degree `3(L-2) + 2`. Both values are deliberately exposed (this function
/// reproduces the printed tuple, [`loss_format_mse`] the derived one) and
/// the fixed offset of 2 is pinned by tests rather than silently reconciled.
pub fn corollary_published_format(
    loss: LossKind,
    last: &LastLayer,
    depth: u64,
    width: u64,
    samples: u64,
) -> Result<PfaffianFormat> {
    require_samples(samples)?;
    if depth < 2 {
        return Err(Error::InvalidInput(format!(
            "published formats need depth L >= 2, got {depth}"
        )));
    }
    if width == 0 {
        return Err(Error::InvalidInput("width must be >= 1".into()));
    }
    let (l, h, m) = (depth as u128, width as u128, samples as u128);
    let (alpha, beta, ell) = match (loss, last) {
        (LossKind::Mse, LastLayer::Linear) => (3 * (l - 2), 4, m * (l - 1) * h),
        (LossKind::Mse, LastLayer::Activated(Activation::LogSig)) => {
            (3 * (l - 2) + 5, 2, m * (h * (l - 1) + 1))
        }
        (LossKind::Bce, LastLayer::Activated(Activation::LogSig)) => {
            (3 * (l - 2) + 5, 1, m * ((l - 1) * h + 1) + 1)
        }
        (LossKind::Bce, LastLayer::Activated(Activation::Tanh)) => {
            (3 * (l - 2) + 7, 1, m * ((l - 1) * h + 5))
        }
        (loss, last) => {
            return Err(Error::Unsupported(format!(
                "no published tuple for loss {loss} with last layer {last}"
            )))
        }
    };
    PfaffianFormat::new(
        to_u64(alpha, "corollary alpha")?,
        to_u64(beta, "corollary beta")?,
        to_u64(ell, "corollary ell")?,
    )
}

/// Format transform for adding `lambda/2 ||w||^2` to the loss.
///
/// The regularizer is a degree-2 polynomial in the parameters, so it can only
/// raise the function degree to 2; the chain is untouched.
pub fn apply_l2(format: PfaffianFormat) -> PfaffianFormat {
    PfaffianFormat {
        beta: format.beta.max(2),
        ..format
    }
}

/// Format transform for additive skip connections `z_l = sigma(W^l z_{l-1}) + z_{l-1}`.
///
/// The identity: the chain keeps the same length and the derivative degrees
/// are unchanged, only the concrete chain entries differ. Kept as an explicit
/// operation so pipelines record that the transform was considered.
pub fn apply_skip_connections(format: PfaffianFormat) -> PfaffianFormat {
    format
}

fn require_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidInput(
            "sample count m must be >= 1".into(),
        ));
    }
    Ok(())
}
