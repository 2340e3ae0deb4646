//! Betti-number upper bounds for Pfaffian sublevel sets.
//!
//! For a compact set cut out of `R^n` by a single sign condition on a
//! Pfaffian function of format `(alpha, beta, ell)`, the sum of its Betti
//! numbers is bounded by
//!
//! ```text
//! B(S) <= 2^{ell(ell-1)/2} (n beta + min(n, ell) alpha)^{n + ell}
//! ```
//!
//! up to an unstated multiplicative constant. This module evaluates that
//! bound with the constant instantiated to 1 and a single sign condition
//! (`s = 1`), both exactly (arbitrary-precision integer, capped by bit
//! length) and in log2 space, reproduces the uniform-width closed-form
//! expressions as an independent route to the same integers, and reports
//! the asymptotic regime labels of the bound in the sample count, the
//! width, and the depth.

use num_bigint::BigUint;
use num_traits::{Pow, ToPrimitive};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::pfaffian::{Activation, LastLayer, LossKind, PfaffianFormat};

/// Default bit-length cap for materializing exact bound values.
pub const DEFAULT_EXACT_BIT_CAP: u64 = 10_000_000;

/// The instantiations that turn the asymptotic bound statement into a
/// reproducible number. Embedded verbatim in every result so the output is
/// never mistaken for the theorem's uninstantiated form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Assumptions {
    /// Number of sign conditions defining the set.
    pub s: u32,
    /// Dimension used for the variety term `s^{n'}` (taken equal to the
    /// parameter count; with `s = 1` the term is 1 regardless).
    pub n_prime: u64,
    /// The multiplicative constant hidden in the bound's O(.).
    pub big_o_constant: u32,
}

/// An evaluated Betti-number bound `2^t * base^e`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    /// The exact integer, present only when its bit length fits the cap.
    pub exact: Option<BigUint>,
    /// log2 of the bound; `-inf` when the bound is 0.
    pub log2_value: f64,
    /// `n beta + min(n, ell) alpha`.
    pub base: u64,
    /// `n + ell`.
    pub exponent: u64,
    /// `ell (ell - 1) / 2`.
    pub two_power_exponent: u64,
    /// True when the exact value was suppressed by the bit cap.
    pub capped: bool,
    pub assumptions: Assumptions,
}

impl BoundResult {
    /// JSON form: `{"exact": decimal-string|null, "log2": float, "base": …,
    /// "exponent": …, "two_power_exponent": …, "assumptions": {…}}`.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "exact": self.exact.as_ref().map(|n| n.to_string()),
            "log2": self.log2_value,
            "base": self.base,
            "exponent": self.exponent,
            "two_power_exponent": self.two_power_exponent,
            "assumptions": self.assumptions,
        })
    }

    /// log2 recomputed from the materialized integer (53-bit mantissa), for
    /// consistency checks against `log2_value`.
    pub fn log2_of_exact(&self) -> Option<f64> {
        let n = self.exact.as_ref()?;
        if n.bits() == 0 {
            return Some(f64::NEG_INFINITY);
        }
        let bits = n.bits();
        if bits <= 64 {
            return Some((n.to_u64().unwrap() as f64).log2());
        }
        let shift = bits - 53;
        let top = (n >> shift).to_u64().unwrap() as f64;
        Some(top.log2() + shift as f64)
    }
}

fn checked_u64(v: u128, what: &'static str) -> Result<u64> {
    u64::try_from(v).map_err(|_| Error::FormatOverflow(what))
}

/// Assemble `2^{two} * base^{exponent}` with the exact value materialized
/// only when its bit length fits `exact_bit_cap`.
fn assemble(
    base: u64,
    exponent: u64,
    two: u64,
    n_prime: u64,
    exact_bit_cap: u64,
) -> BoundResult {
    let assumptions = Assumptions {
        s: 1,
        n_prime,
        big_o_constant: 1,
    };
    if base == 0 {
        // 0^e with e >= 1: the bound collapses to 0
        return BoundResult {
            exact: Some(BigUint::ZERO),
            log2_value: f64::NEG_INFINITY,
            base,
            exponent,
            two_power_exponent: two,
            capped: false,
            assumptions,
        };
    }
    let log2_value = two as f64 + exponent as f64 * (base as f64).log2();
    let bits_needed = log2_value.floor() + 1.0;
    let capped = bits_needed > exact_bit_cap as f64;
    let exact = (!capped).then(|| {
        let power: BigUint = Pow::pow(&BigUint::from(base), exponent);
        power << usize::try_from(two).expect("two_power_exponent fits usize under the cap")
    });
    BoundResult {
        exact,
        log2_value,
        base,
        exponent,
        two_power_exponent: two,
        capped,
        assumptions,
    }
}

/// Evaluate the Betti bound for a format and a parameter-space dimension.
pub fn zell_bound(
    format: PfaffianFormat,
    n_params: u64,
    exact_bit_cap: u64,
) -> Result<BoundResult> {
    if n_params == 0 {
        return Err(Error::InvalidInput("n_params must be >= 1".into()));
    }
    let (n, a, b, l) = (
        n_params as u128,
        format.alpha as u128,
        format.beta as u128,
        format.ell as u128,
    );
    let base = checked_u64(n * b + n.min(l) * a, "zell base")?;
    let exponent = checked_u64(n + l, "zell exponent")?;
    let two = checked_u64(l * l.saturating_sub(1) / 2, "zell two-power exponent")?;
    Ok(assemble(base, exponent, two, n_params, exact_bit_cap))
}

/// Evaluate the uniform-width closed-form bound expressions directly in
/// `(n0, h, L, m)`, without going through a format triple.
///
/// Supported: MSE with a linear last layer, MSE with a sigmoid last layer,
/// and BCE with a sigmoid last layer, for tanh/logsig hidden activations
/// with all hidden layers of width `h`. The result equals
/// `zell_bound(corollary_published_format(..), total_params(..))` as an
/// exact integer; the two routes share no arithmetic beyond the final
/// `2^t * b^e` assembly.
pub fn closed_form_bound(
    loss: LossKind,
    last: &LastLayer,
    n0: u64,
    h: u64,
    depth: u64,
    m: u64,
    exact_bit_cap: u64,
) -> Result<BoundResult> {
    if m == 0 {
        return Err(Error::InvalidInput(
            "closed-form bounds need sample count m >= 1".into(),
        ));
    }
    if depth < 2 {
        return Err(Error::InvalidInput(format!(
            "closed-form bounds need depth L >= 2, got {depth}"
        )));
    }
    if h == 0 || n0 == 0 {
        return Err(Error::InvalidInput("h and n0 must be >= 1".into()));
    }
    let (n0, h, l, m) = (n0 as u128, h as u128, depth as u128, m as u128);
    // total parameter count in closed form
    let nt = h * h * (l - 2) + h * (n0 + l) + 1;

    let (base, exponent, two) = match (loss, last) {
        (LossKind::Mse, LastLayer::Linear) => {
            if l == 2 {
                // shallow simplification: 2^{mh(mh-1)/2} (4h(2+n0)+4)^{h(2+n0+m)+1}
                (
                    4 * h * (2 + n0) + 4,
                    h * (2 + n0 + m) + 1,
                    m * h * (m * h - 1) / 2,
                )
            } else {
                let f = 4 * nt + 3 * (l - 2) * nt.min(m * (l - 1) * h);
                (
                    f,
                    h * h * (l - 2) + h * (l + n0 + m * (l - 1)) + 1,
                    m * (l - 1) * h * (m * (l - 1) * h - 1) / 2,
                )
            }
        }
        (LossKind::Mse, LastLayer::Activated(Activation::LogSig)) => {
            let chain = m * (h * (l - 1) + 1);
            let g = 2 * nt + (3 * (l - 2) + 5) * nt.min(chain);
            (
                g,
                h * h * (l - 2) + h * (l + n0 + m * (l - 1)) + m + 1,
                chain * (chain - 1) / 2,
            )
        }
        (LossKind::Bce, LastLayer::Activated(Activation::LogSig)) => {
            let chain = m * ((l - 1) * h + 1) + 1;
            if l == 2 {
                // shallow: 2^{(m(h+1)+1)(m(h+1))/2} g^{h(m+n0+2)+m+2}
                let g = h * (n0 + 2) + 1 + 5 * (h * (n0 + 2) + 1).min(m * (h + 1) + 1);
                (
                    g,
                    h * (m + n0 + 2) + m + 2,
                    (m * (h + 1) + 1) * (m * (h + 1)) / 2,
                )
            } else {
                let g = nt + (3 * (l - 2) + 5) * nt.min(chain);
                (
                    g,
                    h * (m * (l - 1) + n0 + 2 + (h + 1) * (l - 2)) + m + 2,
                    (m * ((l - 1) * h + 1) + 1) * (m * ((l - 1) * h + 1)) / 2,
                )
            }
        }
        (loss, last) => {
            return Err(Error::Unsupported(format!(
                "no closed-form bound expression for loss {loss} with last layer {last}"
            )))
        }
    };
    Ok(assemble(
        checked_u64(base, "explicit bound base")?,
        checked_u64(exponent, "explicit bound exponent")?,
        checked_u64(two, "explicit bound two-power exponent")?,
        checked_u64(nt, "explicit bound n_params")?,
        exact_bit_cap,
    ))
}

/// Which problem parameter a regime label describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeVariable {
    /// Sample count m.
    Samples,
    /// Hidden width h.
    Width,
    /// Layer count L.
    Depth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DepthClass {
    /// L >= 3.
    Deep,
    /// L = 2.
    Shallow,
}

/// One asymptotic regime of the Betti bound, as a symbolic label; the
/// constants kappa are published without values and stay symbolic here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegimeLabel {
    pub variable: RegimeVariable,
    pub depth_class: DepthClass,
    pub asymptotic_class: &'static str,
}

/// Growth regimes of the bound at a point `(h, L, m)` of the parameter
/// space, one label per varied quantity.
///
/// Deep networks (L >= 3) grow as `κ^{O(m²)}` in the sample count,
/// `O(h²)^{O(h²)}` in the width, and `2^{O(L²)}O(L²)^{O(L)}` in the depth;
/// shallow networks (L = 2) keep the sample-count regime but drop to
/// `O(h)^{O(h)}` in the width.
pub fn regime_summary(h: u64, depth: u64, m: u64) -> Result<Vec<RegimeLabel>> {
    if h == 0 || m == 0 {
        return Err(Error::InvalidInput("h and m must be >= 1".into()));
    }
    if depth < 2 {
        return Err(Error::InvalidInput(format!(
            "regimes are stated for L >= 2, got {depth}"
        )));
    }
    let labels = if depth >= 3 {
        vec![
            RegimeLabel {
                variable: RegimeVariable::Samples,
                depth_class: DepthClass::Deep,
                asymptotic_class: "κ^{O(m²)}",
            },
            RegimeLabel {
                variable: RegimeVariable::Width,
                depth_class: DepthClass::Deep,
                asymptotic_class: "O(h²)^{O(h²)}",
            },
            RegimeLabel {
                variable: RegimeVariable::Depth,
                depth_class: DepthClass::Deep,
                asymptotic_class: "2^{O(L²)}O(L²)^{O(L)}",
            },
        ]
    } else {
        vec![
            RegimeLabel {
                variable: RegimeVariable::Samples,
                depth_class: DepthClass::Shallow,
                asymptotic_class: "κ^{O(m²)}",
            },
            RegimeLabel {
                variable: RegimeVariable::Width,
                depth_class: DepthClass::Shallow,
                asymptotic_class: "O(h)^{O(h)}",
            },
        ]
    };
    Ok(labels)
}
