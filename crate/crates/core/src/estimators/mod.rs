//! Rating estimators: the Bradley-Terry maximum-likelihood fit and the
//! spectral methods that agree with it on quasi-symmetric data.

mod bt;
mod rpi;
mod spectral;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

pub use bt::{
    entropy, fit_bt, log_likelihood, pairwise_entropy, retrodictive_residuals, FitOptions,
    FitReport,
};
pub use rpi::{rpi_classic, RpiWeights};
pub use spectral::{
    cesaro_rating, fair_bets, pagerank_undamped, reduce_tournament, scroogefactor, wei_kendall,
    SpectralOptions, SpectralReport,
};

use crate::error::{Error, Result};
use crate::matrix::ComparisonMatrix;
use crate::ratings::{Normalization, RankLabel, RatingVector};

/// Methods that produce a positive rating vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    BradleyTerry,
    PageRank,
    Scroogefactor,
    FairBets,
    Cesaro,
    WeiKendall,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::BradleyTerry,
        Method::PageRank,
        Method::Scroogefactor,
        Method::FairBets,
        Method::Cesaro,
        Method::WeiKendall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::BradleyTerry => "bt",
            Method::PageRank => "pagerank",
            Method::Scroogefactor => "scroogefactor",
            Method::FairBets => "fair-bets",
            Method::Cesaro => "cesaro",
            Method::WeiKendall => "wei-kendall",
        }
    }

    /// Whether the method is a consistent estimator of Bradley-Terry strengths.
    pub fn is_consistent(self) -> bool {
        !matches!(self, Method::PageRank | Method::WeiKendall)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bt" | "bradley-terry" => Ok(Method::BradleyTerry),
            "pagerank" => Ok(Method::PageRank),
            "scroogefactor" => Ok(Method::Scroogefactor),
            "fair-bets" | "fairbets" | "fair_bets" => Ok(Method::FairBets),
            "cesaro" => Ok(Method::Cesaro),
            "wei-kendall" | "weikendall" | "wei_kendall" => Ok(Method::WeiKendall),
            other => Err(Error::invalid(format!("unknown method {other:?}"))),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Shared settings for [`compare_estimators`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub normalization: Normalization,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            normalization: Normalization::LastItem,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub method: Method,
    pub ratings: RatingVector,
    pub ranks: Vec<RankLabel>,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub items: Vec<String>,
    pub normalization: Normalization,
    pub rows: Vec<CompareRow>,
}

/// Runs one method under `opts`.
pub fn rate(c: &ComparisonMatrix, method: Method, opts: &CompareOptions) -> Result<CompareRow> {
    let spectral = SpectralOptions {
        tol: opts.tol,
        max_iter: opts.max_iter,
        normalization: opts.normalization.clone(),
        history: 0,
    };
    let wrap = |e: Error| Error::Method {
        method: method.name().to_string(),
        source: Box::new(e),
    };
    let (ratings, converged, iterations) = match method {
        Method::BradleyTerry => {
            let fit = fit_bt(
                c,
                &FitOptions {
                    tol: opts.tol,
                    max_iter: opts.max_iter,
                    normalization: opts.normalization.clone(),
                    init: None,
                },
            )
            .map_err(wrap)?;
            (fit.ratings, fit.converged, fit.iterations)
        }
        other => {
            let f = match other {
                Method::PageRank => pagerank_undamped,
                Method::Scroogefactor => scroogefactor,
                Method::FairBets => fair_bets,
                Method::Cesaro => cesaro_rating,
                Method::WeiKendall => wei_kendall,
                Method::BradleyTerry => unreachable!(),
            };
            let r = f(c, &spectral).map_err(wrap)?;
            (r.ratings, r.converged, r.iterations)
        }
    };
    Ok(CompareRow {
        method,
        ranks: ratings.ranks(10.0 * opts.tol),
        ratings,
        converged,
        iterations,
    })
}

/// Rates `c` with every method in `methods`, in the order given, under one
/// normalization.
pub fn compare_estimators(
    c: &ComparisonMatrix,
    methods: &[Method],
    opts: &CompareOptions,
) -> Result<Comparison> {
    let rows = methods
        .iter()
        .map(|&m| rate(c, m, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(Comparison {
        items: c.items().to_vec(),
        normalization: opts.normalization.resolve(c.items()),
        rows,
    })
}
