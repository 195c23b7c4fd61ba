//! Catalog of built-in observation families.

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub parameters: &'static str,
    /// Picture the family reproduces.
    pub anchor: &'static str,
    pub notes: &'static str,
}

/// Layout of the raw grid files accepted by `field.family = grid`.
pub const GRID_FORMAT: &str = "one ASCII header line `obslab-grid dim=<1|2> period=<P> n=<N> origin=<x0>` \
followed by N^dim little-endian f64 samples in row-major order; flat index i N + j holds the sample \
at (x0 + i P/N, x0 + j P/N)";

pub fn families() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "constant",
            parameters: "value in [0,1]; dim; period (integer); n",
            anchor: "trivial observation a = const",
            notes: "observes every direction; all constants are explicit",
        },
        CatalogEntry {
            name: "periodic-square",
            parameters: "delta in (0,1); dim; period (integer); n",
            anchor: "periodic comb of squares [0,delta]^2 + Z^2, which satisfies the GCC along the horizontal lines through the squares",
            notes: "lines in rational directions can miss every square; those directions are covered by comb certificates",
        },
        CatalogEntry {
            name: "product",
            parameters: "e, f: interval lists [[lo,hi],...] inside one unit cell; period (integer); n",
            anchor: "product of two periodic one-dimensional sets E x F",
            notes: "comb certificates along the diagonal segments",
        },
        CatalogEntry {
            name: "e-beta",
            parameters: "beta in [0,1]; period is the truncation box side; n",
            anchor: "the set E_beta for beta = 1/2, avoiding both axes with power-law cusps",
            notes: "line averages along the axes vanish while rectangles keep positive density",
        },
        CatalogEntry {
            name: "half-strip-comb",
            parameters: "period is the truncation box side; n",
            anchor: "half-strip comb: left halves of vertical strips above the axis, right halves below",
            notes: "vertical profile vanishes identically, so comb certification fails",
        },
        CatalogEntry {
            name: "custom-grid",
            parameters: "grid_file",
            anchor: "user supplied samples",
            notes: GRID_FORMAT,
        },
    ]
}
