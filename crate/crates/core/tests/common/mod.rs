#![allow(dead_code)]

pub mod props;

use std::path::PathBuf;

use pcm_core::structures::{cdag_matrix, CdagDocument};
use pcm_core::{parse_pcm, IncompletePcm};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn matrix(name: &str) -> IncompletePcm {
    parse_pcm(&fixture(name)).unwrap()
}

pub fn cdag(name: &str, alpha: f64) -> IncompletePcm {
    let mut doc: CdagDocument = serde_json::from_str(&fixture(name)).unwrap();
    doc.alpha = alpha;
    cdag_matrix(&doc.to_spec().unwrap()).unwrap()
}

/// Answer order under which the published monitoring curves were produced,
/// 0-based upper-triangle pairs.
pub fn figure_order() -> Vec<(usize, usize)> {
    fixture("example7_figure_order.txt")
        .trim()
        .split(',')
        .map(|t| {
            let (i, j) = t.split_once('-').unwrap();
            (
                i.parse::<usize>().unwrap() - 1,
                j.parse::<usize>().unwrap() - 1,
            )
        })
        .collect()
}

/// Published generalized ratio after 6..=15 answers.
pub const FIG_GENERALIZED: [f64; 10] = [
    0.0441941, 0.1811276, 0.1542925, 0.1566479, 0.1303657, 0.1103064, 0.114674, 0.1109822,
    0.1011795, 0.093606,
];

/// Published naive ratio after 6..=15 answers.
pub const FIG_NAIVE: [f64; 10] = [
    0.00569675820656525,
    0.0392998983186549,
    0.048054261008807,
    0.0639635228182546,
    0.0661744251401121,
    0.0669433706965572,
    0.0810705892714171,
    0.0894788678943154,
    0.0913774395516413,
    0.093606,
];

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
