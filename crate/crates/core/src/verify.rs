//! Numerical property suite for the Sign-Magnetic Laplacian and the
//! sign-flip demonstration for the Magnetic Laplacian.

use std::fmt;

use rand::Rng as _;

use crate::graph::{adjacency, DirectedGraph, Edge};
use crate::laplacian::{
    magnetic_h, magnetic_laplacian, sign_magnetic_h, sign_magnetic_laplacian, verify_hermitian_psd,
};
use crate::linalg::{
    inf_norm_diff, is_exactly_hermitian, max_hermitian_asymmetry, Complex64, ComplexMatrix,
    RealMatrix,
};
use crate::rng::{self, derive_seed, Rng};
use crate::Result;

pub const PSD_TOL: f64 = 1e-8;
pub const LAMBDA_MAX_TOL: f64 = 1e-8;
pub const EQUIVALENCE_TOL: f64 = 1e-12;
pub const HOMOGENEITY_TOL: f64 = 1e-10;
pub const HOMOGENEITY_SCALES: [f64; 3] = [0.5, 3.0, 10.0];
pub const DEMO_SCALES: [f64; 4] = [0.8, 2.0, 5.0, 36.0];

/// Shape of the random graphs the suite draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomGraphSpec {
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub edge_prob: f64,
    /// Weights are uniform in `[-max_weight, max_weight]` minus zero.
    pub max_weight: f64,
}

impl Default for RandomGraphSpec {
    fn default() -> Self {
        Self {
            min_nodes: 2,
            max_nodes: 30,
            edge_prob: 0.3,
            max_weight: 10.0,
        }
    }
}

fn nonzero_weight(r: &mut Rng, max: f64) -> f64 {
    loop {
        let w = r.gen_range(-max..=max);
        if w != 0.0 {
            return w;
        }
    }
}

/// Each ordered pair `u != v` is an edge with probability `edge_prob`. With
/// `digon_free`, a pair already linked in the other direction is skipped.
pub fn random_signed_digraph(spec: &RandomGraphSpec, seed: u64, digon_free: bool) -> DirectedGraph {
    let mut r = rng::rng(seed);
    let n = r.gen_range(spec.min_nodes..=spec.max_nodes);
    let mut linked = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u == v || !r.gen_bool(spec.edge_prob) || (digon_free && linked[v][u]) {
                continue;
            }
            linked[u][v] = true;
            edges.push(Edge::new(u, v, nonzero_weight(&mut r, spec.max_weight)));
        }
    }
    DirectedGraph::new(n, edges).expect("generated edges are valid")
}

/// Same support distribution with every weight set to 1.
pub fn random_binary_digraph(spec: &RandomGraphSpec, seed: u64) -> DirectedGraph {
    let g = random_signed_digraph(spec, seed, false);
    let edges = g
        .edges()
        .iter()
        .map(|e| Edge::new(e.src, e.dst, 1.0))
        .collect();
    g.with_edges(edges).expect("same support")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub tolerance: f64,
    /// Largest violation-direction residual seen (0 is best).
    pub worst: f64,
    pub cases: usize,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            worst: 0.0,
            cases: 0,
            passed: true,
        }
    }

    fn record(&mut self, residual: f64) {
        self.cases += 1;
        if residual > self.worst || residual.is_nan() {
            self.worst = residual;
        }
        if !(residual <= self.tolerance) {
            self.passed = false;
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<44} tol {:>8.1e}  worst {:>10.3e}  cases {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.tolerance,
            self.worst,
            self.cases
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

pub const CHECK_HERMITIAN: &str = "hermitian (bit-exact)";
pub const CHECK_PSD: &str = "psd: -lambda_min(L)";
pub const CHECK_PSD_NORM: &str = "psd: -lambda_min(L_norm)";
pub const CHECK_LAMBDA_MAX: &str = "lambda_max(L_norm) - 2";
pub const CHECK_EQUIVALENCE: &str = "binary graphs: |L_sigma - L_q(0.25)|_inf";
pub const CHECK_HOMOGENEITY: &str = "homogeneity: |L(aA) - a L(A)|_inf";
pub const CHECK_REVERSAL: &str = "reversal + negation: |L - L'|_inf";

fn reverse_and_negate(g: &DirectedGraph, idx: usize) -> DirectedGraph {
    let mut edges = g.edges().to_vec();
    let e = edges[idx];
    edges[idx] = Edge::new(e.dst, e.src, -e.weight);
    g.with_edges(edges)
        .expect("digon-free reversal stays valid")
}

/// Runs every property over `graphs` random graphs derived from `seed`.
pub fn run_theorem_suite(spec: &RandomGraphSpec, graphs: usize, seed: u64) -> Result<SuiteReport> {
    let mut hermitian = CheckResult::new(CHECK_HERMITIAN, 0.0);
    let mut psd = CheckResult::new(CHECK_PSD, PSD_TOL);
    let mut psd_norm = CheckResult::new(CHECK_PSD_NORM, PSD_TOL);
    let mut lmax = CheckResult::new(CHECK_LAMBDA_MAX, LAMBDA_MAX_TOL);
    let mut equivalence = CheckResult::new(CHECK_EQUIVALENCE, EQUIVALENCE_TOL);
    let mut homogeneity = CheckResult::new(CHECK_HOMOGENEITY, HOMOGENEITY_TOL);
    let mut reversal = CheckResult::new(CHECK_REVERSAL, 0.0);

    for i in 0..graphs as u64 {
        let g = random_signed_digraph(spec, derive_seed(seed, 3 * i), false);
        let a = adjacency(&g);
        let l = sign_magnetic_laplacian(&a, false)?;
        let l_norm = sign_magnetic_laplacian(&a, true)?;
        for m in [&l, &l_norm] {
            hermitian.record(if is_exactly_hermitian(m) {
                0.0
            } else {
                max_hermitian_asymmetry(m).max(f64::MIN_POSITIVE)
            });
        }
        psd.record((-verify_hermitian_psd(&l, 0.0)?.min_eigenvalue).max(0.0));
        let norm_report = verify_hermitian_psd(&l_norm, 0.0)?;
        psd_norm.record((-norm_report.min_eigenvalue).max(0.0));
        lmax.record((norm_report.max_eigenvalue - 2.0).max(0.0));
        for alpha in HOMOGENEITY_SCALES {
            let scaled = sign_magnetic_laplacian(&(&a * alpha), false)?;
            homogeneity.record(inf_norm_diff(&scaled, &(&l * Complex64::new(alpha, 0.0))));
        }

        let b = adjacency(&random_binary_digraph(spec, derive_seed(seed, 3 * i + 1)));
        let diff = inf_norm_diff(
            &sign_magnetic_laplacian(&b, false)?,
            &magnetic_laplacian(&b, 0.25, false)?,
        );
        equivalence.record(diff);

        let mut r = rng::rng(derive_seed(seed, 3 * i + 2));
        let g = random_signed_digraph(spec, r.gen(), true);
        if g.num_edges() > 0 {
            let flipped = reverse_and_negate(&g, r.gen_range(0..g.num_edges()));
            let before = sign_magnetic_laplacian(&adjacency(&g), false)?;
            let after = sign_magnetic_laplacian(&adjacency(&flipped), false)?;
            reversal.record(inf_norm_diff(&before, &after));
        }
    }
    Ok(SuiteReport {
        checks: vec![
            hermitian,
            psd,
            psd_norm,
            lmax,
            equivalence,
            homogeneity,
            reversal,
        ],
    })
}

/// Entry (0, 1) of `H^(0.25)` and `H^σ` for the single edge `0 → 1` of
/// weight `scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignFlipRow {
    pub scale: f64,
    pub magnetic: Complex64,
    pub sign_magnetic: Complex64,
}

pub fn sign_flip_demo(scales: &[f64]) -> Result<Vec<SignFlipRow>> {
    scales
        .iter()
        .map(|&scale| {
            let a = RealMatrix::from_row_slice(2, 2, &[0.0, scale, 0.0, 0.0]);
            Ok(SignFlipRow {
                scale,
                magnetic: magnetic_h(&a, 0.25)?[(0, 1)],
                sign_magnetic: sign_magnetic_h(&a)?[(0, 1)],
            })
        })
        .collect()
}

/// Hermiticity and PSD checks on an arbitrary matrix, e.g. a dump file.
pub fn check_matrix(m: &ComplexMatrix, psd_tol: f64) -> Result<Vec<CheckResult>> {
    let report = verify_hermitian_psd(m, 0.0)?;
    let mut hermitian = CheckResult::new(CHECK_HERMITIAN, 0.0);
    hermitian.record(if is_exactly_hermitian(m) {
        0.0
    } else {
        report.max_asymmetry.max(f64::MIN_POSITIVE)
    });
    let mut psd = CheckResult::new(CHECK_PSD, psd_tol);
    psd.record((-report.min_eigenvalue).max(0.0));
    Ok(vec![hermitian, psd])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_small_sample() {
        let report = run_theorem_suite(&RandomGraphSpec::default(), 20, 9).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.checks.iter().all(|c| c.cases >= 19));
    }

    #[test]
    fn digon_free_graphs_have_no_digons() {
        for s in 0..20 {
            assert!(!random_signed_digraph(&RandomGraphSpec::default(), s, true).has_digon());
        }
    }

    #[test]
    fn demo_rows() {
        let rows = sign_flip_demo(&DEMO_SCALES).unwrap();
        let expect = [
            (0.4 * 0.309, 0.4 * 0.951),
            (-1.0, 0.0),
            (0.0, 2.5),
            (18.0, 0.0),
        ];
        for (row, (re, im)) in rows.iter().zip(expect) {
            assert!((row.magnetic.re - re).abs() < 1e-2 && (row.magnetic.im - im).abs() < 1e-2);
            assert_eq!(row.sign_magnetic, Complex64::new(0.0, row.scale / 2.0));
        }
    }

    #[test]
    fn corrupted_matrix_fails_hermitian_check() {
        let a = RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let mut l = sign_magnetic_laplacian(&a, true).unwrap();
        assert!(check_matrix(&l, PSD_TOL).unwrap().iter().all(|c| c.passed));
        l[(0, 1)] += Complex64::new(1e-9, 0.0);
        let checks = check_matrix(&l, PSD_TOL).unwrap();
        assert!(!checks[0].passed);
        assert_eq!(checks[0].name, CHECK_HERMITIAN);
    }
}
