//! Sampling, quadrature and Wigner suites, and the commutator diagnostic.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{resolve_all, Artifact, CheckOutcome, SequenceSpec, SuiteOutput};
use crate::asymptotics::{
    covariance_csv, covariance_table, gff_kernel, kernel_cij, pd_check, theorem2_covariance, RegularFamilyLimit,
};
use crate::error::{invalid, Result};
use crate::rsk::{empirical_covariance, moment_identity_check, sample_batch, to_ndjson, Observable, SamplerConfig};
use crate::uea::{ordered_centered_polynomial, PowerSumFactor, StateEvaluator};
use crate::wigner::{overlap_monotonicity_report, sample_trace_batch, shifted_overlap_sets, WignerConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSuiteConfig {
    pub gamma: f64,
    pub l: u64,
    pub replicas: u64,
    pub seed: u64,
    pub sequences: Vec<SequenceSpec>,
    pub levels: Vec<f64>,
    pub orders: Vec<u32>,
    /// Shapes on which the moment identity is checked exactly.
    pub identity_shapes: usize,
    pub identity_max_k: u32,
}

impl Default for SampleSuiteConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            l: 25,
            replicas: 1000,
            seed: 1,
            sequences: vec![SequenceSpec::Name("identity".into()), SequenceSpec::Name("evens".into())],
            levels: vec![0.5, 1.0],
            orders: vec![1, 2, 3],
            identity_shapes: 100,
            identity_max_k: 3,
        }
    }
}

impl SampleSuiteConfig {
    pub fn sampler(&self) -> Result<SamplerConfig> {
        let c = SamplerConfig {
            gamma: self.gamma,
            l: self.l,
            seed: self.seed,
            replicas: self.replicas,
            sequences: resolve_all(&self.sequences)?,
            levels: self.levels.clone(),
            orders: self.orders.clone(),
        };
        c.validate()?;
        Ok(c)
    }
}

pub fn sample_suite(config: &SampleSuiteConfig) -> Result<SuiteOutput> {
    let sampler = config.sampler()?;
    let samples = sample_batch(&sampler)?;
    let mut checks = Vec::new();

    let (mut cases, mut ok) = (0, 0);
    'outer: for s in &samples {
        for i in 0..sampler.sequences.len() {
            for level in 0..sampler.levels.len() {
                if cases >= config.identity_shapes * (config.identity_max_k as usize + 1) {
                    break 'outer;
                }
                for k in 0..=config.identity_max_k {
                    cases += 1;
                    if moment_identity_check(s, i, level, k, sampler.l)?.holds() {
                        ok += 1;
                    }
                }
            }
        }
    }
    checks.push(CheckOutcome::count("moment_identity_exact", cases, ok));
    let violations: u64 = samples.iter().map(|s| u64::from(s.interlacing_violations)).sum();
    let uncontained: u64 = samples.iter().map(|s| u64::from(s.containment_violations)).sum();
    let mut artifacts = vec![Artifact {
        file_name: "replicas.ndjson".into(),
        contents: to_ndjson(&samples, &sampler.orders),
    }];
    let mut observables = Vec::new();
    for seq in 0..sampler.sequences.len() {
        for level in 0..sampler.levels.len() {
            for &k in &sampler.orders {
                observables.push(Observable { seq, level, k });
            }
        }
    }
    if samples.len() >= crate::rsk::stats::MIN_REPLICAS {
        let est = empirical_covariance(&sampler, &samples, &observables, None)?;
        artifacts.push(Artifact {
            file_name: "sample_covariance.csv".into(),
            contents: est.to_csv(&sampler.levels),
        });
    }
    artifacts.push(Artifact {
        file_name: "sample_summary.json".into(),
        contents: serde_json::to_string_pretty(&serde_json::json!({
            "replicas": samples.len(),
            "interlacing_violations": violations,
            "containment_violations": uncontained,
        }))
        .expect("summary serializes"),
    });
    Ok(SuiteOutput { checks, artifacts })
}

/// A sequence observed through the prefix of length `[yL]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberSpec {
    pub sequence: SequenceSpec,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CovarianceConfig {
    pub gamma: f64,
    pub members: Vec<MemberSpec>,
    pub orders: Vec<u32>,
    pub tol: f64,
    /// `(γ, η)` pairs where the first-order variance must equal `γη`.
    pub anchor_cases: Vec<(f64, f64)>,
    pub anchor_tol: f64,
    pub kernel_grid: usize,
    pub kernel_tol: f64,
    /// Gram matrices must satisfy `λ_min ≥ −pd_rel · ‖G‖`.
    pub pd_rel: f64,
}

impl Default for CovarianceConfig {
    fn default() -> Self {
        let member = |name: &str| MemberSpec {
            sequence: SequenceSpec::Name(name.into()),
            y: 1.0,
        };
        Self {
            gamma: 1.0,
            members: ["identity", "evens", "odds", "block_swap"].map(member).to_vec(),
            orders: vec![1, 2],
            tol: 1e-10,
            anchor_cases: vec![(1.0, 1.0), (2.0, 0.5), (1.0, 2.0)],
            anchor_tol: 1e-6,
            kernel_grid: 50,
            kernel_tol: 1e-12,
            pd_rel: 1e-9,
        }
    }
}

impl CovarianceConfig {
    pub fn limit(&self) -> Result<RegularFamilyLimit> {
        let members = self
            .members
            .iter()
            .map(|m| Ok((m.sequence.resolve()?, m.y)))
            .collect::<Result<Vec<_>>>()?;
        RegularFamilyLimit::from_sequences(self.gamma, &members)
    }
}

/// Largest gap between the correlated kernel at `α = R²` and the GFF
/// kernel on an `n × n` grid of angles off the diagonal.
pub(crate) fn kernel_reduction_gap(n: usize, r: f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let t = PI * (i as f64 + 0.5) / n as f64;
            let f = PI * (j as f64 + 0.5) / n as f64;
            let (z, w) = (Complex64::from_polar(r, t), Complex64::from_polar(r, f));
            worst = worst.max((kernel_cij(r * r, z, w) - gff_kernel(z, w)).abs());
        }
    }
    worst
}

pub fn covariance_suite(config: &CovarianceConfig) -> Result<SuiteOutput> {
    let mut checks = Vec::new();
    for &(g, e) in &config.anchor_cases {
        let single = RegularFamilyLimit::new(g, vec![e], nalgebra::DMatrix::from_element(1, 1, e))?;
        let v = theorem2_covariance(1, 1, &single, 0, 0, config.anchor_tol / 10.0)?;
        checks.push(CheckOutcome::within(
            format!("first_order_variance gamma={g} eta={e}"),
            g * e,
            v.value,
            config.anchor_tol,
        ));
    }
    for r in [0.5, 1.0, 2.0] {
        checks.push(CheckOutcome::within(
            format!("kernel_reduces_to_gff R={r}"),
            0.0,
            kernel_reduction_gap(config.kernel_grid, r),
            config.kernel_tol,
        ));
    }
    let limit = config.limit()?;
    let probes: Vec<(usize, u32)> = (0..limit.len())
        .flat_map(|r| config.orders.iter().map(move |&k| (r, k)))
        .collect();
    let pd = pd_check(&limit, &probes, config.tol)?;
    checks.push(CheckOutcome::at_least("gram_min_eigenvalue", 0.0, pd.min_eigenvalue, config.pd_rel * pd.norm));
    let rows = covariance_table(&limit, &config.orders, config.tol)?;
    Ok(SuiteOutput {
        checks,
        artifacts: vec![Artifact {
            file_name: "covariance.csv".into(),
            contents: covariance_csv(&rows),
        }],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerSuiteConfig {
    /// `|B|` for every set; the matrix has size `2|B|`.
    pub set_size: usize,
    /// Overlaps `|B ∩ B'| / |B|`.
    pub fractions: Vec<f64>,
    pub replicas: u64,
    pub seed: u64,
    /// Standard-error multiplier for the Monte Carlo gates.
    pub z: f64,
}

impl Default for WignerSuiteConfig {
    fn default() -> Self {
        Self {
            set_size: 200,
            fractions: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            replicas: 2000,
            seed: 1,
            z: 4.0,
        }
    }
}

pub fn wigner_suite(config: &WignerSuiteConfig) -> Result<SuiteOutput> {
    let wc = WignerConfig {
        size: 2 * config.set_size,
        index_sets: shifted_overlap_sets(config.set_size, &config.fractions)?,
        seed: config.seed,
        replicas: config.replicas,
        moment_orders: vec![2],
    };
    let samples = sample_trace_batch(&wc)?;
    let report = overlap_monotonicity_report(&wc, &samples, config.z)?;
    let mut checks = Vec::new();
    for row in &report.rows {
        let exact = row.exact.unwrap_or(f64::NAN);
        checks.push(CheckOutcome::within(
            format!("wigner_k2_covariance overlap={}", row.overlap),
            exact,
            row.cov,
            config.z * row.stderr,
        ));
    }
    checks.push(CheckOutcome::count("wigner_covariance_monotone_in_overlap", 1, usize::from(report.monotone)));
    checks.push(CheckOutcome::count("wigner_zero_at_disjoint", 1, usize::from(report.zero_at_disjoint)));
    Ok(SuiteOutput {
        checks,
        artifacts: vec![Artifact {
            file_name: "wigner_covariance.csv".into(),
            contents: report.to_csv(),
        }],
    })
}

/// Commutator and four-point ordering defects at one `L`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutatorRow {
    pub l: u64,
    /// `|⟨XY⟩ − ⟨YX⟩|`.
    pub defect: f64,
    /// `⟨XYXY⟩ − ⟨XXYY⟩`.
    pub four_point_defect: f64,
}

/// `X = L^{−k}(P_{k,I} − ⟨P_{k,I}⟩)`, `Y` likewise on `J`, under the state
/// at `t = γL`.
pub fn commutativity_restoration(
    i: &[u32],
    j: &[u32],
    k: u32,
    ls: &[u64],
    gamma: &BigRational,
) -> Result<Vec<CommutatorRow>> {
    if !gamma.is_positive() {
        return invalid("gamma must be positive");
    }
    let ev = StateEvaluator::default();
    let x = PowerSumFactor::new(k, i.to_vec());
    let y = PowerSumFactor::new(k, j.to_vec());
    let xy = ordered_centered_polynomial(&[x.clone(), y.clone()], &ev)?;
    let yx = ordered_centered_polynomial(&[y.clone(), x.clone()], &ev)?;
    let xyxy = ordered_centered_polynomial(&[x.clone(), y.clone(), x.clone(), y.clone()], &ev)?;
    let xxyy = ordered_centered_polynomial(&[x.clone(), x, y.clone(), y], &ev)?;
    ls.iter()
        .map(|&l| {
            let d = xy.exact_at(l, gamma)? - yx.exact_at(l, gamma)?;
            let f = xyxy.exact_at(l, gamma)? - xxyy.exact_at(l, gamma)?;
            Ok(CommutatorRow {
                l,
                defect: d.abs().to_f64().unwrap_or(f64::NAN),
                four_point_defect: f.to_f64().unwrap_or(f64::NAN),
            })
        })
        .collect()
}
