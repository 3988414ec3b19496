//! Sampler estimates against quadrature over a ladder of `L`: covariances of
//! the scaled centered power sums and their third and fourth joint moments.
//! At one small `L` the sampler is also compared with exact state values.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{resolve_all, Artifact, CheckOutcome, SequenceSpec, SuiteOutput};
use crate::asymptotics::{gaussian_joint_prediction, theorem2_covariance, CovarianceResult, RegularFamilyLimit};
use crate::error::{invalid, Error, Result};
use crate::rsk::{sample_batch, Estimate, MomentEstimator, Observable, ObservationTable, SamplerConfig};
use crate::uea::{ordered_centered_polynomial, PowerSumFactor, StateEvaluator};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyScenario {
    pub gamma: f64,
    pub sequences: Vec<SequenceSpec>,
    /// Prefix level `y`; every sequence is observed on `A_{[yL]}`.
    pub level: f64,
    pub orders: Vec<u32>,
    pub ls: Vec<u64>,
    pub replicas: u64,
    pub seed: u64,
    /// Standard-error multiplier for Monte Carlo gates.
    pub z: f64,
    /// Relative slack accepted for covariances at the largest `L`.
    pub rel_tol: f64,
    pub quad_tol: f64,
    /// Check third and fourth joint moments against the Gaussian limit.
    pub wick: bool,
    /// Small `L` at which covariances are also compared with exact state
    /// values; prefixes must have at most four letters.
    pub exact_l: Option<u64>,
    pub exact_replicas: u64,
}

impl Default for VerifyScenario {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            sequences: vec![SequenceSpec::Name("identity".into()), SequenceSpec::Name("evens".into())],
            level: 1.0,
            orders: vec![1, 2],
            ls: vec![25, 50, 100],
            replicas: 20_000,
            seed: 1,
            z: 4.0,
            rel_tol: 0.1,
            quad_tol: 1e-9,
            wick: true,
            exact_l: Some(4),
            exact_replicas: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovarianceComparison {
    pub a: Observable,
    pub b: Observable,
    pub mc: Estimate,
    pub quadrature: CovarianceResult,
    pub discrepancy: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WickComparison {
    pub indices: Vec<usize>,
    pub mc: Estimate,
    pub prediction: f64,
    pub pass: bool,
}

/// Sampler covariance against the exact state value at a small `L`. Only
/// nested index sets are gated: for those the two agree at every `L`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactStateComparison {
    pub a: Observable,
    pub b: Observable,
    pub nested: bool,
    pub exact: f64,
    pub mc: Estimate,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyLevel {
    pub l: u64,
    pub covariances: Vec<CovarianceComparison>,
    pub wick: Vec<WickComparison>,
    /// Largest `|MC − quadrature|` over the covariance entries.
    pub max_discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub observables: Vec<Observable>,
    pub levels: Vec<VerifyLevel>,
    pub exact_l: Option<u64>,
    pub exact: Vec<ExactStateComparison>,
    /// The largest `L` has no larger discrepancy than the smallest.
    pub converging: bool,
}

/// All multisets of size `m` from `0..d`, in lexicographic order.
fn multisets(d: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, m: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(d, m, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, m, 0, &mut Vec::new(), &mut out);
    out
}

impl VerifyScenario {
    fn observables(&self) -> Vec<Observable> {
        (0..self.sequences.len())
            .flat_map(|seq| self.orders.iter().map(move |&k| Observable { seq, level: 0, k }))
            .collect()
    }

    fn limit(&self) -> Result<RegularFamilyLimit> {
        let members: Vec<_> = resolve_all(&self.sequences)?.into_iter().map(|s| (s, self.level)).collect();
        RegularFamilyLimit::from_sequences(self.gamma, &members)
    }

    /// Limiting covariance of the observables with quadrature errors.
    pub fn quadrature(&self) -> Result<Vec<Vec<CovarianceResult>>> {
        let limit = self.limit()?;
        let obs = self.observables();
        obs.iter()
            .map(|a| {
                obs.iter()
                    .map(|b| theorem2_covariance(a.k, b.k, &limit, a.seq, b.seq, self.quad_tol))
                    .collect()
            })
            .collect()
    }

    fn sampler(&self, l: u64, replicas: u64) -> Result<SamplerConfig> {
        Ok(SamplerConfig {
            gamma: self.gamma,
            l,
            seed: self.seed,
            replicas,
            sequences: resolve_all(&self.sequences)?,
            levels: vec![self.level],
            orders: self.orders.clone(),
        })
    }

    fn exact_comparisons(&self, l: u64) -> Result<Vec<ExactStateComparison>> {
        let sampler = self.sampler(l, self.exact_replicas)?;
        let m = sampler.level_size(self.level);
        let sets = sampler
            .sequences
            .iter()
            .map(|s| Ok(s.prefix(m, l)?.into_iter().map(|v| v as u32).collect()))
            .collect::<Result<Vec<Vec<u32>>>>()?;
        let gamma = BigRational::from_float(self.gamma)
            .ok_or_else(|| Error::InvalidArgument(format!("gamma {} is not finite", self.gamma)))?;
        let obs = self.observables();
        let samples = sample_batch(&sampler)?;
        let table = ObservationTable::build(&sampler, &samples, &obs)?;
        let est = MomentEstimator::new(&table, None)?;
        let ev = StateEvaluator::default();
        let mut out = Vec::new();
        for a in 0..obs.len() {
            for b in a..obs.len() {
                let (sa, sb) = (&sets[obs[a].seq], &sets[obs[b].seq]);
                let nested = sa.iter().all(|v| sb.contains(v)) || sb.iter().all(|v| sa.contains(v));
                let factors = [
                    PowerSumFactor::new(obs[a].k, sa.clone()),
                    PowerSumFactor::new(obs[b].k, sb.clone()),
                ];
                let exact = ordered_centered_polynomial(&factors, &ev)?
                    .exact_at(l, &gamma)?
                    .to_f64()
                    .unwrap_or(f64::NAN);
                let mc = est.joint_moment(&[a, b])?;
                out.push(ExactStateComparison {
                    a: obs[a],
                    b: obs[b],
                    nested,
                    exact,
                    pass: (mc.value - exact).abs() <= self.z * mc.stderr,
                    mc,
                });
            }
        }
        Ok(out)
    }

    pub fn run(&self) -> Result<VerifyReport> {
        if self.ls.is_empty() {
            return invalid("verify needs at least one L");
        }
        let obs = self.observables();
        let quad = self.quadrature()?;
        let d = obs.len();
        let cov = DMatrix::from_fn(d, d, |a, b| quad[a][b].value);
        let mut levels = Vec::new();
        for &l in &self.ls {
            let sampler = self.sampler(l, self.replicas)?;
            let samples = sample_batch(&sampler)?;
            let table = ObservationTable::build(&sampler, &samples, &obs)?;
            let est = MomentEstimator::new(&table, None)?;
            let mut covariances = Vec::new();
            for a in 0..d {
                for b in a..d {
                    let mc = est.joint_moment(&[a, b])?;
                    let q = quad[a][b];
                    let discrepancy = (mc.value - q.value).abs();
                    covariances.push(CovarianceComparison {
                        a: obs[a],
                        b: obs[b],
                        mc,
                        quadrature: q,
                        discrepancy,
                        pass: discrepancy <= (self.z * mc.stderr).max(self.rel_tol * q.value.abs()),
                    });
                }
            }
            let mut wick = Vec::new();
            if self.wick {
                for m in [3, 4] {
                    for idx in multisets(d, m) {
                        let mc = est.joint_moment(&idx)?;
                        let prediction = gaussian_joint_prediction(&cov, &idx)?;
                        wick.push(WickComparison {
                            pass: (mc.value - prediction).abs() <= self.z * mc.stderr,
                            indices: idx,
                            mc,
                            prediction,
                        });
                    }
                }
            }
            let max_discrepancy = covariances.iter().map(|c| c.discrepancy).fold(0.0, f64::max);
            levels.push(VerifyLevel {
                l,
                covariances,
                wick,
                max_discrepancy,
            });
        }
        let first = levels.iter().min_by_key(|v| v.l).expect("nonempty");
        let last = levels.iter().max_by_key(|v| v.l).expect("nonempty");
        let converging = last.max_discrepancy <= first.max_discrepancy;
        let exact = match self.exact_l {
            Some(l) => self.exact_comparisons(l)?,
            None => Vec::new(),
        };
        Ok(VerifyReport {
            observables: obs,
            levels,
            exact_l: self.exact_l,
            exact,
            converging,
        })
    }
}

impl VerifyReport {
    pub fn largest(&self) -> &VerifyLevel {
        self.levels.iter().max_by_key(|v| v.l).expect("nonempty")
    }

    /// Gates: covariances and Gaussian moments at the largest `L`, and the
    /// convergence direction across the ladder.
    pub fn checks(&self, scenario: &VerifyScenario) -> Vec<CheckOutcome> {
        let top = self.largest();
        let label = |o: &Observable| format!("seq{}:k{}", o.seq, o.k);
        let mut out = Vec::new();
        for c in &top.covariances {
            let tol = (scenario.z * c.mc.stderr).max(scenario.rel_tol * c.quadrature.value.abs());
            out.push(CheckOutcome::within(
                format!("covariance L={} {} {}", top.l, label(&c.a), label(&c.b)),
                c.quadrature.value,
                c.mc.value,
                tol,
            ));
        }
        for w in &top.wick {
            let names: Vec<String> = w.indices.iter().map(|&i| label(&self.observables[i])).collect();
            out.push(CheckOutcome::within(
                format!("joint_moment L={} {}", top.l, names.join(" ")),
                w.prediction,
                w.mc.value,
                scenario.z * w.mc.stderr,
            ));
        }
        if let Some(l) = self.exact_l {
            for e in self.exact.iter().filter(|e| e.nested) {
                out.push(CheckOutcome::within(
                    format!("exact_state L={l} {} {}", label(&e.a), label(&e.b)),
                    e.exact,
                    e.mc.value,
                    scenario.z * e.mc.stderr,
                ));
            }
        }
        if self.levels.len() > 1 {
            let first = self.levels.iter().min_by_key(|v| v.l).expect("nonempty");
            out.push(CheckOutcome::at_most(
                format!("discrepancy L={} not above L={}", top.l, first.l),
                first.max_discrepancy,
                top.max_discrepancy,
                0.0,
            ));
        }
        out
    }

    /// One row per `L`: worst covariance discrepancy and pass counts.
    pub fn convergence_csv(&self) -> String {
        let mut out = String::from("l,max_abs_diff,covariances_passed,covariances,moments_passed,moments\n");
        for v in &self.levels {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                v.l,
                v.max_discrepancy,
                v.covariances.iter().filter(|c| c.pass).count(),
                v.covariances.len(),
                v.wick.iter().filter(|w| w.pass).count(),
                v.wick.len()
            ));
        }
        out
    }

    pub fn covariance_csv(&self) -> String {
        let mut out = String::from("l,i,k,j,k2,mc,stderr,quadrature,quad_error,abs_diff,pass\n");
        for v in &self.levels {
            for c in &v.covariances {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    v.l,
                    c.a.seq,
                    c.a.k,
                    c.b.seq,
                    c.b.k,
                    c.mc.value,
                    c.mc.stderr,
                    c.quadrature.value,
                    c.quadrature.abs_error_estimate,
                    c.discrepancy,
                    c.pass
                ));
            }
        }
        out
    }

    /// Exact state values at the small `L`; `gated` is false for pairs of
    /// non-nested index sets, which are reported only.
    pub fn exact_csv(&self) -> String {
        let mut out = String::from("l,i,k,j,k2,nested,exact,mc,stderr,z_score,gated,pass\n");
        let l = self.exact_l.unwrap_or(0);
        for e in &self.exact {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                l,
                e.a.seq,
                e.a.k,
                e.b.seq,
                e.b.k,
                e.nested,
                e.exact,
                e.mc.value,
                e.mc.stderr,
                (e.mc.value - e.exact) / e.mc.stderr,
                e.nested,
                e.pass
            ));
        }
        out
    }

    pub fn wick_csv(&self) -> String {
        let mut out = String::from("l,indices,mc,stderr,prediction,pass\n");
        for v in &self.levels {
            for w in &v.wick {
                let idx: Vec<String> = w.indices.iter().map(|i| i.to_string()).collect();
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    v.l,
                    idx.join(" "),
                    w.mc.value,
                    w.mc.stderr,
                    w.prediction,
                    w.pass
                ));
            }
        }
        out
    }
}

pub fn verify_suite(scenario: &VerifyScenario) -> Result<(SuiteOutput, VerifyReport)> {
    let report = scenario.run()?;
    let out = SuiteOutput {
        checks: report.checks(scenario),
        artifacts: vec![
            Artifact {
                file_name: "verify_convergence.csv".into(),
                contents: report.convergence_csv(),
            },
            Artifact {
                file_name: "verify_covariance.csv".into(),
                contents: report.covariance_csv(),
            },
            Artifact {
                file_name: "verify_moments.csv".into(),
                contents: report.wick_csv(),
            },
            Artifact {
                file_name: "verify_exact_state.csv".into(),
                contents: report.exact_csv(),
            },
        ],
    };
    Ok((out, report))
}
