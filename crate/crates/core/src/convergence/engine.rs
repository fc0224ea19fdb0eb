use serde::{Deserialize, Serialize};

use crate::ideals::{decide_membership, Ideal, IdealVerdict, IndexSet, Membership, VerdictMode};
use crate::linalg::{dist_point_subspace, gap, n_norm, project, projection_norm_sq, RealVector, Subspace};

use super::sequence::{CertificateRule, ScalarSequence, SubspaceSequence};
use super::{combine, validate_eps_grid, ConvergenceError, Criterion, Verdict};

/// Everything the criteria need at one index n.
#[derive(Clone, Debug, PartialEq)]
pub struct PointwiseRecord {
    pub n: u64,
    /// gap(U_n, V).
    pub gap: f64,
    /// ‖u_i − P_V(u_i)‖ per basis vector.
    pub residual: Vec<f64>,
    /// Σ_j |⟨u_i, v_j⟩|² per basis vector.
    pub coefficient_mass: Vec<f64>,
    /// ‖P_V(u_i)‖ per basis vector.
    pub projection_norm: Vec<f64>,
    /// ‖u_i, v_1, …, v_k‖ per basis vector.
    pub volume: Vec<f64>,
    /// ‖u_i, P_V(u_i)‖ per basis vector.
    pub pair_volume: Vec<f64>,
}

impl PointwiseRecord {
    pub fn compute(n: u64, u: &Subspace, v: &Subspace) -> Result<Self, ConvergenceError> {
        let gap = gap(u, v)?;
        let k = u.dim();
        let mut rec = Self {
            n,
            gap,
            residual: Vec::with_capacity(k),
            coefficient_mass: Vec::with_capacity(k),
            projection_norm: Vec::with_capacity(k),
            volume: Vec::with_capacity(k),
            pair_volume: Vec::with_capacity(k),
        };
        for ui in u.basis() {
            let p = project(ui, v)?;
            rec.residual.push(dist_point_subspace(ui, v)?);
            rec.coefficient_mass.push(projection_norm_sq(ui, v)?);
            rec.projection_norm.push(p.norm());
            let mut with_limit: Vec<RealVector> = Vec::with_capacity(k + 1);
            with_limit.push(ui.clone());
            with_limit.extend(v.basis().iter().cloned());
            rec.volume.push(n_norm(&with_limit)?);
            rec.pair_volume.push(n_norm(&[ui.clone(), p])?);
        }
        Ok(rec)
    }

    /// Distance of each component from the criterion's limit value.
    pub fn deviations(&self, criterion: Criterion) -> Vec<f64> {
        match criterion {
            Criterion::Gap => vec![self.gap],
            Criterion::Residual => self.residual.clone(),
            Criterion::CoefficientMass => self.coefficient_mass.iter().map(|m| (m - 1.0).abs()).collect(),
            Criterion::ProjectionNorm => self.projection_norm.iter().map(|p| (p - 1.0).abs()).collect(),
            Criterion::Volume => self.volume.clone(),
            Criterion::PairVolume => self.pair_volume.clone(),
        }
    }
}

/// Upper bound on worker threads, from `SUBSPACE_LIMITS_THREADS` when set.
pub fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    std::env::var("SUBSPACE_LIMITS_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .map_or(available, |cap| cap.min(available))
}

/// Applies `f` to 1..=horizon, possibly on several threads, returning the
/// results in index order. On failure the error for the smallest n wins.
fn map_indices<T, F>(horizon: u64, f: F) -> Result<Vec<T>, ConvergenceError>
where
    T: Send,
    F: Fn(u64) -> Result<T, ConvergenceError> + Sync,
{
    const MIN_CHUNK: u64 = 512;
    let workers = (worker_count() as u64).min(horizon.div_ceil(MIN_CHUNK)).max(1);
    if workers == 1 {
        return (1..=horizon).map(f).collect();
    }
    let chunk = horizon.div_ceil(workers);
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = w * chunk + 1;
                let hi = ((w + 1) * chunk).min(horizon);
                scope.spawn(move || (lo..=hi).map(f).collect::<Result<Vec<T>, _>>())
            })
            .collect();
        let mut out = Vec::with_capacity(horizon as usize);
        for h in handles {
            out.extend(h.join().expect("evaluation worker panicked")?);
        }
        Ok(out)
    })
}

fn check_limit(seq: &SubspaceSequence, limit: &Subspace, horizon: u64) -> Result<(), ConvergenceError> {
    if horizon == 0 {
        return Err(ConvergenceError::ZeroHorizon);
    }
    if seq.ambient_dim() != limit.ambient_dim() || seq.dim() != limit.dim() {
        return Err(ConvergenceError::LimitShape {
            sequence: (seq.ambient_dim(), seq.dim()),
            limit: (limit.ambient_dim(), limit.dim()),
        });
    }
    Ok(())
}

/// (n, gap(U_n, V)) for n = 1..=horizon.
pub fn gap_trace(seq: &SubspaceSequence, limit: &Subspace, horizon: u64) -> Result<Vec<(u64, f64)>, ConvergenceError> {
    check_limit(seq, limit, horizon)?;
    map_indices(horizon, |n| {
        let u = seq.subspace(n)?;
        Ok((n, gap(&u, limit)?))
    })
}

/// The indices whose value is at least ε, over the trace's horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSetTrace {
    pub epsilon: f64,
    pub set: IndexSet,
    pub values: Vec<f64>,
}

/// {n : value(n) ≥ ε}. The horizon is the largest index in the trace.
pub fn exceptional_set(trace: &[(u64, f64)], epsilon: f64) -> Result<ExceptionalSetTrace, ConvergenceError> {
    validate_eps_grid(&[epsilon])?;
    let horizon = trace
        .iter()
        .map(|&(n, _)| n)
        .max()
        .ok_or(ConvergenceError::ZeroHorizon)?;
    let members = trace.iter().filter(|&&(_, x)| x >= epsilon).map(|&(n, _)| n).collect();
    Ok(ExceptionalSetTrace {
        epsilon,
        set: IndexSet::new(horizon, members)?,
        values: trace.iter().map(|&(_, x)| x).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonVerdict {
    pub epsilon: f64,
    pub verdict: IdealVerdict,
}

/// Verdicts of one scalar I-limit question across the ε grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitVerdict {
    pub per_epsilon: Vec<EpsilonVerdict>,
    pub overall: Verdict,
}

/// Judges I-lim deviations = 0, where `deviations[n − 1]` is |x_n − x|.
fn limit_from_deviations(
    deviations: &[f64],
    certificate: Option<&CertificateRule>,
    ideal: &Ideal,
    eps_grid: &[f64],
) -> Result<LimitVerdict, ConvergenceError> {
    validate_eps_grid(eps_grid)?;
    let horizon = deviations.len() as u64;
    let per_epsilon = eps_grid
        .iter()
        .map(|&epsilon| {
            let set = IndexSet::from_predicate(horizon, |n| deviations[(n - 1) as usize] >= epsilon);
            let cert = certificate.and_then(|c| c(epsilon));
            let verdict = decide_membership(ideal, &set, cert.as_ref())?;
            Ok(EpsilonVerdict { epsilon, verdict })
        })
        .collect::<Result<Vec<_>, ConvergenceError>>()?;
    let overall = Verdict::from_statuses(per_epsilon.iter().map(|e| e.verdict.status));
    Ok(LimitVerdict { per_epsilon, overall })
}

/// Whether x_n I-converges to `candidate`, judged on n = 1..=horizon.
pub fn scalar_i_limit(
    x: &ScalarSequence,
    candidate: f64,
    ideal: &Ideal,
    eps_grid: &[f64],
    horizon: u64,
) -> Result<LimitVerdict, ConvergenceError> {
    if horizon == 0 {
        return Err(ConvergenceError::ZeroHorizon);
    }
    let deviations = (1..=horizon)
        .map(|n| x.value(n).map(|v| (v - candidate).abs()))
        .collect::<Result<Vec<_>, _>>()?;
    limit_from_deviations(&deviations, x.certificate_rule(), ideal, eps_grid)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSummary {
    pub epsilon: f64,
    pub status: Membership,
    /// Exact only if every component was decided by certificate.
    pub mode: VerdictMode,
    /// Largest exceptional set over the components.
    pub max_exceptional: usize,
    pub max_final_density: f64,
}

/// One criterion, evaluated for every basis vector and combined with "for all i".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub criterion: Criterion,
    pub candidate: f64,
    pub components: Vec<LimitVerdict>,
    pub per_epsilon: Vec<EpsilonSummary>,
    pub overall: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub sequence: String,
    pub ideal: Ideal,
    pub horizon: u64,
    pub eps_grid: Vec<f64>,
    pub criteria: Vec<CriterionOutcome>,
    /// Verdict of the gap criterion.
    pub overall: Verdict,
    /// `agreement[a][b]` is true when criteria a and b reached the same verdict.
    pub agreement: Vec<Vec<bool>>,
}

impl ConvergenceReport {
    pub fn criterion(&self, c: Criterion) -> Option<&CriterionOutcome> {
        self.criteria.iter().find(|o| o.criterion == c)
    }

    pub fn verdicts(&self) -> Vec<(Criterion, Verdict)> {
        self.criteria.iter().map(|o| (o.criterion, o.overall)).collect()
    }

    /// All decisive (non-inconclusive) verdicts coincide.
    pub fn criteria_agree(&self) -> bool {
        let mut decisive = self
            .criteria
            .iter()
            .map(|o| o.overall)
            .filter(|v| *v != Verdict::Inconclusive);
        match decisive.next() {
            Some(first) => decisive.all(|v| v == first),
            None => true,
        }
    }

    pub fn all_decisive(&self) -> bool {
        self.criteria.iter().all(|o| o.overall != Verdict::Inconclusive)
    }
}

/// The one-directional check: subspace convergence forces
/// I-lim ‖u_i, P_V(u_i)‖ = 0, but not conversely.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairVolumeReport {
    pub sequence: String,
    pub ideal: Ideal,
    pub horizon: u64,
    pub eps_grid: Vec<f64>,
    pub subspace: Verdict,
    pub pair_volume: CriterionOutcome,
    /// subspace = Converges ⇒ pair_volume = Converges.
    pub implication_holds: bool,
    /// pair_volume converges while the subspaces do not.
    pub converse_fails: bool,
}

/// Pointwise data for a sequence against a candidate limit, computed once
/// and reused by every criterion and ideal.
#[derive(Clone)]
pub struct Evaluation {
    sequence: String,
    records: Vec<PointwiseRecord>,
    certificate: Option<CertificateRule>,
}

impl Evaluation {
    pub fn compute(seq: &SubspaceSequence, limit: &Subspace, horizon: u64) -> Result<Self, ConvergenceError> {
        check_limit(seq, limit, horizon)?;
        let records = map_indices(horizon, |n| {
            let u = seq.subspace(n)?;
            PointwiseRecord::compute(n, &u, limit)
        })?;
        Ok(Self {
            sequence: seq.name().to_string(),
            records,
            certificate: seq.certificate_rule().cloned(),
        })
    }

    pub fn sequence(&self) -> &str {
        &self.sequence
    }

    pub fn horizon(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn records(&self) -> &[PointwiseRecord] {
        &self.records
    }

    pub fn gap_trace(&self) -> Vec<(u64, f64)> {
        self.records.iter().map(|r| (r.n, r.gap)).collect()
    }

    /// Per-component deviation traces for `criterion`.
    pub fn deviations(&self, criterion: Criterion) -> Vec<Vec<f64>> {
        let components = self.records.first().map_or(0, |r| r.deviations(criterion).len());
        let mut traces = vec![Vec::with_capacity(self.records.len()); components];
        for r in &self.records {
            for (trace, d) in traces.iter_mut().zip(r.deviations(criterion)) {
                trace.push(d);
            }
        }
        traces
    }

    /// Every deviation set here is contained in the gap exceptional set
    /// A(ε) (each is bounded by the residual ‖u_i − P_V(u_i)‖ ≤ gap, after
    /// the monotone change of scale of the criterion), so a certificate for
    /// A(ε) covers all of them.
    pub fn criterion_outcome(
        &self,
        criterion: Criterion,
        ideal: &Ideal,
        eps_grid: &[f64],
    ) -> Result<CriterionOutcome, ConvergenceError> {
        let components = self
            .deviations(criterion)
            .iter()
            .map(|d| limit_from_deviations(d, self.certificate.as_ref(), ideal, eps_grid))
            .collect::<Result<Vec<_>, _>>()?;
        let per_epsilon = eps_grid
            .iter()
            .enumerate()
            .map(|(e, &epsilon)| {
                let verdicts: Vec<&IdealVerdict> = components.iter().map(|c| &c.per_epsilon[e].verdict).collect();
                EpsilonSummary {
                    epsilon,
                    status: combine(verdicts.iter().map(|v| v.status)),
                    mode: if verdicts.iter().all(|v| v.mode == VerdictMode::Exact) {
                        VerdictMode::Exact
                    } else {
                        VerdictMode::Empirical
                    },
                    max_exceptional: verdicts.iter().map(|v| v.evidence.members).max().unwrap_or(0),
                    max_final_density: verdicts.iter().map(|v| v.evidence.final_density).fold(0.0, f64::max),
                }
            })
            .collect::<Vec<_>>();
        let overall = Verdict::from_statuses(per_epsilon.iter().map(|s| s.status));
        Ok(CriterionOutcome {
            criterion,
            candidate: criterion.candidate(),
            components,
            per_epsilon,
            overall,
        })
    }

    pub fn report(
        &self,
        criteria: &[Criterion],
        ideal: &Ideal,
        eps_grid: &[f64],
    ) -> Result<ConvergenceReport, ConvergenceError> {
        validate_eps_grid(eps_grid)?;
        ideal.validate()?;
        let outcomes = criteria
            .iter()
            .map(|&c| self.criterion_outcome(c, ideal, eps_grid))
            .collect::<Result<Vec<_>, _>>()?;
        let overall = outcomes
            .iter()
            .find(|o| o.criterion == Criterion::Gap)
            .map_or(Verdict::Inconclusive, |o| o.overall);
        let agreement = outcomes
            .iter()
            .map(|a| outcomes.iter().map(|b| a.overall == b.overall).collect())
            .collect();
        Ok(ConvergenceReport {
            sequence: self.sequence.clone(),
            ideal: ideal.clone(),
            horizon: self.horizon(),
            eps_grid: eps_grid.to_vec(),
            criteria: outcomes,
            overall,
            agreement,
        })
    }

    pub fn subspace_i_converges(&self, ideal: &Ideal, eps_grid: &[f64]) -> Result<ConvergenceReport, ConvergenceError> {
        self.report(&[Criterion::Gap], ideal, eps_grid)
    }

    pub fn equivalence_suite(&self, ideal: &Ideal, eps_grid: &[f64]) -> Result<ConvergenceReport, ConvergenceError> {
        self.report(&Criterion::EQUIVALENT, ideal, eps_grid)
    }

    pub fn pair_volume_check(&self, ideal: &Ideal, eps_grid: &[f64]) -> Result<PairVolumeReport, ConvergenceError> {
        let subspace = self.subspace_i_converges(ideal, eps_grid)?.overall;
        let pair_volume = self.criterion_outcome(Criterion::PairVolume, ideal, eps_grid)?;
        let rhs = pair_volume.overall;
        Ok(PairVolumeReport {
            sequence: self.sequence.clone(),
            ideal: ideal.clone(),
            horizon: self.horizon(),
            eps_grid: eps_grid.to_vec(),
            subspace,
            implication_holds: subspace != Verdict::Converges || rhs == Verdict::Converges,
            converse_fails: rhs == Verdict::Converges && subspace == Verdict::DoesNotConverge,
            pair_volume,
        })
    }
}

/// Criterion (i) alone: I-lim gap(U_n, V) = 0.
pub fn subspace_i_converges(
    seq: &SubspaceSequence,
    limit: &Subspace,
    ideal: &Ideal,
    eps_grid: &[f64],
    horizon: u64,
) -> Result<ConvergenceReport, ConvergenceError> {
    Evaluation::compute(seq, limit, horizon)?.subspace_i_converges(ideal, eps_grid)
}

/// Ordinary convergence: the gap criterion under the finite-set ideal.
pub fn usual_converges(
    seq: &SubspaceSequence,
    limit: &Subspace,
    eps_grid: &[f64],
    horizon: u64,
) -> Result<ConvergenceReport, ConvergenceError> {
    subspace_i_converges(seq, limit, &Ideal::finite(), eps_grid, horizon)
}

/// Statistical convergence: the gap criterion under the density-zero ideal.
pub fn statistical_converges(
    seq: &SubspaceSequence,
    limit: &Subspace,
    eps_grid: &[f64],
    horizon: u64,
) -> Result<ConvergenceReport, ConvergenceError> {
    subspace_i_converges(seq, limit, &Ideal::density(), eps_grid, horizon)
}

/// All five equivalent criteria, each combined over the basis vectors.
pub fn equivalence_suite(
    seq: &SubspaceSequence,
    limit: &Subspace,
    ideal: &Ideal,
    eps_grid: &[f64],
    horizon: u64,
) -> Result<ConvergenceReport, ConvergenceError> {
    Evaluation::compute(seq, limit, horizon)?.equivalence_suite(ideal, eps_grid)
}

pub fn pair_volume_check(
    seq: &SubspaceSequence,
    limit: &Subspace,
    ideal: &Ideal,
    eps_grid: &[f64],
    horizon: u64,
) -> Result<PairVolumeReport, ConvergenceError> {
    Evaluation::compute(seq, limit, horizon)?.pair_volume_check(ideal, eps_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::{battery, odd_escape, orthogonal_constant, OddEscapeVariant, DEFAULT_EPS_GRID};
    use crate::convergence::{AngleProfile, TiltFamily};
    use crate::ideals::TailCertificate;

    fn line(d: usize, axis: usize) -> Subspace {
        Subspace::coordinate(d, &[axis]).unwrap()
    }

    #[test]
    fn gap_trace_examples() {
        let v = line(3, 1);
        let still = SubspaceSequence::constant("still", v.clone());
        assert!(gap_trace(&still, &v, 50).unwrap().iter().all(|&(_, g)| g == 0.0));

        let orth = orthogonal_constant();
        let trace = gap_trace(&orth.sequence, &orth.limit, 100).unwrap();
        assert_eq!(trace.len(), 100);
        assert!(trace
            .iter()
            .enumerate()
            .all(|(i, &(n, g))| n == i as u64 + 1 && g == 1.0));

        let escape = odd_escape(OddEscapeVariant::Amended);
        for (n, g) in gap_trace(&escape.sequence, &escape.limit, 200).unwrap() {
            if n % 2 == 0 {
                let s = (n as f64).sin();
                let want = s.abs() / ((n * n) as f64 + s * s).sqrt();
                assert!((g - want).abs() < 1e-15, "n = {n}");
            }
        }
    }

    #[test]
    fn gap_trace_reports_failing_index() {
        let seq = SubspaceSequence::new("breaks", 2, 1, |n| {
            if n == 37 {
                Subspace::from_orthonormal(vec![RealVector::new(vec![1.0, 1.0])?])
            } else {
                Subspace::coordinate(2, &[0])
            }
        });
        let err = gap_trace(&seq, &line(2, 0), 5000).unwrap_err();
        assert!(matches!(err, ConvergenceError::Rule { n: 37, .. }), "{err}");
    }

    #[test]
    fn gap_trace_checks_shapes() {
        let seq = SubspaceSequence::constant("line", line(3, 0));
        assert!(matches!(
            gap_trace(&seq, &line(2, 0), 10),
            Err(ConvergenceError::LimitShape { .. })
        ));
        assert!(matches!(
            gap_trace(&seq, &line(3, 0), 0),
            Err(ConvergenceError::ZeroHorizon)
        ));
    }

    #[test]
    fn exceptional_set_examples() {
        let zeros: Vec<(u64, f64)> = (1..=100).map(|n| (n, 0.0)).collect();
        assert!(exceptional_set(&zeros, 0.1).unwrap().set.is_empty());

        let ones: Vec<(u64, f64)> = (1..=100).map(|n| (n, 1.0)).collect();
        assert_eq!(exceptional_set(&ones, 0.5).unwrap().set, IndexSet::full(100));

        let harmonic: Vec<(u64, f64)> = (1..=100).map(|n| (n, 1.0 / n as f64)).collect();
        let a = exceptional_set(&harmonic, 0.1).unwrap();
        assert_eq!(a.set.members(), (1..=10).collect::<Vec<_>>().as_slice());
        assert_eq!(a.values.len(), 100);

        assert!(matches!(
            exceptional_set(&ones, 0.0),
            Err(ConvergenceError::InvalidEpsilon(_))
        ));
        assert!(exceptional_set(&ones, -1.0).is_err());
    }

    fn odd_spikes() -> ScalarSequence {
        ScalarSequence::new(|n| if n % 2 == 1 { 1.0 } else { 1.0 / n as f64 })
    }

    #[test]
    fn scalar_limit_examples() {
        let harmonic = ScalarSequence::new(|n| 1.0 / n as f64);
        let v = scalar_i_limit(&harmonic, 0.0, &Ideal::finite(), &DEFAULT_EPS_GRID, 1000).unwrap();
        assert_eq!(v.overall, Verdict::Converges);

        let v = scalar_i_limit(&odd_spikes(), 0.0, &Ideal::density(), &DEFAULT_EPS_GRID, 10_000).unwrap();
        assert_eq!(v.overall, Verdict::DoesNotConverge);
        assert!((v.per_epsilon[0].verdict.evidence.final_density - 0.5).abs() < 1e-3);

        // Evens below 1/ε also fall in the exceptional set, hence the extra tail part.
        let certified = odd_spikes().with_certificate(|eps| {
            TailCertificate::union([
                TailCertificate::blocks([1]),
                TailCertificate::Empty {
                    after: (1.0 / eps).ceil() as u64,
                },
            ])
        });
        let v = scalar_i_limit(&certified, 0.0, &Ideal::blocks(), &DEFAULT_EPS_GRID, 10_000).unwrap();
        assert_eq!(v.overall, Verdict::Converges);
        assert!(v.per_epsilon.iter().all(|e| e.verdict.mode == VerdictMode::Exact));
    }

    #[test]
    fn scalar_limit_rejects_bad_input() {
        let nan = ScalarSequence::new(|n| if n == 5 { f64::NAN } else { 0.0 });
        assert!(matches!(
            scalar_i_limit(&nan, 0.0, &Ideal::finite(), &DEFAULT_EPS_GRID, 10),
            Err(ConvergenceError::NonFinite { n: 5 })
        ));
        let zero = ScalarSequence::new(|_| 0.0);
        assert!(scalar_i_limit(&zero, 0.0, &Ideal::finite(), &[], 10).is_err());
    }

    #[test]
    fn subspace_convergence_examples() {
        let v = Subspace::coordinate(4, &[0, 2]).unwrap();
        let still = SubspaceSequence::constant("still", v.clone());
        for ideal in Ideal::battery() {
            let r = subspace_i_converges(&still, &v, &ideal, &DEFAULT_EPS_GRID, 1000).unwrap();
            assert_eq!(r.overall, Verdict::Converges, "{ideal}");
        }

        let orth = orthogonal_constant();
        for ideal in Ideal::battery() {
            let r = subspace_i_converges(&orth.sequence, &orth.limit, &ideal, &[1.0, 0.5, 0.1], 1000).unwrap();
            assert_eq!(r.overall, Verdict::DoesNotConverge, "{ideal}");
        }

        let escape = odd_escape(OddEscapeVariant::Amended);
        let dens = statistical_converges(&escape.sequence, &escape.limit, &DEFAULT_EPS_GRID, 10_000).unwrap();
        assert_eq!(dens.overall, Verdict::DoesNotConverge);
        let usual = usual_converges(&escape.sequence, &escape.limit, &DEFAULT_EPS_GRID, 10_000).unwrap();
        assert_eq!(usual.overall, Verdict::DoesNotConverge);
        let blocks = subspace_i_converges(
            &escape.sequence,
            &escape.limit,
            &Ideal::blocks(),
            &DEFAULT_EPS_GRID,
            10_000,
        )
        .unwrap();
        assert_eq!(blocks.overall, Verdict::Converges);
    }

    #[test]
    fn harmonic_gap_converges_usually() {
        let seq = TiltFamily::new(
            "harmonic",
            2,
            vec![AngleProfile::Power {
                scale: 1.0,
                exponent: 1.0,
            }],
        )
        .uncertified();
        let r = usual_converges(&seq.sequence().unwrap(), &seq.limit().unwrap(), &DEFAULT_EPS_GRID, 1000).unwrap();
        assert_eq!(r.overall, Verdict::Converges);
    }

    #[test]
    fn squares_are_statistically_negligible() {
        let v = line(2, 0);
        let seq = SubspaceSequence::new("squares", 2, 1, |n| {
            let r = (n as f64).sqrt().round() as u64;
            Subspace::coordinate(2, &[usize::from(r * r == n)])
        });
        let r = statistical_converges(&seq, &v, &DEFAULT_EPS_GRID, 10_000).unwrap();
        assert_eq!(r.overall, Verdict::Converges);
        let usual = usual_converges(&seq, &v, &DEFAULT_EPS_GRID, 10_000).unwrap();
        assert_eq!(usual.overall, Verdict::DoesNotConverge);
    }

    #[test]
    fn equivalence_suite_examples() {
        let v = Subspace::coordinate(5, &[1, 3, 4]).unwrap();
        let still = SubspaceSequence::constant("still", v.clone());
        let r = equivalence_suite(&still, &v, &Ideal::density(), &DEFAULT_EPS_GRID, 500).unwrap();
        assert_eq!(r.criteria.len(), 5);
        assert!(r.criteria.iter().all(|c| c.overall == Verdict::Converges));
        assert!(r.agreement.iter().flatten().all(|&a| a));

        let orth = orthogonal_constant();
        let r = equivalence_suite(&orth.sequence, &orth.limit, &Ideal::finite(), &DEFAULT_EPS_GRID, 1000).unwrap();
        assert!(r.criteria.iter().all(|c| c.overall == Verdict::DoesNotConverge));
        assert!(r.criteria_agree());
        let eval = Evaluation::compute(&orth.sequence, &orth.limit, 3).unwrap();
        let rec = &eval.records()[0];
        assert_eq!(rec.projection_norm, vec![0.0]);
        assert_eq!(rec.coefficient_mass, vec![0.0]);
        assert_eq!(rec.volume, vec![1.0]);
    }

    #[test]
    fn pair_volume_examples() {
        let v = Subspace::coordinate(3, &[0, 1]).unwrap();
        let still = SubspaceSequence::constant("still", v.clone());
        let r = pair_volume_check(&still, &v, &Ideal::finite(), &DEFAULT_EPS_GRID, 200).unwrap();
        assert_eq!(r.pair_volume.overall, Verdict::Converges);
        assert!(r.implication_holds && !r.converse_fails);

        let orth = orthogonal_constant();
        let eval = Evaluation::compute(&orth.sequence, &orth.limit, 1000).unwrap();
        assert!(eval.records().iter().all(|r| r.pair_volume == vec![0.0]));
        for ideal in Ideal::battery() {
            let r = eval.pair_volume_check(&ideal, &DEFAULT_EPS_GRID).unwrap();
            assert_eq!(r.subspace, Verdict::DoesNotConverge);
            assert_eq!(r.pair_volume.overall, Verdict::Converges);
            assert!(r.implication_holds && r.converse_fails);
        }
    }

    #[test]
    fn pointwise_identities() {
        for m in battery() {
            let eval = Evaluation::compute(&m.sequence, &m.limit, 64).unwrap();
            for r in eval.records() {
                for i in 0..r.volume.len() {
                    let mass = r.coefficient_mass[i];
                    assert!(((1.0 - mass) - r.volume[i].powi(2)).abs() <= 1e-10);
                    assert!((r.projection_norm[i].powi(2) - mass).abs() <= 1e-12);
                    assert!(r.residual[i] <= r.gap + 1e-12);
                }
            }
        }
    }

    #[test]
    fn battery_verdicts_agree_with_expectations() {
        for m in battery() {
            let eval = Evaluation::compute(&m.sequence, &m.limit, crate::convergence::BATTERY_HORIZON).unwrap();
            for ideal in Ideal::battery() {
                let r = eval.equivalence_suite(&ideal, &DEFAULT_EPS_GRID).unwrap();
                for (c, v) in r.verdicts() {
                    assert_eq!(v, m.expected_under(&ideal), "{} / {ideal} / {c}", m.name());
                }
                let p = eval.pair_volume_check(&ideal, &DEFAULT_EPS_GRID).unwrap();
                assert!(p.implication_holds, "{} / {ideal}", m.name());
            }
        }
    }

    #[test]
    fn verdicts_survive_basis_rotation() {
        let q = vec![vec![0.6, -0.8], vec![0.8, 0.6]];
        for m in battery().into_iter().filter(|m| m.sequence.dim() == 2) {
            let rotated = m.sequence.with_rotated_bases(q.clone());
            for ideal in Ideal::battery() {
                let a = equivalence_suite(&m.sequence, &m.limit, &ideal, &DEFAULT_EPS_GRID, 400).unwrap();
                let b = equivalence_suite(&rotated, &m.limit, &ideal, &DEFAULT_EPS_GRID, 400).unwrap();
                assert_eq!(a.verdicts(), b.verdicts(), "{}", m.name());
            }
        }
    }

    #[test]
    fn reports_are_deterministic_and_serializable() {
        let m = &battery()[15];
        let a = equivalence_suite(&m.sequence, &m.limit, &Ideal::density(), &DEFAULT_EPS_GRID, 3000).unwrap();
        let b = equivalence_suite(&m.sequence, &m.limit, &Ideal::density(), &DEFAULT_EPS_GRID, 3000).unwrap();
        assert_eq!(a, b);
        let json = serde_json::to_string(&a).unwrap();
        let back: ConvergenceReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.verdicts(), a.verdicts());
    }
}
