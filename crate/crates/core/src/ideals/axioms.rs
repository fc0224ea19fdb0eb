use serde::{Deserialize, Serialize};

use super::{decide_membership, Ideal, IndexSet, Membership, TailCertificate, VerdictMode};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn record(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(AxiomCheck {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

type Member = (IndexSet, Option<TailCertificate>);

/// Spot-checks the ideal axioms on a finite family of observed sets.
///
/// * the empty set is a member;
/// * members stay members under pairwise union (certificates merged into a
///   union certificate) and under taking subsets (certificate inherited);
/// * every singleton {z} is a member (admissibility);
/// * the full horizon set is never an exact member (non-triviality).
///
/// Family members must share a horizon; sets whose certificate does not
/// cover them are reported as failed checks.
pub fn axioms_check(ideal: &Ideal, family: &[Member]) -> AxiomReport {
    let mut report = AxiomReport::default();
    let horizon = family.first().map_or(1000, |(s, _)| s.horizon());

    if let Some((odd, _)) = family.iter().find(|(s, _)| s.horizon() != horizon) {
        report.record(
            "shared horizon",
            false,
            format!("horizons {horizon} and {} differ", odd.horizon()),
        );
        return report;
    }

    let status = |set: &IndexSet, cert: Option<&TailCertificate>| {
        decide_membership(ideal, set, cert).map(|v| (v.status, v.mode))
    };

    match status(&IndexSet::empty(horizon), None) {
        Ok((Membership::InIdeal, _)) => report.record("empty set", true, "∅ is a member"),
        other => report.record("empty set", false, format!("∅ judged {other:?}")),
    }

    let mut members: Vec<&Member> = Vec::new();
    for (i, m @ (set, cert)) in family.iter().enumerate() {
        match status(set, cert.as_ref()) {
            Ok((Membership::InIdeal, _)) => members.push(m),
            Ok(_) => {}
            Err(e) => report.record(format!("family[{i}]"), false, e.to_string()),
        }
    }

    for (a, (sa, ca)) in members.iter().enumerate() {
        for (sb, cb) in members.iter().skip(a + 1) {
            let Ok(union) = sa.union(sb) else { continue };
            let cert = match (ca, cb) {
                (Some(x), Some(y)) => Some(TailCertificate::union([x.clone(), y.clone()])),
                _ => None,
            };
            let got = status(&union, cert.as_ref());
            report.record(
                "union closure",
                matches!(got, Ok((Membership::InIdeal, _))),
                format!("|A ∪ B| = {}: {got:?}", union.len()),
            );
        }
    }

    for (set, cert) in &members {
        let members = set.members();
        let half = members.get(members.len() / 2).copied().unwrap_or(0);
        let subsets = [
            ("every other member", {
                let keep: Vec<u64> = members.iter().copied().step_by(2).collect();
                set.filter(|n| keep.binary_search(&n).is_ok())
            }),
            ("lower half", set.filter(|n| n < half)),
            ("empty subset", set.filter(|_| false)),
        ];
        for (label, sub) in subsets {
            let got = status(&sub, cert.as_ref());
            report.record(
                "subset closure",
                matches!(got, Ok((Membership::InIdeal, _))),
                format!("{label} ({} of {}): {got:?}", sub.len(), set.len()),
            );
        }
    }

    let mut singles: Vec<u64> = vec![1, horizon];
    for (set, _) in family {
        singles.extend(set.members().first());
        singles.extend(set.members().last());
    }
    singles.sort_unstable();
    singles.dedup();
    for z in singles {
        let single = IndexSet::new(horizon, vec![z]).expect("z within horizon");
        let got = status(&single, Some(&TailCertificate::Empty { after: z }));
        report.record(
            "admissibility",
            matches!(got, Ok((Membership::InIdeal, _))),
            format!("{{{z}}}: {got:?}"),
        );
    }

    let got = status(&IndexSet::full(horizon), None);
    report.record(
        "non-triviality",
        !matches!(got, Ok((Membership::InIdeal, VerdictMode::Exact))),
        format!("{{1..{horizon}}}: {got:?}"),
    );

    report
}
