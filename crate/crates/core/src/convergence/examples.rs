use serde::{Deserialize, Serialize};

use crate::ideals::{Ideal, TailCertificate};
use crate::linalg::{RealVector, Subspace};

use super::SubspaceSequence;

/// A named sequence together with its intended limit and ideal.
#[derive(Clone, Debug)]
pub struct BuiltinExample {
    pub sequence: SubspaceSequence,
    pub limit: Subspace,
    pub ideal: Ideal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OddEscapeVariant {
    /// Even n: span{(sin n, 1, 0)}, which stays a fixed distance from V.
    #[serde(rename = "printed")]
    AsPrinted,
    /// Even n: span{(sin n / n, 1, 0)}, which approaches V.
    #[default]
    Amended,
}

/// Lines in ℝ³ that jump to span{e_3} at every odd n; V = span{e_2}.
///
/// The odd indices form the block D_1, so under the block-decomposition
/// ideal the amended sequence converges to V, while the set of odd indices
/// has density 1/2 and is infinite.
pub fn odd_escape(variant: OddEscapeVariant) -> BuiltinExample {
    let limit = Subspace::coordinate(3, &[1]).expect("e_2 spans a line in R^3");
    let rule = move |n: u64| {
        if n % 2 == 1 {
            return Subspace::coordinate(3, &[2]);
        }
        let x = n as f64;
        let first = match variant {
            OddEscapeVariant::AsPrinted => x.sin(),
            OddEscapeVariant::Amended => x.sin() / x,
        };
        let u = RealVector::new(vec![first, 1.0, 0.0])?.normalized()?;
        Subspace::from_orthonormal(vec![u])
    };
    let name = match variant {
        OddEscapeVariant::AsPrinted => "odd-escape-printed",
        OddEscapeVariant::Amended => "odd-escape",
    };
    let sequence = SubspaceSequence::new(name, 3, 1, rule);
    let sequence = match variant {
        OddEscapeVariant::AsPrinted => sequence,
        // Even n: gap ≤ |sin n| / n ≤ 1/n.
        OddEscapeVariant::Amended => sequence.with_certificate(|eps| {
            TailCertificate::union([
                TailCertificate::blocks([1]),
                TailCertificate::Empty {
                    after: (2.0 / eps).ceil() as u64,
                },
            ])
        }),
    };
    BuiltinExample {
        sequence,
        limit,
        ideal: Ideal::blocks(),
    }
}

/// U_n = span{e_1} for every n against V = span{e_2} in ℝ².
///
/// The gap is 1 throughout, while P_V(e_1) = 0 makes ‖e_1, P_V(e_1)‖ vanish.
pub fn orthogonal_constant() -> BuiltinExample {
    let u = Subspace::coordinate(2, &[0]).expect("e_1 spans a line in R^2");
    BuiltinExample {
        sequence: SubspaceSequence::constant("orthogonal-constant", u),
        limit: Subspace::coordinate(2, &[1]).expect("e_2 spans a line in R^2"),
        ideal: Ideal::finite(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gap;

    #[test]
    fn odd_escape_gaps() {
        let ex = odd_escape(OddEscapeVariant::Amended);
        for n in [1u64, 3, 99] {
            assert_eq!(gap(&ex.sequence.subspace(n).unwrap(), &ex.limit).unwrap(), 1.0);
        }
        for n in [2u64, 10, 1000] {
            let g = gap(&ex.sequence.subspace(n).unwrap(), &ex.limit).unwrap();
            assert!(g <= 1.0 / n as f64 + 1e-15, "n = {n}: {g}");
        }
    }

    #[test]
    fn odd_escape_certificate_covers_trace() {
        let ex = odd_escape(OddEscapeVariant::Amended);
        for eps in [0.5, 0.1, 0.01, 0.001] {
            let cert = ex.sequence.certificate(eps).unwrap();
            for n in 1..5000 {
                let g = gap(&ex.sequence.subspace(n).unwrap(), &ex.limit).unwrap();
                if g >= eps {
                    assert!(cert.admits(n), "eps {eps}, n {n}");
                }
            }
        }
    }

    #[test]
    fn printed_variant_stays_away_on_evens() {
        let ex = odd_escape(OddEscapeVariant::AsPrinted);
        assert!(ex.sequence.certificate_rule().is_none());
        let worst = (5000..=10_000u64)
            .step_by(2)
            .map(|n| gap(&ex.sequence.subspace(n).unwrap(), &ex.limit).unwrap())
            .fold(0.0, f64::max);
        assert!(worst > 0.5);
    }

    #[test]
    fn orthogonal_constant_has_unit_gap() {
        let ex = orthogonal_constant();
        assert_eq!(gap(&ex.sequence.subspace(7).unwrap(), &ex.limit).unwrap(), 1.0);
    }
}
