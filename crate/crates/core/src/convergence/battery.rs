use std::f64::consts::FRAC_PI_2;

use crate::ideals::{Ideal, IdealKind};
use crate::linalg::Subspace;

use super::family::{AngleProfile, Support, TiltFamily};
use super::{odd_escape, orthogonal_constant, OddEscapeVariant, SubspaceSequence, Verdict};

pub const BATTERY_HORIZON: u64 = 1000;

/// A sequence with a known answer under each of the three standard ideals.
#[derive(Clone, Debug)]
pub struct BatteryMember {
    pub sequence: SubspaceSequence,
    pub limit: Subspace,
    /// Verdicts under the finite, density and block ideals, in that order.
    pub expected: [Verdict; 3],
}

impl BatteryMember {
    pub fn name(&self) -> &str {
        self.sequence.name()
    }

    pub fn expected_under(&self, ideal: &Ideal) -> Verdict {
        match ideal.kind {
            IdealKind::Finite => self.expected[0],
            IdealKind::Density { .. } => self.expected[1],
            IdealKind::BlockDecomposition { .. } => self.expected[2],
        }
    }
}

fn member(family: TiltFamily, expected: [Verdict; 3]) -> BatteryMember {
    BatteryMember {
        sequence: family.sequence().expect("battery family is valid"),
        limit: family.limit().expect("battery family is valid"),
        expected,
    }
}

fn constant(angle: f64) -> AngleProfile {
    AngleProfile::Constant { angle }
}

fn power(scale: f64, exponent: f64) -> AngleProfile {
    AngleProfile::Power { scale, exponent }
}

fn geometric(scale: f64, ratio: f64) -> AngleProfile {
    AngleProfile::Geometric { scale, ratio }
}

/// Twenty sequences: ten converge under every ideal; the others fail under
/// every ideal, or converge under the block ideal or the density ideal alone.
pub fn battery() -> Vec<BatteryMember> {
    use AngleProfile::Zero;
    use Verdict::{Converges as C, DoesNotConverge as N};

    let mut out = vec![
        member(TiltFamily::new("still-line", 3, vec![Zero]), [C, C, C]),
        member(
            TiltFamily::new("still-3-plane", 5, vec![Zero, Zero, Zero]).framed(),
            [C, C, C],
        ),
        member(
            TiltFamily::new("inverse-square", 3, vec![power(0.8, 2.0), Zero]),
            [C, C, C],
        ),
        member(
            TiltFamily::new("geometric-pair", 4, vec![geometric(1.0, 0.5), geometric(0.5, 0.5)]).mixed(),
            [C, C, C],
        ),
        member(
            TiltFamily::new("inverse-square-pair", 5, vec![power(0.9, 2.0), power(0.6, 2.0)])
                .framed()
                .mixed()
                .uncertified(),
            [C, C, C],
        ),
        member(
            TiltFamily::new("eventually-exact", 4, vec![constant(1.2), Zero]).on(Support::UpTo { last: 5 }),
            [C, C, C],
        ),
        member(
            TiltFamily::new("geometric-line", 2, vec![geometric(1.0, 0.5)]),
            [C, C, C],
        ),
        member(
            TiltFamily::new("inverse-cube", 5, vec![power(1.0, 3.0), power(0.5, 3.0), Zero])
                .framed()
                .uncertified(),
            [C, C, C],
        ),
        member(TiltFamily::new("harmonic", 3, vec![power(0.9, 1.0)]), [C, C, C]),
        member(
            TiltFamily::new("tilt-on-evens", 4, vec![constant(0.9), constant(0.9)])
                .on(Support::Evens)
                .mixed(),
            [N, N, N],
        ),
        member(
            TiltFamily::new("multiples-of-three", 5, vec![constant(1.0), constant(0.3), Zero])
                .on(Support::Multiples { of: 3 })
                .framed(),
            [N, N, N],
        ),
        member(
            TiltFamily::new(
                "wobble",
                3,
                vec![
                    AngleProfile::Wobble {
                        center: 0.75,
                        amplitude: 0.25,
                    },
                    Zero,
                ],
            )
            .framed(),
            [N, N, N],
        ),
    ];

    let orth = orthogonal_constant();
    out.push(BatteryMember {
        sequence: orth.sequence,
        limit: orth.limit,
        expected: [N, N, N],
    });
    out.push(member(
        TiltFamily::new("orthogonal-plane", 4, vec![constant(FRAC_PI_2), constant(FRAC_PI_2)]).mixed(),
        [N, N, N],
    ));

    let escape = odd_escape(OddEscapeVariant::Amended);
    out.push(BatteryMember {
        sequence: escape.sequence,
        limit: escape.limit,
        expected: [N, N, C],
    });
    out.extend([
        member(
            TiltFamily::new("tilt-on-odds", 4, vec![constant(1.0), Zero])
                .on(Support::Odds)
                .otherwise(vec![power(0.8, 2.0), Zero]),
            [N, N, C],
        ),
        member(
            TiltFamily::new("blocks-two-three", 5, vec![constant(0.8)]).on(Support::Blocks { blocks: vec![2, 3] }),
            [N, N, C],
        ),
        member(
            TiltFamily::new("odd-pair", 5, vec![constant(0.9), constant(0.9), Zero])
                .on(Support::Odds)
                .framed()
                .mixed(),
            [N, N, C],
        ),
        member(
            TiltFamily::new("powers-of-two", 3, vec![constant(1.0)]).on(Support::PowersOfTwo { min: 4 }),
            [N, C, N],
        ),
        member(
            TiltFamily::new("early-burst", 4, vec![constant(1.3), Zero, Zero])
                .on(Support::UpTo { last: 8 })
                .otherwise(vec![geometric(1.0, 0.5), Zero, Zero]),
            [C, C, C],
        ),
    ]);
    out
}
