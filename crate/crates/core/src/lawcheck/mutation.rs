//! Runs the law suites with one [`Mutation`] active at a time and records
//! which suite notices first.

use serde::{Deserialize, Serialize};

use super::{evaluate, find_suite, generate_at, shrink_with, suite_names, GenConfig, Instance, Outcome};
use crate::mutants::{with_mutation, Mutation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationOutcome {
    pub mutation: Mutation,
    /// First suite with a failing instance, `None` if the mutant survived.
    pub caught_by: Option<String>,
    pub instance_index: Option<usize>,
    pub message: Option<String>,
    pub shrunk: Option<Instance>,
}

impl MutationOutcome {
    pub fn caught(&self) -> bool {
        self.caught_by.is_some()
    }
}

/// Suites most likely to notice a mutation, tried before the rest.
fn preferred(m: Mutation) -> &'static [&'static str] {
    match m {
        Mutation::PushImageWithoutClosure => &["h-monad", "supp-natural"],
        Mutation::SigmaSingleton | Mutation::UnionKeepsLastMember => &["h-monad"],
        Mutation::StrengthWithoutClosure => &["h-strength"],
        Mutation::NonStrictSign | Mutation::SupportFirstNullOpen => &["supp-unit"],
        Mutation::IntegrateStrictLevels => &["v-duality"],
        Mutation::MultIgnoresWeights => &["v-monad"],
        Mutation::ProductDropsIntersections => &["v-fubini"],
        Mutation::MobiusDropsSigns => &["p-extension"],
    }
}

/// Every suite, preferred ones first.
fn suite_order(m: Mutation) -> Vec<&'static str> {
    let first = preferred(m);
    first.iter().copied().chain(suite_names().into_iter().filter(|n| !first.contains(n))).collect()
}

/// Runs `cfg.instance_count` instances per suite with `m` active on this
/// thread, stopping at the first failure, which is then shrunk.
pub fn run_mutation(m: Mutation, cfg: &GenConfig) -> MutationOutcome {
    with_mutation(m, || {
        for name in suite_order(m) {
            let (i, def) = find_suite(name).expect("registered suite");
            for index in 0..cfg.instance_count {
                let instance = generate_at(i, def, cfg, index);
                if let Outcome::Fail(message) = evaluate(def.check, &instance) {
                    let shrunk = shrink_with(def.check, &instance).ok();
                    return MutationOutcome {
                        mutation: m,
                        caught_by: Some(name.to_owned()),
                        instance_index: Some(index),
                        message: Some(message),
                        shrunk,
                    };
                }
            }
        }
        MutationOutcome { mutation: m, caught_by: None, instance_index: None, message: None, shrunk: None }
    })
}

/// One outcome per mutation, in [`Mutation::ALL`] order.
pub fn run_mutation_harness(cfg: &GenConfig) -> Vec<MutationOutcome> {
    Mutation::ALL.iter().map(|&m| run_mutation(m, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lawcheck::{shrink, PointValues, SpaceSpec};
    use crate::scalar::ExtNonneg;

    #[test]
    fn support_mutation_shrinks_to_two_points() {
        let names: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let inst = Instance {
            spaces: vec![SpaceSpec { names, below: vec![] }],
            valuations: (0..3)
                .map(|_| PointValues {
                    space: 0,
                    values: vec![
                        ExtNonneg::zero(),
                        ExtNonneg::zero(),
                        ExtNonneg::one(),
                        ExtNonneg::zero(),
                        ExtNonneg::one(),
                    ],
                })
                .collect(),
            functions: vec![PointValues { space: 0, values: vec![ExtNonneg::one(); 5] }],
            scalars: vec![ExtNonneg::one()],
            ..Instance::default()
        };
        with_mutation(Mutation::SupportFirstNullOpen, || {
            assert!(matches!(evaluate(find_suite("supp-unit").unwrap().1.check, &inst), Outcome::Fail(_)));
            let small = shrink("supp-unit", &inst).unwrap();
            assert_eq!(small.spaces[0].names.len(), 2);
            assert_eq!(shrink("supp-unit", &small).unwrap(), small);
        });
        assert_eq!(evaluate(find_suite("supp-unit").unwrap().1.check, &inst), Outcome::Pass);
    }
}
