//! Single-line semantic mutations of the core operations.
//!
//! The mutation harness in [`crate::lawcheck`] switches one of these on for
//! the current thread and expects at least one law suite to notice. Nothing
//! outside the harness ever activates a mutation.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// `f♯` returns the image of a closed set instead of its closure.
    PushImageWithoutClosure,
    /// `σ(x)` returns `{x}` instead of `cl({x})`.
    SigmaSingleton,
    /// `𝒰` keeps only the last member of a family instead of the union.
    UnionKeepsLastMember,
    /// `strength_H` returns `{x} × C` without closing it.
    StrengthWithoutClosure,
    /// `sgn(0) = 1`.
    NonStrictSign,
    /// Layer-cake integration weighs strict level sets `{g > v}`.
    IntegrateStrictLevels,
    /// `ℰ` ignores the atom weights.
    MultIgnoresWeights,
    /// Product valuations drop every intersection term of inclusion–exclusion.
    ProductDropsIntersections,
    /// Möbius inversion forgets the signs of the Möbius function.
    MobiusDropsSigns,
    /// The support is the complement of the first null open rather than of
    /// the union of all null opens.
    SupportFirstNullOpen,
}

impl Mutation {
    pub const ALL: [Mutation; 10] = [
        Mutation::PushImageWithoutClosure,
        Mutation::SigmaSingleton,
        Mutation::UnionKeepsLastMember,
        Mutation::StrengthWithoutClosure,
        Mutation::NonStrictSign,
        Mutation::IntegrateStrictLevels,
        Mutation::MultIgnoresWeights,
        Mutation::ProductDropsIntersections,
        Mutation::MobiusDropsSigns,
        Mutation::SupportFirstNullOpen,
    ];
}

thread_local! {
    static ACTIVE: Cell<Option<Mutation>> = const { Cell::new(None) };
}

#[inline]
pub(crate) fn active(m: Mutation) -> bool {
    ACTIVE.with(|a| a.get() == Some(m))
}

/// Runs `f` with `m` active on the current thread.
pub fn with_mutation<R>(m: Mutation, f: impl FnOnce() -> R) -> R {
    struct Reset(Option<Mutation>);
    impl Drop for Reset {
        fn drop(&mut self) {
            ACTIVE.with(|a| a.set(self.0));
        }
    }
    let _reset = Reset(ACTIVE.with(|a| a.replace(Some(m))));
    f()
}

pub fn current() -> Option<Mutation> {
    ACTIVE.with(|a| a.get())
}
