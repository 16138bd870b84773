//! Fixed registry of anchor strings. Every record names the identity or
//! inequality it exercises with one of these.

pub const CLOSED_FORMS: &str = "depolarizing closed forms: minimal output entropy, maximal output p-norm, Holevo quantity";
pub const CP_RANGE: &str = "complete positivity range of the depolarizing and dephasing families";
pub const CONVEX_DECOMPOSITION: &str = "depolarizing channel as a convex mixture of conjugated uniform dephasers";
pub const TWO_BLOCK_IDENTITY: &str = "intermediate map as an average of uniform dephasers";
pub const AVERAGED_PHASE: &str = "chirp-and-clock averaging removes off-diagonal phases";
pub const PHASE_CENSUS: &str = "phase cancellation conditions have only trivial solutions";
pub const QUBIT_FOUR_TERM: &str = "qubit depolarizing channel as a four-term dephaser mixture";
pub const LIEB_THIRRING: &str = "Lieb-Thirring trace inequality";
pub const DEPHASED_BLOCK_BOUND: &str = "p-norm of a dephased bipartite output bounded by conditional states";
pub const SPECTRUM_IDENTITY: &str = "dephased bipartite output shares its spectrum with the block factorization";
pub const UNITARY_INVARIANCE: &str = "product output norm invariant under local unitaries on the depolarized factor";
pub const NORM_MULTIPLICATIVITY: &str = "maximal output p-norm is multiplicative for depolarizing times any channel";
pub const DERIVATIVE_IDENTITY: &str = "minus the p-derivative of the maximal output norm at p = 1 is the minimal output entropy";
pub const RELATIVE_ENTROPY_BOUND: &str = "output relative entropy against the product reference is at most the sum of Holevo quantities";
pub const ENTROPY_LOWER_BOUND: &str = "output entropy of a uniform dephaser times any channel bounded below by conditional entropies";
pub const CHI_ADDITIVITY: &str = "Holevo quantity is additive for depolarizing times any channel";
pub const CAPACITY_CHAIN: &str = "classical capacity of the depolarizing channel equals ln d minus the minimal output entropy";

pub const ALL: &[&str] = &[
    CLOSED_FORMS,
    CP_RANGE,
    CONVEX_DECOMPOSITION,
    TWO_BLOCK_IDENTITY,
    AVERAGED_PHASE,
    PHASE_CENSUS,
    QUBIT_FOUR_TERM,
    LIEB_THIRRING,
    DEPHASED_BLOCK_BOUND,
    SPECTRUM_IDENTITY,
    UNITARY_INVARIANCE,
    NORM_MULTIPLICATIVITY,
    DERIVATIVE_IDENTITY,
    RELATIVE_ENTROPY_BOUND,
    ENTROPY_LOWER_BOUND,
    CHI_ADDITIVITY,
    CAPACITY_CHAIN,
];

pub fn is_registered(anchor: &str) -> bool {
    ALL.contains(&anchor)
}
