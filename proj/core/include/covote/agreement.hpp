#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "covote/types.hpp"

namespace covote {

// Pair counts of one roll-call before normalization.  Value index 0 is Yes,
// 1 is No; pairs[c][cp] counts ordered pairs, so unordered pairs appear
// twice.  The normalized contribution of cell (c, cp) is
// pairs[c][cp] * scale_num / scale_den.
//
// total_contribution is computed as (sum of pairs) * scale_num / scale_den
// in integer arithmetic before one exact final division, so it equals the
// cast count m_u (within a set) or m_u(A) + m_u(B) (between two sets)
// without rounding error.
struct VoteCoincidence {
    std::int64_t pairs[2][2] = {{0, 0}, {0, 0}};
    std::int64_t scale_num = 0;
    std::int64_t scale_den = 1;
    double total_contribution = 0.0;
    bool included = false; // false: the roll-call is skipped entirely
};

// Ordered pairs among subset members, weighted by 1/(m_u - 1).
// Skips the roll-call when fewer than two subset members cast a vote.
VoteCoincidence vote_coincidences_within(std::span<const VoteValue> column,
                                         std::span<const std::int32_t> subset);

// Ordered pairs with one endpoint in each set, weighted by
// (m_u(A) + m_u(B)) / (2 m_u(A) m_u(B)).  Skips the roll-call when either
// set casts no vote.  The sets must be disjoint.
VoteCoincidence vote_coincidences_between(std::span<const VoteValue> column,
                                          std::span<const std::int32_t> set_a,
                                          std::span<const std::int32_t> set_b);

// Accumulated 2x2 coincidence matrix over cast values.  Entries use
// compensated summation in roll-call order; total accumulates the exact
// per-vote contributions, so it is integer-exact.
struct CoincidenceMatrix {
    double entries[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double total = 0.0;
    std::int64_t votes_used = 0;
    std::int64_t votes_skipped = 0;

    double marginal(int value) const { return entries[value][0] + entries[value][1]; }
};

CoincidenceMatrix coincidences_within(const VoteMatrix& matrix, std::span<const std::int32_t> subset,
                                      const RollcallFilter& filter = {});
CoincidenceMatrix coincidences_between(const VoteMatrix& matrix, std::span<const std::int32_t> set_a,
                                       std::span<const std::int32_t> set_b,
                                       const RollcallFilter& filter = {});

// Chance-corrected agreement.  alpha = 1 - Do/De with a nominal binary
// distance over {Yes, No}.  defined is false (alpha NaN) when no pair
// information exists (total <= 1) or expected disagreement is zero.
struct AlphaScore {
    double alpha = 0.0;
    double observed_disagreement = 0.0;
    double expected_disagreement = 0.0;
    std::int64_t votes_used = 0;
    double pair_total = 0.0; // grand total N of the coincidence matrix
    bool defined = false;
};

AlphaScore alpha_from_coincidences(const CoincidenceMatrix& cm);

// Alpha within one declared group.
AlphaScore group_cohesion(const VoteMatrix& matrix, std::string_view group,
                          const RollcallFilter& filter = {});

// Alpha across two distinct declared groups (cross pairs only).
AlphaScore group_coalition(const VoteMatrix& matrix, std::string_view group_a, std::string_view group_b,
                           const RollcallFilter& filter = {});

} // namespace covote
