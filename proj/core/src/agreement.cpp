#include "covote/agreement.hpp"

#include <cmath>
#include <limits>

namespace covote {

namespace {

// Kahan compensated accumulator; roll-call contributions are summed in a
// fixed order so results do not depend on member ordering.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

struct CastCounts {
    std::int64_t yes = 0;
    std::int64_t no = 0;
    std::int64_t total() const { return yes + no; }
};

CastCounts count_cast(std::span<const VoteValue> column, std::span<const std::int32_t> subset) {
    CastCounts c;
    for (std::int32_t i : subset) {
        VoteValue v = column[static_cast<std::size_t>(i)];
        if (v == VoteValue::Yes) ++c.yes;
        else if (v == VoteValue::No) ++c.no;
    }
    return c;
}

void check_disjoint(std::span<const std::int32_t> set_a, std::span<const std::int32_t> set_b) {
    for (std::int32_t a : set_a) {
        for (std::int32_t b : set_b) {
            if (a == b) throw precondition_error("member sets must be disjoint");
        }
    }
}

} // namespace

VoteCoincidence vote_coincidences_within(std::span<const VoteValue> column,
                                         std::span<const std::int32_t> subset) {
    VoteCoincidence vc;
    CastCounts c = count_cast(column, subset);
    std::int64_t m = c.total();
    if (m < 2) return vc;

    // Ordered pairs of distinct members: diagonal k(k-1), off-diagonal a*b.
    vc.pairs[0][0] = c.yes * (c.yes - 1);
    vc.pairs[1][1] = c.no * (c.no - 1);
    vc.pairs[0][1] = c.yes * c.no;
    vc.pairs[1][0] = c.no * c.yes;
    vc.scale_num = 1;
    vc.scale_den = m - 1;
    // m(m-1)/(m-1): integer quotient, so the division is exact.
    vc.total_contribution =
        static_cast<double>((vc.pairs[0][0] + vc.pairs[0][1] + vc.pairs[1][0] + vc.pairs[1][1]) * vc.scale_num) /
        static_cast<double>(vc.scale_den);
    vc.included = true;
    return vc;
}

VoteCoincidence vote_coincidences_between(std::span<const VoteValue> column,
                                          std::span<const std::int32_t> set_a,
                                          std::span<const std::int32_t> set_b) {
    VoteCoincidence vc;
    CastCounts a = count_cast(column, set_a);
    CastCounts b = count_cast(column, set_b);
    std::int64_t ma = a.total();
    std::int64_t mb = b.total();
    if (ma < 1 || mb < 1) return vc;

    // Ordered cross pairs in both directions; 2*ma*mb pairs in total.
    std::int64_t ca[2] = {a.yes, a.no};
    std::int64_t cb[2] = {b.yes, b.no};
    for (int c = 0; c < 2; ++c) {
        for (int cp = 0; cp < 2; ++cp) {
            vc.pairs[c][cp] = ca[c] * cb[cp] + cb[c] * ca[cp];
        }
    }
    vc.scale_num = ma + mb;
    vc.scale_den = 2 * ma * mb;
    // 2*ma*mb*(ma+mb) / (2*ma*mb): integer quotient, division exact.
    vc.total_contribution =
        static_cast<double>((vc.pairs[0][0] + vc.pairs[0][1] + vc.pairs[1][0] + vc.pairs[1][1]) * vc.scale_num) /
        static_cast<double>(vc.scale_den);
    vc.included = true;
    return vc;
}

namespace {

template <typename PerVote>
CoincidenceMatrix accumulate(const VoteMatrix& matrix, const RollcallFilter& filter, PerVote&& per_vote) {
    CoincidenceMatrix cm;
    KahanSum cells[2][2];
    KahanSum total;
    for (std::int32_t u = 0; u < matrix.rollcall_count(); ++u) {
        if (filter && !filter(matrix.rollcall(u))) continue;
        VoteCoincidence vc = per_vote(matrix.column(u));
        if (!vc.included) {
            ++cm.votes_skipped;
            continue;
        }
        for (int c = 0; c < 2; ++c) {
            for (int cp = 0; cp < 2; ++cp) {
                cells[c][cp].add(static_cast<double>(vc.pairs[c][cp] * vc.scale_num) /
                                 static_cast<double>(vc.scale_den));
            }
        }
        total.add(vc.total_contribution);
        ++cm.votes_used;
    }
    for (int c = 0; c < 2; ++c)
        for (int cp = 0; cp < 2; ++cp) cm.entries[c][cp] = cells[c][cp].sum;
    cm.total = total.sum;
    return cm;
}

} // namespace

CoincidenceMatrix coincidences_within(const VoteMatrix& matrix, std::span<const std::int32_t> subset,
                                      const RollcallFilter& filter) {
    return accumulate(matrix, filter,
                      [&](std::span<const VoteValue> column) { return vote_coincidences_within(column, subset); });
}

CoincidenceMatrix coincidences_between(const VoteMatrix& matrix, std::span<const std::int32_t> set_a,
                                       std::span<const std::int32_t> set_b, const RollcallFilter& filter) {
    check_disjoint(set_a, set_b);
    return accumulate(matrix, filter, [&](std::span<const VoteValue> column) {
        return vote_coincidences_between(column, set_a, set_b);
    });
}

AlphaScore alpha_from_coincidences(const CoincidenceMatrix& cm) {
    AlphaScore score;
    score.votes_used = cm.votes_used;
    score.pair_total = cm.total;
    score.alpha = std::numeric_limits<double>::quiet_NaN();

    double n = cm.total;
    if (cm.votes_used == 0 || n <= 1.0) return score;

    double n_yes = cm.marginal(0);
    double n_no = cm.marginal(1);
    // Nominal binary distance: only the off-diagonal disagrees.
    score.observed_disagreement = (cm.entries[0][1] + cm.entries[1][0]) / n;
    score.expected_disagreement = 2.0 * n_yes * n_no / (n * (n - 1.0));
    if (score.expected_disagreement == 0.0) return score;

    score.alpha = 1.0 - score.observed_disagreement / score.expected_disagreement;
    score.defined = true;
    return score;
}

AlphaScore group_cohesion(const VoteMatrix& matrix, std::string_view group, const RollcallFilter& filter) {
    MemberSet subset = matrix.subset_by_group(group);
    return alpha_from_coincidences(coincidences_within(matrix, subset, filter));
}

AlphaScore group_coalition(const VoteMatrix& matrix, std::string_view group_a, std::string_view group_b,
                           const RollcallFilter& filter) {
    if (group_a == group_b) throw precondition_error("coalition requires two distinct groups");
    MemberSet set_a = matrix.subset_by_group(group_a);
    MemberSet set_b = matrix.subset_by_group(group_b);
    return alpha_from_coincidences(coincidences_between(matrix, set_a, set_b, filter));
}

} // namespace covote
