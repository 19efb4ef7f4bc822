#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "portflow/model.hpp"

namespace portflow {

inline constexpr double kHorizontalTol = 1e-6;

struct AlignmentCandidate {
    std::size_t flat_edge = 0;
    double dy = 0.0;  // current |y(source dummy) - y(target dummy)|
};

enum class AlignOutcome { Accepted, RejectedInfeasible, RejectedOverlap };
const char* to_string(AlignOutcome o);

/// Inter-port flat edges ordered by ascending vertical deviation, ties by edge index.
std::vector<AlignmentCandidate> collect_candidates(const FlatLayout& layout, const AuxGraph& aux);

/// Greedy alignment state: x is frozen, the y system accumulates accepted alignments.
class Aligner {
public:
    Aligner(const AuxGraph& aux, const StressConfig& cfg, const FlatLayout& layout);

    AlignOutcome try_align(const AlignmentCandidate& c);
    FlatLayout layout() const;
    double stress() const { return model_.stress(xs_, ys_); }
    const std::vector<SeparationConstraint>& standing() const { return standing_; }
    std::size_t variable_count() const { return ys_.size(); }

private:
    /// Equalities freezing both endpoint port offsets and levelling the two dummies.
    std::vector<SeparationConstraint> alignment(std::size_t flat_edge) const;
    /// Keeps every other proper node clear of the would-be horizontal segment, tied to `ghost`.
    std::vector<SeparationConstraint> ghost_constraints(std::size_t flat_edge, std::size_t ghost) const;

    LayoutModel model_;
    std::vector<double> xs_, ys_;
    std::vector<SeparationConstraint> standing_;
    std::vector<SeparationConstraint> structural_;  // standing_ minus every non-overlap constraint
};

struct AlignResult {
    FlatLayout layout;
    std::vector<std::size_t> accepted;                          // flat edge indices
    std::vector<std::pair<std::size_t, AlignOutcome>> rejected;
    double stress_before = 0.0;
    double stress_after = 0.0;
};

/// Stage 2: a single greedy pass over the candidates, re-projecting after each acceptance.
AlignResult align_layout(const FlatLayout& layout, const AuxGraph& aux, const StressConfig& cfg);

}  // namespace portflow
