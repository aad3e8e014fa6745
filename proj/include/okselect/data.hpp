#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "okselect/engine.hpp"
#include "okselect/kernels.hpp"

namespace okselect {

enum class Task { classification, regression };

Task task_from_name(const std::string& name);

struct Dataset {
    std::string name;
    Task task = Task::regression;
    long rows = 0;
    int dim = 0;
    std::vector<double> features;  // rows x dim, row-major
    std::vector<double> labels;

    std::span<const double> row(long t) const {
        return {features.data() + static_cast<std::size_t>(t) * dim,
                static_cast<std::size_t>(dim)};
    }
    StreamView view(const std::vector<long>* order = nullptr) const {
        StreamView v;
        v.features = features.data();
        v.labels = labels.data();
        // a truncated permutation shortens the stream
        v.rows = order ? static_cast<long>(order->size()) : rows;
        v.dim = dim;
        v.order = order ? order->data() : nullptr;
        return v;
    }
};

struct StreamOrder {
    std::vector<long> permutation;
    std::uint64_t seed = 0;
};

// LIBSVM text: `label idx:val ...` with 1-based indices; absent indices are
// zero and d is the largest index seen. Duplicate indices on a line keep the
// last value and emit a warning.
Dataset parse_libsvm(std::string_view text, std::vector<std::string>* warnings = nullptr);

// Rectangular numeric CSV; a header row is skipped when its first row is
// non-numeric. label_column indexes the original columns.
Dataset parse_csv(std::string_view text, int label_column,
                  std::vector<std::string>* warnings = nullptr);

std::string serialize_libsvm(const Dataset& data);

// Per-feature min-max onto [-1,1] (constant columns to 0); regression labels
// min-max onto [0,1]; classification labels to {-1,+1} (smaller raw -> -1).
Dataset preprocess(const Dataset& raw, Task task);

// Fisher-Yates shuffle of [0, rows) from a seeded generator.
StreamOrder permute(long rows, std::uint64_t seed);

// Takes the first `limit` rows of `order` (post-permutation truncation).
StreamOrder truncate(StreamOrder order, long limit);

// Realizable regression stream: labels are an RKHS function of norm <= radius
// with values in [0,1], plus optional noise (clipped back into [0,1]).
Dataset synth_rkhs_regression(long rows, int dim, const KernelSpec& spec, double radius,
                              double noise, std::uint64_t seed);

// Fixed per-arm losses for selector-level tests: the good arm always incurs
// good_loss, every other arm bad_loss.
struct SeparationStream {
    int good_arm = 0;
    double good_loss = 0.0;
    double bad_loss = 1.0;
    double loss_for(int arm) const { return arm == good_arm ? good_loss : bad_loss; }
};

}  // namespace okselect
