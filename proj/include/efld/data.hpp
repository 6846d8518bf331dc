#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "efld/rng.hpp"
#include "efld/vecops.hpp"

namespace efld {

struct Example {
    Vec x;
    int y = 0;
};

// Training examples plus a disjoint held-out pool used as the source of
// replacement samples z' when estimating gradient discrepancy. The pool is
// never the test set.
struct Dataset {
    std::vector<Example> examples;
    std::vector<Example> held_out_pool;
    int dim = 0;
    int num_classes = 0;

    std::size_t n() const { return examples.size(); }
};

struct SynthSpec {
    int dim = 2;
    std::size_t n = 100;  // training examples; the pool is generated on top
    int classes = 2;
    double separation = 1.0;
};

// Gaussian class blobs with unit within-class variance and class centers
// `separation` apart from the origin. Generates n training examples plus
// ceil(n/4) pool examples (20% of the total). Deterministic per seed.
Dataset synth_dataset(const SynthSpec& spec, std::uint64_t seed);

// Extra i.i.d. examples from the same blob model (used for test splits).
std::vector<Example> synth_extra(const SynthSpec& spec, std::size_t count, std::uint64_t seed);

// Replaces the label of exactly floor(fraction*n) training examples (chosen
// uniformly without replacement) by a uniformly random different label; the
// held-out pool is corrupted at the same rate so it keeps representing the
// corrupted distribution.
Dataset corrupt_labels(const Dataset& data, double fraction, std::uint64_t seed);

// Misclassification rate helpers live with the models (test_error).

struct IdxStats {
    double mean = 0.0;
    double stdev = 1.0;
};

// Raw IDX pair: pixels scaled to [0,1], labels as-is. Format errors name
// the offending byte offset.
std::vector<Example> read_idx_raw(const std::string& images_path, const std::string& labels_path);

// IDX pair loaded and z-scored with the file's own pixel mean/std (the
// training-set convention); out_stats receives the stats when non-null.
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 IdxStats* out_stats = nullptr);

void zscore(std::vector<Example>& examples, const IdxStats& stats);

// Uniform subset of `count` examples without replacement plus `pool_count`
// more (disjoint) for the held-out pool. Deterministic per seed.
Dataset subset_with_pool(const std::vector<Example>& all, std::size_t count,
                         std::size_t pool_count, int num_classes, std::uint64_t seed);

}  // namespace efld
