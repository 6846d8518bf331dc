#pragma once

#include <string>
#include <vector>

#include "efld/bound.hpp"
#include "efld/config.hpp"

namespace efld {

struct DataBundle {
    Dataset train;               // examples + held-out pool (z' source)
    std::vector<Example> test;   // never used as the pool
};

// Dataset construction is deterministic in (config, dataset seed) and shared
// by every run seed. Corruption applies to train and pool; the test split
// keeps clean labels.
DataBundle build_dataset(const RunConfig& cfg);

Model build_model(const RunConfig& cfg, const DataBundle& data);

struct SeedResult {
    std::uint64_t seed = 0;
    BoundLedger ledger;
    Vec w_final;
    double final_train_err = 0.0;
    double final_test_err = 0.0;
};

SeedResult run_one_seed(const RunConfig& cfg, const DataBundle& data, std::uint64_t seed);

// Runs every seed (in parallel up to cfg.threads), writes one ledger CSV per
// seed plus the median/IQR aggregate CSV and the SVG panels into
// cfg.out_dir. Returns the per-seed results in seed order.
std::vector<SeedResult> run_all_seeds(const RunConfig& cfg, const DataBundle& data);

int cmd_train(const RunConfig& cfg);

struct SweepSpec {
    std::string axis;  // alpha | beta | corruption_fraction | n
    std::vector<double> values;
};

int cmd_sweep(const RunConfig& cfg, const SweepSpec& sweep);

struct PlotRequest {
    std::vector<std::string> csv_paths;
    std::vector<std::string> columns{"our_bound"};
    std::string out_path = "plot.svg";
    bool log_y = false;
};

int cmd_plot(const PlotRequest& req);

}  // namespace efld
