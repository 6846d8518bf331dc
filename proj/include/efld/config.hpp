#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "efld/engine.hpp"

namespace efld {

// Minimal TOML-style document: [section] tables, key = value pairs with
// strings, numbers, booleans and flat arrays, '#' comments. Keys are
// addressed as "section.key". Unknown syntax raises a config error naming
// the line.
class KvDoc {
  public:
    static KvDoc parse_file(const std::string& path);
    static KvDoc parse(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const;
    double num(const std::string& key, double def) const;
    double num_required(const std::string& key) const;
    std::int64_t integer(const std::string& key, std::int64_t def) const;
    bool boolean(const std::string& key, bool def) const;
    std::string str(const std::string& key, const std::string& def) const;
    std::vector<double> num_list(const std::string& key) const;
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  private:
    struct Value {
        std::string raw;         // scalar form
        std::vector<std::string> list;  // array form
        bool is_list = false;
        bool is_string = false;
    };
    std::map<std::string, Value> values_;
    std::string origin_;

    const Value* find(const std::string& key) const;
};

// One experiment: dataset + model + optimizer + horizon + seeds + metering.
struct RunConfig {
    std::string name = "run";

    // dataset
    std::string dataset_kind = "synth";  // synth | mnist
    SynthSpec synth;
    double corruption = 0.0;
    std::size_t subset_n = 0;      // mnist: training subset size (0 = all)
    std::size_t pool_count = 0;    // held-out pool size (0 = n/4)
    std::size_t test_count = 2000; // synth test examples
    std::uint64_t dataset_seed = 42;  // dataset generation is seed-fixed across run seeds
    std::string data_dir;          // idx file directory

    // model
    std::string model_kind = "logistic";  // quadratic | logistic | mlp
    std::vector<int> hidden;              // mlp hidden sizes
    double loss_clamp = 4.0;

    // optimizer
    OptimizerSpec opt;
    double beta = 0.0;  // SGLD inverse temperature; >0 derives sigma_t = sqrt(2 eta_t / beta)
    double sigma_over_eta = 0.0;  // alternative: sigma_t = r * eta_t (fixed alpha = r)

    // run
    int epochs = 10;
    std::int64_t steps = 0;  // overrides epochs when > 0
    std::vector<std::uint64_t> seeds{0};
    int threads = 1;
    std::string out_dir = "out";

    // bound metering
    int pairs_per_step = 20;
    int eval_every = 1;
    int delta_pool = 64;
    bool incoh_enabled = true;
    int err_every_epochs = 1;
    std::size_t err_subsample = 0;  // 0 = full
};

RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_doc(const KvDoc& doc);

}  // namespace efld
