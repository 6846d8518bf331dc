#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "efld/bench.hpp"
#include "efld/csvio.hpp"

using namespace efld;
namespace fs = std::filesystem;

namespace {

RunConfig quick_config(const std::string& out) {
    const std::string text = R"(
[dataset]
kind = "synth"
dim = 4
n = 80
classes = 2
separation = 1.5

[model]
kind = "logistic"

[optimizer]
kind = "sgld"
batch_size = 8
eta0 = 0.05
eta_schedule = "constant"
beta = 5000

[run]
epochs = 10
seeds = [0, 1]
threads = 2

[bound]
pairs_per_step = 4
delta_pool = 6
)";
    RunConfig cfg = run_config_from_doc(KvDoc::parse(text));
    cfg.out_dir = out;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("train command writes per-seed ledgers, aggregate and plots") {
    const std::string out = "bench_out_train";
    fs::remove_all(out);
    RunConfig cfg = quick_config(out);
    CHECK(cmd_train(cfg) == 0);
    const BoundLedger seed0 = read_ledger_csv(out + "/run_seed0.csv");
    CHECK(seed0.rows.size() == 100);  // 10 epochs x 10 steps
    CHECK(fs::exists(out + "/run_seed1.csv"));
    CHECK(fs::exists(out + "/run_aggregate.csv"));
    CHECK(fs::exists(out + "/run_bounds.svg"));
    CHECK(fs::exists(out + "/run_errors.svg"));
    CHECK(fs::exists(out + "/run_coverage.svg"));

    // end-to-end determinism: byte-identical outputs on a rerun
    const std::string csv_before = slurp(out + "/run_seed0.csv");
    const std::string svg_before = slurp(out + "/run_bounds.svg");
    CHECK(cmd_train(cfg) == 0);
    CHECK(slurp(out + "/run_seed0.csv") == csv_before);
    CHECK(slurp(out + "/run_bounds.svg") == svg_before);
    fs::remove_all(out);
}

TEST_CASE("sweep validates its axis and ordering") {
    RunConfig cfg = quick_config("bench_out_sweep");
    CHECK_THROWS_AS(cmd_sweep(cfg, {"alpha", {}}), config_error);
    CHECK_THROWS_AS(cmd_sweep(cfg, {"alpha", {1.0, 1.0}}), config_error);
    CHECK_THROWS_AS(cmd_sweep(cfg, {"spin", {1.0}}), config_error);
    fs::remove_all("bench_out_sweep");
}

TEST_CASE("n sweep replays bounds with exact 1/n scaling") {
    const std::string out = "bench_out_nsweep";
    fs::remove_all(out);
    RunConfig cfg = quick_config(out);
    cfg.seeds = {0};
    CHECK(cmd_sweep(cfg, {"n", {500.0, 1000.0, 2000.0}}) == 0);
    const std::string text = slurp(out + "/run_sweep_n.csv");
    CHECK(text.rfind("n,t,", 0) == 0);

    // final bound rows: value 500 must be exactly 4x the value-2000 row
    double b500 = -1, b2000 = -1;
    std::stringstream ss(text);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
        std::stringstream row(line);
        std::string field;
        std::getline(row, field, ',');
        const double value = std::stod(field);
        std::vector<std::string> rest;
        while (std::getline(row, field, ',')) rest.push_back(field);
        const double bound = std::stod(rest[10]);  // our_bound column
        if (value == 500) b500 = bound;
        if (value == 2000) b2000 = bound;
    }
    CHECK(b500 == 4.0 * b2000);
    fs::remove_all(out);
}

TEST_CASE("plot renders ledger columns and rejects unknown ones") {
    const std::string out = "bench_out_plot";
    fs::remove_all(out);
    RunConfig cfg = quick_config(out);
    cfg.seeds = {0};
    CHECK(cmd_train(cfg) == 0);
    PlotRequest req;
    req.csv_paths = {out + "/run_seed0.csv"};
    req.columns = {"our_bound", "mean_disc"};
    req.out_path = out + "/panel.svg";
    req.log_y = true;
    CHECK(cmd_plot(req) == 0);
    CHECK(fs::exists(out + "/panel.svg"));
    req.columns = {"no_such_column"};
    CHECK_THROWS_AS(cmd_plot(req), format_error);
    req.csv_paths = {out + "/does_not_exist.csv"};
    CHECK_THROWS_AS(cmd_plot(req), io_error);
    fs::remove_all(out);
}

TEST_CASE("widely separated blobs train to zero error") {
    RunConfig cfg;
    cfg.dataset_kind = "synth";
    cfg.synth = SynthSpec{5, 200, 2, 10.0};
    cfg.test_count = 100;
    cfg.model_kind = "logistic";
    cfg.opt.kind = OptimizerSpec::Kind::sgd;
    cfg.opt.batch_size = 20;
    cfg.opt.eta = Schedule::constant(0.5);
    cfg.epochs = 30;
    cfg.seeds = {0};
    cfg.pairs_per_step = 1;
    cfg.eval_every = 1000000;
    cfg.err_every_epochs = 1000000;
    cfg.delta_pool = 0;
    cfg.incoh_enabled = false;
    const DataBundle data = build_dataset(cfg);
    const SeedResult r = run_one_seed(cfg, data, 0);
    CHECK(r.final_train_err == 0.0);
    CHECK(r.final_test_err == 0.0);
}

TEST_CASE("corrupted training sets keep the pool on the same distribution") {
    RunConfig cfg = quick_config("unused");
    cfg.corruption = 0.5;
    const DataBundle bundle = build_dataset(cfg);
    const DataBundle clean = [&] {
        RunConfig c2 = cfg;
        c2.corruption = 0.0;
        return build_dataset(c2);
    }();
    std::size_t changed_train = 0, changed_pool = 0;
    for (std::size_t i = 0; i < bundle.train.n(); ++i)
        changed_train += bundle.train.examples[i].y != clean.train.examples[i].y ? 1u : 0u;
    for (std::size_t i = 0; i < bundle.train.held_out_pool.size(); ++i)
        changed_pool +=
            bundle.train.held_out_pool[i].y != clean.train.held_out_pool[i].y ? 1u : 0u;
    CHECK(changed_train == bundle.train.n() / 2);
    CHECK(changed_pool == bundle.train.held_out_pool.size() / 2);
    // test labels are untouched
    for (std::size_t i = 0; i < bundle.test.size(); ++i)
        CHECK(bundle.test[i].y == clean.test[i].y);
}
