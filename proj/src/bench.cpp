#include "efld/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "efld/csvio.hpp"
#include "efld/svg.hpp"

namespace efld {

namespace fs = std::filesystem;

DataBundle build_dataset(const RunConfig& cfg) {
    DataBundle out;
    if (cfg.dataset_kind == "synth") {
        out.train = synth_dataset(cfg.synth, cfg.dataset_seed);
        out.test = synth_extra(cfg.synth, cfg.test_count, cfg.dataset_seed);
    } else {
        if (cfg.data_dir.empty())
            throw config_error("mnist dataset needs dataset.data_dir (or --data-dir)");
        IdxStats stats;
        const Dataset full = load_idx(cfg.data_dir + "/train-images-idx3-ubyte",
                                      cfg.data_dir + "/train-labels-idx1-ubyte", &stats);
        const std::size_t n = cfg.subset_n > 0 ? cfg.subset_n : full.n();
        std::size_t pool = cfg.pool_count > 0 ? cfg.pool_count : (n + 3) / 4;
        if (n + pool > full.n()) pool = full.n() - n;
        out.train = subset_with_pool(full.examples, n, pool, full.num_classes, cfg.dataset_seed);
        auto test_raw = read_idx_raw(cfg.data_dir + "/t10k-images-idx3-ubyte",
                                     cfg.data_dir + "/t10k-labels-idx1-ubyte");
        zscore(test_raw, stats);
        out.test = std::move(test_raw);
    }
    if (cfg.corruption > 0.0)
        out.train = corrupt_labels(out.train, cfg.corruption, cfg.dataset_seed);
    return out;
}

Model build_model(const RunConfig& cfg, const DataBundle& data) {
    const int dim = data.train.dim;
    const int classes = data.train.num_classes;
    if (cfg.model_kind == "quadratic") return QuadraticModel{Vec(static_cast<std::size_t>(dim))};
    if (cfg.model_kind == "logistic") return LogisticModel{dim, classes};
    if (cfg.model_kind == "mlp") {
        std::vector<int> layers{dim};
        for (int h : cfg.hidden) layers.push_back(h);
        if (cfg.hidden.empty()) layers.push_back(64);
        layers.push_back(classes);
        return MlpModel{layers};
    }
    throw config_error("model.kind unknown: '" + cfg.model_kind + "'");
}

namespace {

double family_c2(const OptimizerSpec& opt) {
    switch (opt.kind) {
        case OptimizerSpec::Kind::efld:
            return opt.family.c2;
        case OptimizerSpec::Kind::sgld:
            return ExpFamilySpec::gaussian().c2;
        case OptimizerSpec::Kind::noisy_sign_sgd:
            return ExpFamilySpec::bernoulli_pm1().c2;
        default:
            return 1.0;  // noise-free baselines; bound columns stay empty
    }
}

}  // namespace

SeedResult run_one_seed(const RunConfig& cfg, const DataBundle& data, std::uint64_t seed) {
    SeedResult result;
    result.seed = seed;

    const Model model = build_model(cfg, data);
    const std::int64_t spe =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(data.train.n()) / cfg.opt.batch_size);
    const std::int64_t steps = cfg.steps > 0 ? cfg.steps : spe * cfg.epochs;

    BoundConfig bc;
    bc.n = data.train.n();
    bc.c0 = 2.0 * cfg.loss_clamp;
    bc.c2 = family_c2(cfg.opt);
    bc.pairs_per_step = cfg.pairs_per_step;
    bc.eval_every = cfg.eval_every;
    bc.delta_pool = cfg.delta_pool;
    bc.incoh_enabled = cfg.incoh_enabled;
    bc.batch_size = cfg.opt.batch_size;

    RngStream meter_rng = RngStream::child_of(seed, 0xb0d);
    const std::uint64_t err_seed = mix64(seed ^ 0xe55);

    double cached_train_err = std::numeric_limits<double>::quiet_NaN();
    double cached_test_err = std::numeric_limits<double>::quiet_NaN();
    int last_err_epoch = -1;

    RunSetup setup;
    setup.model = model;
    setup.data = &data.train;
    setup.opt = cfg.opt;
    setup.steps = steps;
    setup.steps_per_epoch = spe;
    setup.seed = seed;

    const bool classifier = is_classifier(model);
    std::vector<StepObserver> observers;
    observers.emplace_back([&](const StepInfo& info) {
        if (info.t % cfg.eval_every != 0) return;
        if (classifier &&
            (last_err_epoch < 0 || (info.epoch != last_err_epoch &&
                                    info.epoch % cfg.err_every_epochs == 0))) {
            cached_train_err = test_error_subsample(model, *info.w, data.train.examples,
                                                    cfg.err_subsample, err_seed);
            cached_test_err = data.test.empty()
                                  ? std::numeric_limits<double>::quiet_NaN()
                                  : test_error_subsample(model, *info.w, data.test,
                                                         cfg.err_subsample, err_seed);
            last_err_epoch = info.epoch;
        }
        record_step(result.ledger, info, model, data.train, bc, meter_rng, cached_train_err,
                    cached_test_err);
    });

    const Trajectory traj = run_training(setup, observers);
    result.w_final = traj.w_final;
    result.final_train_err = std::numeric_limits<double>::quiet_NaN();
    result.final_test_err = std::numeric_limits<double>::quiet_NaN();
    if (classifier) {
        result.final_train_err = test_error(model, result.w_final, data.train.examples);
        result.final_test_err =
            data.test.empty() ? std::numeric_limits<double>::quiet_NaN()
                              : test_error(model, result.w_final, data.test);
        if (!result.ledger.rows.empty()) {
            result.ledger.rows.back().train_err = result.final_train_err;
            result.ledger.rows.back().test_err = result.final_test_err;
        }
    }
    return result;
}

std::vector<SeedResult> run_all_seeds(const RunConfig& cfg, const DataBundle& data) {
    std::vector<SeedResult> results(cfg.seeds.size());
    std::atomic<std::size_t> next{0};
    const int workers =
        std::max(1, std::min<int>(cfg.threads, static_cast<int>(cfg.seeds.size())));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int wk = 0; wk < workers; ++wk) {
        pool.emplace_back([&, wk] {
            try {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cfg.seeds.size()) break;
                    results[i] = run_one_seed(cfg, data, cfg.seeds[i]);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(wk)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

namespace {

std::vector<double> column_median(const std::vector<SeedResult>& results,
                                  double (*get)(const LedgerRow&)) {
    const std::size_t rows = results.front().ledger.rows.size();
    std::vector<double> out(rows);
    std::vector<double> tmp;
    for (std::size_t i = 0; i < rows; ++i) {
        tmp.clear();
        for (const auto& r : results) tmp.push_back(get(r.ledger.rows[i]));
        out[i] = median_of(tmp);
    }
    return out;
}

std::vector<double> epoch_axis(const BoundLedger& ledger, std::int64_t spe) {
    std::vector<double> out;
    out.reserve(ledger.rows.size());
    for (const auto& r : ledger.rows)
        out.push_back(static_cast<double>(r.t) / static_cast<double>(spe));
    return out;
}

void write_run_plots(const RunConfig& cfg, const std::vector<SeedResult>& results) {
    if (results.front().ledger.rows.empty()) return;
    const std::int64_t spe = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(results.front().ledger.rows.back().t) /
               std::max(1, cfg.epochs));
    const auto x = epoch_axis(results.front().ledger, spe);

    const auto our = column_median(results, [](const LedgerRow& r) { return r.our_bound; });
    const auto li = column_median(results, [](const LedgerRow& r) { return r.li_bound; });
    const auto tr = column_median(results, [](const LedgerRow& r) { return r.train_err; });
    const auto te = column_median(results, [](const LedgerRow& r) { return r.test_err; });

    std::vector<Series> bounds{{"our_bound", x, our}};
    if (std::isfinite(li.front())) bounds.push_back({"li_bound", x, li});
    write_line_svg(cfg.out_dir + "/" + cfg.name + "_bounds.svg",
                   {cfg.name + ": generalization bounds", "epoch", "bound", true}, bounds);

    const bool have_errors =
        std::any_of(tr.begin(), tr.end(), [](double v) { return std::isfinite(v); });
    if (!have_errors) return;  // error panels need a classifier run

    write_line_svg(cfg.out_dir + "/" + cfg.name + "_errors.svg",
                   {cfg.name + ": errors", "epoch", "error", false},
                   {{"train_err", x, tr}, {"test_err", x, te}});

    std::vector<double> cover(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) cover[i] = tr[i] + our[i];
    write_line_svg(cfg.out_dir + "/" + cfg.name + "_coverage.svg",
                   {cfg.name + ": bound coverage", "epoch", "error", false},
                   {{"train_err + our_bound", x, cover}, {"test_err", x, te}});
}

}  // namespace

int cmd_train(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const DataBundle data = build_dataset(cfg);
    const auto results = run_all_seeds(cfg, data);
    std::vector<BoundLedger> ledgers;
    for (const auto& r : results) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s_seed%llu.csv", cfg.name.c_str(),
                      static_cast<unsigned long long>(r.seed));
        write_ledger_csv(cfg.out_dir + "/" + name, r.ledger);
        ledgers.push_back(r.ledger);
    }
    write_aggregate_csv(cfg.out_dir + "/" + cfg.name + "_aggregate.csv", ledgers);
    write_run_plots(cfg, results);
    for (const auto& r : results)
        std::printf("seed %llu: final train_err=%.4f test_err=%.4f our_bound=%.6g\n",
                    static_cast<unsigned long long>(r.seed), r.final_train_err, r.final_test_err,
                    r.ledger.rows.empty() ? 0.0 : r.ledger.rows.back().our_bound);
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const SweepSpec& sweep) {
    if (sweep.values.empty()) throw config_error("sweep: empty value list");
    for (std::size_t i = 1; i < sweep.values.size(); ++i)
        if (!(sweep.values[i] > sweep.values[i - 1]))
            throw config_error("sweep: values must be strictly increasing");
    const bool known = sweep.axis == "alpha" || sweep.axis == "beta" ||
                       sweep.axis == "corruption_fraction" || sweep.axis == "n";
    if (!known) throw config_error("sweep: unknown axis '" + sweep.axis + "'");

    fs::create_directories(cfg.out_dir);
    std::vector<LongRow> long_rows;
    std::vector<Series> overlay;

    if (sweep.axis == "n") {
        // bounds scale exactly as 1/n, so one base run is replayed per value
        const DataBundle data = build_dataset(cfg);
        const auto results = run_all_seeds(cfg, data);
        BoundConfig bc;
        bc.n = data.train.n();
        bc.c0 = 2.0 * cfg.loss_clamp;
        bc.c2 = family_c2(cfg.opt);
        for (double value : sweep.values) {
            const auto n_value = static_cast<std::size_t>(value);
            if (n_value == 0) throw config_error("sweep: n values must be positive");
            std::vector<double> x, y;
            std::vector<std::vector<double>> per_seed;
            for (const auto& r : results)
                per_seed.push_back(replay_our_bound(r.ledger, bc, 1.0, n_value));
            const std::size_t rows = per_seed.front().size();
            std::vector<double> tmp;
            for (std::size_t i = 0; i < rows; ++i) {
                tmp.clear();
                for (const auto& s : per_seed) tmp.push_back(s[i]);
                LedgerRow row = results.front().ledger.rows[i];
                row.our_bound = median_of(tmp);
                long_rows.push_back({value, row});
                x.push_back(static_cast<double>(row.t));
                y.push_back(row.our_bound);
            }
            overlay.push_back({"n=" + std::to_string(n_value), x, y});
        }
    } else {
        for (double value : sweep.values) {
            RunConfig c = cfg;
            char suffix[48];
            std::snprintf(suffix, sizeof(suffix), "_%s_%g", sweep.axis.c_str(), value);
            c.name = cfg.name + suffix;
            if (sweep.axis == "alpha") {
                c.opt.alpha = Schedule::constant(value);
                c.opt.adaptive_alpha = false;
            } else if (sweep.axis == "beta") {
                c.beta = value;
                c.opt.beta = value;
                c.opt.sigma_over_eta = 0.0;
            } else {
                c.corruption = value;
            }
            const DataBundle data = build_dataset(c);
            const auto results = run_all_seeds(c, data);
            std::vector<BoundLedger> ledgers;
            for (const auto& r : results) ledgers.push_back(r.ledger);

            std::vector<double> final_tests;
            for (const auto& r : results) final_tests.push_back(r.final_test_err);
            const double test_med = median_of(final_tests);

            const std::size_t rows = results.front().ledger.rows.size();
            std::vector<double> x, y, tmp;
            for (std::size_t i = 0; i < rows; ++i) {
                tmp.clear();
                for (const auto& r : results) tmp.push_back(r.ledger.rows[i].our_bound);
                LedgerRow row = results.front().ledger.rows[i];
                row.our_bound = median_of(tmp);
                long_rows.push_back({value, row});
                x.push_back(static_cast<double>(row.t));
                y.push_back(row.our_bound);
            }
            char label[96];
            std::snprintf(label, sizeof(label), "%s=%g (test %.3f)", sweep.axis.c_str(), value,
                          test_med);
            overlay.push_back({label, x, y});
        }
    }

    write_long_csv(cfg.out_dir + "/" + cfg.name + "_sweep_" + sweep.axis + ".csv", sweep.axis,
                   long_rows);
    write_line_svg(cfg.out_dir + "/" + cfg.name + "_sweep_" + sweep.axis + ".svg",
                   {cfg.name + ": sweep over " + sweep.axis, "step", "our_bound", true}, overlay);
    return 0;
}

int cmd_plot(const PlotRequest& req) {
    if (req.csv_paths.empty()) throw config_error("plot: no csv inputs");
    std::vector<Series> series;
    for (const auto& path : req.csv_paths) {
        const BoundLedger ledger = read_ledger_csv(path);
        for (const auto& col : req.columns) {
            Series s;
            const auto stem = fs::path(path).stem().string();
            s.label = req.csv_paths.size() > 1 ? stem + ":" + col : col;
            for (const auto& row : ledger.rows) {
                s.x.push_back(static_cast<double>(row.t));
                s.y.push_back(ledger_field(row, col));
            }
            series.push_back(std::move(s));
        }
    }
    write_line_svg(req.out_path, {"ledger columns", "step", "value", req.log_y}, series);
    return 0;
}

}  // namespace efld
