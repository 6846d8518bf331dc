#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "efld/bench.hpp"
#include "efld/csvio.hpp"
#include "efld/errors.hpp"
#include "efld/verify.hpp"

namespace {

// exit codes: 0 ok, 1 config, 2 io/format, 3 numeric, 4 verification failure
int classify_and_report(const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    if (dynamic_cast<const efld::config_error*>(&e)) return 1;
    if (dynamic_cast<const efld::io_error*>(&e) ||
        dynamic_cast<const efld::format_error*>(&e))
        return 2;
    if (dynamic_cast<const efld::numeric_error*>(&e) ||
        dynamic_cast<const efld::domain_error*>(&e) ||
        dynamic_cast<const efld::shape_error*>(&e) ||
        dynamic_cast<const efld::unsupported_error*>(&e))
        return 3;
    return 1;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const auto lo = std::stoull(text.substr(0, dots));
        const auto hi = std::stoull(text.substr(dots + 2));
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
        return out;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        out.push_back(std::stoull(text.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

void apply_overrides(efld::RunConfig& cfg, const std::string& data_dir, const std::string& out,
                     const std::string& seeds, int threads) {
    if (!data_dir.empty()) cfg.data_dir = data_dir;
    if (cfg.data_dir.empty()) {
        const char* env = std::getenv("EFLD_DATA_DIR");
        if (env) cfg.data_dir = env;
    }
    if (!out.empty()) cfg.out_dir = out;
    if (!seeds.empty()) cfg.seeds = parse_seed_list(seeds);
    if (threads > 0) cfg.threads = threads;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exponential-family noisy-gradient training lab"};
    app.require_subcommand(1);

    std::string config_path, data_dir, out_dir, seeds;
    int threads = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration file")->required();
        cmd->add_option("--data-dir", data_dir, "IDX dataset directory");
        cmd->add_option("--out", out_dir, "output directory override");
        cmd->add_option("--seeds", seeds, "seed list '0,1,2' or range '0..9'");
        cmd->add_option("--threads", threads, "parallel seed workers");
    };

    auto* train = app.add_subcommand("train", "run all seeds, write ledgers and plots");
    add_common(train);

    auto* sweep = app.add_subcommand("sweep", "repeat a run over one swept axis");
    add_common(sweep);
    std::string axis;
    std::vector<double> values;
    sweep->add_option("--axis", axis, "alpha | beta | corruption_fraction | n")->required();
    sweep->add_option("--values", values, "strictly increasing sweep values")->required();

    auto* verify = app.add_subcommand("verify", "run a property suite with exact oracles");
    std::string suite = "all";
    std::string margins_csv;
    verify->add_option("suite", suite,
                       "divergences|mixture|theorem2|lemmas|gradients|convergence|all");
    verify->add_option("--margins-csv", margins_csv, "write per-trial margins CSV");

    // shorthand for the divergence checks with their per-trial margins CSV
    auto* verify_div = app.add_subcommand("verify-divergences",
                                          "divergence suite + divergence_margins.csv");
    std::string div_csv = "divergence_margins.csv";
    verify_div->add_option("--margins-csv", div_csv, "margins CSV path");

    auto* plot = app.add_subcommand("plot", "render ledger CSV columns as an SVG chart");
    std::vector<std::string> csvs;
    std::string plot_out = "plot.svg";
    std::vector<std::string> columns{"our_bound"};
    bool log_y = false;
    plot->add_option("csv", csvs, "ledger CSV files")->required();
    plot->add_option("--out", plot_out, "output SVG path");
    plot->add_option("--columns", columns, "ledger columns to draw");
    plot->add_flag("--logy", log_y, "log-scale y axis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help/usage
        return code == 0 ? 0 : 1;      // usage problems are config errors
    }

    try {
        if (train->parsed()) {
            efld::RunConfig cfg = efld::load_run_config(config_path);
            apply_overrides(cfg, data_dir, out_dir, seeds, threads);
            return efld::cmd_train(cfg);
        }
        if (sweep->parsed()) {
            efld::RunConfig cfg = efld::load_run_config(config_path);
            apply_overrides(cfg, data_dir, out_dir, seeds, threads);
            return efld::cmd_sweep(cfg, {axis, values});
        }
        if (verify_div->parsed()) {
            suite = "divergences";
            margins_csv = div_csv;
        }
        if (verify->parsed() || verify_div->parsed()) {
            std::vector<std::string> suites =
                suite == "all" ? efld::suite_names() : std::vector<std::string>{suite};
            bool ok = true;
            std::vector<std::string> all_margins{"trial,check,margin"};
            for (const auto& name : suites) {
                const efld::SuiteResult result = efld::run_suite(name);
                efld::print_suite(result);
                ok = ok && result.pass();
                for (const auto& row : result.trial_margins)
                    all_margins.push_back(name + "," + row);
            }
            if (!margins_csv.empty()) {
                std::ofstream out(margins_csv);
                if (!out) throw efld::io_error("cannot write " + margins_csv);
                out << "suite," << all_margins.front() << "\n";
                for (std::size_t i = 1; i < all_margins.size(); ++i)
                    out << all_margins[i] << "\n";
            }
            std::printf("verify: %s\n", ok ? "ALL PASS" : "FAILURES");
            return ok ? 0 : 4;
        }
        if (plot->parsed()) {
            efld::PlotRequest req;
            req.csv_paths = csvs;
            req.columns = columns;
            req.out_path = plot_out;
            req.log_y = log_y;
            return efld::cmd_plot(req);
        }
    } catch (const std::exception& e) {
        return classify_and_report(e);
    }
    return 0;
}
