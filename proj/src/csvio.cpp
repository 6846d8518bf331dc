#include "efld/csvio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "efld/errors.hpp"

namespace efld {

const char* const kLedgerHeader =
    "t,epoch,eta,sigma,alpha,mean_disc,mean_grad_sq,incoh_surrogate,delta_hat,alpha_floor,"
    "our_bound,li_bound,train_err,test_err";

namespace {

std::string fmt(double v) {
    char buf[40];
    if (std::isnan(v)) return "nan";
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& path, const char* col) {
    if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw format_error(path + ": cannot parse value '" + s + "' in column " + col);
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

void write_ledger_csv(const std::string& path, const BoundLedger& ledger) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path);
    out << kLedgerHeader << "\n";
    for (const auto& r : ledger.rows) {
        out << r.t << ',' << r.epoch << ',' << fmt(r.eta) << ',' << fmt(r.sigma) << ','
            << fmt(r.alpha) << ',' << fmt(r.mean_disc) << ',' << fmt(r.mean_grad_sq) << ','
            << fmt(r.incoh_surrogate) << ',' << fmt(r.delta_hat) << ',' << fmt(r.alpha_floor)
            << ',' << fmt(r.our_bound) << ',' << fmt(r.li_bound) << ',' << fmt(r.train_err)
            << ',' << fmt(r.test_err) << "\n";
    }
    if (!out) throw io_error("short write to " + path);
}

BoundLedger read_ledger_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw format_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto expect = split_csv(kLedgerHeader);
    const auto got = split_csv(line);
    if (got.size() != expect.size())
        throw format_error(path + ": expected " + std::to_string(expect.size()) +
                           " columns, got " + std::to_string(got.size()));
    for (std::size_t i = 0; i < expect.size(); ++i)
        if (got[i] != expect[i])
            throw format_error(path + ": column " + std::to_string(i + 1) + " is '" + got[i] +
                               "', expected '" + expect[i] + "'");
    BoundLedger ledger;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != expect.size())
            throw format_error(path + ": line " + std::to_string(line_no) + " has " +
                               std::to_string(f.size()) + " fields");
        LedgerRow r;
        r.t = static_cast<std::int64_t>(parse_double(f[0], path, "t"));
        r.epoch = static_cast<int>(parse_double(f[1], path, "epoch"));
        r.eta = parse_double(f[2], path, "eta");
        r.sigma = parse_double(f[3], path, "sigma");
        r.alpha = parse_double(f[4], path, "alpha");
        r.mean_disc = parse_double(f[5], path, "mean_disc");
        r.mean_grad_sq = parse_double(f[6], path, "mean_grad_sq");
        r.incoh_surrogate = parse_double(f[7], path, "incoh_surrogate");
        r.delta_hat = parse_double(f[8], path, "delta_hat");
        r.alpha_floor = parse_double(f[9], path, "alpha_floor");
        r.our_bound = parse_double(f[10], path, "our_bound");
        r.li_bound = parse_double(f[11], path, "li_bound");
        r.train_err = parse_double(f[12], path, "train_err");
        r.test_err = parse_double(f[13], path, "test_err");
        ledger.rows.push_back(r);
    }
    if (ledger.rows.empty()) throw format_error(path + ": no data rows");
    // rebuild replay contributions from the cumulative bound series
    double prev_sq = 0.0;
    for (auto& r : ledger.rows) {
        const double cur_sq = r.our_bound * r.our_bound;
        r.ours_contrib = std::max(cur_sq - prev_sq, 0.0);  // up to the shared constant
        prev_sq = cur_sq;
        if (std::isfinite(r.sigma)) ledger.sgld_rows = true;
    }
    return ledger;
}

double median_of(std::vector<double> v) { return quantile_of(std::move(v), 0.5); }

double quantile_of(std::vector<double> v, double q) {
    if (v.empty()) throw domain_error("quantile: empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

void write_aggregate_csv(const std::string& path, const std::vector<BoundLedger>& ledgers) {
    if (ledgers.empty()) throw domain_error("aggregate: no ledgers");
    const std::size_t rows = ledgers.front().rows.size();
    for (const auto& l : ledgers)
        if (l.rows.size() != rows)
            throw domain_error("aggregate: ledgers have differing row counts");
    static const char* cols[] = {"eta",       "sigma",         "alpha",     "mean_disc",
                                 "mean_grad_sq", "incoh_surrogate", "delta_hat", "alpha_floor",
                                 "our_bound", "li_bound",      "train_err", "test_err"};
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path);
    out << "t,epoch";
    for (const char* c : cols) out << ',' << c << "_med," << c << "_q25," << c << "_q75";
    out << "\n";
    auto field = [](const LedgerRow& r, int c) -> double {
        switch (c) {
            case 0: return r.eta;
            case 1: return r.sigma;
            case 2: return r.alpha;
            case 3: return r.mean_disc;
            case 4: return r.mean_grad_sq;
            case 5: return r.incoh_surrogate;
            case 6: return r.delta_hat;
            case 7: return r.alpha_floor;
            case 8: return r.our_bound;
            case 9: return r.li_bound;
            case 10: return r.train_err;
            default: return r.test_err;
        }
    };
    for (std::size_t i = 0; i < rows; ++i) {
        out << ledgers.front().rows[i].t << ',' << ledgers.front().rows[i].epoch;
        for (int c = 0; c < 12; ++c) {
            std::vector<double> v;
            v.reserve(ledgers.size());
            for (const auto& l : ledgers) v.push_back(field(l.rows[i], c));
            const bool any_nan = std::any_of(v.begin(), v.end(),
                                             [](double x) { return std::isnan(x); });
            if (any_nan) {
                out << ",nan,nan,nan";
            } else {
                out << ',' << fmt(median_of(v)) << ',' << fmt(quantile_of(v, 0.25)) << ','
                    << fmt(quantile_of(v, 0.75));
            }
        }
        out << "\n";
    }
    if (!out) throw io_error("short write to " + path);
}

double ledger_field(const LedgerRow& row, const std::string& column) {
    if (column == "t") return static_cast<double>(row.t);
    if (column == "epoch") return row.epoch;
    if (column == "eta") return row.eta;
    if (column == "sigma") return row.sigma;
    if (column == "alpha") return row.alpha;
    if (column == "mean_disc") return row.mean_disc;
    if (column == "mean_grad_sq") return row.mean_grad_sq;
    if (column == "incoh_surrogate") return row.incoh_surrogate;
    if (column == "delta_hat") return row.delta_hat;
    if (column == "alpha_floor") return row.alpha_floor;
    if (column == "our_bound") return row.our_bound;
    if (column == "li_bound") return row.li_bound;
    if (column == "train_err") return row.train_err;
    if (column == "test_err") return row.test_err;
    throw format_error("unknown ledger column '" + column + "'");
}

void write_long_csv(const std::string& path, const std::string& axis_name,
                    const std::vector<LongRow>& rows) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path);
    out << axis_name << ',' << kLedgerHeader << "\n";
    for (const auto& lr : rows) {
        const auto& r = lr.row;
        out << fmt(lr.sweep_value) << ',' << r.t << ',' << r.epoch << ',' << fmt(r.eta) << ','
            << fmt(r.sigma) << ',' << fmt(r.alpha) << ',' << fmt(r.mean_disc) << ','
            << fmt(r.mean_grad_sq) << ',' << fmt(r.incoh_surrogate) << ',' << fmt(r.delta_hat)
            << ',' << fmt(r.alpha_floor) << ',' << fmt(r.our_bound) << ',' << fmt(r.li_bound)
            << ',' << fmt(r.train_err) << ',' << fmt(r.test_err) << "\n";
    }
    if (!out) throw io_error("short write to " + path);
}

}  // namespace efld
