#include "efld/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "efld/errors.hpp"

namespace efld {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// strips an unquoted trailing comment
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

}  // namespace

KvDoc KvDoc::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

KvDoc KvDoc::parse(const std::string& text, const std::string& origin) {
    KvDoc doc;
    doc.origin_ = origin;
    std::stringstream ss(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error(origin + ":" + std::to_string(line_no) +
                                   ": unterminated table header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw config_error(origin + ":" + std::to_string(line_no) + ": empty table name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(origin + ":" + std::to_string(line_no) +
                               ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw config_error(origin + ":" + std::to_string(line_no) + ": empty key or value");
        Value v;
        if (val.front() == '[') {
            if (val.back() != ']')
                throw config_error(origin + ":" + std::to_string(line_no) +
                                   ": unterminated array for key '" + key + "'");
            v.is_list = true;
            std::string body = val.substr(1, val.size() - 2);
            std::stringstream items(body);
            std::string item;
            while (std::getline(items, item, ',')) {
                item = trim(item);
                if (item.empty()) continue;
                if (item.front() == '"' && item.back() == '"' && item.size() >= 2)
                    item = item.substr(1, item.size() - 2);
                v.list.push_back(item);
            }
        } else if (val.front() == '"') {
            if (val.size() < 2 || val.back() != '"')
                throw config_error(origin + ":" + std::to_string(line_no) +
                                   ": unterminated string for key '" + key + "'");
            v.is_string = true;
            v.raw = val.substr(1, val.size() - 2);
        } else {
            v.raw = val;
        }
        const std::string full = section.empty() ? key : section + "." + key;
        doc.values_[full] = std::move(v);
    }
    return doc;
}

const KvDoc::Value* KvDoc::find(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

bool KvDoc::has(const std::string& key) const { return find(key) != nullptr; }

double KvDoc::num(const std::string& key, double def) const {
    const Value* v = find(key);
    if (!v) return def;
    if (v->is_list) throw config_error(origin_ + ": key '" + key + "' is an array, not a number");
    try {
        std::size_t pos = 0;
        const double x = std::stod(v->raw, &pos);
        if (pos != v->raw.size()) throw std::invalid_argument(v->raw);
        return x;
    } catch (const std::exception&) {
        throw config_error(origin_ + ": key '" + key + "' is not a number: '" + v->raw + "'");
    }
}

double KvDoc::num_required(const std::string& key) const {
    if (!has(key)) throw config_error(origin_ + ": missing required key '" + key + "'");
    return num(key, 0.0);
}

std::int64_t KvDoc::integer(const std::string& key, std::int64_t def) const {
    const double x = num(key, static_cast<double>(def));
    const auto i = static_cast<std::int64_t>(x);
    if (static_cast<double>(i) != x)
        throw config_error(origin_ + ": key '" + key + "' must be an integer");
    return i;
}

bool KvDoc::boolean(const std::string& key, bool def) const {
    const Value* v = find(key);
    if (!v) return def;
    if (v->raw == "true") return true;
    if (v->raw == "false") return false;
    throw config_error(origin_ + ": key '" + key + "' must be true or false, got '" + v->raw +
                       "'");
}

std::string KvDoc::str(const std::string& key, const std::string& def) const {
    const Value* v = find(key);
    if (!v) return def;
    if (v->is_list) throw config_error(origin_ + ": key '" + key + "' is an array, not a string");
    return v->raw;
}

std::vector<double> KvDoc::num_list(const std::string& key) const {
    const Value* v = find(key);
    if (!v) return {};
    std::vector<std::string> items = v->is_list ? v->list : std::vector<std::string>{v->raw};
    std::vector<double> out;
    for (const auto& s : items) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(s, &pos));
            if (pos != s.size()) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw config_error(origin_ + ": key '" + key + "' has non-numeric element '" + s +
                               "'");
        }
    }
    return out;
}

std::vector<std::string> KvDoc::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (k.rfind(prefix, 0) == 0) out.push_back(k);
    return out;
}

namespace {

Schedule schedule_from(const KvDoc& doc, const std::string& prefix, double def_base) {
    const std::string kind = doc.str(prefix + "_schedule", "step_decay");
    const double base = doc.num(prefix + "0", def_base);
    if (kind == "constant") return Schedule::constant(base);
    if (kind == "inverse_sqrt") return Schedule::inverse_sqrt(base);
    if (kind == "step_decay") {
        const double rate = doc.num(prefix + "_decay", 1.0);
        const auto every = static_cast<int>(doc.integer(prefix + "_decay_every_epochs", 1));
        if (!(rate > 0.0) || every < 1)
            throw config_error("schedule '" + prefix + "': decay must be > 0, every >= 1");
        return Schedule::step_decay(base, rate, every);
    }
    throw config_error("schedule '" + prefix + "': unknown kind '" + kind + "'");
}

}  // namespace

RunConfig run_config_from_doc(const KvDoc& doc) {
    RunConfig cfg;
    cfg.name = doc.str("run.name", cfg.name);

    cfg.dataset_kind = doc.str("dataset.kind", cfg.dataset_kind);
    if (cfg.dataset_kind != "synth" && cfg.dataset_kind != "mnist")
        throw config_error("dataset.kind must be synth or mnist, got '" + cfg.dataset_kind + "'");
    cfg.synth.dim = static_cast<int>(doc.integer("dataset.dim", cfg.synth.dim));
    cfg.synth.n = static_cast<std::size_t>(doc.integer("dataset.n", 100));
    cfg.synth.classes = static_cast<int>(doc.integer("dataset.classes", cfg.synth.classes));
    cfg.synth.separation = doc.num("dataset.separation", cfg.synth.separation);
    cfg.corruption = doc.num("dataset.corruption", cfg.corruption);
    cfg.subset_n = static_cast<std::size_t>(doc.integer("dataset.n", 0));
    cfg.pool_count = static_cast<std::size_t>(doc.integer("dataset.pool", 0));
    cfg.test_count = static_cast<std::size_t>(doc.integer("dataset.test_n", 2000));
    cfg.dataset_seed = static_cast<std::uint64_t>(doc.integer("dataset.seed", 42));
    cfg.data_dir = doc.str("dataset.data_dir", "");

    cfg.model_kind = doc.str("model.kind", cfg.model_kind);
    for (double h : doc.num_list("model.hidden"))
        cfg.hidden.push_back(static_cast<int>(h));
    cfg.loss_clamp = doc.num("model.loss_clamp", cfg.loss_clamp);
    if (!(cfg.loss_clamp > 0.0)) throw config_error("model.loss_clamp must be > 0");

    const std::string opt_kind = doc.str("optimizer.kind", "sgld");
    OptimizerSpec& opt = cfg.opt;
    if (opt_kind == "sgld") opt.kind = OptimizerSpec::Kind::sgld;
    else if (opt_kind == "efld") opt.kind = OptimizerSpec::Kind::efld;
    else if (opt_kind == "noisy_sign_sgd") opt.kind = OptimizerSpec::Kind::noisy_sign_sgd;
    else if (opt_kind == "sign_sgd") opt.kind = OptimizerSpec::Kind::sign_sgd;
    else if (opt_kind == "sgd") opt.kind = OptimizerSpec::Kind::sgd;
    else throw config_error("optimizer.kind unknown: '" + opt_kind + "'");

    const std::string family = doc.str("optimizer.family", "gaussian");
    if (family == "gaussian") opt.family = ExpFamilySpec::gaussian();
    else if (family == "bernoulli_pm1") opt.family = ExpFamilySpec::bernoulli_pm1();
    else if (family == "bernoulli_01") opt.family = ExpFamilySpec::bernoulli_01();
    else throw config_error("optimizer.family unknown: '" + family + "'");

    opt.batch_size = static_cast<int>(doc.integer("optimizer.batch_size", 1));
    if (opt.batch_size < 1) throw config_error("optimizer.batch_size must be >= 1");
    opt.eta = schedule_from(doc, "optimizer.eta", 0.01);
    opt.rho = schedule_from(doc, "optimizer.rho", doc.num("optimizer.eta0", 0.01));
    opt.alpha = schedule_from(doc, "optimizer.alpha", 1.0);
    opt.adaptive_alpha = doc.boolean("optimizer.alpha_adaptive", false);
    opt.alpha_safety = doc.num("optimizer.alpha_safety", 1.0);
    opt.alpha_pool = static_cast<int>(doc.integer("optimizer.alpha_pool", 64));
    opt.alpha_min = doc.num("optimizer.alpha_min", 1e-8);

    cfg.beta = doc.num("optimizer.beta", 0.0);
    cfg.sigma_over_eta = doc.num("optimizer.sigma_over_eta", 0.0);
    opt.beta = cfg.beta;
    opt.sigma_over_eta = cfg.sigma_over_eta;
    if (opt.kind == OptimizerSpec::Kind::sgld) {
        if (cfg.beta > 0.0 && cfg.sigma_over_eta > 0.0)
            throw config_error("optimizer.beta and optimizer.sigma_over_eta are exclusive");
        if (cfg.beta == 0.0 && cfg.sigma_over_eta == 0.0 && !doc.has("optimizer.sigma0"))
            throw config_error(
                "sgld needs one of optimizer.beta, optimizer.sigma_over_eta, optimizer.sigma0");
        opt.sigma = schedule_from(doc, "optimizer.sigma", 0.001);
    }

    cfg.epochs = static_cast<int>(doc.integer("run.epochs", cfg.epochs));
    cfg.steps = doc.integer("run.steps", 0);
    if (cfg.epochs < 1 && cfg.steps < 1) throw config_error("run.epochs must be >= 1");
    cfg.seeds.clear();
    if (doc.has("run.seeds")) {
        for (double s : doc.num_list("run.seeds"))
            cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    }
    if (cfg.seeds.empty()) cfg.seeds.push_back(0);
    cfg.threads = static_cast<int>(doc.integer("run.threads", 1));
    if (cfg.threads < 1) throw config_error("run.threads must be >= 1");
    cfg.out_dir = doc.str("run.out_dir", cfg.out_dir);

    cfg.pairs_per_step = static_cast<int>(doc.integer("bound.pairs_per_step", 20));
    cfg.eval_every = static_cast<int>(doc.integer("bound.eval_every", 1));
    if (cfg.eval_every < 1) throw config_error("bound.eval_every must be >= 1");
    cfg.delta_pool = static_cast<int>(doc.integer("bound.delta_pool", 64));
    cfg.incoh_enabled = doc.boolean("bound.incoh", true);
    cfg.err_every_epochs = static_cast<int>(doc.integer("bound.err_every_epochs", 1));
    cfg.err_subsample = static_cast<std::size_t>(doc.integer("bound.err_subsample", 0));

    if (!(cfg.corruption >= 0.0 && cfg.corruption <= 1.0))
        throw config_error("dataset.corruption must be in [0,1]");
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    return run_config_from_doc(KvDoc::parse_file(path));
}

}  // namespace efld
