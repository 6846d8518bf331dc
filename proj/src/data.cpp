#include "efld/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "efld/errors.hpp"

namespace efld {

namespace {

Vec random_unit(int dim, RngStream& rng) {
    Vec v(dim);
    double nsq = 0.0;
    do {
        for (int j = 0; j < dim; ++j) v[j] = rng.normal();
        nsq = norm_sq(v);
    } while (nsq == 0.0);
    scale(v, 1.0 / std::sqrt(nsq));
    return v;
}

std::vector<Vec> blob_centers(const SynthSpec& spec, std::uint64_t seed) {
    RngStream rng = RngStream::child_of(seed, 0x6c0b5);
    std::vector<Vec> centers(spec.classes);
    for (int c = 0; c < spec.classes; ++c) {
        centers[c] = random_unit(spec.dim, rng);
        scale(centers[c], spec.separation);
    }
    return centers;
}

Example draw_blob_point(const std::vector<Vec>& centers, int classes, RngStream& rng) {
    Example e;
    e.y = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(classes)));
    e.x = centers[e.y];
    for (double& v : e.x) v += rng.normal();
    return e;
}

void validate_synth(const SynthSpec& spec) {
    if (spec.n < 2) throw config_error("synth_dataset: n must be >= 2");
    if (spec.dim < 1) throw config_error("synth_dataset: dim must be >= 1");
    if (spec.classes < 2) throw config_error("synth_dataset: classes must be >= 2");
    if (!(spec.separation >= 0.0)) throw config_error("synth_dataset: separation must be >= 0");
}

}  // namespace

Dataset synth_dataset(const SynthSpec& spec, std::uint64_t seed) {
    validate_synth(spec);
    const auto centers = blob_centers(spec, seed);
    RngStream rng = RngStream::child_of(seed, 0xda7a);
    Dataset out;
    out.dim = spec.dim;
    out.num_classes = spec.classes;
    out.examples.reserve(spec.n);
    const std::size_t pool = (spec.n + 3) / 4;
    out.held_out_pool.reserve(pool);
    for (std::size_t i = 0; i < spec.n; ++i)
        out.examples.push_back(draw_blob_point(centers, spec.classes, rng));
    for (std::size_t i = 0; i < pool; ++i)
        out.held_out_pool.push_back(draw_blob_point(centers, spec.classes, rng));
    return out;
}

std::vector<Example> synth_extra(const SynthSpec& spec, std::size_t count, std::uint64_t seed) {
    validate_synth(spec);
    const auto centers = blob_centers(spec, seed);
    RngStream rng = RngStream::child_of(seed, 0x7e57);
    std::vector<Example> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(draw_blob_point(centers, spec.classes, rng));
    return out;
}

namespace {

void corrupt_span(std::vector<Example>& ex, double fraction, int classes, RngStream& rng) {
    const std::size_t n = ex.size();
    const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
    if (k == 0) return;
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {  // partial Fisher-Yates
        const std::size_t j = i + rng.uniform_int(n - i);
        std::swap(idx[i], idx[j]);
    }
    for (std::size_t i = 0; i < k; ++i) {
        Example& e = ex[idx[i]];
        const int r = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(classes - 1)));
        e.y = r < e.y ? r : r + 1;
    }
}

}  // namespace

Dataset corrupt_labels(const Dataset& data, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw config_error("corrupt_labels: fraction must be in [0,1]");
    Dataset out = data;
    RngStream rng_train = RngStream::child_of(seed, 0xc0951);
    RngStream rng_pool = RngStream::child_of(seed, 0xc0952);
    corrupt_span(out.examples, fraction, data.num_classes, rng_train);
    corrupt_span(out.held_out_pool, fraction, data.num_classes, rng_pool);
    return out;
}

namespace {

std::uint32_t read_be32(std::ifstream& in, const std::string& path, std::size_t offset) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in)
        throw format_error(path + ": truncated header at offset " + std::to_string(offset));
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

std::vector<Example> read_idx_raw(const std::string& images_path,
                                  const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw io_error("cannot open " + images_path);
    const std::uint32_t img_magic = read_be32(img, images_path, 0);
    if (img_magic != 0x00000803u) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "0x%08X", img_magic);
        throw format_error(images_path + ": bad image magic " + buf + " at offset 0");
    }
    const std::uint32_t count = read_be32(img, images_path, 4);
    const std::uint32_t rows = read_be32(img, images_path, 8);
    const std::uint32_t cols = read_be32(img, images_path, 12);
    const std::size_t pixels = std::size_t(rows) * cols;
    if (pixels == 0 || pixels > 1u << 20)
        throw format_error(images_path + ": implausible image shape " + std::to_string(rows) +
                           "x" + std::to_string(cols));

    std::ifstream lbl(labels_path, std::ios::binary);
    if (!lbl) throw io_error("cannot open " + labels_path);
    const std::uint32_t lbl_magic = read_be32(lbl, labels_path, 0);
    if (lbl_magic != 0x00000801u) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "0x%08X", lbl_magic);
        throw format_error(labels_path + ": bad label magic " + buf + " at offset 0");
    }
    const std::uint32_t lbl_count = read_be32(lbl, labels_path, 4);
    if (lbl_count != count)
        throw format_error(labels_path + ": label count " + std::to_string(lbl_count) +
                           " does not match image count " + std::to_string(count));

    std::vector<unsigned char> raw(pixels);
    std::vector<Example> out(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        img.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(pixels));
        if (!img)
            throw format_error(images_path + ": truncated image data at offset " +
                               std::to_string(16 + std::size_t(i) * pixels));
        out[i].x.resize(pixels);
        for (std::size_t p = 0; p < pixels; ++p) out[i].x[p] = raw[p] / 255.0;
        int c = lbl.get();
        if (c == EOF)
            throw format_error(labels_path + ": truncated label data at offset " +
                               std::to_string(8 + std::size_t(i)));
        out[i].y = c;
    }
    return out;
}

void zscore(std::vector<Example>& examples, const IdxStats& stats) {
    const double inv = 1.0 / (stats.stdev > 0.0 ? stats.stdev : 1.0);
    for (Example& e : examples)
        for (double& v : e.x) v = (v - stats.mean) * inv;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 IdxStats* out_stats) {
    auto examples = read_idx_raw(images_path, labels_path);
    double sum = 0.0, sum_sq = 0.0;
    std::size_t count = 0;
    for (const Example& e : examples)
        for (double v : e.x) {
            sum += v;
            sum_sq += v * v;
            ++count;
        }
    IdxStats stats;
    if (count > 0) {
        stats.mean = sum / static_cast<double>(count);
        const double var = sum_sq / static_cast<double>(count) - stats.mean * stats.mean;
        stats.stdev = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    zscore(examples, stats);
    if (out_stats) *out_stats = stats;
    Dataset out;
    out.dim = examples.empty() ? 0 : static_cast<int>(examples.front().x.size());
    int max_label = 0;
    for (const Example& e : examples) max_label = std::max(max_label, e.y);
    out.num_classes = max_label + 1;
    out.examples = std::move(examples);
    return out;
}

Dataset subset_with_pool(const std::vector<Example>& all, std::size_t count,
                         std::size_t pool_count, int num_classes, std::uint64_t seed) {
    if (count + pool_count > all.size())
        throw config_error("subset_with_pool: requested " + std::to_string(count + pool_count) +
                           " examples but only " + std::to_string(all.size()) + " available");
    std::vector<std::size_t> idx(all.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    RngStream rng = RngStream::child_of(seed, 0x5b5e7);
    const std::size_t take = count + pool_count;
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.uniform_int(idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    Dataset out;
    out.num_classes = num_classes;
    out.dim = all.empty() ? 0 : static_cast<int>(all.front().x.size());
    out.examples.reserve(count);
    out.held_out_pool.reserve(pool_count);
    for (std::size_t i = 0; i < count; ++i) out.examples.push_back(all[idx[i]]);
    for (std::size_t i = 0; i < pool_count; ++i)
        out.held_out_pool.push_back(all[idx[count + i]]);
    return out;
}

}  // namespace efld
