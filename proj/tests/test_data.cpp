#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "efld/data.hpp"
#include "efld/models.hpp"

using namespace efld;

TEST_CASE("synthetic blobs: determinism and class prior") {
    SynthSpec spec;
    spec.dim = 20;
    spec.n = 1000;
    spec.classes = 2;
    spec.separation = 1.0;
    const Dataset a = synth_dataset(spec, 5);
    const Dataset b = synth_dataset(spec, 5);
    REQUIRE(a.n() == 1000);
    CHECK(a.held_out_pool.size() == 250);
    for (std::size_t i = 0; i < a.n(); ++i) {
        CHECK(a.examples[i].x == b.examples[i].x);
        CHECK(a.examples[i].y == b.examples[i].y);
    }
    std::size_t ones = 0;
    for (const auto& e : a.examples) ones += e.y == 1 ? 1u : 0u;
    const double prior = double(ones) / double(a.n());
    CHECK(std::fabs(prior - 0.5) < 0.05);
}

TEST_CASE("wide separation gives a linearly separable problem") {
    SynthSpec spec;
    spec.dim = 5;
    spec.n = 300;
    spec.classes = 2;
    spec.separation = 10.0;
    const Dataset d = synth_dataset(spec, 9);
    // nearest-center classification must be perfect at this separation;
    // check via the class-mean direction
    Vec mean0(5, 0.0), mean1(5, 0.0);
    double n0 = 0, n1 = 0;
    for (const auto& e : d.examples) {
        if (e.y == 0) {
            axpy(1.0, e.x, mean0);
            n0 += 1;
        } else {
            axpy(1.0, e.x, mean1);
            n1 += 1;
        }
    }
    scale(mean0, 1.0 / n0);
    scale(mean1, 1.0 / n1);
    std::size_t wrong = 0;
    for (const auto& e : d.examples) {
        const double d0 = dist_sq(e.x, mean0), d1 = dist_sq(e.x, mean1);
        if ((d0 < d1 ? 0 : 1) != e.y) ++wrong;
    }
    CHECK(wrong == 0);
}

TEST_CASE("label corruption counts and determinism") {
    SynthSpec spec;
    spec.dim = 4;
    spec.n = 1000;
    spec.classes = 4;
    const Dataset base = synth_dataset(spec, 11);

    const Dataset same = corrupt_labels(base, 0.0, 3);
    for (std::size_t i = 0; i < base.n(); ++i) CHECK(same.examples[i].y == base.examples[i].y);

    const Dataset all = corrupt_labels(base, 1.0, 3);
    for (std::size_t i = 0; i < base.n(); ++i) CHECK(all.examples[i].y != base.examples[i].y);

    const Dataset part = corrupt_labels(base, 0.6, 3);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < base.n(); ++i)
        changed += part.examples[i].y != base.examples[i].y ? 1u : 0u;
    CHECK(changed == 600);

    const Dataset part2 = corrupt_labels(base, 0.6, 3);
    for (std::size_t i = 0; i < base.n(); ++i)
        CHECK(part.examples[i].y == part2.examples[i].y);

    // two-class corruption flips exactly
    SynthSpec two = spec;
    two.classes = 2;
    const Dataset b2 = synth_dataset(two, 13);
    const Dataset f2 = corrupt_labels(b2, 1.0, 1);
    for (std::size_t i = 0; i < b2.n(); ++i)
        CHECK(f2.examples[i].y == 1 - b2.examples[i].y);
}

namespace {

void write_be32(std::ofstream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_idx_fixture(const std::string& img_path, const std::string& lbl_path,
                       std::uint32_t magic_img = 0x00000803u) {
    std::ofstream img(img_path, std::ios::binary);
    write_be32(img, magic_img);
    write_be32(img, 2);   // two images
    write_be32(img, 28);
    write_be32(img, 28);
    for (int i = 0; i < 2 * 28 * 28; ++i) {
        const unsigned char px = static_cast<unsigned char>((i * 7 + 13) % 256);
        img.write(reinterpret_cast<const char*>(&px), 1);
    }
    std::ofstream lbl(lbl_path, std::ios::binary);
    write_be32(lbl, 0x00000801u);
    write_be32(lbl, 2);
    const unsigned char labels[2] = {3, 7};
    lbl.write(reinterpret_cast<const char*>(labels), 2);
}

}  // namespace

TEST_CASE("idx loader parses a well-formed fixture") {
    const std::string img = "idx_fixture_images", lbl = "idx_fixture_labels";
    write_idx_fixture(img, lbl);
    IdxStats stats;
    const Dataset d = load_idx(img, lbl, &stats);
    REQUIRE(d.n() == 2);
    CHECK(d.examples[0].x.size() == 784);
    CHECK(d.examples[0].y == 3);
    CHECK(d.examples[1].y == 7);
    CHECK(d.num_classes == 8);
    // z-scored: overall mean 0, unit variance
    double s = 0.0, s2 = 0.0;
    for (const auto& e : d.examples)
        for (double v : e.x) {
            s += v;
            s2 += v * v;
        }
    CHECK(std::fabs(s / (2 * 784)) < 1e-12);
    CHECK(s2 / (2 * 784) == doctest::Approx(1.0).epsilon(1e-9));
    std::remove(img.c_str());
    std::remove(lbl.c_str());
}

TEST_CASE("idx loader rejects bad magic and truncation") {
    const std::string img = "idx_bad_images", lbl = "idx_bad_labels";
    write_idx_fixture(img, lbl, 0xDEADBEEFu);
    CHECK_THROWS_AS(load_idx(img, lbl), format_error);
    write_idx_fixture(img, lbl);
    // truncate the image payload
    std::ofstream trunc(img, std::ios::binary);
    write_be32(trunc, 0x00000803u);
    write_be32(trunc, 2);
    write_be32(trunc, 28);
    write_be32(trunc, 28);
    trunc.close();
    try {
        load_idx(img, lbl);
        CHECK(false);
    } catch (const format_error& e) {
        CHECK(std::string(e.what()).find("offset") != std::string::npos);
    }
    CHECK_THROWS_AS(load_idx("no_such_images", lbl), io_error);
    std::remove(img.c_str());
    std::remove(lbl.c_str());
}

TEST_CASE("subset with pool draws disjoint deterministic splits") {
    SynthSpec spec;
    spec.dim = 3;
    spec.n = 200;
    spec.classes = 2;
    const Dataset base = synth_dataset(spec, 17);
    const Dataset sub = subset_with_pool(base.examples, 50, 20, 2, 99);
    CHECK(sub.n() == 50);
    CHECK(sub.held_out_pool.size() == 20);
    const Dataset sub2 = subset_with_pool(base.examples, 50, 20, 2, 99);
    for (std::size_t i = 0; i < 50; ++i) CHECK(sub.examples[i].x == sub2.examples[i].x);
    CHECK_THROWS_AS(subset_with_pool(base.examples, 190, 20, 2, 99), config_error);
}
