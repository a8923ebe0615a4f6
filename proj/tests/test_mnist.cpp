#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "spikelab/errors.hpp"
#include "spikelab/mnist.hpp"

using namespace spikelab;

namespace {

void put_be32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
}

std::string write_bytes(const std::string& name, const std::vector<unsigned char>& bytes) {
    std::string path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.close();
    return path;
}

// A tiny IDX image file: `images` is count x (rows*cols) pixel bytes.
std::string write_idx(const std::string& name, std::uint32_t rows, std::uint32_t cols,
                      const std::vector<std::vector<unsigned char>>& images) {
    std::vector<unsigned char> bytes;
    put_be32(bytes, 0x00000803u);
    put_be32(bytes, static_cast<std::uint32_t>(images.size()));
    put_be32(bytes, rows);
    put_be32(bytes, cols);
    for (const auto& img : images) bytes.insert(bytes.end(), img.begin(), img.end());
    return write_bytes(name, bytes);
}

// Three 4x4 patterns with pairwise correlation far from 1: a ramp, its
// reverse, and an alternating checker.
std::vector<std::vector<unsigned char>> test_patterns() {
    std::vector<unsigned char> ramp(16), rev(16), checker(16);
    for (int i = 0; i < 16; ++i) {
        ramp[i] = static_cast<unsigned char>(i * 16);
        rev[i] = static_cast<unsigned char>((15 - i) * 16);
        checker[i] = (i % 2 == 0) ? 200 : 20;
    }
    return {ramp, rev, checker};
}

} // namespace

TEST_CASE("idx loader reads images and scales pixels to [0,1]") {
    std::string path = write_idx("spikelab_idx_ok.idx", 2, 2,
                                 {{0, 255, 128, 64}, {10, 20, 30, 40}});
    IdxDataset ds = load_idx_images(path);
    CHECK(ds.count == 2);
    CHECK(ds.rows == 2);
    CHECK(ds.cols == 2);
    CHECK(ds.dim() == 4);
    CHECK(ds.pixels.size() == 8);
    CHECK(ds.image(0)[0] == doctest::Approx(0.0f));
    CHECK(ds.image(0)[1] == doctest::Approx(1.0f));
    CHECK(ds.image(0)[2] == doctest::Approx(128.0f / 255.0f));
    CHECK(ds.image(1)[0] == doctest::Approx(10.0f / 255.0f));
}

TEST_CASE("idx loader reports precise failure diagnostics") {
    CHECK_THROWS_WITH_AS(load_idx_images("/nonexistent/never.idx"),
                         doctest::Contains("cannot open"), IoError);

    // Too short for even a header.
    std::string short_path = write_bytes("spikelab_idx_short.idx", {0, 0, 8, 3, 0, 0, 0, 1});
    CHECK_THROWS_WITH_AS(load_idx_images(short_path),
                         doctest::Contains("truncated header at byte offset 8"), IoError);

    // Wrong magic (0x00000801 is the label-file magic, not images).
    std::vector<unsigned char> labels;
    put_be32(labels, 0x00000801u);
    put_be32(labels, 1);
    labels.insert(labels.end(), {7, 7, 7, 7, 7, 7, 7, 7});
    std::string magic_path = write_bytes("spikelab_idx_magic.idx", labels);
    CHECK_THROWS_WITH_AS(load_idx_images(magic_path), doctest::Contains("bad magic 0x00000801"),
                         IoError);
    CHECK_THROWS_WITH_AS(load_idx_images(magic_path), doctest::Contains("byte offset 0"), IoError);

    // Header promises more pixel data than the file holds.
    std::vector<unsigned char> trunc;
    put_be32(trunc, 0x00000803u);
    put_be32(trunc, 2);
    put_be32(trunc, 2);
    put_be32(trunc, 2);
    trunc.insert(trunc.end(), {1, 2, 3, 4}); // 4 of the 8 promised bytes
    std::string trunc_path = write_bytes("spikelab_idx_trunc.idx", trunc);
    CHECK_THROWS_WITH_AS(load_idx_images(trunc_path), doctest::Contains("expected 24"), IoError);
    CHECK_THROWS_WITH_AS(load_idx_images(trunc_path), doctest::Contains("got 20"), IoError);
}

TEST_CASE("demo recognizes its own training images and rejects noise") {
    auto patterns = test_patterns();
    std::string train_path = write_idx("spikelab_idx_train.idx", 4, 4, patterns);
    std::string test_path = write_idx("spikelab_idx_test.idx", 4, 4, patterns);
    IdxDataset train = load_idx_images(train_path);
    IdxDataset test = load_idx_images(test_path);

    DemoResult res = run_demo(train, test, 0.99, /*noise_seed=*/7);
    CHECK(res.M == 3); // every probe is a stored image, correlation 1
    CHECK(res.Mp == 0); // sixteen-pixel noise does not reach 0.99 correlation
    CHECK(res.references == 3);
    CHECK(res.probes == 3);
    CHECK(res.size == 3 * 16);
    CHECK(res.z > 0.0);

    // Thread split must not change anything.
    DemoResult par = run_demo(train, test, 0.99, 7, std::nullopt, 3);
    CHECK(par.M == res.M);
    CHECK(par.Mp == res.Mp);
    CHECK(par.z == res.z);

    // Different noise seed, same verdicts on this fixture.
    DemoResult other = run_demo(train, test, 0.99, 8);
    CHECK(other.M == 3);
    CHECK(other.Mp == 0);
}

TEST_CASE("subsampling keeps only the leading references") {
    auto patterns = test_patterns();
    IdxDataset train = load_idx_images(write_idx("spikelab_idx_sub_train.idx", 4, 4, patterns));
    IdxDataset test = load_idx_images(write_idx("spikelab_idx_sub_test.idx", 4, 4, patterns));

    // Only the ramp is stored: the ramp probe is recognized, the other two
    // patterns (anticorrelated / uncorrelated) are not.
    DemoResult res = run_demo(train, test, 0.99, 7, /*subsample=*/1);
    CHECK(res.references == 1);
    CHECK(res.size == 16);
    CHECK(res.M == 1);
    CHECK(res.Mp == 0);

    // Subsample larger than the set is clamped, not an error.
    DemoResult all = run_demo(train, test, 0.99, 7, 99);
    CHECK(all.references == 3);

    CHECK_THROWS_AS(run_demo(train, test, 0.99, 7, 0), ConfigError);
}

TEST_CASE("demo validates probe dimensions") {
    auto patterns = test_patterns();
    IdxDataset train = load_idx_images(write_idx("spikelab_idx_dim_train.idx", 4, 4, patterns));
    IdxDataset small = load_idx_images(
        write_idx("spikelab_idx_dim_test.idx", 2, 2, {{1, 2, 3, 4}}));
    CHECK_THROWS_AS(run_demo(train, small, 0.99, 7), DimensionError);
}
