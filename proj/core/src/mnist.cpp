#include "spikelab/mnist.hpp"

#include <cstdio>
#include <fstream>
#include <mutex>
#include <vector>

#include "spikelab/errors.hpp"
#include "spikelab/parallel.hpp"
#include "spikelab/rng.hpp"
#include "spikelab/spiking.hpp"
#include "spikelab/stats.hpp"

namespace spikelab {

namespace {

std::uint32_t read_be32(const unsigned char* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

} // namespace

IdxDataset load_idx_images(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 16) {
        throw IoError(path + ": truncated header at byte offset " +
                      std::to_string(bytes.size()) + ", need 16 bytes");
    }

    std::uint32_t magic = read_be32(bytes.data());
    if (magic != 0x00000803u) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "0x%08X", magic);
        throw IoError(path + ": bad magic " + buf +
                      " at byte offset 0, expected 0x00000803 (unsigned-byte images, 3 dims)");
    }

    IdxDataset ds;
    ds.count = read_be32(bytes.data() + 4);
    ds.rows = read_be32(bytes.data() + 8);
    ds.cols = read_be32(bytes.data() + 12);

    std::uint64_t expected =
        16 + static_cast<std::uint64_t>(ds.count) * ds.rows * ds.cols;
    if (bytes.size() != expected) {
        throw IoError(path + ": expected " + std::to_string(expected) + " bytes for " +
                      std::to_string(ds.count) + " images of " + std::to_string(ds.rows) + "x" +
                      std::to_string(ds.cols) + ", got " + std::to_string(bytes.size()) +
                      " (data starts at byte offset 16)");
    }

    ds.pixels.resize(bytes.size() - 16);
    for (std::size_t i = 0; i < ds.pixels.size(); ++i) {
        ds.pixels[i] = static_cast<float>(bytes[16 + i]) / 255.0f;
    }
    return ds;
}

DemoResult run_demo(const IdxDataset& train, const IdxDataset& test, double threshold,
                    std::uint64_t noise_seed, std::optional<std::size_t> subsample, int threads) {
    if (train.count == 0 || test.count == 0) throw ConfigError("demo needs train and test images");
    if (train.dim() != test.dim()) {
        throw DimensionError("train and test images have different pixel counts");
    }

    std::size_t dim = train.dim();
    std::size_t ref_count = train.count;
    if (subsample.has_value()) ref_count = std::min(ref_count, *subsample);
    if (ref_count == 0) throw ConfigError("subsample leaves no reference images");

    ReferenceSet refs = ReferenceSet::from_rows(ref_count, dim, [&](std::size_t i, std::size_t a) {
        return static_cast<double>(train.image(i)[a]);
    });

    // One probe spikes when any stored reference correlates above the
    // threshold; the scan stops at the first such reference.
    auto recognizes = [&](const std::vector<double>& probe,
                          std::vector<float>& scratch) {
        scratch.resize(dim);
        normalize_row(probe, scratch);
        for (std::size_t r = 0; r < refs.count; ++r) {
            const float* ref = refs.normalized.data() + r * dim;
            double dot = 0.0;
            for (std::size_t a = 0; a < dim; ++a) dot += static_cast<double>(ref[a]) * scratch[a];
            if (dot > threshold) return true;
        }
        return false;
    };

    DemoResult out;
    out.references = ref_count;
    out.probes = test.count;
    out.size = static_cast<std::int64_t>(ref_count) * static_cast<std::int64_t>(dim);

    std::mutex merge_mutex;
    parallel_for_chunks(test.count, threads, [&](std::size_t begin, std::size_t end) {
        std::int64_t local_m = 0, local_mp = 0;
        std::vector<double> probe(dim);
        std::vector<float> scratch;
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t a = 0; a < dim; ++a) probe[a] = test.image(i)[a];
            if (recognizes(probe, scratch)) ++local_m;

            for (std::size_t a = 0; a < dim; ++a) {
                probe[a] = uniform01(noise_seed, RngStream::NoiseImage,
                                     static_cast<std::uint64_t>(i * dim + a));
            }
            if (recognizes(probe, scratch)) ++local_mp;
        }
        std::lock_guard<std::mutex> lock(merge_mutex);
        out.M += local_m;
        out.Mp += local_mp;
    });

    out.z = z_score({out.M, out.Mp, static_cast<std::int64_t>(test.count)});
    return out;
}

} // namespace spikelab
