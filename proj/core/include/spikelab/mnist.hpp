#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spikelab {

// IDX image file loaded into memory, pixels scaled to [0, 1] by /255.
struct IdxDataset {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> pixels; // count x (rows*cols), row-major

    std::size_t dim() const { return rows * cols; }
    const float* image(std::size_t i) const { return pixels.data() + i * dim(); }
};

// Load an IDX image file (big-endian magic 0x00000803, then count/rows/cols
// and unsigned bytes). Throws IoError naming the byte offset of the problem
// and, for truncation, expected vs. actual byte counts.
IdxDataset load_idx_images(const std::string& path);

struct DemoResult {
    std::int64_t M = 0;       // test images recognized (max corr > threshold)
    std::int64_t Mp = 0;      // noise images recognized
    double z = 0.0;
    std::int64_t size = 0;    // dim * reference count
    std::size_t references = 0;
    std::size_t probes = 0;   // per stream
};

// The recording-enumerating experiment: a max-correlation function over the
// training images, probed with the test set (M) and with the same number of
// uniform-noise images (Mp). The function recognizes essentially everything
// it stored, which buys a giant Z-score at a giant size.
//
// subsample limits the reference set to its first k images (CI-scale runs);
// noise pixels are uniform in [0,1], seeded. Correlation is Pearson via
// normalized rows; a probe stops scanning references once one exceeds the
// threshold.
DemoResult run_demo(const IdxDataset& train, const IdxDataset& test, double threshold,
                    std::uint64_t noise_seed, std::optional<std::size_t> subsample = std::nullopt,
                    int threads = 0);

} // namespace spikelab
