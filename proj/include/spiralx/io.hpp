#ifndef SPIRALX_IO_HPP
#define SPIRALX_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spiralx/tensor.hpp"

namespace spiralx {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// SPFM tensor file: magic "SPFM", version byte 0x01, dtype byte 0x01
// (float32 little-endian), ndim byte, ndim u32 little-endian dims, then the
// raw values. Round-trips are bit-exact.

void write_spfm(const std::filesystem::path& path,
                const std::vector<std::uint32_t>& dims,
                const float* data, std::size_t count);

struct SpfmTensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;
};

SpfmTensor read_spfm(const std::filesystem::path& path);

void write_feature_map(const std::filesystem::path& path, const FeatureMap& f);
FeatureMap read_feature_map(const std::filesystem::path& path);

/// Images are SPFM tensors of dims {3, rows, cols} in [0, 255].
void write_image_spfm(const std::filesystem::path& path, const Image& img);
Image read_image_spfm(const std::filesystem::path& path);

// Plain binary PPM (P6, maxval 255) for eyeballing outputs. Values are
// rounded to the nearest integer on write.
void write_ppm(const std::filesystem::path& path, const Image& img);
Image read_ppm(const std::filesystem::path& path);

/// Loads .spfm or .ppm based on extension.
Image read_image_any(const std::filesystem::path& path);

// Minimal CSV support: quote-free fields, comma separated. Floats are
// printed with shortest round-trip formatting so outputs are byte-stable.

std::string format_float(double v);
std::string format_float(float v);

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& fields);
    void close();

private:
    std::string buffer_;
    std::filesystem::path path_;
    bool open_ = true;
};

/// Parses a CSV file into rows of fields. Empty lines are skipped.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace spiralx

#endif
