#include "spiralx/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "SPFM writer assumes a little-endian host");

namespace spiralx {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'F', 'M'};
constexpr std::uint8_t kVersion = 0x01;
constexpr std::uint8_t kDtypeF32 = 0x01;

void put_u32(std::string& out, std::uint32_t v) {
    char b[4];
    std::memcpy(b, &v, 4);
    out.append(b, 4);
}

} // namespace

void write_spfm(const std::filesystem::path& path,
                const std::vector<std::uint32_t>& dims,
                const float* data, std::size_t count) {
    std::size_t expect = 1;
    for (auto d : dims) expect *= d;
    if (expect != count)
        throw IoError("write_spfm: dims do not multiply to element count");
    if (dims.empty() || dims.size() > 255)
        throw IoError("write_spfm: ndim must be in [1, 255]");

    std::string out;
    out.reserve(7 + 4 * dims.size() + 4 * count);
    out.append(kMagic, 4);
    out.push_back(static_cast<char>(kVersion));
    out.push_back(static_cast<char>(kDtypeF32));
    out.push_back(static_cast<char>(dims.size()));
    for (auto d : dims) put_u32(out, d);
    out.append(reinterpret_cast<const char*>(data), 4 * count);
    write_text_file(path, out);
}

SpfmTensor read_spfm(const std::filesystem::path& path) {
    const std::string raw = read_text_file(path);
    if (raw.size() < 7 || std::memcmp(raw.data(), kMagic, 4) != 0)
        throw IoError("read_spfm: " + path.string() + " is not an SPFM file");
    if (static_cast<std::uint8_t>(raw[4]) != kVersion)
        throw IoError("read_spfm: unsupported version in " + path.string());
    if (static_cast<std::uint8_t>(raw[5]) != kDtypeF32)
        throw IoError("read_spfm: unsupported dtype in " + path.string());
    const std::size_t ndim = static_cast<std::uint8_t>(raw[6]);
    if (raw.size() < 7 + 4 * ndim)
        throw IoError("read_spfm: truncated header in " + path.string());

    SpfmTensor t;
    t.dims.resize(ndim);
    std::size_t count = 1;
    for (std::size_t i = 0; i < ndim; ++i) {
        std::memcpy(&t.dims[i], raw.data() + 7 + 4 * i, 4);
        count *= t.dims[i];
    }
    const std::size_t payload = 7 + 4 * ndim;
    if (raw.size() != payload + 4 * count)
        throw IoError("read_spfm: payload size mismatch in " + path.string());
    t.data.resize(count);
    std::memcpy(t.data.data(), raw.data() + payload, 4 * count);
    return t;
}

void write_feature_map(const std::filesystem::path& path, const FeatureMap& f) {
    write_spfm(path,
               {static_cast<std::uint32_t>(f.channels()),
                static_cast<std::uint32_t>(f.rows()),
                static_cast<std::uint32_t>(f.cols())},
               f.data(), f.size());
}

FeatureMap read_feature_map(const std::filesystem::path& path) {
    SpfmTensor t = read_spfm(path);
    if (t.dims.size() != 3)
        throw IoError("read_feature_map: expected 3 dims in " + path.string());
    return FeatureMap::from_data(static_cast<int>(t.dims[0]),
                                 static_cast<int>(t.dims[1]),
                                 static_cast<int>(t.dims[2]), std::move(t.data));
}

void write_image_spfm(const std::filesystem::path& path, const Image& img) {
    write_spfm(path,
               {3u, static_cast<std::uint32_t>(img.rows()),
                static_cast<std::uint32_t>(img.cols())},
               img.flat().data(), img.flat().size());
}

Image read_image_spfm(const std::filesystem::path& path) {
    SpfmTensor t = read_spfm(path);
    if (t.dims.size() != 3 || t.dims[0] != 3)
        throw IoError("read_image_spfm: expected 3xRxC tensor in " + path.string());
    Image img(static_cast<int>(t.dims[1]), static_cast<int>(t.dims[2]));
    img.flat() = std::move(t.data);
    return img;
}

void write_ppm(const std::filesystem::path& path, const Image& img) {
    std::string out = "P6\n" + std::to_string(img.cols()) + " " +
                      std::to_string(img.rows()) + "\n255\n";
    out.reserve(out.size() + 3 * img.plane_size());
    for (int r = 0; r < img.rows(); ++r)
        for (int c = 0; c < img.cols(); ++c)
            for (int ch = 0; ch < 3; ++ch) {
                const float v = clamp255(img.at(ch, r, c));
                out.push_back(static_cast<char>(
                    static_cast<unsigned char>(std::lround(v))));
            }
    write_text_file(path, out);
}

Image read_ppm(const std::filesystem::path& path) {
    const std::string raw = read_text_file(path);
    std::istringstream hdr(raw);
    std::string magic;
    int cols = 0, rows = 0, maxval = 0;
    hdr >> magic >> cols >> rows >> maxval;
    if (magic != "P6" || cols <= 0 || rows <= 0 || maxval != 255)
        throw IoError("read_ppm: " + path.string() + " is not an 8-bit P6 file");
    // Pixel data starts after the single whitespace byte following maxval.
    const std::size_t start = static_cast<std::size_t>(hdr.tellg()) + 1;
    const std::size_t need = static_cast<std::size_t>(rows) * cols * 3;
    if (raw.size() < start + need)
        throw IoError("read_ppm: truncated pixel data in " + path.string());
    Image img(rows, cols);
    std::size_t i = start;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            for (int ch = 0; ch < 3; ++ch)
                img.at(ch, r, c) = static_cast<float>(
                    static_cast<unsigned char>(raw[i++]));
    return img;
}

Image read_image_any(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".ppm") return read_ppm(path);
    return read_image_spfm(path);
}

std::string format_float(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_float(float v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path) {}

CsvWriter::~CsvWriter() {
    if (open_) close();
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) buffer_.push_back(',');
        buffer_ += fields[i];
    }
    buffer_.push_back('\n');
}

void CsvWriter::close() {
    if (!open_) return;
    write_text_file(path_, buffer_);
    open_ = false;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(pos));
                break;
            }
            fields.push_back(line.substr(pos, comma - pos));
            pos = comma + 1;
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("short write to " + path.string());
}

} // namespace spiralx
