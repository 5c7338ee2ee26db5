#include "spiralx/synth.hpp"

#include <algorithm>
#include <cmath>

#include "spiralx/io.hpp"
#include "spiralx/rng.hpp"

namespace spiralx {

namespace {

// Integer hash noise; no libm so pixels are bit-identical across platforms.

std::uint32_t hash3(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    std::uint32_t h = a * 0x8DA6B343u + b * 0xD8163841u + c * 0xCB1AB31Fu;
    h ^= h >> 13;
    h *= 0x85EBCA6Bu;
    h ^= h >> 16;
    return h;
}

float hash01(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    return static_cast<float>(hash3(a, b, c)) * (1.0f / 4294967296.0f);
}

/// Bilinear value noise on an 8px lattice, in [0,1].
float value_noise(std::uint32_t seed, int r, int c) {
    const int gr = r >> 3, gc = c >> 3;
    const float fr = static_cast<float>(r & 7) / 8.0f;
    const float fc = static_cast<float>(c & 7) / 8.0f;
    const float v00 = hash01(seed, gr, gc);
    const float v01 = hash01(seed, gr, gc + 1);
    const float v10 = hash01(seed, gr + 1, gc);
    const float v11 = hash01(seed, gr + 1, gc + 1);
    const float top = v00 + fc * (v01 - v00);
    const float bot = v10 + fc * (v11 - v10);
    return top + fr * (bot - top);
}

struct Painter {
    Image& img;
    std::uint32_t jitter_seed;
    int min_r = 1 << 30, max_r = -1, min_c = 1 << 30, max_c = -1;

    void plot(int r, int c, float base_r, float base_g, float base_b) {
        if (r < 0 || r >= img.rows() || c < 0 || c >= img.cols()) return;
        // mild per-pixel shade variation so strokes are not flat
        const float j = 20.0f * (hash01(jitter_seed, r, c) - 0.5f);
        img.at(0, r, c) = clamp255(base_r + j);
        img.at(1, r, c) = clamp255(base_g + j);
        img.at(2, r, c) = clamp255(base_b + j);
        min_r = std::min(min_r, r);
        max_r = std::max(max_r, r);
        min_c = std::min(min_c, c);
        max_c = std::max(max_c, c);
    }

    void disk(int r, int c, int rad, float br, float bg, float bb) {
        for (int dr = -rad; dr <= rad; ++dr)
            for (int dc = -rad; dc <= rad; ++dc)
                if (dr * dr + dc * dc <= rad * rad)
                    plot(r + dr, c + dc, br, bg, bb);
    }

    /// Bresenham line thickened by a disk of the given radius.
    void line(int r0, int c0, int r1, int c1, int rad,
              float br, float bg, float bb) {
        int dr = std::abs(r1 - r0), dc = std::abs(c1 - c0);
        const int sr = r0 < r1 ? 1 : -1;
        const int sc = c0 < c1 ? 1 : -1;
        int err = (dc > dr ? dc : -dr) / 2;
        int r = r0, c = c0;
        while (true) {
            disk(r, c, rad, br, bg, bb);
            if (r == r1 && c == c1) break;
            const int e2 = err;
            if (e2 > -dc) { err -= dr; c += sc; }
            if (e2 < dr) { err += dc; r += sr; }
        }
    }

    bool painted() const { return max_r >= 0; }

    Box bounds() const {
        // half-open pixel box -> float corners (x = col, y = row)
        return Box{static_cast<float>(min_c), static_cast<float>(min_r),
                   static_cast<float>(max_c + 1), static_cast<float>(max_r + 1)};
    }

    void reset_bounds() {
        min_r = 1 << 30; max_r = -1; min_c = 1 << 30; max_c = -1;
    }
};

bool placement_ok(const Box& candidate, const GroundTruthSet& existing) {
    for (const auto& g : existing)
        if (iou(candidate, g.box) >= 0.3) return false;
    return true;
}

struct StrokeColor {
    float r, g, b;
};

StrokeColor stroke_color(Rng& rng) {
    const float base = 28.0f + static_cast<float>(uniform_below(rng, 36));
    return {base + 8.0f, base + 2.0f, base};
}

int rand_range(Rng& rng, int lo, int hi) { // inclusive, lo <= hi
    return lo + static_cast<int>(uniform_below(
                    rng, static_cast<std::uint32_t>(hi - lo + 1)));
}

/// One horizontal or vertical elongated stroke; the enclosing box aspect
/// ratio always lands beyond 3:1.
bool add_flexural_stroke(Painter& p, Rng& rng, GroundTruthSet& out, int cls) {
    const int size = p.img.rows();
    const int rad = size >= 48 ? rand_range(rng, 2, 3) : 2;
    const int thickness = 2 * rad + 1;
    const int margin = rad + 2;
    const int min_len = thickness * 7 / 2 + 2;
    const int max_len = std::min(size * 3 / 4, size - 2 * margin - 2);
    if (max_len < min_len) return false;
    const int len = rand_range(rng, min_len, max_len);
    const bool horizontal = uniform_below(rng, 2) == 0;
    const StrokeColor sc = stroke_color(rng);

    for (int attempt = 0; attempt < 40; ++attempt) {
        int r0, c0, r1, c1;
        if (horizontal) {
            r0 = r1 = rand_range(rng, margin, size - margin - 1);
            c0 = rand_range(rng, margin, size - margin - len - 1);
            c1 = c0 + len;
        } else {
            c0 = c1 = rand_range(rng, margin, size - margin - 1);
            r0 = rand_range(rng, margin, size - margin - len - 1);
            r1 = r0 + len;
        }
        const Box candidate{static_cast<float>(std::min(c0, c1) - rad),
                            static_cast<float>(std::min(r0, r1) - rad),
                            static_cast<float>(std::max(c0, c1) + rad + 1),
                            static_cast<float>(std::max(r0, r1) + rad + 1)};
        if (!placement_ok(candidate, out)) continue;
        p.reset_bounds();
        p.line(r0, c0, r1, c1, rad, sc.r, sc.g, sc.b);
        if (!p.painted()) return false;
        out.push_back({p.bounds(), cls, 0});
        return true;
    }
    return false;
}

/// X, V or single-diagonal figure inside a square region.
bool add_shear_figure(Painter& p, Rng& rng, GroundTruthSet& out, int cls) {
    const int size = p.img.rows();
    const int rad = size >= 48 ? rand_range(rng, 2, 3) : 2;
    const int margin = rad + 2;
    const int min_extent = size / 4;
    const int max_extent = std::min(size / 2, size - 2 * margin - 2);
    if (max_extent < min_extent) return false;
    const int extent = rand_range(rng, min_extent, max_extent);
    const int shape = static_cast<int>(uniform_below(rng, 3)); // 0=X 1=V 2=diag
    const StrokeColor sc = stroke_color(rng);

    for (int attempt = 0; attempt < 40; ++attempt) {
        const int r0 = rand_range(rng, margin, size - margin - extent - 1);
        const int c0 = rand_range(rng, margin, size - margin - extent - 1);
        const Box candidate{static_cast<float>(c0 - rad),
                            static_cast<float>(r0 - rad),
                            static_cast<float>(c0 + extent + rad + 1),
                            static_cast<float>(r0 + extent + rad + 1)};
        if (!placement_ok(candidate, out)) continue;
        p.reset_bounds();
        switch (shape) {
            case 0: // X
                p.line(r0, c0, r0 + extent, c0 + extent, rad, sc.r, sc.g, sc.b);
                p.line(r0, c0 + extent, r0 + extent, c0, rad, sc.r, sc.g, sc.b);
                break;
            case 1: // V
                p.line(r0, c0, r0 + extent, c0 + extent / 2, rad, sc.r, sc.g, sc.b);
                p.line(r0, c0 + extent, r0 + extent, c0 + extent / 2, rad,
                       sc.r, sc.g, sc.b);
                break;
            default: // diagonal
                p.line(r0, c0, r0 + extent, c0 + extent, rad, sc.r, sc.g, sc.b);
                break;
        }
        if (!p.painted()) return false;
        out.push_back({p.bounds(), cls, 0});
        return true;
    }
    return false;
}

/// Irregular blob from a cluster of overlapping disks on a short walk.
bool add_blob(Painter& p, Rng& rng, GroundTruthSet& out, int cls) {
    const int size = p.img.rows();
    const int base_rad = size >= 64 ? rand_range(rng, 3, 5) : 3;
    const int reach = 2 * base_rad;
    const int margin = base_rad + reach + 2;
    if (size <= 2 * margin) return false;
    const StrokeColor sc = stroke_color(rng);

    for (int attempt = 0; attempt < 40; ++attempt) {
        const int r0 = rand_range(rng, margin, size - margin - 1);
        const int c0 = rand_range(rng, margin, size - margin - 1);
        const Box candidate{static_cast<float>(c0 - margin),
                            static_cast<float>(r0 - margin),
                            static_cast<float>(c0 + margin + 1),
                            static_cast<float>(r0 + margin + 1)};
        if (!placement_ok(candidate, out)) continue;
        p.reset_bounds();
        const int n_disks = rand_range(rng, 4, 6);
        int r = r0, c = c0;
        for (int i = 0; i < n_disks; ++i) {
            p.disk(r, c, base_rad, sc.r, sc.g, sc.b);
            r = std::clamp(r + rand_range(rng, -base_rad, base_rad),
                           r0 - reach, r0 + reach);
            c = std::clamp(c + rand_range(rng, -base_rad, base_rad),
                           c0 - reach, c0 + reach);
        }
        if (!p.painted()) return false;
        out.push_back({p.bounds(), cls, 0});
        return true;
    }
    return false;
}

bool boxes_well_separated(const GroundTruthSet& boxes) {
    for (std::size_t i = 0; i < boxes.size(); ++i)
        for (std::size_t j = i + 1; j < boxes.size(); ++j)
            if (iou(boxes[i].box, boxes[j].box) >= 0.5) return false;
    return true;
}

Sample generate_sample_once(int cls, std::uint32_t seed, int size) {
    Sample s;
    s.image = Image(size, size);
    Rng rng(seed);
    const std::uint32_t tex_seed = rng();
    const float base = 150.0f + static_cast<float>(uniform_below(rng, 50));
    const float tint_r = static_cast<float>(uniform_below(rng, 16));
    const float tint_b = static_cast<float>(uniform_below(rng, 16));
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            const float n = 45.0f * (value_noise(tex_seed, r, c) - 0.5f);
            s.image.at(0, r, c) = clamp255(base + tint_r + n);
            s.image.at(1, r, c) = clamp255(base + n);
            s.image.at(2, r, c) = clamp255(base + tint_b + n);
        }

    Painter painter{s.image, rng()};
    switch (cls) {
        case Undamaged:
            break;
        case Flexural: {
            const int n = rand_range(rng, 1, 2);
            for (int i = 0; i < n; ++i)
                add_flexural_stroke(painter, rng, s.boxes, cls);
            break;
        }
        case Shear:
            add_shear_figure(painter, rng, s.boxes, cls);
            break;
        case Combined:
            add_flexural_stroke(painter, rng, s.boxes, cls);
            add_shear_figure(painter, rng, s.boxes, cls);
            add_blob(painter, rng, s.boxes, cls);
            break;
        default:
            break;
    }
    return s;
}

} // namespace

Sample generate_sample(int cls, std::uint32_t seed, int size) {
    if (size < 32)
        throw DomainError("generate_sample: size must be >= 32, got " +
                          std::to_string(size));
    if (cls < 0 || cls >= kNumClasses)
        throw DomainError("generate_sample: class must be in [0,3]");

    // Placement rejection keeps boxes apart already; the deterministic
    // re-roll below makes the non-overlap invariant unconditional.
    for (std::uint32_t retry = 0;; ++retry) {
        const std::uint32_t s = retry == 0 ? seed : derive_seed(seed, retry);
        Sample sample = generate_sample_once(cls, s, size);
        const bool has_damage = cls != Undamaged;
        if ((!has_damage || !sample.boxes.empty()) &&
            boxes_well_separated(sample.boxes))
            return sample;
        if (retry >= 32)
            throw DomainError("generate_sample: could not place class " +
                              std::to_string(cls) + " at size " +
                              std::to_string(size));
    }
}

std::vector<SampleRecord> DatasetManifest::split(const std::string& name) const {
    std::vector<SampleRecord> out;
    for (const auto& r : records)
        if (r.split == name) out.push_back(r);
    return out;
}

DatasetManifest generate_dataset(int n_train, int n_val, int n_test,
                                 std::uint32_t seed,
                                 const std::filesystem::path& out_dir,
                                 int image_size) {
    if (n_train < 1 || n_val < 1 || n_test < 1)
        throw DomainError("generate_dataset: split sizes must be >= 1");
    std::filesystem::create_directories(out_dir / "images");

    DatasetManifest manifest;
    manifest.root = out_dir;
    CsvWriter csv(out_dir / "manifest.csv");

    const struct { const char* name; int count; } splits[] = {
        {"train", n_train}, {"val", n_val}, {"test", n_test}};
    int global_index = 0;
    for (const auto& sp : splits) {
        for (int i = 0; i < sp.count; ++i, ++global_index) {
            const int cls = i % kNumClasses;
            const std::uint32_t sample_seed = derive_seed(seed, global_index);
            Sample s = generate_sample(cls, sample_seed, image_size);

            char name[64];
            std::snprintf(name, sizeof(name), "images/img_%05d.spfm", global_index);
            write_image_spfm(out_dir / name, s.image);

            SampleRecord rec;
            rec.split = sp.name;
            rec.file = name;
            rec.cls = cls;
            std::vector<std::string> row{rec.split, rec.file, std::to_string(cls)};
            for (const auto& g : s.boxes) {
                rec.boxes.push_back(g.box);
                row.push_back(format_float(g.box.x1));
                row.push_back(format_float(g.box.y1));
                row.push_back(format_float(g.box.x2));
                row.push_back(format_float(g.box.y2));
            }
            csv.row(row);
            manifest.records.push_back(std::move(rec));
        }
    }
    csv.close();
    return manifest;
}

DatasetManifest read_manifest(const std::filesystem::path& dataset_dir) {
    DatasetManifest manifest;
    manifest.root = dataset_dir;
    const auto rows = read_csv(dataset_dir / "manifest.csv");
    for (const auto& row : rows) {
        if (row.size() < 3 || (row.size() - 3) % 4 != 0)
            throw IoError("manifest.csv: malformed row with " +
                          std::to_string(row.size()) + " fields");
        SampleRecord rec;
        rec.split = row[0];
        rec.file = row[1];
        rec.cls = std::stoi(row[2]);
        for (std::size_t i = 3; i + 3 < row.size(); i += 4)
            rec.boxes.push_back(Box{std::stof(row[i]), std::stof(row[i + 1]),
                                    std::stof(row[i + 2]), std::stof(row[i + 3])});
        manifest.records.push_back(std::move(rec));
    }
    return manifest;
}

namespace {

int parse_class_field(const std::string& s) {
    for (int c = 0; c < kNumClasses; ++c)
        if (s == damage_class_name(c)) return c;
    const int v = std::stoi(s); // throws on garbage
    if (v < 0 || v >= kNumClasses) throw std::out_of_range("class id");
    return v;
}

} // namespace

FolderLoadReport load_folder(const std::filesystem::path& folder,
                             const std::filesystem::path& annotations_csv) {
    FolderLoadReport report;
    report.manifest.root = folder;
    const auto rows = read_csv(annotations_csv);
    if (rows.empty())
        report.warnings.push_back("annotation file " + annotations_csv.string() +
                                  " is empty; manifest has no samples");

    std::vector<SampleRecord>& records = report.manifest.records;
    auto find_record = [&](const std::string& file) -> SampleRecord* {
        for (auto& r : records)
            if (r.file == file) return &r;
        return nullptr;
    };

    // Image sizes are probed once per file and cached for box validation.
    struct Probe { bool ok; int rows; int cols; };
    std::vector<std::pair<std::string, Probe>> probed;
    auto probe = [&](const std::string& file) -> Probe {
        for (const auto& [f, p] : probed)
            if (f == file) return p;
        Probe p{false, 0, 0};
        try {
            const Image img = read_image_any(folder / file);
            p = {true, img.rows(), img.cols()};
        } catch (const std::exception&) {
        }
        probed.emplace_back(file, p);
        return p;
    };

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string where = "row " + std::to_string(i + 1);
        if (row.size() != 2 && row.size() != 6) {
            report.errors.push_back(where + ": expected 2 or 6 fields, got " +
                                    std::to_string(row.size()));
            continue;
        }
        const std::string& file = row[0];
        int cls;
        try {
            cls = parse_class_field(row[1]);
        } catch (const std::exception&) {
            report.errors.push_back(where + ": bad class '" + row[1] + "'");
            continue;
        }
        const Probe p = probe(file);
        if (!p.ok) {
            report.errors.push_back(where + ": cannot load image '" + file + "'");
            continue;
        }

        SampleRecord* rec = find_record(file);
        if (!rec) {
            records.push_back({"test", file, cls, {}});
            rec = &records.back();
        }
        if (row.size() == 2) continue; // boxless declaration

        Box box;
        try {
            box = Box{std::stof(row[2]), std::stof(row[3]), std::stof(row[4]),
                      std::stof(row[5])};
        } catch (const std::exception&) {
            report.errors.push_back(where + ": malformed box coordinates");
            continue;
        }
        if (!box.valid()) {
            report.errors.push_back(where + ": degenerate box");
            continue;
        }
        if (box.x1 < 0 || box.y1 < 0 || box.x2 > static_cast<float>(p.cols) ||
            box.y2 > static_cast<float>(p.rows)) {
            report.errors.push_back(where + ": box exceeds image bounds");
            continue;
        }
        rec->boxes.push_back(box);
    }
    return report;
}

} // namespace spiralx
