#ifndef SPIRALX_SYNTH_HPP
#define SPIRALX_SYNTH_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spiralx/metrics.hpp"
#include "spiralx/tensor.hpp"

namespace spiralx {

struct Sample {
    Image image;
    GroundTruthSet boxes; // image_id left 0; callers re-stamp as needed
};

/// Deterministic synthetic sample for one damage class: textured light
/// background plus class-specific dark strokes. Flexural draws horizontal or
/// vertical strokes, shear draws an X / V / diagonal figure, combined draws
/// one of each plus an irregular blob, undamaged is background only. Boxes
/// tightly enclose each painted element. Identical (cls, seed, size) inputs
/// produce bit-identical images on any platform: all rasterization is
/// integer Bresenham plus hash noise, no libm.
Sample generate_sample(int cls, std::uint32_t seed, int size);

struct SampleRecord {
    std::string split; // train | val | test
    std::string file;  // path relative to the dataset directory
    int cls = 0;
    std::vector<Box> boxes;
};

struct DatasetManifest {
    std::filesystem::path root;
    std::vector<SampleRecord> records;

    std::vector<SampleRecord> split(const std::string& name) const;
};

/// Writes SPFM images plus manifest.csv (one row per sample:
/// split,file,class then x1,y1,x2,y2 per box) under out_dir. Classes are
/// balanced round-robin inside each split; per-sample seeds derive from the
/// master seed so the dataset is a pure function of (counts, seed).
DatasetManifest generate_dataset(int n_train, int n_val, int n_test,
                                 std::uint32_t seed,
                                 const std::filesystem::path& out_dir,
                                 int image_size);

DatasetManifest read_manifest(const std::filesystem::path& dataset_dir);

struct FolderLoadReport {
    DatasetManifest manifest;
    std::vector<std::string> errors;   // itemized, with row numbers
    std::vector<std::string> warnings; // e.g. empty annotation file
};

/// Loads user images listed in an annotations CSV with columns
/// file,class,x1,y1,x2,y2 (one row per box, rows repeat per file; a row with
/// empty box fields declares a boxless image). Invalid rows are rejected
/// individually and reported in errors.
FolderLoadReport load_folder(const std::filesystem::path& folder,
                             const std::filesystem::path& annotations_csv);

} // namespace spiralx

#endif
