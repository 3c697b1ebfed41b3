#pragma once

#include "meshband/mesh.hpp"
#include "meshband/types.hpp"
#include "meshband/wavelet.hpp"

#include <filesystem>

namespace meshband {

enum class DataFormat { csv, bin };

DataFormat data_format_from_name(std::string_view name);  // "csv" | "bin"

/// csv: a directory of subject_<id>.csv matrices (R rows x T columns, no
/// header) plus sessions.csv with columns subject_id,task_label,n_scans in
/// timeline order. bin: single self-describing container, little-endian
/// 64-bit floats, row-major.
Dataset load_dataset(const std::filesystem::path& path, DataFormat format);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path, DataFormat format);

void save_subband_stack(const SubbandStack& stack, const std::filesystem::path& file);
SubbandStack load_subband_stack(const std::filesystem::path& file);

void save_feature_table(const FeatureTable& table, const std::filesystem::path& file);
FeatureTable load_feature_table(const std::filesystem::path& file);
void export_feature_table_csv(const FeatureTable& table, const std::filesystem::path& file);

/// FNV-1a 64-bit over a file's bytes; used for cache keys.
std::uint64_t hash_file(const std::filesystem::path& file);

}  // namespace meshband
