#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "timflow/objective.hpp"
#include "timflow/optimize.hpp"
#include "timflow/product.hpp"

namespace timflow {

// All documents are versioned JSON ("schema" key). Parse errors (syntax,
// missing/bad-typed keys) throw ParseError; domain violations throw
// ValidationError. Serialization round-trips every finite double exactly.

std::string product_to_json(const Product& product);
Product parse_product_json(const std::string& text);

std::string path_to_json(const DispensePath& path);
DispensePath parse_path_json(const std::string& text);

std::string config_to_json(const ObjectiveConfig& config);
ObjectiveConfig parse_config_json(const std::string& text);

std::string report_to_json(const EvaluationReport& report);
EvaluationReport parse_report_json(const std::string& text);

std::string trial_to_json(const TrialResult& trial);
TrialResult parse_trial_json(const std::string& text);

const char* weight_kind_name(WeightKind kind);
WeightKind weight_kind_from(const std::string& name);

std::string read_text_file(const std::string& file);
/// Write-then-rename so readers never observe a torn file.
void write_text_file_atomic(const std::string& file, const std::string& content);

Product load_product(const std::string& file);
DispensePath load_path(const std::string& file);
ObjectiveConfig load_config(const std::string& file);

/// Alternative product loader: a color pixmap in the target-area color
/// convention (white = over, green saturation = cooling fraction, red
/// saturation = taboo fraction), one pixel per grid cell. The over mask is
/// the cooling complement; gap spec and cell size come from the caller.
Product load_product_pixmap(const std::string& file, const GapSpec& gap,
                            double cell_size = 1.0, const std::string& name = "");

/// Append-only per-trial persistence: one JSON document per trial in
/// <dir>/trials plus an index rewritten atomically after each append, so a
/// crashed run resumes by appending behind the existing trials.
class TrialStore {
public:
    struct IndexEntry {
        std::string file;
        std::uint64_t seed = 0;
        int segments = 0;
        double coverage_fraction = 0.0;
        double total_loss = 0.0;
    };

    explicit TrialStore(const std::filesystem::path& dir);

    /// Persist one trial; returns its index in the store.
    int append(const TrialResult& trial);

    std::vector<IndexEntry> index() const;
    std::vector<TrialResult> load_all() const;
    TrialResult load(const IndexEntry& entry) const;
    int count() const { return next_index_; }
    const std::filesystem::path& directory() const { return dir_; }

private:
    void rewrite_index();

    std::filesystem::path dir_;
    std::vector<IndexEntry> entries_;
    int next_index_ = 0;
};

}  // namespace timflow
