#include "timflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "timflow/errors.hpp"
#include "timflow/render.hpp"

namespace timflow {

using nlohmann::json;

namespace {

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

template <typename T>
T field(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("field '") + key + "': " + e.what());
    }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return field<T>(j, key);
}

void expect_schema(const json& j, const std::string& schema) {
    const auto got = field<std::string>(j, "schema");
    if (got != schema)
        throw ParseError("expected schema '" + schema + "', got '" + got + "'");
}

// overflow_ratio may be infinite (no material inside the cooling surface)
json ratio_to_json(double v) {
    if (std::isfinite(v)) return v;
    return "inf";
}

double ratio_from_json(const json& j) {
    if (j.is_string()) return std::numeric_limits<double>::infinity();
    if (j.is_null()) return std::numeric_limits<double>::infinity();
    return j.get<double>();
}

json field_values(const Field& f) { return json(f.values); }

Field field_from(const json& values, int w, int h, const char* name) {
    Field f(w, h);
    if (!values.is_array() || values.size() != f.values.size())
        throw ParseError(std::string("mask '") + name + "' must hold " +
                         std::to_string(f.values.size()) + " values");
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (!values[i].is_number())
            throw ParseError(std::string("mask '") + name + "' has a non-numeric entry");
        f.values[i] = values[i].get<double>();
    }
    return f;
}

json grid_to_json(const MaterialGrid& grid) {
    return {{"width", grid.width},
            {"height", grid.height},
            {"cell_size", grid.cell_size},
            {"offgrid_sink", grid.offgrid_sink},
            {"amounts", grid.amounts}};
}

MaterialGrid grid_from_json(const json& j) {
    MaterialGrid grid(field<int>(j, "width"), field<int>(j, "height"),
                      field<double>(j, "cell_size"));
    grid.offgrid_sink = field<double>(j, "offgrid_sink");
    grid.amounts = field<std::vector<double>>(j, "amounts");
    if (grid.amounts.size() != static_cast<std::size_t>(grid.width) * grid.height)
        throw ParseError("grid amounts length does not match dimensions");
    return grid;
}

json gap_to_json(const GapSpec& gap) {
    return {{"g_final", gap.g_final},
            {"g_max", gap.g_max},
            {"g_min", gap.g_min},
            {"n_steps", gap.n_steps}};
}

GapSpec gap_from_json(const json& j) {
    GapSpec gap;
    gap.g_final = field<double>(j, "g_final");
    gap.g_max = field<double>(j, "g_max");
    gap.g_min = field<double>(j, "g_min");
    gap.n_steps = field<int>(j, "n_steps");
    return gap;
}

}  // namespace

const char* weight_kind_name(WeightKind kind) {
    switch (kind) {
        case WeightKind::none: return "none";
        case WeightKind::con: return "con";
        case WeightKind::lin: return "lin";
        case WeightKind::squ: return "squ";
        case WeightKind::log: return "log";
    }
    return "none";
}

WeightKind weight_kind_from(const std::string& name) {
    if (name == "none") return WeightKind::none;
    if (name == "con") return WeightKind::con;
    if (name == "lin") return WeightKind::lin;
    if (name == "squ") return WeightKind::squ;
    if (name == "log") return WeightKind::log;
    throw ParseError("unknown weighting function '" + name + "'");
}

std::string product_to_json(const Product& product) {
    json j{{"schema", "timflow.product/1"},
           {"name", product.name},
           {"grid",
            {{"width", product.grid_width},
             {"height", product.grid_height},
             {"cell_size", product.cell_size}}},
           {"gap", gap_to_json(product.gap)},
           {"masks",
            {{"cool", field_values(product.areas.cool)},
             {"over", field_values(product.areas.over)},
             {"tab", field_values(product.areas.tab)}}}};
    return j.dump(2);
}

Product parse_product_json(const std::string& text) {
    const json j = parse_text(text);
    expect_schema(j, "timflow.product/1");
    Product product;
    product.name = field_or<std::string>(j, "name", "");
    const json grid = field<json>(j, "grid");
    product.grid_width = field<int>(grid, "width");
    product.grid_height = field<int>(grid, "height");
    product.cell_size = field<double>(grid, "cell_size");
    if (product.grid_width <= 0 || product.grid_height <= 0)
        throw ValidationError("grid dimensions must be positive");
    product.gap = gap_from_json(field<json>(j, "gap"));
    const json masks = field<json>(j, "masks");
    product.areas.cool =
        field_from(field<json>(masks, "cool"), product.grid_width, product.grid_height, "cool");
    product.areas.over =
        field_from(field<json>(masks, "over"), product.grid_width, product.grid_height, "over");
    product.areas.tab =
        field_from(field<json>(masks, "tab"), product.grid_width, product.grid_height, "tab");
    validate_product(product);
    return product;
}

std::string path_to_json(const DispensePath& path) {
    json points = json::array();
    for (const Vec2& p : path.points) points.push_back({p.x, p.y});
    json j{{"schema", "timflow.path/1"}, {"points", points}, {"feedrate", path.feedrate}};
    if (!path.frozen.empty()) j["frozen"] = path.frozen;
    return j.dump(2);
}

DispensePath parse_path_json(const std::string& text) {
    const json j = parse_text(text);
    expect_schema(j, "timflow.path/1");
    DispensePath path;
    const json points = field<json>(j, "points");
    if (!points.is_array()) throw ParseError("'points' must be an array of [x, y] pairs");
    for (const json& p : points) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw ParseError("'points' must be an array of [x, y] pairs");
        path.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    path.feedrate = field_or<double>(j, "feedrate", 0.0);
    path.frozen = field_or<std::vector<bool>>(j, "frozen", {});
    validate_path(path);
    return path;
}

std::string config_to_json(const ObjectiveConfig& config) {
    json j{{"schema", "timflow.objective/1"},
           {"weights",
            {{"comp_cool", config.w_comp_cool},
             {"comp_over", config.w_comp_over},
             {"comp_tab", config.w_comp_tab},
             {"init_over", config.w_init_over},
             {"void_bin", config.w_void_bin},
             {"void_area", config.w_void_area}}},
           {"functions",
            {{"f_con", weight_kind_name(config.f_con)},
             {"f_area", weight_kind_name(config.f_area)},
             {"f_init", weight_kind_name(config.f_init)},
             {"lin_slope", config.lin_slope}}}};
    return j.dump(2);
}

ObjectiveConfig parse_config_json(const std::string& text) {
    const json j = parse_text(text);
    expect_schema(j, "timflow.objective/1");
    ObjectiveConfig config;
    const json w = field<json>(j, "weights");
    config.w_comp_cool = field<double>(w, "comp_cool");
    config.w_comp_over = field<double>(w, "comp_over");
    config.w_comp_tab = field<double>(w, "comp_tab");
    config.w_init_over = field<double>(w, "init_over");
    config.w_void_bin = field<double>(w, "void_bin");
    config.w_void_area = field<double>(w, "void_area");
    const json f = field<json>(j, "functions");
    config.f_con = weight_kind_from(field<std::string>(f, "f_con"));
    config.f_area = weight_kind_from(field<std::string>(f, "f_area"));
    config.f_init = weight_kind_from(field<std::string>(f, "f_init"));
    config.lin_slope = field_or<double>(f, "lin_slope", 1.0);
    validate_config(config);
    return config;
}

namespace {

json gap_report_to_json(const GapReport& g) {
    return {{"gap", g.gap},
            {"l_comp_cool", g.l_comp_cool},
            {"l_comp_over", g.l_comp_over},
            {"l_comp_tab", g.l_comp_tab},
            {"coverage_fraction", g.coverage_fraction},
            {"overflow_ratio", ratio_to_json(g.overflow_ratio)},
            {"taboo_violation_fraction", g.taboo_violation_fraction}};
}

GapReport gap_report_from_json(const json& j) {
    GapReport g;
    g.gap = field<double>(j, "gap");
    g.l_comp_cool = field<double>(j, "l_comp_cool");
    g.l_comp_over = field<double>(j, "l_comp_over");
    g.l_comp_tab = field<double>(j, "l_comp_tab");
    g.coverage_fraction = field<double>(j, "coverage_fraction");
    g.overflow_ratio = ratio_from_json(j.at("overflow_ratio"));
    g.taboo_violation_fraction = field<double>(j, "taboo_violation_fraction");
    return g;
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
    json gaps = json::array();
    for (const GapReport& g : report.gaps) gaps.push_back(gap_report_to_json(g));
    json snapshots = json::array();
    for (const SnapshotStats& s : report.snapshots)
        snapshots.push_back({{"gap", s.gap},
                             {"void_count", s.void_count},
                             {"void_area_cells", s.void_area_cells}});
    json j{{"schema", "timflow.report/1"},
           {"total_loss", report.total_loss},
           {"terms",
            {{"comp_cool", report.l_comp_cool},
             {"comp_over", report.l_comp_over},
             {"comp_tab", report.l_comp_tab},
             {"init_over", report.l_init_over},
             {"void_bin_init", report.l_void_bin_init},
             {"void_bin_med", report.l_void_bin_med},
             {"void_area_init", report.l_void_area_init},
             {"void_area_med", report.l_void_area_med}}},
           {"stats",
            {{"coverage_fraction", report.coverage_fraction},
             {"overflow_ratio", ratio_to_json(report.overflow_ratio)},
             {"taboo_violation_fraction", report.taboo_violation_fraction},
             {"void_area_fraction", report.void_area_fraction}}},
           {"coverage_strategy", report.coverage_strategy},
           {"gaps", gaps},
           {"snapshots", snapshots},
           {"initial", grid_to_json(report.initial)},
           {"final", grid_to_json(report.final_state)}};
    return j.dump(2);
}

EvaluationReport parse_report_json(const std::string& text) {
    const json j = parse_text(text);
    expect_schema(j, "timflow.report/1");
    EvaluationReport report;
    report.total_loss = field<double>(j, "total_loss");
    const json terms = field<json>(j, "terms");
    report.l_comp_cool = field<double>(terms, "comp_cool");
    report.l_comp_over = field<double>(terms, "comp_over");
    report.l_comp_tab = field<double>(terms, "comp_tab");
    report.l_init_over = field<double>(terms, "init_over");
    report.l_void_bin_init = field<double>(terms, "void_bin_init");
    report.l_void_bin_med = field<double>(terms, "void_bin_med");
    report.l_void_area_init = field<double>(terms, "void_area_init");
    report.l_void_area_med = field<double>(terms, "void_area_med");
    const json stats = field<json>(j, "stats");
    report.coverage_fraction = field<double>(stats, "coverage_fraction");
    report.overflow_ratio = ratio_from_json(stats.at("overflow_ratio"));
    report.taboo_violation_fraction = field<double>(stats, "taboo_violation_fraction");
    report.void_area_fraction = field<double>(stats, "void_area_fraction");
    report.coverage_strategy = field<std::string>(j, "coverage_strategy");
    for (const json& g : field<json>(j, "gaps")) report.gaps.push_back(gap_report_from_json(g));
    for (const json& s : field<json>(j, "snapshots"))
        report.snapshots.push_back({field<double>(s, "gap"), field<int>(s, "void_count"),
                                    field<double>(s, "void_area_cells")});
    report.initial = grid_from_json(field<json>(j, "initial"));
    report.final_state = grid_from_json(field<json>(j, "final"));
    return report;
}

std::string trial_to_json(const TrialResult& trial) {
    json j{{"schema", "timflow.trial/1"},
           {"seed", trial.seed},
           {"segments", trial.segments},
           {"evaluations", trial.evaluations},
           {"loss_history", trial.loss_history},
           {"best_path", json::parse(path_to_json(trial.best_path))},
           {"best_report", json::parse(report_to_json(trial.best_report))}};
    return j.dump(2);
}

TrialResult parse_trial_json(const std::string& text) {
    const json j = parse_text(text);
    expect_schema(j, "timflow.trial/1");
    TrialResult trial;
    trial.seed = field<std::uint64_t>(j, "seed");
    trial.segments = field<int>(j, "segments");
    trial.evaluations = field<long>(j, "evaluations");
    trial.loss_history = field<std::vector<double>>(j, "loss_history");
    trial.best_path = parse_path_json(field<json>(j, "best_path").dump());
    trial.best_report = parse_report_json(field<json>(j, "best_report").dump());
    return trial;
}

std::string read_text_file(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ParseError("cannot open: " + file);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

void write_text_file_atomic(const std::string& file, const std::string& content) {
    const std::string tmp = file + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot open for writing: " + tmp);
        out << content;
        out.flush();
        if (!out) throw ValidationError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, file);
}

Product load_product(const std::string& file) { return parse_product_json(read_text_file(file)); }
DispensePath load_path(const std::string& file) { return parse_path_json(read_text_file(file)); }
ObjectiveConfig load_config(const std::string& file) {
    return parse_config_json(read_text_file(file));
}

Product load_product_pixmap(const std::string& file, const GapSpec& gap, double cell_size,
                            const std::string& name) {
    const Pixmap image = read_ppm(file);
    Product product;
    product.name = name.empty() ? std::filesystem::path(file).stem().string() : name;
    product.grid_width = image.width;
    product.grid_height = image.height;
    product.cell_size = cell_size;
    product.gap = gap;
    product.areas.cool = Field(image.width, image.height);
    product.areas.over = Field(image.width, image.height);
    product.areas.tab = Field(image.width, image.height);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const std::uint8_t* p = image.px(x, y);
            double cool = 0.0, tab = 0.0;
            if (p[0] <= p[1]) cool = (255.0 - p[0]) / 255.0;  // green-saturated
            else tab = (255.0 - p[1]) / 255.0;                // red-saturated
            product.areas.cool.at(x, y) = cool;
            product.areas.tab.at(x, y) = tab;
            product.areas.over.at(x, y) = 1.0 - cool;  // over is the non-cooling area
        }
    }
    validate_product(product);
    return product;
}

namespace {

std::string trial_file_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "trial_%06d.json", index);
    return buf;
}

}  // namespace

TrialStore::TrialStore(const std::filesystem::path& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_ / "trials");
    const std::filesystem::path index_file = dir_ / "index.json";
    if (std::filesystem::exists(index_file)) {
        const json j = parse_text(read_text_file(index_file.string()));
        expect_schema(j, "timflow.trials-index/1");
        for (const json& e : field<json>(j, "entries")) {
            IndexEntry entry;
            entry.file = field<std::string>(e, "file");
            entry.seed = field<std::uint64_t>(e, "seed");
            entry.segments = field<int>(e, "segments");
            entry.coverage_fraction = field<double>(e, "coverage_fraction");
            entry.total_loss = field<double>(e, "total_loss");
            entries_.push_back(std::move(entry));
        }
    }
    // never reuse an index, even if a crash left a trial file out of the index
    for (const auto& item : std::filesystem::directory_iterator(dir_ / "trials")) {
        const std::string stem = item.path().stem().string();
        if (stem.rfind("trial_", 0) != 0) continue;
        const int idx = std::atoi(stem.substr(6).c_str());
        next_index_ = std::max(next_index_, idx + 1);
    }
    next_index_ = std::max(next_index_, static_cast<int>(entries_.size()));
}

int TrialStore::append(const TrialResult& trial) {
    const int index = next_index_++;
    const std::string file = trial_file_name(index);
    write_text_file_atomic((dir_ / "trials" / file).string(), trial_to_json(trial));
    IndexEntry entry;
    entry.file = file;
    entry.seed = trial.seed;
    entry.segments = trial.segments;
    entry.coverage_fraction = trial.best_report.coverage_fraction;
    entry.total_loss = trial.best_report.total_loss;
    entries_.push_back(std::move(entry));
    rewrite_index();
    return index;
}

void TrialStore::rewrite_index() {
    json entries = json::array();
    for (const IndexEntry& e : entries_)
        entries.push_back({{"file", e.file},
                           {"seed", e.seed},
                           {"segments", e.segments},
                           {"coverage_fraction", e.coverage_fraction},
                           {"total_loss", e.total_loss}});
    const json j{{"schema", "timflow.trials-index/1"}, {"entries", entries}};
    write_text_file_atomic((dir_ / "index.json").string(), j.dump(2));
}

std::vector<TrialStore::IndexEntry> TrialStore::index() const { return entries_; }

TrialResult TrialStore::load(const IndexEntry& entry) const {
    return parse_trial_json(read_text_file((dir_ / "trials" / entry.file).string()));
}

std::vector<TrialResult> TrialStore::load_all() const {
    std::vector<TrialResult> out;
    out.reserve(entries_.size());
    for (const IndexEntry& entry : entries_) out.push_back(load(entry));
    return out;
}

}  // namespace timflow
