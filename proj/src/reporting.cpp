#include "kreg/reporting.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace kreg {

namespace {

using nlohmann::json;

std::string format_stat(double v, int decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, v);
    return buffer;
}

void check_cell(const std::string& value) {
    if (value.find(',') != std::string::npos || value.find('\n') != std::string::npos) {
        throw DataFormatError("table cell may not contain commas or newlines: " + value);
    }
}

std::size_t write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
    return text.size();
}

std::size_t write_json(const std::filesystem::path& path, const json& j) {
    return write_text(path, j.dump(2) + "\n");
}

}  // namespace

std::string format_p_value(double p, int decimals) {
    std::string stars;
    if (p < 0.01) {
        stars = "***";
    } else if (p < 0.05) {
        stars = "**";
    } else if (p < 0.10) {
        stars = "*";
    }
    return stars + format_stat(p, decimals);
}

std::size_t emit_table(std::span<const CharacteristicLineRow> rows, TableFormat format,
                       const std::filesystem::path& destination, TableStyle style) {
    if (format == TableFormat::Json) {
        json j = json::array();
        for (const auto& r : rows) {
            j.push_back({{"ticker", r.ticker},
                         {"n_obs", r.n_obs},
                         {"mean_return", r.mean_return},
                         {"p_value", r.p_value},
                         {"h", r.h},
                         {"r2_kr", r.r2_kr},
                         {"alpha_kr", r.alpha_kr},
                         {"beta_kr", r.beta_kr},
                         {"r2_lr", r.r2_lr},
                         {"alpha_lr", r.alpha_lr},
                         {"beta_lr", r.beta_lr}});
        }
        return write_json(destination, j);
    }
    std::string text = "ticker,n_obs,mean_return,p_value,h,r2_kr,alpha_kr,beta_kr,"
                       "r2_lr,alpha_lr,beta_lr\n";
    for (const auto& r : rows) {
        check_cell(r.ticker);
        text += r.ticker;
        text += ',' + std::to_string(r.n_obs);
        text += ',' + format_stat(r.mean_return, style.stat_decimals);
        text += ',' + format_p_value(r.p_value, style.p_decimals);
        text += ',' + format_stat(r.h, style.stat_decimals);
        text += ',' + format_stat(r.r2_kr, style.stat_decimals);
        text += ',' + format_stat(r.alpha_kr, style.stat_decimals);
        text += ',' + format_stat(r.beta_kr, style.stat_decimals);
        text += ',' + format_stat(r.r2_lr, style.stat_decimals);
        text += ',' + format_stat(r.alpha_lr, style.stat_decimals);
        text += ',' + format_stat(r.beta_lr, style.stat_decimals);
        text += '\n';
    }
    return write_text(destination, text);
}

std::size_t emit_table(std::span<const SmlRow> rows, TableFormat format,
                       const std::filesystem::path& destination, TableStyle style) {
    if (format == TableFormat::Json) {
        json j = json::array();
        for (const auto& r : rows) {
            j.push_back({{"segment", r.segment},
                         {"n_assets", r.n_assets},
                         {"mean_return", r.mean_return},
                         {"p_value", r.p_value},
                         {"h", r.h},
                         {"r2_kr", r.r2_kr},
                         {"alpha_kr", r.alpha_kr},
                         {"slope_kr", r.slope_kr},
                         {"r2_lr", r.r2_lr},
                         {"alpha_lr", r.alpha_lr},
                         {"slope_lr", r.slope_lr}});
        }
        return write_json(destination, j);
    }
    std::string text = "segment,n_assets,mean_return,p_value,h,r2_kr,alpha_kr,slope_kr,"
                       "r2_lr,alpha_lr,slope_lr\n";
    for (const auto& r : rows) {
        check_cell(r.segment);
        text += r.segment;
        text += ',' + std::to_string(r.n_assets);
        text += ',' + format_stat(r.mean_return, style.stat_decimals);
        text += ',' + format_p_value(r.p_value, style.p_decimals);
        text += ',' + format_stat(r.h, style.stat_decimals);
        text += ',' + format_stat(r.r2_kr, style.stat_decimals);
        text += ',' + format_stat(r.alpha_kr, style.stat_decimals);
        text += ',' + format_stat(r.slope_kr, style.stat_decimals);
        text += ',' + format_stat(r.r2_lr, style.stat_decimals);
        text += ',' + format_stat(r.alpha_lr, style.stat_decimals);
        text += ',' + format_stat(r.slope_lr, style.stat_decimals);
        text += '\n';
    }
    return write_text(destination, text);
}

std::size_t emit_table(std::span<const Ff3Row> rows, TableFormat format,
                       const std::filesystem::path& destination, TableStyle style) {
    if (format == TableFormat::Json) {
        json j = json::array();
        for (const auto& r : rows) {
            j.push_back({{"ticker", r.ticker},
                         {"p_value", r.p_value},
                         {"r2_kr", r.r2_kr},
                         {"alpha_kr", r.alpha_kr},
                         {"beta_kr", r.beta_kr},
                         {"s_kr", r.s_kr},
                         {"h_kr", r.h_kr},
                         {"r2_lr", r.r2_lr},
                         {"alpha_lr", r.alpha_lr},
                         {"beta_lr", r.beta_lr},
                         {"s_lr", r.s_lr},
                         {"h_lr", r.h_lr}});
        }
        return write_json(destination, j);
    }
    std::string text = "ticker,p_value,r2_kr,alpha_kr,beta_kr,s_kr,h_kr,"
                       "r2_lr,alpha_lr,beta_lr,s_lr,h_lr\n";
    for (const auto& r : rows) {
        check_cell(r.ticker);
        text += r.ticker;
        text += ',' + format_p_value(r.p_value, style.p_decimals);
        text += ',' + format_stat(r.r2_kr, style.stat_decimals);
        text += ',' + format_stat(r.alpha_kr, style.stat_decimals);
        text += ',' + format_stat(r.beta_kr, style.stat_decimals);
        text += ',' + format_stat(r.s_kr, style.stat_decimals);
        text += ',' + format_stat(r.h_kr, style.stat_decimals);
        text += ',' + format_stat(r.r2_lr, style.stat_decimals);
        text += ',' + format_stat(r.alpha_lr, style.stat_decimals);
        text += ',' + format_stat(r.beta_lr, style.stat_decimals);
        text += ',' + format_stat(r.s_lr, style.stat_decimals);
        text += ',' + format_stat(r.h_lr, style.stat_decimals);
        text += '\n';
    }
    return write_text(destination, text);
}

const char* curve_kind_name(CurveKind kind) {
    switch (kind) {
        case CurveKind::Fit: return "fit";
        case CurveKind::BandLower: return "band_lower";
        case CurveKind::BandUpper: return "band_upper";
        case CurveKind::Derivative: return "derivative";
        case CurveKind::Alpha: return "alpha";
        case CurveKind::LinearBaseline: return "linear_baseline";
    }
    return "unknown";
}

std::vector<std::filesystem::path> emit_curves(std::span<const CurveSeries> curves,
                                               const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw IoError("cannot create directory " + directory.string());

    std::vector<std::filesystem::path> written;
    json manifest = json::array();
    for (const auto& curve : curves) {
        if (curve.x.empty()) {
            throw DomainError("emit_curves: empty grid for curve '" +
                              std::string(curve_kind_name(curve.kind)) + "'");
        }
        if (curve.x.size() != curve.y.size()) {
            throw DomainError("emit_curves: x and y lengths differ");
        }
        for (std::size_t i = 1; i < curve.x.size(); ++i) {
            if (!(curve.x[i] > curve.x[i - 1])) {
                throw DomainError("emit_curves: x grid must be strictly increasing");
            }
        }
        check_cell(curve.asset_id);

        std::string text = "x,y\n";
        char buffer[80];
        for (std::size_t i = 0; i < curve.x.size(); ++i) {
            std::snprintf(buffer, sizeof(buffer), "%.10g,%.10g\n", curve.x[i], curve.y[i]);
            text += buffer;
        }
        const std::filesystem::path path =
            directory / (curve.asset_id + "_" + curve_kind_name(curve.kind) + ".csv");
        write_text(path, text);
        written.push_back(path);

        manifest.push_back({{"kind", curve_kind_name(curve.kind)},
                            {"file", path.filename().string()},
                            {"asset", curve.asset_id},
                            {"bandwidth", curve.bandwidth},
                            {"level", curve.level},
                            {"points", curve.x.size()}});
    }
    const std::filesystem::path manifest_path = directory / "manifest.json";
    write_json(manifest_path, manifest);
    written.push_back(manifest_path);
    return written;
}

std::vector<ClTableEntry> read_characteristic_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw DataFormatError(path.string() + ": empty file");

    // Locate the needed columns by name so style changes don't break readers.
    std::vector<std::string> names;
    {
        std::string field;
        std::istringstream hs(header);
        while (std::getline(hs, field, ',')) {
            while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
                field.pop_back();
            }
            names.push_back(field);
        }
    }
    auto column = [&](const std::string& name) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return i;
        }
        throw DataFormatError(path.string() + ": missing column '" + name + "'");
    };
    const std::size_t ticker_col = column("ticker");
    const std::size_t mean_col = column("mean_return");
    const std::size_t beta_col = column("beta_kr");

    std::vector<ClTableEntry> entries;
    std::string line;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != names.size()) {
            throw DataFormatError(path.string() + ":" + std::to_string(line_number) +
                                  ": malformed row");
        }
        ClTableEntry entry;
        entry.ticker = fields[ticker_col];
        try {
            entry.mean_return = std::stod(fields[mean_col]);
            entry.beta_kr = std::stod(fields[beta_col]);
        } catch (const std::exception&) {
            throw DataFormatError(path.string() + ":" + std::to_string(line_number) +
                                  ": cannot parse numeric cell");
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

}  // namespace kreg
