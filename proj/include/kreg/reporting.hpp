#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kreg/errors.hpp"
#include "kreg/pricing_rows.hpp"

namespace kreg {

enum class TableFormat { Csv, Json };

// CSV cells are rounded to stat_decimals; JSON always carries full double
// precision. p-value cells get a significance-star prefix: * below 0.10,
// ** below 0.05, *** below 0.01 (e.g. "**0.02").
struct TableStyle {
    int stat_decimals = 2;
    int p_decimals = 2;
};

std::string format_p_value(double p, int decimals = 2);

std::size_t emit_table(std::span<const CharacteristicLineRow> rows, TableFormat format,
                       const std::filesystem::path& destination, TableStyle style = {2, 2});
std::size_t emit_table(std::span<const SmlRow> rows, TableFormat format,
                       const std::filesystem::path& destination, TableStyle style = {4, 2});
std::size_t emit_table(std::span<const Ff3Row> rows, TableFormat format,
                       const std::filesystem::path& destination, TableStyle style = {3, 2});

enum class CurveKind { Fit, BandLower, BandUpper, Derivative, Alpha, LinearBaseline };

const char* curve_kind_name(CurveKind kind);

struct CurveSeries {
    CurveKind kind = CurveKind::Fit;
    std::vector<double> x;  // strictly increasing
    std::vector<double> y;
    std::string asset_id;
    double bandwidth = 0.0;
    double level = 0.0;  // only meaningful for the band curves
};

// One `x,y` CSV per curve plus a manifest JSON listing kinds and metadata.
// Returns the written paths, manifest last.
std::vector<std::filesystem::path> emit_curves(std::span<const CurveSeries> curves,
                                               const std::filesystem::path& directory);

// Reads back the columns fit-sml consumes from a characteristic-line CSV.
struct ClTableEntry {
    std::string ticker;
    double mean_return = 0.0;
    double beta_kr = 0.0;
};
std::vector<ClTableEntry> read_characteristic_table(const std::filesystem::path& path);

}  // namespace kreg
