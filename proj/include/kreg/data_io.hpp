#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kreg/errors.hpp"

namespace kreg {

// Gaps in a series are explicit NaN markers, never zeros.
inline bool is_gap(double v) { return std::isnan(v); }

enum class Units { Percent, Decimal };

struct LoadOptions {
    Units units = Units::Percent;  // Decimal inputs are converted to percent
};

// Date-aligned return panel. Every stored series shares the panel's date
// index; dates are strictly increasing ISO-8601 strings.
struct ReturnPanel {
    std::vector<std::string> dates;
    std::vector<std::string> asset_ids;  // input order
    std::map<std::string, std::vector<double>> assets;
    std::vector<double> market;     // raw market return (mkt_rf + rf)
    std::vector<double> risk_free;
    std::array<std::vector<double>, 3> factors;  // mkt_rf, smb, hml

    std::size_t observations(const std::string& asset_id) const;
};

// Loads the two-file panel:
//   returns file: header `date,ticker,ret`
//   factors file: header `date,mkt_rf,smb,hml,rf`
// Files ending in .gz are transparently decompressed. Parse errors report the
// offending line number; duplicated dates are rejected.
ReturnPanel load_panel(const std::filesystem::path& returns_path,
                       const std::filesystem::path& factors_path,
                       const LoadOptions& options = {});

struct ExcessReturns {
    Eigen::VectorXd asset;   // asset - rf
    Eigen::VectorXd market;  // market - rf
};

// Elementwise excess returns over the dates where the asset, the market and
// the risk-free series are all present.
ExcessReturns excess_returns(const ReturnPanel& panel, const std::string& asset_id);

struct SyntheticSpec {
    std::string dgp;  // linear | quadratic | cubic | threshold | ff3-linear | custom-coefficients
    int n = 500;
    double noise_sigma = 0.1;
    std::uint64_t seed = 42;
    std::vector<double> true_params;  // empty selects per-dgp defaults
};

// Everything needed to score an estimator against the generating process.
// For non-linear processes loadings_true is the sample mean of the true
// derivative (the estimand of the average-slope measures) and alpha_true the
// matching mean abnormal level.
struct GroundTruth {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd m_true;
    Eigen::MatrixXd dm_true;
    double alpha_true = 0.0;
    Eigen::VectorXd loadings_true;
    std::vector<double> params;  // coefficients actually used
};

struct SyntheticData {
    ReturnPanel panel;
    GroundTruth truth;
    std::string ticker;
};

// Deterministic given the seed. The panel carries the response as one asset's
// return series with a zero risk-free rate; univariate processes fill the
// market column with the regressor and zero out SMB/HML.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Writers matching the load_panel schemas (full double precision).
void write_returns_csv(const ReturnPanel& panel, const std::filesystem::path& path);
void write_factors_csv(const ReturnPanel& panel, const std::filesystem::path& path);

}  // namespace kreg
