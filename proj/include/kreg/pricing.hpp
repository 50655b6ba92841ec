#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kreg/bandwidth.hpp"
#include "kreg/data_io.hpp"
#include "kreg/linearity.hpp"
#include "kreg/pricing_rows.hpp"
#include "kreg/reporting.hpp"

namespace kreg {

struct PricingConfig {
    int min_obs = 30;
    int bootstrap_replications = 250;
    std::uint64_t seed = 0;
    WildWeights wild_weights = WildWeights::Mammen;
    unsigned threads = 1;
    BandwidthSearchConfig search{};
};

// Time-series regression of one asset's excess return on the market's excess
// return, fitted both ways: CV-bandwidth kernel regression with
// semi-parametric alpha/beta, and the straight-line baseline, plus the wild
// bootstrap linearity p-value. reported_mean overrides the mean-return column
// when the caller knows the raw (not excess) mean.
CharacteristicLineRow characteristic_line(const std::string& ticker,
                                          const Eigen::VectorXd& asset_excess,
                                          const Eigen::VectorXd& market_excess,
                                          const PricingConfig& config,
                                          std::optional<double> reported_mean = std::nullopt);

// Cross-sectional regression of per-asset mean returns on their
// semi-parametric betas.
SmlRow security_market_line(const std::string& segment, const Eigen::VectorXd& betas,
                            const Eigen::VectorXd& mean_returns, const PricingConfig& config);

// Three-factor regression of one asset's excess return on
// (MKT-RF, SMB, HML), kernel and linear sides.
Ff3Row ff3_line(const std::string& ticker, const Eigen::VectorXd& asset_excess,
                const Eigen::MatrixXd& factors, const PricingConfig& config);

// Panel aggregate (1/N) sum |1 - beta_LR / beta_KR|.
double beta_gap_aggregate(std::span<const CharacteristicLineRow> rows);

// Per-asset rows over a whole panel, parallel across assets, output in panel
// asset order.
std::vector<CharacteristicLineRow> run_characteristic_lines(const ReturnPanel& panel,
                                                            const PricingConfig& config);
std::vector<Ff3Row> run_ff3_lines(const ReturnPanel& panel, const PricingConfig& config);

// Plot-ready curve set for one fitted characteristic line: kernel fit,
// confidence band, derivative, pointwise alpha and the linear baseline over
// the trimmed regressor grid.
std::vector<CurveSeries> characteristic_curves(const std::string& ticker,
                                               const Eigen::VectorXd& asset_excess,
                                               const Eigen::VectorXd& market_excess,
                                               const PricingConfig& config, int grid_points,
                                               double band_level);

}  // namespace kreg
