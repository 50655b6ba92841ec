#include "kreg/pricing.hpp"

#include <cmath>

#include "kreg/parallel.hpp"
#include "kreg/regression.hpp"
#include "kreg/rng.hpp"
#include "kreg/semiparam.hpp"

namespace kreg {

namespace {

Eigen::MatrixXd as_column(const Eigen::VectorXd& v) {
    Eigen::MatrixXd m(v.size(), 1);
    m.col(0) = v;
    return m;
}

// Bootstrap seeds derive from (config seed, asset id) so a row never depends
// on which other assets are in the panel or on evaluation order.
std::uint64_t asset_seed(const PricingConfig& config, const std::string& id) {
    return rng::mix(config.seed ^ rng::fnv1a(id.data(), id.size()));
}

WildBootstrapConfig bootstrap_config(const PricingConfig& config, const std::string& id) {
    WildBootstrapConfig bc;
    bc.replications = config.bootstrap_replications;
    bc.seed = asset_seed(config, id);
    bc.weights = config.wild_weights;
    bc.threads = 1;  // rows are already parallel across assets
    return bc;
}

void require_min_obs(Eigen::Index n, int min_obs, const std::string& what) {
    if (n < min_obs) {
        throw InsufficientDataError(what + ": " + std::to_string(n) +
                                    " observations, floor is " + std::to_string(min_obs));
    }
}

}  // namespace

CharacteristicLineRow characteristic_line(const std::string& ticker,
                                          const Eigen::VectorXd& asset_excess,
                                          const Eigen::VectorXd& market_excess,
                                          const PricingConfig& config,
                                          std::optional<double> reported_mean) {
    if (asset_excess.size() != market_excess.size()) {
        throw DomainError("characteristic_line: series lengths differ");
    }
    require_min_obs(asset_excess.size(), config.min_obs, "characteristic_line " + ticker);

    const BandwidthResult hres =
        optimize_bandwidth(market_excess, asset_excess, config.search);
    const BandwidthMatrix H = BandwidthMatrix::single(hres.h);
    const Eigen::MatrixXd Xm = as_column(market_excess);

    const KernelFit kernel_fit = nw_fit(Xm, asset_excess, H);
    const SemiBeta sb = semi_beta(market_excess, asset_excess, hres.h);
    const SemiAlpha sa = semi_alpha(market_excess, asset_excess, sb.beta_star);
    const LinearFit linear_fit = ols_fit(Xm, asset_excess);
    const LinearityTestResult test =
        wild_bootstrap_test(Xm, asset_excess, H, bootstrap_config(config, ticker));

    CharacteristicLineRow row;
    row.ticker = ticker;
    row.n_obs = static_cast<int>(asset_excess.size());
    row.mean_return = reported_mean.value_or(asset_excess.mean());
    row.p_value = test.p_value;
    row.h = hres.h;
    row.r2_kr = kernel_fit.r_squared;
    row.alpha_kr = sa.alpha_star;
    row.beta_kr = sb.beta_star;
    row.r2_lr = linear_fit.r_squared;
    row.alpha_lr = linear_fit.alpha;
    row.beta_lr = linear_fit.betas[0];
    return row;
}

SmlRow security_market_line(const std::string& segment, const Eigen::VectorXd& betas,
                            const Eigen::VectorXd& mean_returns,
                            const PricingConfig& config) {
    if (betas.size() != mean_returns.size()) {
        throw DomainError("security_market_line: betas and returns lengths differ");
    }
    if (betas.size() < 10) {
        throw InsufficientDataError("security_market_line: need at least 10 assets");
    }
    if ((betas.array() - betas[0]).abs().maxCoeff() == 0.0) {
        throw DegenerateSampleError("security_market_line: all betas identical");
    }

    const BandwidthResult hres = optimize_bandwidth(betas, mean_returns, config.search);
    const BandwidthMatrix H = BandwidthMatrix::single(hres.h);
    const Eigen::MatrixXd Xm = as_column(betas);

    const KernelFit kernel_fit = nw_fit(Xm, mean_returns, H);
    const SemiBeta sb = semi_beta(betas, mean_returns, hres.h);
    const SemiAlpha sa = semi_alpha(betas, mean_returns, sb.beta_star);
    const LinearFit linear_fit = ols_fit(Xm, mean_returns);
    const LinearityTestResult test =
        wild_bootstrap_test(Xm, mean_returns, H, bootstrap_config(config, segment));

    SmlRow row;
    row.segment = segment;
    row.n_assets = static_cast<int>(betas.size());
    row.mean_return = mean_returns.mean();
    row.p_value = test.p_value;
    row.h = hres.h;
    row.r2_kr = kernel_fit.r_squared;
    row.alpha_kr = sa.alpha_star;
    row.slope_kr = sb.beta_star;
    row.r2_lr = linear_fit.r_squared;
    row.alpha_lr = linear_fit.alpha;
    row.slope_lr = linear_fit.betas[0];
    return row;
}

Ff3Row ff3_line(const std::string& ticker, const Eigen::VectorXd& asset_excess,
                const Eigen::MatrixXd& factors, const PricingConfig& config) {
    if (factors.cols() != 3) throw DomainError("ff3_line: expected 3 factor columns");
    if (asset_excess.size() != factors.rows()) {
        throw DomainError("ff3_line: series lengths differ");
    }
    require_min_obs(asset_excess.size(), config.min_obs, "ff3_line " + ticker);

    static const char* kFactorNames[3] = {"MKT-RF", "SMB", "HML"};
    for (Eigen::Index d = 0; d < 3; ++d) {
        if ((factors.col(d).array() - factors(0, d)).abs().maxCoeff() == 0.0) {
            throw DegenerateSampleError(std::string("ff3_line ") + ticker + ": factor " +
                                        kFactorNames[d] + " is degenerate");
        }
    }

    const BandwidthMatrixResult hres =
        optimize_bandwidth_matrix(factors, asset_excess, config.search);
    const KernelFit kernel_fit = nw_fit(factors, asset_excess, hres.H);
    const SemiParamMeasures sp = ff3_semi_params(factors, asset_excess, hres.H);
    const LinearFit linear_fit = ols_fit(factors, asset_excess);
    const LinearityTestResult test =
        wild_bootstrap_test(factors, asset_excess, hres.H, bootstrap_config(config, ticker));

    Ff3Row row;
    row.ticker = ticker;
    row.p_value = test.p_value;
    row.r2_kr = kernel_fit.r_squared;
    row.alpha_kr = sp.alpha_star;
    row.beta_kr = sp.loadings[0];
    row.s_kr = sp.loadings[1];
    row.h_kr = sp.loadings[2];
    row.r2_lr = linear_fit.r_squared;
    row.alpha_lr = linear_fit.alpha;
    row.beta_lr = linear_fit.betas[0];
    row.s_lr = linear_fit.betas[1];
    row.h_lr = linear_fit.betas[2];
    return row;
}

double beta_gap_aggregate(std::span<const CharacteristicLineRow> rows) {
    if (rows.empty()) throw DomainError("beta_gap_aggregate: no rows");
    double acc = 0.0;
    for (const auto& row : rows) {
        if (row.beta_kr == 0.0) throw DomainError("beta_gap_aggregate: zero kernel beta");
        acc += std::abs(1.0 - row.beta_lr / row.beta_kr);
    }
    return acc / static_cast<double>(rows.size());
}

std::vector<CharacteristicLineRow> run_characteristic_lines(const ReturnPanel& panel,
                                                            const PricingConfig& config) {
    const std::size_t n_assets = panel.asset_ids.size();
    std::vector<CharacteristicLineRow> rows(n_assets);
    parallel_for(n_assets, config.threads, [&](std::size_t a) {
        const std::string& ticker = panel.asset_ids[a];
        const ExcessReturns ex = excess_returns(panel, ticker);

        // The reported mean is the asset's raw mean return over its valid dates.
        const auto& series = panel.assets.at(ticker);
        double total = 0.0;
        std::size_t count = 0;
        for (double v : series) {
            if (!is_gap(v)) {
                total += v;
                ++count;
            }
        }
        rows[a] = characteristic_line(ticker, ex.asset, ex.market, config,
                                      total / static_cast<double>(count));
    });
    return rows;
}

std::vector<Ff3Row> run_ff3_lines(const ReturnPanel& panel, const PricingConfig& config) {
    const std::size_t n_assets = panel.asset_ids.size();
    std::vector<Ff3Row> rows(n_assets);
    parallel_for(n_assets, config.threads, [&](std::size_t a) {
        const std::string& ticker = panel.asset_ids[a];
        const auto& series = panel.assets.at(ticker);

        std::vector<double> y;
        std::vector<std::array<double, 3>> x;
        for (std::size_t t = 0; t < panel.dates.size(); ++t) {
            const double asset = series[t];
            const double rf = panel.risk_free[t];
            if (is_gap(asset) || is_gap(rf) || is_gap(panel.factors[0][t]) ||
                is_gap(panel.factors[1][t]) || is_gap(panel.factors[2][t])) {
                continue;
            }
            y.push_back(asset - rf);
            x.push_back({panel.factors[0][t], panel.factors[1][t], panel.factors[2][t]});
        }
        if (y.empty()) {
            throw InsufficientDataError("run_ff3_lines: no overlapping dates for " + ticker);
        }
        Eigen::VectorXd asset_excess =
            Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
        Eigen::MatrixXd factors(static_cast<Eigen::Index>(x.size()), 3);
        for (std::size_t i = 0; i < x.size(); ++i) {
            factors(static_cast<Eigen::Index>(i), 0) = x[i][0];
            factors(static_cast<Eigen::Index>(i), 1) = x[i][1];
            factors(static_cast<Eigen::Index>(i), 2) = x[i][2];
        }
        rows[a] = ff3_line(ticker, asset_excess, factors, config);
    });
    return rows;
}

std::vector<CurveSeries> characteristic_curves(const std::string& ticker,
                                               const Eigen::VectorXd& asset_excess,
                                               const Eigen::VectorXd& market_excess,
                                               const PricingConfig& config, int grid_points,
                                               double band_level) {
    if (asset_excess.size() != market_excess.size()) {
        throw DomainError("characteristic_curves: series lengths differ");
    }
    require_min_obs(asset_excess.size(), config.min_obs, "characteristic_curves " + ticker);

    const BandwidthResult hres =
        optimize_bandwidth(market_excess, asset_excess, config.search);
    const double h = hres.h;
    const Eigen::VectorXd grid = default_grid(market_excess, grid_points);

    const SemiBeta sb = semi_beta(market_excess, asset_excess, h);
    const LinearFit linear_fit = ols_fit(as_column(market_excess), asset_excess);
    const ConfidenceBand band =
        confidence_band(grid, market_excess, asset_excess, h, band_level);

    Eigen::VectorXd fit_values(grid.size());
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        fit_values[g] = nw_predict(grid[g], market_excess, asset_excess, h);
    }
    const Eigen::VectorXd derivative = beta_curve(market_excess, asset_excess, h, grid);
    const Eigen::VectorXd alpha_values =
        alpha_curve(market_excess, asset_excess, h, sb.beta_star, grid);

    auto make = [&](CurveKind kind, const Eigen::VectorXd& y, double level) {
        CurveSeries c;
        c.kind = kind;
        c.asset_id = ticker;
        c.bandwidth = h;
        c.level = level;
        c.x.assign(grid.data(), grid.data() + grid.size());
        c.y.assign(y.data(), y.data() + y.size());
        return c;
    };

    Eigen::VectorXd baseline(grid.size());
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        baseline[g] = linear_fit.alpha + linear_fit.betas[0] * grid[g];
    }

    std::vector<CurveSeries> curves;
    curves.push_back(make(CurveKind::Fit, fit_values, 0.0));
    curves.push_back(make(CurveKind::BandLower, band.lower, band_level));
    curves.push_back(make(CurveKind::BandUpper, band.upper, band_level));
    curves.push_back(make(CurveKind::Derivative, derivative, 0.0));
    curves.push_back(make(CurveKind::Alpha, alpha_values, 0.0));
    curves.push_back(make(CurveKind::LinearBaseline, baseline, 0.0));
    return curves;
}

}  // namespace kreg
