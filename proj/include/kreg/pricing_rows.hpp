#pragma once

#include <string>

namespace kreg {

// One asset's characteristic-line results: kernel-side (semi-parametric
// alpha/beta, kernel R^2) next to the linear baseline, with the linearity
// p-value and the selected bandwidth.
struct CharacteristicLineRow {
    std::string ticker;
    int n_obs = 0;
    double mean_return = 0.0;
    double p_value = 0.0;
    double h = 0.0;
    double r2_kr = 0.0;
    double alpha_kr = 0.0;
    double beta_kr = 0.0;
    double r2_lr = 0.0;
    double alpha_lr = 0.0;
    double beta_lr = 0.0;
};

// Cross-sectional security-market-line results for one asset segment.
struct SmlRow {
    std::string segment;
    int n_assets = 0;
    double mean_return = 0.0;
    double p_value = 0.0;
    double h = 0.0;
    double r2_kr = 0.0;
    double alpha_kr = 0.0;
    double slope_kr = 0.0;
    double r2_lr = 0.0;
    double alpha_lr = 0.0;
    double slope_lr = 0.0;
};

// Three-factor results: market, size and value loadings for the kernel and
// the linear fits.
struct Ff3Row {
    std::string ticker;
    double p_value = 0.0;
    double r2_kr = 0.0;
    double alpha_kr = 0.0;
    double beta_kr = 0.0;
    double s_kr = 0.0;
    double h_kr = 0.0;
    double r2_lr = 0.0;
    double alpha_lr = 0.0;
    double beta_lr = 0.0;
    double s_lr = 0.0;
    double h_lr = 0.0;
};

}  // namespace kreg
