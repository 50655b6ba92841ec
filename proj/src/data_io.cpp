#include "kreg/data_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "kreg/numeric.hpp"
#include "kreg/rng.hpp"

namespace kreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string read_file_text(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("file not found: " + path.string());
    }
    if (path.string().ends_with(".gz")) {
        gzFile gz = gzopen(path.string().c_str(), "rb");
        if (gz == nullptr) throw IoError("cannot open " + path.string());
        std::string out;
        char buffer[1 << 16];
        int got = 0;
        while ((got = gzread(gz, buffer, sizeof(buffer))) > 0) {
            out.append(buffer, static_cast<std::size_t>(got));
        }
        const bool failed = got < 0;
        gzclose(gz);
        if (failed) throw IoError("gzip read error in " + path.string());
        return out;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    for (auto& f : fields) {
        while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
        while (!f.empty() && f.front() == ' ') f.erase(f.begin());
    }
    return fields;
}

double parse_value(const std::string& field, const std::filesystem::path& path,
                   std::size_t line_number) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0') {
        throw DataFormatError(path.string() + ":" + std::to_string(line_number) +
                              ": cannot parse number '" + field + "'");
    }
    return v;
}

struct RawLine {
    std::size_t number;
    std::vector<std::string> fields;
};

std::vector<RawLine> parse_csv(const std::filesystem::path& path,
                               const std::vector<std::string>& expected_header) {
    const std::string text = read_file_text(path);
    std::vector<RawLine> rows;
    std::size_t line_number = 0;
    std::string::size_type pos = 0;
    bool header_seen = false;
    while (pos <= text.size()) {
        const auto newline = text.find('\n', pos);
        const std::string line = newline == std::string::npos
                                     ? text.substr(pos)
                                     : text.substr(pos, newline - pos);
        pos = newline == std::string::npos ? text.size() + 1 : newline + 1;
        ++line_number;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (!header_seen) {
            if (fields != expected_header) {
                std::string want;
                for (const auto& h : expected_header) {
                    if (!want.empty()) want += ',';
                    want += h;
                }
                throw DataFormatError(path.string() + ": expected header '" + want + "'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != expected_header.size()) {
            throw DataFormatError(path.string() + ":" + std::to_string(line_number) +
                                  ": expected " + std::to_string(expected_header.size()) +
                                  " fields, got " + std::to_string(fields.size()));
        }
        rows.push_back(RawLine{line_number, std::move(fields)});
    }
    if (!header_seen) throw DataFormatError(path.string() + ": empty file");
    return rows;
}

// Civil-calendar helpers (proleptic Gregorian).
long days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

std::string civil_from_days(long z) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%04ld-%02u-%02u", y + (m <= 2), m, d);
    return buffer;
}

std::string format_full(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

}  // namespace

std::size_t ReturnPanel::observations(const std::string& asset_id) const {
    const auto it = assets.find(asset_id);
    if (it == assets.end()) throw DomainError("unknown asset id: " + asset_id);
    std::size_t count = 0;
    for (double v : it->second) {
        if (!is_gap(v)) ++count;
    }
    return count;
}

ReturnPanel load_panel(const std::filesystem::path& returns_path,
                       const std::filesystem::path& factors_path,
                       const LoadOptions& options) {
    const auto return_rows = parse_csv(returns_path, {"date", "ticker", "ret"});
    const auto factor_rows = parse_csv(factors_path, {"date", "mkt_rf", "smb", "hml", "rf"});
    const double scale = options.units == Units::Decimal ? 100.0 : 1.0;

    // Panel date index: union of both files, sorted.
    std::vector<std::string> dates;
    dates.reserve(return_rows.size() + factor_rows.size());
    for (const auto& row : return_rows) dates.push_back(row.fields[0]);
    for (const auto& row : factor_rows) dates.push_back(row.fields[0]);
    std::sort(dates.begin(), dates.end());
    dates.erase(std::unique(dates.begin(), dates.end()), dates.end());

    std::unordered_map<std::string, std::size_t> date_index;
    date_index.reserve(dates.size());
    for (std::size_t i = 0; i < dates.size(); ++i) date_index[dates[i]] = i;

    ReturnPanel panel;
    panel.dates = dates;
    const std::size_t n = dates.size();
    panel.market.assign(n, kNaN);
    panel.risk_free.assign(n, kNaN);
    for (auto& f : panel.factors) f.assign(n, kNaN);

    for (const auto& row : factor_rows) {
        const std::size_t t = date_index.at(row.fields[0]);
        if (!is_gap(panel.risk_free[t])) {
            throw DataFormatError(factors_path.string() + ":" + std::to_string(row.number) +
                                  ": duplicated date " + row.fields[0]);
        }
        const double mkt_rf = scale * parse_value(row.fields[1], factors_path, row.number);
        const double smb = scale * parse_value(row.fields[2], factors_path, row.number);
        const double hml = scale * parse_value(row.fields[3], factors_path, row.number);
        const double rf = scale * parse_value(row.fields[4], factors_path, row.number);
        panel.factors[0][t] = mkt_rf;
        panel.factors[1][t] = smb;
        panel.factors[2][t] = hml;
        panel.risk_free[t] = rf;
        panel.market[t] = mkt_rf + rf;
    }

    for (const auto& row : return_rows) {
        const std::string& date = row.fields[0];
        const std::string& ticker = row.fields[1];
        if (ticker.empty()) {
            throw DataFormatError(returns_path.string() + ":" + std::to_string(row.number) +
                                  ": empty ticker");
        }
        auto [it, inserted] = panel.assets.try_emplace(ticker);
        if (inserted) {
            it->second.assign(n, kNaN);
            panel.asset_ids.push_back(ticker);
        }
        const std::size_t t = date_index.at(date);
        if (!is_gap(it->second[t])) {
            throw DataFormatError(returns_path.string() + ":" + std::to_string(row.number) +
                                  ": duplicated date " + date + " for ticker " + ticker);
        }
        it->second[t] = scale * parse_value(row.fields[2], returns_path, row.number);
    }
    return panel;
}

ExcessReturns excess_returns(const ReturnPanel& panel, const std::string& asset_id) {
    const auto it = panel.assets.find(asset_id);
    if (it == panel.assets.end()) throw DomainError("unknown asset id: " + asset_id);
    const auto& series = it->second;

    std::vector<double> asset_ex;
    std::vector<double> market_ex;
    for (std::size_t t = 0; t < panel.dates.size(); ++t) {
        const double a = series[t];
        const double m = panel.market[t];
        const double rf = panel.risk_free[t];
        if (is_gap(a) || is_gap(m) || is_gap(rf)) continue;
        asset_ex.push_back(a - rf);
        market_ex.push_back(m - rf);
    }
    if (asset_ex.empty()) {
        throw InsufficientDataError("excess_returns: no overlapping dates for " + asset_id);
    }
    ExcessReturns out;
    out.asset = Eigen::Map<const Eigen::VectorXd>(asset_ex.data(),
                                                  static_cast<Eigen::Index>(asset_ex.size()));
    out.market = Eigen::Map<const Eigen::VectorXd>(market_ex.data(),
                                                   static_cast<Eigen::Index>(market_ex.size()));
    return out;
}

namespace {

std::vector<double> dgp_defaults(const std::string& dgp) {
    if (dgp == "linear") return {0.02, 1.1};
    if (dgp == "quadratic") return {0.0, 1.0, 0.4};
    if (dgp == "cubic") return {0.0, 0.0, 0.0, 1.0};
    if (dgp == "threshold") return {0.0, 1.0, 2.0, 0.0};
    if (dgp == "ff3-linear") return {0.02, 1.0, 0.5, 0.3};
    if (dgp == "custom-coefficients") return {0.0, 1.0};
    throw DomainError("generate_synthetic: unknown dgp '" + dgp + "'");
}

double polynomial(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
    return acc;
}

double polynomial_derivative(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        acc = acc * x + static_cast<double>(k) * c[k];
    }
    return acc;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    if (spec.n < 10) throw DomainError("generate_synthetic: n must be at least 10");
    if (spec.noise_sigma < 0.0) throw DomainError("generate_synthetic: negative noise_sigma");
    const std::vector<double> defaults = dgp_defaults(spec.dgp);  // validates dgp name
    const std::vector<double> params = spec.true_params.empty() ? defaults : spec.true_params;
    const Eigen::Index n = spec.n;
    const bool ff3 = spec.dgp == "ff3-linear";
    const Eigen::Index D = ff3 ? 3 : 1;

    if (spec.dgp == "linear" && params.size() != 2) {
        throw DomainError("generate_synthetic: linear dgp takes 2 parameters");
    }
    if (spec.dgp == "quadratic" && params.size() != 3) {
        throw DomainError("generate_synthetic: quadratic dgp takes 3 parameters");
    }
    if (spec.dgp == "cubic" && params.size() != 4) {
        throw DomainError("generate_synthetic: cubic dgp takes 4 parameters");
    }
    if (spec.dgp == "threshold" && params.size() != 4) {
        throw DomainError("generate_synthetic: threshold dgp takes 4 parameters");
    }
    if (ff3 && params.size() != 4) {
        throw DomainError("generate_synthetic: ff3-linear dgp takes 4 parameters");
    }
    if (spec.dgp == "custom-coefficients" && params.size() < 1) {
        throw DomainError("generate_synthetic: custom-coefficients needs coefficients");
    }

    GroundTruth truth;
    truth.params = params;
    truth.X.resize(n, D);
    truth.m_true.resize(n);
    truth.dm_true.resize(n, D);

    // Scales chosen so values look like daily percent returns. Multifactor
    // draws use a bounded (uniform) distribution: the product-kernel local
    // fits need every anchor to keep enough neighbours in three dimensions,
    // which heavy tails break at small n.
    const double factor_sd[3] = {1.0, 0.5, 0.5};
    constexpr double kSqrt3 = 1.7320508075688772;
    for (Eigen::Index d = 0; d < D; ++d) {
        const std::uint64_t stream = static_cast<std::uint64_t>(d);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double u = rng::uniform(spec.seed, stream, static_cast<std::uint64_t>(i));
            truth.X(i, d) = ff3 ? factor_sd[d] * kSqrt3 * (2.0 * u - 1.0)
                                : factor_sd[d] * normal_quantile(u);
        }
    }

    if (ff3) {
        const double alpha = params[0];
        for (Eigen::Index i = 0; i < n; ++i) {
            truth.m_true[i] = alpha + params[1] * truth.X(i, 0) + params[2] * truth.X(i, 1) +
                              params[3] * truth.X(i, 2);
            truth.dm_true(i, 0) = params[1];
            truth.dm_true(i, 1) = params[2];
            truth.dm_true(i, 2) = params[3];
        }
    } else if (spec.dgp == "threshold") {
        const double alpha = params[0];
        const double slope_low = params[1];
        const double slope_high = params[2];
        const double tau = params[3];
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = truth.X(i, 0);
            if (x <= tau) {
                truth.m_true[i] = alpha + slope_low * x;
                truth.dm_true(i, 0) = slope_low;
            } else {
                truth.m_true[i] = alpha + slope_low * tau + slope_high * (x - tau);
                truth.dm_true(i, 0) = slope_high;
            }
        }
    } else {
        // Polynomial family: linear, quadratic, cubic, custom-coefficients.
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = truth.X(i, 0);
            truth.m_true[i] = polynomial(params, x);
            truth.dm_true(i, 0) = polynomial_derivative(params, x);
        }
    }

    truth.y.resize(n);
    const std::uint64_t noise_stream = 100;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = rng::uniform(spec.seed, noise_stream, static_cast<std::uint64_t>(i));
        truth.y[i] = truth.m_true[i] + spec.noise_sigma * normal_quantile(u);
    }

    truth.loadings_true.resize(D);
    for (Eigen::Index d = 0; d < D; ++d) truth.loadings_true[d] = truth.dm_true.col(d).mean();
    truth.alpha_true = (truth.m_true - truth.X * truth.loadings_true).mean();

    SyntheticData data;
    data.truth = truth;
    data.ticker = "SYN1";

    ReturnPanel& panel = data.panel;
    const long day0 = days_from_civil(1999, 1, 4);
    panel.dates.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        panel.dates.push_back(civil_from_days(day0 + static_cast<long>(i)));
    }
    panel.asset_ids.push_back(data.ticker);
    std::vector<double>& asset = panel.assets[data.ticker];
    asset.resize(static_cast<std::size_t>(n));
    panel.risk_free.assign(static_cast<std::size_t>(n), 0.0);
    panel.market.resize(static_cast<std::size_t>(n));
    for (auto& f : panel.factors) f.assign(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::size_t t = static_cast<std::size_t>(i);
        asset[t] = truth.y[i];
        panel.market[t] = truth.X(i, 0);
        panel.factors[0][t] = truth.X(i, 0);
        if (ff3) {
            panel.factors[1][t] = truth.X(i, 1);
            panel.factors[2][t] = truth.X(i, 2);
        }
    }
    return data;
}

void write_returns_csv(const ReturnPanel& panel, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "date,ticker,ret\n";
    for (const auto& id : panel.asset_ids) {
        const auto& series = panel.assets.at(id);
        for (std::size_t t = 0; t < panel.dates.size(); ++t) {
            if (is_gap(series[t])) continue;
            out << panel.dates[t] << ',' << id << ',' << format_full(series[t]) << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_factors_csv(const ReturnPanel& panel, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "date,mkt_rf,smb,hml,rf\n";
    for (std::size_t t = 0; t < panel.dates.size(); ++t) {
        if (is_gap(panel.risk_free[t])) continue;
        out << panel.dates[t] << ',' << format_full(panel.factors[0][t]) << ','
            << format_full(panel.factors[1][t]) << ',' << format_full(panel.factors[2][t])
            << ',' << format_full(panel.risk_free[t]) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace kreg
