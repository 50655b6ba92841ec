#include "kreg/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

#include "kreg/data_io.hpp"
#include "kreg/numeric.hpp"
#include "kreg/parallel.hpp"
#include "kreg/pricing.hpp"
#include "kreg/reporting.hpp"
#include "kreg/version.hpp"

namespace kreg::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonOptions {
    std::string returns_path;
    std::string factors_path;
    std::string out_dir;
    int bootstrap = 250;
    std::uint64_t seed = 42;
    std::string units = "percent";
    int grid = 101;
    double band_level = 0.95;
    unsigned threads = hardware_threads();
    int min_obs = 30;
    int decimals = -1;  // negative: per-table default (2 CL, 4 SML, 3 FF3)
};

Units parse_units(const std::string& units) {
    if (units == "percent") return Units::Percent;
    if (units == "decimal") return Units::Decimal;
    throw DomainError("unknown units '" + units + "' (expected percent or decimal)");
}

PricingConfig pricing_config(const CommonOptions& o) {
    PricingConfig cfg;
    cfg.min_obs = o.min_obs;
    cfg.bootstrap_replications = o.bootstrap;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    return cfg;
}

void add_common_flags(CLI::App* cmd, CommonOptions& o, bool needs_panel) {
    if (needs_panel) {
        cmd->add_option("--returns", o.returns_path, "Returns CSV (date,ticker,ret)")
            ->required();
        cmd->add_option("--factors", o.factors_path,
                        "Factors CSV (date,mkt_rf,smb,hml,rf)")
            ->required();
    }
    cmd->add_option("--out", o.out_dir, "Output directory")
        ->envname("KREG_OUT_DIR")
        ->required();
    cmd->add_option("--bootstrap", o.bootstrap, "Bootstrap replications")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--units", o.units, "Input return units: percent or decimal");
    cmd->add_option("--grid", o.grid, "Curve grid size")->check(CLI::PositiveNumber);
    cmd->add_option("--band-level", o.band_level, "Confidence band coverage")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--threads", o.threads, "Worker threads");
    cmd->add_option("--min-obs", o.min_obs, "Minimum observations per asset")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--decimals", o.decimals, "CSV digits after the decimal point");
}

TableStyle table_style(const CommonOptions& o, int default_decimals) {
    return TableStyle{o.decimals >= 0 ? o.decimals : default_decimals, 2};
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const CommonOptions& o, const json& inputs,
                    const std::vector<std::string>& outputs) {
    json manifest{{"command", command},
                  {"version", kVersion},
                  {"seed", o.seed},
                  {"bootstrap", o.bootstrap},
                  {"units", o.units},
                  {"band_level", o.band_level},
                  {"grid", o.grid},
                  {"threads", o.threads},
                  {"min_obs", o.min_obs},
                  {"inputs", inputs},
                  {"outputs", outputs}};
    std::ofstream out(out_dir / "run_manifest.json", std::ios::binary);
    if (!out) throw IoError("cannot write " + (out_dir / "run_manifest.json").string());
    out << manifest.dump(2) << "\n";
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
}

int run_fit_cl(const CommonOptions& o, const std::vector<std::string>& curve_tickers) {
    const ReturnPanel panel =
        load_panel(o.returns_path, o.factors_path, LoadOptions{parse_units(o.units)});
    const PricingConfig cfg = pricing_config(o);
    const std::vector<CharacteristicLineRow> rows = run_characteristic_lines(panel, cfg);

    const fs::path out_dir(o.out_dir);
    ensure_dir(out_dir);
    emit_table(std::span<const CharacteristicLineRow>(rows), TableFormat::Csv,
               out_dir / "characteristic_lines.csv", table_style(o, 2));
    emit_table(std::span<const CharacteristicLineRow>(rows), TableFormat::Json,
               out_dir / "characteristic_lines.json");
    std::vector<std::string> outputs{"characteristic_lines.csv", "characteristic_lines.json"};

    std::vector<std::string> wanted = curve_tickers;
    if (wanted.size() == 1 && wanted[0] == "all") wanted = panel.asset_ids;
    if (!wanted.empty()) {
        std::vector<CurveSeries> curves;
        for (const auto& ticker : wanted) {
            const ExcessReturns ex = excess_returns(panel, ticker);
            auto bundle = characteristic_curves(ticker, ex.asset, ex.market, cfg, o.grid,
                                                o.band_level);
            curves.insert(curves.end(), bundle.begin(), bundle.end());
        }
        const auto written =
            emit_curves(std::span<const CurveSeries>(curves), out_dir / "curves");
        for (const auto& p : written) {
            outputs.push_back("curves/" + p.filename().string());
        }
    }
    write_manifest(out_dir, "fit-cl", o,
                   json{{"returns", o.returns_path}, {"factors", o.factors_path}}, outputs);
    return 0;
}

int run_fit_sml(const CommonOptions& o, const std::vector<std::string>& inputs,
                std::vector<std::string> segments, bool with_curves) {
    if (segments.empty()) {
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            segments.push_back(inputs.size() == 1 ? "all" : "segment" + std::to_string(i + 1));
        }
    }
    if (segments.size() != inputs.size()) {
        throw DomainError("fit-sml: --segment count must match --input count");
    }

    PricingConfig cfg = pricing_config(o);
    cfg.min_obs = std::min(cfg.min_obs, 10);  // cross-sections are small

    std::vector<SmlRow> rows;
    std::vector<CurveSeries> curves;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto entries = read_characteristic_table(inputs[i]);
        Eigen::VectorXd betas(static_cast<Eigen::Index>(entries.size()));
        Eigen::VectorXd means(static_cast<Eigen::Index>(entries.size()));
        for (std::size_t k = 0; k < entries.size(); ++k) {
            betas[static_cast<Eigen::Index>(k)] = entries[k].beta_kr;
            means[static_cast<Eigen::Index>(k)] = entries[k].mean_return;
        }
        rows.push_back(security_market_line(segments[i], betas, means, cfg));
        if (with_curves) {
            auto bundle = characteristic_curves(segments[i], means, betas, cfg, o.grid,
                                                o.band_level);
            curves.insert(curves.end(), bundle.begin(), bundle.end());
        }
    }

    const fs::path out_dir(o.out_dir);
    ensure_dir(out_dir);
    emit_table(std::span<const SmlRow>(rows), TableFormat::Csv, out_dir / "sml.csv",
               table_style(o, 4));
    emit_table(std::span<const SmlRow>(rows), TableFormat::Json, out_dir / "sml.json");
    std::vector<std::string> outputs{"sml.csv", "sml.json"};
    if (!curves.empty()) {
        const auto written =
            emit_curves(std::span<const CurveSeries>(curves), out_dir / "curves");
        for (const auto& p : written) outputs.push_back("curves/" + p.filename().string());
    }
    json input_json = json::array();
    for (const auto& in : inputs) input_json.push_back(in);
    write_manifest(out_dir, "fit-sml", o, json{{"tables", input_json}}, outputs);
    return 0;
}

int run_fit_ff3(const CommonOptions& o) {
    const ReturnPanel panel =
        load_panel(o.returns_path, o.factors_path, LoadOptions{parse_units(o.units)});
    const std::vector<Ff3Row> rows = run_ff3_lines(panel, pricing_config(o));

    const fs::path out_dir(o.out_dir);
    ensure_dir(out_dir);
    emit_table(std::span<const Ff3Row>(rows), TableFormat::Csv, out_dir / "ff3.csv",
               table_style(o, 3));
    emit_table(std::span<const Ff3Row>(rows), TableFormat::Json, out_dir / "ff3.json");
    write_manifest(out_dir, "fit-ff3", o,
                   json{{"returns", o.returns_path}, {"factors", o.factors_path}},
                   {"ff3.csv", "ff3.json"});
    return 0;
}

int run_test_linearity(const CommonOptions& o, const std::string& ticker) {
    const ReturnPanel panel =
        load_panel(o.returns_path, o.factors_path, LoadOptions{parse_units(o.units)});
    const ExcessReturns ex = excess_returns(panel, ticker);

    const BandwidthResult hres = optimize_bandwidth(ex.market, ex.asset);
    Eigen::MatrixXd Xm(ex.market.size(), 1);
    Xm.col(0) = ex.market;

    WildBootstrapConfig bc;
    bc.replications = o.bootstrap;
    bc.seed = o.seed;
    bc.threads = o.threads;
    const LinearityTestResult result =
        wild_bootstrap_test(Xm, ex.asset, BandwidthMatrix::single(hres.h), bc);

    std::vector<double> sorted = result.bootstrap_t;
    std::sort(sorted.begin(), sorted.end());
    json summary{{"ticker", ticker},
                 {"n_obs", ex.asset.size()},
                 {"h", hres.h},
                 {"t_observed", result.t_observed},
                 {"p_value", result.p_value},
                 {"B", result.B},
                 {"seed", result.seed},
                 {"bootstrap",
                  {{"min", sorted.front()},
                   {"q25", quantile_sorted(sorted, 0.25)},
                   {"median", quantile_sorted(sorted, 0.5)},
                   {"q75", quantile_sorted(sorted, 0.75)},
                   {"max", sorted.back()}}}};

    const fs::path out_dir(o.out_dir);
    ensure_dir(out_dir);
    const std::string name = "linearity_" + ticker + ".json";
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) throw IoError("cannot write " + (out_dir / name).string());
    out << summary.dump(2) << "\n";
    out.close();
    write_manifest(out_dir, "test-linearity", o,
                   json{{"returns", o.returns_path},
                        {"factors", o.factors_path},
                        {"ticker", ticker}},
                   {name});
    return 0;
}

int run_synth(const std::string& dgp, int n, double noise, std::uint64_t seed,
              const std::vector<double>& params, const std::string& out,
              std::string factors_out) {
    SyntheticSpec spec;
    spec.dgp = dgp;
    spec.n = n;
    spec.noise_sigma = noise;
    spec.seed = seed;
    spec.true_params = params;
    const SyntheticData data = generate_synthetic(spec);

    if (factors_out.empty()) {
        fs::path p(out);
        const std::string stem = p.stem().string();
        factors_out = (p.parent_path() / (stem + "_factors" + p.extension().string())).string();
    }
    write_returns_csv(data.panel, out);
    write_factors_csv(data.panel, factors_out);
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Kernel and semi-parametric asset pricing toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOptions opt;

    // fit-cl
    auto* fit_cl = app.add_subcommand(
        "fit-cl", "Characteristic lines: kernel and linear CAPM per asset");
    std::vector<std::string> curve_tickers;
    add_common_flags(fit_cl, opt, true);
    fit_cl->add_option("--curves", curve_tickers,
                       "Emit figure data for these tickers ('all' for every asset)");

    // fit-sml
    auto* fit_sml = app.add_subcommand(
        "fit-sml", "Security market line from a characteristic-line table");
    std::vector<std::string> sml_inputs;
    std::vector<std::string> sml_segments;
    bool sml_curves = false;
    fit_sml->add_option("--input", sml_inputs, "characteristic_lines.csv from fit-cl")
        ->required();
    fit_sml->add_option("--segment", sml_segments, "Segment label per input table");
    fit_sml->add_flag("--emit-curves", sml_curves, "Also write curve data per segment");
    add_common_flags(fit_sml, opt, false);

    // fit-ff3
    auto* fit_ff3 = app.add_subcommand(
        "fit-ff3", "Three-factor model: kernel and linear fits per asset");
    add_common_flags(fit_ff3, opt, true);

    // test-linearity
    auto* test_lin = app.add_subcommand(
        "test-linearity", "Wild bootstrap linearity test for one asset");
    std::string ticker;
    test_lin->add_option("--ticker", ticker, "Asset to test")->required();
    add_common_flags(test_lin, opt, true);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic panel");
    std::string dgp;
    int synth_n = 500;
    double synth_noise = 0.1;
    std::uint64_t synth_seed = 42;
    std::vector<double> synth_params;
    std::string synth_out;
    std::string synth_factors_out;
    synth->add_option("--dgp", dgp,
                      "linear|quadratic|cubic|threshold|ff3-linear|custom-coefficients")
        ->required();
    synth->add_option("--n", synth_n, "Observations")->check(CLI::PositiveNumber);
    synth->add_option("--noise", synth_noise, "Noise standard deviation");
    synth->add_option("--seed", synth_seed, "Random seed");
    synth->add_option("--params", synth_params, "Generating coefficients");
    synth->add_option("--out", synth_out, "Returns CSV destination")->required();
    synth->add_option("--factors-out", synth_factors_out,
                      "Factors CSV destination (default: <out>_factors.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (fit_cl->parsed()) return run_fit_cl(opt, curve_tickers);
        if (fit_sml->parsed()) return run_fit_sml(opt, sml_inputs, sml_segments, sml_curves);
        if (fit_ff3->parsed()) return run_fit_ff3(opt);
        if (test_lin->parsed()) return run_test_linearity(opt, ticker);
        if (synth->parsed()) {
            return run_synth(dgp, synth_n, synth_noise, synth_seed, synth_params, synth_out,
                             synth_factors_out);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int run(const std::vector<std::string>& args) {
    std::vector<std::string> with_program{"kreg"};
    with_program.insert(with_program.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(with_program.size());
    for (const auto& a : with_program) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace kreg::cli
