#include <doctest.h>

#include <json.hpp>

#include "kreg/cli.hpp"
#include "kreg/data_io.hpp"
#include "kreg/reporting.hpp"
#include "test_util.hpp"

using namespace kreg;

namespace {

void make_panel_files(const test::TempDir& dir, int n = 120, double noise = 0.4) {
    SyntheticSpec spec;
    spec.dgp = "linear";
    spec.n = n;
    spec.noise_sigma = noise;
    spec.seed = 21;
    const SyntheticData data = generate_synthetic(spec);
    write_returns_csv(data.panel, dir / "r.csv");
    write_factors_csv(data.panel, dir / "f.csv");
}

}  // namespace

TEST_CASE("fit-cl produces the table and manifest") {
    test::TempDir dir("cli_fitcl");
    make_panel_files(dir);
    const int rc = cli::run({"fit-cl", "--returns", (dir / "r.csv").string(),
                             "--factors", (dir / "f.csv").string(),
                             "--out", (dir / "out").string(),
                             "--bootstrap", "40", "--seed", "5", "--threads", "1"});
    CHECK(rc == 0);
    REQUIRE(std::filesystem::exists(dir / "out" / "characteristic_lines.csv"));
    const std::string table = test::read_file(dir / "out" / "characteristic_lines.csv");
    CHECK(table.rfind("ticker,n_obs,mean_return,p_value,h,", 0) == 0);
    CHECK(table.find("SYN1") != std::string::npos);

    const nlohmann::json manifest =
        nlohmann::json::parse(test::read_file(dir / "out" / "run_manifest.json"));
    CHECK(manifest["command"] == "fit-cl");
    CHECK(manifest["seed"] == 5);
    CHECK(manifest["bootstrap"] == 40);
    CHECK(manifest["version"].is_string());
}

TEST_CASE("fit-cl emits curve files on request") {
    test::TempDir dir("cli_curves");
    make_panel_files(dir, 150);
    const int rc = cli::run({"fit-cl", "--returns", (dir / "r.csv").string(),
                             "--factors", (dir / "f.csv").string(),
                             "--out", (dir / "out").string(),
                             "--bootstrap", "30", "--curves", "SYN1",
                             "--grid", "51", "--threads", "1"});
    CHECK(rc == 0);
    CHECK(std::filesystem::exists(dir / "out" / "curves" / "SYN1_fit.csv"));
    CHECK(std::filesystem::exists(dir / "out" / "curves" / "SYN1_band_lower.csv"));
    CHECK(std::filesystem::exists(dir / "out" / "curves" / "SYN1_derivative.csv"));
    CHECK(std::filesystem::exists(dir / "out" / "curves" / "SYN1_alpha.csv"));
    CHECK(std::filesystem::exists(dir / "out" / "curves" / "manifest.json"));
}

TEST_CASE("synth is deterministic") {
    test::TempDir dir("cli_synth");
    const std::vector<std::string> args{
        "synth", "--dgp", "threshold", "--n",   "200",
        "--seed", "7",    "--out",     (dir / "s.csv").string()};
    CHECK(cli::run(args) == 0);
    const std::string first = test::read_file(dir / "s.csv");
    const std::string first_factors = test::read_file(dir / "s_factors.csv");
    CHECK(cli::run(args) == 0);
    CHECK(test::read_file(dir / "s.csv") == first);
    CHECK(test::read_file(dir / "s_factors.csv") == first_factors);
    CHECK(first.rfind("date,ticker,ret\n", 0) == 0);
}

TEST_CASE("fit-sml consumes the fit-cl table") {
    test::TempDir dir("cli_sml");

    // Build a characteristic-line table with enough assets directly.
    std::vector<CharacteristicLineRow> rows;
    for (int j = 0; j < 25; ++j) {
        CharacteristicLineRow r;
        r.ticker = "A" + std::to_string(j);
        r.n_obs = 500;
        r.beta_kr = 0.5 + 0.05 * j;
        r.mean_return = 0.02 + 0.03 * r.beta_kr +
                        0.002 * test::normal01(33, static_cast<std::uint64_t>(j));
        rows.push_back(r);
    }
    emit_table(std::span<const CharacteristicLineRow>(rows), TableFormat::Csv,
               dir / "cl.csv", TableStyle{6, 2});

    const int rc = cli::run({"fit-sml", "--input", (dir / "cl.csv").string(),
                             "--segment", "all", "--out", (dir / "out").string(),
                             "--bootstrap", "40", "--threads", "1"});
    CHECK(rc == 0);
    const std::string table = test::read_file(dir / "out" / "sml.csv");
    CHECK(table.rfind("segment,n_assets,", 0) == 0);
    CHECK(table.find("all,25,") != std::string::npos);
}

TEST_CASE("fit-ff3 writes the three-factor table") {
    test::TempDir dir("cli_ff3");
    SyntheticSpec spec;
    spec.dgp = "ff3-linear";
    spec.n = 130;
    spec.noise_sigma = 0.3;
    spec.seed = 4;
    const SyntheticData data = generate_synthetic(spec);
    write_returns_csv(data.panel, dir / "r.csv");
    write_factors_csv(data.panel, dir / "f.csv");

    const int rc = cli::run({"fit-ff3", "--returns", (dir / "r.csv").string(),
                             "--factors", (dir / "f.csv").string(),
                             "--out", (dir / "out").string(),
                             "--bootstrap", "30", "--threads", "1"});
    CHECK(rc == 0);
    const std::string table = test::read_file(dir / "out" / "ff3.csv");
    CHECK(table.rfind("ticker,p_value,r2_kr,", 0) == 0);
    CHECK(table.find("SYN1,") != std::string::npos);
}

TEST_CASE("fit-ff3 handles a multi-asset panel in parallel") {
    test::TempDir dir("cli_ff3_multi");
    SyntheticSpec spec;
    spec.dgp = "ff3-linear";
    spec.n = 140;
    spec.noise_sigma = 0.3;
    spec.seed = 8;
    const SyntheticData data = generate_synthetic(spec);

    // Second asset: a different loading mix on the same factor panel.
    ReturnPanel panel = data.panel;
    panel.asset_ids.push_back("SYN2");
    std::vector<double> second(panel.dates.size());
    for (std::size_t t = 0; t < second.size(); ++t) {
        second[t] = 0.05 + 0.7 * panel.factors[0][t] + 0.9 * panel.factors[1][t] -
                    0.2 * panel.factors[2][t] +
                    0.3 * test::normal01(91, static_cast<std::uint64_t>(t));
    }
    panel.assets["SYN2"] = second;
    write_returns_csv(panel, dir / "r.csv");
    write_factors_csv(panel, dir / "f.csv");

    const int rc = cli::run({"fit-ff3", "--returns", (dir / "r.csv").string(),
                             "--factors", (dir / "f.csv").string(),
                             "--out", (dir / "out").string(),
                             "--bootstrap", "40", "--threads", "2"});
    CHECK(rc == 0);
    const nlohmann::json table =
        nlohmann::json::parse(test::read_file(dir / "out" / "ff3.json"));
    REQUIRE(table.size() == 2);
    CHECK(table[0]["ticker"] == "SYN1");
    CHECK(table[1]["ticker"] == "SYN2");
    CHECK(table[1]["beta_lr"].get<double>() == doctest::Approx(0.7).epsilon(0.25));
    CHECK(table[1]["s_lr"].get<double>() == doctest::Approx(0.9).epsilon(0.25));
}

TEST_CASE("test-linearity writes a JSON summary") {
    test::TempDir dir("cli_lin");
    make_panel_files(dir, 140);
    const int rc = cli::run({"test-linearity", "--ticker", "SYN1",
                             "--returns", (dir / "r.csv").string(),
                             "--factors", (dir / "f.csv").string(),
                             "--out", (dir / "out").string(),
                             "--bootstrap", "50", "--seed", "13"});
    CHECK(rc == 0);
    const nlohmann::json summary =
        nlohmann::json::parse(test::read_file(dir / "out" / "linearity_SYN1.json"));
    CHECK(summary["ticker"] == "SYN1");
    CHECK(summary["B"] == 50);
    CHECK(summary["p_value"].get<double>() >= 0.0);
    CHECK(summary["p_value"].get<double>() <= 1.0);
    CHECK(summary["bootstrap"]["median"].get<double>() >= 0.0);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(cli::run({"fit-cl", "--no-such-flag"}) == 2);
    CHECK(cli::run({"unknown-command"}) == 2);
    CHECK(cli::run(std::vector<std::string>{}) == 2);
}

TEST_CASE("data errors exit with 1") {
    test::TempDir dir("cli_err");
    CHECK(cli::run({"fit-cl", "--returns", (dir / "missing.csv").string(),
                    "--factors", (dir / "missing2.csv").string(),
                    "--out", (dir / "out").string()}) == 1);

    test::write_file(dir / "bad.csv", "not,a,panel\n1,2,3\n");
    test::write_file(dir / "f.csv", "date,mkt_rf,smb,hml,rf\n2020-01-02,0.1,0,0,0\n");
    CHECK(cli::run({"fit-cl", "--returns", (dir / "bad.csv").string(),
                    "--factors", (dir / "f.csv").string(),
                    "--out", (dir / "out").string()}) == 1);
}

TEST_CASE("help exits cleanly") {
    CHECK(cli::run({"--help"}) == 0);
}

TEST_CASE("KREG_OUT_DIR provides the default output directory") {
    test::TempDir dir("cli_env");
    make_panel_files(dir, 100);
    const std::string out = (dir / "env_out").string();
    REQUIRE(setenv("KREG_OUT_DIR", out.c_str(), 1) == 0);
    const int rc = cli::run({"fit-cl", "--returns", (dir / "r.csv").string(),
                             "--factors", (dir / "f.csv").string(),
                             "--bootstrap", "20", "--threads", "1"});
    unsetenv("KREG_OUT_DIR");
    CHECK(rc == 0);
    CHECK(std::filesystem::exists(dir / "env_out" / "characteristic_lines.csv"));
}

TEST_CASE("fit-cl honours the decimals override") {
    test::TempDir dir("cli_decimals");
    make_panel_files(dir, 100);
    const int rc = cli::run({"fit-cl", "--returns", (dir / "r.csv").string(),
                             "--factors", (dir / "f.csv").string(),
                             "--out", (dir / "out").string(),
                             "--bootstrap", "20", "--decimals", "6", "--threads", "1"});
    CHECK(rc == 0);
    const std::string table = test::read_file(dir / "out" / "characteristic_lines.csv");
    // Six-decimal cells appear after the integer n_obs column.
    CHECK(table.find("SYN1,100,") != std::string::npos);
    const auto pos = table.find("SYN1,100,");
    const std::string rest = table.substr(pos + 9);
    CHECK(rest.find('.') != std::string::npos);
    const auto dot = rest.find('.');
    CHECK(rest.substr(dot + 1, 7).find(',') == 6);  // six digits then a comma
}

TEST_CASE("fit-sml can emit segment curves") {
    test::TempDir dir("cli_sml_curves");
    std::vector<CharacteristicLineRow> rows;
    for (int j = 0; j < 30; ++j) {
        CharacteristicLineRow r;
        r.ticker = "A" + std::to_string(j);
        r.n_obs = 500;
        r.beta_kr = 0.5 + 0.04 * j;
        r.mean_return = 0.02 + 0.03 * r.beta_kr +
                        0.003 * test::normal01(44, static_cast<std::uint64_t>(j));
        rows.push_back(r);
    }
    emit_table(std::span<const CharacteristicLineRow>(rows), TableFormat::Csv,
               dir / "cl.csv", TableStyle{6, 2});
    const int rc = cli::run({"fit-sml", "--input", (dir / "cl.csv").string(),
                             "--segment", "mid", "--emit-curves",
                             "--out", (dir / "out").string(),
                             "--bootstrap", "30", "--grid", "31", "--threads", "1"});
    CHECK(rc == 0);
    CHECK(std::filesystem::exists(dir / "out" / "curves" / "mid_fit.csv"));
    CHECK(std::filesystem::exists(dir / "out" / "curves" / "mid_band_upper.csv"));
}
