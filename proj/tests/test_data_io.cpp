#include <doctest.h>

#include <zlib.h>

#include <cmath>

#include "kreg/data_io.hpp"
#include "kreg/regression.hpp"
#include "test_util.hpp"

using namespace kreg;

namespace {

const char* kReturns3 =
    "date,ticker,ret\n"
    "2020-01-02,AAA,0.50\n"
    "2020-01-03,AAA,-0.20\n"
    "2020-01-06,AAA,0.10\n"
    "2020-01-02,BBB,1.00\n"
    "2020-01-06,BBB,0.40\n"
    "2020-01-02,CCC,0.00\n"
    "2020-01-03,CCC,0.30\n";

const char* kFactors3 =
    "date,mkt_rf,smb,hml,rf\n"
    "2020-01-02,0.40,0.10,-0.05,0.01\n"
    "2020-01-03,-0.30,0.05,0.02,0.01\n"
    "2020-01-06,0.20,-0.02,0.00,0.01\n";

}  // namespace

TEST_CASE("load_panel basics") {
    test::TempDir dir("load");
    test::write_file(dir / "r.csv", kReturns3);
    test::write_file(dir / "f.csv", kFactors3);

    const ReturnPanel panel = load_panel(dir / "r.csv", dir / "f.csv");
    REQUIRE(panel.asset_ids.size() == 3);
    CHECK(panel.asset_ids[0] == "AAA");
    CHECK(panel.observations("AAA") == 3);
    CHECK(panel.observations("BBB") == 2);
    CHECK(panel.observations("CCC") == 2);
    REQUIRE(panel.dates.size() == 3);
    CHECK(panel.dates[0] == "2020-01-02");
    CHECK(panel.dates[2] == "2020-01-06");

    // market = mkt_rf + rf on factor dates.
    CHECK(panel.market[0] == doctest::Approx(0.41));
    CHECK(panel.risk_free[1] == doctest::Approx(0.01));

    // BBB has a gap on 2020-01-03.
    CHECK(is_gap(panel.assets.at("BBB")[1]));
}

TEST_CASE("load_panel error paths") {
    test::TempDir dir("load_err");
    test::write_file(dir / "f.csv", kFactors3);

    SUBCASE("duplicated date for a ticker") {
        test::write_file(dir / "r.csv",
                         "date,ticker,ret\n"
                         "2020-01-02,AAA,0.5\n"
                         "2020-01-02,AAA,0.6\n");
        CHECK_THROWS_WITH_AS(load_panel(dir / "r.csv", dir / "f.csv"),
                             doctest::Contains("2020-01-02"), DataFormatError);
    }
    SUBCASE("duplicated factor date") {
        test::write_file(dir / "r.csv", kReturns3);
        test::write_file(dir / "f2.csv",
                         "date,mkt_rf,smb,hml,rf\n"
                         "2020-01-02,0.1,0.0,0.0,0.0\n"
                         "2020-01-02,0.2,0.0,0.0,0.0\n");
        CHECK_THROWS_WITH_AS(load_panel(dir / "r.csv", dir / "f2.csv"),
                             doctest::Contains("2020-01-02"), DataFormatError);
    }
    SUBCASE("bad header") {
        test::write_file(dir / "r.csv", "date,symbol,ret\n2020-01-02,AAA,0.5\n");
        CHECK_THROWS_AS(load_panel(dir / "r.csv", dir / "f.csv"), DataFormatError);
    }
    SUBCASE("unparseable value names the line") {
        test::write_file(dir / "r.csv",
                         "date,ticker,ret\n"
                         "2020-01-02,AAA,0.5\n"
                         "2020-01-03,AAA,abc\n");
        CHECK_THROWS_WITH_AS(load_panel(dir / "r.csv", dir / "f.csv"),
                             doctest::Contains(":3"), DataFormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_panel(dir / "missing.csv", dir / "f.csv"), IoError);
    }
}

TEST_CASE("decimal units convert to percent") {
    test::TempDir dir("units");
    test::write_file(dir / "r.csv", "date,ticker,ret\n2020-01-02,AAA,0.005\n");
    test::write_file(dir / "f.csv", "date,mkt_rf,smb,hml,rf\n2020-01-02,0.004,0,0,0.0001\n");
    const ReturnPanel panel =
        load_panel(dir / "r.csv", dir / "f.csv", LoadOptions{Units::Decimal});
    CHECK(panel.assets.at("AAA")[0] == doctest::Approx(0.5));
    CHECK(panel.factors[0][0] == doctest::Approx(0.4));
    CHECK(panel.risk_free[0] == doctest::Approx(0.01));
}

TEST_CASE("gzip-compressed inputs load transparently") {
    test::TempDir dir("gz");
    const std::filesystem::path gz_path = dir / "r.csv.gz";
    gzFile gz = gzopen(gz_path.string().c_str(), "wb");
    REQUIRE(gz != nullptr);
    gzwrite(gz, kReturns3, static_cast<unsigned>(std::strlen(kReturns3)));
    gzclose(gz);
    test::write_file(dir / "f.csv", kFactors3);

    const ReturnPanel panel = load_panel(gz_path, dir / "f.csv");
    CHECK(panel.observations("AAA") == 3);
}

TEST_CASE("excess returns") {
    test::TempDir dir("excess");
    test::write_file(dir / "r.csv", kReturns3);
    test::write_file(dir / "f.csv", kFactors3);
    const ReturnPanel panel = load_panel(dir / "r.csv", dir / "f.csv");

    // Hand-built subtraction for the gapped asset: BBB has dates 1 and 3.
    const ExcessReturns bbb = excess_returns(panel, "BBB");
    REQUIRE(bbb.asset.size() == 2);
    CHECK(bbb.asset[0] == doctest::Approx(1.00 - 0.01));
    CHECK(bbb.asset[1] == doctest::Approx(0.40 - 0.01));
    CHECK(bbb.market[0] == doctest::Approx(0.40));
    CHECK(bbb.market[1] == doctest::Approx(0.20));

    CHECK_THROWS_AS(excess_returns(panel, "ZZZ"), DomainError);
}

TEST_CASE("five-date panel with one gap aligns to four entries") {
    test::TempDir dir("gap5");
    test::write_file(dir / "r.csv",
                     "date,ticker,ret\n"
                     "2021-03-01,GAP,1.0\n"
                     "2021-03-02,GAP,2.0\n"
                     "2021-03-04,GAP,4.0\n"  // 2021-03-03 missing
                     "2021-03-05,GAP,5.0\n");
    test::write_file(dir / "f.csv",
                     "date,mkt_rf,smb,hml,rf\n"
                     "2021-03-01,0.5,0,0,0.1\n"
                     "2021-03-02,0.6,0,0,0.1\n"
                     "2021-03-03,0.7,0,0,0.1\n"
                     "2021-03-04,0.8,0,0,0.1\n"
                     "2021-03-05,0.9,0,0,0.1\n");
    const ReturnPanel panel = load_panel(dir / "r.csv", dir / "f.csv");
    REQUIRE(panel.dates.size() == 5);
    CHECK(panel.observations("GAP") == 4);

    const ExcessReturns ex = excess_returns(panel, "GAP");
    REQUIRE(ex.asset.size() == 4);
    const double expected_asset[4] = {1.0 - 0.1, 2.0 - 0.1, 4.0 - 0.1, 5.0 - 0.1};
    const double expected_market[4] = {0.5, 0.6, 0.8, 0.9};
    for (int i = 0; i < 4; ++i) {
        CHECK(ex.asset[i] == doctest::Approx(expected_asset[i]).epsilon(1e-14));
        CHECK(ex.market[i] == doctest::Approx(expected_market[i]).epsilon(1e-14));
    }
}

TEST_CASE("excess returns degenerate cases") {
    ReturnPanel panel;
    panel.dates = {"2020-01-02", "2020-01-03"};
    panel.asset_ids = {"AAA"};
    panel.assets["AAA"] = {0.5, 0.7};
    panel.market = {0.3, 0.4};
    panel.risk_free = {0.0, 0.0};
    for (auto& f : panel.factors) f = {0.0, 0.0};

    // rf identically zero: excess equals raw.
    const ExcessReturns ex = excess_returns(panel, "AAA");
    CHECK(ex.asset[0] == 0.5);
    CHECK(ex.market[1] == 0.4);

    // Asset equal to rf: excess identically zero.
    panel.assets["AAA"] = {0.3, 0.4};
    panel.risk_free = {0.3, 0.4};
    const ExcessReturns zero = excess_returns(panel, "AAA");
    CHECK(zero.asset.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generate_synthetic determinism and exact linear recovery") {
    SyntheticSpec spec;
    spec.dgp = "linear";
    spec.n = 60;
    spec.noise_sigma = 0.0;
    spec.seed = 11;
    spec.true_params = {0.03, 1.4};

    const SyntheticData a = generate_synthetic(spec);
    const SyntheticData b = generate_synthetic(spec);
    CHECK((a.truth.y - b.truth.y).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.panel.dates == b.panel.dates);

    const LinearFit fit = ols_fit(a.truth.X, a.truth.y);
    CHECK(fit.alpha == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(fit.betas[0] == doctest::Approx(1.4).epsilon(1e-12));

    CHECK(a.truth.loadings_true[0] == doctest::Approx(1.4).epsilon(1e-14));
    CHECK(a.truth.alpha_true == doctest::Approx(0.03).epsilon(1e-12));
}

TEST_CASE("generate_synthetic threshold regimes") {
    SyntheticSpec spec;
    spec.dgp = "threshold";
    spec.n = 500;
    spec.noise_sigma = 0.1;
    spec.seed = 7;
    spec.true_params = {0.0, 1.0, 2.0, 0.25};

    const SyntheticData data = generate_synthetic(spec);
    int below = 0, slope_low = 0;
    for (int i = 0; i < 500; ++i) {
        if (data.truth.X(i, 0) <= 0.25) ++below;
        if (data.truth.dm_true(i, 0) == 1.0) ++slope_low;
    }
    CHECK(below == slope_low);
    CHECK(below > 0);
    CHECK(below < 500);

    // The average true derivative mixes the slopes by regime occupancy.
    const double expected =
        (1.0 * below + 2.0 * (500 - below)) / 500.0;
    CHECK(data.truth.loadings_true[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("generate_synthetic validates its spec") {
    SyntheticSpec spec;
    spec.dgp = "sinusoid";
    CHECK_THROWS_AS(generate_synthetic(spec), DomainError);
    spec.dgp = "linear";
    spec.n = 5;
    CHECK_THROWS_AS(generate_synthetic(spec), DomainError);
    spec.n = 50;
    spec.true_params = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(generate_synthetic(spec), DomainError);
}

TEST_CASE("synthetic panel round trips through the CSV writers") {
    SyntheticSpec spec;
    spec.dgp = "ff3-linear";
    spec.n = 40;
    spec.seed = 3;
    const SyntheticData data = generate_synthetic(spec);

    test::TempDir dir("roundtrip");
    write_returns_csv(data.panel, dir / "r.csv");
    write_factors_csv(data.panel, dir / "f.csv");
    const ReturnPanel loaded = load_panel(dir / "r.csv", dir / "f.csv");

    REQUIRE(loaded.dates == data.panel.dates);
    const auto& original = data.panel.assets.at("SYN1");
    const auto& reloaded = loaded.assets.at("SYN1");
    for (std::size_t t = 0; t < original.size(); ++t) {
        CHECK(reloaded[t] == original[t]);  // %.17g is exact for doubles
    }
    for (int d = 0; d < 3; ++d) {
        for (std::size_t t = 0; t < loaded.dates.size(); ++t) {
            CHECK(loaded.factors[d][t] == data.panel.factors[d][t]);
        }
    }
}
