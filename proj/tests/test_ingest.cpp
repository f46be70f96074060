#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "pvscm/ingest.hpp"

using namespace pvscm;

namespace {

ErrorKind csv_error(const std::string& text, const ColumnMap& cols = {}) {
    try {
        parse_csv(text, cols);
    } catch (const InputError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an InputError";
    return ErrorKind::EmptyScenario;
}

}  // namespace

TEST(Csv, ParsesDocumentedSchema) {
    const auto s = parse_csv("day,demand_kwh,irradiation_kwh_m2\n1,0.5,0\n1,0.7,0.2\n2,1.0,0.4\n");
    EXPECT_EQ(s.n_t(), 3u);
    EXPECT_EQ(s.n_d(), 2u);
    EXPECT_EQ(s.demand(), (std::vector<double>{0.5, 0.7, 1.0}));
    EXPECT_EQ(s.irradiation(), (std::vector<double>{0.0, 0.2, 0.4}));
}

TEST(Csv, ColumnOrderAndExtraColumnsDoNotMatter) {
    const auto s = parse_csv("irradiation_kwh_m2,note,demand_kwh\n0.1,x,2\n0.3,y,4\n", {});
    EXPECT_EQ(s.demand(), (std::vector<double>{2, 4}));
    EXPECT_EQ(s.irradiation(), (std::vector<double>{0.1, 0.3}));
}

TEST(Csv, WithoutDayColumnGroupsBySteps) {
    std::string text = "demand_kwh,irradiation_kwh_m2\n";
    for (int k = 0; k < 48; ++k) text += "1,0\n";
    EXPECT_EQ(parse_csv(text).n_d(), 2u);
    ColumnMap cols;
    cols.steps_per_day = 12;
    EXPECT_EQ(parse_csv(text, cols).n_d(), 4u);
}

TEST(Csv, CustomColumnNames) {
    ColumnMap cols;
    cols.demand = "load";
    cols.irradiation = "ghi";
    cols.day = "d";
    const auto s = parse_csv("d,load,ghi\n1,1,0\n2,2,0.5\n", cols);
    EXPECT_EQ(s.n_d(), 2u);
    EXPECT_EQ(csv_error("d,load\n1,1\n", cols), ErrorKind::MissingColumn);
}

TEST(Csv, HandlesCrLfBomBlankLinesAndSpaces) {
    const auto s = parse_csv("\xEF\xBB\xBF" "demand_kwh, irradiation_kwh_m2\r\n 1 ,0\r\n\r\n2, 0.5\r\n");
    EXPECT_EQ(s.demand(), (std::vector<double>{1, 2}));
}

TEST(Csv, Errors) {
    EXPECT_EQ(csv_error(""), ErrorKind::ParseError);
    EXPECT_EQ(csv_error("demand_kwh\n1\n"), ErrorKind::MissingColumn);
    EXPECT_EQ(csv_error("demand_kwh,irradiation_kwh_m2\n1,abc\n"), ErrorKind::ParseError);
    EXPECT_EQ(csv_error("demand_kwh,irradiation_kwh_m2\n1\n"), ErrorKind::ParseError);
    EXPECT_EQ(csv_error("demand_kwh,irradiation_kwh_m2\n"), ErrorKind::EmptyScenario);
    EXPECT_EQ(csv_error("day,demand_kwh,irradiation_kwh_m2\n1.5,1,0\n"), ErrorKind::ParseError);
    EXPECT_EQ(csv_error("day,demand_kwh,irradiation_kwh_m2\n1,1,0\n3,1,0\n"), ErrorKind::EmptyDay);
}

TEST(Csv, NegativeDemandReportsDataRow) {
    try {
        parse_csv("demand_kwh,irradiation_kwh_m2\n1,0\n1,0\n-2,0\n");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NegativeValue);
        EXPECT_EQ(*e.index(), 3u);
    }
}

TEST(Csv, ParseErrorReportsFileLine) {
    try {
        parse_csv("demand_kwh,irradiation_kwh_m2\n1,0\n1,zz\n");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_EQ(*e.index(), 3u);
    }
}

TEST(Csv, RoundTripIsExact) {
    const auto s = generate_synthetic(one_month_spec(7));
    EXPECT_EQ(parse_csv(to_csv(s)), s);
}

TEST(Csv, LoadFromFile) {
    const std::string path = ::testing::TempDir() + "/pvscm_ingest.csv";
    {
        std::ofstream out(path);
        out << "demand_kwh,irradiation_kwh_m2\n1,0\n";
    }
    EXPECT_EQ(load_csv(path).n_t(), 1u);
    EXPECT_THROW(load_csv(path + ".missing"), InputError);
}

TEST(Synthetic, DeterministicForSeed) {
    EXPECT_EQ(generate_synthetic(one_month_spec(3)), generate_synthetic(one_month_spec(3)));
    EXPECT_FALSE(generate_synthetic(one_month_spec(3)) == generate_synthetic(one_month_spec(4)));
}

TEST(Synthetic, ShapeOfPresets) {
    const auto m = generate_synthetic(one_month_spec());
    EXPECT_EQ(m.n_d(), 30u);
    EXPECT_EQ(m.n_t(), 720u);
    const auto p = generate_synthetic(three_season_spec());
    EXPECT_EQ(p.n_d(), 89u);
    EXPECT_DOUBLE_EQ(p.f_anu(), 365.0 / 89.0);
    for (int months = 1; months <= 6; ++months) {
        EXPECT_EQ(generate_synthetic(months_spec(months)).n_d(), 30u * static_cast<unsigned>(months));
    }
}

TEST(Synthetic, NoSunAtNightAndNonNegative) {
    const auto spec = one_month_spec();
    const auto s = generate_synthetic(spec);
    for (std::size_t k = 0; k < s.n_t(); ++k) {
        const int step = static_cast<int>(k % 24);
        EXPECT_GE(s.demand()[k], 0.0);
        EXPECT_GE(s.irradiation()[k], 0.0);
        if (step < spec.daylight_start || step >= spec.daylight_end) EXPECT_EQ(s.irradiation()[k], 0.0);
    }
}

TEST(Synthetic, PlausibleHouseholdMagnitudes) {
    const auto s = generate_synthetic(one_month_spec());
    const double daily = s.total_demand() / static_cast<double>(s.n_d());
    EXPECT_GT(daily, 10.0);
    EXPECT_LT(daily, 30.0);
    const double irr_daily =
        std::accumulate(s.irradiation().begin(), s.irradiation().end(), 0.0) / static_cast<double>(s.n_d());
    EXPECT_GT(irr_daily, 2.0);
    EXPECT_LT(irr_daily, 7.0);
}

TEST(Synthetic, SpecValidation) {
    SyntheticSpec spec = one_month_spec();
    spec.n_days = 31;  // blocks sum to 30
    EXPECT_THROW(generate_synthetic(spec), InputError);
    spec = one_month_spec();
    spec.daylight_end = 30;
    EXPECT_THROW(generate_synthetic(spec), InputError);
    spec = one_month_spec();
    spec.season_mix[0].cloudy_fraction = 1.5;
    EXPECT_THROW(generate_synthetic(spec), InputError);
}

TEST(Synthetic, JsonForms) {
    const auto a = parse_synthetic_spec(
        R"({"n_days": 30, "seed": 1, "season_mix": [["winter",10,0.15],["rainy",10,0.6],["summer",10,0.2]]})");
    EXPECT_EQ(generate_synthetic(a), generate_synthetic(one_month_spec(1)));
    nlohmann::json j = one_month_spec(5);
    EXPECT_EQ(generate_synthetic(j.get<SyntheticSpec>()), generate_synthetic(one_month_spec(5)));
    EXPECT_EQ(generate_synthetic(parse_synthetic_spec("{}")).n_d(), 30u);
    EXPECT_THROW(parse_synthetic_spec("{not json"), InputError);
}
