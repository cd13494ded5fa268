#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "adapted_ot/errors.hpp"
#include "adapted_ot/io.hpp"
#include "adapted_ot/lattice.hpp"

using namespace aot;

TEST(CoefficientText, RoundTrip) {
    const std::vector<std::string> texts{"kind=constant,c=1.5", "kind=affine,a=0,slope=2", "kind=ou,theta=1",
                                         "kind=table,knots=0;1;2,values=0;2;2", "kind=sign-switch,level=5,switch=0.1"};
    for (const auto& t : texts) {
        const auto spec = io::parse_coefficient(t, CoefficientRole::drift);
        EXPECT_EQ(io::parse_coefficient(io::format_coefficient(spec), CoefficientRole::drift), spec) << t;
    }
    EXPECT_EQ(io::parse_coefficient("0.7", CoefficientRole::diffusion),
              CoefficientSpec::constant(0.7, CoefficientRole::diffusion));
}

TEST(CoefficientText, Errors) {
    EXPECT_THROW(io::parse_coefficient("kind=constant", CoefficientRole::drift), ConfigError);
    EXPECT_THROW(io::parse_coefficient("kind=constant,c=1,c=2", CoefficientRole::drift), ConfigError);
    EXPECT_THROW(io::parse_coefficient("kind=constant,c=1,d=2", CoefficientRole::drift), ConfigError);
    EXPECT_THROW(io::parse_coefficient("kind=spline,c=1", CoefficientRole::drift), ConfigError);
    EXPECT_THROW(io::parse_coefficient("kind=constant,c=abc", CoefficientRole::drift), ConfigError);
    EXPECT_THROW(io::parse_coefficient("kind=ou,theta=1", CoefficientRole::diffusion), ConfigError);
}

TEST(Json, LatticeRoundTrip) {
    LatticeConfig c;
    c.n_steps = 3;
    const auto l = build_lattice(CoefficientSpec::ou(1.0), CoefficientSpec::constant(1.0, CoefficientRole::diffusion), c);
    const auto back = io::lattice_from_json(io::lattice_to_json(l));
    ASSERT_EQ(back.n_stages(), l.n_stages());
    for (int k = 0; k < l.n_stages(); ++k) {
        EXPECT_EQ(back.stages[k].support, l.stages[k].support);
        EXPECT_EQ(back.stages[k].transitions, l.stages[k].transitions);
    }
}

TEST(Json, MalformedRejected) {
    EXPECT_THROW(io::lattice_from_json(io::json::parse(R"({"x0": 0})")), ConfigError);
    EXPECT_THROW(io::lattice_from_json(io::json::parse(R"({"x0": 0, "stages": [{"support": [1, 0],
        "transitions": [[0.5, 0.5]]}]})")),
                 ConfigError);
    EXPECT_THROW(io::path_measure_from_json(io::json::parse(R"({"x0": 0, "paths": [[1]], "weights": [0.4]})")),
                 ConfigError);
}

TEST(Json, PathMeasureRoundTrip) {
    const DiscretePathMeasure m{0.5, {{1.0, 2.0}, {0.0, -1.0}}, {0.25, 0.75}};
    const auto back = io::path_measure_from_json(io::path_measure_to_json(m));
    EXPECT_EQ(back.x0, m.x0);
    EXPECT_EQ(back.paths, m.paths);
    EXPECT_EQ(back.weights, m.weights);
}

TEST(Format, ShortestRoundTrip) {
    EXPECT_EQ(io::format_double(0.5), "0.5");
    EXPECT_EQ(std::stod(io::format_double(0.1)), 0.1);
    EXPECT_EQ(io::format_double(-3.0), "-3");
}

TEST(Csv, WritesHeaderAndRows) {
    const auto path = std::filesystem::temp_directory_path() / "aot_io_test.csv";
    {
        io::CsvWriter w(path.string(), {"a", "b"});
        w.row({"1", "2"});
        EXPECT_THROW(w.row({"1"}), InternalError);
        w.close();
    }
    std::ifstream in(path);
    std::string l1, l2;
    std::getline(in, l1);
    std::getline(in, l2);
    EXPECT_EQ(l1, "a,b");
    EXPECT_EQ(l2, "1,2");
    std::filesystem::remove(path);
}
