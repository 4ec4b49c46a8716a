#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "grf/model_io.hpp"

using namespace grf::io;
using namespace grf::cov;

TEST_CASE("matern model round trip") {
    const ModelFile m = parse_model_string(
        R"({"family":"matern","nu":1.5,"kappa":2.0,"sigma2":0.7,"d":2})");
    REQUIRE(m.covariance != nullptr);
    CHECK(!m.gmrf.has_value());
    const auto* mc = dynamic_cast<const MaternCov*>(m.covariance.get());
    REQUIRE(mc != nullptr);
    CHECK(mc->params().nu == 1.5);
    CHECK(mc->params().kappa == 2.0);
    CHECK(mc->params().sigma2 == 0.7);
    CHECK(mc->params().d == 2);

    const std::string json = covariance_to_json(*m.covariance);
    const ModelFile back = parse_model_string(json);
    CHECK(back.covariance->describe() == m.covariance->describe());
    const Location a{{0.1, 0.2}, 0.0}, b{{0.9, -0.4}, 0.0};
    CHECK(back.covariance->eval(a, b) == m.covariance->eval(a, b));
}

TEST_CASE("schoenberg and berg porcu models") {
    const ModelFile s = parse_model_string(
        R"({"family":"schoenberg","sphere_dim":2,"scale":1.5,"coeffs":[0.5,0.3,0.2]})");
    REQUIRE(s.covariance != nullptr);
    CHECK(s.covariance->metric() == Metric::sphere_cosine);
    CHECK(s.covariance->variance() ==
          doctest::Approx(schoenberg_eval(SchoenbergSeries(2, {0.5, 0.3, 0.2}, 1.5), 1.0)));

    const ModelFile bp = parse_model_string(R"({
      "family":"berg_porcu","sphere_dim":2,"scale":1.0,"coeffs":[0.6,0.4],
      "cfs":[{"kind":"gaussian","sigma2":1.0},
             {"kind":"tabulated","t":[0.0,1.0],"value":[1.0,0.25]}]})");
    REQUIRE(bp.covariance != nullptr);
    CHECK(bp.covariance->metric() == Metric::spacetime);
    const ModelFile bp2 = parse_model_string(covariance_to_json(*bp.covariance));
    const Location a{{0.0, 0.0, 1.0}, 0.5}, b{{1.0, 0.0, 0.0}, -0.25};
    CHECK(bp2.covariance->eval(a, b) == bp.covariance->eval(a, b));

    // One cf per coefficient or a single shared one; anything else fails.
    CHECK_THROWS_AS(parse_model_string(R"({
      "family":"berg_porcu","sphere_dim":2,"scale":1.0,"coeffs":[0.5,0.3,0.2],
      "cfs":[{"kind":"gaussian","sigma2":1.0},{"kind":"cauchy","gamma":0.5}]})"),
                    grf::ValidationError);
}

TEST_CASE("schur product models nest") {
    const ModelFile p = parse_model_string(R"({
      "family":"schur_product","factors":[
        {"family":"matern","nu":1.0,"kappa":1.0,"sigma2":1.0,"d":1},
        {"family":"char_function","cf":{"kind":"student_spectral","nu":0.5,"kappa":2.0}}]})");
    REQUIRE(p.covariance != nullptr);
    CHECK(p.covariance->metric() == Metric::spacetime);
    const ModelFile back = parse_model_string(covariance_to_json(*p.covariance));
    const Location a{{0.3}, 1.0}, b{{-0.2}, 0.0};
    CHECK(back.covariance->eval(a, b) == p.covariance->eval(a, b));

    CHECK_THROWS_AS(parse_model_string(R"({
      "family":"schur_product","factors":[
        {"family":"matern","nu":1.0,"kappa":1.0,"sigma2":1.0,"d":1}]})"),
                    grf::ConfigError);
}

TEST_CASE("gmrf model spec") {
    const ModelFile g = parse_model_string(
        R"({"family":"gmrf","grid_side":8,"grid_dims":2,"kappa":0.7,"m":2,"tau":1.5})");
    CHECK(g.covariance == nullptr);
    REQUIRE(g.gmrf.has_value());
    CHECK(g.gmrf->grid_side == 8);
    CHECK(g.gmrf->m == 2);
    const grf::gmrf::Graph graph = g.gmrf->build_graph();
    CHECK(graph.n == 64);

    // Graph-file variant.
    const std::string path = "test_model_io_graph.txt";
    {
        std::ofstream os(path);
        os << "# n 3\n0 1 1.0\n1 2 2.0\n";
    }
    const ModelFile gf = parse_model_string(
        R"({"family":"gmrf","graph_file":")" + path + R"(","kappa":1.0,"m":1,"tau":1.0})");
    REQUIRE(gf.gmrf.has_value());
    const grf::gmrf::Graph fromfile = gf.gmrf->build_graph();
    CHECK(fromfile.n == 3);
    CHECK(fromfile.edges.size() == 2);
    std::remove(path.c_str());

    CHECK_THROWS_AS(parse_model_string(
                        R"({"family":"gmrf","grid_side":8,"kappa":0.7,"m":9,"tau":1.0})"),
                    grf::ConfigError);
}

TEST_CASE("strict parsing") {
    // Unknown fields are rejected.
    CHECK_THROWS_AS(parse_model_string(
                        R"({"family":"matern","nu":1.0,"kappa":1.0,"sigma2":1.0,"d":1,"x":0})"),
                    grf::ConfigError);
    // Missing fields.
    CHECK_THROWS_AS(parse_model_string(R"({"family":"matern","nu":1.0})"), grf::ConfigError);
    // Wrong types.
    CHECK_THROWS_AS(
        parse_model_string(R"({"family":"matern","nu":"x","kappa":1.0,"sigma2":1.0,"d":1})"),
        grf::ConfigError);
    // Unknown family and malformed JSON.
    CHECK_THROWS_AS(parse_model_string(R"({"family":"nope"})"), grf::ConfigError);
    CHECK_THROWS_AS(parse_model_string("{family: matern"), grf::ConfigError);
    CHECK_THROWS_AS(parse_model_file("no_such_file.json"), grf::ConfigError);

    // Semantic validation propagates with the offending index.
    try {
        parse_model_string(
            R"({"family":"schoenberg","sphere_dim":2,"scale":1.0,"coeffs":[0.5,-0.1,0.6]})");
        FAIL("expected ValidationError");
    } catch (const grf::ValidationError& e) {
        CHECK(e.index == 1);
    }
}
