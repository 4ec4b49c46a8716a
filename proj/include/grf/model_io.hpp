#ifndef GRF_MODEL_IO_HPP
#define GRF_MODEL_IO_HPP

#include <optional>
#include <string>

#include "grf/covariance.hpp"
#include "grf/gmrf.hpp"

namespace grf::io {

// GMRF model description as read from a model file: either a regular grid
// or an external edge-list graph, plus the precision-operator parameters.
struct GmrfModelSpec {
    int grid_side = 0;
    int grid_dims = 2;
    std::string graph_file;
    double kappa = 1.0;
    int m = 1;
    double tau = 1.0;

    gmrf::Graph build_graph() const;
};

// A parsed model file: exactly one of the two members is set.
struct ModelFile {
    cov::CovariancePtr covariance;
    std::optional<GmrfModelSpec> gmrf;
};

// Parses {"family": "matern"|"schoenberg"|"berg_porcu"|"schur_product"|
// "char_function"|"gmrf", ...}.  Unknown fields are rejected; errors are
// reported as ConfigError/ValidationError.
ModelFile parse_model_string(const std::string& text);
ModelFile parse_model_file(const std::string& path);

// Canonical JSON for a covariance model (round-trips through the parser).
std::string covariance_to_json(const cov::Covariance& model);

// Cross-verification spec for the compare command: either the GMRF-vs-Matern
// correlation comparison or the Whittle empirical-vs-analytic check.
struct CompareSpec {
    enum class Kind { gmrf_vs_matern, whittle };
    Kind kind;
    std::optional<GmrfModelSpec> gmrf;     // gmrf_vs_matern only
    std::optional<cov::MaternParams> matern;
};

CompareSpec parse_compare_file(const std::string& path);

}  // namespace grf::io

#endif  // GRF_MODEL_IO_HPP
