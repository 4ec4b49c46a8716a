// grf: command-line surface for the Gaussian random field toolkit.
//
// Exit codes: 0 success, 1 validation failure, 2 usage/input error.
// All commands are deterministic given (config, seed); the default seed is
// the fixed constant 20250101.  FIELDS_THREADS caps internal parallelism.

#include <CLI11.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "grf/bench.hpp"
#include "grf/covariance.hpp"
#include "grf/fieldsim.hpp"
#include "grf/gmrf.hpp"
#include "grf/model_io.hpp"
#include "grf/rng.hpp"
#include "grf/sparse.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 20250101;

int env_threads() {
    const char* env = std::getenv("FIELDS_THREADS");
    if (!env) return 1;
    const long v = std::strtol(env, nullptr, 10);
    if (v < 1) return 1;
    return static_cast<int>(std::min<long>(v, 64));
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        const double v = std::stod(item, &pos);
        while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
        if (pos != item.size())
            throw grf::ConfigError(std::string(what) + ": cannot parse '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw grf::ConfigError(std::string(what) + ": empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    for (double v : parse_list(text, what)) {
        if (std::fabs(v - std::round(v)) > 1e-9)
            throw grf::ConfigError(std::string(what) + ": expected integers");
        out.push_back(static_cast<int>(std::llround(v)));
    }
    return out;
}

void write_text(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw grf::ConfigError("cannot open output file " + out_path);
    os << text;
}

bool sphere_flavoured(const grf::cov::Covariance& model) {
    using namespace grf::cov;
    if (dynamic_cast<const BergPorcuCov*>(&model)) return true;
    if (dynamic_cast<const SchoenbergCov*>(&model)) return true;
    if (const auto* s = dynamic_cast<const SchurProductCov*>(&model))
        return sphere_flavoured(*s->left()) || sphere_flavoured(*s->right());
    return false;
}

// ---------------------------------------------------------------------------

int cmd_eval_cov(const std::string& model_path, const std::string& lags_text, int ugrid,
                 const std::string& format, const std::string& out_path) {
    const grf::io::ModelFile model = grf::io::parse_model_file(model_path);
    if (model.gmrf) {
        if (format != "mm")
            throw grf::ConfigError("eval-cov on a gmrf model exports the precision matrix; "
                                   "use --format mm");
        if (out_path.empty())
            throw grf::ConfigError("--out is required for matrix market output");
        const grf::gmrf::Graph g = model.gmrf->build_graph();
        const grf::sparse::SparseMatrix q = grf::gmrf::build_precision(
            g, grf::gmrf::PrecisionModel(model.gmrf->kappa, model.gmrf->m, model.gmrf->tau));
        grf::sparse::write_matrix_market_file(q, out_path);
        return 0;
    }
    if (format != "csv") throw grf::ConfigError("eval-cov covariance tables are CSV only");

    using namespace grf::cov;
    const Covariance& m = *model.covariance;
    const std::vector<double> lags = parse_list(lags_text, "--lags");
    std::ostringstream os;
    os << "# model=" << m.describe() << "\n";

    const auto sphere_pair = [&](double u) {
        const int dim = m.spatial_dim();
        std::vector<double> a(dim, 0.0), b(dim, 0.0);
        a[dim - 1] = 1.0;
        b[0] = std::sqrt(std::max(0.0, 1.0 - u * u));
        b[dim - 1] = u;
        return std::make_pair(Location{a, 0.0}, Location{b, 0.0});
    };
    const auto euclid_pair = [&](double r) {
        const int dim = std::max(1, m.spatial_dim());
        Location a{std::vector<double>(dim, 0.0), 0.0};
        Location b{std::vector<double>(dim, 0.0), 0.0};
        b.x[0] = r;
        return std::make_pair(a, b);
    };

    switch (m.metric()) {
        case Metric::euclidean: {
            os << "lag,value\n";
            for (double r : lags) {
                auto [a, b] = euclid_pair(r);
                os << fmt(r) << ',' << fmt(m.eval(a, b)) << "\n";
            }
            break;
        }
        case Metric::sphere_cosine: {
            os << "u,value\n";
            for (int i = 0; i < ugrid; ++i) {
                const double u = ugrid == 1 ? 1.0 : -1.0 + 2.0 * i / (ugrid - 1.0);
                auto [a, b] = sphere_pair(u);
                os << fmt(u) << ',' << fmt(m.eval(a, b)) << "\n";
            }
            break;
        }
        case Metric::time: {
            os << "t,value\n";
            for (double t : lags) {
                Location a{{}, 0.0}, b{{}, -t};
                os << fmt(t) << ',' << fmt(m.eval(a, b)) << "\n";
            }
            break;
        }
        case Metric::spacetime: {
            const bool sphere = sphere_flavoured(m);
            os << (sphere ? "u" : "lag") << ",t,value\n";
            for (int i = 0; i < ugrid; ++i) {
                const double s = sphere ? (ugrid == 1 ? 1.0 : -1.0 + 2.0 * i / (ugrid - 1.0))
                                        : static_cast<double>(i);
                for (double t : lags) {
                    auto [a, b] = sphere ? sphere_pair(s) : euclid_pair(s);
                    a.t = t;
                    b.t = 0.0;
                    os << fmt(s) << ',' << fmt(t) << ',' << fmt(m.eval(a, b)) << "\n";
                }
            }
            break;
        }
    }
    write_text(out_path, os.str());
    return 0;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<double>> read_points_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw grf::ConfigError("cannot open points file " + path);
    std::vector<std::vector<double>> pts;
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (...) {
                numeric = false;
                break;
            }
        }
        if (numeric && !row.empty()) pts.push_back(std::move(row));
    }
    if (pts.empty()) throw grf::ConfigError("no points found in " + path);
    return pts;
}

int cmd_sample(const std::string& model_path, int grid_side, double spacing,
               const std::string& points_path, std::uint64_t seed, const std::string& format,
               const std::string& out_path) {
    using grf::sim::FieldSample;
    using grf::sim::Geometry;
    const grf::io::ModelFile model = grf::io::parse_model_file(model_path);

    FieldSample sample;
    bool grid2d = false;
    int side = 0;
    if (model.gmrf) {
        const grf::gmrf::Graph g = model.gmrf->build_graph();
        const grf::gmrf::GMRF field(grf::gmrf::build_precision(
            g, grf::gmrf::PrecisionModel(model.gmrf->kappa, model.gmrf->m, model.gmrf->tau)));
        sample = std::move(grf::gmrf::sample(field, seed, 1, g.coords).front());
        if (model.gmrf->graph_file.empty() && model.gmrf->grid_dims == 2) {
            grid2d = true;
            side = model.gmrf->grid_side;
        }
    } else {
        const grf::cov::Covariance& m = *model.covariance;
        if (const auto* mc = dynamic_cast<const grf::cov::MaternCov*>(&m)) {
            if (grid_side < 2) throw grf::ConfigError("sample: --grid SIDE (>= 2) is required");
            const int d = mc->params().d;
            if (d != 1 && d != 2)
                throw grf::ConfigError("sample: whittle sampling supports d = 1 or 2");
            const Geometry grid = Geometry::grid(grid_side, d == 2 ? grid_side : 1, spacing);
            sample = grf::sim::whittle_sample(mc->params(), grid, seed);
            grid2d = (d == 2);
            side = grid_side;
        } else if (const auto* sc = dynamic_cast<const grf::cov::SchoenbergCov*>(&m)) {
            if (points_path.empty())
                throw grf::ConfigError("sample: --points FILE with unit vectors is required "
                                       "for sphere models");
            sample = grf::sim::sphere_sample(sc->series(), read_points_csv(points_path), seed);
        } else {
            throw grf::ConfigError(
                "sample: supported models are matern (grid), schoenberg (points), gmrf");
        }
    }

    if (format == "pgm") {
        if (!grid2d) throw grf::ConfigError("sample: PGM output needs a 2D grid model");
        if (out_path.empty()) throw grf::ConfigError("sample: PGM output requires --out");
        grf::sim::FieldSample grid_sample = sample;
        grid_sample.geometry = Geometry::grid(side, side, spacing);
        std::ofstream os(out_path, std::ios::binary);
        if (!os) throw grf::ConfigError("cannot open output file " + out_path);
        grf::sim::write_pgm(grid_sample, os);
        return 0;
    }
    if (format != "csv") throw grf::ConfigError("sample: --format must be csv or pgm");
    std::ostringstream os;
    grf::sim::write_csv(sample, os);
    write_text(out_path, os.str());
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_krige(const std::string& model_path, const std::string& observe_path,
              const std::string& targets_text, const std::string& out_path) {
    const grf::io::ModelFile model = grf::io::parse_model_file(model_path);
    if (!model.gmrf) throw grf::ConfigError("krige requires a gmrf model");
    const grf::gmrf::Graph g = model.gmrf->build_graph();
    const grf::gmrf::GMRF field(grf::gmrf::build_precision(
        g, grf::gmrf::PrecisionModel(model.gmrf->kappa, model.gmrf->m, model.gmrf->tau)));

    std::ifstream is(observe_path);
    if (!is) throw grf::ConfigError("cannot open observations file " + observe_path);
    std::map<int, double> observed;
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::stringstream ss(line);
        std::string v_text, val_text;
        if (!std::getline(ss, v_text, ',') || !std::getline(ss, val_text)) continue;
        try {
            observed[std::stoi(v_text)] = std::stod(val_text);
        } catch (...) {
            continue;  // header or comment row
        }
    }
    if (observed.empty()) throw grf::ConfigError("no observations found in " + observe_path);

    std::vector<int> targets;
    if (targets_text.empty() || targets_text == "all") {
        for (int v = 0; v < field.size(); ++v)
            if (!observed.count(v)) targets.push_back(v);
    } else {
        targets = parse_int_list(targets_text, "--targets");
    }
    const grf::gmrf::KrigeResult res = grf::gmrf::krige(field, observed, targets);

    std::ostringstream os;
    os << "vertex,mean,variance\n";
    for (std::size_t k = 0; k < res.targets.size(); ++k)
        os << res.targets[k] << ',' << fmt(res.mean[k]) << ',' << fmt(res.variance[k]) << "\n";
    write_text(out_path, os.str());
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& model_path, std::uint64_t seed, const std::string& out_path) {
    std::ostringstream report;
    bool failed = false;

    grf::io::ModelFile model;
    try {
        model = grf::io::parse_model_file(model_path);
    } catch (const grf::ValidationError& e) {
        report << "FAIL: " << e.what() << "\n";
        write_text(out_path, report.str());
        std::cout << report.str();
        return 1;
    }
    report << "PASS: model parses and satisfies its parameter invariants\n";

    if (model.gmrf) {
        const grf::gmrf::Graph g = model.gmrf->build_graph();
        const grf::sparse::SparseMatrix q = grf::gmrf::build_precision(
            g, grf::gmrf::PrecisionModel(model.gmrf->kappa, model.gmrf->m, model.gmrf->tau));
        try {
            const grf::gmrf::GMRF field(q);
            report << "PASS: precision matrix is positive definite (nnz(L)="
                   << field.factor().nnz_l << ")\n";

            // Solve residual spot check through the factor.
            const grf::rng::CounterRng gen(seed, 3);
            std::vector<double> b(q.order());
            for (int i = 0; i < q.order(); ++i) b[i] = gen.normal(i);
            const std::vector<double> x = grf::sparse::solve(field.factor(), b);
            const grf::DenseMatrix qd = q.order() <= 400 ? q.to_dense() : grf::DenseMatrix();
            bool solve_ok = true;
            if (q.order() <= 400) {
                double rnorm = 0.0, bnorm = 0.0;
                for (int i = 0; i < q.order(); ++i) {
                    double ax = 0.0;
                    for (int j = 0; j < q.order(); ++j) ax += qd(i, j) * x[j];
                    rnorm += (ax - b[i]) * (ax - b[i]);
                    bnorm += b[i] * b[i];
                }
                solve_ok = std::sqrt(rnorm) <= 1e-8 * std::sqrt(bnorm);
                report << (solve_ok ? "PASS" : "FAIL") << ": solve residual within 1e-8\n";
                failed = failed || !solve_ok;
            }

            // Dempster spot check: conditional independence flags agree with
            // the stored precision pattern, symmetrically.
            bool dempster_ok = true;
            for (int i = 0; i + 1 < q.order() && i < 20; i += 2) {
                const int j = (i * 7 + 3) % q.order();
                if (j == i) continue;
                if (grf::gmrf::dempster_check(q, i, j) != grf::gmrf::dempster_check(q, j, i))
                    dempster_ok = false;
                if (grf::gmrf::dempster_check(q, i, j) != (q.at(i, j) == 0.0))
                    dempster_ok = false;
            }
            report << (dempster_ok ? "PASS" : "FAIL") << ": dempster_check battery\n";
            failed = failed || !dempster_ok;
        } catch (const grf::FactorizationError& e) {
            report << "FAIL: precision matrix is not positive definite (" << e.what() << ")\n";
            failed = true;
        }
    } else {
        using namespace grf::cov;
        const Covariance& m = *model.covariance;
        const grf::rng::CounterRng gen(seed, 5);
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<Location> pts;
            const int count = 15;
            for (int i = 0; i < count; ++i) {
                Location loc;
                const int dim = m.spatial_dim();
                if (m.metric() == Metric::euclidean) {
                    for (int k = 0; k < std::max(1, dim); ++k)
                        loc.x.push_back(3.0 * gen.uniform(10000 + 1000 * trial + 10 * i + k));
                } else if (m.metric() == Metric::time) {
                    loc.t = -2.0 + 4.0 * gen.uniform(10000 + 1000 * trial + 10 * i);
                } else {
                    double norm2 = 0.0;
                    for (int k = 0; k < dim; ++k) {
                        const double v = gen.normal(20000 + 1000 * trial + 10 * i + k);
                        loc.x.push_back(v);
                        norm2 += v * v;
                    }
                    for (double& v : loc.x) v /= std::sqrt(norm2);
                    if (m.metric() == Metric::spacetime)
                        loc.t = -2.0 + 4.0 * gen.uniform(30000 + 1000 * trial + 10 * i);
                }
                if (m.metric() == Metric::spacetime && dynamic_cast<const SchurProductCov*>(&m) &&
                    !sphere_flavoured(m)) {
                    loc.x.assign(std::max(1, dim), 0.0);
                    for (int k = 0; k < std::max(1, dim); ++k)
                        loc.x[k] = 3.0 * gen.uniform(40000 + 1000 * trial + 10 * i + k);
                }
                pts.push_back(std::move(loc));
            }
            const grf::DenseMatrix gram = covariance_matrix(m, pts, m.metric());
            const PdReport pd = check_positive_definite(gram);
            report << (pd.positive_definite ? "PASS" : "FAIL") << ": Gram matrix " << trial + 1
                   << " of 3 is positive semidefinite (min eigenvalue estimate "
                   << fmt(pd.min_eigenvalue) << ")\n";
            failed = failed || !pd.positive_definite;
        }
    }

    write_text(out_path, report.str());
    if (out_path.empty() || out_path == "-") {
        // already on stdout
    } else {
        std::cout << report.str();
    }
    return failed ? 1 : 0;
}

// ---------------------------------------------------------------------------

int cmd_bench(const std::string& sizes_text, int repetitions, const std::string& out_path) {
    const std::vector<int> sizes = parse_int_list(sizes_text, "--sizes");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1])
            throw grf::ConfigError("--sizes must be strictly increasing");

    using grf::sparse::BenchBackend;
    const auto sparse_res =
        grf::sparse::benchmark_factorization(sizes, BenchBackend::sparse, repetitions);
    const auto dense_res =
        grf::sparse::benchmark_factorization(sizes, BenchBackend::dense, repetitions);

    std::ostringstream os;
    os << "n,backend,seconds,nnz\n";
    for (const auto& row : sparse_res.rows)
        os << row.n << ",sparse," << fmt(row.seconds) << ',' << row.nnz << "\n";
    for (const auto& row : dense_res.rows)
        os << row.n << ",dense," << fmt(row.seconds) << ',' << row.nnz << "\n";
    os << "# slope_sparse=" << (sparse_res.slope ? fmt(*sparse_res.slope) : "absent")
       << ", slope_dense=" << (dense_res.slope ? fmt(*dense_res.slope) : "absent") << "\n";
    write_text(out_path, os.str());
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_compare(const std::string& config_path, const std::string& lags_text, int grid_side,
                int samples, std::uint64_t seed, const std::string& out_path) {
    const grf::io::CompareSpec spec = grf::io::parse_compare_file(config_path);
    std::ostringstream os;

    if (spec.kind == grf::io::CompareSpec::Kind::gmrf_vs_matern) {
        const auto& gspec = *spec.gmrf;
        const double gmrf_nu = gspec.m - 1.0;  // nu = m - d/2 on the 2D grid
        if (std::fabs(gmrf_nu - spec.matern->nu) > 1e-12)
            throw grf::ConfigError("compare: smoothness mismatch: gmrf precision power implies nu=" +
                                   fmt(gmrf_nu) + " but the matern model has nu=" +
                                   fmt(spec.matern->nu));
        if (std::fabs(gspec.kappa - spec.matern->kappa) > 1e-12)
            throw grf::ConfigError("compare: scale mismatch: gmrf kappa=" + fmt(gspec.kappa) +
                                   " vs matern kappa=" + fmt(spec.matern->kappa));
        if (spec.matern->d != 2)
            throw grf::ConfigError("compare: the gmrf route needs a d=2 matern model");
        const std::vector<double> lags = parse_list(lags_text, "--lags");
        const int side = gspec.grid_side > 0 ? gspec.grid_side : grid_side;
        const grf::gmrf::GmrfMaternReport rep = grf::gmrf::gmrf_vs_matern_error(
            side, grf::gmrf::PrecisionModel(gspec.kappa, gspec.m, gspec.tau), lags);
        os << "# gmrf_vs_matern side=" << side << " nu=" << fmt(rep.nu)
           << " range=" << fmt(rep.range) << " ring=" << rep.boundary_ring << "\n";
        os << "lag,analytic,estimated,abs_error,se\n";
        for (const auto& row : rep.lags)
            os << fmt(row.lag) << ',' << fmt(row.matern) << ',' << fmt(row.gmrf_mean) << ','
               << fmt(row.max_abs_error) << ",0\n";
        os << "# boundary_max_error=" << fmt(rep.boundary_max_error)
           << " correlation_at_range=" << fmt(rep.correlation_at_range) << "\n";
    } else {
        if (spec.matern->d != 1)
            throw grf::ConfigError("compare: the whittle route runs on 1D grids (matern d=1)");
        std::vector<int> lags;
        for (double lag : parse_list(lags_text, "--lags")) {
            if (lag < 0 || std::fabs(lag - std::round(lag)) > 1e-9)
                throw grf::ConfigError("compare: whittle lags are nonnegative cell counts");
            lags.push_back(static_cast<int>(std::llround(lag)));
        }
        const grf::sim::Geometry grid = grf::sim::Geometry::grid(grid_side, 1, 1.0);
        const grf::sim::Kernel kernel = grf::sim::matern_kernel(*spec.matern);
        const std::vector<double> target =
            grf::sim::self_convolution_target(kernel, grid, lags);
        const auto fields =
            grf::sim::kernel_convolution_batch(kernel, grid, seed, samples, env_threads());
        os << "# whittle side=" << grid_side << " samples=" << samples << " seed=" << seed
           << "\n";
        os << "lag,analytic,estimated,abs_error,se\n";
        for (std::size_t k = 0; k < lags.size(); ++k) {
            const auto est =
                grf::sim::empirical_covariance(fields, {{0, lags[k] % grid_side}});
            os << lags[k] << ',' << fmt(target[k]) << ',' << fmt(est[0].estimate) << ','
               << fmt(std::fabs(est[0].estimate - target[k])) << ',' << fmt(est[0].se) << "\n";
        }
    }
    write_text(out_path, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"grf: Gaussian random fields via covariance models and sparse precisions"};
    app.require_subcommand(1);

    std::string model_path, out_path, format = "csv", lags = "0,1,2,3,4,5";
    std::string points_path, observe_path, targets, sizes;
    std::uint64_t seed = kDefaultSeed;
    int ugrid = 41, grid_side = 0, samples = 2000, repetitions = 5;
    double spacing = 1.0;

    auto* eval = app.add_subcommand("eval-cov", "Tabulate a covariance model");
    eval->add_option("--model", model_path, "model JSON file")->required();
    eval->add_option("--lags", lags, "comma-separated lags / time points");
    eval->add_option("--ugrid", ugrid, "points on the [-1,1] sphere-cosine grid");
    eval->add_option("--format", format, "csv | mm (mm: gmrf precision export)");
    eval->add_option("--out", out_path, "output path (default stdout)");

    auto* sample = app.add_subcommand("sample", "Draw one field realization");
    sample->add_option("--model", model_path, "model JSON file")->required();
    sample->add_option("--grid", grid_side, "grid side for whittle sampling");
    sample->add_option("--spacing", spacing, "grid spacing");
    sample->add_option("--points", points_path, "CSV of sphere points");
    sample->add_option("--seed", seed, "RNG seed (default 20250101)");
    sample->add_option("--format", format, "csv | pgm");
    sample->add_option("--out", out_path, "output path");

    auto* krige = app.add_subcommand("krige", "Conditional mean/variance on a gmrf model");
    krige->add_option("--model", model_path, "gmrf model JSON file")->required();
    krige->add_option("--observe", observe_path, "CSV of vertex,value observations")->required();
    krige->add_option("--targets", targets, "target vertices (default: all unobserved)");
    krige->add_option("--out", out_path, "output path");

    auto* validate = app.add_subcommand("validate", "Run the model validation battery");
    validate->add_option("--model", model_path, "model JSON file")->required();
    validate->add_option("--seed", seed, "RNG seed for the battery");
    validate->add_option("--out", out_path, "also write the report here");

    auto* bench = app.add_subcommand("bench", "Time sparse vs dense factorization");
    bench->add_option("--sizes", sizes, "matrix orders (squares of grid sides)")->required();
    bench->add_option("--repetitions", repetitions, "timed repetitions per size");
    bench->add_option("--out", out_path, "output path");

    auto* compare = app.add_subcommand("compare", "Cross-verify the two routes");
    compare->add_option("--model", model_path, "comparison spec JSON")->required();
    compare->add_option("--lags", lags, "lags to compare");
    compare->add_option("--grid", grid_side, "grid side (whittle route)")->default_val(64);
    compare->add_option("--samples", samples, "sample count (whittle route)");
    compare->add_option("--seed", seed, "RNG seed");
    compare->add_option("--out", out_path, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (eval->parsed())
            return cmd_eval_cov(model_path, lags, ugrid, format, out_path);
        if (sample->parsed())
            return cmd_sample(model_path, grid_side, spacing, points_path, seed, format, out_path);
        if (krige->parsed()) return cmd_krige(model_path, observe_path, targets, out_path);
        if (validate->parsed()) return cmd_validate(model_path, seed, out_path);
        if (bench->parsed()) return cmd_bench(sizes, repetitions, out_path);
        if (compare->parsed())
            return cmd_compare(model_path, lags, grid_side, samples, seed, out_path);
    } catch (const grf::ValidationError& e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
