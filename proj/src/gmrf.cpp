#include "grf/gmrf.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "grf/covariance.hpp"
#include "grf/rng.hpp"

namespace grf::gmrf {

Graph::Graph(int n_, std::vector<Edge> edges_, std::vector<std::vector<double>> coords_)
    : n(n_), edges(std::move(edges_)), coords(std::move(coords_)) {
    if (n <= 0) throw DomainError("Graph: vertex count must be positive");
    if (!coords.empty() && static_cast<int>(coords.size()) != n)
        throw DomainError("Graph: coords size must match vertex count");
    for (Edge& e : edges) {
        if (e.i == e.j) throw DomainError("Graph: self-loops are not allowed");
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.i < 0 || e.j >= n) throw DomainError("Graph: edge index out of range");
        if (!std::isfinite(e.weight) || e.weight < 0.0)
            throw DomainError("Graph: edge weights must be finite and nonnegative");
    }
}

Graph grid_graph(int side, int dims) {
    if (side < 2) throw DomainError("grid_graph: side must be >= 2");
    if (dims != 1 && dims != 2) throw DomainError("grid_graph: dims must be 1 or 2");
    std::vector<Graph::Edge> edges;
    std::vector<std::vector<double>> coords;
    if (dims == 1) {
        coords.reserve(side);
        for (int i = 0; i < side; ++i) coords.push_back({static_cast<double>(i)});
        for (int i = 0; i + 1 < side; ++i) edges.push_back({i, i + 1, 1.0});
        return Graph(side, std::move(edges), std::move(coords));
    }
    const int n = side * side;
    coords.reserve(n);
    for (int iy = 0; iy < side; ++iy)
        for (int ix = 0; ix < side; ++ix)
            coords.push_back({static_cast<double>(ix), static_cast<double>(iy)});
    for (int iy = 0; iy < side; ++iy)
        for (int ix = 0; ix < side; ++ix) {
            const int v = iy * side + ix;
            if (ix + 1 < side) edges.push_back({v, v + 1, 1.0});
            if (iy + 1 < side) edges.push_back({v, v + side, 1.0});
        }
    return Graph(n, std::move(edges), std::move(coords));
}

sparse::SparseMatrix graph_laplacian(const Graph& g) {
    std::vector<sparse::Triplet> t;
    t.reserve(g.edges.size() * 2 + g.n);
    for (const Graph::Edge& e : g.edges) {
        t.push_back({e.j, e.i, -e.weight});
        t.push_back({e.i, e.i, e.weight});
        t.push_back({e.j, e.j, e.weight});
    }
    // Guarantee a stored diagonal even for isolated vertices.
    for (int v = 0; v < g.n; ++v) t.push_back({v, v, 0.0});
    // from_triplets drops exact zeros; re-add epsilon-free diagonal handling:
    // a zero diagonal simply stays unstored, which is fine for L itself.
    return sparse::SparseMatrix::from_triplets(g.n, t);
}

PrecisionModel::PrecisionModel(double kappa_, int m_, double tau_)
    : kappa(kappa_), m(m_), tau(tau_) {
    if (!(kappa > 0.0)) throw DomainError("PrecisionModel: kappa must be > 0");
    if (m < 1) throw DomainError("PrecisionModel: m must be >= 1");
    if (m > 3) throw ConfigError("PrecisionModel: m > 3 would densify the precision");
    if (!(tau > 0.0)) throw DomainError("PrecisionModel: tau must be > 0");
}

namespace {

// Full (both triangles) CSC view of a symmetric lower-stored matrix.
struct FullCsc {
    int n;
    std::vector<int> ptr, ind;
    std::vector<double> val;
};

FullCsc to_full(const sparse::SparseMatrix& a) {
    const int n = a.order();
    FullCsc f;
    f.n = n;
    f.ptr.assign(n + 1, 0);
    for (int c = 0; c < n; ++c)
        for (int p = a.col_ptr()[c]; p < a.col_ptr()[c + 1]; ++p) {
            const int r = a.row_ind()[p];
            ++f.ptr[c + 1];
            if (r != c) ++f.ptr[r + 1];
        }
    std::partial_sum(f.ptr.begin(), f.ptr.end(), f.ptr.begin());
    f.ind.resize(f.ptr[n]);
    f.val.resize(f.ptr[n]);
    std::vector<int> cursor(f.ptr.begin(), f.ptr.end() - 1);
    for (int c = 0; c < n; ++c)
        for (int p = a.col_ptr()[c]; p < a.col_ptr()[c + 1]; ++p) {
            const int r = a.row_ind()[p];
            const double v = a.values()[p];
            f.ind[cursor[c]] = r;
            f.val[cursor[c]] = v;
            ++cursor[c];
            if (r != c) {
                f.ind[cursor[r]] = c;
                f.val[cursor[r]] = v;
                ++cursor[r];
            }
        }
    return f;
}

// C = A * B for full CSC operands (standard scatter-gather column product).
FullCsc multiply(const FullCsc& a, const FullCsc& b) {
    const int n = a.n;
    FullCsc c;
    c.n = n;
    c.ptr.assign(n + 1, 0);
    std::vector<int> mark(n, -1);
    std::vector<double> work(n, 0.0);
    std::vector<int> cols;
    for (int j = 0; j < n; ++j) {
        cols.clear();
        for (int pb = b.ptr[j]; pb < b.ptr[j + 1]; ++pb) {
            const int k = b.ind[pb];
            const double bkj = b.val[pb];
            for (int pa = a.ptr[k]; pa < a.ptr[k + 1]; ++pa) {
                const int i = a.ind[pa];
                if (mark[i] != j) {
                    mark[i] = j;
                    work[i] = 0.0;
                    cols.push_back(i);
                }
                work[i] += a.val[pa] * bkj;
            }
        }
        std::sort(cols.begin(), cols.end());
        for (int i : cols) {
            c.ind.push_back(i);
            c.val.push_back(work[i]);
        }
        c.ptr[j + 1] = static_cast<int>(c.ind.size());
    }
    return c;
}

sparse::SparseMatrix lower_of(const FullCsc& f, double scale) {
    std::vector<sparse::Triplet> t;
    for (int j = 0; j < f.n; ++j)
        for (int p = f.ptr[j]; p < f.ptr[j + 1]; ++p)
            if (f.ind[p] >= j) t.push_back({f.ind[p], j, scale * f.val[p]});
    return sparse::SparseMatrix::from_triplets(f.n, t);
}

}  // namespace

sparse::SparseMatrix build_precision(const Graph& g, const PrecisionModel& p) {
    const sparse::SparseMatrix lap = graph_laplacian(g);
    std::vector<sparse::Triplet> base = lap.to_triplets();
    for (int v = 0; v < g.n; ++v) base.push_back({v, v, p.kappa * p.kappa});
    const sparse::SparseMatrix b = sparse::SparseMatrix::from_triplets(g.n, base);
    if (p.m == 1) {
        if (p.tau == 1.0) return b;
        std::vector<sparse::Triplet> scaled = b.to_triplets();
        for (auto& t : scaled) t.value *= p.tau;
        return sparse::SparseMatrix::from_triplets(g.n, scaled);
    }
    const FullCsc bf = to_full(b);
    FullCsc acc = multiply(bf, bf);
    if (p.m == 3) acc = multiply(acc, bf);
    return lower_of(acc, p.tau);
}

GMRF::GMRF(sparse::SparseMatrix q, std::vector<double> mu, sparse::OrderMethod ordering)
    : q_(std::move(q)), factor_(sparse::sparse_cholesky(q_, sparse::reorder(ordering, q_))),
      mu_(std::move(mu)) {
    if (mu_.empty()) mu_.assign(q_.order(), 0.0);
    if (static_cast<int>(mu_.size()) != q_.order())
        throw DomainError("GMRF: mean vector size does not match precision order");
}

std::vector<sim::FieldSample> sample(const GMRF& model, std::uint64_t seed, int count,
                                     const std::vector<std::vector<double>>& coords) {
    if (count < 1) throw DomainError("sample: count must be >= 1");
    const int n = model.size();
    const sparse::CholFactor& f = model.factor();
    const std::vector<int>& lp = f.l.col_ptr();
    const std::vector<int>& li = f.l.row_ind();
    const std::vector<double>& lx = f.l.values();
    const std::vector<int>& perm = f.ordering.perm;

    sim::Geometry geom = coords.empty()
                             ? sim::Geometry::point_set(std::vector<std::vector<double>>(n))
                             : sim::Geometry::point_set(coords);

    std::vector<sim::FieldSample> out;
    out.reserve(count);
    std::vector<double> y(n), x(n);
    for (int s = 0; s < count; ++s) {
        const rng::CounterRng gen(seed, static_cast<std::uint64_t>(s));
        for (int k = 0; k < n; ++k) y[k] = gen.normal(static_cast<std::uint64_t>(k));
        // L^T y' = z  (backward substitution over the columns of L)
        for (int j = n - 1; j >= 0; --j) {
            double v = y[j];
            for (int p = lp[j] + 1; p < lp[j + 1]; ++p) v -= lx[p] * y[li[p]];
            y[j] = v / lx[lp[j]];
        }
        for (int k = 0; k < n; ++k) x[perm[k]] = y[k];
        for (int k = 0; k < n; ++k) x[k] += model.mean()[k];
        out.push_back(sim::FieldSample{x, geom, seed, "gmrf"});
    }
    return out;
}

bool dempster_check(const sparse::SparseMatrix& q, int i, int j) {
    if (i == j) throw DomainError("dempster_check: vertices must differ");
    return q.at(i, j) == 0.0;
}

KrigeResult krige(const GMRF& model, const std::map<int, double>& observed,
                  const std::vector<int>& targets) {
    const int n = model.size();
    if (observed.empty()) throw DomainError("krige: need at least one observation");
    for (const auto& [v, val] : observed) {
        if (v < 0 || v >= n) throw DomainError("krige: observed vertex out of range");
        (void)val;
    }
    for (int t : targets) {
        if (t < 0 || t >= n) throw DomainError("krige: target vertex out of range");
        if (observed.count(t)) throw DomainError("krige: observed and target sets overlap");
    }

    // Unobserved block.
    std::vector<int> to_sub(n, -1);
    std::vector<int> unobs;
    unobs.reserve(n - observed.size());
    for (int v = 0; v < n; ++v)
        if (!observed.count(v)) {
            to_sub[v] = static_cast<int>(unobs.size());
            unobs.push_back(v);
        }
    const int nu = static_cast<int>(unobs.size());
    if (nu == 0) throw DomainError("krige: no unobserved vertices");

    const sparse::SparseMatrix& q = model.precision();
    std::vector<sparse::Triplet> sub;
    std::vector<double> rhs(nu, 0.0);  // Q_UO (x_O - mu_O)
    for (int c = 0; c < n; ++c)
        for (int p = q.col_ptr()[c]; p < q.col_ptr()[c + 1]; ++p) {
            const int r = q.row_ind()[p];
            const double v = q.values()[p];
            const bool r_u = to_sub[r] >= 0;
            const bool c_u = to_sub[c] >= 0;
            if (r_u && c_u) {
                sub.push_back({to_sub[r], to_sub[c], v});
            } else if (r_u && !c_u) {
                rhs[to_sub[r]] += v * (observed.at(c) - model.mean()[c]);
            } else if (!r_u && c_u) {
                rhs[to_sub[c]] += v * (observed.at(r) - model.mean()[r]);
            }
        }
    const sparse::SparseMatrix quu = sparse::SparseMatrix::from_triplets(nu, sub);
    const sparse::CholFactor f =
        sparse::sparse_cholesky(quu, sparse::reorder(sparse::OrderMethod::amd, quu));

    const std::vector<double> shift = sparse::solve(f, rhs);

    KrigeResult res;
    res.targets = targets;
    res.mean.reserve(targets.size());
    res.variance.reserve(targets.size());
    std::vector<double> e(nu, 0.0);
    for (int t : targets) {
        const int ts = to_sub[t];
        res.mean.push_back(model.mean()[t] - shift[ts]);
        e[ts] = 1.0;
        const std::vector<double> col = sparse::solve(f, e);
        e[ts] = 0.0;
        res.variance.push_back(col[ts]);
    }
    return res;
}

double range_parameter(double nu, double kappa) {
    if (!(nu > 0.0) || !(kappa > 0.0))
        throw DomainError("range_parameter: nu and kappa must be > 0");
    return std::sqrt(8.0 * nu) / kappa;
}

GmrfMaternReport gmrf_vs_matern_error(int side, const PrecisionModel& p,
                                      const std::vector<double>& lags) {
    // The precision power m is the spectral exponent alpha, so the matched
    // smoothness on the 2D grid is nu = m - d/2 = m - 1; m = 1 would mean
    // nu = 0, which is outside the Matern family.
    if (p.m < 2) throw ConfigError("gmrf_vs_matern_error: m must be 2 or 3 (nu = m - 1 > 0)");
    const Graph g = grid_graph(side, 2);
    const sparse::SparseMatrix q = build_precision(g, p);
    const DenseMatrix sigma = chol_inverse(q.to_dense());

    const double nu = p.m - 1.0;
    const cov::MaternParams mp(nu, p.kappa, 1.0, 2);
    const double range = range_parameter(nu, p.kappa);
    const int ring = static_cast<int>(std::ceil(range));

    GmrfMaternReport report;
    report.nu = nu;
    report.range = range;
    report.boundary_ring = ring;
    report.boundary_max_error = 0.0;

    const auto vid = [side](int ix, int iy) { return iy * side + ix; };
    const auto corr = [&](int a, int b) {
        return sigma(a, b) / std::sqrt(sigma(a, a) * sigma(b, b));
    };
    const auto interior = [&](int ix, int iy) {
        return ix >= ring && iy >= ring && ix < side - ring && iy < side - ring;
    };

    for (double lag : lags) {
        LagComparison row{lag, cov::matern_correlation(mp, lag), 0.0, 0.0, 0};
        if (lag == 0.0) {
            row.gmrf_mean = 1.0;
            row.pair_count = 1;
            report.lags.push_back(row);
            continue;
        }
        // Integer offsets at exactly this Euclidean distance.
        std::vector<std::pair<int, int>> offsets;
        const int reach = static_cast<int>(std::ceil(lag));
        for (int a = 0; a <= reach; ++a)
            for (int b = 0; b <= reach; ++b)
                if ((a || b) && std::fabs(std::hypot(a, b) - lag) < 1e-9)
                    offsets.emplace_back(a, b);
        if (offsets.empty())
            throw ConfigError("gmrf_vs_matern_error: lag " + std::to_string(lag) +
                              " is not realizable on the unit grid");
        double sum = 0.0;
        for (const auto& [a, b] : offsets)
            for (int iy = 0; iy + b < side; ++iy)
                for (int ix = 0; ix + a < side; ++ix) {
                    const double c = corr(vid(ix, iy), vid(ix + a, iy + b));
                    const double err = std::fabs(c - row.matern);
                    if (interior(ix, iy) && interior(ix + a, iy + b)) {
                        sum += c;
                        row.max_abs_error = std::max(row.max_abs_error, err);
                        ++row.pair_count;
                    } else {
                        report.boundary_max_error = std::max(report.boundary_max_error, err);
                    }
                }
        if (row.pair_count == 0)
            throw ConfigError("gmrf_vs_matern_error: no interior pairs at lag " +
                              std::to_string(lag) + " (grid too small for the range)");
        row.gmrf_mean = sum / static_cast<double>(row.pair_count);
        report.lags.push_back(row);
    }

    // Observed correlation at the range distance (axis-aligned, interior).
    const int rlag = std::max(1, static_cast<int>(std::round(range)));
    double sum = 0.0;
    long cnt = 0;
    for (int iy = ring; iy < side - ring; ++iy)
        for (int ix = ring; ix + rlag < side - ring; ++ix) {
            sum += corr(vid(ix, iy), vid(ix + rlag, iy));
            ++cnt;
        }
    report.correlation_at_range = cnt > 0 ? sum / static_cast<double>(cnt) : 0.0;
    return report;
}

void write_edge_list(const Graph& g, std::ostream& os) {
    os << "# " << g.n << " vertices, " << g.edges.size() << " edges\n";
    os << "# n " << g.n << "\n";
    char buf[96];
    for (const Graph::Edge& e : g.edges) {
        std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", e.i, e.j, e.weight);
        os << buf;
    }
}

Graph read_edge_list(std::istream& is) {
    std::string line;
    std::vector<Graph::Edge> edges;
    int n = 0;
    bool n_from_header = false;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            // "# n <count>" pins the vertex count; otherwise it is inferred.
            std::istringstream cs(line.substr(hash + 1));
            std::string tag;
            int value = 0;
            if (cs >> tag >> value && tag == "n") {
                n = value;
                n_from_header = true;
            }
            line.erase(hash);
        }
        std::istringstream ls(line);
        int i = 0, j = 0;
        double w = 0.0;
        if (!(ls >> i >> j >> w)) continue;
        edges.push_back({i, j, w});
        if (!n_from_header) n = std::max({n, i + 1, j + 1});
    }
    if (n == 0) throw ConfigError("read_edge_list: no vertices found");
    return Graph(n, std::move(edges));
}

}  // namespace grf::gmrf
