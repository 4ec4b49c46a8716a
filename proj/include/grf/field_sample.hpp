#ifndef GRF_FIELD_SAMPLE_HPP
#define GRF_FIELD_SAMPLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "grf/errors.hpp"

namespace grf::sim {

// Where a realized field lives: a periodic 1D/2D grid or an explicit point
// set (graph vertices, sphere points).
struct Geometry {
    enum class Kind { grid1d, grid2d, points };

    Kind kind = Kind::points;
    int nx = 0;
    int ny = 0;
    double spacing = 1.0;
    std::vector<std::vector<double>> points;

    static Geometry grid(int nx, int ny, double spacing) {
        if (nx < 1 || ny < 1 || !(spacing > 0.0))
            throw DomainError("Geometry: invalid grid spec");
        Geometry g;
        g.kind = (ny == 1) ? Kind::grid1d : Kind::grid2d;
        g.nx = nx;
        g.ny = ny;
        g.spacing = spacing;
        return g;
    }

    static Geometry point_set(std::vector<std::vector<double>> pts) {
        Geometry g;
        g.kind = Kind::points;
        g.points = std::move(pts);
        return g;
    }

    std::size_t size() const {
        return kind == Kind::points ? points.size()
                                    : static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    }

    bool operator==(const Geometry& o) const {
        return kind == o.kind && nx == o.nx && ny == o.ny && spacing == o.spacing &&
               points == o.points;
    }
};

// One realized field, with the seed and model that produced it.
struct FieldSample {
    std::vector<double> values;
    Geometry geometry;
    std::uint64_t seed = 0;
    std::string model_id;
};

}  // namespace grf::sim

#endif  // GRF_FIELD_SAMPLE_HPP
