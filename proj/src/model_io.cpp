#include "grf/model_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace grf::io {

using nlohmann::json;

namespace {

void require_fields(const json& j, const std::set<std::string>& allowed,
                    const std::string& what) {
    if (!j.is_object()) throw ConfigError(what + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError(what + ": unknown field '" + key + "'");
    }
}

double get_number(const json& j, const std::string& key, const std::string& what) {
    if (!j.contains(key)) throw ConfigError(what + ": missing field '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(what + ": field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, const std::string& what) {
    if (!j.contains(key)) throw ConfigError(what + ": missing field '" + key + "'");
    if (!j.at(key).is_number_integer())
        throw ConfigError(what + ": field '" + key + "' must be an integer");
    return j.at(key).get<int>();
}

std::vector<double> get_array(const json& j, const std::string& key, const std::string& what) {
    if (!j.contains(key)) throw ConfigError(what + ": missing field '" + key + "'");
    if (!j.at(key).is_array()) throw ConfigError(what + ": field '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw ConfigError(what + ": array '" + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

cov::CharFunction parse_cf(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError("char function: expected an object with a 'kind' string");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gaussian") {
        require_fields(j, {"kind", "sigma2"}, "gaussian cf");
        return cov::CharFunction::gaussian(get_number(j, "sigma2", "gaussian cf"));
    }
    if (kind == "cauchy") {
        require_fields(j, {"kind", "gamma"}, "cauchy cf");
        return cov::CharFunction::cauchy(get_number(j, "gamma", "cauchy cf"));
    }
    if (kind == "student_spectral") {
        require_fields(j, {"kind", "nu", "kappa"}, "student_spectral cf");
        return cov::CharFunction::student_spectral(get_number(j, "nu", "student_spectral cf"),
                                                   get_number(j, "kappa", "student_spectral cf"));
    }
    if (kind == "tabulated") {
        require_fields(j, {"kind", "t", "value"}, "tabulated cf");
        return cov::CharFunction::tabulated(get_array(j, "t", "tabulated cf"),
                                            get_array(j, "value", "tabulated cf"));
    }
    throw ConfigError("char function: unknown kind '" + kind + "'");
}

json cf_to_json(const cov::CharFunction& cf) {
    json j;
    switch (cf.kind()) {
        case cov::CharFunction::Kind::gaussian:
            j["kind"] = "gaussian";
            j["sigma2"] = cf.params()[0];
            break;
        case cov::CharFunction::Kind::cauchy:
            j["kind"] = "cauchy";
            j["gamma"] = cf.params()[0];
            break;
        case cov::CharFunction::Kind::student_spectral:
            j["kind"] = "student_spectral";
            j["nu"] = cf.params()[0];
            j["kappa"] = cf.params()[1];
            break;
        case cov::CharFunction::Kind::tabulated:
            j["kind"] = "tabulated";
            j["t"] = cf.grid_t();
            j["value"] = cf.grid_v();
            break;
    }
    return j;
}

cov::CovariancePtr parse_covariance(const json& j);

cov::SchoenbergSeries parse_series(const json& j, const std::string& what) {
    return cov::SchoenbergSeries(get_int(j, "sphere_dim", what), get_array(j, "coeffs", what),
                                 get_number(j, "scale", what));
}

cov::CovariancePtr parse_covariance(const json& j) {
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
        throw ConfigError("model: expected an object with a 'family' string");
    const std::string family = j.at("family").get<std::string>();
    if (family == "matern") {
        require_fields(j, {"family", "nu", "kappa", "sigma2", "d"}, "matern model");
        return cov::make_matern(cov::MaternParams(
            get_number(j, "nu", "matern model"), get_number(j, "kappa", "matern model"),
            get_number(j, "sigma2", "matern model"), get_int(j, "d", "matern model")));
    }
    if (family == "schoenberg") {
        require_fields(j, {"family", "sphere_dim", "coeffs", "scale"}, "schoenberg model");
        return cov::make_schoenberg(parse_series(j, "schoenberg model"));
    }
    if (family == "berg_porcu") {
        require_fields(j, {"family", "sphere_dim", "coeffs", "scale", "cfs"}, "berg_porcu model");
        if (!j.contains("cfs") || !j.at("cfs").is_array() || j.at("cfs").empty())
            throw ConfigError("berg_porcu model: 'cfs' must be a nonempty array");
        std::vector<cov::CharFunction> cfs;
        for (const auto& cfj : j.at("cfs")) cfs.push_back(parse_cf(cfj));
        return cov::make_berg_porcu(
            cov::GeoTemporalModel(parse_series(j, "berg_porcu model"), std::move(cfs)));
    }
    if (family == "char_function") {
        require_fields(j, {"family", "cf"}, "char_function model");
        if (!j.contains("cf")) throw ConfigError("char_function model: missing 'cf'");
        return cov::make_char_function_cov(parse_cf(j.at("cf")));
    }
    if (family == "schur_product") {
        require_fields(j, {"family", "factors"}, "schur_product model");
        if (!j.contains("factors") || !j.at("factors").is_array() || j.at("factors").size() != 2)
            throw ConfigError("schur_product model: 'factors' must be an array of two models");
        return cov::schur_product(parse_covariance(j.at("factors")[0]),
                                  parse_covariance(j.at("factors")[1]));
    }
    throw ConfigError("model: unknown family '" + family + "'");
}

json covariance_json(const cov::Covariance& model) {
    if (const auto* m = dynamic_cast<const cov::MaternCov*>(&model)) {
        json j;
        j["family"] = "matern";
        j["nu"] = m->params().nu;
        j["kappa"] = m->params().kappa;
        j["sigma2"] = m->params().sigma2;
        j["d"] = m->params().d;
        return j;
    }
    if (const auto* s = dynamic_cast<const cov::SchoenbergCov*>(&model)) {
        json j;
        j["family"] = "schoenberg";
        j["sphere_dim"] = s->series().sphere_dim;
        j["coeffs"] = s->series().coeffs;
        j["scale"] = s->series().scale;
        return j;
    }
    if (const auto* b = dynamic_cast<const cov::BergPorcuCov*>(&model)) {
        json j;
        j["family"] = "berg_porcu";
        j["sphere_dim"] = b->model().series.sphere_dim;
        j["coeffs"] = b->model().series.coeffs;
        j["scale"] = b->model().series.scale;
        j["cfs"] = json::array();
        for (const cov::CharFunction& cf : b->model().cfs) j["cfs"].push_back(cf_to_json(cf));
        return j;
    }
    if (const auto* c = dynamic_cast<const cov::CharFunctionCov*>(&model)) {
        json j;
        j["family"] = "char_function";
        j["cf"] = cf_to_json(c->cf());
        return j;
    }
    if (const auto* p = dynamic_cast<const cov::SchurProductCov*>(&model)) {
        json j;
        j["family"] = "schur_product";
        j["factors"] = json::array({covariance_json(*p->left()), covariance_json(*p->right())});
        return j;
    }
    throw ConfigError("covariance_to_json: unknown model type");
}

}  // namespace

gmrf::Graph GmrfModelSpec::build_graph() const {
    if (!graph_file.empty()) {
        std::ifstream is(graph_file);
        if (!is) throw ConfigError("gmrf model: cannot open graph file " + graph_file);
        return gmrf::read_edge_list(is);
    }
    return gmrf::grid_graph(grid_side, grid_dims);
}

ModelFile parse_model_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("model: JSON parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
        throw ConfigError("model: expected an object with a 'family' string");

    ModelFile out;
    if (j.at("family").get<std::string>() == "gmrf") {
        GmrfModelSpec spec;
        if (j.contains("graph_file")) {
            require_fields(j, {"family", "graph_file", "kappa", "m", "tau"}, "gmrf model");
            spec.graph_file = j.at("graph_file").get<std::string>();
        } else {
            require_fields(j, {"family", "grid_side", "grid_dims", "kappa", "m", "tau"},
                           "gmrf model");
            spec.grid_side = get_int(j, "grid_side", "gmrf model");
            spec.grid_dims = j.contains("grid_dims") ? get_int(j, "grid_dims", "gmrf model") : 2;
        }
        spec.kappa = get_number(j, "kappa", "gmrf model");
        spec.m = get_int(j, "m", "gmrf model");
        spec.tau = j.contains("tau") ? get_number(j, "tau", "gmrf model") : 1.0;
        gmrf::PrecisionModel validate(spec.kappa, spec.m, spec.tau);  // throws on bad params
        (void)validate;
        out.gmrf = spec;
        return out;
    }
    out.covariance = parse_covariance(j);
    return out;
}

ModelFile parse_model_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("model: cannot open file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_model_string(ss.str());
}

std::string covariance_to_json(const cov::Covariance& model) {
    return covariance_json(model).dump(2);
}

CompareSpec parse_compare_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("compare: cannot open file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("compare: JSON parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("compare") || !j.at("compare").is_string())
        throw ConfigError("compare: expected an object with a 'compare' string");

    CompareSpec spec;
    const std::string kind = j.at("compare").get<std::string>();
    if (kind == "gmrf_vs_matern") {
        require_fields(j, {"compare", "gmrf", "matern"}, "compare spec");
        spec.kind = CompareSpec::Kind::gmrf_vs_matern;
        if (!j.contains("gmrf")) throw ConfigError("compare: missing 'gmrf' model");
        const ModelFile g = parse_model_string(j.at("gmrf").dump());
        if (!g.gmrf) throw ConfigError("compare: 'gmrf' must be a gmrf-family model");
        spec.gmrf = g.gmrf;
    } else if (kind == "whittle") {
        require_fields(j, {"compare", "matern"}, "compare spec");
        spec.kind = CompareSpec::Kind::whittle;
    } else {
        throw ConfigError("compare: unknown kind '" + kind + "'");
    }
    if (!j.contains("matern")) throw ConfigError("compare: missing 'matern' model");
    const ModelFile m = parse_model_string(j.at("matern").dump());
    const auto* mc = dynamic_cast<const cov::MaternCov*>(m.covariance.get());
    if (!mc) throw ConfigError("compare: 'matern' must be a matern-family model");
    spec.matern = mc->params();
    return spec;
}

}  // namespace grf::io
