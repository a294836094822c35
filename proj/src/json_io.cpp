#include "sigtree/json_io.hpp"

#include <cmath>

#include "sigtree/errors.hpp"

namespace sigtree::json {

namespace {

template <class T>
T field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("field \"") + key + "\": " + e.what());
    }
}

std::vector<double> finite_row(const json& row, const char* what) {
    if (!row.is_array()) throw ParseError(std::string(what) + " must be an array");
    std::vector<double> out;
    out.reserve(row.size());
    for (const auto& v : row) {
        if (!v.is_number()) throw ParseError(std::string(what) + " must contain numbers");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ParseError(std::string(what) + " must be finite");
        out.push_back(x);
    }
    return out;
}

}  // namespace

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

json tensor_to_json(const TruncatedTensor& t) {
    json levels = json::array();
    for (int i = 0; i <= t.step(); ++i) {
        auto lvl = t.level(i);
        levels.push_back(std::vector<double>(lvl.begin(), lvl.end()));
    }
    return {{"dim", t.dim()}, {"step", t.step()}, {"levels", levels}};
}

TruncatedTensor tensor_from_json(const json& j) {
    const int dim = field<int>(j, "dim");
    const int step = field<int>(j, "step");
    if (dim < 1 || step < 0) throw ParseError("tensor: dim must be >= 1 and step >= 0");
    TruncatedTensor t(dim, step);
    const json& levels = j.at("levels");
    if (!levels.is_array() || static_cast<int>(levels.size()) != step + 1)
        throw ParseError("tensor: expected step + 1 levels");
    for (int i = 0; i <= step; ++i) {
        const auto row = finite_row(levels[static_cast<std::size_t>(i)], "tensor level");
        auto dst = t.level(i);
        if (row.size() != dst.size())
            throw ParseError("tensor: level " + std::to_string(i) + " has " + std::to_string(row.size()) +
                             " coefficients, expected " + std::to_string(dst.size()));
        std::copy(row.begin(), row.end(), dst.begin());
    }
    return t;
}

json path_to_json(const PLPath& p) {
    json verts = json::array();
    for (const auto& v : p.vertices()) verts.push_back(v);
    return {{"dim", p.dim()}, {"vertices", verts}};
}

PLPath path_from_json(const json& j) {
    const int dim = field<int>(j, "dim");
    if (dim < 1) throw ParseError("path: dim must be >= 1");
    const json& verts = j.contains("vertices") ? j.at("vertices") : json();
    if (!verts.is_array() || verts.empty()) throw ParseError("path: at least one vertex required");
    std::vector<Point> points;
    for (const auto& row : verts) {
        auto p = finite_row(row, "vertex");
        if (static_cast<int>(p.size()) != dim) throw ParseError("path: vertex dimension does not match dim");
        points.push_back(std::move(p));
    }
    return PLPath::from_vertices(points);
}

json logsig_to_json(const LyndonBasis& basis, const LogSignatureCoordinates& coords) {
    json out = json::array();
    for (std::size_t i = 0; i < basis.words().size(); ++i) {
        std::vector<int> word;
        for (int letter : basis.words()[i]) word.push_back(letter + 1);
        out.push_back({{"word", word}, {"coeff", coords.coeffs[i]}});
    }
    return out;
}

json space_to_json(const FinitePointedSpace& s) {
    return {{"labels", s.labels}, {"dist", s.dist}, {"base", s.base}};
}

FinitePointedSpace space_from_json(const json& j) {
    FinitePointedSpace s;
    s.labels = field<std::vector<std::string>>(j, "labels");
    s.base = field<std::size_t>(j, "base");
    const json& dist = j.contains("dist") ? j.at("dist") : json();
    if (!dist.is_array()) throw ParseError("space: missing field \"dist\"");
    for (const auto& row : dist) s.dist.push_back(finite_row(row, "dist row"));
    return s;
}

json chain_to_json(const BondingChain& c) {
    json spaces = json::array();
    for (const auto& s : c.spaces) spaces.push_back(space_to_json(s));
    return {{"spaces", spaces}, {"maps", c.maps}};
}

BondingChain chain_from_json(const json& j) {
    BondingChain c;
    if (!j.is_object() || !j.contains("spaces") || !j.at("spaces").is_array())
        throw ParseError("chain: missing field \"spaces\"");
    for (const auto& s : j.at("spaces")) c.spaces.push_back(space_from_json(s));
    c.maps = field<std::vector<FiniteMap>>(j, "maps");
    return c;
}

}  // namespace sigtree::json
