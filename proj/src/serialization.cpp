#include "dunklpot/serialization.hpp"

#include "dunklpot/errors.hpp"

namespace dunklpot {

const char* library_version() { return DUNKLPOT_VERSION; }

json rational_to_json(const Rational& q) {
    return json::array({q.get_num().get_str(), q.get_den().get_str()});
}

Rational rational_from_json(const json& j) {
    auto as_str = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (j.is_array() && j.size() == 2) {
        Rational q(mpz_class(as_str(j[0])), mpz_class(as_str(j[1])));
        if (q.get_den() == 0) throw InvalidArgument("zero denominator");
        q.canonicalize();
        return q;
    }
    if (j.is_number_integer()) return Rational(j.get<long>());
    throw InvalidArgument("rational must be a [num, den] pair");
}

json root_system_to_json(const RootSystem& rs) {
    json simple = json::array();
    for (const auto& s : rs.simple_roots()) {
        json v = json::array();
        for (const auto& c : s) v.push_back(rational_to_json(c));
        simple.push_back(v);
    }
    json mult = json::array();
    for (const auto& k : rs.simple_multiplicities()) mult.push_back(rational_to_json(k));
    return {{"family", family_name(rs.family())},
            {"rank", rs.rank()},
            {"ambient_dim", rs.ambient_dim()},
            {"span_only", rs.span_only()},
            {"simple_roots", simple},
            {"multiplicities", mult}};
}

RootSystem root_system_from_json(const json& j, const BuildOptions& base) {
    BuildOptions opt = base;
    opt.span_only = j.value("span_only", false);
    const int dim = j.at("ambient_dim").get<int>();
    std::string fam = j.value("family", std::string("explicit"));
    if (fam == "trivial") return trivial_root_system(dim);
    std::vector<RVec> simple;
    for (const auto& s : j.at("simple_roots")) {
        RVec v;
        for (const auto& c : s) v.push_back(rational_from_json(c));
        if (static_cast<int>(v.size()) != dim) throw InvalidArgument("simple root length differs from ambient_dim");
        simple.push_back(std::move(v));
    }
    if (j.contains("rank") && j.at("rank").get<std::size_t>() != simple.size())
        throw InvalidArgument("rank does not match the number of simple roots");
    std::vector<Rational> mult;
    if (j.contains("multiplicities"))
        for (const auto& k : j.at("multiplicities")) mult.push_back(rational_from_json(k));
    return root_system_from_simple_roots(std::move(simple), std::move(mult), opt);
}

}  // namespace dunklpot
