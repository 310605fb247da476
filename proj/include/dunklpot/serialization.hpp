#pragma once

#include <json.hpp>

#include "dunklpot/root_system.hpp"

namespace dunklpot {

using json = nlohmann::json;

/// git describe of the source tree the library was built from.
const char* library_version();

json rational_to_json(const Rational& q);
Rational rational_from_json(const json& j);

/// {family, rank, ambient_dim, span_only, simple_roots: [[[num,den],...],...], multiplicities}
json root_system_to_json(const RootSystem& rs);
RootSystem root_system_from_json(const json& j, const BuildOptions& opt = {});

}  // namespace dunklpot
