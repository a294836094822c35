#pragma once

// JSON encodings shared by the CLI and the tests.
//
//   tensor  {"dim": n, "step": k, "levels": [[1.0], [...], ...]}   (ascending word order)
//   path    {"dim": n, "vertices": [[x1, ..., xn], ...]}
//   logsig  [{"word": [1, 2], "coeff": 0.5}, ...]                  (1-based letters)
//   space   {"labels": [...], "dist": [[...]], "base": i}
//   chain   {"spaces": [space, ...], "maps": [[...], ...]}          (maps[i] : X_{i+2} -> X_{i+1})
//
// Doubles are written in shortest round-trip form, so tensors survive a
// write/read cycle bit-exactly.

#include <json.hpp>

#include "sigtree/free_lie.hpp"
#include "sigtree/inverse_system.hpp"
#include "sigtree/pl_path.hpp"
#include "sigtree/tensor_algebra.hpp"

namespace sigtree::json {

using nlohmann::json;

json tensor_to_json(const TruncatedTensor& t);
TruncatedTensor tensor_from_json(const json& j);

json path_to_json(const PLPath& p);
PLPath path_from_json(const json& j);

json logsig_to_json(const LyndonBasis& basis, const LogSignatureCoordinates& coords);

json space_to_json(const FinitePointedSpace& s);
FinitePointedSpace space_from_json(const json& j);

json chain_to_json(const BondingChain& c);
BondingChain chain_from_json(const json& j);

/// Parses text, mapping nlohmann exceptions to ParseError.
json parse(const std::string& text);

}  // namespace sigtree::json
