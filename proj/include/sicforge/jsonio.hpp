// Shared JSON wire formats.  Complex numbers are [re, im] pairs, matrices are
// row-major nested arrays, floats are serialized with 17 significant digits
// (round-trip exact for doubles).
//
//   SicSet       {"dim": d, "projectors": [[[re,im] x d] x d] x d², "meta": {...}}
//   SearchState  {"dim", "qtilde", "objective", "v", "residual_eq41",
//                 "seed", "iterations", "converged"}
//   Directions   {"directions": [[nx,ny,nz], ...]}
//   Density      {"dim": d, "rho": [[[re,im] x d] x d]}
//   Symbol       {"scheme", "index", "values"}

#pragma once

#include <json.hpp>
#include <string>

#include "sicforge/sic.hpp"
#include "sicforge/sicsearch.hpp"
#include "sicforge/spintomo.hpp"
#include "sicforge/starprod.hpp"

namespace sicforge::jsonio {

using json = nlohmann::ordered_json;

/// Input-side failure (malformed file, wrong shape, bad field).
class ParseError : public std::runtime_error {
  public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Serialize with floats as %.17g.
std::string dump(const json& j, int indent = 2);

void write_file(const std::string& path, const json& j);
json read_file(const std::string& path);  // throws ParseError with diagnostics

json complex_to_json(qmat::Complex z);
json matrix_to_json(const qmat::Matrix& m);
qmat::Matrix matrix_from_json(const json& j);

struct SicSetMeta {
    std::string source = "unspecified";
    std::uint64_t seed = 0;
    double tolerance = 1e-10;
};

json sic_set_to_json(const sic::SicSet& s, const SicSetMeta& meta);
/// Verifies at `tol` if nonnegative, else at the file's meta.tolerance.
sic::SicSet sic_set_from_json(const json& j, double tol = -1.0);

json search_state_to_json(const sicsearch::SearchState& st);

spintomo::DirectionSet directions_from_json(const json& j);
json directions_to_json(const spintomo::DirectionSet& ds);

json density_to_json(const qmat::Matrix& rho);
qmat::Matrix density_from_json(const json& j);

json symbol_to_json(const starprod::Symbol& f, const starprod::Scheme& s);
json scheme_to_json(const starprod::Scheme& s);
json kernel_to_json(const starprod::KernelTensor& k);

}  // namespace sicforge::jsonio
