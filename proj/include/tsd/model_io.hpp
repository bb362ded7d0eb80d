#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "tsd/envelope.hpp"
#include "tsd/levy_model.hpp"

namespace tsd {

inline constexpr int kModelSchema = 1;
inline constexpr int kEnvelopeSchema = 1;

/// Model document:
///   {"model_schema": 1, "id": str, "d": 1|2, "alpha": a,
///    "spectral": {"type": "atoms", "directions": [[..], ..], "weights": [..], "symmetrize": bool}
///              | {"type": "density", "uniform": true, "mass": m}
///              | {"type": "density", "cos": [a0, a1, ..], "sin": [b1, ..]}   g = a0 + sum a_k cos 2k phi + b_k sin 2k phi
///    "profile": {"kind": "constant", "value": v} | {"kind": "poly_tempered", "m": m}
///             | {"kind": "exp_tempered", "a": a, "c1": c1, "c2": c2} | {"kind": "truncated", "s0": s0},
///    "profiles": [profile, ..]   one per atom, instead of "profile"}
/// or {"model_schema": 1, "preset": "relativistic", "d": d, "alpha": a, "mass": m}.
/// DomainError on any malformed or unsupported field.
LevyModel model_from_json(const nlohmann::json& j);
LevyModel load_model(const std::filesystem::path& path);

/// Inverse of model_from_json for models built from the kinds above (uniform densities only).
/// UnsupportedError for custom profiles and non-uniform densities.
nlohmann::json model_to_json(const LevyModel& model);

RadialProfile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const RadialProfile& q);

/// Envelope document:
///   {"envelope_schema": 1, "id": str, "side": "upper"|"lower", "regime": "small_t"|"large_t",
///    "d": d, "alpha": a, "gamma": g, "beta": b, "profile": {..},
///    "cone": {"directions": [[..]], "arcs": [[a, b]], "tol": 1e-6}}
/// "preset": "relativistic_lower" fills profile (1+s)^{(d+alpha-1)/2} e^{-2s} and gamma = d.
EnvelopeSpec envelope_from_json(const nlohmann::json& j);
EnvelopeSpec load_envelope(const std::filesystem::path& path);
nlohmann::json envelope_to_json(const EnvelopeSpec& spec);

/// Reads a JSON file; DomainError with the path on I/O or parse failure.
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace tsd
