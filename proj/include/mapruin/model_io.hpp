#pragma once

#include "mapruin/model.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace mapruin {

/// Model file schema (JSON):
///
///     {
///       "states": 2,
///       "v": [-1.0, 1.0],
///       "C": [[-1.5, 1.0], [2.0, -2.0]],
///       "D": [[0.5, 0.0], [0.0, 0.0]],
///       "jumps": [
///         {"from": 0, "to": 0, "mixture": [
///            {"weight": 0.7, "kind": "exponential", "params": {"rate": 2.0}},
///            {"weight": 0.3, "kind": "erlang", "params": {"shape": 2, "rate": 3.0}}]}
///       ]
///     }
///
/// `kind` is one of atom (params: location), exponential (rate) or erlang
/// (shape, rate). Unknown keys anywhere are rejected. `jumps` may be omitted
/// when D is zero.
RawModel parse_model(const nlohmann::json& doc);
RawModel parse_model_text(std::string_view text);
RawModel load_model_file(const std::filesystem::path& path);

nlohmann::json to_json(const MapModel& model);

/// Reference models shipped with the library: "cl" (exponential-claims
/// Cramer-Lundberg), "onoff" (two-state fluid, no jumps) and "mixed3"
/// (three states, atom/exponential/Erlang jumps).
bool is_builtin_model(std::string_view name);
RawModel builtin_model(std::string_view name);

/// A path if it exists, otherwise a builtin name; throws ParseError.
RawModel resolve_model(const std::string& path_or_name);

}  // namespace mapruin
