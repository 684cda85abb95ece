#pragma once

#include <string>

#include "json.hpp"

namespace bmg {

using json = nlohmann::json;

// Deterministic serialization: objects keep sorted keys (nlohmann default),
// numbers are integers only, indentation fixed. Used for every artifact the
// tool writes, so byte-identical output follows from value equality.
std::string canonical_dump(const json& j);

std::string sha256_hex(const std::string& data);

std::string read_file(const std::string& path);       // throws refusal_error if unreadable
void write_file(const std::string& path, const std::string& content);

} // namespace bmg
