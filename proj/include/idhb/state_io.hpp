#pragma once

#include "idhb/hyperband.hpp"

#include <filesystem>
#include <string>

namespace idhb {

// Load failure: version mismatch, checksum failure, missing section, parse
// error. The message names what is wrong and where.
struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kStateFormatVersion = 1;

// Serialize a run state as the versioned self-describing JSON document.
// Deterministic: identical states produce byte-identical documents, and
// save(load(save(x))) == save(x).
std::string save_state(const RunState& state);

// Inverse of save_state; reproduces the state bit-exactly, rng position and
// cache included.
RunState load_state(const std::string& document);

void save_state_file(const RunState& state, const std::filesystem::path& path);
RunState load_state_file(const std::filesystem::path& path);

} // namespace idhb
