#pragma once

#include <string>
#include <vector>

#include "mdms/construction.hpp"
#include "mdms/modarith.hpp"
#include "mdms/search.hpp"
#include "mdms/setops.hpp"
#include "mdms/verify.hpp"

namespace mdms {

/// Serialization style. Compact JSON with hex bitsets is the wire default;
/// pretty switches to indented JSON with coordinate element lists. Both
/// styles are deterministic and both parse back.
struct JsonStyle {
    bool pretty = false;
};

// Format version tags embedded in the corresponding artifacts.
inline constexpr const char* kStateFormat = "mdms-state/1";
inline constexpr const char* kCertFormat = "mdms-cert/1";
inline constexpr const char* kSearchFormat = "mdms-search/1";
inline constexpr const char* kManifestFormat = "mdms-manifest/1";

std::string group_spec_to_json(const GroupSpec& spec, JsonStyle style = {});
GroupSpecPtr group_spec_from_json(const std::string& text);

/// {"spec":..., "elements":[...]} in pretty style, {"spec":...,
/// "cardinality":..., "bits_hex":"..."} otherwise. bits_hex encodes the
/// membership bitset bytewise, byte j covering element indices 8j..8j+7
/// (LSB first), two lowercase hex digits per byte in increasing j.
std::string group_set_to_json(const GroupSet& set, JsonStyle style = {});
GroupSet group_set_from_json(const std::string& text);

std::string int_set_to_json(const IntSet& set);
IntSet int_set_from_json(const std::string& text);

/// One element as its per-module coordinate array.
std::string element_to_json(const GroupSpec& spec, std::uint64_t index);
std::uint64_t element_from_json(const GroupSpec& spec, const std::string& text);

std::string state_to_json(const ConstructionState& state, JsonStyle style = {});
ConstructionState state_from_json(const std::string& text);

std::string certificates_to_json(const std::vector<Certificate>& certificates,
                                 JsonStyle style = {});

std::string search_report_to_json(const SearchReport& report, JsonStyle style = {});

/// FNV-1a 64-bit content hash, "fnv1a64:<16 hex digits>"; used for the
/// run manifest's input fingerprints.
std::string content_hash(const std::string& bytes);

}  // namespace mdms
